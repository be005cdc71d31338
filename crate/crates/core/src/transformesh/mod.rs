//! Self-intersection removal: exterior region growing, re-triangulated
//! crossings and stitching.

mod grow;
mod stitch;

use std::borrow::Cow;
use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use grow::{FaceState, Grower, SubId};
pub use stitch::{repair_singular_vertices, stitch, SoupTriangle, TriangleSoup};

use crate::bvh::Aabb;
use crate::error::{Error, Result};
use crate::intersect::{build_catalog_from, face_boxes_bvh, IntersectionCatalog};
use crate::kernel::predicates::collinear3d;
use crate::kernel::{tri_tri_intersect, Adjacency, BoundaryDetail, PerturbationPolicy, TriTriResult};
use crate::mesh::SurfaceMesh;
use crate::winding::{close_holes, SeedFinder, WindingEngine};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformeshOptions {
    /// Keep closed components enclosed by another output component.
    pub keep_interior: bool,
    /// Accept boundaries; holes are closed temporarily for winding queries.
    pub open_surface_mode: bool,
    pub policy: PerturbationPolicy,
    /// Seed for ray directions.
    pub seed: u64,
}

impl Default for TransformeshOptions {
    fn default() -> Self {
        Self { keep_interior: false, open_surface_mode: false, policy: PerturbationPolicy::default(), seed: 0x5eed }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TransformeshStats {
    pub retries: u32,
    pub candidate_pairs: usize,
    pub intersection_segments: usize,
    pub triple_points: usize,
    pub seeds: usize,
    pub local_triangulations: usize,
    pub sub_triangles_emitted: usize,
    pub singular_vertex_copies: usize,
    pub components: usize,
    pub interior_components_dropped: usize,
    pub holes_closed: usize,
    pub wall_time_s: f64,
}

enum Attempt {
    Done(SurfaceMesh),
    Retry(BoundaryDetail),
}

pub fn transformesh(mesh: &SurfaceMesh, opts: &TransformeshOptions) -> Result<SurfaceMesh> {
    transformesh_with_stats(mesh, opts).map(|(m, _)| m)
}

pub fn transformesh_with_stats(
    mesh: &SurfaceMesh,
    opts: &TransformeshOptions,
) -> Result<(SurfaceMesh, TransformeshStats)> {
    let start = Instant::now();
    opts.policy.validate()?;
    if !opts.open_surface_mode && !mesh.is_closed() {
        return Err(Error::OpenMesh("the exterior of a surface with boundary"));
    }
    let mut stats = TransformeshStats::default();
    if mesh.is_empty() {
        return Ok((mesh.clone(), stats));
    }
    let mut attempt = 0;
    loop {
        let (m, catalog, used) = build_catalog_from(mesh, &opts.policy, attempt)?;
        stats.retries = used;
        stats.candidate_pairs = catalog.counters.candidate_pairs;
        stats.intersection_segments = catalog.segments.len();
        stats.triple_points = catalog.triples.len();
        match run_once(&m, &catalog, opts, &mut stats)? {
            Attempt::Done(out) => {
                stats.components = out.num_components();
                stats.wall_time_s = start.elapsed().as_secs_f64();
                return Ok((out, stats));
            }
            Attempt::Retry(detail) => {
                log::debug!("numerical failure {detail:?} while growing, perturbing again");
                attempt = used + 1;
                if attempt > opts.policy.max_retries {
                    return Err(Error::RetriesExhausted { attempts: opts.policy.max_retries, detail });
                }
            }
        }
    }
}

fn run_once(
    m: &SurfaceMesh,
    catalog: &IntersectionCatalog,
    opts: &TransformeshOptions,
    stats: &mut TransformeshStats,
) -> Result<Attempt> {
    let closed: Cow<SurfaceMesh> = if opts.open_surface_mode {
        let (c, closure) = close_holes(m);
        stats.holes_closed = closure.num_loops();
        Cow::Owned(c)
    } else {
        Cow::Borrowed(m)
    };
    let engine = WindingEngine::new(&closed);
    let mut finder = SeedFinder::new(m.num_faces(), opts.seed);
    let mut grower = Grower::new(m, catalog);
    stats.seeds = 0;
    while let Some(seed) = finder.next_seed(m, catalog, &engine)? {
        let before = grower.emitted.len();
        match grower.grow(seed) {
            Ok(_) => {}
            Err(d) => return Ok(Attempt::Retry(d)),
        }
        for &(f, _) in &grower.emitted[before..] {
            if !catalog.is_intersected(f) {
                finder.mark_visited(f);
            }
        }
        stats.seeds += 1;
    }
    stats.local_triangulations = grower.triangulations_built;
    stats.sub_triangles_emitted = grower.emitted.len();
    if grower.emitted.is_empty() {
        return Ok(Attempt::Done(SurfaceMesh::new()));
    }

    let out = if catalog.is_empty() {
        // nothing was cut: keep the input's own numbering
        let keep: Vec<bool> = grower.state.iter().map(|&s| s != FaceState::Unvisited).collect();
        if keep.iter().all(|&k| k) {
            m.clone()
        } else {
            m.extract_faces(&keep)
        }
    } else {
        let raw = match grower.assemble() {
            Ok(r) => r,
            Err(d) => return Ok(Attempt::Retry(d)),
        };
        let (repaired, copies) = repair_singular_vertices(&raw);
        stats.singular_vertex_copies = copies;
        let mut order = grower.emitted.clone();
        order.sort_unstable();
        let cut: Vec<bool> = order.iter().map(|s| catalog.is_intersected(s.0)).collect();
        if let Some(d) = rounding_conflict(&repaired, &cut) {
            return Ok(Attempt::Retry(d));
        }
        repaired
    };

    if opts.open_surface_mode || opts.keep_interior {
        return Ok(Attempt::Done(out));
    }
    let (filtered, dropped) = drop_interior_components(&out, opts.seed)?;
    stats.interior_components_dropped = dropped;
    Ok(Attempt::Done(filtered))
}

/// Rounding the exact cut points to doubles can fold a sliver through a
/// neighbour. Checks every face cut from an intersected input face against
/// the faces near it; corners are matched by coordinates so that copies
/// made by singular-vertex repair count as shared.
fn rounding_conflict(mesh: &SurfaceMesh, cut: &[bool]) -> Option<BoundaryDetail> {
    let mut weld: HashMap<[u64; 3], u32> = HashMap::new();
    let ids: Vec<u32> = mesh
        .positions()
        .iter()
        .map(|p| {
            let n = weld.len() as u32;
            *weld.entry([p.x, p.y, p.z].map(|c| if c == 0.0 { 0 } else { c.to_bits() })).or_insert(n)
        })
        .collect();
    let welded = |f: u32| mesh.face(f).map(|v| ids[v as usize]);
    let bvh = face_boxes_bvh(mesh);
    (0..mesh.num_faces() as u32).into_par_iter().filter(|&f| cut[f as usize]).find_map_any(|f| {
        let t = mesh.triangle(f);
        if collinear3d(&t[0], &t[1], &t[2]) {
            return Some(BoundaryDetail::EdgeCollinear);
        }
        let tf = welded(f);
        bvh.box_candidates(&Aabb::of_points(&t)).into_iter().find_map(|g| {
            if g == f || (cut[g as usize] && g < f) {
                return None;
            }
            let r = tri_tri_intersect(&t, &mesh.triangle(g), Adjacency::from_indices(&tf, &welded(g)));
            match r {
                TriTriResult::Disjoint => None,
                TriTriResult::Boundary(d) => Some(d),
                TriTriResult::ProperSegment(_) => Some(BoundaryDetail::PointContact),
            }
        })
    })
}

/// Removes components that lie inside another single component, i.e.
/// whose points have nonzero winding number with respect to it.
pub fn drop_interior_components(mesh: &SurfaceMesh, seed: u64) -> Result<(SurfaceMesh, usize)> {
    let (count, label) = mesh.component_labels();
    if count < 2 {
        return Ok((mesh.clone(), 0));
    }
    let parts: Vec<SurfaceMesh> =
        (0..count as u32).map(|c| mesh.extract_faces(&label.iter().map(|&l| l == c).collect::<Vec<_>>())).collect();
    let engines: Vec<WindingEngine> = parts.iter().map(WindingEngine::new).collect();
    let mut interior = vec![false; count];
    for (c, part) in parts.iter().enumerate() {
        let f = (0..part.num_faces() as u32).max_by(|&a, &b| part.face_area(a).total_cmp(&part.face_area(b))).unwrap();
        let p = part.face_centroid(f);
        for (d, engine) in engines.iter().enumerate() {
            if d != c && engine.winding_number(&p, seed)? != 0 {
                interior[c] = true;
                break;
            }
        }
    }
    let dropped = interior.iter().filter(|&&i| i).count();
    if dropped == 0 {
        return Ok((mesh.clone(), 0));
    }
    let keep: Vec<bool> = label.iter().map(|&l| !interior[l as usize]).collect();
    Ok((mesh.extract_faces(&keep), dropped))
}
