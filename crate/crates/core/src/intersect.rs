//! Broad and narrow phase: the catalog of all face-face intersection
//! segments, with perturb-and-retry on boundary cases.

use std::collections::HashMap;
use std::time::Instant;

use nalgebra::Point3;
use rayon::prelude::*;
use serde::Serialize;

use crate::bvh::Bvh;
use crate::error::{Error, Result};
use crate::kernel::exact::{in_triangle, three_plane_point, ExactPlane, ExactPoint};
use crate::kernel::predicates::collinear3d;
use crate::kernel::{
    perturb, tri_tri_intersect, Adjacency, BoundaryDetail, PerturbationPolicy, SegmentEnd, Sign, TriTriResult,
};
use crate::mesh::SurfaceMesh;

/// Symbolic identity of a point of the arrangement. Two faces refer to the
/// same point exactly when they use the same key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKey {
    Vertex(u32),
    /// Mesh edge `(lo, hi)` crossing the interior of a face.
    EdgeFace {
        edge: (u32, u32),
        face: u32,
    },
    /// Common point of three faces, indices ascending.
    Triple([u32; 3]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionSegment {
    /// `faces[0] < faces[1]`.
    pub faces: [u32; 2],
    pub ends: [PointKey; 2],
    pub exact: [ExactPoint; 2],
    pub points: [Point3<f64>; 2],
}

impl IntersectionSegment {
    pub fn partner(&self, f: u32) -> u32 {
        if self.faces[0] == f {
            self.faces[1]
        } else {
            self.faces[0]
        }
    }
}

/// Crossing of two segments inside one face: the point shared by three faces.
#[derive(Clone, Debug, PartialEq)]
pub struct TriplePoint {
    pub faces: [u32; 3],
    pub exact: ExactPoint,
    pub point: Point3<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CatalogCounters {
    pub candidate_pairs: usize,
    pub proper_segments: usize,
    pub triple_points: usize,
    pub boundary_retries: u32,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntersectionCatalog {
    pub segments: Vec<IntersectionSegment>,
    pub triples: Vec<TriplePoint>,
    /// Segment ids per face (each segment is listed under both faces).
    pub by_face: Vec<Vec<u32>>,
    /// Triple-point ids per face.
    pub triples_by_face: Vec<Vec<u32>>,
    pub counters: CatalogCounters,
}

impl IntersectionCatalog {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn face_segments(&self, f: u32) -> &[u32] {
        &self.by_face[f as usize]
    }

    pub fn is_intersected(&self, f: u32) -> bool {
        !self.by_face[f as usize].is_empty()
    }

    /// Unordered intersecting face pairs, sorted.
    pub fn face_pairs(&self) -> Vec<(u32, u32)> {
        self.segments.iter().map(|s| (s.faces[0], s.faces[1])).collect()
    }
}

pub fn face_boxes_bvh(mesh: &SurfaceMesh) -> Bvh {
    Bvh::for_triangles((0..mesh.num_faces() as u32).map(|f| mesh.triangle(f)))
}

/// Face pairs with overlapping bounding boxes, mesh-adjacent pairs included.
pub fn broad_phase(mesh: &SurfaceMesh) -> Vec<(u32, u32)> {
    face_boxes_bvh(mesh).self_overlaps()
}

fn end_key(end: SegmentEnd, f: u32, g: u32, tf: &[u32; 3], tg: &[u32; 3]) -> PointKey {
    let edge = |t: &[u32; 3], k: usize| {
        let (a, b) = (t[k], t[(k + 1) % 3]);
        (a.min(b), a.max(b))
    };
    match end {
        SegmentEnd::EdgeOfFirst(k) => PointKey::EdgeFace { edge: edge(tf, k), face: g },
        SegmentEnd::EdgeOfSecond(k) => PointKey::EdgeFace { edge: edge(tg, k), face: f },
        SegmentEnd::SharedVertex => {
            let v = tf.iter().copied().find(|v| tg.contains(v)).expect("shared vertex");
            PointKey::Vertex(v)
        }
    }
}

/// Vertex ids where coincident vertices share the lowest index.
fn welded_ids(mesh: &SurfaceMesh) -> Vec<u32> {
    let mut first: HashMap<[u64; 3], u32> = HashMap::new();
    mesh.positions()
        .iter()
        .enumerate()
        .map(|(v, p)| *first.entry([p.x, p.y, p.z].map(|c| if c == 0.0 { 0 } else { c.to_bits() })).or_insert(v as u32))
        .collect()
}

/// Catalog of the mesh as given; `Err(detail)` on the first boundary case.
pub fn catalog_once(mesh: &SurfaceMesh) -> std::result::Result<IntersectionCatalog, BoundaryDetail> {
    let start = Instant::now();
    let faces = mesh.faces();
    if (0..faces.len() as u32).any(|f| {
        let [a, b, c] = mesh.triangle(f);
        collinear3d(&a, &b, &c)
    }) {
        return Err(BoundaryDetail::PointContact);
    }
    let candidates = broad_phase(mesh);
    let welded = welded_ids(mesh);
    let results: Vec<std::result::Result<Option<IntersectionSegment>, BoundaryDetail>> = candidates
        .par_iter()
        .map(|&(f, g)| {
            let (tf, tg) = (faces[f as usize], faces[g as usize]);
            let adj = Adjacency::from_indices(&tf, &tg);
            if adj == Adjacency::SharedFace {
                return Err(BoundaryDetail::CoplanarOverlap);
            }
            let (wf, wg) = (tf.map(|v| welded[v as usize]), tg.map(|v| welded[v as usize]));
            let wadj = Adjacency::from_indices(&wf, &wg);
            if wadj != adj {
                // corners copied apart by singular-vertex repair: touching
                // there is fine, anything more is a contact
                return match tri_tri_intersect(&mesh.triangle(f), &mesh.triangle(g), wadj) {
                    TriTriResult::Disjoint => Ok(None),
                    TriTriResult::Boundary(d) => Err(d),
                    TriTriResult::ProperSegment(_) => Err(BoundaryDetail::PointContact),
                };
            }
            match tri_tri_intersect(&mesh.triangle(f), &mesh.triangle(g), adj) {
                TriTriResult::Disjoint => Ok(None),
                TriTriResult::Boundary(d) => Err(d),
                TriTriResult::ProperSegment(s) => Ok(Some(IntersectionSegment {
                    faces: [f, g],
                    ends: [end_key(s.ends[0], f, g, &tf, &tg), end_key(s.ends[1], f, g, &tf, &tg)],
                    exact: s.exact,
                    points: s.points,
                })),
            }
        })
        .collect();
    let mut segments = Vec::new();
    for r in results {
        if let Some(s) = r? {
            segments.push(s);
        }
    }
    let mut by_face = vec![Vec::new(); faces.len()];
    for (i, s) in segments.iter().enumerate() {
        by_face[s.faces[0] as usize].push(i as u32);
        by_face[s.faces[1] as usize].push(i as u32);
    }
    let triples = find_triples(mesh, &segments, &by_face)?;
    let mut triples_by_face = vec![Vec::new(); faces.len()];
    for (i, t) in triples.iter().enumerate() {
        for &f in &t.faces {
            triples_by_face[f as usize].push(i as u32);
        }
    }
    let counters = CatalogCounters {
        candidate_pairs: candidates.len(),
        proper_segments: segments.len(),
        triple_points: triples.len(),
        boundary_retries: 0,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(IntersectionCatalog { segments, triples, by_face, triples_by_face, counters })
}

/// Points where two segments of one face cross. Such a point lies on three
/// planes and strictly inside all three triangles; touching the boundary
/// of any of them is a boundary case.
fn find_triples(
    mesh: &SurfaceMesh,
    segments: &[IntersectionSegment],
    by_face: &[Vec<u32>],
) -> std::result::Result<Vec<TriplePoint>, BoundaryDetail> {
    let work: Vec<u32> = (0..by_face.len() as u32).filter(|&f| by_face[f as usize].len() > 1).collect();
    let per_face: Vec<std::result::Result<Vec<TriplePoint>, BoundaryDetail>> = work
        .par_iter()
        .map(|&f| {
            let mut out = Vec::new();
            let segs = &by_face[f as usize];
            for (i, &si) in segs.iter().enumerate() {
                let g = segments[si as usize].partner(f);
                for &sj in &segs[i + 1..] {
                    let h = segments[sj as usize].partner(f);
                    let mut ids = [f, g, h];
                    ids.sort_unstable();
                    // each triple is found from all three faces; keep the lowest
                    if ids[0] != f || g == h {
                        continue;
                    }
                    // neighbours across a mesh edge chain at an edge-crossing key
                    let (tg, th) = (mesh.face(g), mesh.face(h));
                    if tg.iter().filter(|v| th.contains(v)).count() >= 2 {
                        continue;
                    }
                    // segments leaving a common vertex meet only there
                    let (a, b) = (&segments[si as usize], &segments[sj as usize]);
                    if a.ends.iter().any(|e| b.ends.contains(e)) {
                        continue;
                    }
                    if !segments_may_cross(a, b) {
                        continue;
                    }
                    let tris = ids.map(|x| mesh.triangle(x));
                    let planes = tris.map(|t| ExactPlane::of_triangle(&t));
                    let Some(p) = three_plane_point(&planes[0], &planes[1], &planes[2]) else {
                        return Err(BoundaryDetail::EdgeCollinear);
                    };
                    let inside = tris.iter().map(|t| in_triangle(&p, t)).collect::<Vec<_>>();
                    if inside.contains(&Sign::Negative) {
                        continue;
                    }
                    if inside.contains(&Sign::Zero) {
                        return Err(BoundaryDetail::PointContact);
                    }
                    let point = p.to_f64();
                    out.push(TriplePoint { faces: ids, exact: p, point });
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_face {
        all.extend(r?);
    }
    all.sort_by_key(|a| a.faces);
    Ok(all)
}

/// Cheap rejection with the rounded endpoints' boxes, padded.
fn segments_may_cross(a: &IntersectionSegment, b: &IntersectionSegment) -> bool {
    (0..3).all(|k| {
        let (alo, ahi) = (a.points[0][k].min(a.points[1][k]), a.points[0][k].max(a.points[1][k]));
        let (blo, bhi) = (b.points[0][k].min(b.points[1][k]), b.points[0][k].max(b.points[1][k]));
        let pad = 1e-9 * (ahi.abs().max(alo.abs()).max(bhi.abs()).max(blo.abs()).max(1.0));
        alo <= bhi + pad && blo <= ahi + pad
    })
}

/// Builds the catalog, perturbing the whole mesh and starting over whenever
/// a boundary case shows up. Attempts are numbered from `first_attempt`;
/// attempt 0 is the unperturbed input.
pub fn build_catalog_from(
    mesh: &SurfaceMesh,
    policy: &PerturbationPolicy,
    first_attempt: u32,
) -> Result<(SurfaceMesh, IntersectionCatalog, u32)> {
    let mut last = BoundaryDetail::PointContact;
    for attempt in first_attempt..=policy.max_retries {
        let m = if attempt == 0 { mesh.clone() } else { perturb(mesh, policy, attempt) };
        match catalog_once(&m) {
            Ok(mut c) => {
                c.counters.boundary_retries = attempt;
                return Ok((m, c, attempt));
            }
            Err(d) => {
                log::debug!("boundary case {d:?} at attempt {attempt}, perturbing");
                last = d;
            }
        }
    }
    Err(Error::RetriesExhausted { attempts: policy.max_retries, detail: last })
}

pub fn build_catalog(mesh: &SurfaceMesh, policy: &PerturbationPolicy) -> Result<(SurfaceMesh, IntersectionCatalog)> {
    build_catalog_from(mesh, policy, 0).map(|(m, c, _)| (m, c))
}
