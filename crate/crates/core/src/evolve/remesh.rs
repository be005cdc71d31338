//! Edge-length remeshing, valence flips and removal of tiny components.

use nalgebra::Point3;
use serde::Serialize;

use crate::mesh::edit::EditMesh;
use crate::mesh::{next, prev, SurfaceMesh, INVALID};

const MAX_ROUNDS: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RemeshReport {
    pub splits: usize,
    pub collapses: usize,
    /// Short edges left alone because collapsing would break the surface.
    pub blocked_collapses: usize,
    pub culled_components: usize,
    /// The split/collapse loop stopped at its round limit.
    pub round_limit_hit: bool,
}

fn halfedge_between(e: &EditMesh, a: u32, b: u32) -> Option<u32> {
    e.outgoing(a).into_iter().find(|&h| e.target(h) == b)
}

fn midpoint(e: &EditMesh, a: u32, b: u32) -> Point3<f64> {
    Point3::from((e.pos[a as usize].coords + e.pos[b as usize].coords) / 2.0)
}

/// Splits edges longer than `e2` and collapses edges shorter than `e1`
/// (at their midpoints) until nothing changes, then culls tiny components.
pub fn adaptive_remesh(mesh: &SurfaceMesh, e1: f64, e2: f64) -> (SurfaceMesh, RemeshReport) {
    let mut e = EditMesh::from_mesh(mesh);
    let mut report = RemeshReport::default();
    let mut rounds = 0;
    loop {
        let mut changed = false;
        let long: Vec<(u32, u32)> =
            e.edges().into_iter().filter(|&h| e.edge_length(h) > e2).map(|h| (e.origin(h), e.target(h))).collect();
        for (a, b) in long {
            if let Some(h) = halfedge_between(&e, a, b) {
                if e.split(h, midpoint(&e, a, b)).is_some() {
                    report.splits += 1;
                    changed = true;
                }
            }
        }
        let mut short: Vec<(f64, u32, u32)> = e
            .edges()
            .into_iter()
            .map(|h| (e.edge_length(h), e.origin(h), e.target(h)))
            .filter(|&(l, _, _)| l < e1)
            .collect();
        short.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut blocked = 0;
        for (_, a, b) in short {
            let Some(h) = halfedge_between(&e, a, b) else { continue };
            if e.edge_length(h) >= e1 {
                continue;
            }
            // the midpoint first, then either end
            let spots = [midpoint(&e, a, b), e.pos[a as usize], e.pos[b as usize]];
            let done = spots.into_iter().any(|m| {
                let stretches = e
                    .neighbors(a)
                    .into_iter()
                    .chain(e.neighbors(b))
                    .any(|n| n != a && n != b && (e.pos[n as usize] - m).norm() > e2);
                !stretches && e.collapse(h, m, true)
            });
            if done {
                report.collapses += 1;
                changed = true;
            } else {
                blocked += 1;
            }
        }
        report.blocked_collapses = blocked;
        rounds += 1;
        if !changed {
            break;
        }
        if rounds == MAX_ROUNDS {
            report.round_limit_hit = true;
            break;
        }
    }
    let (out, culled) = cull_tiny_components(&e.to_mesh(), e1);
    report.culled_components = culled;
    (out, report)
}

/// Removes components whose edges are all shorter than `e1` and whose
/// enclosed volume is below that of a sphere of diameter `e1`.
pub fn cull_tiny_components(mesh: &SurfaceMesh, e1: f64) -> (SurfaceMesh, usize) {
    let (count, label) = mesh.component_labels();
    let mut all_short = vec![true; count];
    let mut volume = vec![0.0; count];
    for f in 0..mesh.num_faces() as u32 {
        let c = label[f as usize] as usize;
        let [a, b, d] = mesh.triangle(f);
        volume[c] += a.coords.dot(&b.coords.cross(&d.coords)) / 6.0;
        if (b - a).norm() >= e1 || (d - b).norm() >= e1 || (a - d).norm() >= e1 {
            all_short[c] = false;
        }
    }
    let limit = std::f64::consts::PI / 6.0 * e1.powi(3);
    let tiny: Vec<bool> = (0..count).map(|c| all_short[c] && volume[c].abs() < limit).collect();
    let culled = tiny.iter().filter(|&&t| t).count();
    if culled == 0 {
        return (mesh.clone(), 0);
    }
    let keep: Vec<bool> = label.iter().map(|&c| !tiny[c as usize]).collect();
    (mesh.extract_faces(&keep), culled)
}

/// Sum over vertices of `(valence - 6)^2`.
pub fn valence_energy(mesh: &SurfaceMesh) -> u64 {
    let mut val = vec![0i64; mesh.num_vertices()];
    let mut seen = std::collections::HashSet::new();
    for f in mesh.faces() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if seen.insert((a.min(b), a.max(b))) {
                val[a as usize] += 1;
                val[b as usize] += 1;
            }
        }
    }
    val.iter().filter(|&&v| v > 0).map(|&v| ((v - 6) * (v - 6)) as u64).sum()
}

fn min_angle(p: [Point3<f64>; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let (u, v) = (p[(k + 1) % 3] - p[k], p[(k + 2) % 3] - p[k]);
            u.angle(&v)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Edge flips toward valence 6, or with `by_min_angle` toward larger
/// minimum angles. Each round tries the most improving flips first.
/// Boundary edges are never flipped.
pub fn optimize_valence(mesh: &SurfaceMesh, by_min_angle: bool) -> (SurfaceMesh, usize) {
    optimize_valence_within(mesh, by_min_angle, 0.0, f64::INFINITY)
}

/// `optimize_valence` that never creates an edge outside `[e1, e2]`.
pub fn optimize_valence_within(mesh: &SurfaceMesh, by_min_angle: bool, e1: f64, e2: f64) -> (SurfaceMesh, usize) {
    let mut e = EditMesh::from_mesh(mesh);
    let mut val: Vec<i64> = (0..e.pos.len() as u32).map(|v| e.valence(v) as i64).collect();
    let mut flips = 0;
    for _ in 0..MAX_ROUNDS {
        let mut candidates: Vec<(f64, u32, u32)> = e
            .edges()
            .into_iter()
            .filter(|&h| e.twin(h) != INVALID)
            .filter_map(|h| {
                let g = flip_gain(&e, &val, h, by_min_angle);
                (g > 0.0).then(|| (g, e.origin(h), e.target(h)))
            })
            .collect();
        candidates.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut changed = false;
        for (_, a, b) in candidates {
            let Some(h) = halfedge_between(&e, a, b) else { continue };
            let t = e.twin(h);
            if t == INVALID || flip_gain(&e, &val, h, by_min_angle) <= 0.0 || va_too_low(&val, a, b) {
                continue;
            }
            let (c, d) = (e.origin(prev(h)), e.origin(prev(t)));
            let p = |v: u32| e.pos[v as usize];
            let diagonal = (p(c) - p(d)).norm();
            if diagonal < e1 || diagonal > e2 {
                continue;
            }
            // neither new face may turn more than 90 degrees from the old ones
            let n_old = e.face_normal(h / 3) + e.face_normal(t / 3);
            let n1 = (p(a) - p(c)).cross(&(p(d) - p(c)));
            let n2 = (p(b) - p(d)).cross(&(p(c) - p(d)));
            if n1.dot(&n_old) <= 0.0 || n2.dot(&n_old) <= 0.0 {
                continue;
            }
            if e.flip(h) {
                val[a as usize] -= 1;
                val[b as usize] -= 1;
                val[c as usize] += 1;
                val[d as usize] += 1;
                flips += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (e.to_mesh(), flips)
}

/// Improvement from flipping the interior edge of `h`.
fn flip_gain(e: &EditMesh, val: &[i64], h: u32, by_min_angle: bool) -> f64 {
    let t = e.twin(h);
    let (a, b) = (e.origin(h), e.target(h));
    let (c, d) = (e.origin(prev(h)), e.origin(prev(t)));
    debug_assert_eq!(e.origin(next(next(h))), c);
    if by_min_angle {
        let p = |v: u32| e.pos[v as usize];
        let old = min_angle([p(a), p(b), p(c)]).min(min_angle([p(b), p(a), p(d)]));
        let new = min_angle([p(c), p(a), p(d)]).min(min_angle([p(d), p(b), p(c)]));
        new - old
    } else {
        let dev = |x: i64| (x - 6) * (x - 6);
        let [va, vb, vc, vd] = [a, b, c, d].map(|v| val[v as usize]);
        let before = dev(va) + dev(vb) + dev(vc) + dev(vd);
        let after = dev(va - 1) + dev(vb - 1) + dev(vc + 1) + dev(vd + 1);
        (before - after) as f64
    }
}

/// A flip must leave both edge endpoints with at least three edges.
fn va_too_low(val: &[i64], a: u32, b: u32) -> bool {
    val[a as usize] <= 3 || val[b as usize] <= 3
}
