//! Removal of near-zero-area triangles before intersection processing.

use nalgebra::Point3;

use super::edit::EditMesh;
use super::{SurfaceMesh, INVALID};

pub const DEFAULT_AREA_EPS: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegeneracyReport {
    pub collapsed: usize,
    pub flipped: usize,
    /// Faces still degenerate because no manifold-preserving edit exists.
    pub irreducible: Vec<u32>,
}

fn is_degenerate(e: &EditMesh, f: u32, e_avg: f64, area_eps: f64) -> bool {
    e.face_normal(f).norm() * 0.5 <= area_eps * e_avg * e_avg
}

/// Collapses needles and flips caps until no face has area at most
/// `area_eps * e_avg^2`, `e_avg` being the mean edge length of the face's
/// vertices.
pub fn remove_degenerate_triangles(mesh: &SurfaceMesh, area_eps: f64) -> (SurfaceMesh, DegeneracyReport) {
    let mut e = EditMesh::from_mesh(mesh);
    let mut report = DegeneracyReport::default();
    let vertex_scale = mesh.vertex_mean_edge_lengths();
    let local = |e: &EditMesh, f: u32| -> f64 {
        let tri = e.face(f);
        let s: f64 = tri.iter().map(|&v| vertex_scale.get(v as usize).copied().unwrap_or(0.0)).sum();
        s / 3.0
    };
    for _pass in 0..16 {
        let mut changed = false;
        for f in 0..e.num_face_slots() as u32 {
            if !e.is_live_face(f) || !is_degenerate(&e, f, local(&e, f), area_eps) {
                continue;
            }
            let hs = [3 * f, 3 * f + 1, 3 * f + 2];
            let lens = hs.map(|h| e.edge_length(h));
            let longest = (0..3).max_by(|&i, &j| lens[i].total_cmp(&lens[j])).unwrap();
            let shortest = (0..3).min_by(|&i, &j| lens[i].total_cmp(&lens[j])).unwrap();
            let needle = lens[shortest] <= 0.1 * lens[longest];
            if needle {
                let h = hs[shortest];
                let p = Point3::from((e.pos[e.origin(h) as usize].coords + e.pos[e.target(h) as usize].coords) / 2.0);
                if e.collapse(h, p, false) {
                    report.collapsed += 1;
                    changed = true;
                }
            } else {
                // cap: the vertex opposite the longest edge sits on it
                let h = hs[longest];
                let t = e.twin(h);
                if t != INVALID && e.flip(h) {
                    report.flipped += 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for f in e.live_faces() {
        if is_degenerate(&e, f, local(&e, f), area_eps) {
            report.irreducible.push(f);
        }
    }
    (e.to_mesh(), report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;
    use crate::mesh::validate::{validate, ViolationKind};

    #[test]
    fn clean_sphere_unchanged() {
        let m = shapes::icosphere(2, 1.0);
        let (out, rep) = remove_degenerate_triangles(&m, DEFAULT_AREA_EPS);
        assert_eq!(out, m);
        assert_eq!(rep, DegeneracyReport::default());
    }

    #[test]
    fn needle_collapsed() {
        // split one edge of a sphere very close to its endpoint
        let m = shapes::icosphere(2, 1.0);
        let mut e = EditMesh::from_mesh(&m);
        let h = e.edges()[0];
        let (a, b) = (e.pos[e.origin(h) as usize], e.pos[e.target(h) as usize]);
        e.split(h, a + (b - a) * 1e-9).unwrap();
        let with_needle = e.to_mesh();
        assert_eq!(with_needle.num_faces(), m.num_faces() + 2);
        let (out, rep) = remove_degenerate_triangles(&with_needle, DEFAULT_AREA_EPS);
        assert_eq!(out.num_faces(), m.num_faces());
        assert_eq!(rep.collapsed, 1);
        assert!(validate(&out, false).is_manifold);
    }

    #[test]
    fn cap_resolved_by_flip() {
        // drag the centre vertex of one cube side onto the far edge of
        // one of its triangles, turning that triangle into a cap
        let m = shapes::subdivided_cube(Point3::origin(), 2.0, 2);
        let mut e = EditMesh::from_mesh(&m);
        let c = (0..e.pos.len() as u32).find(|&v| e.pos[v as usize] == Point3::new(1.0, 1.0, 0.0)).unwrap();
        let f = e.vertex_faces(c)[0];
        let tri = e.face(f);
        let k = tri.iter().position(|&v| v == c).unwrap();
        let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
        e.pos[c as usize] = Point3::from((e.pos[a as usize].coords + e.pos[b as usize].coords) / 2.0);
        let capped = e.to_mesh();
        assert_eq!(validate(&capped, false).count(ViolationKind::DegenerateFace), 1);
        let (out, rep) = remove_degenerate_triangles(&capped, DEFAULT_AREA_EPS);
        assert_eq!(rep.flipped, 1);
        assert!(rep.irreducible.is_empty());
        assert_eq!(out.num_faces(), capped.num_faces());
        assert!(validate(&out, false).is_manifold);
    }
}
