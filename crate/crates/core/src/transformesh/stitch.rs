//! Turning a triangle soup into a manifold mesh.

use std::collections::HashMap;
use std::f64::consts::TAU;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::{face_of, next, SurfaceMesh, INVALID};

#[derive(Clone, Debug, PartialEq)]
pub struct SoupTriangle {
    pub points: [Point3<f64>; 3],
    /// Input face this triangle was cut from.
    pub parent: u32,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleSoup {
    pub triangles: Vec<SoupTriangle>,
}

impl TriangleSoup {
    pub fn from_mesh(mesh: &SurfaceMesh) -> Self {
        let triangles =
            (0..mesh.num_faces() as u32).map(|f| SoupTriangle { points: mesh.triangle(f), parent: f }).collect();
        TriangleSoup { triangles }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

fn weld_key(p: &Point3<f64>) -> [u64; 3] {
    // +0.0 and -0.0 are the same point
    [p.x, p.y, p.z].map(|c| if c == 0.0 { 0u64 } else { c.to_bits() })
}

/// Welds coincident vertices, pairs half-edges and repairs singular
/// vertices. Returns the mesh and the number of vertex copies made.
pub fn stitch(soup: &TriangleSoup) -> Result<(SurfaceMesh, usize)> {
    if soup.is_empty() {
        return Err(Error::InvalidParameter("cannot stitch an empty soup".into()));
    }
    let mut ids: HashMap<[u64; 3], u32> = HashMap::new();
    let mut positions = Vec::new();
    let mut faces = Vec::with_capacity(soup.len());
    for t in &soup.triangles {
        let tri = t.points.map(|p| {
            *ids.entry(weld_key(&p)).or_insert_with(|| {
                positions.push(p);
                (positions.len() - 1) as u32
            })
        });
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(Error::Degenerate(format!("soup triangle from face {} collapses when welded", t.parent)));
        }
        faces.push(tri);
    }
    let twins = radial_pairing(&positions, &faces)?;
    let mesh = SurfaceMesh::from_raw(positions, faces, twins);
    Ok(repair_singular_vertices(&mesh))
}

/// Pairs the half-edges around every edge. With more than two incident
/// faces, each face turns about the edge into the solid it bounds and
/// pairs with the first face met that runs the edge the other way.
fn radial_pairing(pos: &[Point3<f64>], faces: &[[u32; 3]]) -> Result<Vec<u32>> {
    let mut by_edge: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (f, t) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push((3 * f + k) as u32);
        }
    }
    let origin = |h: u32| faces[(h / 3) as usize][(h % 3) as usize];
    let opposite = |h: u32| faces[(h / 3) as usize][((h % 3 + 2) % 3) as usize];
    let mut twins = vec![INVALID; faces.len() * 3];
    for (&(lo, hi), hs) in &by_edge {
        let forward: Vec<u32> = hs.iter().copied().filter(|&h| origin(h) == lo).collect();
        let backward: Vec<u32> = hs.iter().copied().filter(|&h| origin(h) != lo).collect();
        if forward.len() != backward.len() {
            if hs.len() == 1 {
                continue;
            }
            return Err(Error::Topology(format!("edge ({lo},{hi}) cannot be paired")));
        }
        if hs.len() == 2 {
            twins[forward[0] as usize] = backward[0];
            twins[backward[0] as usize] = forward[0];
            continue;
        }
        let e = pos[hi as usize] - pos[lo as usize];
        let helper = if e.x.abs() <= e.y.abs() && e.x.abs() <= e.z.abs() {
            Vector3::x()
        } else if e.y.abs() <= e.z.abs() {
            Vector3::y()
        } else {
            Vector3::z()
        };
        let u = e.cross(&helper).normalize();
        let v = e.normalize().cross(&u);
        let angle = |h: u32| {
            let w = pos[opposite(h) as usize] - pos[lo as usize];
            w.dot(&v).atan2(w.dot(&u))
        };
        let sweep = |from: f64, to: f64| {
            let d = (to - from).rem_euclid(TAU);
            if d == 0.0 {
                TAU
            } else {
                d
            }
        };
        // forward faces turn clockwise about e, backward ones counter-clockwise
        let best_back = |h: u32| {
            backward.iter().copied().min_by(|&x, &y| sweep(angle(x), angle(h)).total_cmp(&sweep(angle(y), angle(h))))
        };
        let best_fwd = |h: u32| {
            forward.iter().copied().min_by(|&x, &y| sweep(angle(h), angle(x)).total_cmp(&sweep(angle(h), angle(y))))
        };
        for &h in &forward {
            let t = best_back(h).expect("backward half-edges exist");
            if best_fwd(t) != Some(h) {
                return Err(Error::Topology(format!("edge ({lo},{hi}) has no consistent radial pairing")));
            }
            twins[h as usize] = t;
            twins[t as usize] = h;
        }
    }
    Ok(twins)
}

/// Splits every vertex into its edge-connected fans, giving each fan past
/// the first its own copy of the vertex. Returns the number of copies.
pub fn repair_singular_vertices(mesh: &SurfaceMesh) -> (SurfaceMesh, usize) {
    let nh = mesh.num_halfedges();
    // union-find over half-edges, each standing for its origin corner
    let mut parent: Vec<u32> = (0..nh as u32).collect();
    fn find(p: &mut [u32], mut i: u32) -> u32 {
        while p[i as usize] != i {
            p[i as usize] = p[p[i as usize] as usize];
            i = p[i as usize];
        }
        i
    }
    for h in 0..nh as u32 {
        let t = mesh.twin(h);
        if t != INVALID {
            // h leaves v; twin arrives at v, and next(twin) leaves v again
            let (a, b) = (find(&mut parent, h), find(&mut parent, next(t)));
            if a != b {
                parent[a as usize] = b;
            }
        }
    }
    let mut positions = mesh.positions().to_vec();
    let mut faces = mesh.faces().to_vec();
    let mut fan_vertex: HashMap<u32, u32> = HashMap::new();
    let mut first_fan: Vec<u32> = vec![INVALID; mesh.num_vertices()];
    let mut copies = 0;
    for h in 0..nh as u32 {
        let v = mesh.origin(h);
        let root = find(&mut parent, h);
        let id = *fan_vertex.entry(root).or_insert_with(|| {
            if first_fan[v as usize] == INVALID {
                first_fan[v as usize] = root;
                v
            } else {
                copies += 1;
                positions.push(mesh.position(v));
                (positions.len() - 1) as u32
            }
        });
        faces[face_of(h) as usize][(h % 3) as usize] = id;
    }
    let twins = (0..nh as u32).map(|h| mesh.twin(h)).collect();
    (SurfaceMesh::from_raw(positions, faces, twins), copies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;
    use crate::mesh::validate::{validate, validate_with, ValidationOptions};

    fn cone(apex: Point3<f64>, up: f64) -> Vec<SoupTriangle> {
        // closed pyramid with its tip at `apex`, opening along z by `up`
        let base: Vec<Point3<f64>> = (0..4)
            .map(|i| {
                let a = i as f64 * std::f64::consts::FRAC_PI_2;
                apex + Vector3::new(a.cos(), a.sin(), up)
            })
            .collect();
        let c = apex + Vector3::new(0.0, 0.0, up);
        let mut out = Vec::new();
        for i in 0..4 {
            let (p, q) = (base[i], base[(i + 1) % 4]);
            let (side, cap) = if up > 0.0 { ([apex, q, p], [c, p, q]) } else { ([apex, p, q], [c, q, p]) };
            out.push(SoupTriangle { points: side, parent: 0 });
            out.push(SoupTriangle { points: cap, parent: 0 });
        }
        out
    }

    #[test]
    fn sphere_soup_is_the_sphere() {
        let s = shapes::icosphere(2, 1.0);
        let (m, copies) = stitch(&TriangleSoup::from_mesh(&s)).unwrap();
        assert_eq!(copies, 0);
        assert_eq!(m.num_vertices(), s.num_vertices());
        assert_eq!(m.num_edges(), s.num_edges());
        for f in 0..s.num_faces() as u32 {
            assert_eq!(m.triangle(f), s.triangle(f));
        }
        assert!(m.is_closed());
    }

    #[test]
    fn cones_sharing_apex() {
        let mut tris = cone(Point3::origin(), 1.0);
        tris.extend(cone(Point3::origin(), -1.0));
        let (m, copies) = stitch(&TriangleSoup { triangles: tris }).unwrap();
        assert_eq!(copies, 1);
        assert_eq!(m.num_components(), 2);
        assert!(validate(&m, false).is_manifold);
        assert!(m.signed_volume().unwrap() > 0.0);
    }

    #[test]
    fn tetrahedra_sharing_a_face() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        let up = Point3::new(0.2, 0.2, 1.0);
        let down = Point3::new(0.2, 0.2, -1.0);
        let tet = |d: Point3<f64>, flip: bool| {
            let faces = [[a, c, b], [a, b, d], [b, c, d], [c, a, d]];
            faces
                .into_iter()
                .map(|t| SoupTriangle { points: if flip { [t[0], t[2], t[1]] } else { t }, parent: 0 })
                .collect::<Vec<_>>()
        };
        let mut tris = tet(up, false);
        tris.extend(tet(down, true));
        let (m, copies) = stitch(&TriangleSoup { triangles: tris }).unwrap();
        assert_eq!(copies, 3);
        assert_eq!(m.num_components(), 2);
        assert!(m.is_closed());
        assert!(validate(&m, false).is_manifold);
    }

    #[test]
    fn bowtie_vertex_duplicated() {
        let p = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(-1.0, 0.0, 0.0),
            Point3::new(-1.0, -1.0, 0.0),
        ];
        let m = SurfaceMesh::from_triangles(p, vec![[0, 1, 2], [0, 3, 4]]).unwrap();
        let (r, copies) = repair_singular_vertices(&m);
        assert_eq!(copies, 1);
        assert_eq!(r.num_vertices(), 6);
        assert!(validate_with(&r, &ValidationOptions { allow_boundary: true, ..Default::default() }).is_manifold);
    }

    #[test]
    fn manifold_mesh_unchanged() {
        let t = shapes::torus(1.0, 0.3, 12, 8);
        assert_eq!(repair_singular_vertices(&t), (t.clone(), 0));
    }
}
