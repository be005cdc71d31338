//! Procedural test shapes, all outward oriented.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::SurfaceMesh;

pub fn tetrahedron() -> SurfaceMesh {
    let p = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
    ];
    let f = vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
    SurfaceMesh::from_triangles(p, f).expect("tetrahedron")
}

/// Axis-aligned cube `[min, min + size]^3`, 12 triangles.
///
/// Vertex `i` sits at corner `(i & 1, i >> 1 & 1, i >> 2 & 1)`. Every face
/// diagonal passes through corner 0 or corner 7.
pub fn cube(min: Point3<f64>, size: f64) -> SurfaceMesh {
    let p = (0..8)
        .map(|i| min + Vector3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64) * size)
        .collect();
    let f = vec![
        [0, 4, 6],
        [0, 6, 2],
        [0, 1, 5],
        [0, 5, 4],
        [0, 2, 3],
        [0, 3, 1],
        [1, 3, 7],
        [1, 7, 5],
        [2, 6, 7],
        [2, 7, 3],
        [4, 5, 7],
        [4, 7, 6],
    ];
    SurfaceMesh::from_triangles(p, f).expect("cube")
}

/// Cube whose faces are split into an `n x n` grid (2n² triangles per face).
pub fn subdivided_cube(min: Point3<f64>, size: f64, n: usize) -> SurfaceMesh {
    let mut index: HashMap<[i64; 3], u32> = HashMap::new();
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    let mut vid = |g: [i64; 3], positions: &mut Vec<Point3<f64>>| -> u32 {
        *index.entry(g).or_insert_with(|| {
            positions.push(min + Vector3::new(g[0] as f64, g[1] as f64, g[2] as f64) * (size / n as f64));
            (positions.len() - 1) as u32
        })
    };
    let n = n as i64;
    // (normal axis, fixed value, u axis, v axis) with u x v pointing outward
    let sides: [(usize, i64, usize, usize); 6] =
        [(0, 0, 2, 1), (0, n, 1, 2), (1, 0, 0, 2), (1, n, 2, 0), (2, 0, 1, 0), (2, n, 0, 1)];
    for &(axis, fixed, u, v) in &sides {
        for i in 0..n {
            for j in 0..n {
                let g = |a: i64, b: i64| {
                    let mut c = [0i64; 3];
                    c[axis] = fixed;
                    c[u] = a;
                    c[v] = b;
                    c
                };
                let q = [
                    vid(g(i, j), &mut positions),
                    vid(g(i + 1, j), &mut positions),
                    vid(g(i + 1, j + 1), &mut positions),
                    vid(g(i, j + 1), &mut positions),
                ];
                faces.push([q[0], q[1], q[2]]);
                faces.push([q[0], q[2], q[3]]);
            }
        }
    }
    SurfaceMesh::from_triangles(positions, faces).expect("subdivided cube")
}

/// Geodesic sphere: icosahedron refined `level` times, `20 * 4^level` faces.
pub fn icosphere(level: u32, radius: f64) -> SurfaceMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut positions: Vec<Point3<f64>> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::from(Vector3::new(x, y, z).normalize()))
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, positions: &mut Vec<Point3<f64>>| -> u32 {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let m = (positions[a as usize].coords + positions[b as usize].coords).normalize();
                positions.push(Point3::from(m));
                (positions.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut positions);
            let bc = midpoint(b, c, &mut positions);
            let ca = midpoint(c, a, &mut positions);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for p in &mut positions {
        *p = Point3::from(p.coords * radius);
    }
    SurfaceMesh::from_triangles(positions, faces).expect("icosphere")
}

/// Torus around the z axis with major radius `major` and tube radius `minor`.
pub fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> SurfaceMesh {
    use std::f64::consts::TAU;
    let mut positions = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = TAU * j as f64 / nv as f64;
            let rr = major + minor * v.cos();
            positions.push(Point3::new(rr * u.cos(), rr * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: usize, j: usize| ((i % nu) * nv + (j % nv)) as u32;
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    SurfaceMesh::from_triangles(positions, faces).expect("torus")
}

/// Open square grid in the z = 0 plane, normal +z, `nx * ny` quads.
pub fn grid(nx: usize, ny: usize, size: f64) -> SurfaceMesh {
    let mut positions = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            positions.push(Point3::new(size * i as f64 / nx as f64, size * j as f64 / ny as f64, 0.0));
        }
    }
    let id = |i: usize, j: usize| (j * (nx + 1) + i) as u32;
    let mut faces = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    SurfaceMesh::from_triangles(positions, faces).expect("grid")
}

/// Open cylinder around the z axis from z = 0 to z = `height`.
pub fn open_cylinder(radius: f64, height: f64, nseg: usize, nrings: usize) -> SurfaceMesh {
    use std::f64::consts::TAU;
    let mut positions = Vec::new();
    for j in 0..=nrings {
        for i in 0..nseg {
            let u = TAU * i as f64 / nseg as f64;
            positions.push(Point3::new(radius * u.cos(), radius * u.sin(), height * j as f64 / nrings as f64));
        }
    }
    let id = |i: usize, j: usize| (j * nseg + i % nseg) as u32;
    let mut faces = Vec::new();
    for j in 0..nrings {
        for i in 0..nseg {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    SurfaceMesh::from_triangles(positions, faces).expect("cylinder")
}

/// Closed tube along the x axis. `profile` lists `(x, radius)` rings;
/// a negative radius places the ring on the opposite side of the axis.
pub fn capped_tube(profile: &[(f64, f64)], nseg: usize) -> SurfaceMesh {
    use std::f64::consts::TAU;
    let rings = profile
        .iter()
        .map(|&(x, r)| {
            (0..nseg)
                .map(|i| {
                    let u = TAU * i as f64 / nseg as f64;
                    Point3::new(x, r * u.cos(), r * u.sin())
                })
                .collect()
        })
        .collect::<Vec<Vec<_>>>();
    tube_from_rings(&rings)
}

/// Two bulbs joined by a neck whose cross-sections are mirrored, so the
/// neck walls pass through each other and the neck encloses a region of
/// winding number -1. Neck rings are sheared slightly along x so the
/// crossings are transversal.
pub fn inverted_neck_dumbbell(nseg: usize) -> SurfaceMesh {
    use std::f64::consts::TAU;
    let profile: [(f64, f64, f64); 12] = [
        (-2.0, 0.3, 1.0),
        (-1.7, 0.8, 1.0),
        (-1.2, 1.0, 1.0),
        (-0.7, 0.8, 1.0),
        (-0.4, 0.5, 1.0),
        (-0.15, 0.5, -1.0),
        (0.0, 0.5, -1.0),
        (0.15, 0.5, -1.0),
        (0.4, 0.5, 1.0),
        (0.7, 0.8, 1.0),
        (1.2, 1.0, 1.0),
        (1.7, 0.8, 1.0),
    ];
    let rings = profile
        .iter()
        .chain(std::iter::once(&(2.0, 0.3, 1.0)))
        .map(|&(x, r, sy)| {
            (0..nseg)
                .map(|i| {
                    let u = TAU * (i as f64 + 0.5) / nseg as f64;
                    let shear = if sy < 0.0 { 0.04 * u.sin() } else { 0.0 };
                    Point3::new(x + shear, r * u.cos(), sy * r * u.sin())
                })
                .collect()
        })
        .collect::<Vec<Vec<_>>>();
    tube_from_rings(&rings)
}

/// Joins consecutive rings (each counter-clockwise seen from -x) with quads
/// and caps both ends with fans to the ring centroids.
fn tube_from_rings(rings: &[Vec<Point3<f64>>]) -> SurfaceMesh {
    let nseg = rings[0].len();
    let mut positions: Vec<Point3<f64>> = rings.iter().flatten().copied().collect();
    let id = |i: usize, j: usize| (j * nseg + i % nseg) as u32;
    let mut faces = Vec::new();
    for j in 0..rings.len() - 1 {
        for i in 0..nseg {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let centroid =
        |r: &[Point3<f64>]| Point3::from(r.iter().fold(Vector3::zeros(), |a, p| a + p.coords) / r.len() as f64);
    let last = rings.len() - 1;
    let start = positions.len() as u32;
    positions.push(centroid(&rings[0]));
    let end = positions.len() as u32;
    positions.push(centroid(&rings[last]));
    for i in 0..nseg {
        faces.push([start, id(i + 1, 0), id(i, 0)]);
        faces.push([end, id(i, last), id(i + 1, last)]);
    }
    SurfaceMesh::from_triangles(positions, faces).expect("tube")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_outward_and_closed() {
        for m in [
            tetrahedron(),
            cube(Point3::origin(), 1.0),
            subdivided_cube(Point3::origin(), 1.0, 3),
            icosphere(2, 1.0),
            torus(1.0, 0.3, 12, 8),
            capped_tube(&[(0.0, 1.0), (1.0, 1.0), (2.0, 0.5)], 10),
        ] {
            assert!(m.is_closed());
            assert!(m.signed_volume().unwrap() > 0.0);
        }
        let sc = subdivided_cube(Point3::origin(), 2.0, 4);
        assert!((sc.signed_volume().unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(sc.num_faces(), 6 * 2 * 16);
        assert_eq!(sc.euler_characteristic(), 2);
    }

    #[test]
    fn icosphere_face_counts() {
        assert_eq!(icosphere(0, 1.0).num_faces(), 20);
        assert_eq!(icosphere(3, 1.0).num_faces(), 1280);
    }
}
