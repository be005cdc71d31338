//! Independent oracles and input generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Point3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transformesh::mesh::shapes;
use transformesh::SurfaceMesh;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generalized winding number from summed solid angles (Van Oosterom and
/// Strackee), rounded to the nearest integer.
pub fn solid_angle_winding(mesh: &SurfaceMesh, p: &Point3<f64>) -> i32 {
    let mut total = 0.0;
    for f in 0..mesh.num_faces() as u32 {
        let [a, b, c] = mesh.triangle(f).map(|q| q - p);
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
        total += 2.0 * num.atan2(den);
    }
    (total / (4.0 * PI)).round() as i32
}

/// Solid-angle sum without rounding, to reject points too close to the
/// surface for an integer answer.
pub fn solid_angle_raw(mesh: &SurfaceMesh, p: &Point3<f64>) -> f64 {
    let mut total = 0.0;
    for f in 0..mesh.num_faces() as u32 {
        let [a, b, c] = mesh.triangle(f).map(|q| q - p);
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
        total += 2.0 * num.atan2(den);
    }
    total / (4.0 * PI)
}

/// Volume of `{x : winding(x) > 0}` sampled on an `n^3` grid of cell centres
/// spanning `[lo, hi]`. Winding along each z-column comes from signed
/// crossings of the vertical line with every triangle. The returned bound
/// counts cells whose classification differs from a face neighbour, times
/// the cell volume.
pub fn voxel_volume(mesh: &SurfaceMesh, lo: Point3<f64>, hi: Point3<f64>, n: usize) -> (f64, f64) {
    let h = (hi - lo) / n as f64;
    let cell = h.x * h.y * h.z;
    let mut inside = vec![false; n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let tris: Vec<[Point3<f64>; 3]> = (0..mesh.num_faces() as u32).map(|f| mesh.triangle(f)).collect();
    for i in 0..n {
        let x = lo.x + (i as f64 + 0.5) * h.x;
        for j in 0..n {
            let y = lo.y + (j as f64 + 0.5) * h.y;
            // (z, +-1) crossings of the upward line through (x, y)
            let mut hits: Vec<(f64, i32)> = Vec::new();
            for t in &tris {
                let d = |p: &Point3<f64>, q: &Point3<f64>| (p.x - x) * (q.y - y) - (q.x - x) * (p.y - y);
                let (w0, w1, w2) = (d(&t[1], &t[2]), d(&t[2], &t[0]), d(&t[0], &t[1]));
                let s = w0 + w1 + w2;
                if s == 0.0 {
                    continue;
                }
                let inside_tri = (w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0) || (w0 <= 0.0 && w1 <= 0.0 && w2 <= 0.0);
                if !inside_tri {
                    continue;
                }
                let z = (w0 * t[0].z + w1 * t[1].z + w2 * t[2].z) / s;
                // an upward-facing triangle is left when crossing upward
                hits.push((z, if s > 0.0 { -1 } else { 1 }));
            }
            hits.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut w = 0;
            let mut next = 0;
            for k in 0..n {
                let z = lo.z + (k as f64 + 0.5) * h.z;
                while next < hits.len() && hits[next].0 < z {
                    w += hits[next].1;
                    next += 1;
                }
                inside[idx(i, j, k)] = w > 0;
            }
        }
    }
    let mut count = 0usize;
    let mut surface = 0usize;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = inside[idx(i, j, k)];
                count += c as usize;
                let differs = (i + 1 < n && inside[idx(i + 1, j, k)] != c)
                    || (j + 1 < n && inside[idx(i, j + 1, k)] != c)
                    || (k + 1 < n && inside[idx(i, j, k + 1)] != c)
                    || (i > 0 && inside[idx(i - 1, j, k)] != c)
                    || (j > 0 && inside[idx(i, j - 1, k)] != c)
                    || (k > 0 && inside[idx(i, j, k - 1)] != c);
                surface += differs as usize;
            }
        }
    }
    (count as f64 * cell, surface as f64 * cell)
}

/// Unit cube at the origin turned by a random rotation about its centre and
/// shifted by `offset`.
pub fn rotated_cube(rot: &Rotation3<f64>, offset: Vector3<f64>) -> SurfaceMesh {
    let c = Vector3::new(0.5, 0.5, 0.5);
    shapes::cube(Point3::origin(), 1.0).transformed(|p| Point3::from(rot * (p.coords - c) + c + offset))
}

pub fn random_rotation(r: &mut impl Rng) -> Rotation3<f64> {
    let axis = Vector3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let axis = Unit::try_new(axis, 1e-3).unwrap_or(Vector3::z_axis());
    Rotation3::from_axis_angle(&axis, r.gen_range(0.0..PI))
}

/// Icosphere or torus with 1k to 10k faces, each vertex pushed along its
/// normal by a sum of two random plane waves. Large amplitudes fold the
/// surface through itself.
pub fn fuzzed_surface(seed: u64) -> SurfaceMesh {
    let mut r = rng(seed);
    let base = match r.gen_range(0..4) {
        0 => shapes::icosphere(3, 1.0),
        1 => shapes::icosphere(4, 1.0),
        2 => {
            let nu = r.gen_range(32..=100);
            let nv = r.gen_range(16..=50);
            shapes::torus(1.0, 0.4, nu, nv)
        }
        _ => shapes::torus(1.0, 0.35, 100, 50),
    };
    let normals = base.vertex_normals();
    let waves: Vec<(Vector3<f64>, f64, f64, f64)> = (0..2)
        .map(|_| {
            let dir = Vector3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
                .try_normalize(1e-3)
                .unwrap_or(Vector3::x());
            let freq = r.gen_range(3.0..9.0);
            let amp = r.gen_range(0.0..0.5);
            (dir, freq, amp, r.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let mut out = base.clone();
    for (v, p) in out.positions_mut().iter_mut().enumerate() {
        let q = base.position(v as u32);
        let s: f64 = waves.iter().map(|(d, f, a, ph)| a * (f * d.dot(&q.coords) + ph).sin()).sum();
        *p += normals[v] * s;
    }
    out
}

/// Closest point on triangle `abc` to `p` by Voronoi-region case analysis
/// (Ericson, Real-Time Collision Detection, 5.1.5).
pub fn closest_on_triangle(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> Point3<f64> {
    let (ab, ac, ap) = (b - a, c - a, p - a);
    let (d1, d2) = (ab.dot(&ap), ac.dot(&ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let (d3, d4) = (ab.dot(&bp), ac.dot(&bp));
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let (d5, d6) = (ab.dot(&cp), ac.dot(&cp));
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Distance from `p` to the nearest triangle of `mesh`, by checking all.
pub fn point_mesh_distance(p: &Point3<f64>, mesh: &SurfaceMesh) -> f64 {
    (0..mesh.num_faces() as u32)
        .map(|f| {
            let [a, b, c] = mesh.triangle(f);
            (closest_on_triangle(p, &a, &b, &c) - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest distance from a vertex of `from` to the surface `to`.
pub fn one_sided_hausdorff(from: &SurfaceMesh, to: &SurfaceMesh) -> f64 {
    use rayon::prelude::*;
    from.positions().par_iter().map(|p| point_mesh_distance(p, to)).reduce(|| 0.0, f64::max)
}
