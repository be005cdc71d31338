//! Cotangent Laplace-Beltrami operator with mixed Voronoi areas.

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;

/// Cotangents beyond this (angles under about half a degree) are clipped.
const COT_LIMIT: f64 = 100.0;

fn cot(u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    let s = u.cross(v).norm();
    if s == 0.0 {
        return 0.0;
    }
    (u.dot(v) / s).clamp(-COT_LIMIT, COT_LIMIT)
}

/// Per-corner pieces of one face: the mixed area owned by each corner and
/// the cotangent weight of the edge opposite each corner.
fn face_terms(p: &[Point3<f64>; 3]) -> Option<([f64; 3], [f64; 3])> {
    let area = (p[1] - p[0]).cross(&(p[2] - p[0])).norm() / 2.0;
    if area == 0.0 {
        return None;
    }
    let mut cots = [0.0; 3];
    let mut obtuse = None;
    for k in 0..3 {
        let (a, b) = (p[(k + 1) % 3] - p[k], p[(k + 2) % 3] - p[k]);
        cots[k] = cot(&a, &b);
        if a.dot(&b) < 0.0 {
            obtuse = Some(k);
        }
    }
    let mut areas = [0.0; 3];
    match obtuse {
        None => {
            for k in 0..3 {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                // corner k owns the Voronoi parts of edges k-i and k-j
                let lij = |x: usize, y: usize| (p[x] - p[y]).norm_squared();
                areas[k] = (lij(k, i) * cots[j] + lij(k, j) * cots[i]) / 8.0;
            }
        }
        Some(o) => {
            for k in 0..3 {
                areas[k] = if k == o { area / 2.0 } else { area / 4.0 };
            }
        }
    }
    Some((areas, cots))
}

/// Laplacians of all vertices; vertices on a boundary or with no area get
/// zero. Each entry is `(1 / 2A) * sum_j (cot a_ij + cot b_ij) (v_j - v)`.
pub fn laplacians_of(mesh: &SurfaceMesh, values: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let n = mesh.num_vertices();
    let mut sum = vec![Vector3::zeros(); n];
    let mut area = vec![0.0; n];
    for f in 0..mesh.num_faces() as u32 {
        let tri = mesh.face(f);
        let Some((areas, cots)) = face_terms(&mesh.triangle(f)) else { continue };
        for k in 0..3 {
            let (i, j) = (tri[(k + 1) % 3] as usize, tri[(k + 2) % 3] as usize);
            let d = values[j] - values[i];
            sum[i] += d * cots[k];
            sum[j] -= d * cots[k];
            area[tri[k] as usize] += areas[k];
        }
    }
    let mut on_boundary = vec![false; n];
    for h in 0..mesh.num_halfedges() as u32 {
        if mesh.is_boundary_halfedge(h) {
            on_boundary[mesh.origin(h) as usize] = true;
            on_boundary[mesh.target(h) as usize] = true;
        }
    }
    (0..n)
        .into_par_iter()
        .map(|v| if on_boundary[v] || area[v] == 0.0 { Vector3::zeros() } else { sum[v] / (2.0 * area[v]) })
        .collect()
}

pub fn laplacians(mesh: &SurfaceMesh) -> Vec<Vector3<f64>> {
    let coords: Vec<Vector3<f64>> = mesh.positions().iter().map(|p| p.coords).collect();
    laplacians_of(mesh, &coords)
}

/// Laplace-Beltrami of one vertex with a full umbrella. On a smooth
/// surface this approaches `-2 H n`.
pub fn laplace_beltrami(mesh: &SurfaceMesh, v: u32) -> Result<Vector3<f64>> {
    let mut sum = Vector3::zeros();
    let mut area = 0.0;
    let mut faces = 0;
    for f in 0..mesh.num_faces() as u32 {
        let tri = mesh.face(f);
        let Some(c) = tri.iter().position(|&x| x == v) else { continue };
        faces += 1;
        let (out, inc) = (3 * f + c as u32, 3 * f + ((c + 2) % 3) as u32);
        if mesh.is_boundary_halfedge(out) || mesh.is_boundary_halfedge(inc) {
            return Err(Error::Topology(format!("vertex {v} lies on a boundary")));
        }
        let p = mesh.triangle(f);
        let Some((areas, cots)) = face_terms(&p) else {
            return Err(Error::Degenerate(format!("face {f} around vertex {v} has zero area")));
        };
        area += areas[c];
        // the two edges at v are opposite the other two corners
        for k in [(c + 1) % 3, (c + 2) % 3] {
            let other = 3 - c - k;
            sum += (p[other] - p[c]) * cots[k];
        }
    }
    if faces == 0 || area == 0.0 {
        return Err(Error::Degenerate(format!("vertex {v} has zero mixed area")));
    }
    Ok(sum / (2.0 * area))
}

/// Largest smoothing move, in local mean edge lengths.
const SMOOTH_CAP: f64 = 0.5;

/// One simultaneous smoothing step, `v + beta e^2 L v - beta2 e^4 L L v`
/// with `e` the vertex's mean edge length, all Laplacians taken at the old
/// positions. The scaling keeps `beta` and `beta2` dimensionless, so the
/// strength does not depend on the model's size. Both terms damp
/// high-frequency noise; `beta = beta2 = 0` is the identity. No vertex
/// moves more than half its mean edge length.
pub fn smooth(mesh: &SurfaceMesh, beta: f64, beta2: f64) -> SurfaceMesh {
    if beta == 0.0 && beta2 == 0.0 {
        return mesh.clone();
    }
    let lap = laplacians(mesh);
    let bilap = if beta2 != 0.0 { laplacians_of(mesh, &lap) } else { Vec::new() };
    let scale = mesh.vertex_mean_edge_lengths();
    let mut out = mesh.clone();
    for (v, p) in out.positions_mut().iter_mut().enumerate() {
        let e2 = scale[v] * scale[v];
        let mut d = lap[v] * (beta * e2);
        if beta2 != 0.0 && lap[v] != Vector3::zeros() {
            d -= bilap[v] * (beta2 * e2 * e2);
        }
        // slivers left by cutting have tiny areas and huge Laplacians
        let cap = SMOOTH_CAP * scale[v];
        let len = d.norm();
        if len > cap {
            d *= cap / len;
        }
        *p += d;
    }
    out
}
