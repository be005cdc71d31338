//! Mesh offsetting used to escape boundary cases.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationPolicy {
    /// Offset as a fraction of the local mean edge length.
    pub delta: f64,
    pub max_retries: u32,
}

impl Default for PerturbationPolicy {
    fn default() -> Self {
        Self { delta: 1e-8, max_retries: 5 }
    }
}

impl PerturbationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("perturbation delta must be positive, got {}", self.delta)));
        }
        if self.max_retries < 1 {
            return Err(Error::InvalidParameter("max_retries must be at least 1".into()));
        }
        Ok(())
    }
}

/// Deterministic factor in `[0.5, 1.5]` keyed on `(vertex, attempt)`.
pub fn jitter(vertex: u32, attempt: u32) -> f64 {
    // splitmix64 finalizer
    let mut z = ((vertex as u64) << 32 | attempt as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    0.5 + (z >> 11) as f64 / (1u64 << 53) as f64
}

fn unit_jitter(vertex: u32, attempt: u32) -> Vector3<f64> {
    let salt = |k: u32| jitter(vertex ^ (0x5bd1_e995u32.wrapping_mul(k + 1)), attempt.wrapping_add(k << 16)) - 1.0;
    let v = Vector3::new(salt(1), salt(2), salt(3));
    let n = v.norm();
    if n > 1e-3 {
        v / n
    } else {
        Vector3::x()
    }
}

/// Moves every vertex along its normal by `delta * e_avg(v) * jitter`.
/// Vertices without a defined normal stay put.
///
/// Pure normal offsets keep some symmetric configurations degenerate (two
/// collinear cube edges stay coplanar), so from the second attempt on the
/// direction is tilted by a deterministic tangential component.
pub fn perturb(mesh: &SurfaceMesh, policy: &PerturbationPolicy, attempt: u32) -> SurfaceMesh {
    let mut out = mesh.clone();
    if policy.delta == 0.0 {
        return out;
    }
    let e_avg = mesh.vertex_mean_edge_lengths();
    let normals = mesh.vertex_normals();
    for v in 0..mesh.num_vertices() as u32 {
        let n = normals[v as usize];
        if n != Vector3::zeros() {
            let dir = if attempt <= 1 { n } else { (n + unit_jitter(v, attempt) * 0.5).normalize() };
            let step = policy.delta * e_avg[v as usize] * jitter(v, attempt);
            out.positions_mut()[v as usize] += dir * step;
        }
    }
    out
}
