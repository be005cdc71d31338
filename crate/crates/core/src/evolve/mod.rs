//! Topology-adaptive surface evolution: move, clean, remesh, smooth.

mod laplace;
mod remesh;

use std::time::Instant;

use nalgebra::Vector3;
use serde::Serialize;

pub use laplace::{laplace_beltrami, laplacians, laplacians_of, smooth};
pub use remesh::{
    adaptive_remesh, cull_tiny_components, optimize_valence, optimize_valence_within, valence_energy, RemeshReport,
};

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;
use crate::transformesh::{transformesh_with_stats, TransformeshOptions};

pub type VelocityField = Vec<Vector3<f64>>;

/// Supplies the velocity of every vertex, and optionally decides when the
/// evolution has reached its goal.
pub trait FieldProvider {
    fn velocity(&mut self, mesh: &SurfaceMesh) -> Result<VelocityField>;

    fn converged(&mut self, _mesh: &SurfaceMesh, _stats: &IterationStats) -> bool {
        false
    }
}

impl<F: FnMut(&SurfaceMesh) -> Result<VelocityField>> FieldProvider for F {
    fn velocity(&mut self, mesh: &SurfaceMesh) -> Result<VelocityField> {
        self(mesh)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionParams {
    pub t: f64,
    /// Largest step as a fraction of the local mean edge length.
    pub alpha: f64,
    pub beta: f64,
    pub beta2: f64,
    pub e1: f64,
    pub e2: f64,
    pub max_iterations: usize,
    /// Stop once the mean step length, averaged over the last
    /// `stop_window` iterations, is below `stop_fraction * e1`.
    pub stop_fraction: f64,
    pub stop_window: usize,
    pub flip_by_min_angle: bool,
    pub cleaning: TransformeshOptions,
}

impl EvolutionParams {
    /// Defaults with edge bounds relative to the mesh's mean edge length.
    pub fn for_mesh(mesh: &SurfaceMesh) -> Self {
        let e = mesh.mean_edge_length();
        EvolutionParams {
            t: 1.0,
            alpha: 0.2,
            beta: 0.1,
            beta2: 0.0,
            e1: 0.7 * e,
            e2: 1.5 * e,
            max_iterations: 100,
            stop_fraction: 0.01,
            stop_window: 3,
            flip_by_min_angle: false,
            cleaning: TransformeshOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad("t must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta >= 0.0 && self.beta2 >= 0.0) {
            return bad("beta and beta2 must be non-negative");
        }
        if !(self.e1 > 0.0 && self.e1 < self.e2 && self.e2.is_finite()) {
            return bad("edge bounds need 0 < e1 < e2");
        }
        if self.stop_window == 0 {
            return bad("stop window must be at least 1");
        }
        self.cleaning.policy.validate()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub faces: usize,
    pub vertices: usize,
    pub components: usize,
    pub intersection_segments: usize,
    pub transformesh_time_s: f64,
    pub total_time_s: f64,
    pub mean_displacement: f64,
    pub max_displacement: f64,
    pub remesh: RemeshReport,
    pub flips: usize,
}

/// Moves every vertex by `t * F`, clamped to `alpha * e_avg(v)`.
/// Returns the new mesh and the displacement lengths.
pub fn apply_step(mesh: &SurfaceMesh, field: &[Vector3<f64>], t: f64, alpha: f64) -> (SurfaceMesh, Vec<f64>) {
    let e_avg = mesh.vertex_mean_edge_lengths();
    let mut out = mesh.clone();
    let mut moved = Vec::with_capacity(field.len());
    for (v, p) in out.positions_mut().iter_mut().enumerate() {
        let mut d = field[v] * t;
        let bound = alpha * e_avg[v];
        let len = d.norm();
        if len > bound {
            d *= bound / len;
        }
        *p += d;
        moved.push(d.norm());
    }
    (out, moved)
}

fn check_field(mesh: &SurfaceMesh, field: &[Vector3<f64>]) -> Result<()> {
    if field.len() != mesh.num_vertices() {
        return Err(Error::InvalidParameter(format!(
            "velocity field has {} entries for {} vertices",
            field.len(),
            mesh.num_vertices()
        )));
    }
    match field.iter().position(|f| !f.iter().all(|c| c.is_finite())) {
        Some(v) => Err(Error::NonFiniteVelocity(v as u32)),
        None => Ok(()),
    }
}

/// Runs the evolution loop. Each iteration computes the field, steps,
/// removes self-intersections, remeshes, flips toward valence 6 and
/// smooths. The returned surface gets one more cleaning pass.
pub fn evolve(
    mesh: &SurfaceMesh,
    provider: &mut dyn FieldProvider,
    params: &EvolutionParams,
) -> Result<(SurfaceMesh, Vec<IterationStats>)> {
    evolve_with(mesh, provider, params, |_, _| Ok(()))
}

/// `evolve` with a callback after every iteration (snapshots, logging).
pub fn evolve_with(
    mesh: &SurfaceMesh,
    provider: &mut dyn FieldProvider,
    params: &EvolutionParams,
    mut on_iteration: impl FnMut(&SurfaceMesh, &IterationStats) -> Result<()>,
) -> Result<(SurfaceMesh, Vec<IterationStats>)> {
    params.validate()?;
    let start = Instant::now();
    let mut current = mesh.clone();
    let mut history: Vec<IterationStats> = Vec::new();
    for iteration in 1..=params.max_iterations {
        if current.is_empty() {
            break;
        }
        let field = provider.velocity(&current)?;
        check_field(&current, &field)?;
        let (moved, lengths) = apply_step(&current, &field, params.t, params.alpha);

        let mut cleaning = params.cleaning;
        cleaning.open_surface_mode |= !moved.is_closed();
        let tm_start = Instant::now();
        let (cleaned, tm) = transformesh_with_stats(&moved, &cleaning)?;
        let tm_time = tm_start.elapsed().as_secs_f64();

        let (remeshed, report) = adaptive_remesh(&cleaned, params.e1, params.e2);
        let (flipped, flips) = optimize_valence_within(&remeshed, params.flip_by_min_angle, params.e1, params.e2);
        current = smooth(&flipped, params.beta, params.beta2);

        let stats = IterationStats {
            iteration,
            faces: current.num_faces(),
            vertices: current.num_vertices(),
            components: current.num_components(),
            intersection_segments: tm.intersection_segments,
            transformesh_time_s: tm_time,
            total_time_s: start.elapsed().as_secs_f64(),
            mean_displacement: if lengths.is_empty() {
                0.0
            } else {
                lengths.iter().sum::<f64>() / lengths.len() as f64
            },
            max_displacement: lengths.iter().copied().fold(0.0, f64::max),
            remesh: report,
            flips,
        };
        log::info!(
            "iteration {iteration}: {} faces, {} segments, mean step {:.3e}",
            stats.faces,
            stats.intersection_segments,
            stats.mean_displacement
        );
        on_iteration(&current, &stats)?;
        history.push(stats);

        let window = &history[history.len().saturating_sub(params.stop_window)..];
        let mean = window.iter().map(|s| s.mean_displacement).sum::<f64>() / window.len() as f64;
        let last = history.last().expect("just pushed");
        let reached = provider.converged(&current, last);
        if reached || mean < params.stop_fraction * params.e1 {
            break;
        }
    }
    // remeshing and smoothing after the last cleaning can reintroduce contacts
    if !current.is_empty() {
        let mut cleaning = params.cleaning;
        cleaning.open_surface_mode |= !current.is_closed();
        current = transformesh_with_stats(&current, &cleaning)?.0;
    }
    Ok((current, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn clamp_is_exact() {
        let s = shapes::icosphere(2, 1.0);
        let e = s.vertex_mean_edge_lengths();
        let field: Vec<Vector3<f64>> =
            (0..s.num_vertices()).map(|v| s.position(v as u32).coords * 10.0 * e[v] / 0.2).collect();
        let (_, moved) = apply_step(&s, &field, 1.0, 0.2);
        for v in 0..s.num_vertices() {
            assert!((moved[v] - 0.2 * e[v]).abs() < 1e-15);
        }
        let small: Vec<Vector3<f64>> = field.iter().map(|f| f * 1e-3).collect();
        let (m, moved) = apply_step(&s, &small, 1.0, 0.2);
        for v in 0..s.num_vertices() {
            assert!((m.position(v as u32) - (s.position(v as u32) + small[v])).norm() < 1e-15);
            assert!(moved[v] < 0.2 * e[v]);
        }
    }

    #[test]
    fn zero_field_converges_at_once() {
        let s = shapes::icosphere(2, 1.0);
        let mut zero = |m: &SurfaceMesh| Ok(vec![Vector3::zeros(); m.num_vertices()]);
        let mut p = EvolutionParams::for_mesh(&s);
        p.beta = 0.0;
        let (out, hist) = evolve(&s, &mut zero, &p).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(out.num_faces(), s.num_faces());
    }

    #[test]
    fn non_finite_velocity_names_vertex() {
        let s = shapes::icosphere(1, 1.0);
        let mut bad = |m: &SurfaceMesh| {
            let mut f = vec![Vector3::zeros(); m.num_vertices()];
            f[5].x = f64::NAN;
            Ok(f)
        };
        let r = evolve(&s, &mut bad, &EvolutionParams::for_mesh(&s));
        assert!(matches!(r, Err(Error::NonFiniteVelocity(5))));
    }
}
