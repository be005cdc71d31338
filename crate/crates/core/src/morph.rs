//! Morphing a surface toward a target mesh or oriented point set.

use std::collections::HashMap;

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use nalgebra::{Point3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{evolve_with, EvolutionParams, FieldProvider, IterationStats, VelocityField};
use crate::mesh::SurfaceMesh;

/// Target samples with unit normals and a nearest-point index.
pub struct OrientedTarget {
    points: Vec<Point3<f64>>,
    normals: Vec<Vector3<f64>>,
    tree: ImmutableKdTree<f64, 3>,
}

impl std::fmt::Debug for OrientedTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OrientedTarget").field("points", &self.points.len()).finish()
    }
}

impl OrientedTarget {
    /// Builds the index. Coincident points are merged and their normals
    /// averaged.
    pub fn from_oriented_points(points: &[Point3<f64>], normals: &[Vector3<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("target has no points".into()));
        }
        if normals.len() != points.len() {
            return Err(Error::InvalidParameter("every target point needs a normal".into()));
        }
        let mut slot: HashMap<[u64; 3], usize> = HashMap::new();
        let mut pts: Vec<Point3<f64>> = Vec::new();
        let mut sums: Vec<Vector3<f64>> = Vec::new();
        for (i, (p, n)) in points.iter().zip(normals).enumerate() {
            let len = n.norm();
            if !(len > 0.0 && len.is_finite()) || !p.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidParameter(format!("target point {i} lacks a usable normal")));
            }
            let key = [p.x, p.y, p.z].map(|c| if c == 0.0 { 0 } else { c.to_bits() });
            let k = *slot.entry(key).or_insert_with(|| {
                pts.push(*p);
                sums.push(Vector3::zeros());
                pts.len() - 1
            });
            sums[k] += n / len;
        }
        let normals: Vec<Vector3<f64>> =
            sums.iter().map(|s| s.try_normalize(1e-12).unwrap_or_else(Vector3::z)).collect();
        let coords: Vec<[f64; 3]> = pts.iter().map(|p| [p.x, p.y, p.z]).collect();
        let tree = ImmutableKdTree::new_from_slice(&coords);
        Ok(OrientedTarget { points: pts, normals, tree })
    }

    /// Vertices of the target mesh with its vertex normals.
    pub fn from_mesh(mesh: &SurfaceMesh) -> Result<Self> {
        let normals = mesh.vertex_normals();
        let mut used = vec![false; mesh.num_vertices()];
        for t in mesh.faces() {
            for &v in t {
                used[v as usize] = true;
            }
        }
        let (pts, ns): (Vec<_>, Vec<_>) = (0..mesh.num_vertices())
            .filter(|&v| used[v] && normals[v].norm() > 0.0)
            .map(|v| (mesh.position(v as u32), normals[v]))
            .unzip();
        Self::from_oriented_points(&pts, &ns)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point3<f64> {
        self.points[i]
    }

    pub fn normal(&self, i: usize) -> Vector3<f64> {
        self.normals[i]
    }

    /// Index of the nearest sample and its distance.
    pub fn nearest(&self, p: &Point3<f64>) -> (usize, f64) {
        let nn = self.tree.nearest_one::<SquaredEuclidean>(&[p.x, p.y, p.z]);
        (nn.item as usize, nn.distance.sqrt())
    }
}

pub fn build_target(points: &[Point3<f64>], normals: &[Vector3<f64>]) -> Result<OrientedTarget> {
    OrientedTarget::from_oriented_points(points, normals)
}

/// `F(p) = ((q - p) . N(p)) N(p)`, `q` the nearest target sample and `N`
/// the vertex normal: vertices move along their normal toward the target.
pub fn morph_velocity(mesh: &SurfaceMesh, target: &OrientedTarget) -> VelocityField {
    let normals = mesh.vertex_normals();
    (0..mesh.num_vertices())
        .into_par_iter()
        .map(|v| {
            let p = mesh.position(v as u32);
            let n = normals[v];
            let (q, _) = target.nearest(&p);
            n * (target.point(q) - p).dot(&n)
        })
        .collect()
}

/// Largest distance from a mesh vertex to its nearest target sample.
pub fn one_sided_distance(mesh: &SurfaceMesh, target: &OrientedTarget) -> f64 {
    mesh.positions().par_iter().map(|p| target.nearest(p).1).reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphConfig {
    pub params: EvolutionParams,
    /// Converged once the one-sided distance stays below this.
    pub threshold: f64,
    pub window: usize,
}

impl MorphConfig {
    /// Defaults: t = 1, alpha = 0.2, beta = 0.1, e1 = 0.7 e_avg,
    /// e2 = 1.5 e_avg, threshold 0.5 e1 over 3 iterations.
    pub fn for_source(source: &SurfaceMesh) -> Self {
        let params = EvolutionParams::for_mesh(source);
        let threshold = 0.5 * params.e1;
        MorphConfig { params, threshold, window: 3 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MorphReport {
    pub iterations: Vec<IterationStats>,
    /// One-sided distance after each iteration.
    pub distances: Vec<f64>,
    pub converged: bool,
}

struct Provider<'a> {
    target: &'a OrientedTarget,
    threshold: f64,
    window: usize,
    distances: Vec<f64>,
    converged: bool,
}

impl FieldProvider for Provider<'_> {
    fn velocity(&mut self, mesh: &SurfaceMesh) -> Result<VelocityField> {
        Ok(morph_velocity(mesh, self.target))
    }

    fn converged(&mut self, mesh: &SurfaceMesh, _stats: &IterationStats) -> bool {
        let d = if mesh.is_empty() { 0.0 } else { one_sided_distance(mesh, self.target) };
        self.distances.push(d);
        let recent = &self.distances[self.distances.len().saturating_sub(self.window)..];
        self.converged = recent.iter().all(|&x| x < self.threshold);
        self.converged
    }
}

pub fn morph(
    source: &SurfaceMesh,
    target: &OrientedTarget,
    config: &MorphConfig,
) -> Result<(SurfaceMesh, MorphReport)> {
    morph_with(source, target, config, |_, _| Ok(()))
}

/// `morph` with a per-iteration callback.
pub fn morph_with(
    source: &SurfaceMesh,
    target: &OrientedTarget,
    config: &MorphConfig,
    on_iteration: impl FnMut(&SurfaceMesh, &IterationStats) -> Result<()>,
) -> Result<(SurfaceMesh, MorphReport)> {
    if !(config.threshold > 0.0) || config.window == 0 {
        return Err(Error::InvalidParameter("convergence threshold and window must be positive".into()));
    }
    let mut provider = Provider {
        target,
        threshold: config.threshold,
        window: config.window,
        distances: Vec::new(),
        converged: false,
    };
    let (out, iterations) = evolve_with(source, &mut provider, &config.params, on_iteration)?;
    if out.is_empty() {
        log::warn!("morph collapsed to an empty surface");
    }
    Ok((out, MorphReport { iterations, distances: provider.distances, converged: provider.converged }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn single_point_target() {
        let t = build_target(&[Point3::new(1.0, 2.0, 3.0)], &[Vector3::new(0.0, 0.0, 2.0)]).unwrap();
        assert_eq!(t.nearest(&Point3::new(-5.0, 0.0, 9.0)).0, 0);
        assert_eq!(t.normal(0), Vector3::z());
    }

    #[test]
    fn duplicates_merged() {
        let p = Point3::new(0.0, 0.0, 0.0);
        let t = build_target(&[p, p, Point3::new(1.0, 0.0, 0.0)], &[Vector3::x(), Vector3::y(), Vector3::z()]).unwrap();
        assert_eq!(t.len(), 2);
        let expect = Vector3::new(1.0, 1.0, 0.0).normalize();
        assert!((t.normal(0) - expect).norm() < 1e-15);
    }

    #[test]
    fn empty_or_unoriented_target_rejected() {
        assert!(build_target(&[], &[]).is_err());
        assert!(build_target(&[Point3::origin()], &[Vector3::zeros()]).is_err());
    }

    #[test]
    fn velocity_vanishes_on_target() {
        let s = shapes::icosphere(2, 1.0);
        let t = OrientedTarget::from_mesh(&s).unwrap();
        assert!(morph_velocity(&s, &t).iter().all(|f| f.norm() == 0.0));
    }

    #[test]
    fn velocity_points_inward_to_smaller_sphere() {
        let s = shapes::icosphere(2, 1.0);
        let t = OrientedTarget::from_mesh(&shapes::icosphere(2, 0.5)).unwrap();
        let f = morph_velocity(&s, &t);
        // icosphere vertex 0 lies on a coordinate-aligned direction pair
        for v in 0..s.num_vertices() {
            assert!(f[v].dot(&s.position(v as u32).coords) < 0.0);
            assert!((f[v].norm() - 0.5).abs() < 0.05);
        }
    }

    #[test]
    fn same_sphere_converges_immediately() {
        let s = shapes::icosphere(2, 1.0);
        let t = OrientedTarget::from_mesh(&s).unwrap();
        let cfg = MorphConfig::for_source(&s);
        let (_, rep) = morph(&s, &t, &cfg).unwrap();
        assert_eq!(rep.iterations.len(), 1);
        assert!(rep.converged);
        assert!(rep.distances[0] < cfg.threshold);
    }

    #[test]
    fn regular_grid_target_builds() {
        // many samples share each coordinate value
        let g = shapes::grid(116, 116, 2.4);
        let t = OrientedTarget::from_mesh(&g).unwrap();
        assert_eq!(t.len(), 117 * 117);
        for q in [Point3::new(1.2, 1.2, 0.5), Point3::new(-0.3, 0.71, -0.2), Point3::new(2.0, 0.013, 0.0)] {
            let (i, d) = t.nearest(&q);
            let best = g.positions().iter().map(|p| (p - q).norm()).fold(f64::INFINITY, f64::min);
            assert_eq!(d, (t.point(i) - q).norm());
            assert!((d - best).abs() < 1e-12);
        }
    }
}
