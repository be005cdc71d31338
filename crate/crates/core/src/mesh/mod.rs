//! Oriented triangle mesh with implicit halfedge connectivity.
//!
//! Halfedge `h` lives in face `h / 3` and runs from corner `h % 3` to the
//! following corner, so `next`, `prev`, `origin` and `face` are arithmetic.
//! Only the twin relation is stored. Boundary halfedges have no twin.

pub mod degenerate;
pub(crate) mod edit;
pub mod io;
pub mod shapes;
pub mod validate;

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type FaceId = u32;
pub type HalfedgeId = u32;

/// Marker for a missing element (boundary twin, unassigned slot).
pub const INVALID: u32 = u32::MAX;

#[inline]
pub fn next(h: HalfedgeId) -> HalfedgeId {
    if h % 3 == 2 {
        h - 2
    } else {
        h + 1
    }
}

#[inline]
pub fn prev(h: HalfedgeId) -> HalfedgeId {
    if h.is_multiple_of(3) {
        h + 2
    } else {
        h - 1
    }
}

#[inline]
pub fn face_of(h: HalfedgeId) -> FaceId {
    h / 3
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SurfaceMesh {
    positions: Vec<Point3<f64>>,
    faces: Vec<[VertexId; 3]>,
    twins: Vec<HalfedgeId>,
}

impl SurfaceMesh {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds connectivity from an indexed triangle list.
    ///
    /// Edges with a single incident face become boundary halfedges.
    /// Fails on edges with more than two faces and on pairs of faces that
    /// traverse a shared edge in the same direction.
    pub fn from_triangles(positions: Vec<Point3<f64>>, faces: Vec<[VertexId; 3]>) -> Result<Self> {
        let nv = positions.len() as u32;
        let mut directed: HashMap<(u32, u32), HalfedgeId> = HashMap::with_capacity(faces.len() * 3);
        for (f, tri) in faces.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Topology(format!("face {f} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0] {
                return Err(Error::Topology(format!("face {f} repeats a vertex")));
            }
            for c in 0..3 {
                let key = (tri[c], tri[(c + 1) % 3]);
                if directed.insert(key, (3 * f + c) as u32).is_some() {
                    let (a, b) = key;
                    return Err(Error::Topology(format!(
                        "edge ({a},{b}) is traversed twice in the same direction \
                         (non-manifold edge or inconsistent orientation)"
                    )));
                }
            }
        }
        let mut twins = vec![INVALID; faces.len() * 3];
        for (&(a, b), &h) in &directed {
            if let Some(&t) = directed.get(&(b, a)) {
                twins[h as usize] = t;
            }
        }
        Ok(Self { positions, faces, twins })
    }

    /// Assembles a mesh from explicit twin links. Caller guarantees that
    /// `twins` is an involution consistent with the face cycles.
    pub(crate) fn from_raw(positions: Vec<Point3<f64>>, faces: Vec<[VertexId; 3]>, twins: Vec<HalfedgeId>) -> Self {
        debug_assert_eq!(twins.len(), faces.len() * 3);
        Self { positions, faces, twins }
    }

    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_halfedges(&self) -> usize {
        self.twins.len()
    }

    pub fn num_edges(&self) -> usize {
        self.twins.iter().enumerate().filter(|&(h, &t)| t == INVALID || (h as u32) < t).count()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn positions(&self) -> &[Point3<f64>] {
        &self.positions
    }

    pub fn positions_mut(&mut self) -> &mut [Point3<f64>] {
        &mut self.positions
    }

    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn position(&self, v: VertexId) -> Point3<f64> {
        self.positions[v as usize]
    }

    pub fn face(&self, f: FaceId) -> [VertexId; 3] {
        self.faces[f as usize]
    }

    pub fn triangle(&self, f: FaceId) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[f as usize];
        [self.position(a), self.position(b), self.position(c)]
    }

    pub fn twin(&self, h: HalfedgeId) -> HalfedgeId {
        self.twins[h as usize]
    }

    pub fn is_boundary_halfedge(&self, h: HalfedgeId) -> bool {
        self.twins[h as usize] == INVALID
    }

    pub fn origin(&self, h: HalfedgeId) -> VertexId {
        self.faces[(h / 3) as usize][(h % 3) as usize]
    }

    pub fn target(&self, h: HalfedgeId) -> VertexId {
        self.origin(next(h))
    }

    pub fn halfedge(&self, f: FaceId, corner: usize) -> HalfedgeId {
        3 * f + corner as u32
    }

    pub fn is_closed(&self) -> bool {
        self.twins.iter().all(|&t| t != INVALID)
    }

    /// Outgoing halfedges of every vertex.
    pub fn outgoing_halfedges(&self) -> Vec<Vec<HalfedgeId>> {
        let mut out = vec![Vec::new(); self.positions.len()];
        for h in 0..self.twins.len() as u32 {
            out[self.origin(h) as usize].push(h);
        }
        out
    }

    /// Vertex neighbours (one-ring), in no particular order.
    pub fn vertex_neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut out: Vec<Vec<VertexId>> = vec![Vec::new(); self.positions.len()];
        for h in 0..self.twins.len() as u32 {
            let (a, b) = (self.origin(h), self.target(h));
            out[a as usize].push(b);
            if self.twin(h) == INVALID {
                out[b as usize].push(a);
            }
        }
        for n in &mut out {
            n.sort_unstable();
            n.dedup();
        }
        out
    }

    /// Twice the area vector of face `f` (cross product of two edges).
    pub fn face_area_vector(&self, f: FaceId) -> Vector3<f64> {
        let [a, b, c] = self.triangle(f);
        (b - a).cross(&(c - a))
    }

    pub fn face_area(&self, f: FaceId) -> f64 {
        0.5 * self.face_area_vector(f).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len() as u32).map(|f| self.face_area(f)).sum()
    }

    pub fn face_normal(&self, f: FaceId) -> Result<Vector3<f64>> {
        let n = self.face_area_vector(f);
        let len = n.norm();
        if len == 0.0 || !len.is_finite() {
            return Err(Error::Degenerate(format!("face {f} has zero area")));
        }
        Ok(n / len)
    }

    pub fn face_centroid(&self, f: FaceId) -> Point3<f64> {
        let [a, b, c] = self.triangle(f);
        Point3::from((a.coords + b.coords + c.coords) / 3.0)
    }

    /// Area-weighted average of incident face normals.
    pub fn vertex_normal(&self, v: VertexId) -> Result<Vector3<f64>> {
        let mut sum = Vector3::zeros();
        for (f, tri) in self.faces.iter().enumerate() {
            if tri.contains(&v) {
                sum += self.face_area_vector(f as u32);
            }
        }
        let len = sum.norm();
        if len == 0.0 {
            return Err(Error::Degenerate(format!("vertex {v} has no well-defined normal")));
        }
        Ok(sum / len)
    }

    /// All vertex normals at once; isolated or degenerate vertices get zero.
    pub fn vertex_normals(&self) -> Vec<Vector3<f64>> {
        let mut acc = vec![Vector3::zeros(); self.positions.len()];
        for (f, tri) in self.faces.iter().enumerate() {
            let n = self.face_area_vector(f as u32);
            for &v in tri {
                acc[v as usize] += n;
            }
        }
        for n in &mut acc {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }
        acc
    }

    /// Mean length of the edges incident to each vertex.
    pub fn vertex_mean_edge_lengths(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.positions.len()];
        let mut count = vec![0u32; self.positions.len()];
        for h in 0..self.twins.len() as u32 {
            let t = self.twin(h);
            if t != INVALID && t < h {
                continue;
            }
            let (a, b) = (self.origin(h), self.target(h));
            let len = (self.position(a) - self.position(b)).norm();
            sum[a as usize] += len;
            sum[b as usize] += len;
            count[a as usize] += 1;
            count[b as usize] += 1;
        }
        sum.iter().zip(&count).map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 }).collect()
    }

    pub fn mean_edge_length(&self) -> f64 {
        let mut total = 0.0;
        let mut n = 0usize;
        for h in 0..self.twins.len() as u32 {
            let t = self.twin(h);
            if t != INVALID && t < h {
                continue;
            }
            total += (self.position(self.origin(h)) - self.position(self.target(h))).norm();
            n += 1;
        }
        if n == 0 {
            0.0
        } else {
            total / n as f64
        }
    }

    /// Divergence-theorem volume; positive for outward orientation.
    pub fn signed_volume(&self) -> Result<f64> {
        if !self.is_closed() {
            return Err(Error::OpenMesh("volume"));
        }
        Ok(self.signed_volume_unchecked())
    }

    pub(crate) fn signed_volume_unchecked(&self) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| {
                let (a, b, c) = (self.position(a).coords, self.position(b).coords, self.position(c).coords);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        let used = self.used_vertices();
        used as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    fn used_vertices(&self) -> usize {
        let mut seen = vec![false; self.positions.len()];
        for tri in &self.faces {
            for &v in tri {
                seen[v as usize] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    pub fn bounding_box(&self) -> Option<(Point3<f64>, Point3<f64>)> {
        let mut it = self.positions.iter();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))))
    }

    /// Face labels by edge adjacency; returns (component count, label per face).
    pub fn component_labels(&self) -> (usize, Vec<u32>) {
        let mut label = vec![INVALID; self.faces.len()];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for start in 0..self.faces.len() {
            if label[start] != INVALID {
                continue;
            }
            label[start] = count;
            stack.push(start as u32);
            while let Some(f) = stack.pop() {
                for c in 0..3 {
                    let t = self.twin(3 * f + c);
                    if t == INVALID {
                        continue;
                    }
                    let g = face_of(t) as usize;
                    if label[g] == INVALID {
                        label[g] = count;
                        stack.push(g as u32);
                    }
                }
            }
            count += 1;
        }
        (count as usize, label)
    }

    pub fn num_components(&self) -> usize {
        self.component_labels().0
    }

    /// Splits the mesh into its edge-connected components.
    pub fn connected_components(&self) -> Vec<SurfaceMesh> {
        let (count, label) = self.component_labels();
        (0..count as u32)
            .map(|c| {
                let keep: Vec<bool> = label.iter().map(|&l| l == c).collect();
                self.extract_faces(&keep)
            })
            .collect()
    }

    /// Sub-mesh of the selected faces, with unused vertices dropped.
    pub fn extract_faces(&self, keep: &[bool]) -> SurfaceMesh {
        let mut vmap = vec![INVALID; self.positions.len()];
        let mut positions = Vec::new();
        let mut fmap = vec![INVALID; self.faces.len()];
        let mut faces = Vec::new();
        for (f, tri) in self.faces.iter().enumerate() {
            if !keep[f] {
                continue;
            }
            fmap[f] = faces.len() as u32;
            let mut out = [0; 3];
            for (k, &v) in tri.iter().enumerate() {
                if vmap[v as usize] == INVALID {
                    vmap[v as usize] = positions.len() as u32;
                    positions.push(self.positions[v as usize]);
                }
                out[k] = vmap[v as usize];
            }
            faces.push(out);
        }
        let mut twins = vec![INVALID; faces.len() * 3];
        for (f, &nf) in fmap.iter().enumerate() {
            if nf == INVALID {
                continue;
            }
            for c in 0..3u32 {
                let t = self.twins[3 * f + c as usize];
                if t != INVALID && fmap[face_of(t) as usize] != INVALID {
                    twins[(3 * nf + c) as usize] = 3 * fmap[face_of(t) as usize] + t % 3;
                }
            }
        }
        SurfaceMesh { positions, faces, twins }
    }

    /// Disjoint union of two meshes.
    pub fn merged(&self, other: &SurfaceMesh) -> SurfaceMesh {
        let vo = self.positions.len() as u32;
        let ho = self.twins.len() as u32;
        let mut out = self.clone();
        out.positions.extend_from_slice(&other.positions);
        out.faces.extend(other.faces.iter().map(|t| [t[0] + vo, t[1] + vo, t[2] + vo]));
        out.twins.extend(other.twins.iter().map(|&t| if t == INVALID { INVALID } else { t + ho }));
        out
    }

    /// Same surface with every face orientation reversed.
    pub fn flipped(&self) -> SurfaceMesh {
        // [a,b,c] -> [a,c,b]: corner 0 (a->b) becomes the reverse of corner 2 (a->c) etc.
        let remap = |h: u32| -> u32 {
            let f = h / 3;
            match h % 3 {
                0 => 3 * f + 2,
                1 => 3 * f + 1,
                _ => 3 * f,
            }
        };
        let faces = self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect();
        let mut twins = vec![INVALID; self.twins.len()];
        for h in 0..self.twins.len() as u32 {
            let t = self.twins[h as usize];
            twins[remap(h) as usize] = if t == INVALID { INVALID } else { remap(t) };
        }
        SurfaceMesh { positions: self.positions.clone(), faces, twins }
    }

    pub fn transformed(&self, f: impl Fn(&Point3<f64>) -> Point3<f64>) -> SurfaceMesh {
        let mut out = self.clone();
        for p in &mut out.positions {
            *p = f(p);
        }
        out
    }

    pub fn translated(&self, d: Vector3<f64>) -> SurfaceMesh {
        self.transformed(|p| p + d)
    }

    /// Drops vertices not referenced by any face.
    pub fn compacted(&self) -> SurfaceMesh {
        self.extract_faces(&vec![true; self.faces.len()])
    }

    /// Boundary loops as ordered vertex cycles.
    pub fn boundary_loops(&self) -> Vec<Vec<VertexId>> {
        let mut by_origin: HashMap<VertexId, Vec<HalfedgeId>> = HashMap::new();
        for h in 0..self.twins.len() as u32 {
            if self.twins[h as usize] == INVALID {
                by_origin.entry(self.origin(h)).or_default().push(h);
            }
        }
        let mut used = std::collections::HashSet::new();
        let mut starts: Vec<HalfedgeId> = by_origin.values().flatten().copied().collect();
        starts.sort_unstable();
        let mut loops = Vec::new();
        for start in starts {
            if used.contains(&start) {
                continue;
            }
            // boundary loop runs opposite to the face orientation: follow target -> origin
            let mut cycle = Vec::new();
            let mut h = start;
            loop {
                used.insert(h);
                cycle.push(self.origin(h));
                let t = self.target(h);
                let cand = by_origin.get(&t).and_then(|v| v.iter().find(|c| !used.contains(c)).copied());
                match cand {
                    Some(n) => h = n,
                    None => break,
                }
            }
            loops.push(cycle);
        }
        loops
    }

    /// Rough genus from Euler characteristic for a closed single component.
    pub fn genus(&self) -> Option<i64> {
        if !self.is_closed() || self.num_components() != 1 {
            return None;
        }
        let chi = self.euler_characteristic();
        if (2 - chi) % 2 != 0 {
            return None;
        }
        Some((2 - chi) / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::shapes;
    use super::*;

    #[test]
    fn tetrahedron_combinatorics() {
        let m = shapes::tetrahedron();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_edges(), 6);
        assert_eq!(m.num_faces(), 4);
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.is_closed());
        for h in 0..m.num_halfedges() as u32 {
            assert_eq!(m.twin(m.twin(h)), h);
            assert_eq!(m.origin(m.twin(h)), m.target(h));
        }
    }

    #[test]
    fn triple_edge_is_rejected() {
        let p = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, -1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let faces = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        assert!(matches!(SurfaceMesh::from_triangles(p, faces), Err(Error::Topology(_))));
    }

    #[test]
    fn cube_volume_and_flip() {
        let cube = shapes::cube(Point3::origin(), 1.0);
        assert!((cube.signed_volume().unwrap() - 1.0).abs() < 1e-12);
        assert!((cube.flipped().signed_volume().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn icosphere_volume_bounds() {
        let exact = 4.0 / 3.0 * std::f64::consts::PI;
        let mut last = 0.0;
        for level in 1..=3 {
            let v = shapes::icosphere(level, 1.0).signed_volume().unwrap();
            assert!(v < exact && v > last);
            last = v;
        }
        assert!(last > 4.10);
    }

    #[test]
    fn open_mesh_volume_errors() {
        let grid = shapes::grid(3, 3, 1.0);
        assert!(matches!(grid.signed_volume(), Err(Error::OpenMesh(_))));
    }

    #[test]
    fn face_normal_right_hand_rule() {
        let p = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        let m = SurfaceMesh::from_triangles(p, vec![[0, 1, 2]]).unwrap();
        assert_eq!(m.face_normal(0).unwrap(), Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(m.flipped().face_normal(0).unwrap(), Vector3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn zero_area_face_normal_errors() {
        let p = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0)];
        let m = SurfaceMesh::from_triangles(p, vec![[0, 1, 2]]).unwrap();
        assert!(m.face_normal(0).is_err());
    }

    #[test]
    fn cube_corner_normal_is_diagonal() {
        // Hand computation: corner 0 touches both triangles of faces x=0, y=0
        // and z=0 (diagonals through it), so the weights are equal.
        let cube = shapes::cube(Point3::origin(), 1.0);
        let n = cube.vertex_normal(0).unwrap();
        let expect = -Vector3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        assert!((n - expect).norm() < 1e-12);
        let n7 = cube.vertex_normal(7).unwrap();
        assert!((n7 + expect).norm() < 1e-12);
    }

    #[test]
    fn components_and_merge() {
        let a = shapes::icosphere(1, 1.0);
        let b = a.translated(Vector3::new(5.0, 0.0, 0.0));
        let both = a.merged(&b);
        assert_eq!(both.connected_components().len(), 2);
        assert_eq!(shapes::torus(1.0, 0.3, 16, 8).connected_components().len(), 1);
        assert!(SurfaceMesh::new().connected_components().is_empty());
    }

    #[test]
    fn torus_genus_one() {
        assert_eq!(shapes::torus(1.0, 0.3, 16, 8).genus(), Some(1));
        assert_eq!(shapes::icosphere(2, 1.0).genus(), Some(0));
    }

    #[test]
    fn boundary_loops_of_grid_and_cylinder() {
        assert_eq!(shapes::grid(4, 4, 1.0).boundary_loops().len(), 1);
        assert_eq!(shapes::grid(4, 4, 1.0).boundary_loops()[0].len(), 16);
        assert_eq!(shapes::open_cylinder(1.0, 2.0, 12, 3).boundary_loops().len(), 2);
    }
}
