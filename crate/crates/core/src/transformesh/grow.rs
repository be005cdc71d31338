//! Region growing over sub-triangles.
//!
//! Every face is a set of sub-triangles: itself when it has no
//! intersections, otherwise the pieces of its constrained triangulation,
//! built the first time the face is entered. Growth moves from a
//! sub-triangle across its edge `a -> b` into the sub-triangle that runs
//! `b -> a`:
//!
//! * across an unconstrained edge that is the neighbour in the same face;
//! * across a piece of a mesh edge it is the neighbour in the twin face;
//! * across a piece of an intersection segment it is the sub-triangle of
//!   the partner face on the side whose normal opposes ours once the two
//!   are folded onto the segment, so the pair wraps the exterior wedge.

use std::collections::HashMap;

use nalgebra::Point3;

use crate::cdt::{EdgeKind, LocalTriangulation};
use crate::intersect::{IntersectionCatalog, PointKey};
use crate::kernel::BoundaryDetail;
use crate::mesh::{face_of, SurfaceMesh, INVALID};

/// A sub-triangle: face and index into its local triangulation.
pub type SubId = (u32, u32);

/// Validity label of an input face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceState {
    Unvisited,
    Valid,
    PartiallyValid,
}

pub struct Grower<'a> {
    mesh: &'a SurfaceMesh,
    catalog: &'a IntersectionCatalog,
    locals: Vec<Option<LocalTriangulation>>,
    visited: Vec<Vec<bool>>,
    pub state: Vec<FaceState>,
    /// Sub-triangles in the order they were reached.
    pub emitted: Vec<SubId>,
    pub triangulations_built: usize,
}

impl<'a> Grower<'a> {
    pub fn new(mesh: &'a SurfaceMesh, catalog: &'a IntersectionCatalog) -> Self {
        let n = mesh.num_faces();
        Grower {
            mesh,
            catalog,
            locals: vec![None; n],
            visited: vec![Vec::new(); n],
            state: vec![FaceState::Unvisited; n],
            emitted: Vec::new(),
            triangulations_built: 0,
        }
    }

    fn ensure(&mut self, f: u32) -> Result<(), BoundaryDetail> {
        if self.locals[f as usize].is_none() {
            let lt = if self.catalog.is_intersected(f) {
                self.triangulations_built += 1;
                LocalTriangulation::build(self.mesh, self.catalog, f)?
            } else {
                LocalTriangulation::whole(self.mesh, f)
            };
            self.visited[f as usize] = vec![false; lt.num_triangles()];
            self.locals[f as usize] = Some(lt);
        }
        Ok(())
    }

    pub fn local(&self, f: u32) -> &LocalTriangulation {
        self.locals[f as usize].as_ref().expect("triangulation built")
    }

    pub fn is_visited(&self, s: SubId) -> bool {
        self.visited[s.0 as usize].get(s.1 as usize).copied().unwrap_or(false)
    }

    /// Sub-triangle across corner edge `k` of `s`, with the matching corner
    /// there; `None` on an open boundary.
    pub fn neighbor(&mut self, s: SubId, k: usize) -> Result<Option<(SubId, usize)>, BoundaryDetail> {
        let (f, t) = s;
        let lt = self.local(f);
        let tri = lt.triangles[t as usize];
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let (ka, kb) = (lt.keys[a as usize], lt.keys[b as usize]);
        let g = match lt.kind(a, b) {
            EdgeKind::Internal => f,
            EdgeKind::MeshEdge { corner } => {
                let h = self.mesh.twin(3 * f + corner as u32);
                if h == INVALID {
                    return Ok(None);
                }
                face_of(h)
            }
            EdgeKind::Segment { partner, .. } => partner,
        };
        self.ensure(g)?;
        match self.local(g).triangle_with_keys(&kb, &ka) {
            Some((u, j)) => Ok(Some(((g, u), j))),
            None => Err(BoundaryDetail::EdgeCollinear),
        }
    }

    /// Floods from the seed face; returns the number of sub-triangles added.
    pub fn grow(&mut self, seed: u32) -> Result<usize, BoundaryDetail> {
        self.ensure(seed)?;
        let start = (seed, 0);
        if self.is_visited(start) {
            return Ok(0);
        }
        let before = self.emitted.len();
        self.mark(start);
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for k in 0..3 {
                if let Some((n, _)) = self.neighbor(s, k)? {
                    if !self.is_visited(n) {
                        self.mark(n);
                        stack.push(n);
                    }
                }
            }
        }
        Ok(self.emitted.len() - before)
    }

    fn mark(&mut self, s: SubId) {
        self.visited[s.0 as usize][s.1 as usize] = true;
        self.emitted.push(s);
        self.state[s.0 as usize] =
            if self.catalog.is_intersected(s.0) { FaceState::PartiallyValid } else { FaceState::Valid };
    }

    /// Output triangles keyed by point identity, with their twin links.
    pub fn assemble(&mut self) -> Result<SurfaceMesh, BoundaryDetail> {
        let mut order = self.emitted.clone();
        order.sort_unstable();
        let index: HashMap<SubId, u32> = order.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
        let mut vertex: HashMap<PointKey, u32> = HashMap::new();
        let mut positions: Vec<Point3<f64>> = Vec::new();
        let mut faces = Vec::with_capacity(order.len());
        let mut twins = vec![INVALID; order.len() * 3];
        for (i, &s) in order.iter().enumerate() {
            let lt = self.local(s.0);
            let keys = lt.key_triangle(s.1);
            let pts = lt.point_triangle(s.1);
            let mut tri = [0u32; 3];
            for k in 0..3 {
                tri[k] = *vertex.entry(keys[k]).or_insert_with(|| {
                    positions.push(pts[k]);
                    (positions.len() - 1) as u32
                });
            }
            faces.push(tri);
            for k in 0..3 {
                if let Some((n, j)) = self.neighbor(s, k)? {
                    let Some(&ni) = index.get(&n) else {
                        return Err(BoundaryDetail::EdgeCollinear);
                    };
                    twins[3 * i + k] = 3 * ni + j as u32;
                }
            }
        }
        Ok(SurfaceMesh::from_raw(positions, faces, twins))
    }
}
