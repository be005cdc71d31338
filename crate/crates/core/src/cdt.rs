//! Constrained re-triangulation of one intersected face in its own plane.

use std::collections::HashMap;

use nalgebra::Point3;
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use crate::intersect::{IntersectionCatalog, PointKey};
use crate::kernel::exact::{ExactPoint, Rational};
use crate::kernel::{BoundaryDetail, PlaneProjection};
use crate::mesh::SurfaceMesh;

/// What a local edge is made of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// Delaunay edge inside the face; crossing it stays in the face.
    Internal,
    /// Piece of the face's mesh edge starting at `corner`.
    MeshEdge { corner: u8 },
    /// Piece of the intersection segment `segment` with face `partner`.
    Segment { partner: u32, segment: u32 },
}

impl EdgeKind {
    pub fn is_constraint(self) -> bool {
        self != EdgeKind::Internal
    }
}

#[derive(Clone, Debug)]
pub struct LocalTriangulation {
    pub face: u32,
    pub keys: Vec<PointKey>,
    pub points: Vec<Point3<f64>>,
    pub projected: Vec<nalgebra::Point2<f64>>,
    /// Sub-triangles over local point indices, oriented like the parent.
    pub triangles: Vec<[u32; 3]>,
    constraints: HashMap<(u32, u32), EdgeKind>,
    directed: HashMap<(u32, u32), u32>,
    local: HashMap<PointKey, u32>,
}

fn undirected(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl LocalTriangulation {
    /// A face without intersections: the face itself.
    pub fn whole(mesh: &SurfaceMesh, f: u32) -> Self {
        let t = mesh.face(f);
        let points = mesh.triangle(f).to_vec();
        let keys: Vec<PointKey> = t.iter().map(|&v| PointKey::Vertex(v)).collect();
        let mut constraints = HashMap::new();
        let mut directed = HashMap::new();
        for k in 0..3u32 {
            constraints.insert(undirected(k, (k + 1) % 3), EdgeKind::MeshEdge { corner: k as u8 });
            directed.insert((k, (k + 1) % 3), 0);
        }
        let local = keys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        LocalTriangulation {
            face: f,
            keys,
            projected: Vec::new(),
            points,
            triangles: vec![[0, 1, 2]],
            constraints,
            directed,
            local,
        }
    }

    /// Triangulates face `f` constrained by its edges and its segments.
    /// Any numerical trouble is reported as a boundary case so the caller
    /// can perturb and start over.
    pub fn build(mesh: &SurfaceMesh, catalog: &IntersectionCatalog, f: u32) -> Result<Self, BoundaryDetail> {
        let tri = mesh.face(f);
        let corners = mesh.triangle(f);
        let proj = PlaneProjection::for_triangle(&corners).map_err(|_| BoundaryDetail::PointContact)?;

        let mut keys = Vec::new();
        let mut points = Vec::new();
        let mut exact = Vec::new();
        let mut local: HashMap<PointKey, u32> = HashMap::new();
        let mut add = |k: PointKey, p: Point3<f64>, e: &dyn Fn() -> ExactPoint| -> u32 {
            *local.entry(k).or_insert_with(|| {
                keys.push(k);
                points.push(p);
                exact.push(e());
                (keys.len() - 1) as u32
            })
        };
        for k in 0..3 {
            let p = corners[k];
            add(PointKey::Vertex(tri[k]), p, &|| ExactPoint::from_f64(&p));
        }
        let segs = catalog.face_segments(f);
        let mut seg_ends = Vec::with_capacity(segs.len());
        for &s in segs {
            let seg = &catalog.segments[s as usize];
            let a = add(seg.ends[0], seg.points[0], &|| seg.exact[0].clone());
            let b = add(seg.ends[1], seg.points[1], &|| seg.exact[1].clone());
            seg_ends.push((s, seg.partner(f), a, b));
        }
        for &t in &catalog.triples_by_face[f as usize] {
            let tp = &catalog.triples[t as usize];
            add(PointKey::Triple(tp.faces), tp.point, &|| tp.exact.clone());
        }

        // constraint pieces, each chain sorted exactly along its line
        let mut pieces: Vec<(u32, u32, EdgeKind)> = Vec::new();
        let chain =
            |from: u32, to: u32, mut inner: Vec<u32>, kind: EdgeKind, pieces: &mut Vec<(u32, u32, EdgeKind)>| {
                let d = &exact[to as usize] - &exact[from as usize];
                let param = |i: u32| -> Rational { (&exact[i as usize] - &exact[from as usize]).dot(&d) };
                inner.sort_by_cached_key(|&i| param(i));
                let mut prev = from;
                for i in inner.into_iter().chain(std::iter::once(to)) {
                    pieces.push((prev, i, kind));
                    prev = i;
                }
            };
        for k in 0..3u32 {
            let (a, b) = (tri[k as usize], tri[((k + 1) % 3) as usize]);
            let edge = (a.min(b), a.max(b));
            let inner: Vec<u32> = keys
                .iter()
                .enumerate()
                .filter(|(_, key)| matches!(key, PointKey::EdgeFace { edge: e, .. } if *e == edge))
                .map(|(i, _)| i as u32)
                .collect();
            chain(k, (k + 1) % 3, inner, EdgeKind::MeshEdge { corner: k as u8 }, &mut pieces);
        }
        for &(s, g, a, b) in &seg_ends {
            let inner: Vec<u32> = keys
                .iter()
                .enumerate()
                .filter(|(_, key)| matches!(key, PointKey::Triple(ids) if ids.contains(&g)))
                .map(|(i, _)| i as u32)
                .collect();
            chain(a, b, inner, EdgeKind::Segment { partner: g, segment: s }, &mut pieces);
        }

        let projected: Vec<nalgebra::Point2<f64>> = points.iter().map(|p| proj.project(p)).collect();
        let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
        let mut handles = Vec::with_capacity(projected.len());
        for p in &projected {
            let h = cdt.insert(Point2::new(p.x, p.y)).map_err(|_| BoundaryDetail::PointContact)?;
            handles.push(h);
        }
        if cdt.num_vertices() != projected.len() {
            return Err(BoundaryDetail::PointContact);
        }
        let back: HashMap<_, u32> = handles.iter().enumerate().map(|(i, &h)| (h, i as u32)).collect();

        let mut constraints = HashMap::new();
        for &(a, b, kind) in &pieces {
            if a == b || constraints.insert(undirected(a, b), kind).is_some() {
                return Err(BoundaryDetail::EdgeCollinear);
            }
            let (ha, hb) = (handles[a as usize], handles[b as usize]);
            if !cdt.exists_constraint(ha, hb) && cdt.try_add_constraint(ha, hb).is_empty() {
                return Err(BoundaryDetail::EdgeCollinear);
            }
            // a piece passing exactly through another point gets split
            if !cdt.exists_constraint(ha, hb) {
                return Err(BoundaryDetail::EdgeCollinear);
            }
        }

        let all: Vec<[u32; 3]> = cdt.inner_faces().map(|fh| fh.vertices().map(|v| back[&v.fix()])).collect();
        let mut edge_of: HashMap<(u32, u32), usize> = HashMap::new();
        for (i, t) in all.iter().enumerate() {
            for k in 0..3 {
                edge_of.insert((t[k], t[(k + 1) % 3]), i);
            }
        }
        // drop everything reachable from the hull without crossing a mesh edge
        let is_boundary =
            |a: u32, b: u32| matches!(constraints.get(&undirected(a, b)), Some(EdgeKind::MeshEdge { .. }));
        let mut outside = vec![false; all.len()];
        let mut stack = Vec::new();
        for (i, t) in all.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if !edge_of.contains_key(&(b, a)) && !is_boundary(a, b) && !outside[i] {
                    outside[i] = true;
                    stack.push(i);
                }
            }
        }
        while let Some(i) = stack.pop() {
            let t = all[i];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if is_boundary(a, b) {
                    continue;
                }
                if let Some(&j) = edge_of.get(&(b, a)) {
                    if !outside[j] {
                        outside[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        let triangles: Vec<[u32; 3]> = all.iter().zip(&outside).filter(|(_, &o)| !o).map(|(t, _)| *t).collect();
        let mut directed = HashMap::new();
        for (i, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                directed.insert((t[k], t[(k + 1) % 3]), i as u32);
            }
        }
        // mesh-edge pieces bound the face on one side, segment pieces are
        // chords seen from both
        for &(a, b, kind) in &pieces {
            let ok = match kind {
                EdgeKind::MeshEdge { .. } => directed.contains_key(&(a, b)) && !directed.contains_key(&(b, a)),
                _ => directed.contains_key(&(a, b)) && directed.contains_key(&(b, a)),
            };
            if !ok {
                return Err(BoundaryDetail::EdgeCollinear);
            }
        }
        Ok(LocalTriangulation { face: f, keys, points, projected, triangles, constraints, directed, local })
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn kind(&self, a: u32, b: u32) -> EdgeKind {
        self.constraints.get(&undirected(a, b)).copied().unwrap_or(EdgeKind::Internal)
    }

    pub fn local_index(&self, k: &PointKey) -> Option<u32> {
        self.local.get(k).copied()
    }

    /// Sub-triangle using the directed local edge `a -> b`.
    pub fn triangle_with(&self, a: u32, b: u32) -> Option<u32> {
        self.directed.get(&(a, b)).copied()
    }

    /// Sub-triangle using the directed edge between two keys.
    pub fn triangle_with_keys(&self, a: &PointKey, b: &PointKey) -> Option<(u32, usize)> {
        let (la, lb) = (self.local_index(a)?, self.local_index(b)?);
        let t = self.triangle_with(la, lb)?;
        let k = self.triangles[t as usize].iter().position(|&x| x == la)?;
        Some((t, k))
    }

    pub fn key_triangle(&self, t: u32) -> [PointKey; 3] {
        self.triangles[t as usize].map(|i| self.keys[i as usize])
    }

    pub fn point_triangle(&self, t: u32) -> [Point3<f64>; 3] {
        self.triangles[t as usize].map(|i| self.points[i as usize])
    }
}
