//! Mutable corner-table mesh for local edits (flip, split, collapse).
//!
//! Faces keep the `3 * f + corner` halfedge layout of [`SurfaceMesh`]; dead
//! faces are tombstoned and recycled. Every edit is expressed as replacing
//! a small patch of faces and is rejected, without side effects, if the
//! patch would not re-link into a manifold.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::{face_of, next, prev, SurfaceMesh, INVALID};

#[derive(Clone, Debug)]
pub(crate) struct EditMesh {
    pub pos: Vec<Point3<f64>>,
    faces: Vec<[u32; 3]>,
    twins: Vec<u32>,
    /// One outgoing halfedge per live vertex, `INVALID` once removed.
    vhe: Vec<u32>,
    free: Vec<u32>,
}

impl EditMesh {
    pub fn from_mesh(m: &SurfaceMesh) -> Self {
        let faces = m.faces().to_vec();
        let twins: Vec<u32> = (0..m.num_halfedges() as u32).map(|h| m.twin(h)).collect();
        let mut vhe = vec![INVALID; m.num_vertices()];
        for (f, tri) in faces.iter().enumerate() {
            for c in 0..3 {
                vhe[tri[c] as usize] = (3 * f + c) as u32;
            }
        }
        Self { pos: m.positions().to_vec(), faces, twins, vhe, free: Vec::new() }
    }

    pub fn to_mesh(&self) -> SurfaceMesh {
        // live vertices and faces keep their relative order
        let mut vmap = vec![INVALID; self.pos.len()];
        let mut positions = Vec::new();
        for v in 0..self.pos.len() {
            if self.vhe[v] != INVALID {
                vmap[v] = positions.len() as u32;
                positions.push(self.pos[v]);
            }
        }
        let mut fmap = vec![INVALID; self.faces.len()];
        let mut faces = Vec::new();
        for f in self.live_faces() {
            fmap[f as usize] = faces.len() as u32;
            faces.push(self.faces[f as usize].map(|v| vmap[v as usize]));
        }
        let mut twins = vec![INVALID; faces.len() * 3];
        for f in self.live_faces() {
            for c in 0..3u32 {
                let t = self.twins[(3 * f + c) as usize];
                if t != INVALID {
                    twins[(3 * fmap[f as usize] + c) as usize] = 3 * fmap[face_of(t) as usize] + t % 3;
                }
            }
        }
        SurfaceMesh::from_raw(positions, faces, twins)
    }

    pub fn num_face_slots(&self) -> usize {
        self.faces.len()
    }

    pub fn is_live_face(&self, f: u32) -> bool {
        self.faces[f as usize][0] != INVALID
    }

    pub fn live_faces(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.faces.len() as u32).filter(|&f| self.is_live_face(f))
    }

    pub fn face(&self, f: u32) -> [u32; 3] {
        self.faces[f as usize]
    }

    pub fn origin(&self, h: u32) -> u32 {
        self.faces[(h / 3) as usize][(h % 3) as usize]
    }

    pub fn target(&self, h: u32) -> u32 {
        self.origin(next(h))
    }

    pub fn twin(&self, h: u32) -> u32 {
        self.twins[h as usize]
    }

    /// One halfedge per undirected edge.
    pub fn edges(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for f in self.live_faces() {
            for c in 0..3 {
                let h = 3 * f + c;
                let t = self.twins[h as usize];
                if t == INVALID || h < t {
                    out.push(h);
                }
            }
        }
        out
    }

    pub fn edge_length(&self, h: u32) -> f64 {
        (self.pos[self.origin(h) as usize] - self.pos[self.target(h) as usize]).norm()
    }

    /// Outgoing halfedges of `v` in rotation order. For a boundary vertex
    /// the first entry is the one whose face has no clockwise neighbour.
    pub fn outgoing(&self, v: u32) -> Vec<u32> {
        let h0 = self.vhe[v as usize];
        if h0 == INVALID {
            return Vec::new();
        }
        let mut out = vec![h0];
        let mut h = h0;
        loop {
            let t = self.twins[prev(h) as usize];
            if t == INVALID {
                break;
            }
            if t == h0 {
                return out;
            }
            out.push(t);
            h = t;
        }
        // open fan: walk the other way from h0
        let mut back = Vec::new();
        let mut h = h0;
        loop {
            let t = self.twins[h as usize];
            if t == INVALID {
                break;
            }
            h = next(t);
            back.push(h);
        }
        back.reverse();
        back.extend(out);
        back
    }

    pub fn is_boundary_vertex(&self, v: u32) -> bool {
        let out = self.outgoing(v);
        out.first().is_some_and(|&h| self.twins[h as usize] == INVALID)
            || out.last().is_some_and(|&h| self.twins[prev(h) as usize] == INVALID)
    }

    /// One-ring vertices of `v`.
    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        let out = self.outgoing(v);
        let mut n: Vec<u32> = out.iter().map(|&h| self.target(h)).collect();
        if let Some(&last) = out.last() {
            if self.twins[prev(last) as usize] == INVALID {
                n.push(self.origin(prev(last)));
            }
        }
        n
    }

    pub fn valence(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    pub fn face_normal(&self, f: u32) -> Vector3<f64> {
        let [a, b, c] = self.faces[f as usize].map(|v| self.pos[v as usize]);
        (b - a).cross(&(c - a))
    }

    fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).contains(&b)
    }

    /// Replaces the faces `old` by `new` if the result re-links cleanly.
    fn replace_faces(&mut self, old: &[u32], new: &[[u32; 3]]) -> bool {
        let in_old = |f: u32| old.contains(&f);
        let mut external: HashMap<(u32, u32), u32> = HashMap::new();
        for &f in old {
            for c in 0..3 {
                let t = self.twins[(3 * f + c) as usize];
                if t != INVALID && !in_old(face_of(t)) {
                    external.insert((self.origin(t), self.target(t)), t);
                }
            }
        }
        let mut slots: Vec<u32> = old.iter().copied().take(new.len()).collect();
        let recycled = (new.len() - slots.len()).min(self.free.len());
        let kept_free = self.free.len() - recycled;
        slots.extend(self.free[kept_free..].iter().rev());
        let mut appended = self.faces.len() as u32;
        while slots.len() < new.len() {
            slots.push(appended);
            appended += 1;
        }
        let mut directed: HashMap<(u32, u32), u32> = HashMap::new();
        for (k, tri) in new.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0] {
                return false;
            }
            for c in 0..3 {
                if directed.insert((tri[c], tri[(c + 1) % 3]), 3 * slots[k] + c as u32).is_some() {
                    return false;
                }
            }
        }
        for i in 0..new.len() {
            for j in i + 1..new.len() {
                let (mut a, mut b) = (new[i], new[j]);
                a.sort_unstable();
                b.sort_unstable();
                if a == b {
                    return false;
                }
            }
        }
        let mut links = Vec::with_capacity(directed.len());
        let mut used_external = 0;
        for (&(u, v), &h) in &directed {
            let t = if let Some(&t) = directed.get(&(v, u)) {
                t
            } else if let Some(&t) = external.get(&(v, u)) {
                used_external += 1;
                t
            } else {
                INVALID
            };
            links.push((h, t));
        }
        if used_external != external.len() {
            return false;
        }
        // commit
        let mut touched: Vec<u32> = old.iter().flat_map(|&f| self.faces[f as usize]).collect();
        touched.sort_unstable();
        touched.dedup();
        let removed: Vec<u32> = old.iter().skip(new.len()).copied().collect();
        for &f in &removed {
            self.faces[f as usize] = [INVALID; 3];
            for c in 0..3 {
                self.twins[(3 * f + c) as usize] = INVALID;
            }
        }
        self.free.truncate(kept_free);
        self.free.extend(removed);
        while self.faces.len() < appended as usize {
            self.faces.push([INVALID; 3]);
            self.twins.extend_from_slice(&[INVALID; 3]);
        }
        for (k, tri) in new.iter().enumerate() {
            self.faces[slots[k] as usize] = *tri;
        }
        for (h, t) in links {
            self.twins[h as usize] = t;
            if t != INVALID {
                self.twins[t as usize] = h;
            }
        }
        for v in touched {
            self.vhe[v as usize] = INVALID;
        }
        for (k, tri) in new.iter().enumerate() {
            for c in 0..3 {
                self.vhe[tri[c] as usize] = 3 * slots[k] + c as u32;
            }
        }
        for (&(u, _), &t) in &external {
            if self.vhe[u as usize] == INVALID {
                self.vhe[u as usize] = t;
            }
        }
        true
    }

    /// Faces incident to `v`.
    pub fn vertex_faces(&self, v: u32) -> Vec<u32> {
        self.outgoing(v).iter().map(|&h| face_of(h)).collect()
    }

    /// Flips the interior edge of `h`; `false` if not allowed.
    pub fn flip(&mut self, h: u32) -> bool {
        let t = self.twins[h as usize];
        if t == INVALID {
            return false;
        }
        let (a, b) = (self.origin(h), self.target(h));
        let c = self.origin(prev(h));
        let d = self.origin(prev(t));
        if c == d || self.has_edge(c, d) {
            return false;
        }
        self.replace_faces(&[face_of(h), face_of(t)], &[[c, a, d], [d, b, c]])
    }

    /// Inserts a vertex at `p` on the edge of `h`; returns it.
    pub fn split(&mut self, h: u32, p: Point3<f64>) -> Option<u32> {
        let (a, b) = (self.origin(h), self.target(h));
        let c = self.origin(prev(h));
        let t = self.twins[h as usize];
        let m = self.pos.len() as u32;
        self.pos.push(p);
        self.vhe.push(INVALID);
        let ok = if t == INVALID {
            self.replace_faces(&[face_of(h)], &[[a, m, c], [m, b, c]])
        } else {
            let d = self.origin(prev(t));
            self.replace_faces(&[face_of(h), face_of(t)], &[[a, m, c], [m, b, c], [b, m, d], [m, a, d]])
        };
        if ok {
            Some(m)
        } else {
            self.pos.pop();
            self.vhe.pop();
            None
        }
    }

    /// Merges the endpoints of an interior edge into its origin placed at
    /// `p`. Checks the link condition, keeps boundaries intact and, with
    /// `keep_orientation`, refuses to turn any face over.
    pub fn collapse(&mut self, h: u32, p: Point3<f64>, keep_orientation: bool) -> bool {
        let t = self.twins[h as usize];
        if t == INVALID {
            return false;
        }
        let (a, b) = (self.origin(h), self.target(h));
        if self.is_boundary_vertex(a) || self.is_boundary_vertex(b) {
            return false;
        }
        let (c, d) = (self.origin(prev(h)), self.origin(prev(t)));
        let na = self.neighbors(a);
        let nb = self.neighbors(b);
        let mut common: Vec<u32> = na.iter().copied().filter(|v| nb.contains(v)).collect();
        common.sort_unstable();
        let mut expected = vec![c, d];
        expected.sort_unstable();
        if common != expected {
            return false;
        }
        let mut old = self.vertex_faces(a);
        for f in self.vertex_faces(b) {
            if !old.contains(&f) {
                old.push(f);
            }
        }
        let mut new = Vec::new();
        let mut before = Vec::new();
        for &f in &old {
            let tri = self.faces[f as usize];
            if tri.contains(&a) && tri.contains(&b) {
                continue;
            }
            before.push(self.face_normal(f));
            new.push(tri.map(|v| if v == b { a } else { v }));
        }
        let saved = self.pos[a as usize];
        self.pos[a as usize] = p;
        if keep_orientation {
            for (tri, n0) in new.iter().zip(&before) {
                let [x, y, z] = tri.map(|v| self.pos[v as usize]);
                if (y - x).cross(&(z - x)).dot(n0) <= 0.0 {
                    self.pos[a as usize] = saved;
                    return false;
                }
            }
        }
        if !self.replace_faces(&old, &new) {
            self.pos[a as usize] = saved;
            return false;
        }
        self.vhe[b as usize] = INVALID;
        true
    }
}
