//! Ray-sum winding numbers, the exterior-face test and seed search.

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bvh::Bvh;
use crate::error::{Error, Result};
use crate::intersect::{face_boxes_bvh, IntersectionCatalog};
use crate::kernel::{orient3d, Sign};
use crate::mesh::{face_of, SurfaceMesh, INVALID};

pub const MAX_RAY_ATTEMPTS: u32 = 16;

/// Outcome of one ray cast.
#[derive(Clone, Debug, PartialEq)]
pub struct WindingQuery {
    pub origin: Point3<f64>,
    pub direction: Vector3<f64>,
    /// `(face, contribution)` for every face crossed.
    pub hits: Vec<(u32, i32)>,
    /// The ray grazed an edge, a vertex, or started on a face plane it meets.
    pub degenerate: bool,
}

impl WindingQuery {
    pub fn value(&self) -> i32 {
        self.hits.iter().map(|h| h.1).sum()
    }
}

/// A mesh with its face tree, ready for repeated winding queries.
pub struct WindingEngine<'a> {
    mesh: &'a SurfaceMesh,
    bvh: Bvh,
    reach: f64,
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random unit vector within `max_angle` of `axis`.
fn random_in_cone(rng: &mut ChaCha8Rng, axis: &Vector3<f64>, max_angle: f64) -> Vector3<f64> {
    let a = axis.normalize();
    let helper = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let u = a.cross(&helper).normalize();
    let w = a.cross(&u);
    let cos_t = 1.0 - rng.gen_range(0.0..1.0) * (1.0 - max_angle.cos());
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    a * cos_t + (u * phi.cos() + w * phi.sin()) * sin_t
}

impl<'a> WindingEngine<'a> {
    pub fn new(mesh: &'a SurfaceMesh) -> Self {
        let bvh = face_boxes_bvh(mesh);
        let reach = match mesh.bounding_box() {
            Some((lo, hi)) => (hi - lo).norm() + lo.coords.abs().max() + hi.coords.abs().max() + 1.0,
            None => 1.0,
        };
        Self { mesh, bvh, reach }
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        self.mesh
    }

    /// Casts the ray `origin + s * dir`, `s > 0`, past every face.
    pub fn cast(&self, origin: &Point3<f64>, dir: &Vector3<f64>, exclude: Option<u32>) -> WindingQuery {
        let far_len = self.reach + (origin.coords.abs().max());
        let q = origin + dir.normalize() * (2.0 * far_len);
        let mut hits = Vec::new();
        let mut degenerate = false;
        for f in self.bvh.segment_candidates(origin, &q) {
            if Some(f) == exclude {
                continue;
            }
            let [a, b, c] = self.mesh.triangle(f);
            let so = orient3d(&a, &b, &c, origin);
            let sq = orient3d(&a, &b, &c, &q);
            if so == sq && so != Sign::Zero {
                continue;
            }
            let t = [orient3d(origin, &q, &a, &b), orient3d(origin, &q, &b, &c), orient3d(origin, &q, &c, &a)];
            let pos = t.contains(&Sign::Positive);
            let neg = t.contains(&Sign::Negative);
            if pos && neg {
                continue;
            }
            // the line meets the closed triangle
            if so == Sign::Zero || sq == Sign::Zero || t.contains(&Sign::Zero) {
                degenerate = true;
                break;
            }
            hits.push((f, -so.as_i32()));
        }
        WindingQuery { origin: *origin, direction: *dir, hits, degenerate }
    }

    /// Winding number of `p` (not on the surface) with respect to the mesh.
    pub fn winding_number(&self, p: &Point3<f64>, seed: u64) -> Result<i32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MAX_RAY_ATTEMPTS {
            let q = self.cast(p, &random_unit(&mut rng), None);
            if !q.degenerate {
                return Ok(q.value());
            }
        }
        Err(Error::DegenerateRays(MAX_RAY_ATTEMPTS))
    }

    /// Winding just in front of face `f`: cast from its centroid along its
    /// normal (then within 10 degrees of it), ignoring `f` itself.
    pub fn front_winding(&self, f: u32, seed: u64) -> Result<i32> {
        let n = self.mesh.face_area_vector(f);
        if n.norm() == 0.0 {
            return Err(Error::Degenerate(format!("face {f} has zero area")));
        }
        let o = self.mesh.face_centroid(f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (f as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut dir = n.normalize();
        for _ in 0..MAX_RAY_ATTEMPTS {
            let q = self.cast(&o, &dir, Some(f));
            if !q.degenerate {
                return Ok(q.value());
            }
            dir = random_in_cone(&mut rng, &n, 10f64.to_radians());
        }
        Err(Error::DegenerateRays(MAX_RAY_ATTEMPTS))
    }

    pub fn is_exterior_face(&self, f: u32, seed: u64) -> Result<bool> {
        Ok(self.front_winding(f, seed)? == 0)
    }
}

pub fn winding_number(p: &Point3<f64>, mesh: &SurfaceMesh, seed: u64) -> Result<i32> {
    WindingEngine::new(mesh).winding_number(p, seed)
}

pub fn is_exterior_face(f: u32, mesh: &SurfaceMesh, catalog: &IntersectionCatalog, seed: u64) -> Result<bool> {
    if catalog.is_intersected(f) {
        return Ok(false);
    }
    WindingEngine::new(mesh).is_exterior_face(f, seed)
}

/// Per-face seed bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedState {
    Unknown,
    /// Known not to face the exterior.
    Interior,
    /// Already part of the output.
    Visited,
}

/// Ascending scan for an unvisited intersection-free face facing the
/// exterior. A rejected face condemns its whole intersection-free patch:
/// the winding number in front of such a patch cannot change along it.
pub struct SeedFinder {
    pub state: Vec<SeedState>,
    cursor: usize,
    seed: u64,
}

impl SeedFinder {
    pub fn new(num_faces: usize, seed: u64) -> Self {
        Self { state: vec![SeedState::Unknown; num_faces], cursor: 0, seed }
    }

    pub fn mark_visited(&mut self, f: u32) {
        self.state[f as usize] = SeedState::Visited;
    }

    /// `winding` is consulted for the closed surface (holes filled) while
    /// `mesh` is the surface being cleaned; faces of `mesh` are assumed to
    /// be the first faces of `winding.mesh()`.
    pub fn next_seed(
        &mut self,
        mesh: &SurfaceMesh,
        catalog: &IntersectionCatalog,
        winding: &WindingEngine,
    ) -> Result<Option<u32>> {
        while self.cursor < mesh.num_faces() {
            let f = self.cursor as u32;
            if self.state[self.cursor] != SeedState::Unknown || catalog.is_intersected(f) {
                self.cursor += 1;
                continue;
            }
            if winding.is_exterior_face(f, self.seed)? {
                return Ok(Some(f));
            }
            self.condemn_patch(mesh, catalog, f);
            self.cursor += 1;
        }
        Ok(None)
    }

    fn condemn_patch(&mut self, mesh: &SurfaceMesh, catalog: &IntersectionCatalog, f: u32) {
        let mut stack = vec![f];
        self.state[f as usize] = SeedState::Interior;
        while let Some(g) = stack.pop() {
            for c in 0..3 {
                let t = mesh.twin(3 * g + c);
                if t == INVALID {
                    continue;
                }
                let h = face_of(t);
                if self.state[h as usize] == SeedState::Unknown && !catalog.is_intersected(h) {
                    self.state[h as usize] = SeedState::Interior;
                    stack.push(h);
                }
            }
        }
    }
}

pub fn find_seed(
    mesh: &SurfaceMesh,
    catalog: &IntersectionCatalog,
    visited: &[bool],
    seed: u64,
) -> Result<Option<u32>> {
    let engine = WindingEngine::new(mesh);
    let mut finder = SeedFinder::new(mesh.num_faces(), seed);
    for (f, &v) in visited.iter().enumerate() {
        if v {
            finder.mark_visited(f as u32);
        }
    }
    finder.next_seed(mesh, catalog, &engine)
}

/// Temporary fans closing the boundary loops of an open surface.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HoleClosure {
    pub original_vertices: usize,
    pub original_faces: usize,
    /// One centre vertex per closed loop.
    pub centers: Vec<u32>,
}

impl HoleClosure {
    pub fn is_synthetic_face(&self, f: u32) -> bool {
        f as usize >= self.original_faces
    }

    pub fn num_loops(&self) -> usize {
        self.centers.len()
    }

    /// Drops the fans again; the original mesh comes back exactly.
    pub fn restore(&self, closed: &SurfaceMesh) -> SurfaceMesh {
        let positions = closed.positions()[..self.original_vertices].to_vec();
        let faces = closed.faces()[..self.original_faces].to_vec();
        let limit = 3 * self.original_faces as u32;
        let twins = (0..limit).map(|h| closed.twin(h)).map(|t| if t >= limit { INVALID } else { t }).collect();
        SurfaceMesh::from_raw(positions, faces, twins)
    }
}

/// Fans every boundary loop to a centre vertex. The centre starts at the
/// loop's centroid and is pushed behind the surface by the loop's mean
/// radius times the average normal of the faces along the loop. On a
/// sheet-like patch this keeps the fan off the sheet's own plane, so rays
/// leaving the front of the sheet never meet it; around a tube end the
/// normals cancel and the fan stays nearly flat.
pub fn close_holes(mesh: &SurfaceMesh) -> (SurfaceMesh, HoleClosure) {
    let loops = mesh.boundary_loops();
    let mut closure =
        HoleClosure { original_vertices: mesh.num_vertices(), original_faces: mesh.num_faces(), centers: Vec::new() };
    if loops.is_empty() {
        return (mesh.clone(), closure);
    }
    let border: std::collections::HashMap<(u32, u32), u32> = (0..mesh.num_halfedges() as u32)
        .filter(|&h| mesh.is_boundary_halfedge(h))
        .map(|h| ((mesh.origin(h), mesh.target(h)), h / 3))
        .collect();
    let mut positions = mesh.positions().to_vec();
    let mut faces = mesh.faces().to_vec();
    for lp in &loops {
        let c = lp.iter().fold(Vector3::zeros(), |acc, &v| acc + mesh.position(v).coords) / lp.len() as f64;
        let radius = lp.iter().map(|&v| (mesh.position(v).coords - c).norm()).sum::<f64>() / lp.len() as f64;
        let mut back = Vector3::zeros();
        for i in 0..lp.len() {
            if let Some(n) = border.get(&(lp[i], lp[(i + 1) % lp.len()])).and_then(|&f| mesh.face_normal(f).ok()) {
                back += n;
            }
        }
        back /= lp.len() as f64;
        let center = positions.len() as u32;
        positions.push(Point3::from(c - back * radius));
        closure.centers.push(center);
        for i in 0..lp.len() {
            let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
            faces.push([b, a, center]);
        }
    }
    let twins = twins_extending(mesh, &faces);
    (SurfaceMesh::from_raw(positions, faces, twins), closure)
}

/// Twin table for `faces` whose prefix is `mesh`'s faces; the prefix keeps
/// its existing links.
fn twins_extending(mesh: &SurfaceMesh, faces: &[[u32; 3]]) -> Vec<u32> {
    use std::collections::HashMap;
    let mut twins: Vec<u32> = (0..mesh.num_halfedges() as u32).map(|h| mesh.twin(h)).collect();
    twins.resize(faces.len() * 3, INVALID);
    let mut open: HashMap<(u32, u32), u32> = HashMap::new();
    for h in 0..twins.len() as u32 {
        if twins[h as usize] == INVALID {
            let t = faces[(h / 3) as usize];
            open.insert((t[(h % 3) as usize], t[((h + 1) % 3) as usize]), h);
        }
    }
    for (&(a, b), &h) in &open {
        if let Some(&t) = open.get(&(b, a)) {
            twins[h as usize] = t;
        }
    }
    twins
}
