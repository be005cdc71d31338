//! Manifold validation on the raw face list.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::SurfaceMesh;
use crate::kernel::predicates::collinear3d;
use crate::kernel::{tri_tri_intersect, Adjacency};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    NonManifoldEdge,
    NonManifoldVertex,
    OpenBoundary,
    InconsistentOrientation,
    DegenerateFace,
    SelfIntersection,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::NonManifoldEdge => "non-manifold-edge",
            ViolationKind::NonManifoldVertex => "non-manifold-vertex",
            ViolationKind::OpenBoundary => "open-boundary",
            ViolationKind::InconsistentOrientation => "inconsistent-orientation",
            ViolationKind::DegenerateFace => "degenerate-face",
            ViolationKind::SelfIntersection => "self-intersection",
        }
    }
}

/// Edges and orientation problems carry two vertex ids, vertices one,
/// degenerate faces one face id, self-intersections two face ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub elements: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub is_manifold: bool,
    pub self_intersections_checked: bool,
    pub violations: Vec<Violation>,
    pub counts: BTreeMap<String, i64>,
}

impl ValidationReport {
    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ValidationOptions {
    pub check_self_intersections: bool,
    /// Boundary edges are legal (open-surface mode).
    pub allow_boundary: bool,
}

pub fn validate(mesh: &SurfaceMesh, check_self_intersections: bool) -> ValidationReport {
    validate_with(mesh, &ValidationOptions { check_self_intersections, allow_boundary: false })
}

pub fn validate_with(mesh: &SurfaceMesh, opts: &ValidationOptions) -> ValidationReport {
    let faces = mesh.faces();
    let pos = mesh.positions();
    let mut violations = Vec::new();

    // undirected edge -> directed uses (face, forward?)
    let mut edges: BTreeMap<(u32, u32), Vec<bool>> = BTreeMap::new();
    let mut degenerate = vec![false; faces.len()];
    for (f, &[a, b, c]) in faces.iter().enumerate() {
        if a == b || b == c || c == a || collinear3d(&pos[a as usize], &pos[b as usize], &pos[c as usize]) {
            degenerate[f] = true;
            violations.push(Violation { kind: ViolationKind::DegenerateFace, elements: vec![f as u32] });
        }
        for (u, v) in [(a, b), (b, c), (c, a)] {
            edges.entry((u.min(v), u.max(v))).or_default().push(u < v);
        }
    }
    let mut boundary_edges = 0i64;
    for (&(u, v), uses) in &edges {
        match uses.len() {
            1 => {
                boundary_edges += 1;
                if !opts.allow_boundary {
                    violations.push(Violation { kind: ViolationKind::OpenBoundary, elements: vec![u, v] });
                }
            }
            2 => {
                if uses[0] == uses[1] {
                    violations.push(Violation { kind: ViolationKind::InconsistentOrientation, elements: vec![u, v] });
                }
            }
            _ => violations.push(Violation { kind: ViolationKind::NonManifoldEdge, elements: vec![u, v] }),
        }
    }

    for v in non_manifold_vertices(mesh) {
        violations.push(Violation { kind: ViolationKind::NonManifoldVertex, elements: vec![v] });
    }

    if opts.check_self_intersections {
        for (f, g) in self_intersecting_pairs(mesh, &degenerate) {
            violations.push(Violation { kind: ViolationKind::SelfIntersection, elements: vec![f, g] });
        }
    }

    let mut counts = BTreeMap::new();
    counts.insert("vertices".to_string(), mesh.num_vertices() as i64);
    counts.insert("faces".to_string(), faces.len() as i64);
    counts.insert("edges".to_string(), edges.len() as i64);
    counts.insert("boundary_edges".to_string(), boundary_edges);
    counts.insert("components".to_string(), mesh.num_components() as i64);
    counts.insert("euler_characteristic".to_string(), mesh.euler_characteristic());
    for kind in [
        ViolationKind::NonManifoldEdge,
        ViolationKind::NonManifoldVertex,
        ViolationKind::OpenBoundary,
        ViolationKind::InconsistentOrientation,
        ViolationKind::DegenerateFace,
        ViolationKind::SelfIntersection,
    ] {
        let n = violations.iter().filter(|x| x.kind == kind).count();
        counts.insert(kind.name().to_string(), n as i64);
    }
    ValidationReport {
        is_manifold: violations.is_empty(),
        self_intersections_checked: opts.check_self_intersections,
        violations,
        counts,
    }
}

/// Vertices whose incident faces split into more than one edge-connected fan.
fn non_manifold_vertices(mesh: &SurfaceMesh) -> Vec<u32> {
    let faces = mesh.faces();
    let mut incident: Vec<Vec<u32>> = vec![Vec::new(); mesh.num_vertices()];
    for (f, tri) in faces.iter().enumerate() {
        for &v in tri {
            if !incident[v as usize].contains(&(f as u32)) {
                incident[v as usize].push(f as u32);
            }
        }
    }
    let mut out = Vec::new();
    for (v, fs) in incident.iter().enumerate() {
        if fs.len() < 2 {
            continue;
        }
        // union faces that share an edge through v, i.e. another common vertex
        let others: Vec<Vec<u32>> =
            fs.iter().map(|&f| faces[f as usize].iter().copied().filter(|&w| w != v as u32).collect()).collect();
        let mut parent: Vec<usize> = (0..fs.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                if others[i].iter().any(|w| others[j].contains(w)) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let roots = (0..fs.len()).filter(|&i| find(&mut parent, i) == i).count();
        if roots > 1 {
            out.push(v as u32);
        }
    }
    out
}

/// All face pairs whose closed triangles meet beyond shared corners.
///
/// Corners are compared by coordinates, so copies of a vertex made by
/// singular-vertex repair still count as shared. Plain sweep over x.
pub fn self_intersecting_pairs(mesh: &SurfaceMesh, skip: &[bool]) -> Vec<(u32, u32)> {
    let pos = mesh.positions();
    let mut weld: HashMap<[u64; 3], u32> = HashMap::new();
    let ids: Vec<u32> = pos
        .iter()
        .map(|p| {
            let n = weld.len() as u32;
            *weld.entry([p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]).or_insert(n)
        })
        .collect();
    let faces: Vec<[u32; 3]> = mesh.faces().iter().map(|t| t.map(|v| ids[v as usize])).collect();
    let boxes: Vec<([f64; 3], [f64; 3])> = (0..faces.len() as u32)
        .map(|f| {
            let t = mesh.triangle(f);
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for p in &t {
                for k in 0..3 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            (lo, hi)
        })
        .collect();
    let mut order: Vec<u32> = (0..faces.len() as u32).filter(|&f| !skip[f as usize]).collect();
    order.sort_by(|&a, &b| boxes[a as usize].0[0].total_cmp(&boxes[b as usize].0[0]));
    let mut pairs: Vec<(u32, u32)> = (0..order.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let f = order[i];
            let (lo, hi) = boxes[f as usize];
            let mut found = Vec::new();
            for &g in &order[i + 1..] {
                let (glo, ghi) = boxes[g as usize];
                if glo[0] > hi[0] {
                    break;
                }
                if glo[1] > hi[1] || ghi[1] < lo[1] || glo[2] > hi[2] || ghi[2] < lo[2] {
                    continue;
                }
                let (ff, gf) = (faces[f as usize], faces[g as usize]);
                let adj = Adjacency::from_indices(&ff, &gf);
                if !tri_tri_intersect(&mesh.triangle(f), &mesh.triangle(g), adj).is_disjoint() {
                    found.push((f.min(g), f.max(g)));
                }
            }
            found
        })
        .collect();
    pairs.sort_unstable();
    pairs
}
