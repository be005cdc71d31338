//! Exact triangle-triangle intersection with mesh-adjacency awareness.
//!
//! Only two outcomes count as typical: no contact, or a segment whose two
//! endpoints are transversal edge/plane crossings. Every other contact
//! (single point, coplanar overlap, an edge lying in the other plane, a
//! vertex on the other face) is reported as a boundary case so that the
//! caller can perturb and retry.

use std::cmp::Ordering;

use nalgebra::{Point2, Point3};
use serde::Serialize;

use super::exact::{ExactPlane, ExactPoint, Rational};
use super::predicates::{orient2d, orient3d, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryDetail {
    PointContact,
    CoplanarOverlap,
    EdgeCollinear,
    VertexOnFace,
}

/// Which mesh simplices two faces share, as corner indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adjacency {
    None,
    /// `t1[i] == t2[j]`.
    SharedVertex {
        i: usize,
        j: usize,
    },
    /// The edges starting at corner `i` of `t1` and corner `j` of `t2`
    /// join the same two vertices.
    SharedEdge {
        i: usize,
        j: usize,
    },
    /// Same three vertices.
    SharedFace,
}

impl Adjacency {
    pub fn from_indices(f1: &[u32; 3], f2: &[u32; 3]) -> Adjacency {
        let shared: Vec<(usize, usize)> =
            (0..3).flat_map(|i| (0..3).filter(move |&j| f1[i] == f2[j]).map(move |j| (i, j))).collect();
        match shared.len() {
            0 => Adjacency::None,
            1 => Adjacency::SharedVertex { i: shared[0].0, j: shared[0].1 },
            2 => {
                let (i0, j0) = shared[0];
                let (i1, j1) = shared[1];
                // edge of t1 starting at whichever shared corner precedes the other
                let i = if (i0 + 1) % 3 == i1 { i0 } else { i1 };
                let j = if (j0 + 1) % 3 == j1 { j0 } else { j1 };
                Adjacency::SharedEdge { i, j }
            }
            _ => Adjacency::SharedFace,
        }
    }

    pub fn swapped(self) -> Adjacency {
        match self {
            Adjacency::SharedVertex { i, j } => Adjacency::SharedVertex { i: j, j: i },
            Adjacency::SharedEdge { i, j } => Adjacency::SharedEdge { i: j, j: i },
            a => a,
        }
    }
}

/// Origin of an intersection-segment endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SegmentEnd {
    /// Edge `k -> k+1` of the first triangle crossing the second's plane.
    EdgeOfFirst(usize),
    /// Edge `k -> k+1` of the second triangle crossing the first's plane.
    EdgeOfSecond(usize),
    /// The vertex shared by both triangles.
    SharedVertex,
}

impl SegmentEnd {
    fn swapped(self) -> SegmentEnd {
        match self {
            SegmentEnd::EdgeOfFirst(k) => SegmentEnd::EdgeOfSecond(k),
            SegmentEnd::EdgeOfSecond(k) => SegmentEnd::EdgeOfFirst(k),
            s => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub ends: [SegmentEnd; 2],
    pub exact: [ExactPoint; 2],
    pub points: [Point3<f64>; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub enum TriTriResult {
    Disjoint,
    ProperSegment(Segment),
    Boundary(BoundaryDetail),
}

impl TriTriResult {
    pub fn kind(&self) -> &'static str {
        match self {
            TriTriResult::Disjoint => "disjoint",
            TriTriResult::ProperSegment(_) => "proper_segment",
            TriTriResult::Boundary(_) => "boundary_case",
        }
    }

    pub fn is_disjoint(&self) -> bool {
        matches!(self, TriTriResult::Disjoint)
    }

    pub fn swapped(self) -> TriTriResult {
        match self {
            TriTriResult::ProperSegment(s) => TriTriResult::ProperSegment(Segment {
                ends: s.ends.map(SegmentEnd::swapped),
                exact: s.exact,
                points: s.points,
            }),
            r => r,
        }
    }
}

/// Candidate point of one triangle on the common line.
#[derive(Clone, Debug)]
struct LinePoint {
    end: Tag,
    exact: ExactPoint,
    key: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tag {
    Edge(SegmentEnd),
    Vertex,
}

fn dominant_axis(t: &[Point3<f64>; 3]) -> usize {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
    let a = n.map(f64::abs);
    if a.x >= a.y && a.x >= a.z {
        0
    } else if a.y >= a.z {
        1
    } else {
        2
    }
}

fn drop_axis(p: &Point3<f64>, axis: usize) -> Point2<f64> {
    match axis {
        0 => Point2::new(p.y, p.z),
        1 => Point2::new(p.z, p.x),
        _ => Point2::new(p.x, p.y),
    }
}

/// Closed 2-D triangles intersect (orientation agnostic).
fn coplanar_overlap(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3]) -> bool {
    let axis = dominant_axis(t1);
    let a: Vec<Point2<f64>> = t1.iter().map(|p| drop_axis(p, axis)).collect();
    let b: Vec<Point2<f64>> = t2.iter().map(|p| drop_axis(p, axis)).collect();
    let separated = |p: &[Point2<f64>], o: &[Point2<f64>]| {
        (0..3).any(|k| {
            let (s, e, r) = (&p[k], &p[(k + 1) % 3], &p[(k + 2) % 3]);
            let inside = orient2d(s, e, r);
            o.iter().all(|x| orient2d(s, e, x) == inside.flip())
        })
    };
    !(separated(&a, &b) || separated(&b, &a))
}

/// Interiors of the two corner wedges at a shared vertex overlap (coplanar).
fn coplanar_wedges_overlap(apex: &Point3<f64>, w1: [&Point3<f64>; 2], w2: [&Point3<f64>; 2], axis: usize) -> bool {
    let a = drop_axis(apex, axis);
    let orient_of = |w: [&Point3<f64>; 2]| orient2d(&a, &drop_axis(w[0], axis), &drop_axis(w[1], axis));
    let (o1, o2) = (orient_of(w1), orient_of(w2));
    let inside = |x: &Point3<f64>, w: [&Point3<f64>; 2], o: Sign| {
        let x = drop_axis(x, axis);
        orient2d(&a, &drop_axis(w[0], axis), &x) == o && orient2d(&a, &x, &drop_axis(w[1], axis)) == o
    };
    if inside(w2[0], w1, o1) || inside(w2[1], w1, o1) || inside(w1[0], w2, o2) || inside(w1[1], w2, o2) {
        return true;
    }
    let same_dir = |p: &Point3<f64>, q: &Point3<f64>| {
        let (p2, q2) = (drop_axis(p, axis), drop_axis(q, axis));
        orient2d(&a, &p2, &q2) == Sign::Zero && (p2 - a).dot(&(q2 - a)) > 0.0
    };
    // identical wedges, either orientation
    (same_dir(w1[0], w2[0]) && same_dir(w1[1], w2[1])) || (same_dir(w1[0], w2[1]) && same_dir(w1[1], w2[0]))
}

fn line_points(
    t: &[Point3<f64>; 3],
    signs: [Sign; 3],
    other: &ExactPlane,
    edge_tag: fn(usize) -> SegmentEnd,
    skip_vertex: Option<usize>,
) -> Vec<(Tag, ExactPoint)> {
    let mut out = Vec::new();
    for k in 0..3 {
        if signs[k] == Sign::Zero && Some(k) != skip_vertex {
            out.push((Tag::Vertex, ExactPoint::from_f64(&t[k])));
        }
        let l = (k + 1) % 3;
        if signs[k] != Sign::Zero && signs[l] == signs[k].flip() {
            out.push((Tag::Edge(edge_tag(k)), super::exact::segment_plane_point(&t[k], &t[l], other)));
        }
    }
    out
}

fn to_line(points: Vec<(Tag, ExactPoint)>, dir: &ExactPoint) -> Vec<LinePoint> {
    let mut v: Vec<LinePoint> = points
        .into_iter()
        .map(|(end, exact)| {
            let key = exact.dot(dir);
            LinePoint { end, exact, key }
        })
        .collect();
    v.sort_by(|a, b| a.key.cmp(&b.key));
    v
}

fn segment_from(lo: LinePoint, hi: LinePoint) -> TriTriResult {
    let as_end = |t: Tag| match t {
        Tag::Edge(e) => Some(e),
        Tag::Vertex => None,
    };
    match (as_end(lo.end), as_end(hi.end)) {
        (Some(a), Some(b)) => {
            let points = [lo.exact.to_f64(), hi.exact.to_f64()];
            TriTriResult::ProperSegment(Segment { ends: [a, b], exact: [lo.exact, hi.exact], points })
        }
        _ => TriTriResult::Boundary(BoundaryDetail::VertexOnFace),
    }
}

/// Intersects the closed line intervals of both triangles.
fn overlap(p1: Vec<LinePoint>, p2: Vec<LinePoint>, zeros1: usize, zeros2: usize) -> TriTriResult {
    if p1.is_empty() || p2.is_empty() {
        return TriTriResult::Disjoint;
    }
    let (lo1, hi1) = (&p1[0], &p1[p1.len() - 1]);
    let (lo2, hi2) = (&p2[0], &p2[p2.len() - 1]);
    let lo = match lo1.key.cmp(&lo2.key) {
        Ordering::Less => lo2,
        Ordering::Greater => lo1,
        Ordering::Equal => return contact(lo1, hi1, lo2, hi2),
    };
    let hi = match hi1.key.cmp(&hi2.key) {
        Ordering::Less => hi1,
        Ordering::Greater => hi2,
        Ordering::Equal => return contact(lo1, hi1, lo2, hi2),
    };
    match lo.key.cmp(&hi.key) {
        Ordering::Greater => TriTriResult::Disjoint,
        Ordering::Equal => TriTriResult::Boundary(BoundaryDetail::PointContact),
        Ordering::Less => {
            if zeros1 >= 2 || zeros2 >= 2 {
                return TriTriResult::Boundary(BoundaryDetail::EdgeCollinear);
            }
            segment_from(lo.clone(), hi.clone())
        }
    }
}

fn contact(lo1: &LinePoint, hi1: &LinePoint, lo2: &LinePoint, hi2: &LinePoint) -> TriTriResult {
    // two endpoints coincide: edge meets edge or vertex; decide if any overlap
    let lo = if lo1.key > lo2.key { &lo1.key } else { &lo2.key };
    let hi = if hi1.key < hi2.key { &hi1.key } else { &hi2.key };
    match lo.cmp(hi) {
        Ordering::Greater => TriTriResult::Disjoint,
        Ordering::Equal => TriTriResult::Boundary(BoundaryDetail::PointContact),
        Ordering::Less => TriTriResult::Boundary(BoundaryDetail::EdgeCollinear),
    }
}

/// Classifies the contact between two non-degenerate triangles.
pub fn tri_tri_intersect(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3], adjacency: Adjacency) -> TriTriResult {
    let s1: [Sign; 3] = [0, 1, 2].map(|k| orient3d(&t2[0], &t2[1], &t2[2], &t1[k]));
    let s2: [Sign; 3] = [0, 1, 2].map(|k| orient3d(&t1[0], &t1[1], &t1[2], &t2[k]));
    match adjacency {
        Adjacency::None => general(t1, t2, s1, s2),
        Adjacency::SharedFace => TriTriResult::Boundary(BoundaryDetail::CoplanarOverlap),
        Adjacency::SharedEdge { i, j } => {
            let c = (i + 2) % 3;
            let d = (j + 2) % 3;
            if s1[c] != Sign::Zero {
                return TriTriResult::Disjoint;
            }
            let axis = dominant_axis(t1);
            let (a, b) = (drop_axis(&t1[i], axis), drop_axis(&t1[(i + 1) % 3], axis));
            let sc = orient2d(&a, &b, &drop_axis(&t1[c], axis));
            let sd = orient2d(&a, &b, &drop_axis(&t2[d], axis));
            if sc == sd {
                TriTriResult::Boundary(BoundaryDetail::CoplanarOverlap)
            } else {
                TriTriResult::Disjoint
            }
        }
        Adjacency::SharedVertex { i, j } => shared_vertex(t1, t2, s1, s2, i, j),
    }
}

fn general(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3], s1: [Sign; 3], s2: [Sign; 3]) -> TriTriResult {
    let same = |s: &[Sign; 3]| s[0] != Sign::Zero && s[0] == s[1] && s[1] == s[2];
    if same(&s1) || same(&s2) {
        return TriTriResult::Disjoint;
    }
    if !s1.contains(&Sign::Zero) && !s2.contains(&Sign::Zero) && separated_on_line(t1, t2, s1, s2) {
        return TriTriResult::Disjoint;
    }
    general_exact(t1, t2, s1, s2)
}

fn general_exact(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3], s1: [Sign; 3], s2: [Sign; 3]) -> TriTriResult {
    if s1.iter().all(|&s| s == Sign::Zero) {
        return if coplanar_overlap(t1, t2) {
            TriTriResult::Boundary(BoundaryDetail::CoplanarOverlap)
        } else {
            TriTriResult::Disjoint
        };
    }
    let p1 = ExactPlane::of_triangle(t1);
    let p2 = ExactPlane::of_triangle(t2);
    let dir = p1.normal.cross(&p2.normal);
    let l1 = to_line(line_points(t1, s1, &p2, SegmentEnd::EdgeOfFirst, None), &dir);
    let l2 = to_line(line_points(t2, s2, &p1, SegmentEnd::EdgeOfSecond, None), &dir);
    let z1 = s1.iter().filter(|&&s| s == Sign::Zero).count();
    let z2 = s2.iter().filter(|&&s| s == Sign::Zero).count();
    overlap(l1, l2, z1, z2)
}

/// Interval test on the common line using orientation predicates only
/// (Guigue and Devillers). Both triangles must straddle the other's plane
/// with no vertex on it. True means the closed triangles are disjoint.
fn separated_on_line(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3], s1: [Sign; 3], s2: [Sign; 3]) -> bool {
    // rotate so the lone vertex comes first, and orient the other triangle
    // so the lone vertex sees it from the positive side
    let lone = |s: &[Sign; 3]| (0..3).find(|&k| s[k] != s[(k + 1) % 3] && s[k] != s[(k + 2) % 3]).expect("straddles");
    let (i, j) = (lone(&s1), lone(&s2));
    let (p1, mut q1, mut r1) = (t1[i], t1[(i + 1) % 3], t1[(i + 2) % 3]);
    let (p2, mut q2, mut r2) = (t2[j], t2[(j + 1) % 3], t2[(j + 2) % 3]);
    if s1[i] == Sign::Negative {
        std::mem::swap(&mut q2, &mut r2);
    }
    if s2[j] == Sign::Negative {
        std::mem::swap(&mut q1, &mut r1);
    }
    orient3d(&q1, &p2, &p1, &q2) == Sign::Positive || orient3d(&p1, &p2, &r1, &r2) == Sign::Positive
}

fn shared_vertex(
    t1: &[Point3<f64>; 3],
    t2: &[Point3<f64>; 3],
    s1: [Sign; 3],
    s2: [Sign; 3],
    i: usize,
    j: usize,
) -> TriTriResult {
    let (b, c) = ((i + 1) % 3, (i + 2) % 3);
    let (d, e) = ((j + 1) % 3, (j + 2) % 3);
    if [s1[b], s1[c], s2[d], s2[e]].iter().all(|&s| s == Sign::Zero) {
        let axis = dominant_axis(t1);
        return if coplanar_wedges_overlap(&t1[i], [&t1[b], &t1[c]], [&t2[d], &t2[e]], axis) {
            TriTriResult::Boundary(BoundaryDetail::CoplanarOverlap)
        } else {
            TriTriResult::Disjoint
        };
    }
    let same = |x: Sign, y: Sign| x != Sign::Zero && x == y;
    if same(s1[b], s1[c]) || same(s2[d], s2[e]) {
        return TriTriResult::Disjoint;
    }
    // Both far edges cross the other plane, so each triangle meets the
    // common line in a segment starting at the apex. They run the same way
    // exactly when the far edge of t1 passes through the corner wedge of t2,
    // which a segment/triangle orientation test reduces to these two signs.
    if ![s1[b], s1[c], s2[d], s2[e]].contains(&Sign::Zero) && s2[d] == s1[b] {
        return TriTriResult::Disjoint;
    }
    shared_vertex_exact(t1, t2, s1, s2, i, j)
}

fn shared_vertex_exact(
    t1: &[Point3<f64>; 3],
    t2: &[Point3<f64>; 3],
    s1: [Sign; 3],
    s2: [Sign; 3],
    i: usize,
    j: usize,
) -> TriTriResult {
    let (b, c) = ((i + 1) % 3, (i + 2) % 3);
    let (d, e) = ((j + 1) % 3, (j + 2) % 3);
    let same = |x: Sign, y: Sign| x != Sign::Zero && x == y;
    if same(s1[b], s1[c]) || same(s2[d], s2[e]) {
        return TriTriResult::Disjoint;
    }
    let p1 = ExactPlane::of_triangle(t1);
    let p2 = ExactPlane::of_triangle(t2);
    let dir = p1.normal.cross(&p2.normal);
    let apex = ExactPoint::from_f64(&t1[i]);
    let apex_key = apex.dot(&dir);
    // besides the apex, each triangle meets the line in one point: a
    // crossing of its far edge or a far vertex lying on the other plane
    let f1 = line_points(t1, s1, &p2, SegmentEnd::EdgeOfFirst, Some(i));
    let f2 = line_points(t2, s2, &p1, SegmentEnd::EdgeOfSecond, Some(j));
    let l1 = to_line(f1, &dir);
    let l2 = to_line(f2, &dir);
    if l1.is_empty() || l2.is_empty() {
        return TriTriResult::Disjoint;
    }
    if l1.len() > 1 || l2.len() > 1 {
        // an edge through the apex lies in the other plane
        return TriTriResult::Boundary(BoundaryDetail::EdgeCollinear);
    }
    let (x1, x2) = (&l1[0], &l2[0]);
    let side = |k: &Rational| k.cmp(&apex_key);
    if side(&x1.key) != side(&x2.key) {
        return TriTriResult::Disjoint;
    }
    let toward_hi = side(&x1.key) == Ordering::Greater;
    let nearer = match x1.key.cmp(&x2.key) {
        Ordering::Equal => return TriTriResult::Boundary(BoundaryDetail::EdgeCollinear),
        Ordering::Less => {
            if toward_hi {
                x1
            } else {
                x2
            }
        }
        Ordering::Greater => {
            if toward_hi {
                x2
            } else {
                x1
            }
        }
    };
    if x1.end == Tag::Vertex || x2.end == Tag::Vertex {
        // an edge through the apex lies in the other plane and overlaps it
        return TriTriResult::Boundary(BoundaryDetail::EdgeCollinear);
    }
    match nearer.end {
        Tag::Vertex => TriTriResult::Boundary(BoundaryDetail::VertexOnFace),
        Tag::Edge(end) => {
            let exact = [apex.clone(), nearer.exact.clone()];
            let points = [t1[i], nearer.exact.to_f64()];
            TriTriResult::ProperSegment(Segment { ends: [SegmentEnd::SharedVertex, end], exact, points })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    fn segment(r: &TriTriResult) -> [Point3<f64>; 2] {
        match r {
            TriTriResult::ProperSegment(s) => s.points,
            other => panic!("expected segment, got {other:?}"),
        }
    }

    #[test]
    fn apex_filter_agrees_with_construction() {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let q =
            |r: &mut rand_chacha::ChaCha8Rng| p(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let (mut checked, mut hits) = (0, 0);
        while checked < 4000 {
            let a = q(&mut r);
            let (i, j) = (r.gen_range(0..3), r.gen_range(0..3));
            let mut t1 = [q(&mut r), q(&mut r), q(&mut r)];
            let mut t2 = [q(&mut r), q(&mut r), q(&mut r)];
            t1[i] = a;
            t2[j] = a;
            let s1 = [0, 1, 2].map(|k| orient3d(&t2[0], &t2[1], &t2[2], &t1[k]));
            let s2 = [0, 1, 2].map(|k| orient3d(&t1[0], &t1[1], &t1[2], &t2[k]));
            let (b, c, d, e) = ((i + 1) % 3, (i + 2) % 3, (j + 1) % 3, (j + 2) % 3);
            if s1[b] == s1[c] || s2[d] == s2[e] || [s1[b], s1[c], s2[d], s2[e]].contains(&Sign::Zero) {
                continue;
            }
            checked += 1;
            let exact = shared_vertex_exact(&t1, &t2, s1, s2, i, j);
            hits += !exact.is_disjoint() as usize;
            let fast = shared_vertex(&t1, &t2, s1, s2, i, j);
            assert_eq!(fast.is_disjoint(), exact.is_disjoint(), "{t1:?} {t2:?}");
        }
        assert!(hits > 200);
    }

    #[test]
    fn line_filter_agrees_with_construction() {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let tri = |r: &mut rand_chacha::ChaCha8Rng| {
            [0; 3].map(|_| p(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        };
        let (mut checked, mut hits) = (0, 0);
        while checked < 4000 {
            let (t1, t2) = (tri(&mut r), tri(&mut r));
            let s1 = [0, 1, 2].map(|k| orient3d(&t2[0], &t2[1], &t2[2], &t1[k]));
            let s2 = [0, 1, 2].map(|k| orient3d(&t1[0], &t1[1], &t1[2], &t2[k]));
            let same = |s: &[Sign; 3]| s[0] == s[1] && s[1] == s[2];
            if same(&s1) || same(&s2) || s1.contains(&Sign::Zero) || s2.contains(&Sign::Zero) {
                continue;
            }
            checked += 1;
            let exact = general_exact(&t1, &t2, s1, s2);
            hits += !exact.is_disjoint() as usize;
            assert_eq!(separated_on_line(&t1, &t2, s1, s2), exact.is_disjoint(), "{t1:?} {t2:?}");
        }
        assert!(hits > 200);
    }

    #[test]
    fn transversal_segment() {
        // hand solution: t2's edges cross z = 0 at (0.5,0.5,0) and (1,0.5,0),
        // both inside t1; t1 spans x in [0,1.5] along y = 0.5
        let t1 = [p(0.0, 0.0, 0.0), p(2.0, 0.0, 0.0), p(0.0, 2.0, 0.0)];
        let t2 = [p(0.5, 0.5, -1.0), p(1.5, 0.5, -1.0), p(0.5, 0.5, 1.0)];
        let r = tri_tri_intersect(&t1, &t2, Adjacency::None);
        let mut s = segment(&r);
        s.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        assert_eq!(s, [p(0.5, 0.5, 0.0), p(1.0, 0.5, 0.0)]);
        if let TriTriResult::ProperSegment(seg) = &r {
            assert!(seg.ends.iter().all(|e| matches!(e, SegmentEnd::EdgeOfSecond(_))));
        }
        let back = tri_tri_intersect(&t2, &t1, Adjacency::None);
        let mut s2 = segment(&back);
        s2.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        assert_eq!(s, s2);
    }

    #[test]
    fn far_apart_disjoint() {
        let t1 = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        let t2 = [p(10.0, 0.0, 0.0), p(11.0, 0.0, 1.0), p(10.0, 1.0, 0.0)];
        assert!(tri_tri_intersect(&t1, &t2, Adjacency::None).is_disjoint());
    }

    #[test]
    fn vertex_touch_is_point_contact() {
        let t1 = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        let t2 = [p(0.0, 0.0, 0.0), p(-1.0, 0.0, 1.0), p(0.0, -1.0, 1.0)];
        assert_eq!(tri_tri_intersect(&t1, &t2, Adjacency::None), TriTriResult::Boundary(BoundaryDetail::PointContact));
        // the same contact is no intersection when the vertex is shared
        assert!(tri_tri_intersect(&t1, &t2, Adjacency::SharedVertex { i: 0, j: 0 }).is_disjoint());
    }

    #[test]
    fn coplanar_overlap_detected() {
        let t1 = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        let t2 = [p(0.2, 0.2, 0.0), p(1.2, 0.2, 0.0), p(0.2, 1.2, 0.0)];
        assert_eq!(
            tri_tri_intersect(&t1, &t2, Adjacency::None),
            TriTriResult::Boundary(BoundaryDetail::CoplanarOverlap)
        );
        let far = [p(5.0, 0.0, 0.0), p(6.0, 0.0, 0.0), p(5.0, 1.0, 0.0)];
        assert!(tri_tri_intersect(&t1, &far, Adjacency::None).is_disjoint());
    }

    #[test]
    fn shared_edge_cases() {
        let t1 = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0)];
        // flat neighbour across edge 0->1
        let flat = [p(1.0, 0.0, 0.0), p(0.0, 0.0, 0.0), p(0.5, -1.0, 0.0)];
        let adj = Adjacency::from_indices(&[0, 1, 2], &[1, 0, 3]);
        assert_eq!(adj, Adjacency::SharedEdge { i: 0, j: 0 });
        assert!(tri_tri_intersect(&t1, &flat, adj).is_disjoint());
        // folded completely onto t1
        let folded = [p(1.0, 0.0, 0.0), p(0.0, 0.0, 0.0), p(0.5, 0.5, 0.0)];
        assert_eq!(tri_tri_intersect(&t1, &folded, adj), TriTriResult::Boundary(BoundaryDetail::CoplanarOverlap));
        let bent = [p(1.0, 0.0, 0.0), p(0.0, 0.0, 0.0), p(0.5, 0.5, 0.3)];
        assert!(tri_tri_intersect(&t1, &bent, adj).is_disjoint());
    }

    #[test]
    fn shared_vertex_fold_gives_segment_from_apex() {
        let t1 = [p(0.0, 0.0, 0.0), p(2.0, -1.0, 0.0), p(2.0, 1.0, 0.0)];
        let t2 = [p(0.0, 0.0, 0.0), p(1.0, 0.0, -1.0), p(1.0, 0.0, 1.0)];
        let r = tri_tri_intersect(&t1, &t2, Adjacency::SharedVertex { i: 0, j: 0 });
        let s = segment(&r);
        assert_eq!(s[0], p(0.0, 0.0, 0.0));
        assert_eq!(s[1], p(1.0, 0.0, 0.0));
        let r2 = tri_tri_intersect(&t2, &t1, Adjacency::SharedVertex { i: 0, j: 0 });
        assert_eq!(segment(&r2)[1], p(1.0, 0.0, 0.0));
    }

    #[test]
    fn coplanar_shared_vertex_wedges() {
        let a = p(0.0, 0.0, 0.0);
        let t1 = [a, p(1.0, 0.0, 0.0), p(1.0, 1.0, 0.0)];
        let apart = [a, p(-1.0, 0.0, 0.0), p(-1.0, -1.0, 0.0)];
        assert!(tri_tri_intersect(&t1, &apart, Adjacency::SharedVertex { i: 0, j: 0 }).is_disjoint());
        let touching = [a, p(1.0, 1.0, 0.0), p(0.0, 1.0, 0.0)];
        assert!(tri_tri_intersect(&t1, &touching, Adjacency::SharedVertex { i: 0, j: 0 }).is_disjoint());
        let overlapping = [a, p(2.0, 1.0, 0.0), p(0.0, 1.0, 0.0)];
        assert_eq!(
            tri_tri_intersect(&t1, &overlapping, Adjacency::SharedVertex { i: 0, j: 0 }),
            TriTriResult::Boundary(BoundaryDetail::CoplanarOverlap)
        );
    }

    #[test]
    fn edge_through_face_interior_is_boundary() {
        let t1 = [p(0.0, 0.0, 0.0), p(2.0, 0.0, 0.0), p(0.0, 2.0, 0.0)];
        // t2 has its edge lying in t1's plane
        let t2 = [p(0.2, 0.2, 0.0), p(0.8, 0.3, 0.0), p(0.5, 0.5, 1.0)];
        assert_eq!(tri_tri_intersect(&t1, &t2, Adjacency::None), TriTriResult::Boundary(BoundaryDetail::EdgeCollinear));
        // t2 has a single vertex on t1's interior
        let t3 = [p(0.2, 0.2, 0.0), p(0.8, 0.3, 1.0), p(0.5, 0.5, 1.0)];
        assert_eq!(tri_tri_intersect(&t1, &t3, Adjacency::None), TriTriResult::Boundary(BoundaryDetail::PointContact));
        // t2 pierces t1 with a vertex exactly on t1's plane inside t1
        let t4 = [p(0.2, 0.2, 0.0), p(0.8, 0.3, 1.0), p(0.5, 0.5, -1.0)];
        assert_eq!(tri_tri_intersect(&t1, &t4, Adjacency::None), TriTriResult::Boundary(BoundaryDetail::VertexOnFace));
    }
}
