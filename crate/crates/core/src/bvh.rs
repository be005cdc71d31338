//! Axis-aligned bounding-box tree over triangles.
//!
//! Used for the all-pairs overlap search of the broad phase and for
//! segment queries during winding-number evaluation.

use nalgebra::Point3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb { lo: [f64::INFINITY; 3], hi: [f64::NEG_INFINITY; 3] };

    pub fn of_points(pts: &[Point3<f64>]) -> Aabb {
        let mut b = Aabb::EMPTY;
        for p in pts {
            b.add_point(p);
        }
        b
    }

    pub fn add_point(&mut self, p: &Point3<f64>) {
        for k in 0..3 {
            self.lo[k] = self.lo[k].min(p[k]);
            self.hi[k] = self.hi[k].max(p[k]);
        }
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        let mut b = *self;
        for k in 0..3 {
            b.lo[k] = b.lo[k].min(o.lo[k]);
            b.hi[k] = b.hi[k].max(o.hi[k]);
        }
        b
    }

    /// Closed-box overlap; exact since bounds are input coordinates.
    #[inline]
    pub fn overlaps(&self, o: &Aabb) -> bool {
        (0..3).all(|k| self.lo[k] <= o.hi[k] && o.lo[k] <= self.hi[k])
    }

    fn center(&self, k: usize) -> f64 {
        0.5 * (self.lo[k] + self.hi[k])
    }

    fn longest_axis(&self) -> usize {
        let d = [self.hi[0] - self.lo[0], self.hi[1] - self.lo[1], self.hi[2] - self.lo[2]];
        if d[0] >= d[1] && d[0] >= d[2] {
            0
        } else if d[1] >= d[2] {
            1
        } else {
            2
        }
    }

    /// Conservative segment test: boxes are padded slightly so rounding in
    /// the slab computation can only admit extra candidates.
    fn hits_segment(&self, p: &Point3<f64>, q: &Point3<f64>) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for k in 0..3 {
            let pad = 1e-9 * (self.hi[k] - self.lo[k]).abs().max(p[k].abs()).max(q[k].abs()).max(1.0);
            let (lo, hi) = (self.lo[k] - pad, self.hi[k] + pad);
            let d = q[k] - p[k];
            if d == 0.0 {
                if p[k] < lo || p[k] > hi {
                    return false;
                }
                continue;
            }
            let (mut a, mut b) = ((lo - p[k]) / d, (hi - p[k]) / d);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 * (1.0 + 1e-12) + 1e-12 {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
struct Node {
    bbox: Aabb,
    /// Leaf: `[start, start + count)` in `order`; inner: children at `start`, `start + 1`.
    start: u32,
    count: u32,
}

const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
    boxes: Vec<Aabb>,
}

impl Bvh {
    pub fn build(boxes: Vec<Aabb>) -> Bvh {
        let mut order: Vec<u32> = (0..boxes.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * boxes.len() / LEAF_SIZE + 1);
        if !boxes.is_empty() {
            nodes.push(Node { bbox: Aabb::EMPTY, start: 0, count: 0 });
            Self::split(&boxes, &mut order, &mut nodes, 0, 0, boxes.len());
        }
        Bvh { nodes, order, boxes }
    }

    pub fn for_triangles(tris: impl Iterator<Item = [Point3<f64>; 3]>) -> Bvh {
        Bvh::build(tris.map(|t| Aabb::of_points(&t)).collect())
    }

    fn split(boxes: &[Aabb], order: &mut [u32], nodes: &mut Vec<Node>, node: usize, start: usize, end: usize) {
        let bbox = order[start..end].iter().fold(Aabb::EMPTY, |b, &i| b.union(&boxes[i as usize]));
        if end - start <= LEAF_SIZE {
            nodes[node] = Node { bbox, start: start as u32, count: (end - start) as u32 };
            return;
        }
        let mut centers = Aabb::EMPTY;
        for &i in &order[start..end] {
            let b = &boxes[i as usize];
            centers.add_point(&Point3::new(b.center(0), b.center(1), b.center(2)));
        }
        let axis = centers.longest_axis();
        let mid = (start + end) / 2;
        order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            boxes[a as usize].center(axis).total_cmp(&boxes[b as usize].center(axis)).then(a.cmp(&b))
        });
        let left = nodes.len();
        nodes.push(Node { bbox: Aabb::EMPTY, start: 0, count: 0 });
        nodes.push(Node { bbox: Aabb::EMPTY, start: 0, count: 0 });
        nodes[node] = Node { bbox, start: left as u32, count: 0 };
        Self::split(boxes, order, nodes, left, start, mid);
        Self::split(boxes, order, nodes, left + 1, mid, end);
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    fn leaf_items(&self, n: &Node) -> &[u32] {
        &self.order[n.start as usize..(n.start + n.count) as usize]
    }

    /// All index pairs `(i, j)`, `i < j`, whose boxes overlap, sorted.
    pub fn self_overlaps(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            let mut stack = vec![(0usize, 0usize)];
            while let Some((a, b)) = stack.pop() {
                let (na, nb) = (&self.nodes[a], &self.nodes[b]);
                if a == b {
                    if na.count > 0 {
                        let items = self.leaf_items(na);
                        for (x, &i) in items.iter().enumerate() {
                            for &j in &items[x + 1..] {
                                if self.boxes[i as usize].overlaps(&self.boxes[j as usize]) {
                                    out.push((i.min(j), i.max(j)));
                                }
                            }
                        }
                    } else {
                        let l = na.start as usize;
                        stack.extend([(l, l), (l + 1, l + 1), (l, l + 1)]);
                    }
                    continue;
                }
                if !na.bbox.overlaps(&nb.bbox) {
                    continue;
                }
                match (na.count > 0, nb.count > 0) {
                    (true, true) => {
                        for &i in self.leaf_items(na) {
                            for &j in self.leaf_items(nb) {
                                if self.boxes[i as usize].overlaps(&self.boxes[j as usize]) {
                                    out.push((i.min(j), i.max(j)));
                                }
                            }
                        }
                    }
                    (false, true) => {
                        let l = na.start as usize;
                        stack.extend([(l, b), (l + 1, b)]);
                    }
                    (true, false) => {
                        let l = nb.start as usize;
                        stack.extend([(a, l), (a, l + 1)]);
                    }
                    (false, false) => {
                        let (l, m) = (na.start as usize, nb.start as usize);
                        stack.extend([(l, m), (l, m + 1), (l + 1, m), (l + 1, m + 1)]);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Items whose boxes may meet the segment `p q`, in ascending order.
    pub fn segment_candidates(&self, p: &Point3<f64>, q: &Point3<f64>) -> Vec<u32> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.bbox.hits_segment(p, q) {
                continue;
            }
            if node.count > 0 {
                out.extend(self.leaf_items(node).iter().filter(|&&i| self.boxes[i as usize].hits_segment(p, q)));
            } else {
                stack.extend([node.start as usize, node.start as usize + 1]);
            }
        }
        out.sort_unstable();
        out
    }

    /// Items whose boxes overlap `b`.
    pub fn box_candidates(&self, b: &Aabb) -> Vec<u32> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.bbox.overlaps(b) {
                continue;
            }
            if node.count > 0 {
                out.extend(self.leaf_items(node).iter().filter(|&&i| self.boxes[i as usize].overlaps(b)));
            } else {
                stack.extend([node.start as usize, node.start as usize + 1]);
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_boxes(n: usize, seed: u64) -> Vec<Aabb> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let c = Point3::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
                let s: f64 = rng.gen_range(0.01..0.8);
                Aabb::of_points(&[c, c + nalgebra::Vector3::new(s, s * 0.5, s * 2.0)])
            })
            .collect()
    }

    #[test]
    fn self_overlaps_match_all_pairs() {
        let boxes = random_boxes(700, 3);
        let mut brute = Vec::new();
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].overlaps(&boxes[j]) {
                    brute.push((i as u32, j as u32));
                }
            }
        }
        assert_eq!(Bvh::build(boxes).self_overlaps(), brute);
    }

    #[test]
    fn touching_boxes_overlap() {
        let a = Aabb { lo: [0.0; 3], hi: [1.0; 3] };
        let b = Aabb { lo: [1.0, 0.0, 0.0], hi: [2.0, 1.0, 1.0] };
        assert_eq!(Bvh::build(vec![a, b]).self_overlaps(), vec![(0, 1)]);
    }

    #[test]
    fn segment_query_superset() {
        let boxes = random_boxes(500, 9);
        let bvh = Bvh::build(boxes.clone());
        let p = Point3::new(-1.0, 5.0, 5.0);
        let q = Point3::new(11.0, 4.0, 6.0);
        let got = bvh.segment_candidates(&p, &q);
        // sample the segment densely: any box containing a sample must be found
        for k in 0..=20_000 {
            let t = k as f64 / 20_000.0;
            let x = p + (q - p) * t;
            for (i, b) in boxes.iter().enumerate() {
                if (0..3).all(|a| b.lo[a] <= x[a] && x[a] <= b.hi[a]) {
                    assert!(got.contains(&(i as u32)));
                }
            }
        }
    }
}
