//! Orientation-preserving projection of a face's supporting plane to 2-D.

use nalgebra::{Point2, Point3};

use super::predicates::{orient2d, Sign};
use crate::error::{Error, Result};

/// Drops the coordinate along which the face normal is largest and swaps
/// the remaining two when needed so the face stays counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneProjection {
    axis: usize,
    swap: bool,
}

impl PlaneProjection {
    pub fn for_triangle(t: &[Point3<f64>; 3]) -> Result<Self> {
        let n = (t[1] - t[0]).cross(&(t[2] - t[0])).map(f64::abs);
        let mut axes = [0usize, 1, 2];
        axes.sort_by(|&i, &j| n[j].partial_cmp(&n[i]).unwrap_or(std::cmp::Ordering::Equal));
        // the float normal only ranks the axes; the orientation is exact
        for axis in axes {
            let p = Self { axis, swap: false };
            match orient2d(&p.project(&t[0]), &p.project(&t[1]), &p.project(&t[2])) {
                Sign::Positive => return Ok(p),
                Sign::Negative => return Ok(Self { axis, swap: true }),
                Sign::Zero => {}
            }
        }
        Err(Error::Degenerate("zero-area face has no supporting plane".into()))
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    #[inline]
    pub fn project(&self, p: &Point3<f64>) -> Point2<f64> {
        let (u, v) = match self.axis {
            0 => (p.y, p.z),
            1 => (p.z, p.x),
            _ => (p.x, p.y),
        };
        if self.swap {
            Point2::new(v, u)
        } else {
            Point2::new(u, v)
        }
    }
}

/// Restores the 3-D position of each projected point.
#[derive(Clone, Debug, Default)]
pub struct BackMap {
    points: Vec<Point3<f64>>,
}

impl BackMap {
    pub fn get(&self, i: usize) -> Point3<f64> {
        self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn project_to_plane(
    face: &[Point3<f64>; 3],
    points: &[Point3<f64>],
) -> Result<(Vec<Point2<f64>>, BackMap, PlaneProjection)> {
    let proj = PlaneProjection::for_triangle(face)?;
    let uv = points.iter().map(|p| proj.project(p)).collect();
    Ok((uv, BackMap { points: points.to_vec() }, proj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ccw(t: &[Point3<f64>; 3]) -> Sign {
        let p = PlaneProjection::for_triangle(t).unwrap();
        orient2d(&p.project(&t[0]), &p.project(&t[1]), &p.project(&t[2]))
    }

    #[test]
    fn z_plane_drops_z() {
        let t = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        let (uv, back, _) = project_to_plane(&t, &[Point3::new(0.25, 0.5, 0.0)]).unwrap();
        assert_eq!(uv[0], Point2::new(0.25, 0.5));
        assert_eq!(back.get(0), Point3::new(0.25, 0.5, 0.0));
        assert_eq!(ccw(&t), Sign::Positive);
    }

    #[test]
    fn every_orientation_projects_ccw() {
        let base = [Point3::new(0.1, 0.2, 0.3), Point3::new(1.0, 0.4, -0.2), Point3::new(0.3, 1.1, 0.5)];
        for perm in [[0, 1, 2], [0, 2, 1]] {
            for axis in 0..3 {
                let rot = |p: &Point3<f64>| match axis {
                    0 => *p,
                    1 => Point3::new(p.z, p.x, p.y),
                    _ => Point3::new(p.y, p.z, p.x),
                };
                let t = [rot(&base[perm[0]]), rot(&base[perm[1]]), rot(&base[perm[2]])];
                assert_eq!(ccw(&t), Sign::Positive);
            }
        }
    }

    #[test]
    fn degenerate_face_rejected() {
        let t = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 1.0, 1.0), Point3::new(2.0, 2.0, 2.0)];
        assert!(PlaneProjection::for_triangle(&t).is_err());
    }
}
