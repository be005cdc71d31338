//! Rational-coordinate constructions for intersection points.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Sub};

use nalgebra::Point3;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use super::predicates::Sign;

/// Exact fraction, deliberately left unreduced: gcd normalisation costs far
/// more than the growth it saves in these short constructions. The
/// denominator is always positive.
#[derive(Clone, Debug)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "finite coordinate");
        let (mut mant, mut exp, sign) = Float::integer_decode(x);
        if mant == 0 {
            return Self::from_integer(0);
        }
        let tz = mant.trailing_zeros();
        mant >>= tz;
        exp += tz as i16;
        let m = BigInt::from(mant) * sign;
        if exp >= 0 {
            Rational { num: m << exp as usize, den: BigInt::from(1) }
        } else {
            Rational { num: m, den: BigInt::from(1) << (-exp) as usize }
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Rational { num: BigInt::from(n), den: BigInt::from(1) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Correctly rounded conversion.
    pub fn to_f64(&self) -> f64 {
        BigRational::new(self.num.clone(), self.den.clone()).to_f64().unwrap_or(f64::NAN)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, o: &Rational) -> Rational {
        if self.den == o.den {
            return Rational { num: &self.num + &o.num, den: self.den.clone() };
        }
        Rational { num: &self.num * &o.den + &o.num * &self.den, den: &self.den * &o.den }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, o: &Rational) -> Rational {
        if self.den == o.den {
            return Rational { num: &self.num - &o.num, den: self.den.clone() };
        }
        Rational { num: &self.num * &o.den - &o.num * &self.den, den: &self.den * &o.den }
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, o: &Rational) -> Rational {
        Rational { num: &self.num * &o.num, den: &self.den * &o.den }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, o: &Rational) -> Rational {
        assert!(!o.is_zero(), "division by zero");
        let (num, den) = (&self.num * &o.den, &self.den * &o.num);
        if den.is_negative() {
            Rational { num: -num, den: -den }
        } else {
            Rational { num, den }
        }
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        &self + &o
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        &self - &o
    }
}

impl Sub<&Rational> for Rational {
    type Output = Rational;
    fn sub(self, o: &Rational) -> Rational {
        &self - o
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        if self.den == o.den {
            return self.num.cmp(&o.num);
        }
        (&self.num * &o.den).cmp(&(&o.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl PartialEq for Rational {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Rational {}

fn q(x: f64) -> Rational {
    Rational::from_f64(x)
}

fn sign(x: &Rational) -> Sign {
    if x.is_positive() {
        Sign::Positive
    } else if x.is_negative() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoint(pub [Rational; 3]);

impl ExactPoint {
    pub fn from_f64(p: &Point3<f64>) -> Self {
        ExactPoint([q(p.x), q(p.y), q(p.z)])
    }

    /// Nearest double-precision point (each coordinate rounded once).
    pub fn to_f64(&self) -> Point3<f64> {
        Point3::new(self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64())
    }

    pub fn dot(&self, o: &ExactPoint) -> Rational {
        &(&(&self.0[0] * &o.0[0]) + &(&self.0[1] * &o.0[1])) + &(&self.0[2] * &o.0[2])
    }

    pub fn cross(&self, o: &ExactPoint) -> ExactPoint {
        let [a0, a1, a2] = &self.0;
        let [b0, b1, b2] = &o.0;
        ExactPoint([&(a1 * b2) - &(a2 * b1), &(a2 * b0) - &(a0 * b2), &(a0 * b1) - &(a1 * b0)])
    }

    pub fn scale(&self, s: &Rational) -> ExactPoint {
        ExactPoint([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl<'a> Sub<&'a ExactPoint> for &'a ExactPoint {
    type Output = ExactPoint;
    fn sub(self, o: &ExactPoint) -> ExactPoint {
        ExactPoint([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1], &self.0[2] - &o.0[2]])
    }
}

impl<'a> Add<&'a ExactPoint> for &'a ExactPoint {
    type Output = ExactPoint;
    fn add(self, o: &ExactPoint) -> ExactPoint {
        ExactPoint([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }
}

/// Supporting plane `normal . x = offset` of a triangle, exact.
#[derive(Clone, Debug)]
pub struct ExactPlane {
    pub normal: ExactPoint,
    pub offset: Rational,
}

impl ExactPlane {
    pub fn of_triangle(t: &[Point3<f64>; 3]) -> Self {
        let [a, b, c] = t.map(|p| ExactPoint::from_f64(&p));
        let normal = (&b - &a).cross(&(&c - &a));
        let offset = normal.dot(&a);
        Self { normal, offset }
    }

    pub fn side(&self, p: &ExactPoint) -> Sign {
        sign(&(&self.normal.dot(p) - &self.offset))
    }
}

/// Intersection of segment `p q` with a plane it properly crosses.
pub fn segment_plane_point(p: &Point3<f64>, q: &Point3<f64>, plane: &ExactPlane) -> ExactPoint {
    let p = ExactPoint::from_f64(p);
    let q = ExactPoint::from_f64(q);
    let d = &q - &p;
    let denom = plane.normal.dot(&d);
    debug_assert!(!denom.is_zero());
    let t = &(&plane.offset - &plane.normal.dot(&p)) / &denom;
    &p + &d.scale(&t)
}

/// Common point of three planes, if their normals are independent.
pub fn three_plane_point(a: &ExactPlane, b: &ExactPlane, c: &ExactPlane) -> Option<ExactPoint> {
    let bc = b.normal.cross(&c.normal);
    let det = a.normal.dot(&bc);
    if det.is_zero() {
        return None;
    }
    let ca = c.normal.cross(&a.normal);
    let ab = a.normal.cross(&b.normal);
    let sum = &(&bc.scale(&a.offset) + &ca.scale(&b.offset)) + &ab.scale(&c.offset);
    Some(sum.scale(&(&Rational::from_integer(1) / &det)))
}

/// Position of `x` relative to triangle `t`, for `x` on the supporting plane:
/// `Positive` strictly inside, `Zero` on the boundary, `Negative` outside.
pub fn in_triangle(x: &ExactPoint, t: &[Point3<f64>; 3]) -> Sign {
    let v = t.map(|p| ExactPoint::from_f64(&p));
    let n = (&v[1] - &v[0]).cross(&(&v[2] - &v[0]));
    let mut on_edge = false;
    for k in 0..3 {
        let e = &v[(k + 1) % 3] - &v[k];
        let s = sign(&e.cross(&(x - &v[k])).dot(&n));
        match s {
            Sign::Negative => return Sign::Negative,
            Sign::Zero => on_edge = true,
            Sign::Positive => {}
        }
    }
    if on_edge {
        Sign::Zero
    } else {
        Sign::Positive
    }
}

pub fn compare(a: &Rational, b: &Rational) -> std::cmp::Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_plane_point_is_on_plane() {
        let t = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.1, 0.3), Point3::new(0.2, 1.0, 0.7)];
        let plane = ExactPlane::of_triangle(&t);
        let x = segment_plane_point(&Point3::new(0.3, 0.3, -1.0), &Point3::new(0.4, 0.2, 2.0), &plane);
        assert_eq!(plane.side(&x), Sign::Zero);
    }

    #[test]
    fn three_planes_meet_at_corner() {
        let px = ExactPlane::of_triangle(&[
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(1.0, 0.0, 1.0),
        ]);
        let py = ExactPlane::of_triangle(&[
            Point3::new(0.0, 2.0, 0.0),
            Point3::new(0.0, 2.0, 1.0),
            Point3::new(1.0, 2.0, 0.0),
        ]);
        let pz = ExactPlane::of_triangle(&[
            Point3::new(0.0, 0.0, 3.0),
            Point3::new(1.0, 0.0, 3.0),
            Point3::new(0.0, 1.0, 3.0),
        ]);
        let x = three_plane_point(&px, &py, &pz).unwrap();
        assert_eq!(x.to_f64(), Point3::new(1.0, 2.0, 3.0));
        assert!(three_plane_point(&px, &px, &pz).is_none());
    }
}
