//! Exact orientation predicates.
//!
//! A floating-point evaluation is accepted when its magnitude exceeds a
//! forward error bound on the permanent; otherwise the determinant is
//! recomputed exactly over big integers (every f64 is an integer multiple of
//! a power of two, so scaling to the smallest exponent is lossless).

use std::cmp::Ordering;

use nalgebra::{Point2, Point3};
use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};

const EPS: f64 = f64::EPSILON * 0.5;
const O3D_BOUND: f64 = (7.0 + 56.0 * EPS) * EPS;
const O2D_BOUND: f64 = (3.0 + 16.0 * EPS) * EPS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => Sign::Positive,
            Some(Ordering::Less) => Sign::Negative,
            _ => Sign::Zero,
        }
    }

    pub fn as_i32(self) -> i32 {
        self as i32
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Sign of `det[b - a, c - a, d - a]`: positive when `d` lies on the side
/// the right-handed normal of `(a, b, c)` points to.
pub fn orient3d(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>, d: &Point3<f64>) -> Sign {
    let ba = b - a;
    let ca = c - a;
    let da = d - a;
    let m1 = ca.y * da.z;
    let m2 = ca.z * da.y;
    let m3 = ca.z * da.x;
    let m4 = ca.x * da.z;
    let m5 = ca.x * da.y;
    let m6 = ca.y * da.x;
    let det = ba.x * (m1 - m2) + ba.y * (m3 - m4) + ba.z * (m5 - m6);
    let perm =
        ba.x.abs() * (m1.abs() + m2.abs()) + ba.y.abs() * (m3.abs() + m4.abs()) + ba.z.abs() * (m5.abs() + m6.abs());
    let bound = O3D_BOUND * perm;
    if det > bound {
        return Sign::Positive;
    }
    if -det > bound {
        return Sign::Negative;
    }
    // a repeated point makes the determinant vanish exactly; this is the
    // common case for faces sharing a vertex
    if d == a || d == b || d == c || a == b || b == c || a == c {
        return Sign::Zero;
    }
    orient3d_exact(a, b, c, d)
}

/// Sign of `det[b - a, c - a]`: positive for a counter-clockwise turn.
pub fn orient2d(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> Sign {
    let l = (b.x - a.x) * (c.y - a.y);
    let r = (b.y - a.y) * (c.x - a.x);
    let det = l - r;
    let bound = O2D_BOUND * (l.abs() + r.abs());
    if det > bound {
        Sign::Positive
    } else if -det > bound {
        Sign::Negative
    } else if a == b || b == c || a == c {
        Sign::Zero
    } else {
        orient2d_exact(a, b, c)
    }
}

/// Scales a set of finite doubles to big integers sharing one power of two.
pub(crate) fn scaled_integers<const N: usize>(values: [f64; N]) -> [BigInt; N] {
    let decoded = values.map(Float::integer_decode);
    let min_exp = decoded.iter().filter(|d| d.0 != 0).map(|d| d.1).min().unwrap_or(0);
    decoded.map(|(mant, exp, sign)| {
        if mant == 0 {
            return BigInt::zero();
        }
        let v = BigInt::from(mant) << ((exp - min_exp) as usize);
        if sign < 0 {
            -v
        } else {
            v
        }
    })
}

fn sign_of_big(x: &BigInt) -> Sign {
    if x.is_positive() {
        Sign::Positive
    } else if x.is_negative() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

pub fn orient3d_exact(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>, d: &Point3<f64>) -> Sign {
    let [ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz] =
        scaled_integers([a.x, a.y, a.z, b.x, b.y, b.z, c.x, c.y, c.z, d.x, d.y, d.z]);
    let (bax, bay, baz) = (&bx - &ax, &by - &ay, &bz - &az);
    let (cax, cay, caz) = (&cx - &ax, &cy - &ay, &cz - &az);
    let (dax, day, daz) = (&dx - &ax, &dy - &ay, &dz - &az);
    let det =
        &bax * (&cay * &daz - &caz * &day) + &bay * (&caz * &dax - &cax * &daz) + &baz * (&cax * &day - &cay * &dax);
    sign_of_big(&det)
}

pub fn orient2d_exact(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> Sign {
    let [ax, ay, bx, by, cx, cy] = scaled_integers([a.x, a.y, b.x, b.y, c.x, c.y]);
    let det = (&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax);
    sign_of_big(&det)
}

/// Exact collinearity of three 3-D points.
pub fn collinear3d(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> bool {
    let drop = |p: &Point3<f64>, k: usize| -> Point2<f64> {
        match k {
            0 => Point2::new(p.y, p.z),
            1 => Point2::new(p.z, p.x),
            _ => Point2::new(p.x, p.y),
        }
    };
    (0..3).all(|k| orient2d(&drop(a, k), &drop(b, k), &drop(c, k)) == Sign::Zero)
}
