//! Double-double arithmetic (about 31 significant digits), used by the
//! extended-precision evaluation of alternating 6j sums.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Significant decimal digits carried by [`Dd`].
pub const DD_DIGITS: u32 = 31;

const PI: Dd = Dd::new(3.141_592_653_589_793, 1.224_646_799_147_353_2e-16);
const TAU: Dd = Dd::new(6.283_185_307_179_586, 2.449_293_598_294_706_4e-16);
const FRAC_PI_2: Dd = Dd::new(1.570_796_326_794_896_6, 6.123_233_995_736_766e-17);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd::new(0.0, 0.0);
    pub const ONE: Dd = Dd::new(1.0, 0.0);

    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn signum(self) -> f64 {
        if self.hi > 0.0 {
            1.0
        } else if self.hi < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// `sin(2π m / r)` for integers `m` and `r > 0`.
    pub fn sin_tau_frac(m: i64, r: i64) -> Self {
        let m = m.rem_euclid(r);
        if m == 0 {
            return Self::ZERO;
        }
        let x = TAU * Dd::from_f64(m as f64) / Dd::from_f64(r as f64);
        sin(x)
    }
}

/// Taylor kernels on `|y| ≤ π/4`.
fn sin_kernel(y: Dd) -> Dd {
    let y2 = y * y;
    let mut term = y;
    let mut sum = y;
    for k in 1..20 {
        let d = ((2 * k) * (2 * k + 1)) as f64;
        term = -(term * y2) / Dd::from_f64(d);
        sum = sum + term;
        if term.hi.abs() < 1e-34 * sum.hi.abs() {
            break;
        }
    }
    sum
}

fn cos_kernel(y: Dd) -> Dd {
    let y2 = y * y;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 1..20 {
        let d = ((2 * k - 1) * (2 * k)) as f64;
        term = -(term * y2) / Dd::from_f64(d);
        sum = sum + term;
        if term.hi.abs() < 1e-34 {
            break;
        }
    }
    sum
}

/// `sin(x)` for moderate `|x|` (quadrant reduction by `π/2`).
pub fn sin(x: Dd) -> Dd {
    let k = (x.hi / FRAC_PI_2.hi).round();
    let y = x - FRAC_PI_2 * Dd::from_f64(k);
    match (k as i64).rem_euclid(4) {
        0 => sin_kernel(y),
        1 => cos_kernel(y),
        2 => -sin_kernel(y),
        _ => -cos_kernel(y),
    }
}

#[allow(dead_code)]
pub fn pi() -> Dd {
    PI
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd::new(hi, lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd::new(hi, lo)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd::new(q1, q2) + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}
