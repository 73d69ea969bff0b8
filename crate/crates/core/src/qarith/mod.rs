//! Quantum integers and factorials at `q = exp(2πi/r)` kept in a signed-log
//! representation, and stable summation of signed-log terms.

pub mod dd;

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul, Neg};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lobachevsky::lobachevsky;

/// Phases closer than this to a quarter turn of the reference are snapped.
pub const PHASE_SNAP: f64 = 1e-9;
/// Relative residual below which a sum is declared an exact cancellation.
pub const ZERO_RELATIVE: f64 = 1e-14;
/// Relative residual below which a sum is reported as unreliable.
pub const LOSS_RELATIVE: f64 = 1e-10;

/// Working precision for alternating sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Standard,
    /// Double-double accumulation; `digits` is capped at [`dd::DD_DIGITS`].
    Extended { digits: u32 },
}

impl Precision {
    pub fn extended(digits: u32) -> Self {
        Precision::Extended { digits: digits.min(dd::DD_DIGITS) }
    }
}

/// A complex number stored as `exp(log_mag) * phase` with `|phase| = 1`.
/// Zero is `log_mag = -inf`, `phase = 1`.
#[derive(Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub log_mag: f64,
    pub phase: Complex64,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Exact representative of `i^k`.
pub fn quarter(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Snap to an exact quarter turn when within `tol`.
fn snap_phase(p: Complex64, tol: f64) -> Complex64 {
    for k in 0..4 {
        let u = quarter(k);
        if (p - u).norm() < tol {
            return u;
        }
    }
    p / p.norm()
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { log_mag: f64::NEG_INFINITY, phase: Complex64::new(1.0, 0.0) };
    pub const ONE: SignedLog = SignedLog { log_mag: 0.0, phase: Complex64::new(1.0, 0.0) };

    pub fn new(log_mag: f64, phase: Complex64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { log_mag, phase }
        }
    }

    pub fn from_quarter(log_mag: f64, k: i64) -> Self {
        Self::new(log_mag, quarter(k))
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::from_quarter(x.abs().ln(), if x > 0.0 { 0 } else { 2 })
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let n = z.norm();
        if n == 0.0 {
            Self::ZERO
        } else {
            Self::new(n.ln(), snap_phase(z / n, 1e-15))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.log_mag.exp()
        }
    }

    pub fn abs(&self) -> f64 {
        self.log_mag.exp()
    }

    pub fn recip(&self) -> Self {
        Self::new(-self.log_mag, self.phase.conj())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.log_mag, self.phase.conj())
    }

    pub fn powi(&self, k: i32) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::ONE } else { Self::ZERO };
        }
        let mut p = Complex64::new(1.0, 0.0);
        let base = if k >= 0 { self.phase } else { self.phase.conj() };
        for _ in 0..k.unsigned_abs() {
            p *= base;
        }
        Self::new(self.log_mag * k as f64, p)
    }

    /// Multiply by a unit complex number.
    pub fn rotate(&self, u: Complex64) -> Self {
        if self.is_zero() {
            *self
        } else {
            Self::new(self.log_mag, self.phase * u)
        }
    }

    /// Relative distance of two values in the log/phase metric.
    pub fn close_to(&self, other: &Self, tol: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        (self.log_mag - other.log_mag).abs() <= tol && (self.phase - other.phase).norm() <= tol
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "SignedLog(0)")
        } else {
            write!(f, "SignedLog(exp({}) * ({}{:+}i))", self.log_mag, self.phase.re, self.phase.im)
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, o: SignedLog) -> SignedLog {
        if self.is_zero() || o.is_zero() {
            SignedLog::ZERO
        } else {
            SignedLog::new(self.log_mag + o.log_mag, self.phase * o.phase)
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, o: SignedLog) -> SignedLog {
        assert!(!o.is_zero(), "division by a zero SignedLog");
        self * o.recip()
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;
    fn neg(self) -> SignedLog {
        self.rotate(quarter(2))
    }
}

struct FactorialTable {
    /// `log|{n}!|` and the exponent `k` with phase `i^k`, for `0 ≤ n < r`.
    log: Vec<f64>,
    quarter: Vec<u8>,
}

/// The level `r` (odd, at least 3) together with its factorial table.
#[derive(Clone)]
pub struct Level {
    r: u32,
    table: Arc<FactorialTable>,
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Level({})", self.r)
    }
}

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r
    }
}

impl Eq for Level {}

/// `sin(2π n / r)` with the argument folded into `[0, π/2]` first, so that
/// oddness and periodicity in `n` hold exactly.
pub fn sin_tau(n: i64, r: u32) -> f64 {
    let r = r as i64;
    let m = n.rem_euclid(r);
    let (m, sign) = if 2 * m > r { (r - m, -1.0) } else { (m, 1.0) };
    let s = if 4 * m > r {
        (PI * (r - 2 * m) as f64 / r as f64).sin()
    } else {
        (2.0 * PI * m as f64 / r as f64).sin()
    };
    sign * s
}

impl Level {
    pub fn new(r: i64) -> Result<Self> {
        if r < 3 || r % 2 == 0 || r > u16::MAX as i64 {
            return Err(Error::InvalidLevel(r));
        }
        let r = r as u32;
        let mut log = Vec::with_capacity(r as usize);
        let mut quarter = Vec::with_capacity(r as usize);
        let (mut acc, mut comp) = (0.0f64, 0.0f64);
        let mut k = 0u8;
        log.push(0.0);
        quarter.push(0);
        for n in 1..r as i64 {
            let s = sin_tau(n, r);
            let t = (2.0 * s.abs()).ln();
            let sum = acc + t;
            comp += if acc.abs() >= t.abs() { (acc - sum) + t } else { (t - sum) + acc };
            acc = sum;
            k = (k + if s > 0.0 { 1 } else { 3 }) % 4;
            log.push(acc + comp);
            quarter.push(k);
        }
        Ok(Self { r, table: Arc::new(FactorialTable { log, quarter }) })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `ζ_r = 2 sin(2π/r)`.
    pub fn zeta(&self) -> f64 {
        2.0 * sin_tau(1, self.r)
    }

    pub fn sin_tau(&self, n: i64) -> f64 {
        sin_tau(n, self.r)
    }

    pub fn quantum_integer(&self, n: i64) -> SignedLog {
        let s = self.sin_tau(n);
        if s == 0.0 || n.rem_euclid(self.r as i64) == 0 {
            SignedLog::ZERO
        } else {
            SignedLog::from_quarter((2.0 * s.abs()).ln(), if s > 0.0 { 1 } else { 3 })
        }
    }

    /// `log|{n}!|` and phase exponent for `0 ≤ n < r`; `None` when `{n}! = 0`.
    pub(crate) fn factorial_parts(&self, n: i64) -> Option<(f64, u8)> {
        let n = usize::try_from(n).ok()?;
        if n >= self.r as usize {
            None
        } else {
            Some((self.table.log[n], self.table.quarter[n]))
        }
    }

    pub fn quantum_factorial(&self, n: i64) -> Result<SignedLog> {
        if n < 0 || n > 2 * self.r as i64 {
            return Err(Error::OutOfRange { what: "factorial argument", value: n, range: format!("[0, {}]", 2 * self.r) });
        }
        Ok(match self.factorial_parts(n) {
            Some((l, k)) => SignedLog::from_quarter(l, k as i64),
            None => SignedLog::ZERO,
        })
    }
}

pub fn quantum_integer(n: i64, lvl: &Level) -> SignedLog {
    lvl.quantum_integer(n)
}

pub fn quantum_factorial(n: i64, lvl: &Level) -> Result<SignedLog> {
    lvl.quantum_factorial(n)
}

/// `log|{n}!| + (r/2π) Λ(2πn/r)` for `0 < n < r`.
pub fn factorial_asymptotic_residual(n: i64, lvl: &Level) -> Result<f64> {
    let r = lvl.r() as i64;
    if n <= 0 || n >= r {
        return Err(Error::OutOfRange { what: "n", value: n, range: format!("(0, {r})") });
    }
    let (l, _) = lvl.factorial_parts(n).expect("n < r");
    Ok(l + r as f64 / (2.0 * PI) * lobachevsky(2.0 * PI * n as f64 / r as f64))
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Result of a signed-log sum before the cancellation policy is applied.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawSum {
    pub value: SignedLog,
    /// `|sum| / max |term|`; 1 for an empty sum.
    pub relative: f64,
}

fn order_terms(a: &SignedLog, b: &SignedLog) -> Ordering {
    b.log_mag
        .total_cmp(&a.log_mag)
        .then(a.phase.re.total_cmp(&b.phase.re))
        .then(a.phase.im.total_cmp(&b.phase.im))
}

pub(crate) fn logsum_raw(terms: &[SignedLog]) -> RawSum {
    let mut ts: Vec<SignedLog> = terms.iter().copied().filter(|t| !t.is_zero()).collect();
    if ts.is_empty() {
        return RawSum { value: SignedLog::ZERO, relative: 1.0 };
    }
    ts.sort_by(order_terms);
    let m = ts[0].log_mag;
    let u = ts[0].phase;
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for t in &ts {
        let rel = snap_phase(t.phase * u.conj(), PHASE_SNAP);
        let w = (t.log_mag - m).exp();
        re.add(w * rel.re);
        im.add(w * rel.im);
    }
    let s = Complex64::new(re.value(), im.value());
    let n = s.norm();
    if n == 0.0 {
        return RawSum { value: SignedLog::ZERO, relative: 0.0 };
    }
    let phase = snap_phase(s / n, 1e-15) * u;
    RawSum { value: SignedLog::new(m + n.ln(), phase), relative: n }
}

/// Sum of signed-log terms: the largest magnitude is factored out, the
/// rest is accumulated with compensated arithmetic in a fixed order.
pub fn signed_logsum(terms: &[SignedLog]) -> Result<SignedLog> {
    let raw = logsum_raw(terms);
    if raw.relative < ZERO_RELATIVE {
        Ok(SignedLog::ZERO)
    } else if raw.relative < LOSS_RELATIVE {
        Err(Error::LossOfSignificance { relative: raw.relative })
    } else {
        Ok(raw.value)
    }
}

/// Streaming complex accumulator of signed-log terms with a running scale.
/// Merging is deterministic when done in a fixed order.
#[derive(Debug, Clone, Copy)]
pub struct LogAccumulator {
    scale: f64,
    re: Neumaier,
    im: Neumaier,
    max_log: f64,
    count: u64,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        Self { scale: f64::NEG_INFINITY, re: Neumaier::default(), im: Neumaier::default(), max_log: f64::NEG_INFINITY, count: 0 }
    }
}

impl LogAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    fn rescale_to(&mut self, s: f64) {
        if s > self.scale {
            let f = if self.scale == f64::NEG_INFINITY { 0.0 } else { (self.scale - s).exp() };
            self.re.scale(f);
            self.im.scale(f);
            self.scale = s;
        }
    }

    pub fn add(&mut self, t: SignedLog) {
        self.count += 1;
        if t.is_zero() {
            return;
        }
        self.max_log = self.max_log.max(t.log_mag);
        self.rescale_to(t.log_mag);
        let w = (t.log_mag - self.scale).exp();
        self.re.add(w * t.phase.re);
        self.im.add(w * t.phase.im);
    }

    pub fn merge(&mut self, other: &LogAccumulator) {
        self.count += other.count;
        if other.max_log == f64::NEG_INFINITY {
            return;
        }
        self.max_log = self.max_log.max(other.max_log);
        self.rescale_to(other.scale);
        let f = (other.scale - self.scale).exp();
        self.re.add(other.re.sum * f);
        self.re.add(other.re.comp * f);
        self.im.add(other.im.sum * f);
        self.im.add(other.im.comp * f);
    }

    /// Number of terms added, zeros included.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Largest term magnitude seen, in log units.
    pub fn max_log(&self) -> f64 {
        self.max_log
    }

    pub fn value(&self) -> SignedLog {
        if self.scale == f64::NEG_INFINITY {
            return SignedLog::ZERO;
        }
        let s = Complex64::new(self.re.value(), self.im.value());
        let n = s.norm();
        if n == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog::new(self.scale + n.ln(), s / n)
        }
    }

    /// `|sum| / max |term|`.
    pub fn relative(&self) -> f64 {
        let v = self.value();
        if self.max_log == f64::NEG_INFINITY {
            1.0
        } else if v.is_zero() {
            0.0
        } else {
            (v.log_mag - self.max_log).exp()
        }
    }
}
