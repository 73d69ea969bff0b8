//! The Lobachevsky function and the volume potentials built from it.
//!
//! `Λ(x) = -∫₀ˣ log|2 sin t| dt` is odd and π-periodic. It is evaluated through
//! the Clausen function, `Λ(x) = Cl₂(2x) / 2`, after reducing `2x` into
//! `[-π, π]`, where the expansion
//!
//! ```text
//! Cl₂(θ) = θ - θ log|θ| + θ Σ_{n≥1} ζ(2n) / (n (2n+1)) · (θ / 2π)^{2n}
//! ```
//!
//! converges at least as fast as `4^{-n}`.
//!
//! The potential `F(Z; θ)` of a six-angle configuration, its maximiser `Z₀`,
//! the face term `ν` and the auxiliary functions `Γ` and `L` used to bound the
//! growth of 6j-symbols all live here.

use std::f64::consts::{PI, TAU};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Volume of the regular ideal octahedron, `8Λ(π/4)`.
pub const V8: f64 = 3.663_862_376_708_876;

/// Volume of the regular ideal tetrahedron, `3Λ(π/3)`.
///
/// Some texts print `v3 = Λ(π/3) ≅ 1.01`; numerically `Λ(π/3) ≈ 0.3383`, so the
/// constant here is the tetrahedron volume `3Λ(π/3)`, which is the extremal
/// value of [`gamma_two`].
pub const V3: f64 = 1.014_941_606_409_653_6;

/// ζ(2n) for n = 1..=30.
const ZETA_EVEN: [f64; 30] = [
    1.644_934_066_848_226_4,
    1.082_323_233_711_138_2,
    1.017_343_061_984_449_1,
    1.004_077_356_197_944_3,
    1.000_994_575_127_818_1,
    1.000_246_086_553_308_0,
    1.000_061_248_135_058_7,
    1.000_015_282_259_408_7,
    1.000_003_817_293_265_0,
    1.000_000_953_962_033_9,
    1.000_000_238_450_502_7,
    1.000_000_059_608_189_1,
    1.000_000_014_901_554_8,
    1.000_000_003_725_334_0,
    1.000_000_000_931_327_4,
    1.000_000_000_232_831_2,
    1.000_000_000_058_207_7,
    1.000_000_000_014_551_9,
    1.000_000_000_003_638_0,
    1.000_000_000_000_909_5,
    1.000_000_000_000_227_4,
    1.000_000_000_000_056_8,
    1.000_000_000_000_014_2,
    1.000_000_000_000_003_6,
    1.000_000_000_000_000_9,
    1.000_000_000_000_000_2,
    1.0,
    1.0,
    1.0,
    1.0,
];

/// Coefficients `ζ(2n) / (n (2n+1) (2π)^{2n})`.
static CLAUSEN_COEFFS: LazyLock<[f64; 30]> = LazyLock::new(|| {
    let mut out = [0.0; 30];
    let inv_tau_sq = 1.0 / (TAU * TAU);
    let mut pow = 1.0;
    for (k, c) in out.iter_mut().enumerate() {
        let n = (k + 1) as f64;
        pow *= inv_tau_sq;
        *c = ZETA_EVEN[k] / (n * (2.0 * n + 1.0)) * pow;
    }
    out
});

/// `Cl₂(θ)` for `θ ∈ [-π, π]`.
fn clausen2_reduced(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let t2 = theta * theta;
    // Horner in t² on the tail series.
    let tail = CLAUSEN_COEFFS
        .iter()
        .rev()
        .fold(0.0, |acc, &c| (acc + c) * t2);
    theta - theta * theta.abs().ln() + theta * tail
}

/// The Lobachevsky function `Λ(x) = -∫₀ˣ log|2 sin t| dt`.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // Reduce x into [-π/2, π/2]; Λ is π-periodic.
    let reduced = x - PI * (x / PI).round();
    0.5 * clausen2_reduced(2.0 * reduced)
}

/// `ν(α, β, γ)`: half the alternating sum of four Lobachevsky values attached
/// to a face with angles `α, β, γ`.
pub fn nu(alpha: f64, beta: f64, gamma: f64) -> f64 {
    0.5 * (lobachevsky((alpha + beta + gamma) / 2.0)
        - lobachevsky((alpha + beta - gamma) / 2.0)
        - lobachevsky((alpha - beta + gamma) / 2.0)
        - lobachevsky((-alpha + beta + gamma) / 2.0))
}

/// `Γ(a, b) = Λ(a + b) - Λ(a) - Λ(b)`; bounded by `±V3` on `a, b ≥ 0, a + b ≤ 2π`.
pub fn gamma_two(a: f64, b: f64) -> f64 {
    lobachevsky(a + b) - lobachevsky(a) - lobachevsky(b)
}

/// The function `L(a₁..a₄, b₁..b₃)` obtained from `F + 2ν(θ₁,θ₂,θ₃)` after the
/// substitution `aᵢ = Z - Uᵢ`, `bⱼ = Vⱼ - Z`. Its maximum on the domain
/// `0 ≤ aᵢ, bⱼ ≤ π`, `Σa + Σb ≤ 2π` is `V8`, attained at all arguments `π/4`.
pub fn big_l(a: [f64; 4], b: [f64; 3]) -> f64 {
    let total: f64 = a.iter().sum::<f64>() + b.iter().sum::<f64>();
    let paired: f64 = (0..3).map(|i| a[i] + b[i]).sum();
    -lobachevsky(total)
        + a.iter().map(|&x| lobachevsky(x)).sum::<f64>()
        + b.iter().map(|&x| lobachevsky(x)).sum::<f64>()
        + lobachevsky(paired)
        - (0..3).map(|i| lobachevsky(a[i] + b[i])).sum::<f64>()
}

/// Six angles `θ₁..θ₆`, the continuum analogue of a colored tetrahedron
/// (`θᵢ = 2π nᵢ / r`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSextuple(pub [f64; 6]);

const ANGLE_TOL: f64 = 1e-12;

impl AngleSextuple {
    /// Validates `θᵢ ∈ [0, 2π]` and the four face sums `≤ 4π`.
    pub fn new(theta: [f64; 6]) -> Result<Self> {
        if let Some(&bad) = theta
            .iter()
            .find(|t| !t.is_finite() || **t < -ANGLE_TOL || **t > TAU + ANGLE_TOL)
        {
            return Err(Error::InvalidArgument(format!(
                "angle {bad} is outside [0, 2π]"
            )));
        }
        let s = Self(theta);
        if s.face_sums().iter().any(|&f| f > 2.0 * TAU + ANGLE_TOL) {
            return Err(Error::InvalidArgument(
                "a face sum exceeds 4π".to_string(),
            ));
        }
        Ok(s)
    }

    pub fn uniform(theta: f64) -> Result<Self> {
        Self::new([theta; 6])
    }

    pub fn angles(&self) -> [f64; 6] {
        self.0
    }

    fn face_sums(&self) -> [f64; 4] {
        let t = &self.0;
        [
            t[0] + t[1] + t[2],
            t[0] + t[4] + t[5],
            t[1] + t[3] + t[5],
            t[2] + t[3] + t[4],
        ]
    }

    /// Face half-sums `U₁..U₄`.
    pub fn u(&self) -> [f64; 4] {
        self.face_sums().map(|f| f / 2.0)
    }

    /// Quadrilateral half-sums `V₁..V₃`.
    pub fn v(&self) -> [f64; 3] {
        let t = &self.0;
        [
            (t[0] + t[1] + t[3] + t[4]) / 2.0,
            (t[0] + t[2] + t[3] + t[5]) / 2.0,
            (t[1] + t[2] + t[4] + t[5]) / 2.0,
        ]
    }

    /// `[max Uᵢ, min(Vⱼ, 2π)]`; may be empty (`lo > hi`).
    pub fn bracket(&self) -> (f64, f64) {
        let lo = self.u().into_iter().fold(f64::NEG_INFINITY, f64::max);
        let hi = self.v().into_iter().fold(TAU, f64::min);
        (lo, hi)
    }

    /// Sum of the four face terms `ν`.
    pub fn face_terms(&self) -> f64 {
        let t = &self.0;
        nu(t[0], t[1], t[2]) + nu(t[0], t[4], t[5]) + nu(t[1], t[3], t[5]) + nu(t[2], t[3], t[4])
    }
}

fn big_f_unchecked(z: f64, theta: &AngleSextuple) -> f64 {
    theta.u().iter().map(|&u| lobachevsky(z - u)).sum::<f64>()
        + theta.v().iter().map(|&v| lobachevsky(v - z)).sum::<f64>()
        - lobachevsky(z)
}

/// `F(Z; θ) = Σ Λ(Z - Uᵢ) + Σ Λ(Vⱼ - Z) - Λ(Z)` on `max Uᵢ ≤ Z ≤ min(Vⱼ, 2π)`.
pub fn big_f(z: f64, theta: &AngleSextuple) -> Result<f64> {
    let (lo, hi) = theta.bracket();
    if z < lo - ANGLE_TOL || z > hi + ANGLE_TOL {
        return Err(Error::OutsideBracket(z, lo, hi));
    }
    Ok(big_f_unchecked(z, theta))
}

/// `F'(Z) = log( |sin Z| ∏|sin(Vⱼ - Z)| / ∏|sin(Z - Uᵢ)| )`.
pub fn big_f_prime(z: f64, theta: &AngleSextuple) -> f64 {
    let num: f64 = z.sin().abs().ln()
        + theta
            .v()
            .iter()
            .map(|&v| (v - z).sin().abs().ln())
            .sum::<f64>();
    let den: f64 = theta.u().iter().map(|&u| (z - u).sin().abs().ln()).sum();
    num - den
}

/// `F''(Z) = -Σ cot(Z - Uᵢ) - Σ cot(Vⱼ - Z) - cot(2π - Z)`.
pub fn big_f_second(z: f64, theta: &AngleSextuple) -> f64 {
    let cot = |x: f64| x.cos() / x.sin();
    -theta.u().iter().map(|&u| cot(z - u)).sum::<f64>()
        - theta.v().iter().map(|&v| cot(v - z)).sum::<f64>()
        - cot(TAU - z)
}

/// Location and value of the maximum of `F` over its bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FMax {
    pub z0: f64,
    pub f_max: f64,
}

const GRID: usize = 64;

fn bisect_root(theta: &AngleSextuple, mut a: f64, mut b: f64) -> f64 {
    // Invariant: F'(a) > 0 > F'(b).
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let d = big_f_prime(mid, theta);
        if d.abs() <= 1e-12 || (b - a) <= 1e-14 {
            return mid;
        }
        if d > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Maximises `F(·; θ)` over `[max Uᵢ, min(Vⱼ, 2π)]`.
///
/// When θ satisfies both hypothesis families of `asympt::satisfies_hypotheses`, `F` is strictly
/// concave with `F' → +∞` at the left end and `-∞` at the right end, so there
/// is exactly one root of `F'`, found by bisection. Outside that regime the
/// derivative is scanned on a grid and every `+ → -` sign change is refined;
/// the bracket ends are candidates as well.
pub fn maximize_f(theta: &AngleSextuple) -> Result<FMax> {
    let (lo, hi) = theta.bracket();
    if lo > hi + ANGLE_TOL {
        return Err(Error::EmptyBracket { lo, hi });
    }
    if hi - lo <= 1e-14 {
        return Ok(FMax {
            z0: lo,
            f_max: big_f_unchecked(lo, theta),
        });
    }

    let width = hi - lo;
    let edge = width * 1e-12;
    let nodes: Vec<f64> = (0..=GRID)
        .map(|k| match k {
            0 => lo + edge,
            GRID => hi - edge,
            _ => lo + width * k as f64 / GRID as f64,
        })
        .collect();
    let slopes: Vec<f64> = nodes
        .iter()
        .map(|&z| {
            let d = big_f_prime(z, theta);
            if d.is_nan() {
                0.0
            } else {
                d
            }
        })
        .collect();

    let mut best = FMax {
        z0: lo,
        f_max: big_f_unchecked(lo, theta),
    };
    let mut consider = |z: f64| {
        let f = big_f_unchecked(z, theta);
        if f > best.f_max {
            best = FMax { z0: z, f_max: f };
        }
    };
    consider(hi);
    for k in 0..GRID {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let (da, db) = (slopes[k], slopes[k + 1]);
        if da > 0.0 && db < 0.0 {
            consider(bisect_root(theta, a, b));
        } else if da == 0.0 {
            consider(a);
        }
    }
    Ok(best)
}

/// `V(θ) = max_Z F(Z; θ) + ν(θ₁,θ₂,θ₃) + ν(θ₁,θ₅,θ₆) + ν(θ₂,θ₄,θ₆) + ν(θ₃,θ₄,θ₅)`,
/// the exponential growth rate bounding a 6j-symbol with colors `r θ / 2π`.
pub fn potential_v(theta: &AngleSextuple) -> Result<f64> {
    Ok(maximize_f(theta)?.f_max + theta.face_terms())
}
