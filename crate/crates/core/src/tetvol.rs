//! Volumes of ideal and hyperideal (truncated) hyperbolic tetrahedra from
//! their dihedral angles, by the Murakami–Yano–Ushijima dilogarithm formula.
//!
//! With internal dihedral angles `αᵢ` and `aᵢ = exp(iαᵢ)`, let `z₁, z₂` be the
//! roots of `α + βz + γz²` (coefficients below). Then
//! `Vol = |Im(U(z₁) - U(z₂))| / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lobachevsky::AngleSextuple;

const PI2_6: f64 = PI * PI / 6.0;

/// `B_{2k}` for k = 1..=15.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Series in `u = -log(1-z)`; accurate for `|z| ≤ 1`, `Re z ≤ 1/2`.
fn dilog_bernoulli(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = u - u2 / 4.0;
    // u^{2k+1} / (2k+1)!
    let mut p = u;
    let mut fact = 1.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2 * k as i32 + 3;
        p *= u2;
        fact *= ((n - 1) * n) as f64;
        let term = p * (b / fact);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Principal-branch dilogarithm `Li₂(z) = -∫₀ᶻ log(1-u)/u du`.
pub fn dilog(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re > 1.0 {
        return Err(Error::BranchCut(z.re));
    }
    if z == Complex64::new(1.0, 0.0) {
        return Ok(Complex64::new(PI2_6, 0.0));
    }
    if z.norm_sqr() == 0.0 {
        return Ok(z);
    }
    if z.norm() > 1.0 {
        let l = (-z).ln();
        return Ok(-PI2_6 - l * l / 2.0 - dilog(z.inv())?);
    }
    if z.re > 0.5 {
        let w = Complex64::new(1.0, 0.0) - z;
        return Ok(PI2_6 - z.ln() * w.ln() - dilog_bernoulli(w));
    }
    Ok(dilog_bernoulli(z))
}

/// Dihedral angles `α₁..α₆`; opposite edges are `(1,4)`, `(2,5)`, `(3,6)`
/// and the vertices are `(1,2,3)`, `(1,5,6)`, `(2,4,6)`, `(3,4,5)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngles(pub [f64; 6]);

const VERTICES: [[usize; 3]; 4] = [[0, 1, 2], [0, 4, 5], [1, 3, 5], [2, 3, 4]];

impl DihedralAngles {
    pub fn new(alpha: [f64; 6]) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidArgument(format!("dihedral angles must be finite and nonnegative: {alpha:?}")));
        }
        Ok(Self(alpha))
    }

    pub fn vertex_sums(&self) -> [f64; 4] {
        VERTICES.map(|v| v.iter().map(|&i| self.0[i]).sum())
    }

    fn shifted(&self, eps: f64) -> Self {
        Self(self.0.map(|a| a + eps))
    }
}

/// Around each vertex `αᵢ + αⱼ + αₖ ≤ π` (up to 1e-12).
pub fn bao_bonahon_check(d: &DihedralAngles) -> bool {
    d.vertex_sums().iter().all(|&s| s <= PI + 1e-12)
}

/// `αᵢ = |π - θᵢ|`.
pub fn angles_from_thetas(theta: &AngleSextuple) -> DihedralAngles {
    DihedralAngles(theta.0.map(|t| (PI - t).abs()))
}

/// The quadratic `α + βz + γz²` whose roots enter the volume formula.
pub fn quadratic_coefficients(a: &[Complex64; 6]) -> [Complex64; 3] {
    let [a1, a2, a3, a4, a5, a6] = *a;
    let p = a1 * a2 * a3 * a4 * a5 * a6;
    let alpha = 1.0 + a1 * a2 * a4 * a5 + a1 * a3 * a4 * a6 + a2 * a3 * a5 * a6 + a1 * a2 * a3 + a1 * a5 * a6 + a2 * a4 * a6 + a3 * a4 * a5;
    let d = |x: Complex64| x - x.inv();
    let beta = -p * (d(a1) * d(a4) + d(a2) * d(a5) + d(a3) * d(a6));
    let gamma = p * (p + a1 * a4 + a2 * a5 + a3 * a6 + a1 * a2 * a6 + a1 * a3 * a5 + a2 * a3 * a4 + a4 * a5 * a6);
    [alpha, beta, gamma]
}

fn li2_near_cut(w: Complex64) -> Result<Complex64> {
    let w = if w.im.abs() < 1e-12 && w.re > 1.0 { Complex64::new(w.re, 1e-12) } else { w };
    dilog(w)
}

/// `U(z, a)`: half the signed sum of eight dilogarithms.
pub fn u_function(z: Complex64, a: &[Complex64; 6]) -> Result<Complex64> {
    let [a1, a2, a3, a4, a5, a6] = *a;
    let plus = [z, z * a1 * a2 * a4 * a5, z * a1 * a3 * a4 * a6, z * a2 * a3 * a5 * a6];
    let minus = [-z * a1 * a2 * a3, -z * a1 * a5 * a6, -z * a2 * a4 * a6, -z * a3 * a4 * a5];
    let mut s = Complex64::new(0.0, 0.0);
    for w in plus {
        s += li2_near_cut(w)?;
    }
    for w in minus {
        s -= li2_near_cut(w)?;
    }
    Ok(s / 2.0)
}

/// Output of the volume formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TetVolume {
    pub volume: f64,
    pub z1: (f64, f64),
    pub z2: (f64, f64),
    /// True when the coefficients vanished and the value is a Richardson limit.
    pub degenerate: bool,
}

const DEGENERATE_COEFF: f64 = 1e-10;
const DEGENERATE_EPS: f64 = 1e-5;

/// The formula in terms of `aᵢ` directly, without angle checks.
pub fn volume_from_parameters(a: &[Complex64; 6]) -> Result<TetVolume> {
    let [alpha, beta, gamma] = quadratic_coefficients(a);
    if alpha.norm() < DEGENERATE_COEFF && beta.norm() < DEGENERATE_COEFF && gamma.norm() < DEGENERATE_COEFF {
        return Err(Error::InvalidArgument("degenerate quadratic coefficients".into()));
    }
    let disc = (beta * beta - 4.0 * alpha * gamma).sqrt();
    let z1 = (-beta + disc) / (2.0 * gamma);
    let z2 = (-beta - disc) / (2.0 * gamma);
    let v = 0.5 * (u_function(z1, a)? - u_function(z2, a)?).im;
    // The labels are fixed by positivity.
    Ok(TetVolume { volume: v.abs(), z1: (z1.re, z1.im), z2: (z2.re, z2.im), degenerate: false })
}

fn parameters(d: &DihedralAngles) -> [Complex64; 6] {
    d.0.map(|x| Complex64::from_polar(1.0, x))
}

/// Volume with root data; degenerate coefficient sets are handled by
/// shifting every angle by `ε` and `ε/2` and taking one Richardson step.
pub fn truncated_tet_volume_detailed(d: &DihedralAngles) -> Result<TetVolume> {
    if !bao_bonahon_check(d) {
        return Err(Error::InvalidArgument(format!("angles {:?} violate a vertex condition", d.0)));
    }
    match volume_from_parameters(&parameters(d)) {
        Ok(v) => Ok(v),
        Err(Error::InvalidArgument(_)) => {
            let mut v = richardson_limit(d, DEGENERATE_EPS)?;
            v.degenerate = true;
            Ok(v)
        }
        Err(e) => Err(e),
    }
}

pub fn truncated_tet_volume(d: &DihedralAngles) -> Result<f64> {
    Ok(truncated_tet_volume_detailed(d)?.volume)
}

/// `2 V(α + ε/2) - V(α + ε)`: the limit of the volume as all angles
/// decrease to `α`, with the linear error term removed.
pub fn richardson_limit(d: &DihedralAngles, eps: f64) -> Result<TetVolume> {
    let a = volume_from_parameters(&parameters(&d.shifted(eps)))?;
    let b = volume_from_parameters(&parameters(&d.shifted(eps / 2.0)))?;
    Ok(TetVolume { volume: 2.0 * b.volume - a.volume, z1: b.z1, z2: b.z2, degenerate: false })
}
