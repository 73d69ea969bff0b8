//! Growth-rate series over odd `r`, their extrapolated limits, and color
//! sequences approximating a fixed angle sextuple.
//!
//! Series are fitted to `g(r) = L + a·log r / r + b / r` by linear least
//! squares. No error bar is attached to `L`; the residual RMS is reported
//! instead.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsl::{fsl_tv, FSLPresentation};
use crate::lobachevsky::{lobachevsky, maximize_f, AngleSextuple, V8};
use crate::qarith::Level;
use crate::sixj::{central_tuple, growth_of, quarter_of, sixj_symbol, sixj_terms, Sextuple};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    #[serde(rename = "L")]
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Fit {
    pub fn model(&self, r: u32) -> f64 {
        let r = r as f64;
        self.l + self.a * r.ln() / r + self.b / r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSeries {
    /// `(r, g)` sorted by `r`.
    pub points: Vec<(u32, f64)>,
    /// Absent with fewer than three points.
    pub fit: Option<Fit>,
    pub residual_rms: Option<f64>,
    /// Levels skipped because the functional was infeasible or vanished.
    pub gaps: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    #[serde(rename = "L")]
    pub l: f64,
    pub a: f64,
    pub b: f64,
    pub residual_rms: f64,
    pub target: f64,
    pub gap: f64,
}

/// Least-squares fit of `L + a log r / r + b / r`.
pub fn fit_model(points: &[(u32, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!("a fit needs at least 3 points, got {}", points.len())));
    }
    let design = DMatrix::from_fn(points.len(), 3, |i, j| {
        let r = points[i].0 as f64;
        match j {
            0 => 1.0,
            1 => r.ln() / r,
            _ => 1.0 / r,
        }
    });
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let x = design
        .svd(true, true)
        .solve(&rhs, 1e-15)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(Fit { l: x[0], a: x[1], b: x[2] })
}

impl GrowthSeries {
    /// Sorts the points and fits them when there are at least three.
    pub fn from_points(mut points: Vec<(u32, f64)>, gaps: Vec<u32>) -> Result<Self> {
        points.sort_by_key(|p| p.0);
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("duplicate r in series".into()));
        }
        if let Some(p) = points.iter().find(|p| p.0 % 2 == 0) {
            return Err(Error::InvalidArgument(format!("series level r = {} is even", p.0)));
        }
        let (fit, residual_rms) = if points.len() >= 3 {
            let fit = fit_model(&points)?;
            let ss: f64 = points.iter().map(|&(r, g)| (g - fit.model(r)).powi(2)).sum();
            (Some(fit), Some((ss / points.len() as f64).sqrt()))
        } else {
            (None, None)
        };
        Ok(Self { points, fit, residual_rms, gaps })
    }

    /// True when every consecutive step increases `g`.
    pub fn is_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 > w[0].1)
    }

    pub fn summary(&self, target: f64) -> Option<FitSummary> {
        let fit = self.fit?;
        Some(FitSummary {
            l: fit.l,
            a: fit.a,
            b: fit.b,
            residual_rms: self.residual_rms.unwrap_or(0.0),
            target,
            gap: fit.l - target,
        })
    }

    /// `r,g,model,residual` rows; model and residual are empty without a fit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,g,model,residual\n");
        for &(r, g) in &self.points {
            match self.fit {
                Some(f) => {
                    let m = f.model(r);
                    writeln!(out, "{r},{g:.16e},{m:.16e},{:.16e}", g - m).unwrap();
                }
                None => writeln!(out, "{r},{g:.16e},,").unwrap(),
            }
        }
        out
    }
}

/// Which growth functional to evaluate at each level.
#[derive(Debug, Clone)]
pub enum SeriesKind {
    /// `(2π/r) log|6j|` at the even central tuple.
    SixjCentral,
    /// `(2π/r) log TV` of a fundamental shadow link complement.
    Fsl(FSLPresentation),
    /// One sextuple per level, aligned with the level list.
    Sextuples(Vec<Sextuple>),
}

fn check_levels(r_list: &[u32]) -> Result<()> {
    if r_list.is_empty() {
        return Err(Error::InvalidArgument("empty level list".into()));
    }
    if r_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must be strictly increasing".into()));
    }
    for &r in r_list {
        Level::new(r as i64)?;
    }
    Ok(())
}

/// Evaluates the functional at each level in parallel and fits the result.
/// Vanishing values are recorded as gaps.
pub fn growth_series(kind: &SeriesKind, r_list: &[u32]) -> Result<GrowthSeries> {
    check_levels(r_list)?;
    if let SeriesKind::Sextuples(s) = kind {
        if s.len() != r_list.len() {
            return Err(Error::InvalidArgument(format!("{} sextuples for {} levels", s.len(), r_list.len())));
        }
    }
    let values: Vec<Result<f64>> = r_list
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let lvl = Level::new(r as i64)?;
            match kind {
                SeriesKind::SixjCentral => Ok(growth_of(&sixj_symbol(&central_tuple(&lvl), &lvl)?, &lvl)),
                SeriesKind::Fsl(p) => Ok(fsl_tv(p, &lvl)?.growth),
                SeriesKind::Sextuples(s) => Ok(growth_of(&sixj_symbol(&s[i], &lvl)?, &lvl)),
            }
        })
        .collect();
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for (&r, v) in r_list.iter().zip(values) {
        let g = v?;
        if g.is_finite() {
            points.push((r, g));
        } else {
            gaps.push(r);
        }
    }
    GrowthSeries::from_points(points, gaps)
}

/// Both hypothesis families of the asymptotic 6j limit at level `r`:
/// `0 ≤ Q_j - T_i ≤ (r-2)/2` and `(r-2)/2 ≤ T_i ≤ r-2`.
pub fn satisfies_hypotheses(s: &Sextuple, lvl: &Level) -> bool {
    let r = lvl.r() as i64;
    let (t, q) = (s.t(), s.q());
    t.iter().all(|&ti| 2 * ti >= r - 2 && ti <= r - 2)
        && t.iter().all(|&ti| q.iter().all(|&qj| qj >= ti && 2 * (qj - ti) <= r - 2))
}

const REPAIR_RADIUS: i64 = 3;

/// Colors `nᵢ ≈ r θᵢ / 2π` (rounded half up) moved by at most 3 per entry
/// to the nearest tuple, in L1 distance then lexicographically, that is
/// admissible and satisfies both hypothesis families.
pub fn angle_sequence_colors(theta: &AngleSextuple, lvl: &Level) -> Result<Sextuple> {
    let r = lvl.r() as f64;
    // The slack keeps exact halves such as r·π/2π from rounding down.
    let base = theta.0.map(|t| (r * t / std::f64::consts::TAU + 0.5 + 1e-9).floor() as i64);
    let side = 2 * REPAIR_RADIUS + 1;
    let mut best: Option<(i64, [u32; 6])> = None;
    for code in 0..side.pow(6) {
        let mut n = [0u32; 6];
        let mut dist = 0;
        let mut c = code;
        let mut ok = true;
        for i in (0..6).rev() {
            let d = c % side - REPAIR_RADIUS;
            c /= side;
            let v = base[i] + d;
            if v < 0 {
                ok = false;
                break;
            }
            n[i] = v as u32;
            dist += d.abs();
        }
        if !ok {
            continue;
        }
        if let Some((bd, bn)) = best {
            if dist > bd || (dist == bd && n >= bn) {
                continue;
            }
        }
        let s = Sextuple(n);
        if s.is_admissible(lvl) && satisfies_hypotheses(&s, lvl) {
            best = Some((dist, n));
        }
    }
    best.map(|(_, n)| Sextuple(n)).ok_or_else(|| {
        Error::Infeasible(format!("no admissible tuple within {REPAIR_RADIUS} of {base:?} at r = {}", lvl.r()))
    })
}

/// `-½ Σ_{i,j} Λ(V_j - U_i) + ½ Σ_i Λ(U_i) + max F`.
pub fn appendix_limit(theta: &AngleSextuple) -> Result<f64> {
    let (u, v) = (theta.u(), theta.v());
    let mut s = 0.0;
    for &ui in &u {
        s += 0.5 * lobachevsky(ui);
        for &vj in &v {
            s -= 0.5 * lobachevsky(vj - ui);
        }
    }
    Ok(s + maximize_f(theta)?.f_max)
}

/// True when every term of the z-sum has the same phase.
pub fn sign_coherent(s: &Sextuple, lvl: &Level) -> Result<bool> {
    let terms = sixj_terms(s, lvl)?;
    let mut q = terms.iter().map(|t| quarter_of(&t.1));
    let first = q.next().flatten();
    Ok(first.is_some() && q.all(|k| k == first))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixCheck {
    pub series: GrowthSeries,
    pub tuples: Vec<(u32, Sextuple)>,
    /// Levels whose realized tuple has z-terms of mixed sign.
    pub incoherent: Vec<u32>,
    pub limit: f64,
}

/// Growth series of the realized color sequence for `θ`. Infeasible levels
/// become gaps.
pub fn appendix_growth_check(theta: &AngleSextuple, r_list: &[u32]) -> Result<AppendixCheck> {
    check_levels(r_list)?;
    let limit = appendix_limit(theta)?;
    let rows: Vec<Result<Option<(u32, Sextuple, f64, bool)>>> = r_list
        .par_iter()
        .map(|&r| {
            let lvl = Level::new(r as i64)?;
            let s = match angle_sequence_colors(theta, &lvl) {
                Ok(s) => s,
                Err(Error::Infeasible(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let g = growth_of(&sixj_symbol(&s, &lvl)?, &lvl);
            Ok(Some((r, s, g, sign_coherent(&s, &lvl)?)))
        })
        .collect();
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    let mut tuples = Vec::new();
    let mut incoherent = Vec::new();
    for (&r, row) in r_list.iter().zip(rows) {
        match row? {
            Some((r, s, g, coherent)) if g.is_finite() => {
                points.push((r, g));
                tuples.push((r, s));
                if !coherent {
                    incoherent.push(r);
                }
            }
            _ => gaps.push(r),
        }
    }
    Ok(AppendixCheck { series: GrowthSeries::from_points(points, gaps)?, tuples, incoherent, limit })
}

/// `v8 · t`, the growth bound for a manifold triangulated by `t` tetrahedra.
pub fn triangulation_growth_bound(t: u64) -> f64 {
    V8 * t as f64
}

/// Odd levels `lo, lo+2, …, ≤ hi`.
pub fn odd_range(lo: u32, hi: u32) -> Vec<u32> {
    let lo = lo | 1;
    (lo..=hi).step_by(2).collect()
}
