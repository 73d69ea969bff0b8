//! r-admissibility, the triangle coefficients Δ, the quantum 6j-symbol at
//! `q = exp(2πi/r)`, its symmetry group, and exhaustive bound scans.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;
use std::fmt;
use std::sync::LazyLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qarith::dd::{self, Dd};
use crate::qarith::{logsum_raw, quarter, Level, Precision, SignedLog, LOSS_RELATIVE};

/// Three colors meeting at a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Triple {
    pub fn new(a: u32, b: u32, c: u32) -> Self {
        Self { a, b, c }
    }
}

pub fn is_admissible_triple(t: Triple, lvl: &Level) -> bool {
    let Triple { a, b, c } = t;
    let m = lvl.r() - 2;
    let s = a + b + c;
    a <= m && b <= m && c <= m && s % 2 == 0 && s <= 2 * m && a <= b + c && b <= a + c && c <= a + b
}

/// Slots of the four faces; opposite edges are `(1,4)`, `(2,5)`, `(3,6)`.
pub const FACES: [[usize; 3]; 4] = [[0, 1, 2], [0, 4, 5], [1, 3, 5], [2, 3, 4]];
/// Slots summed by `Q_1`, `Q_2`, `Q_3`.
pub const QUADS: [[usize; 4]; 3] = [[0, 1, 3, 4], [0, 2, 3, 5], [1, 2, 4, 5]];

/// Six edge colors `(n1,…,n6)` of a tetrahedron.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sextuple(pub [u32; 6]);

impl fmt::Debug for Sextuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Sextuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0;
        write!(f, "({},{},{},{},{},{})", n[0], n[1], n[2], n[3], n[4], n[5])
    }
}

impl Sextuple {
    pub fn new(n: [u32; 6]) -> Self {
        Self(n)
    }

    pub fn faces(&self) -> [Triple; 4] {
        FACES.map(|[i, j, k]| Triple::new(self.0[i], self.0[j], self.0[k]))
    }

    /// Face half-sums `T_1..T_4` (integral when admissible).
    pub fn t(&self) -> [i64; 4] {
        FACES.map(|f| f.iter().map(|&i| self.0[i] as i64).sum::<i64>() / 2)
    }

    /// Half-sums `Q_1..Q_3` over pairs of opposite edges.
    pub fn q(&self) -> [i64; 3] {
        QUADS.map(|f| f.iter().map(|&i| self.0[i] as i64).sum::<i64>() / 2)
    }

    pub fn lambda(&self) -> i64 {
        self.0.iter().map(|&x| x as i64).sum()
    }

    pub fn is_admissible(&self, lvl: &Level) -> bool {
        self.faces().iter().all(|&t| is_admissible_triple(t, lvl))
    }

    /// The entrywise substitution `i ↦ r-2-i` on the given slots.
    pub fn flip(&self, slots: &[usize], lvl: &Level) -> Self {
        let mut n = self.0;
        for &i in slots {
            n[i] = lvl.r() - 2 - n[i];
        }
        Self(n)
    }
}

pub fn is_admissible_sextuple(s: &Sextuple, lvl: &Level) -> bool {
    s.is_admissible(lvl)
}

fn require_admissible(s: &Sextuple, lvl: &Level) -> Result<()> {
    if s.is_admissible(lvl) {
        Ok(())
    } else {
        Err(Error::NotAdmissible(s.0.to_vec(), lvl.r()))
    }
}

fn fact(lvl: &Level, n: i64) -> (f64, i64) {
    let (l, k) = lvl.factorial_parts(n).expect("factorial argument below r");
    (l, k as i64)
}

/// `Δ(a,b,c)`: square root of the real number
/// `i ζ_r {(a+b-c)/2}! {(a-b+c)/2}! {(-a+b+c)/2}! / {(a+b+c)/2+1}!`,
/// positive for a positive radicand and `+i·sqrt` for a negative one.
pub fn delta_triple(t: Triple, lvl: &Level) -> Result<SignedLog> {
    if !is_admissible_triple(t, lvl) {
        return Err(Error::NotAdmissible(vec![t.a, t.b, t.c], lvl.r()));
    }
    let (a, b, c) = (t.a as i64, t.b as i64, t.c as i64);
    let parts = [fact(lvl, (a + b - c) / 2), fact(lvl, (a - b + c) / 2), fact(lvl, (-a + b + c) / 2)];
    let (ld, kd) = fact(lvl, (a + b + c) / 2 + 1);
    let log = lvl.zeta().ln() + parts.iter().map(|p| p.0).sum::<f64>() - ld;
    let k = (1 + parts.iter().map(|p| p.1).sum::<i64>() - kd).rem_euclid(4);
    debug_assert!(k % 2 == 0, "radicand of Δ must be real");
    Ok(SignedLog::from_quarter(log / 2.0, if k == 0 { 0 } else { 1 }))
}

/// Terms `S_z` of the z-sum, with `z` from `max T_i` to `min(min Q_j, r-2)`.
pub fn sixj_terms(s: &Sextuple, lvl: &Level) -> Result<Vec<(i64, SignedLog)>> {
    require_admissible(s, lvl)?;
    let (t, q) = (s.t(), s.q());
    let lo = *t.iter().max().unwrap();
    let hi = (*q.iter().min().unwrap()).min(lvl.r() as i64 - 2);
    Ok((lo..=hi).map(|z| (z, z_term(lvl, &t, &q, z))).collect())
}

fn z_term(lvl: &Level, t: &[i64; 4], q: &[i64; 3], z: i64) -> SignedLog {
    let (mut log, mut k) = fact(lvl, z + 1);
    k += 2 * z;
    for &ti in t {
        let (l, kk) = fact(lvl, z - ti);
        log -= l;
        k -= kk;
    }
    for &qj in q {
        let (l, kk) = fact(lvl, qj - z);
        log -= l;
        k -= kk;
    }
    SignedLog::from_quarter(log, k)
}

fn prefactor(s: &Sextuple, lvl: &Level) -> Result<SignedLog> {
    let mut p = SignedLog::from_quarter(-lvl.zeta().ln(), s.lambda());
    for f in s.faces() {
        p = p * delta_triple(f, lvl)?;
    }
    Ok(p)
}

/// A 6j value together with how it was obtained.
#[derive(Debug, Clone, Copy)]
pub struct SixjEval {
    pub value: SignedLog,
    /// `|sum| / max |term|` of the z-sum.
    pub relative: f64,
    /// True when the double-double path produced the value.
    pub extended: bool,
}

/// Real double-double z-sum relative to its dominant term, built from the
/// consecutive ratios
/// `S_z / S_{z-1} = -sin(z+1) ∏ sin(Q_j-z+1) / ∏ sin(z-T_i)` (arguments in units of 2π/r).
fn extended_sum(terms: &[(i64, SignedLog)], t: &[i64; 4], q: &[i64; 3], r: i64) -> Dd {
    let sin = |m: i64| Dd::sin_tau_frac(m, r);
    let ratio = |z: i64| {
        let mut num = -sin(z + 1);
        for &qj in q {
            num = num * sin(qj - z + 1);
        }
        let mut den = Dd::ONE;
        for &ti in t {
            den = den * sin(z - ti);
        }
        num / den
    };
    let star = terms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.log_mag.total_cmp(&b.1 .1.log_mag).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();
    let mut w = vec![Dd::ZERO; terms.len()];
    w[star] = Dd::ONE;
    for i in star + 1..terms.len() {
        w[i] = w[i - 1] * ratio(terms[i].0);
    }
    for i in (0..star).rev() {
        w[i] = w[i + 1] / ratio(terms[i + 1].0);
    }
    // Add from the smallest terms up.
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[a].abs().hi.total_cmp(&w[b].abs().hi));
    order.into_iter().fold(Dd::ZERO, |acc, i| acc + w[i])
}

/// Evaluate the 6j-symbol. `Standard` uses binary64 and falls back to the
/// double-double path when the z-sum loses more than ten digits.
pub fn sixj_eval(s: &Sextuple, lvl: &Level, precision: Precision) -> Result<SixjEval> {
    let terms = sixj_terms(s, lvl)?;
    if terms.is_empty() {
        return Ok(SixjEval { value: SignedLog::ZERO, relative: 1.0, extended: false });
    }
    let pre = prefactor(s, lvl)?;
    if precision == Precision::Standard {
        let only: Vec<SignedLog> = terms.iter().map(|t| t.1).collect();
        let raw = logsum_raw(&only);
        if raw.relative >= LOSS_RELATIVE {
            return Ok(SixjEval { value: pre * raw.value, relative: raw.relative, extended: false });
        }
    }
    let digits = match precision {
        Precision::Extended { digits } => digits.min(dd::DD_DIGITS),
        Precision::Standard => dd::DD_DIGITS,
    } as i32;
    let (t, q) = (s.t(), s.q());
    let sum = extended_sum(&terms, &t, &q, lvl.r() as i64);
    let rel = sum.abs().to_f64();
    if rel < 10f64.powi(-(digits - 3)) {
        return Ok(SixjEval { value: SignedLog::ZERO, relative: 0.0, extended: true });
    }
    if rel < 10f64.powi(-(digits - 7)) {
        return Err(Error::LossOfSignificance { relative: rel });
    }
    let dominant = terms.iter().map(|t| t.1).max_by(|a, b| a.log_mag.total_cmp(&b.log_mag)).unwrap();
    let value = pre * dominant * SignedLog::from_f64(sum.to_f64());
    Ok(SixjEval { value, relative: rel, extended: true })
}

/// The quantum 6j-symbol
/// `ζ_r^{-1} i^λ ∏Δ Σ_z (-1)^z {z+1}! / (∏{z-T_i}! ∏{Q_j-z}!)`.
pub fn sixj_symbol(s: &Sextuple, lvl: &Level) -> Result<SignedLog> {
    Ok(sixj_eval(s, lvl, Precision::Standard)?.value)
}

pub fn sixj_symbol_with(s: &Sextuple, lvl: &Level, precision: Precision) -> Result<SignedLog> {
    Ok(sixj_eval(s, lvl, precision)?.value)
}

/// `(2π/r) log|6j|`; `-inf` for a vanishing symbol.
pub fn sixj_growth(s: &Sextuple, lvl: &Level) -> Result<f64> {
    Ok(growth_of(&sixj_symbol(s, lvl)?, lvl))
}

pub(crate) fn growth_of(v: &SignedLog, lvl: &Level) -> f64 {
    2.0 * PI / lvl.r() as f64 * v.log_mag
}

/// The even central tuple: every entry `(r±1)/2`, whichever is even.
pub fn central_tuple(lvl: &Level) -> Sextuple {
    let h = (lvl.r() - 1) / 2;
    let c = if h % 2 == 0 { h } else { h + 1 };
    Sextuple([c; 6])
}

/// A symmetry of the 6j magnitude: `out[i] = in[perm[i]]`, replaced by
/// `r-2-x` where `flip[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub perm: [u8; 6],
    pub flip: [bool; 6],
}

impl Symmetry {
    const IDENTITY: Symmetry = Symmetry { perm: [0, 1, 2, 3, 4, 5], flip: [false; 6] };

    pub fn apply(&self, s: &Sextuple, lvl: &Level) -> Sextuple {
        let m = lvl.r() - 2;
        Sextuple(std::array::from_fn(|i| {
            let x = s.0[self.perm[i] as usize];
            if self.flip[i] {
                m - x
            } else {
                x
            }
        }))
    }

    /// `self` after `g`.
    fn after(&self, g: &Symmetry) -> Symmetry {
        Symmetry {
            perm: std::array::from_fn(|i| g.perm[self.perm[i] as usize]),
            flip: std::array::from_fn(|i| self.flip[i] ^ g.flip[self.perm[i] as usize]),
        }
    }
}

fn perm_only(p: [u8; 6]) -> Symmetry {
    Symmetry { perm: p, flip: [false; 6] }
}

fn flip_only(slots: &[usize]) -> Symmetry {
    let mut flip = [false; 6];
    for &i in slots {
        flip[i] = true;
    }
    Symmetry { perm: Symmetry::IDENTITY.perm, flip }
}

/// The group generated by column permutations, upper/lower swaps in two
/// columns, and the substitutions `i ↦ r-2-i` on `{n4,n5,n6}` and on
/// `{n1,n2,n4,n5}`.
pub static SYMMETRY_GROUP: LazyLock<Vec<Symmetry>> = LazyLock::new(|| {
    let gens = [
        perm_only([1, 0, 2, 4, 3, 5]),
        perm_only([0, 2, 1, 3, 5, 4]),
        perm_only([3, 4, 2, 0, 1, 5]),
        flip_only(&[3, 4, 5]),
        flip_only(&[0, 1, 3, 4]),
    ];
    let mut seen = HashSet::from([Symmetry::IDENTITY]);
    let mut group = vec![Symmetry::IDENTITY];
    let mut i = 0;
    while i < group.len() {
        for g in &gens {
            let h = g.after(&group[i]);
            if seen.insert(h) {
                group.push(h);
            }
        }
        i += 1;
    }
    group
});

/// Distinct images of `s` under the symmetry group, sorted.
pub fn orbit(s: &Sextuple, lvl: &Level) -> Vec<Sextuple> {
    let mut v: Vec<Sextuple> = SYMMETRY_GROUP.iter().map(|g| g.apply(s, lvl)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Lexicographically smallest element of the orbit of `s`.
pub fn canonical_form(s: &Sextuple, lvl: &Level) -> Sextuple {
    SYMMETRY_GROUP.iter().map(|g| g.apply(s, lvl)).min().unwrap()
}

fn is_canonical(s: &Sextuple, lvl: &Level) -> bool {
    SYMMETRY_GROUP.iter().all(|g| g.apply(s, lvl) >= *s)
}

/// Check that every group image of each sample has the same `|6j|`.
pub fn validate_symmetry_group(samples: &[Sextuple], lvl: &Level) -> Result<()> {
    for s in samples {
        let base = sixj_symbol(s, lvl)?;
        for g in SYMMETRY_GROUP.iter() {
            let v = sixj_symbol(&g.apply(s, lvl), lvl)?;
            let ok = if base.is_zero() || v.is_zero() {
                base.is_zero() == v.is_zero()
            } else {
                (base.log_mag - v.log_mag).abs() <= 1e-9 * base.log_mag.abs().max(1.0)
            };
            if !ok {
                return Err(Error::InvalidArgument(format!("symmetry check failed for {s} at r={}", lvl.r())));
            }
        }
    }
    Ok(())
}

/// Visit every admissible sextuple at `lvl` with `n1 = first`, pruning on
/// each face as soon as its three colors are fixed.
fn for_each_admissible(lvl: &Level, first: u32, mut f: impl FnMut(Sextuple)) {
    let m = lvl.r() - 2;
    let ok = |a, b, c| is_admissible_triple(Triple::new(a, b, c), lvl);
    let n1 = first;
    for n2 in 0..=m {
        for n3 in 0..=m {
            if !ok(n1, n2, n3) {
                continue;
            }
            for n4 in 0..=m {
                for n5 in 0..=m {
                    if !ok(n3, n4, n5) {
                        continue;
                    }
                    for n6 in 0..=m {
                        if ok(n1, n5, n6) && ok(n2, n4, n6) {
                            f(Sextuple([n1, n2, n3, n4, n5, n6]));
                        }
                    }
                }
            }
        }
    }
}

/// Number of admissible sextuples at `lvl`.
pub fn count_admissible(lvl: &Level) -> u64 {
    (0..=lvl.r() - 2)
        .into_par_iter()
        .map(|n1| {
            let mut c = 0u64;
            for_each_admissible(lvl, n1, |_| c += 1);
            c
        })
        .sum()
}

pub const HISTOGRAM_WIDTH: f64 = 0.05;
pub const DEFAULT_SCAN_CEILING: u32 = 17;

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub ceiling: u32,
    /// Permit `r` above the ceiling.
    pub force: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { ceiling: DEFAULT_SCAN_CEILING, force: false }
    }
}

/// Summary of an exhaustive scan of admissible sextuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub r: u32,
    pub max_growth: f64,
    pub argmax: Sextuple,
    pub count_admissible: u64,
    /// Lower bucket edge (width 0.05) → number of admissible tuples.
    pub histogram: BTreeMap<String, u64>,
    pub count_canonical: u64,
    pub count_vanishing: u64,
    /// Canonical tuples whose z-sum needed the double-double path.
    pub count_extended: u64,
}

#[derive(Default)]
struct Partial {
    count: u64,
    canonical: u64,
    vanishing: u64,
    extended: u64,
    best: Option<(f64, Sextuple)>,
    buckets: BTreeMap<i64, u64>,
}

impl Partial {
    fn offer(&mut self, g: f64, s: Sextuple) {
        let better = match self.best {
            None => true,
            Some((bg, bs)) => g > bg || (g == bg && s < bs),
        };
        if better {
            self.best = Some((g, s));
        }
    }

    fn merge(mut self, o: Partial) -> Partial {
        self.count += o.count;
        self.canonical += o.canonical;
        self.vanishing += o.vanishing;
        self.extended += o.extended;
        if let Some((g, s)) = o.best {
            self.offer(g, s);
        }
        for (k, v) in o.buckets {
            *self.buckets.entry(k).or_default() += v;
        }
        self
    }
}

/// Evaluate the growth of every admissible sextuple at `lvl` (one
/// evaluation per symmetry orbit) and report the maximum.
pub fn bound_scan(lvl: &Level, opts: &ScanOptions) -> Result<ScanReport> {
    if lvl.r() > opts.ceiling && !opts.force {
        return Err(Error::ScanCeiling { r: lvl.r(), ceiling: opts.ceiling });
    }
    let parts: Vec<Result<Partial>> = (0..=lvl.r() - 2)
        .into_par_iter()
        .map(|n1| {
            let mut p = Partial::default();
            let mut err = None;
            for_each_admissible(lvl, n1, |s| {
                p.count += 1;
                if err.is_some() || !is_canonical(&s, lvl) {
                    return;
                }
                p.canonical += 1;
                let weight = orbit(&s, lvl).len() as u64;
                match sixj_eval(&s, lvl, Precision::Standard) {
                    Ok(e) => {
                        p.extended += e.extended as u64;
                        if e.value.is_zero() {
                            p.vanishing += weight;
                        } else {
                            let g = growth_of(&e.value, lvl);
                            p.offer(g, s);
                            *p.buckets.entry((g / HISTOGRAM_WIDTH).floor() as i64).or_default() += weight;
                        }
                    }
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(p),
            }
        })
        .collect();
    let mut total = Partial::default();
    for p in parts {
        total = total.merge(p?);
    }
    let (max_growth, argmax) = total.best.unwrap_or((f64::NEG_INFINITY, Sextuple([0; 6])));
    let histogram = total
        .buckets
        .into_iter()
        .map(|(k, v)| (format!("{:.2}", k as f64 * HISTOGRAM_WIDTH), v))
        .collect();
    Ok(ScanReport {
        r: lvl.r(),
        max_growth,
        argmax,
        count_admissible: total.count,
        histogram,
        count_canonical: total.canonical,
        count_vanishing: total.vanishing,
        count_extended: total.extended,
    })
}

/// Phase `i^k` of a value whose phase is a quarter turn, if it is one.
pub fn quarter_of(v: &SignedLog) -> Option<i64> {
    (0..4).find(|&k| v.phase == quarter(k))
}
