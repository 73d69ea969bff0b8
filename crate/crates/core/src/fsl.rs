//! Fundamental shadow links: Reshetikhin–Turaev invariants by the shadow
//! formula, the Turaev–Viro invariant of the complement, and the filling
//! volume bounds.
//!
//! A presentation is `c` blocks, each mapping its six strands to link
//! components `1..=k`. For an even coloring `col` of the components,
//!
//! ```text
//! RT(col) = (2 sin(2π/r) / √r)^{-c} ∏_blocks 6j(col(i₁), …, col(i₆))
//! TV      = 2^{b₂} Σ_{col ∈ J_r^k} |RT(col)|²
//! ```
//!
//! where `J_r = {0, 2, …, r-3}` and `b₂` is supplied by the user.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lobachevsky::V8;
use crate::qarith::{Level, LogAccumulator, SignedLog};
use crate::sixj::{canonical_form, is_admissible_triple, sixj_symbol, Sextuple, Triple, FACES};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub slots: Vec<u32>,
}

/// JSON form of a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FslDoc {
    pub c: u32,
    pub k: u32,
    #[serde(default)]
    pub b2: u32,
    pub blocks: Vec<BlockDoc>,
}

/// A validated presentation; component ids are stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FSLPresentation {
    pub c: usize,
    pub k: usize,
    pub b2: u32,
    pub blocks: Vec<[usize; 6]>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDocument(msg.into())
}

impl FSLPresentation {
    pub fn new(k: usize, b2: u32, blocks: Vec<[u32; 6]>) -> Result<Self> {
        Self::from_doc(FslDoc {
            c: blocks.len() as u32,
            k: k as u32,
            b2,
            blocks: blocks.into_iter().map(|s| BlockDoc { slots: s.to_vec() }).collect(),
        })
    }

    pub fn from_doc(doc: FslDoc) -> Result<Self> {
        if doc.c == 0 {
            return Err(invalid("c must be at least 1"));
        }
        if doc.blocks.len() != doc.c as usize {
            return Err(invalid(format!("c = {} but {} blocks given", doc.c, doc.blocks.len())));
        }
        if doc.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        let mut used = vec![false; doc.k as usize];
        let mut blocks = Vec::with_capacity(doc.blocks.len());
        for (b, block) in doc.blocks.iter().enumerate() {
            if block.slots.len() != 6 {
                return Err(invalid(format!("block {b} has {} slots, expected 6", block.slots.len())));
            }
            let mut ids = [0usize; 6];
            for (j, &id) in block.slots.iter().enumerate() {
                if id == 0 || id > doc.k {
                    return Err(invalid(format!("block {b} slot {} refers to component {id}, outside 1..={}", j + 1, doc.k)));
                }
                ids[j] = id as usize - 1;
                used[ids[j]] = true;
            }
            blocks.push(ids);
        }
        if let Some(unused) = used.iter().position(|u| !u) {
            return Err(invalid(format!("component {} is used by no slot (k = {})", unused + 1, doc.k)));
        }
        Ok(Self { c: doc.c as usize, k: doc.k as usize, b2: doc.b2, blocks })
    }

    pub fn to_doc(&self) -> FslDoc {
        FslDoc {
            c: self.c as u32,
            k: self.k as u32,
            b2: self.b2,
            blocks: self.blocks.iter().map(|b| BlockDoc { slots: b.iter().map(|&i| i as u32 + 1).collect() }).collect(),
        }
    }

    /// The colored sextuple of each block.
    pub fn block_tuples(&self, col: &EvenColoring) -> Vec<Sextuple> {
        self.blocks.iter().map(|b| Sextuple(b.map(|i| col.0[i]))).collect()
    }
}

pub fn load_fsl(json: &str) -> Result<FSLPresentation> {
    let doc: FslDoc = serde_json::from_str(json).map_err(|e| invalid(e.to_string()))?;
    FSLPresentation::from_doc(doc)
}

/// Colors in `J_r = {0, 2, …, r-3}` indexed by component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenColoring(pub Vec<u32>);

impl EvenColoring {
    pub fn new(col: Vec<u32>, lvl: &Level) -> Result<Self> {
        if let Some(&bad) = col.iter().find(|&&x| x % 2 == 1 || x > lvl.r() - 3) {
            return Err(Error::OutOfRange { what: "even color", value: bad as i64, range: format!("{{0, 2, …, {}}}", lvl.r() - 3) });
        }
        Ok(Self(col))
    }
}

/// `J_r`, of size `(r-1)/2`.
pub fn even_colors(lvl: &Level) -> Vec<u32> {
    (0..=lvl.r() - 3).step_by(2).collect()
}

/// `log(2 sin(2π/r) / √r)`.
fn log_eta(lvl: &Level) -> f64 {
    (2.0 * lvl.sin_tau(1)).ln() - 0.5 * (lvl.r() as f64).ln()
}

/// The shadow formula; zero when some block tuple is not admissible.
pub fn rt_invariant(p: &FSLPresentation, col: &EvenColoring, lvl: &Level) -> Result<SignedLog> {
    if col.0.len() != p.k {
        return Err(Error::InvalidArgument(format!("coloring has {} entries, presentation has k = {}", col.0.len(), p.k)));
    }
    let col = EvenColoring::new(col.0.clone(), lvl)?;
    let mut v = SignedLog::new(-(p.c as f64) * log_eta(lvl), crate::qarith::quarter(0));
    for s in p.block_tuples(&col) {
        if !s.is_admissible(lvl) {
            return Ok(SignedLog::ZERO);
        }
        v = v * sixj_symbol(&s, lvl)?;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FslTv {
    pub r: u32,
    /// `log TV`; `-inf` when every coloring vanishes.
    pub log_tv: f64,
    /// `(2π/r) log TV`.
    pub growth: f64,
    pub colorings: u64,
}

/// Component order and face checks completing at each depth.
struct Plan {
    checks: Vec<Vec<[usize; 3]>>,
}

fn plan(p: &FSLPresentation) -> Plan {
    let mut checks = vec![Vec::new(); p.k];
    for b in &p.blocks {
        for f in FACES {
            let face = f.map(|s| b[s]);
            let last = *face.iter().max().unwrap();
            if !checks[last].contains(&face) {
                checks[last].push(face);
            }
        }
    }
    Plan { checks }
}

struct Walker<'a> {
    p: &'a FSLPresentation,
    lvl: &'a Level,
    plan: &'a Plan,
    colors: &'a [u32],
    col: Vec<u32>,
    cache: HashMap<Sextuple, f64>,
    acc: LogAccumulator,
    visits: u64,
}

impl Walker<'_> {
    fn ok(&self, depth: usize) -> bool {
        self.plan.checks[depth].iter().all(|f| is_admissible_triple(Triple::new(self.col[f[0]], self.col[f[1]], self.col[f[2]]), self.lvl))
    }

    fn descend(&mut self, depth: usize) -> Result<()> {
        if depth == self.p.k {
            return self.leaf();
        }
        for &c in self.colors {
            self.col[depth] = c;
            if self.ok(depth) {
                self.descend(depth + 1)?;
            }
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        let mut log = -(self.p.c as f64) * log_eta(self.lvl);
        for b in &self.p.blocks {
            let s = canonical_form(&Sextuple(b.map(|i| self.col[i])), self.lvl);
            let m = match self.cache.get(&s) {
                Some(m) => *m,
                None => {
                    let m = sixj_symbol(&s, self.lvl)?.log_mag;
                    self.cache.insert(s, m);
                    m
                }
            };
            log += m;
        }
        self.acc.add(SignedLog::new(2.0 * log, crate::qarith::quarter(0)));
        Ok(())
    }
}

/// `2^{b₂} Σ_{col ∈ J_r^k} |RT(col)|²`, summed over admissible colorings
/// (the others contribute zero). The 6j magnitudes are cached by canonical
/// form, under which `|6j|` is invariant.
pub fn fsl_tv(p: &FSLPresentation, lvl: &Level) -> Result<FslTv> {
    let colors = even_colors(lvl);
    let plan = plan(p);
    let units: Vec<Result<(u64, LogAccumulator)>> = colors
        .par_iter()
        .map(|&c| {
            let mut w = Walker {
                p,
                lvl,
                plan: &plan,
                colors: &colors,
                col: vec![0; p.k],
                cache: HashMap::new(),
                acc: LogAccumulator::new(),
                visits: 0,
            };
            w.col[0] = c;
            if w.ok(0) {
                w.descend(1)?;
            }
            w.visits = w.acc.count();
            Ok((w.visits, w.acc))
        })
        .collect();
    let mut acc = LogAccumulator::new();
    let mut colorings = 0;
    for u in units {
        let (v, a) = u?;
        colorings += v;
        acc.merge(&a);
    }
    let log_tv = acc.value().log_mag + p.b2 as f64 * LN_2;
    Ok(FslTv { r: lvl.r(), log_tv, growth: 2.0 * PI / lvl.r() as f64 * log_tv, colorings })
}

/// Hyperbolic volume of the complement, `2c·v8`.
pub fn fsl_volume(p: &FSLPresentation) -> f64 {
    2.0 * p.c as f64 * V8
}

/// `α(x) = (1 - (2π/x)²)^{3/2}` for `x > 2π`, else 0.
pub fn filling_alpha(x: f64) -> f64 {
    if x > 2.0 * PI {
        (1.0 - (2.0 * PI / x).powi(2)).powf(1.5)
    } else {
        0.0
    }
}

/// `B(x) = 1/α(x)` for `x > 2π`.
pub fn filling_b(x: f64) -> Option<f64> {
    (x > 2.0 * PI).then(|| 1.0 / filling_alpha(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillingBounds {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub b: Option<f64>,
}

/// Bounds `α(ℓ_min)·ltv ≤ vol < ltv` for a filling with shortest slope `ℓ_min`.
pub fn filling_volume_bounds(ltv: f64, l_min: f64) -> Result<FillingBounds> {
    if !(l_min > 0.0) {
        return Err(Error::InvalidArgument(format!("l_min must be positive, got {l_min}")));
    }
    if !(ltv >= 0.0) {
        return Err(Error::InvalidArgument(format!("ltv must be nonnegative, got {ltv}")));
    }
    let alpha = filling_alpha(l_min);
    Ok(FillingBounds { lower: alpha * ltv, upper: ltv, alpha, b: filling_b(l_min) })
}
