//! Turaev–Viro state sums over partially ideal triangulations.
//!
//! ```text
//! TV_r = (2 sin²(2π/r) / r)^{|V|} Σ_col ∏_{interior e} |e|_col ∏_T |T|_col
//! ```
//!
//! with `|e|_col = (-1)^n sin(2π(n+1)/r) / sin(2π/r)` and `|T|_col` the
//! 6j-symbol of the six edge colors. Taken literally, every term of the sum
//! is `i^{#T}` times a real number; each tetrahedron weight here is the
//! 6j-symbol times `-i`, which makes the sum real without changing its
//! magnitude.

use std::collections::{HashMap, HashSet};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qarith::{quarter, Level, LogAccumulator, SignedLog};
use crate::sixj::{is_admissible_triple, sixj_symbol, Sextuple, Triple, FACES};

/// Relative imaginary part tolerated in a state sum.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

/// Vertex pairs of the six edge slots for tetrahedron vertices `v0..v3`.
pub const SLOT_VERTICES: [[usize; 2]; 6] = [[0, 1], [1, 2], [0, 2], [2, 3], [0, 3], [1, 3]];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: i64,
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: i64,
    pub interior: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<[i64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TetrahedronDoc {
    pub edges: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<[i64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceDoc {
    pub edges: [i64; 3],
    pub boundary: bool,
}

/// JSON form of a triangulation; `endpoints`, `vertices` and `faces` are
/// optional and only used for validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    pub tetrahedra: Vec<TetrahedronDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<FaceDoc>>,
}

/// A validated triangulation. Tetrahedra hold edge indices in slot order:
/// faces `(e1,e2,e3)`, `(e1,e5,e6)`, `(e2,e4,e6)`, `(e3,e4,e5)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    doc: TriangulationDoc,
    pub edge_interior: Vec<bool>,
    pub tetrahedra: Vec<[usize; 6]>,
    pub interior_vertices: usize,
    pub warnings: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDocument(msg.into())
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a i64>, what: &str) -> Result<HashMap<i64, usize>> {
    let mut map = HashMap::new();
    for (i, &id) in ids.enumerate() {
        if map.insert(id, i).is_some() {
            return Err(invalid(format!("duplicate {what} id {id}")));
        }
    }
    Ok(map)
}

fn common_vertex(a: [i64; 2], b: [i64; 2]) -> Option<i64> {
    let shared: Vec<i64> = a.iter().filter(|x| b.contains(x)).copied().collect();
    (shared.len() == 1).then(|| shared[0])
}

fn same_pair(a: [i64; 2], b: [i64; 2]) -> bool {
    (a[0] == b[0] && a[1] == b[1]) || (a[0] == b[1] && a[1] == b[0])
}

/// Recover `v0..v3` from the endpoints of the six slots.
fn infer_vertices(ends: &[[i64; 2]; 6]) -> Option<[i64; 4]> {
    let v0 = common_vertex(ends[0], ends[2])?;
    let v1 = common_vertex(ends[0], ends[1])?;
    let v2 = common_vertex(ends[1], ends[2])?;
    let v3 = *ends[3].iter().find(|&&x| x != v2)?;
    Some([v0, v1, v2, v3])
}

impl Triangulation {
    pub fn from_doc(doc: TriangulationDoc) -> Result<Self> {
        let vid = unique_ids(doc.vertices.iter().map(|v| &v.id), "vertex")?;
        let eid = unique_ids(doc.edges.iter().map(|e| &e.id), "edge")?;
        for e in &doc.edges {
            if let Some(ends) = e.endpoints {
                if let Some(v) = ends.iter().find(|v| !vid.contains_key(v)) {
                    return Err(invalid(format!("edge {} has unknown endpoint {v}", e.id)));
                }
            }
        }
        let mut tetrahedra = Vec::with_capacity(doc.tetrahedra.len());
        for (t, tet) in doc.tetrahedra.iter().enumerate() {
            if tet.edges.len() != 6 {
                return Err(invalid(format!("tetrahedron {t} has {} edge references, expected 6", tet.edges.len())));
            }
            let mut idx = [0usize; 6];
            for (slot, id) in tet.edges.iter().enumerate() {
                idx[slot] = *eid.get(id).ok_or_else(|| invalid(format!("tetrahedron {t} references unknown edge {id}")))?;
            }
            check_orientation(&doc, t, &idx)?;
            tetrahedra.push(idx);
        }

        let mut warnings = Vec::new();
        let used: HashSet<usize> = tetrahedra.iter().flatten().copied().collect();
        for (i, e) in doc.edges.iter().enumerate() {
            if !used.contains(&i) {
                let w = format!("edge {} lies in no tetrahedron; it is colored freely and its weight multiplies in", e.id);
                warn!("{w}");
                warnings.push(w);
            }
        }
        if let Some(faces) = &doc.faces {
            let mut on_boundary_face = HashSet::new();
            for f in faces {
                for id in f.edges {
                    let i = *eid.get(&id).ok_or_else(|| invalid(format!("face references unknown edge {id}")))?;
                    if f.boundary {
                        on_boundary_face.insert(i);
                    }
                }
            }
            for (i, e) in doc.edges.iter().enumerate() {
                if !e.interior && !on_boundary_face.contains(&i) {
                    return Err(invalid(format!("boundary edge {} lies on no boundary face", e.id)));
                }
            }
        }

        Ok(Self {
            edge_interior: doc.edges.iter().map(|e| e.interior).collect(),
            interior_vertices: doc.vertices.iter().filter(|v| v.interior).count(),
            tetrahedra,
            warnings,
            doc,
        })
    }

    /// Build a closed triangulation from tetrahedra given by vertex labels;
    /// edges are created for every vertex pair that occurs.
    pub fn from_vertex_tetrahedra(n_vertices: usize, tets: &[[usize; 4]]) -> Result<Self> {
        let mut pairs: Vec<[usize; 2]> = Vec::new();
        let mut edge_of = HashMap::new();
        let mut tdocs = Vec::new();
        for t in tets {
            let mut refs = Vec::with_capacity(6);
            for [i, j] in SLOT_VERTICES {
                let key = [t[i].min(t[j]), t[i].max(t[j])];
                let id = *edge_of.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    pairs.len() - 1
                });
                refs.push(id as i64);
            }
            tdocs.push(TetrahedronDoc { edges: refs, vertices: Some(t.map(|v| v as i64)) });
        }
        let doc = TriangulationDoc {
            vertices: (0..n_vertices).map(|i| VertexDoc { id: i as i64, interior: true }).collect(),
            edges: pairs
                .iter()
                .enumerate()
                .map(|(i, p)| EdgeDoc { id: i as i64, interior: true, endpoints: Some([p[0] as i64, p[1] as i64]) })
                .collect(),
            tetrahedra: tdocs,
            faces: None,
        };
        Self::from_doc(doc)
    }

    pub fn doc(&self) -> &TriangulationDoc {
        &self.doc
    }

    pub fn edge_count(&self) -> usize {
        self.edge_interior.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("serializable")
    }
}

fn check_orientation(doc: &TriangulationDoc, t: usize, idx: &[usize; 6]) -> Result<()> {
    let ends: Option<Vec<[i64; 2]>> = idx.iter().map(|&i| doc.edges[i].endpoints).collect();
    let Some(ends) = ends else { return Ok(()) };
    let ends: [[i64; 2]; 6] = ends.try_into().expect("six slots");
    let verts = match doc.tetrahedra[t].vertices {
        Some(v) => Some(v),
        None => infer_vertices(&ends),
    };
    let ok = verts.is_some_and(|v| SLOT_VERTICES.iter().zip(&ends).all(|(&[i, j], &e)| same_pair([v[i], v[j]], e)));
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("tetrahedron {t} violates the slot convention (faces (1,2,3),(1,5,6),(2,4,6),(3,4,5))")))
    }
}

pub fn load_triangulation(json: &str) -> Result<Triangulation> {
    let doc: TriangulationDoc = serde_json::from_str(json).map_err(|e| invalid(e.to_string()))?;
    Triangulation::from_doc(doc)
}

/// `(-1)^n sin(2π(n+1)/r) / sin(2π/r)` for `0 ≤ n ≤ r-2`.
pub fn edge_weight(n: i64, lvl: &Level) -> Result<f64> {
    let r = lvl.r() as i64;
    if !(0..=r - 2).contains(&n) {
        return Err(Error::OutOfRange { what: "edge color", value: n, range: format!("[0, {}]", r - 2) });
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * lvl.sin_tau(n + 1) / lvl.sin_tau(1))
}

/// Which colors each edge may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorSet {
    /// `{0, …, r-2}`.
    #[default]
    All,
    /// Even colors only.
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TVResult {
    pub r: u32,
    pub value: f64,
    pub colorings_counted: u64,
    /// `|Im| / |sum|` of the accumulated state sum.
    pub imaginary_residue: f64,
}

/// Edge order and the face checks that complete at each depth.
struct Plan {
    order: Vec<usize>,
    checks: Vec<Vec<[usize; 3]>>,
    colors: Vec<u32>,
}

fn plan(tri: &Triangulation, lvl: &Level, set: ColorSet) -> Plan {
    let n = tri.edge_count();
    let mut incidence = vec![0usize; n];
    for t in &tri.tetrahedra {
        for &e in t {
            incidence[e] += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| incidence[b].cmp(&incidence[a]).then(a.cmp(&b)));
    let mut pos = vec![0usize; n];
    for (k, &e) in order.iter().enumerate() {
        pos[e] = k;
    }
    let mut checks = vec![Vec::new(); n];
    let mut seen = HashSet::new();
    for t in &tri.tetrahedra {
        for f in FACES {
            let mut face = f.map(|s| t[s]);
            face.sort_unstable();
            if seen.insert(face) {
                let last = face.iter().map(|&e| pos[e]).max().unwrap();
                checks[last].push(face);
            }
        }
    }
    let colors = (0..=lvl.r() - 2).filter(|c| set == ColorSet::All || c % 2 == 0).collect();
    Plan { order, checks, colors }
}

struct Walker<'a> {
    tri: &'a Triangulation,
    lvl: &'a Level,
    plan: &'a Plan,
    weights: Vec<SignedLog>,
    col: Vec<u32>,
    cache: HashMap<[u32; 6], SignedLog>,
    acc: LogAccumulator,
    visits: u64,
}

impl Walker<'_> {
    fn admissible_at(&self, depth: usize) -> bool {
        self.plan.checks[depth]
            .iter()
            .all(|f| is_admissible_triple(Triple::new(self.col[f[0]], self.col[f[1]], self.col[f[2]]), self.lvl))
    }

    fn descend(&mut self, depth: usize) -> Result<()> {
        if depth == self.plan.order.len() {
            return self.leaf();
        }
        let e = self.plan.order[depth];
        for ci in 0..self.plan.colors.len() {
            self.col[e] = self.plan.colors[ci];
            if self.admissible_at(depth) {
                self.descend(depth + 1)?;
            }
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        self.visits += 1;
        let mut w = SignedLog::ONE;
        for (e, &interior) in self.tri.edge_interior.iter().enumerate() {
            if interior {
                w = w * self.weights[self.col[e] as usize];
            }
        }
        let minus_i = quarter(3);
        for t in &self.tri.tetrahedra {
            let key = t.map(|e| self.col[e]);
            let v = match self.cache.get(&key) {
                Some(v) => *v,
                None => {
                    let v = sixj_symbol(&Sextuple(key), self.lvl)?.rotate(minus_i);
                    self.cache.insert(key, v);
                    v
                }
            };
            w = w * v;
        }
        self.acc.add(w);
        Ok(())
    }
}

/// Colorings visited and the accumulated (normalized) sum, before the
/// vertex prefactor.
fn enumerate(tri: &Triangulation, lvl: &Level, set: ColorSet) -> Result<(u64, LogAccumulator)> {
    let plan = plan(tri, lvl, set);
    let weights: Vec<SignedLog> =
        (0..=lvl.r() as i64 - 2).map(|n| edge_weight(n, lvl).map(SignedLog::from_f64)).collect::<Result<_>>()?;
    let n = tri.edge_count();
    let new_walker = || Walker {
        tri,
        lvl,
        plan: &plan,
        weights: weights.clone(),
        col: vec![0; n],
        cache: HashMap::new(),
        acc: LogAccumulator::new(),
        visits: 0,
    };
    if n == 0 {
        let mut w = new_walker();
        w.leaf()?;
        return Ok((w.visits, w.acc));
    }
    // One work unit per color of the first edge, merged in color order.
    let units: Vec<Result<(u64, LogAccumulator)>> = plan
        .colors
        .par_iter()
        .map(|&c| {
            let mut w = new_walker();
            w.col[plan.order[0]] = c;
            if w.admissible_at(0) {
                w.descend(1)?;
            }
            Ok((w.visits, w.acc))
        })
        .collect();
    let mut visits = 0;
    let mut acc = LogAccumulator::new();
    for u in units {
        let (v, a) = u?;
        visits += v;
        acc.merge(&a);
    }
    Ok((visits, acc))
}

/// Number of admissible colorings of `tri`.
pub fn count_colorings(tri: &Triangulation, lvl: &Level, set: ColorSet) -> Result<u64> {
    Ok(enumerate(tri, lvl, set)?.0)
}

pub fn tv_state_sum(tri: &Triangulation, lvl: &Level) -> Result<TVResult> {
    tv_state_sum_with(tri, lvl, ColorSet::All)
}

pub fn tv_state_sum_with(tri: &Triangulation, lvl: &Level, set: ColorSet) -> Result<TVResult> {
    let (visits, acc) = enumerate(tri, lvl, set)?;
    let s = lvl.sin_tau(1);
    let pre = SignedLog::from_f64(2.0 * s * s / lvl.r() as f64).powi(tri.interior_vertices as i32);
    let total = acc.value() * pre;
    let z = total.to_complex();
    let residue = if total.is_zero() { 0.0 } else { z.im.abs() / z.norm() };
    if residue > IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidue { relative: residue, tolerance: IMAGINARY_TOLERANCE });
    }
    Ok(TVResult { r: lvl.r(), value: z.re, colorings_counted: visits, imaginary_residue: residue })
}

/// Seed triangulations for invariance checks.
pub mod seeds {
    use super::*;

    /// The boundary of the 4-simplex: five tetrahedra on five vertices.
    pub fn boundary_4simplex() -> Vec<[usize; 4]> {
        vec![[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 3, 4], [0, 2, 3, 4], [1, 2, 3, 4]]
    }

    /// Replace `tets[k]` by four tetrahedra coned from a new vertex `v`.
    pub fn one_four(tets: &[[usize; 4]], k: usize, v: usize) -> Vec<[usize; 4]> {
        let [a, b, c, d] = tets[k];
        let mut out: Vec<[usize; 4]> = tets.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, t)| *t).collect();
        out.extend([[a, b, c, v], [a, b, d, v], [a, c, d, v], [b, c, d, v]]);
        out
    }

    /// Replace two tetrahedra `abcp`, `abcq` sharing face `abc` by the three
    /// tetrahedra around the new edge `pq`.
    pub fn two_three(tets: &[[usize; 4]], face: [usize; 3], p: usize, q: usize) -> Result<Vec<[usize; 4]>> {
        let has = |t: &[usize; 4], x: usize| face.iter().all(|f| t.contains(f)) && t.contains(&x);
        let before = tets.len();
        let out: Vec<[usize; 4]> = tets.iter().filter(|t| !has(t, p) && !has(t, q)).copied().collect();
        if out.len() != before - 2 {
            return Err(Error::InvalidArgument("2-3 move needs two tetrahedra on the face".into()));
        }
        let [a, b, c] = face;
        let mut out = out;
        out.extend([[a, b, p, q], [a, c, p, q], [b, c, p, q]]);
        Ok(out)
    }

    /// The seed pair: ∂Δ⁴ after a 1-4 move, before and after a 2-3 move.
    pub fn pachner_pair() -> (Triangulation, Triangulation) {
        let base = one_four(&boundary_4simplex(), 0, 5);
        let moved = two_three(&base, [0, 1, 2], 5, 4).expect("valid move");
        (
            Triangulation::from_vertex_tetrahedra(6, &base).expect("valid seed"),
            Triangulation::from_vertex_tetrahedra(6, &moved).expect("valid seed"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lvl(r: i64) -> Level {
        Level::new(r).unwrap()
    }

    const ONE_TET: &str = r#"{
        "vertices": [{"id": 0, "interior": true}, {"id": 1, "interior": true},
                     {"id": 2, "interior": true}, {"id": 3, "interior": true}],
        "edges": [{"id": 10, "interior": true}, {"id": 11, "interior": true}, {"id": 12, "interior": true},
                  {"id": 13, "interior": true}, {"id": 14, "interior": true}, {"id": 15, "interior": true}],
        "tetrahedra": [{"edges": [10, 11, 12, 13, 14, 15]}]
    }"#;

    #[test]
    fn loads_minimal_document() {
        let t = load_triangulation(ONE_TET).unwrap();
        assert_eq!(t.tetrahedra, vec![[0, 1, 2, 3, 4, 5]]);
        assert_eq!(t.interior_vertices, 4);
        assert!(t.warnings.is_empty());
        let again = load_triangulation(&t.to_json()).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn rejects_wrong_arity() {
        let doc = ONE_TET.replace("[10, 11, 12, 13, 14, 15]", "[10, 11, 12, 13, 14]");
        assert!(matches!(load_triangulation(&doc), Err(Error::InvalidDocument(m)) if m.contains("expected 6")));
    }

    #[test]
    fn rejects_bad_references_and_json() {
        let doc = ONE_TET.replace("[10, 11, 12, 13, 14, 15]", "[10, 11, 12, 13, 14, 99]");
        assert!(matches!(load_triangulation(&doc), Err(Error::InvalidDocument(_))));
        assert!(matches!(load_triangulation("{"), Err(Error::InvalidDocument(_))));
        let dup = ONE_TET.replace("\"id\": 11", "\"id\": 10");
        assert!(matches!(load_triangulation(&dup), Err(Error::InvalidDocument(_))));
    }

    #[test]
    fn isolated_edge_warns() {
        let doc = ONE_TET.replace(r#"{"id": 15, "interior": true}]"#, r#"{"id": 15, "interior": true}, {"id": 16, "interior": false}]"#);
        let t = load_triangulation(&doc).unwrap();
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn orientation_is_checked_when_endpoints_are_given() {
        let good = Triangulation::from_vertex_tetrahedra(4, &[[0, 1, 2, 3]]).unwrap();
        let mut doc = good.doc().clone();
        doc.tetrahedra[0].vertices = None;
        assert!(Triangulation::from_doc(doc.clone()).is_ok());
        // Swapping two non-opposite slots breaks the face pattern.
        doc.tetrahedra[0].edges.swap(0, 1);
        assert!(matches!(Triangulation::from_doc(doc), Err(Error::InvalidDocument(m)) if m.contains("slot convention")));
    }

    #[test]
    fn boundary_faces_are_checked() {
        let mut doc = load_triangulation(ONE_TET).unwrap().doc().clone();
        doc.edges[0].interior = false;
        doc.faces = Some(vec![FaceDoc { edges: [11, 12, 13], boundary: true }]);
        assert!(Triangulation::from_doc(doc.clone()).is_err());
        doc.faces = Some(vec![FaceDoc { edges: [10, 11, 12], boundary: true }]);
        assert!(Triangulation::from_doc(doc).is_ok());
    }

    #[test]
    fn edge_weight_examples() {
        for r in [5i64, 7, 31] {
            let l = lvl(r);
            assert!((edge_weight(0, &l).unwrap() - 1.0).abs() < 1e-15);
            let w1 = edge_weight(1, &l).unwrap();
            assert!((w1 + 2.0 * (2.0 * PI / r as f64).cos()).abs() < 1e-14);
            let last = edge_weight(r - 2, &l).unwrap();
            assert!((last - (-1f64).powi((r - 1) as i32)).abs() < 1e-14);
            assert!(edge_weight(r - 1, &l).is_err());
            assert!(edge_weight(-1, &l).is_err());
        }
    }

    #[test]
    fn empty_triangulation_is_the_prefactor() {
        let doc = r#"{"vertices": [{"id": 0, "interior": true}], "edges": [], "tetrahedra": []}"#;
        let t = load_triangulation(doc).unwrap();
        for r in [5i64, 7] {
            let res = tv_state_sum(&t, &lvl(r)).unwrap();
            let s = (2.0 * PI / r as f64).sin();
            assert!((res.value - 2.0 * s * s / r as f64).abs() < 1e-15);
            assert_eq!(res.colorings_counted, 1);
        }
    }

    fn naive_count(tri: &Triangulation, lvl: &Level) -> u64 {
        let n = tri.edge_count();
        let m = lvl.r() - 1;
        let mut col = vec![0u32; n];
        let mut count = 0;
        loop {
            let ok = tri.tetrahedra.iter().all(|t| Sextuple(t.map(|e| col[e])).is_admissible(lvl));
            count += ok as u64;
            let mut i = 0;
            while i < n && col[i] == m - 1 {
                col[i] = 0;
                i += 1;
            }
            if i == n {
                return count;
            }
            col[i] += 1;
        }
    }

    #[test]
    fn enumerator_matches_naive_filter() {
        let l = lvl(5);
        let one = load_triangulation(ONE_TET).unwrap();
        assert_eq!(count_colorings(&one, &l, ColorSet::All).unwrap(), naive_count(&one, &l));
        assert_eq!(count_colorings(&one, &l, ColorSet::All).unwrap(), crate::sixj::count_admissible(&l));
        // Two tetrahedra glued along a face (9 edges).
        let two = Triangulation::from_vertex_tetrahedra(5, &[[0, 1, 2, 3], [0, 1, 2, 4]]).unwrap();
        assert_eq!(two.edge_count(), 9);
        assert_eq!(count_colorings(&two, &l, ColorSet::All).unwrap(), naive_count(&two, &l));
        let mut doc = one.doc().clone();
        doc.edges.push(EdgeDoc { id: 99, interior: true, endpoints: None });
        let seven = Triangulation::from_doc(doc).unwrap();
        assert_eq!(count_colorings(&seven, &l, ColorSet::All).unwrap(), naive_count(&seven, &l));
    }

    #[test]
    fn sphere_at_r5() {
        // TV_5(S³) = 2 sin²(2π/5) / 5 = 0.36180339887498948...
        let l = lvl(5);
        let base = seeds::boundary_4simplex();
        let t = Triangulation::from_vertex_tetrahedra(5, &base).unwrap();
        let res = tv_state_sum(&t, &l).unwrap();
        assert_eq!(res.colorings_counted, 832);
        assert!((res.value - 0.361_803_398_874_989_5).abs() < 1e-13, "{res:?}");
        let (a, b) = seeds::pachner_pair();
        let (ra, rb) = (tv_state_sum(&a, &l).unwrap(), tv_state_sum(&b, &l).unwrap());
        assert_eq!((ra.colorings_counted, rb.colorings_counted), (6016, 7744));
        assert!((ra.value - res.value).abs() < 1e-12 && (rb.value - res.value).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let t = Triangulation::from_vertex_tetrahedra(5, &seeds::boundary_4simplex()).unwrap();
        let l = lvl(7);
        let run = |n| {
            rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| tv_state_sum(&t, &l).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn even_colors_subset() {
        let t = Triangulation::from_vertex_tetrahedra(5, &seeds::boundary_4simplex()).unwrap();
        let l = lvl(7);
        let all = count_colorings(&t, &l, ColorSet::All).unwrap();
        let even = count_colorings(&t, &l, ColorSet::Even).unwrap();
        assert!(even > 0 && even < all);
        assert!(tv_state_sum_with(&t, &l, ColorSet::Even).unwrap().value.is_finite());
    }
}
