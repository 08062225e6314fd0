//! JSON formats: groups, complexes, sheaves, sheaf complexes, and reports.
//!
//! Orbits are addressed as "dim:id" strings. Sheaf maps are keyed by the
//! orbit pair "tau -> sigma" and applied to every incidence of that pair.
//! Rationals travel as "p/q" strings; floats appear only in diagnostics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::GammaComplex;
use crate::duality::DualityReport;
use crate::error::{Error, Result};
use crate::chain::GroupRingComplex;
use crate::group::{Elt, GroupSpec};
use crate::l2::{AtiyahReport, L2Report, TruncationReport};
use crate::qmat::QMat;
use crate::scalar::{format_rational, parse_rational, Scalar};
use crate::sheaf::{validate_sheaf, ConstructibleSheaf, SheafComplex, SheafMorphism};
use crate::vn::NsOutcome;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupJson {
    Finite { mul_table: Vec<Vec<usize>> },
    Cyclic { order: usize },
    FreeAbelian { rank: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EltJson {
    Index(usize),
    Vector(Vec<i64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplexJson {
    pub dim: usize,
    pub verts: Vec<(usize, EltJson)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub group: GroupJson,
    pub vertex_orbits: usize,
    pub simplices: Vec<SimplexJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Int(i64),
    Rational(String),
    Complex { re: String, im: String },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SheafJson {
    pub stalks: BTreeMap<String, usize>,
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<Vec<EntryJson>>>,
    #[serde(default)]
    pub real: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceJson {
    #[serde(default)]
    pub schema_version: Option<u32>,
    pub complex: ComplexJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheaf: Option<SheafJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SheafComplexJson {
    pub lo: i64,
    pub sheaves: Vec<SheafJson>,
    pub maps: Vec<BTreeMap<String, Vec<Vec<EntryJson>>>>,
}

pub fn group_from_json(g: &GroupJson) -> Result<GroupSpec> {
    match g {
        GroupJson::Finite { mul_table } => GroupSpec::finite(mul_table.clone()),
        GroupJson::Cyclic { order } => {
            if *order == 0 {
                return Err(Error::Json("cyclic group order must be positive".into()));
            }
            Ok(GroupSpec::cyclic(*order))
        }
        GroupJson::FreeAbelian { rank } => Ok(GroupSpec::free_abelian(*rank)),
    }
}

pub fn group_to_json(g: &GroupSpec) -> GroupJson {
    match g {
        GroupSpec::Finite(t) => GroupJson::Finite { mul_table: t.mul_table.clone() },
        GroupSpec::FreeAbelian { rank } => GroupJson::FreeAbelian { rank: *rank },
    }
}

fn elt_from_json(group: &GroupSpec, e: &EltJson) -> Result<Elt> {
    let elt = match (group, e) {
        (GroupSpec::Finite(_), EltJson::Index(k)) => Elt::Finite(*k),
        (GroupSpec::FreeAbelian { .. }, EltJson::Vector(v)) => Elt::Vector(v.clone()),
        _ => {
            return Err(Error::Json(
                "group element form does not match the group kind".into(),
            ))
        }
    };
    group.check_elt(&elt)?;
    Ok(elt)
}

fn elt_to_json(e: &Elt) -> EltJson {
    match e {
        Elt::Finite(k) => EltJson::Index(*k),
        Elt::Vector(v) => EltJson::Vector(v.clone()),
    }
}

/// Builds the complex without validating it; callers decide how to surface
/// violations.
pub fn complex_from_json(cj: &ComplexJson) -> Result<GammaComplex> {
    let group = group_from_json(&cj.group)?;
    let mut simplices = Vec::with_capacity(cj.simplices.len());
    for s in &cj.simplices {
        let verts = s
            .verts
            .iter()
            .map(|(o, e)| Ok((*o, elt_from_json(&group, e)?)))
            .collect::<Result<Vec<_>>>()?;
        simplices.push((s.dim, verts));
    }
    Ok(GammaComplex::from_simplex_lists(group, cj.vertex_orbits, &simplices))
}

pub fn complex_to_json(c: &GammaComplex) -> ComplexJson {
    let mut simplices = Vec::new();
    for dim in 1..=c.max_dim() {
        for orb in c.orbits_in(dim) {
            simplices.push(SimplexJson {
                dim,
                verts: orb.rep.iter().map(|(o, g)| (*o, elt_to_json(g))).collect(),
            });
        }
    }
    ComplexJson {
        group: group_to_json(&c.group),
        vertex_orbits: c.n_vertex_orbits,
        simplices,
    }
}

fn parse_orbit_key(key: &str) -> Result<(usize, usize)> {
    let (d, i) = key
        .split_once(':')
        .ok_or_else(|| Error::Json(format!("orbit key '{key}' is not 'dim:id'")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Json(format!("orbit key '{key}' is not 'dim:id'")))
    };
    Ok((parse(d)?, parse(i)?))
}

fn entry_to_scalar(e: &EntryJson) -> Result<Scalar> {
    Ok(match e {
        EntryJson::Int(n) => Scalar::from_int(*n),
        EntryJson::Rational(s) => Scalar::from_rational(parse_rational(s)?),
        EntryJson::Complex { re, im } => {
            Scalar::new(parse_rational(re)?, parse_rational(im)?)
        }
    })
}

fn scalar_to_entry(s: &Scalar) -> EntryJson {
    if s.is_real() {
        EntryJson::Rational(format_rational(s.re()))
    } else {
        EntryJson::Complex { re: format_rational(s.re()), im: format_rational(s.im()) }
    }
}

fn matrix_from_entries(rows: usize, cols: usize, data: &[Vec<EntryJson>]) -> Result<QMat> {
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(Error::Json(format!(
            "matrix is not {rows}x{cols} as the stalk dimensions require"
        )));
    }
    let mut m = QMat::zeros(rows, cols);
    for (r, row) in data.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            m.set(r, c, entry_to_scalar(e)?);
        }
    }
    Ok(m)
}

fn matrix_to_entries(m: &QMat) -> Vec<Vec<EntryJson>> {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| scalar_to_entry(m.get(r, c))).collect())
        .collect()
}

/// Realizes sheaf data on a complex: unlisted stalks are zero, unlisted maps
/// between positive stalks are zero matrices. Each listed map is applied to
/// every incidence of that orbit pair.
pub fn sheaf_from_json(c: &GammaComplex, sj: &SheafJson) -> Result<ConstructibleSheaf> {
    let mut f = crate::sheaf::zero_sheaf(c);
    f.real = sj.real;
    for (key, &n) in &sj.stalks {
        let (d, i) = parse_orbit_key(key)?;
        if i >= c.n_orbits(d) {
            return Err(Error::UnknownOrbit { dim: d, id: i });
        }
        f.stalks[d][i] = n;
    }
    // resize every corestriction to the declared stalk dimensions
    for dim in 1..f.shape.len() {
        for orbit in 0..f.shape[dim] {
            for (pos, m) in f.cores[dim][orbit].iter_mut().enumerate() {
                let (fo, _) = c
                    .orbit(dim, orbit)?
                    .facets
                    .get(pos)
                    .and_then(|x| x.clone())
                    .ok_or_else(|| Error::Json("complex has unresolved faces".into()))?;
                *m = QMat::zeros(f.stalks[dim][orbit], f.stalks[dim - 1][fo]);
            }
        }
    }
    // plain "tau->sigma" keys fill every matching incidence; positioned
    // "tau->sigma#pos" keys override a single one and win over plain keys
    for positioned in [false, true] {
        for (key, data) in &sj.maps {
            if key.contains('#') != positioned {
                continue;
            }
            let (tau, sigma) = key
                .split_once("->")
                .ok_or_else(|| Error::Json(format!("map key '{key}' is not 'tau->sigma'")))?;
            let (td, ti) = parse_orbit_key(tau)?;
            let (orbit_part, pos) = match sigma.split_once('#') {
                Some((o, p)) => {
                    let p = p.parse::<usize>().map_err(|_| {
                        Error::Json(format!("bad position in map key '{key}'"))
                    })?;
                    (o, Some(p))
                }
                None => (sigma, None),
            };
            let (sd, si) = parse_orbit_key(orbit_part)?;
            if sd != td + 1 {
                return Err(Error::Json(format!(
                    "map key '{key}' must go from a facet to the next dimension"
                )));
            }
            if ti >= c.n_orbits(td) {
                return Err(Error::UnknownOrbit { dim: td, id: ti });
            }
            if si >= c.n_orbits(sd) {
                return Err(Error::UnknownOrbit { dim: sd, id: si });
            }
            let m = matrix_from_entries(f.stalks[sd][si], f.stalks[td][ti], data)?;
            let mut hit = false;
            for (p, facet) in c.orbit(sd, si)?.facets.iter().enumerate() {
                let Some((fo, _)) = facet else { continue };
                if *fo == ti && pos.is_none_or(|want| want == p) {
                    f.cores[sd][si][p] = m.clone();
                    hit = true;
                }
            }
            if !hit {
                return Err(Error::Json(format!("map key '{key}' matches no incidence")));
            }
        }
    }
    Ok(f)
}

pub fn sheaf_to_json(f: &ConstructibleSheaf) -> SheafJson {
    let mut stalks = BTreeMap::new();
    for (d, level) in f.stalks.iter().enumerate() {
        for (i, &n) in level.iter().enumerate() {
            if n > 0 {
                stalks.insert(format!("{d}:{i}"), n);
            }
        }
    }
    SheafJson { stalks, maps: BTreeMap::new(), real: f.real }
}

/// Serializes a sheaf with its maps listed per incidence position, keyed
/// "dim:orbit#position" on the simplex side. Lossless for any base.
pub fn sheaf_to_json_positions(c: &GammaComplex, f: &ConstructibleSheaf) -> SheafJson {
    let mut out = sheaf_to_json(f);
    for dim in 1..f.shape.len() {
        for orbit in 0..f.shape[dim] {
            for (pos, m) in f.cores[dim][orbit].iter().enumerate() {
                if m.rows == 0 || m.cols == 0 || m.is_zero() {
                    continue;
                }
                let Some((fo, _)) = &c.orbits_in(dim)[orbit].facets[pos] else {
                    continue;
                };
                out.maps.insert(
                    format!("{}:{}->{dim}:{orbit}#{pos}", dim - 1, fo),
                    matrix_to_entries(m),
                );
            }
        }
    }
    out
}

pub fn sheaf_complex_to_json(c: &GammaComplex, k: &SheafComplex) -> SheafComplexJson {
    let sheaves = k.sheaves.iter().map(|f| sheaf_to_json_positions(c, f)).collect();
    let maps = k
        .maps
        .iter()
        .map(|phi| {
            let mut m = BTreeMap::new();
            for (d, level) in phi.iter().enumerate() {
                for (i, mat) in level.iter().enumerate() {
                    if mat.rows == 0 || mat.cols == 0 || mat.is_zero() {
                        continue;
                    }
                    m.insert(format!("{d}:{i}"), matrix_to_entries(mat));
                }
            }
            m
        })
        .collect();
    SheafComplexJson { lo: k.lo, sheaves, maps }
}

pub fn sheaf_complex_from_json(c: &GammaComplex, kj: &SheafComplexJson) -> Result<SheafComplex> {
    let mut sheaves = Vec::with_capacity(kj.sheaves.len());
    for sj in &kj.sheaves {
        let f = sheaf_from_json(c, sj)?;
        validate_sheaf(c, &f)?;
        sheaves.push(f);
    }
    if kj.maps.len() + 1 != kj.sheaves.len() && !(kj.sheaves.is_empty() && kj.maps.is_empty()) {
        return Err(Error::Json("one morphism is needed between consecutive terms".into()));
    }
    let mut maps = Vec::with_capacity(kj.maps.len());
    for (t, mj) in kj.maps.iter().enumerate() {
        let from = &sheaves[t];
        let to = &sheaves[t + 1];
        let mut phi: SheafMorphism = from
            .stalks
            .iter()
            .zip(&to.stalks)
            .map(|(fl, tl)| {
                fl.iter().zip(tl).map(|(&a, &b)| QMat::zeros(b, a)).collect::<Vec<_>>()
            })
            .collect();
        for (key, data) in mj {
            let (d, i) = parse_orbit_key(key)?;
            if i >= c.n_orbits(d) {
                return Err(Error::UnknownOrbit { dim: d, id: i });
            }
            phi[d][i] = matrix_from_entries(to.stalks[d][i], from.stalks[d][i], data)?;
        }
        maps.push(phi);
    }
    Ok(SheafComplex { lo: kj.lo, sheaves, maps })
}

/// A complex of sheaves together with its base, self contained for reuse as
/// input elsewhere.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SheafComplexFileJson {
    pub schema_version: u32,
    pub complex: ComplexJson,
    pub terms: SheafComplexJson,
}

pub fn sheaf_complex_file(c: &GammaComplex, k: &SheafComplex) -> SheafComplexFileJson {
    SheafComplexFileJson {
        schema_version: SCHEMA_VERSION,
        complex: complex_to_json(c),
        terms: sheaf_complex_to_json(c, k),
    }
}

pub fn load_sheaf_complex_file(
    fj: &SheafComplexFileJson,
) -> Result<(GammaComplex, SheafComplex)> {
    let c = complex_from_json(&fj.complex)?;
    let k = sheaf_complex_from_json(&c, &fj.terms)?;
    Ok((c, k))
}

fn rational_string(r: &num::BigRational) -> String {
    format_rational(r)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermEntryJson {
    pub g: EltJson,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffEntryJson {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<TermEntryJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffJson {
    pub from_degree: i64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<DiffEntryJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexExportJson {
    pub schema_version: u32,
    pub lo: i64,
    pub ranks: Vec<usize>,
    pub labels: Vec<Vec<String>>,
    pub differentials: Vec<DiffJson>,
}

/// Exports a free module complex with sparse differentials; each matrix
/// entry lists its group ring terms explicitly.
pub fn complex_export_to_json(k: &GroupRingComplex) -> ComplexExportJson {
    let differentials = k
        .diffs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut entries = Vec::new();
            for r in 0..d.rows {
                for c in 0..d.cols {
                    let a = d.get(r, c);
                    if a.is_zero() {
                        continue;
                    }
                    let terms = a
                        .support()
                        .map(|(g, s)| TermEntryJson {
                            g: elt_to_json(g),
                            re: format_rational(s.re()),
                            im: format_rational(s.im()),
                        })
                        .collect();
                    entries.push(DiffEntryJson { row: r, col: c, terms });
                }
            }
            DiffJson { from_degree: k.lo + i as i64, rows: d.rows, cols: d.cols, entries }
        })
        .collect();
    ComplexExportJson {
        schema_version: SCHEMA_VERSION,
        lo: k.lo,
        ranks: k.ranks.clone(),
        labels: k.labels.clone(),
        differentials,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeJson {
    pub degree: i64,
    pub rank: usize,
    pub diff_rank: String,
    pub betti: String,
    pub method: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportJson {
    pub schema_version: u32,
    pub degrees: Vec<DegreeJson>,
    pub euler: String,
    pub subdivided: bool,
}

pub fn report_to_json(r: &L2Report) -> ReportJson {
    ReportJson {
        schema_version: SCHEMA_VERSION,
        degrees: r
            .degrees
            .iter()
            .map(|d| DegreeJson {
                degree: d.degree,
                rank: d.rank,
                diff_rank: rational_string(&d.diff_rank),
                betti: rational_string(&d.betti),
                method: d.method.as_str().to_string(),
            })
            .collect(),
        euler: rational_string(&r.euler),
        subdivided: r.subdivided,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtiyahJson {
    pub schema_version: u32,
    pub euler_l2: String,
    pub euler_quotient: String,
    pub equal: bool,
    pub l2: ReportJson,
    pub quotient: ReportJson,
}

pub fn atiyah_to_json(a: &AtiyahReport) -> AtiyahJson {
    AtiyahJson {
        schema_version: SCHEMA_VERSION,
        euler_l2: rational_string(&a.euler_l2),
        euler_quotient: rational_string(&a.euler_quotient),
        equal: a.equal,
        l2: report_to_json(&a.l2),
        quotient: report_to_json(&a.quotient),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityRowJson {
    pub degree: i64,
    pub forward: String,
    pub dual: String,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityJson {
    pub schema_version: u32,
    pub rows: Vec<DualityRowJson>,
    pub all_equal: bool,
}

pub fn duality_to_json(r: &DualityReport) -> DualityJson {
    DualityJson {
        schema_version: SCHEMA_VERSION,
        rows: r
            .rows
            .iter()
            .map(|row| DualityRowJson {
                degree: row.degree,
                forward: rational_string(&row.forward),
                dual: rational_string(&row.dual),
                equal: row.equal,
            })
            .collect(),
        all_equal: r.all_equal,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NsJson {
    pub schema_version: u32,
    pub degree: i64,
    pub outcome: String,
    pub slope: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub points: usize,
}

pub fn ns_to_json(degree: i64, o: &NsOutcome) -> NsJson {
    match o {
        NsOutcome::Slope { slope, window, points } => NsJson {
            schema_version: SCHEMA_VERSION,
            degree,
            outcome: "slope".into(),
            slope: Some(*slope),
            window: Some(*window),
            points: *points,
        },
        NsOutcome::Gap => NsJson {
            schema_version: SCHEMA_VERSION,
            degree,
            outcome: "gap".into(),
            slope: None,
            window: None,
            points: 0,
        },
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncationJson {
    pub schema_version: u32,
    pub lambda: f64,
    pub homotopy_residual: f64,
    pub commutator_residual: f64,
    pub ok: bool,
}

pub fn truncation_to_json(t: &TruncationReport) -> TruncationJson {
    TruncationJson {
        schema_version: SCHEMA_VERSION,
        lambda: t.lambda,
        homotopy_residual: t.homotopy_residual,
        commutator_residual: t.commutator_residual,
        ok: t.ok,
    }
}

pub fn instance_to_string(inst: &InstanceJson) -> String {
    serde_json::to_string_pretty(inst).expect("instance serializes")
}

pub fn parse_instance(text: &str) -> Result<InstanceJson> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

/// The instance as (complex, sheaf), with a missing sheaf defaulting to the
/// rank one constant sheaf.
pub fn load_instance(inst: &InstanceJson) -> Result<(GammaComplex, ConstructibleSheaf)> {
    let c = complex_from_json(&inst.complex)?;
    let f = match &inst.sheaf {
        Some(sj) => sheaf_from_json(&c, sj)?,
        None => crate::sheaf::constant_sheaf(&c, 1),
    };
    Ok((c, f))
}
