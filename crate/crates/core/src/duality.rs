//! The dual of a constructible sheaf as an explicit complex of sheaves.
//!
//! Degree -i collects, over the dimension i orbits, the constant sheaf on the
//! closed simplex tensored with the dual stalk. A stalk of such a term lists
//! the simplex translates whose closure contains the point, so orbit stalks
//! are indexed by slots (orbit, group element). The boundary transposes the
//! corestrictions and reuses the global orientation signs.

use crate::chain::{build_cochain, build_cosheaf_chain, GroupRingComplex};
use crate::complex::GammaComplex;
use crate::error::{Error, Result};
use crate::group::Elt;
use crate::group_ring::{GroupRingElement, GroupRingMatrix};
use crate::l2::{l2_of_complex, totalize, L2Report};
use crate::qmat::QMat;
use crate::sheaf::{
    dual_cosheaf, subdivision_pullback, validate_sheaf, ConstructibleSheaf, SheafComplex,
    SheafMorphism,
};
use crate::vn::{Mode, DEFAULT_SEED};
use num::BigRational;

/// slots[dim][orbit] = the (simplex orbit, translate) pairs of a fixed
/// dimension whose closed translate contains the orbit representative.
pub type SlotTable = Vec<Vec<Vec<(usize, Elt)>>>;

#[derive(Clone, Debug)]
pub struct DualBuild {
    /// The separated base everything is built on.
    pub base: GammaComplex,
    /// The input sheaf, transported to that base if subdivision happened.
    pub sheaf: ConstructibleSheaf,
    /// The dual, in degrees -dim ..= 0.
    pub dual: SheafComplex,
    pub subdivided: bool,
    /// slot_tables[i] lays out the degree -i term.
    pub slot_tables: Vec<SlotTable>,
}

/// Builds the dual complex of sheaves. Non separated bases are subdivided
/// first, with the sheaf transported along.
pub fn verdier_dual(c: &GammaComplex, f: &ConstructibleSheaf) -> Result<DualBuild> {
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidInput(format!(
            "complex has violations, first is {}",
            violations[0]
        )));
    }
    c.require_free()?;
    validate_sheaf(c, f)?;
    let (base, sheaf, subdivided) = if c.separated() {
        (c.clone(), f.clone(), false)
    } else {
        let (sub, map) = c.barycentric_subdivision()?;
        let pulled = subdivision_pullback(c, f, &sub, &map)?;
        (sub, pulled, true)
    };
    let dim = base.max_dim();
    let stars: Vec<Vec<Vec<(usize, usize, Elt)>>> = (0..=dim)
        .map(|d| {
            (0..base.n_orbits(d))
                .map(|w| base.star(d, w))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let slot_tables: Vec<SlotTable> = (0..=dim)
        .map(|i| {
            (0..=dim)
                .map(|d| {
                    (0..base.n_orbits(d))
                        .map(|w| {
                            stars[d][w]
                                .iter()
                                .filter(|(k, _, _)| *k == i)
                                .map(|(_, j, g)| (*j, g.clone()))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let ord = base.order_and_sign()?;
    let mut sheaves = Vec::with_capacity(dim + 1);
    let mut maps = Vec::with_capacity(dim);
    for idx in 0..=dim {
        let i = dim - idx;
        sheaves.push(dual_term(&base, &sheaf, &slot_tables[i], i));
        if idx > 0 {
            let prev_i = i + 1;
            maps.push(boundary_morphism(
                &base,
                &sheaf,
                &ord.signs,
                &slot_tables[prev_i],
                &slot_tables[i],
                prev_i,
            ));
        }
    }
    let dual = SheafComplex { lo: -(dim as i64), sheaves, maps };
    Ok(DualBuild { base, sheaf, dual, subdivided, slot_tables })
}

/// The dual of the rank one constant sheaf.
pub fn dualizing_complex(c: &GammaComplex) -> Result<DualBuild> {
    let f = crate::sheaf::constant_sheaf(c, 1);
    verdier_dual(c, &f)
}

fn slot_sizes(f: &ConstructibleSheaf, i: usize, slots: &[(usize, Elt)]) -> Vec<usize> {
    slots.iter().map(|(j, _)| f.stalks[i][*j]).collect()
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    for &s in sizes {
        out.push(acc);
        acc += s;
    }
    out.push(acc);
    out
}

/// The degree -i term: stalk at an orbit is one dual stalk copy per slot;
/// corestrictions translate slots and are identity or zero blockwise.
fn dual_term(
    base: &GammaComplex,
    f: &ConstructibleSheaf,
    table: &SlotTable,
    i: usize,
) -> ConstructibleSheaf {
    let dim = base.max_dim();
    let shape: Vec<usize> = (0..=dim).map(|k| base.n_orbits(k)).collect();
    let stalks: Vec<Vec<usize>> = (0..=dim)
        .map(|d| {
            (0..shape[d])
                .map(|w| slot_sizes(f, i, &table[d][w]).iter().sum())
                .collect()
        })
        .collect();
    let mut cores: Vec<Vec<Vec<QMat>>> = Vec::with_capacity(dim + 1);
    for d in 0..=dim {
        let mut level = Vec::with_capacity(shape[d]);
        for w in 0..shape[d] {
            if d == 0 {
                level.push(Vec::new());
                continue;
            }
            let tgt_sizes = slot_sizes(f, i, &table[d][w]);
            let tgt_off = offsets(&tgt_sizes);
            let mut mats = Vec::with_capacity(d + 1);
            for facet in &base.orbits_in(d)[w].facets {
                let (fo, g_nu) = facet.clone().expect("validated complex");
                let src_slots = &table[d - 1][fo];
                let src_sizes = slot_sizes(f, i, src_slots);
                let src_off = offsets(&src_sizes);
                let mut m = QMat::zeros(stalks[d][w], stalks[d - 1][fo]);
                for (s_idx, (j, h)) in src_slots.iter().enumerate() {
                    let moved = (*j, base.group.mul(&g_nu, h));
                    if let Some(t_idx) =
                        table[d][w].iter().position(|s| s.0 == moved.0 && s.1 == moved.1)
                    {
                        let n = f.stalks[i][*j];
                        for b in 0..n {
                            m.set(
                                tgt_off[t_idx] + b,
                                src_off[s_idx] + b,
                                crate::scalar::Scalar::one(),
                            );
                        }
                    }
                }
                mats.push(m);
            }
            level.push(mats);
        }
        cores.push(level);
    }
    ConstructibleSheaf { shape, stalks, cores, real: f.real }
}

/// The sheaf morphism from the degree -i term to the degree -(i-1) term:
/// per slot, signed transposed corestrictions onto the facet slots.
fn boundary_morphism(
    base: &GammaComplex,
    f: &ConstructibleSheaf,
    signs: &[Vec<Vec<i8>>],
    src_table: &SlotTable,
    tgt_table: &SlotTable,
    i: usize,
) -> SheafMorphism {
    let dim = base.max_dim();
    let mut phi = Vec::with_capacity(dim + 1);
    for d in 0..=dim {
        let mut level = Vec::with_capacity(base.n_orbits(d));
        for w in 0..base.n_orbits(d) {
            let src_slots = &src_table[d][w];
            let tgt_slots = &tgt_table[d][w];
            let src_off = offsets(&slot_sizes(f, i, src_slots));
            let tgt_off = offsets(&slot_sizes(f, i - 1, tgt_slots));
            let mut m = QMat::zeros(*tgt_off.last().unwrap(), *src_off.last().unwrap());
            for (s_idx, (j, g)) in src_slots.iter().enumerate() {
                for (nu, facet) in base.orbits_in(i)[*j].facets.iter().enumerate() {
                    let (jp, h_nu) = facet.clone().expect("validated complex");
                    let moved = (jp, base.group.mul(g, &h_nu));
                    let Some(t_idx) = tgt_slots
                        .iter()
                        .position(|s| s.0 == moved.0 && s.1 == moved.1)
                    else {
                        continue;
                    };
                    let rho_t = f.cores[i][*j][nu].transpose();
                    let signed = if signs[i][*j][nu] < 0 { rho_t.neg() } else { rho_t };
                    for r in 0..signed.rows {
                        for cc in 0..signed.cols {
                            let v = signed.get(r, cc);
                            if !v.is_zero() {
                                let cur =
                                    m.get(tgt_off[t_idx] + r, src_off[s_idx] + cc).add(v);
                                m.set(tgt_off[t_idx] + r, src_off[s_idx] + cc, cur);
                            }
                        }
                    }
                }
            }
            level.push(m);
        }
        phi.push(level);
    }
    phi
}

/// One relation per mono column: the unit leading row, then the trailing
/// rows with the translates that solve the column to zero.
type Relation = (usize, Vec<(usize, Elt)>);

#[derive(Clone, Debug)]
pub struct MonoBuild {
    pub dual: DualBuild,
    /// Source: the chain complex of the dual cosheaf, degrees -dim ..= 0.
    pub chain: GroupRingComplex,
    /// Target: the totalized cochain complex of the dual, degrees -dim ..= dim.
    pub tot: GroupRingComplex,
    /// mono[idx] embeds chain degree lo + idx into the same total degree.
    pub mono: Vec<GroupRingMatrix>,
    /// The cokernel model on the non pivot rows.
    pub quotient: GroupRingComplex,
}

/// Embeds the dual cosheaf chain complex into the totalization of the dual:
/// a dimension i chain generator goes to the vertex slots of its own simplex,
/// one term per vertex of the representative. The quotient complex is
/// carried on the rows away from the leading vertex slots.
pub fn comparison_mono(c: &GammaComplex, f: &ConstructibleSheaf) -> Result<MonoBuild> {
    let dual = verdier_dual(c, f)?;
    let base = &dual.base;
    let fv = dual_cosheaf(&dual.sheaf);
    let chain = build_cosheaf_chain(base, &fv)?;
    let tot_build = totalize(base, &dual.dual)?;
    let tot = tot_build.complex;
    let dim = base.max_dim();
    let mut mono = Vec::with_capacity(dim + 1);
    let mut rels: Vec<Vec<Relation>> = Vec::new();
    for idx in 0..tot.ranks.len() {
        let degree = tot.lo + idx as i64;
        if degree > 0 {
            rels.push(Vec::new());
            continue;
        }
        let i = (-degree) as usize;
        let term_idx = dim - i;
        let comp = tot_build.comp_off[term_idx][0].expect("vertex component exists");
        let term = &dual.dual.sheaves[term_idx];
        let vert_off = offsets(&term.stalks[0]);
        let col_off = offsets(&fv.costalks[i]);
        let mut m = GroupRingMatrix::zero(tot.ranks[idx], chain.ranks[idx]);
        let mut level_rels = Vec::new();
        for (s, orb) in base.orbits_in(i).iter().enumerate() {
            let n = fv.costalks[i][s];
            for b in 0..n {
                let mut lead = 0usize;
                let mut tail: Vec<(usize, Elt)> = Vec::new();
                for (alpha, (v_orb, gamma)) in orb.rep.iter().enumerate() {
                    let ginv = base.group.inv(gamma);
                    let slots = &dual.slot_tables[i][0][*v_orb];
                    let slot_off = offsets(&slot_sizes(&dual.sheaf, i, slots));
                    let slot_idx = slots
                        .iter()
                        .position(|(j, g)| *j == s && *g == ginv)
                        .expect("own slot present at a vertex of the representative");
                    let row = comp + vert_off[*v_orb] + slot_off[slot_idx] + b;
                    m.add_to(row, col_off[s] + b, &GroupRingElement::from_elt(ginv.clone()));
                    if alpha == 0 {
                        lead = row;
                    } else {
                        // leading coordinate solved: x_lead picks up this row
                        // through the composite translate
                        let coef = base.group.mul(&ginv, &orb.rep[0].1);
                        tail.push((row, coef));
                    }
                }
                level_rels.push((lead, tail));
            }
        }
        rels.push(level_rels);
        mono.push(m);
    }
    let quotient = quotient_complex(base, &tot, &rels)?;
    Ok(MonoBuild { dual, chain, tot, mono, quotient })
}

/// The complement of the image: each relation solves its unit leading row in
/// terms of the trailing ones, and the differential is pushed down to the
/// remaining rows.
fn quotient_complex(
    base: &GammaComplex,
    tot: &GroupRingComplex,
    rels: &[Vec<Relation>],
) -> Result<GroupRingComplex> {
    let mut projs = Vec::with_capacity(tot.ranks.len());
    let mut embs = Vec::with_capacity(tot.ranks.len());
    for idx in 0..tot.ranks.len() {
        let n = tot.ranks[idx];
        let mut is_pivot = vec![false; n];
        for (lead, _) in &rels[idx] {
            is_pivot[*lead] = true;
        }
        let keep: Vec<usize> = (0..n).filter(|r| !is_pivot[*r]).collect();
        let mut pos_of = vec![usize::MAX; n];
        for (p, &r) in keep.iter().enumerate() {
            pos_of[r] = p;
        }
        let mut p = GroupRingMatrix::zero(keep.len(), n);
        let mut e = GroupRingMatrix::zero(n, keep.len());
        let one = GroupRingElement::one(&base.group);
        for (pp, &r) in keep.iter().enumerate() {
            p.add_to(pp, r, &one);
            e.add_to(r, pp, &one);
        }
        for (lead, tail) in &rels[idx] {
            for (row, coef) in tail {
                let entry = GroupRingElement::from_elt(coef.clone()).neg();
                p.add_to(pos_of[*row], *lead, &entry);
            }
        }
        projs.push(p);
        embs.push(e);
    }
    let ranks: Vec<usize> = projs.iter().map(|p| p.rows).collect();
    let mut diffs = Vec::with_capacity(tot.diffs.len());
    for idx in 0..tot.diffs.len() {
        let d = projs[idx + 1]
            .mul(&tot.diffs[idx], &base.group)?
            .mul(&embs[idx], &base.group)?;
        diffs.push(d);
    }
    let labels = (0..ranks.len())
        .map(|i| vec![format!("coker:{}", tot.lo + i as i64)])
        .collect();
    let q = GroupRingComplex { lo: tot.lo, ranks, diffs, labels };
    q.check_composition(&base.group)?;
    Ok(q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityRow {
    pub degree: i64,
    pub forward: BigRational,
    pub dual: BigRational,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub rows: Vec<DualityRow>,
    pub all_equal: bool,
    pub forward: L2Report,
    pub dual_hyper: L2Report,
}

/// Tabulates b_i of the sheaf against b_{-i} of its dual.
pub fn duality_check(c: &GammaComplex, f: &ConstructibleSheaf, mode: Mode) -> Result<DualityReport> {
    duality_check_seeded(c, f, mode, DEFAULT_SEED)
}

pub fn duality_check_seeded(
    c: &GammaComplex,
    f: &ConstructibleSheaf,
    mode: Mode,
    seed: u64,
) -> Result<DualityReport> {
    let b = build_cochain(c, f)?;
    let mut forward = l2_of_complex(&b.complex, &b.base.group, mode, seed)?;
    forward.subdivided = b.subdivided;
    let dual = verdier_dual(&b.base, &b.sheaf)?;
    let tot = totalize(&dual.base, &dual.dual)?;
    let dual_hyper = l2_of_complex(&tot.complex, &dual.base.group, mode, seed)?;
    let zero = BigRational::from_integer(0.into());
    let mut rows = Vec::new();
    let mut all_equal = true;
    for i in 0..=b.base.max_dim() as i64 {
        let fwd = forward.betti(i).cloned().unwrap_or_else(|| zero.clone());
        let dl = dual_hyper.betti(-i).cloned().unwrap_or_else(|| zero.clone());
        let equal = fwd == dl;
        all_equal &= equal;
        rows.push(DualityRow { degree: i, forward: fwd, dual: dl, equal });
    }
    Ok(DualityReport { rows, all_equal, forward, dual_hyper })
}

/// The dual of a complex of sheaves: dualize every term and totalize with
/// the transposed morphisms, twisting by the internal degree parity.
pub fn double_dual(c: &GammaComplex, k: &SheafComplex) -> Result<(GammaComplex, SheafComplex)> {
    if !c.separated() {
        return Err(Error::NotSeparated);
    }
    let dim = c.max_dim();
    let terms = k.sheaves.len();
    if terms == 0 {
        return Ok((c.clone(), SheafComplex { lo: 0, sheaves: vec![], maps: vec![] }));
    }
    let duals: Vec<DualBuild> = k
        .sheaves
        .iter()
        .map(|f| verdier_dual(c, f))
        .collect::<Result<_>>()?;
    // total degree n = -q_rel - i + (-k.lo) shifted: q runs over term index,
    // actual degree q_abs = k.lo + q; component (q, i) sits in -(q_abs + i)
    let lo = -(k.lo + (terms - 1) as i64 + dim as i64);
    let hi = -k.lo;
    let span = (hi - lo + 1) as usize;
    // collect components per total degree, ordered by term index
    let mut comps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); span];
    for q in 0..terms {
        for i in 0..=dim {
            let n = -(k.lo + q as i64 + i as i64);
            comps[(n - lo) as usize].push((q, i));
        }
    }
    let mut sheaves = Vec::with_capacity(span);
    for n in 0..span {
        let mut acc: Option<ConstructibleSheaf> = None;
        for &(q, i) in &comps[n] {
            let term = &duals[q].dual.sheaves[dim - i];
            acc = Some(match acc {
                None => term.clone(),
                Some(a) => crate::sheaf::direct_sum(&a, term)?,
            });
        }
        sheaves.push(acc.expect("every degree in range has a component"));
    }
    let mut maps = Vec::with_capacity(span.saturating_sub(1));
    for n in 0..span.saturating_sub(1) {
        let src = &comps[n];
        let tgt = &comps[n + 1];
        let mut phi: SheafMorphism = Vec::with_capacity(dim + 1);
        for d in 0..=dim {
            let mut level = Vec::with_capacity(c.n_orbits(d));
            for w in 0..c.n_orbits(d) {
                let src_sizes: Vec<usize> =
                    src.iter().map(|&(q, i)| duals[q].dual.sheaves[dim - i].stalks[d][w]).collect();
                let tgt_sizes: Vec<usize> =
                    tgt.iter().map(|&(q, i)| duals[q].dual.sheaves[dim - i].stalks[d][w]).collect();
                let so = offsets(&src_sizes);
                let to = offsets(&tgt_sizes);
                let mut m = QMat::zeros(*to.last().unwrap(), *so.last().unwrap());
                for (sc, &(q, i)) in src.iter().enumerate() {
                    // internal boundary: (q, i) -> (q, i - 1)
                    if i > 0 {
                        if let Some(tc) = tgt.iter().position(|&t| t == (q, i - 1)) {
                            let term_idx = dim - i;
                            let block = &duals[q].dual.maps[term_idx][d][w];
                            m.set_block(to[tc], so[sc], block);
                        }
                    }
                    // transposed morphism: (q, i) -> (q - 1, i), sign (-1)^i
                    if q > 0 {
                        if let Some(tc) = tgt.iter().position(|&t| t == (q - 1, i)) {
                            let block = dual_of_morphism(
                                &duals[q],
                                &duals[q - 1],
                                &k.maps[q - 1],
                                i,
                                d,
                                w,
                            );
                            let block = if i % 2 == 1 { block.neg() } else { block };
                            m.set_block(to[tc], so[sc], &block);
                        }
                    }
                }
                level.push(m);
            }
            phi.push(level);
        }
        maps.push(phi);
    }
    Ok((c.clone(), SheafComplex { lo, sheaves, maps }))
}

/// The slotwise transpose of a morphism between the degree -i dual terms:
/// slots agree, blocks are the transposed stalk maps.
fn dual_of_morphism(
    from: &DualBuild,
    to: &DualBuild,
    phi: &SheafMorphism,
    i: usize,
    d: usize,
    w: usize,
) -> QMat {
    let slots = &from.slot_tables[i][d][w];
    debug_assert_eq!(slots.len(), to.slot_tables[i][d][w].len());
    let src_off = offsets(&slot_sizes(&from.sheaf, i, slots));
    let tgt_off = offsets(&slot_sizes(&to.sheaf, i, slots));
    let mut m = QMat::zeros(*tgt_off.last().unwrap(), *src_off.last().unwrap());
    for (s_idx, (j, _)) in slots.iter().enumerate() {
        let block = phi[i][*j].transpose();
        m.set_block(tgt_off[s_idx], src_off[s_idx], &block);
    }
    m
}
