//! Cochain and chain complexes of free modules over the group ring.
//!
//! Basis vectors are stalk coordinates of orbit representatives; orientation
//! signs come from the separated vertex ordering. Complexes built here always
//! satisfy the composition law, enforced by an assertion.

use crate::complex::GammaComplex;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::group_ring::{GroupRingElement, GroupRingMatrix};
use crate::sheaf::{subdivision_pullback, validate_sheaf, ConstructibleSheaf, Cosheaf};

/// A bounded complex of finitely generated free modules, with differentials
/// raising degree by one.
#[derive(Clone, Debug)]
pub struct GroupRingComplex {
    /// Degree of the first term.
    pub lo: i64,
    /// ranks[i] is the rank in degree lo + i.
    pub ranks: Vec<usize>,
    /// diffs[i] maps degree lo + i to lo + i + 1, one fewer than terms.
    pub diffs: Vec<GroupRingMatrix>,
    /// Basis labels per degree, "dim:orbit:coordinate".
    pub labels: Vec<Vec<String>>,
}

impl GroupRingComplex {
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn rank_at(&self, k: i64) -> usize {
        if k < self.lo {
            return 0;
        }
        self.ranks.get((k - self.lo) as usize).copied().unwrap_or(0)
    }

    /// The differential leaving degree k, when both endpoints are in range.
    pub fn diff_at(&self, k: i64) -> Option<&GroupRingMatrix> {
        if k < self.lo {
            return None;
        }
        self.diffs.get((k - self.lo) as usize)
    }

    pub fn check_composition(&self, group: &GroupSpec) -> Result<()> {
        for i in 0..self.diffs.len().saturating_sub(1) {
            if !self.diffs[i + 1].mul(&self.diffs[i], group)?.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "differential composition is nonzero leaving degree {}",
                    self.lo + i as i64
                )));
            }
        }
        Ok(())
    }

    /// The degree k combinatorial Laplacian, a self adjoint square matrix.
    pub fn laplacian(&self, k: i64, group: &GroupSpec) -> Result<GroupRingMatrix> {
        if k < self.lo || k > self.hi() {
            return Err(Error::InvalidInput(format!(
                "degree {k} outside [{}, {}]",
                self.lo,
                self.hi()
            )));
        }
        let n = self.rank_at(k);
        let mut acc = GroupRingMatrix::zero(n, n);
        if let Some(d) = self.diff_at(k) {
            acc = acc.add(&d.adjoint(group).mul(d, group)?)?;
        }
        if k > self.lo {
            if let Some(d) = self.diff_at(k - 1) {
                acc = acc.add(&d.mul(&d.adjoint(group), group)?)?;
            }
        }
        Ok(acc)
    }
}

fn offsets(stalks: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(stalks.len() + 1);
    let mut acc = 0;
    for &s in stalks {
        out.push(acc);
        acc += s;
    }
    out.push(acc);
    out
}

fn labels_for(stalks: &[Vec<usize>]) -> Vec<Vec<String>> {
    stalks
        .iter()
        .enumerate()
        .map(|(dim, level)| {
            let mut l = Vec::new();
            for (orbit, &n) in level.iter().enumerate() {
                for b in 0..n {
                    l.push(format!("{dim}:{orbit}:{b}"));
                }
            }
            l
        })
        .collect()
}

/// The outcome of assembling a complex, carrying the separated model that was
/// actually used so callers can keep working on it.
#[derive(Clone, Debug)]
pub struct CochainBuild {
    pub complex: GroupRingComplex,
    /// True when the base had to be subdivided to separate vertex orbits.
    pub subdivided: bool,
    /// The separated base the complex was built on.
    pub base: GammaComplex,
    /// The sheaf on that base, transported if subdivision happened.
    pub sheaf: ConstructibleSheaf,
}

/// Builds the equivariant cochain complex of a sheaf in degrees 0..=dim.
/// Non separated bases are barycentrically subdivided first and the sheaf is
/// transported along; the refined model is returned with the complex.
pub fn build_cochain(c: &GammaComplex, f: &ConstructibleSheaf) -> Result<CochainBuild> {
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
        debug_assert!(sub.separated());
        (sub, pulled, true)
    };
    let complex = assemble_cochain(&base, &sheaf)?;
    Ok(CochainBuild { complex, subdivided, base, sheaf })
}

fn assemble_cochain(base: &GammaComplex, f: &ConstructibleSheaf) -> Result<GroupRingComplex> {
    let ord = base.order_and_sign()?;
    let dim = base.max_dim();
    let ranks: Vec<usize> = (0..=dim).map(|k| f.total_stalk(k)).collect();
    let mut diffs = Vec::with_capacity(dim);
    for p in 0..dim {
        let row_off = offsets(&f.stalks[p + 1]);
        let col_off = offsets(&f.stalks[p]);
        let mut d = GroupRingMatrix::zero(ranks[p + 1], ranks[p]);
        for (s, orb) in base.orbits_in(p + 1).iter().enumerate() {
            for (nu, facet) in orb.facets.iter().enumerate() {
                let (fo, g) = facet.clone().expect("validated complex");
                let sign = ord.signs[p + 1][s][nu];
                let rho = &f.cores[p + 1][s][nu];
                for r in 0..rho.rows {
                    for col in 0..rho.cols {
                        let mut coef = rho.get(r, col).clone();
                        if coef.is_zero() {
                            continue;
                        }
                        if sign < 0 {
                            coef = coef.neg();
                        }
                        let term = GroupRingElement::term(g.clone(), coef);
                        d.add_to(row_off[s] + r, col_off[fo] + col, &term);
                    }
                }
            }
        }
        diffs.push(d);
    }
    let complex = GroupRingComplex { lo: 0, ranks, diffs, labels: labels_for(&f.stalks) };
    complex.check_composition(&base.group)?;
    Ok(complex)
}

/// Builds the equivariant chain complex of a cosheaf in degrees -dim..=0,
/// whose degree -p term collects the dim p costalks. The base must already
/// be separated; subdivision is the sheaf side's job.
pub fn build_cosheaf_chain(c: &GammaComplex, fv: &Cosheaf) -> Result<GroupRingComplex> {
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidInput(format!(
            "complex has violations, first is {}",
            violations[0]
        )));
    }
    c.require_free()?;
    if !c.separated() {
        return Err(Error::NotSeparated);
    }
    validate_sheaf(c, &fv.dual_sheaf())?;
    let ord = c.order_and_sign()?;
    let dim = c.max_dim();
    // index i holds dimension dim - i, so degree lo + i = -(dim - i)
    let ranks: Vec<usize> = (0..=dim).map(|i| fv.total_costalk(dim - i)).collect();
    let mut diffs = Vec::with_capacity(dim);
    for i in 0..dim {
        let p = dim - i;
        let row_off = offsets(&fv.costalks[p - 1]);
        let col_off = offsets(&fv.costalks[p]);
        let mut d = GroupRingMatrix::zero(ranks[i + 1], ranks[i]);
        for (s, orb) in c.orbits_in(p).iter().enumerate() {
            for (nu, facet) in orb.facets.iter().enumerate() {
                let (fo, g) = facet.clone().expect("validated complex");
                let ginv = c.group.inv(&g);
                let sign = ord.signs[p][s][nu];
                let ext = &fv.exts[p][s][nu];
                for r in 0..ext.rows {
                    for col in 0..ext.cols {
                        let mut coef = ext.get(r, col).clone();
                        if coef.is_zero() {
                            continue;
                        }
                        if sign < 0 {
                            coef = coef.neg();
                        }
                        let term = GroupRingElement::term(ginv.clone(), coef);
                        d.add_to(row_off[fo] + r, col_off[s] + col, &term);
                    }
                }
            }
        }
        diffs.push(d);
    }
    let mut labels = labels_for(&fv.costalks);
    labels.reverse();
    let complex = GroupRingComplex { lo: -(dim as i64), ranks, diffs, labels };
    complex.check_composition(&c.group)?;
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;
    use crate::group::Elt;
    use crate::scalar::Scalar;
    use crate::sheaf::{constant_sheaf, dual_cosheaf, skyscraper};

    fn elem(g: Elt, n: i64) -> GroupRingElement {
        GroupRingElement::term(g, Scalar::from_int(n))
    }

    #[test]
    fn circle_forces_subdivision() {
        let c = circle();
        let b = build_cochain(&c, &constant_sheaf(&c, 1)).unwrap();
        assert!(b.subdivided);
        assert_eq!(b.complex.ranks, vec![2, 2]);
        let t_inv = Elt::Vector(vec![-1]);
        let e = Elt::Vector(vec![0]);
        let mut want = GroupRingMatrix::zero(2, 2);
        want.set(0, 0, elem(e.clone(), -1));
        want.set(0, 1, elem(e.clone(), 1));
        want.set(1, 0, elem(t_inv, -1));
        want.set(1, 1, elem(e, 1));
        assert_eq!(b.complex.diffs[0], want);
    }

    #[test]
    fn hexagon_differential_is_frozen() {
        let c = hexagon_z2();
        let b = build_cochain(&c, &constant_sheaf(&c, 1)).unwrap();
        assert!(!b.subdivided);
        assert_eq!(b.complex.ranks, vec![3, 3]);
        let e = Elt::Finite(0);
        let t = Elt::Finite(1);
        let mut want = GroupRingMatrix::zero(3, 3);
        want.set(0, 0, elem(e.clone(), -1));
        want.set(0, 1, elem(e.clone(), 1));
        want.set(1, 1, elem(e.clone(), -1));
        want.set(1, 2, elem(e.clone(), 1));
        want.set(2, 0, elem(e, -1));
        want.set(2, 2, elem(t, 1));
        assert_eq!(b.complex.diffs[0], want);
    }

    #[test]
    fn octahedron_top_differential_is_frozen() {
        let c = octahedron_z2();
        let b = build_cochain(&c, &constant_sheaf(&c, 1)).unwrap();
        assert_eq!(b.complex.ranks, vec![3, 6, 4]);
        let e = Elt::Finite(0);
        let t = Elt::Finite(1);
        let rows: [[(usize, Elt, i64); 3]; 4] = [
            [(0, e.clone(), 1), (2, e.clone(), -1), (4, e.clone(), 1)],
            [(0, e.clone(), 1), (3, e.clone(), -1), (5, e.clone(), 1)],
            [(1, e.clone(), 1), (2, e.clone(), -1), (5, t.clone(), 1)],
            [(1, e.clone(), 1), (3, e.clone(), -1), (4, t.clone(), 1)],
        ];
        let mut want = GroupRingMatrix::zero(4, 6);
        for (r, entries) in rows.iter().enumerate() {
            for (col, g, v) in entries {
                want.set(r, *col, elem(g.clone(), *v));
            }
        }
        assert_eq!(b.complex.diffs[1], want);
        let lap = b.complex.laplacian(1, &c.group).unwrap();
        assert!(lap.is_self_adjoint(&c.group));
    }

    #[test]
    fn torus_subdivides_to_known_ranks() {
        let c = torus_grid();
        let b = build_cochain(&c, &constant_sheaf(&c, 1)).unwrap();
        assert!(b.subdivided);
        assert_eq!(b.complex.ranks, vec![6, 18, 12]);
        assert!(b.complex.check_composition(&c.group).is_ok());
    }

    #[test]
    fn chain_is_adjoint_of_cochain_for_real_constant() {
        let c = octahedron_z2();
        let f = constant_sheaf(&c, 2);
        let co = build_cochain(&c, &f).unwrap();
        let ch = build_cosheaf_chain(&c, &dual_cosheaf(&f)).unwrap();
        assert_eq!(ch.lo, -2);
        assert_eq!(ch.ranks, vec![8, 12, 6]);
        assert_eq!(ch.diffs[0], co.complex.diffs[1].adjoint(&c.group));
        assert_eq!(ch.diffs[1], co.complex.diffs[0].adjoint(&c.group));
    }

    #[test]
    fn cosheaf_chain_needs_separated_base() {
        let c = circle();
        let fv = dual_cosheaf(&constant_sheaf(&c, 1));
        assert!(matches!(build_cosheaf_chain(&c, &fv), Err(Error::NotSeparated)));
    }

    #[test]
    fn skyscraper_complex_is_concentrated() {
        let c = hexagon_z2();
        let f = skyscraper(&c, 0, 2).unwrap();
        let b = build_cochain(&c, &f).unwrap();
        assert_eq!(b.complex.ranks, vec![2, 0]);
        assert_eq!(b.complex.diffs[0].rows, 0);
    }

    #[test]
    fn quotient_complex_is_augmentation() {
        let c = hexagon_z2();
        let q = c.quotient_complex().unwrap();
        let bq = build_cochain(&q, &constant_sheaf(&q, 1)).unwrap();
        let b = build_cochain(&c, &constant_sheaf(&c, 1)).unwrap();
        assert_eq!(bq.complex.diffs[0].augmentation(), b.complex.diffs[0].augmentation());
        let oc = octahedron_z2();
        let qo = oc.quotient_complex().unwrap();
        let bqo = build_cochain(&qo, &constant_sheaf(&qo, 1)).unwrap();
        let bo = build_cochain(&oc, &constant_sheaf(&oc, 1)).unwrap();
        for i in 0..2 {
            assert_eq!(bqo.complex.diffs[i].augmentation(), bo.complex.diffs[i].augmentation());
        }
    }

    #[test]
    fn laplacian_rejects_out_of_range() {
        let c = hexagon_z2();
        let b = build_cochain(&c, &constant_sheaf(&c, 1)).unwrap();
        assert!(b.complex.laplacian(5, &c.group).is_err());
        assert!(b.complex.laplacian(-1, &c.group).is_err());
        assert!(b.complex.laplacian(0, &c.group).is_ok());
    }
}
