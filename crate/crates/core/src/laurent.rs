//! Laurent polynomials over Q(i) in d commuting variables, and the exact
//! generic rank of matrices over them.
//!
//! Generic rank here means the rank over the fraction field, equivalently the
//! rank of the evaluated matrix at any point outside a proper subvariety. For
//! group ring matrices over Z^d this equals the von Neumann rank.

use crate::error::{Error, Result};
use crate::group::Elt;
use crate::group_ring::{GroupRingElement, GroupRingMatrix};
use crate::qmat::QMat;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vectors are keys; zero coefficients are never stored. Keys all
/// share the ambient variable count.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LPoly {
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl LPoly {
    pub fn zero() -> Self {
        LPoly { terms: BTreeMap::new() }
    }

    pub fn one(d: usize) -> Self {
        Self::monomial(vec![0; d], Scalar::one())
    }

    pub fn monomial(exp: Vec<i64>, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LPoly { terms }
    }

    pub fn from_group_ring(a: &GroupRingElement, d: usize) -> Self {
        let mut out = Self::zero();
        for (g, c) in a.support() {
            let v = match g {
                Elt::Vector(v) => v.clone(),
                Elt::Finite(_) => panic!("finite group element has no Laurent image"),
            };
            assert_eq!(v.len(), d);
            out.insert_add(v, c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(&mut self, exp: Vec<i64>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_add(e, c1.mul(c2));
            }
        }
        out
    }

    /// Largest term in lexicographic exponent order.
    fn lead(&self) -> Option<(&Vec<i64>, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Componentwise minimum exponent over the support, for unit normalization.
    fn min_exponents(&self, d: usize) -> Vec<i64> {
        let mut m = vec![i64::MAX; d];
        for e in self.terms.keys() {
            for (mi, &ei) in m.iter_mut().zip(e) {
                *mi = (*mi).min(ei);
            }
        }
        m
    }

    fn shift(&self, by: &[i64]) -> Self {
        LPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Exact division, panicking if the quotient is not a polynomial. Both
    /// operands must have nonnegative exponents. Used by the fraction-free
    /// elimination, where exactness is guaranteed.
    fn div_exact(&self, den: &Self) -> Self {
        let (dlead_e, dlead_c) = den.lead().expect("division by zero polynomial");
        let dlead_inv = dlead_c.inverse().expect("lead coefficient is nonzero");
        let mut rem = self.clone();
        let mut q = LPoly::zero();
        while let Some((rlead_e, rlead_c)) = rem.lead() {
            let e: Vec<i64> = rlead_e.iter().zip(dlead_e).map(|(a, b)| a - b).collect();
            assert!(e.iter().all(|&x| x >= 0), "inexact polynomial division");
            let c = rlead_c.mul(&dlead_inv);
            let t = LPoly::monomial(e, c);
            rem = rem.sub(&t.mul(den));
            q = q.add(&t);
        }
        q
    }

    /// Cheap pivot preference: few terms first, then small coefficients.
    fn complexity(&self) -> (usize, u64) {
        let bits = self.terms.values().map(|c| c.complexity()).sum();
        (self.terms.len(), bits)
    }

    /// Evaluate at a point with invertible coordinates.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        let mut inv = Vec::with_capacity(point.len());
        for p in point {
            inv.push(p.inverse().ok_or_else(|| {
                Error::InvalidInput("evaluation point has a zero coordinate".into())
            })?);
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (j, &ej) in e.iter().enumerate() {
                let base = if ej >= 0 { &point[j] } else { &inv[j] };
                for _ in 0..ej.unsigned_abs() {
                    t = t.mul(base);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

impl fmt::Debug for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("({c})*z^{e:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Dense matrix over the Laurent ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LMat {
    pub rows: usize,
    pub cols: usize,
    pub vars: usize,
    entries: Vec<LPoly>,
}

impl LMat {
    pub fn zero(rows: usize, cols: usize, vars: usize) -> Self {
        LMat { rows, cols, vars, entries: vec![LPoly::zero(); rows * cols] }
    }

    pub fn from_group_ring_matrix(m: &GroupRingMatrix, vars: usize) -> Self {
        let mut out = Self::zero(m.rows, m.cols, vars);
        for r in 0..m.rows {
            for c in 0..m.cols {
                out.set(r, c, LPoly::from_group_ring(m.get(r, c), vars));
            }
        }
        out
    }

    pub fn get(&self, r: usize, c: usize) -> &LPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LPoly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<QMat> {
        if point.len() != self.vars {
            return Err(Error::Shape(format!(
                "point has {} coordinates, matrix has {} variables",
                point.len(),
                self.vars
            )));
        }
        let mut out = QMat::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).eval(point)?);
            }
        }
        Ok(out)
    }

    /// Exact generic rank by fraction-free elimination with full pivoting.
    /// Rows are first scaled by unit monomials so every entry is an honest
    /// polynomial, which makes the Bareiss divisions land in the ring.
    pub fn rank_generic(&self) -> usize {
        let mut m: Vec<Vec<LPoly>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).clone()).collect())
            .collect();
        for row in m.iter_mut() {
            let mut shift = vec![0i64; self.vars];
            let mut any = false;
            for e in row.iter() {
                if !e.is_zero() {
                    let me = e.min_exponents(self.vars);
                    for (s, &v) in shift.iter_mut().zip(&me) {
                        *s = if any { (*s).min(v) } else { v };
                    }
                    any = true;
                }
            }
            if any {
                let by: Vec<i64> = shift.iter().map(|&x| -x).collect();
                for e in row.iter_mut() {
                    *e = e.shift(&by);
                }
            }
        }
        let rows = self.rows;
        let cols = self.cols;
        let mut prev = LPoly::one(self.vars);
        let mut k = 0;
        while k < rows.min(cols) {
            let mut best: Option<(usize, usize, (usize, u64))> = None;
            for i in k..rows {
                for j in k..cols {
                    if !m[i][j].is_zero() {
                        let cx = m[i][j].complexity();
                        if best.as_ref().is_none_or(|&(_, _, bc)| cx < bc) {
                            best = Some((i, j, cx));
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = best else { break };
            m.swap(k, pi);
            if pj != k {
                for row in m.iter_mut() {
                    row.swap(k, pj);
                }
            }
            let pivot = m[k][k].clone();
            for i in (k + 1)..rows {
                for j in (k + 1)..cols {
                    let num = pivot.mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num.div_exact(&prev);
                }
                m[i][k] = LPoly::zero();
            }
            prev = pivot;
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, i64)]) -> LPoly {
        // single variable helper: (exponent, integer coefficient)
        let mut out = LPoly::zero();
        for &(e, c) in terms {
            out = out.add(&LPoly::monomial(vec![e], Scalar::from_int(c)));
        }
        out
    }

    #[test]
    fn division_is_exact() {
        let num = p(&[(0, 1), (2, -1)]); // 1 - z^2
        let den = p(&[(0, 1), (1, -1)]); // 1 - z
        assert_eq!(num.div_exact(&den), p(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn eval_is_multiplicative() {
        let a = p(&[(0, 2), (1, 3), (-2, 1)]);
        let b = p(&[(1, -1), (0, 5)]);
        let pt = [Scalar::from_ratio(2, 3)];
        let lhs = a.mul(&b).eval(&pt).unwrap();
        let rhs = a.eval(&pt).unwrap().mul(&b.eval(&pt).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rank_of_unit_times_row() {
        // second row is z^-1 times the first: generic rank 1
        let mut m = LMat::zero(2, 2, 1);
        m.set(0, 0, p(&[(0, 1)]));
        m.set(0, 1, p(&[(1, 1)]));
        m.set(1, 0, p(&[(-1, 1)]));
        m.set(1, 1, p(&[(0, 1)]));
        assert_eq!(m.rank_generic(), 1);
    }

    #[test]
    fn rank_full_bivariate() {
        // diag(1 - x, 1 - y) has generic rank 2 even though both factors vanish somewhere
        let mut m = LMat::zero(2, 2, 2);
        m.set(0, 0, LPoly::monomial(vec![0, 0], Scalar::one())
            .sub(&LPoly::monomial(vec![1, 0], Scalar::one())));
        m.set(1, 1, LPoly::monomial(vec![0, 0], Scalar::one())
            .sub(&LPoly::monomial(vec![0, 1], Scalar::one())));
        assert_eq!(m.rank_generic(), 2);
    }

    #[test]
    fn rank_zero_and_shapes() {
        let m = LMat::zero(3, 2, 1);
        assert_eq!(m.rank_generic(), 0);
        let mut m2 = LMat::zero(1, 3, 2);
        m2.set(0, 2, LPoly::monomial(vec![-3, 4], Scalar::i()));
        assert_eq!(m2.rank_generic(), 1);
    }

    #[test]
    fn rank_agrees_with_generic_evaluation() {
        // (1 - x) times a rank one projector pattern, embedded in 3x3
        let one = LPoly::monomial(vec![0], Scalar::one());
        let x = LPoly::monomial(vec![1], Scalar::one());
        let f = one.sub(&x);
        let mut m = LMat::zero(3, 3, 1);
        m.set(0, 0, f.clone());
        m.set(0, 1, f.mul(&x));
        m.set(1, 0, f.mul(&x.mul(&x)));
        m.set(1, 1, f.mul(&x.mul(&x).mul(&x)));
        m.set(2, 2, one.clone());
        assert_eq!(m.rank_generic(), 2);
        let pt = [Scalar::from_ratio(5, 7)];
        assert_eq!(m.eval(&pt).unwrap().rank(), 2);
    }
}
