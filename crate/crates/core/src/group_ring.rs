//! The group ring C-Gamma with exact scalars, and matrices over it.
//!
//! Convention used throughout the crate: matrices over the group ring act on
//! column vectors by left convolution of each entry, and compose by the
//! ordinary matrix product. Under the left regular representation
//! lambda(a)_{g,h} = a(g h^-1), which is a ring homomorphism, a matrix over
//! C-Gamma for a finite group becomes a scalar block matrix whose kernel
//! dimension is |Gamma| times the von Neumann kernel dimension.

use crate::error::{Error, Result};
use crate::group::{Elt, GroupSpec};
use crate::qmat::QMat;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// A finitely supported map Gamma -> Q(i). Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<Elt, Scalar>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        GroupRingElement { terms: BTreeMap::new() }
    }

    pub fn one(group: &GroupSpec) -> Self {
        Self::from_elt(group.identity())
    }

    /// The basis element [g].
    pub fn from_elt(g: Elt) -> Self {
        Self::term(g, Scalar::one())
    }

    /// A single term c*[g].
    pub fn term(g: Elt, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        GroupRingElement { terms }
    }

    pub fn from_scalar(c: Scalar, group: &GroupSpec) -> Self {
        Self::term(group.identity(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (&Elt, &Scalar)> {
        self.terms.iter()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, g: &Elt) -> Scalar {
        self.terms.get(g).cloned().unwrap_or_else(Scalar::zero)
    }

    fn insert_add(&mut self, g: Elt, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&g);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.insert_add(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GroupRingElement {
            terms: self.terms.iter().map(|(g, x)| (g.clone(), x.mul(c))).collect(),
        }
    }

    /// Convolution product; needs the group for finite multiplication tables.
    pub fn mul(&self, o: &Self, group: &GroupSpec) -> Self {
        let mut out = Self::zero();
        for (g, a) in &self.terms {
            for (h, b) in &o.terms {
                out.insert_add(group.mul(g, h), a.mul(b));
            }
        }
        out
    }

    /// The star involution: star(a)(g) = conj(a(g^-1)). An involutive
    /// anti-automorphism; matrices use it entrywise for adjoints.
    pub fn star(&self, group: &GroupSpec) -> Self {
        GroupRingElement {
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (group.inv(g), c.conj()))
                .collect(),
        }
    }

    /// The von Neumann trace: the coefficient of the identity.
    pub fn trace_vn(&self, group: &GroupSpec) -> Scalar {
        self.coeff(&group.identity())
    }

    /// The augmentation g -> 1, summing all coefficients. Applied entrywise it
    /// turns the equivariant cochain complex into the quotient complex.
    pub fn augmentation(&self) -> Scalar {
        self.terms
            .values()
            .fold(Scalar::zero(), |acc, c| acc.add(c))
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| format!("({c})*{g:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A dense rows x cols matrix with entries in C-Gamma.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<GroupRingElement>,
}

impl GroupRingMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        GroupRingMatrix { rows, cols, entries: vec![GroupRingElement::zero(); rows * cols] }
    }

    pub fn identity(n: usize, group: &GroupSpec) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::one(group));
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &GroupRingElement {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GroupRingElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &GroupRingElement) {
        let cur = self.get(r, c).add(v);
        self.set(r, c, cur);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.is_real())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Shape(format!(
                "add {}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(GroupRingMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        GroupRingMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn mul(&self, o: &Self, group: &GroupSpec) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!(
                "mul {}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.add_to(i, j, &a.mul(b, group));
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Adjoint: transpose composed with entrywise star.
    pub fn adjoint(&self, group: &GroupSpec) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).star(group));
            }
        }
        out
    }

    pub fn is_self_adjoint(&self, group: &GroupSpec) -> bool {
        self.rows == self.cols && *self == self.adjoint(group)
    }

    /// Entrywise augmentation g -> 1, producing the scalar quotient matrix.
    pub fn augmentation(&self) -> QMat {
        let mut out = QMat::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).augmentation());
            }
        }
        out
    }

    /// Scalar realization through the left regular representation: each entry
    /// becomes the |Gamma| x |Gamma| block lambda(a)_{g,h} = a(g h^-1).
    pub fn realize_finite(&self, group: &GroupSpec) -> QMat {
        let f = match group {
            GroupSpec::Finite(f) => f,
            GroupSpec::FreeAbelian { .. } => panic!("realize_finite needs a finite group"),
        };
        let n = f.mul_table.len();
        let mut out = QMat::zeros(self.rows * n, self.cols * n);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (g, coef) in self.get(r, c).support() {
                    let k = match g {
                        Elt::Finite(k) => *k,
                        Elt::Vector(_) => panic!("vector element in finite realization"),
                    };
                    // column h maps to row k*h with coefficient a(k)
                    for h in 0..n {
                        let row = f.mul_table[k][h];
                        out.add_to(r * n + row, c * n + h, coef);
                    }
                }
            }
        }
        out
    }

    /// Realization over the finite quotient (Z/n)^d of Z^d: exponent vectors
    /// are reduced mod n and realized as circulant blocks. Block index encoding
    /// is mixed radix, component 0 least significant.
    pub fn realize_quotient(&self, d: usize, n: usize) -> QMat {
        assert!(n >= 1);
        let size = n.pow(d as u32);
        let decode = |mut k: usize| -> Vec<usize> {
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                v.push(k % n);
                k /= n;
            }
            v
        };
        let encode = |v: &[usize]| -> usize { v.iter().rev().fold(0, |acc, &c| acc * n + c) };
        let mut out = QMat::zeros(self.rows * size, self.cols * size);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (g, coef) in self.get(r, c).support() {
                    let v = match g {
                        Elt::Vector(v) => v,
                        Elt::Finite(_) => panic!("finite element in quotient realization"),
                    };
                    assert_eq!(v.len(), d);
                    let vm: Vec<usize> =
                        v.iter().map(|&x| (x.rem_euclid(n as i64)) as usize).collect();
                    for h in 0..size {
                        let hv = decode(h);
                        let sum: Vec<usize> =
                            hv.iter().zip(&vm).map(|(a, b)| (a + b) % n).collect();
                        out.add_to(r * size + encode(&sum), c * size + h, coef);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for GroupRingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GroupRingMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{:?}", self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> GroupSpec {
        GroupSpec::free_abelian(1)
    }

    fn t(k: i64) -> Elt {
        Elt::Vector(vec![k])
    }

    #[test]
    fn trace_examples() {
        let g = z();
        assert_eq!(GroupRingElement::one(&g).trace_vn(&g), Scalar::one());
        let a = GroupRingElement::from_elt(t(1)).add(&GroupRingElement::from_elt(t(-1)));
        assert_eq!(a.trace_vn(&g), Scalar::zero());
        // star(1 - t) * (1 - t) has trace 2
        let b = GroupRingElement::one(&g).sub(&GroupRingElement::from_elt(t(1)));
        let p = b.star(&g).mul(&b, &g);
        assert_eq!(p.trace_vn(&g), Scalar::from_int(2));
    }

    #[test]
    fn trace_is_tracial() {
        let g = GroupSpec::cyclic(5);
        let a = GroupRingElement::term(Elt::Finite(2), Scalar::from_ratio(3, 7))
            .add(&GroupRingElement::term(Elt::Finite(1), Scalar::i()));
        let b = GroupRingElement::term(Elt::Finite(3), Scalar::from_int(2))
            .add(&GroupRingElement::term(Elt::Finite(4), Scalar::from_ratio(-1, 2)));
        assert_eq!(
            a.mul(&b, &g).trace_vn(&g),
            b.mul(&a, &g).trace_vn(&g)
        );
    }

    #[test]
    fn star_involution_and_antihomomorphism() {
        let g = GroupSpec::cyclic(4);
        let a = GroupRingElement::term(Elt::Finite(1), Scalar::new(
            crate::scalar::parse_rational("1/2").unwrap(),
            crate::scalar::parse_rational("3").unwrap(),
        ));
        let b = GroupRingElement::term(Elt::Finite(3), Scalar::from_int(-2))
            .add(&GroupRingElement::one(&g));
        assert_eq!(a.star(&g).star(&g), a);
        assert_eq!(
            a.mul(&b, &g).star(&g),
            b.star(&g).mul(&a.star(&g), &g)
        );
    }

    #[test]
    fn trace_positivity() {
        let g = z();
        let a = GroupRingElement::term(t(2), Scalar::from_ratio(1, 3))
            .add(&GroupRingElement::term(t(0), Scalar::i().neg()))
            .add(&GroupRingElement::term(t(-1), Scalar::from_int(4)));
        let p = a.star(&g).mul(&a, &g).trace_vn(&g);
        assert!(p.is_real());
        assert!(p.re() > &num::BigRational::from_integer(0.into()));
        let zero = GroupRingElement::zero();
        assert_eq!(zero.star(&g).mul(&zero, &g).trace_vn(&g), Scalar::zero());
    }

    #[test]
    fn adjoint_involution_matrix() {
        let g = z();
        let mut m = GroupRingMatrix::zero(2, 3);
        m.set(0, 1, GroupRingElement::term(t(2), Scalar::i()));
        m.set(1, 0, GroupRingElement::one(&g).sub(&GroupRingElement::from_elt(t(1))));
        assert_eq!(m.adjoint(&g).adjoint(&g), m);
        assert_eq!(m.adjoint(&g).rows, 3);
    }

    #[test]
    fn realize_finite_is_homomorphism() {
        let g = GroupSpec::cyclic(3);
        let mut a = GroupRingMatrix::zero(1, 1);
        a.set(0, 0, GroupRingElement::from_elt(Elt::Finite(1)));
        let mut b = GroupRingMatrix::zero(1, 1);
        b.set(
            0,
            0,
            GroupRingElement::from_elt(Elt::Finite(2)).scale(&Scalar::from_int(3)),
        );
        let ab = a.mul(&b, &g).unwrap();
        let ra = a.realize_finite(&g);
        let rb = b.realize_finite(&g);
        assert_eq!(ra.mul(&rb).unwrap(), ab.realize_finite(&g));
    }

    #[test]
    fn realize_finite_adjoint_is_conjugate_transpose() {
        let g = GroupSpec::cyclic(4);
        let mut a = GroupRingMatrix::zero(2, 2);
        a.set(0, 1, GroupRingElement::term(Elt::Finite(1), Scalar::i()));
        a.set(1, 1, GroupRingElement::term(Elt::Finite(3), Scalar::from_ratio(2, 5)));
        assert_eq!(a.adjoint(&g).realize_finite(&g), a.realize_finite(&g).conj_transpose());
    }

    #[test]
    fn realize_quotient_circulant() {
        // 1 - t over Z realized on Z/3: circulant with kernel dim 1 (constants)
        let mut a = GroupRingMatrix::zero(1, 1);
        a.set(
            0,
            0,
            GroupRingElement::one(&z()).sub(&GroupRingElement::from_elt(t(1))),
        );
        let r = a.realize_quotient(1, 3);
        assert_eq!(r.rows, 3);
        assert_eq!(r.kernel_dim(), 1);
    }

    #[test]
    fn augmentation_sums_coefficients() {
        let g = z();
        let a = GroupRingElement::term(t(1), Scalar::from_int(2))
            .add(&GroupRingElement::term(t(-4), Scalar::from_ratio(1, 2)));
        assert_eq!(a.augmentation(), Scalar::from_ratio(5, 2));
        let one = GroupRingElement::one(&g);
        assert_eq!(one.augmentation(), Scalar::one());
    }
}
