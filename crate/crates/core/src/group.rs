//! Deck groups: finite groups given by multiplication tables, and free abelian
//! groups Z^d whose elements are integer vectors.

use crate::error::{Error, Result};
use std::fmt;

/// A group element. `Finite(k)` indexes into a multiplication table;
/// `Vector(v)` is an element of Z^d. The identity is index 0, resp. the zero
/// vector. The derived ordering (index order, lex order on vectors) is the
/// canonical element order used when normalizing simplex representatives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elt {
    Finite(usize),
    Vector(Vec<i64>),
}

impl fmt::Debug for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elt::Finite(k) => write!(f, "g{k}"),
            Elt::Vector(v) => write!(f, "z{v:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub mul_table: Vec<Vec<usize>>,
    pub inverse_table: Vec<usize>,
}

/// Group data: either a finite group with an explicit multiplication table
/// (identity at index 0) or Z^d with componentwise addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Finite(FiniteGroup),
    FreeAbelian { rank: usize },
}

impl GroupSpec {
    /// Builds a finite group from a multiplication table, deriving inverses.
    /// Checks the full set of table axioms; tables are small by assumption.
    pub fn finite(mul_table: Vec<Vec<usize>>) -> Result<Self> {
        let n = mul_table.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty multiplication table".into()));
        }
        for row in &mul_table {
            if row.len() != n {
                return Err(Error::InvalidInput("multiplication table is not square".into()));
            }
            if row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidInput("multiplication table entry out of range".into()));
            }
        }
        for g in 0..n {
            if mul_table[0][g] != g || mul_table[g][0] != g {
                return Err(Error::InvalidInput("index 0 is not a two-sided identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul_table[mul_table[a][b]][c] != mul_table[a][mul_table[b][c]] {
                        return Err(Error::InvalidInput(format!(
                            "multiplication table not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inverse_table = vec![usize::MAX; n];
        for g in 0..n {
            match (0..n).find(|&h| mul_table[g][h] == 0 && mul_table[h][g] == 0) {
                Some(h) => inverse_table[g] = h,
                None => {
                    return Err(Error::InvalidInput(format!("element {g} has no two-sided inverse")))
                }
            }
        }
        Ok(GroupSpec::Finite(FiniteGroup { mul_table, inverse_table }))
    }

    /// The cyclic group Z/k with elements 0..k and addition mod k.
    pub fn cyclic(k: usize) -> Self {
        assert!(k >= 1);
        let mul_table = (0..k).map(|a| (0..k).map(|b| (a + b) % k).collect()).collect();
        GroupSpec::finite(mul_table).expect("cyclic table is a group")
    }

    /// The trivial group, used for quotient complexes.
    pub fn trivial() -> Self {
        GroupSpec::cyclic(1)
    }

    /// The product group (Z/n)^d with mixed-radix element indices;
    /// the realization target for quotient approximation over Z^d.
    pub fn cyclic_power(n: usize, d: usize) -> Self {
        assert!(n >= 1 && d >= 1);
        let size = n.pow(d as u32);
        let decode = |mut k: usize| -> Vec<usize> {
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                v.push(k % n);
                k /= n;
            }
            v
        };
        let encode = |v: &[usize]| -> usize {
            v.iter().rev().fold(0, |acc, &c| acc * n + c)
        };
        let mul_table = (0..size)
            .map(|a| {
                let va = decode(a);
                (0..size)
                    .map(|b| {
                        let vb = decode(b);
                        let sum: Vec<usize> =
                            va.iter().zip(&vb).map(|(x, y)| (x + y) % n).collect();
                        encode(&sum)
                    })
                    .collect()
            })
            .collect();
        GroupSpec::finite(mul_table).expect("cyclic power table is a group")
    }

    pub fn free_abelian(rank: usize) -> Self {
        GroupSpec::FreeAbelian { rank }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupSpec::Finite(_))
    }

    /// Order of a finite group; None for Z^d.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupSpec::Finite(f) => Some(f.mul_table.len()),
            GroupSpec::FreeAbelian { .. } => None,
        }
    }

    pub fn identity(&self) -> Elt {
        match self {
            GroupSpec::Finite(_) => Elt::Finite(0),
            GroupSpec::FreeAbelian { rank } => Elt::Vector(vec![0; *rank]),
        }
    }

    pub fn is_identity(&self, g: &Elt) -> bool {
        g == &self.identity()
    }

    /// Validates that an element belongs to this group.
    pub fn check_elt(&self, g: &Elt) -> Result<()> {
        match (self, g) {
            (GroupSpec::Finite(f), Elt::Finite(k)) if *k < f.mul_table.len() => Ok(()),
            (GroupSpec::Finite(_), Elt::Finite(k)) => {
                Err(Error::InvalidInput(format!("element index {k} out of range")))
            }
            (GroupSpec::FreeAbelian { rank }, Elt::Vector(v)) if v.len() == *rank => Ok(()),
            (GroupSpec::FreeAbelian { rank }, Elt::Vector(v)) => Err(Error::InvalidInput(
                format!("vector length {} does not match rank {rank}", v.len()),
            )),
            _ => Err(Error::InvalidInput("element kind does not match group kind".into())),
        }
    }

    pub fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        match (self, a, b) {
            (GroupSpec::Finite(f), Elt::Finite(x), Elt::Finite(y)) => {
                Elt::Finite(f.mul_table[*x][*y])
            }
            (GroupSpec::FreeAbelian { .. }, Elt::Vector(x), Elt::Vector(y)) => {
                Elt::Vector(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            _ => panic!("element kind does not match group kind"),
        }
    }

    pub fn inv(&self, g: &Elt) -> Elt {
        match (self, g) {
            (GroupSpec::Finite(f), Elt::Finite(x)) => Elt::Finite(f.inverse_table[*x]),
            (GroupSpec::FreeAbelian { .. }, Elt::Vector(v)) => {
                Elt::Vector(v.iter().map(|a| -a).collect())
            }
            _ => panic!("element kind does not match group kind"),
        }
    }

    /// All elements of a finite group in index order; panics on Z^d.
    pub fn elements(&self) -> Vec<Elt> {
        match self {
            GroupSpec::Finite(f) => (0..f.mul_table.len()).map(Elt::Finite).collect(),
            GroupSpec::FreeAbelian { .. } => panic!("free abelian group is infinite"),
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            GroupSpec::FreeAbelian { rank } => Some(*rank),
            GroupSpec::Finite(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_axioms() {
        let g = GroupSpec::cyclic(6);
        let a = Elt::Finite(2);
        let b = Elt::Finite(5);
        assert_eq!(g.mul(&a, &b), Elt::Finite(1));
        assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
        assert_eq!(g.order(), Some(6));
    }

    #[test]
    fn bad_tables_rejected() {
        // identity not at 0
        assert!(GroupSpec::finite(vec![vec![1, 0], vec![0, 1]]).is_err());
        // non-associative magma on 3 elements
        let t = vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 0, 1]];
        assert!(GroupSpec::finite(t).is_err());
        // not square
        assert!(GroupSpec::finite(vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn symmetric_group_s3() {
        // S3 as permutations of {0,1,2}; element 0 is the identity.
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
        let compose = |p: &[usize; 3], q: &[usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
        let idx = |r: [usize; 3]| perms.iter().position(|p| *p == r).unwrap();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| perms.iter().map(|q| idx(compose(p, q))).collect())
            .collect();
        let g = GroupSpec::finite(table).unwrap();
        assert_eq!(g.order(), Some(6));
        // (01) * (12) != (12) * (01): nonabelian
        let a = Elt::Finite(5);
        let b = Elt::Finite(3);
        assert_ne!(g.mul(&a, &b), g.mul(&b, &a));
    }

    #[test]
    #[allow(clippy::identity_op)]
    fn cyclic_power_is_componentwise() {
        let g = GroupSpec::cyclic_power(3, 2);
        assert_eq!(g.order(), Some(9));
        // index encoding: (a0, a1) -> a0 + 3*a1
        let e12 = Elt::Finite(1 + 3 * 2); // (1, 2)
        let e21 = Elt::Finite(2 + 3 * 1); // (2, 1)
        assert_eq!(g.mul(&e12, &e21), Elt::Finite(0)); // (0, 0)
    }

    #[test]
    fn free_abelian_ops() {
        let g = GroupSpec::free_abelian(2);
        let a = Elt::Vector(vec![3, -1]);
        assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
        assert!(g.check_elt(&Elt::Vector(vec![1])).is_err());
        assert!(g.check_elt(&Elt::Finite(0)).is_err());
    }
}
