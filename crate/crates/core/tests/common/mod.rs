//! Shared material for the integration suites: a Smith normal form rank
//! oracle independent of the checked linear algebra, and seeded random
//! instance generators.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use l2sheaf_core::complex::GammaComplex;
use l2sheaf_core::group::{Elt, GroupSpec};
use l2sheaf_core::qmat::QMat;
use l2sheaf_core::scalar::Scalar;
use l2sheaf_core::sheaf::{constant_sheaf, direct_sum, skyscraper, ConstructibleSheaf};

/// Diagonalizes an integer matrix by row and column reduction and returns the
/// invariant factors, divisibility chain included.
pub fn smith_diagonal(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut t = 0;
    'block: while t < rows && t < cols {
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if m[r][c].is_zero() {
                    continue;
                }
                let better = match &pivot {
                    None => true,
                    Some((pr, pc)) => m[r][c].abs() < m[*pr][*pc].abs(),
                };
                if better {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        m.swap(t, pr);
        for row in &mut m {
            row.swap(t, pc);
        }
        if m[t][t].is_negative() {
            for c in t..cols {
                m[t][c] = -m[t][c].clone();
            }
        }
        for r in (t + 1)..rows {
            if m[r][t].is_zero() {
                continue;
            }
            let q = m[r][t].div_floor(&m[t][t]);
            for c in t..cols {
                let s = &m[t][c] * &q;
                m[r][c] -= s;
            }
            if !m[r][t].is_zero() {
                // remainder strictly smaller than pivot, retry block
                m.swap(t, r);
                continue 'block;
            }
        }
        for c in (t + 1)..cols {
            if m[t][c].is_zero() {
                continue;
            }
            let q = m[t][c].div_floor(&m[t][t]);
            for r in t..rows {
                let s = &m[r][t] * &q;
                m[r][c] -= s;
            }
            if !m[t][c].is_zero() {
                for row in m.iter_mut() {
                    row.swap(t, c);
                }
                continue 'block;
            }
        }
        t += 1;
    }
    // enforce d_i | d_{i+1} by folding the gcd into the earlier slot
    let mut diag: Vec<BigInt> = (0..t).map(|i| m[i][i].clone()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..diag.len().saturating_sub(1) {
            if (&diag[i + 1] % &diag[i]).is_zero() {
                continue;
            }
            let g = diag[i].gcd(&diag[i + 1]);
            diag[i + 1] = (&diag[i] * &diag[i + 1]) / &g;
            diag[i] = g;
            changed = true;
        }
    }
    diag
}

pub fn smith_rank(m: Vec<Vec<BigInt>>) -> usize {
    smith_diagonal(m).len()
}

/// Rank of an exact matrix via Smith reduction on the realified integer
/// clearing; realification doubles the rank.
#[allow(dead_code)]
pub fn snf_rank(m: &QMat) -> usize {
    let real = m.realify();
    let mut rows = Vec::with_capacity(real.rows);
    for r in 0..real.rows {
        let mut lcm = BigInt::one();
        for c in 0..real.cols {
            lcm = lcm.lcm(real.get(r, c).re().denom());
        }
        let row: Vec<BigInt> = (0..real.cols)
            .map(|c| {
                let q = real.get(r, c).re();
                q.numer() * (&lcm / q.denom())
            })
            .collect();
        rows.push(row);
    }
    let rank2 = smith_rank(rows);
    assert_eq!(rank2 % 2, 0, "realified rank must be even");
    rank2 / 2
}

/// Betti numbers of a complex with trivial group and constant coefficients,
/// assembled from vertex lists alone and ranked by Smith reduction. Fully
/// independent of the cochain assembly under test.
pub fn snf_betti_constant(c: &GammaComplex) -> Vec<BigRational> {
    let cells: Vec<Vec<Vec<usize>>> = (0..=c.max_dim())
        .map(|d| {
            c.orbits_in(d)
                .iter()
                .map(|o| {
                    let mut v: Vec<usize> = o.rep.iter().map(|(vo, _)| *vo).collect();
                    v.sort_unstable();
                    v
                })
                .collect()
        })
        .collect();
    let mut ranks = Vec::new();
    for k in 0..c.max_dim() {
        let mut m = vec![vec![BigInt::zero(); cells[k].len()]; cells[k + 1].len()];
        for (r, s) in cells[k + 1].iter().enumerate() {
            for nu in 0..s.len() {
                let mut face = s.clone();
                face.remove(nu);
                let col = cells[k]
                    .iter()
                    .position(|t| *t == face)
                    .expect("face closure");
                let sign = if nu % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                m[r][col] += sign;
            }
        }
        ranks.push(smith_rank(m));
    }
    (0..=c.max_dim())
        .map(|k| {
            let out = if k < ranks.len() { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            BigRational::from_integer(BigInt::from(cells[k].len() - out - inc))
        })
        .collect()
}

/// Lex least translate of a simplex over a cyclic group, matching the stored
/// canonical representatives.
fn canonical_zk(k: usize, verts: &[(usize, usize)]) -> Vec<(usize, usize)> {
    verts
        .iter()
        .map(|(_, g)| {
            let inv = (k - g % k) % k;
            let mut t: Vec<(usize, usize)> =
                verts.iter().map(|(o, h)| (*o, (h + inv) % k)).collect();
            t.sort_unstable();
            t
        })
        .min()
        .expect("nonempty simplex")
}

fn close_downward(k: usize, cells: &mut BTreeSet<Vec<(usize, usize)>>, verts: Vec<(usize, usize)>) {
    let canon = canonical_zk(k, &verts);
    if canon.len() < 2 || !cells.insert(canon.clone()) {
        return;
    }
    for nu in 0..canon.len() {
        let mut face = canon.clone();
        face.remove(nu);
        close_downward(k, cells, face);
    }
}

/// Random cocompact complex with a free cyclic action: every simplex uses
/// pairwise distinct vertex orbits, which forces trivial stabilizers.
pub fn random_zk_complex(rng: &mut ChaCha8Rng, k: usize) -> GammaComplex {
    let group = GroupSpec::cyclic(k);
    let n_vert = rng.gen_range(3..=5);
    let mut cells: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let n_tri = rng.gen_range(0..=2);
    let n_edge = rng.gen_range(1..=3);
    for want_dim in
        std::iter::repeat_n(2, n_tri).chain(std::iter::repeat_n(1, n_edge))
    {
        let mut orbits: Vec<usize> = (0..n_vert).collect();
        for i in 0..=want_dim {
            let j = rng.gen_range(i..orbits.len());
            orbits.swap(i, j);
        }
        let verts: Vec<(usize, usize)> = orbits[..=want_dim]
            .iter()
            .map(|&o| (o, rng.gen_range(0..k)))
            .collect();
        close_downward(k, &mut cells, verts);
    }
    let simplices: Vec<(usize, Vec<(usize, Elt)>)> = cells
        .iter()
        .map(|cell| {
            let verts = cell.iter().map(|(o, g)| (*o, Elt::Finite(*g))).collect();
            (cell.len() - 1, verts)
        })
        .collect();
    let c = GammaComplex::from_simplex_lists(group, n_vert, &simplices);
    assert!(c.validate().is_empty(), "generator emits valid complexes");
    assert!(c.is_free(), "distinct orbits force freeness");
    c
}

/// Unit triangular matrix with small random entries and its exact inverse.
fn random_unitriangular(
    rng: &mut ChaCha8Rng,
    n: usize,
    lower: bool,
    allow_complex: bool,
) -> (QMat, QMat) {
    let mut nil = QMat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            if (lower && r > c) || (!lower && r < c) {
                let re = rng.gen_range(-2i64..=2);
                let im = if allow_complex && rng.gen_bool(0.3) {
                    rng.gen_range(-1i64..=1)
                } else {
                    0
                };
                nil.set(r, c, Scalar::new(
                    BigRational::from_integer(BigInt::from(re)),
                    BigRational::from_integer(BigInt::from(im)),
                ));
            }
        }
    }
    let t = QMat::identity(n).add(&nil).unwrap();
    // (I + N)^{-1} = sum of (-N)^j, finite because N is nilpotent
    let mut inv = QMat::identity(n);
    let mut power = QMat::identity(n);
    for _ in 1..n {
        power = power.mul(&nil).unwrap().neg();
        inv = inv.add(&power).unwrap();
    }
    (t, inv)
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize, allow_complex: bool) -> (QMat, QMat) {
    let (l, l_inv) = random_unitriangular(rng, n, true, allow_complex);
    let (u, u_inv) = random_unitriangular(rng, n, false, allow_complex);
    (l.mul(&u).unwrap(), u_inv.mul(&l_inv).unwrap())
}

/// Random functorial sheaf: a sum of a constant sheaf and vertex skyscrapers,
/// conjugated by an invertible gauge on every orbit. Conjugation preserves
/// the two path compositions, so functoriality holds by construction.
pub fn random_sheaf(
    rng: &mut ChaCha8Rng,
    c: &GammaComplex,
    allow_complex: bool,
) -> ConstructibleSheaf {
    let rank = rng.gen_range(0..=2);
    let n_sky = if rank == 0 { rng.gen_range(1..=2) } else { rng.gen_range(0..=1) };
    let mut f = constant_sheaf(c, rank);
    let mut used = BTreeSet::new();
    for _ in 0..n_sky {
        let v = rng.gen_range(0..c.n_vertex_orbits);
        if !used.insert(v) {
            continue;
        }
        f = direct_sum(&f, &skyscraper(c, v, 1).unwrap()).unwrap();
    }
    let gauges: Vec<Vec<(QMat, QMat)>> = f
        .stalks
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|&n| random_invertible(rng, n, allow_complex))
                .collect()
        })
        .collect();
    for dim in 1..f.shape.len() {
        for orbit in 0..f.shape[dim] {
            let facets: Vec<usize> = c.orbits_in(dim)[orbit]
                .facets
                .iter()
                .map(|fo| fo.as_ref().expect("resolved faces").0)
                .collect();
            for (pos, m) in f.cores[dim][orbit].iter_mut().enumerate() {
                let a = &gauges[dim][orbit].0;
                let b_inv = &gauges[dim - 1][facets[pos]].1;
                *m = a.mul(m).unwrap().mul(b_inv).unwrap();
            }
        }
    }
    f.real = !allow_complex;
    f
}
