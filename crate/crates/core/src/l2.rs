//! Dimension reports over the group von Neumann algebra.
//!
//! Betti numbers come from the rank formula and are cross checked against
//! Laplacian kernels, so every report has passed two independent routes.
//! The truncation check is the only part that leaves exact arithmetic.

use crate::chain::{build_cochain, GroupRingComplex};
use crate::complex::GammaComplex;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::sheaf::{
    pullback_morphism, subdivision_pullback, validate_sheaf_complex, ConstructibleSheaf,
    SheafComplex,
};
use crate::vn::{
    eval_character, realify_parts, vn_kernel_dim_seeded, MethodTag, Mode, DEFAULT_SEED, KERNEL_TOL,
};
use nalgebra::{DMatrix, SymmetricEigen};
use num::{BigInt, BigRational, Zero};

fn ratio(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeData {
    pub degree: i64,
    /// Rank of the free module in this degree.
    pub rank: usize,
    /// Von Neumann rank of the differential leaving this degree.
    pub diff_rank: BigRational,
    pub betti: BigRational,
    pub method: MethodTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct L2Report {
    pub degrees: Vec<DegreeData>,
    pub euler: BigRational,
    pub subdivided: bool,
}

impl L2Report {
    pub fn betti(&self, k: i64) -> Option<&BigRational> {
        self.degrees.iter().find(|d| d.degree == k).map(|d| &d.betti)
    }
}

/// Dimension data of a free module complex: in each degree the kernel of the
/// differential modulo the image of the previous one, measured by the trace.
/// The rank formula result is asserted against the Laplacian kernel.
pub fn l2_of_complex(
    gc: &GroupRingComplex,
    group: &GroupSpec,
    mode: Mode,
    seed: u64,
) -> Result<L2Report> {
    let mut diff_ranks = Vec::with_capacity(gc.diffs.len());
    let mut tag = None;
    for d in &gc.diffs {
        let k = vn_kernel_dim_seeded(d, group, mode, seed)?;
        diff_ranks.push(ratio(d.cols) - k.value);
        tag = Some(k.method);
    }
    let mut degrees = Vec::with_capacity(gc.ranks.len());
    let mut euler = BigRational::zero();
    for (i, &n) in gc.ranks.iter().enumerate() {
        let degree = gc.lo + i as i64;
        let r_out = diff_ranks.get(i).cloned().unwrap_or_else(BigRational::zero);
        let r_in = if i > 0 {
            diff_ranks[i - 1].clone()
        } else {
            BigRational::zero()
        };
        let betti = ratio(n) - &r_out - &r_in;
        let lap = gc.laplacian(degree, group)?;
        let hodge = vn_kernel_dim_seeded(&lap, group, mode, seed)?;
        assert_eq!(
            betti, hodge.value,
            "degree {degree}: rank formula and Laplacian kernel disagree"
        );
        let method = tag.unwrap_or(hodge.method);
        if degree.rem_euclid(2) == 0 {
            euler += &betti;
        } else {
            euler -= &betti;
        }
        degrees.push(DegreeData { degree, rank: n, diff_rank: r_out, betti, method });
    }
    Ok(L2Report { degrees, euler, subdivided: false })
}

pub fn l2_betti(c: &GammaComplex, f: &ConstructibleSheaf, mode: Mode) -> Result<L2Report> {
    l2_betti_seeded(c, f, mode, DEFAULT_SEED)
}

pub fn l2_betti_seeded(
    c: &GammaComplex,
    f: &ConstructibleSheaf,
    mode: Mode,
    seed: u64,
) -> Result<L2Report> {
    let b = build_cochain(c, f)?;
    let mut report = l2_of_complex(&b.complex, &b.base.group, mode, seed)?;
    report.subdivided = b.subdivided;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtiyahReport {
    pub euler_l2: BigRational,
    pub euler_quotient: BigRational,
    pub equal: bool,
    pub l2: L2Report,
    pub quotient: L2Report,
}

/// Compares the alternating sum of the trace dimensions with the Euler
/// characteristic of the quotient complex carrying the descended sheaf.
pub fn atiyah_check(c: &GammaComplex, f: &ConstructibleSheaf, mode: Mode) -> Result<AtiyahReport> {
    atiyah_check_seeded(c, f, mode, DEFAULT_SEED)
}

pub fn atiyah_check_seeded(
    c: &GammaComplex,
    f: &ConstructibleSheaf,
    mode: Mode,
    seed: u64,
) -> Result<AtiyahReport> {
    let b = build_cochain(c, f)?;
    let mut l2 = l2_of_complex(&b.complex, &b.base.group, mode, seed)?;
    l2.subdivided = b.subdivided;
    let q = b.base.quotient_complex()?;
    // orbit data is untouched by passing to the quotient, so the sheaf
    // descends with the very same stalk and corestriction tables
    let descended = ConstructibleSheaf {
        shape: b.sheaf.shape.clone(),
        stalks: b.sheaf.stalks.clone(),
        cores: b.sheaf.cores.clone(),
        real: b.sheaf.real,
    };
    let qb = build_cochain(&q, &descended)?;
    let quotient = l2_of_complex(&qb.complex, &q.group, Mode::Auto, seed)?;
    let equal = l2.euler == quotient.euler;
    Ok(AtiyahReport {
        euler_l2: l2.euler.clone(),
        euler_quotient: quotient.euler.clone(),
        equal,
        l2,
        quotient,
    })
}

/// Totalizes a bounded complex of sheaves and reports its dimensions. The
/// column differentials are the cochain ones, rows are the given morphisms
/// twisted by the cochain degree parity.
pub fn hyper_l2(
    c: &GammaComplex,
    k: &SheafComplex,
    mode: Mode,
    seed: u64,
) -> Result<L2Report> {
    validate_sheaf_complex(c, k)?;
    if k.sheaves.is_empty() {
        return Ok(L2Report { degrees: Vec::new(), euler: BigRational::zero(), subdivided: false });
    }
    let tot = totalize(c, k)?;
    let mut report = l2_of_complex(&tot.complex, &c.group, mode, seed)?;
    report.subdivided = tot.subdivided;
    Ok(report)
}

/// A totalized double complex, remembering where each component landed.
#[derive(Clone, Debug)]
pub struct Totalization {
    pub complex: GroupRingComplex,
    pub subdivided: bool,
    /// comp_off[term][cochain degree] = offset inside the total degree block.
    pub comp_off: Vec<Vec<Option<usize>>>,
}

/// The total complex of the cochain double complex of a sheaf complex.
pub fn totalize(c: &GammaComplex, k: &SheafComplex) -> Result<Totalization> {
    let (base, sheaves, morphisms, subdivided) = if c.separated() {
        (c.clone(), k.sheaves.clone(), k.maps.clone(), false)
    } else {
        let (sub, map) = c.barycentric_subdivision()?;
        let sheaves: Vec<ConstructibleSheaf> = k
            .sheaves
            .iter()
            .map(|f| subdivision_pullback(c, f, &sub, &map))
            .collect::<Result<_>>()?;
        let morphisms = k.maps.iter().map(|m| pullback_morphism(&map, m)).collect();
        (sub, sheaves, morphisms, true)
    };
    let builds: Vec<_> = sheaves
        .iter()
        .map(|f| build_cochain(&base, f))
        .collect::<Result<Vec<_>>>()?;
    let dim = base.max_dim();
    let terms = sheaves.len();
    // component (q, p) sits in total degree k.lo + q + p; offsets are by q then p
    let lo = k.lo;
    let hi = k.lo + (terms - 1) as i64 + dim as i64;
    let span = (hi - lo + 1) as usize;
    let mut ranks = vec![0usize; span];
    let mut comp_off: Vec<Vec<Option<usize>>> = vec![vec![None; dim + 1]; terms];
    for q in 0..terms {
        for p in 0..=dim {
            let n = q + p;
            comp_off[q][p] = Some(ranks[n]);
            ranks[n] += builds[q].complex.ranks[p];
        }
    }
    let mut diffs = Vec::with_capacity(span.saturating_sub(1));
    for n in 0..span.saturating_sub(1) {
        let mut d = crate::group_ring::GroupRingMatrix::zero(ranks[n + 1], ranks[n]);
        for q in 0..terms {
            for p in 0..=dim {
                if q + p != n {
                    continue;
                }
                let src = comp_off[q][p].expect("component in range");
                if p < dim {
                    let tgt = comp_off[q][p + 1].expect("component in range");
                    let vert = &builds[q].complex.diffs[p];
                    add_block(&mut d, tgt, src, vert, 1);
                }
                if q + 1 < terms {
                    let tgt = comp_off[q + 1][p].expect("component in range");
                    let sign = if p % 2 == 0 { 1 } else { -1 };
                    let horiz = lift_morphism(&sheaves[q], &sheaves[q + 1], &morphisms[q], p, &base.group);
                    add_block(&mut d, tgt, src, &horiz, sign);
                }
            }
        }
        diffs.push(d);
    }
    let labels = (0..span).map(|n| vec![format!("tot:{}", lo + n as i64)]).collect();
    let tot = GroupRingComplex { lo, ranks, diffs, labels };
    tot.check_composition(&base.group)?;
    Ok(Totalization { complex: tot, subdivided, comp_off })
}

fn add_block(
    d: &mut crate::group_ring::GroupRingMatrix,
    r0: usize,
    c0: usize,
    b: &crate::group_ring::GroupRingMatrix,
    sign: i64,
) {
    for r in 0..b.rows {
        for c in 0..b.cols {
            let v = b.get(r, c);
            if v.is_zero() {
                continue;
            }
            let v = if sign < 0 { v.neg() } else { v.clone() };
            d.add_to(r0 + r, c0 + c, &v);
        }
    }
}

/// The cochain degree p map induced by a sheaf morphism: block diagonal over
/// the dim p orbits with scalar entries.
fn lift_morphism(
    from: &ConstructibleSheaf,
    _to: &ConstructibleSheaf,
    phi: &crate::sheaf::SheafMorphism,
    p: usize,
    group: &GroupSpec,
) -> crate::group_ring::GroupRingMatrix {
    use crate::group_ring::{GroupRingElement, GroupRingMatrix};
    let rows: usize = phi[p].iter().map(|m| m.rows).sum();
    let cols: usize = from.stalks[p].iter().sum();
    let mut out = GroupRingMatrix::zero(rows, cols);
    let mut r0 = 0;
    let mut c0 = 0;
    for m in &phi[p] {
        for r in 0..m.rows {
            for c in 0..m.cols {
                let v = m.get(r, c);
                if !v.is_zero() {
                    out.add_to(
                        r0 + r,
                        c0 + c,
                        &GroupRingElement::term(group.identity(), v.clone()),
                    );
                }
            }
        }
        r0 += m.rows;
        c0 += m.cols;
    }
    out
}

#[derive(Clone, Debug)]
pub struct TruncationReport {
    /// The cutoff actually used, nudged off any eigenvalue collision.
    pub lambda: f64,
    /// Largest deviation of d h + h d from the complement of the projector.
    pub homotopy_residual: f64,
    /// Largest deviation of the projector from commuting with d.
    pub commutator_residual: f64,
    pub ok: bool,
}

/// Verifies on a finite model that the spectral projector below the cutoff
/// absorbs the complex up to the contracting homotopy h = d* g, where g
/// inverts the Laplacian above the cutoff.
///
/// The quotient model of a free abelian group splits as a direct sum over
/// characters of (Z/n)^d, and the projector, the Green operator, and both
/// residuals are block diagonal in that splitting. Working per character
/// keeps every eigenproblem small, which holds the check near machine
/// precision on models whose assembled realization is large.
pub fn truncation_check(
    c: &GammaComplex,
    f: &ConstructibleSheaf,
    quotient_n: usize,
    lambda: f64,
) -> Result<TruncationReport> {
    let b = build_cochain(c, f)?;
    let group = &b.base.group;
    let mut lambda = lambda;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidInput("cutoff must be positive and finite".into()));
    }
    let unit = match group {
        GroupSpec::Finite(_) => group.order().expect("finite group has an order"),
        GroupSpec::FreeAbelian { .. } => 1,
    };
    let dims: Vec<usize> = b.complex.ranks.iter().map(|&n| 2 * n * unit).collect();
    let n_deg = dims.len();
    let blocks: Vec<Vec<DMatrix<f64>>> = match group {
        GroupSpec::Finite(_) => {
            let whole = b
                .complex
                .diffs
                .iter()
                .map(|d| {
                    let (re, _im) = d.realize_finite(group).realify().to_f64_parts();
                    re
                })
                .collect();
            vec![whole]
        }
        GroupSpec::FreeAbelian { rank } => {
            if quotient_n < 2 {
                return Err(Error::InvalidInput("quotient size must be at least 2".into()));
            }
            let d = *rank;
            let total = quotient_n.pow(d as u32);
            let mut blocks = Vec::with_capacity(total);
            let mut k = vec![0usize; d];
            for _ in 0..total {
                blocks.push(
                    b.complex
                        .diffs
                        .iter()
                        .map(|m| {
                            let (re, im) = eval_character(m, &k, quotient_n);
                            realify_parts(&re, &im)
                        })
                        .collect(),
                );
                for kj in k.iter_mut() {
                    *kj += 1;
                    if *kj < quotient_n {
                        break;
                    }
                    *kj = 0;
                }
            }
            blocks
        }
    };
    // The eigendecompositions are cutoff independent; only the classification
    // below is retried when the cutoff collides with an eigenvalue.
    let mut eigs = Vec::with_capacity(blocks.len());
    for diffs in &blocks {
        let mut per_degree = Vec::with_capacity(n_deg);
        for k in 0..n_deg {
            let mut lap = DMatrix::<f64>::zeros(dims[k], dims[k]);
            if k > 0 {
                let d = &diffs[k - 1];
                lap += d * d.transpose();
            }
            if k < diffs.len() {
                let d = &diffs[k];
                lap += d.transpose() * d;
            }
            let lap = (&lap + lap.transpose()) * 0.5;
            per_degree.push(SymmetricEigen::new(lap));
        }
        eigs.push(per_degree);
    }
    let mut separated = false;
    'nudge: for _attempt in 0..64 {
        for per_degree in &eigs {
            for se in per_degree {
                if se.eigenvalues.iter().any(|&mu| (mu - lambda).abs() < 1e-12) {
                    lambda *= 1.0 + 1e-6;
                    continue 'nudge;
                }
            }
        }
        separated = true;
        break;
    }
    if !separated {
        return Err(Error::InvalidInput("could not separate the cutoff from the spectrum".into()));
    }
    let mut homotopy = 0.0f64;
    let mut commutator = 0.0f64;
    for (diffs, per_degree) in blocks.iter().zip(&eigs) {
        let mut proj = Vec::with_capacity(n_deg);
        let mut green = Vec::with_capacity(n_deg);
        for se in per_degree {
            let v = &se.eigenvectors;
            let below = DMatrix::from_diagonal(&se.eigenvalues.map(|mu| {
                if mu <= lambda {
                    1.0
                } else {
                    0.0
                }
            }));
            let inv_above = DMatrix::from_diagonal(&se.eigenvalues.map(|mu| {
                if mu > lambda {
                    1.0 / mu
                } else {
                    0.0
                }
            }));
            proj.push(v * below * v.transpose());
            green.push(v * inv_above * v.transpose());
        }
        for k in 0..n_deg {
            let mut lhs = DMatrix::<f64>::zeros(dims[k], dims[k]);
            if k > 0 {
                let d = &diffs[k - 1];
                let h_k = d.transpose() * &green[k];
                lhs += d * h_k;
            }
            if k < diffs.len() {
                let d = &diffs[k];
                let h_next = d.transpose() * &green[k + 1];
                lhs += h_next * d;
                let comm = &proj[k + 1] * d - d * &proj[k];
                commutator = commutator.max(comm.norm());
            }
            let want = DMatrix::<f64>::identity(dims[k], dims[k]) - &proj[k];
            homotopy = homotopy.max((lhs - want).norm());
        }
    }
    let ok = homotopy <= KERNEL_TOL && commutator <= KERNEL_TOL;
    Ok(TruncationReport {
        lambda,
        homotopy_residual: homotopy,
        commutator_residual: commutator,
        ok,
    })
}
