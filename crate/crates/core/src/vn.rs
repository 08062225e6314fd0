//! Von Neumann kernel dimensions, finite quotient spectra, and the spectral
//! density slope probe.
//!
//! Exact arithmetic throughout except for eigenvalue sampling and the slope
//! fit, which are the only floating point surfaces in the crate.

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::group_ring::GroupRingMatrix;
use crate::laurent::LMat;
use crate::scalar::Scalar;
use nalgebra::{DMatrix, SymmetricEigen};
use num::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed for the torus evaluation points unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 0x12d5_37ab;

/// Eigenvalues at or below this are counted as kernel in the density probe.
pub const KERNEL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Auto,
    ExactFinite,
    GenericRank,
    QuotientApprox(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodTag {
    ExactFinite,
    GenericRank,
    QuotientApprox,
}

impl MethodTag {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::ExactFinite => "exact_finite",
            MethodTag::GenericRank => "generic_rank",
            MethodTag::QuotientApprox => "quotient_approx",
        }
    }
}

/// dim over the group von Neumann algebra, with the method that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct VNDimension {
    pub value: BigRational,
    pub method: MethodTag,
    /// QuotientApprox only: (quotient size, normalized kernel dimension).
    pub ladder: Vec<(usize, BigRational)>,
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// One exact point on the unit torus per variable, from the rational
/// parametrization z = ((1-s^2) + 2si)/(1+s^2) which has |z| = 1 exactly.
pub fn torus_point(vars: usize, seed: u64) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..vars)
        .map(|_| {
            let num: i64 = rng.gen_range(1..=9);
            let den: i64 = rng.gen_range(10..=23);
            let s = BigRational::new(num.into(), den.into());
            let s2 = &s * &s;
            let denom = BigRational::from_integer(1.into()) + &s2;
            let re = (BigRational::from_integer(1.into()) - &s2) / &denom;
            let im = (BigRational::from_integer(2.into()) * &s) / &denom;
            Scalar::new(re, im)
        })
        .collect()
}

/// Rank of the Laurent matrix at one seeded random torus point. A lower bound
/// for the generic rank, and equal to it off a proper subvariety.
pub fn torus_eval_rank(a: &GroupRingMatrix, vars: usize, seed: u64) -> usize {
    let lm = LMat::from_group_ring_matrix(a, vars);
    let pt = torus_point(vars, seed);
    lm.eval(&pt).expect("torus points are invertible").rank()
}

/// Exact generic rank over the Laurent fraction field. Evaluation at a random
/// torus point is tried first; full rank there is a certificate. Otherwise the
/// fraction-free elimination settles it exactly.
pub fn generic_rank(a: &GroupRingMatrix, vars: usize, seed: u64) -> usize {
    let bound = a.rows.min(a.cols);
    if bound == 0 {
        return 0;
    }
    let lm = LMat::from_group_ring_matrix(a, vars);
    let pt = torus_point(vars, seed);
    let evaluated = lm.eval(&pt).expect("torus points are invertible").rank();
    if evaluated == bound {
        return evaluated;
    }
    lm.rank_generic()
}

fn quotient_ladder(n: usize) -> Vec<usize> {
    let mut sizes = vec![(n / 4).max(2), (n / 2).max(2), n];
    sizes.retain(|&s| s <= n);
    sizes.sort_unstable();
    sizes.dedup();
    sizes
}

pub fn vn_kernel_dim(a: &GroupRingMatrix, group: &GroupSpec, mode: Mode) -> Result<VNDimension> {
    vn_kernel_dim_seeded(a, group, mode, DEFAULT_SEED)
}

pub fn vn_kernel_dim_seeded(
    a: &GroupRingMatrix,
    group: &GroupSpec,
    mode: Mode,
    seed: u64,
) -> Result<VNDimension> {
    let mode = match (mode, group) {
        (Mode::Auto, GroupSpec::Finite(_)) => Mode::ExactFinite,
        (Mode::Auto, GroupSpec::FreeAbelian { .. }) => Mode::GenericRank,
        (m, _) => m,
    };
    match mode {
        Mode::Auto => unreachable!(),
        Mode::ExactFinite => {
            let GroupSpec::Finite(_) = group else {
                return Err(Error::ModeMismatch(
                    "exact finite mode needs a finite group".into(),
                ));
            };
            let order = group.order().expect("finite group has an order");
            let scalar_kernel = a.realize_finite(group).kernel_dim();
            Ok(VNDimension {
                value: ratio(scalar_kernel, order),
                method: MethodTag::ExactFinite,
                ladder: Vec::new(),
            })
        }
        Mode::GenericRank => {
            let GroupSpec::FreeAbelian { rank } = group else {
                return Err(Error::ModeMismatch(
                    "generic rank mode needs a free abelian group".into(),
                ));
            };
            let r = generic_rank(a, *rank, seed);
            Ok(VNDimension {
                value: ratio(a.cols - r, 1),
                method: MethodTag::GenericRank,
                ladder: Vec::new(),
            })
        }
        Mode::QuotientApprox(n) => {
            let GroupSpec::FreeAbelian { rank } = group else {
                return Err(Error::ModeMismatch(
                    "quotient approximation needs a free abelian group".into(),
                ));
            };
            if n == 0 {
                return Err(Error::InvalidInput("quotient size must be positive".into()));
            }
            let d = *rank;
            let mut ladder = Vec::new();
            for s in quotient_ladder(n) {
                let cells = s.pow(d as u32);
                let k = a.realize_quotient(d, s).kernel_dim();
                ladder.push((s, ratio(k, cells)));
            }
            let value = ladder.last().expect("ladder is nonempty").1.clone();
            Ok(VNDimension { value, method: MethodTag::QuotientApprox, ladder })
        }
    }
}

/// cols - dim ker, as an exact rational.
pub fn vn_rank(a: &GroupRingMatrix, group: &GroupSpec, mode: Mode) -> Result<BigRational> {
    let k = vn_kernel_dim(a, group, mode)?;
    Ok(ratio(a.cols, 1) - k.value)
}

/// [[re, -im], [im, re]] block realification of a complex matrix. The map is
/// a *-homomorphism: it turns products into products and adjoints into
/// transposes, and doubles every eigenvalue's multiplicity.
pub(crate) fn realify_parts(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = (re.nrows(), re.ncols());
    let mut big = DMatrix::zeros(2 * rows, 2 * cols);
    for r in 0..rows {
        for c in 0..cols {
            big[(r, c)] = re[(r, c)];
            big[(r, cols + c)] = -im[(r, c)];
            big[(rows + r, c)] = im[(r, c)];
            big[(rows + r, cols + c)] = re[(r, c)];
        }
    }
    big
}

/// Eigenvalues of a realified Hermitian matrix. Realification doubles every
/// eigenvalue's multiplicity, so every second sorted value is returned.
fn hermitian_eigenvalues(re: &DMatrix<f64>, im: &DMatrix<f64>) -> Vec<f64> {
    if re.nrows() == 0 {
        return Vec::new();
    }
    let big = realify_parts(re, im);
    let sym = (&big + big.transpose()) * 0.5;
    let mut vals: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    vals.into_iter().step_by(2).collect()
}

/// Entrywise value of the matrix under the character k of (Z/n)^d.
pub(crate) fn eval_character(
    a: &GroupRingMatrix,
    k: &[usize],
    n: usize,
) -> (DMatrix<f64>, DMatrix<f64>) {
    use crate::group::Elt;
    let mut re = DMatrix::zeros(a.rows, a.cols);
    let mut im = DMatrix::zeros(a.rows, a.cols);
    let step = 2.0 * std::f64::consts::PI / n as f64;
    for r in 0..a.rows {
        for c in 0..a.cols {
            for (g, coef) in a.get(r, c).support() {
                let v = match g {
                    Elt::Vector(v) => v,
                    Elt::Finite(_) => panic!("finite element under a torus character"),
                };
                let phase: f64 = v
                    .iter()
                    .zip(k)
                    .map(|(&e, &kj)| e as f64 * kj as f64)
                    .sum::<f64>()
                    * step;
                let (cr, ci) = coef.to_f64_pair();
                let (s, co) = phase.sin_cos();
                re[(r, c)] += cr * co - ci * s;
                im[(r, c)] += cr * s + ci * co;
            }
        }
    }
    (re, im)
}

/// Eigenvalues with multiplicity of the finite quotient model of a
/// self-adjoint matrix: the full realization for a finite group, the direct
/// sum over characters of (Z/n)^d for a free abelian one. Sorted ascending.
pub fn spectral_samples(a: &GroupRingMatrix, group: &GroupSpec, n: usize) -> Result<Vec<f64>> {
    if !a.is_self_adjoint(group) {
        return Err(Error::InvalidInput("spectral samples need a self-adjoint matrix".into()));
    }
    let mut vals = match group {
        GroupSpec::Finite(_) => {
            let (re, im) = a.realize_finite(group).to_f64_parts();
            hermitian_eigenvalues(&re, &im)
        }
        GroupSpec::FreeAbelian { rank } => {
            if n == 0 {
                return Err(Error::InvalidInput("quotient size must be positive".into()));
            }
            let d = *rank;
            let total = n.pow(d as u32);
            let mut out = Vec::with_capacity(total * a.rows);
            let mut k = vec![0usize; d];
            for _ in 0..total {
                let (re, im) = eval_character(a, &k, n);
                out.extend(hermitian_eigenvalues(&re, &im));
                for kj in k.iter_mut() {
                    *kj += 1;
                    if *kj < n {
                        break;
                    }
                    *kj = 0;
                }
            }
            out
        }
    };
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(vals)
}

#[derive(Clone, Debug, PartialEq)]
pub enum NsOutcome {
    /// log F vs log lambda least-squares slope over the fitted window.
    Slope { slope: f64, window: (f64, f64), points: usize },
    /// 0 is isolated in the spectrum: nothing to fit, which is itself a
    /// meaningful diagnostic.
    Gap,
}

/// Density-of-states slope near zero, from normalized eigenvalue counting
/// functions on a ladder of quotient sizes.
///
/// Window heuristic: lambda from the smallest positive eigenvalue at the
/// largest size up to the median positive eigenvalue at the largest size. The
/// counting functions are read on a log-spaced grid and pooled over all sizes;
/// fewer than five usable points, a window that fails to shrink with the
/// quotient size, or no positive eigenvalues at all report a gap.
pub fn ns_probe(a: &GroupRingMatrix, group: &GroupSpec, sizes: &[usize]) -> Result<NsOutcome> {
    if sizes.len() < 2 {
        return Err(Error::InvalidInput("need at least two quotient sizes".into()));
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let d = match group {
        GroupSpec::FreeAbelian { rank } => *rank,
        GroupSpec::Finite(_) => {
            return Err(Error::ModeMismatch(
                "density slope probe needs a free abelian group".into(),
            ))
        }
    };
    let mut positives: Vec<Vec<f64>> = Vec::new();
    for &n in &sizes {
        let s = spectral_samples(a, group, n)?;
        positives.push(s.into_iter().filter(|&x| x > KERNEL_TOL).collect());
    }
    let largest = positives.last().expect("at least two sizes");
    if largest.is_empty() {
        return Ok(NsOutcome::Gap);
    }
    let lo = largest[0];
    let hi = largest[largest.len() / 2];
    if hi <= lo {
        return Ok(NsOutcome::Gap);
    }
    // bottom of the positive spectrum must move toward 0 along the ladder
    if let Some(first) = positives.first().and_then(|p| p.first()) {
        if lo / first >= 0.9 {
            return Ok(NsOutcome::Gap);
        }
    }
    const GRID: usize = 48;
    let (lln, lhn) = (lo.ln(), hi.ln());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (idx, &n) in sizes.iter().enumerate() {
        let cells = (n as f64).powi(d as i32);
        let pos = &positives[idx];
        for g in 0..GRID {
            let lam = (lln + (lhn - lln) * g as f64 / (GRID - 1) as f64).exp();
            let count = pos.partition_point(|&x| x <= lam);
            if count > 0 {
                xs.push(lam.ln());
                ys.push((count as f64 / cells).ln());
            }
        }
    }
    if xs.len() < 5 {
        return Ok(NsOutcome::Gap);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        return Ok(NsOutcome::Gap);
    }
    Ok(NsOutcome::Slope { slope: num / den, window: (lo, hi), points: xs.len() })
}
