//! Randomized structural properties across the exact pipeline: composition
//! laws, adjoint symmetry, rank identities, invariance under refinement, and
//! agreement with the Smith reduction oracle.

mod common;

use common::{random_sheaf, random_zk_complex, snf_betti_constant, snf_rank};
use num::{BigRational, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use l2sheaf_core::chain::build_cochain;
use l2sheaf_core::complex::fixtures;
use l2sheaf_core::duality::{comparison_mono, verdier_dual};
use l2sheaf_core::l2::{l2_betti, l2_of_complex};
use l2sheaf_core::sheaf::{constant_sheaf, direct_sum, subdivision_pullback};
use l2sheaf_core::vn::{vn_kernel_dim, vn_rank, Mode, DEFAULT_SEED};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn cochain_structure_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for trial in 0..12 {
        let k = rng.gen_range(1..=6);
        let c = random_zk_complex(&mut rng, k);
        let f = random_sheaf(&mut rng, &c, trial % 3 == 0);
        let b = build_cochain(&c, &f).unwrap();
        b.complex.check_composition(&b.base.group).unwrap();
        for d in &b.complex.diffs {
            let back = d.adjoint(&b.base.group).adjoint(&b.base.group);
            assert_eq!(back, *d, "adjoint is an involution");
        }
        for deg in b.complex.lo..=b.complex.hi() {
            let lap = b.complex.laplacian(deg, &b.base.group).unwrap();
            assert!(lap.is_self_adjoint(&b.base.group), "Laplacian self adjoint");
        }
    }
}

#[test]
fn generic_rank_seed_independent_and_rank_nullity() {
    let c = fixtures::torus_grid();
    let f = constant_sheaf(&c, 2);
    let b = build_cochain(&c, &f).unwrap();
    for d in &b.complex.diffs {
        let k1 = vn_kernel_dim(d, &b.base.group, Mode::GenericRank).unwrap();
        let k2 = l2sheaf_core::vn::vn_kernel_dim_seeded(
            d,
            &b.base.group,
            Mode::GenericRank,
            DEFAULT_SEED ^ 0x5a5a,
        )
        .unwrap();
        assert_eq!(k1.value, k2.value, "generic kernel is evaluation point independent");
        let r = vn_rank(d, &b.base.group, Mode::GenericRank).unwrap();
        assert_eq!(r + k1.value, ratio(d.cols as i64, 1), "rank plus nullity is the column count");
    }
}

#[test]
fn rank_nullity_exact_finite_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    for _ in 0..6 {
        let k = rng.gen_range(2..=6);
        let c = random_zk_complex(&mut rng, k);
        let f = random_sheaf(&mut rng, &c, true);
        let b = build_cochain(&c, &f).unwrap();
        for d in &b.complex.diffs {
            let r = vn_rank(d, &b.base.group, Mode::ExactFinite).unwrap();
            let n = vn_kernel_dim(d, &b.base.group, Mode::ExactFinite).unwrap();
            assert_eq!(r + n.value, ratio(d.cols as i64, 1));
        }
    }
}

#[test]
fn gram_traces_are_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(403);
    for _ in 0..5 {
        let k = rng.gen_range(1..=5);
        let c = random_zk_complex(&mut rng, k);
        let f = random_sheaf(&mut rng, &c, true);
        let b = build_cochain(&c, &f).unwrap();
        for d in &b.complex.diffs {
            let gram = d.adjoint(&b.base.group).mul(d, &b.base.group).unwrap();
            for i in 0..gram.rows {
                let t = gram.get(i, i).trace_vn(&b.base.group);
                assert!(t.is_real(), "diagonal Gram traces are real");
                assert!(t.re() >= &BigRational::zero(), "diagonal Gram traces are nonnegative");
            }
        }
    }
}

#[test]
fn refinement_invariance_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..6 {
        let k = rng.gen_range(1..=4);
        let c = random_zk_complex(&mut rng, k);
        let f = random_sheaf(&mut rng, &c, trial % 2 == 0);
        let before = l2_betti(&c, &f, Mode::ExactFinite).unwrap();
        let (sub, map) = c.barycentric_subdivision().unwrap();
        let pulled = subdivision_pullback(&c, &f, &sub, &map).unwrap();
        let after = l2_betti(&sub, &pulled, Mode::ExactFinite).unwrap();
        for d in &before.degrees {
            assert_eq!(
                Some(&d.betti),
                after.betti(d.degree),
                "degree {} invariant under refinement",
                d.degree
            );
        }
        assert_eq!(before.euler, after.euler);
    }
}

#[test]
fn betti_additive_over_direct_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    for _ in 0..4 {
        let k = rng.gen_range(1..=5);
        let c = random_zk_complex(&mut rng, k);
        let f = random_sheaf(&mut rng, &c, false);
        let g = random_sheaf(&mut rng, &c, false);
        let sum = direct_sum(&f, &g).unwrap();
        let bf = l2_betti(&c, &f, Mode::ExactFinite).unwrap();
        let bg = l2_betti(&c, &g, Mode::ExactFinite).unwrap();
        let bs = l2_betti(&c, &sum, Mode::ExactFinite).unwrap();
        for d in &bs.degrees {
            let expect = bf.betti(d.degree).unwrap().clone() + bg.betti(d.degree).unwrap();
            assert_eq!(d.betti, expect, "degree {} additive", d.degree);
        }
    }
}

#[test]
fn quotient_ladder_brackets_generic_answer() {
    let circle = fixtures::circle();
    let f = constant_sheaf(&circle, 1);
    let generic = l2_betti(&circle, &f, Mode::GenericRank).unwrap();
    let approx = l2_betti(&circle, &f, Mode::QuotientApprox(8)).unwrap();
    for d in &generic.degrees {
        let diff = (approx.betti(d.degree).unwrap() - &d.betti).abs();
        assert!(diff <= ratio(1, 8), "degree {} off by {diff}", d.degree);
    }

    let torus = fixtures::torus_grid();
    let f = constant_sheaf(&torus, 1);
    let generic = l2_betti(&torus, &f, Mode::GenericRank).unwrap();
    let approx = l2_betti(&torus, &f, Mode::QuotientApprox(2)).unwrap();
    for d in &generic.degrees {
        let diff = (approx.betti(d.degree).unwrap() - &d.betti).abs();
        assert!(diff <= ratio(1, 2), "degree {} off by {diff}", d.degree);
    }
}

#[test]
fn elimination_rank_matches_smith_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(406);
    for _ in 0..8 {
        let c = random_zk_complex(&mut rng, 1);
        let f = random_sheaf(&mut rng, &c, true);
        let b = build_cochain(&c, &f).unwrap();
        for d in &b.complex.diffs {
            let plain = d.augmentation();
            assert_eq!(plain.rank(), snf_rank(&plain), "two rank engines agree");
        }
    }
}

#[test]
fn trivial_group_betti_matches_independent_assembly() {
    let mut rng = ChaCha8Rng::seed_from_u64(407);
    for _ in 0..8 {
        let c = random_zk_complex(&mut rng, 1);
        let f = constant_sheaf(&c, 1);
        let report = l2_betti(&c, &f, Mode::ExactFinite).unwrap();
        let oracle = snf_betti_constant(&c);
        for (k, expect) in oracle.iter().enumerate() {
            assert_eq!(report.betti(k as i64), Some(expect), "degree {k}");
        }
    }
}

#[test]
fn dual_of_real_sheaf_stays_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(408);
    for _ in 0..4 {
        let k = rng.gen_range(1..=4);
        let c = random_zk_complex(&mut rng, k);
        let f = random_sheaf(&mut rng, &c, false);
        assert!(f.real);
        let build = verdier_dual(&c, &f).unwrap();
        for term in &build.dual.sheaves {
            assert!(term.real, "dual terms carry the real flag");
            for level in &term.cores {
                for orbit in level {
                    for m in orbit {
                        assert!(m.is_real(), "dual corestrictions stay real");
                    }
                }
            }
        }
        for phi in &build.dual.maps {
            for level in phi {
                for m in level {
                    assert!(m.is_real(), "dual boundary maps stay real");
                }
            }
        }
    }
}

#[test]
fn comparison_mono_injective_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(409);
    for _ in 0..4 {
        let k = rng.gen_range(1..=4);
        let c = random_zk_complex(&mut rng, k);
        let f = random_sheaf(&mut rng, &c, false);
        let mb = comparison_mono(&c, &f).unwrap();
        for m in &mb.mono {
            if m.cols == 0 {
                continue;
            }
            let r = vn_rank(m, &mb.dual.base.group, Mode::ExactFinite).unwrap();
            assert_eq!(r, ratio(m.cols as i64, 1), "mono has full column rank");
        }
        let quot = l2_of_complex(&mb.quotient, &mb.dual.base.group, Mode::ExactFinite, DEFAULT_SEED)
            .unwrap();
        for d in &quot.degrees {
            assert!(d.betti.is_zero(), "quotient degree {} acyclic", d.degree);
        }
    }
}
