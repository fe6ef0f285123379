//! Property tests for the structural invariants: group-kernel identities
//! over the whole parameter space, pairing symmetries, and path-level
//! roundtrips.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use ymloop_core::fock::{exp_overlap, ExpVectorLabel};
use ymloop_core::gauge::{LatticeField, SamplePoint};
use ymloop_core::group::{
    adjoint, character, character_k, inner, AlgebraVector, ComplexAlgebraVector, GroupSpec, Rep,
};
use ymloop_core::paths::{ito_map, translate, IncrementPath, LoopFactor, Profile, SmoothLoop};
use ymloop_core::stats::shard_rng;

fn coeff3() -> impl Strategy<Value = [f64; 3]> {
    [-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0]
}

fn small_complex3() -> impl Strategy<Value = [(f64, f64); 3]> {
    let c = (-0.8f64..0.8, -0.8f64..0.8);
    [c.clone(), c.clone(), c]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_map_inverse_cancels(c in coeff3()) {
        let x = AlgebraVector::new(GroupSpec::Su2, &c);
        let g = x.exp().mul(&x.scale(-1.0).exp());
        prop_assert!(g.dist(&GroupSpec::Su2.identity()) < 1e-12);
    }

    #[test]
    fn exp_map_unitary_for_real_algebra(c in coeff3()) {
        let g = AlgebraVector::new(GroupSpec::Su2, &c).exp();
        prop_assert!(g.unitarity_defect() < 1e-12);
    }

    #[test]
    fn adjoint_action_composes(seed in 0u64..1000, c in small_complex3()) {
        let mut rng = shard_rng(seed, 0);
        let g = GroupSpec::Su2.haar_sample(&mut rng);
        let h = GroupSpec::Su2.haar_sample(&mut rng);
        let x = ComplexAlgebraVector::new(
            GroupSpec::Su2,
            &[C64::new(c[0].0, c[0].1), C64::new(c[1].0, c[1].1), C64::new(c[2].0, c[2].1)],
        );
        let lhs = adjoint(&g.mul(&h), &x);
        let rhs = adjoint(&g, &adjoint(&h, &x));
        prop_assert!(lhs.sub(&rhs).norm_sq().sqrt() < 1e-12);
        // The pairing is preserved.
        let ax = adjoint(&g, &x);
        prop_assert!((inner(&ax, &ax) - inner(&x, &x)).norm() < 1e-12);
    }

    #[test]
    fn characters_are_class_functions(seed in 0u64..1000, tj in 0u32..7) {
        let mut rng = shard_rng(seed, 1);
        let sigma = ComplexAlgebraVector::new(
            GroupSpec::Su2,
            &[C64::new(0.4, 0.3), C64::new(-0.2, 0.2), C64::new(0.1, -0.3)],
        ).exp();
        let g = GroupSpec::Su2.haar_sample(&mut rng).complexify();
        let conj = g.mul(&sigma).mul(&g.inverse());
        let rep = Rep::Su2 { twice_j: tj };
        let a = character(rep, &sigma);
        let b = character(rep, &conj);
        prop_assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn character_at_inverse_conjugates(seed in 0u64..1000, tj in 0u32..6) {
        let mut rng = shard_rng(seed, 2);
        let k = GroupSpec::Su2.haar_sample(&mut rng);
        let rep = Rep::Su2 { twice_j: tj };
        let a = character_k(rep, &k.inverse());
        let b = character_k(rep, &k).conj();
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn exp_overlap_hermitian_symmetry(seed in 0u64..500) {
        let mut rng = shard_rng(seed, 3);
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            use rand::Rng;
            let c: Vec<C64> = (0..6)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            ExpVectorLabel::new(LatticeField::sample(
                move |t| {
                    let tau = 2.0 * std::f64::consts::PI * t;
                    ComplexAlgebraVector::new(
                        GroupSpec::Su2,
                        &[
                            c[0] + c[1] * tau.cos(),
                            c[2] + c[3] * tau.sin(),
                            c[4] + c[5] * (2.0 * tau).cos(),
                        ],
                    )
                },
                12,
                SamplePoint::Left,
            ))
        };
        let w = mk(&mut rng);
        let z = mk(&mut rng);
        let a = exp_overlap(&w, &z).unwrap();
        let b = exp_overlap(&z, &w).unwrap().conj();
        prop_assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
        // Cauchy-Schwarz for the exponential kernel.
        let nw = exp_overlap(&w, &w).unwrap().re;
        let nz = exp_overlap(&z, &z).unwrap().re;
        prop_assert!(a.norm_sqr() <= nw * nz * (1.0 + 1e-12));
    }

    #[test]
    fn translate_roundtrip_and_pinning(seed in 0u64..500, amp in 0.05f64..0.4) {
        let chi = SmoothLoop::new(
            GroupSpec::Su2,
            vec![LoopFactor {
                direction: AlgebraVector::new(GroupSpec::Su2, &[0.6, 0.0, 0.8]),
                profile: Profile::contractible(vec![(1, amp), (2, -0.4 * amp)]),
            }],
        ).unwrap();
        let mut rng = shard_rng(seed, 4);
        let p = ito_map(&ymloop_core::paths::sample_increments(&mut rng, 32, 1.0, GroupSpec::Su2));
        let round = translate(&translate(&p, &chi), &chi.inverse());
        let worst = round
            .points()
            .iter()
            .zip(p.points())
            .map(|(a, b)| a.dist(b))
            .fold(0.0f64, f64::max)
            ;
        prop_assert!(worst < 1e-12);
    }

    #[test]
    fn increment_energy_scales_quadratically(scale in 0.1f64..2.0, seed in 0u64..200) {
        let mut rng = shard_rng(seed, 5);
        let p = ymloop_core::paths::sample_increments(&mut rng, 16, 1.0, GroupSpec::U1);
        let scaled = IncrementPath::new(
            1.0,
            p.increments().iter().map(|d| d.scale(scale)).collect(),
        );
        prop_assert!((scaled.energy() - scale * scale * p.energy()).abs() < 1e-10 * p.energy());
    }
}
