use std::f64::consts::PI;

use kerr_core::entropy::{renyi_entropy, renyi_uncertainty_sum, Grid1D, RenyiPair, WavefunctionBasis};
use kerr_core::fock::{
    fidelity, rotate_state, superposed_state, superposed_state_by_sum, truncation_dim, FockState, DEFAULT_EPS,
};
use kerr_core::kerr::evolve_fraction;
use kerr_core::moments::{a_pow_symmetric, ladder_moment_oracle, quadrature_moment_raw, Quadrature};
use kerr_core::schedule::{burst_events, gcd, predicted_events};
use kerr_core::wigner::{wigner_field, wigner_marginals, PhaseSpaceGrid};
use kerr_core::{Complex64, SuperpositionSpec};
use proptest::prelude::*;

fn spec_strategy(max_l: usize, max_nu: f64) -> impl Strategy<Value = SuperpositionSpec> {
    (1..=max_l, 0usize..8, 1.0..max_nu, 0.0..2.0 * PI)
        .prop_map(|(l, h, nu, theta)| SuperpositionSpec::new(l, h % l, nu, theta).expect("valid"))
}

fn build(spec: &SuperpositionSpec) -> FockState {
    superposed_state(spec, truncation_dim(spec.nu, DEFAULT_EPS)).expect("builds")
}

fn small_state() -> impl Strategy<Value = FockState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..12).prop_filter_map("nonzero", |v| {
        let mut amps: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        amps.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(30));
        FockState::from_amplitudes(amps).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn states_are_normalized_on_their_progression(spec in spec_strategy(5, 60.0)) {
        let s = build(&spec);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        for (n, c) in s.amplitudes().iter().enumerate() {
            if n % spec.l != spec.h {
                prop_assert_eq!(c.norm(), 0.0);
            }
        }
    }

    #[test]
    fn progression_matches_coherent_sum(spec in spec_strategy(5, 40.0).prop_filter("avoid cancellation", |s| s.nu > 4.0)) {
        let n = truncation_dim(spec.nu, DEFAULT_EPS);
        let a = superposed_state(&spec, n).unwrap();
        let b = superposed_state_by_sum(&spec, n).unwrap();
        prop_assert!(1.0 - fidelity(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn rotation_keeps_populations(s in small_state(), phi in -10.0..10.0f64) {
        let r = rotate_state(&s, phi);
        for (a, b) in s.amplitudes().iter().zip(r.amplitudes()) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn fidelity_ignores_global_phase(s in small_state(), phase in 0.0..2.0 * PI) {
        let turned: Vec<Complex64> = s.amplitudes().iter().map(|c| c * Complex64::from_polar(1.0, phase)).collect();
        let t = FockState::from_amplitudes(turned).unwrap();
        prop_assert!((fidelity(&s, &t).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn evolution_is_unitary_and_composes(spec in spec_strategy(4, 50.0), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let s = build(&spec);
        let once = evolve_fraction(&s, a + b);
        let twice = evolve_fraction(&evolve_fraction(&s, a), b);
        prop_assert!((once.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(1.0 - fidelity(&once, &twice).unwrap() < 1e-11);
    }

    #[test]
    fn full_revival_is_exact(spec in spec_strategy(5, 100.0), cycles in 1u32..4) {
        let s = build(&spec);
        prop_assert!(1.0 - fidelity(&s, &evolve_fraction(&s, cycles as f64)).unwrap() < 1e-12);
    }

    #[test]
    fn rotation_times_are_rigid_rotations(l in 2usize..=5, j in 1u64..25, nu in 2.0..30.0f64) {
        let l2 = (l * l) as u64;
        let j = 1 + (j - 1) % (l2 - 1);
        let spec = SuperpositionSpec::symmetric(l, nu).unwrap();
        let s = build(&spec);
        let evolved = evolve_fraction(&s, j as f64 / l2 as f64);
        let angle = PI * j as f64 * (l as f64 - 1.0) / l2 as f64;
        prop_assert!(1.0 - fidelity(&evolved, &rotate_state(&s, angle)).unwrap() < 1e-10);
    }

    #[test]
    fn odd_selection_rule(spec in spec_strategy(5, 40.0), tau in 0.0..1.0f64, r in 0usize..3, s in 1usize..9) {
        prop_assume!(s % spec.l != 0);
        let st = evolve_fraction(&build(&spec).padded(r + s), tau);
        prop_assert_eq!(ladder_moment_oracle(&st, r, s).norm(), 0.0);
    }

    #[test]
    fn quadrature_moments_are_real(spec in spec_strategy(4, 40.0), tau in 0.0..1.0f64, k in 1usize..9) {
        let st = evolve_fraction(&build(&spec).padded(k), tau);
        for q in [Quadrature::X, Quadrature::P] {
            let (v, scale) = quadrature_moment_raw(&st, q, k).unwrap();
            prop_assert!(v.im.abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn symmetric_ladder_closed_form(l in 1usize..=5, mult in 1u32..3, nu in 5.0..60.0f64, theta in 0.0..2.0 * PI, tau in 0.0..1.0f64) {
        let s = l as u32 * mult;
        let spec = SuperpositionSpec::new(l, 0, nu, theta).unwrap();
        let st = evolve_fraction(&build(&spec).padded(s as usize), tau);
        let oracle = ladder_moment_oracle(&st, 0, s as usize);
        let closed = a_pow_symmetric(l, nu, theta, 1.0, tau * PI, s);
        prop_assert!((oracle - closed).norm() <= 1e-9 * nu.powf(s as f64 / 2.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn uncertainty_sum_respects_bound(spec in spec_strategy(4, 30.0), tau in 0.0..1.0f64, zeta in 0.55..3.0f64) {
        let pair = RenyiPair::from_zeta(zeta).unwrap();
        let st = evolve_fraction(&build(&spec), tau);
        let v = renyi_uncertainty_sum(&st, pair, &Grid1D::for_nu(spec.nu)).unwrap();
        prop_assert!(v >= pair.bound() - 1e-6, "sum {} below bound {}", v, pair.bound());
    }

    #[test]
    fn densities_integrate_to_one(spec in spec_strategy(4, 30.0), tau in 0.0..1.0f64) {
        let st = evolve_fraction(&build(&spec), tau);
        let basis = WavefunctionBasis::new(Grid1D::for_nu(spec.nu), st.dim()).unwrap();
        prop_assert!((basis.position_density(&st).unwrap().integral() - 1.0).abs() < 1e-10);
        prop_assert!((basis.momentum_density(&st).unwrap().integral() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shannon_is_the_order_one_limit(spec in spec_strategy(3, 20.0), tau in 0.0..1.0f64) {
        let st = evolve_fraction(&build(&spec), tau);
        let basis = WavefunctionBasis::new(Grid1D::for_nu(spec.nu), st.dim()).unwrap();
        let d = basis.position_density(&st).unwrap();
        let at_one = renyi_entropy(&d, 1.0).unwrap();
        let delta = 1e-4;
        let (up, down) = (renyi_entropy(&d, 1.0 + delta).unwrap(), renyi_entropy(&d, 1.0 - delta).unwrap());
        prop_assert!((up - at_one).abs() < 1e-2 && (down - at_one).abs() < 1e-2);
        // the first-order slope cancels in the midpoint
        prop_assert!((0.5 * (up + down) - at_one).abs() < 1e-6);
        let bound_one = RenyiPair::from_zeta(1.0).unwrap().bound();
        prop_assert!((bound_one - (1.0 + PI.ln())).abs() < 1e-15);
        prop_assert!((RenyiPair::from_zeta(1.0 + 1e-6).unwrap().bound() - bound_one).abs() < 1e-6);
    }

    #[test]
    fn entropy_is_stable_under_grid_halving(spec in spec_strategy(3, 30.0), tau in 0.0..1.0f64) {
        let st = evolve_fraction(&build(&spec), tau);
        let g = Grid1D::for_nu(spec.nu);
        let pair = RenyiPair::default();
        let coarse = renyi_uncertainty_sum(&st, pair, &g).unwrap();
        let fine = renyi_uncertainty_sum(&st, pair, &g.refined()).unwrap();
        prop_assert!((coarse - fine).abs() < 1e-6, "coarse {} fine {}", coarse, fine);
    }

    #[test]
    fn wigner_marginals_are_densities(s in small_state()) {
        let grid = PhaseSpaceGrid::square(8.0, 161).unwrap();
        let field = wigner_field(&s, &grid);
        let (mx, mp) = wigner_marginals(&field);
        let basis = WavefunctionBasis::new(Grid1D::new(-8.0, grid.dx(), grid.n_x).unwrap(), s.dim()).unwrap();
        let rho = basis.position_density(&s).unwrap();
        let gamma = basis.momentum_density(&s).unwrap();
        for (a, b) in mx.iter().zip(rho.values()).chain(mp.iter().zip(gamma.values())) {
            prop_assert!((a - b).abs() < 1e-6);
        }
        prop_assert!((field.normalization() - 1.0).abs() < 1e-6);
    }
}

proptest! {
    #[test]
    fn schedule_is_reduced_sorted_and_unique(l in 1u64..=5, k_max in 2u64..8, lo in 0.0..0.5f64, width in 0.1..0.5f64) {
        let window = (lo, lo + width);
        let events = predicted_events(l, k_max, window);
        for pair in events.windows(2) {
            prop_assert!(pair[0].fraction() < pair[1].fraction());
        }
        for e in &events {
            prop_assert_eq!(gcd(e.j, e.d), 1);
            prop_assert!(e.fraction() >= window.0 - 1e-12 && e.fraction() <= window.1 + 1e-12);
            prop_assert!(e.k >= 1 && e.k <= k_max);
            // l²τ = j·l²/d reduces to denominator k
            prop_assert_eq!(e.d / gcd(e.d, l * l), e.k);
        }
    }

    #[test]
    fn coherent_schedule_is_the_coprime_rule(k_max in 2u64..10) {
        let events = predicted_events(1, k_max, (0.0, 1.0));
        let mut expected: Vec<(u64, u64)> = (2..=k_max)
            .flat_map(|k| (1..k).filter(move |&j| gcd(j, k) == 1).map(move |j| (j, k)))
            .collect();
        expected.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
        let got: Vec<(u64, u64)> = events.iter().map(|e| (e.j, e.d)).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn burst_times_are_scheduled_events(l in 1u64..=5, mult in 1u64..4, extra in 0u64..2) {
        let power = l * mult + extra;
        let bursts = burst_events(l, power, (0.0, 1.0));
        let all = predicted_events(l, power.max(2), (0.0, 1.0));
        for b in &bursts {
            prop_assert!(all.iter().any(|e| e.j == b.j && e.d == b.d && e.k == b.k));
        }
    }
}
