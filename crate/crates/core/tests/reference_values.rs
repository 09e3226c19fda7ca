//! Reference values checked against oracles written independently of the
//! library code paths they exercise.

use std::f64::consts::{FRAC_PI_4, PI};

use kerr_core::entropy::{renyi_uncertainty_sum, simpson, Grid1D, RenyiPair, WavefunctionBasis};
use kerr_core::fock::{
    coherent_state, fidelity, normalization_n2, rotate_state, superposed_state, truncation_dim, FockState,
    DEFAULT_EPS,
};
use kerr_core::kerr::{autocorrelation, evolve_fraction};
use kerr_core::moments::{
    a_pow_even_cs, a_pow_psi3, ladder_expectation_coherent, ladder_moment_oracle, moment_series, x2_even_cs,
    x3_psi3, x_moment_oracle, Quadrature,
};
use kerr_core::schedule::{burst_events, detect_bursts, match_report, predicted_events, BurstConfig};
use kerr_core::wigner::{count_lobes, wigner_field, wigner_marginals, PhaseSpaceGrid};
use kerr_core::{Complex64, SuperpositionSpec, TimeGrid};

fn symmetric(l: usize, nu: f64) -> FockState {
    let spec = SuperpositionSpec::symmetric(l, nu).unwrap();
    superposed_state(&spec, truncation_dim(nu, DEFAULT_EPS)).unwrap()
}

/// `e^{-ν/2} αⁿ/√n!` by direct products, no log-space tricks.
fn naive_coherent(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..=n_max {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

#[test]
fn triple_state_normalization_matches_gram_matrix() {
    let nu: f64 = 20.0;
    let alpha = Complex64::from_polar(nu.sqrt(), FRAC_PI_4);
    let omega = |r: usize| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / 3.0);
    // ⟨αω^r|αω^s⟩ = exp(−ν + ν ω^{s−r})
    let gram: Complex64 = (0..3)
        .flat_map(|r| (0..3).map(move |s| (r, s)))
        .map(|(r, s)| (Complex64::new(-nu, 0.0) + nu * omega(s) * omega(r).conj()).exp())
        .sum();
    assert!(gram.im.abs() < 1e-12);
    let n = 1.0 / gram.re.sqrt();
    let s = symmetric(3, nu);
    let parts: Vec<Vec<Complex64>> = (0..3).map(|r| naive_coherent(alpha * omega(r), s.n_max())).collect();
    for (idx, c) in s.amplitudes().iter().enumerate() {
        let want: Complex64 = parts.iter().map(|p| p[idx]).sum::<Complex64>() * n;
        assert!((c - want).norm() < 1e-12, "n={idx}");
        if idx % 3 != 0 {
            assert_eq!(c.norm(), 0.0);
        }
    }
}

#[test]
fn even_normalization_from_gram() {
    for nu in [1.0f64, 30.0] {
        // ⟨ψ|ψ⟩ for |α⟩ + |−α⟩ is 2 + 2e^{−2ν}
        let want = 1.0 / (2.0 + 2.0 * (-2.0 * nu).exp()).sqrt();
        assert!((normalization_n2(nu) - want).abs() < 1e-15);
    }
    assert!((normalization_n2(30.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn even_state_overlaps_half_with_its_coherent_component() {
    let nu = 20.0;
    let n = truncation_dim(nu, DEFAULT_EPS);
    let f = fidelity(&symmetric(2, nu), &coherent_state(nu, FRAC_PI_4, n).unwrap()).unwrap();
    // |N₂(1 + e^{−2ν})|²
    let want = normalization_n2(nu).powi(2) * (1.0 + (-2.0 * nu).exp()).powi(2);
    assert!((f - want).abs() < 1e-12);
    assert!((f - 0.5).abs() < 1e-6);
}

#[test]
fn rotated_even_state_is_even_state_at_rotated_amplitude() {
    let nu = 20.0;
    let n = truncation_dim(nu, DEFAULT_EPS);
    let turned = rotate_state(&symmetric(2, nu), FRAC_PI_4);
    let direct = superposed_state(&SuperpositionSpec::new(2, 0, nu, 0.0).unwrap(), n).unwrap();
    assert!(1.0 - fidelity(&turned, &direct).unwrap() < 1e-13);
}

/// Best rotation angle by a coarse scan refined with ternary search.
fn best_rotation(target: &FockState, reference: &FockState, period: f64) -> (f64, f64) {
    let f = |phi: f64| fidelity(target, &rotate_state(reference, phi)).unwrap();
    let steps = 3600;
    let h = period / steps as f64;
    let (mut best, mut best_f) = (0.0, f64::MIN);
    for i in 0..steps {
        let phi = i as f64 * h;
        let v = f(phi);
        if v > best_f {
            (best, best_f) = (phi, v);
        }
    }
    let (mut lo, mut hi) = (best - h, best + h);
    for _ in 0..200 {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let phi = 0.5 * (lo + hi);
    (phi.rem_euclid(period), f(phi))
}

#[test]
fn rotation_times_scan_to_a_rigid_rotation() {
    for l in 2..=4usize {
        let nu = 20.0;
        let s = symmetric(l, nu);
        let period = 2.0 * PI / l as f64;
        for j in 1..(l * l) {
            let evolved = evolve_fraction(&s, j as f64 / (l * l) as f64);
            let (phi, f) = best_rotation(&evolved, &s, period);
            assert!(f > 1.0 - 1e-8, "l={l} j={j}: best fidelity {f}");
            let predicted = (PI * j as f64 * (l as f64 - 1.0) / (l * l) as f64).rem_euclid(period);
            let gap = (phi - predicted).abs().min(period - (phi - predicted).abs());
            assert!(gap < 1e-6, "l={l} j={j}: best angle {phi} vs {predicted}");
        }
    }
    let s = symmetric(3, 20.0);
    let (phi, _) = best_rotation(&evolve_fraction(&s, 1.0 / 9.0), &s, 2.0 * PI / 3.0);
    println!("psi3 at T/9: best-fit rotation {:.6} degrees", phi.to_degrees());
    assert!((phi.to_degrees() - 40.0).abs() < 1e-4);
}

#[test]
fn coherent_collapse_at_generic_time() {
    let s = symmetric(1, 100.0);
    let grid = TimeGrid::from_fractions(vec![0.0, 0.37, 1.0]).unwrap();
    let a = autocorrelation(&s, &grid);
    assert!((a.values()[0] - 1.0).abs() < 1e-12);
    assert!(a.values()[1] < 0.05);
    assert!((a.values()[2] - 1.0).abs() < 1e-12);
}

#[test]
fn coherent_ladder_references() {
    let nu: f64 = 100.0;
    let alpha = Complex64::from_polar(nu.sqrt(), FRAC_PI_4);
    let s0 = symmetric(1, nu).padded(8);
    for tau in [0.0, 0.21, 0.5] {
        let st = evolve_fraction(&s0, tau);
        let n = ladder_expectation_coherent(alpha, 1, 0, 1.0, tau * PI);
        assert!((n - Complex64::new(nu, 0.0)).norm() < 1e-9);
        assert!((ladder_moment_oracle(&st, 1, 0) - Complex64::new(nu, 0.0)).norm() < 1e-9);
    }
    // t = T_rev/2: cos 2χt = −1, damping e^{−2ν}
    let half = ladder_expectation_coherent(alpha, 0, 1, 1.0, PI / 2.0);
    assert!((half.norm() - nu.sqrt() * (-2.0 * nu).exp()).abs() < 1e-60);
    let oracle = ladder_moment_oracle(&evolve_fraction(&s0, 0.5), 0, 1);
    assert!((oracle - half).norm() < 1e-12 * nu.sqrt());
    // t = T_rev/4, s = 4: cos(2·4·π/4) = 1, no damping
    let burst = ladder_expectation_coherent(alpha, 0, 4, 1.0, PI / 4.0);
    assert!((burst.norm() - nu * nu).abs() < 1e-9 * nu * nu);
}

#[test]
fn even_state_second_moment_references() {
    let nu = 100.0;
    let theta = FRAC_PI_4;
    let s0 = symmetric(2, nu).padded(4);
    let at = |tau: f64| x_moment_oracle(&evolve_fraction(&s0, tau), 2).unwrap();
    assert!((x2_even_cs(nu, theta, 1.0, 0.0) - at(0.0)).abs() < 1e-9 * nu);
    let plateau = x2_even_cs(nu, theta, 1.0, 0.37 * PI);
    assert!((plateau - (nu + 0.5)).abs() < 1e-6);
    assert!((at(0.25) - plateau).abs() > 10.0);

    let a2_zero = a_pow_even_cs(nu, theta, 1.0, 0.0, 1);
    assert!((a2_zero - ladder_moment_oracle(&evolve_fraction(&s0, 0.0), 0, 2)).norm() < 1e-9 * nu);
    assert!(a_pow_even_cs(nu, theta, 1.0, 0.37 * PI, 1).norm() < 1e-20 * nu);
    // T_rev/8, k = 2: one branch undamped
    let burst = a_pow_even_cs(nu, theta, 1.0, PI / 8.0, 2);
    assert!(burst.norm() > 0.4 * nu * nu);
}

#[test]
fn triple_state_moment_references() {
    let nu = 100.0;
    let theta = FRAC_PI_4;
    let s0 = symmetric(3, nu).padded(6);
    let x3 = |tau: f64| x_moment_oracle(&evolve_fraction(&s0, tau), 3).unwrap();
    let scale = nu.powf(1.5);
    assert!((x3_psi3(nu, theta, 1.0, 0.0) - x3(0.0)).abs() < 1e-9 * scale);
    assert!(x3_psi3(nu, theta, 1.0, 0.39 * PI).abs() < 1e-20 * scale);
    assert!(x3(0.39).abs() < 1e-9 * scale);
    assert!(x3(1.0 / 9.0).abs() > 1e-3 * scale);

    let a3 = ladder_moment_oracle(&evolve_fraction(&s0, 0.0), 0, 3);
    assert!((a_pow_psi3(nu, theta, 1.0, 0.0, 1) - a3).norm() < 1e-9 * scale);
    assert!(a_pow_psi3(nu, theta, 1.0, PI / 18.0, 2).norm() > 0.1 * nu.powi(3));
    // 0.39 sits near the k = 2 event 7/18, so k = 2 uses 13/36
    assert!(a_pow_psi3(nu, theta, 1.0, 0.39 * PI, 1).norm() < 1e-20 * scale);
    assert!(a_pow_psi3(nu, theta, 1.0, 13.0 / 36.0 * PI, 2).norm() < 1e-20 * nu.powi(3));
}

#[test]
fn even_state_odd_moment_is_identically_zero() {
    let spec = SuperpositionSpec::symmetric(2, 100.0).unwrap();
    let grid = TimeGrid::uniform(0.0, 1.0, 2001).unwrap();
    let s = moment_series(&spec, Quadrature::X, 1, &grid, None).unwrap();
    assert!(s.values().iter().all(|&v| v == 0.0));
}

#[test]
fn wigner_marginals_of_vacuum_and_coherent_state() {
    let grid = PhaseSpaceGrid::square(9.0, 181).unwrap();
    let vac = wigner_field(&FockState::vacuum(10), &grid);
    let (mx, mp) = wigner_marginals(&vac);
    for (i, (a, b)) in mx.iter().zip(&mp).enumerate() {
        let u = grid.x(i);
        let want = (-u * u).exp() / PI.sqrt();
        assert!((a - want).abs() < 1e-10 && (b - want).abs() < 1e-10);
    }

    let nu = 20.0;
    let s = coherent_state(nu, FRAC_PI_4, truncation_dim(nu, DEFAULT_EPS)).unwrap();
    let field = wigner_field(&s, &PhaseSpaceGrid::square(12.0, 241).unwrap());
    let (mx, _) = wigner_marginals(&field);
    let g = field.grid();
    let x0 = (2.0 * nu).sqrt() * FRAC_PI_4.cos();
    for (i, a) in mx.iter().enumerate() {
        let u = g.x(i) - x0;
        assert!((a - (-u * u).exp() / PI.sqrt()).abs() < 1e-9);
    }
}

#[test]
fn even_state_at_eighth_revival_has_four_lobes_and_fringes() {
    let s = evolve_fraction(&symmetric(2, 20.0), 0.125);
    let field = wigner_field(&s, &PhaseSpaceGrid::for_nu(20.0));
    assert_eq!(count_lobes(&field), 4);
    let (_, _, peak) = field.argmax();
    let trough = field.values().iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(trough < -0.5 * peak, "interference fringes go negative");
}

#[test]
fn coherent_wigner_at_third_revival_has_three_lobes() {
    let s = evolve_fraction(&symmetric(1, 20.0), 1.0 / 3.0);
    assert_eq!(count_lobes(&wigner_field(&s, &PhaseSpaceGrid::for_nu(20.0))), 3);
}

#[test]
fn gaussian_states_saturate_the_bound() {
    let pair = RenyiPair::default();
    for nu in [0.0, 35.0] {
        let s = symmetric(1, nu);
        let v = renyi_uncertainty_sum(&s, pair, &Grid1D::for_nu(nu)).unwrap();
        assert!((v - pair.bound()).abs() < 1e-6, "nu={nu}: {v}");
    }
    assert!((pair.bound() - 2.0995011382916).abs() < 1e-12);
}

/// `|ψ(x)|²` from an independent Hermite evaluation on a very fine grid.
fn fine_density(s: &FockState, half: f64, points: usize, momentum: bool) -> (Vec<f64>, f64) {
    let h = 2.0 * half / (points - 1) as f64;
    let dens = (0..points)
        .map(|i| {
            let x = -half + i as f64 * h;
            let (mut prev, mut cur) = (0.0, PI.powf(-0.25) * (-0.5 * x * x).exp());
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, c) in s.amplitudes().iter().enumerate() {
                let phase = if momentum { Complex64::new(0.0, -1.0).powu(n as u32) } else { Complex64::new(1.0, 0.0) };
                acc += c * phase * cur;
                let nf = n as f64;
                let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
                (prev, cur) = (cur, next);
            }
            acc.norm_sqr()
        })
        .collect();
    (dens, h)
}

#[test]
fn triple_state_entropy_matches_fine_quadrature() {
    let nu = 30.0;
    let s = symmetric(3, nu);
    let pair = RenyiPair::default();
    let got = renyi_uncertainty_sum(&s, pair, &Grid1D::for_nu(nu)).unwrap();
    let half = (2.0 * nu).sqrt() + 6.0;
    let points = 64001;
    let (rho, h) = fine_density(&s, half, points, false);
    let (gamma, _) = fine_density(&s, half, points, true);
    let r = |d: &[f64], order: f64| {
        let f: Vec<f64> = d.iter().map(|v| v.powf(order)).collect();
        simpson(&f, h).ln() / (1.0 - order)
    };
    let oracle = r(&rho, pair.zeta()) + r(&gamma, pair.eta());
    assert!(got > pair.bound() + 1e-3);
    assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn momentum_density_is_fourier_transform_of_position() {
    let amps: Vec<Complex64> = (0..10)
        .map(|n| Complex64::new((0.3 * n as f64).cos(), (0.7 * n as f64).sin()))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)).take(20))
        .collect();
    let s = FockState::from_amplitudes(amps).unwrap();
    let grid = Grid1D::symmetric(9.0, 0.01);
    let basis = WavefunctionBasis::new(grid.clone(), s.dim()).unwrap();
    let psi = basis.position(&s).unwrap();
    let gamma = basis.momentum_density(&s).unwrap();
    for i in (0..grid.len()).step_by(97) {
        let p = grid.point(i);
        let re: Vec<f64> = (0..grid.len()).map(|k| (psi[k] * Complex64::from_polar(1.0, -p * grid.point(k))).re).collect();
        let im: Vec<f64> = (0..grid.len()).map(|k| (psi[k] * Complex64::from_polar(1.0, -p * grid.point(k))).im).collect();
        let phi = Complex64::new(grid.simpson(&re), grid.simpson(&im)) / (2.0 * PI).sqrt();
        assert!((phi.norm_sqr() - gamma.values()[i]).abs() < 1e-6, "p={p}");
    }
}

#[test]
fn even_density_is_mirror_symmetric() {
    let s = evolve_fraction(&symmetric(2, 30.0), 0.31);
    let basis = WavefunctionBasis::new(Grid1D::for_nu(30.0), s.dim()).unwrap();
    let d = basis.position_density(&s).unwrap();
    let v = d.values();
    for i in 0..v.len() / 2 {
        assert!((v[i] - v[v.len() - 1 - i]).abs() < 1e-14);
    }
}

#[test]
fn sixth_moment_of_even_state_bursts_at_twelfths_and_eighths() {
    let spec = SuperpositionSpec::symmetric(2, 100.0).unwrap();
    let grid = TimeGrid::uniform(0.0, 0.5, 2001).unwrap();
    let series = moment_series(&spec, Quadrature::X, 6, &grid, None).unwrap();
    let bursts = detect_bursts(&series, &BurstConfig::default()).unwrap();
    let twelfths: Vec<f64> = (1..=6).map(|j| j as f64 / 12.0).collect();
    for t in &twelfths {
        assert!(bursts.iter().any(|b| (b - t).abs() < 1.0 / 2000.0), "missing {t}");
    }
    let extra: Vec<f64> = bursts
        .iter()
        .cloned()
        .filter(|b| twelfths.iter().all(|t| (b - t).abs() >= 1.0 / 2000.0))
        .collect();
    // s = 4 ladder terms of x^6 light up at the eighths
    assert_eq!(extra.len(), 2);
    assert!((extra[0] - 0.125).abs() < 1.0 / 2000.0 && (extra[1] - 0.375).abs() < 1.0 / 2000.0);
}

#[test]
fn eighth_moment_of_quadruple_state_matches_its_schedule() {
    let spec = SuperpositionSpec::symmetric(4, 100.0).unwrap();
    let grid = TimeGrid::uniform(0.0, 0.5, 2001).unwrap();
    let series = moment_series(&spec, Quadrature::X, 8, &grid, None).unwrap();
    let bursts = detect_bursts(&series, &BurstConfig::default()).unwrap();
    let r = match_report(&bursts, &predicted_events(4, 2, (0.0, 0.5)), 1e-3);
    assert!(r.is_exact(), "{}", r.to_json());
    assert_eq!(r.matched.len(), 16);
}

#[test]
fn bursts_follow_the_schedule_for_each_lk_moment() {
    // The s-th ladder term oscillates at 2πν·s per revival time inside its
    // burst; high powers use half the span so 2001 points stay well below
    // the Nyquist rate of that carrier.
    let pairs = [
        (1usize, 4usize, 1.0),
        (2, 2, 1.0),
        (2, 4, 1.0),
        (2, 6, 0.5),
        (3, 3, 1.0),
        (3, 6, 0.5),
        (3, 9, 0.5),
        (4, 8, 0.5),
    ];
    for (l, power, end) in pairs {
        let grid = TimeGrid::uniform(0.0, end, 2001).unwrap();
        let spec = SuperpositionSpec::symmetric(l, 100.0).unwrap();
        let series = moment_series(&spec, Quadrature::X, power, &grid, None).unwrap();
        let bursts = detect_bursts(&series, &BurstConfig::default()).unwrap();
        let expected = burst_events(l as u64, power as u64, (0.0, end));
        let r = match_report(&bursts, &expected, 2.0 * grid.step());
        assert!(r.is_exact(), "l={l} x^{power}: {}", r.to_json());
        // every expected burst is a scheduled event with k' <= k
        let k = (power / l) as u64;
        let scheduled = predicted_events(l as u64, k.max(2), (0.0, end));
        assert!(expected.iter().all(|e| e.k <= k && scheduled.contains(e)));
    }
}
