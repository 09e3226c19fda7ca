//! Cross-module invariant suite run by `kerr validate`.

use std::f64::consts::PI;
use std::fmt;

use crate::entropy::{Grid1D, RenyiPair, WavefunctionBasis};
use crate::error::Result;
use crate::fock::{fidelity, superposed_state, superposed_state_by_sum, truncation_dim, FockState, SuperpositionSpec, DEFAULT_EPS, TAIL_LEVELS};
use crate::kerr::{analytic_state_at, evolve_fraction, AnalyticCase, Kerr, Propagator, TimeGrid};
use crate::moments::{a_pow_even_cs, a_pow_psi3, ladder_expectation_coherent, ladder_moment_oracle, moment_series, x2_even_cs, x3_psi3, x_moment_oracle, Quadrature};
use crate::schedule::{burst_events, detect_bursts, match_report, BurstConfig};
use crate::wigner::{wigner_at, wigner_field, wigner_marginals, PhaseSpaceGrid};

#[derive(Clone, Debug)]
pub struct Check {
    pub module: &'static str,
    pub invariant: String,
    pub observed: String,
    pub tolerance: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} (observed {}, tolerated {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.module,
            self.invariant,
            self.observed,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Knobs for forced-failure runs.
#[derive(Clone, Copy, Debug, Default)]
pub struct ValidateOptions {
    /// Replaces the computed truncation for every state.
    pub n_max: Option<usize>,
}

fn upper(module: &'static str, invariant: impl Into<String>, observed: f64, limit: f64) -> Check {
    Check {
        module,
        invariant: invariant.into(),
        observed: format!("{observed:.3e}"),
        tolerance: format!("<= {limit:.0e}"),
        passed: observed <= limit,
    }
}

fn failed(module: &'static str, invariant: impl Into<String>, err: impl fmt::Display) -> Check {
    Check {
        module,
        invariant: invariant.into(),
        observed: format!("error: {err}"),
        tolerance: "no error".into(),
        passed: false,
    }
}

fn build(spec: &SuperpositionSpec, opts: &ValidateOptions) -> Result<FockState> {
    superposed_state(spec, opts.n_max.unwrap_or_else(|| truncation_dim(spec.nu, DEFAULT_EPS)))
}

/// Initial states of the exact-revival check: coherent at ν ∈ {20, 100}
/// and `|ψ_l⟩`, l = 2..4, at ν ∈ {20, 30, 100}.
pub fn revival_specs() -> Vec<SuperpositionSpec> {
    let mut out = Vec::new();
    for nu in [20.0, 100.0] {
        out.push(SuperpositionSpec::coherent(nu).expect("valid"));
    }
    for l in 2..=4 {
        for nu in [20.0, 30.0, 100.0] {
            out.push(SuperpositionSpec::symmetric(l, nu).expect("valid"));
        }
    }
    out
}

fn label(spec: &SuperpositionSpec) -> String {
    format!("l={} nu={}", spec.l, spec.nu)
}

/// `1 − fidelity(ψ(0), ψ(T_rev))` per initial state.
pub fn revival_checks(prop: &dyn Propagator, opts: &ValidateOptions) -> Vec<Check> {
    revival_specs()
        .iter()
        .map(|spec| {
            let name = format!("exact revival at T_rev, {}", label(spec));
            match build(spec, opts) {
                Ok(s) => {
                    let f = fidelity(&s, &prop.propagate(&s, 1.0)).expect("same basis");
                    upper("kerr_evolution", name, 1.0 - f, 1e-12)
                }
                Err(e) => failed("kerr_evolution", name, e),
            }
        })
        .collect()
}

/// `1 − fidelity` between the propagated state and each explicit
/// superposition, at ν = 20.
pub fn analytic_checks(prop: &dyn Propagator, opts: &ValidateOptions) -> Vec<Check> {
    AnalyticCase::ALL
        .iter()
        .map(|&case| {
            let spec = SuperpositionSpec::symmetric(case.l(), 20.0).expect("valid");
            let name = format!("evolved state equals {case} superposition");
            let result = build(&spec, opts).and_then(|s| {
                let target = analytic_state_at(&spec, case, s.n_max())?;
                Ok(fidelity(&prop.propagate(&s, case.time_fraction()), &target).expect("same basis"))
            });
            match result {
                Ok(f) => upper("kerr_evolution", name, 1.0 - f, 1e-10),
                Err(e) => failed("kerr_evolution", name, e),
            }
        })
        .collect()
}

fn fock_checks(opts: &ValidateOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for spec in revival_specs() {
        match build(&spec, opts) {
            Ok(s) => {
                out.push(upper("fock_states", format!("normalization, {}", label(&spec)), (s.norm_sqr() - 1.0).abs(), 1e-12));
                out.push(upper("fock_states", format!("tail mass, {}", label(&spec)), s.tail_mass(TAIL_LEVELS), DEFAULT_EPS));
            }
            Err(e) => out.push(failed("fock_states", format!("truncation invariant, {}", label(&spec)), e)),
        }
    }
    for l in 1..=5 {
        for nu in [20.0, 100.0] {
            let spec = SuperpositionSpec::symmetric(l, nu).expect("valid");
            let n = opts.n_max.unwrap_or_else(|| truncation_dim(nu, DEFAULT_EPS));
            let name = format!("progression and coherent-sum constructions agree, {}", label(&spec));
            match (superposed_state(&spec, n), superposed_state_by_sum(&spec, n)) {
                (Ok(a), Ok(b)) => out.push(upper("fock_states", name, 1.0 - fidelity(&a, &b).expect("same basis"), 1e-12)),
                (Err(e), _) | (_, Err(e)) => out.push(failed("fock_states", name, e)),
            }
        }
    }
    out
}

fn moment_checks(opts: &ValidateOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let theta = PI / 4.0;
    let times = [0.0, 0.0371, 0.125, 0.25, 0.3311, 0.5, 0.9];
    let run = |nu: f64, l: usize| build(&SuperpositionSpec::symmetric(l, nu).expect("valid"), opts);
    let mut worst = [0.0f64; 5];
    let result = (|| -> Result<()> {
        let nu = 100.0;
        let cs = run(nu, 1)?;
        let even = run(nu, 2)?;
        let tri = run(nu, 3)?;
        for &tau in &times {
            let t = tau * PI;
            let c = evolve_fraction(&cs, tau);
            let alpha = cs_alpha(nu, theta);
            for (r, s) in [(0, 1), (1, 2), (0, 4)] {
                let err = (ladder_expectation_coherent(alpha, r, s, 1.0, t) - ladder_moment_oracle(&c, r as usize, s as usize)).norm();
                worst[0] = worst[0].max(err / (nu.sqrt().powi(s as i32) * nu.powi(r as i32)));
            }
            let e = evolve_fraction(&even.padded(2), tau);
            worst[1] = worst[1].max((x2_even_cs(nu, theta, 1.0, t) - x_moment_oracle(&e, 2)?).abs() / (nu + 0.5));
            let lad = ladder_moment_oracle(&e, 0, 4);
            worst[2] = worst[2].max((a_pow_even_cs(nu, theta, 1.0, t, 2) - lad).norm() / nu.powi(2));
            let p = evolve_fraction(&tri.padded(3), tau);
            worst[3] = worst[3].max((x3_psi3(nu, theta, 1.0, t) - x_moment_oracle(&p, 3)?).abs() / nu.powf(1.5));
            let lad = ladder_moment_oracle(&p, 0, 3);
            worst[4] = worst[4].max((a_pow_psi3(nu, theta, 1.0, t, 1) - lad).norm() / nu.powf(1.5));
        }
        Ok(())
    })();
    match result {
        Ok(()) => {
            let names = [
                "coherent ladder moments match oracle",
                "even-state <x^2> closed form matches oracle",
                "even-state <a^4> closed form matches oracle",
                "psi3 <x^3> closed form matches oracle",
                "psi3 <a^3> closed form matches oracle",
            ];
            for (n, w) in names.iter().zip(worst) {
                out.push(upper("moments", format!("{n} (relative)"), w, 1e-9));
            }
        }
        Err(e) => out.push(failed("moments", "closed forms vs oracle", e)),
    }
    out
}

fn cs_alpha(nu: f64, theta: f64) -> num_complex::Complex64 {
    num_complex::Complex64::from_polar(nu.sqrt(), theta)
}

fn entropy_checks(opts: &ValidateOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let pair = RenyiPair::default();
    let vac = FockState::vacuum(20);
    match WavefunctionBasis::new(Grid1D::for_nu(0.0), vac.dim()).and_then(|b| b.uncertainty_sum(&vac, pair)) {
        Ok(v) => out.push(upper("entropy", "vacuum saturates the (2/3, 2) bound", (v - pair.bound()).abs(), 1e-6)),
        Err(e) => out.push(failed("entropy", "vacuum saturates the (2/3, 2) bound", e)),
    }
    let spec = SuperpositionSpec::symmetric(3, 30.0).expect("valid");
    let result = build(&spec, opts).and_then(|s| {
        let basis = WavefunctionBasis::new(Grid1D::for_nu(30.0), s.dim())?;
        let mut worst = f64::INFINITY;
        for tau in [0.0, 0.03, 1.0 / 9.0, 0.2, 0.37] {
            worst = worst.min(basis.uncertainty_sum(&evolve_fraction(&s, tau), pair)? - pair.bound());
        }
        Ok(worst)
    });
    match result {
        Ok(margin) => out.push(Check {
            module: "entropy",
            invariant: "uncertainty sum stays above the bound, psi3 nu=30".into(),
            observed: format!("min margin {margin:.3e}"),
            tolerance: ">= -1e-6".into(),
            passed: margin >= -1e-6,
        }),
        Err(e) => out.push(failed("entropy", "uncertainty sum stays above the bound", e)),
    }
    out
}

fn wigner_checks(opts: &ValidateOptions) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(upper(
        "wigner",
        "vacuum peak equals 1/pi",
        (wigner_at(&FockState::vacuum(10), 0.0, 0.0) - 1.0 / PI).abs(),
        1e-10,
    ));
    let spec = SuperpositionSpec::symmetric(2, 20.0).expect("valid");
    let result = build(&spec, opts).and_then(|s0| {
        let s = evolve_fraction(&s0, 0.125);
        let grid = PhaseSpaceGrid::for_nu(20.0);
        let field = wigner_field(&s, &grid);
        let (mx, mp) = wigner_marginals(&field);
        let half = grid.x_max;
        let line = Grid1D::new(-half, grid.dx(), grid.n_x)?;
        let basis = WavefunctionBasis::new(line, s.dim())?;
        let rho = basis.position_density(&s)?;
        let gamma = basis.momentum_density(&s)?;
        let dev = mx
            .iter()
            .zip(rho.values())
            .chain(mp.iter().zip(gamma.values()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(((field.normalization() - 1.0).abs(), dev))
    });
    match result {
        Ok((norm, dev)) => {
            out.push(upper("wigner", "field integrates to 1, even state at T/8", norm, 1e-3));
            out.push(upper("wigner", "marginals match position/momentum densities", dev, 1e-6));
        }
        Err(e) => out.push(failed("wigner", "normalization and marginals", e)),
    }
    out
}

fn schedule_checks(opts: &ValidateOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for (l, power, hi) in [(1usize, 4usize, 1.0), (2, 4, 1.0)] {
        let name = format!("bursts of <x^{power}> for l={l} match the predicted schedule");
        let result = (|| -> Result<_> {
            let spec = SuperpositionSpec::symmetric(l, 100.0)?;
            let grid = TimeGrid::uniform(0.0, hi, 2001)?;
            let series = moment_series(&spec, Quadrature::X, power, &grid, opts.n_max)?;
            let bursts = detect_bursts(&series, &BurstConfig::default())?;
            let predicted = burst_events(l as u64, power as u64, (0.0, hi));
            Ok(match_report(&bursts, &predicted, 2.0 * grid.step()))
        })();
        match result {
            Ok(r) => out.push(Check {
                module: "revival_schedule",
                invariant: name,
                observed: format!("{} matched, {} missed, {} spurious", r.matched.len(), r.misses.len(), r.spurious.len()),
                tolerance: "0 missed, 0 spurious".into(),
                passed: r.is_exact(),
            }),
            Err(e) => out.push(failed("revival_schedule", name, e)),
        }
    }
    out
}

/// Full suite with the Kerr propagator.
pub fn run_validate(opts: &ValidateOptions) -> ValidationReport {
    run_validate_with(&Kerr, opts)
}

/// Full suite with an arbitrary propagator for the evolution checks.
pub fn run_validate_with(prop: &dyn Propagator, opts: &ValidateOptions) -> ValidationReport {
    let mut checks = fock_checks(opts);
    checks.extend(revival_checks(prop, opts));
    checks.extend(analytic_checks(prop, opts));
    checks.extend(moment_checks(opts));
    checks.extend(entropy_checks(opts));
    checks.extend(wigner_checks(opts));
    checks.extend(schedule_checks(opts));
    ValidationReport { checks }
}
