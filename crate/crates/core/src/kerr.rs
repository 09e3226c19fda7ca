//! Kerr propagation `c_n → c_n e^{-iχ n(n-1) t}` and the explicit
//! superpositions reached at selected fractional revival times.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{fidelity, FockState, SuperpositionSpec, DEFAULT_EPS};
use crate::series::TimeSeries;

/// Kerr strength χ. Time is usually expressed as `tau = t / T_rev`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KerrParams {
    chi: f64,
}

impl Default for KerrParams {
    fn default() -> Self {
        Self { chi: 1.0 }
    }
}

impl KerrParams {
    pub fn new(chi: f64) -> Result<Self> {
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(Error::param("chi", format!("must be positive and finite, got {chi}")));
        }
        Ok(Self { chi })
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn revival_time(&self) -> f64 {
        PI / self.chi
    }

    /// Converts an absolute time to a fraction of the revival time.
    pub fn fraction(&self, t: f64) -> f64 {
        t * self.chi / PI
    }
}

/// Kerr phase of level `n` at `tau`, in units of π, reduced to `[0, 2)`.
///
/// `n(n-1)·tau` is formed as an exact two-product so that the reduction
/// keeps full relative precision even when the product is ~10⁵.
pub fn kerr_phase_over_pi(n: usize, tau: f64) -> f64 {
    let m = (n * n.saturating_sub(1)) as f64;
    let hi = m * tau;
    let lo = m.mul_add(tau, -hi);
    (hi.rem_euclid(2.0) + lo).rem_euclid(2.0)
}

/// Anything that maps a state and a revival fraction to an evolved state.
/// The validation suite is generic over this so that deliberately broken
/// propagators can be checked against it.
pub trait Propagator: Sync {
    fn propagate(&self, s: &FockState, tau: f64) -> FockState;
}

/// The Kerr propagator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kerr;

impl Propagator for Kerr {
    fn propagate(&self, s: &FockState, tau: f64) -> FockState {
        evolve_fraction(s, tau)
    }
}

/// Applies `c_n → c_n e^{-iπ phase(n)}` for an arbitrary diagonal phase
/// given in units of π.
pub fn apply_diagonal_phase(s: &FockState, phase_over_pi: impl Fn(usize) -> f64) -> FockState {
    let amps = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let (sin, cos) = (PI * phase_over_pi(n)).sin_cos();
            c * Complex64::new(cos, -sin)
        })
        .collect();
    FockState::from_normalized(amps)
}

/// Evolves by `tau` revival times.
pub fn evolve_fraction(s: &FockState, tau: f64) -> FockState {
    apply_diagonal_phase(s, |n| kerr_phase_over_pi(n, tau))
}

/// Evolves by absolute time `t`.
pub fn evolve(s: &FockState, params: &KerrParams, t: f64) -> FockState {
    evolve_fraction(s, params.fraction(t))
}

/// Sorted sample of revival fractions in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    fractions: Vec<f64>,
}

impl TimeGrid {
    pub fn uniform(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::param("grid_points", format!("need at least 2, got {points}")));
        }
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || start >= end {
            return Err(Error::param(
                "grid",
                format!("need 0 <= start < end <= 1, got [{start}, {end}]"),
            ));
        }
        let step = (end - start) / (points - 1) as f64;
        let mut fractions: Vec<f64> = (0..points).map(|i| start + step * i as f64).collect();
        fractions[points - 1] = end;
        Ok(Self { fractions })
    }

    pub fn from_fractions(fractions: Vec<f64>) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::param("grid", "empty"));
        }
        if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::param("grid", "fractions must lie in [0, 1]"));
        }
        if fractions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("grid", "fractions must be strictly increasing"));
        }
        Ok(Self { fractions })
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }

    /// Mean spacing.
    pub fn step(&self) -> f64 {
        match self.fractions.len() {
            0 | 1 => 0.0,
            n => (self.fractions[n - 1] - self.fractions[0]) / (n - 1) as f64,
        }
    }
}

/// `|⟨ψ(0)|ψ(t)⟩|²` over the grid.
pub fn autocorrelation(s0: &FockState, grid: &TimeGrid) -> TimeSeries {
    let values = grid
        .fractions()
        .par_iter()
        .map(|&tau| fidelity(s0, &evolve_fraction(s0, tau)).expect("same basis"))
        .collect();
    TimeSeries::new(grid.fractions().to_vec(), values, "autocorrelation")
}

/// Named fractional-revival states with explicit coherent-state expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticCase {
    CoherentQuarter,
    EvenQuarter,
    EvenHalf,
    EvenThreeQuarters,
    EvenEighth,
    TripleNinth,
    TripleEighteenth,
    QuadrupleThirtySecond,
}

impl AnalyticCase {
    pub const ALL: [AnalyticCase; 8] = [
        AnalyticCase::CoherentQuarter,
        AnalyticCase::EvenQuarter,
        AnalyticCase::EvenHalf,
        AnalyticCase::EvenThreeQuarters,
        AnalyticCase::EvenEighth,
        AnalyticCase::TripleNinth,
        AnalyticCase::TripleEighteenth,
        AnalyticCase::QuadrupleThirtySecond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnalyticCase::CoherentQuarter => "CS@T/4",
            AnalyticCase::EvenQuarter => "ECS@T/4",
            AnalyticCase::EvenHalf => "ECS@T/2",
            AnalyticCase::EvenThreeQuarters => "ECS@3T/4",
            AnalyticCase::EvenEighth => "ECS@T/8",
            AnalyticCase::TripleNinth => "psi3@T/9",
            AnalyticCase::TripleEighteenth => "psi3@T/18",
            AnalyticCase::QuadrupleThirtySecond => "psi4@T/32",
        }
    }

    /// Number of superposed coherent states in the initial state.
    pub fn l(self) -> usize {
        match self {
            AnalyticCase::CoherentQuarter => 1,
            AnalyticCase::TripleNinth | AnalyticCase::TripleEighteenth => 3,
            AnalyticCase::QuadrupleThirtySecond => 4,
            _ => 2,
        }
    }

    pub fn time_fraction(self) -> f64 {
        match self {
            AnalyticCase::CoherentQuarter | AnalyticCase::EvenQuarter => 0.25,
            AnalyticCase::EvenHalf => 0.5,
            AnalyticCase::EvenThreeQuarters => 0.75,
            AnalyticCase::EvenEighth => 0.125,
            AnalyticCase::TripleNinth => 1.0 / 9.0,
            AnalyticCase::TripleEighteenth => 1.0 / 18.0,
            AnalyticCase::QuadrupleThirtySecond => 1.0 / 32.0,
        }
    }

    /// Components `(weight, angle)`: the state is `Σ weight·|α e^{i angle}⟩`.
    fn components(self) -> Vec<(Complex64, f64)> {
        let one = Complex64::new(1.0, 0.0);
        let c1 = Complex64::new(0.5, -0.5);
        let c2 = Complex64::new(0.5, 0.5);
        let pair = |w: Complex64, a: f64| [(w, a), (w, a + PI)];
        let multiples = |w: Complex64, numerators: &[f64], den: f64| {
            numerators.iter().map(move |&k| (w, k * PI / den)).collect::<Vec<_>>()
        };
        match self {
            AnalyticCase::CoherentQuarter => {
                let a = Complex64::new(1.0, -1.0);
                let b = Complex64::new(2f64.sqrt(), 0.0);
                vec![(a, PI / 4.0), (b, -PI / 4.0), (-a, -3.0 * PI / 4.0), (b, 3.0 * PI / 4.0)]
            }
            AnalyticCase::EvenQuarter => pair(one, -PI / 4.0).to_vec(),
            AnalyticCase::EvenHalf => pair(one, PI / 2.0).to_vec(),
            AnalyticCase::EvenThreeQuarters => pair(one, PI / 4.0).to_vec(),
            AnalyticCase::EvenEighth => {
                let mut v = pair(c1, PI / 8.0).to_vec();
                v.extend(pair(c2, -3.0 * PI / 8.0));
                v
            }
            AnalyticCase::TripleNinth => multiples(one, &[-8.0, -2.0, 4.0], 9.0),
            AnalyticCase::TripleEighteenth => {
                let mut v = multiples(c1, &[-11.0, 1.0, 13.0], 18.0);
                v.extend(multiples(c2, &[-17.0, -5.0, 7.0], 18.0));
                v
            }
            AnalyticCase::QuadrupleThirtySecond => {
                let mut v = multiples(c1, &[-31.0, -15.0, 1.0, 17.0], 32.0);
                v.extend(multiples(c2, &[-23.0, -7.0, 9.0, 25.0], 32.0));
                v
            }
        }
    }
}

impl fmt::Display for AnalyticCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalyticCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AnalyticCase::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}

/// Explicit superposition reached from `spec` at the case's time.
pub fn analytic_state_at(spec: &SuperpositionSpec, case: AnalyticCase, n_max: usize) -> Result<FockState> {
    if spec.l != case.l() || spec.h != 0 {
        return Err(Error::CaseMismatch {
            case: case.name().to_string(),
            expected: case.l(),
            got: spec.l,
        });
    }
    let alpha = spec.alpha();
    let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (weight, angle) in case.components() {
        let beta = alpha * Complex64::from_polar(1.0, angle);
        for (a, c) in amps.iter_mut().zip(coherent_amplitudes(beta, n_max)) {
            *a += weight * c;
        }
    }
    let state = FockState::from_amplitudes(amps)?;
    state.check_truncation(DEFAULT_EPS, spec.nu)?;
    Ok(state)
}

/// `e^{-|β|²/2} βⁿ/√n!` by forward recurrence (stable, no factorials).
pub(crate) fn coherent_amplitudes(beta: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    out.push(c);
    for n in 1..=n_max {
        c = c * beta / (n as f64).sqrt();
        out.push(c);
    }
    out
}
