//! Quadrature and ladder-operator moments.
//!
//! The production path applies the tridiagonal matrices of `x = (a+a†)/√2`
//! and `p = (a−a†)/(i√2)` to the amplitude vector. The closed forms below
//! are for cross-checking only.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{superposed_state, truncation_dim, FockState, SuperpositionSpec, DEFAULT_EPS};
use crate::kerr::evolve_fraction;
use crate::series::TimeSeries;
use crate::TimeGrid;

/// Tail mass above which the top levels count as occupied.
pub const HEADROOM_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quadrature::X => "x",
            Quadrature::P => "p",
        })
    }
}

impl FromStr for Quadrature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Quadrature::X),
            "p" | "P" => Ok(Quadrature::P),
            _ => Err(Error::param("observable", format!("unknown quadrature '{s}'"))),
        }
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `a v`, same length; the top component becomes zero.
pub fn apply_lowering(v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len();
    (0..d)
        .map(|m| if m + 1 < d { v[m + 1] * ((m + 1) as f64).sqrt() } else { zero() })
        .collect()
}

/// `q v` for a quadrature, same length; anything pushed past the top level
/// is dropped, so callers pad first.
pub fn apply_quadrature(q: Quadrature, v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..d)
        .map(|m| {
            let up = if m + 1 < d { v[m + 1] * ((m + 1) as f64).sqrt() } else { zero() };
            let down = if m > 0 { v[m - 1] * (m as f64).sqrt() } else { zero() };
            match q {
                Quadrature::X => (up + down) * s,
                Quadrature::P => (up - down) * Complex64::new(0.0, -s),
            }
        })
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_headroom(s: &FockState, power: usize) -> Result<()> {
    let mass = s.tail_mass(power);
    if power > 0 && mass > HEADROOM_EPS {
        return Err(Error::Headroom {
            n_max: s.n_max(),
            power,
            mass,
        });
    }
    Ok(())
}

/// `⟨q^k⟩` as a complex number, together with the Cauchy-Schwarz scale
/// `‖q^⌈k/2⌉ψ‖·‖q^⌊k/2⌋ψ‖` that bounds it.
pub fn quadrature_moment_raw(s: &FockState, q: Quadrature, k: usize) -> Result<(Complex64, f64)> {
    check_headroom(s, k)?;
    let mut right = s.padded(k).amplitudes().to_vec();
    for _ in 0..k / 2 {
        right = apply_quadrature(q, &right);
    }
    let left = if k % 2 == 1 { apply_quadrature(q, &right) } else { right.clone() };
    let norm = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok((dot(&left, &right), norm(&left) * norm(&right)))
}

/// `⟨x^k⟩` by matrix application.
pub fn x_moment_oracle(s: &FockState, k: usize) -> Result<f64> {
    quadrature_moment_raw(s, Quadrature::X, k).map(|(m, _)| m.re)
}

/// `⟨p^k⟩` by matrix application.
pub fn p_moment_oracle(s: &FockState, k: usize) -> Result<f64> {
    quadrature_moment_raw(s, Quadrature::P, k).map(|(m, _)| m.re)
}

pub fn quadrature_moment(s: &FockState, q: Quadrature, k: usize) -> Result<f64> {
    quadrature_moment_raw(s, q, k).map(|(m, _)| m.re)
}

/// `⟨a†^r a^{r+s}⟩ = ⟨a^r ψ | a^{r+s} ψ⟩` by matrix application.
pub fn ladder_moment_oracle(state: &FockState, r: usize, s: usize) -> Complex64 {
    let mut left = state.amplitudes().to_vec();
    for _ in 0..r {
        left = apply_lowering(&left);
    }
    let mut right = left.clone();
    for _ in 0..s {
        right = apply_lowering(&right);
    }
    dot(&left, &right)
}

/// Coherent-state ladder moment `⟨a†^r a^{r+s}⟩` at time `t`:
/// `αˢνʳ e^{−ν(1−cos 2sχt)} exp[−iχ(s(s−1)+2rs)t − iν sin 2sχt]`.
pub fn ladder_expectation_coherent(alpha: Complex64, r: u32, s: u32, chi: f64, t: f64) -> Complex64 {
    let nu = alpha.norm_sqr();
    let (r, s) = (r as f64, s as f64);
    let arg = 2.0 * s * chi * t;
    let damping = -nu * (1.0 - arg.cos());
    let phase = -chi * (s * (s - 1.0) + 2.0 * r * s) * t - nu * arg.sin();
    alpha.powf(s) * nu.powf(r) * Complex64::from_polar(damping.exp(), phase)
}

/// `N_l²` for `|ψ_l⟩` (h = 0) from the coherent-state Gram sum.
pub fn symmetric_norm_sqr(l: usize, nu: f64) -> f64 {
    let sum: f64 = (0..l)
        .map(|d| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * d as f64 / l as f64);
            (Complex64::new(nu, 0.0) * (w - 1.0)).exp().re
        })
        .sum();
    1.0 / (l as f64 * sum)
}

/// `⟨a^s⟩` for `|ψ_l⟩` at time `t`:
/// `l N² e^{−ν} αˢ e^{−iχs(s−1)t} Σ_r exp(ν ωʳ e^{−2iχst})`, ω = e^{2πi/l}.
pub fn a_pow_symmetric(l: usize, nu: f64, theta: f64, chi: f64, t: f64, s: u32) -> Complex64 {
    let alpha = Complex64::from_polar(nu.sqrt(), theta);
    let sf = s as f64;
    let rot = Complex64::from_polar(1.0, -2.0 * chi * sf * t);
    let branches: Complex64 = (0..l)
        .map(|r| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * r as f64 / l as f64);
            (nu * (w * rot - 1.0)).exp()
        })
        .sum();
    l as f64 * symmetric_norm_sqr(l, nu) * alpha.powu(s) * Complex64::from_polar(1.0, -chi * sf * (sf - 1.0) * t) * branches
}

/// `⟨x²⟩` for the even coherent state:
/// `2N₂²ν[e^{−ν(1−cos4χt)} cos(2χt + ν sin4χt − 2θ) + e^{−ν(1+cos4χt)} cos(2χt − ν sin4χt − 2θ)] + ν tanh ν + 1/2`.
pub fn x2_even_cs(nu: f64, theta: f64, chi: f64, t: f64) -> f64 {
    let n2 = 1.0 / (2.0 * (1.0 + (-2.0 * nu).exp()));
    let c = (4.0 * chi * t).cos();
    let s = (4.0 * chi * t).sin();
    let a = 2.0 * chi * t - 2.0 * theta;
    let osc = (-nu * (1.0 - c)).exp() * (a + nu * s).cos() + (-nu * (1.0 + c)).exp() * (a - nu * s).cos();
    2.0 * n2 * nu * osc + nu * nu.tanh() + 0.5
}

/// `⟨a^{2k}⟩` for the even coherent state.
pub fn a_pow_even_cs(nu: f64, theta: f64, chi: f64, t: f64, k: u32) -> Complex64 {
    let alpha = Complex64::from_polar(nu.sqrt(), theta);
    let n2 = 1.0 / (2.0 * (1.0 + (-2.0 * nu).exp()));
    let kf = k as f64;
    let phi = 4.0 * kf * chi * t;
    let lead = Complex64::from_polar(1.0, -2.0 * kf * (2.0 * kf - 1.0) * chi * t);
    let first = Complex64::from_polar((-nu * (1.0 - phi.cos())).exp(), -nu * phi.sin());
    let second = Complex64::from_polar((-nu * (1.0 + phi.cos())).exp(), nu * phi.sin());
    2.0 * n2 * alpha.powu(2 * k) * lead * (first + second)
}

/// `⟨x³⟩` for `|ψ₃⟩`, three damped branches with φ = 6χt.
pub fn x3_psi3(nu: f64, theta: f64, chi: f64, t: f64) -> f64 {
    let n3 = symmetric_norm_sqr(3, nu);
    let phi = 6.0 * chi * t;
    let b = PI / 6.0;
    let branch = |damp: f64, arg: f64| (-nu * damp).exp() * (arg - 3.0 * theta).cos();
    let sum = branch(1.0 - phi.cos(), phi + nu * phi.sin())
        + branch(1.0 - (phi - b).sin(), phi - nu * (phi - b).cos())
        + branch(1.0 + (phi + b).sin(), phi + nu * (phi + b).cos());
    3.0 * n3 * nu.powf(1.5) * std::f64::consts::FRAC_1_SQRT_2 * sum
}

/// `⟨a^{3k}⟩` for `|ψ₃⟩`, three damped branches with φ = 6kχt.
pub fn a_pow_psi3(nu: f64, theta: f64, chi: f64, t: f64, k: u32) -> Complex64 {
    let alpha = Complex64::from_polar(nu.sqrt(), theta);
    let n3 = symmetric_norm_sqr(3, nu);
    let kf = k as f64;
    let phi = 6.0 * kf * chi * t;
    let b = PI / 6.0;
    let lead = Complex64::from_polar(1.0, -3.0 * kf * (3.0 * kf - 1.0) * chi * t);
    let sum = Complex64::from_polar((-nu * (1.0 - phi.cos())).exp(), -nu * phi.sin())
        + Complex64::from_polar((-nu * (1.0 - (phi - b).sin())).exp(), nu * (phi - b).cos())
        + Complex64::from_polar((-nu * (1.0 + (phi + b).sin())).exp(), -nu * (phi + b).cos());
    3.0 * n3 * alpha.powu(3 * k) * lead * sum
}

/// `⟨q^k⟩` of the evolving `|ψ_{l,h}⟩` over a grid, via the matrix oracle.
/// The basis is `n_max + k` levels so the top `k` stay empty.
pub fn moment_series(
    spec: &SuperpositionSpec,
    q: Quadrature,
    k: usize,
    grid: &TimeGrid,
    n_max: Option<usize>,
) -> Result<TimeSeries> {
    let base = n_max.unwrap_or_else(|| truncation_dim(spec.nu, DEFAULT_EPS));
    let s0 = superposed_state(spec, base + k)?;
    let values = grid
        .fractions()
        .par_iter()
        .map(|&tau| quadrature_moment(&evolve_fraction(&s0, tau), q, k))
        .collect::<Result<Vec<f64>>>()?;
    Ok(TimeSeries::new(grid.fractions().to_vec(), values, format!("{q}^{k}")))
}
