//! Truncated Fock-space states: coherent states and their l-fold
//! superpositions on an arithmetic progression of photon numbers.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tail tolerance for truncation.
pub const DEFAULT_EPS: f64 = 1e-12;

/// Number of top levels whose mass must stay below the tail tolerance.
pub const TAIL_LEVELS: usize = 10;

/// Phase of α used by every figure.
pub const DEFAULT_THETA: f64 = FRAC_PI_4;

/// Normalized amplitude vector over photon numbers `0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    amps: Vec<Complex64>,
}

impl FockState {
    /// Normalizes `amps` and wraps them. Fails on an empty, non-finite or
    /// zero vector. No truncation check is made.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroNorm("empty amplitude vector".into()));
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::param("amplitudes", "non-finite entry"));
        }
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm("all amplitudes vanish".into()));
        }
        Ok(Self {
            amps: amps.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// Wraps amplitudes that are already normalized (unitary images of a
    /// normalized state).
    pub(crate) fn from_normalized(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    /// The vacuum in a basis of `n_max + 1` levels.
    pub fn vacuum(n_max: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    /// Number of basis levels, `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Mass in the top `levels` levels.
    pub fn tail_mass(&self, levels: usize) -> f64 {
        let start = self.amps.len().saturating_sub(levels);
        self.amps[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Checks that the top [`TAIL_LEVELS`] levels carry less than `eps`.
    pub fn check_truncation(&self, eps: f64, nu: f64) -> Result<()> {
        let tail = self.tail_mass(TAIL_LEVELS);
        if tail < eps {
            Ok(())
        } else {
            Err(Error::TruncationInsufficient {
                n_max: self.n_max(),
                tail,
                eps,
                suggested: truncation_dim(nu, eps),
            })
        }
    }

    pub fn mean_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    pub fn number_variance(&self) -> f64 {
        let mean = self.mean_number();
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| (n as f64 - mean).powi(2) * c.norm_sqr())
            .sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Same state in a basis with `extra` more (empty) levels.
    pub fn padded(&self, extra: usize) -> FockState {
        let mut amps = self.amps.clone();
        amps.resize(self.amps.len() + extra, Complex64::new(0.0, 0.0));
        FockState { amps }
    }

    /// Text record: `n_max` on the first line, then `n re im` per level.
    pub fn to_record(&self) -> String {
        let mut out = String::with_capacity(48 * self.amps.len());
        let _ = writeln!(out, "{}", self.n_max());
        for (n, c) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{n} {:.16e} {:.16e}", c.re, c.im);
        }
        out
    }

    /// Parses [`to_record`](Self::to_record) output. Amplitudes are taken
    /// as written, without renormalization.
    pub fn from_record(text: &str) -> Result<Self> {
        let bad = |line: usize, reason: &str| Error::StateRecord {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| bad(1, "missing n_max"))?;
        let n_max: usize = head.trim().parse().map_err(|_| bad(1, "n_max is not an integer"))?;
        let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut seen = vec![false; n_max + 1];
        for (i, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad(i + 1, "expected 'n re im'"));
            }
            let n: usize = fields[0].parse().map_err(|_| bad(i + 1, "bad level index"))?;
            if n > n_max || seen[n] {
                return Err(bad(i + 1, "level out of range or repeated"));
            }
            let re: f64 = fields[1].parse().map_err(|_| bad(i + 1, "bad real part"))?;
            let im: f64 = fields[2].parse().map_err(|_| bad(i + 1, "bad imaginary part"))?;
            amps[n] = Complex64::new(re, im);
            seen[n] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(bad(text.lines().count(), "missing levels"));
        }
        Ok(FockState { amps })
    }
}

/// Initial superposition `|ψ_{l,h}⟩` with α = √ν e^{iθ}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperpositionSpec {
    pub l: usize,
    pub h: usize,
    pub nu: f64,
    pub theta: f64,
}

impl SuperpositionSpec {
    pub fn new(l: usize, h: usize, nu: f64, theta: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::param("l", "must be at least 1"));
        }
        if h >= l {
            return Err(Error::param("h", format!("must be below l={l}, got {h}")));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::param("nu", format!("must be finite and nonnegative, got {nu}")));
        }
        if !theta.is_finite() {
            return Err(Error::param("theta", "must be finite"));
        }
        Ok(Self { l, h, nu, theta })
    }

    /// Plain coherent state.
    pub fn coherent(nu: f64) -> Result<Self> {
        Self::new(1, 0, nu, DEFAULT_THETA)
    }

    /// `|ψ_l⟩`: equal-weight superposition of l coherent states, h = 0.
    pub fn symmetric(l: usize, nu: f64) -> Result<Self> {
        Self::new(l, 0, nu, DEFAULT_THETA)
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.nu.sqrt(), self.theta)
    }
}

/// `ln n!` for n = 0..=n_max by cumulative summation.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Unnormalized coherent amplitudes with the largest magnitude scaled to 1.
fn coherent_profile(nu: f64, theta: f64, n_max: usize) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if nu == 0.0 {
        amps[0] = Complex64::new(1.0, 0.0);
        return amps;
    }
    let half_ln_nu = 0.5 * nu.ln();
    let lnf = ln_factorials(n_max);
    let logs: Vec<f64> = (0..=n_max)
        .map(|n| n as f64 * half_ln_nu - 0.5 * lnf[n])
        .collect();
    let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for (n, a) in amps.iter_mut().enumerate() {
        *a = Complex64::from_polar((logs[n] - peak).exp(), n as f64 * theta);
    }
    amps
}

/// Coherent state `|α⟩`, renormalized over the truncated basis.
pub fn coherent_state(nu: f64, theta: f64, n_max: usize) -> Result<FockState> {
    let spec = SuperpositionSpec::new(1, 0, nu, theta)?;
    superposed_state(&spec, n_max)
}

/// `|ψ_{l,h}⟩` built on the progression n ≡ h (mod l).
pub fn superposed_state(spec: &SuperpositionSpec, n_max: usize) -> Result<FockState> {
    let mut amps = coherent_profile(spec.nu, spec.theta, n_max);
    for (n, a) in amps.iter_mut().enumerate() {
        if n % spec.l != spec.h {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    let state = FockState::from_amplitudes(amps)
        .map_err(|_| Error::ZeroNorm(format!("l={} h={} at nu={}", spec.l, spec.h, spec.nu)))?;
    state.check_truncation(DEFAULT_EPS, spec.nu)?;
    Ok(state)
}

/// `|ψ_{l,h}⟩` as the phase-weighted sum of l coherent states
/// `Σ_r e^{-2πi r h/l} |α e^{2πi r/l}⟩`.
pub fn superposed_state_by_sum(spec: &SuperpositionSpec, n_max: usize) -> Result<FockState> {
    let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for r in 0..spec.l {
        let shift = 2.0 * PI * r as f64 / spec.l as f64;
        let weight = Complex64::from_polar(1.0, -shift * spec.h as f64);
        let part = coherent_profile(spec.nu, spec.theta + shift, n_max);
        for (a, p) in amps.iter_mut().zip(part) {
            *a += weight * p;
        }
    }
    // The exact cancellation off the progression leaves roundoff; scale
    // relative to the largest entry decides what counts as zero.
    let largest = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if largest < 1e-9 * spec.l as f64 {
        return Err(Error::ZeroNorm(format!(
            "coherent sum cancels for l={} h={} at nu={}",
            spec.l, spec.h, spec.nu
        )));
    }
    let state = FockState::from_amplitudes(amps)?;
    state.check_truncation(DEFAULT_EPS, spec.nu)?;
    Ok(state)
}

/// Normalization constant of the two-component even coherent state,
/// `[2(1 + e^{-2ν})]^{-1/2}`.
pub fn normalization_n2(nu: f64) -> f64 {
    (2.0 * (1.0 + (-2.0 * nu).exp())).powf(-0.5)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &FockState, b: &FockState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Phase-space rotation `c_n → c_n e^{-inφ}` (clockwise by φ).
pub fn rotate_state(s: &FockState, phi: f64) -> FockState {
    let amps = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * phi))
        .collect();
    FockState::from_normalized(amps)
}

/// Poisson mass strictly above `m`.
pub fn poisson_tail(nu: f64, m: usize) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    let ln_nu = nu.ln();
    let mut log_term = -nu;
    for k in 1..=m + 1 {
        log_term += ln_nu - (k as f64).ln();
    }
    // Terms decrease once k > ν; before that sum until they do.
    let mut total = 0.0;
    let mut k = m + 1;
    loop {
        let term = log_term.exp();
        total += term;
        if (k as f64) > nu && term < total * 1e-17 {
            break;
        }
        if total == 0.0 && (k as f64) > nu + 50.0 * (nu.sqrt() + 1.0) {
            break;
        }
        k += 1;
        log_term += ln_nu - (k as f64).ln();
    }
    total
}

/// Truncation dimension whose top [`TAIL_LEVELS`] levels hold less than
/// `eps` of Poisson(ν) mass.
pub fn truncation_dim(nu: f64, eps: f64) -> usize {
    let mut n = (nu + 12.0 * (nu + 1.0).sqrt() + 20.0).ceil() as usize;
    while poisson_tail(nu, n - TAIL_LEVELS) >= eps {
        n += 1;
    }
    n
}
