//! Position and momentum densities and their Rényi entropies.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{superposed_state, truncation_dim, FockState, SuperpositionSpec, DEFAULT_EPS};
use crate::kerr::evolve_fraction;
use crate::series::{write_comments, write_file, TimeSeries};
use crate::TimeGrid;

/// Floor applied inside `ln` for the Shannon limit.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Largest step accepted for entropy grids.
pub const MAX_STEP: f64 = 0.02;

/// Uniform grid with an odd number of points (Simpson-ready).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    start: f64,
    step: f64,
    len: usize,
}

impl Grid1D {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || len < 3 || len % 2 == 0 {
            return Err(Error::param("grid", "need step > 0 and an odd point count >= 3"));
        }
        Ok(Self { start, step, len })
    }

    /// `[-half_width, half_width]` with spacing at most `max_step`.
    pub fn symmetric(half_width: f64, max_step: f64) -> Self {
        let intervals = 2 * (half_width / max_step).ceil().max(1.0) as usize;
        let step = 2.0 * half_width / intervals as f64;
        Self {
            start: -half_width,
            step,
            len: intervals + 1,
        }
    }

    /// Default span `±(√(2ν)+6)` at step 0.02.
    pub fn for_nu(nu: f64) -> Self {
        Self::symmetric((2.0 * nu).sqrt() + 6.0, MAX_STEP)
    }

    /// Same span, half the step.
    pub fn refined(&self) -> Self {
        Self {
            start: self.start,
            step: self.step / 2.0,
            len: 2 * self.len - 1,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    /// Composite Simpson rule over the grid.
    pub fn simpson(&self, f: &[f64]) -> f64 {
        simpson(f, self.step)
    }
}

/// Composite Simpson rule; `f.len()` must be odd.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    debug_assert!(f.len() % 2 == 1 && f.len() >= 3);
    let n = f.len() - 1;
    let mut acc = f[0] + f[n];
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Normalized Hermite functions `φ_0..φ_{dim-1}` at `x`.
pub fn hermite_functions(x: f64, dim: usize, out: &mut [f64]) {
    debug_assert!(out.len() >= dim);
    if dim == 0 {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if dim > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Hermite-function table on a grid, reusable across states of one basis.
#[derive(Clone, Debug)]
pub struct WavefunctionBasis {
    grid: Grid1D,
    dim: usize,
    table: Vec<f64>,
}

impl WavefunctionBasis {
    pub fn new(grid: Grid1D, dim: usize) -> Result<Self> {
        let mut table = vec![0.0; grid.len() * dim];
        table
            .par_chunks_mut(dim.max(1))
            .enumerate()
            .for_each(|(i, row)| hermite_functions(grid.point(i), dim, row));
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDensity("Hermite recurrence left the representable range".into()));
        }
        Ok(Self { grid, dim, table })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    fn check(&self, s: &FockState) -> Result<()> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: s.dim(),
                right: self.dim,
            });
        }
        Ok(())
    }

    fn expand(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.table
            .chunks(self.dim)
            .map(|row| row.iter().zip(coeffs).map(|(h, c)| c * h).sum())
            .collect()
    }

    /// `ψ(x) = Σ c_n φ_n(x)`.
    pub fn position(&self, s: &FockState) -> Result<Vec<Complex64>> {
        self.check(s)?;
        Ok(self.expand(s.amplitudes()))
    }

    /// `φ(p) = Σ c_n (−i)ⁿ φ_n(p)`.
    pub fn momentum(&self, s: &FockState) -> Result<Vec<Complex64>> {
        self.check(s)?;
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        let coeffs: Vec<Complex64> = s
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(n, c)| c * phases[n % 4])
            .collect();
        Ok(self.expand(&coeffs))
    }

    pub fn position_density(&self, s: &FockState) -> Result<DensityProfile> {
        let psi = self.position(s)?;
        Ok(DensityProfile::from_wavefunction(self.grid.clone(), &psi))
    }

    pub fn momentum_density(&self, s: &FockState) -> Result<DensityProfile> {
        let phi = self.momentum(s)?;
        Ok(DensityProfile::from_wavefunction(self.grid.clone(), &phi))
    }

    /// `R_ρ^(ζ) + R_γ^(η)`.
    pub fn uncertainty_sum(&self, s: &FockState, pair: RenyiPair) -> Result<f64> {
        let rho = self.position_density(s)?;
        let gamma = self.momentum_density(s)?;
        Ok(renyi_entropy(&rho, pair.zeta())? + renyi_entropy(&gamma, pair.eta())?)
    }
}

pub fn position_wavefunction(s: &FockState, grid: &Grid1D) -> Result<Vec<Complex64>> {
    WavefunctionBasis::new(grid.clone(), s.dim())?.position(s)
}

pub fn momentum_wavefunction(s: &FockState, grid: &Grid1D) -> Result<Vec<Complex64>> {
    WavefunctionBasis::new(grid.clone(), s.dim())?.momentum(s)
}

/// Probability density sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile {
    grid: Grid1D,
    values: Vec<f64>,
}

impl DensityProfile {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: grid.len(),
            });
        }
        Ok(Self { grid, values })
    }

    fn from_wavefunction(grid: Grid1D, amps: &[Complex64]) -> Self {
        Self {
            grid,
            values: amps.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        self.grid.simpson(&self.values)
    }

    /// Writes `u,value` rows.
    pub fn save_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_file(path, |w| {
            use std::io::Write;
            write_comments(w, comments)?;
            writeln!(w, "u,value")?;
            for (i, v) in self.values.iter().enumerate() {
                writeln!(w, "{:.16e},{v:.16e}", self.grid.point(i))?;
            }
            Ok(())
        })
    }
}

/// Conjugate Rényi orders with `1/ζ + 1/η = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenyiPair {
    zeta: f64,
    eta: f64,
}

impl RenyiPair {
    pub fn new(zeta: f64, eta: f64) -> Result<Self> {
        if !(zeta > 0.0 && eta > 0.0) || (1.0 / zeta + 1.0 / eta - 2.0).abs() > 1e-12 {
            return Err(Error::param(
                "entropy_pair",
                format!("need positive orders with 1/zeta + 1/eta = 2, got ({zeta}, {eta})"),
            ));
        }
        Ok(Self { zeta, eta })
    }

    /// Pair completed from ζ > 1/2.
    pub fn from_zeta(zeta: f64) -> Result<Self> {
        if !(zeta > 0.5 && zeta.is_finite()) {
            return Err(Error::param("entropy_zeta", format!("must exceed 1/2, got {zeta}")));
        }
        let eta = if zeta == 1.0 { 1.0 } else { zeta / (2.0 * zeta - 1.0) };
        Ok(Self { zeta, eta })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Lower bound `−ln(ζ/π)/(2(1−ζ)) − ln(η/π)/(2(1−η))`, written as
    /// `ln π + g(ζ) + g(η)` with `g(z) = −ln z/(2(1−z))`, `g(1) = 1/2`.
    pub fn bound(&self) -> f64 {
        fn g(z: f64) -> f64 {
            if (z - 1.0).abs() < 1e-8 {
                // series of −ln z/(2(1−z)) about z = 1
                0.5 + (z - 1.0) * -0.25
            } else {
                -z.ln() / (2.0 * (1.0 - z))
            }
        }
        PI.ln() + g(self.zeta) + g(self.eta)
    }
}

impl Default for RenyiPair {
    fn default() -> Self {
        Self { zeta: 2.0 / 3.0, eta: 2.0 }
    }
}

/// `ln(∫f^ζ)/(1−ζ)`; order 1 gives `−∫f ln f`.
///
/// Integer orders ≥ 2 keep the integrand smooth and use Simpson directly.
/// Otherwise the integrand has kinks wherever the density nearly vanishes,
/// so the density is spectrally upsampled and each unresolved near-zero is
/// integrated adaptively.
pub fn renyi_entropy(d: &DensityProfile, order: f64) -> Result<f64> {
    if !(order > 0.0 && order.is_finite()) {
        return Err(Error::param("order", format!("must be positive, got {order}")));
    }
    if d.values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidDensity("negative or non-finite value".into()));
    }
    if d.integral() <= 0.0 {
        return Err(Error::InvalidDensity("density integrates to zero".into()));
    }
    let integrand = move |v: f64| {
        let v = v.max(0.0);
        if order == 1.0 {
            -v * v.max(DENSITY_FLOOR).ln()
        } else {
            v.powf(order)
        }
    };
    let total = if order >= 2.0 && order.fract() == 0.0 {
        let f: Vec<f64> = d.values.iter().map(|&v| integrand(v)).collect();
        d.grid.simpson(&f)
    } else {
        kink_aware_integral(&d.values, d.grid.step, integrand)
    };
    if order == 1.0 {
        Ok(total)
    } else {
        Ok(total.ln() / (1.0 - order))
    }
}

const UPSAMPLE: usize = 8;
const KINK_HALF_WINDOW: usize = 16;
const KINK_TOL: f64 = 1e-14;

thread_local! {
    static PLANNER: std::cell::RefCell<rustfft::FftPlanner<f64>> = std::cell::RefCell::new(rustfft::FftPlanner::new());
}

/// Band-limited interpolation of a density that vanishes at both grid ends,
/// returning `(len − 1)·factor + 1` samples on the refined grid.
fn upsample(values: &[f64], factor: usize) -> Vec<f64> {
    let n = values.len();
    let m = n * factor;
    let mut spec: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fine = vec![Complex64::new(0.0, 0.0); m];
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        planner.plan_fft_forward(n).process(&mut spec);
        // odd n: no Nyquist bin to split
        let half = (n - 1) / 2;
        fine[..=half].copy_from_slice(&spec[..=half]);
        fine[m - half..].copy_from_slice(&spec[n - half..]);
        planner.plan_fft_inverse(m).process(&mut fine);
    });
    let scale = 1.0 / n as f64;
    fine[..(n - 1) * factor + 1].iter().map(|c| c.re * scale).collect()
}

/// Eight-point Lagrange interpolation at fractional index `u`.
fn lagrange(values: &[f64], u: f64) -> f64 {
    let last = values.len() - 1;
    let base = (u.floor() as isize - 3).clamp(0, last as isize - 7) as usize;
    let mut sum = 0.0;
    for a in 0..8 {
        let mut w = 1.0;
        for b in 0..8 {
            if a != b {
                w *= (u - (base + b) as f64) / (a as f64 - b as f64);
            }
        }
        sum += w * values[base + a];
    }
    sum
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn kink_aware_integral(values: &[f64], step: f64, integrand: impl Fn(f64) -> f64) -> f64 {
    let rho = upsample(values, UPSAMPLE);
    let h = step / UPSAMPLE as f64;
    let f: Vec<f64> = rho.iter().map(|&v| integrand(v)).collect();
    let mut total = simpson(&f, h);

    let peak = rho.iter().cloned().fold(0.0, f64::max);
    let last = rho.len() - 1;
    let mut windows: Vec<(usize, usize)> = Vec::new();
    for i in 1..last {
        if !(rho[i] <= rho[i - 1] && rho[i] < rho[i + 1]) {
            continue;
        }
        let curvature = rho[i + 1] + rho[i - 1] - 2.0 * rho[i];
        let near = rho[i - 1].max(rho[i + 1]);
        // feature width below four samples, and not lost in the tails
        if curvature <= 0.0 || rho[i].max(0.0) > 8.0 * curvature || near < 1e-10 * peak {
            continue;
        }
        let lo = i.saturating_sub(KINK_HALF_WINDOW) & !1;
        let hi = ((i + KINK_HALF_WINDOW + 1) | 1).min(last);
        let hi = if (hi - lo) % 2 == 1 { hi - 1 } else { hi };
        match windows.last_mut() {
            Some(w) if lo <= w.1 => w.1 = w.1.max(hi),
            _ => windows.push((lo, hi)),
        }
    }
    let g = |u: f64| integrand(lagrange(&rho, u));
    for (lo, hi) in windows {
        let coarse = simpson(&f[lo..=hi], h);
        let cells = (hi - lo) as f64;
        let mut fine = 0.0;
        for c in lo..hi {
            let (a, b) = (c as f64, (c + 1) as f64);
            let (fa, fm, fb) = (f[c], g(a + 0.5), f[c + 1]);
            let whole = (fa + 4.0 * fm + fb) / 6.0;
            fine += adaptive_simpson(&g, a, b, fa, fm, fb, whole, KINK_TOL / (cells * h), 40);
        }
        total += fine * h - coarse;
    }
    total
}

/// `R_ρ^(ζ) + R_γ^(η)` on `grid`.
pub fn renyi_uncertainty_sum(s: &FockState, pair: RenyiPair, grid: &Grid1D) -> Result<f64> {
    WavefunctionBasis::new(grid.clone(), s.dim())?.uncertainty_sum(s, pair)
}

/// Entropic-uncertainty sum of the evolving `|ψ_{l,h}⟩` over a time grid.
pub fn entropy_series(
    spec: &SuperpositionSpec,
    grid: &TimeGrid,
    pair: RenyiPair,
    n_max: Option<usize>,
) -> Result<TimeSeries> {
    let n = n_max.unwrap_or_else(|| truncation_dim(spec.nu, DEFAULT_EPS));
    let s0 = superposed_state(spec, n)?;
    let basis = WavefunctionBasis::new(Grid1D::for_nu(spec.nu), s0.dim())?;
    let values = grid
        .fractions()
        .par_iter()
        .map(|&tau| basis.uncertainty_sum(&evolve_fraction(&s0, tau), pair))
        .collect::<Result<Vec<f64>>>()?;
    Ok(TimeSeries::new(
        grid.fractions().to_vec(),
        values,
        format!("R_rho^({}) + R_gamma^({})", pair.zeta(), pair.eta()),
    ))
}
