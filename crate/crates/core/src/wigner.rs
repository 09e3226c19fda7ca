//! Wigner function on a phase-space grid.
//!
//! `W(x,p) = Σ_{m,n} c_m c_n* W_{mn}(x,p)` with the Laguerre kernel
//!
//! ```text
//! W_{n+d,n} = ((−1)ⁿ/π) √(n!/(n+d)!) y^{d/2} e^{−y/2} L_n^{(d)}(y) e^{−idφ},
//! y = 2(x²+p²),  φ = arg(x + ip).
//! ```
//!
//! The normalized Laguerre factor is advanced in `n` by a three-term
//! recurrence with running rescaling, so no factorial or power is ever
//! formed explicitly.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{ln_factorials, FockState};
use crate::series::{write_comments, write_file};

/// Boundary magnitude above which a grid is reported as too small.
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_x: usize,
    pub n_p: usize,
}

impl PhaseSpaceGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, n_x: usize, n_p: usize) -> Result<Self> {
        if !(x_max > x_min && p_max > p_min) || n_x < 2 || n_p < 2 {
            return Err(Error::param("wigner grid", "need max > min and at least 2 points per axis"));
        }
        Ok(Self {
            x_min,
            x_max,
            p_min,
            p_max,
            n_x,
            n_p,
        })
    }

    /// Square grid `[−half, half]²` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    /// Default: 401² points over `±(√(2ν)+5)`.
    pub fn for_nu(nu: f64) -> Self {
        Self::square((2.0 * nu).sqrt() + 5.0, 401).expect("valid default grid")
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_p - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + self.dp() * j as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.n_p).map(|j| self.p(j)).collect()
    }
}

/// Wigner values, row-major with rows indexed by `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    grid: PhaseSpaceGrid,
    values: Vec<f64>,
}

fn trapezoid(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    h * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1]))
}

impl PhaseSpaceField {
    /// Wraps row-major samples (`p` rows of `x` columns), e.g. read back
    /// from a saved matrix.
    pub fn from_values(grid: PhaseSpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_x * grid.n_p {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: grid.n_x * grid.n_p,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ip * self.grid.n_x + ix]
    }

    /// 2D trapezoid integral.
    pub fn normalization(&self) -> f64 {
        let rows: Vec<f64> = self
            .values
            .chunks(self.grid.n_x)
            .map(|row| trapezoid(row, self.grid.dx()))
            .collect();
        trapezoid(&rows, self.grid.dp())
    }

    /// Largest |W| on the grid boundary.
    pub fn boundary_max(&self) -> f64 {
        let (nx, np) = (self.grid.n_x, self.grid.n_p);
        let mut m: f64 = 0.0;
        for i in 0..nx {
            m = m.max(self.at(i, 0).abs()).max(self.at(i, np - 1).abs());
        }
        for j in 0..np {
            m = m.max(self.at(0, j).abs()).max(self.at(nx - 1, j).abs());
        }
        m
    }

    /// Warning text when the field has not decayed at the boundary.
    pub fn boundary_warning(&self) -> Option<String> {
        let m = self.boundary_max();
        (m > BOUNDARY_TOL).then(|| format!("grid too small: boundary |W| = {m:.3e} exceeds {BOUNDARY_TOL:.0e}"))
    }

    /// Largest value and its grid indices.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let (k, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
        (k % self.grid.n_x, k / self.grid.n_x, v)
    }

    /// `x,p,W` rows.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        write_comments(&mut w, comments)?;
        writeln!(w, "x,p,W")?;
        for j in 0..self.grid.n_p {
            let p = self.grid.p(j);
            for i in 0..self.grid.n_x {
                writeln!(w, "{:.16e},{p:.16e},{:.16e}", self.grid.x(i), self.at(i, j))?;
            }
        }
        Ok(())
    }

    /// gnuplot `matrix nonuniform` block: the first row holds the column
    /// count followed by the x values, each further row holds p then W(x, p).
    pub fn write_matrix<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        write_comments(&mut w, comments)?;
        write!(w, "{}", self.grid.n_x)?;
        for x in self.grid.xs() {
            write!(w, " {x:.16e}")?;
        }
        writeln!(w)?;
        for j in 0..self.grid.n_p {
            write!(w, "{:.16e}", self.grid.p(j))?;
            for i in 0..self.grid.n_x {
                write!(w, " {:.16e}", self.at(i, j))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_file(path, |w| self.write_csv(w, comments))
    }

    pub fn save_matrix(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_file(path, |w| self.write_matrix(w, comments))
    }
}

/// Precomputed `(−1)ⁿ c_{n+d} c_n*` and `ln d!` for one state.
pub struct WignerKernel {
    dim: usize,
    products: Vec<Vec<Complex64>>,
    half_ln_fact: Vec<f64>,
}

const RESCALE: f64 = 1e100;

impl WignerKernel {
    pub fn new(s: &FockState) -> Self {
        let c = s.amplitudes();
        let dim = c.len();
        let products = (0..dim)
            .map(|d| {
                (0..dim - d)
                    .map(|n| {
                        let v = c[n + d] * c[n].conj();
                        if n % 2 == 0 { v } else { -v }
                    })
                    .collect()
            })
            .collect();
        let half_ln_fact = ln_factorials(dim).into_iter().map(|v| 0.5 * v).collect();
        Self {
            dim,
            products,
            half_ln_fact,
        }
    }

    /// W at one phase-space point.
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        let r2 = x * x + p * p;
        let y = 2.0 * r2;
        let ln_y = y.ln();
        let r = r2.sqrt();
        let unit = if r > 0.0 { Complex64::new(x / r, -p / r) } else { Complex64::new(1.0, 0.0) };
        let mut rot = Complex64::new(1.0, 0.0);
        let mut total = 0.0;
        for d in 0..self.dim {
            if d > 0 {
                rot *= unit;
                if r == 0.0 {
                    break;
                }
            }
            let terms = &self.products[d];
            if terms.is_empty() {
                continue;
            }
            let df = d as f64;
            let log_f0 = if d == 0 { -0.5 * y } else { 0.5 * df * ln_y - 0.5 * y - self.half_ln_fact[d] };
            let mut log_scale = log_f0;
            let mut scale = log_scale.exp();
            let (mut prev, mut cur) = (0.0, 1.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, q) in terms.iter().enumerate() {
                if scale != 0.0 {
                    acc += q * (cur * scale);
                }
                if n + 1 == terms.len() {
                    break;
                }
                let nf = n as f64;
                let next = ((2.0 * nf + 1.0 + df - y) * cur - (nf * (nf + df)).sqrt() * prev)
                    / ((nf + 1.0) * (nf + 1.0 + df)).sqrt();
                prev = cur;
                cur = next;
                if cur.abs() > RESCALE {
                    cur /= RESCALE;
                    prev /= RESCALE;
                    log_scale += RESCALE.ln();
                    scale = log_scale.exp();
                }
            }
            total += if d == 0 { acc.re } else { 2.0 * (rot * acc).re };
        }
        total / PI
    }
}

/// W at a single point.
pub fn wigner_at(s: &FockState, x: f64, p: f64) -> f64 {
    WignerKernel::new(s).eval(x, p)
}

/// W on every grid point.
pub fn wigner_field(s: &FockState, grid: &PhaseSpaceGrid) -> PhaseSpaceField {
    let kernel = WignerKernel::new(s);
    let xs = grid.xs();
    let values: Vec<f64> = (0..grid.n_p)
        .into_par_iter()
        .flat_map_iter(|j| {
            let p = grid.p(j);
            xs.iter().map(|&x| kernel.eval(x, p)).collect::<Vec<_>>()
        })
        .collect();
    PhaseSpaceField {
        grid: grid.clone(),
        values,
    }
}

/// `(∫W dp, ∫W dx)` by the trapezoid rule, on the x and p axes.
pub fn wigner_marginals(f: &PhaseSpaceField) -> (Vec<f64>, Vec<f64>) {
    let g = &f.grid;
    let x_marginal = (0..g.n_x)
        .map(|i| {
            let col: Vec<f64> = (0..g.n_p).map(|j| f.at(i, j)).collect();
            trapezoid(&col, g.dp())
        })
        .collect();
    let p_marginal = f.values.chunks(g.n_x).map(|row| trapezoid(row, g.dx())).collect();
    (x_marginal, p_marginal)
}

/// Max |W(R_φ(x,p)) − W(x,p)| over every `stride`-th grid point, with W
/// evaluated exactly at the rotated coordinates.
pub fn rotation_asymmetry(s: &FockState, grid: &PhaseSpaceGrid, angle: f64, stride: usize) -> f64 {
    let kernel = WignerKernel::new(s);
    let (sin, cos) = angle.sin_cos();
    let stride = stride.max(1);
    (0..grid.n_p)
        .into_par_iter()
        .step_by(stride)
        .map(|j| {
            let p = grid.p(j);
            (0..grid.n_x)
                .step_by(stride)
                .map(|i| {
                    let x = grid.x(i);
                    let (xr, pr) = (cos * x - sin * p, sin * x + cos * p);
                    (kernel.eval(xr, pr) - kernel.eval(x, p)).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Gaussian blur of the field with standard deviation `sigma` in
/// phase-space units, zero outside the grid.
pub fn smoothed(f: &PhaseSpaceField, sigma: f64) -> PhaseSpaceField {
    let g = &f.grid;
    let kernel = |h: f64| -> Vec<f64> {
        let half = (4.0 * sigma / h).ceil() as isize;
        let k: Vec<f64> = (-half..=half)
            .map(|i| (-0.5 * (i as f64 * h / sigma).powi(2)).exp())
            .collect();
        let total: f64 = k.iter().sum();
        k.into_iter().map(|v| v / total).collect()
    };
    let blur = |line: &[f64], k: &[f64]| -> Vec<f64> {
        let half = (k.len() / 2) as isize;
        let n = line.len() as isize;
        (0..n)
            .map(|i| {
                k.iter()
                    .enumerate()
                    .filter_map(|(o, w)| {
                        let src = i + o as isize - half;
                        (0..n).contains(&src).then(|| w * line[src as usize])
                    })
                    .sum()
            })
            .collect()
    };
    let kx = kernel(g.dx());
    let kp = kernel(g.dp());
    let rows: Vec<f64> = f.values.par_chunks(g.n_x).flat_map_iter(|row| blur(row, &kx)).collect();
    let mut out = vec![0.0; rows.len()];
    let cols: Vec<Vec<f64>> = (0..g.n_x)
        .into_par_iter()
        .map(|i| {
            let col: Vec<f64> = (0..g.n_p).map(|j| rows[j * g.n_x + i]).collect();
            blur(&col, &kp)
        })
        .collect();
    for (i, col) in cols.into_iter().enumerate() {
        for (j, v) in col.into_iter().enumerate() {
            out[j * g.n_x + i] = v;
        }
    }
    PhaseSpaceField {
        grid: g.clone(),
        values: out,
    }
}

/// Connected regions (4-neighbour) where the field reaches half its
/// maximum, as lists of flat indices.
pub fn regions_above_half_max(f: &PhaseSpaceField) -> Vec<Vec<usize>> {
    let g = &f.grid;
    let (_, _, peak) = f.argmax();
    let level = 0.5 * peak;
    let mut seen = vec![false; f.values.len()];
    let mut regions = Vec::new();
    for start in 0..f.values.len() {
        if seen[start] || f.values[start] < level {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % g.n_x, k / g.n_x);
            let mut neighbours = Vec::with_capacity(4);
            if i > 0 {
                neighbours.push(k - 1);
            }
            if i + 1 < g.n_x {
                neighbours.push(k + 1);
            }
            if j > 0 {
                neighbours.push(k - g.n_x);
            }
            if j + 1 < g.n_p {
                neighbours.push(k + g.n_x);
            }
            for nk in neighbours {
                if !seen[nk] && f.values[nk] >= level {
                    seen[nk] = true;
                    members.push(nk);
                    queue.push_back(nk);
                }
            }
        }
        regions.push(members);
    }
    regions
}

pub fn count_regions_above_half_max(f: &PhaseSpaceField) -> usize {
    regions_above_half_max(f).len()
}

/// Blur with the vacuum width, which washes out interference fringes but
/// keeps coherent lobes.
fn lobe_mask(f: &PhaseSpaceField) -> Vec<Vec<usize>> {
    regions_above_half_max(&smoothed(f, std::f64::consts::FRAC_1_SQRT_2))
}

/// Number of coherent lobes in the portrait.
pub fn count_lobes(f: &PhaseSpaceField) -> usize {
    lobe_mask(f).len()
}

/// `(x, p, W)` of the raw-field maximum inside each lobe.
pub fn lobe_peaks(f: &PhaseSpaceField) -> Vec<(f64, f64, f64)> {
    let g = &f.grid;
    lobe_mask(f)
        .into_iter()
        .map(|members| {
            let k = members
                .into_iter()
                .max_by(|&a, &b| f.values[a].total_cmp(&f.values[b]))
                .expect("regions are non-empty");
            (g.x(k % g.n_x), g.p(k / g.n_x), f.values[k])
        })
        .collect()
}
