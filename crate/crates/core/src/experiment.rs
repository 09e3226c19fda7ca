//! Figure presets and the configurable experiment driver behind the CLI.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::entropy::{entropy_series, RenyiPair};
use crate::error::{Error, Result};
use crate::fock::{superposed_state, truncation_dim, SuperpositionSpec, DEFAULT_EPS};
use crate::kerr::{autocorrelation, evolve_fraction, KerrParams, TimeGrid};
use crate::moments::{moment_series, Quadrature};
use crate::schedule::{burst_events, detect_bursts, detect_minima, match_report, predicted_events, BurstConfig, MinimaConfig};
use crate::series::{write_file, TimeSeries};
use crate::wigner::{wigner_field, PhaseSpaceGrid};

pub const FIGURES: [&str; 11] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
];

pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Overrides shared by every run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub n_max: Option<usize>,
    pub grid_points: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("out"),
            n_max: None,
            grid_points: None,
        }
    }
}

/// Files written and the parameter lines stamped into them.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub provenance: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
enum Task {
    Moment {
        q: Quadrature,
        power: usize,
        window: (f64, f64),
    },
    Entropy {
        pair: RenyiPair,
        window: (f64, f64),
    },
    Autocorrelation {
        window: (f64, f64),
    },
    Wigner {
        tau: f64,
        points: usize,
    },
}

#[derive(Clone, Debug)]
struct Job {
    stem: String,
    spec: SuperpositionSpec,
    chi: f64,
    task: Task,
}

fn spec(l: usize, nu: f64) -> SuperpositionSpec {
    SuperpositionSpec::new(l, 0, nu, FRAC_PI_4).expect("preset parameters are valid")
}

fn moment(stem: &str, l: usize, nu: f64, power: usize, hi: f64) -> Job {
    Job {
        stem: stem.into(),
        spec: spec(l, nu),
        chi: 1.0,
        task: Task::Moment {
            q: Quadrature::X,
            power,
            window: (0.0, hi),
        },
    }
}

fn entropy(stem: &str, l: usize, nu: f64) -> Job {
    Job {
        stem: stem.into(),
        spec: spec(l, nu),
        chi: 1.0,
        task: Task::Entropy {
            pair: RenyiPair::default(),
            window: (0.0, 0.5),
        },
    }
}

fn wigner(stem: &str, l: usize, tau: f64) -> Job {
    Job {
        stem: stem.into(),
        spec: spec(l, 20.0),
        chi: 1.0,
        task: Task::Wigner { tau, points: 401 },
    }
}

fn figure_jobs(name: &str) -> Result<Vec<Job>> {
    Ok(match name {
        "fig1" => vec![wigner("fig1_wigner_coherent_T4", 1, 0.25)],
        "fig2" => vec![moment("fig2_x4_coherent", 1, 100.0, 4, 1.0)],
        "fig3" => vec![entropy("fig3_entropy_coherent", 1, 35.0)],
        "fig4" => vec![
            wigner("fig4a_wigner_even_t0", 2, 0.0),
            wigner("fig4b_wigner_even_T4", 2, 0.25),
        ],
        "fig5" => vec![wigner("fig5_wigner_even_T8", 2, 0.125)],
        "fig6" => vec![moment("fig6_x2_even", 2, 100.0, 2, 1.0)],
        "fig7" => vec![
            moment("fig7a_x4_even", 2, 100.0, 4, 1.0),
            moment("fig7b_x6_even", 2, 100.0, 6, 0.5),
            entropy("fig7c_entropy_even", 2, 30.0),
        ],
        "fig8" => vec![
            wigner("fig8a_wigner_psi3_t0", 3, 0.0),
            wigner("fig8b_wigner_psi3_T9", 3, 1.0 / 9.0),
            wigner("fig8c_wigner_psi3_T18", 3, 1.0 / 18.0),
        ],
        "fig9" => vec![moment("fig9_x3_psi3", 3, 100.0, 3, 1.0)],
        "fig10" => vec![
            moment("fig10a_x6_psi3", 3, 100.0, 6, 0.5),
            moment("fig10b_x9_psi3", 3, 100.0, 9, 0.5),
            entropy("fig10c_entropy_psi3", 3, 30.0),
        ],
        "fig11" => vec![moment("fig11_x8_psi4", 4, 100.0, 8, 0.5)],
        other => {
            return Err(Error::param(
                "figure",
                format!("unknown figure '{other}', expected one of {}", FIGURES.join(", ")),
            ))
        }
    })
}

/// Writes the data of one preset figure into `opts.out_dir`.
pub fn run_figure(name: &str, opts: &RunOptions) -> Result<RunSummary> {
    let jobs = figure_jobs(name)?;
    run_jobs(name, &jobs, opts)
}

fn fmt_f(v: f64) -> String {
    format!("{v:.17}").trim_end_matches('0').trim_end_matches('.').to_string()
}

fn header(origin: &str, job: &Job, n_max: usize, extra: &[String]) -> Vec<String> {
    let s = &job.spec;
    let mut lines = vec![
        format!("source={origin}"),
        format!(
            "state l={} h={} nu={} theta={} chi={}",
            s.l,
            s.h,
            fmt_f(s.nu),
            fmt_f(s.theta),
            fmt_f(job.chi)
        ),
        format!("n_max={n_max}"),
    ];
    lines.extend_from_slice(extra);
    lines
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, text: &str) -> Result<()> {
    write_file(path, |w| {
        use std::io::Write;
        writeln!(w, "{text}")
    })
}

fn run_jobs(origin: &str, jobs: &[Job], opts: &RunOptions) -> Result<RunSummary> {
    ensure_dir(&opts.out_dir)?;
    let mut summary = RunSummary::default();
    let points = opts.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    for job in jobs {
        let base = opts.n_max.unwrap_or_else(|| truncation_dim(job.spec.nu, DEFAULT_EPS));
        let path = |ext: &str| opts.out_dir.join(format!("{}.{ext}", job.stem));
        match &job.task {
            Task::Moment { q, power, window } => {
                let grid = TimeGrid::uniform(window.0, window.1, points)?;
                let series = moment_series(&job.spec, *q, *power, &grid, Some(base))?;
                let extra = vec![
                    format!("observable={q}^{power}"),
                    format!("grid=[{}, {}] points={points}", fmt_f(window.0), fmt_f(window.1)),
                ];
                let head = header(origin, job, base + power, &extra);
                save_series(&series, &path("csv"), &head, &mut summary)?;
                let predicted = burst_events(job.spec.l as u64, *power as u64, *window);
                let bursts = detect_bursts(&series, &BurstConfig::default())?;
                let report = match_report(&bursts, &predicted, 2.0 * grid.step());
                let file = opts.out_dir.join(format!("{}_bursts.json", job.stem));
                write_json(&file, &report.to_json())?;
                summary.files.push(file);
            }
            Task::Entropy { pair, window } => {
                let grid = TimeGrid::uniform(window.0, window.1, points)?;
                let series = entropy_series(&job.spec, &grid, *pair, Some(base))?;
                let extra = vec![
                    format!("observable=R_rho^({}) + R_gamma^({})", fmt_f(pair.zeta()), fmt_f(pair.eta())),
                    format!("bound={}", fmt_f(pair.bound())),
                    format!("grid=[{}, {}] points={points}", fmt_f(window.0), fmt_f(window.1)),
                ];
                let head = header(origin, job, base, &extra);
                save_series(&series, &path("csv"), &head, &mut summary)?;
                let predicted = predicted_events(job.spec.l as u64, 6, *window);
                let minima = detect_minima(&series, &MinimaConfig::default());
                let report = match_report(&minima, &predicted, 2.0 * grid.step());
                let file = opts.out_dir.join(format!("{}_minima.json", job.stem));
                write_json(&file, &report.to_json())?;
                summary.files.push(file);
            }
            Task::Autocorrelation { window } => {
                let grid = TimeGrid::uniform(window.0, window.1, points)?;
                let s0 = superposed_state(&job.spec, base)?;
                let series = autocorrelation(&s0, &grid);
                let extra = vec![
                    "observable=autocorrelation".to_string(),
                    format!("grid=[{}, {}] points={points}", fmt_f(window.0), fmt_f(window.1)),
                ];
                let head = header(origin, job, base, &extra);
                save_series(&series, &path("csv"), &head, &mut summary)?;
            }
            Task::Wigner { tau, points } => {
                let s = evolve_fraction(&superposed_state(&job.spec, base)?, *tau);
                let half = (2.0 * job.spec.nu).sqrt() + 5.0;
                let grid = PhaseSpaceGrid::square(half, *points)?;
                let field = wigner_field(&s, &grid);
                if let Some(w) = field.boundary_warning() {
                    summary.warnings.push(format!("{}: {w}", job.stem));
                }
                let extra = vec![
                    format!("observable=wigner t_over_Trev={}", fmt_f(*tau)),
                    format!("grid=[{}, {}]^2 points={points}x{points}", fmt_f(-half), fmt_f(half)),
                ];
                let head = header(origin, job, base, &extra);
                summary.provenance.push(format!("{}: {}", job.stem, head.join("; ")));
                let m = path("matrix");
                field.save_matrix(&m, &head)?;
                summary.files.push(m);
                let c = path("csv");
                field.save_csv(&c, &head)?;
                summary.files.push(c);
            }
        }
    }
    Ok(summary)
}

fn save_series(series: &TimeSeries, path: &Path, head: &[String], summary: &mut RunSummary) -> Result<()> {
    series.save_csv(path, head)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    summary.provenance.push(format!("{stem}: {}", head.join("; ")));
    summary.files.push(path.to_path_buf());
    Ok(())
}

fn default_theta() -> f64 {
    FRAC_PI_4
}
fn default_chi() -> f64 {
    1.0
}
fn default_end() -> f64 {
    1.0
}
fn default_points() -> usize {
    DEFAULT_GRID_POINTS
}
fn default_wigner_points() -> usize {
    401
}
fn default_name() -> String {
    "custom".into()
}

/// Flat JSON experiment description.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub l: usize,
    #[serde(default)]
    pub h: usize,
    pub nu: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_chi")]
    pub chi: f64,
    #[serde(default)]
    pub grid_start: f64,
    #[serde(default = "default_end")]
    pub grid_end: f64,
    #[serde(default = "default_points")]
    pub grid_points: usize,
    /// Entries like `"x^4"` or `"p^2"`.
    #[serde(default)]
    pub moments: Vec<String>,
    #[serde(default)]
    pub entropy_zeta: Option<f64>,
    #[serde(default)]
    pub autocorrelation: bool,
    /// Snapshot times in units of `T_rev`.
    #[serde(default)]
    pub wigner_times: Vec<f64>,
    #[serde(default = "default_wigner_points")]
    pub wigner_points: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default = "default_name")]
    pub name: String,
}

impl ExperimentConfig {
    /// Parses and validates. Syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn field_err(field: &str, reason: impl std::fmt::Display) -> Error {
        Error::Config(format!("field '{field}': {reason}"))
    }

    pub fn validate(&self) -> Result<()> {
        SuperpositionSpec::new(self.l, self.h, self.nu, self.theta).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Self::field_err(name, reason),
            other => other,
        })?;
        KerrParams::new(self.chi).map_err(|e| Self::field_err("chi", e))?;
        TimeGrid::uniform(self.grid_start, self.grid_end, self.grid_points)
            .map_err(|e| Self::field_err("grid_start/grid_end/grid_points", e))?;
        for m in &self.moments {
            parse_moment(m).map_err(|e| Self::field_err("moments", e))?;
        }
        if let Some(z) = self.entropy_zeta {
            RenyiPair::from_zeta(z).map_err(|e| Self::field_err("entropy_zeta", e))?;
        }
        if let Some(t) = self.wigner_times.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Self::field_err("wigner_times", format!("{t} is outside [0, 1]")));
        }
        if self.wigner_points < 2 {
            return Err(Self::field_err("wigner_points", "need at least 2"));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Self::field_err("name", "must be a plain file-name prefix"));
        }
        if self.moments.is_empty() && self.entropy_zeta.is_none() && !self.autocorrelation && self.wigner_times.is_empty() {
            return Err(Error::Config(
                "no observables requested: set moments, entropy_zeta, autocorrelation or wigner_times".into(),
            ));
        }
        Ok(())
    }
}

/// Parses `"x^4"` style moment requests.
pub fn parse_moment(text: &str) -> Result<(Quadrature, usize)> {
    let (q, k) = text
        .split_once('^')
        .ok_or_else(|| Error::param("moments", format!("expected 'x^k' or 'p^k', got '{text}'")))?;
    let q: Quadrature = q.trim().parse()?;
    let k: usize = k
        .trim()
        .parse()
        .map_err(|_| Error::param("moments", format!("bad power in '{text}'")))?;
    if k == 0 {
        return Err(Error::param("moments", "power must be at least 1"));
    }
    Ok((q, k))
}

/// Runs a validated configuration. `opts.out_dir` is used unless the
/// config names its own.
pub fn run_custom(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    cfg.validate()?;
    let spec = SuperpositionSpec::new(cfg.l, cfg.h, cfg.nu, cfg.theta)?;
    let window = (cfg.grid_start, cfg.grid_end);
    let mut jobs = Vec::new();
    let job = |stem: String, task: Task| Job {
        stem,
        spec,
        chi: cfg.chi,
        task,
    };
    for m in &cfg.moments {
        let (q, power) = parse_moment(m)?;
        jobs.push(job(format!("{}_{q}{power}", cfg.name), Task::Moment { q, power, window }));
    }
    if let Some(z) = cfg.entropy_zeta {
        let pair = RenyiPair::from_zeta(z)?;
        jobs.push(job(format!("{}_entropy", cfg.name), Task::Entropy { pair, window }));
    }
    if cfg.autocorrelation {
        jobs.push(job(format!("{}_autocorrelation", cfg.name), Task::Autocorrelation { window }));
    }
    for (i, &tau) in cfg.wigner_times.iter().enumerate() {
        jobs.push(job(
            format!("{}_wigner{i}", cfg.name),
            Task::Wigner {
                tau,
                points: cfg.wigner_points,
            },
        ));
    }
    let opts = RunOptions {
        out_dir: cfg.out_dir.clone().unwrap_or_else(|| opts.out_dir.clone()),
        n_max: opts.n_max.or(cfg.n_max),
        grid_points: opts.grid_points.or(Some(cfg.grid_points)),
    };
    run_jobs("custom", &jobs, &opts)
}

/// Human-readable list of what a run wrote.
pub fn describe(summary: &RunSummary) -> String {
    let mut out = String::new();
    for p in &summary.provenance {
        let _ = writeln!(out, "{p}");
    }
    for f in &summary.files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    for w in &summary.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
