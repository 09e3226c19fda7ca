//! Predicted rotation and fractional-revival times, and detection of the
//! corresponding features in observable time series.
//!
//! For `|ψ_l⟩` the Kerr phase at `tau` acts on the support `n = l·m` as
//! `e^{-iπ l² m² tau}` times a linear (rotation) term. When `l²·tau = j/k`
//! in lowest terms the state is a superposition of `k` rotated copies of
//! the initial packet; `k = 1` is a rigid rotation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Rotation,
    SubPacket,
}

/// Event at `tau = j/d`, with `gcd(j, d) = 1` and `0 < j < d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RevivalEvent {
    pub j: u64,
    pub d: u64,
    pub kind: EventKind,
    pub k: u64,
}

impl RevivalEvent {
    pub fn fraction(&self) -> f64 {
        self.j as f64 / self.d as f64
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Events of `|ψ_l⟩` with sub-packet count up to `k_max`, inside the
/// closed window `[lo, hi]`, sorted by time. Rotations sit at `j/l²`;
/// `k`-sub-packet revivals at `j/(l²k)` with `gcd(j, k) = 1`. Each time is
/// reported once in lowest terms.
pub fn predicted_events(l: u64, k_max: u64, window: (f64, f64)) -> Vec<RevivalEvent> {
    assert!(l >= 1, "l must be positive");
    let l2 = l * l;
    let mut events: Vec<RevivalEvent> = Vec::new();
    let mut push = |num: u64, den: u64, k: u64| {
        let g = gcd(num, den);
        let (j, d) = (num / g, den / g);
        if events.iter().any(|e| e.j == j && e.d == d) {
            return;
        }
        let kind = if k == 1 { EventKind::Rotation } else { EventKind::SubPacket };
        events.push(RevivalEvent { j, d, kind, k });
    };
    for j in 1..l2 {
        push(j, l2, 1);
    }
    for k in 2..=k_max {
        for j in 1..l2 * k {
            if gcd(j, k) == 1 {
                push(j, l2 * k, k);
            }
        }
    }
    let (lo, hi) = window;
    let eps = 1e-12;
    events.retain(|e| e.fraction() >= lo - eps && e.fraction() <= hi + eps);
    events.sort_by(|a, b| (a.j * b.d).cmp(&(b.j * a.d)));
    events
}

/// Subset of the schedule visible in `⟨x^power⟩` of `|ψ_l⟩`.
///
/// `⟨a†^r a^{r+s}⟩` has support only for `l | s`, and its non-damped branch
/// lights up when `s·τ·l` is an integer. An `x^power` moment mixes orders
/// `s ≤ power` with `s ≡ power (mod 2)`, so bursts sit at `n/(l·s)` for
/// those `s`. Each time carries the sub-packet count it reduces to.
pub fn burst_events(l: u64, power: u64, window: (f64, f64)) -> Vec<RevivalEvent> {
    assert!(l >= 1, "l must be positive");
    let l2 = l * l;
    let mut events: Vec<RevivalEvent> = Vec::new();
    for s in (1..=power).filter(|s| s % l == 0 && s % 2 == power % 2) {
        let den = l * s;
        for num in 1..den {
            let g = gcd(num, den);
            let (j, d) = (num / g, den / g);
            if events.iter().any(|e| e.j == j && e.d == d) {
                continue;
            }
            let k = d / gcd(d, l2);
            let kind = if k == 1 { EventKind::Rotation } else { EventKind::SubPacket };
            events.push(RevivalEvent { j, d, kind, k });
        }
    }
    let (lo, hi) = window;
    let eps = 1e-12;
    events.retain(|e| e.fraction() >= lo - eps && e.fraction() <= hi + eps);
    events.sort_by(|a, b| (a.j * b.d).cmp(&(b.j * a.d)));
    events
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Burst detection settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurstConfig {
    /// Threshold in units of the median absolute deviation.
    pub mad_multiplier: f64,
    /// Threshold floor relative to the largest deviation; keeps roundoff
    /// on an exactly flat plateau from registering.
    pub relative_floor: f64,
    /// Dilation half-width in samples; joins the lobes of one burst.
    pub bridge: usize,
}

impl Default for BurstConfig {
    fn default() -> Self {
        Self {
            mad_multiplier: 5.0,
            relative_floor: 1e-9,
            bridge: 4,
        }
    }
}

/// Shortest series accepted by [`detect_bursts`].
pub const MIN_SERIES_LEN: usize = 100;

/// Times where the series leaves its plateau (the median).
///
/// Samples deviating by more than the threshold are grouped into maximal
/// windows after a running-max dilation of `bridge` samples. A window is
/// reported by its deviation²-weighted centroid; a window touching an end
/// of the grid is reported at that end, except at `tau = 0` or `1`, which
/// are full revivals and are dropped.
pub fn detect_bursts(series: &TimeSeries, cfg: &BurstConfig) -> Result<Vec<f64>> {
    let n = series.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort { len: n, min: MIN_SERIES_LEN });
    }
    let v = series.values();
    let t = series.fractions();
    let plateau = median(v);
    let dev: Vec<f64> = v.iter().map(|x| (x - plateau).abs()).collect();
    let largest = dev.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(Vec::new());
    }
    let threshold = (cfg.mad_multiplier * median(&dev)).max(cfg.relative_floor * largest);
    let h = cfg.bridge;
    let envelope: Vec<f64> = (0..n)
        .map(|i| dev[i.saturating_sub(h)..(i + h + 1).min(n)].iter().cloned().fold(0.0, f64::max))
        .collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if envelope[i] <= threshold {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && envelope[j + 1] > threshold {
            j += 1;
        }
        let at_start = i == 0;
        let at_end = j == n - 1;
        let a = if at_start { 0 } else { i + h };
        let b = if at_end { n - 1 } else { j.saturating_sub(h) };
        i = j + 1;
        if (at_start && t[0] <= 1e-12) || (at_end && t[n - 1] >= 1.0 - 1e-12) {
            continue;
        }
        if at_start {
            out.push(t[0]);
        } else if at_end {
            out.push(t[n - 1]);
        } else if a <= b {
            let (mut wsum, mut tsum) = (0.0, 0.0);
            for k in a..=b {
                let w = dev[k] * dev[k];
                wsum += w;
                tsum += w * t[k];
            }
            out.push(tsum / wsum);
        }
    }
    Ok(out)
}

/// Minimum detection settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimaConfig {
    /// Minimum prominence in series units.
    pub prominence: f64,
    /// Standard deviation of the Gaussian pre-smoothing, in units of
    /// `T_rev`. Zero disables smoothing.
    pub smoothing: f64,
}

impl Default for MinimaConfig {
    fn default() -> Self {
        Self {
            prominence: 0.05,
            smoothing: 0.006,
        }
    }
}

/// Gaussian smoothing with half-sample symmetric reflection at the ends.
pub fn gaussian_smooth(values: &[f64], sigma_samples: f64) -> Vec<f64> {
    if sigma_samples <= 0.0 {
        return values.to_vec();
    }
    let n = values.len() as isize;
    let half = (4.0 * sigma_samples + 0.5) as isize;
    let weights: Vec<f64> = (-half..=half)
        .map(|i| (-0.5 * (i as f64 / sigma_samples).powi(2)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let reflect = |mut i: isize| -> usize {
        let period = 2 * n;
        i = i.rem_euclid(period);
        if i >= n {
            i = period - 1 - i;
        }
        i as usize
    };
    (0..n)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .map(|(o, w)| w * values[reflect(i + o as isize - half)])
                .sum::<f64>()
                / total
        })
        .collect()
}

/// Strict interior local minima below the median with prominence above
/// the configured value, found after optional smoothing.
pub fn detect_minima(series: &TimeSeries, cfg: &MinimaConfig) -> Vec<f64> {
    let n = series.len();
    if n < 3 {
        return Vec::new();
    }
    let step = series.step();
    let s = if cfg.smoothing > 0.0 && step > 0.0 {
        gaussian_smooth(series.values(), cfg.smoothing / step)
    } else {
        series.values().to_vec()
    };
    let med = median(&s);
    let t = series.fractions();
    let mut out = Vec::new();
    for i in 1..n - 1 {
        if !(s[i] < s[i - 1] && s[i] < s[i + 1]) || s[i] >= med {
            continue;
        }
        let mut left = s[i];
        for k in (0..i).rev() {
            if s[k] < s[i] {
                break;
            }
            left = left.max(s[k]);
        }
        let mut right = s[i];
        for &v in &s[i + 1..] {
            if v < s[i] {
                break;
            }
            right = right.max(v);
        }
        if left.min(right) - s[i] > cfg.prominence {
            out.push(t[i]);
        }
    }
    out
}

/// Outcome of matching detected times to predicted events.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub matched: Vec<MatchedPair>,
    pub misses: Vec<RevivalEvent>,
    pub spurious: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchedPair {
    pub detected: f64,
    pub event: RevivalEvent,
}

#[derive(Serialize)]
struct ReportEntry {
    t_over_trev: f64,
    j: u64,
    d: u64,
    kind: EventKind,
    k: u64,
    matched: bool,
    detected_at: Option<f64>,
}

impl MatchReport {
    pub fn is_exact(&self) -> bool {
        self.misses.is_empty() && self.spurious.is_empty()
    }

    /// JSON text: predicted events with their match status, and unmatched
    /// detections.
    pub fn to_json(&self) -> String {
        let mut entries: Vec<ReportEntry> = self
            .matched
            .iter()
            .map(|m| ReportEntry {
                t_over_trev: m.event.fraction(),
                j: m.event.j,
                d: m.event.d,
                kind: m.event.kind,
                k: m.event.k,
                matched: true,
                detected_at: Some(m.detected),
            })
            .chain(self.misses.iter().map(|e| ReportEntry {
                t_over_trev: e.fraction(),
                j: e.j,
                d: e.d,
                kind: e.kind,
                k: e.k,
                matched: false,
                detected_at: None,
            }))
            .collect();
        entries.sort_by(|a, b| a.t_over_trev.total_cmp(&b.t_over_trev));
        let value = serde_json::json!({
            "events": entries.iter().map(|e| serde_json::json!({
                "t_over_Trev": e.t_over_trev,
                "j": e.j,
                "d": e.d,
                "kind": e.kind,
                "k": e.k,
                "matched": e.matched,
                "detected_at": e.detected_at,
            })).collect::<Vec<_>>(),
            "spurious": self.spurious,
        });
        serde_json::to_string_pretty(&value).expect("plain data serializes")
    }
}

/// Greedy nearest matching: closest (detected, predicted) pairs within
/// `tol` are paired first, each side used at most once.
pub fn match_report(detected: &[f64], predicted: &[RevivalEvent], tol: f64) -> MatchReport {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (a, &t) in detected.iter().enumerate() {
        for (b, e) in predicted.iter().enumerate() {
            let dist = (t - e.fraction()).abs();
            if dist <= tol {
                pairs.push((dist, a, b));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used_d = vec![false; detected.len()];
    let mut used_p = vec![false; predicted.len()];
    let mut matched = Vec::new();
    for (_, a, b) in pairs {
        if !used_d[a] && !used_p[b] {
            used_d[a] = true;
            used_p[b] = true;
            matched.push(MatchedPair {
                detected: detected[a],
                event: predicted[b],
            });
        }
    }
    matched.sort_by(|x, y| x.detected.total_cmp(&y.detected));
    MatchReport {
        matched,
        misses: predicted.iter().zip(&used_p).filter(|(_, u)| !**u).map(|(e, _)| *e).collect(),
        spurious: detected.iter().zip(&used_d).filter(|(_, u)| !**u).map(|(t, _)| *t).collect(),
    }
}
