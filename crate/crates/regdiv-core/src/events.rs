//! Diversification-event detection and the descriptive statistics built on
//! top of it: binned probability curves, joint grids, two-group ANOVA, and
//! Pearson correlation.
//!
//! Entry events follow a backward condition (inactive in t-2, t-1, t) and a
//! forward condition (active in t+h, t+h+1, t+h+2). Keep events require
//! activity at t; by default keeping means activity at t+h, with a strict
//! mode that also demands the two sustaining years.

use serde::Serialize;

use crate::econ::special::f_sf;
use crate::error::{Error, Result};
use crate::metrics::ActivityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// Passed the backward condition but not the forward one.
    EntryCandidate,
    /// Passed both conditions: a new industry appeared and sustained.
    Entry,
    /// Active at the base year but did not keep activity.
    KeepCandidate,
    /// Active at the base year and still active at the horizon.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EventRecord {
    pub province: usize,
    pub industry: usize,
    pub base_year: i32,
    pub horizon: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone)]
pub struct EventSet {
    pub records: Vec<EventRecord>,
    /// (province, industry, base year) cells whose detection window fell
    /// outside the panel.
    pub skipped_cells: u64,
}

impl EventSet {
    pub fn entries(&self) -> impl Iterator<Item = &EventRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r.kind, EventKind::Entry | EventKind::EntryCandidate))
    }

    pub fn keeps(&self) -> impl Iterator<Item = &EventRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r.kind, EventKind::Keep | EventKind::KeepCandidate))
    }
}

/// Scans every (province, industry, base year) cell of a consecutive-year
/// activity history.
///
/// Entry candidates need the backward window [t-2, t] and the forward window
/// [t+h, t+h+2] inside the history. Keep candidates need [t, t+h], or
/// [t, t+h+2] when `strict_keep` also applies the sustaining years to keeps.
pub fn detect_events(
    activity: &[ActivityMatrix],
    horizon: u32,
    strict_keep: bool,
) -> Result<EventSet> {
    if activity.is_empty() {
        return Err(Error::Validation("empty activity history".into()));
    }
    let n_provinces = activity[0].n_provinces();
    let n_industries = activity[0].n_industries();
    let year0 = activity[0].year;
    for (k, u) in activity.iter().enumerate() {
        if u.year != year0 + k as i32 {
            return Err(Error::Validation(
                "activity history must cover consecutive years".into(),
            ));
        }
        if u.n_provinces() != n_provinces || u.n_industries() != n_industries {
            return Err(Error::Validation(
                "activity history has inconsistent dimensions".into(),
            ));
        }
    }
    let n_years = activity.len() as i32;
    let h = horizon as i32;
    let mut records = Vec::new();
    let mut skipped = 0u64;

    for t_idx in 0..n_years {
        let entry_window_ok = t_idx >= 2 && t_idx + h + 2 < n_years;
        let keep_need = if strict_keep { h + 2 } else { h };
        let keep_window_ok = t_idx + keep_need < n_years;
        let u_at = |off: i32, i: usize, a: usize| activity[(t_idx + off) as usize].is_active(i, a);
        for i in 0..n_provinces {
            for a in 0..n_industries {
                if u_at(0, i, a) {
                    if !keep_window_ok {
                        skipped += 1;
                        continue;
                    }
                    let kept = if strict_keep {
                        u_at(h, i, a) && u_at(h + 1, i, a) && u_at(h + 2, i, a)
                    } else {
                        u_at(h, i, a)
                    };
                    records.push(EventRecord {
                        province: i,
                        industry: a,
                        base_year: year0 + t_idx,
                        horizon,
                        kind: if kept { EventKind::Keep } else { EventKind::KeepCandidate },
                    });
                } else {
                    if !entry_window_ok {
                        skipped += 1;
                        continue;
                    }
                    let backward = !u_at(-1, i, a) && !u_at(-2, i, a);
                    if !backward {
                        continue;
                    }
                    let forward = u_at(h, i, a) && u_at(h + 1, i, a) && u_at(h + 2, i, a);
                    records.push(EventRecord {
                        province: i,
                        industry: a,
                        base_year: year0 + t_idx,
                        horizon,
                        kind: if forward { EventKind::Entry } else { EventKind::EntryCandidate },
                    });
                }
            }
        }
    }
    Ok(EventSet {
        records,
        skipped_cells: skipped,
    })
}

// ---------------------------------------------------------------------------
// Binned curves and grids
// ---------------------------------------------------------------------------

/// Empirical probability curve over equal-width density bins.
#[derive(Debug, Clone, Serialize)]
pub struct BinnedCurve {
    /// n_bins + 1 edges over [min, max] of the densities.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Per-bin empirical probability; `None` for empty bins.
    pub means: Vec<Option<f64>>,
    /// Binomial standard error sqrt(p(1-p)/n) per bin.
    pub stderrs: Vec<Option<f64>>,
}

fn bin_index(x: f64, min: f64, max: f64, n_bins: usize) -> usize {
    if max == min {
        return 0;
    }
    let raw = ((x - min) / (max - min) * n_bins as f64) as usize;
    raw.min(n_bins - 1)
}

pub fn binned_curve(densities: &[f64], outcomes: &[bool], n_bins: usize) -> Result<BinnedCurve> {
    if densities.is_empty() {
        return Err(Error::Validation("binned_curve: empty input".into()));
    }
    if densities.len() != outcomes.len() {
        return Err(Error::Validation(
            "binned_curve: densities and outcomes differ in length".into(),
        ));
    }
    if n_bins == 0 {
        return Err(Error::Validation("binned_curve: need at least one bin".into()));
    }
    let min = densities.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = densities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0usize; n_bins];
    let mut successes = vec![0usize; n_bins];
    for (&d, &y) in densities.iter().zip(outcomes) {
        let b = bin_index(d, min, max, n_bins);
        counts[b] += 1;
        if y {
            successes[b] += 1;
        }
    }
    let edges: Vec<f64> = (0..=n_bins)
        .map(|k| min + (max - min) * k as f64 / n_bins as f64)
        .collect();
    let means: Vec<Option<f64>> = counts
        .iter()
        .zip(&successes)
        .map(|(&n, &s)| if n == 0 { None } else { Some(s as f64 / n as f64) })
        .collect();
    let stderrs: Vec<Option<f64>> = counts
        .iter()
        .zip(&means)
        .map(|(&n, m)| m.map(|p| (p * (1.0 - p) / n as f64).sqrt()))
        .collect();
    Ok(BinnedCurve {
        edges,
        counts,
        means,
        stderrs,
    })
}

impl BinnedCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count,mean,stderr\n");
        for k in 0..self.counts.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                crate::table::fmt_f64(self.edges[k]),
                crate::table::fmt_f64(self.edges[k + 1]),
                self.counts[k],
                crate::table::fmt_opt_f64(self.means[k]),
                crate::table::fmt_opt_f64(self.stderrs[k]),
            ));
        }
        out
    }
}

/// Two-dimensional empirical probability grid; cells with no observations
/// are marked missing.
#[derive(Debug, Clone, Serialize)]
pub struct JointGrid {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major [y_bin][x_bin].
    pub counts: Vec<usize>,
    pub probs: Vec<Option<f64>>,
}

pub fn joint_grid(
    x: &[f64],
    y: &[f64],
    outcomes: &[bool],
    x_bins: usize,
    y_bins: usize,
) -> Result<JointGrid> {
    if x.is_empty() {
        return Err(Error::Validation("joint_grid: empty input".into()));
    }
    if x.len() != y.len() || x.len() != outcomes.len() {
        return Err(Error::Validation("joint_grid: length mismatch".into()));
    }
    if x_bins == 0 || y_bins == 0 {
        return Err(Error::Validation("joint_grid: need at least one bin per axis".into()));
    }
    let x_min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0usize; x_bins * y_bins];
    let mut successes = vec![0usize; x_bins * y_bins];
    for k in 0..x.len() {
        let bx = bin_index(x[k], x_min, x_max, x_bins);
        let by = bin_index(y[k], y_min, y_max, y_bins);
        counts[by * x_bins + bx] += 1;
        if outcomes[k] {
            successes[by * x_bins + bx] += 1;
        }
    }
    let probs = counts
        .iter()
        .zip(&successes)
        .map(|(&n, &s)| if n == 0 { None } else { Some(s as f64 / n as f64) })
        .collect();
    Ok(JointGrid {
        x_edges: (0..=x_bins)
            .map(|k| x_min + (x_max - x_min) * k as f64 / x_bins as f64)
            .collect(),
        y_edges: (0..=y_bins)
            .map(|k| y_min + (y_max - y_min) * k as f64 / y_bins as f64)
            .collect(),
        counts,
        probs,
    })
}

impl JointGrid {
    pub fn to_csv(&self) -> String {
        let x_bins = self.x_edges.len() - 1;
        let y_bins = self.y_edges.len() - 1;
        let mut out = String::from("x_low,x_high,y_low,y_high,count,prob\n");
        for by in 0..y_bins {
            for bx in 0..x_bins {
                let k = by * x_bins + bx;
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    crate::table::fmt_f64(self.x_edges[bx]),
                    crate::table::fmt_f64(self.x_edges[bx + 1]),
                    crate::table::fmt_f64(self.y_edges[by]),
                    crate::table::fmt_f64(self.y_edges[by + 1]),
                    self.counts[k],
                    crate::table::fmt_opt_f64(self.probs[k]),
                ));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Group statistics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnovaResult {
    pub f: f64,
    pub p: f64,
    pub df_between: f64,
    pub df_within: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

/// One-way two-group ANOVA: F with (1, n_a + n_b - 2) degrees of freedom.
pub fn anova_two_group(a: &[f64], b: &[f64]) -> Result<AnovaResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Numerical(
            "anova_two_group: each group needs at least two observations".into(),
        ));
    }
    let n_a = a.len() as f64;
    let n_b = b.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n_a;
    let mean_b = b.iter().sum::<f64>() / n_b;
    let grand = (mean_a * n_a + mean_b * n_b) / (n_a + n_b);
    let ss_between = n_a * (mean_a - grand).powi(2) + n_b * (mean_b - grand).powi(2);
    let ss_within: f64 = a.iter().map(|v| (v - mean_a).powi(2)).sum::<f64>()
        + b.iter().map(|v| (v - mean_b).powi(2)).sum::<f64>();
    let df_within = n_a + n_b - 2.0;
    if ss_within <= 0.0 {
        return Err(Error::Numerical(
            "anova_two_group: zero pooled variance".into(),
        ));
    }
    let f = ss_between / (ss_within / df_within);
    let p = f_sf(f, 1.0, df_within)?;
    Ok(AnovaResult {
        f,
        p,
        df_between: 1.0,
        df_within,
        mean_a,
        mean_b,
    })
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Numerical(
            "pearson_r: need two equally sized samples with >= 2 points".into(),
        ));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::Numerical("pearson_r: zero variance".into()));
    }
    Ok(cov / (var_x.sqrt() * var_y.sqrt()))
}
