//! Event-study and differences-in-differences designs over province pairs,
//! with high-speed-rail connectivity as the treatment.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::panel::RailTable;

use super::design::DesignBuilder;
use super::ols::{ols_fit, Covariance};
use super::{Coefficient, RegressionResult};

/// Pair-level outcome panel: one optional value per (pair, year).
#[derive(Debug, Clone)]
pub struct PairPanel {
    pub pairs: Vec<(usize, usize)>,
    pub years: Vec<i32>,
    /// Row-major [pair][year].
    values: Vec<Option<f64>>,
}

impl PairPanel {
    pub fn new(pairs: Vec<(usize, usize)>, years: Vec<i32>) -> Self {
        let len = pairs.len() * years.len();
        PairPanel {
            pairs,
            years,
            values: vec![None; len],
        }
    }

    pub fn set(&mut self, pair_idx: usize, year_idx: usize, value: f64) {
        self.values[pair_idx * self.years.len() + year_idx] = Some(value);
    }

    pub fn get(&self, pair_idx: usize, year_idx: usize) -> Option<f64> {
        self.values[pair_idx * self.years.len() + year_idx]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EventStudyCoefficient {
    pub year: i32,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EventStudyResult {
    pub baseline_year: i32,
    pub intercept: f64,
    pub coefficients: Vec<EventStudyCoefficient>,
    /// Linear trend fitted through the pre-baseline coefficients, for the
    /// parallel-pre-trend check; `None` with fewer than three pre years.
    pub pre_trend_slope: Option<f64>,
    pub pre_trend_p: Option<f64>,
    pub n: usize,
}

/// Regresses the pair outcome on an intercept plus Treat × 1{t = k} for every
/// year k except the baseline. Flat β_k before the baseline supports the
/// parallel-trends reading; the post-baseline path traces the treatment
/// effect.
pub fn event_study(
    panel: &PairPanel,
    treat: &RailTable,
    baseline_year: i32,
    covariance: Covariance,
) -> Result<EventStudyResult> {
    if !panel.years.contains(&baseline_year) {
        return Err(Error::Validation(format!(
            "baseline year {baseline_year} not covered by the pair panel"
        )));
    }
    let treated_flags: Vec<bool> = panel
        .pairs
        .iter()
        .map(|&(i, j)| treat.is_treated(i, j))
        .collect();
    if treated_flags.iter().all(|&t| t) || treated_flags.iter().all(|&t| !t) {
        return Err(Error::Validation(
            "event study needs both treated and control pairs".into(),
        ));
    }

    let mut outcome = Vec::new();
    let mut row_year = Vec::new();
    let mut row_treated = Vec::new();
    for (p, &treated) in treated_flags.iter().enumerate() {
        for (t, &year) in panel.years.iter().enumerate() {
            if let Some(v) = panel.get(p, t) {
                outcome.push(v);
                row_year.push(year);
                row_treated.push(treated);
            }
        }
    }
    if outcome.is_empty() {
        return Err(Error::Validation("pair panel has no defined outcomes".into()));
    }

    let mut builder = DesignBuilder::new().intercept();
    let mut event_years = Vec::new();
    for &year in &panel.years {
        if year == baseline_year {
            continue;
        }
        let column: Vec<f64> = row_year
            .iter()
            .zip(&row_treated)
            .map(|(&t, &tr)| if t == year && tr { 1.0 } else { 0.0 })
            .collect();
        if column.iter().all(|&v| v == 0.0) {
            continue; // year absent from the defined observations
        }
        builder = builder.column(&format!("treat_x_{year}"), column);
        event_years.push(year);
    }
    let design = builder.outcome(outcome).build()?;
    let fit = ols_fit(&design, covariance)?;

    let intercept = fit.coefficients[0].estimate;
    let coefficients: Vec<EventStudyCoefficient> = event_years
        .iter()
        .map(|&year| {
            let c = fit
                .coefficients
                .iter()
                .find(|c| c.name == format!("treat_x_{year}"))
                .expect("event column present");
            EventStudyCoefficient {
                year,
                estimate: c.estimate,
                std_error: c.std_error,
                ci_low: c.estimate - 1.959963984540054 * c.std_error,
                ci_high: c.estimate + 1.959963984540054 * c.std_error,
            }
        })
        .collect();

    let pre: Vec<&EventStudyCoefficient> = coefficients
        .iter()
        .filter(|c| c.year < baseline_year)
        .collect();
    let (pre_trend_slope, pre_trend_p) = if pre.len() >= 3 {
        let xs: Vec<f64> = pre.iter().map(|c| c.year as f64).collect();
        let ys: Vec<f64> = pre.iter().map(|c| c.estimate).collect();
        let trend = DesignBuilder::new()
            .intercept()
            .column("year", xs)
            .outcome(ys)
            .build()?;
        match ols_fit(&trend, Covariance::Classical) {
            Ok(f) => (
                Some(f.coefficients[1].estimate),
                Some(f.coefficients[1].p_value),
            ),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };

    Ok(EventStudyResult {
        baseline_year,
        intercept,
        coefficients,
        pre_trend_slope,
        pre_trend_p,
        n: fit.n,
    })
}

/// One pair-period observation of the two-period DID design.
#[derive(Debug, Clone)]
pub struct DidObservation {
    pub pair: (usize, usize),
    pub after: bool,
    pub outcome: f64,
    /// Control values aligned with the `control_names` passed to
    /// [`did_estimate`].
    pub controls: Vec<f64>,
}

/// Two-period DID: OLS of the outcome on intercept, Treat × After, Treat,
/// After, and any controls. The first non-intercept coefficient (Treat ×
/// After) is the DID estimate.
pub fn did_estimate(
    observations: &[DidObservation],
    control_names: &[String],
    treat: &RailTable,
    covariance: Covariance,
) -> Result<RegressionResult> {
    if observations.is_empty() {
        return Err(Error::Validation("did: no observations".into()));
    }
    let mut any = [[false; 2]; 2];
    for obs in observations {
        let treated = treat.is_treated(obs.pair.0, obs.pair.1);
        any[treated as usize][obs.after as usize] = true;
        if obs.controls.len() != control_names.len() {
            return Err(Error::Validation(
                "did: control vector length does not match control names".into(),
            ));
        }
    }
    if !(any[0][0] && any[0][1] && any[1][0] && any[1][1]) {
        return Err(Error::Validation(
            "did: all four treatment/period cells need observations".into(),
        ));
    }

    let treat_x_after: Vec<f64> = observations
        .iter()
        .map(|o| (treat.is_treated(o.pair.0, o.pair.1) && o.after) as u8 as f64)
        .collect();
    let treat_col: Vec<f64> = observations
        .iter()
        .map(|o| treat.is_treated(o.pair.0, o.pair.1) as u8 as f64)
        .collect();
    let after_col: Vec<f64> = observations.iter().map(|o| o.after as u8 as f64).collect();

    let mut builder = DesignBuilder::new()
        .intercept()
        .column("treat_x_after", treat_x_after)
        .column("treat", treat_col)
        .column("after", after_col);
    for (c, name) in control_names.iter().enumerate() {
        builder = builder.column(
            name,
            observations.iter().map(|o| o.controls[c]).collect(),
        );
    }
    let design = builder
        .outcome(observations.iter().map(|o| o.outcome).collect())
        .build()?;
    ols_fit(&design, covariance)
}

/// The four-group-means difference of differences, the saturated closed form
/// of the no-controls design.
pub fn did_group_means(observations: &[DidObservation], treat: &RailTable) -> Result<f64> {
    let mut sums = [[0.0f64; 2]; 2];
    let mut counts = [[0usize; 2]; 2];
    for obs in observations {
        let treated = treat.is_treated(obs.pair.0, obs.pair.1) as usize;
        sums[treated][obs.after as usize] += obs.outcome;
        counts[treated][obs.after as usize] += 1;
    }
    if counts.iter().flatten().any(|&c| c == 0) {
        return Err(Error::Validation(
            "did: all four treatment/period cells need observations".into(),
        ));
    }
    let mean = |t: usize, a: usize| sums[t][a] / counts[t][a] as f64;
    Ok((mean(1, 1) - mean(1, 0)) - (mean(0, 1) - mean(0, 0)))
}

pub fn did_coefficient(result: &RegressionResult) -> &Coefficient {
    result
        .coefficients
        .iter()
        .find(|c| c.name == "treat_x_after")
        .expect("did fit always carries the interaction column")
}
