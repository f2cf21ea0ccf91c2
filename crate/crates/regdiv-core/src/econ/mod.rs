//! Estimation engines: special functions, design matrices, probit MLE, OLS
//! with robust covariance, and the event-study / differences-in-differences
//! designs.

pub mod design;
pub mod did;
pub mod ols;
pub mod probit;
pub mod special;

pub use design::{DesignBuilder, DesignMatrix};
pub use did::{
    did_coefficient, did_estimate, did_group_means, event_study, DidObservation, EventStudyResult,
    PairPanel,
};
pub use ols::{ols_fit, residuals, Covariance};
pub use probit::probit_fit;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    /// z statistic for probit fits, t statistic for OLS fits.
    pub statistic: f64,
    pub p_value: f64,
}

impl Coefficient {
    /// Significance stars at the 0.1 / 0.05 / 0.01 levels.
    pub fn stars(&self) -> &'static str {
        if self.p_value < 0.01 {
            "***"
        } else if self.p_value < 0.05 {
            "**"
        } else if self.p_value < 0.1 {
            "*"
        } else {
            ""
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum FitStats {
    Probit {
        log_likelihood: f64,
        null_log_likelihood: f64,
        pseudo_r_squared: f64,
        iterations: usize,
    },
    Ols {
        r_squared: f64,
        rmse: f64,
        covariance: Covariance,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    pub n: usize,
    pub fit: FitStats,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_thresholds() {
        let coef = |p| Coefficient {
            name: "x".into(),
            estimate: 1.0,
            std_error: 1.0,
            statistic: 1.0,
            p_value: p,
        };
        assert_eq!(coef(0.005).stars(), "***");
        assert_eq!(coef(0.03).stars(), "**");
        assert_eq!(coef(0.07).stars(), "*");
        assert_eq!(coef(0.2).stars(), "");
    }
}
