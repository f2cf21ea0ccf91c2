//! OLS via Householder QR, with classical or heteroskedasticity-robust
//! (HC1, degrees-of-freedom-corrected sandwich) covariance.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

use super::design::{dependent_columns, DesignMatrix};
use super::special::t_p_two_sided;
use super::{Coefficient, FitStats, RegressionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Covariance {
    Classical,
    Robust,
}

impl Covariance {
    pub fn as_str(self) -> &'static str {
        match self {
            Covariance::Classical => "classical",
            Covariance::Robust => "robust",
        }
    }
}

/// Least-squares fit through the QR decomposition (no normal equations).
///
/// Reports R², the degrees-of-freedom-corrected root MSE, and per-coefficient
/// t statistics with p-values from the t distribution on n - k df.
pub fn ols_fit(design: &DesignMatrix, covariance: Covariance) -> Result<RegressionResult> {
    let n = design.n();
    let k = design.k();
    if n <= k {
        return Err(Error::Numerical(format!(
            "ols: {n} observations for {k} parameters"
        )));
    }
    let dependent = dependent_columns(design);
    if !dependent.is_empty() {
        return Err(Error::Numerical(format!(
            "ols: design is rank deficient; dependent columns: {}",
            dependent.join(", ")
        )));
    }

    let x = design.x();
    let y = design.y();
    let qr = x.clone().qr();
    let qty = qr.q().transpose() * y;
    let r = qr.r();
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numerical("ols: singular R factor".into()))?;

    let fitted = x * &beta;
    let residuals = y - &fitted;
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let df = (n - k) as f64;
    let sigma2 = ssr / df;

    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ from the triangular factor.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Numerical("ols: singular R factor".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let cov = match covariance {
        Covariance::Classical => &xtx_inv * sigma2,
        Covariance::Robust => {
            // HC1: (X'X)⁻¹ (Σ e_i² x_i x_iᵀ) (X'X)⁻¹ scaled by n/(n-k).
            let mut meat = DMatrix::zeros(k, k);
            for i in 0..n {
                let e2 = residuals[i] * residuals[i];
                let xi = x.row(i);
                for a in 0..k {
                    for b in a..k {
                        meat[(a, b)] += e2 * xi[a] * xi[b];
                    }
                }
            }
            for a in 0..k {
                for b in 0..a {
                    meat[(a, b)] = meat[(b, a)];
                }
            }
            &xtx_inv * meat * &xtx_inv * (n as f64 / df)
        }
    };

    let coefficients = (0..k)
        .map(|j| -> Result<Coefficient> {
            let se = cov[(j, j)].sqrt();
            // A zero SE happens on exactly-fitted designs; keep the statistic
            // well-defined there.
            let t = if se == 0.0 {
                if beta[j] == 0.0 {
                    0.0
                } else {
                    f64::INFINITY * beta[j].signum()
                }
            } else {
                beta[j] / se
            };
            Ok(Coefficient {
                name: design.names()[j].clone(),
                estimate: beta[j],
                std_error: se,
                statistic: t,
                p_value: t_p_two_sided(t, df)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { f64::NAN };
    Ok(RegressionResult {
        coefficients,
        n,
        fit: FitStats::Ols {
            r_squared,
            rmse: sigma2.sqrt(),
            covariance,
        },
    })
}

/// Residual vector of the fit; exposed for orthogonality checks.
pub fn residuals(design: &DesignMatrix, result: &RegressionResult) -> DVector<f64> {
    let beta = DVector::from_iterator(
        result.coefficients.len(),
        result.coefficients.iter().map(|c| c.estimate),
    );
    design.y() - design.x() * beta
}
