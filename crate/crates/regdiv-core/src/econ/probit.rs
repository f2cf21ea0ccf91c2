//! Probit maximum likelihood via damped Newton iterations.
//!
//! The log-likelihood, score, and observed information are evaluated through
//! numerically safe tail functions, so extreme linear predictors do not
//! produce NaNs before the divergence guard trips.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

use super::design::{dependent_columns, DesignMatrix};
use super::special::{inverse_mills, log_normal_cdf, normal_p_two_sided};
use super::{Coefficient, FitStats, RegressionResult};

/// Divergence guard: any |β| beyond this is treated as perfect separation.
const SEPARATION_BOUND: f64 = 25.0;
const GRADIENT_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100;

/// Probit log-likelihood at `beta`.
pub fn log_likelihood(design: &DesignMatrix, beta: &DVector<f64>) -> f64 {
    let eta = design.x() * beta;
    let y = design.y();
    let mut ll = 0.0;
    for i in 0..design.n() {
        ll += if y[i] > 0.5 {
            log_normal_cdf(eta[i])
        } else {
            log_normal_cdf(-eta[i])
        };
    }
    ll
}

/// Analytic score vector ∂ll/∂β.
pub fn gradient(design: &DesignMatrix, beta: &DVector<f64>) -> DVector<f64> {
    let eta = design.x() * beta;
    let y = design.y();
    let mut g = DVector::zeros(design.k());
    for i in 0..design.n() {
        let s = if y[i] > 0.5 {
            inverse_mills(eta[i])
        } else {
            -inverse_mills(-eta[i])
        };
        g.axpy(s, &design.x().row(i).transpose(), 1.0);
    }
    g
}

/// Observed information (negative Hessian) at `beta`.
pub fn neg_hessian(design: &DesignMatrix, beta: &DVector<f64>) -> DMatrix<f64> {
    let eta = design.x() * beta;
    let y = design.y();
    let k = design.k();
    let mut h = DMatrix::zeros(k, k);
    for i in 0..design.n() {
        let lambda = if y[i] > 0.5 {
            inverse_mills(eta[i])
        } else {
            -inverse_mills(-eta[i])
        };
        let w = lambda * (lambda + eta[i]);
        let xi = design.x().row(i);
        for a in 0..k {
            for b in a..k {
                h[(a, b)] += w * xi[a] * xi[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            h[(a, b)] = h[(b, a)];
        }
    }
    h
}

/// Fits the probit model by damped Newton iterations from the zero vector.
///
/// Convergence is declared when the gradient max-norm drops below 1e-8;
/// iterations are capped at 100. The step is halved until the likelihood does
/// not decrease. Standard errors come from the inverse observed information
/// at the optimum, and pseudo-R² is 1 - LL/LL0 against the intercept-only
/// fit.
pub fn probit_fit(design: &DesignMatrix) -> Result<RegressionResult> {
    validate(design)?;
    let (beta, ll, iterations) = maximize(design)?;

    let info = neg_hessian(design, &beta);
    let chol = Cholesky::new(info).ok_or_else(|| {
        Error::Numerical("probit: observed information is not positive definite".into())
    })?;
    let cov = chol.inverse();

    let ll0 = match design.intercept_only() {
        Some(d0) if design.k() > 1 => maximize(&d0)?.1,
        _ => ll,
    };
    // Guard against LL marginally above LL0 from convergence slack.
    let pseudo_r2 = if ll0 == 0.0 {
        0.0
    } else {
        (1.0 - ll / ll0).max(0.0)
    };

    let coefficients = (0..design.k())
        .map(|j| {
            let se = cov[(j, j)].sqrt();
            let z = beta[j] / se;
            Coefficient {
                name: design.names()[j].clone(),
                estimate: beta[j],
                std_error: se,
                statistic: z,
                p_value: normal_p_two_sided(z),
            }
        })
        .collect();

    Ok(RegressionResult {
        coefficients,
        n: design.n(),
        fit: FitStats::Probit {
            log_likelihood: ll,
            null_log_likelihood: ll0,
            pseudo_r_squared: pseudo_r2,
            iterations,
        },
    })
}

fn validate(design: &DesignMatrix) -> Result<()> {
    let y = design.y();
    let mut ones = 0usize;
    for i in 0..design.n() {
        if y[i] != 0.0 && y[i] != 1.0 {
            return Err(Error::Validation(format!(
                "probit: outcome must be 0/1, found {} at row {i}",
                y[i]
            )));
        }
        if y[i] == 1.0 {
            ones += 1;
        }
    }
    if ones == 0 || ones == design.n() {
        return Err(Error::Numerical(
            "probit: outcome has a single class".into(),
        ));
    }
    if design.n() <= design.k() {
        return Err(Error::Numerical(format!(
            "probit: {} observations for {} parameters",
            design.n(),
            design.k()
        )));
    }
    let dependent = dependent_columns(design);
    if !dependent.is_empty() {
        return Err(Error::Numerical(format!(
            "probit: design is rank deficient; dependent columns: {}",
            dependent.join(", ")
        )));
    }
    Ok(())
}

fn maximize(design: &DesignMatrix) -> Result<(DVector<f64>, f64, usize)> {
    let k = design.k();
    let mut beta = DVector::zeros(k);
    let mut ll = log_likelihood(design, &beta);
    for iteration in 0..MAX_ITERATIONS {
        let g = gradient(design, &beta);
        if g.amax() < GRADIENT_TOL {
            return Ok((beta, ll, iteration));
        }
        let info = neg_hessian(design, &beta);
        let chol = Cholesky::new(info).ok_or_else(|| {
            Error::Numerical("probit: observed information is not positive definite".into())
        })?;
        let direction = chol.solve(&g);

        // Halve the step until the likelihood stops decreasing.
        let mut step = 1.0;
        loop {
            let candidate = &beta + &direction * step;
            let candidate_ll = log_likelihood(design, &candidate);
            if candidate_ll >= ll {
                beta = candidate;
                ll = candidate_ll;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                // No ascent in this direction: treat as converged if the
                // gradient is modest, otherwise fail.
                if g.amax() < 1e-4 {
                    return Ok((beta, ll, iteration));
                }
                return Err(Error::Numerical(
                    "probit: line search failed to improve the likelihood".into(),
                ));
            }
        }
        if beta.amax() > SEPARATION_BOUND {
            return Err(Error::Numerical(format!(
                "probit: coefficients diverged beyond {SEPARATION_BOUND}; outcome is likely perfectly separated"
            )));
        }
    }
    Err(Error::Numerical(format!(
        "probit: no convergence after {MAX_ITERATIONS} iterations"
    )))
}
