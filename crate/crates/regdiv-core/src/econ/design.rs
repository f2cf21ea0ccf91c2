//! Design-matrix construction for the regression engines: named columns, an
//! intercept, and year-dummy blocks with a dropped reference year.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DesignMatrix {
    names: Vec<String>,
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl DesignMatrix {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// A design containing only this design's intercept column; the null
    /// model for likelihood-ratio fit statistics.
    pub fn intercept_only(&self) -> Option<DesignMatrix> {
        let idx = self.column_index("intercept")?;
        Some(DesignMatrix {
            names: vec!["intercept".to_string()],
            x: DMatrix::from_column_slice(self.n(), 1, self.x.column(idx).as_slice()),
            y: self.y.clone(),
        })
    }
}

#[derive(Debug, Default)]
pub struct DesignBuilder {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    outcome: Option<Vec<f64>>,
}

impl DesignBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intercept(mut self) -> Self {
        self.names.insert(0, "intercept".to_string());
        self.columns.insert(0, Vec::new()); // length fixed in build()
        self
    }

    pub fn column(mut self, name: &str, values: Vec<f64>) -> Self {
        self.names.push(name.to_string());
        self.columns.push(values);
        self
    }

    /// One dummy per distinct year except the reference year, in ascending
    /// order, named `year_<y>`.
    pub fn year_dummies(mut self, years: &[i32], reference: i32) -> Self {
        let mut distinct: Vec<i32> = years.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        for year in distinct {
            if year == reference {
                continue;
            }
            self.names.push(format!("year_{year}"));
            self.columns.push(
                years
                    .iter()
                    .map(|&t| if t == year { 1.0 } else { 0.0 })
                    .collect(),
            );
        }
        self
    }

    pub fn outcome(mut self, y: Vec<f64>) -> Self {
        self.outcome = Some(y);
        self
    }

    pub fn build(self) -> Result<DesignMatrix> {
        let y = self
            .outcome
            .ok_or_else(|| Error::Validation("design: no outcome".into()))?;
        let n = y.len();
        if n == 0 {
            return Err(Error::Validation("design: empty outcome".into()));
        }
        if self.columns.is_empty() {
            return Err(Error::Validation("design: no regressors".into()));
        }
        let k = self.columns.len();
        let mut x = DMatrix::zeros(n, k);
        for (j, (name, col)) in self.names.iter().zip(&self.columns).enumerate() {
            if name == "intercept" && col.is_empty() {
                for i in 0..n {
                    x[(i, j)] = 1.0;
                }
                continue;
            }
            if col.len() != n {
                return Err(Error::Validation(format!(
                    "design: column {name} has {} rows, outcome has {n}",
                    col.len()
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Validation(format!(
                        "design: column {name} has a non-finite value at row {i}"
                    )));
                }
                x[(i, j)] = v;
            }
        }
        for (i, v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "design: outcome has a non-finite value at row {i}"
                )));
            }
        }
        Ok(DesignMatrix {
            names: self.names,
            x,
            y: DVector::from_vec(y),
        })
    }
}

/// Columns at pivot positions past the numerical rank, by name. Empty when
/// the design has full column rank.
pub fn dependent_columns(design: &DesignMatrix) -> Vec<String> {
    let x = design.x();
    let k = x.ncols();
    let qr = x.clone().col_piv_qr();
    let r = qr.r();
    let tol = r[(0, 0)].abs().max(1.0) * (x.nrows().max(k) as f64) * f64::EPSILON;
    let rank = (0..k.min(x.nrows()))
        .take_while(|&j| r[(j, j)].abs() > tol)
        .count();
    if rank == k {
        return Vec::new();
    }
    // Recover the pivot order: apply the permutation to the column index list.
    let mut order = DMatrix::<f64>::zeros(1, k);
    for j in 0..k {
        order[(0, j)] = j as f64;
    }
    qr.p().permute_columns(&mut order);
    (rank..k)
        .map(|j| design.names()[order[(0, j)] as usize].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_and_columns() {
        let d = DesignBuilder::new()
            .intercept()
            .column("x1", vec![1.0, 2.0, 3.0])
            .outcome(vec![0.0, 1.0, 0.0])
            .build()
            .unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.k(), 2);
        assert_eq!(d.names(), &["intercept", "x1"]);
        assert_eq!(d.x()[(2, 0)], 1.0);
        assert_eq!(d.x()[(2, 1)], 3.0);
    }

    #[test]
    fn year_dummies_drop_reference() {
        let years = vec![2001, 2002, 2003, 2001, 2002, 2003];
        let d = DesignBuilder::new()
            .intercept()
            .year_dummies(&years, 2001)
            .outcome(vec![0.0; 6])
            .build()
            .unwrap();
        assert_eq!(d.names(), &["intercept", "year_2002", "year_2003"]);
        assert_eq!(d.x()[(1, 1)], 1.0);
        assert_eq!(d.x()[(0, 1)], 0.0);
        // Full rank: dummies plus intercept are not collinear once the
        // reference year is dropped.
        assert!(dependent_columns(&d).is_empty());
    }

    #[test]
    fn year_dummies_without_drop_are_collinear() {
        let years = vec![2001, 2002, 2001, 2002];
        // Reference year outside the data: every year gets a dummy.
        let d = DesignBuilder::new()
            .intercept()
            .year_dummies(&years, 1900)
            .outcome(vec![0.0; 4])
            .build()
            .unwrap();
        assert!(!dependent_columns(&d).is_empty());
    }

    #[test]
    fn length_mismatch_rejected() {
        let r = DesignBuilder::new()
            .intercept()
            .column("x", vec![1.0])
            .outcome(vec![1.0, 2.0])
            .build();
        assert!(r.is_err());
    }

    #[test]
    fn duplicate_column_detected_as_dependent() {
        let d = DesignBuilder::new()
            .intercept()
            .column("a", vec![1.0, 2.0, 3.0, 4.0])
            .column("b", vec![2.0, 4.0, 6.0, 8.0])
            .outcome(vec![0.0; 4])
            .build()
            .unwrap();
        let dep = dependent_columns(&d);
        assert_eq!(dep.len(), 1);
        assert!(dep[0] == "a" || dep[0] == "b", "{dep:?}");
    }

    #[test]
    fn intercept_only_extraction() {
        let d = DesignBuilder::new()
            .intercept()
            .column("x1", vec![1.0, 2.0])
            .outcome(vec![0.0, 1.0])
            .build()
            .unwrap();
        let d0 = d.intercept_only().unwrap();
        assert_eq!(d0.k(), 1);
        assert_eq!(d0.x()[(1, 0)], 1.0);
    }
}
