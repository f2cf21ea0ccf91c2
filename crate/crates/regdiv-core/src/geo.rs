//! Province-side measures: inter-province industrial similarity, the density
//! of active neighboring provinces under several weightings, and the
//! productivity density of neighboring provinces.
//!
//! Sums over neighbors always exclude the province itself: self-distance is
//! undefined, so the j = i term cannot enter.

use crate::error::{Error, Result};
use crate::metrics::{ActivityMatrix, RcaMatrix};
use crate::panel::{DistanceTable, ProductivityTensor};
use crate::table::{fmt_f64, labeled_matrix};

/// Cosine similarity of two provinces' log-RCA vectors, y = ln(RCA + 1).
/// Zero if either transformed vector has zero norm.
pub fn industrial_similarity(rca_i: &[f64], rca_j: &[f64]) -> f64 {
    assert_eq!(rca_i.len(), rca_j.len());
    let mut dot = 0.0;
    let mut norm_i = 0.0;
    let mut norm_j = 0.0;
    for (ri, rj) in rca_i.iter().zip(rca_j) {
        let yi = ri.ln_1p();
        let yj = rj.ln_1p();
        dot += yi * yj;
        norm_i += yi * yi;
        norm_j += yj * yj;
    }
    if norm_i == 0.0 || norm_j == 0.0 {
        return 0.0;
    }
    dot / (norm_i.sqrt() * norm_j.sqrt())
}

/// Pairwise industrial similarity for a fixed year. Symmetric; the diagonal
/// is 1 for provinces with any positive RCA and 0 otherwise.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub year: i32,
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn to_csv(&self, labels: &[String]) -> String {
        labeled_matrix("province", labels, labels, |i, j| fmt_f64(self.get(i, j)))
    }
}

pub fn similarity_matrix(rca: &RcaMatrix) -> SimilarityMatrix {
    let n = rca.n_provinces();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        let row_i = rca.province_row(i);
        if row_i.iter().any(|&v| v > 0.0) {
            values[i * n + i] = 1.0;
        }
        for j in i + 1..n {
            let s = industrial_similarity(row_i, rca.province_row(j));
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    SimilarityMatrix {
        year: rca.year,
        n,
        values,
    }
}

/// Weighting scheme for the density of active neighboring provinces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborWeighting {
    /// Inverse geographic distance (the default definition).
    InverseGeoDistance,
    /// Inverse neighboring distance (region crossings).
    InverseHopDistance,
    /// Share of adjacent provinces (hops == 1) that are active.
    AdjacencyRatio,
    /// Raw count of active adjacent provinces.
    AdjacencyCount,
}

impl NeighborWeighting {
    pub fn as_str(self) -> &'static str {
        match self {
            NeighborWeighting::InverseGeoDistance => "geo",
            NeighborWeighting::InverseHopDistance => "hops",
            NeighborWeighting::AdjacencyRatio => "ratio",
            NeighborWeighting::AdjacencyCount => "count",
        }
    }
}

/// Density of active neighboring provinces for (province, industry).
///
/// Weighted variants: Ω = Σ_{j≠i} U_j/w_ij ÷ Σ_{j≠i} 1/w_ij with w the
/// geographic or neighboring distance. Adjacency variants use the hops == 1
/// neighbor set: the active share, or the raw active count.
pub fn density_neighbors(
    activity: &ActivityMatrix,
    distances: &DistanceTable,
    province: usize,
    industry: usize,
    weighting: NeighborWeighting,
) -> Result<f64> {
    let n = activity.n_provinces();
    assert_eq!(distances.len(), n);
    if n < 2 {
        return Err(Error::Validation(
            "density of neighboring provinces requires at least two provinces".into(),
        ));
    }
    match weighting {
        NeighborWeighting::InverseGeoDistance | NeighborWeighting::InverseHopDistance => {
            let mut numerator = 0.0;
            let mut denominator = 0.0;
            for j in 0..n {
                if j == province {
                    continue;
                }
                let w = match weighting {
                    NeighborWeighting::InverseGeoDistance => {
                        distances.geographic_km.get(province, j)
                    }
                    _ => distances.hops.get(province, j) as f64,
                };
                denominator += 1.0 / w;
                if activity.is_active(j, industry) {
                    numerator += 1.0 / w;
                }
            }
            Ok(numerator / denominator)
        }
        NeighborWeighting::AdjacencyRatio | NeighborWeighting::AdjacencyCount => {
            let adjacent = distances.adjacent(province);
            let active = adjacent
                .iter()
                .filter(|&&j| activity.is_active(j, industry))
                .count();
            match weighting {
                NeighborWeighting::AdjacencyCount => Ok(active as f64),
                _ => {
                    if adjacent.is_empty() {
                        Err(Error::Numerical(format!(
                            "province {province} has no adjacent province"
                        )))
                    } else {
                        Ok(active as f64 / adjacent.len() as f64)
                    }
                }
            }
        }
    }
}

/// Average productivity of provinces i and j in an industry: the mean over
/// whichever of the two cell values are defined, `None` if both are missing.
pub fn pairwise_productivity(
    productivity: &ProductivityTensor,
    i: usize,
    j: usize,
    industry: usize,
    year: i32,
) -> Option<f64> {
    match (
        productivity.get(i, industry, year),
        productivity.get(j, industry, year),
    ) {
        (Some(a), Some(b)) => Some(0.5 * (a + b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

/// Productivity density: the inverse-distance-weighted mean of pairwise
/// productivities over j ≠ i, renormalizing the weights over defined pairs.
/// `None` when every pair is missing.
pub fn productivity_density(
    productivity: &ProductivityTensor,
    distances: &DistanceTable,
    province: usize,
    industry: usize,
    year: i32,
) -> Option<f64> {
    let n = distances.len();
    let mut numerator = 0.0;
    let mut weight_sum = 0.0;
    for j in 0..n {
        if j == province {
            continue;
        }
        if let Some(p) = pairwise_productivity(productivity, province, j, industry, year) {
            let w = 1.0 / distances.geographic_km.get(province, j);
            numerator += p * w;
            weight_sum += w;
        }
    }
    if weight_sum == 0.0 {
        None
    } else {
        Some(numerator / weight_sum)
    }
}

/// Pair-level average productivity across all industries with a defined
/// pairwise value; the DID outcome for the productivity design.
pub fn pair_productivity_over_industries(
    productivity: &ProductivityTensor,
    n_industries: usize,
    i: usize,
    j: usize,
    year: i32,
) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for a in 0..n_industries {
        if let Some(p) = pairwise_productivity(productivity, i, j, a, year) {
            sum += p;
            count += 1;
        }
    }
    if count == 0 {
        None
    } else {
        Some(sum / count as f64)
    }
}
