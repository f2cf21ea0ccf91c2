//! Industry-side measures for a fixed year: revealed comparative advantage,
//! the derived activity matrix, industry proximity, the density of active
//! related industries, diversity counts, and the graph-neighbor variants.

use crate::error::{Error, Result};
use crate::panel::PanelTensor;
use crate::space::IndustrySpaceGraph;
use crate::table::{fmt_f64, labeled_matrix};

/// Revealed comparative advantage for a fixed year: the ratio of a province's
/// share of an industry to the industry's overall share.
#[derive(Debug, Clone)]
pub struct RcaMatrix {
    pub year: i32,
    n_provinces: usize,
    n_industries: usize,
    values: Vec<f64>,
}

impl RcaMatrix {
    pub fn n_provinces(&self) -> usize {
        self.n_provinces
    }

    pub fn n_industries(&self) -> usize {
        self.n_industries
    }

    pub fn get(&self, province: usize, industry: usize) -> f64 {
        self.values[province * self.n_industries + industry]
    }

    /// One province's RCA vector across industries.
    pub fn province_row(&self, province: usize) -> &[f64] {
        let start = province * self.n_industries;
        &self.values[start..start + self.n_industries]
    }

    pub fn to_csv(&self, row_labels: &[String], col_labels: &[String]) -> String {
        labeled_matrix("province", row_labels, col_labels, |i, a| {
            fmt_f64(self.get(i, a))
        })
    }
}

/// RCA per the Balassa index on firm counts.
///
/// Provinces with zero firms in the year get an all-zero row rather than an
/// undefined one; industries with zero firms contribute zero columns.
pub fn compute_rca(counts: &PanelTensor, year: i32) -> Result<RcaMatrix> {
    if !counts.contains_year(year) {
        return Err(Error::Validation(format!(
            "year {year} outside panel range [{}, {}]",
            counts.year_min(),
            counts.year_max()
        )));
    }
    let n_provinces = counts.n_provinces();
    let n_industries = counts.n_industries();
    let mut province_totals = vec![0.0f64; n_provinces];
    let mut industry_totals = vec![0.0f64; n_industries];
    let mut grand_total = 0.0f64;
    for i in 0..n_provinces {
        for a in 0..n_industries {
            let x = counts.count(i, a, year) as f64;
            province_totals[i] += x;
            industry_totals[a] += x;
            grand_total += x;
        }
    }
    if grand_total == 0.0 {
        return Err(Error::Numerical(format!("empty year {year}")));
    }
    let mut values = vec![0.0f64; n_provinces * n_industries];
    for i in 0..n_provinces {
        if province_totals[i] == 0.0 {
            continue;
        }
        for a in 0..n_industries {
            let x = counts.count(i, a, year) as f64;
            if x == 0.0 {
                continue;
            }
            let province_share = x / province_totals[i];
            let industry_share = industry_totals[a] / grand_total;
            values[i * n_industries + a] = province_share / industry_share;
        }
    }
    Ok(RcaMatrix {
        year,
        n_provinces,
        n_industries,
        values,
    })
}

/// Binary presence matrix U: an industry is present in a province when its
/// RCA clears the threshold (>=, so exactly 1.0 counts as present).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityMatrix {
    pub year: i32,
    n_provinces: usize,
    n_industries: usize,
    values: Vec<bool>,
}

impl ActivityMatrix {
    pub fn from_rca(rca: &RcaMatrix, threshold: f64) -> Self {
        let values = (0..rca.n_provinces)
            .flat_map(|i| (0..rca.n_industries).map(move |a| rca.get(i, a) >= threshold))
            .collect();
        ActivityMatrix {
            year: rca.year,
            n_provinces: rca.n_provinces,
            n_industries: rca.n_industries,
            values,
        }
    }

    /// Directly wraps a boolean matrix; used when replaying exported activity
    /// tables or constructing synthetic histories.
    pub fn from_values(year: i32, n_provinces: usize, n_industries: usize, values: Vec<bool>) -> Self {
        assert_eq!(values.len(), n_provinces * n_industries);
        ActivityMatrix {
            year,
            n_provinces,
            n_industries,
            values,
        }
    }

    pub fn n_provinces(&self) -> usize {
        self.n_provinces
    }

    pub fn n_industries(&self) -> usize {
        self.n_industries
    }

    pub fn is_active(&self, province: usize, industry: usize) -> bool {
        self.values[province * self.n_industries + industry]
    }

    pub fn to_csv(&self, row_labels: &[String], col_labels: &[String]) -> String {
        labeled_matrix("province", row_labels, col_labels, |i, a| {
            if self.is_active(i, a) { "1" } else { "0" }.to_string()
        })
    }
}

/// Industry proximity for a fixed year: cosine similarity between the
/// province-count vectors of two industries.
#[derive(Debug, Clone)]
pub struct ProximityMatrix {
    pub year: i32,
    n: usize,
    values: Vec<f64>,
}

impl ProximityMatrix {
    /// Wraps a precomputed symmetric matrix (row-major, n×n); used when
    /// replaying an exported proximity table or in synthetic setups.
    pub fn from_raw(year: i32, n: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n * n);
        ProximityMatrix { year, n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.n + b]
    }

    pub fn to_csv(&self, labels: &[String]) -> String {
        labeled_matrix("industry", labels, labels, |a, b| fmt_f64(self.get(a, b)))
    }
}

/// Cosine co-location proximity between all industry pairs.
///
/// An industry with an all-zero firm vector is unrelated to everything,
/// including itself: its row and column are zero.
pub fn compute_proximity(counts: &PanelTensor, year: i32) -> Result<ProximityMatrix> {
    if !counts.contains_year(year) {
        return Err(Error::Validation(format!(
            "year {year} outside panel range [{}, {}]",
            counts.year_min(),
            counts.year_max()
        )));
    }
    let n_provinces = counts.n_provinces();
    let n = counts.n_industries();
    let mut norms = vec![0.0f64; n];
    for a in 0..n {
        let mut sq = 0.0;
        for i in 0..n_provinces {
            let x = counts.count(i, a, year) as f64;
            sq += x * x;
        }
        norms[a] = sq.sqrt();
    }
    let mut values = vec![0.0f64; n * n];
    for a in 0..n {
        if norms[a] == 0.0 {
            continue;
        }
        values[a * n + a] = 1.0;
        for b in a + 1..n {
            if norms[b] == 0.0 {
                continue;
            }
            let mut dot = 0.0;
            for i in 0..n_provinces {
                dot += counts.count(i, a, year) as f64 * counts.count(i, b, year) as f64;
            }
            let phi = dot / (norms[a] * norms[b]);
            values[a * n + b] = phi;
            values[b * n + a] = phi;
        }
    }
    Ok(ProximityMatrix { year, n, values })
}

/// Density of active related industries: the proximity-weighted fraction of
/// industries already present in the province, scored for industry `a`.
///
/// The sum is unrestricted, so `a` itself contributes through the diagonal;
/// pass `include_self = false` to exclude it.
pub fn density_related(
    activity: &ActivityMatrix,
    proximity: &ProximityMatrix,
    province: usize,
    industry: usize,
    include_self: bool,
) -> Result<f64> {
    assert_eq!(activity.n_industries(), proximity.len());
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for b in 0..proximity.len() {
        if !include_self && b == industry {
            continue;
        }
        let phi = proximity.get(industry, b);
        denominator += phi;
        if activity.is_active(province, b) {
            numerator += phi;
        }
    }
    if denominator <= 0.0 {
        return Err(Error::Numerical(format!(
            "isolated industry {industry}: zero proximity mass"
        )));
    }
    Ok(numerator / denominator)
}

/// Diversity counts: provinces active per industry (M) and industries active
/// per province (N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiversityCounts {
    /// M: number of active provinces, per industry.
    pub provinces_per_industry: Vec<u32>,
    /// N: number of active industries, per province.
    pub industries_per_province: Vec<u32>,
}

pub fn diversity_counts(activity: &ActivityMatrix) -> DiversityCounts {
    let mut m = vec![0u32; activity.n_industries()];
    let mut n = vec![0u32; activity.n_provinces()];
    for i in 0..activity.n_provinces() {
        for a in 0..activity.n_industries() {
            if activity.is_active(i, a) {
                m[a] += 1;
                n[i] += 1;
            }
        }
    }
    DiversityCounts {
        provinces_per_industry: m,
        industries_per_province: n,
    }
}

/// Graph-neighbor variants of the related-industry measure, taken over the
/// superposed industry space instead of the full proximity row.
#[derive(Debug, Clone, PartialEq)]
pub struct RelatedVariants {
    /// Active graph neighbors / total graph neighbors; `None` for an isolated
    /// node.
    pub ratio: Option<f64>,
    pub count_active: u32,
    pub count_total: u32,
}

pub fn related_variants(
    activity: &ActivityMatrix,
    space: &IndustrySpaceGraph,
    province: usize,
    industry: usize,
) -> RelatedVariants {
    let neighbors = space.neighbors(industry);
    let total = neighbors.len() as u32;
    let active = neighbors
        .iter()
        .filter(|&&b| activity.is_active(province, b))
        .count() as u32;
    RelatedVariants {
        ratio: if total == 0 {
            None
        } else {
            Some(active as f64 / total as f64)
        },
        count_active: active,
        count_total: total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{max_spanning_tree, superpose, threshold_network};

    fn panel_from_counts(counts: &[&[u32]], year: i32) -> PanelTensor {
        let n_provinces = counts.len();
        let n_industries = counts[0].len();
        let mut tensor = PanelTensor::zeros(n_provinces, n_industries, year, year);
        for (i, row) in counts.iter().enumerate() {
            for (a, &x) in row.iter().enumerate() {
                tensor.set(i, a, year, x);
            }
        }
        tensor
    }

    #[test]
    fn rca_identity_two_by_two() {
        // counts [[1,0],[0,1]]: each province has the whole of its industry,
        // each industry holds half the total: RCA = (1/1)/(1/2) = 2.
        let tensor = panel_from_counts(&[&[1, 0], &[0, 1]], 2000);
        let rca = compute_rca(&tensor, 2000).unwrap();
        assert_eq!(rca.get(0, 0), 2.0);
        assert_eq!(rca.get(0, 1), 0.0);
        assert_eq!(rca.get(1, 0), 0.0);
        assert_eq!(rca.get(1, 1), 2.0);
    }

    #[test]
    fn rca_uniform_counts_give_one() {
        let tensor = panel_from_counts(&[&[3, 3, 3], &[3, 3, 3]], 2000);
        let rca = compute_rca(&tensor, 2000).unwrap();
        for i in 0..2 {
            for a in 0..3 {
                assert!((rca.get(i, a) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rca_single_province_is_one_wherever_nonzero() {
        let tensor = panel_from_counts(&[&[5, 0, 2]], 2000);
        let rca = compute_rca(&tensor, 2000).unwrap();
        assert!((rca.get(0, 0) - 1.0).abs() < 1e-15);
        assert_eq!(rca.get(0, 1), 0.0);
        assert!((rca.get(0, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rca_empty_year_errors() {
        let tensor = PanelTensor::zeros(2, 2, 2000, 2000);
        assert!(matches!(
            compute_rca(&tensor, 2000),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn rca_share_identity() {
        // Σ_a (industry share) × RCA[i][a] = 1 for every province with firms.
        let tensor = panel_from_counts(&[&[4, 1, 0, 7], &[2, 0, 3, 1], &[0, 5, 5, 0]], 2000);
        let rca = compute_rca(&tensor, 2000).unwrap();
        let grand: f64 = (0..3)
            .map(|i| (0..4).map(|a| tensor.count(i, a, 2000) as f64).sum::<f64>())
            .sum();
        for i in 0..3 {
            let mut acc = 0.0;
            for a in 0..4 {
                let industry_total: f64 =
                    (0..3).map(|p| tensor.count(p, a, 2000) as f64).sum();
                acc += industry_total / grand * rca.get(i, a);
            }
            assert!((acc - 1.0).abs() < 1e-12, "province {i}: {acc}");
        }
    }

    #[test]
    fn activity_threshold_is_inclusive() {
        let rca = RcaMatrix {
            year: 2000,
            n_provinces: 1,
            n_industries: 3,
            values: vec![1.0, 0.999, 0.0],
        };
        let u = ActivityMatrix::from_rca(&rca, 1.0);
        assert!(u.is_active(0, 0));
        assert!(!u.is_active(0, 1));
        assert!(!u.is_active(0, 2));
    }

    #[test]
    fn activity_of_uniform_panel_is_all_ones() {
        let tensor = panel_from_counts(&[&[2, 2], &[2, 2], &[2, 2]], 2000);
        let rca = compute_rca(&tensor, 2000).unwrap();
        let u = ActivityMatrix::from_rca(&rca, 1.0);
        for i in 0..3 {
            for a in 0..2 {
                assert!(u.is_active(i, a));
            }
        }
    }

    #[test]
    fn proximity_parallel_disjoint_and_hand_case() {
        // industries: 0 and 1 identical, 2 disjoint from 3, 4 = (1,0) vs 5 = (1,1)
        let tensor = panel_from_counts(
            &[&[2, 4, 1, 0, 1, 1], &[1, 2, 0, 3, 0, 1]],
            2000,
        );
        let phi = compute_proximity(&tensor, 2000).unwrap();
        assert!((phi.get(0, 1) - 1.0).abs() < 1e-15, "parallel columns");
        assert_eq!(phi.get(2, 3), 0.0, "disjoint support");
        assert!((phi.get(4, 5) - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn proximity_zero_industry_is_zero_everywhere() {
        let tensor = panel_from_counts(&[&[1, 0], &[2, 0]], 2000);
        let phi = compute_proximity(&tensor, 2000).unwrap();
        assert_eq!(phi.get(1, 1), 0.0);
        assert_eq!(phi.get(0, 1), 0.0);
        assert_eq!(phi.get(0, 0), 1.0);
    }

    #[test]
    fn proximity_symmetric_bounded_and_column_scale_invariant() {
        let base = panel_from_counts(&[&[4, 1, 0], &[2, 0, 3], &[1, 5, 5]], 2000);
        let phi = compute_proximity(&base, 2000).unwrap();
        // Multiply industry 1's column by 7.
        let scaled = panel_from_counts(&[&[4, 7, 0], &[2, 0, 3], &[1, 35, 5]], 2000);
        let phi_scaled = compute_proximity(&scaled, 2000).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert!((phi.get(a, b) - phi.get(b, a)).abs() < 1e-15);
                assert!((0.0..=1.0 + 1e-15).contains(&phi.get(a, b)));
                assert!(
                    (phi.get(a, b) - phi_scaled.get(a, b)).abs() < 1e-12,
                    "scale invariance at ({a},{b})"
                );
            }
        }
    }

    fn activity(n_provinces: usize, n_industries: usize, active: &[(usize, usize)]) -> ActivityMatrix {
        let mut values = vec![false; n_provinces * n_industries];
        for &(i, a) in active {
            values[i * n_industries + a] = true;
        }
        ActivityMatrix::from_values(2000, n_provinces, n_industries, values)
    }

    fn proximity_from(values: Vec<f64>, n: usize) -> ProximityMatrix {
        ProximityMatrix {
            year: 2000,
            n,
            values,
        }
    }

    #[test]
    fn density_related_hand_case() {
        // φ(industry 0, ·) = (1, 0.5, 0.25); only the 0.25-industry active:
        // ω = 0.25 / 1.75.
        let phi = proximity_from(
            vec![1.0, 0.5, 0.25, 0.5, 1.0, 0.0, 0.25, 0.0, 1.0],
            3,
        );
        let u = activity(1, 3, &[(0, 2)]);
        let w = density_related(&u, &phi, 0, 0, true).unwrap();
        assert!((w - 0.25 / 1.75).abs() < 1e-15);
    }

    #[test]
    fn density_related_extremes() {
        let phi = proximity_from(
            vec![1.0, 0.5, 0.25, 0.5, 1.0, 0.0, 0.25, 0.0, 1.0],
            3,
        );
        let all = activity(1, 3, &[(0, 0), (0, 1), (0, 2)]);
        assert!((density_related(&all, &phi, 0, 0, true).unwrap() - 1.0).abs() < 1e-15);
        let none = activity(1, 3, &[]);
        assert_eq!(density_related(&none, &phi, 0, 0, true).unwrap(), 0.0);
    }

    #[test]
    fn density_related_isolated_errors() {
        let phi = proximity_from(vec![0.0; 4], 2);
        let u = activity(1, 2, &[]);
        assert!(density_related(&u, &phi, 0, 0, true).is_err());
    }

    #[test]
    fn density_related_monotone_under_activation() {
        let phi = proximity_from(
            vec![
                1.0, 0.3, 0.6, 0.1, //
                0.3, 1.0, 0.2, 0.0, //
                0.6, 0.2, 1.0, 0.9, //
                0.1, 0.0, 0.9, 1.0,
            ],
            4,
        );
        let mut flags = vec![false; 4];
        let mut prev = 0.0;
        for step in 0..4 {
            flags[step] = true;
            let u = ActivityMatrix::from_values(2000, 1, 4, flags.clone());
            let w = density_related(&u, &phi, 0, 1, true).unwrap();
            assert!(w >= prev - 1e-15, "step {step}: {w} < {prev}");
            prev = w;
        }
        assert!((prev - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_related_matches_direct_formula_on_random_instances() {
        // Brute-force evaluation of the defining ratio on random 5x6 cases.
        let mut rng = crate::rng::Xoshiro256::new(987);
        for _ in 0..50 {
            let n_i = 5;
            let n_a = 6;
            let mut phi_values = vec![0.0; n_a * n_a];
            for a in 0..n_a {
                phi_values[a * n_a + a] = 1.0;
                for b in a + 1..n_a {
                    let v = (rng.next_f64() * 100.0).round() / 100.0;
                    phi_values[a * n_a + b] = v;
                    phi_values[b * n_a + a] = v;
                }
            }
            let phi = proximity_from(phi_values.clone(), n_a);
            let values: Vec<bool> = (0..n_i * n_a).map(|_| rng.bernoulli(0.4)).collect();
            let u = ActivityMatrix::from_values(2000, n_i, n_a, values.clone());
            for i in 0..n_i {
                for a in 0..n_a {
                    let mut num = 0.0;
                    let mut den = 0.0;
                    for b in 0..n_a {
                        den += phi_values[a * n_a + b];
                        if values[i * n_a + b] {
                            num += phi_values[a * n_a + b];
                        }
                    }
                    let got = density_related(&u, &phi, i, a, true).unwrap();
                    assert_eq!(got, num / den);
                }
            }
        }
    }

    #[test]
    fn diversity_counts_cases() {
        let all = activity(
            3,
            4,
            &(0..3)
                .flat_map(|i| (0..4).map(move |a| (i, a)))
                .collect::<Vec<_>>(),
        );
        let d = diversity_counts(&all);
        assert_eq!(d.provinces_per_industry, vec![3, 3, 3, 3]);
        assert_eq!(d.industries_per_province, vec![4, 4, 4]);

        let none = activity(3, 4, &[]);
        let d = diversity_counts(&none);
        assert_eq!(d.provinces_per_industry, vec![0; 4]);
        assert_eq!(d.industries_per_province, vec![0; 3]);

        let eye = activity(3, 3, &[(0, 0), (1, 1), (2, 2)]);
        let d = diversity_counts(&eye);
        assert_eq!(d.provinces_per_industry, vec![1, 1, 1]);
        assert_eq!(d.industries_per_province, vec![1, 1, 1]);
    }

    #[test]
    fn related_variants_over_space_graph() {
        // Star around industry 0: neighbors 1..=4, one of them active.
        let phi = proximity_from(
            vec![
                1.0, 0.9, 0.8, 0.7, 0.6, //
                0.9, 1.0, 0.1, 0.1, 0.1, //
                0.8, 0.1, 1.0, 0.1, 0.1, //
                0.7, 0.1, 0.1, 1.0, 0.1, //
                0.6, 0.1, 0.1, 0.1, 1.0,
            ],
            5,
        );
        let mst = max_spanning_tree(&phi);
        let thr = threshold_network(&phi, 0.99).unwrap();
        let space = superpose(&mst.edges, &thr, vec![1; 5]);
        assert_eq!(space.neighbors(0), vec![1, 2, 3, 4]);
        let u = activity(1, 5, &[(0, 2)]);
        let v = related_variants(&u, &space, 0, 0);
        assert_eq!(v.count_total, 4);
        assert_eq!(v.count_active, 1);
        assert!((v.ratio.unwrap() - 0.25).abs() < 1e-15);

        let all = activity(1, 5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let v = related_variants(&all, &space, 0, 0);
        assert_eq!(v.ratio, Some(1.0));
    }

    #[test]
    fn related_variants_isolated_node() {
        // Industry 2 has a zero firm vector, so it is disconnected from the
        // proximity graph and isolated in the space.
        let tensor = panel_from_counts(&[&[1, 1, 0], &[1, 2, 0]], 2000);
        let phi = compute_proximity(&tensor, 2000).unwrap();
        let mst = max_spanning_tree(&phi);
        let thr = threshold_network(&phi, 0.999).unwrap();
        let space = superpose(&mst.edges, &thr, vec![2, 3, 0]);
        let u = activity(2, 3, &[]);
        let v = related_variants(&u, &space, 0, 2);
        assert_eq!(v.ratio, None);
        assert_eq!((v.count_active, v.count_total), (0, 0));
    }
}
