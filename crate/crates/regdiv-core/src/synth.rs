//! Deterministic synthetic-data generator.
//!
//! Produces a firm panel plus distance, macro, and rail tables whose
//! generating process is known exactly, so the estimators can be validated
//! end-to-end without proprietary data. Cell activation follows the probit
//! link Φ(β₀ + β₁Ω + β₂ω + β₃Ωω) on the previous year's densities; rail
//! treatment shifts cross-pair similarity (through cross-listing) and
//! productivity (through a revenue uplift in connected provinces) after the
//! rollout year.
//!
//! Every draw comes from one explicitly seeded xoshiro256++ stream in a fixed
//! loop order, so a given config yields byte-identical tables on every
//! platform.

use serde::Serialize;

use crate::econ::special::normal_cdf;
use crate::error::{Error, Result};
use crate::geo::{density_neighbors, NeighborWeighting};
use crate::metrics::{compute_proximity, compute_rca, density_related, ActivityMatrix};
use crate::panel::PanelTensor;
use crate::rng::Xoshiro256;
use crate::sym::SymMatrix;
use crate::table::fmt_f64;

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub provinces: usize,
    pub industries: usize,
    pub year_min: i32,
    pub year_max: i32,
    /// Probit link intercept and loadings on (Ω, ω, Ωω) for cell activation.
    pub beta0: f64,
    pub beta_neighbor: f64,
    pub beta_related: f64,
    pub beta_interaction: f64,
    /// Per-(pair, industry, year) probability that a treated pair cross-lists
    /// a one-sided industry after the rollout; drives the similarity effect.
    pub similarity_boost: f64,
    /// Extra annual revenue growth in rail-connected provinces after the
    /// rollout; drives the productivity effect.
    pub productivity_boost: f64,
    /// Multiplicative revenue noise amplitude.
    pub revenue_noise: f64,
    pub rail_rollout_year: i32,
    /// Probability that a province is a rail hub; pairs of hubs are treated.
    pub hub_fraction: f64,
    /// Annual per-firm delisting probability.
    pub delist_prob: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 1990,
            provinces: 24,
            industries: 40,
            year_min: 1996,
            year_max: 2015,
            beta0: -2.1,
            beta_neighbor: 2.2,
            beta_related: 2.8,
            beta_interaction: -2.4,
            similarity_boost: 0.10,
            productivity_boost: 0.05,
            revenue_noise: 0.10,
            rail_rollout_year: 2009,
            hub_fraction: 0.6,
            delist_prob: 0.015,
        }
    }
}

/// Everything a pipeline run needs, as in-memory file images.
#[derive(Debug, Clone)]
pub struct GeneratedTables {
    pub firms_csv: String,
    pub distances_csv: String,
    pub macro_csv: String,
    pub rail_csv: String,
    pub truth_json: String,
    pub report: GenReport,
}

/// Counters describing the realized generating process.
#[derive(Debug, Clone, Serialize)]
pub struct GenReport {
    /// Inactive cell-years that drew an activation Bernoulli.
    pub activation_opportunities: u64,
    /// Draws that fired a listing burst.
    pub activation_events: u64,
    pub total_firms: u64,
    pub treated_pairs: usize,
}

#[derive(Debug, Clone, Serialize)]
struct TruthRecord<'a> {
    config: &'a ScenarioConfig,
    hubs: Vec<bool>,
    report: &'a GenReport,
}

struct Firm {
    province: usize,
    industry: usize,
    list_year: i32,
    delist_year: Option<i32>,
    employees: f64,
    base_revenue_per_worker: f64,
}

impl Firm {
    fn alive(&self, year: i32) -> bool {
        self.list_year <= year && self.delist_year.map_or(true, |d| d > year)
    }
}

fn province_code(i: usize) -> String {
    let hi = b'A' + (i / 26) as u8;
    let lo = b'A' + (i % 26) as u8;
    String::from_utf8(vec![hi, lo]).unwrap()
}

fn industry_code(k: usize, per_sector: usize) -> (char, u8) {
    let sector = (b'A' + (k / per_sector) as u8) as char;
    (sector, (10 + k) as u8)
}

pub fn generate(config: &ScenarioConfig) -> Result<GeneratedTables> {
    validate(config)?;
    let mut rng = Xoshiro256::new(config.seed);
    let p = config.provinces;
    let n_ind = config.industries;
    let per_sector = n_ind.div_ceil(10);
    let years: Vec<i32> = (config.year_min..=config.year_max).collect();

    // --- Geography: province points, distances, adjacency, hop counts.
    let points: Vec<(f64, f64)> = (0..p)
        .map(|_| (rng.next_f64(), rng.next_f64()))
        .collect();
    let mut geo = SymMatrix::<f64>::new(p);
    for i in 0..p {
        for j in i + 1..p {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            geo.set(i, j, 100.0 + 3000.0 * (dx * dx + dy * dy).sqrt());
        }
    }
    let adjacency = build_adjacency(&points, &geo);
    let hops = bfs_hops(&adjacency, p);

    let mut driving = SymMatrix::<f64>::new(p);
    let mut transit = SymMatrix::<f64>::new(p);
    let mut train = SymMatrix::<f64>::new(p);
    let mut drive_h = SymMatrix::<f64>::new(p);
    for i in 0..p {
        for j in i + 1..p {
            let d = geo.get(i, j);
            driving.set(i, j, d * rng.uniform(1.1, 1.4));
            transit.set(i, j, d / 200.0 + rng.uniform(0.2, 1.0));
            train.set(i, j, d / 80.0 + rng.uniform(0.5, 2.0));
            drive_h.set(i, j, driving.get(i, j) / 85.0 + rng.uniform(0.3, 1.5));
        }
    }
    let distances = crate::panel::DistanceTable {
        geographic_km: geo,
        driving_km: driving,
        hops,
        transit_hours: transit,
        train_hours: train,
        driving_hours: drive_h,
    };

    // --- Rail: hub provinces; hub-hub pairs are connected at the rollout.
    let hubs: Vec<bool> = (0..p).map(|_| rng.bernoulli(config.hub_fraction)).collect();
    let treated_pairs = (0..p)
        .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
        .filter(|&(i, j)| hubs[i] && hubs[j])
        .count();

    // --- Macro indicators.
    let macro_csv = generate_macro(config, &mut rng, &years);

    // --- Industry affinity field: provinces near an industry's anchor point
    // are prone to host it, which seeds spatially correlated structure.
    let anchors: Vec<(f64, f64)> = (0..n_ind)
        .map(|_| (rng.next_f64(), rng.next_f64()))
        .collect();
    let affinity = |i: usize, k: usize| {
        let dx = points[i].0 - anchors[k].0;
        let dy = points[i].1 - anchors[k].1;
        (-(dx * dx + dy * dy) / 0.18).exp()
    };

    // --- Initial firm stock.
    let mut firms: Vec<Firm> = Vec::new();
    for i in 0..p {
        for k in 0..n_ind {
            let n0 = (affinity(i, k) * 5.0 * rng.next_f64()).round() as usize;
            for _ in 0..n0 {
                firms.push(new_firm(&mut rng, i, k, config.year_min));
            }
        }
    }
    // Every province and every industry must appear in the panel, or the
    // companion tables would reference codes the registries never see.
    for i in 0..p {
        if !firms.iter().any(|f| f.province == i) {
            let k = (0..n_ind)
                .max_by(|&a, &b| affinity(i, a).partial_cmp(&affinity(i, b)).unwrap())
                .unwrap();
            firms.push(new_firm(&mut rng, i, k, config.year_min));
        }
    }
    for k in 0..n_ind {
        if !firms.iter().any(|f| f.industry == k) {
            let i = (0..p)
                .max_by(|&a, &b| affinity(a, k).partial_cmp(&affinity(b, k)).unwrap())
                .unwrap();
            firms.push(new_firm(&mut rng, i, k, config.year_min));
        }
    }

    // --- Yearly dynamics driven by the probit link on last year's densities.
    let mut opportunities = 0u64;
    let mut events = 0u64;
    for &year in &years[..years.len() - 1] {
        let counts = counts_snapshot(&firms, p, n_ind, year);
        let rca = compute_rca(&counts, year)?;
        let activity = ActivityMatrix::from_rca(&rca, 1.0);
        let proximity = compute_proximity(&counts, year)?;

        let mut province_totals = vec![0.0f64; p];
        let mut industry_totals = vec![0.0f64; n_ind];
        let mut grand = 0.0f64;
        for i in 0..p {
            for k in 0..n_ind {
                let x = counts.count(i, k, year) as f64;
                province_totals[i] += x;
                industry_totals[k] += x;
                grand += x;
            }
        }

        for i in 0..p {
            for k in 0..n_ind {
                let omega_related = density_related(&activity, &proximity, i, k, true)
                    .unwrap_or(0.0);
                let omega_neighbor = density_neighbors(
                    &activity,
                    &distances,
                    i,
                    k,
                    NeighborWeighting::InverseGeoDistance,
                )?;
                if activity.is_active(i, k) {
                    // Incumbent growth keeps active cells from decaying.
                    if rng.bernoulli(0.25) {
                        firms.push(new_firm(&mut rng, i, k, year + 1));
                    }
                    continue;
                }
                opportunities += 1;
                let eta = config.beta0
                    + config.beta_neighbor * omega_neighbor
                    + config.beta_related * omega_related
                    + config.beta_interaction * omega_neighbor * omega_related;
                if rng.bernoulli(normal_cdf(eta).clamp(0.0, 1.0)) {
                    events += 1;
                    // List enough firms to clear the presence threshold with
                    // some slack.
                    let expected = province_totals[i] * industry_totals[k] / grand;
                    let target = (1.3 * expected).ceil() as u32 + 1;
                    let current = counts.count(i, k, year);
                    for _ in current..target {
                        firms.push(new_firm(&mut rng, i, k, year + 1));
                    }
                }
            }
        }

        // Delistings among firms alive this year.
        for f in firms.iter_mut() {
            if f.alive(year) && f.delist_year.is_none() && rng.bernoulli(config.delist_prob) {
                f.delist_year = Some(year + 1);
            }
        }

        // Cross-listing between treated pairs after the rollout: one-sided
        // industries may spread to the partner, raising pair similarity.
        if year + 1 > config.rail_rollout_year && config.similarity_boost > 0.0 {
            for i in 0..p {
                for j in i + 1..p {
                    if !(hubs[i] && hubs[j]) {
                        continue;
                    }
                    for k in 0..n_ind {
                        let ai = activity.is_active(i, k);
                        let aj = activity.is_active(j, k);
                        if ai == aj {
                            continue;
                        }
                        if rng.bernoulli(config.similarity_boost) {
                            let target = if ai { j } else { i };
                            firms.push(new_firm(&mut rng, target, k, year + 1));
                        }
                    }
                }
            }
        }
    }

    // --- Emit the tables.
    let firms_csv = emit_firms(config, &mut rng, &firms, &hubs, per_sector);
    let distances_csv = emit_distances(&distances, p);
    let rail_csv = emit_rail(&hubs, p, config.rail_rollout_year);

    let report = GenReport {
        activation_opportunities: opportunities,
        activation_events: events,
        total_firms: firms.len() as u64,
        treated_pairs,
    };
    let truth = TruthRecord {
        config,
        hubs,
        report: &report,
    };
    let truth_json = serde_json::to_string_pretty(&truth).expect("truth record serializes") + "\n";

    Ok(GeneratedTables {
        firms_csv,
        distances_csv,
        macro_csv,
        rail_csv,
        truth_json,
        report,
    })
}

fn validate(config: &ScenarioConfig) -> Result<()> {
    if config.provinces < 2 {
        return Err(Error::Validation(
            "scenario needs at least two provinces".into(),
        ));
    }
    if config.industries < 2 || config.industries > 89 {
        return Err(Error::Validation(
            "scenario needs between 2 and 89 industries".into(),
        ));
    }
    if config.provinces > 26 * 26 {
        return Err(Error::Validation("too many provinces for 2-letter codes".into()));
    }
    if config.year_max <= config.year_min {
        return Err(Error::Validation("year range must span at least two years".into()));
    }
    for (name, v) in [
        ("similarity_boost", config.similarity_boost),
        ("hub_fraction", config.hub_fraction),
        ("delist_prob", config.delist_prob),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Validation(format!("{name} must lie in [0,1], got {v}")));
        }
    }
    Ok(())
}

fn new_firm(rng: &mut Xoshiro256, province: usize, industry: usize, list_year: i32) -> Firm {
    Firm {
        province,
        industry,
        list_year,
        delist_year: None,
        employees: (rng.uniform(50f64.ln(), 2000f64.ln())).exp().round(),
        base_revenue_per_worker: rng.uniform(1.0e5, 4.0e5),
    }
}

fn counts_snapshot(firms: &[Firm], p: usize, n_ind: usize, year: i32) -> PanelTensor {
    let mut counts = PanelTensor::zeros(p, n_ind, year, year);
    for f in firms {
        if f.alive(year) {
            counts.add(f.province, f.industry, year, 1);
        }
    }
    counts
}

fn build_adjacency(points: &[(f64, f64)], geo: &SymMatrix<f64>) -> Vec<Vec<usize>> {
    let p = points.len();
    let mut adjacent = vec![vec![false; p]; p];
    // Each province borders its three nearest others.
    for i in 0..p {
        let mut others: Vec<usize> = (0..p).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| {
            geo.get(i, a)
                .partial_cmp(&geo.get(i, b))
                .unwrap()
                .then(a.cmp(&b))
        });
        for &j in others.iter().take(3.min(others.len())) {
            adjacent[i][j] = true;
            adjacent[j][i] = true;
        }
    }
    // Chain in x order so the border graph is connected.
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| points[a].0.partial_cmp(&points[b].0).unwrap().then(a.cmp(&b)));
    for w in order.windows(2) {
        adjacent[w[0]][w[1]] = true;
        adjacent[w[1]][w[0]] = true;
    }
    (0..p)
        .map(|i| (0..p).filter(|&j| adjacent[i][j]).collect())
        .collect()
}

fn bfs_hops(adjacency: &[Vec<usize>], p: usize) -> SymMatrix<u32> {
    let mut hops = SymMatrix::<u32>::new(p);
    for start in 0..p {
        let mut dist = vec![u32::MAX; p];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &adjacency[v] {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        for j in start + 1..p {
            hops.set(start, j, dist[j]);
        }
    }
    hops
}

fn generate_macro(config: &ScenarioConfig, rng: &mut Xoshiro256, years: &[i32]) -> String {
    let mut out = String::from("province,year,population,gdp_pc,urban_area,land_area,trade\n");
    for i in 0..config.provinces {
        let pop0 = rng.uniform(500.0, 8000.0);
        let pop_growth = rng.uniform(1.002, 1.015);
        let gdp0 = rng.uniform(10_000.0, 50_000.0);
        let gdp_growth = rng.uniform(1.05, 1.10);
        let land = rng.uniform(60_000.0, 700_000.0);
        let urban_share0 = rng.uniform(0.01, 0.08);
        let urban_growth = rng.uniform(1.01, 1.04);
        let trade0 = rng.uniform(1.0e5, 3.0e7);
        let trade_growth = rng.uniform(1.06, 1.14);
        for (t, &year) in years.iter().enumerate() {
            let e = t as i32;
            let urban = (land * urban_share0 * urban_growth.powi(e)).min(0.8 * land);
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                province_code(i),
                year,
                fmt_f64((pop0 * pop_growth.powi(e)).round()),
                fmt_f64((gdp0 * gdp_growth.powi(e)).round()),
                fmt_f64(urban.round()),
                fmt_f64(land.round()),
                fmt_f64((trade0 * trade_growth.powi(e)).round()),
            ));
        }
    }
    out
}

fn emit_firms(
    config: &ScenarioConfig,
    rng: &mut Xoshiro256,
    firms: &[Firm],
    hubs: &[bool],
    per_sector: usize,
) -> String {
    let mut out = String::from(
        "firm_id,province,sector,subsector,list_year,delist_year,year,revenue,employees\n",
    );
    for (id, f) in firms.iter().enumerate() {
        let (sector, subsector) = industry_code(f.industry, per_sector);
        let delist = f.delist_year.map(|d| d.to_string()).unwrap_or_default();
        let first = f.list_year.max(config.year_min);
        let last = f
            .delist_year
            .map(|d| (d - 1).min(config.year_max))
            .unwrap_or(config.year_max);
        for year in first..=last {
            let growth = 1.06f64.powi(year - config.year_min);
            let uplift = if hubs[f.province] && year > config.rail_rollout_year {
                (1.0 + config.productivity_boost).powi(year - config.rail_rollout_year)
            } else {
                1.0
            };
            let noise = 1.0 + config.revenue_noise * (2.0 * rng.next_f64() - 1.0);
            let revenue =
                (f.employees * f.base_revenue_per_worker * growth * uplift * noise).round();
            // Sprinkle a few missing fields to exercise ingestion diagnostics.
            let (rev_field, emp_field) = match rng.below(200) {
                0 => (String::new(), fmt_f64(f.employees)),
                1 => (fmt_f64(revenue), String::new()),
                _ => (fmt_f64(revenue), fmt_f64(f.employees)),
            };
            out.push_str(&format!(
                "F{:06},{},{},{:02},{},{},{},{},{}\n",
                id,
                province_code(f.province),
                sector,
                subsector,
                f.list_year,
                delist,
                year,
                rev_field,
                emp_field,
            ));
        }
    }
    out
}

fn emit_distances(distances: &crate::panel::DistanceTable, p: usize) -> String {
    let mut out = String::from("i,j,d_km,v_km,b_hops,t_transit_h,t_train_h,t_drive_h\n");
    for i in 0..p {
        for j in i + 1..p {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                province_code(i),
                province_code(j),
                fmt_f64(distances.geographic_km.get(i, j)),
                fmt_f64(distances.driving_km.get(i, j)),
                distances.hops.get(i, j),
                fmt_f64(distances.transit_hours.get(i, j)),
                fmt_f64(distances.train_hours.get(i, j)),
                fmt_f64(distances.driving_hours.get(i, j)),
            ));
        }
    }
    out
}

fn emit_rail(hubs: &[bool], p: usize, rollout_year: i32) -> String {
    let mut out = String::from("i,j,connected_year\n");
    for i in 0..p {
        for j in i + 1..p {
            let year = if hubs[i] && hubs[j] {
                rollout_year.to_string()
            } else {
                String::new()
            };
            out.push_str(&format!(
                "{},{},{}\n",
                province_code(i),
                province_code(j),
                year
            ));
        }
    }
    out
}
