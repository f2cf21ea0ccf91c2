//! Canonical data model for the firm panel and its companion tables.
//!
//! Registries assign dense indices to provinces and industries in sorted code
//! order, which fixes the row/column order of every export. All tables are
//! immutable after construction and safe to share across threads.

mod ingest;

pub use ingest::{
    ingest_distances, ingest_firms, ingest_macro, ingest_rail, IngestDiagnostics,
};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sym::SymMatrix;
use crate::table::fmt_f64;

// ---------------------------------------------------------------------------
// Registries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Province {
    /// Short code used in input files (e.g. a two-letter abbreviation).
    pub code: String,
    pub name: String,
}

/// Dense province index, sorted by code. Ids are 1-based to match the usual
/// presentation; internal indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvinceRegistry {
    provinces: Vec<Province>,
    by_code: BTreeMap<String, usize>,
}

impl ProvinceRegistry {
    pub fn from_codes(codes: impl IntoIterator<Item = String>) -> Self {
        let mut unique: Vec<String> = codes.into_iter().collect();
        unique.sort();
        unique.dedup();
        let provinces: Vec<Province> = unique
            .into_iter()
            .map(|code| Province {
                name: code.clone(),
                code,
            })
            .collect();
        let by_code = provinces
            .iter()
            .enumerate()
            .map(|(i, p)| (p.code.clone(), i))
            .collect();
        ProvinceRegistry {
            provinces,
            by_code,
        }
    }

    pub fn len(&self) -> usize {
        self.provinces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provinces.is_empty()
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.by_code.get(code).copied()
    }

    pub fn get(&self, index: usize) -> &Province {
        &self.provinces[index]
    }

    /// 1-based display id.
    pub fn id(&self, index: usize) -> usize {
        index + 1
    }

    pub fn codes(&self) -> Vec<String> {
        self.provinces.iter().map(|p| p.code.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Province> {
        self.provinces.iter()
    }
}

/// Industry code: one uppercase sector letter plus a two-digit subsector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndustryCode {
    pub sector: char,
    pub subsector: u8,
}

impl fmt::Display for IndustryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:02}", self.sector, self.subsector)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndustryRegistry {
    industries: Vec<IndustryCode>,
    by_code: BTreeMap<IndustryCode, usize>,
}

impl IndustryRegistry {
    /// Builds a registry from codes, sorted by (sector, subsector).
    pub fn from_codes(codes: impl IntoIterator<Item = IndustryCode>) -> Self {
        let mut unique: Vec<IndustryCode> = codes.into_iter().collect();
        unique.sort();
        unique.dedup();
        let by_code = unique.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        IndustryRegistry {
            industries: unique,
            by_code,
        }
    }

    pub fn len(&self) -> usize {
        self.industries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.industries.is_empty()
    }

    pub fn index_of(&self, code: IndustryCode) -> Option<usize> {
        self.by_code.get(&code).copied()
    }

    pub fn get(&self, index: usize) -> IndustryCode {
        self.industries[index]
    }

    pub fn labels(&self) -> Vec<String> {
        self.industries.iter().map(|c| c.to_string()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &IndustryCode> {
        self.industries.iter()
    }
}

// ---------------------------------------------------------------------------
// Tensors
// ---------------------------------------------------------------------------

/// Firm counts x[province][industry][year] over a contiguous year range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanelTensor {
    n_provinces: usize,
    n_industries: usize,
    year_min: i32,
    year_max: i32,
    counts: Vec<u32>,
}

impl PanelTensor {
    pub fn zeros(n_provinces: usize, n_industries: usize, year_min: i32, year_max: i32) -> Self {
        assert!(year_max >= year_min);
        let n_years = (year_max - year_min + 1) as usize;
        PanelTensor {
            n_provinces,
            n_industries,
            year_min,
            year_max,
            counts: vec![0; n_provinces * n_industries * n_years],
        }
    }

    pub fn n_provinces(&self) -> usize {
        self.n_provinces
    }

    pub fn n_industries(&self) -> usize {
        self.n_industries
    }

    pub fn year_min(&self) -> i32 {
        self.year_min
    }

    pub fn year_max(&self) -> i32 {
        self.year_max
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.year_min..=self.year_max
    }

    pub fn contains_year(&self, year: i32) -> bool {
        (self.year_min..=self.year_max).contains(&year)
    }

    fn offset(&self, province: usize, industry: usize, year: i32) -> usize {
        assert!(province < self.n_provinces && industry < self.n_industries);
        assert!(
            self.contains_year(year),
            "year {year} outside [{}, {}]",
            self.year_min,
            self.year_max
        );
        let t = (year - self.year_min) as usize;
        (province * self.n_industries + industry) * (self.year_max - self.year_min + 1) as usize
            + t
    }

    pub fn count(&self, province: usize, industry: usize, year: i32) -> u32 {
        self.counts[self.offset(province, industry, year)]
    }

    pub fn add(&mut self, province: usize, industry: usize, year: i32, delta: u32) {
        let o = self.offset(province, industry, year);
        self.counts[o] += delta;
    }

    pub fn set(&mut self, province: usize, industry: usize, year: i32, value: u32) {
        let o = self.offset(province, industry, year);
        self.counts[o] = value;
    }

    pub fn year_total(&self, year: i32) -> u64 {
        let mut total = 0u64;
        for i in 0..self.n_provinces {
            for a in 0..self.n_industries {
                total += self.count(i, a, year) as u64;
            }
        }
        total
    }
}

/// Labor productivity p[province][industry][year] with an explicit presence
/// mask: a cell is missing exactly when its firms report zero employees.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductivityTensor {
    n_provinces: usize,
    n_industries: usize,
    year_min: i32,
    year_max: i32,
    values: Vec<f64>,
    defined: Vec<bool>,
}

impl ProductivityTensor {
    pub fn empty(n_provinces: usize, n_industries: usize, year_min: i32, year_max: i32) -> Self {
        let n_years = (year_max - year_min + 1) as usize;
        let len = n_provinces * n_industries * n_years;
        ProductivityTensor {
            n_provinces,
            n_industries,
            year_min,
            year_max,
            values: vec![0.0; len],
            defined: vec![false; len],
        }
    }

    fn offset(&self, province: usize, industry: usize, year: i32) -> usize {
        assert!(province < self.n_provinces && industry < self.n_industries);
        assert!((self.year_min..=self.year_max).contains(&year));
        let t = (year - self.year_min) as usize;
        (province * self.n_industries + industry) * (self.year_max - self.year_min + 1) as usize
            + t
    }

    pub fn get(&self, province: usize, industry: usize, year: i32) -> Option<f64> {
        let o = self.offset(province, industry, year);
        if self.defined[o] {
            Some(self.values[o])
        } else {
            None
        }
    }

    pub fn set(&mut self, province: usize, industry: usize, year: i32, value: f64) {
        let o = self.offset(province, industry, year);
        self.values[o] = value;
        self.defined[o] = true;
    }

    pub fn year_min(&self) -> i32 {
        self.year_min
    }

    pub fn year_max(&self) -> i32 {
        self.year_max
    }
}

/// The ingested panel: registries plus count and productivity tensors.
#[derive(Debug, Clone)]
pub struct Panel {
    pub provinces: ProvinceRegistry,
    pub industries: IndustryRegistry,
    pub counts: PanelTensor,
    pub productivity: ProductivityTensor,
}

impl Panel {
    /// Serializes the count tensor, one row per cell including zeros, in
    /// registry order.
    pub fn counts_csv(&self) -> String {
        let mut out = String::from("province,sector,subsector,year,count\n");
        for (i, p) in self.provinces.iter().enumerate() {
            for (a, code) in self.industries.iter().enumerate() {
                for year in self.counts.years() {
                    out.push_str(&format!(
                        "{},{},{:02},{},{}\n",
                        p.code,
                        code.sector,
                        code.subsector,
                        year,
                        self.counts.count(i, a, year)
                    ));
                }
            }
        }
        out
    }

    /// Serializes defined productivity cells in registry order.
    pub fn productivity_csv(&self) -> String {
        let mut out = String::from("province,sector,subsector,year,productivity\n");
        for (i, p) in self.provinces.iter().enumerate() {
            for (a, code) in self.industries.iter().enumerate() {
                for year in self.counts.years() {
                    if let Some(v) = self.productivity.get(i, a, year) {
                        out.push_str(&format!(
                            "{},{},{:02},{},{}\n",
                            p.code,
                            code.sector,
                            code.subsector,
                            year,
                            fmt_f64(v)
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Reads a count tensor previously written by [`Panel::counts_csv`].
pub fn read_counts_csv(path: &Path) -> Result<(ProvinceRegistry, IndustryRegistry, PanelTensor)> {
    let file_name = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Validation(format!("{file_name}: {e}")))?;

    let mut rows: Vec<(String, IndustryCode, i32, u32)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record.map_err(|e| Error::parse(&file_name, line, e.to_string()))?;
        if record.len() != 5 {
            return Err(Error::parse(&file_name, line, "expected 5 columns"));
        }
        let sector = ingest::parse_sector(&record[1])
            .ok_or_else(|| Error::parse(&file_name, line, "bad sector"))?;
        let subsector = ingest::parse_subsector(&record[2])
            .ok_or_else(|| Error::parse(&file_name, line, "bad subsector"))?;
        let year: i32 = record[3]
            .parse()
            .map_err(|_| Error::parse(&file_name, line, "bad year"))?;
        let count: u32 = record[4]
            .parse()
            .map_err(|_| Error::parse(&file_name, line, "bad count"))?;
        rows.push((
            record[0].to_string(),
            IndustryCode { sector, subsector },
            year,
            count,
        ));
    }
    if rows.is_empty() {
        return Err(Error::Validation(format!("{file_name}: no rows")));
    }

    let provinces = ProvinceRegistry::from_codes(rows.iter().map(|r| r.0.clone()));
    let industries = IndustryRegistry::from_codes(rows.iter().map(|r| r.1));
    let year_min = rows.iter().map(|r| r.2).min().unwrap();
    let year_max = rows.iter().map(|r| r.2).max().unwrap();
    let mut tensor = PanelTensor::zeros(provinces.len(), industries.len(), year_min, year_max);
    for (code, industry, year, count) in rows {
        let i = provinces.index_of(&code).unwrap();
        let a = industries.index_of(industry).unwrap();
        tensor.set(i, a, year, count);
    }
    Ok((provinces, industries, tensor))
}

// ---------------------------------------------------------------------------
// Companion tables
// ---------------------------------------------------------------------------

/// Pairwise province distances and travel times. Diagonals do not exist; all
/// matrices are symmetric by construction.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    pub geographic_km: SymMatrix<f64>,
    pub driving_km: SymMatrix<f64>,
    /// Neighboring distance: number of region crossings, 1 = shares a border.
    pub hops: SymMatrix<u32>,
    pub transit_hours: SymMatrix<f64>,
    pub train_hours: SymMatrix<f64>,
    pub driving_hours: SymMatrix<f64>,
}

impl DistanceTable {
    pub fn len(&self) -> usize {
        self.geographic_km.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geographic_km.is_empty()
    }

    /// Provinces adjacent to `i` (hops == 1), in index order.
    pub fn adjacent(&self, i: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| j != i && self.hops.get(i, j) == 1)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroRecord {
    /// Resident population, 10k persons.
    pub population: f64,
    /// GDP per capita, currency per person.
    pub gdp_per_capita: f64,
    /// Urban area, km².
    pub urban_area: f64,
    /// Land area, km².
    pub land_area: f64,
    /// Total imports + exports, 1k USD.
    pub trade: f64,
}

impl MacroRecord {
    pub fn urbanization(&self) -> f64 {
        self.urban_area / self.land_area
    }
}

#[derive(Debug, Clone, Default)]
pub struct MacroTable {
    records: BTreeMap<(usize, i32), MacroRecord>,
}

impl MacroTable {
    pub fn insert(&mut self, province: usize, year: i32, record: MacroRecord) -> bool {
        self.records.insert((province, year), record).is_none()
    }

    pub fn get(&self, province: usize, year: i32) -> Option<&MacroRecord> {
        self.records.get(&(province, year))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// High-speed-rail connectivity between province pairs as of the
/// treatment-definition year.
#[derive(Debug, Clone)]
pub struct RailTable {
    pub connected: SymMatrix<bool>,
}

impl RailTable {
    pub fn is_treated(&self, i: usize, j: usize) -> bool {
        self.connected.get(i, j)
    }

    pub fn n_treated_pairs(&self) -> usize {
        self.connected
            .pairs()
            .filter(|&(i, j)| self.connected.get(i, j))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_orders_by_code() {
        let reg = ProvinceRegistry::from_codes(["ZJ".into(), "BJ".into(), "SH".into()]);
        assert_eq!(reg.codes(), vec!["BJ", "SH", "ZJ"]);
        assert_eq!(reg.index_of("SH"), Some(1));
        assert_eq!(reg.id(0), 1);
    }

    #[test]
    fn industry_code_display_pads() {
        let code = IndustryCode {
            sector: 'C',
            subsector: 5,
        };
        assert_eq!(code.to_string(), "C05");
    }

    #[test]
    fn tensor_indexing() {
        let mut t = PanelTensor::zeros(2, 3, 2000, 2002);
        t.add(1, 2, 2001, 4);
        assert_eq!(t.count(1, 2, 2001), 4);
        assert_eq!(t.count(1, 2, 2000), 0);
        assert_eq!(t.year_total(2001), 4);
    }

    #[test]
    fn productivity_mask() {
        let mut p = ProductivityTensor::empty(1, 1, 2000, 2001);
        assert_eq!(p.get(0, 0, 2000), None);
        p.set(0, 0, 2000, 15.0);
        assert_eq!(p.get(0, 0, 2000), Some(15.0));
        assert_eq!(p.get(0, 0, 2001), None);
    }
}
