//! File ingestion: firm records, distance tables, macro indicators, and rail
//! connectivity. Input schemas are documented in the repository README.
//!
//! Row-level problems that leave the rest of the file usable (malformed
//! codes, classification conflicts, observations outside a firm's listing
//! window) reject the row and are reported through [`IngestDiagnostics`].
//! Structural problems (asymmetric pairs, missing coverage, inconsistent firm
//! attributes) are hard errors.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sym::SymMatrix;

use super::{
    DistanceTable, IndustryCode, IndustryRegistry, MacroRecord, MacroTable, Panel, PanelTensor,
    ProductivityTensor, ProvinceRegistry, RailTable,
};

/// Per-file ingestion report: rejected rows and data-quality flags, with a
/// bounded number of example messages per category.
#[derive(Debug, Clone, Default)]
pub struct IngestDiagnostics {
    pub rejected_rows: u64,
    pub rejected_examples: Vec<String>,
    pub zero_revenue_rows: u64,
    pub missing_employee_rows: u64,
    pub zero_firm_provinces: Vec<String>,
}

const MAX_EXAMPLES: usize = 20;

impl IngestDiagnostics {
    fn reject(&mut self, line: u64, reason: &str) {
        self.rejected_rows += 1;
        if self.rejected_examples.len() < MAX_EXAMPLES {
            self.rejected_examples.push(format!("line {line}: {reason}"));
        }
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("rejected_rows: {}\n", self.rejected_rows));
        for e in &self.rejected_examples {
            out.push_str(&format!("  {e}\n"));
        }
        out.push_str(&format!(
            "rows_with_missing_revenue_kept_as_zero: {}\n",
            self.zero_revenue_rows
        ));
        out.push_str(&format!(
            "rows_excluded_for_missing_employees: {}\n",
            self.missing_employee_rows
        ));
        if !self.zero_firm_provinces.is_empty() {
            out.push_str(&format!(
                "provinces_with_zero_firms_in_some_year: {}\n",
                self.zero_firm_provinces.join(",")
            ));
        }
        out
    }
}

pub(super) fn parse_sector(s: &str) -> Option<char> {
    let mut chars = s.chars();
    let c = chars.next()?;
    if chars.next().is_some() || !c.is_ascii_uppercase() {
        return None;
    }
    Some(c)
}

pub(super) fn parse_subsector(s: &str) -> Option<u8> {
    if s.len() != 2 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn opt_field(s: &str) -> Option<&str> {
    let t = s.trim();
    if t.is_empty() {
        None
    } else {
        Some(t)
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Validation(format!(
                "missing or unreadable input file: {}",
                path.display()
            )),
            _ => Error::Validation(format!("{}: {e}", path.display())),
        })
}

fn expect_header(reader: &mut csv::Reader<std::fs::File>, path: &Path, want: &[&str]) -> Result<()> {
    let headers = reader
        .headers()
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != want {
        return Err(Error::parse(
            path.display().to_string(),
            1,
            format!("expected header {}, got {}", want.join(","), got.join(",")),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Firms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
struct FirmInfo {
    province: String,
    industry: IndustryCode,
    list_year: i32,
    delist_year: Option<i32>,
}

/// A firm counts in year t iff `list_year <= t` and it has not been delisted
/// before or in t (`delist_year > t`): a firm delisted in t contributes
/// through t-1.
fn alive(info: &FirmInfo, year: i32) -> bool {
    info.list_year <= year && info.delist_year.map_or(true, |d| d > year)
}

/// Ingests the firm table and builds the count and productivity tensors.
///
/// Expected columns:
/// `firm_id,province,sector,subsector,list_year,delist_year,year,revenue,employees`
/// with `delist_year`, `revenue`, and `employees` optionally empty.
pub fn ingest_firms(path: &Path) -> Result<(Panel, IngestDiagnostics)> {
    let file_name = path.display().to_string();
    let mut reader = open_csv(path)?;
    expect_header(
        &mut reader,
        path,
        &[
            "firm_id",
            "province",
            "sector",
            "subsector",
            "list_year",
            "delist_year",
            "year",
            "revenue",
            "employees",
        ],
    )?;

    let mut diags = IngestDiagnostics::default();
    let mut firms: BTreeMap<String, FirmInfo> = BTreeMap::new();
    // Maps a subsector code to the sector it was first seen under.
    let mut subsector_sector: BTreeMap<u8, char> = BTreeMap::new();
    // (province, industry, year, revenue, employees)
    let mut observations: Vec<(String, IndustryCode, i32, Option<f64>, Option<f64>)> = Vec::new();

    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record.map_err(|e| Error::parse(&file_name, line, e.to_string()))?;

        let firm_id = record[0].trim().to_string();
        if firm_id.is_empty() {
            diags.reject(line, "empty firm_id");
            continue;
        }
        let province = record[1].trim().to_string();
        if province.is_empty() {
            diags.reject(line, "unknown province code (empty)");
            continue;
        }
        let sector = match parse_sector(record[2].trim()) {
            Some(s) => s,
            None => {
                diags.reject(line, &format!("unknown sector code {:?}", &record[2]));
                continue;
            }
        };
        let subsector = match parse_subsector(record[3].trim()) {
            Some(s) => s,
            None => {
                diags.reject(line, &format!("unknown subsector code {:?}", &record[3]));
                continue;
            }
        };
        match subsector_sector.get(&subsector) {
            Some(&first) if first != sector => {
                diags.reject(
                    line,
                    &format!(
                        "subsector {subsector:02} already classified under sector {first}, row says {sector}"
                    ),
                );
                continue;
            }
            Some(_) => {}
            None => {
                subsector_sector.insert(subsector, sector);
            }
        }
        let industry = IndustryCode { sector, subsector };

        let list_year: i32 = match record[4].trim().parse() {
            Ok(y) => y,
            Err(_) => {
                diags.reject(line, "bad list_year");
                continue;
            }
        };
        let delist_year: Option<i32> = match opt_field(&record[5]) {
            None => None,
            Some(s) => match s.parse() {
                Ok(y) => Some(y),
                Err(_) => {
                    diags.reject(line, "bad delist_year");
                    continue;
                }
            },
        };
        if let Some(d) = delist_year {
            if d < list_year {
                return Err(Error::Validation(format!(
                    "{file_name}:{line}: firm {firm_id} delisted in {d} before listing in {list_year}"
                )));
            }
        }
        let year: i32 = match record[6].trim().parse() {
            Ok(y) => y,
            Err(_) => {
                diags.reject(line, "bad year");
                continue;
            }
        };
        let revenue: Option<f64> = match opt_field(&record[7]) {
            None => None,
            Some(s) => match s.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Some(v),
                _ => {
                    diags.reject(line, "bad revenue");
                    continue;
                }
            },
        };
        let employees: Option<f64> = match opt_field(&record[8]) {
            None => None,
            Some(s) => match s.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Some(v),
                _ => {
                    diags.reject(line, "bad employees");
                    continue;
                }
            },
        };

        let info = FirmInfo {
            province: province.clone(),
            industry,
            list_year,
            delist_year,
        };
        match firms.get(&firm_id) {
            None => {
                firms.insert(firm_id.clone(), info.clone());
            }
            Some(existing) if *existing != info => {
                return Err(Error::Validation(format!(
                    "{file_name}:{line}: firm {firm_id} has conflicting attributes across rows"
                )));
            }
            Some(_) => {}
        }
        if !alive(&info, year) {
            diags.reject(
                line,
                &format!("observation year {year} outside firm {firm_id}'s listing window"),
            );
            continue;
        }
        observations.push((province, industry, year, revenue, employees));
    }

    if firms.is_empty() {
        return Err(Error::Validation(format!(
            "{file_name}: no valid firm rows"
        )));
    }

    let year_min = observations.iter().map(|o| o.2).min().unwrap();
    let year_max = observations.iter().map(|o| o.2).max().unwrap();

    let provinces = ProvinceRegistry::from_codes(firms.values().map(|f| f.province.clone()));
    let industries = IndustryRegistry::from_codes(firms.values().map(|f| f.industry));

    let mut counts = PanelTensor::zeros(provinces.len(), industries.len(), year_min, year_max);
    for info in firms.values() {
        let i = provinces.index_of(&info.province).unwrap();
        let a = industries.index_of(info.industry).unwrap();
        for year in year_min..=year_max {
            if alive(info, year) {
                counts.add(i, a, year, 1);
            }
        }
    }

    // Pool revenue over pooled employees per cell (ratio of sums).
    let n_years = (year_max - year_min + 1) as usize;
    let cell = |i: usize, a: usize, t: i32| {
        (i * industries.len() + a) * n_years + (t - year_min) as usize
    };
    let mut revenue_sum = vec![0.0f64; provinces.len() * industries.len() * n_years];
    let mut employee_sum = vec![0.0f64; provinces.len() * industries.len() * n_years];
    for (province, industry, year, revenue, employees) in &observations {
        let i = provinces.index_of(province).unwrap();
        let a = industries.index_of(*industry).unwrap();
        let o = cell(i, a, *year);
        match employees {
            Some(e) if *e > 0.0 => {
                employee_sum[o] += e;
                match revenue {
                    Some(r) => revenue_sum[o] += r,
                    None => diags.zero_revenue_rows += 1,
                }
            }
            _ => {
                // No employee data: the row cannot enter the denominator.
                diags.missing_employee_rows += 1;
            }
        }
    }

    let mut productivity =
        ProductivityTensor::empty(provinces.len(), industries.len(), year_min, year_max);
    for i in 0..provinces.len() {
        for a in 0..industries.len() {
            for year in year_min..=year_max {
                let o = cell(i, a, year);
                if employee_sum[o] > 0.0 {
                    productivity.set(i, a, year, revenue_sum[o] / employee_sum[o]);
                }
            }
        }
    }

    // Flag provinces that have no firms at all in some year (their RCA rows
    // will be all-zero).
    for (i, p) in provinces.iter().enumerate() {
        let empty_somewhere = (year_min..=year_max)
            .any(|t| (0..industries.len()).all(|a| counts.count(i, a, t) == 0));
        if empty_somewhere {
            diags.zero_firm_provinces.push(p.code.clone());
        }
    }

    Ok((
        Panel {
            provinces,
            industries,
            counts,
            productivity,
        },
        diags,
    ))
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Ingests the pairwise distance table. Every unordered pair must be covered;
/// a pair given in both directions must agree field-by-field.
///
/// Expected columns: `i,j,d_km,v_km,b_hops,t_transit_h,t_train_h,t_drive_h`.
pub fn ingest_distances(path: &Path, provinces: &ProvinceRegistry) -> Result<DistanceTable> {
    let file_name = path.display().to_string();
    let mut reader = open_csv(path)?;
    expect_header(
        &mut reader,
        path,
        &[
            "i",
            "j",
            "d_km",
            "v_km",
            "b_hops",
            "t_transit_h",
            "t_train_h",
            "t_drive_h",
        ],
    )?;

    let n = provinces.len();
    if n < 2 {
        return Err(Error::Validation(
            "distance table requires at least two provinces".into(),
        ));
    }
    let mut seen: SymMatrix<bool> = SymMatrix::new(n);
    let mut table = DistanceTable {
        geographic_km: SymMatrix::new(n),
        driving_km: SymMatrix::new(n),
        hops: SymMatrix::new(n),
        transit_hours: SymMatrix::new(n),
        train_hours: SymMatrix::new(n),
        driving_hours: SymMatrix::new(n),
    };

    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record.map_err(|e| Error::parse(&file_name, line, e.to_string()))?;
        let code_i = record[0].trim();
        let code_j = record[1].trim();
        let i = provinces.index_of(code_i).ok_or_else(|| {
            Error::Validation(format!("{file_name}:{line}: unknown province {code_i:?}"))
        })?;
        let j = provinces.index_of(code_j).ok_or_else(|| {
            Error::Validation(format!("{file_name}:{line}: unknown province {code_j:?}"))
        })?;
        if i == j {
            return Err(Error::Validation(format!(
                "{file_name}:{line}: self-pair {code_i}-{code_j} not allowed"
            )));
        }
        let mut floats = [0.0f64; 5];
        for (k, col) in [2usize, 3, 5, 6, 7].iter().enumerate() {
            let v: f64 = record[*col]
                .trim()
                .parse()
                .map_err(|_| Error::parse(&file_name, line, format!("bad field {col}")))?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "{file_name}:{line}: pair {code_i}-{code_j}: distances and times must be strictly positive"
                )));
            }
            floats[k] = v;
        }
        let hops: u32 = record[4]
            .trim()
            .parse()
            .map_err(|_| Error::parse(&file_name, line, "bad b_hops"))?;
        if hops < 1 || hops as usize > n - 1 {
            return Err(Error::Validation(format!(
                "{file_name}:{line}: pair {code_i}-{code_j}: b_hops {hops} outside [1, {}]",
                n - 1
            )));
        }

        if seen.get(i, j) {
            let agrees = table.geographic_km.get(i, j) == floats[0]
                && table.driving_km.get(i, j) == floats[1]
                && table.hops.get(i, j) == hops
                && table.transit_hours.get(i, j) == floats[2]
                && table.train_hours.get(i, j) == floats[3]
                && table.driving_hours.get(i, j) == floats[4];
            if !agrees {
                return Err(Error::Validation(format!(
                    "{file_name}:{line}: asymmetric values for pair {code_i}-{code_j}"
                )));
            }
            continue;
        }
        seen.set(i, j, true);
        table.geographic_km.set(i, j, floats[0]);
        table.driving_km.set(i, j, floats[1]);
        table.hops.set(i, j, hops);
        table.transit_hours.set(i, j, floats[2]);
        table.train_hours.set(i, j, floats[3]);
        table.driving_hours.set(i, j, floats[4]);
    }

    for (i, j) in seen.pairs() {
        if !seen.get(i, j) {
            return Err(Error::Validation(format!(
                "{file_name}: missing distance pair {}-{}",
                provinces.get(i).code,
                provinces.get(j).code
            )));
        }
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Macro indicators
// ---------------------------------------------------------------------------

/// Ingests per-province, per-year macro indicators.
///
/// Expected columns: `province,year,population,gdp_pc,urban_area,land_area,trade`.
pub fn ingest_macro(path: &Path, provinces: &ProvinceRegistry) -> Result<MacroTable> {
    let file_name = path.display().to_string();
    let mut reader = open_csv(path)?;
    expect_header(
        &mut reader,
        path,
        &[
            "province",
            "year",
            "population",
            "gdp_pc",
            "urban_area",
            "land_area",
            "trade",
        ],
    )?;

    let mut table = MacroTable::default();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record.map_err(|e| Error::parse(&file_name, line, e.to_string()))?;
        let code = record[0].trim();
        let province = provinces.index_of(code).ok_or_else(|| {
            Error::Validation(format!("{file_name}:{line}: unknown province {code:?}"))
        })?;
        let year: i32 = record[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(&file_name, line, "bad year"))?;
        let mut values = [0.0f64; 5];
        for (k, v) in values.iter_mut().enumerate() {
            *v = record[k + 2]
                .trim()
                .parse()
                .map_err(|_| Error::parse(&file_name, line, format!("bad field {}", k + 2)))?;
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::Validation(format!(
                    "{file_name}:{line}: macro indicators must be finite and nonnegative"
                )));
            }
        }
        let record = MacroRecord {
            population: values[0],
            gdp_per_capita: values[1],
            urban_area: values[2],
            land_area: values[3],
            trade: values[4],
        };
        if record.land_area <= 0.0 || record.urban_area > record.land_area {
            return Err(Error::Validation(format!(
                "{file_name}:{line}: {code} {year}: urban area must not exceed land area"
            )));
        }
        if !table.insert(province, year, record) {
            return Err(Error::Validation(format!(
                "{file_name}:{line}: duplicate macro row for {code} {year}"
            )));
        }
    }
    if table.is_empty() {
        return Err(Error::Validation(format!("{file_name}: no rows")));
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Rail connectivity
// ---------------------------------------------------------------------------

/// Ingests high-speed-rail connectivity. Every unordered pair must appear; a
/// pair is treated iff its `connected_year` field is nonempty.
///
/// Expected columns: `i,j,connected_year`.
pub fn ingest_rail(path: &Path, provinces: &ProvinceRegistry) -> Result<RailTable> {
    let file_name = path.display().to_string();
    let mut reader = open_csv(path)?;
    expect_header(&mut reader, path, &["i", "j", "connected_year"])?;

    let n = provinces.len();
    let mut seen: SymMatrix<bool> = SymMatrix::new(n);
    let mut connected: SymMatrix<bool> = SymMatrix::new(n);

    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record.map_err(|e| Error::parse(&file_name, line, e.to_string()))?;
        let code_i = record[0].trim();
        let code_j = record[1].trim();
        let i = provinces.index_of(code_i).ok_or_else(|| {
            Error::Validation(format!("{file_name}:{line}: unknown province {code_i:?}"))
        })?;
        let j = provinces.index_of(code_j).ok_or_else(|| {
            Error::Validation(format!("{file_name}:{line}: unknown province {code_j:?}"))
        })?;
        if i == j {
            return Err(Error::Validation(format!(
                "{file_name}:{line}: self-pair {code_i}-{code_j} not allowed"
            )));
        }
        let is_connected = match opt_field(&record[2]) {
            None => false,
            Some(s) => {
                s.parse::<i32>()
                    .map_err(|_| Error::parse(&file_name, line, "bad connected_year"))?;
                true
            }
        };
        if seen.get(i, j) {
            if connected.get(i, j) != is_connected {
                return Err(Error::Validation(format!(
                    "{file_name}:{line}: asymmetric rail connectivity for pair {code_i}-{code_j}"
                )));
            }
            continue;
        }
        seen.set(i, j, true);
        connected.set(i, j, is_connected);
    }

    for (i, j) in seen.pairs() {
        if !seen.get(i, j) {
            return Err(Error::Validation(format!(
                "{file_name}: missing rail pair {}-{}",
                provinces.get(i).code,
                provinces.get(j).code
            )));
        }
    }
    Ok(RailTable { connected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const FIRMS_HEADER: &str =
        "firm_id,province,sector,subsector,list_year,delist_year,year,revenue,employees\n";

    #[test]
    fn single_firm_counts_every_year_from_listing() {
        let mut content = String::from(FIRMS_HEADER);
        for year in 2000..=2004 {
            content.push_str(&format!("f1,BJ,C,27,2000,,{year},100,10\n"));
        }
        let file = write_temp(&content);
        let (panel, diags) = ingest_firms(file.path()).unwrap();
        assert_eq!(diags.rejected_rows, 0);
        let i = panel.provinces.index_of("BJ").unwrap();
        let a = panel
            .industries
            .index_of(IndustryCode {
                sector: 'C',
                subsector: 27,
            })
            .unwrap();
        for year in 2000..=2004 {
            assert_eq!(panel.counts.count(i, a, year), 1);
        }
    }

    #[test]
    fn delisted_firm_counts_through_year_before_delisting() {
        // Listed 1995, delisted 2003: counted 1995-2002, not 2003 onward.
        let mut content = String::from(FIRMS_HEADER);
        for year in 1995..=2002 {
            content.push_str(&format!("f1,BJ,C,27,1995,2003,{year},1,1\n"));
        }
        // Keep the panel range open through 2005 with a second firm.
        for year in 1995..=2005 {
            content.push_str(&format!("f2,SH,D,44,1995,,{year},1,1\n"));
        }
        let file = write_temp(&content);
        let (panel, _) = ingest_firms(file.path()).unwrap();
        let i = panel.provinces.index_of("BJ").unwrap();
        let a = panel
            .industries
            .index_of(IndustryCode {
                sector: 'C',
                subsector: 27,
            })
            .unwrap();
        for year in 1995..=2002 {
            assert_eq!(panel.counts.count(i, a, year), 1, "year {year}");
        }
        for year in 2003..=2005 {
            assert_eq!(panel.counts.count(i, a, year), 0, "year {year}");
        }
    }

    #[test]
    fn productivity_pools_revenue_over_pooled_employees() {
        // Revenues 100 and 200 over 10 + 10 employees: 300/20 = 15.
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,C,27,2000,,2000,100,10\n");
        content.push_str("f2,BJ,C,27,2000,,2000,200,10\n");
        let file = write_temp(&content);
        let (panel, _) = ingest_firms(file.path()).unwrap();
        assert_eq!(panel.productivity.get(0, 0, 2000), Some(15.0));
    }

    #[test]
    fn missing_employees_excluded_and_flagged() {
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,C,27,2000,,2000,100,\n");
        content.push_str("f2,BJ,C,27,2000,,2000,200,10\n");
        let file = write_temp(&content);
        let (panel, diags) = ingest_firms(file.path()).unwrap();
        assert_eq!(diags.missing_employee_rows, 1);
        assert_eq!(panel.productivity.get(0, 0, 2000), Some(20.0));
    }

    #[test]
    fn missing_revenue_contributes_employees_at_zero_revenue() {
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,C,27,2000,,2000,,10\n");
        content.push_str("f2,BJ,C,27,2000,,2000,200,10\n");
        let file = write_temp(&content);
        let (panel, diags) = ingest_firms(file.path()).unwrap();
        assert_eq!(diags.zero_revenue_rows, 1);
        assert_eq!(panel.productivity.get(0, 0, 2000), Some(10.0));
    }

    #[test]
    fn cell_missing_iff_no_employees() {
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,C,27,2000,,2000,100,\n");
        content.push_str("f2,SH,D,44,2000,,2000,50,5\n");
        let file = write_temp(&content);
        let (panel, _) = ingest_firms(file.path()).unwrap();
        let bj = panel.provinces.index_of("BJ").unwrap();
        let c27 = panel
            .industries
            .index_of(IndustryCode {
                sector: 'C',
                subsector: 27,
            })
            .unwrap();
        assert_eq!(panel.productivity.get(bj, c27, 2000), None);
    }

    #[test]
    fn delist_before_list_is_hard_error() {
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,C,27,2000,1999,2000,1,1\n");
        let file = write_temp(&content);
        assert!(matches!(
            ingest_firms(file.path()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn malformed_codes_reject_row_with_diagnostic() {
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,c,27,2000,,2000,1,1\n"); // lowercase sector
        content.push_str("f2,BJ,C,7,2000,,2000,1,1\n"); // one-digit subsector
        content.push_str("f3,BJ,C,27,2000,,2000,1,1\n");
        let file = write_temp(&content);
        let (panel, diags) = ingest_firms(file.path()).unwrap();
        assert_eq!(diags.rejected_rows, 2);
        assert_eq!(panel.counts.year_total(2000), 1);
    }

    #[test]
    fn subsector_under_two_sectors_rejected() {
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,C,27,2000,,2000,1,1\n");
        content.push_str("f2,BJ,D,27,2000,,2000,1,1\n");
        let file = write_temp(&content);
        let (_, diags) = ingest_firms(file.path()).unwrap();
        assert_eq!(diags.rejected_rows, 1);
    }

    #[test]
    fn alive_count_matches_naive_per_firm_scan() {
        // Random-ish mix of listing windows; compare tensor totals with a
        // direct scan of the firm list.
        let firms: Vec<(i32, Option<i32>)> = vec![
            (1995, None),
            (1996, Some(1999)),
            (1997, Some(1997)),
            (1999, Some(2005)),
            (2000, None),
            (2001, Some(2002)),
        ];
        let mut content = String::from(FIRMS_HEADER);
        for (k, (list, delist)) in firms.iter().enumerate() {
            let d = delist.map(|d| d.to_string()).unwrap_or_default();
            // One observation row per firm at its listing year (clamped into
            // 1995..=2005 panel range established by firm f0).
            content.push_str(&format!("f{k},P{k},A,0{k},{list},{d},{list},1,1\n"));
        }
        content.push_str("fx,PX,B,99,1995,,1995,1,1\n");
        content.push_str("fy,PY,B,99,1995,,2005,1,1\n");
        let file = write_temp(&content);
        let (panel, _) = ingest_firms(file.path()).unwrap();
        for year in 1995..=2005 {
            let expected = firms
                .iter()
                .filter(|(l, d)| *l <= year && d.map_or(true, |d| d > year))
                .count() as u64
                + 2; // fx and fy are always alive
            assert_eq!(panel.counts.year_total(year), expected, "year {year}");
        }
    }

    #[test]
    fn observation_outside_window_rejected() {
        let mut content = String::from(FIRMS_HEADER);
        content.push_str("f1,BJ,C,27,2000,2003,2004,1,1\n"); // delisted before obs year
        content.push_str("f1,BJ,C,27,2000,2003,2002,1,1\n");
        let file = write_temp(&content);
        let (_, diags) = ingest_firms(file.path()).unwrap();
        assert_eq!(diags.rejected_rows, 1);
    }

    const DIST_HEADER: &str = "i,j,d_km,v_km,b_hops,t_transit_h,t_train_h,t_drive_h\n";

    fn three_province_registry() -> ProvinceRegistry {
        ProvinceRegistry::from_codes(["BJ".into(), "SD".into(), "SH".into()])
    }

    #[test]
    fn distances_mirror_on_read() {
        let content = format!(
            "{DIST_HEADER}BJ,SD,400,500,2,2,5,6\nBJ,SH,1200,1400,3,5,12,14\nSD,SH,800,900,1,4,8,10\n"
        );
        let file = write_temp(&content);
        let reg = three_province_registry();
        let table = ingest_distances(file.path(), &reg).unwrap();
        let bj = reg.index_of("BJ").unwrap();
        let sd = reg.index_of("SD").unwrap();
        assert_eq!(table.geographic_km.get(sd, bj), 400.0);
        assert_eq!(table.geographic_km.get(bj, sd), 400.0);
    }

    #[test]
    fn asymmetric_pair_is_hard_error() {
        let content = format!(
            "{DIST_HEADER}BJ,SD,400,500,2,2,5,6\nSD,BJ,401,500,2,2,5,6\nBJ,SH,1200,1400,3,5,12,14\nSD,SH,800,900,1,4,8,10\n"
        );
        let file = write_temp(&content);
        let err = ingest_distances(file.path(), &three_province_registry()).unwrap_err();
        assert!(err.to_string().contains("asymmetric"), "{err}");
    }

    #[test]
    fn missing_pair_is_hard_error() {
        let content = format!("{DIST_HEADER}BJ,SD,400,500,2,2,5,6\n");
        let file = write_temp(&content);
        let err = ingest_distances(file.path(), &three_province_registry()).unwrap_err();
        assert!(err.to_string().contains("missing distance pair"), "{err}");
    }

    #[test]
    fn hops_outside_range_rejected() {
        // 3 provinces: valid hops are 1..=2.
        let content = format!(
            "{DIST_HEADER}BJ,SD,400,500,5,2,5,6\nBJ,SH,1200,1400,3,5,12,14\nSD,SH,800,900,1,4,8,10\n"
        );
        let file = write_temp(&content);
        let err = ingest_distances(file.path(), &three_province_registry()).unwrap_err();
        assert!(err.to_string().contains("b_hops"), "{err}");
    }

    #[test]
    fn macro_urban_exceeding_land_rejected() {
        let content =
            "province,year,population,gdp_pc,urban_area,land_area,trade\nBJ,2014,2000,50000,20000,16000,100000\n";
        let file = write_temp(content);
        let err = ingest_macro(file.path(), &three_province_registry()).unwrap_err();
        assert!(err.to_string().contains("urban area"), "{err}");
    }

    #[test]
    fn rail_complete_coverage_and_flags() {
        let content = "i,j,connected_year\nBJ,SD,2008\nBJ,SH,\nSD,SH,2011\n";
        let file = write_temp(content);
        let reg = three_province_registry();
        let rail = ingest_rail(file.path(), &reg).unwrap();
        let bj = reg.index_of("BJ").unwrap();
        let sd = reg.index_of("SD").unwrap();
        let sh = reg.index_of("SH").unwrap();
        assert!(rail.is_treated(bj, sd));
        assert!(!rail.is_treated(bj, sh));
        assert!(rail.is_treated(sh, sd));
        assert_eq!(rail.n_treated_pairs(), 2);
    }

    #[test]
    fn rail_missing_pair_is_hard_error() {
        let content = "i,j,connected_year\nBJ,SD,2008\n";
        let file = write_temp(content);
        let err = ingest_rail(file.path(), &three_province_registry()).unwrap_err();
        assert!(err.to_string().contains("missing rail pair"), "{err}");
    }
}
