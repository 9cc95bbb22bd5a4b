//! Price and CDS-spread ingestion, rescaling, yearly partitioning, and
//! result tables.
//!
//! Prices enter as `symbol,date,price` CSVs and leave as log-levels of the
//! price rescaled by its arithmetic mean over the observation window, so a
//! calibration never sees the currency unit. CDS spreads enter as
//! `symbol,date,spread_bps` and are reduced to annual means. All numeric
//! output is written with 17 significant digits, which round-trips every
//! double bit-exactly.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

/// Errors raised by file ingestion and table writing.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {path}:{line}: {msg}")]
    Parse { path: String, line: u64, msg: String },
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, DataError>;

fn csv_err(path: &Path, e: csv::Error) -> DataError {
    let line = e.position().map_or(0, csv::Position::line);
    let msg = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(source) => DataError::Io {
            path: path.display().to_string(),
            source,
        },
        _ => DataError::Parse {
            path: path.display().to_string(),
            line,
            msg,
        },
    }
}

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> DataError {
    DataError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// ISO-8601 calendar day `YYYY-MM-DD` with plausible month and day fields.
fn valid_date(d: &str) -> bool {
    let b = d.as_bytes();
    let digits = |range: std::ops::Range<usize>| b[range].iter().all(u8::is_ascii_digit);
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' || !digits(0..4) || !digits(5..7) || !digits(8..10)
    {
        return false;
    }
    let month: u32 = d[5..7].parse().unwrap_or(0);
    let day: u32 = d[8..10].parse().unwrap_or(0);
    (1..=12).contains(&month) && (1..=31).contains(&day)
}

fn date_year(d: &str) -> i32 {
    d[..4].parse().expect("dates validated on load")
}

/// A price history reduced to dimensionless log-levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketSeries {
    pub symbol: String,
    /// Strictly increasing ISO-8601 days.
    pub dates: Vec<String>,
    /// ln(price / rescale_factor).
    pub y: Vec<f64>,
    /// Arithmetic mean price over the window; 1 for an empty series.
    pub rescale_factor: f64,
}

/// A daily CDS-spread history with its annual means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdsSeries {
    pub symbol: String,
    pub dates: Vec<String>,
    pub spread_bps: Vec<f64>,
    /// (year, arithmetic mean of that year's daily spreads), sorted by year.
    pub annual_means: Vec<(i32, f64)>,
}

/// One calendar year of a market series, re-rescaled by that year's mean so
/// each calibration window is dimensionless on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearPartition {
    pub year: i32,
    pub series: MarketSeries,
    /// Fewer than two observations: no transition to calibrate on.
    pub too_short: bool,
}

/// Reads `symbol,date,price` rows, keeps the rows of `symbol`, sorts them by
/// date, and rescales by the window mean. Duplicate dates and non-positive
/// prices are data errors; malformed rows carry their line number.
pub fn load_prices(path: impl AsRef<Path>, symbol: &str) -> Result<MarketSeries> {
    let path = path.as_ref();
    let rows = read_rows(path, &["symbol", "date", "price"])?;
    let mut kept: Vec<(String, f64)> = Vec::new();
    for (line, record) in rows {
        if &record[0] != symbol {
            continue;
        }
        let date = validate_row_date(path, line, &record[1])?;
        let price: f64 = record[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line, format!("invalid price {:?}", &record[2])))?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(DataError::Data(format!(
                "non-positive price {price} for {symbol} on {date}"
            )));
        }
        kept.push((date, price));
    }
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = kept.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(DataError::Data(format!(
            "duplicate date {} for {symbol}",
            w[0].0
        )));
    }
    let rescale_factor = if kept.is_empty() {
        1.0
    } else {
        kept.iter().map(|(_, p)| p).sum::<f64>() / kept.len() as f64
    };
    Ok(MarketSeries {
        symbol: symbol.to_string(),
        y: kept.iter().map(|(_, p)| (p / rescale_factor).ln()).collect(),
        dates: kept.into_iter().map(|(d, _)| d).collect(),
        rescale_factor,
    })
}

/// Distinct symbols appearing in a `symbol,date,price` file, sorted.
pub fn list_symbols(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let rows = read_rows(path.as_ref(), &["symbol", "date", "price"])?;
    let mut symbols: Vec<String> = rows.iter().map(|(_, r)| r[0].to_string()).collect();
    symbols.sort();
    symbols.dedup();
    Ok(symbols)
}

/// Reads `symbol,date,spread_bps` rows for `symbol` and computes annual mean
/// spreads. An empty file yields an empty series.
pub fn load_cds(path: impl AsRef<Path>, symbol: &str) -> Result<CdsSeries> {
    let path = path.as_ref();
    let rows = read_rows(path, &["symbol", "date", "spread_bps"])?;
    let mut kept: Vec<(String, f64)> = Vec::new();
    for (line, record) in rows {
        if &record[0] != symbol {
            continue;
        }
        let date = validate_row_date(path, line, &record[1])?;
        let spread: f64 = record[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line, format!("invalid spread {:?}", &record[2])))?;
        if !(spread >= 0.0 && spread.is_finite()) {
            return Err(DataError::Data(format!(
                "negative spread {spread} bps for {symbol} on {date}"
            )));
        }
        kept.push((date, spread));
    }
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = kept.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(DataError::Data(format!(
            "duplicate date {} for {symbol}",
            w[0].0
        )));
    }
    let mut annual: Vec<(i32, f64, usize)> = Vec::new();
    for (date, spread) in &kept {
        let year = date_year(date);
        match annual.last_mut() {
            Some((y, sum, n)) if *y == year => {
                *sum += spread;
                *n += 1;
            }
            _ => annual.push((year, *spread, 1)),
        }
    }
    Ok(CdsSeries {
        symbol: symbol.to_string(),
        annual_means: annual
            .into_iter()
            .map(|(y, sum, n)| (y, sum / n as f64))
            .collect(),
        spread_bps: kept.iter().map(|(_, s)| *s).collect(),
        dates: kept.into_iter().map(|(d, _)| d).collect(),
    })
}

/// Splits a series into calendar years and re-rescales each year by its own
/// mean raw price, so per-year calibrations stay dimensionless. Years with a
/// single observation are flagged too short to calibrate.
pub fn partition_by_year(series: &MarketSeries) -> Vec<YearPartition> {
    let mut out: Vec<YearPartition> = Vec::new();
    let mut start = 0usize;
    while start < series.dates.len() {
        let year = date_year(&series.dates[start]);
        let mut end = start;
        while end < series.dates.len() && date_year(&series.dates[end]) == year {
            end += 1;
        }
        let raw: Vec<f64> = series.y[start..end]
            .iter()
            .map(|y| series.rescale_factor * y.exp())
            .collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        out.push(YearPartition {
            year,
            series: MarketSeries {
                symbol: series.symbol.clone(),
                dates: series.dates[start..end].to_vec(),
                y: raw.iter().map(|p| (p / mean).ln()).collect(),
                rescale_factor: mean,
            },
            too_short: end - start < 2,
        });
        start = end;
    }
    out
}

/// Parses a headed CSV into (line, record) pairs, enforcing the header.
fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    {
        let got = reader.headers().map_err(|e| csv_err(path, e))?;
        let matches = got.len() == header.len() && got.iter().zip(header).all(|(a, b)| a == *b);
        // An entirely empty file has an empty header and no rows: accepted.
        if !matches && !(got.len() <= 1 && got.iter().all(str::is_empty)) {
            return Err(parse_err(
                path,
                1,
                format!("expected header {}, got {got:?}", header.join(",")),
            ));
        }
    }
    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, csv::Position::line);
        if record.len() != header.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, got {}", header.len(), record.len()),
            ));
        }
        rows.push((line, record));
    }
    Ok(rows)
}

fn validate_row_date(path: &Path, line: u64, date: &str) -> Result<String> {
    if !valid_date(date) {
        return Err(parse_err(
            path,
            line,
            format!("invalid ISO-8601 date {date:?}"),
        ));
    }
    Ok(date.to_string())
}

/// One row of calibration.csv.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub symbol: String,
    pub year: i32,
    pub theta: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub g: f64,
    pub nll_gbm: f64,
    pub nll_qed: f64,
    pub kramers_rate: Option<f64>,
    pub model_spread_bps: Option<f64>,
    pub observed_mean_spread_bps: Option<f64>,
    pub converged: bool,
}

/// One row of rates.csv; rate columns stay empty where no barrier exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatesRow {
    pub theta: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub g: f64,
    pub barrier_height: Option<f64>,
    pub kramers_rate: Option<f64>,
    pub spread_bps: Option<f64>,
}

/// 17 significant digits: enough to reproduce any double bit-exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn parse_f64(path: &Path, line: u64, field: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid number {field:?}")))
}

fn parse_opt(path: &Path, line: u64, field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_f64(path, line, field).map(Some)
    }
}

const CALIBRATION_HEADER: [&str; 12] = [
    "symbol",
    "year",
    "theta",
    "sigma",
    "kappa",
    "g",
    "nll_gbm",
    "nll_qed",
    "kramers_rate",
    "model_spread_bps",
    "observed_mean_spread_bps",
    "converged",
];

pub fn write_calibration_csv(path: impl AsRef<Path>, rows: &[CalibrationRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(CALIBRATION_HEADER)
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.symbol.clone(),
            r.year.to_string(),
            fmt_f64(r.theta),
            fmt_f64(r.sigma),
            fmt_f64(r.kappa),
            fmt_f64(r.g),
            fmt_f64(r.nll_gbm),
            fmt_f64(r.nll_qed),
            fmt_opt(r.kramers_rate),
            fmt_opt(r.model_spread_bps),
            fmt_opt(r.observed_mean_spread_bps),
            r.converged.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn read_calibration_csv(path: impl AsRef<Path>) -> Result<Vec<CalibrationRow>> {
    let path = path.as_ref();
    let rows = read_rows(path, &CALIBRATION_HEADER)?;
    rows.into_iter()
        .map(|(line, r)| {
            Ok(CalibrationRow {
                symbol: r[0].to_string(),
                year: r[1]
                    .parse()
                    .map_err(|_| parse_err(path, line, format!("invalid year {:?}", &r[1])))?,
                theta: parse_f64(path, line, &r[2])?,
                sigma: parse_f64(path, line, &r[3])?,
                kappa: parse_f64(path, line, &r[4])?,
                g: parse_f64(path, line, &r[5])?,
                nll_gbm: parse_f64(path, line, &r[6])?,
                nll_qed: parse_f64(path, line, &r[7])?,
                kramers_rate: parse_opt(path, line, &r[8])?,
                model_spread_bps: parse_opt(path, line, &r[9])?,
                observed_mean_spread_bps: parse_opt(path, line, &r[10])?,
                converged: r[11]
                    .parse()
                    .map_err(|_| parse_err(path, line, format!("invalid flag {:?}", &r[11])))?,
            })
        })
        .collect()
}

const RATES_HEADER: [&str; 7] = [
    "theta",
    "sigma",
    "kappa",
    "g",
    "barrier_height",
    "kramers_rate",
    "spread_bps",
];

pub fn write_rates_csv(path: impl AsRef<Path>, rows: &[RatesRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(RATES_HEADER).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            fmt_f64(r.theta),
            fmt_f64(r.sigma),
            fmt_f64(r.kappa),
            fmt_f64(r.g),
            fmt_opt(r.barrier_height),
            fmt_opt(r.kramers_rate),
            fmt_opt(r.spread_bps),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn read_rates_csv(path: impl AsRef<Path>) -> Result<Vec<RatesRow>> {
    let path = path.as_ref();
    let rows = read_rows(path, &RATES_HEADER)?;
    rows.into_iter()
        .map(|(line, r)| {
            Ok(RatesRow {
                theta: parse_f64(path, line, &r[0])?,
                sigma: parse_f64(path, line, &r[1])?,
                kappa: parse_f64(path, line, &r[2])?,
                g: parse_f64(path, line, &r[3])?,
                barrier_height: parse_opt(path, line, &r[4])?,
                kramers_rate: parse_opt(path, line, &r[5])?,
                spread_bps: parse_opt(path, line, &r[6])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn constant_prices_rescale_to_zero_log_levels() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nAXP,2010-01-04,42.0\nAXP,2010-01-05,42.0\nAXP,2010-01-06,42.0\n",
        );
        let s = load_prices(&p, "AXP").unwrap();
        assert_eq!(s.rescale_factor, 42.0);
        assert!(s.y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn list_symbols_dedupes_and_sorts() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nBA,2010-01-04,70\nAXP,2010-01-04,42\nBA,2010-01-05,71\n",
        );
        assert_eq!(list_symbols(&p).unwrap(), vec!["AXP", "BA"]);
    }

    #[test]
    fn two_day_window_rescales_by_the_mean() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nAXP,2010-01-04,100\nAXP,2010-01-05,110\n",
        );
        let s = load_prices(&p, "AXP").unwrap();
        assert_eq!(s.rescale_factor, 105.0);
        assert_eq!(s.y[0], (100.0f64 / 105.0).ln());
        assert_eq!(s.y[1], (110.0f64 / 105.0).ln());
    }

    #[test]
    fn rows_are_filtered_and_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nIBM,2010-01-04,1\nAXP,2010-01-06,103\nAXP,2010-01-04,101\nIBM,2010-01-05,2\nAXP,2010-01-05,102\n",
        );
        let s = load_prices(&p, "AXP").unwrap();
        assert_eq!(s.dates, ["2010-01-04", "2010-01-05", "2010-01-06"]);
        assert_eq!(s.rescale_factor, 102.0);
    }

    #[test]
    fn duplicate_dates_error_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nAXP,2010-01-04,100\nAXP,2010-01-04,101\n",
        );
        let e1 = load_prices(&p, "AXP").unwrap_err().to_string();
        let e2 = load_prices(&p, "AXP").unwrap_err().to_string();
        assert!(e1.contains("2010-01-04"), "{e1}");
        assert_eq!(e1, e2);
    }

    #[test]
    fn malformed_rows_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nAXP,2010-01-04,100\nAXP,2010-01-05,oops\n",
        );
        let e = load_prices(&p, "AXP").unwrap_err().to_string();
        assert!(e.contains(":3:"), "{e}");
        let bad_date = write_file(
            &dir,
            "d.csv",
            "symbol,date,price\nAXP,Jan 4 2010,100\n",
        );
        let e = load_prices(&bad_date, "AXP").unwrap_err().to_string();
        assert!(e.contains(":2:") && e.contains("date"), "{e}");
        let bad_header = write_file(&dir, "h.csv", "sym,day,px\nAXP,2010-01-04,100\n");
        assert!(load_prices(&bad_header, "AXP").is_err());
    }

    #[test]
    fn non_positive_prices_are_data_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nAXP,2010-01-04,0.0\n",
        );
        assert!(matches!(
            load_prices(&p, "AXP").unwrap_err(),
            DataError::Data(_)
        ));
    }

    #[test]
    fn cds_annual_means() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "c.csv",
            "symbol,date,spread_bps\nAXP,2010-03-01,40\nAXP,2010-09-01,60\nAXP,2011-01-03,93.883\n",
        );
        let s = load_cds(&p, "AXP").unwrap();
        assert_eq!(s.annual_means, [(2010, 50.0), (2011, 93.883)]);

        let empty = write_file(&dir, "e.csv", "");
        let s = load_cds(&empty, "AXP").unwrap();
        assert!(s.dates.is_empty() && s.annual_means.is_empty());

        let neg = write_file(&dir, "n.csv", "symbol,date,spread_bps\nAXP,2010-01-04,-5\n");
        assert!(matches!(load_cds(&neg, "AXP").unwrap_err(), DataError::Data(_)));
    }

    #[test]
    fn partitions_split_years_and_rescale_each() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "p.csv",
            "symbol,date,price\nAXP,2010-01-04,100\nAXP,2010-01-05,110\nAXP,2010-01-06,120\nAXP,2011-01-03,200\nAXP,2011-01-04,220\nAXP,2012-01-02,7\n",
        );
        let s = load_prices(&p, "AXP").unwrap();
        let parts = partition_by_year(&s);
        assert_eq!(parts.len(), 3);
        assert_eq!(
            parts.iter().map(|p| p.year).collect::<Vec<_>>(),
            [2010, 2011, 2012]
        );
        // Each partition is rescaled by its own mean.
        assert!((parts[0].series.rescale_factor - 110.0).abs() < 1e-12);
        assert!((parts[1].series.rescale_factor - 210.0).abs() < 1e-12);
        let mean_one: f64 =
            parts[1].series.y.iter().map(|y| y.exp()).sum::<f64>() / 2.0;
        assert!((mean_one - 1.0).abs() < 1e-15);
        assert!(!parts[0].too_short && !parts[1].too_short);
        assert!(parts[2].too_short, "single-observation year");
    }

    #[test]
    fn rescaling_is_invariant_to_price_units() {
        let dir = tempfile::tempdir().unwrap();
        let base = "symbol,date,price\nAXP,2010-01-04,100\nAXP,2010-01-05,110\nAXP,2011-01-03,130\nAXP,2011-01-04,90\n";
        let p1 = write_file(&dir, "p1.csv", base);
        // A dyadic unit change is exact in floating point.
        let scaled: String = base
            .lines()
            .enumerate()
            .map(|(i, l)| {
                if i == 0 {
                    l.to_string() + "\n"
                } else {
                    let mut f: Vec<&str> = l.split(',').collect();
                    let px: f64 = f[2].parse().unwrap();
                    let scaled = format!("{}", px * 4.0);
                    f[2] = &scaled;
                    f.join(",") + "\n"
                }
            })
            .collect();
        let p2 = write_file(&dir, "p2.csv", &scaled);
        let a = load_prices(&p1, "AXP").unwrap();
        let b = load_prices(&p2, "AXP").unwrap();
        assert_eq!(a.y, b.y, "log-levels are unit-free");
        assert_eq!(b.rescale_factor, 4.0 * a.rescale_factor);
        for (pa, pb) in partition_by_year(&a).iter().zip(partition_by_year(&b).iter()) {
            assert_eq!(pa.series.y, pb.series.y);
        }
    }

    #[test]
    fn calibration_csv_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            CalibrationRow {
                symbol: "AXP".into(),
                year: 2010,
                theta: -1.6485,
                sigma: 0.0318,
                kappa: -4.9464,
                g: 3.7041,
                nll_gbm: -878.739,
                nll_qed: -882.301,
                kramers_rate: Some(1.566473309e-2),
                model_spread_bps: Some(93.98839855708883),
                observed_mean_spread_bps: Some(93.883),
                converged: true,
            },
        ];
        let path = dir.path().join("calibration.csv");
        write_calibration_csv(&path, &rows).unwrap();
        let again = read_calibration_csv(&path).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn rates_csv_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            RatesRow {
                theta: 0.1 + 0.2,
                sigma: 1.0 / 3.0,
                kappa: -std::f64::consts::PI,
                g: f64::MIN_POSITIVE,
                barrier_height: Some(5.685281944005469e-2),
                kramers_rate: Some(3.82136531582472e-4),
                spread_bps: None,
            },
            RatesRow {
                theta: -1.0,
                sigma: 0.25,
                kappa: 2.0,
                g: 0.0,
                barrier_height: None,
                kramers_rate: None,
                spread_bps: None,
            },
        ];
        let path = dir.path().join("rates.csv");
        write_rates_csv(&path, &rows).unwrap();
        let again = read_rates_csv(&path).unwrap();
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!(a.theta.to_bits(), b.theta.to_bits());
            assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
            assert_eq!(a.kappa.to_bits(), b.kappa.to_bits());
            assert_eq!(a.g.to_bits(), b.g.to_bits());
            assert_eq!(a.barrier_height.map(f64::to_bits), b.barrier_height.map(f64::to_bits));
            assert_eq!(a.kramers_rate.map(f64::to_bits), b.kramers_rate.map(f64::to_bits));
            assert_eq!(a.spread_bps, b.spread_bps);
        }
    }
}
