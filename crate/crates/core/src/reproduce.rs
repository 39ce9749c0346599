//! Reference datasets for the cost-comparison figures, in one fixed CSV
//! schema shared by every sweep.
//!
//! Columns that do not apply to a row are left empty. `method` says where the
//! number came from: `analytic` (closed form), `search` (resource solver),
//! `search-failed`, `asymptotic`, `capacity-scan`, `ratio` / `ratio-relaxed`
//! (baseline over collective copies, with integer and with continuous copy
//! counts), or `monte-carlo`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{
    copies_required, failure_probability, single_copy_copies, subspace_asymptotic_copies, EMBED_SEARCH_MAX_N,
};
use crate::error::{domain, Error, Result};
use crate::model::NoiseModel;
use crate::protocol::{MonteCarloEstimate, Strategy, StrategySpec};

/// Fixed CSV header.
pub const HEADER: [&str; 14] = [
    "strategy",
    "F",
    "n",
    "m",
    "m_embed",
    "delta",
    "copies_consumed",
    "ebits_consumed",
    "method",
    "trials",
    "estimate",
    "ci_low",
    "ci_high",
    "seed",
];

/// Default target failure probability of the sweeps.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Default fidelity grid: `0.50, 0.55, …, 0.95, 0.99`.
pub fn default_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (10..=19).map(|k| (5 * k) as f64 / 100.0).collect();
    grid.push(0.99);
    grid
}

/// One CSV row.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub strategy: String,
    #[serde(rename = "F")]
    pub fidelity: f64,
    pub n: Option<u64>,
    pub m: Option<u32>,
    pub m_embed: Option<u32>,
    pub delta: Option<f64>,
    pub copies_consumed: Option<u64>,
    pub ebits_consumed: Option<f64>,
    pub method: String,
    pub trials: Option<u64>,
    pub estimate: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub seed: Option<u64>,
}

impl Record {
    fn new(strategy: Strategy, fidelity: f64, method: &str) -> Self {
        Record {
            strategy: strategy.name().to_string(),
            fidelity,
            m: strategy.rounds(),
            m_embed: strategy.embedded(),
            method: method.to_string(),
            ..Default::default()
        }
    }

    /// Row for an evaluated strategy.
    pub fn evaluated(spec: &StrategySpec, fidelity: f64, delta: f64, method: &str) -> Self {
        Record {
            n: Some(spec.n),
            delta: Some(delta),
            copies_consumed: Some(spec.copies_consumed()),
            ebits_consumed: Some(spec.ebits_consumed()),
            ..Record::new(spec.strategy, fidelity, method)
        }
    }

    /// Row for a Monte Carlo estimate.
    pub fn monte_carlo(spec: &StrategySpec, fidelity: f64, est: &MonteCarloEstimate, seed: u64) -> Self {
        Record {
            n: Some(spec.n),
            copies_consumed: Some(spec.copies_consumed()),
            ebits_consumed: Some(spec.ebits_consumed()),
            trials: Some(est.trials),
            estimate: Some(est.estimate),
            ci_low: Some(est.ci_low),
            ci_high: Some(est.ci_high),
            seed: Some(seed),
            ..Record::new(spec.strategy, fidelity, "monte-carlo")
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Resource(format!("csv: {e}"))
}

/// Writes `records` with the fixed header.
pub fn write_csv<W: Write>(out: W, records: &[Record]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER).map_err(csv_error)?;
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Resource(format!("csv: {e}")))
}

/// Renders `records` as CSV text.
pub fn to_csv_string(records: &[Record]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Parses a CSV with the fixed header; any other header, or no rows, is a
/// domain error.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| Error::Domain(format!("malformed CSV: {e}")))?;
    if header.iter().ne(HEADER) {
        return domain(format!("unexpected CSV header: {}", header.iter().collect::<Vec<_>>().join(",")));
    }
    let records = r
        .deserialize()
        .collect::<std::result::Result<Vec<Record>, _>>()
        .map_err(|e| Error::Domain(format!("malformed CSV: {e}")))?;
    if records.is_empty() {
        return domain("CSV has no rows");
    }
    Ok(records)
}

/// Figure datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Copies consumed vs fidelity for rank-2 ensembles.
    Fig2a,
    /// Failure probability vs fidelity at nine copies consumed (Werner).
    Fig2b,
    /// Ratio panels, embedded-vs-global comparison and noisy-register curves.
    AppC,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2a" => Ok(Figure::Fig2a),
            "2b" => Ok(Figure::Fig2b),
            "app-c" | "appc" => Ok(Figure::AppC),
            other => domain(format!("unknown figure {other} (expected 2a, 2b or app-c)")),
        }
    }
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::Fig2a, Figure::Fig2b, Figure::AppC];

    /// Datasets of the figure as `(file name, rows)`.
    pub fn datasets(&self, grid: &[f64], delta: f64) -> Result<Vec<(String, Vec<Record>)>> {
        Ok(match self {
            Figure::Fig2a => vec![("fig2a.csv".into(), fig2a(grid, delta)?)],
            Figure::Fig2b => vec![("fig2b.csv".into(), fig2b(grid)?)],
            Figure::AppC => vec![
                ("appc_a.csv".into(), appc_a(grid, delta)?),
                ("appc_b.csv".into(), appc_b(grid, delta)?),
                ("appc_c.csv".into(), appc_c(grid, delta)?),
                ("appc_d.csv".into(), appc_d()?),
            ],
        })
    }
}

fn search_row(strategy: Strategy, fidelity: f64, delta: f64) -> Result<Record> {
    let r = copies_required(strategy, fidelity, delta)?;
    Ok(Record::evaluated(&StrategySpec::new(r.strategy, r.n)?, fidelity, r.delta, "search"))
}

/// As [`search_row`], but a failed search becomes a `search-failed` row with
/// empty counts.
fn search_row_or_failed(strategy: Strategy, fidelity: f64, delta: f64) -> Result<Record> {
    match search_row(strategy, fidelity, delta) {
        Err(Error::SearchFailed(_)) => Ok(Record { m_embed: None, ..Record::new(strategy, fidelity, "search-failed") }),
        other => other,
    }
}

/// Rank-2 copies consumed at target `delta`: single-copy baseline, collective
/// full readout and the asymptotic subspace count.
pub fn fig2a(grid: &[f64], delta: f64) -> Result<Vec<Record>> {
    let m = subspace_asymptotic_copies(delta)?;
    let mut rows = Vec::new();
    for &f in grid {
        rows.push(search_row(Strategy::SingleCopyBaseline, f, delta)?);
        rows.push(search_row(Strategy::Rank2Full, f, delta)?);
        rows.push(Record {
            delta: Some(0.5f64.powi(m as i32)),
            copies_consumed: Some(m as u64),
            ebits_consumed: Some(m as f64),
            ..Record::new(Strategy::Rank2Subspace { rounds: m }, f, "asymptotic")
        });
    }
    Ok(rows)
}

/// Copies consumed by the collective strategy in [`fig2b`].
pub const FIG2B_COPIES: u32 = 9;

/// Werner failure probability at nine copies consumed: single-copy on nine
/// copies, and the full-readout ENG with pure and with embedded registers on
/// `2^9 - 1` copies.
pub fn fig2b(grid: &[f64]) -> Result<Vec<Record>> {
    let k = FIG2B_COPIES;
    let n = (1u64 << k) - 1;
    let mut rows = Vec::new();
    for &f in grid {
        let noise = NoiseModel::werner(f)?;
        for spec in [
            StrategySpec::new(Strategy::SingleCopyBaseline, k as u64)?,
            StrategySpec::new(Strategy::WernerFull, n)?,
            StrategySpec::new(Strategy::EmbedEng { embedded: k }, n)?,
        ] {
            rows.push(Record::evaluated(&spec, f, failure_probability(&spec, &noise)?, "analytic"));
        }
    }
    Ok(rows)
}

/// `x / ⌈log2(x + 1)⌉` with `x = ln δ / ln F` taken as a real number.
pub fn relaxed_ratio(fidelity: f64, delta: f64) -> Result<f64> {
    if !(fidelity > 0.0 && fidelity < 1.0) {
        return domain(format!("relaxed ratio needs F in (0, 1), got {fidelity}"));
    }
    let x = delta.ln() / fidelity.ln();
    Ok(x / (x + 1.0).log2())
}

/// Rank-2 ratio of baseline to collective copies.
pub fn appc_a(grid: &[f64], delta: f64) -> Result<Vec<Record>> {
    let mut rows = Vec::new();
    for &f in grid {
        let base = copies_required(Strategy::SingleCopyBaseline, f, delta)?;
        let coll = copies_required(Strategy::Rank2Full, f, delta)?;
        rows.push(search_row(Strategy::SingleCopyBaseline, f, delta)?);
        rows.push(search_row(Strategy::Rank2Full, f, delta)?);
        rows.push(Record {
            n: Some(coll.n),
            estimate: Some(base.copies_consumed as f64 / coll.copies_consumed as f64),
            ..Record::new(Strategy::Rank2Full, f, "ratio")
        });
        rows.push(Record {
            estimate: Some(relaxed_ratio(f, delta)?),
            ..Record::new(Strategy::Rank2Full, f, "ratio-relaxed")
        });
    }
    Ok(rows)
}

/// Largest copy count scanned by [`werner_capacity_scan`].
pub const CAPACITY_MAX_COPIES: u32 = 12;

/// Smallest copy count `k` at which a pure-register Werner strategy on the
/// largest ensemble it can certify (`n = 2^k - 1` for full readout; `k`
/// parity rounds on `n = 4095` for subspace readout) reaches `delta`.
pub fn werner_capacity_scan(subspace: bool, fidelity: f64, delta: f64) -> Result<(StrategySpec, f64)> {
    let noise = NoiseModel::werner(fidelity)?;
    for k in 1..=CAPACITY_MAX_COPIES {
        let spec = if subspace {
            StrategySpec::new(Strategy::WernerSubspace { rounds: k }, EMBED_SEARCH_MAX_N)?
        } else {
            StrategySpec::new(Strategy::WernerFull, (1u64 << k) - 1)?
        };
        let d = failure_probability(&spec, &noise)?;
        if d <= delta {
            return Ok((spec, d));
        }
    }
    Err(Error::SearchFailed(format!(
        "no Werner strategy reaches δ = {delta} at F = {fidelity} within {CAPACITY_MAX_COPIES} copies"
    )))
}

/// Werner ratio of baseline to collective copies, full and subspace readout.
pub fn appc_b(grid: &[f64], delta: f64) -> Result<Vec<Record>> {
    let mut rows = Vec::new();
    for &f in grid {
        let base = single_copy_copies(delta, f)?;
        let base_spec = StrategySpec::new(Strategy::SingleCopyBaseline, base)?;
        rows.push(Record::evaluated(&base_spec, f, f.powi(base as i32), "search"));
        for subspace in [false, true] {
            let (spec, d) = werner_capacity_scan(subspace, f, delta)?;
            rows.push(Record::evaluated(&spec, f, d, "capacity-scan"));
            rows.push(Record {
                n: Some(spec.n),
                estimate: Some(base as f64 / spec.copies_consumed() as f64),
                ..Record::new(spec.strategy, f, "ratio")
            });
        }
    }
    Ok(rows)
}

/// Embedded register: measured directly vs used as the ENG target.
pub fn appc_c(grid: &[f64], delta: f64) -> Result<Vec<Record>> {
    let mut rows = Vec::new();
    for &f in grid {
        rows.push(search_row_or_failed(Strategy::DirectEmbedMeasure { embedded: 1 }, f, delta)?);
        rows.push(search_row_or_failed(Strategy::EmbedEng { embedded: 1 }, f, delta)?);
    }
    Ok(rows)
}

/// Fidelities of [`appc_d`].
pub const APPC_D_FIDELITIES: [f64; 4] = [0.7, 0.8, 0.9, 0.95];

/// Werner failure probability vs copies consumed `k`, pure register
/// (`werner-full`) against the register embedded from the ensemble
/// (`embed-eng`), both on `n = 2^k - 1` copies.
pub fn appc_d() -> Result<Vec<Record>> {
    let mut rows = Vec::new();
    for f in APPC_D_FIDELITIES {
        let noise = NoiseModel::werner(f)?;
        for k in 1..=10u32 {
            let n = (1u64 << k) - 1;
            for spec in [
                StrategySpec::new(Strategy::WernerFull, n)?,
                StrategySpec::new(Strategy::EmbedEng { embedded: k }, n)?,
            ] {
                rows.push(Record::evaluated(&spec, f, failure_probability(&spec, &noise)?, "analytic"));
            }
        }
    }
    Ok(rows)
}

/// Writes every dataset of `figure` into `out_dir` and returns the paths.
pub fn reproduce(figure: Figure, out_dir: &Path, grid: &[f64], delta: f64) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::Resource(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut paths = Vec::new();
    for (name, rows) in figure.datasets(grid, delta)? {
        let path = out_dir.join(name);
        let file = fs::File::create(&path)
            .map_err(|e| Error::Resource(format!("cannot write {}: {e}", path.display())))?;
        write_csv(std::io::BufWriter::new(file), &rows)?;
        paths.push(path);
    }
    Ok(paths)
}
