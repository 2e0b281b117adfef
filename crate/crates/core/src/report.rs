//! Report tables behind the `expand`, `solve`, `count` and `compare` commands.
//!
//! Every table has a CSV and a JSON form and a parser for each. Floats are
//! written in shortest round-trip notation, so parsing a file reproduces the
//! table exactly. CSV files start with a `#` line carrying the run metadata.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::algebra::{GradedSeries, NCPolynomial, Word};
use crate::combinatorics::{
    bounded_partition_count, m0_count, partition_count, tree_count_product, tree_count_recurrence,
};
use crate::error::{Error, Result};
use crate::problem::{normalize_coefficients, rk4_oracle, shift_initial_value, ProblemConfig};
use crate::quadrature::{
    chen_fliess_terms, convergence_radius, empirical_divergence_onset, expansion_via_products,
    ControlGrid, RadiusReport,
};
use crate::series::{expand_general, SeriesDocument};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// Files written by a run and non-fatal warnings.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn parse_err(what: &str, detail: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {detail}"))
}

fn parse_field<T: FromStr>(what: &str, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| parse_err(what, format!("`{s}`: {e}")))
}

/// Serializes non-finite floats as `null`, read back as `+inf`.
mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|x| x.is_finite().then_some(*x))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let v = Vec::<Option<f64>>::deserialize(d)?;
        Ok(v.into_iter().map(|x| x.unwrap_or(f64::INFINITY)).collect())
    }
}

/// Shortest round-trip text for a float, in exponent form for extreme magnitudes.
fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// `# key=value ...` metadata line.
fn meta_line(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", body.join(" "))
}

/// Splits a CSV text into its metadata map and the remaining body.
fn split_meta(text: &str) -> Result<(BTreeMap<String, String>, &str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let line = first
        .strip_prefix('#')
        .ok_or_else(|| parse_err("csv", "missing `#` metadata line"))?;
    let mut meta = BTreeMap::new();
    for pair in line.split_whitespace() {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| parse_err("metadata", pair))?;
        meta.insert(k.to_string(), v.to_string());
    }
    Ok((meta, rest))
}

fn meta_get<T: FromStr>(meta: &BTreeMap<String, String>, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let v = meta
        .get(key)
        .ok_or_else(|| parse_err("metadata", format!("missing `{key}`")))?;
    parse_field(key, v)
}

fn csv_rows(body: &str) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader.records().collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}

fn column(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| parse_err("csv", format!("missing column `{name}`")))
}

fn read_text(mut r: impl Read) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

// ---------------------------------------------------------------- expand

/// `k,word,num,den` rows of a graded series, after a `# n=.. K=..` line.
pub fn write_series_csv(mut w: impl Write, n: usize, z: &GradedSeries) -> Result<()> {
    w.write_all(meta_line(&[("n", n.to_string()), ("K", z.order().to_string())]).as_bytes())?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "word", "num", "den"])?;
    for k in 1..=z.order() {
        for (word, c) in z.part(k).terms() {
            out.write_record([
                k.to_string(),
                word.to_string(),
                c.numer().to_string(),
                c.denom().to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_series_csv(r: impl Read) -> Result<(usize, GradedSeries)> {
    let text = read_text(r)?;
    let (meta, body) = split_meta(&text)?;
    let n: usize = meta_get(&meta, "n")?;
    let order: usize = meta_get(&meta, "K")?;
    let (header, rows) = csv_rows(body)?;
    let (ck, cw, cn, cd) = (
        column(&header, "k")?,
        column(&header, "word")?,
        column(&header, "num")?,
        column(&header, "den")?,
    );
    let mut parts = vec![NCPolynomial::zero(); order + 1];
    for row in &rows {
        let k: usize = parse_field("k", &row[ck])?;
        if k == 0 || k > order {
            return Err(parse_err("k", format!("{k} outside 1..={order}")));
        }
        let word: Word = parse_field("word", &row[cw])?;
        let num: num_bigint::BigInt = parse_field("num", &row[cn])?;
        let den: num_bigint::BigInt = parse_field("den", &row[cd])?;
        if den == num_bigint::BigInt::from(0) {
            return Err(parse_err("den", "zero denominator"));
        }
        parts[k].add_term(word, num_rational::BigRational::new(num, den));
    }
    let z = GradedSeries::new(parts)?;
    crate::algebra::Alphabet::new(n)?.validate(&z.to_polynomial())?;
    Ok((n, z))
}

pub fn run_expand(cfg: &ProblemConfig, out: &Path, format: Format) -> Result<RunSummary> {
    let spec = cfg.spec();
    let z = expand_general(&spec, cfg.order)?;
    std::fs::create_dir_all(out)?;
    let path = match format {
        Format::Json => {
            let path = out.join("series.json");
            std::fs::write(&path, SeriesDocument::from_series(cfg.n, &z).to_json()?)?;
            path
        }
        Format::Csv => {
            let path = out.join("series.csv");
            write_series_csv(File::create(&path)?, cfg.n, &z)?;
            path
        }
    };
    Ok(RunSummary {
        files: vec![path],
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------- solve

/// Per-grid-point expansion, reference solution and error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTable {
    pub n: usize,
    #[serde(rename = "K")]
    pub order: usize,
    pub x0: f64,
    #[serde(rename = "M")]
    pub bound: f64,
    pub radius: f64,
    pub t: Vec<f64>,
    /// `phi[k - 1]` is the column `phi_k`.
    pub phi: Vec<Vec<f64>>,
    /// `Σ_k phi_k`, the solution of the shifted problem `y(0) = 0`.
    pub partial_sum: Vec<f64>,
    /// `partial_sum + x0`.
    pub solution: Vec<f64>,
    #[serde(with = "inf_as_null")]
    pub remainder_bound: Vec<f64>,
    pub bound_valid: Vec<bool>,
    pub rk4_reference: Vec<f64>,
    pub abs_error: Vec<f64>,
}

impl SolveTable {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(
            meta_line(&[
                ("n", self.n.to_string()),
                ("K", self.order.to_string()),
                ("x0", fmt_f64(self.x0)),
                ("M", fmt_f64(self.bound)),
                ("radius", fmt_f64(self.radius)),
            ])
            .as_bytes(),
        )?;
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.order).map(|k| format!("phi_{k}")));
        header.extend(
            [
                "partial_sum",
                "solution",
                "remainder_bound",
                "bound_valid",
                "rk4_reference",
                "abs_error",
            ]
            .map(String::from),
        );
        out.write_record(&header)?;
        for j in 0..self.len() {
            let mut row = vec![fmt_f64(self.t[j])];
            row.extend(self.phi.iter().map(|p| fmt_f64(p[j])));
            row.push(fmt_f64(self.partial_sum[j]));
            row.push(fmt_f64(self.solution[j]));
            row.push(fmt_f64(self.remainder_bound[j]));
            row.push(self.bound_valid[j].to_string());
            row.push(fmt_f64(self.rk4_reference[j]));
            row.push(fmt_f64(self.abs_error[j]));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self> {
        let text = read_text(r)?;
        let (meta, body) = split_meta(&text)?;
        let order: usize = meta_get(&meta, "K")?;
        let (header, rows) = csv_rows(body)?;
        let floats = |name: &str| -> Result<Vec<f64>> {
            let c = column(&header, name)?;
            rows.iter().map(|r| parse_field(name, &r[c])).collect()
        };
        let phi = (1..=order)
            .map(|k| floats(&format!("phi_{k}")))
            .collect::<Result<_>>()?;
        let valid_col = column(&header, "bound_valid")?;
        Ok(Self {
            n: meta_get(&meta, "n")?,
            order,
            x0: meta_get(&meta, "x0")?,
            bound: meta_get(&meta, "M")?,
            radius: meta_get(&meta, "radius")?,
            t: floats("t")?,
            phi,
            partial_sum: floats("partial_sum")?,
            solution: floats("solution")?,
            remainder_bound: floats("remainder_bound")?,
            bound_valid: rows
                .iter()
                .map(|r| parse_field("bound_valid", &r[valid_col]))
                .collect::<Result<_>>()?,
            rk4_reference: floats("rk4_reference")?,
            abs_error: floats("abs_error")?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Shifted and normalized problem ready for evaluation.
struct Prepared {
    grid: ControlGrid,
    radius: RadiusReport,
    warnings: Vec<String>,
}

fn prepare(cfg: &ProblemConfig) -> Result<(ProblemConfig, Prepared)> {
    let shifted = shift_initial_value(cfg)?;
    let (spec, grid) = normalize_coefficients(&shifted)?;
    let radius = convergence_radius(&spec, grid.bound(), grid.horizon());
    let mut warnings = Vec::new();
    if !radius.is_certified(grid.horizon()) {
        warnings.push(format!(
            "remainder bound is certified only for t < {} (n = {}, M = {}); points beyond are flagged invalid",
            radius.radius,
            spec.n,
            grid.bound()
        ));
    }
    Ok((
        shifted,
        Prepared {
            grid,
            radius,
            warnings,
        },
    ))
}

pub fn solve_table(cfg: &ProblemConfig) -> Result<(SolveTable, Vec<String>)> {
    let (shifted, prep) = prepare(cfg)?;
    let table = expansion_via_products(&shifted.spec(), &prep.grid, cfg.order)?;
    let rk4 = rk4_oracle(cfg)?;
    let solution: Vec<f64> = table.partial.iter().map(|y| y + cfg.x0).collect();
    let abs_error = solution.iter().zip(&rk4).map(|(a, b)| (a - b).abs()).collect();
    let mut warnings = prep.warnings;
    if let Some(t) = empirical_divergence_onset(&table) {
        warnings.push(format!("highest orders stop decreasing near t = {t}"));
    }
    Ok((
        SolveTable {
            n: cfg.n,
            order: cfg.order,
            x0: cfg.x0,
            bound: prep.grid.bound(),
            radius: prep.radius.radius,
            t: table.times.clone(),
            bound_valid: prep.radius.flags(&table.times),
            phi: table.phi,
            partial_sum: table.partial,
            solution,
            remainder_bound: table.bound,
            rk4_reference: rk4,
            abs_error,
        },
        warnings,
    ))
}

pub fn run_solve(cfg: &ProblemConfig, out: &Path, format: Format) -> Result<RunSummary> {
    let (table, warnings) = solve_table(cfg)?;
    std::fs::create_dir_all(out)?;
    let path = match format {
        Format::Csv => {
            let path = out.join("solve.csv");
            table.write_csv(File::create(&path)?)?;
            path
        }
        Format::Json => {
            let path = out.join("solve.json");
            std::fs::write(&path, table.to_json()?)?;
            path
        }
    };
    Ok(RunSummary {
        files: vec![path],
        warnings,
    })
}

// ---------------------------------------------------------------- count

/// One order of the combinatorial table. Counts are exact integers; the
/// table starts at `k = 0`, where the only tree is the bare root and `Z_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub k: usize,
    pub tree_product: BigUint,
    /// Absent for `n = 0`, where the recurrence is not defined.
    pub tree_recurrence: Option<BigUint>,
    pub word_norm: BigUint,
    pub partitions: BigUint,
    pub bounded_partitions: BigUint,
    pub m0_size: BigUint,
}

const COUNT_COLUMNS: [&str; 7] = [
    "k",
    "tree_product",
    "tree_recurrence",
    "word_norm",
    "partitions",
    "bounded_partitions",
    "M0_size",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub n: usize,
    pub rows: Vec<CountRow>,
}

impl CountTable {
    pub fn build(n: usize, order: usize, guard: usize) -> Result<Self> {
        let spec = crate::series::EquationSpec::new(n).with_guard(guard);
        let z = expand_general(&spec, order)?;
        let recurrence = if n == 0 {
            None
        } else {
            Some(tree_count_recurrence(n, order)?)
        };
        let rows = (0..=order)
            .map(|k| {
                let norm = if k == 0 { Default::default() } else { z.part(k).word_norm() };
                Ok(CountRow {
                    k,
                    tree_product: tree_count_product(n, k),
                    tree_recurrence: recurrence.as_ref().map(|r| r.counts[k].clone()),
                    word_norm: crate::algebra::coeff_to_biguint(&norm)
                        .ok_or_else(|| parse_err("word norm", norm))?,
                    partitions: partition_count(k),
                    bounded_partitions: bounded_partition_count(k, n),
                    m0_size: m0_count(k, n),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { n, rows })
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(meta_line(&[("n", self.n.to_string())]).as_bytes())?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(COUNT_COLUMNS)?;
        for r in &self.rows {
            out.write_record([
                r.k.to_string(),
                r.tree_product.to_string(),
                r.tree_recurrence.as_ref().map(ToString::to_string).unwrap_or_default(),
                r.word_norm.to_string(),
                r.partitions.to_string(),
                r.bounded_partitions.to_string(),
                r.m0_size.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self> {
        let text = read_text(r)?;
        let (meta, body) = split_meta(&text)?;
        let (header, rows) = csv_rows(body)?;
        let cols: Vec<usize> = COUNT_COLUMNS
            .iter()
            .map(|c| column(&header, c))
            .collect::<Result<_>>()?;
        let rows = rows
            .iter()
            .map(|r| {
                let big = |i: usize| parse_field::<BigUint>(COUNT_COLUMNS[i], &r[cols[i]]);
                Ok(CountRow {
                    k: parse_field("k", &r[cols[0]])?,
                    tree_product: big(1)?,
                    tree_recurrence: if r[cols[2]].is_empty() { None } else { Some(big(2)?) },
                    word_norm: big(3)?,
                    partitions: big(4)?,
                    bounded_partitions: big(5)?,
                    m0_size: big(6)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            n: meta_get(&meta, "n")?,
            rows,
        })
    }

    /// Counts are emitted as exact JSON integers.
    pub fn to_json(&self) -> Result<String> {
        let num = |b: &BigUint| -> Result<serde_json::Value> {
            Ok(serde_json::Value::Number(
                serde_json::Number::from_str(&b.to_string()).map_err(|e| parse_err("count", e))?,
            ))
        };
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Ok(serde_json::json!({
                    "k": r.k,
                    "tree_product": num(&r.tree_product)?,
                    "tree_recurrence": r.tree_recurrence.as_ref().map(num).transpose()?,
                    "word_norm": num(&r.word_norm)?,
                    "partitions": num(&r.partitions)?,
                    "bounded_partitions": num(&r.bounded_partitions)?,
                    "M0_size": num(&r.m0_size)?,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string_pretty(
            &serde_json::json!({ "n": self.n, "rows": rows }),
        )?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        let int = |v: &serde_json::Value, key: &str| -> Result<BigUint> {
            match &v[key] {
                serde_json::Value::Number(x) => parse_field(key, &x.to_string()),
                other => Err(parse_err(key, other)),
            }
        };
        let n = v["n"].as_u64().ok_or_else(|| parse_err("n", &v["n"]))? as usize;
        let rows = v["rows"]
            .as_array()
            .ok_or_else(|| parse_err("rows", "expected an array"))?
            .iter()
            .map(|r| {
                Ok(CountRow {
                    k: r["k"].as_u64().ok_or_else(|| parse_err("k", &r["k"]))? as usize,
                    tree_product: int(r, "tree_product")?,
                    tree_recurrence: if r["tree_recurrence"].is_null() {
                        None
                    } else {
                        Some(int(r, "tree_recurrence")?)
                    },
                    word_norm: int(r, "word_norm")?,
                    partitions: int(r, "partitions")?,
                    bounded_partitions: int(r, "bounded_partitions")?,
                    m0_size: int(r, "M0_size")?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { n, rows })
    }
}

pub fn run_count(cfg: &ProblemConfig, out: &Path, format: Format) -> Result<RunSummary> {
    let table = CountTable::build(cfg.n, cfg.order, cfg.guard())?;
    std::fs::create_dir_all(out)?;
    let path = match format {
        Format::Csv => {
            let path = out.join("count.csv");
            table.write_csv(File::create(&path)?)?;
            path
        }
        Format::Json => {
            let path = out.join("count.json");
            std::fs::write(&path, table.to_json()?)?;
            path
        }
    };
    Ok(RunSummary {
        files: vec![path],
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------- compare

/// Integrals needed at order `k` by each scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralCounts {
    pub k: usize,
    /// Quadratures performed by the product recursion to go from order `k`
    /// to `k + 1`.
    pub products: usize,
    /// Size of `M0(k)`: iterated integrals in the Chen-Fliess term of order `k`.
    pub chen_fliess: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: usize,
    #[serde(rename = "K")]
    pub order: usize,
    pub x0: f64,
    pub radius: f64,
    pub t: Vec<f64>,
    pub expansion: Vec<f64>,
    pub rk4: Vec<f64>,
    pub chen_fliess: Vec<f64>,
    pub expansion_error: Vec<f64>,
    pub chen_fliess_error: Vec<f64>,
    #[serde(with = "inf_as_null")]
    pub remainder_bound: Vec<f64>,
    pub bound_valid: Vec<bool>,
    pub counts: Vec<IntegralCounts>,
}

const COMPARE_COLUMNS: [&str; 8] = [
    "t",
    "expansion",
    "rk4_reference",
    "chen_fliess",
    "expansion_error",
    "chen_fliess_error",
    "remainder_bound",
    "bound_valid",
];

impl ComparisonReport {
    pub fn build(cfg: &ProblemConfig) -> Result<(Self, Vec<String>)> {
        let (shifted, prep) = prepare(cfg)?;
        let spec = shifted.spec();
        let table = expansion_via_products(&spec, &prep.grid, cfg.order)?;
        let rk4 = rk4_oracle(cfg)?;
        let factors: Vec<f64> = (0..=cfg.n)
            .map(|i| num_traits::ToPrimitive::to_f64(&crate::combinatorics::binomial(cfg.n, i)).unwrap_or(f64::INFINITY))
            .collect();
        let raw = prep.grid.scaled(&factors)?;
        let (cf_terms, cf_sizes) = chen_fliess_terms(&raw, cfg.order)?;
        let expansion: Vec<f64> = table.partial.iter().map(|y| y + cfg.x0).collect();
        let chen_fliess: Vec<f64> = (0..raw.len())
            .map(|j| cf_terms.iter().map(|c| c[j]).sum::<f64>() + cfg.x0)
            .collect();
        let err = |v: &[f64]| v.iter().zip(&rk4).map(|(a, b)| (a - b).abs()).collect();
        let counts = (1..cfg.order)
            .map(|k| IntegralCounts {
                k,
                products: table.integral_counts[k],
                chen_fliess: cf_sizes[k - 1],
            })
            .collect();
        Ok((
            Self {
                n: cfg.n,
                order: cfg.order,
                x0: cfg.x0,
                radius: prep.radius.radius,
                t: table.times.clone(),
                expansion_error: err(&expansion),
                chen_fliess_error: err(&chen_fliess),
                expansion,
                chen_fliess,
                rk4,
                bound_valid: prep.radius.flags(&table.times),
                remainder_bound: table.bound,
                counts,
            },
            prep.warnings,
        ))
    }

    pub fn write_csv(&self, rows: impl Write, counts: impl Write) -> Result<()> {
        let meta = meta_line(&[
            ("n", self.n.to_string()),
            ("K", self.order.to_string()),
            ("x0", fmt_f64(self.x0)),
            ("radius", fmt_f64(self.radius)),
        ]);
        let mut rows = rows;
        rows.write_all(meta.as_bytes())?;
        let mut out = csv::Writer::from_writer(rows);
        out.write_record(COMPARE_COLUMNS)?;
        for j in 0..self.t.len() {
            out.write_record([
                fmt_f64(self.t[j]),
                fmt_f64(self.expansion[j]),
                fmt_f64(self.rk4[j]),
                fmt_f64(self.chen_fliess[j]),
                fmt_f64(self.expansion_error[j]),
                fmt_f64(self.chen_fliess_error[j]),
                fmt_f64(self.remainder_bound[j]),
                self.bound_valid[j].to_string(),
            ])?;
        }
        out.flush()?;
        let mut out = csv::Writer::from_writer(counts);
        out.write_record(["k", "products_integrals", "chen_fliess_integrals"])?;
        for c in &self.counts {
            out.write_record([c.k.to_string(), c.products.to_string(), c.chen_fliess.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(rows: impl Read, counts: impl Read) -> Result<Self> {
        let text = read_text(rows)?;
        let (meta, body) = split_meta(&text)?;
        let (header, records) = csv_rows(body)?;
        let floats = |name: &str| -> Result<Vec<f64>> {
            let c = column(&header, name)?;
            records.iter().map(|r| parse_field(name, &r[c])).collect()
        };
        let valid = column(&header, "bound_valid")?;
        let counts_text = read_text(counts)?;
        let (ch, crows) = csv_rows(&counts_text)?;
        let (ck, cp, cc) = (
            column(&ch, "k")?,
            column(&ch, "products_integrals")?,
            column(&ch, "chen_fliess_integrals")?,
        );
        Ok(Self {
            n: meta_get(&meta, "n")?,
            order: meta_get(&meta, "K")?,
            x0: meta_get(&meta, "x0")?,
            radius: meta_get(&meta, "radius")?,
            t: floats("t")?,
            expansion: floats("expansion")?,
            rk4: floats("rk4_reference")?,
            chen_fliess: floats("chen_fliess")?,
            expansion_error: floats("expansion_error")?,
            chen_fliess_error: floats("chen_fliess_error")?,
            remainder_bound: floats("remainder_bound")?,
            bound_valid: records
                .iter()
                .map(|r| parse_field("bound_valid", &r[valid]))
                .collect::<Result<_>>()?,
            counts: crows
                .iter()
                .map(|r| {
                    Ok(IntegralCounts {
                        k: parse_field("k", &r[ck])?,
                        products: parse_field("products_integrals", &r[cp])?,
                        chen_fliess: parse_field("chen_fliess_integrals", &r[cc])?,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn run_compare(cfg: &ProblemConfig, out: &Path, format: Format) -> Result<RunSummary> {
    let (report, warnings) = ComparisonReport::build(cfg)?;
    std::fs::create_dir_all(out)?;
    let files = match format {
        Format::Csv => {
            let rows = out.join("compare.csv");
            let counts = out.join("compare_counts.csv");
            report.write_csv(File::create(&rows)?, File::create(&counts)?)?;
            vec![rows, counts]
        }
        Format::Json => {
            let path = out.join("compare.json");
            std::fs::write(&path, report.to_json()?)?;
            vec![path]
        }
    };
    Ok(RunSummary { files, warnings })
}

/// Reads the metadata line of any CSV report.
pub fn read_csv_metadata(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    Ok(split_meta(&first)?.0)
}
