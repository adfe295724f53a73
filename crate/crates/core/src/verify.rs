//! Brute-force checks of recoverability, feasibility and the joint-privacy
//! structure, plus exact rate and capacity accounting.
//!
//! Joint privacy is checked structurally: for every candidate support
//! `S` of size `D` the code spanned by the query must contain exactly an
//! `L`-dimensional subcode supported in `S`, and that subcode restricted
//! to `S` must be a valid coefficient matrix for the model (MDS for
//! model I, full rank for model II).

use std::collections::BTreeMap;
use std::io::{self, Write};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::codes::{puncture, supported_subcode};
use crate::error::{Error, Result};
use crate::matrix::{binomial, Matrix};
use crate::protocols::{Demand, Model, Query};
use crate::rng::seeded;

/// Default ceiling on `C(K, D)` for exhaustive privacy checks.
pub const DEFAULT_SUBSET_CAP: u128 = 1_000_000;

/// How candidate subsets are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// All subsets; fails if there are more than `cap`.
    Exhaustive { cap: u128 },
    /// `count` uniformly random subsets drawn from a seeded RNG.
    Sample { count: usize, seed: u64 },
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration::Exhaustive { cap: DEFAULT_SUBSET_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    WrongDimension,
    NotFullRank,
    NotMds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetFailure {
    /// 1-based message indices.
    pub subset: Vec<usize>,
    pub reason: FailureReason,
    /// Dimension of the subcode supported on `subset`.
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrivacyReport {
    pub k: usize,
    pub d: usize,
    pub l: usize,
    pub model: Model,
    pub subsets_checked: u128,
    pub exhaustive: bool,
    pub failures: Vec<SubsetFailure>,
    pub passed: bool,
}

/// Every row of `U` lies in the row space of `g`.
pub fn check_recoverability(g: &Matrix, demand: &Demand) -> Result<bool> {
    let u = demand.global_coefficients(g.cols())?;
    Ok(g.solve_in_rowspace(&u)?.is_some())
}

/// The code of `g` holds codewords supported in `support` whose restriction to
/// `support` spans the code generated by `v`.
pub fn check_feasibility(g: &Matrix, support: &[usize], v: &Matrix) -> Result<bool> {
    if v.cols() != support.len() {
        return Err(Error::Shape(format!("V has {} columns for {} coordinates", v.cols(), support.len())));
    }
    let sub = supported_subcode(g, support)?;
    let restricted = puncture(&sub, support)?;
    if restricted.rows() == 0 {
        return Ok(v.rank() == 0);
    }
    Ok(restricted.solve_in_rowspace(v)?.is_some())
}

type Subsets = Box<dyn Iterator<Item = Vec<usize>>>;

fn subset_stream(
    n: usize,
    size: usize,
    mode: Enumeration,
) -> Result<(Subsets, u128, bool)> {
    match mode {
        Enumeration::Exhaustive { cap } => {
            let count = binomial(n as u64, size as u64);
            if count > cap {
                return Err(Error::EnumerationCap { count, cap });
            }
            Ok((Box::new((0..n).combinations(size)), count, true))
        }
        Enumeration::Sample { count, seed } => {
            let mut rng = seeded(seed);
            let picks: Vec<Vec<usize>> = (0..count)
                .map(|_| {
                    let mut s = index::sample(&mut rng, n, size).into_vec();
                    s.sort_unstable();
                    s
                })
                .collect();
            Ok((Box::new(picks.into_iter()), count as u128, false))
        }
    }
}

/// Checks every candidate support of size `d` (see module docs).
pub fn check_joint_privacy(g: &Matrix, d: usize, l: usize, model: Model, mode: Enumeration) -> Result<PrivacyReport> {
    let k = g.cols();
    if !(1 <= l && l <= d && d <= k) {
        return Err(Error::InvalidParameters(format!("need 1 <= L <= D <= K, got K={k} D={d} L={l}")));
    }
    let (subsets, subsets_checked, exhaustive) = subset_stream(k, d, mode)?;
    let mut failures = Vec::new();
    for s in subsets {
        if let Some((reason, dimension)) = subset_failure(g, &s, l, model)? {
            failures.push(SubsetFailure { subset: s.iter().map(|i| i + 1).collect(), reason, dimension });
        }
    }
    Ok(PrivacyReport { k, d, l, model, subsets_checked, exhaustive, passed: failures.is_empty(), failures })
}

fn subset_failure(g: &Matrix, s: &[usize], l: usize, model: Model) -> Result<Option<(FailureReason, usize)>> {
    let sub = supported_subcode(g, s)?;
    let dim = sub.rows();
    if dim != l {
        return Ok(Some((FailureReason::WrongDimension, dim)));
    }
    let restricted = puncture(&sub, s)?;
    if restricted.rank() != l {
        return Ok(Some((FailureReason::NotFullRank, dim)));
    }
    if model == Model::I && !restricted.is_mds()? {
        return Ok(Some((FailureReason::NotMds, dim)));
    }
    Ok(None)
}

/// For an MDS generator of an `[n, k]` code: every `S` with `|S| >= n - k + 1`
/// carries a subcode of dimension `|S| - n + k` whose restriction to `S` is MDS.
pub fn check_symmetry_property(g: &Matrix, mode: Enumeration) -> Result<bool> {
    if !g.is_mds()? {
        return Err(Error::NotMds("the generator"));
    }
    let (n, k) = (g.cols(), g.rows());
    let min = n - k + 1;
    let sizes: Vec<usize> = (min..=n).collect();
    let subsets: Box<dyn Iterator<Item = Vec<usize>>> = match mode {
        Enumeration::Exhaustive { cap } => {
            let count: u128 = sizes.iter().map(|&s| binomial(n as u64, s as u64)).sum();
            if count > cap {
                return Err(Error::EnumerationCap { count, cap });
            }
            Box::new(sizes.into_iter().flat_map(move |s| (0..n).combinations(s)))
        }
        Enumeration::Sample { count, seed } => {
            let mut rng = seeded(seed);
            let picks: Vec<Vec<usize>> = (0..count)
                .map(|_| {
                    let s = rng.random_range(min..=n);
                    let mut v = index::sample(&mut rng, n, s).into_vec();
                    v.sort_unstable();
                    v
                })
                .collect();
            Box::new(picks.into_iter())
        }
    };
    for s in subsets {
        let sub = supported_subcode(g, &s)?;
        if sub.rows() != s.len() + k - n || !puncture(&sub, &s)?.is_mds()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Histogram of supported-subcode dimensions over all `d`-subsets.
///
/// For a private query this is `{L: C(K, D)}` whatever the demand was,
/// so the profile cannot separate supports. Used by the stress mode.
pub fn dimension_profile(g: &Matrix, d: usize, cap: u128) -> Result<BTreeMap<usize, u128>> {
    let (subsets, _, _) = subset_stream(g.cols(), d, Enumeration::Exhaustive { cap })?;
    let mut hist = BTreeMap::new();
    for s in subsets {
        *hist.entry(supported_subcode(g, &s)?.rows()).or_insert(0) += 1;
    }
    Ok(hist)
}

fn serialize_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

/// `"p/q"`, or just `"p"` for integers.
pub fn format_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn ratio(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_order(k: usize, d: usize, l: usize) -> Result<()> {
    if 1 <= l && l <= d && d <= k {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("need 1 <= L <= D <= K, got K={k} D={d} L={l}")))
    }
}

/// `L / (K - D + L)`
pub fn capacity(k: usize, d: usize, l: usize) -> Result<BigRational> {
    check_order(k, d, l)?;
    Ok(ratio(l, k - d + l))
}

/// Download-everything rate `L / K`.
pub fn pir_rate(k: usize, d: usize, l: usize) -> Result<BigRational> {
    check_order(k, d, l)?;
    Ok(ratio(l, k))
}

/// Per-combination rate `1 / (K - D + 1)`.
pub fn plc_rate(k: usize, d: usize, l: usize) -> Result<BigRational> {
    check_order(k, d, l)?;
    Ok(ratio(1, k - d + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RateSummary {
    pub downloaded_rows: usize,
    pub demand_rows: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub rate: BigRational,
    #[serde(serialize_with = "serialize_ratio")]
    pub capacity: BigRational,
}

/// Rate of a linear protocol: answer entropy is `rank(G)` symbols' worth.
pub fn rate_summary(query: &Query, d: usize, l: usize) -> Result<RateSummary> {
    let capacity = capacity(query.k, d, l)?;
    let rank = query.g.rank();
    if rank == 0 {
        return Err(Error::InvalidParameters("query has rank 0".into()));
    }
    Ok(RateSummary { downloaded_rows: query.g.rows(), demand_rows: l, rate: ratio(l, rank), capacity })
}

/// Rate summary for a multi-query scheme given the total number of full-rank rows downloaded.
pub fn rate_summary_for_rows(rows: usize, k: usize, d: usize, l: usize) -> Result<RateSummary> {
    let capacity = capacity(k, d, l)?;
    if rows == 0 {
        return Err(Error::InvalidParameters("no rows downloaded".into()));
    }
    Ok(RateSummary { downloaded_rows: rows, demand_rows: l, rate: ratio(l, rows), capacity })
}

/// One line of the rate table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateRow {
    pub k: usize,
    pub d: usize,
    pub l: usize,
    pub jplt_rate: BigRational,
    pub pir_rate: BigRational,
    pub plc_rate: BigRational,
    pub capacity: BigRational,
}

pub const RATES_CSV_HEADER: &str =
    "k,d,l,jplt_rate,jplt_rate_float,pir_rate,pir_rate_float,plc_rate,plc_rate_float,capacity,capacity_float";

/// Parses a non-negative decimal such as `0.6` or `1` into an exact ratio.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameters(format!("not a non-negative decimal: {s:?}"));
    let (int, frac) = s.trim().split_once('.').unwrap_or((s.trim(), ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(numer, denom))
}

/// `L = round(ratio * D)` (halves away from zero), clamped to `[1, D]`.
pub fn demand_rows_for(ratio_ld: &BigRational, d: usize) -> usize {
    let scaled = (ratio_ld * BigRational::from_integer(BigInt::from(d))).round();
    let l = scaled.to_integer();
    if l < BigInt::one() {
        1
    } else {
        l.to_usize().map_or(d, |l| l.min(d))
    }
}

/// Rates over the grid `D = d_from, d_from + d_step, ..., <= d_to`.
pub fn rate_table(k: usize, ratio_ld: &BigRational, d_from: usize, d_to: usize, d_step: usize) -> Result<Vec<RateRow>> {
    if d_step == 0 || d_from == 0 || d_to > k || d_from > d_to {
        return Err(Error::InvalidParameters(format!(
            "bad grid: k={k} d_from={d_from} d_to={d_to} d_step={d_step}"
        )));
    }
    if ratio_ld.is_negative() || ratio_ld.is_zero() {
        return Err(Error::InvalidParameters("L/D ratio must be positive".into()));
    }
    (d_from..=d_to)
        .step_by(d_step)
        .map(|d| {
            let l = demand_rows_for(ratio_ld, d);
            Ok(RateRow {
                k,
                d,
                l,
                // Both protocols download exactly K - D + L rows.
                jplt_rate: ratio(l, k - d + l),
                pir_rate: pir_rate(k, d, l)?,
                plc_rate: plc_rate(k, d, l)?,
                capacity: capacity(k, d, l)?,
            })
        })
        .collect()
}

pub fn write_rates_csv<W: Write>(rows: &[RateRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{RATES_CSV_HEADER}")?;
    for r in rows {
        write!(out, "{},{},{}", r.k, r.d, r.l)?;
        for x in [&r.jplt_rate, &r.pir_rate, &r.plc_rate, &r.capacity] {
            write!(out, ",{},{}", format_ratio(x), ratio_to_f64(x))?;
        }
        writeln!(out)?;
    }
    Ok(())
}
