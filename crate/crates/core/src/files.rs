//! JSON file formats used by the command-line tools.
//!
//! Message indices are 1-based in every file and 0-based in memory.
//! All files are written in canonical JSON (sorted keys, no whitespace)
//! followed by a newline, so equal contents give equal bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{grs_generator, ExtensionChoice, GrsCode};
use crate::error::Error;
use crate::gf::PrimeField;
use crate::matrix::Matrix;
use crate::net::{self, WireAnswer, WireMessage, WireQuery};
use crate::protocols::{Dataset, Demand, Model, RecoveryPlan};

pub const FILE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] Error),
}

pub type FileResult<T> = std::result::Result<T, FileError>;

fn invalid(msg: impl Into<String>) -> FileError {
    FileError::Invalid(msg.into())
}

fn check_version(v: u32) -> FileResult<()> {
    if v == FILE_VERSION {
        Ok(())
    } else {
        Err(invalid(format!("unsupported file version {v}")))
    }
}

/// Canonical JSON text of `value`, newline-terminated.
pub fn to_canonical_text<T: Serialize>(value: &T) -> FileResult<String> {
    let v = serde_json::to_value(value).map_err(|e| invalid(e.to_string()))?;
    let mut s = net::canonical_json(&v);
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> FileResult<()> {
    let text = to_canonical_text(value)?;
    fs::write(path, text).map_err(|source| FileError::Io { path: path.to_owned(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> FileResult<T> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| FileError::Parse { path: path.to_owned(), message: e.to_string() })
}

fn to_zero_based(w: &[usize], k: Option<usize>) -> FileResult<Vec<usize>> {
    w.iter()
        .map(|&i| match (i, k) {
            (0, _) => Err(invalid("message indices are 1-based")),
            (i, Some(k)) if i > k => Err(invalid(format!("index {i} exceeds k = {k}"))),
            (i, _) => Ok(i - 1),
        })
        .collect()
}

fn to_one_based(w: &[usize]) -> Vec<usize> {
    w.iter().map(|i| i + 1).collect()
}

fn field(q: u64) -> FileResult<PrimeField> {
    PrimeField::new(q).map_err(|e| match e {
        Error::NotPrime(_) => invalid("q must be prime"),
        other => FileError::Core(other),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub version: u32,
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub x: Vec<Vec<u64>>,
}

impl DatasetFile {
    pub fn from_dataset(ds: &Dataset) -> Self {
        Self {
            version: FILE_VERSION,
            q: ds.field().modulus(),
            k: ds.num_messages(),
            n: ds.message_len(),
            x: ds.messages().to_rows(),
        }
    }

    pub fn to_dataset(&self) -> FileResult<Dataset> {
        check_version(self.version)?;
        let f = field(self.q)?;
        if self.x.len() != self.k {
            return Err(invalid(format!("x has {} rows, expected k = {}", self.x.len(), self.k)));
        }
        Ok(Dataset::new(Matrix::from_rows_with_cols(f, &self.x, self.n)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrsParams {
    pub multipliers: Vec<u64>,
    pub points: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandFile {
    pub version: u32,
    pub q: u64,
    pub model: Model,
    /// Sorted, 1-based.
    pub w: Vec<usize>,
    pub v: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grs: Option<GrsParams>,
}

impl DemandFile {
    pub fn from_demand(demand: &Demand, grs: Option<&GrsCode>) -> Self {
        Self {
            version: FILE_VERSION,
            q: demand.field().modulus(),
            model: demand.model(),
            w: to_one_based(demand.support()),
            v: demand.coefficients().to_rows(),
            grs: grs.map(|c| GrsParams { multipliers: c.multipliers().to_vec(), points: c.points().to_vec() }),
        }
    }

    /// The demand and, if given, the GRS code whose generator is `v`.
    pub fn to_demand(&self) -> FileResult<(Demand, Option<GrsCode>)> {
        check_version(self.version)?;
        let f = field(self.q)?;
        let v = Matrix::from_rows_with_cols(f, &self.v, self.w.len())?;
        let demand = Demand::new(to_zero_based(&self.w, None)?, v, self.model)?;
        let code = match &self.grs {
            None => None,
            Some(p) => {
                let code = GrsCode::new(f, p.multipliers.clone(), p.points.clone(), demand.dimension())?;
                if grs_generator(&code) != *demand.coefficients() {
                    return Err(invalid("grs parameters do not generate v"));
                }
                Some(code)
            }
        };
        Ok((demand, code))
    }
}

/// Injected randomness for replaying a query exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExtensionFile {
    /// Extension of the GRS parity check: the multipliers and points of
    /// parameters `D+1..K`, and optionally the 1-based placement of all `K`.
    Grs {
        multipliers: Vec<u64>,
        points: Vec<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        placement: Option<Vec<usize>>,
    },
    /// The MDS matrix `M` and the invertible scrambler `R`.
    Augmented { m: Vec<Vec<u64>>, r: Vec<Vec<u64>> },
}

impl ExtensionFile {
    pub fn grs_choice(&self, support: &[usize], k: usize) -> FileResult<ExtensionChoice> {
        match self {
            ExtensionFile::Grs { multipliers, points, placement } => {
                let mut choice = ExtensionChoice::new(multipliers.clone(), points.clone(), support, k)?;
                if let Some(p) = placement {
                    choice.placement = to_zero_based(p, Some(k))?;
                }
                Ok(choice)
            }
            ExtensionFile::Augmented { .. } => Err(invalid("expected a grs extension")),
        }
    }

    pub fn augmented(&self, f: PrimeField, k: usize) -> FileResult<(Matrix, Matrix)> {
        match self {
            ExtensionFile::Augmented { m, r } => {
                let m = Matrix::from_rows_with_cols(f, m, k)?;
                let r = Matrix::from_rows(f, r)?;
                Ok((m, r))
            }
            ExtensionFile::Grs { .. } => Err(invalid("expected an augmented extension")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanBody {
    GrsPoly { coefficients: Vec<Vec<u64>> },
    RowReduce { transform: Vec<Vec<u64>>, w: Vec<usize> },
    Unscramble { r_inv: Vec<Vec<u64>>, demand_rows: usize },
    Passthrough { w: Vec<usize>, v: Vec<Vec<u64>> },
}

/// The private recovery plan. Stays with the user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFile {
    pub version: u32,
    pub q: u64,
    pub rows: usize,
    #[serde(flatten)]
    pub body: PlanBody,
}

impl PlanFile {
    pub fn from_plan(plan: &RecoveryPlan, answer_rows: usize) -> Self {
        let body = match plan {
            RecoveryPlan::GrsPoly { coefficients } => PlanBody::GrsPoly { coefficients: coefficients.to_rows() },
            RecoveryPlan::RowReduce { transform, support } => {
                PlanBody::RowReduce { transform: transform.to_rows(), w: to_one_based(support) }
            }
            RecoveryPlan::Unscramble { r_inv, demand_rows } => {
                PlanBody::Unscramble { r_inv: r_inv.to_rows(), demand_rows: *demand_rows }
            }
            RecoveryPlan::Passthrough { support, coefficients } => {
                PlanBody::Passthrough { w: to_one_based(support), v: coefficients.to_rows() }
            }
        };
        Self { version: FILE_VERSION, q: plan.field().modulus(), rows: answer_rows, body }
    }

    pub fn to_plan(&self) -> FileResult<RecoveryPlan> {
        check_version(self.version)?;
        let f = field(self.q)?;
        let mat = |rows: &Vec<Vec<u64>>, cols: usize| Matrix::from_rows_with_cols(f, rows, cols);
        Ok(match &self.body {
            PlanBody::GrsPoly { coefficients } => RecoveryPlan::GrsPoly { coefficients: mat(coefficients, self.rows)? },
            PlanBody::RowReduce { transform, w } => RecoveryPlan::RowReduce {
                transform: mat(transform, self.rows)?,
                support: to_zero_based(w, Some(self.rows))?,
            },
            PlanBody::Unscramble { r_inv, demand_rows } => {
                RecoveryPlan::Unscramble { r_inv: mat(r_inv, self.rows)?, demand_rows: *demand_rows }
            }
            PlanBody::Passthrough { w, v } => RecoveryPlan::Passthrough {
                support: to_zero_based(w, Some(self.rows))?,
                coefficients: mat(v, w.len())?,
            },
        })
    }
}

/// The recovered demand `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZFile {
    pub version: u32,
    pub q: u64,
    pub z: Vec<Vec<u64>>,
}

impl ZFile {
    pub fn from_matrix(z: &Matrix) -> Self {
        Self { version: FILE_VERSION, q: z.field().modulus(), z: z.to_rows() }
    }
}

/// Reads a query file (a wire query message).
pub fn read_query(path: &Path) -> FileResult<WireQuery> {
    match read_wire(path)? {
        WireMessage::Query(q) => Ok(q),
        _ => Err(invalid(format!("{}: not a query", path.display()))),
    }
}

/// Reads an answer file (a wire answer message).
pub fn read_answer(path: &Path) -> FileResult<WireAnswer> {
    match read_wire(path)? {
        WireMessage::Answer(a) => Ok(a),
        _ => Err(invalid(format!("{}: not an answer", path.display()))),
    }
}

fn read_wire(path: &Path) -> FileResult<WireMessage> {
    let bytes = fs::read(path).map_err(|source| FileError::Io { path: path.to_owned(), source })?;
    net::parse_message(&bytes).map_err(|e| FileError::Parse { path: path.to_owned(), message: e.to_string() })
}

pub fn write_query(path: &Path, q: &WireQuery) -> FileResult<()> {
    write_json(path, &WireMessage::Query(q.clone()))
}

pub fn write_answer(path: &Path, a: &WireAnswer) -> FileResult<()> {
    write_json(path, &WireMessage::Answer(a.clone()))
}
