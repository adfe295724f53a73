//! Query generation, server answers and user-side recovery.
//!
//! Every protocol here is linear: the query is a full-rank matrix `G`
//! with `K` columns, the answer is `Y = G X`, and the user decodes the
//! demand `Z = V X_W` with a secret kept in a [`RecoveryPlan`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{
    self, canonical_placement, dual_of_multipliers, grs_dual_multipliers, grs_matrix, place_columns,
    ExtendedGrs, ExtensionChoice, GrsCode,
};
use crate::error::{Error, Result};
use crate::gf::PrimeField;
use crate::matrix::Matrix;

/// Which class of coefficient matrices the server assumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// `V` is MDS.
    #[serde(rename = "I")]
    I,
    /// `V` has full row rank.
    #[serde(rename = "II")]
    II,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::I => "I",
            Model::II => "II",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" => Ok(Model::I),
            "II" | "2" => Ok(Model::II),
            other => Err(Error::InvalidParameters(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// MDS-code protocol with a randomly extended parity check.
    Jplt1,
    /// MDS-code protocol with explicit GRS parameters.
    Jplt1Grs,
    /// Augmented-code protocol.
    Jplt2,
    /// Download everything.
    PirBaseline,
    /// One single-combination query per row of `V`.
    PlcBaseline,
}

/// The demand `Z = V X_W`: a sorted support `W` and an `L x D` coefficient matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    support: Vec<usize>,
    coefficients: Matrix,
    model: Model,
}

impl Demand {
    pub fn new(support: Vec<usize>, coefficients: Matrix, model: Model) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDemand("empty support".into()));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidDemand("support must be strictly increasing".into()));
        }
        if coefficients.cols() != support.len() {
            return Err(Error::InvalidDemand(format!(
                "V has {} columns for a support of size {}",
                coefficients.cols(),
                support.len()
            )));
        }
        if coefficients.rows() == 0 {
            return Err(Error::InvalidDemand("V has no rows".into()));
        }
        let rank = coefficients.rank();
        if rank != coefficients.rows() {
            return Err(Error::InvalidDemand(format!(
                "V must have full row rank, rank {rank} of {} rows",
                coefficients.rows()
            )));
        }
        if model == Model::I && !coefficients.is_mds()? {
            return Err(Error::NotMds("V"));
        }
        Ok(Self { support, coefficients, model })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coefficients(&self) -> &Matrix {
        &self.coefficients
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn field(&self) -> PrimeField {
        self.coefficients.field()
    }

    /// `D`
    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    /// `L`
    pub fn dimension(&self) -> usize {
        self.coefficients.rows()
    }

    fn check_within(&self, k: usize) -> Result<()> {
        match self.support.last() {
            Some(&last) if last >= k => Err(Error::IndexOutOfRange { index: last, len: k }),
            _ => Ok(()),
        }
    }

    /// The `L x K` matrix `U` with `V` scattered into the columns `W`.
    pub fn global_coefficients(&self, k: usize) -> Result<Matrix> {
        self.check_within(k)?;
        let v = &self.coefficients;
        let mut u = Matrix::zeros(self.field(), v.rows(), k);
        for r in 0..v.rows() {
            for (j, &col) in self.support.iter().enumerate() {
                u.set(r, col, v.get(r, j));
            }
        }
        Ok(u)
    }

    /// Expected result `V * X_W`, computed directly from the dataset.
    pub fn evaluate(&self, dataset: &Dataset) -> Result<Matrix> {
        let xw = dataset.messages().select_rows(&self.support)?;
        self.coefficients.mul(&xw)
    }
}

/// The server's `K x N` message matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    x: Matrix,
}

impl Dataset {
    pub fn new(x: Matrix) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::Shape(format!("dataset must be non-empty, got {}x{}", x.rows(), x.cols())));
        }
        Ok(Self { x })
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, k: usize, n: usize, rng: &mut R) -> Result<Self> {
        Self::new(Matrix::random(field, k, n, rng))
    }

    pub fn messages(&self) -> &Matrix {
        &self.x
    }

    pub fn field(&self) -> PrimeField {
        self.x.field()
    }

    /// `K`
    pub fn num_messages(&self) -> usize {
        self.x.rows()
    }

    /// `N`
    pub fn message_len(&self) -> usize {
        self.x.cols()
    }
}

/// What the server sees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub g: Matrix,
    pub k: usize,
    pub model: Model,
    pub protocol: ProtocolKind,
}

impl Query {
    pub fn field(&self) -> PrimeField {
        self.g.field()
    }

    pub fn downloaded_rows(&self) -> usize {
        self.g.rows()
    }
}

/// The user's private decoding secret. Never sent to the server.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecoveryPlan {
    /// Row `l` of `Z` is `c_l^T Y`; one coefficient vector per row.
    GrsPoly { coefficients: Matrix },
    /// `Z = C Y` with `C G = U`.
    RowReduce { transform: Matrix, support: Vec<usize> },
    /// `Z` is the first `demand_rows` rows of `R^-1 Y`.
    Unscramble { r_inv: Matrix, demand_rows: usize },
    /// `Y = X`; apply `V` to the rows in `support` locally.
    Passthrough { support: Vec<usize>, coefficients: Matrix },
}

impl RecoveryPlan {
    pub fn field(&self) -> PrimeField {
        match self {
            RecoveryPlan::GrsPoly { coefficients } => coefficients.field(),
            RecoveryPlan::RowReduce { transform, .. } => transform.field(),
            RecoveryPlan::Unscramble { r_inv, .. } => r_inv.field(),
            RecoveryPlan::Passthrough { coefficients, .. } => coefficients.field(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub y: Matrix,
}

/// Output of the MDS-code protocol with generic extension.
#[derive(Clone, Debug)]
pub struct MdsQuery {
    pub query: Query,
    pub plan: RecoveryPlan,
    /// Parity check of the code generated by `V` (`(D-L) x D`).
    pub lambda: Matrix,
    /// Extended parity check (`(D-L) x K`), with `lambda` in the columns `W`.
    pub h: Matrix,
}

/// Output of the MDS-code protocol with explicit GRS parameters.
#[derive(Clone, Debug)]
pub struct GrsQuery {
    pub query: Query,
    pub plan: RecoveryPlan,
    pub lambda: Matrix,
    pub h: Matrix,
    /// Parameters of `H` in parameter order.
    pub extension: ExtendedGrs,
    /// Generator multipliers `alpha_1..alpha_K` in parameter order.
    pub alphas: Vec<u64>,
}

/// Output of the augmented-code protocol.
#[derive(Clone, Debug)]
pub struct AugmentedQuery {
    pub query: Query,
    pub plan: RecoveryPlan,
    pub u: Matrix,
    pub m: Matrix,
    pub g_hat: Matrix,
    pub r: Matrix,
}

/// MDS-code protocol: extend the dual of `V` to an MDS parity check on all
/// `K` coordinates and send the generator of the code it defines.
pub fn jplt1_query<R: Rng + ?Sized>(demand: &Demand, k: usize, rng: &mut R) -> Result<MdsQuery> {
    let v = demand.coefficients();
    if !v.is_mds()? {
        return Err(Error::NotMds("V"));
    }
    let u = demand.global_coefficients(k)?;
    let lambda = v.null_space();
    if !lambda.is_mds()? {
        return Err(Error::NotMds("the parity check of V"));
    }
    let extended = codes::extend_mds_generic(&lambda, k, rng, codes::DEFAULT_MAX_RETRIES)?;
    let h = place_columns(&extended, &canonical_placement(demand.support(), k)?)?;
    let g = codes::parity_to_generator(&h)?;
    let transform = g
        .solve_in_rowspace(&u)?
        .expect("U H^T = 0 puts every demand row in the code");
    Ok(MdsQuery {
        query: Query { g, k, model: Model::I, protocol: ProtocolKind::Jplt1 },
        plan: RecoveryPlan::RowReduce { transform, support: demand.support().to_vec() },
        lambda,
        h,
    })
}

/// MDS-code protocol when `V` is the generator of the GRS code `code`
/// (dimension `L`, length `D`). Works for any `q >= K`.
pub fn jplt1_grs_query(
    support: &[usize],
    code: &GrsCode,
    k: usize,
    choice: &ExtensionChoice,
) -> Result<GrsQuery> {
    let field = code.field();
    let q = field.modulus();
    if (k as u64) > q {
        return Err(Error::InsufficientField { q, needed: k });
    }
    if support.len() != code.len() {
        return Err(Error::InvalidDemand(format!(
            "support of size {} for a GRS code of length {}",
            support.len(),
            code.len()
        )));
    }
    let d = code.len();
    let l = code.dim();
    let lambda_mults = grs_dual_multipliers(code);
    let lambda = grs_matrix(field, &lambda_mults, code.points(), d - l);
    let extension = ExtendedGrs::new(field, &lambda_mults, code.points(), k, choice)?;
    if choice.placement[..d] != canonical_placement(support, k)?[..d] {
        return Err(Error::InvalidParameters(
            "placement must map the demand parameters onto the support".into(),
        ));
    }
    let h = place_columns(&grs_matrix(field, &extension.multipliers, &extension.points, d - l), &extension.placement)?;
    let alphas = dual_of_multipliers(field, &extension.multipliers, &extension.points)?;
    let g = place_columns(&grs_matrix(field, &alphas, &extension.points, k - d + l), &extension.placement)?;
    let polys = codes::recovery_polynomials(field, &choice.extra_points, l)?;
    let coefficients = Matrix::from_rows_with_cols(field, &polys, k - d + l)?;
    Ok(GrsQuery {
        query: Query { g, k, model: Model::I, protocol: ProtocolKind::Jplt1Grs },
        plan: RecoveryPlan::GrsPoly { coefficients },
        lambda,
        h,
        extension,
        alphas,
    })
}

/// [`jplt1_grs_query`] with a freshly drawn [`ExtensionChoice`].
pub fn jplt1_grs_query_random<R: Rng + ?Sized>(
    support: &[usize],
    code: &GrsCode,
    k: usize,
    rng: &mut R,
) -> Result<GrsQuery> {
    let choice = ExtensionChoice::random(code.field(), support, k, code.points(), rng)?;
    jplt1_grs_query(support, code, k, &choice)
}

/// Generator of a `[K, rows]` GRS code with random nonzero multipliers and
/// random distinct points.
pub fn random_grs_generator<R: Rng + ?Sized>(
    field: PrimeField,
    rows: usize,
    k: usize,
    rng: &mut R,
) -> Result<Matrix> {
    let q = field.modulus();
    if (k as u64) > q {
        return Err(Error::InsufficientField { q, needed: k });
    }
    let points = sample_distinct(q, k, rng);
    let multipliers: Vec<u64> = (0..k).map(|_| rng.random_range(1..q)).collect();
    Ok(grs_matrix(field, &multipliers, &points, rows))
}

/// `count` distinct values from `0..q`, uniformly without replacement.
pub(crate) fn sample_distinct<R: Rng + ?Sized>(q: u64, count: usize, rng: &mut R) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    while out.len() < count {
        let p = rng.random_range(0..q);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Augmented-code protocol with random `M` (GRS) and random invertible `R`.
pub fn jplt2_query<R: Rng + ?Sized>(demand: &Demand, k: usize, rng: &mut R) -> Result<AugmentedQuery> {
    let field = demand.field();
    demand.check_within(k)?;
    let d = demand.support_size();
    let m = random_grs_generator(field, k - d, k, rng)?;
    let r = Matrix::random_invertible(field, k - d + demand.dimension(), rng);
    jplt2_query_with(demand, k, &m, &r)
}

/// Augmented-code protocol with caller-supplied `M` and `R`.
pub fn jplt2_query_with(demand: &Demand, k: usize, m: &Matrix, r: &Matrix) -> Result<AugmentedQuery> {
    let u = demand.global_coefficients(k)?;
    let d = demand.support_size();
    let rows = k - d + demand.dimension();
    if m.shape() != (k - d, k) {
        return Err(Error::Shape(format!("M must be {}x{k}, got {}x{}", k - d, m.rows(), m.cols())));
    }
    if r.shape() != (rows, rows) {
        return Err(Error::Shape(format!("R must be {rows}x{rows}, got {}x{}", r.rows(), r.cols())));
    }
    if !m.is_mds()? {
        return Err(Error::NotMds("M"));
    }
    let r_inv = r.invert()?;
    let g_hat = u.vstack(m)?;
    let g = r.mul(&g_hat)?;
    let rank = g.rank();
    if rank != rows {
        return Err(Error::RankDeficient { rank, rows });
    }
    Ok(AugmentedQuery {
        query: Query { g, k, model: Model::II, protocol: ProtocolKind::Jplt2 },
        plan: RecoveryPlan::Unscramble { r_inv, demand_rows: demand.dimension() },
        u,
        m: m.clone(),
        g_hat,
        r: r.clone(),
    })
}

/// `Y = G X`. Reads nothing but the query matrix and the dataset.
pub fn server_answer(query: &Query, dataset: &Dataset) -> Result<Answer> {
    query.field().ensure_same(&dataset.field())?;
    if query.g.cols() != dataset.num_messages() {
        return Err(Error::Shape(format!(
            "query has {} columns, dataset has {} messages",
            query.g.cols(),
            dataset.num_messages()
        )));
    }
    Ok(Answer { y: query.g.mul(dataset.messages())? })
}

/// Decodes `Z = V X_W` from the answer.
pub fn recover(answer: &Answer, plan: &RecoveryPlan) -> Result<Matrix> {
    let y = &answer.y;
    plan.field().ensure_same(&y.field())?;
    let shape_err = |expected: usize| {
        Error::Shape(format!("plan expects {expected} answer rows, got {}", y.rows()))
    };
    match plan {
        RecoveryPlan::GrsPoly { coefficients } | RecoveryPlan::RowReduce { transform: coefficients, .. } => {
            if coefficients.cols() != y.rows() {
                return Err(shape_err(coefficients.cols()));
            }
            coefficients.mul(y)
        }
        RecoveryPlan::Unscramble { r_inv, demand_rows } => {
            if r_inv.cols() != y.rows() || *demand_rows > r_inv.rows() {
                return Err(shape_err(r_inv.cols()));
            }
            let head: Vec<usize> = (0..*demand_rows).collect();
            r_inv.select_rows(&head)?.mul(y)
        }
        RecoveryPlan::Passthrough { support, coefficients } => {
            if support.iter().any(|&i| i >= y.rows()) {
                return Err(shape_err(support.iter().max().map_or(0, |m| m + 1)));
            }
            coefficients.mul(&y.select_rows(support)?)
        }
    }
}

/// Download-everything baseline.
pub fn pir_baseline_query(demand: &Demand, k: usize) -> Result<(Query, RecoveryPlan)> {
    demand.check_within(k)?;
    let g = Matrix::identity(demand.field(), k);
    Ok((
        Query { g, k, model: demand.model(), protocol: ProtocolKind::PirBaseline },
        RecoveryPlan::Passthrough {
            support: demand.support().to_vec(),
            coefficients: demand.coefficients().clone(),
        },
    ))
}

/// One single-combination MDS-code query per row of `V`, each restricted to
/// the nonzero entries of its row.
pub fn plc_baseline_queries<R: Rng + ?Sized>(
    demand: &Demand,
    k: usize,
    rng: &mut R,
) -> Result<Vec<(Query, RecoveryPlan)>> {
    let v = demand.coefficients();
    let field = demand.field();
    (0..v.rows())
        .map(|row| {
            let (cols, coeffs): (Vec<usize>, Vec<u64>) = demand
                .support()
                .iter()
                .zip(v.row(row))
                .filter(|(_, &c)| c != 0)
                .map(|(&i, &c)| (i, c))
                .unzip();
            let n = coeffs.len();
            // A single nonzero row generates a GRS code for any distinct points.
            let (mut query, plan) = if (k as u64) <= field.modulus() {
                let code = GrsCode::new(field, coeffs, (0..n as u64).collect(), 1)?;
                let out = jplt1_grs_query_random(&cols, &code, k, rng)?;
                (out.query, out.plan)
            } else {
                let sub = Demand::new(cols, Matrix::from_vec(field, 1, n, coeffs)?, Model::I)?;
                let out = jplt1_query(&sub, k, rng)?;
                (out.query, out.plan)
            };
            query.protocol = ProtocolKind::PlcBaseline;
            query.model = demand.model();
            Ok((query, plan))
        })
        .collect()
}
