//! Coding-theory constructions: GRS codes and their duals, MDS extension,
//! puncturing, supported subcodes and the recovery polynomials.

use std::collections::HashSet;

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::PrimeField;
use crate::matrix::Matrix;

/// Default number of candidate columns tried per position by [`extend_mds_generic`].
pub const DEFAULT_MAX_RETRIES: usize = 64;

/// Generalized Reed-Solomon code: generator entry `(i, j) = v_j * w_j^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrsCode {
    field: PrimeField,
    multipliers: Vec<u64>,
    points: Vec<u64>,
    dim: usize,
}

impl GrsCode {
    pub fn new(field: PrimeField, multipliers: Vec<u64>, points: Vec<u64>, dim: usize) -> Result<Self> {
        if multipliers.len() != points.len() {
            return Err(Error::Shape(format!(
                "{} multipliers for {} points",
                multipliers.len(),
                points.len()
            )));
        }
        let n = points.len();
        if dim == 0 || dim > n {
            return Err(Error::InvalidParameters(format!("GRS dimension {dim} with length {n}")));
        }
        if n as u64 > field.modulus() {
            return Err(Error::InsufficientField { q: field.modulus(), needed: n });
        }
        validate_parameters(field, &multipliers, &points)?;
        Ok(Self { field, multipliers, points, dim })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn multipliers(&self) -> &[u64] {
        &self.multipliers
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }
}

fn validate_parameters(field: PrimeField, multipliers: &[u64], points: &[u64]) -> Result<()> {
    for &x in multipliers.iter().chain(points) {
        field.check(x)?;
    }
    if multipliers.contains(&0) {
        return Err(Error::ZeroMultiplier);
    }
    if !points.iter().all_unique() {
        return Err(Error::DuplicatePoint);
    }
    Ok(())
}

/// `rows x n` matrix with entry `(i, j) = multipliers[j] * points[j]^i`.
pub fn grs_matrix(field: PrimeField, multipliers: &[u64], points: &[u64], rows: usize) -> Matrix {
    Matrix::from_fn(field, rows, points.len(), |i, j| {
        field.mul(multipliers[j], field.pow(points[j], i as u64))
    })
}

pub fn grs_generator(code: &GrsCode) -> Matrix {
    grs_matrix(code.field, &code.multipliers, &code.points, code.dim)
}

/// `lambda_j = v_j^-1 * prod_{k != j} (w_j - w_k)^-1`, the multipliers of the dual code
/// on the same evaluation points.
pub fn grs_dual_multipliers(code: &GrsCode) -> Vec<u64> {
    let f = code.field;
    (0..code.len())
        .map(|j| {
            let denom = code
                .points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(code.multipliers[j], |acc, (_, &wk)| f.mul(acc, f.sub(code.points[j], wk)));
            f.inv(denom).expect("distinct points and nonzero multipliers")
        })
        .collect()
}

/// `lambda_j^-1 * prod_{k != j} (w_j - w_k)^-1` over all parameters; the
/// generator multipliers of the code whose parity check has multipliers `lambda`.
pub fn dual_of_multipliers(field: PrimeField, lambda: &[u64], points: &[u64]) -> Result<Vec<u64>> {
    validate_parameters(field, lambda, points)?;
    (0..points.len())
        .map(|j| {
            let denom = points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(lambda[j], |acc, (_, &wk)| field.mul(acc, field.sub(points[j], wk)));
            field.inv(denom)
        })
        .collect()
}

/// Random parameters used to extend a length-`D` GRS parity check to length `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionChoice {
    pub extra_multipliers: Vec<u64>,
    pub extra_points: Vec<u64>,
    /// Permutation of `0..K`: parameter `j` lands in column `placement[j]`.
    /// Parameters `0..D` belong to the demand, the rest to the extension.
    pub placement: Vec<usize>,
}

impl ExtensionChoice {
    /// Uses the canonical placement for `support`.
    pub fn new(extra_multipliers: Vec<u64>, extra_points: Vec<u64>, support: &[usize], k: usize) -> Result<Self> {
        Ok(Self { extra_multipliers, extra_points, placement: canonical_placement(support, k)? })
    }

    /// Multipliers uniform over `F_q \ {0}` with replacement, points uniform
    /// without replacement from the points the demand does not use.
    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        support: &[usize],
        k: usize,
        demand_points: &[u64],
        rng: &mut R,
    ) -> Result<Self> {
        let q = field.modulus();
        if (k as u64) > q {
            return Err(Error::InsufficientField { q, needed: k });
        }
        let extra = k
            .checked_sub(demand_points.len())
            .ok_or_else(|| Error::InvalidParameters("more demand points than messages".into()))?;
        let used: HashSet<u64> = demand_points.iter().copied().collect();
        let mut points = Vec::with_capacity(extra);
        let mut taken = used.clone();
        // Rejection sampling; q >= K keeps the unused pool non-empty.
        while points.len() < extra {
            let p = rng.random_range(0..q);
            if taken.insert(p) {
                points.push(p);
            }
        }
        let multipliers = (0..extra).map(|_| rng.random_range(1..q)).collect();
        Self::new(multipliers, points, support, k)
    }
}

/// Demand indices (ascending) first, then the complement (ascending).
pub fn canonical_placement(support: &[usize], k: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = support.iter().find(|&&i| i >= k) {
        return Err(Error::IndexOutOfRange { index: bad, len: k });
    }
    let mut w = support.to_vec();
    w.sort_unstable();
    w.dedup();
    if w.len() != support.len() {
        return Err(Error::InvalidParameters("support has repeated indices".into()));
    }
    let rest = (0..k).filter(|i| w.binary_search(i).is_err());
    Ok(w.iter().copied().chain(rest).collect())
}

/// Moves column `j` of `m` to column `placement[j]`.
pub fn place_columns(m: &Matrix, placement: &[usize]) -> Result<Matrix> {
    check_permutation(placement, m.cols())?;
    let mut inverse = vec![0; placement.len()];
    for (j, &p) in placement.iter().enumerate() {
        inverse[p] = j;
    }
    m.select_columns(&inverse)
}

fn check_permutation(placement: &[usize], n: usize) -> Result<()> {
    if placement.len() != n {
        return Err(Error::Shape(format!("placement of length {} for {n} columns", placement.len())));
    }
    let mut seen = vec![false; n];
    for &p in placement {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameters("placement is not a permutation".into()));
        }
    }
    Ok(())
}

/// Parameters of the length-`K` GRS code obtained by extending a demand's dual code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedGrs {
    /// `lambda_1..lambda_K` in parameter order.
    pub multipliers: Vec<u64>,
    /// `w_1..w_K` in parameter order.
    pub points: Vec<u64>,
    pub placement: Vec<usize>,
}

impl ExtendedGrs {
    pub fn new(
        field: PrimeField,
        lambda: &[u64],
        points: &[u64],
        k: usize,
        choice: &ExtensionChoice,
    ) -> Result<Self> {
        let q = field.modulus();
        if (k as u64) > q {
            return Err(Error::InsufficientField { q, needed: k });
        }
        if lambda.len() != points.len() {
            return Err(Error::Shape(format!("{} multipliers for {} points", lambda.len(), points.len())));
        }
        let d = points.len();
        if d > k
            || choice.extra_points.len() != k - d
            || choice.extra_multipliers.len() != k - d
        {
            return Err(Error::Shape(format!(
                "extension must supply {} multipliers and points",
                k.saturating_sub(d)
            )));
        }
        check_permutation(&choice.placement, k)?;
        let multipliers: Vec<u64> = lambda.iter().chain(&choice.extra_multipliers).copied().collect();
        let all_points: Vec<u64> = points.iter().chain(&choice.extra_points).copied().collect();
        validate_parameters(field, &multipliers, &all_points)?;
        Ok(Self { multipliers, points: all_points, placement: choice.placement.clone() })
    }
}

/// The `rows x K` parity check `H`: column `placement[j]` is
/// `[lambda_j, lambda_j w_j, .., lambda_j w_j^(rows-1)]`.
pub fn extend_mds_grs(
    field: PrimeField,
    lambda: &[u64],
    points: &[u64],
    rows: usize,
    k: usize,
    choice: &ExtensionChoice,
) -> Result<Matrix> {
    let ext = ExtendedGrs::new(field, lambda, points, k, choice)?;
    place_columns(&grs_matrix(field, &ext.multipliers, &ext.points, rows), &ext.placement)
}

/// Appends random columns to an MDS matrix until it has `k` columns.
///
/// Each candidate is accepted only if every square submatrix that uses it is
/// invertible, so the result is MDS by construction. A column gets
/// `max_retries` random draws; if they all fail and there are at most
/// [`SCAN_LIMIT`] candidate columns, one is drawn uniformly from the valid
/// candidates instead. When no candidate is valid the extension restarts
/// from `base`, at most `max_retries` times.
pub fn extend_mds_generic<R: Rng + ?Sized>(
    base: &Matrix,
    k: usize,
    rng: &mut R,
    max_retries: usize,
) -> Result<Matrix> {
    let field = base.field();
    let r = base.rows();
    let retries = max_retries.max(1);
    if base.cols() > k {
        return Err(Error::Shape(format!("cannot extend {} columns down to {k}", base.cols())));
    }
    if !base.is_mds()? {
        return Err(Error::NotMds("the matrix to extend"));
    }
    let start: Vec<Vec<u64>> = (0..base.cols())
        .map(|c| (0..r).map(|i| base.get(i, c)).collect())
        .collect();
    'restart: for _ in 0..retries {
        let mut cols = start.clone();
        while cols.len() < k {
            match next_column(field, &cols, r, rng, retries) {
                Some(c) => cols.push(c),
                None => continue 'restart,
            }
        }
        return Ok(Matrix::from_fn(field, r, k, |i, j| cols[j][i]));
    }
    Err(Error::RetriesExhausted(retries))
}

/// Largest candidate space `q^rows` that is scanned exhaustively.
pub const SCAN_LIMIT: u64 = 1 << 16;

fn next_column<R: Rng + ?Sized>(
    field: PrimeField,
    cols: &[Vec<u64>],
    r: usize,
    rng: &mut R,
    retries: usize,
) -> Option<Vec<u64>> {
    let q = field.modulus();
    for _ in 0..retries {
        let cand: Vec<u64> = (0..r).map(|_| rng.random_range(0..q)).collect();
        if column_keeps_mds(field, cols, &cand) {
            return Some(cand);
        }
    }
    let space = u32::try_from(r).ok().and_then(|e| q.checked_pow(e)).filter(|&n| n <= SCAN_LIMIT)?;
    let valid: Vec<Vec<u64>> = (1..space)
        .map(|mut n| {
            (0..r)
                .map(|_| {
                    let digit = n % q;
                    n /= q;
                    digit
                })
                .collect::<Vec<u64>>()
        })
        .filter(|cand| column_keeps_mds(field, cols, cand))
        .collect();
    if valid.is_empty() {
        None
    } else {
        Some(valid[rng.random_range(0..valid.len())].clone())
    }
}

fn column_keeps_mds(field: PrimeField, cols: &[Vec<u64>], cand: &[u64]) -> bool {
    let r = cand.len();
    if r == 0 {
        return true;
    }
    if cand.iter().all(|&x| x == 0) {
        return false;
    }
    (0..cols.len()).combinations(r - 1).all(|subset| {
        let m = Matrix::from_fn(field, r, r, |i, j| {
            if j + 1 == r {
                cand[i]
            } else {
                cols[subset[j]][i]
            }
        });
        m.rank() == r
    })
}

/// Generator of the code with parity check `h`.
pub fn parity_to_generator(h: &Matrix) -> Result<Matrix> {
    let rank = h.rank();
    if rank != h.rows() {
        return Err(Error::RankDeficient { rank, rows: h.rows() });
    }
    Ok(h.null_space())
}

/// Keeps the columns listed in `coords`.
pub fn puncture(g: &Matrix, coords: &[usize]) -> Result<Matrix> {
    g.select_columns(coords)
}

/// Canonical (rref) basis of the codewords of `rowspace(g)` that vanish outside `support`.
pub fn supported_subcode(g: &Matrix, support: &[usize]) -> Result<Matrix> {
    if let Some(&bad) = support.iter().find(|&&c| c >= g.cols()) {
        return Err(Error::IndexOutOfRange { index: bad, len: g.cols() });
    }
    let outside: Vec<usize> = (0..g.cols()).filter(|c| !support.contains(c)).collect();
    let restricted = g.select_columns(&outside)?;
    // x * restricted = 0  <=>  restricted^T * x^T = 0
    let combos = restricted.transpose().null_space();
    let words = combos.mul(g)?;
    let red = words.rref();
    red.rref.select_rows(&(0..red.rank).collect::<Vec<_>>())
}

/// Coefficient vectors of `f_l(x) = x^(l-1) * prod_j (x - w_j)` for `l = 1..L`,
/// each of length `#points + L` (constant term first).
pub fn recovery_polynomials(field: PrimeField, extension_points: &[u64], l: usize) -> Result<Vec<Vec<u64>>> {
    if !extension_points.iter().all_unique() {
        return Err(Error::DuplicatePoint);
    }
    for &p in extension_points {
        field.check(p)?;
    }
    let mut base = vec![1u64];
    for &w in extension_points {
        // multiply by (x - w)
        let mut next = vec![0u64; base.len() + 1];
        for (i, &c) in base.iter().enumerate() {
            next[i + 1] = field.add(next[i + 1], c);
            next[i] = field.sub(next[i], field.mul(c, w));
        }
        base = next;
    }
    let len = extension_points.len() + l;
    Ok((0..l)
        .map(|shift| {
            let mut c = vec![0u64; len];
            c[shift..shift + base.len()].copy_from_slice(&base);
            c
        })
        .collect())
}

/// Horner evaluation of a coefficient vector (constant term first).
pub fn eval_poly(field: PrimeField, coeffs: &[u64], x: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, mds};
    use crate::rng::seeded;
    use rand::Rng;
    use proptest::prelude::*;

    fn f11() -> PrimeField {
        PrimeField::new(11).unwrap()
    }

    fn mat<R: AsRef<[u64]>>(rows: &[R]) -> Matrix {
        Matrix::from_rows(f11(), rows).unwrap()
    }

    fn fixture_code() -> GrsCode {
        GrsCode::new(f11(), mds::MULTIPLIERS.to_vec(), mds::POINTS.to_vec(), 2).unwrap()
    }

    #[test]
    fn grs_generator_reproduces_printed_v() {
        assert_eq!(grs_generator(&fixture_code()), mat(&mds::V));
        let tiny = GrsCode::new(f11(), vec![1], vec![0], 1).unwrap();
        assert_eq!(grs_generator(&tiny), mat(&[[1]]));
    }

    #[test]
    fn dual_multipliers_reproduce_printed_lambda() {
        let code = fixture_code();
        let lambda = grs_dual_multipliers(&code);
        assert_eq!(lambda, mds::DUAL_MULTIPLIERS);
        let dual = grs_matrix(f11(), &lambda, code.points(), 3);
        assert_eq!(dual, mat(&mds::LAMBDA));
        assert!(grs_generator(&code).mul(&dual.transpose()).unwrap().is_zero());
    }

    #[test]
    fn dual_multipliers_two_points() {
        let code = GrsCode::new(f11(), vec![1, 1], vec![0, 1], 1).unwrap();
        // (0 - 1)^-1 = 10, (1 - 0)^-1 = 1
        assert_eq!(grs_dual_multipliers(&code), vec![10, 1]);
    }

    #[test]
    fn grs_code_validation() {
        let f = f11();
        assert_eq!(GrsCode::new(f, vec![1, 0], vec![1, 2], 1), Err(Error::ZeroMultiplier));
        assert_eq!(GrsCode::new(f, vec![1, 1], vec![2, 2], 1), Err(Error::DuplicatePoint));
        assert!(GrsCode::new(f, vec![1, 1], vec![2, 3], 3).is_err());
        assert!(GrsCode::new(f, vec![1; 12], (0..12).collect(), 2).is_err());
    }

    #[test]
    fn extension_reproduces_printed_h() {
        let choice = ExtensionChoice::new(
            mds::EXTRA_MULTIPLIERS.to_vec(),
            mds::EXTRA_POINTS.to_vec(),
            &fixtures::SUPPORT,
            10,
        )
        .unwrap();
        assert_eq!(choice.placement, mds::PLACEMENT);
        let h = extend_mds_grs(f11(), &mds::DUAL_MULTIPLIERS, &mds::POINTS, 3, 10, &choice).unwrap();
        assert_eq!(h, mat(&mds::H));
        assert!(h.is_mds().unwrap());
        assert_eq!(h.select_columns(&fixtures::SUPPORT).unwrap(), mat(&mds::LAMBDA));
    }

    #[test]
    fn extension_without_new_columns_is_a_permutation() {
        let support = [4usize, 0, 2, 1, 3];
        let choice = ExtensionChoice::new(vec![], vec![], &support, 5).unwrap();
        let h = extend_mds_grs(f11(), &mds::DUAL_MULTIPLIERS, &mds::POINTS, 3, 5, &choice).unwrap();
        // Canonical placement sorts the support, so H equals Lambda.
        assert_eq!(h, mat(&mds::LAMBDA));
    }

    #[test]
    fn extension_rejects_bad_choices() {
        let f = f11();
        let support = fixtures::SUPPORT;
        let clash = ExtensionChoice::new(vec![1; 5], vec![3, 1, 10, 2, 8], &support, 10).unwrap();
        assert_eq!(
            extend_mds_grs(f, &mds::DUAL_MULTIPLIERS, &mds::POINTS, 3, 10, &clash),
            Err(Error::DuplicatePoint)
        );
        let zero = ExtensionChoice::new(vec![0, 1, 1, 1, 1], mds::EXTRA_POINTS.to_vec(), &support, 10).unwrap();
        assert_eq!(
            extend_mds_grs(f, &mds::DUAL_MULTIPLIERS, &mds::POINTS, 3, 10, &zero),
            Err(Error::ZeroMultiplier)
        );
        let f7 = PrimeField::new(7).unwrap();
        let choice = ExtensionChoice::new(vec![1; 5], vec![0, 1, 2, 6, 5], &support, 10).unwrap();
        assert_eq!(
            extend_mds_grs(f7, &[1, 1, 1, 1, 1], &[3, 4, 5, 6, 0], 3, 10, &choice),
            Err(Error::InsufficientField { q: 7, needed: 10 })
        );
    }

    #[test]
    fn random_extension_choice_is_valid() {
        let mut rng = seeded(17);
        for _ in 0..50 {
            let c = ExtensionChoice::random(f11(), &fixtures::SUPPORT, 10, &mds::POINTS, &mut rng).unwrap();
            let h = extend_mds_grs(f11(), &mds::DUAL_MULTIPLIERS, &mds::POINTS, 3, 10, &c).unwrap();
            assert!(h.is_mds().unwrap());
        }
        assert_eq!(
            ExtensionChoice::random(f11(), &[0], 12, &[1], &mut rng),
            Err(Error::InsufficientField { q: 11, needed: 12 })
        );
    }

    #[test]
    fn generic_extension_examples() {
        let mut rng = seeded(5);
        let h = extend_mds_generic(&mat(&[[1, 1]]), 4, &mut rng, DEFAULT_MAX_RETRIES).unwrap();
        assert_eq!(h.shape(), (1, 4));
        assert!(h.row(0).iter().all(|&x| x != 0));
        assert_eq!(&h.row(0)[..2], &[1, 1]);

        let f2 = PrimeField::new(2).unwrap();
        let base = Matrix::from_rows(f2, &[[1u64, 1]]).unwrap();
        let h = extend_mds_generic(&base, 3, &mut rng, DEFAULT_MAX_RETRIES).unwrap();
        assert_eq!(h, Matrix::from_rows(f2, &[[1u64, 1, 1]]).unwrap());

        let lambda = mat(&mds::LAMBDA);
        let h = extend_mds_generic(&lambda, 10, &mut rng, DEFAULT_MAX_RETRIES).unwrap();
        assert!(h.is_mds().unwrap());
        assert_eq!(h.select_columns(&[0, 1, 2, 3, 4]).unwrap(), lambda);
    }

    #[test]
    fn generic_extension_fails_when_field_is_too_small() {
        // A [q+2, 2] MDS code does not exist over F_q.
        let f3 = PrimeField::new(3).unwrap();
        let base = Matrix::from_rows(f3, &[[1u64, 0], [0, 1]]).unwrap();
        let err = extend_mds_generic(&base, 6, &mut seeded(1), 16).unwrap_err();
        assert_eq!(err, Error::RetriesExhausted(16));
        let not_mds = Matrix::from_rows(f3, &[[1u64, 0]]).unwrap();
        assert!(matches!(extend_mds_generic(&not_mds, 3, &mut seeded(1), 4), Err(Error::NotMds(_))));
    }

    #[test]
    fn parity_to_generator_examples() {
        let g = parity_to_generator(&mat(&[[1, 1]])).unwrap();
        assert!(g.same_rowspace(&mat(&[[1, 10]])).unwrap());

        let g = parity_to_generator(&mat(&mds::H)).unwrap();
        assert_eq!(g.shape(), (7, 10));
        assert_eq!(g.rank(), 7);
        assert!(g.mul(&mat(&mds::H).transpose()).unwrap().is_zero());
        let printed = mat(&mds::G);
        assert!(printed.solve_in_rowspace(&g).unwrap().is_some());
        assert!(g.solve_in_rowspace(&printed).unwrap().is_some());

        assert!(matches!(
            parity_to_generator(&mat(&[[1, 1], [2, 2]])),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        ));
    }

    #[test]
    fn puncture_examples() {
        let id = Matrix::identity(f11(), 3);
        assert_eq!(puncture(&id, &[0, 2]).unwrap(), mat(&[[1, 0], [0, 0], [0, 1]]));
        assert_eq!(puncture(&id, &[0, 1, 2]).unwrap(), id);
        assert!(puncture(&id, &[3]).is_err());
        let g = mat(&mds::G);
        let p = puncture(&g, &fixtures::SUPPORT).unwrap();
        assert!(p.solve_in_rowspace(&mat(&mds::V)).unwrap().is_some());
    }

    #[test]
    fn supported_subcode_examples() {
        let id = Matrix::identity(f11(), 5);
        let s = supported_subcode(&id, &[1, 3]).unwrap();
        assert_eq!(s, id.select_rows(&[1, 3]).unwrap());

        let g = mat(&mds::G);
        let s = supported_subcode(&g, &fixtures::SUPPORT).unwrap();
        assert_eq!(s.rows(), 2);
        let p = puncture(&s, &fixtures::SUPPORT).unwrap();
        assert!(p.same_rowspace(&mat(&mds::V)).unwrap());
    }

    #[test]
    fn supported_subcode_every_five_subset_of_printed_g() {
        let g = mat(&mds::G);
        let mut count = 0;
        for s in (0..10).combinations(5) {
            let sub = supported_subcode(&g, &s).unwrap();
            assert_eq!(sub.rows(), 2, "subset {s:?}");
            assert!(puncture(&sub, &s).unwrap().is_mds().unwrap());
            count += 1;
        }
        assert_eq!(count, 252);
    }

    /// Counts codewords supported in `support` by enumerating all messages.
    fn supported_count_oracle(g: &Matrix, support: &[usize]) -> usize {
        let q = g.field().modulus();
        let k = g.rows();
        let total = q.pow(k as u32);
        (0..total)
            .filter(|&idx| {
                let mut x = idx;
                let msg: Vec<u64> = (0..k)
                    .map(|_| {
                        let d = x % q;
                        x /= q;
                        d
                    })
                    .collect();
                let m = Matrix::from_vec(g.field(), 1, k, msg).unwrap();
                let w = m.mul(g).unwrap();
                (0..g.cols()).all(|c| support.contains(&c) || w.get(0, c) == 0)
            })
            .count()
    }

    #[test]
    fn supported_subcode_against_enumeration() {
        let mut rng = seeded(11);
        for q in [2u64, 3, 5] {
            let f = PrimeField::new(q).unwrap();
            for _ in 0..10 {
                let g = Matrix::random(f, 3, 6, &mut rng);
                for s in (0..6).combinations(4) {
                    let sub = supported_subcode(&g, &s).unwrap();
                    let count = supported_count_oracle(&g, &s);
                    // Distinct messages can give the same codeword when g is rank-deficient.
                    let kernel = q.pow((g.rows() - g.rank()) as u32) as usize;
                    assert_eq!(q.pow(sub.rows() as u32) as usize * kernel, count);
                    assert!(g.solve_in_rowspace(&sub).unwrap().is_some());
                    for c in (0..6).filter(|c| !s.contains(c)) {
                        assert!((0..sub.rows()).all(|r| sub.get(r, c) == 0));
                    }
                }
            }
        }
    }

    #[test]
    fn recovery_polynomials_examples() {
        let c = recovery_polynomials(f11(), &mds::EXTRA_POINTS, 2).unwrap();
        assert_eq!(c, vec![mds::C1.to_vec(), mds::C2.to_vec()]);
        assert_eq!(recovery_polynomials(f11(), &[], 1).unwrap(), vec![vec![1]]);
        assert_eq!(recovery_polynomials(f11(), &[4], 1).unwrap(), vec![vec![7, 1]]);
        assert_eq!(recovery_polynomials(f11(), &[4, 4], 1), Err(Error::DuplicatePoint));
    }

    proptest! {
        #[test]
        fn grs_codes_are_mds_and_dual(q in prop::sample::select(vec![11u64, 13, 17]), n in 1usize..=10, seed: u64) {
            let f = PrimeField::new(q).unwrap();
            let mut rng = seeded(seed);
            let mut pts: Vec<u64> = (0..q).collect();
            for i in 0..n {
                let j = rng.random_range(i..pts.len());
                pts.swap(i, j);
            }
            pts.truncate(n);
            let mults: Vec<u64> = (0..n).map(|_| rng.random_range(1..q)).collect();
            let k = rng.random_range(1..=n);
            let code = GrsCode::new(f, mults, pts, k).unwrap();
            let g = grs_generator(&code);
            prop_assert!(g.is_mds().unwrap());
            let lambda = grs_dual_multipliers(&code);
            let h = grs_matrix(f, &lambda, code.points(), n - k);
            prop_assert!(g.mul(&h.transpose()).unwrap().is_zero());
            prop_assert!(h.is_mds().unwrap());
        }

        #[test]
        fn recovery_polynomials_vanish_on_points(seed: u64, m in 0usize..8, l in 1usize..4) {
            let f = PrimeField::new(13).unwrap();
            let mut rng = seeded(seed);
            let mut pts: Vec<u64> = (0..13).collect();
            for i in 0..m {
                let j = rng.random_range(i..13);
                pts.swap(i, j);
            }
            pts.truncate(m);
            let cs = recovery_polynomials(f, &pts, l).unwrap();
            for (idx, c) in cs.iter().enumerate() {
                prop_assert_eq!(c.len(), m + l);
                let degree = c.iter().rposition(|&x| x != 0).unwrap();
                prop_assert_eq!(degree, m + idx);
                for &p in &pts {
                    prop_assert_eq!(eval_poly(f, c, p), 0);
                }
            }
        }
    }
}
