//! Replaceability of one alternative pair by another.
//!
//! For a reference pair `(a, M)` and a candidate `(b, V)` define
//!
//! ```text
//! B = I + V^{-1} - M^{-1}
//! d = B^{-1} (V^{-1} b - M^{-1} a)
//! K = b' V^{-1} b - a' M^{-1} a - d' B d
//! ln f = ln|M| - ln|V| - ln|B| - K      (when B is positive definite)
//! ```
//!
//! `f` is the squared expectation under the null of the candidate-to-reference
//! density ratio: `E_I[ p_{b,V} / p_{a,M} ] = f^{1/2}` when `B > 0`, and the
//! expectation is infinite otherwise. A candidate can replace the reference
//! without degrading the detection exponent exactly when `ln f` stays below
//! an asymptotically negligible allowance; the finite-size oracle here takes
//! that allowance as an explicit `slack` parameter (`slack = 0` queries the
//! core set, `c * sqrt(n)` is the conventional scaled preset).
//!
//! `K` is evaluated through solves against the Cholesky factors, never
//! through explicit inverse-matrix products, which keeps the dense path
//! accurate at order 256. Near-singular `B` (smallest pivot within the scaled
//! tolerance) is classified as infinite, the conservative reading.

use crate::error::{Error, Result};
use crate::hypotheses::{CandidatePair, HypothesisPair};
use crate::lrtest::LogLr;
use crate::mc::{self, salt, LogMeanEstimate};
use crate::pdlinalg::{cholesky, inverse_pd, is_pd, SymMatrix, DEFAULT_PD_TOL};

/// Full evaluation of the replaceability functional at one candidate.
#[derive(Debug, Clone)]
pub struct FReport {
    /// `ln f`, or `+inf` when `B` is not positive definite.
    pub log_f: f64,
    /// `B = I + V^{-1} - M^{-1}`.
    pub b_matrix: SymMatrix,
    /// `d = B^{-1}(V^{-1} b - M^{-1} a)`; present only on the finite branch.
    pub d: Option<Vec<f64>>,
    /// The exponent correction `K`; present only on the finite branch.
    pub k: Option<f64>,
    /// Whether `B` passed the positive-definiteness test.
    pub b_pd: bool,
}

/// Membership verdict for the maximal-set oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipStatus {
    Member,
    NonMember,
    /// `B` is not positive definite: the defining expectation diverges.
    Infinite,
}

impl std::fmt::Display for MembershipStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MembershipStatus::Member => write!(f, "member"),
            MembershipStatus::NonMember => write!(f, "non_member"),
            MembershipStatus::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    /// `ln f` (or `+inf`).
    pub log_f: f64,
    pub slack_used: f64,
}

fn check_dims(reference: &HypothesisPair, candidate: &CandidatePair) -> Result<()> {
    if reference.dim() != candidate.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            got: candidate.dim(),
        });
    }
    Ok(())
}

/// Evaluates `B`, `d`, `K` and `ln f` for a candidate against a reference.
///
/// A non-positive-definite `B` is the infinite branch, reported with
/// `log_f = +inf` rather than as an error; errors are reserved for defective
/// `M` or `V`.
pub fn f_report(
    reference: &HypothesisPair,
    candidate: &CandidatePair,
    pd_tol: f64,
) -> Result<FReport> {
    check_dims(reference, candidate)?;
    let n = reference.dim();
    let m = reference.cov();
    let v = candidate.cov();

    // diagonal fast path: per-entry formulas, no factorization
    if let (Some(lambdas), Some(nus)) = (m.diagonal(), v.diagonal()) {
        // grouping the reciprocals first keeps mu exactly 1 when V = M
        let mus: Vec<f64> = lambdas
            .iter()
            .zip(nus)
            .map(|(&l, &nu)| 1.0 + (1.0 / nu - 1.0 / l))
            .collect();
        let b_matrix = SymMatrix::from_diagonal(mus.clone())?;
        if !is_pd(&b_matrix, pd_tol) {
            return Ok(FReport {
                log_f: f64::INFINITY,
                b_matrix,
                d: None,
                k: None,
                b_pd: false,
            });
        }
        let a = reference.mean();
        let b = candidate.mean();
        let mut k = 0.0;
        let mut log_f = 0.0;
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let rhs = b[i] / nus[i] - a[i] / lambdas[i];
            d.push(rhs / mus[i]);
            k += b[i] * b[i] / nus[i] - a[i] * a[i] / lambdas[i] - rhs * rhs / mus[i];
            log_f += (lambdas[i] / (nus[i] * mus[i])).ln();
        }
        return Ok(FReport {
            log_f: log_f - k,
            b_matrix,
            d: Some(d),
            k: Some(k),
            b_pd: true,
        });
    }

    // general path
    let m_chol = cholesky(m, pd_tol)?;
    let v_chol = cholesky(v, pd_tol)?;
    let m_inv = inverse_pd(m, pd_tol)?;
    let v_inv = inverse_pd(v, pd_tol)?;

    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut x = v_inv.get(i, j) - m_inv.get(i, j);
            if i == j {
                x += 1.0;
            }
            entries[i * n + j] = x;
        }
    }
    let b_matrix = SymMatrix::from_dense(n, entries)?;

    let b_chol = match cholesky(&b_matrix, pd_tol) {
        Ok(c) => c,
        Err(Error::NotPositiveDefinite { .. }) => {
            return Ok(FReport {
                log_f: f64::INFINITY,
                b_matrix,
                d: None,
                k: None,
                b_pd: false,
            });
        }
        Err(e) => return Err(e),
    };

    // K through solves: V^{-1}b and M^{-1}a from the factors of V and M,
    // d from the factor of B; d'Bd collapses to d'rhs.
    let v_inv_b = v_chol.solve(candidate.mean())?;
    let m_inv_a = m_chol.solve(reference.mean())?;
    let rhs: Vec<f64> = v_inv_b.iter().zip(&m_inv_a).map(|(x, y)| x - y).collect();
    let d = b_chol.solve(&rhs)?;
    let quad_b: f64 = candidate.mean().iter().zip(&v_inv_b).map(|(x, y)| x * y).sum();
    let quad_a: f64 = reference.mean().iter().zip(&m_inv_a).map(|(x, y)| x * y).sum();
    let d_b_d: f64 = d.iter().zip(&rhs).map(|(x, y)| x * y).sum();
    let k = quad_b - quad_a - d_b_d;

    let log_f = m_chol.log_det() - v_chol.log_det() - b_chol.log_det() - k;
    Ok(FReport {
        log_f,
        b_matrix,
        d: Some(d),
        k: Some(k),
        b_pd: true,
    })
}

/// Diagonal form of `ln f`:
/// `mu_i = 1 + 1/nu_i - 1/l_i`; infinite when any `mu_i` falls within the
/// scaled tolerance of zero; otherwise
/// `sum_i ln(l_i / (nu_i mu_i)) - K` with
/// `K = sum_i [ b_i^2/nu_i - a_i^2/l_i - (b_i/nu_i - a_i/l_i)^2 / mu_i ]`.
pub fn log_f_diag(
    lambdas: &[f64],
    a: &[f64],
    nus: &[f64],
    b: &[f64],
    pd_tol: f64,
) -> Result<f64> {
    let n = lambdas.len();
    for (name, v) in [("a", a.len()), ("nus", nus.len()), ("b", b.len())] {
        if v != n {
            return Err(Error::InvalidParameter(format!(
                "{name} has length {v}, expected {n}"
            )));
        }
    }
    if let Some(&bad) = lambdas.iter().chain(nus).find(|&&x| x <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigenvalues must be positive, got {bad}"
        )));
    }
    let mus: Vec<f64> = lambdas
        .iter()
        .zip(nus)
        .map(|(&l, &nu)| 1.0 + (1.0 / nu - 1.0 / l))
        .collect();
    let scale = mus.iter().fold(0.0_f64, |m, &x| m.max(x.abs())).max(1.0);
    if mus.iter().any(|&mu| mu <= pd_tol * scale) {
        return Ok(f64::INFINITY);
    }
    let mut k = 0.0;
    let mut log_f = 0.0;
    for i in 0..n {
        let rhs = b[i] / nus[i] - a[i] / lambdas[i];
        k += b[i] * b[i] / nus[i] - a[i] * a[i] / lambdas[i] - rhs * rhs / mus[i];
        log_f += (lambdas[i] / (nus[i] * mus[i])).ln();
    }
    Ok(log_f - k)
}

/// Membership oracle: the candidate belongs to the maximal set at the given
/// allowance exactly when `B` is positive definite and `ln f <= slack`.
pub fn membership(
    reference: &HypothesisPair,
    candidate: &CandidatePair,
    slack: f64,
    pd_tol: f64,
) -> Result<MembershipVerdict> {
    if slack < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "slack must be nonnegative, got {slack}"
        )));
    }
    let report = f_report(reference, candidate, pd_tol)?;
    let status = if !report.b_pd {
        MembershipStatus::Infinite
    } else if report.log_f <= slack {
        MembershipStatus::Member
    } else {
        MembershipStatus::NonMember
    };
    Ok(MembershipVerdict {
        status,
        log_f: report.log_f,
        slack_used: slack,
    })
}

/// Monte Carlo verification statistic for the expectation
/// `E_I[ p_{b,V} / p_{a,M} ]`.
#[derive(Debug, Clone)]
pub struct RatioMcReport {
    pub estimate: LogMeanEstimate,
    /// Whether `B` is positive definite. When false the expectation is
    /// infinite: the running average has no limit and typically grows with
    /// the sample count.
    pub b_pd: bool,
}

/// Averages `exp(ln p_{b,V}(xi) - ln p_{a,M}(xi))` over null draws with
/// streaming log-sum-exp accumulation.
///
/// Runs regardless of whether `B` is positive definite; the report carries
/// the `b_pd` flag so a divergent configuration is visible to the caller.
pub fn expected_ratio_mc(
    reference: &HypothesisPair,
    candidate: &CandidatePair,
    n_samples: u64,
    seed: u64,
) -> Result<RatioMcReport> {
    check_dims(reference, candidate)?;
    if n_samples == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let b_pd = f_report(reference, candidate, DEFAULT_PD_TOL)?.b_pd;
    // ln(p_cand / p_ref) = r_ref - r_cand
    let r_ref = LogLr::new(reference)?;
    let r_cand = LogLr::new(candidate)?;
    let estimate = mc::log_mean_exp(n_samples, seed, salt::RATIO, reference.dim(), |z| {
        r_ref.eval(z) - r_cand.eval(z)
    });
    Ok(RatioMcReport { estimate, b_pd })
}

/// Exponent correction for candidates sharing the reference covariance
/// (unknown-mean case): with `V = M` diagonal with eigenvalues `l_i`,
/// `K = sum_i [ (b_i^2 - a_i^2)/l_i - (b_i - a_i)^2 / l_i^2 ]` and
/// `ln f = -K`, so membership at a given slack is `K >= -slack`.
pub fn k_unknown_mean(lambdas: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != lambdas.len() || b.len() != lambdas.len() {
        return Err(Error::DimensionMismatch {
            expected: lambdas.len(),
            got: if a.len() != lambdas.len() { a.len() } else { b.len() },
        });
    }
    if let Some(&bad) = lambdas.iter().find(|&&x| x <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigenvalues must be positive, got {bad}"
        )));
    }
    Ok(lambdas
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&l, (&ai, &bi))| (bi * bi - ai * ai) / l - (bi - ai) * (bi - ai) / (l * l))
        .sum())
}

/// `ln f` for zero-mean pairs: `ln|M| - ln|V| - ln|I + V^{-1} - M^{-1}|`,
/// or `+inf` on the non-positive-definite branch.
pub fn log_f_zero_mean(m: &SymMatrix, v: &SymMatrix, pd_tol: f64) -> Result<f64> {
    let reference = HypothesisPair::with_tol(vec![0.0; m.order()], m.clone(), pd_tol)?;
    let candidate = HypothesisPair::with_tol(vec![0.0; v.order()], v.clone(), pd_tol)?;
    Ok(f_report(&reference, &candidate, pd_tol)?.log_f)
}
