//! Hypothesis pairs and divergence functionals.
//!
//! The null is always `N(0, I)`. An alternative is a pair `(a, M)` with mean
//! vector `a` and positive-definite covariance `M`. The divergence from the
//! null in the eigenbasis of `M` reduces to per-coordinate terms
//! `ln l_i + 1/l_i - 1 + a_i^2/l_i`, and the variance of the log likelihood
//! ratio under the null reduces to `(1 - 1/l_i)^2 + 2 a_i^2 / l_i^2`. General
//! covariances are rotated to that basis first; the rotation leaves the null
//! distribution invariant, so nothing is lost.

use crate::error::{Error, Result};
use crate::pdlinalg::{
    self, cholesky, eigen_sym, solve_pd, textio, SymMatrix, DEFAULT_PD_TOL,
};

/// Tolerance under which a pair counts as the null itself.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Covariance of an alternative: symmetric positive definite, dense or
/// diagonal storage.
pub type CovarianceSpec = SymMatrix;

/// Alternative hypothesis `(a, M)`: mean and positive-definite covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    mean: Vec<f64>,
    cov: SymMatrix,
}

/// Candidate pair `(b, V)` queried against a reference pair. Structurally the
/// same data; the role is positional.
pub type CandidatePair = HypothesisPair;

impl HypothesisPair {
    /// Validates dimensions and positive definiteness at the default
    /// tolerance.
    pub fn new(mean: Vec<f64>, cov: SymMatrix) -> Result<Self> {
        Self::with_tol(mean, cov, DEFAULT_PD_TOL)
    }

    pub fn with_tol(mean: Vec<f64>, cov: SymMatrix, pd_tol: f64) -> Result<Self> {
        if mean.len() != cov.order() {
            return Err(Error::DimensionMismatch {
                expected: cov.order(),
                got: mean.len(),
            });
        }
        cholesky(&cov, pd_tol)?;
        Ok(Self { mean, cov })
    }

    /// The distinguished null pair `(0, I)`.
    pub fn null(n: usize) -> Self {
        Self {
            mean: vec![0.0; n],
            cov: SymMatrix::identity(n),
        }
    }

    /// Zero-mean pair.
    pub fn zero_mean(cov: SymMatrix) -> Result<Self> {
        Self::new(vec![0.0; cov.order()], cov)
    }

    /// Diagonal-covariance pair.
    pub fn diagonal(mean: Vec<f64>, lambdas: Vec<f64>) -> Result<Self> {
        Self::new(mean, SymMatrix::from_diagonal(lambdas)?)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &SymMatrix {
        &self.cov
    }

    /// Whether the pair coincides with `(0, I)` to within `tol`.
    pub fn is_null(&self, tol: f64) -> bool {
        if self.mean.iter().any(|a| a.abs() > tol) {
            return false;
        }
        if let Some(d) = self.cov.diagonal() {
            d.iter().all(|&x| (x - 1.0).abs() <= tol)
        } else {
            let n = self.dim();
            (0..n).all(|i| {
                (0..n).all(|j| {
                    let target = if i == j { 1.0 } else { 0.0 };
                    (self.cov.get(i, j) - target).abs() <= tol
                })
            })
        }
    }

    /// Eigenvalues of the covariance and the mean rotated into its
    /// eigenbasis. Diagonal covariances pass through unchanged.
    pub(crate) fn spectrum_and_rotated_mean(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if let Some(d) = self.cov.diagonal() {
            Ok((d.to_vec(), self.mean.clone()))
        } else {
            let e = eigen_sym(&self.cov)?;
            let rotated = e.basis.apply_transpose(&self.mean);
            Ok((e.eigenvalues, rotated))
        }
    }
}

/// Divergence of the null from a pair, with the per-coordinate breakdown on
/// the diagonal path.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    /// `D(P_I || Q_{a,M})` in nats.
    pub kl: f64,
    /// Terms `ln l_i + 1/l_i - 1 + a_i^2/l_i`; filled on the diagonal path
    /// only. The divergence is half their sum.
    pub per_coordinate: Option<Vec<f64>>,
    /// Variance of the log likelihood ratio under the null.
    pub ll_variance: f64,
}

/// `D(P_I || Q_{a,M}) = 1/2 [ sum_i (ln l_i + 1/l_i - 1) + a' M^{-1} a ]`.
///
/// Diagonal covariances use the per-coordinate form directly; dense ones go
/// through the eigendecomposition for the spectrum part and a solve for the
/// quadratic term.
pub fn kl_null_vs(pair: &HypothesisPair) -> Result<DivergenceReport> {
    if let Some(lambdas) = pair.cov.diagonal() {
        let a = pair.mean();
        let mut terms = Vec::with_capacity(lambdas.len());
        let mut var = 0.0;
        for (&l, &ai) in lambdas.iter().zip(a) {
            terms.push(l.ln() + 1.0 / l - 1.0 + ai * ai / l);
            let c = 1.0 - 1.0 / l;
            var += c * c + 2.0 * ai * ai / (l * l);
        }
        let kl = 0.5 * terms.iter().sum::<f64>();
        Ok(DivergenceReport {
            kl: kl.max(0.0),
            per_coordinate: Some(terms),
            ll_variance: 0.5 * var,
        })
    } else {
        let e = eigen_sym(&pair.cov)?;
        let spectrum_part: f64 = e.eigenvalues.iter().map(|&l| l.ln() + 1.0 / l - 1.0).sum();
        let m_inv_a = solve_pd(&pair.cov, pair.mean(), DEFAULT_PD_TOL)?;
        let quad: f64 = pair.mean().iter().zip(&m_inv_a).map(|(a, x)| a * x).sum();
        let kl = 0.5 * (spectrum_part + quad);
        let rotated = e.basis.apply_transpose(pair.mean());
        let var: f64 = e
            .eigenvalues
            .iter()
            .zip(&rotated)
            .map(|(&l, &ai)| {
                let c = 1.0 - 1.0 / l;
                c * c + 2.0 * ai * ai / (l * l)
            })
            .sum();
        Ok(DivergenceReport {
            kl: kl.max(0.0),
            per_coordinate: None,
            ll_variance: 0.5 * var,
        })
    }
}

/// Variance of the log likelihood ratio under the null:
/// `1/2 sum_i [ (1 - 1/l_i)^2 + 2 a_i^2 / l_i^2 ]` in the eigenbasis of `M`.
pub fn ll_variance(pair: &HypothesisPair) -> Result<f64> {
    let (lambdas, a) = pair.spectrum_and_rotated_mean()?;
    Ok(0.5
        * lambdas
            .iter()
            .zip(&a)
            .map(|(&l, &ai)| {
                let c = 1.0 - 1.0 / l;
                c * c + 2.0 * ai * ai / (l * l)
            })
            .sum::<f64>())
}

/// Whether the log-likelihood-ratio variance is controlled by the divergence:
/// `Var <= C^2 D`. A zero-divergence pair (necessarily zero variance) passes.
pub fn check_condition_iii(pair: &HypothesisPair, c: f64) -> Result<bool> {
    let report = kl_null_vs(pair)?;
    Ok(report.ll_variance <= c * c * report.kl)
}

/// Per-size diagnostics for a family of pairs indexed by growing `n`.
#[derive(Debug, Clone)]
pub struct AssumptionRow {
    pub n: usize,
    /// `(1/n) sum_i (ln l_i + 1/l_i - 1)`
    pub spectrum_mean: f64,
    /// `(1/n) sum_i |1/l_i - 1|^{1+delta}`
    pub moment_mean: f64,
}

/// Finite-size trend report for the asymptotic regularity assumptions.
///
/// Advisory only: the underlying assumptions are limits, so the report flags
/// suspicious trends rather than returning verdicts.
#[derive(Debug, Clone)]
pub struct AssumptionDiagnostics {
    pub rows: Vec<AssumptionRow>,
    /// Raised when successive spectrum means differ by more than the Cauchy
    /// tolerance, i.e. the sequence shows no sign of settling.
    pub spectrum_limit_flag: bool,
    /// Raised when the scaled moment sums grow with non-decreasing increments
    /// above the tolerance, the finite-size signature of divergence.
    pub moment_bound_flag: bool,
    pub cauchy_tol: f64,
    pub delta: f64,
}

/// Default Cauchy tolerance for successive differences of the spectrum-mean
/// sequence.
pub const DEFAULT_CAUCHY_TOL: f64 = 1e-3;

/// Tabulates the two scaled sums behind the regularity assumptions at each
/// provided size and flags non-settling behavior.
pub fn check_assumptions(
    family: &[HypothesisPair],
    delta: f64,
    cauchy_tol: f64,
) -> Result<AssumptionDiagnostics> {
    if delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let mut rows = Vec::with_capacity(family.len());
    let mut last_n = 0usize;
    for pair in family {
        let n = pair.dim();
        if n <= last_n {
            return Err(Error::InvalidParameter(
                "family sizes must be strictly increasing".into(),
            ));
        }
        last_n = n;
        let (lambdas, _) = pair.spectrum_and_rotated_mean()?;
        let spectrum_sum: f64 = lambdas.iter().map(|&l| l.ln() + 1.0 / l - 1.0).sum();
        let moment_sum: f64 = lambdas
            .iter()
            .map(|&l| (1.0 / l - 1.0).abs().powf(1.0 + delta))
            .sum();
        rows.push(AssumptionRow {
            n,
            spectrum_mean: spectrum_sum / n as f64,
            moment_mean: moment_sum / n as f64,
        });
    }

    let diffs =
        |get: fn(&AssumptionRow) -> f64| -> Vec<f64> { rows.windows(2).map(|w| get(&w[1]) - get(&w[0])).collect() };

    let s1_diffs = diffs(|r| r.spectrum_mean);
    let spectrum_limit_flag = s1_diffs.iter().any(|d| d.abs() > cauchy_tol);

    let s2_diffs = diffs(|r| r.moment_mean);
    // divergence signature: increments stay above tolerance and do not shrink
    let moment_bound_flag = s2_diffs.len() >= 2
        && s2_diffs.iter().all(|&d| d > cauchy_tol)
        && s2_diffs.windows(2).all(|w| w[1] >= w[0] - cauchy_tol * 0.5);

    Ok(AssumptionDiagnostics {
        rows,
        spectrum_limit_flag,
        moment_bound_flag,
        cauchy_tol,
        delta,
    })
}

/// Pair text format: a line `mean a_1 ... a_n` followed by the matrix block.
pub fn format_pair(pair: &HypothesisPair) -> String {
    let mean: Vec<String> = pair.mean().iter().map(|x| format!("{x}")).collect();
    format!("mean {}\n{}", mean.join(" "), textio::format_matrix(pair.cov()))
}

pub fn parse_pair(text: &str) -> Result<HypothesisPair> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let first = lines
        .first()
        .ok_or_else(|| Error::Parse("empty pair block".into()))?
        .trim();
    let rest = first
        .strip_prefix("mean")
        .ok_or_else(|| Error::Parse("pair block must start with a `mean` line".into()))?;
    let mean: Vec<f64> = rest
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid real `{t}`")))
        })
        .collect::<Result<_>>()?;
    let (cov, used) = textio::parse_matrix_lines(&lines[1..])?;
    if 1 + used != lines.len() {
        return Err(Error::Parse("trailing content after pair block".into()));
    }
    HypothesisPair::new(mean, cov)
}

/// Reads a pair from a file.
pub fn read_pair(path: &std::path::Path) -> Result<HypothesisPair> {
    parse_pair(&std::fs::read_to_string(path)?)
}

pub use pdlinalg::CholFactor;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc;
    use crate::pdlinalg::random_orthogonal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y} (tol {tol})");
    }

    /// Monte Carlo oracle for the divergence: sample mean of
    /// `ln p_I(z) - ln p_{a,M}(z)` under the null, written out directly from
    /// the two densities. Independent of the closed-form path under test.
    fn mc_kl_oracle_1d(a: f64, lambda: f64, n: u64, seed: u64) -> (f64, f64) {
        let vals = mc::collect_statistic(n, seed, 0xbeef, 1, |z| {
            let y = z[0];
            let log_p = -0.5 * y * y;
            let log_q = -0.5 * (lambda.ln() + (y - a) * (y - a) / lambda);
            log_p - log_q
        });
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        (mean, (var / n as f64).sqrt())
    }

    /// Same oracle for the variance of the log ratio.
    fn mc_var_oracle_1d(a: f64, lambda: f64, n: u64, seed: u64) -> (f64, f64) {
        let vals = mc::collect_statistic(n, seed, 0xbeef, 1, |z| {
            let y = z[0];
            let log_p = -0.5 * y * y;
            let log_q = -0.5 * (lambda.ln() + (y - a) * (y - a) / lambda);
            log_p - log_q
        });
        let nf = n as f64;
        let mean = vals.iter().sum::<f64>() / nf;
        let centered: Vec<f64> = vals.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = centered.iter().sum::<f64>() / (nf - 1.0);
        // std error of the sample variance via its fourth moment
        let m4 = centered.iter().map(|c| c * c).sum::<f64>() / nf;
        let se = ((m4 - var * var).max(0.0) / nf).sqrt();
        (var, se)
    }

    #[test]
    fn kl_of_null_is_zero() {
        let report = kl_null_vs(&HypothesisPair::null(4)).unwrap();
        assert_eq!(report.kl, 0.0);
        assert_eq!(report.ll_variance, 0.0);
    }

    #[test]
    fn kl_pure_variance_case_matches_mc_oracle() {
        let pair = HypothesisPair::diagonal(vec![0.0], vec![2.0]).unwrap();
        let report = kl_null_vs(&pair).unwrap();
        let expected = 0.5 * (2.0_f64.ln() + 0.5 - 1.0);
        assert_close(report.kl, expected, 1e-14);
        assert!((report.kl - 0.09657).abs() < 5e-6);

        let (mc, se) = mc_kl_oracle_1d(0.0, 2.0, 10_000_000, 21);
        assert!(
            (report.kl - mc).abs() <= 3.0 * se,
            "kl {} vs mc {mc} ± {se}",
            report.kl
        );
    }

    #[test]
    fn kl_pure_mean_shift_matches_mc_oracle() {
        let pair = HypothesisPair::diagonal(vec![1.0], vec![1.0]).unwrap();
        let report = kl_null_vs(&pair).unwrap();
        assert_close(report.kl, 0.5, 1e-14);
        let (mc, se) = mc_kl_oracle_1d(1.0, 1.0, 10_000_000, 22);
        assert!((0.5 - mc).abs() <= 3.0 * se);
    }

    #[test]
    fn ll_variance_examples() {
        assert_eq!(
            ll_variance(&HypothesisPair::null(3)).unwrap(),
            0.0
        );

        let pair = HypothesisPair::diagonal(vec![0.0], vec![2.0]).unwrap();
        let v = ll_variance(&pair).unwrap();
        assert_close(v, 0.125, 1e-14);
        let (mc, se) = mc_var_oracle_1d(0.0, 2.0, 10_000_000, 31);
        assert!((v - mc).abs() <= 3.0 * se, "{v} vs {mc} ± {se}");

        let pair = HypothesisPair::diagonal(vec![1.0], vec![1.0]).unwrap();
        let v = ll_variance(&pair).unwrap();
        assert_close(v, 1.0, 1e-14);
        let (mc, se) = mc_var_oracle_1d(1.0, 1.0, 10_000_000, 32);
        assert!((v - mc).abs() <= 3.0 * se);
    }

    #[test]
    fn condition_iii_examples() {
        assert!(check_condition_iii(&HypothesisPair::null(2), 1.0).unwrap());

        let pair = HypothesisPair::diagonal(vec![1.0], vec![1.0]).unwrap();
        assert!(check_condition_iii(&pair, 2.0).unwrap()); // 1 <= 4 * 0.5

        let pair = HypothesisPair::diagonal(vec![0.0], vec![2.0]).unwrap();
        assert!(!check_condition_iii(&pair, 0.5).unwrap()); // 0.125 > 0.25 * 0.09657
    }

    #[test]
    fn kl_nonnegative_and_zero_only_at_null() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = 1 + (rand::Rng::random::<u64>(&mut rng) % 6) as usize;
            let lambdas: Vec<f64> = (0..n)
                .map(|_| 0.2 + 3.0 * rand::Rng::random::<f64>(&mut rng))
                .collect();
            let mean: Vec<f64> = (0..n)
                .map(|_| 2.0 * rand::Rng::random::<f64>(&mut rng) - 1.0)
                .collect();
            let pair = HypothesisPair::diagonal(mean.clone(), lambdas.clone()).unwrap();
            let report = kl_null_vs(&pair).unwrap();
            assert!(report.kl >= 0.0);
            let is_null_pair = mean.iter().all(|a| a.abs() < 1e-9)
                && lambdas.iter().all(|l| (l - 1.0).abs() < 1e-9);
            if report.kl < 1e-12 {
                assert!(is_null_pair);
            }
        }
    }

    #[test]
    fn kl_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &n in &[2usize, 3, 6] {
            let lambdas: Vec<f64> = (0..n)
                .map(|_| 0.4 + 2.0 * rand::Rng::random::<f64>(&mut rng))
                .collect();
            let mean: Vec<f64> = (0..n)
                .map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5)
                .collect();
            let pair = HypothesisPair::diagonal(mean.clone(), lambdas.clone()).unwrap();
            let report = kl_null_vs(&pair).unwrap();

            let t = random_orthogonal(n, &mut rng);
            let rotated_cov = t.conjugate_diagonal(&lambdas).unwrap();
            let rotated_mean = t.apply(&mean);
            let rotated = HypothesisPair::new(rotated_mean, rotated_cov).unwrap();
            let rotated_report = kl_null_vs(&rotated).unwrap();

            assert!(
                (report.kl - rotated_report.kl).abs() <= 1e-9 * report.kl.max(1.0),
                "n={n}: {} vs {}",
                report.kl,
                rotated_report.kl
            );
            assert!(
                (report.ll_variance - rotated_report.ll_variance).abs()
                    <= 1e-9 * report.ll_variance.max(1.0)
            );
        }
    }

    #[test]
    fn diagonal_fast_path_matches_dense_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let n = 1 + (rand::Rng::random::<u64>(&mut rng) % 8) as usize;
            let lambdas: Vec<f64> = (0..n)
                .map(|_| 0.3 + 2.5 * rand::Rng::random::<f64>(&mut rng))
                .collect();
            let mean: Vec<f64> = (0..n)
                .map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5)
                .collect();
            let diag_pair = HypothesisPair::diagonal(mean.clone(), lambdas.clone()).unwrap();
            let dense_pair = HypothesisPair::new(
                mean,
                SymMatrix::from_diagonal(lambdas).unwrap().densified(),
            )
            .unwrap();
            let a = kl_null_vs(&diag_pair).unwrap();
            let b = kl_null_vs(&dense_pair).unwrap();
            assert!((a.kl - b.kl).abs() <= 1e-10 * a.kl.max(1.0));
            assert!(a.per_coordinate.is_some());
            assert!(b.per_coordinate.is_none());
            let half_sum = 0.5 * a.per_coordinate.unwrap().iter().sum::<f64>();
            assert!((half_sum - a.kl).abs() <= 1e-10 * a.kl.max(1.0));
        }
    }

    #[test]
    fn assumptions_constant_identity_family() {
        let family: Vec<HypothesisPair> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| HypothesisPair::null(n))
            .collect();
        let d = check_assumptions(&family, 1.0, DEFAULT_CAUCHY_TOL).unwrap();
        assert!(d.rows.iter().all(|r| r.spectrum_mean == 0.0 && r.moment_mean == 0.0));
        assert!(!d.spectrum_limit_flag);
        assert!(!d.moment_bound_flag);
    }

    #[test]
    fn assumptions_alternating_block_family_is_flat() {
        let family: Vec<HypothesisPair> = [4usize, 8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let lambdas: Vec<f64> =
                    (0..n).map(|i| if i % 2 == 0 { 2.0 } else { 0.5 }).collect();
                HypothesisPair::diagonal(vec![0.0; n], lambdas).unwrap()
            })
            .collect();
        let d = check_assumptions(&family, 1.0, DEFAULT_CAUCHY_TOL).unwrap();
        let expected =
            0.5 * (2.0_f64.ln() + 0.5 - 1.0 + 0.5_f64.ln() + 2.0 - 1.0);
        for row in &d.rows {
            assert_close(row.spectrum_mean, expected, 1e-12);
        }
        assert!(!d.spectrum_limit_flag);
        assert!(!d.moment_bound_flag);
    }

    #[test]
    fn assumptions_growing_spectrum_raises_limit_flag_only() {
        // l_i = i: the scaled moment sum tends to 1 (bounded) while the
        // scaled spectrum sum grows like ln n, so only the first flag fires.
        let family: Vec<HypothesisPair> = [8usize, 16, 32, 64, 128]
            .iter()
            .map(|&n| {
                let lambdas: Vec<f64> = (1..=n).map(|i| i as f64).collect();
                HypothesisPair::diagonal(vec![0.0; n], lambdas).unwrap()
            })
            .collect();
        let d = check_assumptions(&family, 1.0, DEFAULT_CAUCHY_TOL).unwrap();
        assert!(d.spectrum_limit_flag);
        assert!(!d.moment_bound_flag);
        let last = d.rows.last().unwrap();
        assert!(last.moment_mean < 1.0);
    }

    #[test]
    fn assumptions_exploding_moments_raise_bound_flag() {
        // l_i = 1/i makes |1/l - 1|^2 grow quadratically
        let family: Vec<HypothesisPair> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| {
                let lambdas: Vec<f64> = (1..=n).map(|i| 1.0 / i as f64).collect();
                HypothesisPair::diagonal(vec![0.0; n], lambdas).unwrap()
            })
            .collect();
        let d = check_assumptions(&family, 1.0, DEFAULT_CAUCHY_TOL).unwrap();
        assert!(d.moment_bound_flag);
    }

    #[test]
    fn pair_text_roundtrip() {
        let pair = HypothesisPair::diagonal(vec![1.0, -0.5], vec![2.0, 0.5]).unwrap();
        let s = format_pair(&pair);
        let back = parse_pair(&s).unwrap();
        assert_eq!(pair, back);

        let dense = HypothesisPair::new(
            vec![0.0, 1.0],
            SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
        )
        .unwrap();
        let back = parse_pair(&format_pair(&dense)).unwrap();
        assert_eq!(dense, back);

        assert!(parse_pair("2\n1 0\n0 1").is_err());
        // non-PD covariance rejected at parse
        assert!(parse_pair("mean 0\ndiag 1\n-1").is_err());
    }

    #[test]
    fn pair_construction_validates() {
        assert!(matches!(
            HypothesisPair::diagonal(vec![0.0, 0.0], vec![1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            HypothesisPair::diagonal(vec![0.0], vec![-1.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(HypothesisPair::null(3).is_null(1e-12));
    }
}
