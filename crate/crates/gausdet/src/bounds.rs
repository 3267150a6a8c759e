//! Analytic sandwich on the log miss probability.
//!
//! For the optimal level-`alpha` test of the null against a pair with
//! divergence `D`,
//!
//! ```text
//! -(D + h(alpha)) / (1 - alpha)  <=  ln beta(alpha)  <=  -D + mu0(alpha)
//! ```
//!
//! where `h` is the binary entropy in nats and `mu0` is the gap between `D`
//! and the `alpha`-quantile of the log likelihood ratio under the null. Three
//! routes to `mu0` are provided: a moment-inequality upper bound with
//! exponent `p` in `(1, 2]`, the empirical quantile gap, and the Chebyshev
//! form `C sqrt(D / alpha)` valid when the log-ratio variance is controlled
//! by the divergence.
//!
//! The report never clamps `lower <= upper`: a loose `mu0` can cross the
//! lower bound and the report must show that honestly.

use crate::error::{Error, Result};
use crate::hypotheses::{check_condition_iii, kl_null_vs, HypothesisPair};
use crate::lrtest::calibrate_threshold;

/// Default moment exponent for [`mu0_lemma1`] given the regularity exponent
/// `delta` of the family: `min(2, 1 + delta)`. The moment inequality behind
/// the bound caps the exponent at 2.
pub fn default_moment_exponent(delta: f64) -> f64 {
    (1.0 + delta).min(2.0)
}

/// Binary entropy in nats: `h(a) = -a ln a - (1-a) ln(1-a)`.
pub fn binary_entropy(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(-alpha * alpha.ln() - (1.0 - alpha) * (1.0 - alpha).ln())
}

/// Lower bound: `ln beta(alpha) >= -(D + h(alpha)) / (1 - alpha)`.
pub fn stein_lower(pair: &HypothesisPair, alpha: f64) -> Result<f64> {
    let d = kl_null_vs(pair)?.kl;
    Ok(-(d + binary_entropy(alpha)?) / (1.0 - alpha))
}

/// Moment-inequality upper bound on `mu0`:
/// `(24/alpha * sum_i |1/l_i - 1|^p)^{1/p} + 3 ||M^{-1} a|| sqrt(ln(1/alpha))`
/// for `p` in `(1, 2]`, with the covariance diagonalized first.
pub fn mu0_lemma1(pair: &HypothesisPair, alpha: f64, p: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "moment exponent must lie in (1, 2], got {p}"
        )));
    }
    let (lambdas, a) = pair.spectrum_and_rotated_mean()?;
    let moment: f64 = lambdas.iter().map(|&l| (1.0 / l - 1.0).abs().powf(p)).sum();
    let spectrum_term = (24.0 / alpha * moment).powf(1.0 / p);
    // ||M^{-1} a|| in the eigenbasis
    let norm: f64 = lambdas
        .iter()
        .zip(&a)
        .map(|(&l, &ai)| (ai / l) * (ai / l))
        .sum::<f64>()
        .sqrt();
    Ok(spectrum_term + 3.0 * norm * (1.0 / alpha).ln().sqrt())
}

/// Empirical `mu0`: divergence minus the Monte Carlo `alpha`-quantile of the
/// log likelihood ratio under the null. May be negative for `alpha` above
/// the quantile of the mean; the sign is reported as-is.
pub fn mu0_empirical(
    pair: &HypothesisPair,
    alpha: f64,
    n_samples: u64,
    seed: u64,
) -> Result<f64> {
    let d = kl_null_vs(pair)?.kl;
    let th = calibrate_threshold(pair, alpha, n_samples, seed)?;
    Ok(d - th.gamma)
}

/// Chebyshev-route `mu`, with the variance-control check attached.
#[derive(Debug, Clone, Copy)]
pub struct ChebyshevMu {
    /// `C sqrt(D / alpha)`
    pub mu: f64,
    /// Whether `Var <= C^2 D` holds for this pair and constant; the value is
    /// returned either way, this is the warning channel.
    pub condition_iii_holds: bool,
}

/// `mu = C sqrt(D / alpha)`, valid as an upper quantile gap whenever the
/// log-ratio variance satisfies `Var <= C^2 D`.
pub fn mu_chebyshev(pair: &HypothesisPair, alpha: f64, c: f64) -> Result<ChebyshevMu> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Chebyshev constant must be positive, got {c}"
        )));
    }
    let d = kl_null_vs(pair)?.kl;
    Ok(ChebyshevMu {
        mu: c * (d / alpha).sqrt(),
        condition_iii_holds: check_condition_iii(pair, c)?,
    })
}

/// Which route produced `mu0` in a [`BetaBounds`] report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mu0MethodTag {
    Lemma1,
    Empirical,
    Chebyshev,
}

impl std::fmt::Display for Mu0MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mu0MethodTag::Lemma1 => write!(f, "lemma1"),
            Mu0MethodTag::Empirical => write!(f, "empirical"),
            Mu0MethodTag::Chebyshev => write!(f, "chebyshev"),
        }
    }
}

/// Route selection for [`beta_bounds`].
#[derive(Debug, Clone, Copy)]
pub enum Mu0Method {
    Lemma1 { p: f64 },
    Empirical { n_samples: u64, seed: u64 },
    Chebyshev { c: f64 },
}

/// Two-sided report on `ln beta(alpha)`.
#[derive(Debug, Clone)]
pub struct BetaBounds {
    pub kl: f64,
    /// `-(kl + h(alpha)) / (1 - alpha)`
    pub lower_log_beta: f64,
    /// `-kl + mu0`
    pub upper_log_beta: f64,
    pub mu0: f64,
    pub mu0_method: Mu0MethodTag,
    pub alpha: f64,
}

impl BetaBounds {
    /// CSV row `kl,lower_log_beta,upper_log_beta,mu0,mu0_method,alpha`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.kl, self.lower_log_beta, self.upper_log_beta, self.mu0, self.mu0_method, self.alpha
        )
    }
}

/// Assembles the sandwich report with the chosen `mu0` route.
pub fn beta_bounds(pair: &HypothesisPair, alpha: f64, method: &Mu0Method) -> Result<BetaBounds> {
    let kl = kl_null_vs(pair)?.kl;
    let lower = -(kl + binary_entropy(alpha)?) / (1.0 - alpha);
    let (mu0, tag) = match *method {
        Mu0Method::Lemma1 { p } => (mu0_lemma1(pair, alpha, p)?, Mu0MethodTag::Lemma1),
        Mu0Method::Empirical { n_samples, seed } => (
            mu0_empirical(pair, alpha, n_samples, seed)?,
            Mu0MethodTag::Empirical,
        ),
        Mu0Method::Chebyshev { c } => (mu_chebyshev(pair, alpha, c)?.mu, Mu0MethodTag::Chebyshev),
    };
    Ok(BetaBounds {
        kl,
        lower_log_beta: lower,
        upper_log_beta: -kl + mu0,
        mu0,
        mu0_method: tag,
        alpha,
    })
}
