//! Log likelihood-ratio testing against the white-noise null.
//!
//! The statistic is
//! `r_F(y) = 1/2 [ ln|M| + y'(M^{-1} - I)y - 2 y' M^{-1} a + a' M^{-1} a ]`,
//! the log of the null density over the alternative density. The detector
//! accepts the null on the closed set `{ r_F(y) >= gamma }`, with `gamma`
//! calibrated so the false-alarm probability `P_I { r_F <= gamma }` equals
//! the target level.
//!
//! Thresholds are calibrated by empirical quantile: the statistic is a
//! general Gaussian quadratic form whose distribution function has no closed
//! form beyond dimension one, and a seeded Monte Carlo quantile is
//! reproducible. Dimension one admits an exact quadrature oracle
//! ([`exact_beta_1d`]) used to validate the Monte Carlo path.
//!
//! Miss probabilities decay exponentially in the dimension, so besides the
//! plain Monte Carlo estimator there is a null-proposal estimator
//! ([`estimate_log_beta_is`]) that rewrites the miss integral as a weighted
//! expectation under the null and accumulates in log scale.

use crate::error::{Error, Result};
use crate::hypotheses::{HypothesisPair, DEGENERATE_TOL};
use crate::mc::{self, salt, ErrorEstimate, LogMeanEstimate};
use crate::pdlinalg::{cholesky, solve_pd, CholFactor, DEFAULT_PD_TOL};

/// Standard normal distribution function, accurate far into the tails.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// How a threshold was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMethod {
    McQuantile,
    Exact1d,
}

impl std::fmt::Display for ThresholdMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdMethod::McQuantile => write!(f, "mc_quantile"),
            ThresholdMethod::Exact1d => write!(f, "exact_1d"),
        }
    }
}

/// Calibrated acceptance threshold for the likelihood-ratio detector.
#[derive(Debug, Clone)]
pub struct LrThreshold {
    /// Acceptance threshold in nats: decide the null when `r_F(y) >= gamma`.
    pub gamma: f64,
    pub target_alpha: f64,
    /// Re-estimated false-alarm probability at `gamma`, from a stream
    /// disjoint from the calibration draws.
    pub achieved_alpha: ErrorEstimate,
    pub method: ThresholdMethod,
}

enum LrKind {
    Diagonal {
        /// `1/l_i - 1`
        inv_minus_one: Vec<f64>,
    },
    Dense {
        chol: CholFactor,
    },
}

/// Prepared log likelihood-ratio statistic for one pair.
pub struct LogLr {
    dim: usize,
    log_det: f64,
    /// `M^{-1} a`
    m_inv_a: Vec<f64>,
    /// `a' M^{-1} a`
    quad_const: f64,
    kind: LrKind,
}

impl LogLr {
    pub fn new(pair: &HypothesisPair) -> Result<Self> {
        let dim = pair.dim();
        if let Some(lambdas) = pair.cov().diagonal() {
            let mut log_det = 0.0;
            let mut inv_minus_one = Vec::with_capacity(dim);
            let mut m_inv_a = Vec::with_capacity(dim);
            let mut quad_const = 0.0;
            for (&l, &a) in lambdas.iter().zip(pair.mean()) {
                if l <= 0.0 {
                    return Err(Error::NotPositiveDefinite {
                        index: 0,
                        pivot: l,
                        tol: 0.0,
                    });
                }
                log_det += l.ln();
                inv_minus_one.push(1.0 / l - 1.0);
                m_inv_a.push(a / l);
                quad_const += a * a / l;
            }
            Ok(Self {
                dim,
                log_det,
                m_inv_a,
                quad_const,
                kind: LrKind::Diagonal { inv_minus_one },
            })
        } else {
            let chol = cholesky(pair.cov(), DEFAULT_PD_TOL)?;
            let log_det = chol.log_det();
            let m_inv_a = solve_pd(pair.cov(), pair.mean(), DEFAULT_PD_TOL)?;
            let quad_const = pair.mean().iter().zip(&m_inv_a).map(|(a, x)| a * x).sum();
            Ok(Self {
                dim,
                log_det,
                m_inv_a,
                quad_const,
                kind: LrKind::Dense { chol },
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `r_F(y)` in nats.
    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.dim);
        let cross: f64 = y.iter().zip(&self.m_inv_a).map(|(yi, mi)| yi * mi).sum();
        let quad = match &self.kind {
            LrKind::Diagonal { inv_minus_one } => y
                .iter()
                .zip(inv_minus_one)
                .map(|(yi, c)| c * yi * yi)
                .sum::<f64>(),
            LrKind::Dense { chol } => {
                let x = chol.solve(y).expect("dimension checked");
                y.iter()
                    .zip(&x)
                    .map(|(yi, xi)| yi * xi - yi * yi)
                    .sum::<f64>()
            }
        };
        0.5 * (self.log_det + quad - 2.0 * cross + self.quad_const)
    }
}

/// `r_F(y)` for a single point.
pub fn log_lr(pair: &HypothesisPair, y: &[f64]) -> Result<f64> {
    if y.len() != pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dim(),
            got: y.len(),
        });
    }
    Ok(LogLr::new(pair)?.eval(y))
}

/// Calibrates the acceptance threshold so the false-alarm probability hits
/// `alpha`, by the empirical `alpha`-quantile of `r_F` over `n_samples` null
/// draws.
pub fn calibrate_threshold(
    pair: &HypothesisPair,
    alpha: f64,
    n_samples: u64,
    seed: u64,
) -> Result<LrThreshold> {
    if !(0.0..=1.0).contains(&alpha) || alpha == 0.0 || alpha == 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    if pair.is_null(DEGENERATE_TOL) {
        return Err(Error::DegenerateLr);
    }
    let needed = (10.0 / alpha).ceil() as u64;
    if n_samples < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: n_samples,
        });
    }
    let stat = LogLr::new(pair)?;
    let mut values =
        mc::collect_statistic(n_samples, seed, salt::CALIBRATE, pair.dim(), |z| stat.eval(z));
    let gamma = mc::empirical_quantile(&mut values, alpha);
    drop(values);

    let hits = mc::count_hits(n_samples, seed, salt::ACHIEVED_ALPHA, pair.dim(), |z| {
        stat.eval(z) <= gamma
    });
    Ok(LrThreshold {
        gamma,
        target_alpha: alpha,
        achieved_alpha: ErrorEstimate::from_hits(hits, n_samples, seed),
        method: ThresholdMethod::McQuantile,
    })
}

/// Monte Carlo estimate of the false-alarm probability
/// `P_I { r_F(xi) <= gamma }`.
pub fn estimate_alpha(
    pair: &HypothesisPair,
    gamma: f64,
    n_samples: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    if n_samples == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let stat = LogLr::new(pair)?;
    let hits = mc::count_hits(n_samples, seed, salt::ALPHA, pair.dim(), |z| {
        stat.eval(z) <= gamma
    });
    Ok(ErrorEstimate::from_hits(hits, n_samples, seed))
}

/// Monte Carlo estimate of the miss probability of the detector built for
/// `decision_pair` when the observation actually comes from `true_pair`:
/// `P_{N(b,V)} { r_{decision}(eta) >= gamma }`.
pub fn estimate_beta(
    decision_pair: &HypothesisPair,
    true_pair: &HypothesisPair,
    gamma: f64,
    n_samples: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    if decision_pair.dim() != true_pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: decision_pair.dim(),
            got: true_pair.dim(),
        });
    }
    if n_samples == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let stat = LogLr::new(decision_pair)?;
    let chol = cholesky(true_pair.cov(), DEFAULT_PD_TOL)?;
    let b = true_pair.mean().to_vec();
    let dim = true_pair.dim();
    let hits: u64 = mc::map_chunks(n_samples, seed, salt::BETA, |rng, len| {
        let mut z = vec![0.0; dim];
        let mut y = vec![0.0; dim];
        let mut h = 0u64;
        for _ in 0..len {
            mc::fill_standard_normal(rng, &mut z);
            chol.mul_factor_into(&z, &mut y);
            for (yi, bi) in y.iter_mut().zip(&b) {
                *yi += bi;
            }
            if stat.eval(&y) >= gamma {
                h += 1;
            }
        }
        h
    })
    .into_iter()
    .sum();
    Ok(ErrorEstimate::from_hits(hits, n_samples, seed))
}

/// Null-proposal estimate of the miss probability in log scale.
///
/// Rewrites `beta = E_{N(b,V)}[ 1{r_dec >= gamma} ]` as
/// `E_I[ exp(-r_true(xi)) 1{ r_dec(xi) >= gamma } ]` and averages with
/// streaming log-sum-exp, so values of order `e^{-n}` are estimated with a
/// meaningful relative error where plain Monte Carlo would record zero hits.
pub fn estimate_log_beta_is(
    decision_pair: &HypothesisPair,
    true_pair: &HypothesisPair,
    gamma: f64,
    n_samples: u64,
    seed: u64,
) -> Result<LogMeanEstimate> {
    if decision_pair.dim() != true_pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: decision_pair.dim(),
            got: true_pair.dim(),
        });
    }
    if n_samples == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let r_dec = LogLr::new(decision_pair)?;
    let r_true = LogLr::new(true_pair)?;
    Ok(mc::log_mean_exp(
        n_samples,
        seed,
        salt::BETA_IS,
        decision_pair.dim(),
        |z| {
            if r_dec.eval(z) >= gamma {
                -r_true.eval(z)
            } else {
                f64::NEG_INFINITY
            }
        },
    ))
}

// --- exact one-dimensional oracle ---------------------------------------

/// Coefficients of `r(y) = c2 y^2 + c1 y + c0` for a scalar pair.
fn lr_coefficients(lambda: f64, a: f64) -> (f64, f64, f64) {
    let c2 = 0.5 * (1.0 / lambda - 1.0);
    let c1 = -a / lambda;
    let c0 = 0.5 * (lambda.ln() + a * a / lambda);
    (c2, c1, c0)
}

/// Measure of `{ y : r(y) <= gamma }` under `N(mu, sigma^2)`.
fn sublevel_measure(lambda: f64, a: f64, gamma: f64, mu: f64, sigma: f64) -> f64 {
    let (c2, c1, c0) = lr_coefficients(lambda, a);
    let std = |y: f64| (y - mu) / sigma;
    if c2 == 0.0 {
        // linear statistic
        let t = (gamma - c0) / c1;
        if c1 > 0.0 {
            normal_cdf(std(t))
        } else {
            1.0 - normal_cdf(std(t))
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * (c0 - gamma);
        if disc <= 0.0 {
            // constant sign of r - gamma, matching the parabola direction
            return if c2 < 0.0 { 1.0 } else { 0.0 };
        }
        let sq = disc.sqrt();
        let sign = if c1 >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (c1 + sign * sq);
        let mut r1 = q / c2;
        let mut r2 = (c0 - gamma) / q;
        if r1 > r2 {
            std::mem::swap(&mut r1, &mut r2);
        }
        if c2 > 0.0 {
            // opens upward: sublevel set is the interval [r1, r2]
            normal_cdf(std(r2)) - normal_cdf(std(r1))
        } else {
            // opens downward: sublevel set is the complement of (r1, r2)
            normal_cdf(std(r1)) + (1.0 - normal_cdf(std(r2)))
        }
    }
}

/// Exact false-alarm probability at a given threshold for a scalar pair.
pub fn exact_alpha_of_gamma_1d(lambda: f64, a: f64, gamma: f64) -> Result<f64> {
    check_scalar_pair(lambda, a)?;
    Ok(sublevel_measure(lambda, a, gamma, 0.0, 1.0))
}

/// Exact miss probability at a given threshold for a scalar pair.
pub fn exact_beta_of_gamma_1d(lambda: f64, a: f64, gamma: f64) -> Result<f64> {
    check_scalar_pair(lambda, a)?;
    Ok(1.0 - sublevel_measure(lambda, a, gamma, a, lambda.sqrt()))
}

fn check_scalar_pair(lambda: f64, a: f64) -> Result<()> {
    if lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "variance must be positive, got {lambda}"
        )));
    }
    if (lambda - 1.0).abs() <= DEGENERATE_TOL && a.abs() <= DEGENERATE_TOL {
        return Err(Error::DegenerateLr);
    }
    Ok(())
}

/// Exact scalar-case threshold, packaged as an [`LrThreshold`] with the
/// achieved level carried exactly.
pub fn exact_threshold_1d(lambda: f64, a: f64, alpha: f64) -> Result<LrThreshold> {
    let (gamma, _) = exact_beta_1d(lambda, a, alpha)?;
    let achieved = exact_alpha_of_gamma_1d(lambda, a, gamma)?;
    Ok(LrThreshold {
        gamma,
        target_alpha: alpha,
        achieved_alpha: ErrorEstimate {
            value: achieved,
            log_value: achieved.ln(),
            n_samples: 0,
            std_err: 0.0,
            seed: 0,
        },
        method: ThresholdMethod::Exact1d,
    })
}

/// Exact threshold and miss probability for a scalar pair.
///
/// Solves the acceptance geometry analytically (the statistic is quadratic in
/// `y`, linear when `lambda = 1`), finds the threshold by bisection until the
/// standard-normal measure of the rejection region is within `1e-10` of
/// `alpha`, and evaluates the `N(a, lambda)` measure of the acceptance region
/// through the normal distribution function.
pub fn exact_beta_1d(lambda: f64, a: f64, alpha: f64) -> Result<(f64, f64)> {
    check_scalar_pair(lambda, a)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let alpha_at = |g: f64| sublevel_measure(lambda, a, g, 0.0, 1.0);

    let (_, _, c0) = lr_coefficients(lambda, a);
    let mut lo = c0 - 1.0;
    let mut hi = c0 + 1.0;
    let mut step = 1.0;
    while alpha_at(lo) > alpha {
        step *= 2.0;
        lo -= step;
        if step > 1e12 {
            return Err(Error::InvalidParameter("threshold bracket failed".into()));
        }
    }
    step = 1.0;
    while alpha_at(hi) < alpha {
        step *= 2.0;
        hi += step;
        if step > 1e12 {
            return Err(Error::InvalidParameter("threshold bracket failed".into()));
        }
    }
    let mut gamma = 0.5 * (lo + hi);
    for _ in 0..200 {
        gamma = 0.5 * (lo + hi);
        let val = alpha_at(gamma);
        if (val - alpha).abs() <= 1e-10 {
            break;
        }
        if val < alpha {
            lo = gamma;
        } else {
            hi = gamma;
        }
    }
    let beta = 1.0 - sublevel_measure(lambda, a, gamma, a, lambda.sqrt());
    Ok((gamma, beta))
}
