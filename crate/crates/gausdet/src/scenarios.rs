//! End-to-end experiment sweeps.
//!
//! A scenario fixes a family of pairs indexed by size, runs the detector
//! machinery at each size, and emits CSV for offline plotting: the per-size
//! exponent table (divergence, estimated log miss probability, sandwich
//! bounds, all scaled by `1/n`), the replacement check for a candidate
//! family, and the membership table. Every row derives its seed from the
//! scenario seed and the row index, so runs are bit-reproducible and
//! row-order independent.

use std::io::Write;
use std::path::Path;

use crate::bounds::stein_lower;
use crate::error::{Error, Result};
use crate::hypotheses::{kl_null_vs, HypothesisPair};
use crate::lrtest::{calibrate_threshold, estimate_log_beta_is};
use crate::maximalset::{k_unknown_mean, membership, MembershipStatus};
use crate::mc::derive_seed;
use crate::pdlinalg::DEFAULT_PD_TOL;

/// Built-in spectrum/mean generators.
///
/// They cover the regimes the theory distinguishes: flat spectra, mixed
/// block spectra, slowly varying spectra, and pure mean shifts, all with
/// closed-form divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `M = lambda I`, zero mean.
    ConstantSpectrum { lambda: f64 },
    /// Eigenvalues alternate `hi, lo, hi, lo, ...`, zero mean.
    AlternatingBlock { hi: f64, lo: f64 },
    /// `l_i = 1 + c i / n`, zero mean.
    LinearRamp { c: f64 },
    /// `M = I`, every mean coordinate equal to `shift`.
    MeanShift { shift: f64 },
}

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::ConstantSpectrum { .. } => "constant_spectrum",
            Family::AlternatingBlock { .. } => "alternating_block",
            Family::LinearRamp { .. } => "linear_ramp",
            Family::MeanShift { .. } => "mean_shift",
        }
    }

    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let need = |k: usize| -> Result<()> {
            if params.len() != k {
                return Err(Error::Parse(format!(
                    "family `{name}` takes {k} parameter(s), got {}",
                    params.len()
                )));
            }
            Ok(())
        };
        match name {
            "constant_spectrum" => {
                need(1)?;
                Ok(Family::ConstantSpectrum { lambda: params[0] })
            }
            "alternating_block" => {
                need(2)?;
                Ok(Family::AlternatingBlock {
                    hi: params[0],
                    lo: params[1],
                })
            }
            "linear_ramp" => {
                need(1)?;
                Ok(Family::LinearRamp { c: params[0] })
            }
            "mean_shift" => {
                need(1)?;
                Ok(Family::MeanShift { shift: params[0] })
            }
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }

    /// The pair at size `n` (diagonal covariance by construction).
    pub fn pair(&self, n: usize) -> Result<HypothesisPair> {
        match *self {
            Family::ConstantSpectrum { lambda } => {
                HypothesisPair::diagonal(vec![0.0; n], vec![lambda; n])
            }
            Family::AlternatingBlock { hi, lo } => {
                let lambdas = (0..n).map(|i| if i % 2 == 0 { hi } else { lo }).collect();
                HypothesisPair::diagonal(vec![0.0; n], lambdas)
            }
            Family::LinearRamp { c } => {
                let lambdas = (0..n).map(|i| 1.0 + c * i as f64 / n as f64).collect();
                HypothesisPair::diagonal(vec![0.0; n], lambdas)
            }
            Family::MeanShift { shift } => {
                HypothesisPair::diagonal(vec![shift; n], vec![1.0; n])
            }
        }
    }
}

/// Finite-size stand-in for the asymptotically negligible membership
/// allowance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlackRule {
    Zero,
    /// `c * sqrt(n)`
    CSqrtN(f64),
}

impl SlackRule {
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            SlackRule::Zero => 0.0,
            SlackRule::CSqrtN(c) => c * (n as f64).sqrt(),
        }
    }
}

/// Scenario configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Candidate family for the replacement and membership tables; the
    /// reference family itself when absent.
    pub cand_family: Option<Family>,
    pub n_list: Vec<usize>,
    pub alpha: f64,
    pub slack: SlackRule,
    pub n_samples: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Parses the plain-text config: one `key = value` per line, `#` starts
    /// a comment. Keys: `family`, `params`, `cand_family`, `cand_params`,
    /// `n_list`, `alpha`, `slack` (`zero` or `sqrt C`), `samples`, `seed`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut family_name = None;
        let mut params: Vec<f64> = Vec::new();
        let mut cand_name = None;
        let mut cand_params: Vec<f64> = Vec::new();
        let mut n_list: Vec<usize> = Vec::new();
        let mut alpha = None;
        let mut slack = SlackRule::Zero;
        let mut samples = None;
        let mut seed = None;

        let reals = |v: &str| -> Result<Vec<f64>> {
            v.split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("invalid real `{t}`")))
                })
                .collect()
        };

        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "family" => family_name = Some(value.to_string()),
                "params" => params = reals(value)?,
                "cand_family" => cand_name = Some(value.to_string()),
                "cand_params" => cand_params = reals(value)?,
                "n_list" => {
                    n_list = value
                        .split_whitespace()
                        .map(|t| {
                            t.parse::<usize>()
                                .map_err(|_| Error::Parse(format!("invalid size `{t}`")))
                        })
                        .collect::<Result<_>>()?;
                }
                "alpha" => {
                    alpha = Some(
                        value
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("invalid alpha `{value}`")))?,
                    )
                }
                "slack" => {
                    let mut it = value.split_whitespace();
                    match it.next() {
                        Some("zero") => slack = SlackRule::Zero,
                        Some("sqrt") => {
                            let c = it
                                .next()
                                .ok_or_else(|| Error::Parse("`slack = sqrt C` needs C".into()))?
                                .parse::<f64>()
                                .map_err(|_| Error::Parse("invalid slack constant".into()))?;
                            slack = SlackRule::CSqrtN(c);
                        }
                        _ => return Err(Error::Parse(format!("invalid slack rule `{value}`"))),
                    }
                }
                "samples" => {
                    samples = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(format!("invalid samples `{value}`")))?,
                    )
                }
                "seed" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(format!("invalid seed `{value}`")))?,
                    )
                }
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }

        let family_name =
            family_name.ok_or_else(|| Error::Parse("missing `family` key".into()))?;
        let family = Family::from_name(&family_name, &params)?;
        let cand_family = match cand_name {
            Some(name) => Some(Family::from_name(&name, &cand_params)?),
            None => None,
        };
        if n_list.is_empty() {
            return Err(Error::Parse("missing or empty `n_list`".into()));
        }
        if n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse("`n_list` must be strictly increasing".into()));
        }
        let alpha = alpha.ok_or_else(|| Error::Parse("missing `alpha` key".into()))?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self {
            family,
            cand_family,
            n_list,
            alpha,
            slack,
            n_samples: samples.ok_or_else(|| Error::Parse("missing `samples` key".into()))?,
            seed: seed.ok_or_else(|| Error::Parse("missing `seed` key".into()))?,
        })
    }
}

/// Log-scale estimate for a row, with zero-hit runs replaced by the
/// rule-of-three upper bound `ln(3/N)` and flagged.
fn log_beta_or_rule_of_three(log_value: f64, hits: u64, n_samples: u64) -> (f64, bool) {
    if hits == 0 {
        ((3.0 / n_samples as f64).ln(), true)
    } else {
        (log_value, false)
    }
}

/// One size of the exponent sweep; every column except `n` is scaled by
/// `1/n`.
#[derive(Debug, Clone)]
pub struct ExponentRow {
    pub n: usize,
    pub kl_per_n: f64,
    pub log_beta_hat_per_n: f64,
    pub lower_per_n: f64,
    pub upper_per_n: f64,
    /// Three log-scale standard errors of the estimate, scaled by `1/n`.
    pub ci: f64,
    /// Degenerate pair or an estimate with no weight landed.
    pub flagged: bool,
}

/// Runs the exponent sweep: at each size, calibrate the threshold, estimate
/// the log miss probability with the null-proposal estimator, and attach the
/// sandwich bounds.
pub fn run_exponent_sweep(cfg: &ExperimentConfig) -> Result<Vec<ExponentRow>> {
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for (idx, &n) in cfg.n_list.iter().enumerate() {
        let pair = cfg.family.pair(n)?;
        let row_seed = derive_seed(cfg.seed, idx as u64);
        if pair.is_null(1e-12) {
            rows.push(ExponentRow {
                n,
                kl_per_n: 0.0,
                log_beta_hat_per_n: f64::NAN,
                lower_per_n: f64::NAN,
                upper_per_n: f64::NAN,
                ci: f64::NAN,
                flagged: true,
            });
            continue;
        }
        let d = kl_null_vs(&pair)?.kl;
        let th = calibrate_threshold(&pair, cfg.alpha, cfg.n_samples, row_seed)?;
        let est = estimate_log_beta_is(&pair, &pair, th.gamma, cfg.n_samples, row_seed)?;
        let (log_beta, flagged) =
            log_beta_or_rule_of_three(est.log_value, est.hits, cfg.n_samples);
        let nf = n as f64;
        rows.push(ExponentRow {
            n,
            kl_per_n: d / nf,
            log_beta_hat_per_n: log_beta / nf,
            lower_per_n: stein_lower(&pair, cfg.alpha)? / nf,
            // upper bound -D + mu0 with the empirical mu0 = D - gamma
            upper_per_n: -th.gamma / nf,
            ci: 3.0 * est.log_std_err / nf,
            flagged,
        });
    }
    Ok(rows)
}

/// One size of the replacement check.
#[derive(Debug, Clone)]
pub struct ReplacementRow {
    pub n: usize,
    pub log_f: f64,
    pub mu0: f64,
    pub log_beta_ref: f64,
    pub log_beta_cand: f64,
    /// `log_beta_ref + mu0 + log_f / 2`
    pub bound_rhs: f64,
    /// Three combined log-scale standard errors.
    pub ci: f64,
    pub holds: bool,
    /// Candidate outside the set at the configured slack: the inequality is
    /// not asserted for it.
    pub vacuous: bool,
}

/// Verifies, at each size, that the miss probability of the reference
/// detector against a member candidate stays within
/// `exp(mu0 + log_f / 2)` of the reference miss probability.
pub fn run_replacement_check(cfg: &ExperimentConfig) -> Result<Vec<ReplacementRow>> {
    let cand_family = cfg.cand_family.unwrap_or(cfg.family);
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for (idx, &n) in cfg.n_list.iter().enumerate() {
        let reference = cfg.family.pair(n)?;
        let candidate = cand_family.pair(n)?;
        let slack = cfg.slack.value(n);
        let verdict = membership(&reference, &candidate, slack, DEFAULT_PD_TOL)?;
        let row_seed = derive_seed(cfg.seed, 1_000_000 + idx as u64);

        if verdict.status != MembershipStatus::Member || reference.is_null(1e-12) {
            rows.push(ReplacementRow {
                n,
                log_f: verdict.log_f,
                mu0: f64::NAN,
                log_beta_ref: f64::NAN,
                log_beta_cand: f64::NAN,
                bound_rhs: f64::NAN,
                ci: f64::NAN,
                holds: true,
                vacuous: true,
            });
            continue;
        }

        let d = kl_null_vs(&reference)?.kl;
        let th = calibrate_threshold(&reference, cfg.alpha, cfg.n_samples, row_seed)?;
        let mu0 = d - th.gamma;
        let beta_ref =
            estimate_log_beta_is(&reference, &reference, th.gamma, cfg.n_samples, row_seed)?;
        let beta_cand =
            estimate_log_beta_is(&reference, &candidate, th.gamma, cfg.n_samples, row_seed)?;
        let (log_beta_ref, flag_ref) =
            log_beta_or_rule_of_three(beta_ref.log_value, beta_ref.hits, cfg.n_samples);
        let (log_beta_cand, flag_cand) =
            log_beta_or_rule_of_three(beta_cand.log_value, beta_cand.hits, cfg.n_samples);
        let bound_rhs = log_beta_ref + mu0 + 0.5 * verdict.log_f;
        let ci = 3.0 * (beta_ref.log_std_err + beta_cand.log_std_err);
        let flagged = flag_ref || flag_cand;
        rows.push(ReplacementRow {
            n,
            log_f: verdict.log_f,
            mu0,
            log_beta_ref,
            log_beta_cand,
            bound_rhs,
            ci,
            holds: flagged || log_beta_cand <= bound_rhs + ci,
            vacuous: flagged,
        });
    }
    Ok(rows)
}

/// Membership verdict per size for the candidate family.
#[derive(Debug, Clone)]
pub struct MembershipRow {
    pub n: usize,
    pub status: MembershipStatus,
    pub log_f: f64,
    pub slack: f64,
}

pub fn run_membership_table(cfg: &ExperimentConfig) -> Result<Vec<MembershipRow>> {
    let cand_family = cfg.cand_family.unwrap_or(cfg.family);
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let reference = cfg.family.pair(n)?;
        let candidate = cand_family.pair(n)?;
        let slack = cfg.slack.value(n);
        let verdict = membership(&reference, &candidate, slack, DEFAULT_PD_TOL)?;
        rows.push(MembershipRow {
            n,
            status: verdict.status,
            log_f: verdict.log_f,
            slack,
        });
    }
    Ok(rows)
}

/// One candidate mean in the unknown-mean tabulation.
#[derive(Debug, Clone)]
pub struct UnknownMeanRow {
    pub index: usize,
    /// `K = sum_i [ (b_i^2 - a_i^2)/l_i - (b_i - a_i)^2/l_i^2 ]`
    pub k: f64,
    /// `-K`
    pub log_f: f64,
    pub member: bool,
}

/// Tabulates the shared-covariance exponent correction `K` and membership
/// over a grid of candidate means. With the identity covariance the member
/// region is the half-space `(a, b - a) >= -slack / 2`.
pub fn run_unknown_mean_demo(
    lambdas: &[f64],
    a: &[f64],
    grid: &[Vec<f64>],
    slack: f64,
) -> Result<Vec<UnknownMeanRow>> {
    let mut rows = Vec::with_capacity(grid.len());
    for (index, b) in grid.iter().enumerate() {
        let k = k_unknown_mean(lambdas, a, b)?;
        rows.push(UnknownMeanRow {
            index,
            k,
            log_f: -k,
            member: -k <= slack,
        });
    }
    Ok(rows)
}

pub const EXPONENT_HEADER: &str = "n,kl_per_n,log_beta_hat_per_n,lower_per_n,upper_per_n,ci,flagged";
pub const REPLACEMENT_HEADER: &str =
    "n,log_f,mu0,log_beta_ref,log_beta_cand,bound_rhs,ci,holds,vacuous";
pub const MEMBERSHIP_HEADER: &str = "n,status,log_f,slack";
pub const UNKNOWN_MEAN_HEADER: &str = "index,k,log_f,member";

pub fn write_exponent_csv<W: Write>(rows: &[ExponentRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{EXPONENT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.n, r.kl_per_n, r.log_beta_hat_per_n, r.lower_per_n, r.upper_per_n, r.ci, r.flagged
        )?;
    }
    Ok(())
}

pub fn write_replacement_csv<W: Write>(rows: &[ReplacementRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{REPLACEMENT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.log_f,
            r.mu0,
            r.log_beta_ref,
            r.log_beta_cand,
            r.bound_rhs,
            r.ci,
            r.holds,
            r.vacuous
        )?;
    }
    Ok(())
}

pub fn write_membership_csv<W: Write>(rows: &[MembershipRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{MEMBERSHIP_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.n, r.status, r.log_f, r.slack)?;
    }
    Ok(())
}

pub fn write_unknown_mean_csv<W: Write>(rows: &[UnknownMeanRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{UNKNOWN_MEAN_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.index, r.k, r.log_f, r.member)?;
    }
    Ok(())
}

/// Outcome of a full scenario run.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioOutcome {
    /// Sandwich or replacement violations detected in non-flagged rows.
    pub violations: usize,
}

/// Runs all tables and writes `exponent.csv`, `replacement.csv`, and
/// `membership.csv` into `out_dir`.
pub fn run_scenario_to_dir(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ScenarioOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let exponent = run_exponent_sweep(cfg)?;
    let replacement = run_replacement_check(cfg)?;
    let members = run_membership_table(cfg)?;

    let mut violations = 0usize;
    for r in &exponent {
        if r.flagged {
            continue;
        }
        if r.lower_per_n > r.log_beta_hat_per_n + r.ci
            || r.log_beta_hat_per_n - r.ci > r.upper_per_n
        {
            violations += 1;
        }
    }
    violations += replacement.iter().filter(|r| !r.vacuous && !r.holds).count();

    write_exponent_csv(&exponent, std::fs::File::create(out_dir.join("exponent.csv"))?)?;
    write_replacement_csv(
        &replacement,
        std::fs::File::create(out_dir.join("replacement.csv"))?,
    )?;
    write_membership_csv(&members, std::fs::File::create(out_dir.join("membership.csv"))?)?;

    if let Family::MeanShift { shift } = cfg.family {
        // tabulate scaled candidate means t * a for the largest size
        let n = *cfg.n_list.last().expect("validated nonempty");
        let a = vec![shift; n];
        let lambdas = vec![1.0; n];
        let grid: Vec<Vec<f64>> = (0..=20)
            .map(|i| {
                let t = i as f64 / 10.0;
                a.iter().map(|ai| t * ai).collect()
            })
            .collect();
        let rows = run_unknown_mean_demo(&lambdas, &a, &grid, cfg.slack.value(n))?;
        write_unknown_mean_csv(&rows, std::fs::File::create(out_dir.join("unknown_mean.csv"))?)?;
    }

    Ok(ScenarioOutcome { violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg() -> ExperimentConfig {
        ExperimentConfig {
            family: Family::MeanShift { shift: 1.0 },
            cand_family: None,
            n_list: vec![8, 16, 32],
            alpha: 0.1,
            slack: SlackRule::Zero,
            n_samples: 40_000,
            seed: 5,
        }
    }

    #[test]
    fn config_parses_and_validates() {
        let cfg = ExperimentConfig::parse(
            "# demo\nfamily = alternating_block\nparams = 2 0.5\nn_list = 16 32 64\n\
             alpha = 0.1\nslack = sqrt 0.5\nsamples = 1000\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.family, Family::AlternatingBlock { hi: 2.0, lo: 0.5 });
        assert_eq!(cfg.slack, SlackRule::CSqrtN(0.5));
        assert_eq!(cfg.n_list, vec![16, 32, 64]);

        assert!(ExperimentConfig::parse("family = nope\nparams = 1\n").is_err());
        assert!(ExperimentConfig::parse(
            "family = mean_shift\nparams = 1\nn_list = 8 8\nalpha = 0.1\nsamples = 10\nseed = 1"
        )
        .is_err());
    }

    #[test]
    fn family_divergences_match_closed_forms() {
        let f = Family::AlternatingBlock { hi: 2.0, lo: 0.5 };
        let pair = f.pair(64).unwrap();
        let d = kl_null_vs(&pair).unwrap().kl;
        let per_block =
            0.5 * (2.0_f64.ln() + 0.5 - 1.0 + 0.5_f64.ln() + 2.0 - 1.0);
        assert!((d / 64.0 - per_block / 2.0).abs() < 1e-12);

        let f = Family::MeanShift { shift: 1.0 };
        let pair = f.pair(10).unwrap();
        let d = kl_null_vs(&pair).unwrap().kl;
        assert!((d - 5.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_sweep_mean_shift_sandwich() {
        let rows = run_exponent_sweep(&base_cfg()).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(!r.flagged, "n={}", r.n);
            assert!((r.kl_per_n - 0.5).abs() < 1e-12);
            assert!(
                r.lower_per_n <= r.log_beta_hat_per_n + r.ci,
                "n={}: {} vs {}",
                r.n,
                r.lower_per_n,
                r.log_beta_hat_per_n
            );
            assert!(r.log_beta_hat_per_n - r.ci <= r.upper_per_n);
        }
    }

    #[test]
    fn exponent_sweep_degenerate_family_is_flagged() {
        let mut cfg = base_cfg();
        cfg.family = Family::ConstantSpectrum { lambda: 1.0 };
        let rows = run_exponent_sweep(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.flagged));
    }

    #[test]
    fn replacement_check_identity_candidate_holds() {
        let rows = run_replacement_check(&base_cfg()).unwrap();
        for r in &rows {
            assert!(!r.vacuous);
            assert!((r.log_f).abs() < 1e-12);
            assert!(r.holds, "n={}", r.n);
        }
    }

    #[test]
    fn replacement_check_marks_infinite_candidates_vacuous() {
        let mut cfg = base_cfg();
        cfg.family = Family::ConstantSpectrum { lambda: 0.5 };
        cfg.cand_family = Some(Family::ConstantSpectrum { lambda: 1.5 });
        let rows = run_replacement_check(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.vacuous && r.log_f.is_infinite()));
    }

    #[test]
    fn replacement_check_widened_variance_holds() {
        let mut cfg = base_cfg();
        cfg.family = Family::ConstantSpectrum { lambda: 2.0 };
        cfg.cand_family = Some(Family::ConstantSpectrum { lambda: 4.0 });
        cfg.n_list = vec![16, 32];
        let rows = run_replacement_check(&cfg).unwrap();
        for r in &rows {
            assert!(!r.vacuous);
            assert!(r.log_f < 0.0);
            assert!(r.holds, "n={}: cand {} rhs {}", r.n, r.log_beta_cand, r.bound_rhs);
        }
    }

    #[test]
    fn unknown_mean_demo_geometry() {
        let n = 6;
        let a = vec![1.0; n];
        let lambdas = vec![1.0; n];

        // b = a: on the boundary, member at slack zero
        let rows = run_unknown_mean_demo(&lambdas, &a, std::slice::from_ref(&a), 0.0).unwrap();
        assert!(rows[0].member);
        assert!(rows[0].k.abs() < 1e-12);

        // orthogonal shift: K = 0, still on the boundary
        let mut b = a.clone();
        b[0] += 1.0;
        b[1] -= 1.0;
        let rows = run_unknown_mean_demo(&lambdas, &a, &[b], 0.0).unwrap();
        assert!(rows[0].member);
        assert!(rows[0].k.abs() < 1e-12);

        // shrunk mean: K = -2 t ||a||^2 < 0, outside at slack zero
        let b: Vec<f64> = a.iter().map(|ai| 0.7 * ai).collect();
        let rows = run_unknown_mean_demo(&lambdas, &a, &[b], 0.0).unwrap();
        assert!(!rows[0].member);
        assert!((rows[0].k + 2.0 * 0.3 * n as f64).abs() < 1e-12);
    }

    #[test]
    fn zero_hit_rows_carry_rule_of_three_bound() {
        let (v, flagged) = log_beta_or_rule_of_three(f64::NEG_INFINITY, 0, 100_000);
        assert!(flagged);
        assert!((v - (3.0e-5_f64).ln()).abs() < 1e-12);
        let (v, flagged) = log_beta_or_rule_of_three(-4.2, 57, 100_000);
        assert!(!flagged);
        assert_eq!(v, -4.2);
    }

    #[test]
    fn exponent_approaches_divergence_rate_along_block_family() {
        // at alpha = 1/2 the quantile gap is only the skew correction, so the
        // per-coordinate exponent closes on D/n quickly as n grows
        let cfg = ExperimentConfig {
            family: Family::AlternatingBlock { hi: 2.0, lo: 0.5 },
            cand_family: None,
            n_list: vec![32, 128, 512],
            alpha: 0.5,
            slack: SlackRule::Zero,
            n_samples: 100_000,
            seed: 31,
        };
        let rows = run_exponent_sweep(&cfg).unwrap();
        let devs: Vec<f64> = rows
            .iter()
            .map(|r| ((-r.log_beta_hat_per_n) - r.kl_per_n).abs() / r.kl_per_n)
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
        assert!(devs[2] < 0.08, "deviation at n=512: {}", devs[2]);
    }

    #[test]
    fn scenario_outputs_are_reproducible() {
        let cfg = ExperimentConfig {
            family: Family::AlternatingBlock { hi: 2.0, lo: 0.5 },
            cand_family: Some(Family::ConstantSpectrum { lambda: 2.0 }),
            n_list: vec![8, 16],
            alpha: 0.2,
            slack: SlackRule::Zero,
            n_samples: 20_000,
            seed: 77,
        };
        let dir1 = std::env::temp_dir().join("gausdet_scn_a");
        let dir2 = std::env::temp_dir().join("gausdet_scn_b");
        let o1 = run_scenario_to_dir(&cfg, &dir1).unwrap();
        let o2 = run_scenario_to_dir(&cfg, &dir2).unwrap();
        assert_eq!(o1.violations, 0);
        assert_eq!(o2.violations, 0);
        for name in ["exponent.csv", "replacement.csv", "membership.csv"] {
            let a = std::fs::read(dir1.join(name)).unwrap();
            let b = std::fs::read(dir2.join(name)).unwrap();
            assert_eq!(a, b, "{name}");
        }
    }
}
