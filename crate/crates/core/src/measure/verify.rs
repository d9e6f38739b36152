//! Statistical and exact verifiers producing machine-readable reports.
//!
//! Samples are split into shards of `SHARD_SIZE`; shard `i` draws from stream
//! `i` of the configured seed, and counts are merged in shard order, so every
//! report is a pure function of its configuration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use super::exact::{entropy_closed_form, entropy_series, mean_sojourn, nu_mass_partial, verify_calcintegral};
use super::sample::{sample_gamma, sample_haar, sample_m, sample_nu};
use super::stats::{binomial_z, chi2_independence, chi2_quantile, chi2_statistic, DEFAULT_LEVEL};
use super::RngStream;
use crate::algebra::{FieldElement, FieldSpec, Poly};
use crate::artin::artin_map;
use crate::coding::{
    code_decorated, kappa, psi_tilde, reconstruct_from_beta, theta_prime, BetaSeq, GeodesicSection,
    Window,
};
use crate::error::Error;
use crate::laurent::{AbsValue, LaurentSeries};
use crate::moebius::AffineMap;
use crate::tree::{sojourn_lengths, validate_geodesic, vertex_distance, TreeVertex};

pub const SHARD_SIZE: u64 = 8192;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub q: u32,
    pub seed: u64,
    pub samples: u64,
    pub statistic: f64,
    pub dof: u64,
    pub threshold: f64,
    pub pass: bool,
    pub tables: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Set when too many samples were lost to the precision budget for the
    /// statistic to be meaningful.
    #[serde(skip)]
    pub exhausted: bool,
}

impl Report {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub samples: u64,
    /// Working precision of sampled series.
    pub prec: i64,
    /// Chi-square acceptance quantile.
    pub level: f64,
}

impl ExperimentConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        ExperimentConfig {
            seed,
            samples,
            prec: crate::laurent::DEFAULT_PRECISION,
            level: DEFAULT_LEVEL,
        }
    }

    pub fn with_prec(mut self, prec: i64) -> Self {
        self.prec = prec;
        self
    }

    fn report(&self, name: &str, k: &FieldSpec) -> Report {
        Report {
            experiment: name.to_string(),
            q: k.order(),
            seed: self.seed,
            samples: self.samples,
            statistic: 0.0,
            dof: 0,
            threshold: 0.0,
            pass: false,
            tables: json!({}),
            command: None,
            exhausted: false,
        }
    }

    /// Runs `f` once per sample, shard by shard.
    fn for_each_sample(&self, mut f: impl FnMut(&mut RngStream)) {
        let mut left = self.samples;
        let mut stream = 0;
        while left > 0 {
            let n = left.min(SHARD_SIZE);
            let mut rng = RngStream::new(self.seed, stream);
            for _ in 0..n {
                f(&mut rng);
            }
            left -= n;
            stream += 1;
        }
    }
}

/// More than 1% of samples rejected for precision invalidates a report.
fn too_many_rejections(rejected: u64, samples: u64) -> bool {
    rejected * 100 > samples
}

/// How the Haar-invariance harness perturbs its data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bias {
    None,
    /// Force the first coefficient of the input `f` (the image `Psi(f)` stays Haar).
    Input(FieldElement),
    /// Force the first tabulated coefficient of `Psi(f)`; the test must fail.
    Output(FieldElement),
}

/// Tabulates the first `depth` coefficients of `Psi(f)` for `f ~ Haar` into
/// `q^depth` cylinders and compares with the uniform law.
pub fn verify_haar_invariance(k: &FieldSpec, cfg: &ExperimentConfig, depth: u32, bias: Bias) -> Report {
    let q = k.order() as u64;
    let cells = q.pow(depth) as usize;
    let mut counts = vec![0u64; cells];
    let mut first = vec![0u64; q as usize];
    let mut rejected = 0u64;
    cfg.for_each_sample(|rng| {
        let mut f = sample_haar(k, rng, cfg.prec);
        if let Bias::Input(c) = bias {
            let mut coeffs = f.coeffs_from(1);
            coeffs[0] = c;
            f = LaurentSeries::from_coeffs(k, 1, coeffs, cfg.prec);
        }
        // the tabulated coefficients of Psi(f) only depend on f through index
        // depth + 2 v(f), so drop the rest before inverting
        if let Ok(v) = f.val() {
            f = f.truncate(depth as i64 + 2 * v);
        }
        let g = match artin_map(&f) {
            Ok(g) if g.prec() >= depth as i64 => g,
            _ => {
                rejected += 1;
                return;
            }
        };
        let mut digits: Vec<u64> = (1..=depth as i64)
            .map(|i| g.coeff(i).unwrap().index() as u64)
            .collect();
        if let Bias::Output(c) = bias {
            digits[0] = c.index() as u64;
        }
        let cell = digits.iter().rev().fold(0u64, |acc, &d| acc * q + d);
        counts[cell as usize] += 1;
        first[digits[0] as usize] += 1;
    });
    let n: u64 = counts.iter().sum();
    let expected = vec![n as f64 / cells as f64; cells];
    let stat = chi2_statistic(&counts, &expected);
    let dof = cells - 1;
    let threshold = chi2_quantile(dof, cfg.level);
    let max_z = first
        .iter()
        .map(|&c| binomial_z(c, n, 1.0 / q as f64).abs())
        .fold(0.0, f64::max);
    let exhausted = too_many_rejections(rejected, cfg.samples);
    let mut r = cfg.report("haar", k);
    r.statistic = stat;
    r.dof = dof as u64;
    r.threshold = threshold;
    r.exhausted = exhausted;
    r.pass = stat < threshold && max_z <= 4.0 && !exhausted;
    r.tables = json!({
        "depth": depth,
        "cells": if cells <= 4096 { json!(counts) } else { json!(null) },
        "first_coefficient": first,
        "first_coefficient_max_abs_z": max_z,
        "precision_rejected": rejected,
    });
    r
}

fn degree_bin(d: usize) -> usize {
    d.min(4) - 1
}

fn degree_bin_probs(q: f64) -> [f64; 4] {
    [
        (q - 1.0) / q,
        (q - 1.0) / (q * q),
        (q - 1.0) / (q * q * q),
        1.0 / (q * q * q),
    ]
}

/// Codes `horizon` quotients on each side of sections drawn from m and tests
/// that the degrees are i.i.d. with law `(q-1) q^-d`.
pub fn verify_iid_quotients(k: &FieldSpec, cfg: &ExperimentConfig, horizon: usize) -> Report {
    let h = horizon as i64;
    let width = 2 * horizon + 1;
    let mut degs: Vec<Vec<usize>> = Vec::new();
    let mut linear_at = [BTreeMap::<String, u64>::new(), BTreeMap::new()];
    let mut rejected = 0u64;
    cfg.for_each_sample(|rng| {
        let s = sample_m(k, rng, cfg.prec);
        let Ok(w) = theta_prime(&s, horizon, horizon) else {
            rejected += 1;
            return;
        };
        degs.push((-h..=h).map(|n| w.get(n).unwrap().degree()).collect());
        for (slot, n) in [-1, 1].into_iter().enumerate() {
            let a = w.get(n).unwrap();
            if a.degree() == 1 {
                *linear_at[slot].entry(a.to_string()).or_default() += 1;
            }
        }
    });
    let n = degs.len() as u64;
    let q = k.order() as f64;
    let probs = degree_bin_probs(q);
    let ix = |m: i64| (m + h) as usize;

    // (i) marginals
    let mut marginals = Vec::with_capacity(width);
    let mut max_z: f64 = 0.0;
    for col in 0..width {
        let mut c = [0u64; 4];
        for row in &degs {
            c[degree_bin(row[col])] += 1;
        }
        for b in 0..4 {
            max_z = max_z.max(binomial_z(c[b], n, probs[b]).abs());
        }
        marginals.push(c);
    }
    // exact law at n = -1 and n = 1: each linear polynomial has mass q^-2
    let nu_lin = 1.0 / (q * q);
    let mut max_z_linear: f64 = 0.0;
    for table in &linear_at {
        let expected_count = (k.order() * (k.order() - 1)) as usize;
        if table.len() != expected_count && n > 0 {
            max_z_linear = f64::INFINITY;
        }
        for &c in table.values() {
            max_z_linear = max_z_linear.max(binomial_z(c, n, nu_lin).abs());
        }
    }

    // (ii) pairwise independence at lags 1..3
    let mut indep = Vec::new();
    let mut max_ratio: f64 = 0.0;
    let mut worst = (0.0, 0usize, 0.0);
    let mut indep_pass = true;
    for lag in 1..=3i64.min(h) {
        for (x, y) in [(0, lag), (1, 1 + lag), (-lag, 0)] {
            if x < -h || y > h {
                continue;
            }
            let mut t = vec![vec![0u64; 4]; 4];
            for row in &degs {
                t[degree_bin(row[ix(x)])][degree_bin(row[ix(y)])] += 1;
            }
            let (stat, dof) = chi2_independence(&t);
            let thr = if dof > 0 { chi2_quantile(dof, cfg.level) } else { f64::INFINITY };
            indep_pass &= stat < thr;
            if stat / thr > max_ratio {
                max_ratio = stat / thr;
                worst = (stat, dof, thr);
            }
            indep.push(json!({"x": x, "y": y, "table": t, "statistic": stat, "dof": dof, "threshold": thr}));
        }
    }

    // (iii) autocorrelation of standardized degrees
    let mu = q / (q - 1.0);
    let sigma = (q / ((q - 1.0) * (q - 1.0))).sqrt();
    let mut autocorr = Vec::new();
    let mut ac_pass = true;
    for lag in 1..=3usize.min(width - 1) {
        let mut sum = 0.0;
        let mut m = 0u64;
        for row in &degs {
            for i in 0..width - lag {
                let z1 = (row[i] as f64 - mu) / sigma;
                let z2 = (row[i + lag] as f64 - mu) / sigma;
                sum += z1 * z2;
                m += 1;
            }
        }
        let r = if m > 0 { sum / m as f64 } else { 0.0 };
        let se = 1.0 / (m.max(1) as f64).sqrt();
        ac_pass &= r.abs() <= 4.0 * se;
        autocorr.push(json!({"lag": lag, "r": r, "se": se}));
    }

    let exhausted = too_many_rejections(rejected, cfg.samples);
    let mut r = cfg.report("iid", k);
    r.statistic = worst.0;
    r.dof = worst.1 as u64;
    r.threshold = worst.2;
    r.exhausted = exhausted;
    r.pass = max_z <= 4.0 && max_z_linear <= 4.0 && indep_pass && ac_pass && !exhausted && n > 0;
    r.tables = json!({
        "horizon": horizon,
        "degree_bins": ["1", "2", "3", ">=4"],
        "marginals": marginals,
        "marginal_max_abs_z": max_z,
        "linear_quotients": {"n=-1": linear_at[0], "n=1": linear_at[1]},
        "linear_max_abs_z": max_z_linear,
        "independence": indep,
        "autocorrelation": autocorr,
        "precision_rejected": rejected,
    });
    r
}

/// Empirical mean of `2 deg a` for `a ~ nu` against `2q/(q-1)`, 1% tolerance.
pub fn verify_sojourn(k: &FieldSpec, cfg: &ExperimentConfig) -> Report {
    let mut total = 0u64;
    cfg.for_each_sample(|rng| total += 2 * sample_nu(k, rng).deg().unwrap() as u64);
    let mean = total as f64 / cfg.samples as f64;
    let exact = mean_sojourn(k);
    let exact_f = big_to_f64(&exact);
    let rel = (mean - exact_f).abs() / exact_f;
    let mut r = cfg.report("sojourn", k);
    r.statistic = rel;
    r.threshold = 0.01;
    r.pass = rel <= 0.01;
    r.tables = json!({"mean": mean, "expected": exact.to_string(), "expected_f64": exact_f});
    r
}

fn big_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("finite")
}

/// Closed-form entropy against the series truncated at `tail_degree`.
pub fn verify_entropy(k: &FieldSpec, tail_degree: u32) -> Report {
    let closed = entropy_closed_form(k);
    let series = entropy_series(k, tail_degree);
    let gap = (closed - series.value).abs();
    // allow for rounding in the float summation
    let tol = series.tail_bound + 1e-12 * closed;
    let cfg = ExperimentConfig::new(0, 0);
    let mut r = cfg.report("entropy", k);
    r.statistic = gap;
    r.threshold = tol;
    r.pass = gap <= tol;
    r.tables = json!({
        "closed_form": closed,
        "series": series.value,
        "tail_degree": tail_degree,
        "tail_bound": series.tail_bound,
    });
    r
}

/// Exact partial sums of the integral lemma and of the mass of nu.
pub fn verify_calcintegral_report(k: &FieldSpec, max_degree: u32) -> Report {
    let got = verify_calcintegral(k, max_degree);
    let q = BigInt::from(k.order());
    let tail = BigRational::new(BigInt::one(), q.pow(max_degree));
    let expected = (BigRational::one() - &tail) / BigRational::from_integer(q);
    let mass = nu_mass_partial(k, max_degree);
    let mass_ok = mass == BigRational::one() - &tail;
    let cfg = ExperimentConfig::new(0, 0);
    let mut r = cfg.report("calcintegral", k);
    r.statistic = big_to_f64(&got);
    r.pass = got == expected && mass_ok;
    r.tables = json!({
        "max_degree": max_degree,
        "partial_sum": got.to_string(),
        "expected": expected.to_string(),
        "nu_mass": mass.to_string(),
    });
    r
}

fn abs_exp(f: &LaurentSeries) -> Option<i64> {
    match f.abs_val() {
        Ok(AbsValue::QPower(e)) => Some(e),
        _ => None,
    }
}

/// A random point `c + g` with `deg c <= 1` (possibly zero) and `g ~ Haar`.
fn random_point(k: &FieldSpec, rng: &mut RngStream, prec: i64) -> LaurentSeries {
    let c = Poly::from_coeffs(k, vec![rng.element(k), rng.element(k)]);
    sample_haar(k, rng, prec).add_poly(&c)
}

/// Conformality `|hf - hg|^2 = j(h,f) j(h,g) |f-g|^2` and the cocycle identity
/// `j(h1 h2, f) = j(h1, h2 f) j(h2, f)`, as exact exponent equalities.
pub fn verify_cocycle(k: &FieldSpec, cfg: &ExperimentConfig) -> Report {
    let mut failures = 0u64;
    let mut rejected = 0u64;
    let mut checked = 0u64;
    cfg.for_each_sample(|rng| {
        let h1 = sample_gamma(k, rng, 12);
        let h2 = sample_gamma(k, rng, 12);
        let f = random_point(k, rng, cfg.prec);
        let g = random_point(k, rng, cfg.prec);
        let run = || -> Result<bool, Error> {
            let (hf, hg) = (h1.apply_series(&f)?, h1.apply_series(&g)?);
            let (Some(lhs), Some(d)) = (abs_exp(&hf.sub(&hg)), abs_exp(&f.sub(&g))) else {
                return Err(Error::UncertainValuation);
            };
            let conformal = 2 * lhs == h1.j_infinity(&f)? + h1.j_infinity(&g)? + 2 * d;
            let h2f = h2.apply_series(&f)?;
            let cocycle =
                h1.compose(&h2).j_infinity(&f)? == h1.j_infinity(&h2f)? + h2.j_infinity(&f)?;
            Ok(conformal && cocycle)
        };
        match run() {
            Ok(true) => checked += 1,
            Ok(false) => {
                checked += 1;
                failures += 1
            }
            Err(_) => rejected += 1,
        }
    });
    exact_report(cfg, k, "cocycle", failures, rejected, json!({"checked": checked}))
}

fn exact_report(
    cfg: &ExperimentConfig,
    k: &FieldSpec,
    name: &str,
    failures: u64,
    rejected: u64,
    mut tables: serde_json::Value,
) -> Report {
    let exhausted = too_many_rejections(rejected, cfg.samples);
    let mut r = cfg.report(name, k);
    r.statistic = failures as f64;
    r.exhausted = exhausted;
    r.pass = failures == 0 && !exhausted;
    tables["failures"] = json!(failures);
    tables["precision_rejected"] = json!(rejected);
    r.tables = tables;
    r
}

/// Outcome of the coding checks on one section.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SectionChecks {
    pub conjugacy: bool,
    pub forward_endpoint: bool,
    pub normal_form: bool,
    pub reversal: bool,
    pub sequence_identities: bool,
}

impl SectionChecks {
    pub fn all(&self) -> bool {
        self.conjugacy
            && self.forward_endpoint
            && self.normal_form
            && self.reversal
            && self.sequence_identities
    }
}

/// `(kappa sigma) sigma (kappa sigma) = sigma^-1` and `kappa kappa = id` on a window.
pub fn sequence_identities_hold(seq: &BetaSeq) -> bool {
    let ks = |s: &BetaSeq| kappa(&s.shift(1));
    kappa(&kappa(seq)) == *seq && ks(&ks(seq).shift(1)) == seq.shift(-1)
}

/// Runs the conjugacy, normal-form and reversal checks with `horizon` terms on
/// each side.
pub fn check_section(s: &GeodesicSection, horizon: usize) -> Result<SectionChecks, Error> {
    let h = horizon as i64;
    let w = theta_prime(s, horizon, horizon)?;
    let (t, a1) = psi_tilde(s)?;
    let wt = theta_prime(&t, horizon, horizon)?;
    let conjugacy = *w.get(1).unwrap() == a1 && wt.agrees_on_overlap(&w.shift(1));
    let forward_endpoint = t.xi_plus == artin_map(&s.xi_plus)?;

    // code_decorated performs the normal-form cross-check itself
    let coded = code_decorated(s, horizon, horizon)?;
    let normal_form = coded
        .betas
        .iter()
        .all(|(n, b)| b.in_gamma_prime() && b.a.deg() == w.get(n).and_then(|a| a.poly().deg()));

    let rev = s.reversed()?;
    let coded_rev = code_decorated(&rev, horizon - 1, horizon + 1)?;
    let expect = kappa(&coded.betas.shift(1));
    let quotients_rev = (1 - h..=1 + h).all(|n| {
        coded_rev.quotients.get(n).map(|a| a.poly().clone()) == Some(-w.get(1 - n).unwrap().poly())
    });
    let reversal = coded_rev.betas == expect && quotients_rev;

    Ok(SectionChecks {
        conjugacy,
        forward_endpoint,
        normal_form,
        reversal,
        sequence_identities: sequence_identities_hold(&coded.betas),
    })
}

/// The coding checks on sections drawn from m.
pub fn verify_coding(k: &FieldSpec, cfg: &ExperimentConfig, horizon: usize) -> Report {
    let mut failures = BTreeMap::<&str, u64>::new();
    let mut rejected = 0u64;
    let mut other_errors = 0u64;
    cfg.for_each_sample(|rng| {
        let s = sample_m(k, rng, cfg.prec);
        match check_section(&s, horizon) {
            Ok(c) => {
                for (name, ok) in [
                    ("conjugacy", c.conjugacy),
                    ("forward_endpoint", c.forward_endpoint),
                    ("normal_form", c.normal_form),
                    ("reversal", c.reversal),
                    ("sequence_identities", c.sequence_identities),
                ] {
                    *failures.entry(name).or_default() += u64::from(!ok);
                }
            }
            Err(Error::PrecisionExhausted { .. }) => rejected += 1,
            Err(_) => other_errors += 1,
        }
    });
    let total: u64 = failures.values().sum::<u64>() + other_errors;
    exact_report(
        cfg,
        k,
        "coding",
        total,
        rejected,
        json!({"horizon": horizon, "by_check": failures, "errors": other_errors}),
    )
}

/// A random window `[lo, hi]` of elements of the affine group with
/// translation parts of positive degree.
pub fn random_beta_seq(k: &FieldSpec, rng: &mut RngStream, lo: i64, hi: i64) -> BetaSeq {
    let items = (lo..=hi)
        .map(|_| AffineMap::new(rng.nonzero_element(k), sample_nu(k, rng)).expect("nonzero"))
        .collect();
    Window::new(lo, items).expect("admissible")
}

/// Geodesic alignment and sojourn lengths on coded trajectories and on
/// arbitrary admissible affine sequences.
pub fn verify_tree(k: &FieldSpec, cfg: &ExperimentConfig, horizon: usize) -> Report {
    let mut failures = 0u64;
    let mut rejected = 0u64;
    let h = horizon as i64;
    cfg.for_each_sample(|rng| {
        match code_decorated(&sample_m(k, rng, cfg.prec), horizon, horizon) {
            Ok(c) => failures += u64::from(!trajectory_ok(&c.gammas)),
            Err(Error::PrecisionExhausted { .. }) => rejected += 1,
            Err(_) => failures += 1,
        }
        let seq = random_beta_seq(k, rng, -h, h);
        match reconstruct_from_beta(&seq) {
            Ok(g) => failures += u64::from(!trajectory_ok(&g)),
            Err(_) => failures += 1,
        }
    });
    exact_report(cfg, k, "tree", failures, rejected, json!({"horizon": horizon}))
}

fn trajectory_ok(gammas: &Window<crate::moebius::Homography>) -> bool {
    let Ok(lengths) = sojourn_lengths(gammas) else {
        return false;
    };
    let total: i64 = lengths.items().iter().sum();
    let ends = (
        TreeVertex(gammas.items().first().unwrap().clone()),
        TreeVertex(gammas.items().last().unwrap().clone()),
    );
    validate_geodesic(gammas).aligned() && vertex_distance(&ends.0, &ends.1) == total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic() {
        let k = FieldSpec::prime(2).unwrap();
        let cfg = ExperimentConfig::new(3, 2000).with_prec(64);
        let a = verify_haar_invariance(&k, &cfg, 3, Bias::None);
        let b = verify_haar_invariance(&k, &cfg, 3, Bias::None);
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
        assert_eq!(a.dof, 7);
    }

    #[test]
    fn biased_output_fails() {
        let k = FieldSpec::prime(2).unwrap();
        let cfg = ExperimentConfig::new(3, 4000).with_prec(64);
        assert!(!verify_haar_invariance(&k, &cfg, 3, Bias::Output(k.one())).pass);
    }

    #[test]
    fn exact_reports() {
        let k = FieldSpec::prime(3).unwrap();
        assert!(verify_entropy(&k, 40).pass);
        let r = verify_calcintegral_report(&FieldSpec::prime(2).unwrap(), 10);
        assert!(r.pass);
        assert_eq!(r.tables["partial_sum"], "1023/2048");
    }

    #[test]
    fn small_exact_runs() {
        let k = FieldSpec::prime(3).unwrap();
        let cfg = ExperimentConfig::new(5, 20).with_prec(96);
        assert!(verify_cocycle(&k, &cfg).pass);
        assert!(verify_coding(&k, &cfg, 4).pass);
        assert!(verify_tree(&k, &cfg, 4).pass);
    }
}
