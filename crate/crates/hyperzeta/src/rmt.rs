//! Unitary-symplectic eigenvalue-angle baseline.
//!
//! Samples the joint eigenvalue-angle density of Haar measure on USp(2g),
//! proportional to prod_(j<k) (cos 2pi t_j - cos 2pi t_k)^2 * prod_j
//! sin^2(2pi t_j) on (0, 1/2)^g, by Metropolis-within-Gibbs: per-coordinate
//! random-walk proposals with the width tuned to 20-40% acceptance during
//! burn-in, then frozen. Proposals landing outside the domain or on a
//! coincident angle are rejected outright (density zero).
//!
//! A quadrature evaluation of the exact finite-size mean and variance of
//! the symmetric-interval count is included as an independent check on the
//! chains (the angle process is determinantal; mean and variance are one-
//! and two-dimensional integrals of its kernel).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::zerostats::{fmt_f, IntervalSpec, StatSummary};

/// One retained draw: the g positive angles, sorted ascending. The full
/// spectrum is the 2g angles {+-t_j}.
#[derive(Clone, Debug)]
pub struct WeylSample {
    pub angles: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainDiag {
    pub chain: usize,
    pub acceptance: f64,
    pub proposal_width: f64,
    /// Effective sample size of the count series after thinning.
    pub ess: f64,
    pub converged: bool,
}

pub const DEFAULT_BURN_IN_SWEEPS: usize = 10_000;

struct Chain {
    theta: Vec<f64>,
    cos_cache: Vec<f64>,
    rng: ChaCha8Rng,
    width: f64,
    accepted: u64,
    proposed: u64,
}

impl Chain {
    fn new(g: usize, seed: u64, stream: u64) -> Chain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        // strictly interior, distinct starting angles
        let theta: Vec<f64> = (0..g)
            .map(|j| (j as f64 + 1.0) / (2.0 * (g as f64 + 1.0)))
            .collect();
        let cos_cache = theta
            .iter()
            .map(|&t| (2.0 * std::f64::consts::PI * t).cos())
            .collect();
        Chain {
            theta,
            cos_cache,
            rng,
            width: 0.05,
            accepted: 0,
            proposed: 0,
        }
    }

    /// Log-density difference for moving coordinate i to t_new.
    fn log_ratio(&self, i: usize, t_new: f64) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let c_new = (two_pi * t_new).cos();
        let c_old = self.cos_cache[i];
        let mut acc = 2.0 * ((two_pi * t_new).sin().abs().ln()
            - (two_pi * self.theta[i]).sin().abs().ln());
        for (k, &ck) in self.cos_cache.iter().enumerate() {
            if k == i {
                continue;
            }
            let dn = (c_new - ck).abs();
            if dn == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += 2.0 * (dn.ln() - (c_old - ck).abs().ln());
        }
        acc
    }

    fn sweep(&mut self) {
        let g = self.theta.len();
        for i in 0..g {
            self.proposed += 1;
            let step = self.width * (self.rng.gen::<f64>() - 0.5) * 2.0;
            let t_new = self.theta[i] + step;
            if t_new <= 0.0 || t_new >= 0.5 {
                continue;
            }
            let lr = self.log_ratio(i, t_new);
            if lr >= 0.0 || self.rng.gen::<f64>().ln() < lr {
                self.theta[i] = t_new;
                self.cos_cache[i] = (2.0 * std::f64::consts::PI * t_new).cos();
                self.accepted += 1;
            }
        }
    }

    fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn reset_counters(&mut self) {
        self.accepted = 0;
        self.proposed = 0;
    }
}

/// Draw `count` retained samples of the g positive angles, split across
/// `chains` independent chains (one ChaCha stream each). Burn-in adapts the
/// proposal width toward 20-40% acceptance, then the width freezes; the
/// chain thins by g sweeps between retained samples.
pub fn sample_weyl(
    g: u32,
    count: usize,
    seed: u64,
    chains: usize,
) -> Result<(Vec<WeylSample>, Vec<ChainDiag>)> {
    if g < 1 || count == 0 || chains == 0 {
        return Err(Error::InvalidInput(
            "need g >= 1, count >= 1, chains >= 1".into(),
        ));
    }
    let g = g as usize;
    let per_chain: Vec<usize> = (0..chains)
        .map(|c| count / chains + usize::from(c < count % chains))
        .collect();
    let results: Vec<(Vec<WeylSample>, ChainDiag)> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut chain = Chain::new(g, seed, c as u64);
            // adaptive burn-in
            let blocks = DEFAULT_BURN_IN_SWEEPS / 200;
            for _ in 0..blocks {
                chain.reset_counters();
                for _ in 0..200 {
                    chain.sweep();
                }
                let acc = chain.acceptance();
                if acc > 0.4 {
                    chain.width = (chain.width * 1.25).min(0.25);
                } else if acc < 0.2 {
                    chain.width = (chain.width / 1.25).max(1e-4);
                }
            }
            chain.reset_counters();
            let thin = g.max(1);
            let mut samples = Vec::with_capacity(per_chain[c]);
            for _ in 0..per_chain[c] {
                for _ in 0..thin {
                    chain.sweep();
                }
                let mut angles = chain.theta.clone();
                angles.sort_by(f64::total_cmp);
                samples.push(WeylSample { angles });
            }
            let diag = ChainDiag {
                chain: c,
                acceptance: chain.acceptance(),
                proposal_width: chain.width,
                ess: f64::NAN, // filled by the caller once a statistic exists
                converged: true,
            };
            (samples, diag)
        })
        .collect();
    let mut samples = Vec::with_capacity(count);
    let mut diags = Vec::with_capacity(chains);
    for (s, d) in results {
        samples.extend(s);
        diags.push(d);
    }
    Ok((samples, diags))
}

/// Count of the full spectrum {+-t_j} inside the symmetric interval.
pub fn count_symmetric(sample: &WeylSample, interval: &IntervalSpec) -> u32 {
    2 * sample
        .angles
        .iter()
        .filter(|&&t| t <= interval.beta / 2.0 + crate::zerostats::BOUNDARY_TOL)
        .count() as u32
}

/// Effective sample size from the autocorrelation of a scalar series,
/// truncated at the first nonpositive pair sum (Geyer-style).
pub fn effective_sample_size(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return n as f64;
    }
    let nf = n as f64;
    let mean = series.iter().sum::<f64>() / nf;
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    if var == 0.0 {
        return nf;
    }
    let auto = |lag: usize| -> f64 {
        series[..n - lag]
            .iter()
            .zip(&series[lag..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / nf
            / var
    };
    let mut tau = 1.0;
    let mut lag = 1;
    while lag + 1 < n / 2 {
        let pair = auto(lag) + auto(lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    (nf / tau).min(nf)
}

#[derive(Clone, Debug, Serialize)]
pub struct RmtConfig {
    pub g: u32,
    pub beta: f64,
    pub samples: usize,
    pub seed: u64,
    pub chains: usize,
    /// Fail (in strict callers) when diagnostics are bad.
    pub strict: bool,
}

#[derive(Clone, Debug)]
pub struct RmtRecord {
    pub stream: u64,
    pub g: u32,
    pub beta: f64,
    pub n_i: u32,
    pub s_centered: f64,
}

#[derive(Clone, Debug)]
pub struct RmtResult {
    pub config: RmtConfig,
    pub records: Vec<RmtRecord>,
    pub summary: StatSummary,
    pub diags: Vec<ChainDiag>,
    pub var_n_i: f64,
    pub predicted_variance: f64,
}

/// Counting statistics of the baseline ensemble, aggregated exactly like
/// the family sweep for a like-for-like comparison. The centered statistic
/// is N_I - 2 g beta (no arithmetic arc term exists here).
pub fn rmt_counting_stats(config: &RmtConfig) -> Result<RmtResult> {
    if !(0.0 < config.beta && config.beta < 1.0) {
        return Err(Error::InvalidInput("beta must be in (0,1)".into()));
    }
    let interval = IntervalSpec::new(config.beta)?;
    let (samples, mut diags) = sample_weyl(config.g, config.samples, config.seed, config.chains)?;
    let records: Vec<RmtRecord> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let n_i = count_symmetric(s, &interval);
            RmtRecord {
                stream: i as u64,
                g: config.g,
                beta: config.beta,
                n_i,
                s_centered: n_i as f64 - 2.0 * config.g as f64 * config.beta,
            }
        })
        .collect();
    // per-chain ESS of the count series
    let mut offset = 0;
    let per_chain: Vec<usize> = (0..config.chains)
        .map(|c| config.samples / config.chains + usize::from(c < config.samples % config.chains))
        .collect();
    for (c, diag) in diags.iter_mut().enumerate() {
        let series: Vec<f64> = records[offset..offset + per_chain[c]]
            .iter()
            .map(|r| r.n_i as f64)
            .collect();
        diag.ess = effective_sample_size(&series);
        diag.converged = diag.acceptance > 0.05
            && diag.acceptance < 0.8
            && (diag.ess >= 10.0 || series.len() < 20);
        offset += per_chain[c];
    }
    if config.strict {
        if let Some(bad) = diags.iter().find(|d| !d.converged) {
            return Err(Error::Diagnostics(format!(
                "chain {} failed: acceptance {:.3}, ess {:.1}",
                bad.chain, bad.acceptance, bad.ess
            )));
        }
    }
    let gb = config.g as f64 * config.beta;
    let normalizer = if gb > 1.05 {
        (2.0 / std::f64::consts::PI.powi(2) * gb.ln()).sqrt()
    } else {
        1.0
    };
    let values: Vec<f64> = records.iter().map(|r| r.s_centered).collect();
    let summary = StatSummary::from_values(&values, normalizer);
    let var_n_i = summary.variance;
    Ok(RmtResult {
        config: config.clone(),
        records,
        summary,
        diags,
        var_n_i,
        predicted_variance: 2.0 / std::f64::consts::PI.powi(2) * (2.0 * gb).ln(),
    })
}

/// CSV in the shared schema with source column `rmt`; the Q and K columns
/// do not apply and carry placeholders.
pub fn render_rmt_csv(result: &RmtResult) -> String {
    let mut out = String::new();
    let config_json = serde_json::to_string(&result.config).expect("config serializes");
    out.push_str(&format!("# config={config_json}\n"));
    out.push_str(&format!("# version={}\n", env!("CARGO_PKG_VERSION")));
    out.push_str("# field_moduli=none\n");
    out.push_str(crate::zerostats::CSV_HEADER);
    out.push('\n');
    for r in &result.records {
        out.push_str(&format!(
            "{},{},-,{},{},0,{},{},nan,nan,nan,nan,rmt\n",
            result.config.seed,
            r.stream,
            r.g,
            r.beta,
            r.n_i,
            fmt_f(r.s_centered),
        ));
    }
    out
}

/// Exact finite-size mean and variance of the symmetric-interval count for
/// the baseline ensemble, by Gauss-Legendre quadrature of the angle
/// process kernel: E = int K(x,x), Var = E - double int K(x,y)^2 over
/// [0, pi beta]^2.
pub fn usp_count_mean_var(g: u32, beta: f64) -> (f64, f64) {
    let n = g as f64;
    let a = std::f64::consts::PI * beta;
    let s = |t: f64| -> f64 {
        let half = t / 2.0;
        if half.sin().abs() < 1e-12 {
            (2.0 * n + 1.0) / (2.0 * std::f64::consts::PI)
        } else {
            ((2.0 * n + 1.0) * half).sin() / (2.0 * std::f64::consts::PI * half.sin())
        }
    };
    let kernel = |x: f64, y: f64| s(x - y) - s(x + y);
    let m = 400;
    let (nodes, weights) = gauss_legendre(m, 0.0, a);
    let mut e = 0.0;
    for i in 0..m {
        e += weights[i] * kernel(nodes[i], nodes[i]);
    }
    let mut double = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            let k = kernel(nodes[i], nodes[j]);
            row += weights[j] * k * k;
        }
        double += weights[i] * row;
    }
    let mean_m = e;
    let var_m = e - double;
    // full spectrum counts come in +- pairs
    (2.0 * mean_m, 4.0 * var_m)
}

/// Gauss-Legendre nodes and weights on [lo, hi] by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(m: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_m(x) and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = mf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // map [-1,1] -> [lo,hi]
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for i in 0..m {
        nodes[i] = mid + half * nodes[i];
        weights[i] *= half;
    }
    (nodes, weights)
}
