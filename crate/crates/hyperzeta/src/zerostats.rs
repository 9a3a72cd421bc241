//! Counting statistics of the zero angles and the seeded family sweeps
//! behind the variance and Gaussianity experiments.
//!
//! Per sample the pipeline is: draw Q, compute the prime character sums
//! once, assemble L* through the power-sum recursion, extract angles, then
//! form the sharp count, the smoothed pair, and the prime-only sum from the
//! same shared data. Two identities are enforced on every sample as
//! integrity checks: the majorant/minorant sandwich and the spectral ==
//! arithmetic form of the smoothed counts.
//!
//! Reproducibility contract: sample i of genus slot gi draws from a ChaCha
//! stream keyed by (master seed, gi, i), so output is byte-identical for
//! any worker count; workers only change scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::budget::Budget;
use crate::bspoly::{build_bs_pair, BsPair, TrigPoly};
use crate::ensemble::{self, EnsembleSpec, Mode};
use crate::error::{Error, Result};
use crate::explicit::{geometric_tail, prime_power_weighted_sum};
use crate::ffpoly::poly::Poly;
use crate::ffpoly::primes::PrimeTable;
use crate::lfunction::{
    lstar_from_prime_sums, prime_char_sums, zero_angles, LFunctionData, PrimeCharSums,
};

/// Closed symmetric interval [-beta/2, beta/2] on R/Z.
#[derive(Clone, Copy, Debug)]
pub struct IntervalSpec {
    pub beta: f64,
}

/// Angles within this distance of the endpoints count as inside.
pub const BOUNDARY_TOL: f64 = 1e-9;

impl IntervalSpec {
    pub fn new(beta: f64) -> Result<IntervalSpec> {
        if !(0.0 < beta && beta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "interval length must be in (0,1), got {beta}"
            )));
        }
        Ok(IntervalSpec { beta })
    }

    pub fn contains(&self, theta: f64) -> bool {
        let d = (theta - theta.round()).abs();
        d <= self.beta / 2.0 + BOUNDARY_TOL
    }
}

/// Number of angles in the closed interval.
pub fn count_in_interval(angles: &[f64], interval: &IntervalSpec) -> u32 {
    angles.iter().filter(|&&t| interval.contains(t)).count() as u32
}

/// The fixed arc correction (2/pi) arg(1 - e^(i pi beta)/sqrt(q)).
pub fn arc_term(q: u32, beta: f64) -> f64 {
    let sqrt_q = (q as f64).sqrt();
    let phi = std::f64::consts::PI * beta;
    let re = 1.0 - phi.cos() / sqrt_q;
    let im = -phi.sin() / sqrt_q;
    2.0 / std::f64::consts::PI * im.atan2(re)
}

/// S_I = N_I - 2g beta - arc term; the centered fluctuation.
pub fn s_statistic(n_i: u32, g: u32, q: u32, beta: f64) -> f64 {
    n_i as f64 - 2.0 * g as f64 * beta - arc_term(q, beta)
}

/// Centered count directly from an L-function record.
pub fn s_statistic_of(data: &LFunctionData, interval: &IntervalSpec) -> f64 {
    let n_i = count_in_interval(&data.angles, interval);
    s_statistic(n_i, data.g, data.q, interval.beta)
}

#[derive(Clone, Copy, Debug)]
pub struct SmoothedCounts {
    pub n_plus: f64,
    pub n_minus: f64,
    pub s_plus: f64,
    pub s_minus: f64,
}

/// Tolerance for the per-sample identity between the spectral and the
/// arithmetic evaluation of the smoothed counts.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Smoothed counts from shared per-sample data. Enforces the sandwich and
/// the spectral-vs-arithmetic identity; both are theorems, so violations
/// abort the pipeline.
pub fn smoothed_counts_core(
    angles: &[f64],
    n_i: u32,
    genus: u32,
    q: u32,
    pair: &BsPair,
    sums: &PrimeCharSums,
    table: &PrimeTable,
) -> Result<SmoothedCounts> {
    let d = 2.0 * genus as f64;
    let defect = 1.0 / (pair.k as f64 + 1.0);
    let mut n_sides = [0.0f64; 2];
    let mut s_sides = [0.0f64; 2];
    for (slot, (side, sign)) in [(&pair.plus, 1.0), (&pair.minus, -1.0)].into_iter().enumerate() {
        let spectral: f64 = angles.iter().map(|&t| side.eval(t)).sum();
        let tail = geometric_tail(side, q);
        let arithmetic = d * (pair.beta + sign * defect) - 2.0 * tail
            - 2.0 * prime_power_weighted_sum(side, sums, table, q);
        if (spectral - arithmetic).abs() > IDENTITY_TOL * (1.0 + spectral.abs()) {
            return Err(Error::Integrity(format!(
                "smoothed count identity broke: spectral {spectral} vs arithmetic {arithmetic}"
            )));
        }
        n_sides[slot] = spectral;
        s_sides[slot] = spectral - d * (pair.beta + sign * defect) + 2.0 * tail;
    }
    let sc = SmoothedCounts {
        n_plus: n_sides[0],
        s_plus: s_sides[0],
        n_minus: n_sides[1],
        s_minus: s_sides[1],
    };
    if sc.n_minus > n_i as f64 + IDENTITY_TOL || (n_i as f64) > sc.n_plus + IDENTITY_TOL {
        return Err(Error::Integrity(format!(
            "sandwich violated: {} <= {} <= {} fails",
            sc.n_minus, n_i, sc.n_plus
        )));
    }
    Ok(sc)
}

fn family_genus(q_poly: &Poly) -> Result<u32> {
    let d = q_poly.degree().ok_or(Error::ZeroPolynomial)?;
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidInput(
            "family polynomial must have even degree >= 2".into(),
        ));
    }
    Ok(((d - 2) / 2) as u32)
}

/// Spec-level convenience: everything recomputed from Q.
pub fn smoothed_counts(
    q_poly: &Poly,
    interval: &IntervalSpec,
    k: usize,
    budget: &Budget,
) -> Result<SmoothedCounts> {
    let genus = family_genus(q_poly)?;
    let q = q_poly.q();
    let max_deg = k.max(genus as usize).max(1);
    let table = PrimeTable::shared(q, max_deg, budget)?;
    let sums = prime_char_sums(q_poly, max_deg, &table)?;
    let lstar = lstar_from_prime_sums(q_poly, &table, &sums)?;
    let angles = zero_angles(&lstar, q)?;
    let pair = build_bs_pair(interval.beta, k)?;
    let n_i = count_in_interval(&angles, interval);
    smoothed_counts_core(&angles, n_i, genus, q, &pair, &sums, &table)
}

/// T_K = -2 sum over primes of coeff(deg P) deg P chi_Q(P) / sqrt(||P||),
/// both smoothing signs, assembled from per-degree prime sums.
pub fn prime_sum_t(pair: &BsPair, sums: &PrimeCharSums, q: u32) -> (f64, f64) {
    let r = 1.0 / (q as f64).sqrt();
    let mut plus = 0.0;
    let mut minus = 0.0;
    for d in 1..=pair.k.min(sums.max_degree) {
        let w = d as f64 * r.powi(d as i32) * sums.a(d) as f64;
        plus += pair.plus.coeff(d) * w;
        minus += pair.minus.coeff(d) * w;
    }
    (-2.0 * plus, -2.0 * minus)
}

/// Spec-level convenience for a single Q.
pub fn prime_sum_t_of(
    q_poly: &Poly,
    interval: &IntervalSpec,
    k: usize,
    budget: &Budget,
) -> Result<(f64, f64)> {
    let q = q_poly.q();
    let table = PrimeTable::shared(q, k.max(1), budget)?;
    let sums = prime_char_sums(q_poly, k, &table)?;
    let pair = build_bs_pair(interval.beta, k)?;
    Ok(prime_sum_t(&pair, &sums, q))
}

/// Even-exponent prime-power part of the smoothed sum, for the split
/// monitor: -2 sum over squares P^(2m) coprime to Q of
/// coeff(2m deg P) deg P / ||P||^m.
pub fn even_power_part(side: &TrigPoly, sums: &PrimeCharSums, table: &PrimeTable, q: u32) -> f64 {
    let kmax = side.degree();
    let qf = q as f64;
    let mut acc = 0.0;
    for d in 1..=sums.max_degree {
        let mut m = 1;
        while 2 * m * d <= kmax {
            let free = table.count(d) as f64 - sums.b(d) as f64;
            acc += side.coeff(2 * m * d) * d as f64 * free / qf.powi((m * d) as i32);
            m += 1;
        }
    }
    -2.0 * acc
}

/// K-selection rule. Auto follows g / loglog(g beta), rounded, guarded to
/// fall back to g when the double log is not positive, and capped at g so
/// the sweep reuses the prime sums already needed for the L-function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum KRule {
    Auto,
    Fixed(usize),
}

pub fn resolve_k(rule: KRule, g: u32, beta: f64, q: u32, budget: &Budget) -> Result<usize> {
    match rule {
        KRule::Fixed(k) => {
            if k < 1 {
                return Err(Error::InvalidInput("K must be >= 1".into()));
            }
            budget.check_pow(q as u64, k as u32)?;
            Ok(k)
        }
        KRule::Auto => {
            let gb = g as f64 * beta;
            let raw = if gb > std::f64::consts::E {
                (g as f64 / gb.ln().ln()).round() as usize
            } else {
                g as usize
            };
            let mut k = raw.clamp(1, g.max(1) as usize);
            while k > 1 && budget.check_pow(q as u64, k as u32).is_err() {
                k -= 1;
            }
            budget.check_pow(q as u64, k as u32)?;
            Ok(k)
        }
    }
}

/// One row of the per-sample CSV.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub stream: u64,
    pub q_digits: String,
    pub g: u32,
    pub beta: f64,
    pub k: usize,
    pub n_i: u32,
    pub s_i: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    pub s_plus: f64,
    pub s_minus: f64,
}

/// Moments and histogram of one statistic across the sample set.
#[derive(Clone, Debug, Serialize)]
pub struct StatSummary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Central moments m2..m8 (population form); index 0 is m2.
    pub central_moments: Vec<f64>,
    pub stderr_mean: f64,
    pub stderr_variance: f64,
    pub histogram: Histogram,
}

#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
    /// Mass per bin, sums to 1; out-of-range values clamp to edge bins.
    pub mass: Vec<f64>,
    /// Divisor applied to raw values before binning.
    pub normalizer: f64,
}

impl StatSummary {
    pub fn from_values(values: &[f64], normalizer: f64) -> StatSummary {
        let n = values.len();
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let mut central = vec![0.0f64; 7]; // m2..m8
        for &v in values {
            let d = v - mean;
            let mut p = d * d;
            for slot in central.iter_mut() {
                *slot += p;
                p *= d;
            }
        }
        for slot in central.iter_mut() {
            *slot /= nf;
        }
        let m2 = central[0];
        let m4 = central[2];
        let variance = if n > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };
        let stderr_mean = (variance / nf).sqrt();
        let stderr_variance = ((m4 - m2 * m2).max(0.0) / nf).sqrt();
        let bins = 40;
        let (lo, hi) = (-5.0, 5.0);
        let mut mass = vec![0.0f64; bins];
        for &v in values {
            let z = v / normalizer;
            let idx =
                (((z - lo) / (hi - lo) * bins as f64).floor() as i64).clamp(0, bins as i64 - 1);
            mass[idx as usize] += 1.0 / nf;
        }
        StatSummary {
            count: n,
            mean,
            variance,
            central_moments: central,
            stderr_mean,
            stderr_variance,
            histogram: Histogram {
                lo,
                hi,
                bins,
                mass,
                normalizer,
            },
        }
    }

    /// Skewness m3 / m2^(3/2); scale-invariant.
    pub fn skewness(&self) -> f64 {
        self.central_moments[1] / self.central_moments[0].powf(1.5)
    }

    /// Kurtosis ratio m4 / m2^2; Gaussian value 3.
    pub fn kurtosis(&self) -> f64 {
        self.central_moments[2] / self.central_moments[0].powi(2)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub q: u32,
    pub g_list: Vec<u32>,
    pub beta: f64,
    pub k_rule: KRule,
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; None uses the process default. Affects speed only,
    /// never output bytes, so it is excluded from the config echo and hash.
    #[serde(skip)]
    pub workers: Option<usize>,
    #[serde(skip)]
    pub budget: Budget,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q < 3 || self.q % 2 == 0 || !crate::ffpoly::fp::is_prime(self.q as u64) {
            return Err(Error::InvalidInput(format!(
                "q={} is not an odd prime",
                self.q
            )));
        }
        if !(0.0 < self.beta && self.beta < 1.0) {
            return Err(Error::InvalidInput("beta must be in (0,1)".into()));
        }
        if self.g_list.is_empty() || self.samples == 0 {
            return Err(Error::InvalidInput(
                "need at least one genus and one sample".into(),
            ));
        }
        Ok(())
    }

    /// Short hash of the canonical config serialization; embedded in every
    /// output file.
    pub fn config_hash(&self) -> String {
        let blob = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(blob.as_bytes());
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenusResult {
    pub g: u32,
    pub k: usize,
    pub s_i: StatSummary,
    pub t_plus: StatSummary,
    pub t_minus: StatSummary,
    /// Var(N_I); identical to the S_I variance since they differ by a shift.
    pub var_n_i: f64,
    pub predicted_variance: f64,
    pub records: Vec<SampleRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub version: String,
    pub per_g: Vec<GenusResult>,
}

fn stream_id(g_slot: usize, sample: usize) -> u64 {
    ((g_slot as u64) << 40) | sample as u64
}

/// One full sample: draw Q, build the L-function by prime power sums,
/// extract every statistic. Pure given (config, stream id).
fn run_one_sample(
    q: u32,
    g: u32,
    beta: f64,
    seed: u64,
    stream: u64,
    max_deg: usize,
    table: &PrimeTable,
    pair: &BsPair,
) -> Result<SampleRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let spec = EnsembleSpec {
        q,
        g,
        mode: Mode::Sampled { seed, count: 1 },
    };
    let q_poly = ensemble::sample(&spec, &mut rng)?;
    let sums = prime_char_sums(&q_poly, max_deg, table)?;
    let lstar = lstar_from_prime_sums(&q_poly, table, &sums)?;
    let angles = zero_angles(&lstar, q)?;
    let interval = IntervalSpec { beta };
    let n_i = count_in_interval(&angles, &interval);
    let s_i = s_statistic(n_i, g, q, beta);
    let (t_plus, t_minus) = prime_sum_t(pair, &sums, q);
    let sc = smoothed_counts_core(&angles, n_i, g, q, pair, &sums, table)?;
    Ok(SampleRecord {
        stream,
        q_digits: q_poly.digits(),
        g,
        beta,
        k: pair.k,
        n_i,
        s_i,
        t_plus,
        t_minus,
        s_plus: sc.s_plus,
        s_minus: sc.s_minus,
    })
}

/// The family sweep: per genus, `samples` seeded draws with the full
/// per-sample pipeline, aggregated into moment summaries.
pub fn run_moment_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let run = || -> Result<Vec<GenusResult>> {
        config
            .g_list
            .iter()
            .enumerate()
            .map(|(slot, &g)| run_genus(config, slot, g))
            .collect()
    };
    let per_g = match config.workers {
        None => run()?,
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
            pool.install(run)?
        }
    };
    Ok(ExperimentResult {
        config: config.clone(),
        config_hash: config.config_hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        per_g,
    })
}

fn run_genus(config: &ExperimentConfig, slot: usize, g: u32) -> Result<GenusResult> {
    let q = config.q;
    let k = resolve_k(config.k_rule, g, config.beta, q, &config.budget)?;
    let max_deg = k.max(g as usize).max(1);
    let table = PrimeTable::shared(q, max_deg, &config.budget)?;
    let pair = build_bs_pair(config.beta, k)?;
    let records: Vec<SampleRecord> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            run_one_sample(
                q,
                g,
                config.beta,
                config.seed,
                stream_id(slot, i),
                max_deg,
                &table,
                &pair,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let gb = g as f64 * config.beta;
    let normalizer = if gb > 1.05 {
        (2.0 / std::f64::consts::PI.powi(2) * gb.ln()).sqrt()
    } else {
        1.0
    };
    let s_vals: Vec<f64> = records.iter().map(|r| r.s_i).collect();
    let tp: Vec<f64> = records.iter().map(|r| r.t_plus).collect();
    let tm: Vec<f64> = records.iter().map(|r| r.t_minus).collect();
    let s_i = StatSummary::from_values(&s_vals, normalizer);
    let var_n_i = s_i.variance;
    Ok(GenusResult {
        g,
        k,
        s_i,
        t_plus: StatSummary::from_values(&tp, normalizer),
        t_minus: StatSummary::from_values(&tm, normalizer),
        var_n_i,
        predicted_variance: 2.0 / std::f64::consts::PI.powi(2) * (2.0 * gb).ln(),
        records,
    })
}

/// Deterministic fixed-format float for CSV output.
pub(crate) fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.12e}")
    }
}

pub const CSV_HEADER: &str = "seed,worker,Q,g,beta,K,N_I,S_I,T_plus,T_minus,S_plus,S_minus,source";

/// Per-sample CSV with reproducibility headers. The worker column carries
/// the deterministic stream id, not the executing thread, so output is
/// byte-identical for any --workers.
pub fn render_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("# config_hash={}\n", result.config_hash));
    out.push_str(&format!("# version={}\n", result.version));
    out.push_str(&format!(
        "# config={}\n",
        serde_json::to_string(&result.config).expect("config serializes")
    ));
    out.push_str("# field_moduli=none (prime character sum route)\n");
    out.push_str(CSV_HEADER);
    out.push('\n');
    for gr in &result.per_g {
        for r in &gr.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},hyperelliptic\n",
                result.config.seed,
                r.stream,
                r.q_digits,
                r.g,
                r.beta,
                r.k,
                r.n_i,
                fmt_f(r.s_i),
                fmt_f(r.t_plus),
                fmt_f(r.t_minus),
                fmt_f(r.s_plus),
                fmt_f(r.s_minus),
            ));
        }
    }
    out
}

/// Summary JSON: config echo plus per-genus moment summaries (records
/// omitted).
pub fn render_summary_json(result: &ExperimentResult) -> serde_json::Value {
    let per_g: Vec<serde_json::Value> = result
        .per_g
        .iter()
        .map(|gr| {
            serde_json::json!({
                "g": gr.g,
                "K": gr.k,
                "samples": gr.records.len(),
                "S_I": gr.s_i,
                "T_plus": gr.t_plus,
                "T_minus": gr.t_minus,
                "var_N_I": gr.var_n_i,
                "predicted_variance": gr.predicted_variance,
            })
        })
        .collect();
    serde_json::json!({
        "config": result.config,
        "config_hash": result.config_hash,
        "version": result.version,
        "source": "hyperelliptic",
        "per_g": per_g,
    })
}

/// gnuplot-ready variance table: g, log(2 g beta), empirical Var(N_I),
/// predicted, stderr.
pub fn render_variance_dat(result: &ExperimentResult) -> String {
    let mut out = String::from("# g log(2*g*beta) var_empirical var_predicted stderr\n");
    for gr in &result.per_g {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            gr.g,
            fmt_f((2.0 * gr.g as f64 * result.config.beta).ln()),
            fmt_f(gr.var_n_i),
            fmt_f(gr.predicted_variance),
            fmt_f(gr.s_i.stderr_variance),
        ));
    }
    out
}

/// Exhaustive count of perfect matchings of n labeled items.
pub fn count_perfect_matchings(items: usize) -> u64 {
    if items % 2 == 1 {
        return 0;
    }
    let all: Vec<usize> = (0..items).collect();
    count_matchings_of(&all)
}

fn count_matchings_of(items: &[usize]) -> u64 {
    if items.is_empty() {
        return 1;
    }
    // pair items[0] with each possible partner, recurse on the rest
    let mut total = 0;
    for idx in 1..items.len() {
        let rest: Vec<usize> = items[1..]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx - 1)
            .map(|(_, &x)| x)
            .collect();
        total += count_matchings_of(&rest);
    }
    total
}

/// (2r)! / (r! 2^r), the closed form the matching count must equal.
pub fn double_factorial_form(r: u32) -> u64 {
    let fact = |n: u64| (1..=n).product::<u64>();
    fact(2 * r as u64) / (fact(r as u64) * 2u64.pow(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction::{lfunction_data, Route};

    #[test]
    fn counting_with_boundary_convention() {
        let i6 = IntervalSpec::new(0.6).unwrap();
        assert_eq!(count_in_interval(&[-0.25, 0.25], &i6), 2);
        // boundary inclusive at beta = 0.5
        let i5 = IntervalSpec::new(0.5).unwrap();
        assert_eq!(count_in_interval(&[-0.25, 0.25], &i5), 2);
        // near-full circle catches every interior angle; the boundary angle
        // 1/2 (= -1/2 mod 1) stays outside for every beta < 1
        let i99 = IntervalSpec::new(0.999).unwrap();
        assert_eq!(count_in_interval(&[-0.49, -0.1, 0.0, 0.3, 0.49], &i99), 5);
        assert_eq!(count_in_interval(&[0.5], &i99), 0);
    }

    #[test]
    fn s_statistic_is_definitional_rearrangement() {
        let b = Budget::default();
        let data = lfunction_data(
            &Poly::from_digits(3, "11001").unwrap(),
            Route::CharacterSums,
            &b,
        )
        .unwrap();
        let interval = IntervalSpec::new(0.5).unwrap();
        let n_i = count_in_interval(&data.angles, &interval);
        let s = s_statistic_of(&data, &interval);
        let rebuilt = 2.0 * data.g as f64 * 0.5 + arc_term(3, 0.5) + s;
        assert!((rebuilt - n_i as f64).abs() < 1e-12);
    }

    #[test]
    fn arc_term_numeric_value() {
        let z_re = 1.0 - (0.3 * std::f64::consts::PI).cos() / 3f64.sqrt();
        let z_im = -(0.3 * std::f64::consts::PI).sin() / 3f64.sqrt();
        let want = 2.0 / std::f64::consts::PI * z_im.atan2(z_re);
        assert!((arc_term(3, 0.3) - want).abs() < 1e-15);
        assert!(arc_term(3, 0.3) < 0.0);
    }

    #[test]
    fn smoothed_counts_sandwich_and_identity() {
        let b = Budget::default();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut done = 0;
        while done < 20 {
            let deg = 2 * rng.gen_range(1..=3usize) + 2;
            let q_poly = Poly::from_code(3, rng.gen_range(0..3u64.pow(deg as u32)), deg);
            if !crate::ffpoly::factor::is_squarefree(&q_poly).unwrap() {
                continue;
            }
            done += 1;
            let beta = rng.gen_range(0.1..0.9);
            let k = rng.gen_range(1..=8usize);
            let interval = IntervalSpec::new(beta).unwrap();
            // constructor runs both integrity checks internally
            smoothed_counts(&q_poly, &interval, k, &b).unwrap();
        }
    }

    #[test]
    fn smoothed_counts_approach_sharp_count_for_large_k() {
        let b = Budget::default();
        let q_poly = Poly::from_digits(3, "2011001").unwrap();
        let data = lfunction_data(&q_poly, Route::CharacterSums, &b).unwrap();
        let interval = IntervalSpec::new(0.4).unwrap();
        let n_i = count_in_interval(&data.angles, &interval) as f64;
        let k = 12;
        let sc = smoothed_counts(&q_poly, &interval, k, &b).unwrap();
        let slack = 2.0 * data.g as f64 / (k as f64 + 1.0) + 1.0;
        assert!((sc.n_plus - n_i).abs() <= slack);
        assert!((sc.n_minus - n_i).abs() <= slack);
        // a K beyond the prime-enumeration budget is refused, not truncated
        assert!(matches!(
            smoothed_counts(&q_poly, &interval, 64, &b),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn k_rule_guards_and_caps() {
        let b = Budget::default();
        // g beta below e falls back to K = g
        assert_eq!(resolve_k(KRule::Auto, 8, 0.3, 3, &b).unwrap(), 8);
        // g beta above e uses the rounded rule but never exceeds g
        assert_eq!(resolve_k(KRule::Auto, 16, 0.3, 3, &b).unwrap(), 16);
        // explicit K passes through when feasible
        assert_eq!(resolve_k(KRule::Fixed(10), 16, 0.3, 3, &b).unwrap(), 10);
        // infeasible explicit K is refused
        let tiny = Budget::new(100);
        assert!(resolve_k(KRule::Fixed(12), 16, 0.3, 3, &tiny).is_err());
    }

    #[test]
    fn matching_counts_match_double_factorial() {
        let expected = [3u64, 15, 105, 945]; // (2r-1)!! for r = 2..5
        for (i, r) in (2u32..=5).enumerate() {
            assert_eq!(count_perfect_matchings(2 * r as usize), expected[i]);
            assert_eq!(double_factorial_form(r), expected[i]);
        }
        assert_eq!(count_perfect_matchings(2), 1);
        assert_eq!(count_perfect_matchings(3), 0);
    }

    #[test]
    fn experiment_is_deterministic_across_worker_counts() {
        let config = ExperimentConfig {
            q: 3,
            g_list: vec![2, 3],
            beta: 0.5,
            k_rule: KRule::Auto,
            samples: 24,
            seed: 42,
            workers: Some(1),
            budget: Budget::default(),
        };
        let r1 = run_moment_experiment(&config).unwrap();
        let mut c2 = config.clone();
        c2.workers = Some(3);
        let r2 = run_moment_experiment(&c2).unwrap();
        let mut c3 = config.clone();
        c3.workers = None;
        let r3 = run_moment_experiment(&c3).unwrap();
        // workers must not leak into the hash or the bytes
        assert_eq!(render_csv(&r1), render_csv(&r2));
        assert_eq!(render_csv(&r1), render_csv(&r3));
        assert_eq!(render_variance_dat(&r1), render_variance_dat(&r2));
    }

    #[test]
    fn experiment_seed_changes_output() {
        let mut config = ExperimentConfig {
            q: 3,
            g_list: vec![2],
            beta: 0.5,
            k_rule: KRule::Auto,
            samples: 8,
            seed: 1,
            workers: Some(1),
            budget: Budget::default(),
        };
        let r1 = run_moment_experiment(&config).unwrap();
        config.seed = 2;
        let r2 = run_moment_experiment(&config).unwrap();
        assert_ne!(render_csv(&r1), render_csv(&r2));
    }

    #[test]
    fn summary_moments_are_sane() {
        let vals: Vec<f64> = (0..1000)
            .map(|i| ((i * 37) % 101) as f64 / 50.0 - 1.0)
            .collect();
        let s = StatSummary::from_values(&vals, 1.0);
        assert!(s.variance > 0.0);
        assert!((s.histogram.mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(s.kurtosis() > 1.0);
        assert!(s.stderr_mean > 0.0);
    }
}
