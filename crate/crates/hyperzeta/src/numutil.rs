//! Small numerical helpers for the statistical test harnesses: incomplete
//! gamma (chi-square tails), the Kolmogorov distribution, the normal CDF and
//! the Anderson-Darling statistic.

/// Lanczos approximation, g = 7, n = 9.
pub fn lgamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - lgamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum.ln() + a * x.ln() - x - lgamma(a)).exp()
    } else {
        // continued fraction for Q(a, x)
        let mut b = x + 1.0 - a;
        let mut c = 1e300;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = b + an / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (a * x.ln() - x - lgamma(a)).exp() * h;
        1.0 - q
    }
}

/// Upper tail of the chi-square distribution with k degrees of freedom.
pub fn chi2_sf(x: f64, k: f64) -> f64 {
    (1.0 - gamma_p(k / 2.0, x / 2.0)).clamp(0.0, 1.0)
}

/// Upper tail of the Kolmogorov distribution: P(K > lambda).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..200 {
        let term = (-2.0 * (j as f64).powi(2) * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-14 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Standard normal CDF via an Abramowitz-Stegun style erf approximation
/// (absolute error ~ 1.5e-7, ample for the test gates here).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// Anderson-Darling statistic A^2 against the fully specified N(0,1).
pub fn anderson_darling_normal(values: &[f64]) -> f64 {
    let mut z: Vec<f64> = values.to_vec();
    z.sort_by(f64::total_cmp);
    let n = z.len();
    let nf = n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let phi_lo = normal_cdf(z[i]).clamp(1e-300, 1.0 - 1e-16);
        let phi_hi = normal_cdf(z[n - 1 - i]).clamp(1e-300, 1.0 - 1e-16);
        acc += (2.0 * i as f64 + 1.0) * (phi_lo.ln() + (1.0 - phi_hi).ln());
    }
    -nf - acc / nf
}

/// Asymptotic 0.1% critical value of A^2 for a fully specified null.
pub const AD_CRIT_P001: f64 = 6.0;

/// Two-sided Kolmogorov-Smirnov test of sorted samples against a CDF;
/// returns (statistic, asymptotic p-value).
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let mut s: Vec<f64> = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i as f64 + 1.0) / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    (d, kolmogorov_sf(lambda))
}
