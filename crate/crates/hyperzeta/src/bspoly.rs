//! Majorant/minorant trigonometric polynomials for symmetric interval
//! indicators, with the exact integral defect 1/(K+1).
//!
//! The construction applies Vaaler's interpolation to each edge of the
//! interval and periodizes: writing N = K+1 and jw(t) = pi t (1-t) cot(pi t)
//! + t, the one-sided Fourier coefficients of the pair for
//! I = [-beta/2, beta/2] are
//!
//! ```text
//! coeff(0) = beta +- 1/N
//! coeff(k) = jw(k/N) sin(pi k beta)/(pi k) +- (1/N)(1 - k/N) cos(pi k beta)
//! ```
//!
//! which yields closed-form coefficients, no numerical optimization. The
//! test suite is construction-agnostic: it checks the degree bound, the
//! two-sided majorization, the exact integral defect and evenness.

use serde::Serialize;

use crate::error::{Error, Result};

/// Real even trigonometric polynomial stored by one-sided Fourier
/// coefficients: h(theta) = coeff(0) + 2 sum_k coeff(k) cos(2 pi k theta).
#[derive(Clone, Debug, Serialize)]
pub struct TrigPoly {
    coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn new(coeffs: Vec<f64>) -> TrigPoly {
        assert!(!coeffs.is_empty());
        TrigPoly { coeffs }
    }

    /// Constant test function h = c.
    pub fn constant(c: f64) -> TrigPoly {
        TrigPoly { coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// One-sided coefficient; coeff(-k) = coeff(k) implicitly.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.coeffs[0];
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * c * (2.0 * std::f64::consts::PI * k as f64 * theta).cos();
        }
        acc
    }
}

/// The pair I^-_K <= indicator <= I^+_K for I = [-beta/2, beta/2].
#[derive(Clone, Debug)]
pub struct BsPair {
    pub beta: f64,
    pub k: usize,
    pub minus: TrigPoly,
    pub plus: TrigPoly,
}

/// Vaaler's damping weight; smooth on (0,1) with jw(0+) = 1, jw(1-) = 0.
fn jw(t: f64) -> f64 {
    let pt = std::f64::consts::PI * t;
    pt * (1.0 - t) / pt.tan() + t
}

pub fn build_bs_pair(beta: f64, k: usize) -> Result<BsPair> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "interval length must be in (0,1), got {beta}"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidInput("degree K must be >= 1".into()));
    }
    let n = (k + 1) as f64;
    let pi = std::f64::consts::PI;
    let mut minus = Vec::with_capacity(k + 1);
    let mut plus = Vec::with_capacity(k + 1);
    minus.push(beta - 1.0 / n);
    plus.push(beta + 1.0 / n);
    for j in 1..=k {
        let jf = j as f64;
        let main = jw(jf / n) * (pi * jf * beta).sin() / (pi * jf);
        let edge = (1.0 / n) * (1.0 - jf / n) * (pi * jf * beta).cos();
        minus.push(main - edge);
        plus.push(main + edge);
    }
    Ok(BsPair {
        beta,
        k,
        minus: TrigPoly::new(minus),
        plus: TrigPoly::new(plus),
    })
}

/// Closed-interval indicator of [-beta/2, beta/2] on R/Z.
pub fn indicator(theta: f64, beta: f64) -> f64 {
    let d = (theta - theta.round()).abs();
    if d <= beta / 2.0 {
        1.0
    } else {
        0.0
    }
}

/// sum_(n >= 1) coeff(2n); zero coefficients beyond the degree make the sum
/// finite (empty for K = 1).
pub fn coeff_sum_even(h: &TrigPoly) -> f64 {
    let mut acc = 0.0;
    let mut n = 1;
    while 2 * n <= h.degree() {
        acc += h.coeff(2 * n);
        n += 1;
    }
    acc
}

/// sum_(n=1..K) n * coeff(n)^2.
pub fn weighted_square_sum(h: &TrigPoly) -> f64 {
    h.coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &c)| n as f64 * c * c)
        .sum()
}
