//! Both sides of the explicit formula, enforced as a machine-checkable
//! identity.
//!
//! Spectral side: sum of a real even trigonometric test polynomial over the
//! zero angles. Arithmetic side: the main term 2g*coeff(0), the geometric
//! series replacing the contour term at infinity, and prime-power character
//! sums. The identity is unconditional, so any violation beyond float
//! roundup is a build-breaking bug.

use crate::budget::Budget;
use crate::bspoly::TrigPoly;
use crate::error::{Error, Result};
use crate::ffpoly::poly::Poly;
use crate::ffpoly::primes::PrimeTable;
use crate::lfunction::{prime_char_sums, LFunctionData, PrimeCharSums};

/// sum_j h(theta_j) over the inverse-zero angles.
pub fn lhs_spectral(h: &TrigPoly, data: &LFunctionData) -> f64 {
    data.angles.iter().map(|&t| h.eval(t)).sum()
}

/// The infinite-place term as a geometric Fourier sum:
/// sum_(k=1..K) coeff(k) q^(-k/2). Exact to machine precision, no
/// quadrature.
pub fn geometric_tail(h: &TrigPoly, q: u32) -> f64 {
    let r = 1.0 / (q as f64).sqrt();
    let mut acc = 0.0;
    let mut rk = 1.0;
    for k in 1..=h.degree() {
        rk *= r;
        acc += h.coeff(k) * rk;
    }
    acc
}

/// Weighted prime-power sum
/// sum over prime powers P^j with j*deg P <= deg(h) of
/// coeff(j d) * d * q^(-jd/2) * chi(P^j), assembled from per-degree prime
/// character sums: odd j keeps A_d, even j collapses to (pi_d - B_d).
pub fn prime_power_weighted_sum(
    h: &TrigPoly,
    sums: &PrimeCharSums,
    table: &PrimeTable,
    q: u32,
) -> f64 {
    let kmax = h.degree();
    let r = 1.0 / (q as f64).sqrt();
    let mut acc = 0.0;
    for d in 1..=kmax.min(sums.max_degree) {
        let mut j = 1;
        while j * d <= kmax {
            let chi_part = if j % 2 == 1 {
                sums.a(d) as f64
            } else {
                table.count(d) as f64 - sums.b(d) as f64
            };
            acc += h.coeff(j * d) * d as f64 * r.powi((j * d) as i32) * chi_part;
            j += 1;
        }
    }
    acc
}

/// Arithmetic side of the identity for the even quadratic character of Q:
/// 2g coeff(0) - 2 * geometric tail - 2 * prime-power sum.
pub fn rhs_arithmetic(h: &TrigPoly, q_poly: &Poly, budget: &Budget) -> Result<f64> {
    let deg = q_poly.degree().ok_or(Error::ZeroPolynomial)?;
    if deg % 2 != 0 || deg < 2 {
        return Err(Error::InvalidInput(
            "arithmetic side implemented for the even-degree family".into(),
        ));
    }
    let g = (deg - 2) / 2;
    let q = q_poly.q();
    let k = h.degree();
    let table = PrimeTable::shared(q, k.max(1), budget)?;
    let sums = prime_char_sums(q_poly, k, &table)?;
    Ok(rhs_from_sums(h, g as u32, &sums, &table, q))
}

/// Arithmetic side from precomputed prime character sums.
pub fn rhs_from_sums(
    h: &TrigPoly,
    g: u32,
    sums: &PrimeCharSums,
    table: &PrimeTable,
    q: u32,
) -> f64 {
    2.0 * g as f64 * h.coeff(0)
        - 2.0 * geometric_tail(h, q)
        - 2.0 * prime_power_weighted_sum(h, sums, table, q)
}

/// Power sums of the inverse zeros recovered exactly from the integer
/// coefficients of L*: s_n = -n a_n - sum_(i=1..n-1) s_i a_(n-i).
pub fn power_sums_from_coeffs(coeffs_lstar: &[i64], n_max: usize) -> Result<Vec<i128>> {
    let d = coeffs_lstar.len() - 1;
    let mut s = vec![0i128; n_max + 1];
    for n in 1..=n_max {
        let mut acc: i128 = -(n as i128)
            * if n <= d {
                coeffs_lstar[n] as i128
            } else {
                0
            };
        for i in 1..n {
            let a = if n - i <= d {
                coeffs_lstar[n - i] as i128
            } else {
                0
            };
            acc -= s[i]
                .checked_mul(a)
                .ok_or_else(|| Error::Integrity("overflow recovering power sums".into()))?;
        }
        s[n] = acc;
    }
    Ok(s)
}

/// Exact integer form of the identity for 1 <= n <= n_max:
/// -sum_j alpha_j^n = sum_(deg f = n) Lambda(f) chi_Q(f) + 1.
/// Returns an integrity error naming the first n where the two sides differ.
pub fn check_power_sum_identity(
    coeffs_lstar: &[i64],
    sums: &PrimeCharSums,
    table: &PrimeTable,
    n_max: usize,
) -> Result<()> {
    let s = power_sums_from_coeffs(coeffs_lstar, n_max)?;
    for n in 1..=n_max {
        let lhs = -s[n];
        let rhs = crate::lfunction::lambda_chi_sum(sums, table, n) as i128 + 1;
        if lhs != rhs {
            return Err(Error::Integrity(format!(
                "power-sum identity fails at n = {n}: {lhs} vs {rhs}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspoly::build_bs_pair;
    use crate::ffpoly::factor::is_squarefree;
    use crate::lfunction::{lfunction_data, Route};
    use rand::{Rng, SeedableRng};

    #[test]
    fn constant_test_function_gives_two_g() {
        let b = Budget::default();
        let h = TrigPoly::constant(1.0);
        let data = lfunction_data(&Poly::from_digits(3, "11001").unwrap(), Route::CharacterSums, &b)
            .unwrap();
        assert_eq!(lhs_spectral(&h, &data), 2.0);
        let rhs = rhs_arithmetic(&h, &Poly::from_digits(3, "11001").unwrap(), &b).unwrap();
        assert!((rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pure_cosine_on_quarter_angles_vanishes() {
        // h(theta) = 2 cos(2 pi theta); L* = 1 + 3u^2 has angles +-1/4
        let b = Budget::default();
        let h = TrigPoly::new(vec![0.0, 1.0]);
        let data = lfunction_data(&Poly::from_digits(3, "21001").unwrap(), Route::CharacterSums, &b)
            .unwrap();
        assert!(lhs_spectral(&h, &data).abs() < 1e-12);
    }

    #[test]
    fn identity_exhaustive_genus_one() {
        let b = Budget::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for code in 0..81u64 {
            let q_poly = Poly::from_code(3, code, 4);
            if !is_squarefree(&q_poly).unwrap() {
                continue;
            }
            let data = lfunction_data(&q_poly, Route::CharacterSums, &b).unwrap();
            for k in 1..=6usize {
                // one Beurling-Selberg side and one random test polynomial
                let pair = build_bs_pair(0.37, k).unwrap();
                let coeffs: Vec<f64> = (0..=k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for h in [pair.plus, pair.minus, TrigPoly::new(coeffs)] {
                    let lhs = lhs_spectral(&h, &data);
                    let rhs = rhs_arithmetic(&h, &q_poly, &b).unwrap();
                    assert!(
                        (lhs - rhs).abs() < 1e-10,
                        "identity off by {} at Q={q_poly} K={k}",
                        (lhs - rhs).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn identity_random_genus_three() {
        let b = Budget::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut tried = 0;
        while tried < 6 {
            let q_poly = Poly::from_code(3, rng.gen_range(0..3u64.pow(8)), 8);
            if !is_squarefree(&q_poly).unwrap() {
                continue;
            }
            tried += 1;
            let data = lfunction_data(&q_poly, Route::PointCounts, &b).unwrap();
            let coeffs: Vec<f64> = (0..=7).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let h = TrigPoly::new(coeffs);
            let lhs = lhs_spectral(&h, &data);
            let rhs = rhs_arithmetic(&h, &q_poly, &b).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "off by {}", (lhs - rhs).abs());
        }
    }

    #[test]
    fn power_sum_identity_exact_integers() {
        let b = Budget::default();
        let table = PrimeTable::shared(3, 3, &b).unwrap();
        for code in [5u64, 23, 42, 77] {
            let q_poly = Poly::from_code(3, code, 8);
            if !is_squarefree(&q_poly).unwrap() {
                continue;
            }
            let data = lfunction_data(&q_poly, Route::PointCounts, &b).unwrap();
            let sums = prime_char_sums(&q_poly, 3, &table).unwrap();
            check_power_sum_identity(&data.coeffs, &sums, &table, 3).unwrap();
        }
    }

    #[test]
    fn power_sums_round_trip_newton() {
        // L* = 1 + 3u^2: alpha = +-i sqrt(3); s_1 = 0, s_2 = -6, s_3 = 0, s_4 = 18
        let s = power_sums_from_coeffs(&[1, 0, 3], 4).unwrap();
        assert_eq!(&s[1..], &[0, -6, 0, 18]);
    }
}
