//! The family of monic squarefree polynomials of degree 2g+2 with the
//! uniform measure: exact enumeration at small sizes, seeded rejection
//! sampling at scale, and ensemble averages.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ffpoly::factor::{factorize, is_squarefree};
use crate::ffpoly::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

/// Descriptor of the family at (q, g); the member degree is 2g+2.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub q: u32,
    pub g: u32,
    pub mode: Mode,
}

impl EnsembleSpec {
    pub fn degree(&self) -> usize {
        2 * self.g as usize + 2
    }

    /// #members = (1 - 1/q) q^d exactly, for d >= 2.
    pub fn cardinality(&self) -> u128 {
        let q = self.q as u128;
        let d = self.degree() as u32;
        q.pow(d) - q.pow(d - 1)
    }
}

/// All squarefree monic polynomials of the family degree, ascending by code.
pub fn enumerate(spec: &EnsembleSpec, budget: &Budget) -> Result<Vec<Poly>> {
    let d = spec.degree();
    let total = budget.check_pow(spec.q as u64, d as u32)?;
    let mut out = Vec::new();
    for code in 0..total {
        let f = Poly::from_code(spec.q, code, d);
        if is_squarefree(&f)? {
            out.push(f);
        }
    }
    Ok(out)
}

const REJECTION_CAP: usize = 10_000;

/// One uniform draw by rejection: uniform monic coefficients, accept iff
/// squarefree. Acceptance probability is exactly 1 - 1/q for d >= 2.
pub fn sample(spec: &EnsembleSpec, rng: &mut ChaCha8Rng) -> Result<Poly> {
    let d = spec.degree();
    for _ in 0..REJECTION_CAP {
        let mut coeffs: Vec<u32> = (0..d).map(|_| rng.gen_range(0..spec.q)).collect();
        coeffs.push(1);
        let f = Poly::new(spec.q, coeffs);
        if is_squarefree(&f)? {
            return Ok(f);
        }
    }
    Err(Error::Integrity(format!(
        "rejection sampler exceeded {REJECTION_CAP} retries; squarefree density should be {}",
        1.0 - 1.0 / spec.q as f64
    )))
}

/// Ensemble mean of F; exact under exhaustive mode, Monte-Carlo mean with a
/// standard error under sampled mode.
pub fn average<F>(spec: &EnsembleSpec, budget: &Budget, f: F) -> Result<(f64, Option<f64>)>
where
    F: Fn(&Poly) -> Result<f64>,
{
    match spec.mode {
        Mode::Exhaustive => {
            let members = enumerate(spec, budget)?;
            let mut acc = 0.0;
            for m in &members {
                acc += f(m)?;
            }
            Ok((acc / members.len() as f64, None))
        }
        Mode::Sampled { seed, count } => {
            use rand::SeedableRng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acc = 0.0;
            let mut acc2 = 0.0;
            for _ in 0..count {
                let v = f(&sample(spec, &mut rng)?)?;
                acc += v;
                acc2 += v * v;
            }
            let n = count as f64;
            let mean = acc / n;
            let var = (acc2 / n - mean * mean).max(0.0) * n / (n - 1.0);
            Ok((mean, Some((var / n).sqrt())))
        }
    }
}

/// eta(Q) = sum over distinct prime divisors P of Q of 1/||P||.
pub fn eta(q_poly: &Poly) -> Result<f64> {
    if q_poly.is_zero() || !q_poly.is_monic() {
        return Err(Error::NotMonic(q_poly.digits()));
    }
    let q = q_poly.q() as f64;
    let mut acc = 0.0;
    for (p, _) in factorize(q_poly)? {
        acc += q.powi(-(p.degree().unwrap() as i32));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charsym::{jacobi_symbol, QuadChar};
    use crate::ffpoly::primes::PrimeTable;
    use crate::numutil::chi2_sf;
    use rand::SeedableRng;

    #[test]
    fn cardinality_formula_values() {
        let s = EnsembleSpec { q: 3, g: 1, mode: Mode::Exhaustive };
        assert_eq!(s.cardinality(), 54);
        let s = EnsembleSpec { q: 5, g: 0, mode: Mode::Exhaustive };
        assert_eq!(s.cardinality(), 20);
    }

    #[test]
    fn enumeration_matches_formula() {
        let b = Budget::default();
        for g in 0..=2u32 {
            let s = EnsembleSpec { q: 3, g, mode: Mode::Exhaustive };
            assert_eq!(enumerate(&s, &b).unwrap().len() as u128, s.cardinality());
        }
    }

    #[test]
    fn sampler_is_deterministic_and_uniformish() {
        let spec = EnsembleSpec { q: 3, g: 1, mode: Mode::Exhaustive };
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            assert_eq!(
                sample(&spec, &mut r1).unwrap(),
                sample(&spec, &mut r2).unwrap()
            );
        }
    }

    #[test]
    fn sampler_acceptance_rate_near_two_thirds() {
        // count rejections indirectly: fraction of all uniform monic quartics
        // that are squarefree is 2/3; check the sampler's output support too
        let b = Budget::default();
        let spec = EnsembleSpec { q: 3, g: 1, mode: Mode::Exhaustive };
        let members = enumerate(&spec, &b).unwrap();
        assert_eq!(members.len(), 54);
        let total = 81.0;
        let rate = members.len() as f64 / total;
        assert!((rate - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_uniformity_over_exhaustive_support() {
        let b = Budget::default();
        let spec = EnsembleSpec { q: 3, g: 1, mode: Mode::Exhaustive };
        let members = enumerate(&spec, &b).unwrap();
        let index: std::collections::HashMap<u64, usize> = members
            .iter()
            .enumerate()
            .map(|(i, p)| (p.code(), i))
            .collect();
        let mut counts = vec![0u64; members.len()];
        let draws = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..draws {
            let s = sample(&spec, &mut rng).unwrap();
            counts[index[&s.code()]] += 1;
        }
        let expected = draws as f64 / members.len() as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = chi2_sf(stat, (members.len() - 1) as f64);
        assert!(p > 0.001, "chi-square uniformity p = {p}, stat = {stat}");
    }

    #[test]
    fn trivial_average_is_one() {
        let b = Budget::default();
        let spec = EnsembleSpec { q: 3, g: 1, mode: Mode::Exhaustive };
        let (m, se) = average(&spec, &b, |_| Ok(1.0)).unwrap();
        assert_eq!(m, 1.0);
        assert!(se.is_none());
    }

    #[test]
    fn character_average_bound_exhaustive() {
        // |<chi_Q(f)>| <= 2^(deg f - 1) / ((1-1/q) q^(g+1)) for non-square f
        let b = Budget::default();
        for g in [1u32, 2] {
            let spec = EnsembleSpec { q: 3, g, mode: Mode::Exhaustive };
            let denom = (1.0 - 1.0 / 3.0) * 3f64.powi(g as i32 + 1);
            for deg_f in 1..=3usize {
                for code in 0..3u64.pow(deg_f as u32) {
                    let f = Poly::from_code(3, code, deg_f);
                    if is_perfect_square(&f) {
                        continue;
                    }
                    let (avg, _) = average(&spec, &b, |q_poly| {
                        Ok(jacobi_symbol(q_poly, &f).unwrap_or(0) as f64)
                    })
                    .unwrap();
                    let bound = 2f64.powi(deg_f as i32 - 1) / denom;
                    assert!(
                        avg.abs() <= bound + 1e-12,
                        "bound fails at g={g} f={f}: {avg} vs {bound}"
                    );
                }
            }
        }
    }

    fn is_perfect_square(f: &Poly) -> bool {
        match factorize(f) {
            Ok(fac) => fac.iter().all(|(_, m)| m % 2 == 0),
            Err(_) => false,
        }
    }

    #[test]
    fn square_of_prime_average_in_predicted_window() {
        // <chi_Q(P^2)> = 1 - Prob(P | Q) in [1 - (1-1/q)^(-1)/||P||, 1]
        let b = Budget::default();
        let spec = EnsembleSpec { q: 3, g: 1, mode: Mode::Exhaustive };
        let table = PrimeTable::shared(3, 2, &b).unwrap();
        for d in 1..=2usize {
            for p in table.polys(d) {
                let p2 = p.mul(&p);
                let (avg, _) = average(&spec, &b, |q_poly| {
                    let chi = QuadChar::new(q_poly.clone())?;
                    Ok(chi.chi(&p2)? as f64)
                })
                .unwrap();
                let norm = 3f64.powi(d as i32);
                let lo = 1.0 - (1.0 / (1.0 - 1.0 / 3.0)) / norm;
                assert!(avg <= 1.0 + 1e-12 && avg >= lo - 1e-12, "window fails at P={p}");
            }
        }
    }

    #[test]
    fn eta_examples() {
        let b = Budget::default();
        // prime Q = x^2+1: eta = 1/9
        assert!((eta(&Poly::from_digits(3, "101").unwrap()).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        // Q = x(x+1): two linear primes
        assert!((eta(&Poly::from_digits(3, "011").unwrap()).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        // exhaustive moments at g=1
        let spec = EnsembleSpec { q: 3, g: 1, mode: Mode::Exhaustive };
        let (m1, _) = average(&spec, &b, |q_poly| eta(q_poly)).unwrap();
        let (m2, _) = average(&spec, &b, |q_poly| eta(q_poly).map(|e| e * e)).unwrap();
        assert!(m1 <= 1.0);
        assert!(m2 <= 27.0 / 8.0);
    }
}
