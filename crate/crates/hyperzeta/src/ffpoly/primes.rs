//! Enumeration of monic irreducible polynomials by degree.
//!
//! Primes of degree d are found by sieving the q^d monic polynomials of
//! degree d: for every known prime P of degree e <= d/2 we mark all products
//! P*M with M monic of degree d-e. A composite of degree d always has a
//! prime factor of degree <= d/2, so the unmarked entries are exactly the
//! primes. Marking walks M in base-q counter order and updates the product
//! and its index incrementally, so no polynomial multiplication happens in
//! the inner loop.
//!
//! Tables are immutable once built and shared behind an Arc; experiments at
//! different genera reuse the same table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ffpoly::poly::Poly;

/// All monic irreducibles over F_q up to some degree, stored as base-q codes
/// of their non-leading coefficients (see [`Poly::from_code`]).
pub struct PrimeTable {
    q: u32,
    by_degree: Vec<Vec<u64>>, // by_degree[d-1] = sorted codes of primes of degree d
}

impl PrimeTable {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len()
    }

    /// Codes of the primes of exactly this degree, ascending.
    pub fn codes(&self, degree: usize) -> &[u64] {
        &self.by_degree[degree - 1]
    }

    pub fn count(&self, degree: usize) -> u64 {
        self.by_degree[degree - 1].len() as u64
    }

    pub fn polys(&self, degree: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.q;
        self.by_degree[degree - 1]
            .iter()
            .map(move |&code| Poly::from_code(q, code, degree))
    }

    pub fn build(q: u32, max_degree: usize, budget: &Budget) -> Result<PrimeTable> {
        budget.check_pow(q as u64, max_degree as u32)?;
        let mut by_degree: Vec<Vec<u64>> = Vec::with_capacity(max_degree);
        for d in 1..=max_degree {
            if d == 1 {
                // every monic linear is prime
                by_degree.push((0..q as u64).collect());
                continue;
            }
            by_degree.push(sieve_degree(q, d, &by_degree));
        }
        Ok(PrimeTable { q, by_degree })
    }

    /// Shared, cached table. Rebuilds (and replaces) the cache entry when a
    /// larger degree is requested than previously built.
    pub fn shared(q: u32, max_degree: usize, budget: &Budget) -> Result<Arc<PrimeTable>> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<PrimeTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        {
            let guard = cache.lock().unwrap();
            if let Some(t) = guard.get(&q) {
                if t.max_degree() >= max_degree {
                    return Ok(Arc::clone(t));
                }
            }
        }
        let built = Arc::new(PrimeTable::build(q, max_degree, budget)?);
        let mut guard = cache.lock().unwrap();
        let entry = guard.entry(q).or_insert_with(|| Arc::clone(&built));
        if entry.max_degree() < max_degree {
            *entry = Arc::clone(&built);
        }
        Ok(Arc::clone(entry))
    }
}

/// Sieve the monic polynomials of degree d given all primes of smaller degree.
fn sieve_degree(q: u32, d: usize, smaller: &[Vec<u64>]) -> Vec<u64> {
    let total = (q as u64).pow(d as u32);
    let mut composite = vec![0u64; ((total + 63) / 64) as usize];
    let qpow: Vec<i64> = (0..d).map(|i| (q as i64).pow(i as u32)).collect();

    let mut pcoeffs = vec![0u32; d + 1];
    for e in 1..=d / 2 {
        let m = d - e;
        let mtotal = (q as u64).pow(m as u32);
        for &pcode in &smaller[e - 1] {
            decode_into(q, pcode, e, &mut pcoeffs);
            mark_multiples(q, &pcoeffs[..=e], m, mtotal, &qpow, &mut composite);
        }
    }

    let mut primes = Vec::new();
    for idx in 0..total {
        if composite[(idx / 64) as usize] >> (idx % 64) & 1 == 0 {
            primes.push(idx);
        }
    }
    primes
}

/// Write the coefficients of the monic degree-e polynomial with this code.
fn decode_into(q: u32, code: u64, e: usize, out: &mut [u32]) {
    let mut c = code;
    for slot in out.iter_mut().take(e) {
        *slot = (c % q as u64) as u32;
        c /= q as u64;
    }
    out[e] = 1;
}

/// Mark index(P*M) for every monic M of degree m. Walks M as a base-q
/// counter; bumping digit j of M by one shifts the product by P*x^j, which
/// is applied coefficient-wise while maintaining the product's index.
fn mark_multiples(q: u32, p: &[u32], m: usize, mtotal: u64, qpow: &[i64], bitmap: &mut [u64]) {
    let e = p.len() - 1;
    let d = e + m;
    // R = P * x^m; the leading coefficient of the degree-d product is
    // implicit, index covers positions 0..d.
    let mut r = vec![0u32; d];
    let mut mdigits = vec![0u32; m];
    for i in 0..e {
        r[m + i] = p[i];
    }
    let mut idx: i64 = r.iter().enumerate().map(|(i, &c)| c as i64 * qpow[i]).sum();

    let mut remaining = mtotal;
    loop {
        bitmap[(idx / 64) as usize] |= 1 << (idx % 64);
        remaining -= 1;
        if remaining == 0 {
            break;
        }
        // increment M; every touched digit position j adds P*x^j (mod q)
        let mut j = 0;
        loop {
            // product update for the +1 at digit j
            for (i, &pc) in p.iter().enumerate() {
                let old = r[j + i];
                let mut new = old + pc;
                if new >= q {
                    new -= q;
                }
                r[j + i] = new;
                idx += (new as i64 - old as i64) * qpow[j + i];
            }
            if mdigits[j] + 1 < q {
                mdigits[j] += 1;
                break;
            }
            mdigits[j] = 0;
            j += 1;
        }
    }
}

/// Number of monic irreducibles of degree n by the divisor-sum formula,
/// computed independently of any sieve: (1/n) sum_(d|n) mu(d) q^(n/d).
pub fn prime_count_formula(q: u64, n: u32) -> u64 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let mu = mobius_u32(d);
        if mu == 0 {
            continue;
        }
        total += mu as i128 * (q as i128).pow(n / d);
    }
    debug_assert!(total > 0 && total % n as i128 == 0);
    (total / n as i128) as u64
}

fn mobius_u32(mut n: u32) -> i32 {
    let mut k = 0;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All monic irreducibles of degree n over F_q, ascending by code.
pub fn primes_of_degree(q: u32, n: usize, budget: &Budget) -> Result<Vec<Poly>> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    let table = PrimeTable::shared(q, n, budget)?;
    Ok(table.polys(n).collect())
}

/// Sum of the von Mangoldt function over all monic polynomials of degree n,
/// assembled from enumerated prime counts: a prime power P^k of degree n
/// contributes deg P for every d | n with d = deg P.
pub fn lambda_degree_sum(q: u32, n: usize, budget: &Budget) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    let table = PrimeTable::shared(q, n, budget)?;
    let mut total = 0u64;
    for d in 1..=n {
        if n % d == 0 {
            total += d as u64 * table.count(d);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_primes_q3() {
        let b = Budget::default();
        let ps = primes_of_degree(3, 1, &b).unwrap();
        let digits: Vec<String> = ps.iter().map(|p| p.digits()).collect();
        assert_eq!(digits, vec!["01", "11", "21"]);
    }

    #[test]
    fn quadratic_primes_q3() {
        let b = Budget::default();
        let ps = primes_of_degree(3, 2, &b).unwrap();
        let digits: Vec<String> = ps.iter().map(|p| p.digits()).collect();
        // x^2+1, x^2+x+2, x^2+2x+2
        assert_eq!(digits, vec!["101", "211", "221"]);
    }

    #[test]
    fn counts_match_divisor_formula() {
        let b = Budget::default();
        let table = PrimeTable::shared(3, 8, &b).unwrap();
        for n in 1..=8usize {
            assert_eq!(
                table.count(n),
                prime_count_formula(3, n as u32),
                "count mismatch at degree {n}"
            );
        }
        assert_eq!(prime_count_formula(5, 3), 40); // (5^3 - 5)/3
        let t5 = PrimeTable::shared(5, 4, &b).unwrap();
        for n in 1..=4usize {
            assert_eq!(t5.count(n), prime_count_formula(5, n as u32));
        }
    }

    #[test]
    fn sieve_entries_are_irreducible() {
        let b = Budget::default();
        let table = PrimeTable::shared(3, 6, &b).unwrap();
        for d in 1..=6 {
            for p in table.polys(d) {
                assert!(
                    crate::ffpoly::factor::is_irreducible(&p),
                    "sieve produced reducible {p}"
                );
            }
        }
    }

    #[test]
    fn lambda_sums_equal_q_pow_n() {
        let b = Budget::default();
        for n in 1..=6 {
            assert_eq!(lambda_degree_sum(3, n, &b).unwrap(), 3u64.pow(n as u32));
        }
        assert_eq!(lambda_degree_sum(5, 3, &b).unwrap(), 125);
    }

    #[test]
    fn budget_refusal_is_explicit() {
        let b = Budget::new(100);
        match lambda_degree_sum(3, 10, &b) {
            Err(Error::BudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
