//! Squarefree tests, irreducibility, factorization and the arithmetic
//! functions built on it.
//!
//! Factorization runs squarefree splitting, then distinct-degree
//! factorization, then equal-degree splitting. The splitting RNG is seeded
//! from the input polynomial so output is deterministic run to run; factors
//! come back sorted by degree, then by coefficient code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffpoly::poly::Poly;

/// true iff gcd(f, f') is a unit.
pub fn is_squarefree(f: &Poly) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(f.gcd(&f.derivative()).degree() == Some(0))
}

/// Rabin irreducibility test: x^(q^n) = x mod f, and x^(q^(n/l)) - x is
/// coprime to f for every prime l dividing n.
pub fn is_irreducible(f: &Poly) -> bool {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    if !f.is_monic() {
        return is_irreducible(&f.to_monic());
    }
    if n == 1 {
        return true;
    }
    let q = f.q();
    let x = Poly::x(q);
    // frob[i] = x^(q^(i+1)) mod f
    let mut frob = Vec::with_capacity(n);
    let mut cur = x.pow_mod(q as u128, f);
    frob.push(cur.clone());
    for _ in 1..n {
        cur = cur.pow_mod(q as u128, f);
        frob.push(cur.clone());
    }
    if frob[n - 1] != x.rem(f) {
        return false;
    }
    for l in prime_divisors(n as u64) {
        let m = n / l as usize;
        let g = frob[m - 1].sub(&x).gcd(f);
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Full factorization of a monic nonzero polynomial into (prime, multiplicity)
/// pairs. The product of the primaries reproduces the input exactly.
pub fn factorize(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic(f.digits()));
    }
    let mut found: Vec<(Poly, u32)> = Vec::new();
    factor_rec(f.clone(), 1, &mut found)?;
    found.sort_by_key(|(p, _)| (p.degree().unwrap(), p.code()));
    Ok(found)
}

fn factor_rec(f: Poly, scale: u32, out: &mut Vec<(Poly, u32)>) -> Result<()> {
    if f.degree() == Some(0) {
        return Ok(());
    }
    let q = f.q();
    let d = f.derivative();
    if d.is_zero() {
        // f = h(x^q) = h(x)^q over the prime field
        let root = qth_root(&f);
        return factor_rec(root, scale * q, out);
    }
    let squarefree_part = f.divmod(&f.gcd(&d)).0;
    let mut rest = f;
    for prime in ddf_edf(&squarefree_part)? {
        let mut mult = 0u32;
        loop {
            let (quot, rem) = rest.divmod(&prime);
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            mult += 1;
        }
        debug_assert!(mult >= 1);
        out.push((prime, scale * mult));
    }
    // remaining part is a q-th power (all its prime multiplicities are
    // divisible by the characteristic)
    factor_rec(rest, scale, out)
}

fn qth_root(f: &Poly) -> Poly {
    // Frobenius is the identity on F_q for prime q, so the root keeps the
    // strided coefficients unchanged.
    let q = f.q() as usize;
    let coeffs = f.coeffs();
    let v: Vec<u32> = coeffs.iter().step_by(q).copied().collect();
    debug_assert!(coeffs
        .iter()
        .enumerate()
        .all(|(i, &c)| i % q == 0 || c == 0));
    Poly::new(f.q(), v)
}

/// Distinct-degree then equal-degree factorization of a squarefree monic f.
fn ddf_edf(f: &Poly) -> Result<Vec<Poly>> {
    let q = f.q();
    let mut out = Vec::new();
    let mut rem = f.to_monic();
    if rem.degree() == Some(0) {
        return Ok(out);
    }
    let x = Poly::x(q);
    let mut frob = x.pow_mod(q as u128, &rem); // x^(q^d) mod rem, d = 1, 2, ...
    let mut d = 1usize;
    while let Some(n) = rem.degree() {
        if n == 0 {
            break;
        }
        if 2 * d > n {
            out.push(rem.clone());
            break;
        }
        let g = frob.sub(&x).gcd(&rem);
        if g.degree().unwrap_or(0) > 0 {
            equal_degree_split(&g, d, &mut out)?;
            rem = rem.divmod(&g).0;
            frob = frob.rem(&rem);
        }
        frob = frob.pow_mod(q as u128, &rem);
        d += 1;
    }
    Ok(out)
}

/// Cantor-Zassenhaus splitting of a product of distinct primes of degree d.
fn equal_degree_split(h: &Poly, d: usize, out: &mut Vec<Poly>) -> Result<()> {
    let n = h.degree().unwrap();
    if n == d {
        out.push(h.to_monic());
        return Ok(());
    }
    let q = h.q();
    let exp = (pow_u128(q as u128, d as u32) - 1) / 2;
    let mut rng = splitting_rng(h);
    for _ in 0..200 {
        let t = random_poly(&mut rng, q, n);
        if t.is_zero() {
            continue;
        }
        let c = t.pow_mod(exp, h).sub(&Poly::one(q));
        let g = c.gcd(h);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            equal_degree_split(&g, d, out)?;
            equal_degree_split(&h.divmod(&g).0, d, out)?;
            return Ok(());
        }
    }
    Err(Error::NonConvergence(format!(
        "equal-degree splitting stalled on {}",
        h.digits()
    )))
}

fn pow_u128(base: u128, exp: u32) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.checked_mul(base).expect("exponent overflow in splitting");
    }
    acc
}

/// Splitting RNG seeded from the input so factorizations are reproducible.
fn splitting_rng(h: &Poly) -> ChaCha8Rng {
    let mut seed = 0xC0FFEE_5EED_u64;
    for &c in h.coeffs() {
        seed = seed.wrapping_mul(0x100000001b3).wrapping_add(c as u64);
    }
    seed = seed.wrapping_mul(0x100000001b3).wrapping_add(h.q() as u64);
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_poly(rng: &mut ChaCha8Rng, q: u32, max_deg: usize) -> Poly {
    let len = rng.gen_range(1..=max_deg);
    let v: Vec<u32> = (0..=len).map(|_| rng.gen_range(0..q)).collect();
    Poly::new(q, v)
}

/// deg P when f = P^k is a prime power, 0 otherwise.
pub fn von_mangoldt(f: &Poly) -> Result<u32> {
    match f.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::InvalidInput(
            "von Mangoldt undefined for constants".into(),
        )),
        Some(_) => {
            let fac = factorize(f)?;
            if fac.len() == 1 {
                Ok(fac[0].0.degree().unwrap() as u32)
            } else {
                Ok(0)
            }
        }
    }
}

/// 0 on non-squarefree input, otherwise (-1)^(number of prime factors).
pub fn mobius(f: &Poly) -> Result<i32> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic(f.digits()));
    }
    if !is_squarefree(f)? {
        return Ok(0);
    }
    let fac = factorize(f)?;
    Ok(if fac.len() % 2 == 0 { 1 } else { -1 })
}
