//! Quadratic residue and Jacobi symbols over F_q[x], and the family
//! character attached to a squarefree Q.
//!
//! The Jacobi symbol runs the reciprocity/Euclidean reduction loop and never
//! factors its argument; the factored form survives only as a test oracle.

use crate::error::{Error, Result};
use crate::ffpoly::factor::{is_irreducible, is_squarefree};
use crate::ffpoly::fp;
use crate::ffpoly::poly::Poly;

/// (c/B) for a scalar c and monic B of the given degree: c^((q-1)/2 * deg B)
/// mapped to +-1.
pub fn scalar_symbol(c: u32, deg_b: usize, q: u32) -> i32 {
    debug_assert!(c % q != 0);
    let t = fp::pow(c, (q as u64 - 1) / 2, q);
    if t == 1 {
        1
    } else if deg_b % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Legendre symbol (f/P) = f^((||P||-1)/2) mod P for irreducible monic P.
pub fn legendre_symbol(f: &Poly, p: &Poly) -> Result<i32> {
    f.check_same_field(p)?;
    if p.degree().map_or(true, |d| d == 0) || !p.is_monic() || !is_irreducible(p) {
        return Err(Error::NotIrreducible(p.digits()));
    }
    let q = p.q();
    let norm_half = (pow_u128(q as u128, p.degree().unwrap() as u32) - 1) / 2;
    let r = f.rem(p);
    if r.is_zero() {
        return Ok(0);
    }
    let v = r.pow_mod(norm_half, p);
    if v == Poly::one(q) {
        Ok(1)
    } else {
        debug_assert_eq!(v, Poly::constant(q, q - 1));
        Ok(-1)
    }
}

fn pow_u128(base: u128, exp: u32) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Jacobi symbol (A/B) for monic B of positive degree, by quadratic
/// reciprocity and Euclidean reduction (no factorization).
pub fn jacobi_symbol(a: &Poly, b: &Poly) -> Result<i32> {
    a.check_same_field(b)?;
    if !b.is_monic() {
        return Err(Error::NotMonic(b.digits()));
    }
    if b.degree().map_or(true, |d| d == 0) {
        return Err(Error::InvalidInput(
            "jacobi symbol needs deg B >= 1".into(),
        ));
    }
    let q = a.q();
    let half_odd = ((q - 1) / 2) % 2 == 1;
    let mut sign = 1i32;
    let mut a = a.rem(b);
    let mut b = b.clone();
    loop {
        if a.is_zero() {
            return Ok(0);
        }
        let deg_a = a.degree().unwrap();
        let deg_b = b.degree().unwrap();
        let lead = a.leading_coeff();
        if lead != 1 {
            sign *= scalar_symbol(lead, deg_b, q);
            a = a.scale(fp::inv(lead, q));
        }
        if deg_a == 0 {
            return Ok(sign);
        }
        // (a/b) = (b/a) * (-1)^((q-1)/2 * deg a * deg b)
        if half_odd && deg_a % 2 == 1 && deg_b % 2 == 1 {
            sign = -sign;
        }
        let r = b.rem(&a);
        b = a;
        a = r;
    }
}

/// The quadratic character f -> (Q/f) of a monic squarefree Q.
///
/// On a non-monic f = c*fhat the scalar is split off and valued by the
/// scalar rule, so the character is completely multiplicative on all of
/// F_q[x]; it is trivial on scalars exactly when deg Q is even.
#[derive(Clone, Debug)]
pub struct QuadChar {
    modulus: Poly,
}

impl QuadChar {
    pub fn new(q_poly: Poly) -> Result<QuadChar> {
        if q_poly.degree().map_or(true, |d| d == 0) {
            return Err(Error::InvalidInput(
                "character modulus must have positive degree".into(),
            ));
        }
        if !q_poly.is_monic() {
            return Err(Error::NotMonic(q_poly.digits()));
        }
        if !is_squarefree(&q_poly)? {
            return Err(Error::InvalidInput(format!(
                "character modulus {q_poly} is not squarefree"
            )));
        }
        Ok(QuadChar { modulus: q_poly })
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn q(&self) -> u32 {
        self.modulus.q()
    }

    /// Even means trivial on scalars; holds iff deg Q is even.
    pub fn is_even(&self) -> bool {
        self.modulus.degree().unwrap() % 2 == 0
    }

    /// lambda_infinity: 1 for an even character, 0 otherwise.
    pub fn lambda_inf(&self) -> u32 {
        self.is_even() as u32
    }

    pub fn chi(&self, f: &Poly) -> Result<i32> {
        f.check_same_field(&self.modulus)?;
        if f.is_zero() {
            return Ok(0);
        }
        let q = self.q();
        let lead = f.leading_coeff();
        let mut sign = 1i32;
        let mut f = f.clone();
        if lead != 1 {
            // chi(c) = (c/Q) by the scalar rule
            sign = scalar_symbol(lead, self.modulus.degree().unwrap(), q);
            f = f.scale(fp::inv(lead, q));
        }
        if f.degree() == Some(0) {
            return Ok(sign);
        }
        Ok(sign * jacobi_symbol(&self.modulus, &f)?)
    }
}

/// Reusable evaluator for chi_Q over many primes given by sieve codes.
/// Scratch buffers and q^2-entry multiplication/subtraction tables persist
/// across calls; this is the Monte-Carlo hot loop, so the inner reduction
/// avoids division entirely.
pub(crate) struct ChiAccel {
    q: u32,
    half_odd: bool,
    /// scalar_leg[c] = +1 if c is a square mod q, -1 otherwise.
    scalar_leg: Vec<i8>,
    inv_table: Vec<u32>,
    /// mul_tab[a*q + b] = a*b mod q.
    mul_tab: Vec<u32>,
    /// sub_tab[a*q + b] = a - b mod q.
    sub_tab: Vec<u32>,
    q_coeffs: Vec<u32>,
    wa: Vec<u32>,
    wb: Vec<u32>,
}

impl ChiAccel {
    pub fn new(q_poly: &Poly) -> ChiAccel {
        let q = q_poly.q();
        let inv_table = (0..q).map(|c| if c == 0 { 0 } else { fp::inv(c, q) }).collect();
        let scalar_leg = (0..q)
            .map(|c| {
                if c == 0 {
                    0
                } else if fp::pow(c, (q as u64 - 1) / 2, q) == 1 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let qs = q as usize;
        let mut mul_tab = vec![0u32; qs * qs];
        let mut sub_tab = vec![0u32; qs * qs];
        for a in 0..q {
            for b in 0..q {
                mul_tab[(a * q + b) as usize] = fp::mul(a, b, q);
                sub_tab[(a * q + b) as usize] = fp::sub(a, b, q);
            }
        }
        let cap = q_poly.coeffs().len() + 1;
        ChiAccel {
            q,
            half_odd: ((q - 1) / 2) % 2 == 1,
            scalar_leg,
            inv_table,
            mul_tab,
            sub_tab,
            q_coeffs: q_poly.coeffs().to_vec(),
            wa: vec![0; cap],
            wb: vec![0; cap],
        }
    }

    /// chi_Q(P) = (Q/P) for the monic prime of this degree and code.
    pub fn chi_prime(&mut self, code: u64, deg: usize) -> i32 {
        let qlen = self.q_coeffs.len();
        let need = (deg + 1).max(qlen) + 1;
        if self.wa.len() < need {
            self.wa.resize(need, 0);
            self.wb.resize(need, 0);
        }
        let q = self.q as u64;
        // wb <- P
        self.wb[..=deg].fill(0);
        let mut c = code;
        for i in 0..deg {
            self.wb[i] = (c % q) as u32;
            c /= q;
        }
        self.wb[deg] = 1;
        // wa <- Q, zero-padded so the reduction scan stays in bounds when
        // deg P exceeds deg Q
        self.wa[..qlen].copy_from_slice(&self.q_coeffs);
        self.wa[qlen..].fill(0);
        self.jacobi_buffers(qlen - 1, deg)
    }

    /// Reduction loop for (wa / wb), wb monic of degree deg_b >= 1.
    fn jacobi_buffers(&mut self, deg_a_max: usize, deg_b: usize) -> i32 {
        let q = self.q as usize;
        let mut sign = 1i32;
        rem_in_place(q, &self.mul_tab, &self.sub_tab, &mut self.wa, deg_a_max, &self.wb, deg_b);
        let mut da = top_degree(&self.wa, deg_b - 1);
        let mut db = deg_b;
        let (mut cur, mut other): (&mut [u32], &mut [u32]) = (&mut self.wa, &mut self.wb);
        loop {
            let da_real = match da {
                None => return 0,
                Some(d) => d,
            };
            let lead = cur[da_real];
            if lead != 1 {
                // split the scalar: (c/other) = leg(c)^(deg other)
                if self.scalar_leg[lead as usize] == -1 && db % 2 == 1 {
                    sign = -sign;
                }
                let row = &self.mul_tab[(self.inv_table[lead as usize] as usize * q)..][..q];
                for v in cur[..=da_real].iter_mut() {
                    *v = row[*v as usize];
                }
            }
            if da_real == 0 {
                return sign;
            }
            if self.half_odd && da_real % 2 == 1 && db % 2 == 1 {
                sign = -sign;
            }
            // other <- other mod cur, then swap roles
            rem_in_place(q, &self.mul_tab, &self.sub_tab, other, db, cur, da_real);
            let new_da = top_degree(other, da_real - 1);
            db = da_real;
            da = new_da;
            std::mem::swap(&mut cur, &mut other);
        }
    }
}

/// r <- r mod d where d is monic of degree deg_d >= 1; table-driven, no
/// division in the inner loop.
#[inline]
fn rem_in_place(
    q: usize,
    mul_tab: &[u32],
    sub_tab: &[u32],
    r: &mut [u32],
    deg_r: usize,
    d: &[u32],
    deg_d: usize,
) {
    debug_assert!(deg_d >= 1);
    let mut k = deg_r;
    while k >= deg_d {
        let c = r[k] as usize;
        if c != 0 {
            let crow = &mul_tab[c * q..][..q];
            let base = k - deg_d;
            for i in 0..deg_d {
                let cd = crow[d[i] as usize];
                let slot = &mut r[base + i];
                *slot = sub_tab[*slot as usize * q + cd as usize];
            }
            r[k] = 0;
        }
        if k == deg_d {
            break;
        }
        k -= 1;
    }
}

#[inline]
fn top_degree(r: &[u32], from: usize) -> Option<usize> {
    let mut k = from;
    loop {
        if r[k] != 0 {
            return Some(k);
        }
        if k == 0 {
            return None;
        }
        k -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::ffpoly::factor::factorize;
    use crate::ffpoly::primes::PrimeTable;

    fn p3(digits: &str) -> Poly {
        Poly::from_digits(3, digits).unwrap()
    }

    #[test]
    fn legendre_examples() {
        // residue of x+1 mod x is 1, a square
        assert_eq!(legendre_symbol(&p3("11"), &p3("01")).unwrap(), 1);
        // residue of x mod x+1 is 2, a non-square in F_3
        assert_eq!(legendre_symbol(&p3("01"), &p3("11")).unwrap(), -1);
        // P | f
        assert_eq!(legendre_symbol(&p3("001"), &p3("01")).unwrap(), 0);
        // reducible P rejected
        assert!(legendre_symbol(&p3("01"), &p3("121")).is_err());
    }

    #[test]
    fn legendre_matches_exhaustive_squares_of_f3() {
        // squares of F_3 are {0, 1}; (c/x) is the base-field Legendre symbol
        let x = p3("01");
        assert_eq!(legendre_symbol(&p3("1"), &x).unwrap(), 1);
        assert_eq!(legendre_symbol(&p3("2"), &x).unwrap(), -1);
    }

    #[test]
    fn jacobi_spec_examples() {
        assert_eq!(jacobi_symbol(&p3("01"), &p3("11")).unwrap(), -1);
        assert_eq!(jacobi_symbol(&p3("11"), &p3("01")).unwrap(), 1);
        // scalar numerator: (2/Q) with deg Q = 2 -> 2^(1*2) mod 3 = 1
        assert_eq!(jacobi_symbol(&p3("2"), &p3("101")).unwrap(), 1);
        // shared factor vanishes
        assert_eq!(jacobi_symbol(&p3("011"), &p3("0101")).unwrap(), 0);
        // constant denominator rejected
        assert!(jacobi_symbol(&p3("01"), &p3("1")).is_err());
    }

    #[test]
    fn reciprocity_exhaustive_small() {
        for q in [3u32, 5] {
            let half = (q - 1) / 2;
            let mut monics = Vec::new();
            for d in 1..=3usize {
                for code in 0..(q as u64).pow(d as u32) {
                    monics.push(Poly::from_code(q, code, d));
                }
            }
            for a in &monics {
                for b in &monics {
                    if a.gcd(b).degree() != Some(0) {
                        continue;
                    }
                    let ab = jacobi_symbol(a, b).unwrap();
                    let ba = jacobi_symbol(b, a).unwrap();
                    let e = half as usize * a.degree().unwrap() * b.degree().unwrap();
                    let expected = if e % 2 == 0 { ba } else { -ba };
                    assert_eq!(ab, expected, "reciprocity fails at ({a}, {b}), q={q}");
                }
            }
        }
    }

    #[test]
    fn jacobi_equals_product_of_legendre_over_factorization() {
        // exhaustive for deg B <= 4, q = 3, against a few numerators
        let nums = [p3("01"), p3("11"), p3("102"), p3("1101")];
        for d in 1..=4usize {
            for code in 0..3u64.pow(d as u32) {
                let b = Poly::from_code(3, code, d);
                let fac = factorize(&b).unwrap();
                for a in &nums {
                    let mut want = 1i32;
                    for (p, m) in &fac {
                        let s = legendre_symbol(a, p).unwrap();
                        for _ in 0..*m {
                            want *= s;
                        }
                    }
                    assert_eq!(
                        jacobi_symbol(a, &b).unwrap(),
                        want,
                        "jacobi != legendre product at A={a}, B={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn chi_evenness_iff_even_degree() {
        for deg in 2..=5usize {
            // find any squarefree monic of this degree
            let q_poly = (0..3u64.pow(deg as u32))
                .map(|c| Poly::from_code(3, c, deg))
                .find(|p| is_squarefree(p).unwrap())
                .unwrap();
            let chi = QuadChar::new(q_poly).unwrap();
            let trivial_on_scalars =
                (1..3).all(|c| chi.chi(&Poly::constant(3, c)).unwrap() == 1);
            assert_eq!(trivial_on_scalars, deg % 2 == 0, "deg {deg}");
            assert_eq!(chi.is_even(), deg % 2 == 0);
        }
    }

    #[test]
    fn chi_spec_examples() {
        let chi = QuadChar::new(p3("101")).unwrap();
        // Q mod x = 1 -> +1
        assert_eq!(chi.chi(&p3("01")).unwrap(), 1);
        // shared factor: Q = x(x+1), f = x
        let chi2 = QuadChar::new(p3("011")).unwrap();
        assert_eq!(chi2.chi(&p3("01")).unwrap(), 0);
    }

    #[test]
    fn chi_is_completely_multiplicative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let chi = QuadChar::new(p3("1011")).unwrap(); // 1 + x^2 + x^3, squarefree
        for _ in 0..100 {
            let d1 = rng.gen_range(1..=4);
            let d2 = rng.gen_range(1..=4);
            let f1 = Poly::from_code(3, rng.gen_range(0..3u64.pow(d1)), d1 as usize);
            let f2 = Poly::from_code(3, rng.gen_range(0..3u64.pow(d2)), d2 as usize);
            assert_eq!(
                chi.chi(&f1.mul(&f2)).unwrap(),
                chi.chi(&f1).unwrap() * chi.chi(&f2).unwrap()
            );
        }
    }

    #[test]
    fn chi_kills_square_factors() {
        let chi = QuadChar::new(p3("1011")).unwrap();
        for code in 0..27u64 {
            let f = Poly::from_code(3, code, 3);
            if f.gcd(chi.modulus()).degree() != Some(0) {
                continue;
            }
            for hcode in 0..9u64 {
                let h = Poly::from_code(3, hcode, 2);
                let fsq_h = f.mul(&f).mul(&h);
                assert_eq!(chi.chi(&fsq_h).unwrap(), chi.chi(&h).unwrap());
            }
        }
    }

    #[test]
    fn accel_matches_reference_jacobi() {
        let b = Budget::default();
        let table = PrimeTable::shared(3, 6, &b).unwrap();
        let q_poly = p3("2011001"); // squarefree sextic
        assert!(is_squarefree(&q_poly).unwrap());
        let mut accel = ChiAccel::new(&q_poly);
        for d in 1..=6usize {
            for &code in table.codes(d) {
                let p = Poly::from_code(3, code, d);
                let fast = accel.chi_prime(code, d);
                let slow = jacobi_symbol(&q_poly, &p).unwrap();
                assert_eq!(fast, slow, "accel mismatch at prime {p}");
            }
        }
    }

    #[test]
    fn accel_handles_primes_larger_than_modulus() {
        let b = Budget::default();
        let table = PrimeTable::shared(3, 6, &b).unwrap();
        let q_poly = p3("11001"); // quartic; primes run past its degree
        let mut accel = ChiAccel::new(&q_poly);
        for d in 1..=6usize {
            for &code in table.codes(d) {
                let p = Poly::from_code(3, code, d);
                assert_eq!(
                    accel.chi_prime(code, d),
                    jacobi_symbol(&q_poly, &p).unwrap(),
                    "mismatch at prime {p}"
                );
            }
        }
    }

    #[test]
    fn accel_matches_reference_q5() {
        let b = Budget::default();
        let table = PrimeTable::shared(5, 4, &b).unwrap();
        let q_poly = Poly::from_digits(5, "201041").unwrap();
        assert!(is_squarefree(&q_poly).unwrap());
        let mut accel = ChiAccel::new(&q_poly);
        for d in 1..=4usize {
            for &code in table.codes(d) {
                let p = Poly::from_code(5, code, d);
                assert_eq!(
                    accel.chi_prime(code, d),
                    jacobi_symbol(&q_poly, &p).unwrap()
                );
            }
        }
    }
}
