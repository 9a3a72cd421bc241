//! Dense polynomials over F_q, the universal carrier for f, P, Q, A, B.
//!
//! Coefficients are stored little-endian with no trailing zeros; the zero
//! polynomial has an empty coefficient vector. The norm of a nonzero f is
//! q^(deg f).

use std::fmt;

use crate::error::{Error, Result};
use crate::ffpoly::fp;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    q: u32,
    coeffs: Vec<u32>,
}

impl Poly {
    /// Build from little-endian coefficients; values are reduced mod q and
    /// trailing zeros trimmed.
    pub fn new(q: u32, mut coeffs: Vec<u32>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= q;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { q, coeffs }
    }

    pub fn zero(q: u32) -> Self {
        Poly { q, coeffs: vec![] }
    }

    pub fn one(q: u32) -> Self {
        Poly::new(q, vec![1])
    }

    pub fn constant(q: u32, c: u32) -> Self {
        Poly::new(q, vec![c])
    }

    /// The monomial x.
    pub fn x(q: u32) -> Self {
        Poly::new(q, vec![0, 1])
    }

    pub fn monomial(q: u32, c: u32, deg: usize) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        Poly::new(q, v)
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-q digits of `code`.
    pub fn from_code(q: u32, code: u64, deg: usize) -> Self {
        let mut v = Vec::with_capacity(deg + 1);
        let mut c = code;
        for _ in 0..deg {
            v.push((c % q as u64) as u32);
            c /= q as u64;
        }
        debug_assert_eq!(c, 0);
        v.push(1);
        Poly { q, coeffs: v }
    }

    /// Inverse of `from_code` for monic polynomials.
    pub fn code(&self) -> u64 {
        debug_assert!(self.is_monic());
        let mut acc = 0u64;
        for &c in self.coeffs[..self.coeffs.len() - 1].iter().rev() {
            acc = acc * self.q as u64 + c as u64;
        }
        acc
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading_coeff(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == 1
    }

    pub fn check_same_field(&self, other: &Poly) -> Result<()> {
        if self.q != other.q {
            return Err(Error::FieldMismatch(format!(
                "q={} vs q={}",
                self.q, other.q
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.q, other.q);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(fp::add(self.coeff(i), other.coeff(i), self.q));
        }
        Poly::new(self.q, v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.q, other.q);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(fp::sub(self.coeff(i), other.coeff(i), self.q));
        }
        Poly::new(self.q, v)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.q, other.q);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.q);
        }
        let mut v = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + a as u64 * b as u64) % self.q as u64;
            }
        }
        Poly::new(self.q, v.into_iter().map(|c| c as u32).collect())
    }

    pub fn scale(&self, c: u32) -> Poly {
        let c = c % self.q;
        Poly::new(
            self.q,
            self.coeffs.iter().map(|&a| fp::mul(a, c, self.q)).collect(),
        )
    }

    /// Quotient and remainder; divisor must be nonzero.
    pub fn divmod(&self, divisor: &Poly) -> (Poly, Poly) {
        debug_assert_eq!(self.q, divisor.q);
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd && self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(self.q), self.clone());
        }
        let q = self.q;
        let inv_lead = fp::inv(divisor.leading_coeff(), q);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len().saturating_sub(dd)];
        let mut top = rem.len();
        while top > dd {
            let k = top - 1;
            let c = fp::mul(rem[k], inv_lead, q);
            if c != 0 {
                quot[k - dd] = c;
                for (i, &dc) in divisor.coeffs.iter().enumerate() {
                    rem[k - dd + i] = fp::sub(rem[k - dd + i], fp::mul(c, dc, q), q);
                }
            }
            top -= 1;
        }
        (Poly::new(q, quot), Poly::new(q, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.divmod(divisor).1
    }

    /// Monic gcd; gcd(f, 0) = monic(f).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.to_monic()
    }

    pub fn to_monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(fp::inv(self.leading_coeff(), self.q))
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.q);
        }
        let v = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| fp::mul((i as u64 + 1).rem_euclid(self.q as u64) as u32, c, self.q))
            .collect();
        Poly::new(self.q, v)
    }

    /// Evaluate at a base-field point by Horner.
    pub fn eval(&self, x: u32) -> u32 {
        let mut acc = 0u32;
        for &c in self.coeffs.iter().rev() {
            acc = fp::add(fp::mul(acc, x, self.q), c, self.q);
        }
        acc
    }

    /// self^exp mod m.
    pub fn pow_mod(&self, mut exp: u128, m: &Poly) -> Poly {
        let mut acc = Poly::one(self.q);
        let mut base = self.rem(m);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            exp >>= 1;
        }
        acc
    }

    /// Base-q digit string, little-endian: over F_3, "102" is 1 + 2x^2.
    /// For q > 10 digits are comma-separated decimal values.
    pub fn digits(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.q <= 10 {
            self.coeffs
                .iter()
                .map(|c| char::from_digit(*c, 10).unwrap())
                .collect()
        } else {
            self.coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    pub fn from_digits(q: u32, s: &str) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidInput("empty digit string".into()));
        }
        let vals: Vec<u32> = if q <= 10 && !s.contains(',') {
            s.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .ok_or_else(|| Error::InvalidInput(format!("bad digit '{ch}'")))
                })
                .collect::<Result<_>>()?
        } else {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidInput(format!("bad coefficient '{t}'")))
                })
                .collect::<Result<_>>()?
        };
        for &v in &vals {
            if v >= q {
                return Err(Error::InvalidInput(format!(
                    "coefficient {v} out of range for q={q}"
                )));
            }
        }
        Ok(Poly::new(q, vals))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly(q={}, \"{}\")", self.q, self.digits())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let p = Poly::from_digits(3, "102").unwrap();
        assert_eq!(p.coeffs(), &[1, 0, 2]);
        assert_eq!(p.digits(), "102");
        assert_eq!(p.degree(), Some(2));
        assert!(!p.is_monic());
    }

    #[test]
    fn divmod_exact() {
        let q = 3;
        // (x+1)^2 = x^2 + 2x + 1
        let f = Poly::new(q, vec![1, 2, 1]);
        let d = Poly::new(q, vec![1, 1]);
        let (quot, rem) = f.divmod(&d);
        assert_eq!(quot, d);
        assert!(rem.is_zero());
    }

    #[test]
    fn gcd_of_square() {
        let q = 3;
        let f = Poly::new(q, vec![1, 2, 1]); // (x+1)^2
        let g = f.gcd(&f.derivative());
        assert_eq!(g, Poly::new(q, vec![1, 1]));
    }

    #[test]
    fn eval_horner() {
        // x^2 + 1 at x = 1 over F_3 -> 2
        let f = Poly::new(3, vec![1, 0, 1]);
        assert_eq!(f.eval(1), 2);
        assert_eq!(Poly::zero(3).eval(2), 0);
    }

    #[test]
    fn code_round_trip() {
        let p = Poly::from_code(3, 7, 3); // 1 + 2x + x^3
        assert_eq!(p.coeffs(), &[1, 2, 0, 1]);
        assert_eq!(p.code(), 7);
    }
}
