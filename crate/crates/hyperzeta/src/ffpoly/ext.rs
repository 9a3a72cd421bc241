//! Extension fields F_{q^n} = F_q[t]/(modulus) for point counting.
//!
//! Elements are fixed-length little-endian coefficient vectors. The modulus
//! is found by seeded random search so the same (q, n) always yields the
//! same field; experiment outputs echo it for reproducibility.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ffpoly::factor::is_irreducible;
use crate::ffpoly::fp;
use crate::ffpoly::poly::Poly;

/// Base field or extension field descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub q: u32,
    pub n: u32,
    pub modulus: Option<Poly>,
}

impl FieldSpec {
    pub fn prime(q: u32) -> Result<FieldSpec> {
        validate_q(q)?;
        Ok(FieldSpec { q, n: 1, modulus: None })
    }

    pub fn extension(q: u32, n: u32, modulus: Poly) -> Result<FieldSpec> {
        validate_q(q)?;
        if modulus.q() != q || modulus.degree() != Some(n as usize) || !modulus.is_monic() {
            return Err(Error::InvalidInput(format!(
                "modulus {modulus} is not monic of degree {n} over F_{q}"
            )));
        }
        if !is_irreducible(&modulus) {
            return Err(Error::NotIrreducible(modulus.digits()));
        }
        Ok(FieldSpec { q, n, modulus: Some(modulus) })
    }

    /// "q=3" or "q=3,n=16,mod=<digits>".
    pub fn serialize(&self) -> String {
        match &self.modulus {
            None => format!("q={}", self.q),
            Some(m) => format!("q={},n={},mod={}", self.q, self.n, m.digits()),
        }
    }

    pub fn parse(s: &str) -> Result<FieldSpec> {
        let mut q = None;
        let mut n = 1u32;
        let mut modulus = None;
        for part in s.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("bad field spec part '{part}'")))?;
            match key.trim() {
                "q" => q = Some(val.trim().parse::<u32>().map_err(|_| {
                    Error::InvalidInput(format!("bad q '{val}'"))
                })?),
                "n" => n = val.trim().parse::<u32>().map_err(|_| {
                    Error::InvalidInput(format!("bad n '{val}'"))
                })?,
                "mod" => modulus = Some(val.trim().to_string()),
                other => return Err(Error::InvalidInput(format!("unknown key '{other}'"))),
            }
        }
        let q = q.ok_or_else(|| Error::InvalidInput("field spec needs q".into()))?;
        match modulus {
            None if n == 1 => FieldSpec::prime(q),
            None => Err(Error::InvalidInput("extension spec needs mod=".into())),
            Some(digits) => FieldSpec::extension(q, n, Poly::from_digits(q, &digits)?),
        }
    }
}

fn validate_q(q: u32) -> Result<()> {
    if q < 3 || q % 2 == 0 || !fp::is_prime(q as u64) {
        return Err(Error::InvalidInput(format!("q={q} is not an odd prime >= 3")));
    }
    Ok(())
}

/// Largest field order for which the quadratic character uses a square table
/// instead of exponentiation.
const SQUARE_TABLE_MAX: u64 = 1 << 22;

/// Concrete arithmetic for F_{q^n}.
pub struct ExtField {
    q: u32,
    n: usize,
    order: u64,
    /// -(low coefficients of the monic modulus); x^n reduces to this.
    reduction: Vec<u32>,
    modulus: Poly,
    square_table: OnceLock<Option<Vec<u64>>>,
}

impl ExtField {
    /// Build F_{q^n} with a deterministically chosen modulus.
    pub fn new(q: u32, n: u32, budget: &Budget) -> Result<ExtField> {
        validate_q(q)?;
        budget.check_pow(q as u64, n)?;
        let modulus = find_modulus(q, n);
        Self::with_modulus(modulus, budget)
    }

    pub fn with_modulus(modulus: Poly, budget: &Budget) -> Result<ExtField> {
        let q = modulus.q();
        validate_q(q)?;
        let n = modulus
            .degree()
            .ok_or(Error::ZeroPolynomial)?;
        if n >= 1 && !is_irreducible(&modulus) {
            return Err(Error::NotIrreducible(modulus.digits()));
        }
        let order = budget.check_pow(q as u64, n as u32)?;
        let reduction = (0..n).map(|i| fp::neg(modulus.coeff(i), q)).collect();
        Ok(ExtField {
            q,
            n,
            order,
            reduction,
            modulus,
            square_table: OnceLock::new(),
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            q: self.q,
            n: self.n as u32,
            modulus: if self.n == 1 { None } else { Some(self.modulus.clone()) },
        }
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.n]
    }

    pub fn element_from_code(&self, code: u64) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.n);
        let mut c = code;
        for _ in 0..self.n {
            v.push((c % self.q as u64) as u32);
            c /= self.q as u64;
        }
        v
    }

    pub fn code_of(&self, elem: &[u32]) -> u64 {
        let mut acc = 0u64;
        for &c in elem.iter().rev() {
            acc = acc * self.q as u64 + c as u64;
        }
        acc
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| fp::add(x, y, self.q))
            .collect()
    }

    /// Schoolbook product followed by reduction by the monic modulus.
    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = self.n;
        let q64 = self.q as u64;
        let mut wide = vec![0u64; 2 * n - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                wide[i + j] = (wide[i + j] + x as u64 * y as u64) % q64;
            }
        }
        // fold x^(n+k) = x^k * reduction from the top down
        for k in (n..2 * n - 1).rev() {
            let c = wide[k];
            if c == 0 {
                continue;
            }
            wide[k] = 0;
            for (i, &r) in self.reduction.iter().enumerate() {
                wide[k - n + i] = (wide[k - n + i] + c * r as u64) % q64;
            }
        }
        wide[..n].iter().map(|&c| c as u32).collect()
    }

    /// Allocation-free product for hot loops: out <- a*b. `wide` needs
    /// 2n-1 slots, `out` needs n.
    pub(crate) fn mul_buf(&self, a: &[u32], b: &[u32], wide: &mut [u64], out: &mut [u32]) {
        let n = self.n;
        let q64 = self.q as u64;
        wide[..2 * n - 1].fill(0);
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                wide[i + j] = (wide[i + j] + x as u64 * y as u64) % q64;
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = wide[k];
            if c == 0 {
                continue;
            }
            wide[k] = 0;
            for (i, &r) in self.reduction.iter().enumerate() {
                wide[k - n + i] = (wide[k - n + i] + c * r as u64) % q64;
            }
        }
        for (o, &w) in out.iter_mut().zip(wide.iter()) {
            *o = w as u32;
        }
    }

    pub fn pow(&self, base: &[u32], mut exp: u64) -> Vec<u32> {
        let mut acc = self.zero();
        acc[0] = 1;
        let mut b = base.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            exp >>= 1;
        }
        acc
    }

    /// Evaluate a base-field polynomial at an extension point by Horner.
    pub fn eval_poly(&self, f: &Poly, x: &[u32]) -> Result<Vec<u32>> {
        if f.q() != self.q {
            return Err(Error::FieldMismatch(format!(
                "polynomial over F_{} evaluated in F_{}^{}",
                f.q(),
                self.q,
                self.n
            )));
        }
        let mut acc = self.zero();
        for &c in f.coeffs().iter().rev() {
            acc = self.mul(&acc, x);
            acc[0] = fp::add(acc[0], c, self.q);
        }
        Ok(acc)
    }

    fn squares(&self) -> Option<&Vec<u64>> {
        self.square_table
            .get_or_init(|| {
                if self.order > SQUARE_TABLE_MAX {
                    return None;
                }
                let mut bits = vec![0u64; ((self.order + 63) / 64) as usize];
                for code in 0..self.order {
                    let z = self.element_from_code(code);
                    let sq = self.code_of(&self.mul(&z, &z));
                    bits[(sq / 64) as usize] |= 1 << (sq % 64);
                }
                Some(bits)
            })
            .as_ref()
    }

    /// Quadratic character of F_{q^n}^x extended by chi(0) = 0.
    pub fn quad_char(&self, z: &[u32]) -> i32 {
        if z.iter().all(|&c| c == 0) {
            return 0;
        }
        if let Some(table) = self.squares() {
            let code = self.code_of(z);
            if table[(code / 64) as usize] >> (code % 64) & 1 == 1 {
                1
            } else {
                -1
            }
        } else {
            let p = self.pow(z, (self.order - 1) / 2);
            if p[0] == 1 && p[1..].iter().all(|&c| c == 0) {
                1
            } else {
                -1
            }
        }
    }
}

/// Deterministic seeded search for a monic irreducible of degree n.
pub fn find_modulus(q: u32, n: u32) -> Poly {
    if n == 1 {
        return Poly::x(q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4D0D_u64 ^ ((q as u64) << 32) ^ n as u64);
    loop {
        let mut coeffs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        coeffs.push(1);
        let f = Poly::new(q, coeffs);
        if f.degree() == Some(n as usize) && is_irreducible(&f) {
            return f;
        }
    }
}

/// Spec-level entry point: evaluate f at a point of the field described by
/// `spec`, given as a coefficient vector in the extension basis.
pub fn poly_eval(f: &Poly, x: &[u32], field: &ExtField) -> Result<Vec<u32>> {
    field.eval_poly(f, x)
}
