//! L-functions of the quadratic characters chi_Q and the zeta functions of
//! the curves y^2 = Q(x).
//!
//! Three independent routes produce the completed polynomial L*:
//!
//! * character sums over all monic polynomials (exact, exponential in the
//!   degree; the test oracle),
//! * point counts of the curve over F_{q^n} for n <= g (the classical
//!   route),
//! * prime character sums assembled through the power-sum identity (the
//!   fast route used by ensemble experiments; one Jacobi symbol per prime
//!   of degree <= g).
//!
//! All three are tied together by exact integer equality tests. Inverse
//! zeros are recovered with Aberth iteration plus double-double polishing
//! and checked against |alpha| = sqrt(q).

pub mod roots;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::charsym::{ChiAccel, QuadChar};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::ffpoly::ext::ExtField;
use crate::ffpoly::factor::{factorize, is_squarefree};
use crate::ffpoly::poly::Poly;
use crate::ffpoly::primes::PrimeTable;

/// Tolerance separating root-finder noise from logic bugs when checking
/// | |alpha_j| - sqrt(q) |. RH is a theorem here; exceeding this is an
/// integrity error, not a statistical deviation.
pub const RH_TOL: f64 = 1e-6;

/// Point counts N_1..N_max of the smooth projective curve y^2 = Q(x).
#[derive(Clone, Debug)]
pub struct CurveCounts {
    pub q: u32,
    pub genus: u32,
    pub q_poly: Poly,
    pub counts: Vec<u64>,
    /// Extension-field moduli used, serialized, for reproducibility headers.
    pub moduli: Vec<String>,
}

/// Coefficients, trivial-factor data and zero angles of L(u, chi_Q).
#[derive(Clone, Debug, Serialize)]
pub struct LFunctionData {
    pub q: u32,
    pub g: u32,
    #[serde(rename = "Q")]
    pub q_digits: String,
    /// Coefficients of the completed polynomial L*.
    pub coeffs: Vec<i64>,
    /// Coefficients of L itself when the route computes them directly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs_l: Option<Vec<i64>>,
    pub lambda_inf: u32,
    pub epsilon: f64,
    /// Inverse-zero angles in (-1/2, 1/2], sorted ascending.
    pub angles: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Dirichlet series coefficients by summing chi over all monic f.
    CharacterSums,
    /// Curve point counts over F_{q^n}, n <= g.
    PointCounts,
    /// Power sums from prime character sums.
    PrimePowerSums,
}

fn validate_family_q(q_poly: &Poly) -> Result<u32> {
    let d = q_poly.degree().ok_or(Error::ZeroPolynomial)?;
    if !q_poly.is_monic() {
        return Err(Error::NotMonic(q_poly.digits()));
    }
    if !is_squarefree(q_poly)? {
        return Err(Error::InvalidInput(format!(
            "{} is not squarefree",
            q_poly.digits()
        )));
    }
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "family polynomial must have even degree >= 2, got {d}"
        )));
    }
    Ok(((d - 2) / 2) as u32)
}

/// c_n = sum over monic f of degree n of chi(f), for n = 0..=n_max.
/// The slow oracle path; cost is sum of q^n.
pub fn dirichlet_coeffs(chi: &QuadChar, n_max: usize, budget: &Budget) -> Result<Vec<i64>> {
    let q = chi.q();
    budget.check_pow(q as u64, n_max as u32)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1i64); // the single monic constant 1
    for n in 1..=n_max {
        let total = (q as u64).pow(n as u32);
        let mut acc = 0i64;
        for code in 0..total {
            let f = Poly::from_code(q, code, n);
            acc += chi.chi(&f)? as i64;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Remove the trivial factor: L*(u) = L(u) / (1 - lambda_inf * u).
///
/// For an even character L(1) = 0 exactly; anything else signals an upstream
/// bug and is rejected as an integrity error.
pub fn complete_lfunction(coeffs_l: &[i64], lambda_inf: u32) -> Result<Vec<i64>> {
    let mut trimmed: Vec<i64> = coeffs_l.to_vec();
    while trimmed.last() == Some(&0) {
        trimmed.pop();
    }
    if lambda_inf == 0 {
        return Ok(trimmed);
    }
    let total: i64 = trimmed.iter().sum();
    if total != 0 {
        return Err(Error::Integrity(format!(
            "even character but L(1) = {total} != 0"
        )));
    }
    // L = (1-u) L* means the L* coefficients are the partial sums of L's
    let mut out = Vec::with_capacity(trimmed.len().saturating_sub(1));
    let mut acc = 0i64;
    for &c in trimmed.iter().take(trimmed.len().saturating_sub(1)) {
        acc += c;
        out.push(acc);
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    if out.is_empty() {
        out.push(1);
    }
    Ok(out)
}

/// N_n = q^n + 2 + sum over x in F_{q^n} of chi^(n)(Q(x)).
///
/// The +2 is the pair of rational points at infinity of the smooth model:
/// deg Q is even and Q is monic, so the leading coefficient is a square in
/// every extension. The oracle-equivalence test against the character-sum
/// route pins this convention.
pub fn point_counts(q_poly: &Poly, n_max: usize, budget: &Budget) -> Result<CurveCounts> {
    let genus = validate_family_q(q_poly)?;
    let q = q_poly.q();
    let mut counts = Vec::with_capacity(n_max);
    let mut moduli = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let field = ExtField::new(q, n as u32, budget)?;
        moduli.push(field.spec().serialize());
        let order = field.order();
        let coeffs = q_poly.coeffs();
        let chunk = 1u64 << 14;
        let n_chunks = (order + chunk - 1) / chunk;
        let char_sum: i64 = (0..n_chunks)
            .into_par_iter()
            .map(|ci| {
                let dim = field.degree();
                let mut wide = vec![0u64; 2 * dim - 1];
                let mut acc = vec![0u32; dim];
                let mut tmp = vec![0u32; dim];
                let mut x = vec![0u32; dim];
                let mut local = 0i64;
                for code in ci * chunk..(order.min((ci + 1) * chunk)) {
                    let mut c = code;
                    for slot in x.iter_mut() {
                        *slot = (c % q as u64) as u32;
                        c /= q as u64;
                    }
                    // Horner with base-field coefficients
                    acc.fill(0);
                    for &cf in coeffs.iter().rev() {
                        field.mul_buf(&acc, &x, &mut wide, &mut tmp);
                        std::mem::swap(&mut acc, &mut tmp);
                        acc[0] = (acc[0] + cf) % q;
                    }
                    local += field.quad_char(&acc) as i64;
                }
                local
            })
            .sum();
        let n_points = (order as i64 + 2 + char_sum) as u64;
        // RH bound sanity: |N_n - (q^n + 1)| <= 2g q^(n/2)
        let dev = (n_points as i64 - (order as i64 + 1)).unsigned_abs();
        let bound = (2.0 * genus as f64 * (order as f64).sqrt()).ceil() as u64;
        if dev > bound {
            return Err(Error::Integrity(format!(
                "point count N_{n} = {n_points} violates the Weil bound"
            )));
        }
        counts.push(n_points);
    }
    Ok(CurveCounts {
        q,
        genus,
        q_poly: q_poly.clone(),
        counts,
        moduli,
    })
}

/// Newton's identities: power sums s_n = q^n + 1 - N_n to coefficients of
/// P_C, with the top half filled in by the functional equation
/// a_(2g-j) = q^(g-j) a_j. Every intermediate must be an exact integer.
pub fn zeta_from_counts(counts: &CurveCounts) -> Result<Vec<i64>> {
    let g = counts.genus as usize;
    if counts.counts.len() < g {
        return Err(Error::InvalidInput(format!(
            "need N_1..N_{g}, got {}",
            counts.counts.len()
        )));
    }
    let q = counts.q as i128;
    let mut power_sums = Vec::with_capacity(g + 1);
    power_sums.push(0i128); // unused slot for n = 0
    let mut qn = 1i128;
    for n in 1..=g {
        qn *= q;
        power_sums.push(qn + 1 - counts.counts[n - 1] as i128);
    }
    coeffs_from_power_sums(&power_sums, g, counts.q)
}

/// Shared Newton + functional-equation fill. power_sums[n] = sum alpha_j^n.
fn coeffs_from_power_sums(power_sums: &[i128], g: usize, q: u32) -> Result<Vec<i64>> {
    let mut a = vec![0i128; 2 * g + 1];
    a[0] = 1;
    for n in 1..=g {
        let mut acc: i128 = 0;
        for i in 1..=n {
            acc = acc
                .checked_add(
                    power_sums[i]
                        .checked_mul(a[n - i])
                        .ok_or_else(|| Error::Integrity("overflow in Newton recursion".into()))?,
                )
                .ok_or_else(|| Error::Integrity("overflow in Newton recursion".into()))?;
        }
        if acc % n as i128 != 0 {
            return Err(Error::Integrity(format!(
                "Newton identity gave non-integer coefficient at n = {n}"
            )));
        }
        a[n] = -acc / n as i128;
    }
    let q = q as i128;
    for j in 0..g {
        let mut f = 1i128;
        for _ in 0..(g - j) {
            f = f
                .checked_mul(q)
                .ok_or_else(|| Error::Integrity("overflow in functional equation fill".into()))?;
        }
        a[2 * g - j] = a[j]
            .checked_mul(f)
            .ok_or_else(|| Error::Integrity("overflow in functional equation fill".into()))?;
    }
    a.into_iter()
        .map(|c| {
            i64::try_from(c)
                .map_err(|_| Error::Integrity("coefficient exceeds i64; genus too large".into()))
        })
        .collect()
}

/// Prime character sums A_d = sum over monic primes P of degree d of
/// chi_Q(P), plus the counts B_d of prime divisors of Q by degree.
#[derive(Clone, Debug)]
pub struct PrimeCharSums {
    pub max_degree: usize,
    /// a_sums[d-1] = A_d.
    pub a_sums: Vec<i64>,
    /// divisors[d-1] = number of distinct prime divisors of Q of degree d.
    pub divisors: Vec<u32>,
}

impl PrimeCharSums {
    pub fn a(&self, d: usize) -> i64 {
        self.a_sums[d - 1]
    }

    pub fn b(&self, d: usize) -> u32 {
        self.divisors.get(d - 1).copied().unwrap_or(0)
    }
}

/// One Jacobi symbol per prime in the table, degrees 1..=max_degree.
pub fn prime_char_sums(
    q_poly: &Poly,
    max_degree: usize,
    table: &PrimeTable,
) -> Result<PrimeCharSums> {
    if table.max_degree() < max_degree {
        return Err(Error::InvalidInput(format!(
            "prime table only reaches degree {}, need {max_degree}",
            table.max_degree()
        )));
    }
    let deg_q = q_poly.degree().ok_or(Error::ZeroPolynomial)?;
    let mut divisors = vec![0u32; deg_q.min(max_degree.max(1))];
    for (p, _) in factorize(q_poly)? {
        let d = p.degree().unwrap();
        if d <= divisors.len() {
            divisors[d - 1] += 1;
        }
    }
    let a_sums: Vec<i64> = (1..=max_degree)
        .map(|d| {
            let codes = table.codes(d);
            if codes.len() >= 4096 {
                codes
                    .par_chunks(2048)
                    .map(|chunk| {
                        let mut accel = ChiAccel::new(q_poly);
                        chunk
                            .iter()
                            .map(|&code| accel.chi_prime(code, d) as i64)
                            .sum::<i64>()
                    })
                    .sum()
            } else {
                let mut accel = ChiAccel::new(q_poly);
                codes
                    .iter()
                    .map(|&code| accel.chi_prime(code, d) as i64)
                    .sum()
            }
        })
        .collect();
    Ok(PrimeCharSums {
        max_degree,
        a_sums,
        divisors,
    })
}

/// sum over monic f of degree n of Lambda(f) chi_Q(f), assembled from prime
/// sums: a prime power P^k contributes deg P, with chi(P)^k collapsing to
/// chi(P) for odd k and to [P does not divide Q] for even k.
pub fn lambda_chi_sum(sums: &PrimeCharSums, table: &PrimeTable, n: usize) -> i64 {
    let mut total = 0i64;
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let k = n / d;
        let contrib = if k % 2 == 1 {
            sums.a(d)
        } else {
            table.count(d) as i64 - sums.b(d) as i64
        };
        total += d as i64 * contrib;
    }
    total
}

/// Fast production route: L* coefficients through the power-sum identity
/// sum alpha_j^n = -1 - sum_(deg f = n) Lambda(f) chi_Q(f).
pub fn lstar_from_prime_sums(
    q_poly: &Poly,
    table: &PrimeTable,
    sums: &PrimeCharSums,
) -> Result<Vec<i64>> {
    let genus = validate_family_q(q_poly)? as usize;
    if sums.max_degree < genus {
        return Err(Error::InvalidInput(format!(
            "prime character sums reach degree {}, need {genus}",
            sums.max_degree
        )));
    }
    let mut power_sums = vec![0i128; genus + 1];
    for n in 1..=genus {
        power_sums[n] = -1i128 - lambda_chi_sum(sums, table, n) as i128;
    }
    coeffs_from_power_sums(&power_sums, genus, q_poly.q())
}

/// Inverse-zero angles of L*, sorted ascending in (-1/2, 1/2].
///
/// Roots are found for the scaled polynomial p(z) = L*(z / sqrt(q)), whose
/// roots lie on the unit circle. Any | |alpha| - sqrt(q) | above RH_TOL is
/// reported as an integrity error: RH is a theorem, so this can only be a
/// bug.
pub fn zero_angles(coeffs_lstar: &[i64], q: u32) -> Result<Vec<f64>> {
    let d = coeffs_lstar.len() - 1;
    if d == 0 {
        return Ok(vec![]);
    }
    let inv_sqrt_q = Dd::ONE.div(Dd::from(q as f64).sqrt());
    let mut scaled = Vec::with_capacity(d + 1);
    let mut scale = Dd::ONE;
    for &a in coeffs_lstar {
        scaled.push(dd_from_i64(a).mul(scale));
        scale = scale.mul(inv_sqrt_q);
    }
    let roots = roots::polynomial_roots(&scaled)?;
    let sqrt_q = (q as f64).sqrt();
    let mut angles = Vec::with_capacity(d);
    for r in roots {
        let re = r.re.to_f64();
        let im = r.im.to_f64();
        let modulus = (re * re + im * im).sqrt();
        let rh_dev = sqrt_q * (1.0 / modulus - 1.0).abs();
        if rh_dev > RH_TOL {
            return Err(Error::Integrity(format!(
                "inverse zero off the circle: | |alpha| - sqrt(q) | = {rh_dev:.3e}"
            )));
        }
        // alpha = sqrt(q)/z, so theta = -arg(z)/2pi
        let mut theta = -im.atan2(re) / (2.0 * std::f64::consts::PI);
        if theta <= -0.5 {
            theta += 1.0;
        }
        angles.push(theta);
    }
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Re-expand prod_j (1 - sqrt(q) e(theta_j) u) and return the real parts of
/// the coefficients; the test-side reconstruction oracle.
pub fn expand_from_angles(angles: &[f64], q: u32) -> Vec<f64> {
    use num_complex::Complex64;
    let sqrt_q = (q as f64).sqrt();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &theta in angles {
        let alpha = Complex64::from_polar(sqrt_q, 2.0 * std::f64::consts::PI * theta);
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * alpha;
        }
        coeffs = next;
    }
    coeffs.into_iter().map(|c| c.re).collect()
}

/// Derive epsilon from the functional equation and verify the coefficient
/// symmetry a_(D-j) = epsilon q^(D/2-j) a_j exactly.
fn derive_epsilon(coeffs_lstar: &[i64], q: u32) -> Result<f64> {
    let d = coeffs_lstar.len() - 1;
    if d == 0 {
        return Ok(1.0);
    }
    if d % 2 != 0 {
        return Err(Error::Integrity(format!(
            "completed L-function of a quadratic character must have even degree, got {d}"
        )));
    }
    let q = q as i128;
    let mut qhalf = 1i128;
    for _ in 0..d / 2 {
        qhalf *= q;
    }
    let top = coeffs_lstar[d] as i128;
    let eps = if top == qhalf {
        1i128
    } else if top == -qhalf {
        -1i128
    } else {
        return Err(Error::Integrity(format!(
            "leading coefficient {top} is not +-q^(D/2) = {qhalf}"
        )));
    };
    for j in 0..=d / 2 {
        let mut f = 1i128;
        for _ in 0..(d / 2 - j) {
            f = f * q;
        }
        let want = eps * f * coeffs_lstar[j] as i128;
        if coeffs_lstar[d - j] as i128 != want {
            return Err(Error::Integrity(format!(
                "functional-equation symmetry fails at coefficient {j}"
            )));
        }
    }
    Ok(eps as f64)
}

/// Compute the full record for one Q by the chosen route.
pub fn lfunction_data(q_poly: &Poly, route: Route, budget: &Budget) -> Result<LFunctionData> {
    let genus = validate_family_q(q_poly)?;
    let q = q_poly.q();
    let (lstar, coeffs_l) = match route {
        Route::CharacterSums => {
            let chi = QuadChar::new(q_poly.clone())?;
            let deg = q_poly.degree().unwrap();
            let coeffs = dirichlet_coeffs(&chi, deg - 1, budget)?;
            let lstar = complete_lfunction(&coeffs, chi.lambda_inf())?;
            (lstar, Some(coeffs))
        }
        Route::PointCounts => {
            let counts = point_counts(q_poly, genus as usize, budget)?;
            (zeta_from_counts(&counts)?, None)
        }
        Route::PrimePowerSums => {
            let table = PrimeTable::shared(q, (genus as usize).max(1), budget)?;
            let sums = prime_char_sums(q_poly, genus as usize, &table)?;
            (lstar_from_prime_sums(q_poly, &table, &sums)?, None)
        }
    };
    let epsilon = derive_epsilon(&lstar, q)?;
    let angles = zero_angles(&lstar, q)?;
    Ok(LFunctionData {
        q,
        g: genus,
        q_digits: q_poly.digits(),
        coeffs: lstar,
        coeffs_l,
        lambda_inf: 1,
        epsilon,
        angles,
    })
}

impl LFunctionData {
    /// JSON with angles rounded to 12 significant digits.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serialization cannot fail");
        if let Some(arr) = v.get_mut("angles").and_then(|a| a.as_array_mut()) {
            for item in arr.iter_mut() {
                if let Some(x) = item.as_f64() {
                    *item = serde_json::json!(round_sig(x, 12));
                }
            }
        }
        v
    }
}

/// Exact conversion of desk-scale integers into double-double.
fn dd_from_i64(a: i64) -> Dd {
    let hi = a as f64;
    let lo = (a as i128 - hi as i128) as f64;
    Dd { hi, lo }
}

pub(crate) fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - mag);
    (x * factor).round() / factor
}
