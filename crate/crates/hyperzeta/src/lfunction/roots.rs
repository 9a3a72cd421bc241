//! Simultaneous root finding for self-inversive polynomials whose roots lie
//! on the unit circle.
//!
//! Aberth-Ehrlich iteration in f64 from equispaced starting points on the
//! circle, followed by Newton polishing in double-double. Clusters that
//! stall the f64 stage trigger a perturbed restart. No deflation.

use num_complex::Complex64;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};

const ABERTH_TOL: f64 = 3e-14;
const MAX_ITERS: usize = 600;
const MAX_RESTARTS: usize = 6;

/// All roots of p(z) = sum coeffs[j] z^j (degree = len-1), coefficients in
/// double-double. Intended for polynomials with all roots on |z| = 1.
pub fn polynomial_roots(coeffs: &[Dd]) -> Result<Vec<CDd>> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(vec![]);
    }
    let c64: Vec<Complex64> = coeffs
        .iter()
        .map(|c| Complex64::new(c.to_f64(), 0.0))
        .collect();
    if d == 1 {
        let root = -c64[0] / c64[1];
        return Ok(vec![polish(coeffs, CDd::new(root.re, root.im))]);
    }

    let scale: f64 = c64.iter().map(|c| c.norm()).sum();
    let mut roots = initial_guesses(d, 0.0);
    let mut converged = false;
    for restart in 0..=MAX_RESTARTS {
        if restart > 0 {
            // rotate the lattice of guesses off the previous stall
            roots = initial_guesses(d, 0.11 * restart as f64 + 0.05);
        }
        if aberth(&c64, &mut roots) {
            converged = true;
            break;
        }
    }
    if !converged {
        // accept anyway if residuals are already tiny (clustered roots make
        // the per-step displacement test too strict)
        let worst = roots
            .iter()
            .map(|&z| eval(&c64, z).0.norm())
            .fold(0.0f64, f64::max);
        if worst > 1e-10 * scale {
            return Err(Error::NonConvergence(format!(
                "aberth stalled: degree {d}, worst residual {worst:.3e} vs scale {scale:.3e}"
            )));
        }
    }
    Ok(roots
        .into_iter()
        .map(|z| polish(coeffs, CDd::new(z.re, z.im)))
        .collect())
}

fn initial_guesses(d: usize, offset: f64) -> Vec<Complex64> {
    (0..d)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.3819660112501051 + offset)
                / d as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .collect()
}

/// p and p' by a single Horner pass.
fn eval(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let d = c.len() - 1;
    let mut p = c[d];
    let mut dp = Complex64::new(0.0, 0.0);
    for j in (0..d).rev() {
        dp = dp * z + p;
        p = p * z + c[j];
    }
    (p, dp)
}

fn aberth(c: &[Complex64], roots: &mut [Complex64]) -> bool {
    let d = roots.len();
    for _ in 0..MAX_ITERS {
        let mut worst = 0.0f64;
        for i in 0..d {
            let z = roots[i];
            let (p, dp) = eval(c, z);
            if p.norm_sqr() == 0.0 {
                continue;
            }
            if dp.norm_sqr() == 0.0 {
                roots[i] = z + Complex64::new(1e-8, 1e-8);
                worst = f64::MAX;
                continue;
            }
            let w = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    let diff = z - zj;
                    if diff.norm_sqr() == 0.0 {
                        continue;
                    }
                    s += diff.inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let delta = if denom.norm_sqr() < 1e-60 { w } else { w / denom };
            roots[i] = z - delta;
            let rel = delta.norm() / (1.0 + roots[i].norm());
            if rel > worst {
                worst = rel;
            }
        }
        if worst < ABERTH_TOL {
            return true;
        }
    }
    false
}

/// Newton refinement in double-double from an f64 seed.
fn polish(coeffs: &[Dd], mut z: CDd) -> CDd {
    let d = coeffs.len() - 1;
    for _ in 0..4 {
        let mut p = CDd { re: coeffs[d], im: Dd::ZERO };
        let mut dp = CDd::default();
        for j in (0..d).rev() {
            dp = dp.mul(z).add(p);
            p = p.mul(z).add(CDd { re: coeffs[j], im: Dd::ZERO });
        }
        if dp.norm_sqr().to_f64() < 1e-280 {
            break;
        }
        z = z.sub(p.div(dp));
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd_vec(v: &[f64]) -> Vec<Dd> {
        v.iter().map(|&x| Dd::from(x)).collect()
    }

    #[test]
    fn quadratic_with_known_roots() {
        // p(z) = 1 + z^2, roots +-i
        let roots = polynomial_roots(&dd_vec(&[1.0, 0.0, 1.0])).unwrap();
        let mut ims: Vec<f64> = roots.iter().map(|r| r.im.to_f64()).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14);
        assert!((ims[1] - 1.0).abs() < 1e-14);
        for r in &roots {
            assert!(r.re.to_f64().abs() < 1e-14);
        }
    }

    #[test]
    fn roots_of_unity() {
        // z^16 - 1
        let mut c = vec![0.0; 17];
        c[0] = -1.0;
        c[16] = 1.0;
        let roots = polynomial_roots(&dd_vec(&c)).unwrap();
        assert_eq!(roots.len(), 16);
        for r in roots {
            let m = r.norm_sqr().to_f64().sqrt();
            assert!((m - 1.0).abs() < 1e-14);
            // each root^16 == 1
            let mut acc = CDd::new(1.0, 0.0);
            for _ in 0..16 {
                acc = acc.mul(r);
            }
            assert!((acc.re.to_f64() - 1.0).abs() < 1e-12);
            assert!(acc.im.to_f64().abs() < 1e-12);
        }
    }

    #[test]
    fn double_root_is_found_twice() {
        // (z^2 + 1)^2 = 1 + 2z^2 + z^4, double roots at +-i
        let roots = polynomial_roots(&dd_vec(&[1.0, 0.0, 2.0, 0.0, 1.0])).unwrap();
        assert_eq!(roots.len(), 4);
        let mut near_i = 0;
        let mut near_minus_i = 0;
        for r in roots {
            let re = r.re.to_f64();
            let im = r.im.to_f64();
            assert!(re.abs() < 1e-7, "re = {re}");
            if (im - 1.0).abs() < 1e-7 {
                near_i += 1;
            }
            if (im + 1.0).abs() < 1e-7 {
                near_minus_i += 1;
            }
        }
        assert_eq!((near_i, near_minus_i), (2, 2));
    }
}
