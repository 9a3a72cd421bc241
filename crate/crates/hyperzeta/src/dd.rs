//! Double-double arithmetic (~106-bit significand) for polishing roots of
//! the scaled L-polynomial. Error-free transforms follow the usual
//! two_sum / two_prod construction with FMA.

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from(q1)));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul(Dd::from(q2)));
        let q3 = r2.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    /// Newton sqrt refined in double-double.
    pub fn sqrt(self) -> Dd {
        debug_assert!(self.hi >= 0.0);
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let x0 = self.hi.sqrt();
        let x = Dd::from(x0);
        // one Newton step: x + (a - x^2) / (2x)
        let diff = self.sub(x.mul(x));
        x.add(diff.div(Dd::from(2.0 * x0)))
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn new(re: f64, im: f64) -> CDd {
        CDd { re: Dd::from(re), im: Dd::from(im) }
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    pub fn sub(self, o: CDd) -> CDd {
        CDd { re: self.re.sub(o.re), im: self.im.sub(o.im) }
    }

    pub fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn div(self, o: CDd) -> CDd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(CDd { re: o.re, im: o.im.neg() });
        CDd { re: num.re.div(den), im: num.im.div(den) }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_recovers_lost_bits() {
        // 1 + 2^-80 survives in double-double but not in f64
        let tiny = (2.0f64).powi(-80);
        let a = Dd::ONE.add(Dd::from(tiny));
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, tiny);
        let b = a.sub(Dd::ONE);
        assert_eq!(b.to_f64(), tiny);
    }

    #[test]
    fn dd_division_round_trip() {
        let a = Dd::from(3.0);
        let third = Dd::ONE.div(a);
        let back = third.mul(a).sub(Dd::ONE);
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn dd_sqrt_squares_back() {
        let three = Dd::from(3.0);
        let r = three.sqrt();
        let err = r.mul(r).sub(three);
        assert!(err.to_f64().abs() < 1e-30);
    }

    #[test]
    fn cdd_multiplication_matches_f64_scale() {
        let a = CDd::new(1.5, -2.25);
        let b = CDd::new(-0.5, 3.0);
        let c = a.mul(b);
        assert!((c.re.to_f64() - (1.5 * -0.5 - -2.25 * 3.0)).abs() < 1e-15);
        assert!((c.im.to_f64() - (1.5 * 3.0 + -2.25 * -0.5)).abs() < 1e-15);
    }
}
