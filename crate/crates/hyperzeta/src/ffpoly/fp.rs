//! Scalar arithmetic in the prime field F_q.

/// Deterministic primality check by trial division; q stays desk-scale here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[inline]
pub fn add(a: u32, b: u32, q: u32) -> u32 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u32, b: u32, q: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

#[inline]
pub fn mul(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 * b as u64) % q as u64) as u32
}

#[inline]
pub fn neg(a: u32, q: u32) -> u32 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

pub fn pow(mut base: u32, mut exp: u64, q: u32) -> u32 {
    let mut acc = 1u32;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, q);
        }
        base = mul(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse via Fermat; a must be nonzero mod q.
#[inline]
pub fn inv(a: u32, q: u32) -> u32 {
    debug_assert!(a % q != 0);
    pow(a, q as u64 - 2, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops_mod_5() {
        assert_eq!(add(3, 4, 5), 2);
        assert_eq!(sub(1, 3, 5), 3);
        assert_eq!(mul(3, 4, 5), 2);
        assert_eq!(inv(3, 5), 2);
        assert_eq!(pow(2, 4, 5), 1);
    }

    #[test]
    fn primality() {
        assert!(is_prime(3));
        assert!(is_prime(5));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1));
        assert!(!is_prime(9));
        assert!(!is_prime(91));
    }
}
