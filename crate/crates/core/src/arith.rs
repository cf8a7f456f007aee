//! Small integer helpers shared by the field and order modules.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Returns `(p, r)` with `q = p^r` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut r = 0;
    let mut m = q;
    while m > 1 {
        m /= p;
        r += 1;
    }
    Some((p, r))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `x mod m` in `[0, m)` for signed `x`.
pub fn modulo(x: i64, m: u32) -> u32 {
    x.rem_euclid(m as i64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_powers() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert_eq!(prime_factors(18), vec![2, 3]);
        assert_eq!(prime_factors(676), vec![2, 13]);
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(243), Some((3, 5)));
        assert_eq!(prime_power(19), Some((19, 1)));
        assert_eq!(prime_power(18), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(modulo(-4, 9), 5);
    }
}
