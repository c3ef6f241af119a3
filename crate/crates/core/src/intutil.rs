//! Integer utilities: sieves, factorization, symbols, and small helpers
//! shared across the crate. Everything here is exact.

/// Primes up to and including `n`, by Eratosthenes.
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Smallest-prime-factor table: `spf[k]` is the least prime dividing `k`
/// (with `spf[0] = spf[1] = 0`).
pub fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf[i] || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    spf
}

/// Squarefree indicator table for 1..=n.
pub fn squarefree_sieve(n: usize) -> Vec<bool> {
    let mut sf = vec![true; n + 1];
    if n >= 1 {
        sf[0] = false;
    }
    let mut d = 2usize;
    while d * d <= n {
        let q = d * d;
        let mut m = q;
        while m <= n {
            sf[m] = false;
            m += q;
        }
        d += 1;
    }
    sf
}

/// Deterministic Miller–Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Pollard's rho; `n` must be composite and odd.
fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = (mul_mod_u64(x, x, n) + c) % n;
            y = (mul_mod_u64(y, y, n) + c) % n;
            y = (mul_mod_u64(y, y, n) + c) % n;
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

/// Prime factorization of `n >= 1` as sorted `(p, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut rest: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            rest.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    rest.sort_unstable();
    let mut i = 0;
    while i < rest.len() {
        let p = rest[i];
        let mut e = 0;
        while i < rest.len() && rest[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort_unstable();
    out
}

/// All positive divisors of `n >= 1`, unsorted.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = divs.len();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            for i in 0..len {
                divs.push(divs[i] * pe);
            }
        }
    }
    divs
}

/// p-adic valuation of `n != 0`.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_i64(n: i64, p: u64) -> u32 {
    valuation_u64(n.unsigned_abs(), p)
}

/// Kronecker symbol (a|n).
pub fn kronecker(mut a: i64, mut n: i64) -> i32 {
    if n == 0 {
        return if a.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let mut k = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    let v = if n == 0 { 0 } else { n.trailing_zeros() };
    n >>= v;
    if v % 2 == 1 {
        match (a % 8 + 8) % 8 {
            1 | 7 => {}
            3 | 5 => k = -k,
            _ => return 0, // a even
        }
    }
    a = ((a % n) + n) % n;
    while a != 0 {
        let va = a.trailing_zeros();
        a >>= va;
        if va % 2 == 1 {
            match n % 8 {
                3 | 5 => k = -k,
                _ => {}
            }
        }
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        let t = n % a;
        n = a;
        a = t;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// chi_{-3}(p) = (-3|p): +1 for p = 1 mod 3, -1 for p = 2 mod 3, 0 at 3.
pub fn chi_minus3(p: u64) -> i32 {
    match p % 3 {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Exact integer cube root of `n` if `n` is a perfect cube.
pub fn exact_cbrt(n: i64) -> Option<i64> {
    let neg = n < 0;
    let m = n.unsigned_abs();
    let mut r = (m as f64).cbrt().round() as u64;
    while r > 0 && r.checked_pow(3).map_or(true, |c| c > m) {
        r -= 1;
    }
    while (r + 1).checked_pow(3).map_or(false, |c| c <= m) {
        r += 1;
    }
    if r * r * r == m {
        Some(if neg { -(r as i64) } else { r as i64 })
    } else {
        None
    }
}

/// Exact integer square root of `n` if `n` is a perfect square.
pub fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let m = n as u64;
    let mut r = (m as f64).sqrt().round() as u64;
    while r > 0 && r * r > m {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= m {
        r += 1;
    }
    if r * r == m {
        Some(r as i64)
    } else {
        None
    }
}

/// Best rational approximation `p/q` to `x` with `q <= qmax`, by continued
/// fractions. Returns `(p, q)`.
pub fn rational_reconstruct(x: f64, qmax: u64) -> (i64, u64) {
    let neg = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1u64, 1i64, 0u64);
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i64;
        let p2 = ai
            .checked_mul(p1)
            .and_then(|v| v.checked_add(p0))
            .unwrap_or(i64::MAX);
        let q2 = (ai as u64).checked_mul(q1).and_then(|v| v.checked_add(q0));
        let q2 = match q2 {
            Some(q) if q <= qmax => q,
            _ => break,
        };
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-13 {
            break;
        }
        x = 1.0 / frac;
    }
    (if neg { -p1 } else { p1 }, q1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_roundtrip() {
        for n in [1u64, 2, 12, 97, 2 * 3 * 5 * 7 * 11, 1_000_003, 999_999_937] {
            let f = factor_u64(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back.max(1), n.max(1));
            for &(p, _) in &f {
                assert!(is_prime_u64(p));
            }
        }
    }

    #[test]
    fn kronecker_matches_legendre() {
        // (a|p) = a^((p-1)/2) mod p for odd primes.
        for &p in &[3i64, 5, 7, 11, 13, 101] {
            for a in -20i64..20 {
                let ls = if a.rem_euclid(p) == 0 {
                    0
                } else {
                    let e = pow_mod_u64(a.rem_euclid(p) as u64, (p as u64 - 1) / 2, p as u64);
                    if e == 1 {
                        1
                    } else {
                        -1
                    }
                };
                assert_eq!(kronecker(a, p), ls, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn cbrt_and_sqrt() {
        assert_eq!(exact_cbrt(-27), Some(-3));
        assert_eq!(exact_cbrt(28), None);
        assert_eq!(exact_sqrt(49), Some(7));
        assert_eq!(exact_sqrt(50), None);
    }

    #[test]
    fn reconstruct_simple_rationals() {
        let (p, q) = rational_reconstruct(0.25, 100);
        assert_eq!((p, q), (1, 4));
        let (p, q) = rational_reconstruct(-4.0, 100);
        assert_eq!((p, q), (-4, 1));
        let (p, q) = rational_reconstruct(355.0 / 113.0, 1000);
        assert_eq!((p, q), (355, 113));
    }
}
