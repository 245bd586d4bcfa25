//! Pollard rho with Brent cycle detection.

use super::primality::is_prime_u64;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

fn step(x: u64, c: u64, n: u64) -> u64 {
    let sq = (x as u128 * x as u128) % n as u128;
    ((sq + c as u128) % n as u128) as u64
}

/// One Brent round with increment `c`; returns a nontrivial factor or n.
fn brent(n: u64, c: u64) -> u64 {
    let m = 128u64;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = 0u64;
    let mut ys = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y, c, n);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = step(y, c, n);
                q = ((q as u128 * x.abs_diff(y) as u128) % n as u128) as u64;
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        // backtrack one step at a time
        loop {
            ys = step(ys, c, n);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    g
}

/// Any nontrivial factor of composite n (n must not be prime, n > 3).
pub fn rho_factor(n: u64) -> u64 {
    debug_assert!(n > 3 && !is_prime_u64(n));
    if n % 2 == 0 {
        return 2;
    }
    for c in 1..64 {
        let g = brent(n, c);
        if g != n && g != 1 {
            return g;
        }
    }
    unreachable!("rho exhausted increments for {n}");
}
