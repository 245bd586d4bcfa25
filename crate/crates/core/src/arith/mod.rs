//! Exact integer arithmetic: factorization, multiplicative functions,
//! discriminant predicates, Kronecker symbols.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

mod primality;
mod rho;

pub use primality::{is_prime_u64, pow_mod};

/// Prime-power decomposition with primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigUint,
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Recompose the product; must equal `n`.
    pub fn recompose(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Number of divisors.
    pub fn divisor_count(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (_, e) in &self.factors {
            acc *= BigUint::from(*e as u64 + 1);
        }
        acc
    }

    /// Product of the distinct primes.
    pub fn squarefree_kernel(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, _) in &self.factors {
            acc *= p;
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    pub fn to_u64_pairs(&self) -> Option<Vec<(u64, u32)>> {
        self.factors
            .iter()
            .map(|(p, e)| p.to_u64().map(|p| (p, *e)))
            .collect()
    }
}

/// Factor a u64 completely (deterministic Miller-Rabin + Brent rho).
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 requires n >= 1");
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut stack = vec![n];
    while let Some(mut m) = stack.pop() {
        if m == 1 {
            continue;
        }
        // strip small primes cheaply before rho
        for p in [2u64, 3, 5, 7, 11, 13] {
            while m % p == 0 {
                push_prime(&mut out, p);
                m /= p;
            }
        }
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push_prime(&mut out, m);
            continue;
        }
        let d = rho::rho_factor(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

fn push_prime(out: &mut Vec<(u64, u32)>, p: u64) {
    if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
        last.1 += 1;
    } else {
        out.push((p, 1));
    }
}

/// Strong probable-prime test: exact below 2^64, 25 fixed bases above.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(n64) = n.to_u64() {
        return is_prime_u64(n64);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let trailing = nm1.trailing_zeros().unwrap_or(0);
    let odd = &nm1 >> trailing;
    let bases: [u32; 25] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
        89, 97,
    ];
    'witness: for b in bases {
        let a = BigUint::from(b);
        let mut x = a.modpow(&odd, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..trailing {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    // Brent over BigUint with fixed increments; n composite, odd, > 2^64.
    for c in 1u32..64 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1usize;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = BigUint::zero();
        let mut ys = BigUint::zero();
        let m = 128usize;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0usize;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && &g != n {
            return g;
        }
    }
    unreachable!("rho_big exhausted increments");
}

/// Factor an arbitrary positive integer. Inputs beyond 64 bits go through
/// trial division up to 10^6 first, then rho on the remaining cofactor.
pub fn factor(n: &BigUint) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::invalid("factor requires n >= 1"));
    }
    if let Some(n64) = n.to_u64() {
        let factors = factor_u64(n64)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        return Ok(Factorization {
            n: n.clone(),
            factors,
        });
    }
    let mut rest = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= 1_000_000 {
        let bp = BigUint::from(p);
        while (&rest % &bp).is_zero() {
            if let Some((q, e)) = out.last_mut().filter(|(q, _)| *q == bp) {
                let _ = q;
                *e += 1;
            } else {
                out.push((bp.clone(), 1));
            }
            rest /= &bp;
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    let mut stack = vec![rest];
    let mut big: Vec<(BigUint, u32)> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(m64) = m.to_u64() {
            for (p, e) in factor_u64(m64) {
                merge(&mut big, BigUint::from(p), e);
            }
            continue;
        }
        if is_prime_big(&m) {
            merge(&mut big, m, 1);
            continue;
        }
        let d = rho_big(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    for (p, e) in big {
        merge(&mut out, p, e);
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization {
        n: n.clone(),
        factors: out,
    })
}

fn merge(out: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += e;
    } else {
        out.push((p, e));
    }
}

pub fn factor_i64_abs(n: i64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("factor requires nonzero input"));
    }
    factor(&BigUint::from(n.unsigned_abs()))
}

/// Count of distinct prime divisors of n >= 1.
pub fn omega(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::invalid("omega requires n >= 1"));
    }
    Ok(factor_u64(n).len() as u32)
}

/// Number of divisors of n >= 1.
pub fn divisor_count(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("divisor_count requires n >= 1"));
    }
    Ok(factor_u64(n).iter().map(|(_, e)| *e as u64 + 1).product())
}

/// Product of the distinct primes dividing a >= 1.
pub fn squarefree_kernel(a: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::invalid("squarefree_kernel requires a >= 1"));
    }
    Ok(factor_u64(a).iter().map(|(p, _)| *p).product())
}

/// Write n = a * d^6 with a sixth-power free, d maximal, sign(a) = sign(n).
pub fn sixth_power_free_part(n: &BigInt) -> Result<(BigInt, BigUint)> {
    if n.is_zero() {
        return Err(Error::invalid("sixth_power_free_part requires n != 0"));
    }
    let fac = factor(n.magnitude())?;
    let mut a = BigUint::one();
    let mut d = BigUint::one();
    for (p, e) in &fac.factors {
        a *= p.pow(e % 6);
        d *= p.pow(e / 6);
    }
    let a = BigInt::from_biguint(n.sign(), a);
    Ok((a, d))
}

pub fn sixth_power_free_part_i64(n: i64) -> Result<(i64, u64)> {
    let (a, d) = sixth_power_free_part(&BigInt::from(n))?;
    Ok((a.to_i64().expect("fits"), d.to_u64().expect("fits")))
}

/// Kronecker symbol (d | n) for n >= 0, fully multiplicative in n,
/// with (d | 2) read off d mod 8 and (d | 0) = [d = ±1].
pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    kronecker_i128(d as i128, n as i128)
}

pub fn kronecker_i128(mut a: i128, mut n: i128) -> i32 {
    // Standard binary Kronecker algorithm, (a|n) extended to all n >= 0.
    debug_assert!(n >= 0);
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut sign = 1i32;
    // (a|2) factor per trailing 2 of n
    let tab2 = |a: i128| -> i32 {
        match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        }
    };
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            sign *= tab2(a);
        }
    }
    // now n odd positive: Jacobi symbol with reciprocity
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 {
            let r = n.rem_euclid(8);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            sign = -sign;
        }
        let tmp = a;
        a = n % tmp;
        n = tmp;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// True iff D is the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 || d == 0 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree_u64(d.unsigned_abs());
    }
    if r != 0 {
        return false;
    }
    let m = d / 4;
    let rm = m.rem_euclid(4);
    (rm == 2 || rm == 3) && is_squarefree_u64(m.unsigned_abs())
}

pub fn is_squarefree_u64(n: u64) -> bool {
    n >= 1 && factor_u64(n).iter().all(|(_, e)| *e == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Negative,
    Positive,
}

/// All fundamental discriminants D of the requested sign with lo <= |D| <= hi,
/// in increasing |D|. Uses a squarefree sieve over the window.
pub fn fundamental_discriminants(lo: u64, hi: u64, sign: Sign) -> Result<Vec<i64>> {
    if lo == 0 || lo > hi {
        return Err(Error::invalid("need 0 < lo <= hi"));
    }
    let flags = squarefree_flags(hi);
    let mut out = Vec::new();
    for abs in lo..=hi {
        let d = match sign {
            Sign::Negative => -(abs as i64),
            Sign::Positive => abs as i64,
        };
        let fundamental = match d.rem_euclid(4) {
            1 => flags[abs as usize],
            0 => {
                let m = d / 4;
                let rm = m.rem_euclid(4);
                (rm == 2 || rm == 3) && flags[(abs / 4) as usize]
            }
            _ => false,
        };
        if fundamental && d != 1 {
            out.push(d);
        }
    }
    Ok(out)
}

/// flags[k] == true iff k is squarefree (flags[0] = false).
pub fn squarefree_flags(limit: u64) -> Vec<bool> {
    let n = limit as usize;
    let mut flags = vec![true; n + 1];
    flags[0] = false;
    let mut p = 2u64;
    while p * p <= limit {
        let sq = (p * p) as usize;
        let mut k = sq;
        while k <= n {
            flags[k] = false;
            k += sq;
        }
        p += 1;
    }
    flags
}

/// Integer square root (floor).
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x > 0 && x.checked_mul(x).map_or(true, |s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |s| s <= n) {
        x += 1;
    }
    x
}

pub fn isqrt_i128(n: i128) -> i128 {
    debug_assert!(n >= 0);
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x > 0 && x.checked_mul(x).map_or(true, |s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |s| s <= n) {
        x += 1;
    }
    x
}

/// True iff n is a perfect square; returns the root.
pub fn perfect_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        let f = factor(&BigUint::from(12u32)).unwrap();
        assert_eq!(f.to_u64_pairs().unwrap(), vec![(2, 2), (3, 1)]);
        let f = factor(&BigUint::from(1u32)).unwrap();
        assert!(f.factors.is_empty());
        // oracle: trial division
        let trial = |mut n: u64| {
            let mut v = Vec::new();
            let mut d = 2;
            while d * d <= n {
                let mut e = 0;
                while n % d == 0 {
                    n /= d;
                    e += 1;
                }
                if e > 0 {
                    v.push((d, e));
                }
                d += 1;
            }
            if n > 1 {
                v.push((n, 1));
            }
            v
        };
        assert_eq!(factor_u64(110_592), trial(110_592));
        assert_eq!(factor_u64(110_592), vec![(2, 12), (3, 3)]);
    }

    #[test]
    fn multiplicative_functions() {
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(20).unwrap(), 2);
        assert_eq!(omega(30).unwrap(), 3);
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(4).unwrap(), 3);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(squarefree_kernel(12).unwrap(), 6);
        assert_eq!(squarefree_kernel(1).unwrap(), 1);
        assert_eq!(squarefree_kernel(110_592).unwrap(), 6);
    }

    #[test]
    fn sixth_power_free() {
        assert_eq!(sixth_power_free_part_i64(110_592).unwrap(), (27, 4));
        assert_eq!(sixth_power_free_part_i64(64).unwrap(), (1, 2));
        assert_eq!(sixth_power_free_part_i64(-19_008).unwrap(), (-297, 2));
        assert!(sixth_power_free_part(&BigInt::zero()).is_err());
    }

    #[test]
    fn sixth_power_free_exhaustive() {
        for n in 1i64..=100_000 {
            for s in [n, -n] {
                let (a, d) = sixth_power_free_part_i64(s).unwrap();
                assert_eq!(a * (d as i64).pow(6), s);
                for (_, e) in factor_u64(a.unsigned_abs()) {
                    assert!(e <= 5, "exponent {e} in sixth-power-free part of {s}");
                }
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(-23, 2), 1);
        assert_eq!(kronecker_symbol(-20, 5), 0);
        assert_eq!(kronecker_symbol(-4, 3), -1);
        assert_eq!(kronecker_symbol(5, 1), 1);
        assert_eq!(kronecker_symbol(1, 0), 1);
        assert_eq!(kronecker_symbol(-1, 0), 1);
        assert_eq!(kronecker_symbol(3, 0), 0);
    }

    #[test]
    fn kronecker_vs_quadratic_residues() {
        // against brute force x^2 ≡ D mod p over odd primes
        for p in (3u64..1000).filter(|&p| is_prime_u64(p)) {
            let mut residues = vec![false; p as usize];
            for x in 0..p {
                residues[((x * x) % p) as usize] = true;
            }
            for d in -1000i64..1000 {
                let r = d.rem_euclid(p as i64) as usize;
                let expected = if r == 0 {
                    0
                } else if residues[r] {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker_symbol(d, p), expected, "D={d} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_n() {
        for d in [-23i64, -20, -4, 5, 12, -84] {
            for n1 in 1u64..60 {
                for n2 in 1u64..60 {
                    assert_eq!(
                        kronecker_symbol(d, n1 * n2),
                        kronecker_symbol(d, n1) * kronecker_symbol(d, n2)
                    );
                }
            }
        }
    }

    #[test]
    fn fundamental_discriminant_predicate() {
        assert!(is_fundamental_discriminant(-20));
        assert!(!is_fundamental_discriminant(25));
        assert!(is_fundamental_discriminant(-23));
        assert!(!is_fundamental_discriminant(1));
        assert!(is_fundamental_discriminant(5));
        assert!(is_fundamental_discriminant(8));
        assert!(!is_fundamental_discriminant(-63)); // 63 = 9 * 7 is not squarefree
    }

    #[test]
    fn fundamental_discriminant_streams() {
        let neg = fundamental_discriminants(3, 25, Sign::Negative).unwrap();
        assert_eq!(neg, vec![-3, -4, -7, -8, -11, -15, -19, -20, -23, -24]);
        assert!(fundamental_discriminants(2, 2, Sign::Negative)
            .unwrap()
            .is_empty());
        let pos = fundamental_discriminants(5, 13, Sign::Positive).unwrap();
        assert_eq!(pos, vec![5, 8, 12, 13]);
    }

    #[test]
    fn isqrt_checks() {
        for n in 0..10_000u64 {
            let r = isqrt_u64(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt_i128((1i128 << 80) - 1), (1i128 << 40) - 1);
    }
}
