//! Binary quadratic forms ax^2 + bxy + cy^2 over i128.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Form {
    pub fn new(a: i128, b: i128, c: i128) -> Self {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// GL2 change of variable (x, y) -> (p x + q y, r x + s y), ps - qr = 1.
    pub fn transform(&self, p: i128, q: i128, r: i128, s: i128) -> Form {
        debug_assert_eq!(p * s - q * r, 1);
        let a = self.eval(p, r);
        let c = self.eval(q, s);
        let b = 2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s;
        Form { a, b, c }
    }
}

pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g >= 0
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    // m > 0, gcd(a, m) = 1
    let (g, x, _) = xgcd(a.rem_euclid(m), m);
    debug_assert_eq!(g, 1);
    x.rem_euclid(m)
}

/// Principal form of discriminant d (d = 0 or 1 mod 4).
pub fn principal_form(d: i128) -> Form {
    if d < 0 {
        let b = d.rem_euclid(2);
        Form::new(1, b, (b * b - d) / 4)
    } else {
        // largest b <= floor(sqrt(d)) with b = d mod 2
        let s = crate::arith::isqrt_i128(d);
        let b = if s.rem_euclid(2) == d.rem_euclid(2) {
            s
        } else {
            s - 1
        };
        Form::new(1, b, (b * b - d) / 4)
    }
}

/// Is this a reduced positive definite form (d < 0)?
pub fn is_reduced_definite(f: &Form) -> bool {
    f.a > 0
        && f.b.abs() <= f.a
        && f.a <= f.c
        && (f.b >= 0 || (f.b.abs() < f.a && f.a < f.c))
}

/// Gauss reduction for positive definite forms.
pub fn reduce_definite(mut f: Form) -> Form {
    debug_assert!(f.a > 0 && f.disc() < 0);
    loop {
        // normalize b into (-a, a]
        if f.b > f.a || f.b <= -f.a {
            let r = (f.a - f.b).div_euclid(2 * f.a);
            let b = f.b + 2 * r * f.a;
            let c = f.a * r * r + f.b * r + f.c;
            f = Form::new(f.a, b, c);
        }
        if f.a > f.c {
            f = Form::new(f.c, -f.b, f.a);
            continue;
        }
        if f.a == f.c && f.b < 0 {
            f = Form::new(f.c, -f.b, f.a);
        }
        debug_assert!(is_reduced_definite(&f), "not reduced: {f:?}");
        return f;
    }
}

/// Deterministic stream of primitive (x, y) pairs used to find a value of a
/// form coprime to a target modulus.
fn primitive_pairs() -> impl Iterator<Item = (i128, i128)> {
    (1i128..10_000).flat_map(|s| {
        (0..=s).flat_map(move |x| {
            let y = s - x;
            [(x, y), (x, -y)]
        })
    })
}

/// Gauss composition of primitive forms of the same discriminant.
/// Returns the (unreduced) product form; callers reduce per their geometry.
pub fn compose_raw(f1: &Form, f2: &Form, d: i128) -> Form {
    debug_assert_eq!(f1.disc(), d);
    debug_assert_eq!(f2.disc(), d);
    let a1 = f1.a;
    for (x, y) in primitive_pairs() {
        if gcd_i128(x, y) != 1 {
            continue;
        }
        let m = f2.eval(x, y);
        if m == 0 || gcd_i128(m, 2 * a1) != 1 {
            continue;
        }
        // complete (x, y) to a determinant-one matrix: columns (x, y), (-v, u)
        let (g, u, v) = xgcd(x, y);
        debug_assert_eq!(g, 1);
        let g2 = f2.transform(x, -v, y, u);
        debug_assert_eq!(g2.a, m);
        // concordant b: B = b1 (mod 2 a1), B = g2.b (mod 2 m)
        let mm = m.abs();
        let t = (((g2.b - f1.b) / 2).rem_euclid(mm) * mod_inverse(a1, mm)).rem_euclid(mm);
        let bb = f1.b + 2 * a1 * t;
        let aa = a1 * m;
        let num = bb * bb - d;
        debug_assert_eq!(num.rem_euclid(4 * aa.abs()), 0);
        let cc = num / (4 * aa);
        return Form::new(aa, bb, cc);
    }
    unreachable!("no coprime representative found");
}

/// Inverse class: mirror the middle coefficient.
pub fn inverse_raw(f: &Form) -> Form {
    Form::new(f.a, -f.b, f.c)
}

/// Solve b^2 = d (mod 4p) for a prime form (p, b, c); p must be split or
/// ramified-free per the caller's contract.
pub fn sqrt_mod_4p(d: i128, p: u64) -> Result<i128> {
    let dm = d;
    if p == 2 {
        // need d = 1 mod 8 for a split prime form at 2
        if dm.rem_euclid(8) == 1 {
            Ok(1)
        } else {
            Err(Error::invalid("2 is not split for this discriminant"))
        }
    } else {
        let r = tonelli_shanks(dm.rem_euclid(p as i128) as u64, p)
            .ok_or_else(|| Error::invalid(format!("{p} is not split: no square root")))?;
        // adjust parity so b^2 = d mod 4: b must match d mod 2
        let want_odd = dm.rem_euclid(2) == 1;
        let b = if (r % 2 == 1) == want_odd {
            r as i128
        } else {
            // p odd, so p - r flips parity
            (p - r) as i128
        };
        debug_assert_eq!((b * b - dm).rem_euclid(4 * p as i128), 0);
        Ok(b)
    }
}

/// Square root mod an odd prime p, if it exists.
pub fn tonelli_shanks(n: u64, p: u64) -> Option<u64> {
    use crate::arith::pow_mod;
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(n, (p + 1) / 4, p));
    }
    // general case
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(n, q, p);
    let mut r = pow_mod(n, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = ((t2 as u128 * t2 as u128) % p as u128) as u64;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        let b2 = ((b as u128 * b as u128) % p as u128) as u64;
        m = i;
        c = b2;
        t = ((t as u128 * b2 as u128) % p as u128) as u64;
        r = ((r as u128 * b as u128) % p as u128) as u64;
    }
    Some(r)
}
