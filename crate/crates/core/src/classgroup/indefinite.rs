//! Real quadratic fields: indefinite form cycles and narrow class groups.

use super::form::{compose_raw, inverse_raw, principal_form, Form};
use super::structure::ClassOps;
use crate::arith::{is_fundamental_discriminant, isqrt_u64};
use crate::error::{Error, Result};

fn isqrt_disc(d: i128) -> i128 {
    crate::arith::isqrt_i128(d)
}

/// Reduced indefinite form: 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b.
pub fn is_reduced_indefinite(f: &Form, d: i128) -> bool {
    let s = isqrt_disc(d);
    if f.b <= 0 || f.b > s {
        return false;
    }
    let ta = 2 * f.a.abs();
    // sqrt(D) - b < 2|a|  <=>  D < (2|a| + b)^2
    if d >= (ta + f.b) * (ta + f.b) {
        return false;
    }
    // 2|a| < sqrt(D) + b  <=>  (2|a| - b)^2 < D when 2|a| > b, else trivially true
    if ta > f.b && (ta - f.b) * (ta - f.b) >= d {
        return false;
    }
    true
}

/// One reduction step; iterated it lands on (and then walks) a cycle.
pub fn rho(f: &Form, d: i128) -> Form {
    let s = isqrt_disc(d);
    let c = f.c;
    debug_assert!(c != 0);
    let ac = c.abs();
    // choose r = -b (mod 2|c|) in the standard window
    let r = if ac > s {
        // r in (-|c|, |c|]
        let m = (-f.b).rem_euclid(2 * ac);
        if m > ac {
            m - 2 * ac
        } else {
            m
        }
    } else {
        // r in (s - 2|c|, s]
        s - (s - (-f.b)).rem_euclid(2 * ac)
    };
    let new_c = (r * r - d) / (4 * c);
    debug_assert_eq!((r * r - d) % (4 * c), 0);
    Form::new(c, r, new_c)
}

/// Reduce an arbitrary indefinite form of discriminant d.
pub fn reduce_indefinite(mut f: Form, d: i128) -> Form {
    let mut guard = 0;
    while !is_reduced_indefinite(&f, d) {
        f = rho(&f, d);
        guard += 1;
        assert!(guard < 10_000, "indefinite reduction did not terminate");
    }
    f
}

/// Full rho-cycle through a reduced form.
pub fn cycle_of(f: &Form, d: i128) -> Vec<Form> {
    debug_assert!(is_reduced_indefinite(f, d));
    let mut out = vec![*f];
    let mut g = rho(f, d);
    while g != *f {
        out.push(g);
        g = rho(&g, d);
        debug_assert!(out.len() < 100_000);
    }
    out
}

/// Canonical representative of the class of f: cycle minimum.
pub fn canonical_indefinite(f: Form, d: i128) -> Form {
    let r = reduce_indefinite(f, d);
    cycle_of(&r, d).into_iter().min().expect("nonempty cycle")
}

pub struct IndefiniteOps {
    pub d: i128,
}

impl ClassOps for IndefiniteOps {
    fn id(&self) -> Form {
        canonical_indefinite(principal_form(self.d), self.d)
    }
    fn mul(&self, x: &Form, y: &Form) -> Form {
        canonical_indefinite(compose_raw(x, y, self.d), self.d)
    }
    fn inv(&self, x: &Form) -> Form {
        canonical_indefinite(inverse_raw(x), self.d)
    }
}

/// All reduced indefinite forms of positive fundamental discriminant d.
pub fn reduced_forms_indefinite(d: i64) -> Result<Vec<Form>> {
    if d <= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::invalid(format!(
            "needs a positive fundamental discriminant, got {d}"
        )));
    }
    let dd = d as i128;
    let s = isqrt_disc(dd);
    let mut out = Vec::new();
    let mut b = if (s % 2) == (dd % 2) { s } else { s - 1 };
    while b > 0 {
        let n = (dd - b * b) / 4; // ac = -n, n > 0
        // window: sqrt(D) - b < 2|a| < sqrt(D) + b
        let lo = (s - b) / 2; // scan from here, filter exactly below
        let hi = (s + b) / 2 + 1;
        for aa in lo.max(1)..=hi {
            if n % aa != 0 {
                continue;
            }
            for a in [aa, -aa] {
                let c = -n / a;
                let f = Form::new(a, b, c);
                if is_reduced_indefinite(&f, dd) {
                    out.push(f);
                }
            }
        }
        b -= 2;
    }
    out.sort_unstable();
    Ok(out)
}

/// Canonical class representatives of the narrow class group (one per cycle).
pub fn narrow_class_reps(d: i64) -> Result<Vec<Form>> {
    let all = reduced_forms_indefinite(d)?;
    let dd = d as i128;
    let mut seen: std::collections::HashSet<Form> = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for f in all {
        if seen.contains(&f) {
            continue;
        }
        let cyc = cycle_of(&f, dd);
        let rep = *cyc.iter().min().expect("nonempty");
        for g in cyc {
            seen.insert(g);
        }
        reps.push(rep);
    }
    reps.sort_unstable();
    Ok(reps)
}

/// Class of a form representing -1 (the narrow-to-wide kernel generator).
pub fn negative_unit_class(d: i64) -> Form {
    let dd = d as i128;
    let b0 = dd.rem_euclid(2);
    let f = Form::new(-1, b0, (dd - b0 * b0) / 4);
    debug_assert_eq!(f.disc(), dd);
    canonical_indefinite(f, dd)
}

/// Norm of the fundamental unit of Q(sqrt(D)) for fundamental D > 0:
/// odd continued-fraction period of the radicand's square root means -1.
pub fn fundamental_unit_norm(d: i64) -> Result<i32> {
    if d <= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::invalid(format!(
            "fundamental_unit_norm needs a positive fundamental discriminant, got {d}"
        )));
    }
    let m = if d % 4 == 0 { (d / 4) as u64 } else { d as u64 };
    // continued fraction of sqrt(m): period ends at the first Q_i = 1 (i >= 1)
    let a0 = isqrt_u64(m) as i128;
    let m = m as i128;
    let mut p = 0i128;
    let mut q = 1i128;
    let mut period = 0u32;
    loop {
        let a = (a0 + p).div_euclid(q);
        p = a * q - p;
        q = (m - p * p) / q;
        period += 1;
        if q == 1 {
            // next partial quotient would be 2*a0; cycle closes here
            break;
        }
        assert!(period < 1_000_000, "period runaway");
    }
    Ok(if period % 2 == 1 { -1 } else { 1 })
}
