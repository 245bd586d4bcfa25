//! Imaginary quadratic fields: reduced form enumeration and batch sweeps.

use super::form::{compose_raw, inverse_raw, principal_form, reduce_definite, Form};
use super::structure::ClassOps;
use crate::arith::{is_fundamental_discriminant, isqrt_u64, squarefree_flags};
use crate::error::{Error, Result};

pub struct DefiniteOps {
    pub d: i128,
}

impl ClassOps for DefiniteOps {
    fn id(&self) -> Form {
        reduce_definite(principal_form(self.d))
    }
    fn mul(&self, x: &Form, y: &Form) -> Form {
        reduce_definite(compose_raw(x, y, self.d))
    }
    fn inv(&self, x: &Form) -> Form {
        reduce_definite(inverse_raw(x))
    }
}

/// All reduced forms of a negative fundamental discriminant, sorted.
/// Cardinality is the class number.
pub fn reduced_forms(d: i64) -> Result<Vec<Form>> {
    if d >= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::invalid(format!(
            "reduced_forms needs a negative fundamental discriminant, got {d}"
        )));
    }
    let abs = d.unsigned_abs();
    let amax = isqrt_u64(abs / 3);
    let mut out = Vec::new();
    for a in 1..=amax.max(1) {
        let a = a as i64;
        for b in (-a + 1)..=a {
            if (b - d) % 2 != 0 {
                continue;
            }
            let num = (b as i128) * (b as i128) - d as i128;
            let den = 4 * a as i128;
            if num % den != 0 {
                continue;
            }
            let c = num / den;
            if c < a as i128 {
                continue;
            }
            if b < 0 && c == a as i128 {
                continue; // boundary: b >= 0 when a = c
            }
            out.push(Form::new(a as i128, b as i128, c));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Reduced forms of every discriminant -hi <= D <= -lo in one pass over
/// (a, b, c), keyed by |D|. Includes non-fundamental discriminants; callers
/// filter. Total work is O(hi^{3/2}).
pub fn reduced_forms_batch(lo: u64, hi: u64) -> Vec<(u64, Vec<Form>)> {
    let mut map: std::collections::HashMap<u64, Vec<Form>> = std::collections::HashMap::new();
    let amax = isqrt_u64(hi / 3);
    for a in 1..=amax.max(1) as i128 {
        for b in (-a + 1)..=a {
            // |D| = 4ac - b^2 in [lo, hi], c >= a
            let b2 = b * b;
            let cmin = ((lo as i128 + b2) + 4 * a - 1).div_euclid(4 * a).max(a);
            let cmax = (hi as i128 + b2).div_euclid(4 * a);
            for c in cmin..=cmax {
                if b < 0 && c == a {
                    continue;
                }
                let abs = (4 * a * c - b2) as u64;
                if abs < lo {
                    continue;
                }
                map.entry(abs).or_default().push(Form::new(a, b, c));
            }
        }
    }
    let mut out: Vec<(u64, Vec<Form>)> = map.into_iter().collect();
    out.sort_unstable_by_key(|(abs, _)| *abs);
    for (_, forms) in &mut out {
        forms.sort_unstable();
    }
    out
}

/// Class numbers h(D) for every fundamental D with lo <= |D| <= hi, D < 0.
pub fn class_number_batch_negative(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let flags = squarefree_flags(hi);
    let is_fund = |abs: u64| -> bool {
        let d = -(abs as i64);
        match d.rem_euclid(4) {
            1 => flags[abs as usize],
            0 => {
                let m = d / 4;
                let rm = m.rem_euclid(4);
                (rm == 2 || rm == 3) && flags[(abs / 4) as usize]
            }
            _ => false,
        }
    };
    reduced_forms_batch(lo, hi)
        .into_iter()
        .filter(|(abs, _)| is_fund(*abs))
        .map(|(abs, forms)| (abs, forms.len() as u64))
        .collect()
}
