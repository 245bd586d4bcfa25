//! Exact decimal rendering and small serialization helpers.
//!
//! Reports carry exact integers; any ratio is rendered once, deterministically
//! (round half away from zero at the requested number of places), so reruns
//! diff byte-for-byte.

use num_bigint::BigUint;
use num_traits::Zero;

/// num/den rounded to `places` decimals, half away from zero; den > 0.
pub fn decimal_string(num: &BigUint, den: &BigUint, places: usize) -> String {
    assert!(!den.is_zero(), "decimal_string with zero denominator");
    let scale = BigUint::from(10u32).pow(places as u32);
    // round(num/den * scale) = floor((2*num*scale + den) / (2*den))
    let scaled = (BigUint::from(2u32) * num * &scale + den) / (BigUint::from(2u32) * den);
    let digits = scaled.to_string();
    if places == 0 {
        return digits;
    }
    let padded = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let split = padded.len() - places;
    format!("{}.{}", &padded[..split], &padded[split..])
}

pub fn decimal_string_u64(num: u64, den: u64, places: usize) -> String {
    decimal_string(&BigUint::from(num), &BigUint::from(den), places)
}

/// Signed variant.
pub fn decimal_string_signed(neg: bool, num: &BigUint, den: &BigUint, places: usize) -> String {
    let body = decimal_string(num, den, places);
    if neg && body.chars().any(|c| c.is_ascii_digit() && c != '0') {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(decimal_string_u64(12, 10, 6), "1.200000");
        assert_eq!(decimal_string_u64(1, 3, 6), "0.333333");
        assert_eq!(decimal_string_u64(2, 3, 6), "0.666667");
        assert_eq!(decimal_string_u64(1, 2, 0), "1"); // half rounds away
        assert_eq!(decimal_string_u64(5, 1000000, 6), "0.000005");
        assert_eq!(decimal_string_u64(0, 7, 3), "0.000");
    }
}
