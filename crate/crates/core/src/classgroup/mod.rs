//! Class groups of quadratic fields via binary quadratic forms: class
//! numbers, elementary divisors, torsion subgroup sizes.

use crate::arith::{is_fundamental_discriminant, Sign};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub mod definite;
pub mod form;
pub mod indefinite;
pub mod structure;

pub use definite::{class_number_batch_negative, reduced_forms, DefiniteOps};
pub use form::Form;
pub use indefinite::{fundamental_unit_norm, narrow_class_reps, IndefiniteOps};
pub use structure::{AbelianStructure, ClassOps};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Wide,
    Narrow,
}

/// Class group of a quadratic field as an elementary divisor chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    pub d: i64,
    pub h: u64,
    /// d1 | d2 | ... | dt with every entry >= 2; empty for the trivial group
    pub divisors: Vec<u64>,
    pub kind: Kind,
}

impl ClassGroup {
    pub fn exponent(&self) -> u64 {
        self.divisors.last().copied().unwrap_or(1)
    }
}

/// |Cl[ell]| read off the elementary divisors.
pub fn torsion_size(g: &ClassGroup, ell: u64) -> Result<u64> {
    if ell < 1 {
        return Err(Error::invalid("torsion_size requires ell >= 1"));
    }
    Ok(g.divisors
        .iter()
        .map(|d| num_integer::gcd(*d, ell))
        .product())
}

/// 2-rank of the subgroup 2Cl: count of elementary divisors divisible by 4.
pub fn two_rank_doubled(g: &ClassGroup) -> u32 {
    g.divisors.iter().filter(|d| *d % 4 == 0).count() as u32
}

/// Class group structure of a fundamental discriminant. Negative D gives the
/// (wide = narrow) group; positive D gives the narrow group.
pub fn class_group(d: i64) -> Result<ClassGroup> {
    if d < 0 {
        let g = imaginary_group(d)?;
        Ok(g.to_class_group())
    } else {
        let reps = narrow_class_reps(d)?;
        let ops = IndefiniteOps { d: d as i128 };
        let s = AbelianStructure::divisors_only(&reps, &ops);
        Ok(ClassGroup {
            d,
            h: s.h,
            divisors: s.divisors,
            kind: Kind::Narrow,
        })
    }
}

/// Wide class group of a real quadratic field, derived from the narrow one
/// by factoring out the class of a form representing -1.
pub fn wide_class_group(d: i64) -> Result<ClassGroup> {
    if d <= 0 {
        return Err(Error::invalid("wide_class_group expects D > 0"));
    }
    let reps = narrow_class_reps(d)?;
    let ops = IndefiniteOps { d: d as i128 };
    let j = indefinite::negative_unit_class(d);
    if j == ops.id() {
        let s = AbelianStructure::divisors_only(&reps, &ops);
        return Ok(ClassGroup {
            d,
            h: s.h,
            divisors: s.divisors,
            kind: Kind::Wide,
        });
    }
    let wops = WideOps { inner: ops, j };
    let mut cosets: Vec<Form> = reps.iter().map(|x| wops.rep(x)).collect();
    cosets.sort_unstable();
    cosets.dedup();
    let s = AbelianStructure::divisors_only(&cosets, &wops);
    Ok(ClassGroup {
        d,
        h: s.h,
        divisors: s.divisors,
        kind: Kind::Wide,
    })
}

struct WideOps {
    inner: IndefiniteOps,
    j: Form,
}

impl WideOps {
    fn rep(&self, x: &Form) -> Form {
        let other = self.inner.mul(x, &self.j);
        (*x).min(other)
    }
}

impl ClassOps for WideOps {
    fn id(&self) -> Form {
        self.rep(&self.inner.id())
    }
    fn mul(&self, x: &Form, y: &Form) -> Form {
        self.rep(&self.inner.mul(x, y))
    }
    fn inv(&self, x: &Form) -> Form {
        self.rep(&self.inner.inv(x))
    }
}

/// Imaginary class group with its reduced forms and discrete-log support.
pub struct ImaginaryGroup {
    pub d: i64,
    pub forms: Vec<Form>,
    pub ops: DefiniteOps,
    pub structure: AbelianStructure,
}

impl ImaginaryGroup {
    pub fn to_class_group(&self) -> ClassGroup {
        ClassGroup {
            d: self.d,
            h: self.structure.h,
            divisors: self.structure.divisors.clone(),
            kind: Kind::Wide,
        }
    }

    /// Coordinates of a form class in the elementary divisor basis.
    pub fn dlog(&self, f: &Form) -> Vec<u64> {
        let canonical = form::reduce_definite(*f);
        self.structure.dlog(&self.ops, &canonical)
    }

    pub fn compose(&self, x: &Form, y: &Form) -> Form {
        self.ops.mul(x, y)
    }

    pub fn inverse(&self, x: &Form) -> Form {
        self.ops.inv(x)
    }

    pub fn identity(&self) -> Form {
        self.ops.id()
    }
}

pub fn imaginary_group(d: i64) -> Result<ImaginaryGroup> {
    let forms = reduced_forms(d)?;
    let ops = DefiniteOps { d: d as i128 };
    let structure = AbelianStructure::compute(&forms, &ops);
    Ok(ImaginaryGroup {
        d,
        forms,
        ops,
        structure,
    })
}

/// Reduced composite of two forms of the same negative discriminant.
pub fn compose(f: &Form, g: &Form, d: i64) -> Result<Form> {
    if f.disc() != d as i128 || g.disc() != d as i128 {
        return Err(Error::invalid("discriminant mismatch in compose"));
    }
    if d < 0 {
        Ok(form::reduce_definite(form::compose_raw(f, g, d as i128)))
    } else {
        Ok(indefinite::canonical_indefinite(
            form::compose_raw(f, g, d as i128),
            d as i128,
        ))
    }
}

/// Per-discriminant class data produced by family sweeps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub d: i64,
    pub h: u64,
    pub divisors: Vec<u64>,
}

impl ClassRecord {
    pub fn to_class_group(&self, kind: Kind) -> ClassGroup {
        ClassGroup {
            d: self.d,
            h: self.h,
            divisors: self.divisors.clone(),
            kind,
        }
    }

    pub fn torsion(&self, ell: u64) -> u64 {
        self.divisors
            .iter()
            .map(|d| num_integer::gcd(*d, ell))
            .product()
    }

    pub fn two_rank_doubled(&self) -> u32 {
        self.divisors.iter().filter(|d| *d % 4 == 0).count() as u32
    }

    /// Sylow p partition: exponents of p in the divisors, descending.
    pub fn sylow_partition(&self, p: u64) -> Vec<u32> {
        let mut parts: Vec<u32> = self
            .divisors
            .iter()
            .map(|d| {
                let mut e = 0;
                let mut m = *d;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                e
            })
            .filter(|e| *e > 0)
            .collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }
}

/// Full structure for every fundamental D < 0 with |D| <= x, ascending |D|.
/// Chunked batch enumeration, data-parallel within each chunk.
pub fn imaginary_sweep(x: u64) -> Vec<ClassRecord> {
    let chunk = 20_000u64;
    let mut out: Vec<ClassRecord> = Vec::new();
    let mut lo = 3u64;
    while lo <= x {
        let hi = (lo + chunk - 1).min(x);
        let groups = definite::reduced_forms_batch(lo, hi);
        let mut recs: Vec<ClassRecord> = groups
            .into_par_iter()
            .filter(|(abs, _)| is_fundamental_discriminant(-(*abs as i64)))
            .map(|(abs, forms)| {
                let d = -(abs as i64);
                let ops = DefiniteOps { d: d as i128 };
                let s = AbelianStructure::divisors_only(&forms, &ops);
                ClassRecord {
                    d,
                    h: s.h,
                    divisors: s.divisors,
                }
            })
            .collect();
        recs.sort_unstable_by_key(|r| r.d.unsigned_abs());
        out.extend(recs);
        lo = hi + 1;
    }
    out
}

/// Narrow class structure for every fundamental 0 < D <= x, ascending.
pub fn real_narrow_sweep(x: u64) -> Result<Vec<ClassRecord>> {
    let ds = crate::arith::fundamental_discriminants(3, x, Sign::Positive)?;
    let mut recs: Vec<ClassRecord> = ds
        .into_par_iter()
        .map(|d| {
            let reps = narrow_class_reps(d).expect("fundamental by construction");
            let ops = IndefiniteOps { d: d as i128 };
            let s = AbelianStructure::divisors_only(&reps, &ops);
            ClassRecord {
                d,
                h: s.h,
                divisors: s.divisors,
            }
        })
        .collect();
    recs.sort_unstable_by_key(|r| r.d.unsigned_abs());
    Ok(recs)
}

/// Class numbers for every fundamental |D| <= x of the requested sign
/// (narrow class numbers for the positive sign).
pub fn class_number_batch(x: u64, sign: Sign) -> Result<Vec<(u64, u64)>> {
    if x < 3 {
        return Err(Error::invalid("class_number_batch requires X >= 3"));
    }
    match sign {
        Sign::Negative => Ok(class_number_batch_negative(3, x)),
        Sign::Positive => {
            let ds = crate::arith::fundamental_discriminants(3, x, Sign::Positive)?;
            let mut out: Vec<(u64, u64)> = ds
                .into_par_iter()
                .map(|d| {
                    let reps = narrow_class_reps(d).expect("fundamental");
                    (d as u64, reps.len() as u64)
                })
                .collect();
            out.sort_unstable();
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_group_examples() {
        let g = class_group(-23).unwrap();
        assert_eq!((g.h, g.divisors.clone()), (3, vec![3]));
        assert_eq!(g.kind, Kind::Wide);
        let g = class_group(-3).unwrap();
        assert_eq!((g.h, g.divisors.clone()), (1, vec![]));
        let g = class_group(-84).unwrap();
        assert_eq!((g.h, g.divisors.clone()), (4, vec![2, 2]));
        assert!(class_group(-21).is_err());
    }

    #[test]
    fn known_structures() {
        // (d, h, divisors) for a few well-known imaginary fields
        let cases: &[(i64, u64, &[u64])] = &[
            (-4, 1, &[]),
            (-20, 2, &[2]),
            (-39, 4, &[4]),
            (-47, 5, &[5]),
            (-55, 4, &[4]),
            (-56, 4, &[4]),
            (-68, 4, &[4]),
            (-71, 7, &[7]),
            (-95, 8, &[8]),
            (-104, 6, &[6]),
            (-120, 4, &[2, 2]),
            (-231, 12, &[2, 6]),
            (-479, 25, &[25]),
            (-551, 26, &[26]),
            (-580, 8, &[2, 4]),
            (-3299, 27, &[3, 9]),
            (-3896, 36, &[3, 12]),
            (-4027, 9, &[3, 3]),
        ];
        for (d, h, divisors) in cases {
            let g = class_group(*d).unwrap();
            assert_eq!(g.h, *h, "h at {d}");
            assert_eq!(g.divisors, *divisors, "divisors at {d}");
        }
    }

    #[test]
    fn torsion_sizes() {
        let g = ClassGroup {
            d: -23,
            h: 3,
            divisors: vec![3],
            kind: Kind::Wide,
        };
        assert_eq!(torsion_size(&g, 3).unwrap(), 3);
        let g12 = ClassGroup {
            d: -1,
            h: 12,
            divisors: vec![12],
            kind: Kind::Wide,
        };
        assert_eq!(torsion_size(&g12, 3).unwrap(), 3);
        assert_eq!(torsion_size(&g12, 4).unwrap(), 4);
        assert_eq!(torsion_size(&g12, 12).unwrap(), 12);
        let g28 = ClassGroup {
            d: -1,
            h: 16,
            divisors: vec![2, 8],
            kind: Kind::Wide,
        };
        assert_eq!(torsion_size(&g28, 4).unwrap(), 8);
        assert!(torsion_size(&g28, 0).is_err());
    }

    #[test]
    fn two_rank_doubled_examples() {
        for (divs, expect) in [
            (vec![2u64], 0u32),
            (vec![4], 1),
            (vec![2, 8], 1),
            (vec![4, 4, 8], 3),
        ] {
            let g = ClassGroup {
                d: -1,
                h: divs.iter().product(),
                divisors: divs,
                kind: Kind::Wide,
            };
            assert_eq!(two_rank_doubled(&g), expect);
        }
    }

    #[test]
    fn narrow_vs_wide_real() {
        // D = 60: narrow [2,2] (h+ = 4), wide [2] (h = 2)
        let narrow = class_group(60).unwrap();
        assert_eq!(narrow.kind, Kind::Narrow);
        assert_eq!(narrow.h, 4);
        let wide = wide_class_group(60).unwrap();
        assert_eq!(wide.h, 2);
        // norm -1 field: narrow = wide
        let narrow = class_group(229).unwrap();
        let wide = wide_class_group(229).unwrap();
        assert_eq!(narrow.h, wide.h);
        assert_eq!(narrow.divisors, wide.divisors);
        assert_eq!(narrow.h, 3);
    }

    #[test]
    fn odd_torsion_narrow_wide_agree() {
        for d in crate::arith::fundamental_discriminants(3, 600, Sign::Positive).unwrap() {
            let narrow = class_group(d).unwrap();
            let wide = wide_class_group(d).unwrap();
            for ell in [3u64, 5, 7, 9] {
                assert_eq!(
                    torsion_size(&narrow, ell).unwrap(),
                    torsion_size(&wide, ell).unwrap(),
                    "D = {d}, ell = {ell}"
                );
            }
            // kernel of narrow -> wide has order at most 2
            assert!(narrow.h == wide.h || narrow.h == 2 * wide.h, "D = {d}");
        }
    }

    #[test]
    fn dlog_roundtrip() {
        for d in [-23i64, -84, -120, -231, -479, -580, -3299] {
            let g = imaginary_group(d).unwrap();
            for f in &g.forms {
                let coords = g.dlog(f);
                let mut acc = g.identity();
                for (gen, (r, _)) in g
                    .structure
                    .generators
                    .iter()
                    .zip(coords.iter().zip(&g.structure.divisors))
                {
                    acc = g.compose(&acc, &structure::pow_elem(&g.ops, gen, *r));
                }
                assert_eq!(acc, *f, "dlog roundtrip failed at D={d} for {f:?}");
            }
        }
    }

    #[test]
    fn generator_orders_divide_exponent() {
        for d in [-23i64, -84, -231, -479, -3299] {
            let g = imaginary_group(d).unwrap();
            let exponent = g.structure.divisors.last().copied().unwrap_or(1);
            for (gen, dv) in g.structure.generators.iter().zip(&g.structure.divisors) {
                let ord = (1..=*dv)
                    .find(|k| structure::pow_elem(&g.ops, gen, *k) == g.identity())
                    .unwrap();
                assert_eq!(ord, *dv);
                assert_eq!(exponent % ord, 0);
            }
        }
    }

    #[test]
    fn batch_positive_example() {
        let batch = class_number_batch(5, Sign::Positive).unwrap();
        assert_eq!(batch, vec![(5, 1)]);
    }
}
