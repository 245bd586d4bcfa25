//! Family sweeps, k-th moment sums, exceptional sets, and exact verification
//! of the Chebyshev/dyadic moment inequalities.

use crate::arith::Sign;
use crate::classgroup::{self, ClassRecord, Kind};
use crate::error::{Error, Result};
use crate::report::decimal_string;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

pub type Rational = num_rational::Ratio<u64>;

/// A discriminant-ordered family of quadratic fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub sign: Sign,
    pub torsion_kind: Kind,
}

impl FamilySpec {
    pub fn imaginary() -> Self {
        FamilySpec {
            sign: Sign::Negative,
            torsion_kind: Kind::Wide,
        }
    }

    pub fn real_narrow() -> Self {
        FamilySpec {
            sign: Sign::Positive,
            torsion_kind: Kind::Narrow,
        }
    }

    /// Real family reported through the wide group (the default for reports).
    pub fn real_wide() -> Self {
        FamilySpec {
            sign: Sign::Positive,
            torsion_kind: Kind::Wide,
        }
    }
}

/// Materialized family up to |D| <= x with per-field class structure.
pub struct Family {
    pub spec: FamilySpec,
    pub x: u64,
    pub records: Vec<ClassRecord>,
}

impl Family {
    pub fn sweep(spec: FamilySpec, x: u64) -> Result<Family> {
        if x < 3 {
            return Err(Error::invalid("family sweep requires X >= 3"));
        }
        let records = match (spec.sign, spec.torsion_kind) {
            (Sign::Negative, _) => classgroup::imaginary_sweep(x),
            (Sign::Positive, Kind::Narrow) => classgroup::real_narrow_sweep(x)?,
            (Sign::Positive, Kind::Wide) => {
                use rayon::prelude::*;
                let ds = crate::arith::fundamental_discriminants(3, x, Sign::Positive)?;
                let mut recs: Vec<ClassRecord> = ds
                    .into_par_iter()
                    .map(|d| {
                        let g = classgroup::wide_class_group(d).expect("fundamental");
                        ClassRecord {
                            d,
                            h: g.h,
                            divisors: g.divisors,
                        }
                    })
                    .collect();
                recs.sort_unstable_by_key(|r| r.d.unsigned_abs());
                recs
            }
        };
        Ok(Family { spec, x, records })
    }

    pub fn count(&self) -> u64 {
        self.records.len() as u64
    }
}

/// k-th moment summary of |Cl[ell]| over a family.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub x: u64,
    pub ell: u64,
    pub k: u32,
    pub family_count: u64,
    /// exact integer, serialized as a decimal string
    pub moment_sum: String,
    /// moment_sum / family_count to six places
    pub ratio: String,
}

#[derive(Debug, Clone)]
pub struct MomentData {
    pub report: MomentReport,
    pub sum: BigUint,
}

/// Exact sum of |Cl[ell]|^k over the family.
pub fn moment_sum(family: &Family, ell: u64, k: u32) -> Result<MomentData> {
    if ell < 1 || k < 1 {
        return Err(Error::invalid("moment_sum requires ell >= 1 and k >= 1"));
    }
    let mut sum = BigUint::zero();
    for rec in &family.records {
        sum += BigUint::from(rec.torsion(ell)).pow(k);
    }
    let count = family.count();
    let ratio = if count == 0 {
        "0.000000".to_string()
    } else {
        decimal_string(&sum, &BigUint::from(count), 6)
    };
    Ok(MomentData {
        report: MomentReport {
            x: family.x,
            ell,
            k,
            family_count: count,
            moment_sum: sum.to_string(),
            ratio,
        },
        sum,
    })
}

/// max |Cl[3]| over both signs with |D| <= x (narrow on the real side;
/// 3-torsion is insensitive to narrow vs wide).
pub fn h3_max(x: u64) -> Result<u64> {
    if x < 3 {
        return Err(Error::invalid("h3_max requires X >= 3"));
    }
    let neg = Family::sweep(FamilySpec::imaginary(), x)?;
    let pos = Family::sweep(FamilySpec::real_narrow(), x)?;
    Ok(neg
        .records
        .iter()
        .chain(pos.records.iter())
        .map(|r| r.torsion(3))
        .max()
        .unwrap_or(1))
}

/// Fields with |Cl[ell]| > |D|^delta, decided by |Cl[ell]|^v > |D|^u.
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalReport {
    pub x: u64,
    pub ell: u64,
    pub delta_num: u64,
    pub delta_den: u64,
    pub members: Vec<i64>,
    /// (block index j, count in (X/2^{j+1}, X/2^j])
    pub dyadic_counts: Vec<(u32, u64)>,
}

fn is_exceptional(rec: &ClassRecord, ell: u64, u: u64, v: u64) -> bool {
    let t = BigUint::from(rec.torsion(ell)).pow(v as u32);
    let d = BigUint::from(rec.d.unsigned_abs()).pow(u as u32);
    t > d
}

pub fn exceptional_set(family: &Family, ell: u64, delta: Rational) -> Result<ExceptionalReport> {
    if ell < 1 {
        return Err(Error::invalid("exceptional_set requires ell >= 1"));
    }
    let (u, v) = (*delta.numer(), *delta.denom());
    if v < 1 {
        return Err(Error::invalid("delta must be u/v with v >= 1"));
    }
    let members: Vec<i64> = family
        .records
        .iter()
        .filter(|r| is_exceptional(r, ell, u, v))
        .map(|r| r.d)
        .collect();
    let mut dyadic = Vec::new();
    let mut j = 0u32;
    loop {
        // block j: X/2^{j+1} < |D| <= X/2^j, exact via shifted comparisons
        let lo_den = 1u64 << (j + 1);
        let hi = family.x >> j;
        if hi < 3 {
            break;
        }
        let count = members
            .iter()
            .filter(|d| {
                let abs = d.unsigned_abs();
                abs as u128 * lo_den as u128 > family.x as u128 && abs <= hi
            })
            .count() as u64;
        dyadic.push((j, count));
        j += 1;
        if j >= 63 {
            break;
        }
    }
    Ok(ExceptionalReport {
        x: family.x,
        ell,
        delta_num: u,
        delta_den: v,
        members,
        dyadic_counts: dyadic,
    })
}

/// Outcome of an exact inequality check; both sides kept as decimal strings.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub strict: bool,
    pub exceptional_count: u64,
    pub lhs: String,
    pub rhs: String,
}

/// Chebyshev inequality on a dyadic window: R^{delta p} * #{n : f(n) > n^delta}
/// <= sum f(n)^p, strict when the exceptional set is nonempty.
/// Values must satisfy R <= n <= 2R where R = min n.
pub fn chebyshev_check(values: &[(u64, u64)], delta: Rational, p: u32) -> Result<Verdict> {
    if values.is_empty() {
        return Err(Error::invalid("chebyshev_check requires a nonempty window"));
    }
    if p < 1 {
        return Err(Error::invalid("chebyshev_check requires p >= 1"));
    }
    let r = values.iter().map(|(n, _)| *n).min().unwrap();
    let top = values.iter().map(|(n, _)| *n).max().unwrap();
    if r < 1 || top > 2 * r {
        return Err(Error::invalid("values must lie in a dyadic window [R, 2R]"));
    }
    let (u, v) = (*delta.numer(), *delta.denom());
    let mut exceptional = 0u64;
    let mut rhs = BigUint::zero();
    for (n, f) in values {
        if BigUint::from(*f).pow(v as u32) > BigUint::from(*n).pow(u as u32) {
            exceptional += 1;
        }
        rhs += BigUint::from(*f).pow(p);
    }
    // LHS = R^{u p / v} * N; compare LHS^v <= RHS^v exactly
    let lhs_v = BigUint::from(r).pow((u * p as u64) as u32) * BigUint::from(exceptional).pow(v as u32);
    let rhs_v = rhs.pow(v as u32);
    let holds = lhs_v <= rhs_v && (exceptional == 0 || lhs_v < rhs_v);
    Ok(Verdict {
        holds,
        strict: lhs_v < rhs_v,
        exceptional_count: exceptional,
        lhs: lhs_v.to_string(),
        rhs: rhs_v.to_string(),
    })
}

/// One dyadic block of the bound |B0| * (X_j/2)^{delta k} < sum |Cl[ell]|^k.
#[derive(Debug, Clone, Serialize)]
pub struct DyadicBlock {
    pub j: u32,
    pub family_in_block: u64,
    pub exceptional_in_block: u64,
    pub holds: bool,
    /// cumulative |B(X_j)| / |F(X_j)| to six places
    pub cumulative_ratio: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicReport {
    pub x: u64,
    pub ell: u64,
    pub k: u32,
    pub delta_num: u64,
    pub delta_den: u64,
    pub blocks: Vec<DyadicBlock>,
    pub block_count_bound: u32,
    pub all_hold: bool,
    /// blocks partition the family exactly
    pub partition_exact: bool,
}

/// Per-block exact verification of the dyadic moment bound, over every block
/// (X/2^{j+1}, X/2^j] down to the bottom of the family.
pub fn dyadic_bound_check(
    family: &Family,
    ell: u64,
    k: u32,
    delta: Rational,
) -> Result<DyadicReport> {
    if ell < 1 || k < 1 {
        return Err(Error::invalid("dyadic_bound_check requires ell, k >= 1"));
    }
    let (u, v) = (*delta.numer(), *delta.denom());
    let x = family.x;
    // 2 log2(X) block budget, as stated
    let block_bound = (2.0 * (x as f64).log2()).floor() as u32;
    let mut blocks = Vec::new();
    let mut seen = 0u64;
    let mut exc_cum = 0u64;
    let mut all_hold = true;
    let mut j = 0u32;
    while (x >> j) >= 3 && j < 63 {
        let hi = x >> j;
        let lo_den = 1u64 << (j + 1);
        let in_block: Vec<&ClassRecord> = family
            .records
            .iter()
            .filter(|r| {
                let abs = r.d.unsigned_abs();
                abs as u128 * lo_den as u128 > x as u128 && abs <= hi
            })
            .collect();
        let exceptional = in_block
            .iter()
            .filter(|r| is_exceptional(r, ell, u, v))
            .count() as u64;
        let mut sum = BigUint::zero();
        for r in &in_block {
            sum += BigUint::from(r.torsion(ell)).pow(k);
        }
        // |B0| * (X / 2^{j+1})^{uk/v} < sum, compared at the v-th power:
        // |B0|^v * X^{uk} < sum^v * 2^{(j+1) uk}
        let uk = (u * k as u64) as u32;
        let lhs = BigUint::from(exceptional).pow(v as u32) * BigUint::from(x).pow(uk);
        let rhs = sum.pow(v as u32) * (BigUint::one() << ((j + 1) * uk));
        let holds = if exceptional == 0 {
            true
        } else {
            lhs < rhs
        };
        all_hold &= holds;
        seen += in_block.len() as u64;
        exc_cum += exceptional;
        // cumulative ratio at checkpoint X_j uses the full family below X_j...
        // the running totals ARE the family above the current block floor;
        // report |B ∩ F(X)| / |F(X)| restricted to |D| > X/2^{j+1}
        let ratio = if seen == 0 {
            "0.000000".to_string()
        } else {
            decimal_string(&BigUint::from(exc_cum), &BigUint::from(seen), 6)
        };
        blocks.push(DyadicBlock {
            j,
            family_in_block: in_block.len() as u64,
            exceptional_in_block: exceptional,
            holds,
            cumulative_ratio: ratio,
        });
        j += 1;
    }
    let partition_exact = seen == family.count();
    Ok(DyadicReport {
        x,
        ell,
        k,
        delta_num: u,
        delta_den: v,
        block_count_bound: block_bound,
        all_hold: all_hold && (blocks.len() as u32) <= block_bound.max(1),
        blocks,
        partition_exact,
    })
}

/// Fouvry-Kluners style moment: exact sum of 2^{k * rk2(2 Cl)}.
pub fn fk_moment(family: &Family, k: u32) -> Result<MomentData> {
    if k < 1 {
        return Err(Error::invalid("fk_moment requires k >= 1"));
    }
    let mut sum = BigUint::zero();
    for rec in &family.records {
        sum += BigUint::one() << (k * rec.two_rank_doubled());
    }
    let count = family.count();
    let ratio = if count == 0 {
        "0.000000".to_string()
    } else {
        decimal_string(&sum, &BigUint::from(count), 6)
    };
    Ok(MomentData {
        report: MomentReport {
            x: family.x,
            ell: 2,
            k,
            family_count: count,
            moment_sum: sum.to_string(),
            ratio,
        },
        sum,
    })
}

/// Fraction of the family whose Sylow p-subgroup matches the partition
/// (empty partition = trivial Sylow subgroup). p must be an odd prime.
pub fn empirical_density(
    family: &Family,
    p: u64,
    partition: &[u32],
) -> Result<(u64, u64)> {
    if p < 3 || !crate::arith::is_prime_u64(p) {
        return Err(Error::invalid("empirical_density requires an odd prime p"));
    }
    let mut sorted = partition.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let hits = family
        .records
        .iter()
        .filter(|r| r.sylow_partition(p) == sorted)
        .count() as u64;
    Ok((hits, family.count()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn imaginary(x: u64) -> Family {
        Family::sweep(FamilySpec::imaginary(), x).unwrap()
    }

    #[test]
    fn moment_examples_x25() {
        let fam = imaginary(25);
        let m = moment_sum(&fam, 3, 1).unwrap();
        assert_eq!(m.report.family_count, 10);
        assert_eq!(m.report.moment_sum, "12");
        assert_eq!(m.report.ratio, "1.200000");
        let m = moment_sum(&fam, 2, 1).unwrap();
        assert_eq!(m.report.moment_sum, "13");
        let m = moment_sum(&fam, 1, 5).unwrap();
        assert_eq!(m.report.moment_sum, "10");
        assert!(moment_sum(&fam, 0, 1).is_err());
    }

    #[test]
    fn h3_max_eams() {
        assert_eq!(h3_max(22).unwrap(), 1);
        assert_eq!(h3_max(23).unwrap(), 3);
        assert_eq!(h3_max(3).unwrap(), 1);
    }

    #[test]
    fn exceptional_examples() {
        let fam = imaginary(100);
        let r = exceptional_set(&fam, 3, Rational::new(1, 2)).unwrap();
        assert!(r.members.is_empty());
        let fam = imaginary(25);
        let r = exceptional_set(&fam, 3, Rational::new_raw(0, 1)).unwrap();
        assert_eq!(r.members, vec![-23]);
        let fam = imaginary(1000);
        let r = exceptional_set(&fam, 2, Rational::new(2, 1)).unwrap();
        assert!(r.members.is_empty());
    }

    #[test]
    fn exceptional_monotone_in_delta() {
        let fam = imaginary(2000);
        let deltas = [
            Rational::new_raw(0, 1),
            Rational::new(1, 8),
            Rational::new(1, 4),
            Rational::new(1, 3),
            Rational::new(1, 2),
        ];
        let mut prev: Option<Vec<i64>> = None;
        for d in deltas {
            let r = exceptional_set(&fam, 3, d).unwrap();
            if let Some(p) = prev {
                for m in &r.members {
                    assert!(p.contains(m), "member {m} appeared at larger delta only");
                }
            }
            prev = Some(r.members);
        }
    }

    #[test]
    fn chebyshev_examples() {
        // f = 1 everywhere: no exceptions at delta = 1
        let vals: Vec<(u64, u64)> = (10..=20).map(|n| (n, 1)).collect();
        let v = chebyshev_check(&vals, Rational::new(1, 1), 3).unwrap();
        assert!(v.holds);
        assert_eq!(v.exceptional_count, 0);
        // spec worked example: A_R = [2,4], f = (5,1,1), delta = 1, p = 2
        let vals = vec![(2u64, 5u64), (3, 1), (4, 1)];
        let v = chebyshev_check(&vals, Rational::new(1, 1), 2).unwrap();
        assert!(v.holds && v.strict);
        assert_eq!(v.exceptional_count, 1);
        assert_eq!(v.lhs, "4");
        assert_eq!(v.rhs, "27");
    }

    #[test]
    fn chebyshev_on_real_family() {
        let fam = Family::sweep(FamilySpec::real_wide(), 100).unwrap();
        let vals: Vec<(u64, u64)> = fam
            .records
            .iter()
            .filter(|r| {
                let abs = r.d.unsigned_abs();
                (50..=100).contains(&abs)
            })
            .map(|r| (r.d.unsigned_abs(), r.torsion(3)))
            .collect();
        let v = chebyshev_check(&vals, Rational::new(1, 4), 3).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn dyadic_example_x25() {
        let fam = imaginary(25);
        let r = dyadic_bound_check(&fam, 3, 1, Rational::new_raw(0, 1)).unwrap();
        assert!(r.all_hold);
        assert!(r.partition_exact);
        // top block (12.5, 25]: exceptional = {-23}, family = {15,19,20,23,24}
        assert_eq!(r.blocks[0].family_in_block, 5);
        assert_eq!(r.blocks[0].exceptional_in_block, 1);
    }

    #[test]
    fn fk_examples() {
        let fam = imaginary(25);
        let m = fk_moment(&fam, 1).unwrap();
        assert_eq!(m.report.moment_sum, "10");
        // X = 100, k = 2: discriminants with a divisor divisible by 4
        // get weight 4, the rest weight 1
        let fam = imaginary(100);
        let weighted: Vec<i64> = fam
            .records
            .iter()
            .filter(|r| r.two_rank_doubled() > 0)
            .map(|r| r.d)
            .collect();
        assert_eq!(weighted, vec![-39, -55, -56, -68, -95]);
        let m = fk_moment(&fam, 2).unwrap();
        let expected = fam.count() - 5 + 5 * 4;
        assert_eq!(m.sum, BigUint::from(expected));
    }

    #[test]
    fn density_examples() {
        let fam = imaginary(22);
        let (num, den) = empirical_density(&fam, 3, &[]).unwrap();
        assert_eq!(num, den); // all trivial 3-Sylow below 23
        assert_eq!(den, 8);
        let fam = imaginary(25);
        let (num, den) = empirical_density(&fam, 3, &[1]).unwrap();
        assert_eq!((num, den), (1, 10)); // only -23
        let fam = imaginary(40);
        let (num, den) = empirical_density(&fam, 5, &[]).unwrap();
        assert_eq!(num, den);
        assert!(empirical_density(&fam, 4, &[]).is_err());
        assert!(empirical_density(&fam, 2, &[]).is_err());
    }

    #[test]
    fn moment_monotone() {
        let f1 = imaginary(300);
        let f2 = imaginary(600);
        for ell in [2u64, 3, 5] {
            for k in [1u32, 2, 3] {
                let a = moment_sum(&f1, ell, k).unwrap().sum;
                let b = moment_sum(&f2, ell, k).unwrap().sum;
                assert!(a <= b);
                let c = moment_sum(&f2, ell, k + 1).unwrap().sum;
                assert!(b <= c);
                let d = moment_sum(&f2, ell * 2, k).unwrap().sum;
                assert!(b <= d);
            }
        }
    }
}
