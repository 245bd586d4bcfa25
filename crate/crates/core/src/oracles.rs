//! Brute-force reference computations used by the test suites.
//!
//! Everything here is deliberately independent of the main implementation
//! paths: subspaces are enumerated as explicit sets, automorphisms counted by
//! exhaustion, and class numbers recomputed from the character sum formula.

use std::collections::{BTreeSet, VecDeque};

/// Number of subspaces of F_ell^k by explicit closure enumeration.
pub fn subspaces_brute(ell: u64, k: u32) -> u64 {
    let ell = ell as usize;
    let n = ell.pow(k);
    let add = |a: usize, b: usize| -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut mult = 1usize;
        for _ in 0..k {
            out += ((a % ell + b % ell) % ell) * mult;
            a /= ell;
            b /= ell;
            mult *= ell;
        }
        out
    };
    // projective representatives: leading nonzero digit equals 1
    let projective: Vec<usize> = (1..n)
        .filter(|&v| {
            let mut v = v;
            let mut lead = 0;
            while v > 0 {
                lead = v % ell;
                v /= ell;
            }
            lead == 1
        })
        .collect();
    let zero_space: Vec<usize> = vec![0];
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    all.insert(zero_space.clone());
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    queue.push_back(zero_space);
    while let Some(sp) = queue.pop_front() {
        for &v in &projective {
            if sp.binary_search(&v).is_ok() {
                continue;
            }
            // sp is a subspace, so span(sp, v) = { s + j v }
            let mut bigger = BTreeSet::new();
            let mut jv = 0usize;
            for _ in 0..ell {
                for s in &sp {
                    bigger.insert(add(*s, jv));
                }
                jv = add(jv, v);
            }
            let bigger: Vec<usize> = bigger.into_iter().collect();
            if all.insert(bigger.clone()) {
                queue.push_back(bigger);
            }
        }
    }
    all.len() as u64
}

/// |Aut| of the abelian p-group with the given partition, by exhausting
/// generator images and checking bijectivity.
pub fn aut_brute(p: u64, partition: &[u32]) -> u64 {
    let moduli: Vec<u64> = partition.iter().map(|l| p.pow(*l)).collect();
    let n = moduli.len();
    if n == 0 {
        return 1;
    }
    let total: u64 = moduli.iter().product();
    let mut elems: Vec<Vec<u64>> = vec![vec![]];
    for m in &moduli {
        let mut next = Vec::new();
        for e in &elems {
            for r in 0..*m {
                let mut v = e.clone();
                v.push(r);
                next.push(v);
            }
        }
        elems = next;
    }
    let killed_by = |v: &[u64], e: u32| -> bool {
        v.iter().zip(&moduli).all(|(x, m)| {
            ((*x as u128 * p.pow(e) as u128) % *m as u128) == 0
        })
    };
    let mut count = 0u64;
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(images) = stack.pop() {
        if images.len() == n {
            // surjectivity: span of the images
            let mut seen = BTreeSet::new();
            seen.insert(vec![0u64; n]);
            let mut frontier: Vec<Vec<u64>> = vec![vec![0u64; n]];
            while let Some(v) = frontier.pop() {
                for img in images.iter().map(|&ix| &elems[ix]) {
                    let w: Vec<u64> = v
                        .iter()
                        .zip(img)
                        .zip(&moduli)
                        .map(|((a, b), m)| (a + b) % m)
                        .collect();
                    if seen.insert(w.clone()) {
                        frontier.push(w);
                    }
                }
            }
            if seen.len() as u64 == total {
                count += 1;
            }
            continue;
        }
        let i = images.len();
        for (ix, v) in elems.iter().enumerate() {
            if killed_by(v, partition[i]) {
                let mut next = images.clone();
                next.push(ix);
                stack.push(next);
            }
        }
    }
    count
}

/// Class number of an imaginary quadratic field by Dirichlet's formula,
/// h(D) = |sum_{a=1}^{|D|-1} chi_D(a) a| / |D| for fundamental D < -4.
/// Independent of the form-counting route.
pub fn class_number_dirichlet(d: i64) -> u64 {
    assert!(d < -4, "formula stated for D < -4");
    let abs = d.unsigned_abs();
    let mut sum: i128 = 0;
    for a in 1..abs {
        sum += crate::arith::kronecker_symbol(d, a) as i128 * a as i128;
    }
    (sum.unsigned_abs() / abs as u128) as u64
}

/// Trial-division factorization, the reference for the fast path.
pub fn factor_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d as u128 * d as u128 <= n as u128 {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_matches_forms() {
        for d in crate::arith::fundamental_discriminants(5, 300, crate::arith::Sign::Negative)
            .unwrap()
        {
            if d >= -4 {
                continue;
            }
            let h = crate::classgroup::class_group(d).unwrap().h;
            assert_eq!(class_number_dirichlet(d), h, "D = {d}");
        }
    }
}
