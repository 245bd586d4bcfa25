//! Structure of a finite abelian group presented by a complete list of
//! canonical class representatives plus a multiplication rule.
//!
//! Elementary divisors come from a Sylow-by-Sylow basis extraction; discrete
//! logarithms use baby-step giant-step along the largest cyclic factor.

use super::form::Form;
use crate::arith::factor_u64;
use std::collections::HashMap;

pub trait ClassOps {
    fn id(&self) -> Form;
    fn mul(&self, x: &Form, y: &Form) -> Form;
    fn inv(&self, x: &Form) -> Form;
}

pub fn pow_elem(ops: &dyn ClassOps, x: &Form, e: u64) -> Form {
    let mut acc = ops.id();
    let mut base = *x;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = ops.mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = ops.mul(&base, &base);
        }
    }
    acc
}

/// Ambient group modulo the cyclic subgroup whose full power list is `cosets`.
/// Class representative = minimum of the coset.
struct QuotientOps<'a> {
    inner: &'a dyn ClassOps,
    cosets: &'a [Form],
}

impl QuotientOps<'_> {
    fn rep(&self, x: &Form) -> Form {
        self.cosets
            .iter()
            .map(|t| self.inner.mul(x, t))
            .min()
            .expect("nonempty coset")
    }
}

impl ClassOps for QuotientOps<'_> {
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

fn order_exponent(ops: &dyn ClassOps, x: &Form, p: u64) -> u32 {
    let id = ops.id();
    let mut y = *x;
    let mut j = 0;
    while y != id {
        y = pow_elem(ops, &y, p);
        j += 1;
        debug_assert!(j <= 64);
    }
    j
}

/// Basis of an abelian p-group given all of its elements.
/// Returns (generator, lambda) pairs with p^lambda the generator order,
/// lambdas nonincreasing, direct sum spanning the group.
pub fn p_basis(ops: &dyn ClassOps, elems: &[Form], p: u64) -> Vec<(Form, u32)> {
    if elems.len() == 1 {
        return vec![];
    }
    let id = ops.id();
    let mut x1 = id;
    let mut l1 = 0u32;
    for x in elems {
        let j = order_exponent(ops, x, p);
        if j > l1 || (j == l1 && *x < x1) {
            x1 = *x;
            l1 = j;
        }
    }
    let ord1 = p.pow(l1);
    if ord1 == elems.len() as u64 {
        return vec![(x1, l1)];
    }
    let mut powers = Vec::with_capacity(ord1 as usize);
    powers.push(id);
    for i in 1..ord1 as usize {
        powers.push(ops.mul(&powers[i - 1], &x1));
    }
    let q = QuotientOps {
        inner: ops,
        cosets: &powers,
    };
    let mut qelems: Vec<Form> = elems.iter().map(|y| q.rep(y)).collect();
    qelems.sort_unstable();
    qelems.dedup();
    debug_assert_eq!(qelems.len() as u64 * ord1, elems.len() as u64);
    let sub = p_basis(&q, &qelems, p);
    let x1_inv = ops.inv(&x1);
    let mut basis = vec![(x1, l1)];
    for (ybar, m) in sub {
        // lift: ybar^(p^m) lands in <x1>; divide that power back out
        let pm = p.pow(m);
        let w = pow_elem(ops, &ybar, pm);
        let c = powers
            .iter()
            .position(|t| *t == w)
            .expect("power must lie in the pivot subgroup") as u64;
        debug_assert_eq!(c % pm, 0, "lift exponent not divisible");
        let z = ops.mul(&ybar, &pow_elem(ops, &x1_inv, c / pm));
        debug_assert_eq!(order_exponent(ops, &z, p), m);
        basis.push((z, m));
    }
    basis.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    basis
}

fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> (u64, u64) {
    // moduli coprime
    let (g, x, _) = super::form::xgcd(m1 as i128, m2 as i128);
    debug_assert_eq!(g, 1);
    let m = m1 as u128 * m2 as u128;
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128);
    let t = (diff * x).rem_euclid(m2 as i128) as u128;
    let r = (r1 as u128 + m1 as u128 * t) % m;
    (r as u64, m as u64)
}

struct SylowBlock {
    p: u64,
    e: u32,
    /// exponent that projects the full group onto this Sylow subgroup
    crt_exp: u64,
    /// (generator, lambda), lambdas nonincreasing
    basis: Vec<(Form, u32)>,
    /// BSGS tables, built lazily
    baby: HashMap<Form, Vec<u64>>,
    giant_inv: Form,
    baby_span: u64,
}

impl SylowBlock {
    fn build_tables(&mut self, ops: &dyn ClassOps) {
        let ord1 = self.p.pow(self.basis[0].1);
        let m1 = (ord1 as f64).sqrt().ceil() as u64;
        // baby table: first coordinate restricted below m1, the rest full range
        let mut keys = vec![ops.id()];
        let mut vals: Vec<Vec<u64>> = vec![vec![]];
        for (i, (g, lam)) in self.basis.iter().enumerate() {
            let range = if i == 0 { m1 } else { self.p.pow(*lam) };
            let mut nkeys = Vec::with_capacity(keys.len() * range as usize);
            let mut nvals = Vec::with_capacity(vals.len() * range as usize);
            let mut gp = ops.id();
            for j in 0..range {
                for (k, v) in keys.iter().zip(vals.iter()) {
                    nkeys.push(ops.mul(k, &gp));
                    let mut nv = v.clone();
                    nv.insert(0, j);
                    nvals.push(nv);
                }
                if j + 1 < range {
                    gp = ops.mul(&gp, g);
                }
            }
            keys = nkeys;
            vals = nvals;
        }
        // vals currently have coordinates reversed relative to basis order
        self.baby = keys
            .into_iter()
            .zip(vals.into_iter().map(|mut v| {
                v.reverse();
                v
            }))
            .collect();
        self.giant_inv = pow_elem(ops, &ops.inv(&self.basis[0].0), m1);
        self.baby_span = m1;
    }

    fn dlog(&self, ops: &dyn ClassOps, x: &Form) -> Vec<u64> {
        let ord1 = self.p.pow(self.basis[0].1);
        let giants = ord1.div_ceil(self.baby_span);
        let mut y = *x;
        for j in 0..giants {
            if let Some(t) = self.baby.get(&y) {
                let mut coords = t.clone();
                coords[0] = (coords[0] + j * self.baby_span) % ord1;
                return coords;
            }
            y = ops.mul(&y, &self.giant_inv);
        }
        panic!("element not in Sylow subgroup");
    }
}

/// Elementary divisors, generators, and discrete logarithms for a finite
/// abelian group listed by canonical representatives.
pub struct AbelianStructure {
    pub h: u64,
    /// ascending chain d1 | d2 | ... | dt, each >= 2
    pub divisors: Vec<u64>,
    /// generators[i] has order divisors[i]
    pub generators: Vec<Form>,
    blocks: Vec<SylowBlock>,
}

impl AbelianStructure {
    pub fn compute(elems: &[Form], ops: &dyn ClassOps) -> Self {
        Self::compute_inner(elems, ops, true)
    }

    /// Divisors only; skips the BSGS tables.
    pub fn divisors_only(elems: &[Form], ops: &dyn ClassOps) -> Self {
        Self::compute_inner(elems, ops, false)
    }

    fn compute_inner(elems: &[Form], ops: &dyn ClassOps, with_tables: bool) -> Self {
        let h = elems.len() as u64;
        let mut blocks: Vec<SylowBlock> = Vec::new();
        if h > 1 {
            for (p, e) in factor_u64(h) {
                let pe = p.pow(e);
                let m = h / pe;
                // exponent projecting G onto the Sylow p-part: = 1 mod p^e, 0 mod m
                let crt_exp = if m == 1 {
                    1
                } else {
                    let (g, x, _) = super::form::xgcd(m as i128, pe as i128);
                    debug_assert_eq!(g, 1);
                    (m as i128 * x.rem_euclid(pe as i128)) as u64
                };
                let basis = if e == 1 {
                    // Sylow subgroup is Z/p: take any projected non-identity
                    let id = ops.id();
                    let gen = elems
                        .iter()
                        .map(|x| pow_elem(ops, x, m))
                        .find(|y| *y != id)
                        .expect("order-p element exists");
                    vec![(gen, 1u32)]
                } else {
                    let mut sp: Vec<Form> =
                        elems.iter().map(|x| pow_elem(ops, x, crt_exp)).collect();
                    sp.sort_unstable();
                    sp.dedup();
                    debug_assert_eq!(sp.len() as u64, pe);
                    p_basis(ops, &sp, p)
                };
                blocks.push(SylowBlock {
                    p,
                    e,
                    crt_exp,
                    basis,
                    baby: HashMap::new(),
                    giant_inv: ops.id(),
                    baby_span: 0,
                });
            }
        }
        // combine per-prime partitions into an elementary divisor chain
        let t = blocks.iter().map(|b| b.basis.len()).max().unwrap_or(0);
        let mut desc: Vec<(u64, Form)> = Vec::new();
        for i in 0..t {
            let mut d = 1u64;
            let mut g = ops.id();
            for b in &blocks {
                if let Some((gen, lam)) = b.basis.get(i) {
                    d *= b.p.pow(*lam);
                    g = ops.mul(&g, gen);
                }
            }
            desc.push((d, g));
        }
        desc.reverse();
        let divisors: Vec<u64> = desc.iter().map(|(d, _)| *d).collect();
        let generators: Vec<Form> = desc.iter().map(|(_, g)| *g).collect();
        debug_assert_eq!(divisors.iter().product::<u64>().max(1), h);
        if with_tables {
            for b in &mut blocks {
                if !b.basis.is_empty() {
                    b.build_tables(ops);
                }
            }
        }
        AbelianStructure {
            h,
            divisors,
            generators,
            blocks,
        }
    }

    /// Coordinates of x with respect to `generators`: x = prod g_i^{r_i}.
    pub fn dlog(&self, ops: &dyn ClassOps, x: &Form) -> Vec<u64> {
        let t = self.divisors.len();
        let mut coords = vec![(0u64, 1u64); t]; // (residue, modulus)
        for b in &self.blocks {
            let xp = pow_elem(ops, x, b.crt_exp);
            let s = b.dlog(ops, &xp);
            // basis index i (descending lambda) pairs with divisor index t-1-i
            for (i, &si) in s.iter().enumerate() {
                let j = t - 1 - i;
                let modulus = b.p.pow(b.basis[i].1);
                let (r, m) = crt_pair(coords[j].0, coords[j].1, si, modulus);
                coords[j] = (r, m);
            }
        }
        coords
            .into_iter()
            .enumerate()
            .map(|(j, (r, m))| {
                debug_assert_eq!(m, self.divisors[j]);
                r
            })
            .collect()
    }

    /// Largest prime-power breakdown used by tests.
    pub fn sylow_partition(&self, p: u64) -> Vec<u32> {
        self.blocks
            .iter()
            .find(|b| b.p == p)
            .map(|b| b.basis.iter().map(|(_, l)| *l).collect())
            .unwrap_or_default()
    }

    pub fn sylow_exponent(&self, p: u64) -> u32 {
        self.blocks
            .iter()
            .find(|b| b.p == p)
            .map(|b| b.e)
            .unwrap_or(0)
    }
}
