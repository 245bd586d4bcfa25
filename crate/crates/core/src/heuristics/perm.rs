//! Permutation groups, Malle indices and exponents, rational class functions
//! and f-discriminants.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type Rational = num_rational::Ratio<u64>;

/// Permutation in image form: perm[i] is the image of point i (0-based).
pub type Perm = Vec<u8>;

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct PermGroupSpec {
    pub degree: usize,
    pub generators: Vec<Perm>,
}

fn identity(n: usize) -> Perm {
    (0..n as u8).collect()
}

fn compose_perm(f: &Perm, g: &Perm) -> Perm {
    // (f * g)(x) = f(g(x))
    g.iter().map(|&x| f[x as usize]).collect()
}

fn invert_perm(f: &Perm) -> Perm {
    let mut out = vec![0u8; f.len()];
    for (i, &fi) in f.iter().enumerate() {
        out[fi as usize] = i as u8;
    }
    out
}

impl PermGroupSpec {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        if degree == 0 || degree > 64 {
            return Err(Error::invalid("degree must be in 1..=64"));
        }
        for g in &generators {
            if g.len() != degree {
                return Err(Error::invalid("generator degree mismatch"));
            }
            let mut seen = vec![false; degree];
            for &x in g {
                if (x as usize) >= degree || seen[x as usize] {
                    return Err(Error::invalid("not a permutation"));
                }
                seen[x as usize] = true;
            }
        }
        Ok(PermGroupSpec { degree, generators })
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut t = identity(n);
            t.swap(0, 1);
            gens.push(t);
        }
        if n >= 3 {
            let cycle: Perm = (0..n).map(|i| ((i + 1) % n) as u8).collect();
            gens.push(cycle);
        }
        PermGroupSpec {
            degree: n,
            generators: gens,
        }
    }

    pub fn cyclic(n: usize) -> Self {
        let cycle: Perm = (0..n).map(|i| ((i + 1) % n) as u8).collect();
        PermGroupSpec {
            degree: n,
            generators: vec![cycle],
        }
    }

    pub fn alternating(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 3 {
            let mut c3 = identity(n);
            c3[0] = 1;
            c3[1] = 2;
            c3[2] = 0;
            gens.push(c3);
            if n > 3 {
                let cycle: Perm = if n % 2 == 1 {
                    (0..n).map(|i| ((i + 1) % n) as u8).collect()
                } else {
                    // (1 2 ... n-1) fixing 0
                    let mut c = identity(n);
                    for i in 1..n {
                        c[i] = (1 + (i % (n - 1))) as u8;
                    }
                    c
                };
                gens.push(cycle);
            }
        }
        PermGroupSpec {
            degree: n,
            generators: gens,
        }
    }

    /// Full element closure; errors with resource-limit beyond the cap.
    pub fn elements(&self, cap: usize) -> Result<Vec<Perm>> {
        let mut seen: BTreeSet<Perm> = BTreeSet::new();
        let id = identity(self.degree);
        seen.insert(id.clone());
        let mut queue = VecDeque::new();
        queue.push_back(id);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = compose_perm(g, &p);
                if seen.insert(q.clone()) {
                    if seen.len() > cap {
                        return Err(Error::limit(format!(
                            "group closure exceeded cap of {cap} elements"
                        )));
                    }
                    queue.push_back(q);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.degree];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                for h in [g.clone(), invert_perm(g)] {
                    let y = h[x] as usize;
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        seen.into_iter().all(|b| b)
    }
}

/// ind(g) = degree minus the number of orbits of g.
pub fn malle_index(g: &Perm) -> u32 {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut orbits = 0u32;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        orbits += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = g[x] as usize;
        }
    }
    n as u32 - orbits
}

fn cycle_type(g: &Perm) -> Vec<u32> {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut lens = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u32;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = g[x] as usize;
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    /// canonical label: cycle type joined by '.', with a/b/c suffixes when
    /// several classes share a type (ordered by minimal member)
    pub label: String,
    pub rep: Perm,
    pub size: usize,
    pub is_identity: bool,
    pub index: u32,
}

/// Conjugacy classes of the generated group, deterministically labeled.
pub fn conjugacy_classes(spec: &PermGroupSpec, cap: usize) -> Result<Vec<ConjugacyClass>> {
    let elems = spec.elements(cap)?;
    let mut remaining: BTreeSet<Perm> = elems.iter().cloned().collect();
    let mut classes: Vec<(Perm, Vec<Perm>)> = Vec::new();
    while let Some(seed) = remaining.iter().next().cloned() {
        // conjugation orbit under the generators
        let mut orbit: BTreeSet<Perm> = BTreeSet::new();
        orbit.insert(seed.clone());
        let mut queue = VecDeque::from([seed]);
        while let Some(x) = queue.pop_front() {
            for g in &spec.generators {
                let gi = invert_perm(g);
                let y = compose_perm(g, &compose_perm(&x, &gi));
                if orbit.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        for m in &orbit {
            remaining.remove(m);
        }
        let rep = orbit.iter().next().cloned().expect("nonempty orbit");
        classes.push((rep, orbit.into_iter().collect()));
    }
    classes.sort_by_key(|(rep, _)| rep.clone());
    // group by cycle type for labeling
    let mut by_type: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (i, (rep, _)) in classes.iter().enumerate() {
        by_type.entry(cycle_type(rep)).or_default().push(i);
    }
    let id = identity(spec.degree);
    let mut out: Vec<ConjugacyClass> = vec![];
    for (ty, idxs) in by_type {
        let base = ty
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(".");
        for (j, &i) in idxs.iter().enumerate() {
            let label = if idxs.len() == 1 {
                base.clone()
            } else {
                format!("{base}{}", (b'a' + j as u8) as char)
            };
            let (rep, members) = &classes[i];
            out.push(ConjugacyClass {
                label,
                rep: rep.clone(),
                size: members.len(),
                is_identity: *rep == id,
                index: malle_index(rep),
            });
        }
    }
    out.sort_by(|a, b| a.rep.cmp(&b.rep));
    Ok(out)
}

/// a_G = 1 / min{ ind(g) : g != id } for a transitive group.
pub fn malle_exponent(spec: &PermGroupSpec, cap: usize) -> Result<Rational> {
    if !spec.is_transitive() {
        return Err(Error::invalid("malle_exponent requires a transitive group"));
    }
    let elems = spec.elements(cap)?;
    let id = identity(spec.degree);
    let min_ind = elems
        .iter()
        .filter(|g| **g != id)
        .map(|g| malle_index(g))
        .min()
        .ok_or_else(|| Error::invalid("trivial group has no nontrivial index"))?;
    Ok(Rational::new(1, min_ind as u64))
}

/// Nonnegative integer class function on the nontrivial classes of a group;
/// zero values are rejected (only the identity may sit at zero).
#[derive(Debug, Clone)]
pub struct ClassFunction {
    pub values: BTreeMap<String, u64>,
}

impl ClassFunction {
    pub fn from_map(values: BTreeMap<String, u64>) -> Self {
        ClassFunction { values }
    }

    /// One `label=value` pair per line; '#' comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("line {}: expected label=value", i + 1)))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("line {}: bad value", i + 1)))?;
            values.insert(k.trim().to_string(), v);
        }
        Ok(ClassFunction { values })
    }

    /// Constant function c on every nontrivial class.
    pub fn constant(classes: &[ConjugacyClass], c: u64) -> Self {
        let values = classes
            .iter()
            .filter(|cl| !cl.is_identity)
            .map(|cl| (cl.label.clone(), c))
            .collect();
        ClassFunction { values }
    }

    /// The Malle index as a class function.
    pub fn index_function(classes: &[ConjugacyClass]) -> Self {
        let values = classes
            .iter()
            .filter(|cl| !cl.is_identity)
            .map(|cl| (cl.label.clone(), cl.index as u64))
            .collect();
        ClassFunction { values }
    }

    fn value_on(&self, label: &str) -> Result<u64> {
        match self.values.get(label) {
            Some(0) | None => Err(Error::invalid(format!(
                "class function must be positive on nontrivial class {label}"
            ))),
            Some(v) => Ok(*v),
        }
    }
}

/// a_G(f) = max over nontrivial classes of 1/f(c).
pub fn generalized_malle_exponent(
    spec: &PermGroupSpec,
    f: &ClassFunction,
    cap: usize,
) -> Result<Rational> {
    let classes = conjugacy_classes(spec, cap)?;
    let mut min_val: Option<u64> = None;
    for cl in classes.iter().filter(|c| !c.is_identity) {
        let v = f.value_on(&cl.label)?;
        min_val = Some(min_val.map_or(v, |m| m.min(v)));
    }
    let m = min_val.ok_or_else(|| Error::invalid("group has no nontrivial class"))?;
    Ok(Rational::new(1, m))
}

/// D_f(L) = prod over the profile of p^{f(c_p)}; primes must be distinct and
/// coprime to |G|.
pub fn f_discriminant(
    spec: &PermGroupSpec,
    f: &ClassFunction,
    profile: &[(u64, String)],
    cap: usize,
) -> Result<BigUint> {
    let order = spec.elements(cap)?.len() as u64;
    let mut seen = BTreeSet::new();
    let mut out = BigUint::from(1u32);
    for (p, label) in profile {
        if !crate::arith::is_prime_u64(*p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if order % p == 0 {
            return Err(Error::invalid(format!("prime {p} divides |G| = {order}")));
        }
        if !seen.insert(*p) {
            return Err(Error::invalid(format!("repeated prime {p}")));
        }
        let e = f.value_on(label)?;
        out *= BigUint::from(*p).pow(e as u32);
    }
    Ok(out)
}
