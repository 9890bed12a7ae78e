//! Multiplicative semigroups of integers generated by a finite set:
//! strictly increasing enumeration, counting, density profiles, and the
//! lacunarity decision.
//!
//! The semigroup consists of *nonempty* products only, so 1 is never a
//! member. Counts therefore differ by one from monoid conventions.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted, distinct generators, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    gens: Vec<u64>,
}

impl GeneratorSet {
    pub fn new(mut gens: Vec<u64>) -> Result<Self> {
        gens.sort_unstable();
        gens.dedup();
        if gens.is_empty() {
            return Err(Error::InvalidArgument("generator set is empty".into()));
        }
        if gens[0] < 2 {
            return Err(Error::InvalidArgument(format!(
                "generators must be >= 2, got {}",
                gens[0]
            )));
        }
        Ok(GeneratorSet { gens })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let gens = s
            .split(',')
            .map(|t| {
                t.trim().parse::<u64>().map_err(|e| Error::Parse {
                    rule: "generator list",
                    msg: format!("{t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GeneratorSet::new(gens)
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }
}

impl std::fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

/// Strictly increasing stream of all nonempty generator products up to a
/// bound, driven by a min-priority frontier. Memory scales with the output
/// count, not with the bound.
pub struct SemigroupStream {
    gens: Vec<u64>,
    limit: u64,
    frontier: BinaryHeap<Reverse<u64>>,
    pending: HashSet<u64>,
    last: u64,
}

impl SemigroupStream {
    fn new(gens: &GeneratorSet, limit: u64) -> Self {
        let mut frontier = BinaryHeap::new();
        let mut pending = HashSet::new();
        for &g in gens.generators() {
            if g <= limit && pending.insert(g) {
                frontier.push(Reverse(g));
            }
        }
        SemigroupStream {
            gens: gens.generators().to_vec(),
            limit,
            frontier,
            pending,
            last: 0,
        }
    }
}

impl Iterator for SemigroupStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let Reverse(v) = self.frontier.pop()?;
        self.pending.remove(&v);
        debug_assert!(v > self.last, "stream must be strictly increasing");
        self.last = v;
        for &g in &self.gens {
            // u128 product guards against overflow before the bound check.
            let prod = v as u128 * g as u128;
            if prod > self.limit as u128 {
                break; // generators are sorted ascending
            }
            let prod = prod as u64;
            if self.pending.insert(prod) {
                self.frontier.push(Reverse(prod));
            }
        }
        Some(v)
    }
}

/// All nonempty products of the generators that are `<= limit`, ascending.
pub fn enumerate_up_to(gens: &GeneratorSet, limit: u64) -> SemigroupStream {
    SemigroupStream::new(gens, limit)
}

/// `#(Sigma ∩ [1, N])`.
pub fn count_up_to(gens: &GeneratorSet, limit: u64) -> u64 {
    enumerate_up_to(gens, limit).count() as u64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityCheckpoint {
    pub n: u64,
    pub count: u64,
    /// count / N
    pub density: f64,
    /// log(count) / log(N); 0 with `empty` set when the count is 0.
    pub log_density: f64,
    pub empty: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub checkpoints: Vec<DensityCheckpoint>,
    /// Empirical slope of log(count) against log(N) over the last half of
    /// the checkpoints. A finite-data observable, not the hypothesis
    /// exponent of the density assumption.
    pub density_exponent: Option<f64>,
}

pub fn density_profile(gens: &GeneratorSet, checkpoints: &[u64]) -> Result<DensityReport> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints.is_empty() {
        return Err(Error::InvalidArgument(
            "checkpoints must be nonempty and strictly ascending".into(),
        ));
    }
    let max = *checkpoints.last().unwrap();
    let mut counts = vec![0u64; checkpoints.len()];
    let mut idx = 0usize;
    let mut running = 0u64;
    for v in enumerate_up_to(gens, max) {
        while idx < checkpoints.len() && v > checkpoints[idx] {
            counts[idx] = running;
            idx += 1;
        }
        running += 1;
    }
    for c in counts.iter_mut().skip(idx) {
        *c = running;
    }
    let cps: Vec<DensityCheckpoint> = checkpoints
        .iter()
        .zip(&counts)
        .map(|(&n, &count)| {
            let empty = count == 0;
            DensityCheckpoint {
                n,
                count,
                density: count as f64 / n as f64,
                log_density: if empty || n <= 1 {
                    0.0
                } else {
                    (count as f64).ln() / (n as f64).ln()
                },
                empty,
            }
        })
        .collect();
    // Least-squares slope over the last half of the checkpoints.
    let tail = &cps[cps.len() / 2..];
    let density_exponent = if tail.len() >= 2 && tail.iter().all(|c| !c.empty) {
        let xs: Vec<f64> = tail.iter().map(|c| (c.n as f64).ln()).collect();
        let ys: Vec<f64> = tail.iter().map(|c| (c.count as f64).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 {
            Some(sxy / sxx)
        } else {
            None
        }
    } else {
        None
    };
    Ok(DensityReport {
        checkpoints: cps,
        density_exponent,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LacunarityResult {
    pub lacunary: bool,
    /// Smallest integer a >= 2 with every generator an exact power of a.
    pub witness: Option<u64>,
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p as u128 * p as u128 <= n as u128 {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Decide whether the generated semigroup is contained in the powers of a
/// single integer. Works on the prime exponent vectors: lacunary exactly
/// when all vectors are integer multiples of one primitive vector, and the
/// smallest witness is the integer with that primitive vector as exponents.
pub fn is_lacunary(gens: &GeneratorSet) -> LacunarityResult {
    let factored: Vec<Vec<(u64, u32)>> =
        gens.generators().iter().map(|&g| factorize(g)).collect();
    let support = &factored[0];
    // All generators must share the same prime support.
    for f in &factored[1..] {
        if f.len() != support.len() || f.iter().zip(support).any(|(a, b)| a.0 != b.0) {
            return LacunarityResult {
                lacunary: false,
                witness: None,
            };
        }
    }
    // All exponent vectors must be parallel to the first.
    let v0: Vec<u32> = support.iter().map(|&(_, e)| e).collect();
    for f in &factored[1..] {
        let v: Vec<u32> = f.iter().map(|&(_, e)| e).collect();
        for j in 1..v.len() {
            if v[j] as u64 * v0[0] as u64 != v[0] as u64 * v0[j] as u64 {
                return LacunarityResult {
                    lacunary: false,
                    witness: None,
                };
            }
        }
    }
    // Primitive direction of v0.
    let g0 = v0.iter().fold(0u64, |acc, &e| gcd(acc, e as u64)) as u32;
    let w: Vec<u32> = v0.iter().map(|&e| e / g0).collect();
    // Every vector must be an integer multiple of w.
    for f in &factored {
        let m = f[0].1 / w[0];
        if f[0].1 % w[0] != 0 || f.iter().zip(&w).any(|(&(_, e), &we)| e != m * we) {
            return LacunarityResult {
                lacunary: false,
                witness: None,
            };
        }
    }
    let mut witness: u64 = 1;
    for (&(p, _), &we) in support.iter().zip(&w) {
        witness = witness.saturating_mul(p.pow(we));
    }
    LacunarityResult {
        lacunary: true,
        witness: Some(witness),
    }
}

/// Whether n is a nonempty product of generators, by memoized recursive
/// division.
pub fn contains(gens: &GeneratorSet, n: u64) -> bool {
    fn go(gens: &[u64], n: u64, memo: &mut HashMap<u64, bool>) -> bool {
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let mut found = false;
        for &g in gens {
            if g > n {
                break;
            }
            if n % g == 0 && (n == g || go(gens, n / g, memo)) {
                found = true;
                break;
            }
        }
        memo.insert(n, found);
        found
    }
    if n < 2 {
        return false;
    }
    go(gens.generators(), n, &mut HashMap::new())
}
