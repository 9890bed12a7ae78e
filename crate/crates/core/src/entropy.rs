//! p-adic partitions, the information function, SMB entropy-rate
//! estimation, and the zero-dimension ball-mass scan.
//!
//! All mass comparisons are exact: cell masses are rationals, and
//! `mass > delta^beta` with rational beta = a/b is decided as
//! `mass^b > delta^a`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{ln_rat, rat_pow, rat_string, reduce_mod1, Arc, Rational, TorusPoint};
use crate::error::{Error, Result};
use crate::measure::{self, arc_mass, MeasureModel};

/// One cell of the refined p-adic partition: `(index/p^n, (index+1)/p^n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicCell {
    pub base: u64,
    pub depth: u32,
    pub index: BigUint,
    pub arc: Arc,
}

/// The unique depth-n cell whose half-open arc contains x. Under the
/// left-open convention the index is `ceil(x*p^n) - 1`, with the coset of 0
/// living in the last cell.
pub fn padic_cell(x: &TorusPoint, p: u64, n: u32) -> PadicCell {
    assert!(p >= 2 && n >= 1);
    let pn = BigUint::from(p).pow(n);
    let scaled = x.value() * Rational::from_integer(BigInt::from(pn.clone()));
    let ceil = scaled.ceil();
    let k = (ceil.numer() / ceil.denom()).to_biguint().unwrap();
    let index = if k.is_zero() { &pn - 1u32 } else { k - 1u32 };
    let len = Rational::new(BigInt::one(), BigInt::from(pn));
    let start = reduce_mod1(&(&len * Rational::from_integer(BigInt::from(index.clone()))));
    PadicCell {
        base: p,
        depth: n,
        index,
        arc: Arc::new(start, len).unwrap(),
    }
}

/// `(1/n) * I_mu` at a point: minus log of the containing cell's mass over n.
/// A zero-mass cell is reported as an infinite value, flagged, not an error.
#[derive(Debug, Clone)]
pub struct InformationSample {
    pub point: TorusPoint,
    pub depth: u32,
    pub cell_mass: Rational,
    pub value: f64,
    pub infinite: bool,
}

pub fn information_value(
    mu: &MeasureModel,
    x: &TorusPoint,
    p: u64,
    n: u32,
) -> Result<InformationSample> {
    let cell = padic_cell(x, p, n);
    let mass = arc_mass(mu, &cell.arc)?;
    let (value, infinite) = if mass.is_zero() {
        (f64::INFINITY, true)
    } else {
        (-ln_rat(&mass) / n as f64, false)
    };
    Ok(InformationSample {
        point: x.clone(),
        depth: n,
        cell_mass: mass,
        value,
        infinite,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmbEstimate {
    pub p: u64,
    pub depth: u32,
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
    /// Exact zero spread: every sampled cell had the same mass.
    pub degenerate: bool,
    pub analytic: Option<f64>,
    /// Points drawn from the measure can never land in a zero-mass cell;
    /// a nonzero count indicates a model bug.
    pub infinite_count: u64,
}

/// Mean single-scale information value over points sampled from the measure.
pub fn smb_estimate(
    mu: &MeasureModel,
    p: u64,
    n: u32,
    sample_count: u64,
    seed: u64,
) -> Result<SmbEstimate> {
    if n < 1 || sample_count < 1 {
        return Err(Error::InvalidArgument("smb_estimate needs n >= 1 and samples >= 1".into()));
    }
    // Lebesgue is the uniform digit model in base p; sampling it that way
    // makes every sampled cell mass exactly p^-n.
    let sampling_model: MeasureModel;
    let mu_eff = match mu {
        MeasureModel::Lebesgue => {
            let u = Rational::new(BigInt::one(), BigInt::from(p));
            sampling_model = MeasureModel::digit_bernoulli(
                p as u32,
                vec![u; p as usize],
            )?;
            &sampling_model
        }
        other => other,
    };
    let digit_direct = matches!(mu_eff, MeasureModel::DigitBernoulli { base, .. } if *base as u64 == p);
    // When cells cannot be read off the drawn digits, sample deep enough
    // that the truncated point is far inside its depth-n cell.
    let depth = if digit_direct {
        n
    } else {
        let ratio = (p as f64).ln() / base_of(mu_eff).map(|b| (b as f64).ln()).unwrap_or(1.0);
        (n as f64 * ratio).ceil() as u32 + 32
    };

    let mut masses: Vec<Rational> = Vec::with_capacity(sample_count as usize);
    let mut infinite_count = 0u64;
    for i in 0..sample_count {
        let sample = measure::draw_sample(mu_eff, &mut measure::rng_for(seed, i), depth);
        let mass = match (&sample.digits, mu_eff) {
            (Some((base, digits)), MeasureModel::DigitBernoulli { base: b, probs })
                if digit_direct && base == b =>
            {
                // Cell address straight from the drawn digit prefix; the
                // truncated point may sit exactly on the cell boundary.
                let mut m = Rational::one();
                for &d in digits.iter().take(n as usize) {
                    m *= &probs[d as usize];
                }
                m
            }
            _ => information_value(mu, &sample.point, p, n)?.cell_mass,
        };
        if mass.is_zero() {
            infinite_count += 1;
        } else {
            masses.push(mass);
        }
    }
    let values: Vec<f64> = masses.iter().map(|m| -ln_rat(m) / n as f64).collect();
    let count = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / count;
    let degenerate = masses.windows(2).all(|w| w[0] == w[1]);
    let std_error = if degenerate {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    };
    Ok(SmbEstimate {
        p,
        depth: n,
        samples: sample_count,
        mean,
        std_error,
        degenerate,
        analytic: measure::analytic_entropy(mu, p).ok(),
        infinite_count,
    })
}

fn base_of(mu: &MeasureModel) -> Option<u64> {
    match mu {
        MeasureModel::DigitBernoulli { base, .. } => Some(*base as u64),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Witness {
    pub point: String,
    pub delta: String,
    pub mass: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaStat {
    pub delta: String,
    pub pass_count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub beta: String,
    pub eps: String,
    pub samples: u64,
    /// Largest grid delta below which at least a (1-eps) fraction of the
    /// sampled points pass every tested delta; smallest grid value if none.
    pub delta0: String,
    pub pass_fraction: f64,
    pub threshold_met: bool,
    pub per_delta: Vec<DeltaStat>,
    pub failures: Vec<Lemma1Witness>,
}

const MAX_WITNESSES: usize = 20;

/// Scan `mu(B_delta(x)) > delta^beta` over a descending delta grid for
/// points sampled from the measure. Every comparison is exact; the report
/// speaks only about the tested grid, never the continuum statement.
pub fn lemma1_scan(
    mu: &MeasureModel,
    beta: &Rational,
    eps: &Rational,
    delta_grid: &[Rational],
    sample_count: u64,
    seed: u64,
) -> Result<Lemma1Report> {
    if delta_grid.is_empty() {
        return Err(Error::InvalidArgument("delta grid is empty".into()));
    }
    if !beta.is_positive() {
        return Err(Error::InvalidArgument("beta must be positive".into()));
    }
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::InvalidArgument("eps must be in (0,1)".into()));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if delta_grid.iter().any(|d| !d.is_positive() || *d >= half) {
        return Err(Error::InvalidArgument("grid deltas must lie in (0, 1/2)".into()));
    }
    let mut grid = delta_grid.to_vec();
    grid.sort();
    grid.reverse();

    let a = beta.numer().to_u32().ok_or_else(|| {
        Error::InvalidArgument("beta numerator too large for exact comparison".into())
    })?;
    let b = beta.denom().to_u32().ok_or_else(|| {
        Error::InvalidArgument("beta denominator too large for exact comparison".into())
    })?;

    // Sample depth: truncation far below the smallest grid delta.
    let min_delta = grid.last().unwrap();
    let depth_f = -ln_rat(min_delta) / sample_base_ln(mu);
    let depth = depth_f.ceil() as u32 + 16;

    let mut per_delta_pass = vec![0u64; grid.len()];
    let mut suffix_pass = vec![0u64; grid.len()];
    let mut full_pass = 0u64;
    let mut failures = Vec::new();
    for i in 0..sample_count {
        let x = measure::sample_point_indexed(mu, seed ^ 0x4c45_4d31, i, depth);
        let mut passes = Vec::with_capacity(grid.len());
        for (j, delta) in grid.iter().enumerate() {
            let mass = arc_mass(mu, &Arc::ball(&x, delta)?)?;
            // mass > delta^beta  <=>  mass^b > delta^a
            let ok = rat_pow(&mass, b) > rat_pow(delta, a);
            passes.push(ok);
            if ok {
                per_delta_pass[j] += 1;
            } else if failures.len() < MAX_WITNESSES {
                failures.push(Lemma1Witness {
                    point: x.to_string(),
                    delta: rat_string(delta),
                    mass: rat_string(&mass),
                });
            }
        }
        // suffix_pass[j]: passed at every delta <= grid[j]
        let mut all_below = true;
        for j in (0..grid.len()).rev() {
            all_below &= passes[j];
            if all_below {
                suffix_pass[j] += 1;
            }
        }
        if all_below {
            full_pass += 1;
        }
    }
    let needed = eps_threshold(sample_count, eps);
    let chosen = (0..grid.len()).find(|&j| suffix_pass[j] >= needed);
    let (delta0_idx, pass_count) = match chosen {
        Some(j) => (j, suffix_pass[j]),
        None => (grid.len() - 1, suffix_pass[grid.len() - 1]),
    };
    let _ = full_pass;
    Ok(Lemma1Report {
        beta: rat_string(beta),
        eps: rat_string(eps),
        samples: sample_count,
        delta0: rat_string(&grid[delta0_idx]),
        pass_fraction: pass_count as f64 / sample_count as f64,
        threshold_met: chosen.is_some(),
        per_delta: grid
            .iter()
            .zip(&per_delta_pass)
            .map(|(d, &c)| DeltaStat {
                delta: rat_string(d),
                pass_count: c,
            })
            .collect(),
        failures,
    })
}

/// Smallest pass count with pass_fraction > 1 - eps, exactly.
fn eps_threshold(samples: u64, eps: &Rational) -> u64 {
    // count/samples > 1 - eps  <=>  count * eps_den > samples * (eps_den - eps_num)
    let num = eps.numer().magnitude();
    let den = eps.denom().magnitude();
    let rhs = BigUint::from(samples) * (den - num);
    let mut count = (&rhs / den).to_u64().unwrap_or(samples);
    while BigUint::from(count) * den <= rhs {
        count += 1;
    }
    count
}

fn sample_base_ln(mu: &MeasureModel) -> f64 {
    match mu {
        MeasureModel::DigitBernoulli { base, .. } => (*base as f64).ln(),
        _ => 2f64.ln(),
    }
}
