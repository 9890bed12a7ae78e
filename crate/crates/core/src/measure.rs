//! Exact-query Borel probability measures on the circle: Lebesgue, finite
//! atomic, and digit-Bernoulli (Cantor-type) models. Arc masses are exact
//! rationals; for digit-Bernoulli endpoints the eventually periodic base-p
//! expansion is summed in closed form.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::arith::{
    ln_rat, parse_rational, rat_string, rat_to_f64, reduce_mod1, Arc, Rational, TorusPoint,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureModel {
    Lebesgue,
    /// Finitely many atoms with positive rational masses summing to 1.
    Atomic(Vec<(TorusPoint, Rational)>),
    /// I.i.d. base-p digits with the given probabilities.
    DigitBernoulli { base: u32, probs: Vec<Rational> },
}

impl MeasureModel {
    pub fn atomic(atoms: Vec<(TorusPoint, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("atomic measure needs atoms".into()));
        }
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("atomic points must be distinct".into()));
        }
        if sorted.iter().any(|(_, m)| m.is_negative()) {
            return Err(Error::InvalidArgument("atom masses must be nonnegative".into()));
        }
        let total: Rational = sorted.iter().map(|(_, m)| m.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "atom masses must sum to 1, got {}",
                rat_string(&total)
            )));
        }
        Ok(MeasureModel::Atomic(sorted))
    }

    pub fn digit_bernoulli(base: u32, probs: Vec<Rational>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidArgument("base must be >= 2".into()));
        }
        if probs.len() != base as usize {
            return Err(Error::InvalidArgument(format!(
                "need {base} digit probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidArgument("digit probabilities must be nonnegative".into()));
        }
        let total: Rational = probs.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "digit probabilities must sum to 1, got {}",
                rat_string(&total)
            )));
        }
        Ok(MeasureModel::DigitBernoulli { base, probs })
    }

    /// The classical middle-thirds Cantor measure.
    pub fn cantor() -> Self {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        MeasureModel::digit_bernoulli(3, vec![half.clone(), Rational::zero(), half]).unwrap()
    }

    /// Parse the CLI/config grammar: `lebesgue`,
    /// `atomic:[p1/q1=m1,...]`, `bernoulli:base=3,probs=1/2,0,1/2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "lebesgue" {
            return Ok(MeasureModel::Lebesgue);
        }
        if let Some(body) = s.strip_prefix("atomic:") {
            let inner = body
                .trim()
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::Parse {
                    rule: "atomic measure",
                    msg: format!("{body:?}: expected [point=mass,...]"),
                })?;
            let mut atoms = Vec::new();
            for item in inner.split(',') {
                let (p, m) = item.split_once('=').ok_or_else(|| Error::Parse {
                    rule: "atomic measure",
                    msg: format!("{item:?}: expected point=mass"),
                })?;
                atoms.push((reduce_mod1(&parse_rational(p)?), parse_rational(m)?));
            }
            return MeasureModel::atomic(atoms);
        }
        if let Some(body) = s.strip_prefix("bernoulli:") {
            let body = body.trim();
            let rest = body.strip_prefix("base=").ok_or_else(|| Error::Parse {
                rule: "bernoulli measure",
                msg: format!("{body:?}: expected base=p,probs=..."),
            })?;
            let (base_str, probs_part) = rest.split_once(',').ok_or_else(|| Error::Parse {
                rule: "bernoulli measure",
                msg: format!("{body:?}: missing probs"),
            })?;
            let base: u32 = base_str.trim().parse().map_err(|e| Error::Parse {
                rule: "bernoulli measure",
                msg: format!("base {base_str:?}: {e}"),
            })?;
            let probs_str = probs_part.strip_prefix("probs=").ok_or_else(|| Error::Parse {
                rule: "bernoulli measure",
                msg: format!("{probs_part:?}: expected probs=..."),
            })?;
            let probs = probs_str
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            return MeasureModel::digit_bernoulli(base, probs);
        }
        Err(Error::Parse {
            rule: "measure spec",
            msg: format!("{s:?}: expected lebesgue, atomic:[...] or bernoulli:..."),
        })
    }

    /// When some digit probability is 1, the Bernoulli measure degenerates
    /// to a single atom (the point with that repeating digit).
    fn degenerate_atom(&self) -> Option<TorusPoint> {
        if let MeasureModel::DigitBernoulli { base, probs } = self {
            if let Some(d) = probs.iter().position(|p| p.is_one()) {
                return Some(reduce_mod1(&Rational::new(
                    BigInt::from(d),
                    BigInt::from(base - 1),
                )));
            }
        }
        None
    }

    fn is_uniform_bernoulli(&self) -> bool {
        if let MeasureModel::DigitBernoulli { base, probs } = self {
            let u = Rational::new(BigInt::one(), BigInt::from(*base));
            probs.iter().all(|p| *p == u)
        } else {
            false
        }
    }
}

impl std::fmt::Display for MeasureModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureModel::Lebesgue => write!(f, "lebesgue"),
            MeasureModel::Atomic(atoms) => {
                let items: Vec<String> = atoms
                    .iter()
                    .map(|(p, m)| format!("{}={}", p, rat_string(m)))
                    .collect();
                write!(f, "atomic:[{}]", items.join(","))
            }
            MeasureModel::DigitBernoulli { base, probs } => {
                let items: Vec<String> = probs.iter().map(rat_string).collect();
                write!(f, "bernoulli:base={base},probs={}", items.join(","))
            }
        }
    }
}

fn atom_cdf(atoms: &[(TorusPoint, Rational)], t: &Rational) -> Rational {
    // The coset of 0 sits at the right end of the circle: it enters (0, t]
    // only when t = 1.
    let mut sum = Rational::zero();
    for (p, m) in atoms {
        let v = p.value();
        if (!v.is_zero() && v <= t) || (v.is_zero() && t.is_one()) {
            sum += m;
        }
    }
    sum
}

/// mu((0, t]) exactly, for t in [0, 1].
pub fn cdf_at(mu: &MeasureModel, t: &Rational) -> Result<Rational> {
    if t.is_negative() || t > &Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "cdf argument must be in [0,1], got {}",
            rat_string(t)
        )));
    }
    match mu {
        MeasureModel::Lebesgue => Ok(t.clone()),
        MeasureModel::Atomic(atoms) => Ok(atom_cdf(atoms, t)),
        MeasureModel::DigitBernoulli { base, probs } => {
            if let Some(atom) = mu.degenerate_atom() {
                return Ok(atom_cdf(&[(atom, Rational::one())], t));
            }
            if t.is_one() {
                return Ok(Rational::one());
            }
            if t.is_zero() {
                return Ok(Rational::zero());
            }
            // Atomless case: mu((0,t]) = mu([0,t)) = sum over digit positions
            // of P(prefix) * P(digit < d_i), with the eventually periodic
            // expansion of t summed in closed form once the state repeats.
            let p = Rational::from_integer(BigInt::from(*base));
            let mut low_cum = Vec::with_capacity(probs.len() + 1);
            low_cum.push(Rational::zero());
            for q in probs {
                let last = low_cum.last().unwrap().clone();
                low_cum.push(last + q);
            }
            let mut state = t.clone();
            let mut prefix = Rational::one();
            let mut sum = Rational::zero();
            let mut seen: HashMap<Rational, (Rational, Rational)> = HashMap::new();
            loop {
                if state.is_zero() || prefix.is_zero() {
                    return Ok(sum);
                }
                if let Some((sum_at, prefix_at)) = seen.get(&state) {
                    // Period found: sum = sum_at + (cycle gain) * sum_k r^k.
                    let cycle_gain = &sum - sum_at;
                    let r = &prefix / prefix_at;
                    debug_assert!(r < Rational::one());
                    let tail = cycle_gain / (Rational::one() - r);
                    return Ok(sum_at + tail);
                }
                seen.insert(state.clone(), (sum.clone(), prefix.clone()));
                let scaled = &state * &p;
                let digit = scaled.floor();
                let d = (digit.numer() / digit.denom()).to_usize().unwrap();
                sum += &prefix * &low_cum[d];
                prefix *= &probs[d];
                state = scaled - digit;
            }
        }
    }
}

/// Exact mass of a half-open arc, splitting at the wrap point.
pub fn arc_mass(mu: &MeasureModel, a: &Arc) -> Result<Rational> {
    if a.is_full() {
        return Ok(Rational::one());
    }
    let mut total = Rational::zero();
    for (lo, hi) in a.linear_pieces() {
        total += cdf_at(mu, &hi)? - cdf_at(mu, &lo)?;
    }
    Ok(total)
}

/// A drawn sample: the truncated point, and the drawn digit string for
/// digit models (the cell address is determined by the digits; the
/// truncated point itself sits on a cell boundary when the tail is zero).
#[derive(Debug, Clone)]
pub struct Sample {
    pub point: TorusPoint,
    pub digits: Option<(u32, Vec<u32>)>,
}

struct WeightedPicker {
    cumulative: Vec<BigUint>,
    denom: BigUint,
    bits: u64,
}

impl WeightedPicker {
    fn new(weights: &[Rational]) -> Self {
        let mut denom = BigUint::one();
        for w in weights {
            denom = num_integer::lcm(denom, w.denom().magnitude().clone());
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = BigUint::zero();
        for w in weights {
            let scaled = w.numer().magnitude() * (&denom / w.denom().magnitude());
            acc += scaled;
            cumulative.push(acc.clone());
        }
        let bits = denom.bits();
        WeightedPicker {
            cumulative,
            denom,
            bits,
        }
    }

    /// Uniform draw below the common denominator by rejection sampling.
    fn pick(&self, rng: &mut ChaCha8Rng) -> usize {
        loop {
            let mut bytes = vec![0u8; self.bits.div_ceil(8) as usize];
            rng.fill(&mut bytes[..]);
            let mut v = BigUint::from_bytes_le(&bytes);
            let excess = 8 * bytes.len() as u64 - self.bits;
            v >>= excess;
            if v < self.denom {
                return self.cumulative.iter().position(|c| &v < c).unwrap();
            }
        }
    }
}

pub(crate) fn draw_sample(mu: &MeasureModel, rng: &mut ChaCha8Rng, depth: u32) -> Sample {
    match mu {
        MeasureModel::Lebesgue => {
            // depth fair base-2 bits, tail truncated to 0
            let mut num = BigUint::zero();
            for _ in 0..depth {
                num = (num << 1u32) | BigUint::from(rng.gen_range(0u32..2));
            }
            Sample {
                point: reduce_mod1(&Rational::new(
                    BigInt::from(num),
                    BigInt::one() << depth,
                )),
                digits: None,
            }
        }
        MeasureModel::Atomic(atoms) => {
            let weights: Vec<Rational> = atoms.iter().map(|(_, m)| m.clone()).collect();
            let idx = WeightedPicker::new(&weights).pick(rng);
            Sample {
                point: atoms[idx].0.clone(),
                digits: None,
            }
        }
        MeasureModel::DigitBernoulli { base, probs } => {
            let picker = WeightedPicker::new(probs);
            let mut digits = Vec::with_capacity(depth as usize);
            let mut num = BigUint::zero();
            for _ in 0..depth {
                let d = picker.pick(rng) as u32;
                digits.push(d);
                num = num * base + BigUint::from(d);
            }
            let den = BigUint::from(*base).pow(depth);
            Sample {
                point: reduce_mod1(&Rational::new(BigInt::from(num), BigInt::from(den))),
                digits: Some((*base, digits)),
            }
        }
    }
}

pub(crate) fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    // Distinct deterministic stream per (seed, index).
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Deterministic draw from the measure at the given digit depth.
pub fn sample_point(mu: &MeasureModel, seed: u64, depth: u32) -> TorusPoint {
    sample_point_indexed(mu, seed, 0, depth)
}

pub fn sample_point_indexed(mu: &MeasureModel, seed: u64, index: u64, depth: u32) -> TorusPoint {
    draw_sample(mu, &mut rng_for(seed, index), depth).point
}

#[derive(Debug, Clone)]
pub struct InvarianceEntry {
    pub arc: Arc,
    pub mass: Rational,
    pub preimage_mass: Rational,
}

impl InvarianceEntry {
    pub fn discrepancy(&self) -> Rational {
        (&self.mass - &self.preimage_mass).abs()
    }
}

#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub q: u64,
    pub entries: Vec<InvarianceEntry>,
}

impl InvarianceReport {
    pub fn exact(&self) -> bool {
        self.entries.iter().all(|e| e.discrepancy().is_zero())
    }

    pub fn worst(&self) -> Option<&InvarianceEntry> {
        self.entries.iter().max_by_key(|e| e.discrepancy())
    }
}

/// Compare mu(A) with the summed mass of the q preimage arcs of A, exactly.
pub fn check_invariance(mu: &MeasureModel, q: u64, arcs: &[Arc]) -> Result<InvarianceReport> {
    let mut entries = Vec::with_capacity(arcs.len());
    for a in arcs {
        let mass = arc_mass(mu, a)?;
        let preimage_mass = if a.is_full() {
            Rational::one()
        } else {
            let mut sum = Rational::zero();
            for pre in crate::arith::preimage_arcs(a, q)? {
                sum += arc_mass(mu, &pre)?;
            }
            sum
        };
        entries.push(InvarianceEntry {
            arc: a.clone(),
            mass,
            preimage_mass,
        });
    }
    Ok(InvarianceReport { q, entries })
}

/// A fixed arc family for invariance prechecks: p-adic cells at small depth
/// plus a few incommensurate arcs, including a wrapping one.
pub fn canonical_arcs(p: u64) -> Vec<Arc> {
    let mut arcs = Vec::new();
    for depth in 1..=2u32 {
        let cells = (p as u128).pow(depth).min(64) as u64;
        let len = Rational::new(BigInt::one(), BigInt::from(p).pow(depth));
        for k in 0..cells {
            let start = reduce_mod1(&(&len * Rational::from_integer(BigInt::from(k))));
            arcs.push(Arc::new(start, len.clone()).unwrap());
        }
    }
    for (s, l) in [("1/7", "1/3"), ("0", "1/2"), ("5/8", "3/4"), ("1/11", "3/13")] {
        arcs.push(
            Arc::new(
                reduce_mod1(&parse_rational(s).unwrap()),
                parse_rational(l).unwrap(),
            )
            .unwrap(),
        );
    }
    arcs
}

/// Closed-form entropy of T_p when the model supports it exactly.
///
/// The measure must be T_p-invariant (checked on the canonical arc family).
pub fn analytic_entropy(mu: &MeasureModel, p: u64) -> Result<f64> {
    let report = check_invariance(mu, p, &canonical_arcs(p))?;
    if let Some(worst) = report.worst() {
        if !worst.discrepancy().is_zero() {
            return Err(Error::InvarianceViolation {
                q: p,
                start: worst.arc.start().to_string(),
                length: rat_string(worst.arc.length()),
                mass: rat_string(&worst.mass),
                preimage_mass: rat_string(&worst.preimage_mass),
            });
        }
    }
    match mu {
        MeasureModel::Lebesgue => Ok((p as f64).ln()),
        MeasureModel::Atomic(_) => Ok(0.0),
        MeasureModel::DigitBernoulli { base, probs } => {
            if mu.is_uniform_bernoulli() {
                return Ok((p as f64).ln());
            }
            let h: f64 = probs
                .iter()
                .filter(|q| q.is_positive())
                .map(|q| -rat_to_f64(q) * ln_rat(q))
                .sum();
            // h(T_{b^k}) = k * h(T_b).
            let mut power = *base as u64;
            let mut k = 1u32;
            while power < p {
                power = power.saturating_mul(*base as u64);
                k += 1;
            }
            if power == p {
                Ok(k as f64 * h)
            } else {
                Err(Error::UnsupportedCombination(format!(
                    "digit-Bernoulli base {base} queried at p = {p}"
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn pt(s: &str) -> TorusPoint {
        reduce_mod1(&rat(s))
    }

    fn arc(s: &str, l: &str) -> Arc {
        Arc::new(pt(s), rat(l)).unwrap()
    }

    fn atoms_7() -> MeasureModel {
        MeasureModel::atomic(vec![
            (pt("1/7"), rat("1/3")),
            (pt("2/7"), rat("1/3")),
            (pt("4/7"), rat("1/3")),
        ])
        .unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(cdf_at(&MeasureModel::Lebesgue, &rat("3/10")).unwrap(), rat("3/10"));
        assert_eq!(cdf_at(&MeasureModel::cantor(), &rat("1/3")).unwrap(), rat("1/2"));
        assert_eq!(cdf_at(&atoms_7(), &rat("1/2")).unwrap(), rat("2/3"));
    }

    #[test]
    fn cdf_endpoints() {
        for mu in [MeasureModel::Lebesgue, MeasureModel::cantor(), atoms_7()] {
            assert_eq!(cdf_at(&mu, &rat("0")).unwrap(), rat("0"), "{mu}");
            assert_eq!(cdf_at(&mu, &rat("1")).unwrap(), rat("1"), "{mu}");
        }
    }

    #[test]
    fn cdf_periodic_expansion() {
        // 1/7 = 0.010212... in base 3. The Cantor mass of (0, 1/7] is the
        // mass of the digit-00 cell [0,1/9) = 1/4; the summation must stop
        // once the prob-0 digit 1 kills the prefix.
        let m = cdf_at(&MeasureModel::cantor(), &rat("1/7")).unwrap();
        assert_eq!(m, rat("1/4"));
        // Lebesgue sanity through the Bernoulli path: uniform base 3.
        let third = Rational::new(BigInt::one(), BigInt::from(3));
        let unif = MeasureModel::digit_bernoulli(3, vec![third.clone(), third.clone(), third]).unwrap();
        for t in ["1/7", "2/5", "9/11", "1/2"] {
            assert_eq!(cdf_at(&unif, &rat(t)).unwrap(), rat(t), "{t}");
        }
    }

    #[test]
    fn arc_mass_examples() {
        assert_eq!(
            arc_mass(&MeasureModel::Lebesgue, &arc("1/7", "2/11")).unwrap(),
            rat("2/11")
        );
        assert_eq!(
            arc_mass(&MeasureModel::cantor(), &arc("1/3", "1/3")).unwrap(),
            rat("0")
        );
        // wrapping arc around 6/7 misses every atom
        assert_eq!(
            arc_mass(&atoms_7(), &arc("599/700", "2/100")).unwrap(),
            rat("0")
        );
        // wrapping arc around 0 catches the coset of 0
        let with_zero = MeasureModel::atomic(vec![
            (pt("0"), rat("1/2")),
            (pt("1/2"), rat("1/2")),
        ])
        .unwrap();
        assert_eq!(arc_mass(&with_zero, &arc("9/10", "1/5")).unwrap(), rat("1/2"));
    }

    #[test]
    fn additivity_of_arc_mass() {
        let mu = MeasureModel::cantor();
        let full = arc("1/10", "7/10");
        let total = arc_mass(&mu, &full).unwrap();
        // split into 5 consecutive sub-arcs
        let mut sum = Rational::zero();
        let piece = rat("7/50");
        for i in 0..5u32 {
            let start = rat("1/10") + &piece * Rational::from_integer(BigInt::from(i));
            sum += arc_mass(&mu, &Arc::new(reduce_mod1(&start), piece.clone()).unwrap()).unwrap();
        }
        assert_eq!(sum, total);
    }

    #[test]
    fn invariance_examples() {
        let arcs = canonical_arcs(7);
        assert!(check_invariance(&MeasureModel::Lebesgue, 7, &arcs).unwrap().exact());
        assert!(check_invariance(&MeasureModel::cantor(), 3, &canonical_arcs(3)).unwrap().exact());
        assert!(check_invariance(&atoms_7(), 2, &canonical_arcs(2)).unwrap().exact());
        // Cantor is not T_2-invariant.
        assert!(!check_invariance(&MeasureModel::cantor(), 2, &canonical_arcs(2)).unwrap().exact());
    }

    #[test]
    fn invariance_on_random_rational_arcs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mu = MeasureModel::cantor();
        for _ in 0..50 {
            let num = rng.gen_range(0u64..1000);
            let len = rng.gen_range(1u64..500);
            let a = Arc::new(
                reduce_mod1(&Rational::new(BigInt::from(num), BigInt::from(1000u64))),
                Rational::new(BigInt::from(len), BigInt::from(1000u64)),
            )
            .unwrap();
            let rep = check_invariance(&mu, 3, &[a]).unwrap();
            assert!(rep.exact());
        }
    }

    #[test]
    fn analytic_entropy_examples() {
        assert!((analytic_entropy(&MeasureModel::Lebesgue, 2).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((analytic_entropy(&MeasureModel::cantor(), 3).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(analytic_entropy(&atoms_7(), 2).unwrap(), 0.0);
        assert!(matches!(
            analytic_entropy(&MeasureModel::cantor(), 2),
            Err(Error::InvarianceViolation { .. })
        ));
        // T_9 entropy of Cantor is 2 log 2.
        assert!((analytic_entropy(&MeasureModel::cantor(), 9).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn sampling_laws() {
        // Atomic frequencies within 3 sigma over 10^4 draws.
        let mu = atoms_7();
        let mut counts = [0u32; 3];
        for i in 0..10_000u64 {
            let p = sample_point_indexed(&mu, 5, i, 8);
            if p == pt("1/7") {
                counts[0] += 1;
            } else if p == pt("2/7") {
                counts[1] += 1;
            } else {
                counts[2] += 1;
            }
        }
        let sigma = (10_000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - 10_000.0 / 3.0).abs() < 3.0 * sigma, "{counts:?}");
        }
        // Cantor samples never use digit 1.
        let cantor = MeasureModel::cantor();
        for i in 0..100u64 {
            let s = draw_sample(&cantor, &mut rng_for(9, i), 40);
            let (_, digits) = s.digits.unwrap();
            assert!(digits.iter().all(|&d| d != 1));
        }
        // Lebesgue at depth 64 gives 64 fair bits: denominator divides 2^64.
        let l = sample_point(&MeasureModel::Lebesgue, 3, 64);
        let den = l.value().denom().magnitude().clone();
        assert!((BigUint::one() << 64u32) % den == BigUint::zero());
    }

    #[test]
    fn degenerate_bernoulli_is_atom() {
        let mu = MeasureModel::digit_bernoulli(
            2,
            vec![Rational::zero(), Rational::one()],
        )
        .unwrap();
        // All mass at 0.111... = 1 = coset of 0.
        assert_eq!(cdf_at(&mu, &rat("1/2")).unwrap(), rat("0"));
        assert_eq!(cdf_at(&mu, &rat("1")).unwrap(), rat("1"));
    }

    #[test]
    fn parse_round_trips() {
        for s in [
            "lebesgue",
            "atomic:[1/7=1/3,2/7=1/3,4/7=1/3]",
            "bernoulli:base=3,probs=1/2,0,1/2",
        ] {
            let mu = MeasureModel::parse(s).unwrap();
            assert_eq!(MeasureModel::parse(&mu.to_string()).unwrap(), mu, "{s}");
        }
    }
}
