//! Collision detection among dilated balls, rational reconstruction by
//! repeated squaring of the cutoff, and a measure classifier built on top
//! of the entropy and invariance machinery.
//!
//! Throughout, `delta = M^-5` unless explicitly overridden, and the
//! approximation bound kappa is `2 M^-4`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::angle::{self, AngleSpec, MAX_PRECISION_BITS};
use crate::arith::{
    circle_distance, rat_string, reduce_mod1, times_n, Arc, Rational, TorusPoint,
};
use crate::error::{Error, Result};
use crate::measure::{self, MeasureModel};
use crate::semigroup::{self, GeneratorSet, LacunarityResult};

/// A pair of semigroup elements whose dilated balls overlap, with the
/// integer witness of the induced rational approximation.
#[derive(Debug, Clone)]
pub struct CollisionWitness {
    pub q1: u64,
    pub q2: u64,
    /// `q1 x` and `q2 x` agree mod 1 up to this circular gap (an upper
    /// bound on the certified path).
    pub gap: Rational,
    pub exact: bool,
    pub overlap_point: TorusPoint,
    pub k: BigInt,
    /// `q1 - q2`
    pub ell: u64,
}

fn delta_default(m: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(m).pow(5))
}

fn kappa_bound(m: u64) -> Rational {
    Rational::new(BigInt::from(2), BigInt::from(m).pow(4))
}

/// The arcs `A_q = q B_delta(x)` for every semigroup element `q <= M`.
pub fn dilation_images(
    x: &TorusPoint,
    delta: &Rational,
    gens: &GeneratorSet,
    m: u64,
) -> Result<Vec<(u64, Arc)>> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if !delta.is_positive() || *delta >= half {
        return Err(Error::InvalidArgument("delta must lie in (0, 1/2)".into()));
    }
    let ball = Arc::ball(x, delta)?;
    Ok(semigroup::enumerate_up_to(gens, m)
        .map(|q| (q, crate::arith::dilate_arc(&ball, q)))
        .collect())
}

fn round_to_int(v: &Rational) -> BigInt {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let shifted = v + half;
    shifted.floor().numer() / shifted.floor().denom()
}

/// Pick the best adjacent pair on the sorted circle of orbit points:
/// smallest gap, then smallest ell = q1 - q2, then smallest q2.
fn best_pair(points: &mut Vec<(Rational, u64)>) -> (Rational, u64, u64, Rational) {
    points.sort();
    let n = points.len();
    // ranked by (gap, ell, q2)
    let mut best: Option<((Rational, u64, u64), u64, Rational)> = None;
    for i in 0..n {
        let (cur, qa) = &points[i];
        let (next, qb) = &points[(i + 1) % n];
        let gap = if i + 1 < n {
            next - cur
        } else {
            next + Rational::one() - cur
        };
        let (q1, q2) = if qa > qb { (*qa, *qb) } else { (*qb, *qa) };
        let key = (gap, q1 - q2, q2);
        if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
            best = Some((key, q1, cur.clone()));
        }
    }
    let ((gap, _, q2), q1, low) = best.unwrap();
    (gap, q1, q2, low)
}

/// Exact collision scan for a rational point: sorts the orbit
/// `{q x mod 1}` and reports the minimal-gap pair when that gap is at
/// most `2 delta`.
pub fn find_point_collision(
    x: &TorusPoint,
    gens: &GeneratorSet,
    m: u64,
    delta: &Rational,
) -> Result<Option<CollisionWitness>> {
    let elems: Vec<u64> = semigroup::enumerate_up_to(gens, m).collect();
    if elems.len() < 2 {
        return Err(Error::InsufficientElements { m });
    }
    let mut points: Vec<(Rational, u64)> = elems
        .iter()
        .map(|&q| (times_n(x, q).into_value(), q))
        .collect();
    let (gap, q1, q2, low) = best_pair(&mut points);
    let two_delta = delta * Rational::from_integer(BigInt::from(2));
    if gap > two_delta {
        return Ok(None);
    }
    let ell = q1 - q2;
    let v = x.value() * Rational::from_integer(BigInt::from(ell));
    let k = if gap.is_zero() {
        debug_assert!(v.is_integer());
        v.to_integer()
    } else {
        round_to_int(&v)
    };
    let overlap = reduce_mod1(&(&low + &gap / Rational::from_integer(BigInt::from(2))));
    Ok(Some(CollisionWitness {
        q1,
        q2,
        gap,
        exact: true,
        overlap_point: overlap,
        k,
        ell,
    }))
}

/// Certified collision scan for an arbitrary angle. Every gap is decided
/// against `2 delta` with error radii; undecidable gaps force a precision
/// doubling. Exact rational angles delegate to the exact scan.
pub fn find_point_collision_cert(
    spec: &AngleSpec,
    gens: &GeneratorSet,
    m: u64,
    delta: &Rational,
) -> Result<Option<CollisionWitness>> {
    if let Some(r) = spec.exact_rational() {
        return find_point_collision(&reduce_mod1(r), gens, m, delta);
    }
    let elems: Vec<u64> = semigroup::enumerate_up_to(gens, m).collect();
    if elems.len() < 2 {
        return Err(Error::InsufficientElements { m });
    }
    let mut bits = 5 * (64 - m.leading_zeros()) + 80;
    let two_delta = delta * Rational::from_integer(BigInt::from(2));
    loop {
        bits = bits.min(angle::max_usable_bits(spec, MAX_PRECISION_BITS));
        let alpha = angle::eval_angle(spec, bits)?;
        let mut points: Vec<(Rational, Rational, u64)> = elems
            .iter()
            .map(|&q| {
                let f = alpha.mul_u64(q).frac();
                (f.value(), f.error_radius(), q)
            })
            .collect();
        points.sort_by(|a, b| a.0.cmp(&b.0));
        let n = points.len();
        let mut best: Option<((Rational, u64, u64), u64, Rational)> = None;
        let mut undecided = false;
        for i in 0..n {
            let (cur, ea, qa) = &points[i];
            let (next, eb, qb) = &points[(i + 1) % n];
            let gap = if i + 1 < n {
                next - cur
            } else {
                next + Rational::one() - cur
            };
            let err = ea + eb;
            if &gap - &err > two_delta {
                continue; // certified outside
            }
            if &gap + &err > two_delta {
                undecided = true;
                continue;
            }
            let (q1, q2) = if qa > qb { (*qa, *qb) } else { (*qb, *qa) };
            let key = (&gap + &err, q1 - q2, q2);
            if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
                best = Some((key, q1, cur.clone()));
            }
        }
        if let Some(((upper, _, q2), q1, low)) = best {
            let ell = q1 - q2;
            let scaled = alpha.mul_u64(ell);
            let k = round_to_int(&scaled.value());
            let overlap = reduce_mod1(&(&low + delta));
            return Ok(Some(CollisionWitness {
                q1,
                q2,
                gap: upper,
                exact: false,
                overlap_point: overlap,
                k,
                ell,
            }));
        }
        if !undecided {
            return Ok(None);
        }
        if bits >= angle::max_usable_bits(spec, MAX_PRECISION_BITS) {
            return Err(Error::PrecisionCap {
                cap: bits,
                context: "collision gaps undecidable at precision cap".into(),
            });
        }
        bits *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PigeonholeOutcome {
    CollisionForced,
    NotForced,
}

#[derive(Debug, Clone, Serialize)]
pub struct PigeonholeReport {
    pub outcome: PigeonholeOutcome,
    pub total_mass: String,
    pub delta: String,
    /// An overlapping pair re-checkable by arc intersection.
    pub pair: Option<(u64, u64)>,
}

/// The measure-level pigeonhole: if the masses of the dilated balls sum
/// beyond 1, two of them must overlap; the report carries such a pair.
pub fn measure_pigeonhole(
    mu: &MeasureModel,
    x: &TorusPoint,
    gens: &GeneratorSet,
    m: u64,
    delta: Option<&Rational>,
) -> Result<PigeonholeReport> {
    let default = delta_default(m);
    let delta = delta.unwrap_or(&default);
    let arcs = dilation_images(x, delta, gens, m)?;
    let mut total = Rational::zero();
    for (_, a) in &arcs {
        total += measure::arc_mass(mu, a)?;
    }
    if total <= Rational::one() {
        return Ok(PigeonholeReport {
            outcome: PigeonholeOutcome::NotForced,
            total_mass: rat_string(&total),
            delta: rat_string(delta),
            pair: None,
        });
    }
    let mut pair = None;
    'outer: for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            if arcs[i].1.intersects(&arcs[j].1) {
                pair = Some((arcs[j].0, arcs[i].0));
                break 'outer;
            }
        }
    }
    debug_assert!(pair.is_some(), "mass sum > 1 must force an overlap");
    Ok(PigeonholeReport {
        outcome: PigeonholeOutcome::CollisionForced,
        total_mass: rat_string(&total),
        delta: rat_string(delta),
        pair,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    #[serde(rename = "M")]
    pub m: u64,
    pub delta: String,
    pub q1: u64,
    pub q2: u64,
    pub k: String,
    pub ell: u64,
    pub candidate: String,
    #[serde(rename = "kappaBound")]
    pub kappa_bound: String,
    #[serde(rename = "kappaOk")]
    pub kappa_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Rational(TorusPoint),
    NotCertified,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Rational(p) => s.serialize_str(&p.to_string()),
            Verdict::NotCertified => s.serialize_str("NotCertified"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionTrace {
    pub stages: Vec<StageRecord>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Run collisions at M, M^2, M^4, ..., certifying a rational once two
/// consecutive reduced candidates coincide and the final kappa bound sits
/// below half the spacing `1/(ell M^2)` of competing candidates.
pub fn reconstruct_rational(
    spec: &AngleSpec,
    gens: &GeneratorSet,
    m1: u64,
    max_doublings: u32,
) -> Result<ReconstructionTrace> {
    if m1 < 2 || max_doublings < 1 {
        return Err(Error::InvalidArgument(
            "need m1 >= 2 and at least one doubling".into(),
        ));
    }
    let mut stages = Vec::new();
    let mut m = m1;
    let mut prev: Option<TorusPoint> = None;
    let mut note = None;
    for stage in 0..=max_doublings {
        let delta = delta_default(m);
        let witness = match find_point_collision_cert(spec, gens, m, &delta) {
            Ok(Some(w)) => w,
            Ok(None) => {
                note = Some(format!("no collision within 2*delta at M = {m}"));
                break;
            }
            Err(e) => {
                note = Some(format!("stage at M = {m} failed: {e}"));
                break;
            }
        };
        let candidate = reduce_mod1(&Rational::new(
            witness.k.clone(),
            BigInt::from(witness.ell),
        ));
        let kappa = kappa_bound(m);
        let kappa_ok = certify_kappa(spec, &candidate, &kappa)?;
        stages.push(StageRecord {
            m,
            delta: rat_string(&delta),
            q1: witness.q1,
            q2: witness.q2,
            k: witness.k.to_string(),
            ell: witness.ell,
            candidate: candidate.to_string(),
            kappa_bound: rat_string(&kappa),
            kappa_ok,
        });
        if kappa_ok && prev.as_ref() == Some(&candidate) {
            // Separation of competing candidates: spacing at least
            // 1/(ell M^2), and the kappa bound must sit below half of it.
            let spacing_half = Rational::new(
                BigInt::one(),
                BigInt::from(2u32) * BigInt::from(witness.ell) * BigInt::from(m).pow(2),
            );
            if kappa < spacing_half {
                return Ok(ReconstructionTrace {
                    stages,
                    verdict: Verdict::Rational(candidate),
                    note: None,
                });
            }
            note = Some("stabilized but separation condition failed".into());
            break;
        }
        prev = if kappa_ok { Some(candidate) } else { None };
        if stage < max_doublings {
            match m.checked_mul(m) {
                Some(next) => m = next,
                None => {
                    note = Some("cutoff squaring overflowed".into());
                    break;
                }
            }
        }
    }
    Ok(ReconstructionTrace {
        stages,
        verdict: Verdict::NotCertified,
        note,
    })
}

/// `|alpha - candidate| <= bound` on the circle, exactly for rational
/// angles and by certified interval comparison otherwise. Undecidable
/// counts as not verified.
fn certify_kappa(spec: &AngleSpec, candidate: &TorusPoint, bound: &Rational) -> Result<bool> {
    if let Some(r) = spec.exact_rational() {
        return Ok(circle_distance(&reduce_mod1(r), candidate) <= *bound);
    }
    let bits = angle::max_usable_bits(spec, 512);
    let alpha = angle::eval_angle(spec, bits)?;
    let x = reduce_mod1(&alpha.value());
    let d = circle_distance(&x, candidate);
    Ok(&d + &alpha.error_radius() <= *bound)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ClassVerdict {
    FiniteSupportDetected,
    LebesgueConsistent,
    PositiveEntropyNoConclusion,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEvidence {
    pub p: u64,
    pub estimate: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    #[serde(rename = "perGeneratorEntropy")]
    pub per_generator_entropy: Vec<EntropyEvidence>,
    pub lacunarity: LacunarityResult,
    pub verdict: ClassVerdict,
    /// Recovered (point, mass) pairs; present only with
    /// FiniteSupportDetected, where they pass the invariance check under
    /// every preserving generator and sum to exactly 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<(String, String)>>,
    /// Generators that do not preserve the measure, with a witness arc.
    #[serde(rename = "invarianceViolations")]
    pub invariance_violations: Vec<(u64, String)>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ClassifyParams {
    pub seed: u64,
    pub samples: u64,
    pub m1: u64,
    pub doublings: u32,
    pub entropy_depth: u32,
    pub entropy_samples: u64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            seed: 0,
            samples: 20,
            m1: 1000,
            doublings: 2,
            entropy_depth: 1000,
            entropy_samples: 100,
        }
    }
}

/// Classify an invariant measure: finite support via the reconstruction
/// pipeline, Lebesgue via exact arc-mass checks, or no conclusion when the
/// generators are lacunary or the evidence is mixed.
///
/// The measure must be preserved by at least one generator; generators
/// that fail the invariance check are excluded and reported with a
/// witness arc.
pub fn classify_measure(
    mu: &MeasureModel,
    gens: &GeneratorSet,
    params: &ClassifyParams,
) -> Result<ClassificationReport> {
    let mut preserving = Vec::new();
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    for &p in gens.generators() {
        let report = measure::check_invariance(mu, p, &measure::canonical_arcs(p))?;
        if report.exact() {
            preserving.push(p);
        } else {
            let worst = report.worst().unwrap();
            violations.push((p, format!("{:?}", worst.arc)));
        }
    }
    if preserving.is_empty() {
        let (p, arc) = violations.into_iter().next().unwrap();
        return Err(Error::InvalidArgument(format!(
            "measure is preserved by no generator; T_{p} fails on arc {arc}"
        )));
    }
    if !violations.is_empty() {
        notes.push(format!(
            "classification restricted to preserving generators {preserving:?}"
        ));
    }

    let mut entropies = Vec::new();
    for &p in &preserving {
        match measure::analytic_entropy(mu, p) {
            Ok(h) => entropies.push(EntropyEvidence {
                p,
                estimate: h,
                exact: true,
            }),
            Err(_) => {
                let est = crate::entropy::smb_estimate(
                    mu,
                    p,
                    params.entropy_depth,
                    params.entropy_samples,
                    params.seed,
                )?;
                entropies.push(EntropyEvidence {
                    p,
                    estimate: est.mean,
                    exact: false,
                });
            }
        }
    }
    let lac = semigroup::is_lacunary(gens);
    let min_gen = *gens.generators().first().unwrap();
    let threshold = 0.05 * (min_gen as f64).ln();
    let zero_entropy = entropies
        .iter()
        .any(|e| if e.exact { e.estimate == 0.0 } else { e.estimate < threshold });

    if zero_entropy {
        match recover_atoms(mu, gens, &preserving, params)? {
            Some(atoms) => {
                return Ok(ClassificationReport {
                    per_generator_entropy: entropies,
                    lacunarity: lac,
                    verdict: ClassVerdict::FiniteSupportDetected,
                    atoms: Some(
                        atoms
                            .iter()
                            .map(|(p, m)| (p.to_string(), rat_string(m)))
                            .collect(),
                    ),
                    invariance_violations: violations,
                    notes,
                });
            }
            None => {
                notes.push("zero entropy but finite-support reconstruction failed".into());
                return Ok(ClassificationReport {
                    per_generator_entropy: entropies,
                    lacunarity: lac,
                    verdict: ClassVerdict::PositiveEntropyNoConclusion,
                    atoms: None,
                    invariance_violations: violations,
                    notes,
                });
            }
        }
    }

    if lac.lacunary {
        notes.push("generators are lacunary; positive-entropy rigidity does not apply".into());
        return Ok(ClassificationReport {
            per_generator_entropy: entropies,
            lacunarity: lac,
            verdict: ClassVerdict::PositiveEntropyNoConclusion,
            atoms: None,
            invariance_violations: violations,
            notes,
        });
    }
    // Lebesgue consistency: canonical arc masses equal arc lengths exactly.
    let mut consistent = true;
    'outer: for &p in &preserving {
        for a in measure::canonical_arcs(p) {
            if measure::arc_mass(mu, &a)? != *a.length() {
                notes.push(format!("arc mass differs from length on {a:?}"));
                consistent = false;
                break 'outer;
            }
        }
    }
    Ok(ClassificationReport {
        per_generator_entropy: entropies,
        lacunarity: lac,
        verdict: if consistent {
            ClassVerdict::LebesgueConsistent
        } else {
            ClassVerdict::PositiveEntropyNoConclusion
        },
        atoms: None,
        invariance_violations: violations,
        notes,
    })
}

/// Sample points, certify each as rational via the reconstruction
/// pipeline, and accept the recovered atom set only if its masses sum to
/// exactly 1 and the resulting atomic model passes the invariance check
/// for every preserving generator. Sampling widens geometrically when the
/// recovered mass falls short, so rare misses of a low-mass atom heal.
fn recover_atoms(
    mu: &MeasureModel,
    gens: &GeneratorSet,
    preserving: &[u64],
    params: &ClassifyParams,
) -> Result<Option<Vec<(TorusPoint, Rational)>>> {
    let mut budget = params.samples.max(1);
    let mut drawn = 0u64;
    let mut atoms: Vec<TorusPoint> = Vec::new();
    for _round in 0..5 {
        while drawn < budget {
            let x = measure::sample_point_indexed(mu, params.seed, drawn, 64);
            drawn += 1;
            if atoms.contains(&x) {
                continue;
            }
            let spec = AngleSpec::Rational(x.value().clone());
            let trace = reconstruct_rational(&spec, gens, params.m1, params.doublings)?;
            match trace.verdict {
                Verdict::Rational(p) => {
                    if !atoms.contains(&p) {
                        atoms.push(p);
                    }
                }
                Verdict::NotCertified => return Ok(None),
            }
        }
        if atoms.is_empty() {
            return Ok(None);
        }
        // Atom masses via left-open arcs narrower than the minimal spacing.
        let mut spacing = Rational::new(BigInt::one(), BigInt::from(4));
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                let d = circle_distance(&atoms[i], &atoms[j]);
                let h = d / Rational::from_integer(BigInt::from(2));
                if h < spacing {
                    spacing = h;
                }
            }
        }
        let mut weighted = Vec::new();
        let mut total = Rational::zero();
        for a in &atoms {
            let arc = Arc::new(
                reduce_mod1(&(a.value() - &spacing)),
                spacing.clone(),
            )?;
            let mass = measure::arc_mass(mu, &arc)?;
            total += &mass;
            if mass.is_positive() {
                weighted.push((a.clone(), mass));
            }
        }
        if total == Rational::one() {
            let model = MeasureModel::atomic(weighted.clone())?;
            for &p in preserving {
                if !measure::check_invariance(&model, p, &measure::canonical_arcs(p))?.exact() {
                    return Ok(None);
                }
            }
            weighted.sort_by(|a, b| a.0.cmp(&b.0));
            return Ok(Some(weighted));
        }
        budget *= 2; // mass unaccounted for: some atom was never sampled
    }
    Ok(None)
}
