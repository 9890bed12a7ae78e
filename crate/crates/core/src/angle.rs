//! Angle specifications and certified fixed-point evaluation.
//!
//! An [`AngleSpec`] names a circle angle exactly: a rational `p/q`, a
//! quadratic irrational `(a + b*sqrt(d))/c`, or a truncated decimal with a
//! declared digit count. [`eval_angle`] turns a spec into a [`FixedReal`]
//! carrying a proven error radius, and [`frac_threshold_test`] decides
//! window membership of `k*alpha mod 1` by adaptive precision doubling.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{parse_rational, rat_string, Rational};
use crate::error::{Error, Result};

pub const MIN_PRECISION_BITS: u32 = 16;
/// Adaptive certification starts here and doubles up to [`MAX_PRECISION_BITS`].
pub const BASE_PRECISION_BITS: u32 = 64;
pub const MAX_PRECISION_BITS: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AngleSpec {
    /// Exact rational angle p/q.
    Rational(Rational),
    /// (a + b*sqrt(d)) / c with c > 0, d >= 2 not a perfect square, b != 0.
    Quadratic {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        d: BigUint,
    },
    /// A decimal truncation `mantissa / 10^frac_digits`, trusted only to the
    /// declared digit count.
    Decimal { mantissa: BigInt, frac_digits: u32 },
}

impl AngleSpec {
    pub fn quadratic(a: i64, b: i64, c: i64, d: u64) -> Result<Self> {
        Self::quadratic_big(BigInt::from(a), BigInt::from(b), BigInt::from(c), BigUint::from(d))
    }

    pub fn quadratic_big(a: BigInt, mut b: BigInt, mut c: BigInt, d: BigUint) -> Result<Self> {
        let mut a = a;
        if c.is_zero() {
            return Err(Error::Parse {
                rule: "quadratic angle",
                msg: "zero denominator c".into(),
            });
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        if b.is_zero() {
            return Ok(AngleSpec::Rational(Rational::new(a, c)));
        }
        if d < BigUint::from(2u32) {
            return Err(Error::Parse {
                rule: "quadratic angle",
                msg: "radicand d must be >= 2".into(),
            });
        }
        let root = d.sqrt();
        if &root * &root == d {
            return Err(Error::Parse {
                rule: "quadratic angle",
                msg: format!("radicand {d} is a perfect square; use rational:p/q"),
            });
        }
        let g = a.magnitude().gcd(b.magnitude()).gcd(c.magnitude());
        if g > BigUint::one() {
            let g = BigInt::from(g);
            a /= &g;
            b /= &g;
            c /= &g;
        }
        Ok(AngleSpec::Quadratic { a, b, c, d })
    }

    /// The golden-ratio fractional part (-1 + sqrt(5))/2.
    pub fn golden() -> Self {
        AngleSpec::quadratic(-1, 1, 2, 5).unwrap()
    }

    pub fn exact_rational(&self) -> Option<&Rational> {
        match self {
            AngleSpec::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Parse the CLI/config grammar: `rational:p/q`,
    /// `quadratic:(a+b*sqrt(d))/c`, `decimal:0.ddd`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("rational:") {
            return Ok(AngleSpec::Rational(parse_rational(body)?));
        }
        if let Some(body) = s.strip_prefix("quadratic:") {
            return Self::parse_quadratic(body);
        }
        if let Some(body) = s.strip_prefix("decimal:") {
            return Self::parse_decimal(body);
        }
        Err(Error::Parse {
            rule: "angle spec",
            msg: format!("{s:?}: expected rational:, quadratic: or decimal: prefix"),
        })
    }

    fn parse_quadratic(body: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse {
            rule: "quadratic angle",
            msg,
        };
        let body = body.trim();
        let inner_end = body
            .rfind(")/")
            .ok_or_else(|| err(format!("{body:?}: expected (a+b*sqrt(d))/c")))?;
        if !body.starts_with('(') {
            return Err(err(format!("{body:?}: expected leading '('")));
        }
        let inner = &body[1..inner_end];
        let c: BigInt = body[inner_end + 2..]
            .trim()
            .parse()
            .map_err(|e| err(format!("denominator: {e}")))?;
        let sqrt_pos = inner
            .find("*sqrt(")
            .ok_or_else(|| err(format!("{inner:?}: expected b*sqrt(d)")))?;
        let d_str = inner[sqrt_pos + 6..]
            .strip_suffix(')')
            .ok_or_else(|| err(format!("{inner:?}: unterminated sqrt(")))?;
        let d: BigUint = d_str
            .trim()
            .parse()
            .map_err(|e| err(format!("radicand: {e}")))?;
        let ab = &inner[..sqrt_pos];
        // Split "a+b" / "a-b" at the last top-level sign (not at position 0).
        // Split "a+b" / "a-b" at the sign following the a term; a sign right
        // after another sign belongs to the following number.
        let bytes = ab.as_bytes();
        let split = (1..ab.len())
            .rev()
            .find(|&i| {
                (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1].is_ascii_digit()
            })
            .ok_or_else(|| err(format!("{ab:?}: expected a+b*sqrt(d)")))?;
        let a: BigInt = ab[..split]
            .trim()
            .parse()
            .map_err(|e| err(format!("term a: {e}")))?;
        let sign = if ab.as_bytes()[split] == b'-' { -1 } else { 1 };
        let b_abs: BigInt = ab[split + 1..]
            .trim()
            .parse()
            .map_err(|e| err(format!("term b: {e}")))?;
        Self::quadratic_big(a, BigInt::from(sign) * b_abs, c, d)
    }

    fn parse_decimal(body: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse {
            rule: "decimal angle",
            msg,
        };
        let body = body.trim();
        let (int_part, frac_part) = body
            .split_once('.')
            .ok_or_else(|| err(format!("{body:?}: expected digits.digits")))?;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(format!("{body:?}: fractional digits required")));
        }
        let neg = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) || int_digits.is_empty() {
            return Err(err(format!("{body:?}: bad integer part")));
        }
        let frac_digits = frac_part.len() as u32;
        let mantissa: BigInt = format!("{int_digits}{frac_part}")
            .parse()
            .map_err(|e| err(format!("{e}")))?;
        Ok(AngleSpec::Decimal {
            mantissa: if neg { -mantissa } else { mantissa },
            frac_digits,
        })
    }
}

impl fmt::Display for AngleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleSpec::Rational(r) => write!(f, "rational:{}", rat_string(r)),
            AngleSpec::Quadratic { a, b, c, d } => {
                let (sign, b_abs) = if b.is_negative() {
                    ("-", -b.clone())
                } else {
                    ("+", b.clone())
                };
                write!(f, "quadratic:({a}{sign}{b_abs}*sqrt({d}))/{c}")
            }
            AngleSpec::Decimal {
                mantissa,
                frac_digits,
            } => {
                let sign = if mantissa.is_negative() { "-" } else { "" };
                let digits = mantissa.magnitude().to_string();
                let fd = *frac_digits as usize;
                let padded = format!("{digits:0>width$}", width = fd + 1);
                let (int_part, frac_part) = padded.split_at(padded.len() - fd);
                write!(f, "decimal:{sign}{int_part}.{frac_part}")
            }
        }
    }
}

impl Serialize for AngleSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AngleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        AngleSpec::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Fixed-point real with a certified error radius: the true value lies within
/// `err_ulps / 2^scale` of `mantissa / 2^scale`. The error radius only shrinks
/// under precision refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedReal {
    mantissa: BigInt,
    scale: u32,
    err_ulps: BigUint,
}

impl FixedReal {
    pub fn exact(mantissa: BigInt, scale: u32) -> Self {
        FixedReal {
            mantissa,
            scale,
            err_ulps: BigUint::zero(),
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::one() << self.scale)
    }

    pub fn error_radius(&self) -> Rational {
        Rational::new(
            BigInt::from(self.err_ulps.clone()),
            BigInt::one() << self.scale,
        )
    }

    pub fn is_exact(&self) -> bool {
        self.err_ulps.is_zero()
    }

    /// Multiply by a nonnegative integer (error radius scales along).
    pub fn mul_u64(&self, k: u64) -> FixedReal {
        FixedReal {
            mantissa: &self.mantissa * k,
            scale: self.scale,
            err_ulps: &self.err_ulps * k,
        }
    }

    /// Reduce the represented value mod 1 into `[0, 1)`. The error radius is
    /// unchanged and must afterwards be read as a circle distance.
    pub fn frac(&self) -> FixedReal {
        let modulus = BigInt::one() << self.scale;
        FixedReal {
            mantissa: self.mantissa.mod_floor(&modulus),
            scale: self.scale,
            err_ulps: self.err_ulps.clone(),
        }
    }
}

/// Round num/den (den > 0) to the nearest multiple of 2^-scale.
/// Returns the mantissa and whether the rounding was exact.
fn round_to_scale(num: &BigInt, den: &BigInt, scale: u32) -> (BigInt, bool) {
    debug_assert!(den.is_positive());
    let shifted = num << scale;
    let (q, r) = shifted.div_mod_floor(den);
    if r.is_zero() {
        (q, true)
    } else if &(&r << 1u32) >= den {
        (q + 1, false)
    } else {
        (q, false)
    }
}

/// Certified evaluation of an angle spec at the requested precision.
///
/// Postcondition: `|result - true| <= errorRadius <= 2^(1-bits)`.
pub fn eval_angle(spec: &AngleSpec, bits: u32) -> Result<FixedReal> {
    if bits < MIN_PRECISION_BITS {
        return Err(Error::InvalidArgument(format!(
            "eval_angle requires bits >= {MIN_PRECISION_BITS}, got {bits}"
        )));
    }
    match spec {
        AngleSpec::Rational(r) => {
            let (m, exact) = round_to_scale(r.numer(), r.denom(), bits);
            Ok(FixedReal {
                mantissa: m,
                scale: bits,
                err_ulps: if exact { BigUint::zero() } else { BigUint::one() },
            })
        }
        AngleSpec::Quadratic { a, b, c, d } => {
            // sqrt(d) = s/2^g + theta with 0 <= theta < 2^-g.
            let guard = bits + 32 + b.magnitude().bits() as u32 + c.magnitude().bits() as u32;
            let s = BigInt::from((d << (2 * guard as u64)).sqrt());
            let num = (a << guard) + b * s;
            let den = c << guard;
            let (m, _) = round_to_scale(&num, &den, bits);
            // |b|*theta/c stays below 2^-(bits+31); rounding adds half an ulp.
            Ok(FixedReal {
                mantissa: m,
                scale: bits,
                err_ulps: BigUint::one(),
            })
        }
        AngleSpec::Decimal {
            mantissa,
            frac_digits,
        } => {
            let pow10 = BigUint::from(10u32).pow(*frac_digits);
            // Declared digits must carry at least the requested precision.
            if pow10 < (BigUint::one() << bits) {
                return Err(Error::PrecisionExhausted { requested: bits });
            }
            let den = BigInt::from(pow10.clone());
            let (m, exact) = round_to_scale(mantissa, &den, bits);
            // Truncation uncertainty 10^-D plus rounding.
            let trunc_ulps = ((BigUint::one() << (bits + 1)) / pow10) + BigUint::one();
            Ok(FixedReal {
                mantissa: m,
                scale: bits,
                err_ulps: if exact { trunc_ulps } else { trunc_ulps + BigUint::one() },
            })
        }
    }
}

/// Maximum bits at which a spec can still be certified (decimals run out).
pub fn max_usable_bits(spec: &AngleSpec, cap: u32) -> u32 {
    match spec {
        AngleSpec::Decimal { frac_digits, .. } => {
            // 2^bits <= 10^D  =>  bits <= D*log2(10).
            let limit = (*frac_digits as f64 * std::f64::consts::LOG2_10).floor() as u32;
            limit.clamp(MIN_PRECISION_BITS, cap)
        }
        _ => cap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdOutcome {
    Inside,
    Outside,
    Undecidable,
}

/// Classify the uncertainty interval `[t-eps, t+eps]` (a circle interval,
/// `t` in `[0,1)`) against the open window `(lo, hi)`.
fn classify_window(t: &Rational, eps: &Rational, lo: &Rational, hi: &Rational) -> ThresholdOutcome {
    // Contained: no wrap possible since (lo, hi) is within [0, 1].
    if lo < &(t - eps) && &(t + eps) < hi {
        return ThresholdOutcome::Inside;
    }
    // Disjoint: check every linear piece of the uncertainty interval.
    let one = Rational::one();
    let a = t - eps;
    let b = t + eps;
    let mut pieces: Vec<(Rational, Rational)> = Vec::with_capacity(2);
    if a.is_negative() {
        pieces.push((Rational::zero(), b.clone()));
        pieces.push((a + &one, one.clone()));
    } else if b > one {
        pieces.push((a, one.clone()));
        pieces.push((Rational::zero(), b - &one));
    } else {
        pieces.push((a, b));
    }
    if pieces.iter().all(|(pa, pb)| pb <= lo || pa >= hi) {
        ThresholdOutcome::Outside
    } else {
        ThresholdOutcome::Undecidable
    }
}

/// Certified decision whether `k*alpha mod 1` lies in the open interval
/// `(lo, hi)`, by adaptive precision doubling up to the cap. `Undecidable`
/// can only survive for exact-rational window collisions or truncated
/// decimals that run out of digits.
pub fn frac_threshold_test(
    k: u64,
    spec: &AngleSpec,
    lo: &Rational,
    hi: &Rational,
) -> Result<ThresholdOutcome> {
    if lo.is_negative() || lo >= hi || hi > &Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "window must satisfy 0 <= lo < hi <= 1, got ({}, {})",
            rat_string(lo),
            rat_string(hi)
        )));
    }
    if let Some(r) = spec.exact_rational() {
        let t = crate::arith::reduce_mod1(&(r * Rational::from_integer(BigInt::from(k))));
        return Ok(if lo < t.value() && t.value() < hi {
            ThresholdOutcome::Inside
        } else {
            ThresholdOutcome::Outside
        });
    }
    let max_bits = max_usable_bits(spec, MAX_PRECISION_BITS);
    let mut bits = BASE_PRECISION_BITS.min(max_bits);
    loop {
        let f = eval_angle(spec, bits)?.mul_u64(k).frac();
        let t = f.value();
        let eps = f.error_radius();
        match classify_window(&t, &eps, lo, hi) {
            ThresholdOutcome::Undecidable => {
                if bits >= max_bits {
                    return Ok(ThresholdOutcome::Undecidable);
                }
                bits = (bits * 2).min(max_bits);
            }
            decided => return Ok(decided),
        }
    }
}
