//! Exact rational arithmetic on the circle `T = R/Z`: torus points in
//! `[0,1)`, wrap-aware half-open arcs, and the multiplication maps
//! `T_n(x) = n·x mod 1`.
//!
//! Arcs follow the left-open, right-closed convention `(start, start+length]`
//! throughout the crate, so endpoint membership is never ambiguous.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Parse "p/q" or a plain integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim().parse::<BigInt>().map_err(|e| Error::Parse {
            rule: "rational",
            msg: format!("{t:?}: {e}"),
        })
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse {
                    rule: "rational",
                    msg: format!("{s:?}: zero denominator"),
                });
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Render a rational in the "p/q" wire form (plain integer when q = 1).
pub fn rat_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter keeping rationals in the "p/q" wire form.
pub mod rat_serde {
    use super::{parse_rational, rat_string, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// r^n for nonnegative n.
pub fn rat_pow(r: &Rational, n: u32) -> Rational {
    Rational::new(r.numer().pow(n), r.denom().pow(n))
}

/// Lossy conversion for reporting; exact comparisons never go through here.
pub fn rat_to_f64(r: &Rational) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    let neg = r.numer().is_negative();
    let mut a = r.numer().magnitude().clone();
    let mut b = r.denom().magnitude().clone();
    // Align so that a/b fits comfortably in u128 before converting.
    let shift = a.bits() as i64 - b.bits() as i64 - 64;
    if shift > 0 {
        b <<= shift as u64;
    } else {
        a <<= (-shift) as u64;
    }
    let q = (a / b).to_f64().unwrap_or(f64::MAX);
    let v = q * 2f64.powi(shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        x.to_f64().unwrap().ln()
    } else {
        let top = (x >> (bits - 53)).to_f64().unwrap();
        top.ln() + (bits - 53) as f64 * std::f64::consts::LN_2
    }
}

/// Natural log of a positive rational, robust to huge numerators and
/// denominators (masses like 2^-1000 underflow a direct f64 conversion).
pub fn ln_rat(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// A point of the circle, represented in `[0, 1)` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusPoint(Rational);

impl TorusPoint {
    pub fn zero() -> Self {
        TorusPoint(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", rat_string(&self.0))
    }
}

/// Reduce a rational mod 1 into `[0, 1)`.
pub fn reduce_mod1(r: &Rational) -> TorusPoint {
    TorusPoint(r - r.floor())
}

/// The map `T_n(x) = n·x mod 1`.
pub fn times_n(x: &TorusPoint, n: u64) -> TorusPoint {
    assert!(n >= 1, "times_n requires n >= 1");
    reduce_mod1(&(x.value() * Rational::from_integer(BigInt::from(n))))
}

/// Shortest-path circle metric, in `[0, 1/2]`.
pub fn circle_distance(x: &TorusPoint, y: &TorusPoint) -> Rational {
    let d = (x.value() - y.value()).abs();
    let wrap = Rational::one() - &d;
    if d <= wrap {
        d
    } else {
        wrap
    }
}

/// A half-open circular arc `(start, start + length]` with `0 < length <= 1`.
/// `length == 1` is the full circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    start: TorusPoint,
    length: Rational,
}

impl Arc {
    pub fn new(start: TorusPoint, length: Rational) -> Result<Self> {
        if !length.is_positive() || length > Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "arc length must be in (0, 1], got {}",
                rat_string(&length)
            )));
        }
        Ok(Arc { start, length })
    }

    pub fn full_circle() -> Self {
        Arc {
            start: TorusPoint::zero(),
            length: Rational::one(),
        }
    }

    /// The ball `B_delta(x)` as an arc: start `x - delta`, length `2*delta`
    /// (full circle once `2*delta >= 1`).
    pub fn ball(center: &TorusPoint, radius: &Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidArgument("ball radius must be positive".into()));
        }
        let two_r = radius + radius;
        if two_r >= Rational::one() {
            return Ok(Arc::full_circle());
        }
        Arc::new(reduce_mod1(&(center.value() - radius)), two_r)
    }

    pub fn start(&self) -> &TorusPoint {
        &self.start
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    pub fn is_full(&self) -> bool {
        self.length.is_one()
    }

    pub fn end(&self) -> TorusPoint {
        reduce_mod1(&(self.start.value() + &self.length))
    }

    /// Half-open membership: `x` is in `(start, start+length]`.
    pub fn contains(&self, x: &TorusPoint) -> bool {
        if self.is_full() {
            return true;
        }
        let d = reduce_mod1(&(x.value() - self.start.value()));
        !d.value().is_zero() && *d.value() <= self.length
    }

    /// Split into linear half-open pieces `(lo, hi]` with `0 <= lo < hi <= 1`,
    /// cutting at the wrap point. The point 0 is identified with 1, so a piece
    /// ending at 1 carries the mass of the coset of 0.
    pub fn linear_pieces(&self) -> Vec<(Rational, Rational)> {
        let s = self.start.value().clone();
        let e = &s + &self.length;
        if e <= Rational::one() {
            vec![(s, e)]
        } else {
            let mut pieces = Vec::with_capacity(2);
            let wrapped = &e - Rational::one();
            if !wrapped.is_zero() {
                pieces.push((Rational::zero(), wrapped));
            }
            pieces.push((s, Rational::one()));
            pieces
        }
    }

    /// Whether two arcs share at least one point of the circle.
    pub fn intersects(&self, other: &Arc) -> bool {
        if self.is_full() || other.is_full() {
            return true;
        }
        // Shift so that self = (0, l1]; other = (d, d+l2].
        let d = reduce_mod1(&(other.start.value() - self.start.value()))
            .into_value();
        d < self.length || &d + &other.length > Rational::one()
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, +{}]", self.start, rat_string(&self.length))
    }
}

/// The linear image `q * arc`, saturating to the full circle when
/// `q * length >= 1`.
pub fn dilate_arc(a: &Arc, q: u64) -> Arc {
    assert!(q >= 1, "dilate_arc requires q >= 1");
    let scaled = a.length() * Rational::from_integer(BigInt::from(q));
    if scaled >= Rational::one() {
        Arc::full_circle()
    } else {
        Arc {
            start: times_n(a.start(), q),
            length: scaled,
        }
    }
}

/// The q disjoint arcs making up `T_q^{-1}(a)`, each of length `len(a)/q`.
pub fn preimage_arcs(a: &Arc, q: u64) -> Result<Vec<Arc>> {
    assert!(q >= 1, "preimage_arcs requires q >= 1");
    if a.is_full() {
        return Err(Error::InvalidArgument(
            "preimage_arcs is undefined for the full circle".into(),
        ));
    }
    let qr = Rational::from_integer(BigInt::from(q));
    let piece_len = a.length() / &qr;
    let base = a.start().value() / &qr;
    let step = Rational::new(BigInt::one(), BigInt::from(q));
    let mut arcs = Vec::with_capacity(q as usize);
    let mut offset = Rational::zero();
    for _ in 0..q {
        arcs.push(Arc {
            start: reduce_mod1(&(&base + &offset)),
            length: piece_len.clone(),
        });
        offset += &step;
    }
    Ok(arcs)
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

    #[test]
    fn reduce_mod1_examples() {
        assert_eq!(pt("7/3"), pt("1/3"));
        assert_eq!(pt("-1/4"), pt("3/4"));
        assert_eq!(pt("5/5"), TorusPoint::zero());
    }

    #[test]
    fn times_n_examples() {
        assert_eq!(times_n(&pt("1/3"), 2), pt("2/3"));
        assert_eq!(times_n(&pt("1/3"), 3), TorusPoint::zero());
        assert_eq!(times_n(&pt("2/7"), 2), pt("4/7"));
    }

    #[test]
    fn circle_distance_examples() {
        assert_eq!(circle_distance(&pt("0"), &pt("3/4")), rat("1/4"));
        assert_eq!(circle_distance(&pt("2/7"), &pt("2/7")), rat("0"));
        assert_eq!(circle_distance(&pt("1/8"), &pt("3/8")), rat("1/4"));
    }

    #[test]
    fn dilate_saturates() {
        let a = Arc::new(pt("1/5"), rat("1/2")).unwrap();
        assert!(dilate_arc(&a, 2).is_full());
        let b = Arc::new(pt("0"), rat("1/8")).unwrap();
        let d = dilate_arc(&b, 4);
        assert_eq!(d.start(), &TorusPoint::zero());
        assert_eq!(d.length(), &rat("1/2"));
    }

    #[test]
    fn dilate_ball_example() {
        // Lemma-2 style dilation: B_delta(1/3) with 2*delta = 1/100, q = 3.
        let ball = Arc::ball(&pt("1/3"), &rat("1/200")).unwrap();
        let img = dilate_arc(&ball, 3);
        assert_eq!(img.length(), &rat("3/100"));
        assert_eq!(img.start(), &times_n(ball.start(), 3));
    }

    #[test]
    fn preimage_examples() {
        let a = Arc::new(pt("0"), rat("1/2")).unwrap();
        let pre = preimage_arcs(&a, 2).unwrap();
        assert_eq!(pre.len(), 2);
        assert_eq!(pre[0], Arc::new(pt("0"), rat("1/4")).unwrap());
        assert_eq!(pre[1], Arc::new(pt("1/2"), rat("1/4")).unwrap());

        let b = Arc::new(pt("1/7"), rat("1/5")).unwrap();
        assert_eq!(preimage_arcs(&b, 1).unwrap(), vec![b]);

        let c = Arc::new(pt("0"), rat("1/3")).unwrap();
        let pre = preimage_arcs(&c, 3).unwrap();
        for (i, arc) in pre.iter().enumerate() {
            assert_eq!(arc.length(), &rat("1/9"));
            assert_eq!(arc.start(), &pt(&format!("{i}/3")));
        }
    }

    #[test]
    fn arc_membership_half_open() {
        let a = Arc::new(pt("1/4"), rat("1/4")).unwrap();
        assert!(!a.contains(&pt("1/4"))); // left endpoint excluded
        assert!(a.contains(&pt("1/2"))); // right endpoint included
        assert!(a.contains(&pt("1/3")));
        assert!(!a.contains(&pt("3/4")));
    }

    #[test]
    fn wrapping_arc_pieces_and_membership() {
        let a = Arc::new(pt("7/8"), rat("1/4")).unwrap();
        assert!(a.contains(&pt("15/16")));
        assert!(a.contains(&pt("1/16")));
        assert!(a.contains(&pt("1/8")));
        assert!(!a.contains(&pt("7/8")));
        assert!(!a.contains(&pt("1/2")));
        let pieces = a.linear_pieces();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0], (rat("0"), rat("1/8")));
        assert_eq!(pieces[1], (rat("7/8"), rat("1")));
    }

    #[test]
    fn intersection_cases() {
        let a = Arc::new(pt("0"), rat("1/4")).unwrap();
        let b = Arc::new(pt("1/8"), rat("1/4")).unwrap();
        let c = Arc::new(pt("1/2"), rat("1/4")).unwrap();
        assert!(a.intersects(&b));
        assert!(!a.intersects(&c));
        // Touching at a single half-open boundary does not intersect:
        // (0,1/4] and (1/4,1/2] are disjoint.
        let d = Arc::new(pt("1/4"), rat("1/4")).unwrap();
        assert!(!a.intersects(&d));
        // But (0,1/4] and (7/8, 9/8] share (0,1/8].
        let e = Arc::new(pt("7/8"), rat("1/4")).unwrap();
        assert!(a.intersects(&e));
    }
}
