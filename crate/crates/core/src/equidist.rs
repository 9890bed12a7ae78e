//! Weyl exponential sums and star discrepancy over certified torus
//! points. Sums are evaluated left to right with interval trigonometry so
//! inequalities about them are certificates, not float observations.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::angle::{self, AngleSpec, MAX_PRECISION_BITS};
use crate::arith::{rat_to_f64, reduce_mod1, Rational, TorusPoint};
use crate::error::{Error, Result};
use crate::semigroup::{self, GeneratorSet};
use crate::trig::{cos_sin_2pi, CertReal};

/// A torus point known to lie within `err` of `value` (value in [0,1)).
#[derive(Debug, Clone)]
pub struct CertTorus {
    pub value: Rational,
    pub err: Rational,
}

impl CertTorus {
    pub fn exact(p: &TorusPoint) -> Self {
        CertTorus {
            value: p.value().clone(),
            err: Rational::zero(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComplexValue {
    pub re: CertReal,
    pub im: CertReal,
}

impl ComplexValue {
    /// Upper bound on |z|^2 from the certified intervals.
    pub fn modulus_squared_upper(&self) -> Rational {
        let r = self.re.value.abs() + &self.re.err;
        let i = self.im.value.abs() + &self.im.err;
        &r * &r + &i * &i
    }
}

const WEYL_SCALE: u32 = 128;

/// `(1/N) * sum_j exp(2 pi i h x_j)` with propagated error radii, summed
/// in input order.
pub fn weyl_sum(points: &[CertTorus], h: i64) -> Result<ComplexValue> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("weyl_sum needs points".into()));
    }
    if h == 0 {
        return Err(Error::InvalidArgument("harmonic must be nonzero".into()));
    }
    let habs = h.unsigned_abs();
    let mut re = Rational::zero();
    let mut im = Rational::zero();
    let mut re_err = Rational::zero();
    let mut im_err = Rational::zero();
    for p in points {
        let t = reduce_mod1(&(&p.value * Rational::from_integer(BigInt::from(habs)))).into_value();
        let t_err = &p.err * Rational::from_integer(BigInt::from(habs));
        let (c, s) = cos_sin_2pi(&t, &t_err, WEYL_SCALE);
        re += &c.value;
        re_err += &c.err;
        if h > 0 {
            im += &s.value;
        } else {
            im -= &s.value;
        }
        im_err += &s.err;
    }
    let n = Rational::from_integer(BigInt::from(points.len()));
    Ok(ComplexValue {
        re: CertReal {
            value: re / &n,
            err: re_err / &n,
        },
        im: CertReal {
            value: im / &n,
            err: im_err / &n,
        },
    })
}

pub enum OrbitSource<'a> {
    Gens(&'a GeneratorSet),
    Explicit(&'a [u64]),
}

/// `{sigma * alpha mod 1}` over the semigroup elements (or an explicit
/// set) up to N, with per-point error radii at most 2^-64.
pub fn orbit_points(source: &OrbitSource, alpha: &AngleSpec, n: u64) -> Result<Vec<CertTorus>> {
    if n < 1 {
        return Err(Error::InvalidArgument("orbit bound must be positive".into()));
    }
    let sigmas: Vec<u64> = match source {
        OrbitSource::Gens(g) => semigroup::enumerate_up_to(g, n).collect(),
        OrbitSource::Explicit(v) => {
            let mut v: Vec<u64> = v.iter().copied().filter(|&s| s >= 1 && s <= n).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    if let Some(r) = alpha.exact_rational() {
        return Ok(sigmas
            .iter()
            .map(|&s| CertTorus::exact(&reduce_mod1(&(r * Rational::from_integer(BigInt::from(s))))))
            .collect());
    }
    // err of sigma * alpha is sigma ulps; pad so even the largest sigma
    // stays below 2^-64
    let bits = 64 + (64 - n.leading_zeros()) + 1;
    let usable = angle::max_usable_bits(alpha, MAX_PRECISION_BITS);
    if usable < bits {
        return Err(Error::PrecisionCap {
            cap: usable,
            context: format!("orbit up to {n} needs {bits} bits"),
        });
    }
    let a = angle::eval_angle(alpha, bits)?;
    Ok(sigmas
        .iter()
        .map(|&s| {
            let f = a.mul_u64(s).frac();
            CertTorus {
                value: f.value(),
                err: f.error_radius(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub n: u64,
    /// Exact star discrepancy of the point values, widened by the largest
    /// error radius and clamped into [0,1].
    #[serde(rename = "dStar")]
    pub d_star: f64,
    #[serde(rename = "dStarExact")]
    pub d_star_exact: String,
    /// `dStar * N / log N`
    pub normalized: f64,
}

/// Star discrepancy via the sorted-points formula
/// `max_i max(i/N - x_(i), x_(i) - (i-1)/N)`.
pub fn star_discrepancy(points: &[CertTorus]) -> Result<DiscrepancyReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("star_discrepancy needs points".into()));
    }
    let mut xs: Vec<&Rational> = points.iter().map(|p| &p.value).collect();
    xs.sort();
    let n = xs.len() as u64;
    let nr = BigInt::from(n);
    let mut d = Rational::zero();
    for (i, x) in xs.iter().enumerate() {
        let hi = Rational::new(BigInt::from(i as u64 + 1), nr.clone()) - *x;
        let lo = *x - Rational::new(BigInt::from(i as u64), nr.clone());
        if hi > d {
            d = hi;
        }
        if lo > d {
            d = lo;
        }
    }
    let widen = points
        .iter()
        .map(|p| &p.err)
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let mut d = d + widen;
    if d > Rational::one() {
        d = Rational::one();
    }
    let df = rat_to_f64(&d);
    Ok(DiscrepancyReport {
        n,
        d_star: df,
        d_star_exact: crate::arith::rat_string(&d),
        normalized: if n > 1 { df * n as f64 / (n as f64).ln() } else { df },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn cert(vals: &[&str]) -> Vec<CertTorus> {
        vals.iter()
            .map(|s| CertTorus::exact(&reduce_mod1(&rat(s))))
            .collect()
    }

    fn close(c: &CertReal, target: f64, tol: f64) {
        assert!((c.to_f64() - target).abs() < tol, "{} vs {target}", c.to_f64());
    }

    #[test]
    fn weyl_basic() {
        let z = weyl_sum(&cert(&["0", "0", "0"]), 1).unwrap();
        close(&z.re, 1.0, 1e-30);
        close(&z.im, 0.0, 1e-30);

        let z = weyl_sum(&cert(&["0", "1/2"]), 1).unwrap();
        close(&z.re, 0.0, 1e-30);
        close(&z.im, 0.0, 1e-30);
    }

    #[test]
    fn weyl_full_residues_cancel() {
        for n in [3u64, 5, 8] {
            let pts: Vec<CertTorus> = (0..n)
                .map(|j| {
                    CertTorus::exact(&reduce_mod1(&Rational::new(
                        BigInt::from(j),
                        BigInt::from(n),
                    )))
                })
                .collect();
            for h in [1i64, 2, -1] {
                if h.unsigned_abs() % n == 0 {
                    continue;
                }
                let z = weyl_sum(&pts, h).unwrap();
                // certified interval contains 0 and is tiny
                assert!(z.re.value.abs() <= z.re.err, "n={n} h={h}");
                assert!(z.im.value.abs() <= z.im.err, "n={n} h={h}");
                assert!(z.re.err < rat("1/1000000000"), "n={n} h={h}");
            }
        }
    }

    #[test]
    fn weyl_modulus_bounded() {
        let pts = cert(&["1/7", "2/7", "3/5", "9/11", "1/2"]);
        for h in [1i64, 3, -2] {
            let z = weyl_sum(&pts, h).unwrap();
            // |z|^2 <= 1 plus a whisker of certified error
            assert!(z.modulus_squared_upper() <= rat("101/100"));
        }
    }

    #[test]
    fn weyl_window_cosine_bound() {
        // all points inside (0, 1/8) force Re >= cos(pi/4)
        let pts = cert(&["1/100", "1/9", "1/16", "3/25"]);
        let z = weyl_sum(&pts, 1).unwrap();
        let lower = &z.re.value - &z.re.err;
        assert!(rat_to_f64(&lower) >= (0.5f64).sqrt() - 1e-12);
    }

    #[test]
    fn orbit_rational_example() {
        let gens = GeneratorSet::new(vec![2, 3]).unwrap();
        let spec = AngleSpec::Rational(rat("1/4"));
        let pts = orbit_points(&OrbitSource::Gens(&gens), &spec, 10).unwrap();
        let vals: Vec<Rational> = pts.iter().map(|p| p.value.clone()).collect();
        let expect: Vec<Rational> = ["1/2", "3/4", "0", "1/2", "0", "1/4"]
            .iter()
            .map(|s| rat(s))
            .collect();
        assert_eq!(vals, expect);
        assert!(pts.iter().all(|p| p.err.is_zero()));
    }

    #[test]
    fn orbit_golden_explicit() {
        let pts = orbit_points(&OrbitSource::Explicit(&[5, 13]), &AngleSpec::golden(), 13)
            .unwrap();
        assert_eq!(pts.len(), 2);
        let v: Vec<f64> = pts.iter().map(|p| rat_to_f64(&p.value)).collect();
        assert!((v[0] - 0.09016994).abs() < 1e-6, "{}", v[0]);
        assert!((v[1] - 0.03444185).abs() < 1e-6, "{}", v[1]);
        let cap = rat("1/18446744073709551616"); // 2^-64
        assert!(pts.iter().all(|p| p.err <= cap));
    }

    #[test]
    fn discrepancy_examples() {
        let r = star_discrepancy(&cert(&["1/2"])).unwrap();
        assert_eq!(r.d_star_exact, "1/2");

        let n = 10u64;
        let pts: Vec<CertTorus> = (1..=n)
            .map(|i| {
                CertTorus::exact(&reduce_mod1(&Rational::new(
                    BigInt::from(2 * i - 1),
                    BigInt::from(2 * n),
                )))
            })
            .collect();
        let r = star_discrepancy(&pts).unwrap();
        assert_eq!(r.d_star_exact, "1/20");
    }

    #[test]
    fn discrepancy_permutation_invariant_and_floor() {
        let a = cert(&["1/3", "3/4", "1/9", "5/8"]);
        let b = cert(&["5/8", "1/9", "3/4", "1/3"]);
        let ra = star_discrepancy(&a).unwrap();
        let rb = star_discrepancy(&b).unwrap();
        assert_eq!(ra.d_star_exact, rb.d_star_exact);
        assert!(ra.d_star >= 1.0 / 8.0); // >= 1/(2N)
    }

    #[test]
    fn golden_orbit_low_discrepancy() {
        let n = 10_000u64;
        let all: Vec<u64> = (1..=n).collect();
        let pts = orbit_points(&OrbitSource::Explicit(&all), &AngleSpec::golden(), n).unwrap();
        let r = star_discrepancy(&pts).unwrap();
        assert!(r.normalized < 3.0, "{}", r.normalized);
    }
}
