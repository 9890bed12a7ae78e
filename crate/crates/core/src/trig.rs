//! Certified fixed-point trigonometry for Weyl sums.
//!
//! Everything here returns a value together with a proven error radius, so
//! inequalities on exponential sums can be checked strictly.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::arith::{rat_to_f64, Rational};

/// A real number known to within `err` of `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertReal {
    pub value: Rational,
    pub err: Rational,
}

impl CertReal {
    pub fn exact(value: Rational) -> Self {
        CertReal {
            value,
            err: Rational::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.value)
    }

    /// Certified lower bound on the true value.
    pub fn lower_bound(&self) -> Rational {
        &self.value - &self.err
    }

    pub fn upper_bound(&self) -> Rational {
        &self.value + &self.err
    }
}

/// floor(pi * 2^scale) up to `err_ulps` ulps, via Machin's formula.
pub fn pi_fixed(scale: u32) -> (BigInt, BigUint) {
    let guard = scale + 40;

    // arctan(1/x) at the guard scale; error bounded by 2 ulps per iteration
    // (one floor division for the power, one for the term) plus the
    // alternating-series tail, which is below one ulp once power hits zero.
    fn atan_inv(x: u64, s: u32) -> (BigInt, BigUint) {
        let x2 = BigInt::from(x) * BigInt::from(x);
        let mut power = (BigInt::one() << s) / BigInt::from(x);
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        let mut iters = 0u64;
        let mut positive = true;
        while !power.is_zero() {
            let term = &power / BigInt::from(2 * k + 1);
            if positive {
                sum += term;
            } else {
                sum -= term;
            }
            power /= &x2;
            positive = !positive;
            k += 1;
            iters += 1;
        }
        (sum, BigUint::from(2 * iters + 2))
    }

    let (a, ea) = atan_inv(5, guard);
    let (b, eb) = atan_inv(239, guard);
    let pi_guard = (a << 4u32) - (b << 2u32);
    let err_guard = (ea << 4u32) + (eb << 2u32);
    // Shift down to the target scale; rounding adds one ulp.
    let pi = &pi_guard >> 40u32;
    let err = (err_guard >> 40u32) + BigUint::one() + BigUint::one();
    (pi, err)
}

/// Certified (cos 2*pi*t, sin 2*pi*t) for a circle position `t` in `[0, 1)`
/// known to within `t_err`. Computed at the given working scale.
pub fn cos_sin_2pi(t: &Rational, t_err: &Rational, scale: u32) -> (CertReal, CertReal) {
    debug_assert!(!t.is_negative() && t < &Rational::one());
    let s = scale + 32;
    let one_fx = BigInt::one() << s;

    // Quadrant reduction: t = q/4 + u with u in [0, 1/4).
    let four_t = t * Rational::from_integer(BigInt::from(4));
    let q: u8 = {
        use num_traits::ToPrimitive;
        let f = four_t.floor();
        (f.numer() / f.denom()).to_u8().unwrap()
    };
    let u = &four_t - four_t.floor(); // in [0,1), phase = (pi/2)*u

    // x = (pi/2) * u in fixed point at scale s; x in [0, pi/2).
    let (pi_m, pi_err) = pi_fixed(s);
    let x_num = &pi_m * u.numer();
    let x_den = u.denom() << 1u32;
    let x = x_num / x_den;
    // error: pi error scaled by u/2 (< 1) plus the floor division.
    let ex = BigUint::from(pi_err) + BigUint::one();

    // x2 = x^2 >> s; |x| < 2*2^s so d(x^2) <= 2*|x|*ex <= 4*ex ulps, +1 floor.
    let x2 = (&x * &x) >> s;
    let ex2 = (&ex << 2u32) + BigUint::one();

    let fixmul = |a: &BigInt, ea: &BigUint, b: &BigInt, eb: &BigUint| -> (BigInt, BigUint) {
        let prod = (a * b) >> s;
        // |a*eb| + |b*ea| + ea*eb, all shifted down, plus the floor.
        let err = ((a.magnitude() * eb + b.magnitude() * ea + ea * eb) >> s) + BigUint::one();
        (prod, err)
    };

    // Taylor series for cos x and sin x on [0, pi/2); terms shrink fast and
    // the run ends when a term underflows the fixed-point grid.
    let mut cos_sum = one_fx.clone();
    let mut cos_err = BigUint::zero();
    let mut term = one_fx.clone();
    let mut term_err = BigUint::zero();
    let mut k = 0u64;
    let mut positive = true;
    loop {
        let (num, mut e) = fixmul(&term, &term_err, &x2, &ex2);
        let div = BigInt::from((2 * k + 1) * (2 * k + 2));
        let next = num / &div;
        e = e / BigUint::from((2 * k + 1) * (2 * k + 2)) + BigUint::one();
        if next.is_zero() && e <= BigUint::from(2u32) {
            // remaining alternating tail is below the first omitted term
            cos_err += BigUint::from(2u32);
            break;
        }
        positive = !positive;
        if positive {
            cos_sum += &next;
        } else {
            cos_sum -= &next;
        }
        cos_err += &e;
        term = next;
        term_err = e;
        k += 1;
        if k > 200 {
            break; // unreachable at sane scales
        }
    }

    let mut sin_sum = x.clone();
    let mut sin_err = ex.clone();
    let mut term = x.clone();
    let mut term_err = ex.clone();
    let mut k = 0u64;
    let mut positive = true;
    loop {
        let (num, mut e) = fixmul(&term, &term_err, &x2, &ex2);
        let div = BigInt::from((2 * k + 2) * (2 * k + 3));
        let next = num / &div;
        e = e / BigUint::from((2 * k + 2) * (2 * k + 3)) + BigUint::one();
        if next.is_zero() && e <= BigUint::from(2u32) {
            sin_err += BigUint::from(2u32);
            break;
        }
        positive = !positive;
        if positive {
            sin_sum += &next;
        } else {
            sin_sum -= &next;
        }
        sin_err += &e;
        term = next;
        term_err = e;
        k += 1;
        if k > 200 {
            break;
        }
    }

    // sin x also picks up the input error of x through |cos| <= 1.
    sin_err += &ex;
    cos_err += &ex; // |sin| <= 1 likewise for cos

    let to_cert = |m: BigInt, e: BigUint| -> CertReal {
        let denom = BigInt::one() << s;
        // Propagate the caller's uncertainty in t: |d/dt exp(2*pi*i*t)| = 2*pi < 7.
        CertReal {
            value: Rational::new(m, denom.clone()),
            err: Rational::new(BigInt::from(e), denom) + t_err * Rational::from_integer(BigInt::from(7)),
        }
    };
    let c = to_cert(cos_sum, cos_err);
    let sn = to_cert(sin_sum, sin_err);

    // Rotate by the quadrant: angle = q*(pi/2) + x.
    match q {
        0 => (c, sn),
        1 => (neg(sn), c),
        2 => (neg(c), neg(sn)),
        _ => (sn, neg(c)),
    }
}

fn neg(v: CertReal) -> CertReal {
    CertReal {
        value: -v.value,
        err: v.err,
    }
}
