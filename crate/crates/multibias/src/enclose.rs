//! Certified complex enclosures for cyclotomic values.
//!
//! Exact equality of [`CycloValue`]s is a coefficient comparison; strict
//! inequalities between *distinct* algebraic values are decided here by
//! interval arithmetic over dyadic fixed-point numbers (`m / 2^prec` with
//! big-integer `m`), with precision doubled until the enclosures separate.
//! Roots of unity are evaluated by exact quadrant reduction of the phase
//! followed by alternating Taylor series with a rigorous tail bound; π
//! comes from Machin's formula, again with bracketed error. Nothing in
//! any decision path rounds toward a preferred answer: every operation
//! rounds outward.

use crate::cyclo::CycloValue;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Hard ceiling for precision-doubling comparisons.
pub const PREC_CAP: u32 = 256;

/// A closed interval `[lo, hi] / 2^prec` certified to contain a real value.
#[derive(Debug, Clone)]
pub struct RealEnc {
    pub prec: u32,
    pub lo: BigInt,
    pub hi: BigInt,
}

/// A rectangle certified to contain a complex value.
#[derive(Debug, Clone)]
pub struct ComplexEnc {
    pub re: RealEnc,
    pub im: RealEnc,
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -(-a).div_floor(b)
}

impl RealEnc {
    pub fn exact(prec: u32, v: BigInt) -> Self {
        RealEnc { prec, lo: v.clone(), hi: v }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let scaled_num = r.numer() * (BigInt::one() << prec);
        RealEnc {
            prec,
            lo: div_floor(&scaled_num, r.denom()),
            hi: div_ceil(&scaled_num, r.denom()),
        }
    }

    pub fn zero(prec: u32) -> Self {
        RealEnc::exact(prec, BigInt::zero())
    }

    pub fn add(&self, other: &RealEnc) -> RealEnc {
        debug_assert_eq!(self.prec, other.prec);
        RealEnc { prec: self.prec, lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &RealEnc) -> RealEnc {
        debug_assert_eq!(self.prec, other.prec);
        RealEnc { prec: self.prec, lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn neg(&self) -> RealEnc {
        RealEnc { prec: self.prec, lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    /// Exact scaling by an integer.
    pub fn scale_int(&self, c: &BigInt) -> RealEnc {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            RealEnc { prec: self.prec, lo: b, hi: a }
        } else {
            RealEnc { prec: self.prec, lo: a, hi: b }
        }
    }

    /// Outward-rounded division by a positive integer.
    pub fn div_int(&self, d: &BigInt) -> RealEnc {
        debug_assert!(d.is_positive());
        RealEnc { prec: self.prec, lo: div_floor(&self.lo, d), hi: div_ceil(&self.hi, d) }
    }

    /// Outward-rounded product.
    pub fn mul(&self, other: &RealEnc) -> RealEnc {
        debug_assert_eq!(self.prec, other.prec);
        let cands =
            [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        let scale = BigInt::one() << self.prec;
        RealEnc { prec: self.prec, lo: div_floor(&lo, &scale), hi: div_ceil(&hi, &scale) }
    }

    pub fn square(&self) -> RealEnc {
        let scale = BigInt::one() << self.prec;
        let (lo, hi) = if self.lo.is_negative() && self.hi.is_positive() {
            let m = self.lo.abs().max(self.hi.abs());
            (BigInt::zero(), &m * &m)
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            (a.clone().min(b.clone()), a.max(b))
        };
        RealEnc { prec: self.prec, lo: div_floor(&lo, &scale), hi: div_ceil(&hi, &scale) }
    }

    /// Square root of a nonnegative interval (lo clamped to 0).
    pub fn sqrt(&self) -> RealEnc {
        let lo = self.lo.clone().max(BigInt::zero());
        let scale = BigInt::one() << self.prec;
        let lo_scaled = &lo * &scale;
        let hi_scaled = &self.hi * &scale;
        let rt_lo = lo_scaled.sqrt();
        let mut rt_hi = hi_scaled.sqrt();
        if &rt_hi * &rt_hi < hi_scaled {
            rt_hi += 1;
        }
        RealEnc { prec: self.prec, lo: rt_lo, hi: rt_hi }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign of the enclosed value, when the interval separates from 0.
    pub fn certain_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Compares against an exact rational, when separated.
    pub fn compare_rational(&self, r: &BigRational) -> Option<Ordering> {
        let s = RealEnc::from_rational(r, self.prec);
        if self.hi < s.lo {
            Some(Ordering::Less)
        } else if self.lo > s.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Width of the interval as a rational.
    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << self.prec)
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, BigInt::one() << (self.prec + 1))
    }

    /// Certified radius: half the width, as a rational.
    pub fn radius(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << (self.prec + 1))
    }
}

impl ComplexEnc {
    pub fn zero(prec: u32) -> Self {
        ComplexEnc { re: RealEnc::zero(prec), im: RealEnc::zero(prec) }
    }

    pub fn add(&self, other: &ComplexEnc) -> ComplexEnc {
        ComplexEnc { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn scale_int(&self, c: &BigInt) -> ComplexEnc {
        ComplexEnc { re: self.re.scale_int(c), im: self.im.scale_int(c) }
    }

    pub fn div_int(&self, d: &BigInt) -> ComplexEnc {
        ComplexEnc { re: self.re.div_int(d), im: self.im.div_int(d) }
    }

    pub fn modulus_sq(&self) -> RealEnc {
        self.re.square().add(&self.im.square())
    }

    pub fn modulus(&self) -> RealEnc {
        self.modulus_sq().sqrt()
    }

    /// An upper bound on the distance from the rectangle center to any
    /// contained point.
    pub fn radius(&self) -> BigRational {
        // width/2 in each coordinate; the diagonal bounds the distance
        self.re.radius() + self.im.radius()
    }
}

// ---------------------------------------------------------------------------
// π and roots of unity
// ---------------------------------------------------------------------------

/// `atan(1/x)` scaled by `2^prec`, bracketed by the alternating series.
fn atan_inv(x: u64, prec: u32) -> (BigInt, BigInt) {
    let scale = BigInt::one() << prec;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    // pw brackets x^{-(2k+1)}·2^prec
    let mut pw_lo = div_floor(&scale, &x);
    let mut pw_hi = div_ceil(&scale, &x);
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    let mut k = 0u64;
    loop {
        let term_lo = div_floor(&pw_lo, &BigInt::from(2 * k + 1));
        let term_hi = div_ceil(&pw_hi, &BigInt::from(2 * k + 1));
        if k % 2 == 0 {
            s_lo += &term_lo;
            s_hi += &term_hi;
        } else {
            s_lo -= &term_hi;
            s_hi -= &term_lo;
        }
        if pw_hi <= BigInt::one() {
            // alternating tail is at most the next (sub-ulp) term
            s_lo -= &pw_hi;
            s_hi += &pw_hi;
            break;
        }
        pw_lo = div_floor(&pw_lo, &x2);
        pw_hi = div_ceil(&pw_hi, &x2);
        k += 1;
    }
    (s_lo, s_hi)
}

/// π bracketed at the given precision, via 16·atan(1/5) − 4·atan(1/239).
pub fn pi(prec: u32) -> RealEnc {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, BigInt)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some((lo, hi)) = cache.lock().unwrap().get(&prec) {
        return RealEnc { prec, lo: lo.clone(), hi: hi.clone() };
    }
    let guard = prec + 16;
    let (a_lo, a_hi) = atan_inv(5, guard);
    let (b_lo, b_hi) = atan_inv(239, guard);
    let lo_g = 16 * a_lo - 4 * b_hi;
    let hi_g = 16 * a_hi - 4 * b_lo;
    let sh = BigInt::one() << 16;
    let lo = div_floor(&lo_g, &sh);
    let hi = div_ceil(&hi_g, &sh);
    cache.lock().unwrap().insert(prec, (lo.clone(), hi.clone()));
    RealEnc { prec, lo, hi }
}

/// Nonnegative interval product with outward rounding (internal to the
/// Taylor loops, where both operands are ≥ 0).
fn imul_nn(a: &(BigInt, BigInt), b: &(BigInt, BigInt), prec: u32) -> (BigInt, BigInt) {
    let scale = BigInt::one() << prec;
    (div_floor(&(&a.0 * &b.0), &scale), div_ceil(&(&a.1 * &b.1), &scale))
}

/// cos and sin of `z` for `z` a nonnegative interval within `[0, π/4]`.
fn cos_sin_taylor(z: &(BigInt, BigInt), prec: u32) -> ((BigInt, BigInt), (BigInt, BigInt)) {
    let one = BigInt::one() << prec;
    let z2 = imul_nn(z, z, prec);
    // cos: Σ (−1)^k z^{2k} / (2k)!
    let mut term = (one.clone(), one.clone());
    let mut cos = (one.clone(), one.clone());
    let mut k = 1u64;
    loop {
        term = imul_nn(&term, &z2, prec);
        let d = BigInt::from((2 * k - 1) * (2 * k));
        term = (div_floor(&term.0, &d), div_ceil(&term.1, &d));
        if k % 2 == 1 {
            cos.0 -= &term.1;
            cos.1 -= &term.0;
        } else {
            cos.0 += &term.0;
            cos.1 += &term.1;
        }
        if term.1 <= BigInt::one() {
            cos.0 -= &term.1;
            cos.1 += &term.1;
            break;
        }
        k += 1;
    }
    // sin: z · Σ (−1)^k z^{2k} / (2k+1)!
    let mut term = (one.clone(), one.clone());
    let mut u = (one.clone(), one);
    let mut k = 1u64;
    loop {
        term = imul_nn(&term, &z2, prec);
        let d = BigInt::from((2 * k) * (2 * k + 1));
        term = (div_floor(&term.0, &d), div_ceil(&term.1, &d));
        if k % 2 == 1 {
            u.0 -= &term.1;
            u.1 -= &term.0;
        } else {
            u.0 += &term.0;
            u.1 += &term.1;
        }
        if term.1 <= BigInt::one() {
            u.0 -= &term.1;
            u.1 += &term.1;
            break;
        }
        k += 1;
    }
    let u_lo = u.0.max(BigInt::zero());
    let sin = imul_nn(&(u_lo, u.1), z, prec);
    (cos, sin)
}

/// `e(num/den) = (cos 2πt, sin 2πt)` for `0 ≤ num < den`, certified.
pub fn root_of_unity_enclosure(num: u64, den: u64, prec: u32) -> ComplexEnc {
    debug_assert!(num < den);
    // exact symmetry reduction of the fraction into [0, 1/8]
    #[derive(Clone, Copy)]
    enum Step {
        Conj,    // t → 1−t:   (c, s) = (c', −s')
        Quarter, // t → t−1/4: (c, s) = (−s', c')
        Mirror,  // t → 1/4−t: (c, s) = (s', c')
    }
    let mut steps = Vec::new();
    let (mut n, d) = (num as i128, den as i128);
    if 2 * n > d {
        steps.push(Step::Conj);
        n = d - n;
    }
    if 4 * n > d {
        steps.push(Step::Quarter);
        n = 4 * n - d; // works at denominator 4d
    } else {
        n *= 4;
    }
    // now the phase is n/(4d) with n/(4d) ≤ 1/4
    let dd = 4 * d;
    if 8 * n > dd {
        steps.push(Step::Mirror);
        n = d - n; // 1/4 − n/(4d) = (d − n)/(4d)
    }
    debug_assert!(8 * n <= dd, "phase reduced to [0, 1/8]");

    // z = 2π n/dd
    let pi_enc = pi(prec);
    let two_n = BigInt::from(2 * n);
    let ddb = BigInt::from(dd);
    let z = (
        div_floor(&(&pi_enc.lo * &two_n), &ddb),
        div_ceil(&(&pi_enc.hi * &two_n), &ddb),
    );
    let (c, s) = cos_sin_taylor(&z, prec);
    let mut cos = RealEnc { prec, lo: c.0, hi: c.1 };
    let mut sin = RealEnc { prec, lo: s.0, hi: s.1 };
    for step in steps.iter().rev() {
        match step {
            Step::Mirror => std::mem::swap(&mut cos, &mut sin),
            Step::Quarter => {
                let new_cos = sin.neg();
                sin = cos;
                cos = new_cos;
            }
            Step::Conj => sin = sin.neg(),
        }
    }
    ComplexEnc { re: cos, im: sin }
}

/// A certified rectangle containing the exact cyclotomic value.
pub fn enclose(v: &CycloValue, prec: u32) -> ComplexEnc {
    if let Some(r) = v.as_rational() {
        return ComplexEnc { re: RealEnc::from_rational(&r, prec), im: RealEnc::zero(prec) };
    }
    let n = v.level();
    let mut acc = ComplexEnc::zero(prec);
    for (j, c) in v.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let root = root_of_unity_enclosure(j as u64, n, prec);
        acc = acc.add(&root.scale_int(c));
    }
    acc.div_int(v.den())
}

// ---------------------------------------------------------------------------
// certified comparisons
// ---------------------------------------------------------------------------

/// Total comparison of two *real* cyclotomic values: exact equality first,
/// then certified separation with doubled precision up to [`PREC_CAP`].
pub fn compare_real(a: &CycloValue, b: &CycloValue) -> Result<Ordering> {
    debug_assert!(a.is_real() && b.is_real(), "compare_real needs conjugation-fixed values");
    let d = a.sub(b);
    if d.is_zero() {
        return Ok(Ordering::Equal);
    }
    let mut prec = 64;
    while prec <= PREC_CAP {
        let enc = enclose(&d, prec);
        if let Some(sign) = enc.re.certain_sign() {
            return Ok(sign);
        }
        prec *= 2;
    }
    Err(Error::CompareExhausted(PREC_CAP))
}

/// Compares `|a|` with the nonnegative rational `r`, through the squares.
pub fn compare_modulus_with_rational(a: &CycloValue, r: &BigRational) -> Result<Ordering> {
    debug_assert!(!r.is_negative());
    let m2 = a.abs_sq();
    let r2 = CycloValue::from_rational(&(r * r));
    compare_real(&m2, &r2)
}

/// Compares the moduli of two values, through the squares.
pub fn compare_moduli(a: &CycloValue, b: &CycloValue) -> Result<Ordering> {
    compare_real(&a.abs_sq(), &b.abs_sq())
}

// ---------------------------------------------------------------------------
// deterministic decimal rendering
// ---------------------------------------------------------------------------

/// Rounds an exact rational to `digits` decimal places (half away from
/// zero) and formats it with a fixed number of fraction digits.
pub fn decimal_of_rational(r: &BigRational, digits: u32) -> String {
    let pow = BigInt::from(10u32).pow(digits);
    let scaled = r * BigRational::from_integer(pow.clone());
    // round half away from zero
    let num = scaled.numer();
    let den = scaled.denom();
    let twice = BigInt::from(2) * num;
    let rounded: BigInt = if num.is_negative() {
        -div_floor(&(-twice + den), &(BigInt::from(2) * den))
    } else {
        div_floor(&(twice + den), &(BigInt::from(2) * den))
    };
    let neg = rounded.is_negative();
    let abs = rounded.abs();
    let (int_part, frac_part) = abs.div_rem(&pow);
    let frac_str = format!("{:0>width$}", frac_part.to_string(), width = digits as usize);
    let sign = if neg && (!int_part.is_zero() || frac_part != BigInt::zero()) { "-" } else { "" };
    format!("{sign}{int_part}.{frac_str}")
}

/// Decimal rendering of the midpoint of an enclosure, valid to `digits`
/// places when the width check passes.
pub fn decimal_of_enclosure(enc: &RealEnc, digits: u32) -> String {
    decimal_of_rational(&enc.midpoint(), digits)
}

/// A printable certified decimal for any cyclotomic value:
/// `re+im i` with 15 digits, computed at enough precision that the
/// rectangle radius is far below the last digit.
pub fn certified_decimal(v: &CycloValue, digits: u32) -> String {
    if let Some(r) = v.as_rational() {
        return decimal_of_rational(&r, digits);
    }
    let prec = (digits * 4 + 64).max(128);
    let enc = enclose(v, prec);
    let re = decimal_of_enclosure(&enc.re, digits);
    let im_mid = enc.im.midpoint();
    let im = decimal_of_rational(&im_mid.abs(), digits);
    let sign = if im_mid.is_negative() { '-' } else { '+' };
    format!("{re}{sign}{im}i")
}
