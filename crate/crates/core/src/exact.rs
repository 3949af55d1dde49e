//! Exact arithmetic in `Q(√d)[i]` and rational intervals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Correctly scaled conversion; relative error within a couple of ulps even
/// when numerator and denominator overflow `f64`.
pub fn bigint_to_f64(n: &BigInt) -> f64 {
    if let Some(v) = n.to_i64() {
        return v as f64;
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n.abs() >> shift).to_u64().unwrap_or(u64::MAX);
    let v = top as f64 * 2f64.powi(shift as i32);
    if n.is_negative() {
        -v
    } else {
        v
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (x.numer().to_i64(), x.denom().to_i64()) {
        if n.unsigned_abs() < (1 << 53) && d < (1 << 53) {
            return n as f64 / d as f64;
        }
    }
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = 64 - (nb - db);
    let (n, d) = if shift >= 0 {
        (x.numer().abs() << shift as u64, x.denom().clone())
    } else {
        (x.numer().abs(), x.denom() << (-shift) as u64)
    };
    let quot = (n / d).to_u128().unwrap_or(u128::MAX) as f64;
    let v = scale2(quot, -shift);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

fn scale2(v: f64, e: i64) -> f64 {
    // Split the exponent so intermediate powers never overflow.
    let mut v = v;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

/// `ln n` for `n > 0`.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 63 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 63;
    let top = (n >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_q(x: &Q) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::InvalidCoefficient(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::InvalidCoefficient(format!(
            "zero denominator in {s:?}"
        )));
    }
    Ok(Q::new(n, d))
}

/// Always `p/q`, also for integers.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Largest `r` with `r² ≤ n`.
pub fn isqrt_big(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    n.sqrt()
}

pub fn is_square_big(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &(&r * &r) == n
    }
}

/// Writes `n = c² d` with `d` squarefree for small enough `n`; larger inputs
/// use trial division up to the cube root followed by a square test.
pub fn squarefree_big(n: &BigInt) -> Result<(BigInt, BigInt)> {
    if !n.is_positive() {
        return Err(Error::InvalidArgument(
            "squarefree part of a non-positive integer".into(),
        ));
    }
    if let Some(v) = n.to_u64() {
        if v <= crate::arith::MAX_INPUT {
            let (c, d) = crate::arith::squarefree_part(v)?;
            return Ok((BigInt::from(c), BigInt::from(d)));
        }
    }
    let mut m = n.clone();
    let (mut c, mut d) = (BigInt::one(), BigInt::one());
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1u64 << 20);
    while p < limit && &p * &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        c *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= &p;
        }
        p += 1;
    }
    if is_square_big(&m) {
        c *= m.sqrt();
    } else if &p * &p * &p > m {
        // m is 1, a prime, or a product of two distinct primes.
        d *= m;
    } else {
        return Err(Error::Overflow(format!("cannot factor {n} at desk scale")));
    }
    Ok((c, d))
}

/// `a + b√d` with rational `a`, `b` and squarefree `d > 1`, or `b = 0, d = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadRational {
    pub a: Q,
    pub b: Q,
    pub d: BigInt,
}

impl QuadRational {
    pub fn rational(a: Q) -> Self {
        QuadRational {
            a,
            b: Q::zero(),
            d: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(qi(v))
    }

    /// `a + b√d`; `d` must be a positive squarefree integer.
    pub fn new(a: Q, b: Q, d: BigInt) -> Self {
        if b.is_zero() || d.is_one() {
            let a = if d.is_one() { a + b } else { a };
            return Self::rational(a);
        }
        QuadRational { a, b, d }
    }

    /// `√r` for a positive rational, as `(s/den)√d`.
    pub fn sqrt_of(r: &Q) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidCoefficient(
                "square root of a non-positive rational".into(),
            ));
        }
        let prod = r.numer() * r.denom();
        let (c, d) = squarefree_big(&prod)?;
        let coeff = Q::new(c, r.denom().clone());
        Ok(QuadRational::new(Q::zero(), coeff, d))
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn field(&self, other: &Self) -> Result<BigInt> {
        if self.is_rational() {
            Ok(other.d.clone())
        } else if other.is_rational() || self.d == other.d {
            Ok(self.d.clone())
        } else {
            Err(Error::InvalidArgument(format!(
                "values from Q(√{}) and Q(√{}) cannot be combined exactly",
                self.d, other.d
            )))
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        Ok(QuadRational::new(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg_ref())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        let dq = Q::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * dq;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(QuadRational::new(a, b, d))
    }

    pub fn scale(&self, k: &Q) -> Self {
        QuadRational::new(&self.a * k, &self.b * k, self.d.clone())
    }

    pub fn neg_ref(&self) -> Self {
        QuadRational::new(-&self.a, -&self.b, self.d.clone())
    }

    pub fn conj(&self) -> Self {
        QuadRational::new(self.a.clone(), -&self.b, self.d.clone())
    }

    /// `a² − d b²`.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * Q::from_integer(self.d.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        let n = self.norm();
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        // Opposite signs: compare a² with d b².
        match self.norm().cmp(&Q::zero()) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn cmp_q(&self, x: &Q) -> Ordering {
        let diff = QuadRational::new(&self.a - x, self.b.clone(), self.d.clone());
        diff.signum().cmp(&0)
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            self.neg_ref()
        } else {
            self.clone()
        }
    }

    /// Accurate to a few ulps; the opposite-sign case is rationalized so no
    /// cancellation occurs.
    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return q_to_f64(&self.a);
        }
        let sd = bigint_to_f64(&self.d).sqrt();
        let af = q_to_f64(&self.a);
        let bf = q_to_f64(&self.b) * sd;
        if sign_of(&self.a) * sign_of(&self.b) >= 0 {
            return af + bf;
        }
        // a + b√d = (a² − d b²) / (a − b√d), and a, −b√d share a sign.
        q_to_f64(&self.norm()) / (af - bf)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return floor_q(&self.a);
        }
        // Write the value as (P + R√d)/D with D > 0. Then R√d lies strictly
        // between consecutive integers, so the floor is that of L/D where L
        // is the integer just below P + R√d.
        let den = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&den / self.a.denom());
        let r = self.b.numer() * (&den / self.b.denom());
        let s = isqrt_big(&(&r * &r * &self.d));
        let l = if r.is_positive() { p + s } else { p - s - 1 };
        l.div_floor(&den)
    }
}

fn sign_of(x: &Q) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl fmt::Display for QuadRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", fmt_q(&self.a))
        } else {
            write!(f, "{}+{}*sqrt:{}", fmt_q(&self.a), fmt_q(&self.b), self.d)
        }
    }
}

impl std::str::FromStr for QuadRational {
    type Err = Error;

    /// Accepts `p/q` or `p/q+r/s*sqrt:d`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some((head, d)) = s.split_once("*sqrt:") {
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCoefficient(format!("bad radicand in {s:?}")))?;
            if !d.is_positive() {
                return Err(Error::InvalidCoefficient(format!("bad radicand in {s:?}")));
            }
            // Split at the '+' separating the rational and surd parts, which
            // follows the first component's denominator.
            let split = head[1..]
                .find('+')
                .map(|i| i + 1)
                .ok_or_else(|| Error::InvalidCoefficient(format!("malformed surd {s:?}")))?;
            let a = parse_q(&head[..split])?;
            let b = parse_q(&head[split + 1..])?;
            let (c, sqf) = squarefree_big(&d)?;
            Ok(QuadRational::new(a, b * Q::from_integer(c), sqf))
        } else {
            Ok(QuadRational::rational(parse_q(s)?))
        }
    }
}

/// `re + i·im` with components in a common `Q(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: QuadRational,
    pub im: QuadRational,
}

impl ExactComplex {
    pub fn new(re: QuadRational, im: QuadRational) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(re: QuadRational) -> Self {
        ExactComplex {
            re,
            im: QuadRational::zero(),
        }
    }

    pub fn gaussian(re: Q, im: Q) -> Self {
        ExactComplex {
            re: QuadRational::rational(re),
            im: QuadRational::rational(im),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::gaussian(qi(re), qi(im))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_gaussian(&self) -> bool {
        self.re.is_rational() && self.im.is_rational()
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        Ok(ExactComplex {
            re: self.re.try_add(&o.re)?,
            im: self.im.try_add(&o.im)?,
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        Ok(ExactComplex {
            re: self.re.try_sub(&o.re)?,
            im: self.im.try_sub(&o.im)?,
        })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        let re = self.re.try_mul(&o.re)?.try_sub(&self.im.try_mul(&o.im)?)?;
        let im = self.re.try_mul(&o.im)?.try_add(&self.im.try_mul(&o.re)?)?;
        Ok(ExactComplex { re, im })
    }

    pub fn scale(&self, k: &Q) -> Self {
        ExactComplex {
            re: self.re.scale(k),
            im: self.im.scale(k),
        }
    }

    pub fn conj(&self) -> Self {
        ExactComplex {
            re: self.re.clone(),
            im: self.im.neg_ref(),
        }
    }

    pub fn neg_ref(&self) -> Self {
        ExactComplex {
            re: self.re.neg_ref(),
            im: self.im.neg_ref(),
        }
    }

    /// `|z|²`, exact.
    pub fn abs_sq(&self) -> Result<QuadRational> {
        self.re
            .try_mul(&self.re)?
            .try_add(&self.im.try_mul(&self.im)?)
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        let n = o.abs_sq()?;
        let inv = n.inv()?;
        let num = self.try_mul(&o.conj())?;
        Ok(ExactComplex {
            re: num.re.try_mul(&inv)?,
            im: num.im.try_mul(&inv)?,
        })
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn abs_f64(&self) -> f64 {
        let (a, b) = self.to_f64();
        a.hypot(b)
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + i({})", self.re, self.im)
    }
}

/// A closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Q,
    pub hi: Q,
}

impl RatInterval {
    pub fn new(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    /// Width at most `2^{-bits}`.
    pub fn within_bits(&self, bits: u32) -> bool {
        let w = self.width();
        w.is_zero() || w * Q::from_integer(BigInt::one() << bits as usize) <= Q::one()
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / qi(2)
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Q::zero())
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let lo = if self.lo > o.lo {
            self.lo.clone()
        } else {
            o.lo.clone()
        };
        let hi = if self.hi < o.hi {
            self.hi.clone()
        } else {
            o.hi.clone()
        };
        (lo <= hi).then_some(RatInterval { lo, hi })
    }

    pub fn scale(&self, k: &Q) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn shift(&self, k: &Q) -> Self {
        RatInterval {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    pub fn square(&self) -> Self {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            RatInterval {
                lo: Q::zero(),
                hi: a.max(b),
            }
        } else if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            RatInterval {
                lo: Q::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
            }
        } else if self.hi <= Q::zero() {
            RatInterval {
                lo: -&self.hi,
                hi: -&self.lo,
            }
        } else {
            self.clone()
        }
    }

    /// Outward-rounded `f64` bounds.
    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (f64_below(&self.lo), f64_above(&self.hi))
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

/// Largest `f64` not above `x` (approximately; one ulp of slack downward).
pub fn f64_below(x: &Q) -> f64 {
    let v = q_to_f64(x);
    v.next_down().next_down()
}

pub fn f64_above(x: &Q) -> f64 {
    let v = q_to_f64(x);
    v.next_up().next_up()
}

/// `2^{-bits}` as a rational.
pub fn pow2_neg(bits: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << bits as usize)
}

pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> QuadRational {
        QuadRational::sqrt_of(&qi(2)).unwrap()
    }

    #[test]
    fn surd_construction_normalizes() {
        let s = QuadRational::sqrt_of(&q(8, 9)).unwrap();
        // √(8/9) = (2/3)√2
        assert_eq!(s.b, q(2, 3));
        assert_eq!(s.d, BigInt::from(2));
        let r = QuadRational::sqrt_of(&q(9, 4)).unwrap();
        assert!(r.is_rational());
        assert_eq!(r.a, q(3, 2));
    }

    #[test]
    fn pell_residual_is_tiny() {
        let x = QuadRational::new(qi(8119), qi(-5741), BigInt::from(2));
        let v = x.to_f64();
        let expected = 1.0 / (8119.0 + 5741.0 * 2f64.sqrt());
        // 8119² − 2·5741² = −1, so 8119 < 5741√2.
        assert!(v < 0.0);
        assert!(((v.abs() - expected) / expected).abs() < 1e-14);
        assert_eq!(x.signum(), -1);
        assert_eq!(
            QuadRational::new(qi(-8119), qi(5741), BigInt::from(2)).signum(),
            1
        );
    }

    #[test]
    fn field_arithmetic() {
        let s = sqrt2();
        let two = s.try_mul(&s).unwrap();
        assert_eq!(two, QuadRational::from_int(2));
        let x = QuadRational::new(qi(3), qi(2), BigInt::from(2));
        let y = x.inv().unwrap();
        assert_eq!(x.try_mul(&y).unwrap(), QuadRational::one());
        let t = QuadRational::sqrt_of(&qi(3)).unwrap();
        assert!(s.try_add(&t).is_err());
    }

    #[test]
    fn floor_of_surds() {
        assert_eq!(sqrt2().floor(), BigInt::from(1));
        assert_eq!(sqrt2().neg_ref().floor(), BigInt::from(-2));
        let big = QuadRational::new(qi(0), qi(10_000_000), BigInt::from(2));
        assert_eq!(big.floor(), BigInt::from(14_142_135));
    }

    #[test]
    fn complex_division_roundtrip() {
        let z = ExactComplex::new(QuadRational::from_int(4), QuadRational::from_int(3));
        let w = ExactComplex::new(QuadRational::from_int(0), sqrt2());
        let u = z.try_div(&w).unwrap();
        assert_eq!(u.try_mul(&w).unwrap(), z);
    }

    #[test]
    fn quad_text_roundtrip() {
        for x in [
            QuadRational::new(q(1, 2), q(-3, 7), BigInt::from(5)),
            QuadRational::new(q(-1, 2), q(3, 7), BigInt::from(2)),
            QuadRational::rational(q(-5, 3)),
        ] {
            let s = x.to_string();
            assert_eq!(s.parse::<QuadRational>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn big_conversions() {
        let n = BigInt::from(10).pow(400);
        assert!((ln_bigint(&n) - 400.0 * 10f64.ln()).abs() < 1e-9);
        let x = Q::new(BigInt::from(10).pow(300) + 1, BigInt::from(10).pow(299));
        assert!((q_to_f64(&x) - 10.0).abs() < 1e-14);
        let tiny = Q::new(BigInt::one(), BigInt::from(10).pow(320));
        assert!(q_to_f64(&tiny) == 0.0 || q_to_f64(&tiny) < 1e-300);
    }

    #[test]
    fn interval_ops() {
        let a = RatInterval::new(qi(-1), qi(2));
        let b = RatInterval::new(qi(3), qi(4));
        assert_eq!(&a * &b, RatInterval::new(qi(-4), qi(8)));
        assert_eq!(a.square(), RatInterval::new(qi(0), qi(4)));
        assert!(RatInterval::new(qi(0), q(1, 1024)).within_bits(10));
        assert!(!RatInterval::new(qi(0), q(1, 1023)).within_bits(10));
    }
}
