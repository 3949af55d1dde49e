//! Rigorous `ln` and `exp` enclosures by fixed-point series with explicit
//! error counts (in units of the last place).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{q_to_f64, qi, RatInterval, Q};

fn from_fixed(v: &BigInt, err: u64, w: u32) -> RatInterval {
    let den = BigInt::one() << w as usize;
    let e = BigInt::from(err);
    RatInterval::new(Q::new(v - &e, den.clone()), Q::new(v + &e, den))
}

/// `atanh(z)·2^w` for rational `0 ≤ z ≤ 1/3`, with its error bound in ulps.
fn atanh_fixed(z: &Q, w: u32) -> (BigInt, u64) {
    let one = BigInt::one() << w as usize;
    let z2 = z * z;
    let (n2, d2) = (z2.numer().clone(), z2.denom().clone());
    let mut p = (z.numer() * &one).div_floor(z.denom());
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !p.is_zero() {
        sum += &p / BigInt::from(2 * k + 1);
        p = (&p * &n2).div_floor(&d2);
        k += 1;
    }
    // Each power carries at most 2 ulps of accumulated floor error, each
    // quotient one more; the omitted tail is below one ulp.
    (sum, 3 * k + 4)
}

/// `ln 2 · 2^w` with error bound.
fn ln2_fixed(w: u32) -> (BigInt, u64) {
    let (v, e) = atanh_fixed(&Q::new(BigInt::one(), BigInt::from(3)), w);
    (v << 1usize, 2 * e)
}

/// Enclosure of `ln x`, `x > 0`, of width at most `2^{-bits}`.
pub fn ln_interval(x: &Q, bits: u32) -> Result<RatInterval> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument(
            "logarithm of a non-positive value".into(),
        ));
    }
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow = |e: i64| -> Q {
        if e >= 0 {
            Q::from_integer(BigInt::one() << e as usize)
        } else {
            Q::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut m = x / pow(k);
    let two = qi(2);
    if m < Q::one() {
        k -= 1;
        m *= &two;
    } else if m >= two {
        k += 1;
        m /= &two;
    }
    let w = bits + 40 + (64 - k.unsigned_abs().leading_zeros());
    let z = (&m - Q::one()) / (&m + Q::one());
    let (a, ea) = atanh_fixed(&z, w);
    let (l2, el2) = ln2_fixed(w);
    let v = BigInt::from(k) * l2 + (a << 1usize);
    let err = k.unsigned_abs() * el2 + 2 * ea;
    Ok(from_fixed(&v, err, w))
}

/// `exp(r)·2^w` for `|r| ≤ 1/2`.
fn exp_small_fixed(r: &Q, w: u32) -> (BigInt, u64) {
    let one = BigInt::one() << w as usize;
    let mut t = one.clone();
    let mut sum = one;
    let mut i = 1u64;
    while !t.is_zero() {
        t = (&t * r.numer()).div_floor(&(r.denom() * BigInt::from(i)));
        sum += &t;
        i += 1;
    }
    (sum, 2 * i + 4)
}

/// Enclosure of `exp x` with relative width at most `2^{-bits}`.
pub fn exp_interval(x: &Q, bits: u32) -> Result<RatInterval> {
    let xf = q_to_f64(x);
    if !xf.is_finite() || xf.abs() > 1e7 {
        return Err(Error::Overflow(format!("exponent {xf} out of range")));
    }
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let w = bits + 48;
    let (l2, el2) = ln2_fixed(w);
    let l2i = from_fixed(&l2, el2, w);
    let kq = qi(k);
    // r = x − k ln 2, enclosed.
    let r = l2i.scale(&kq).scale(&qi(-1)).shift(x);
    let (lo_v, lo_e) = exp_small_fixed(&r.lo, w);
    let (hi_v, hi_e) = exp_small_fixed(&r.hi, w);
    let den = BigInt::one() << w as usize;
    let lo = Q::new(lo_v - BigInt::from(lo_e), den.clone());
    let hi = Q::new(hi_v + BigInt::from(hi_e), den);
    let scale = if k >= 0 {
        Q::from_integer(BigInt::one() << k as usize)
    } else {
        Q::new(BigInt::one(), BigInt::one() << (-k) as usize)
    };
    Ok(RatInterval::new(lo * &scale, hi * &scale))
}

/// Enclosure of `e` from `Σ 1/k!` with the tail bound `2/(K+1)!`.
pub fn euler_e_interval(bits: u32) -> RatInterval {
    let mut sum = Q::zero();
    let mut fact = BigInt::one();
    let mut k = 0u64;
    loop {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        sum += Q::new(BigInt::one(), fact.clone());
        let next = &fact * BigInt::from(k + 1);
        // Tail after the k-th term is below 2/(k+1)!.
        if next.bits() as u32 > bits + 2 {
            let tail = Q::new(BigInt::from(2), next);
            return RatInterval::new(sum.clone(), sum + tail);
        }
        k += 1;
    }
}

/// Relative width of an interval (against its lower magnitude), as `f64`.
pub fn rel_width(iv: &RatInterval) -> f64 {
    let lo = q_to_f64(&iv.lo).abs();
    let w = q_to_f64(&iv.width());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        w / lo
    }
}

pub fn to_f64_mid(iv: &RatInterval) -> f64 {
    q_to_f64(&iv.mid())
}
