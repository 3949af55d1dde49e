//! Real coefficients given exactly or by certified, refinable enclosures.

use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_q, isqrt_big, parse_q, q_to_f64, qi, QuadRational, RatInterval, Q};
use crate::fixed::euler_e_interval;

pub const DEFAULT_PMAX: u32 = 4096;
/// Hard ceiling for any precision request, whatever the configuration says.
pub const PMAX_CEILING: u32 = 1 << 20;

/// `TORUSLAB_PMAX` if set and valid, else [`DEFAULT_PMAX`].
pub fn default_pmax() -> u32 {
    std::env::var("TORUSLAB_PMAX")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&v| (64..=PMAX_CEILING).contains(&v))
        .unwrap_or(DEFAULT_PMAX)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealSpec {
    Rational(Q),
    /// `√r` for a positive rational `r` that is not a rational square.
    Sqrt(Q),
    /// The unique root of `poly` (coefficients from the constant term up)
    /// inside `[lo, hi]`.
    AlgebraicRoot {
        poly: Vec<BigInt>,
        lo: Q,
        hi: Q,
    },
    /// `mantissa · 10^exponent`, taken as exact.
    DecimalString {
        mantissa: BigInt,
        exponent: i64,
    },
    /// `Σ_{j≥1} b^{-j!}`.
    LiouvilleSeries(u32),
    /// `0.123456789101112…` in base `b`.
    Champernowne(u32),
    EulerE,
}

impl RealSpec {
    pub fn rational(r: Q) -> Self {
        RealSpec::Rational(r)
    }

    pub fn sqrt(r: Q) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidCoefficient(format!(
                "sqrt of non-positive {}",
                fmt_q(&r)
            )));
        }
        if crate::exact::is_square_big(r.numer()) && crate::exact::is_square_big(r.denom()) {
            return Err(Error::InvalidCoefficient(format!(
                "sqrt:{} is rational; use rat: instead",
                fmt_q(&r)
            )));
        }
        Ok(RealSpec::Sqrt(r))
    }

    /// Validates the isolating interval by a strict sign change and a Sturm
    /// count of exactly one root.
    pub fn algebraic(poly: Vec<BigInt>, lo: Q, hi: Q) -> Result<Self> {
        let poly = trim(poly);
        if poly.len() < 2 {
            return Err(Error::InvalidCoefficient(
                "polynomial must have degree ≥ 1".into(),
            ));
        }
        if lo >= hi {
            return Err(Error::InvalidCoefficient(
                "isolating interval must have lo < hi".into(),
            ));
        }
        let sl = sign(&eval_poly(&poly, &lo));
        let sh = sign(&eval_poly(&poly, &hi));
        if sl * sh >= 0 {
            return Err(Error::InvalidCoefficient(
                "polynomial must change sign strictly across the interval".into(),
            ));
        }
        let roots = sturm_count(&poly, &lo, &hi);
        if roots != 1 {
            return Err(Error::InvalidCoefficient(format!(
                "interval contains {roots} real roots, expected exactly one"
            )));
        }
        Ok(RealSpec::AlgebraicRoot { poly, lo, hi })
    }

    pub fn decimal(mantissa: BigInt, exponent: i64) -> Self {
        RealSpec::DecimalString { mantissa, exponent }
    }

    pub fn liouville(base: u32) -> Result<Self> {
        check_base(base)?;
        Ok(RealSpec::LiouvilleSeries(base))
    }

    pub fn champernowne(base: u32) -> Result<Self> {
        check_base(base)?;
        Ok(RealSpec::Champernowne(base))
    }

    /// Exact value when the class is rational or a quadratic surd.
    pub fn exact_value(&self) -> Option<QuadRational> {
        match self {
            RealSpec::Rational(r) => Some(QuadRational::rational(r.clone())),
            RealSpec::Sqrt(r) => QuadRational::sqrt_of(r).ok(),
            RealSpec::DecimalString { .. } => Some(QuadRational::rational(self.decimal_value()?)),
            _ => None,
        }
    }

    pub fn decimal_value(&self) -> Option<Q> {
        match self {
            RealSpec::DecimalString { mantissa, exponent } => {
                let ten = BigInt::from(10);
                Some(if *exponent >= 0 {
                    Q::from_integer(mantissa * ten.pow(*exponent as u32))
                } else {
                    Q::new(mantissa.clone(), ten.pow((-exponent) as u32))
                })
            }
            _ => None,
        }
    }

    /// Number of decimal digits after the point carried by a decimal input.
    pub fn decimal_digits(&self) -> Option<u32> {
        match self {
            RealSpec::DecimalString { exponent, .. } => Some((-exponent).max(0) as u32),
            _ => None,
        }
    }

    /// `Some(true)` when the value is known to be irrational, `Some(false)`
    /// when it is rational, `None` when undetermined.
    pub fn is_irrational(&self) -> Option<bool> {
        match self {
            RealSpec::Rational(_) | RealSpec::DecimalString { .. } => Some(false),
            RealSpec::Sqrt(_) => Some(true),
            RealSpec::LiouvilleSeries(_) | RealSpec::Champernowne(_) | RealSpec::EulerE => {
                Some(true)
            }
            RealSpec::AlgebraicRoot { .. } => match self.algebraic_rational_root() {
                Ok(Some(_)) => Some(false),
                Ok(None) => Some(true),
                Err(_) => None,
            },
        }
    }

    /// For algebraic roots: the root itself if it is rational, found by the
    /// rational root theorem.
    pub fn algebraic_rational_root(&self) -> Result<Option<Q>> {
        let RealSpec::AlgebraicRoot { poly, lo, hi } = self else {
            return Ok(None);
        };
        // Strip factors of x (a zero root).
        let mut p: &[BigInt] = poly;
        while p[0].is_zero() {
            if lo < &Q::zero() && &Q::zero() < hi {
                return Ok(Some(Q::zero()));
            }
            p = &p[1..];
        }
        let to_u64 = |x: &BigInt| {
            x.abs()
                .to_u64()
                .filter(|&v| v <= crate::arith::MAX_INPUT)
                .ok_or_else(|| Error::Overflow("coefficient too large for root search".into()))
        };
        let c0 = to_u64(&p[0])?;
        let cn = to_u64(p.last().unwrap())?;
        let dn = divisors(c0)?;
        let dd = divisors(cn)?;
        for &a in &dn {
            for &b in &dd {
                for s in [-1i64, 1] {
                    let cand = Q::new(BigInt::from(s) * BigInt::from(a), BigInt::from(b));
                    if &cand >= lo && &cand <= hi && eval_poly(poly, &cand).is_zero() {
                        return Ok(Some(cand));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            RealSpec::Rational(_) => "rational",
            RealSpec::Sqrt(_) => "sqrt",
            RealSpec::AlgebraicRoot { .. } => "algebraic",
            RealSpec::DecimalString { .. } => "decimal",
            RealSpec::LiouvilleSeries(_) => "liouville",
            RealSpec::Champernowne(_) => "champernowne",
            RealSpec::EulerE => "e",
        }
    }

    /// Parses the coefficient grammar (`rat:`, `sqrt:`, `alg:`, `dec:`,
    /// `liouville:`, `champernowne:`, `e`). `offset` shifts error positions.
    pub fn parse_at(text: &str, offset: usize) -> Result<Self> {
        let perr = |pos: usize, msg: String| Error::Parse {
            position: offset + pos,
            message: msg,
        };
        if text == "e" {
            return Ok(RealSpec::EulerE);
        }
        let Some((tag, body)) = text.split_once(':') else {
            return Err(perr(0, format!("unknown real {text:?}")));
        };
        let at = tag.len() + 1;
        match tag {
            "rat" => {
                if !body.contains('/') {
                    return Err(perr(at, "rat: expects INT/INT".into()));
                }
                let r = parse_q(body).map_err(|e| coefficient_or_parse(e, offset + at))?;
                Ok(RealSpec::Rational(r))
            }
            "sqrt" => {
                let r = parse_q(body).map_err(|e| coefficient_or_parse(e, offset + at))?;
                RealSpec::sqrt(r)
            }
            "dec" => parse_decimal(body).ok_or_else(|| perr(at, format!("bad decimal {body:?}"))),
            "liouville" => {
                let b: u32 = body
                    .parse()
                    .map_err(|_| perr(at, "expected a base".into()))?;
                RealSpec::liouville(b)
            }
            "champernowne" => {
                let b: u32 = body
                    .parse()
                    .map_err(|_| perr(at, "expected a base".into()))?;
                RealSpec::champernowne(b)
            }
            "alg" => parse_algebraic(body).map_err(|e| match e {
                Error::Parse { position, message } => perr(at + position, message),
                other => other,
            }),
            _ => Err(perr(0, format!("unknown real class {tag:?}"))),
        }
    }
}

impl std::str::FromStr for RealSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RealSpec::parse_at(s, 0)
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Rational(r) => write!(f, "rat:{}", fmt_q(r)),
            RealSpec::Sqrt(r) => {
                if r.denom().is_one() {
                    write!(f, "sqrt:{}", r.numer())
                } else {
                    write!(f, "sqrt:{}", fmt_q(r))
                }
            }
            RealSpec::AlgebraicRoot { poly, lo, hi } => {
                let cs: Vec<String> = poly.iter().rev().map(|c| c.to_string()).collect();
                write!(f, "alg:[{}],[{},{}]", cs.join(","), fmt_q(lo), fmt_q(hi))
            }
            RealSpec::DecimalString { .. } => {
                write!(f, "dec:{}", decimal_text(self))
            }
            RealSpec::LiouvilleSeries(b) => write!(f, "liouville:{b}"),
            RealSpec::Champernowne(b) => write!(f, "champernowne:{b}"),
            RealSpec::EulerE => write!(f, "e"),
        }
    }
}

fn decimal_text(spec: &RealSpec) -> String {
    let RealSpec::DecimalString { mantissa, exponent } = spec else {
        return String::new();
    };
    if *exponent >= 0 {
        let ten = BigInt::from(10).pow(*exponent as u32);
        return (mantissa * ten).to_string();
    }
    let digits = (-exponent) as usize;
    let neg = mantissa.is_negative();
    let mut s = mantissa.abs().to_string();
    if s.len() <= digits {
        s = "0".repeat(digits - s.len() + 1) + &s;
    }
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

fn coefficient_or_parse(e: Error, pos: usize) -> Error {
    match e {
        Error::InvalidCoefficient(m) if m.contains("zero denominator") => {
            Error::InvalidCoefficient(m)
        }
        Error::InvalidCoefficient(m) => Error::Parse {
            position: pos,
            message: m,
        },
        other => other,
    }
}

fn check_base(b: u32) -> Result<()> {
    if (2..=1_000_000).contains(&b) {
        Ok(())
    } else {
        Err(Error::InvalidCoefficient(format!(
            "base {b} must be at least 2"
        )))
    }
}

fn parse_decimal(body: &str) -> Option<RealSpec> {
    let (neg, rest) = match body.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, body),
    };
    let (int, frac) = rest.split_once('.').unwrap_or((rest, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut m: BigInt = digits.parse().ok()?;
    if neg {
        m = -m;
    }
    Some(RealSpec::DecimalString {
        mantissa: m,
        exponent: -(frac.len() as i64),
    })
}

/// `[c_n,…,c_0],[lo,hi]` with coefficients from the leading term down.
fn parse_algebraic(body: &str) -> Result<RealSpec> {
    let perr = |pos: usize, m: &str| Error::Parse {
        position: pos,
        message: m.to_string(),
    };
    let b = body.as_bytes();
    if b.first() != Some(&b'[') {
        return Err(perr(0, "expected '[' starting the coefficient list"));
    }
    let close = body
        .find(']')
        .ok_or_else(|| perr(0, "unterminated coefficient list"))?;
    let mut poly = Vec::new();
    let mut pos = 1;
    for part in body[1..close].split(',') {
        let c: BigInt = part
            .trim()
            .parse()
            .map_err(|_| perr(pos, "expected an integer coefficient"))?;
        poly.push(c);
        pos += part.len() + 1;
    }
    poly.reverse();
    let rest = &body[close + 1..];
    let rest = rest
        .strip_prefix(',')
        .ok_or_else(|| perr(close + 1, "expected ',' before the interval"))?;
    let ipos = close + 2;
    let inner = rest
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| perr(ipos, "expected an interval [lo,hi]"))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| perr(ipos, "interval needs two endpoints"))?;
    let lo = parse_q(lo).map_err(|_| perr(ipos + 1, "bad interval endpoint"))?;
    let hi = parse_q(hi).map_err(|_| perr(ipos + 1, "bad interval endpoint"))?;
    RealSpec::algebraic(poly, lo, hi)
}

fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(vec![]);
    }
    let f = crate::arith::factor(n)?;
    let mut out = vec![1u64];
    for (p, e) in f.factors {
        let cur = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(cur.iter().map(|d| d * pk));
        }
        if out.len() > 200_000 {
            return Err(Error::Overflow(
                "too many divisors for rational root search".into(),
            ));
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Horner evaluation, exact.
pub fn eval_poly(poly: &[BigInt], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in poly.iter().rev() {
        acc = acc * x + Q::from_integer(c.clone());
    }
    acc
}

/// Exact evaluation at a quadratic surd.
pub fn eval_poly_quad(poly: &[BigInt], x: &QuadRational) -> Result<QuadRational> {
    let mut acc = QuadRational::zero();
    for c in poly.iter().rev() {
        acc = acc
            .try_mul(x)?
            .try_add(&QuadRational::rational(Q::from_integer(c.clone())))?;
    }
    Ok(acc)
}

fn qpoly_eval(p: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn qpoly_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r: Vec<Q> = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let coef = &r[k] / &lead;
        for i in 0..=db {
            let t = &coef * &b[i];
            r[k - db + i] -= t;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Number of distinct real roots in `(lo, hi]` by Sturm's theorem.
pub fn sturm_count(poly: &[BigInt], lo: &Q, hi: &Q) -> usize {
    let p0: Vec<Q> = poly.iter().map(|c| Q::from_integer(c.clone())).collect();
    let p1: Vec<Q> = p0
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * qi(i as i64))
        .collect();
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        if seq[n - 1].len() == 1 {
            break;
        }
        let r = qpoly_rem(&seq[n - 2], &seq[n - 1]);
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let variations = |x: &Q| {
        let signs: Vec<i32> = seq
            .iter()
            .map(|p| sign(&qpoly_eval(p, x)))
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    variations(lo).saturating_sub(variations(hi))
}

/// A real number together with a cache of certified enclosures.
pub struct CertifiedReal {
    spec: RealSpec,
    pmax: u32,
    cache: Mutex<Option<(u32, RatInterval)>>,
}

impl Clone for CertifiedReal {
    fn clone(&self) -> Self {
        CertifiedReal {
            spec: self.spec.clone(),
            pmax: self.pmax,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CertifiedReal")
            .field("spec", &self.spec)
            .field("pmax", &self.pmax)
            .finish()
    }
}

impl PartialEq for CertifiedReal {
    fn eq(&self, o: &Self) -> bool {
        self.spec == o.spec
    }
}

impl CertifiedReal {
    pub fn new(spec: RealSpec) -> Self {
        Self::with_pmax(spec, default_pmax())
    }

    pub fn with_pmax(spec: RealSpec, pmax: u32) -> Self {
        CertifiedReal {
            spec,
            pmax: pmax.min(PMAX_CEILING),
            cache: Mutex::new(None),
        }
    }

    pub fn spec(&self) -> &RealSpec {
        &self.spec
    }

    pub fn pmax(&self) -> u32 {
        self.pmax
    }

    /// An interval of width at most `2^{-bits}` containing the value.
    /// Successive answers are nested.
    pub fn enclosure(&self, bits: u32) -> Result<RatInterval> {
        if bits > self.pmax {
            return Err(Error::PrecisionExhausted {
                bits: self.pmax,
                context: format!("enclosure of {} at {bits} bits", self.spec),
            });
        }
        let mut cache = self.cache.lock().unwrap();
        if let Some((b, iv)) = cache.as_ref() {
            if *b >= bits || iv.width().is_zero() {
                return Ok(iv.clone());
            }
        }
        let fresh = self.compute(bits, cache.as_ref().map(|(_, iv)| iv))?;
        let merged = match cache.as_ref() {
            Some((_, old)) => fresh.intersect(old).unwrap_or(fresh),
            None => fresh,
        };
        *cache = Some((bits, merged.clone()));
        Ok(merged)
    }

    fn compute(&self, bits: u32, prior: Option<&RatInterval>) -> Result<RatInterval> {
        Ok(match &self.spec {
            RealSpec::Rational(r) => RatInterval::point(r.clone()),
            RealSpec::DecimalString { .. } => {
                RatInterval::point(self.spec.decimal_value().unwrap())
            }
            RealSpec::Sqrt(r) => {
                let scale = BigInt::one() << (2 * bits as usize);
                let s = isqrt_big(&(r.numer() * r.denom() * scale));
                let den = r.denom() * (BigInt::one() << bits as usize);
                RatInterval::new(Q::new(s.clone(), den.clone()), Q::new(s + 1, den))
            }
            RealSpec::AlgebraicRoot { poly, lo, hi } => {
                let start = prior
                    .cloned()
                    .unwrap_or_else(|| RatInterval::new(lo.clone(), hi.clone()));
                bisect_root(poly, start, bits)
            }
            RealSpec::LiouvilleSeries(b) => liouville_interval(*b, bits),
            RealSpec::Champernowne(b) => champernowne_interval(*b, bits),
            RealSpec::EulerE => euler_e_interval(bits),
        })
    }

    /// Outward-rounded `f64` bounds at 64 bits.
    pub fn f64_bounds(&self) -> Result<(f64, f64)> {
        Ok(self.enclosure(64)?.to_f64_bounds())
    }

    pub fn approx(&self) -> f64 {
        match self.spec.exact_value() {
            Some(v) => v.to_f64(),
            None => self
                .enclosure(64)
                .map(|iv| q_to_f64(&iv.mid()))
                .unwrap_or(f64::NAN),
        }
    }
}

fn bisect_root(poly: &[BigInt], mut iv: RatInterval, bits: u32) -> RatInterval {
    let mut slo = sign(&eval_poly(poly, &iv.lo));
    if slo == 0 {
        return RatInterval::point(iv.lo);
    }
    if sign(&eval_poly(poly, &iv.hi)) == 0 {
        return RatInterval::point(iv.hi);
    }
    while !iv.within_bits(bits) {
        let m = iv.mid();
        let sm = sign(&eval_poly(poly, &m));
        if sm == 0 {
            return RatInterval::point(m);
        }
        if sm == slo {
            iv.lo = m;
            slo = sm;
        } else {
            iv.hi = m;
        }
    }
    iv
}

fn factorial_u64(k: u64) -> Option<u64> {
    (1..=k).try_fold(1u64, |a, b| a.checked_mul(b))
}

fn liouville_interval(base: u32, bits: u32) -> RatInterval {
    let b = BigInt::from(base);
    let log2b = (base as f64).log2();
    let mut sum = Q::zero();
    let mut j = 1u64;
    loop {
        let e = factorial_u64(j).expect("factorial within range");
        sum += Q::new(BigInt::one(), b.pow(e as u32));
        let next = factorial_u64(j + 1).expect("factorial within range");
        if next as f64 * log2b >= bits as f64 + 2.0 {
            // Terms from j+1 on sum to less than twice the first of them.
            let tail = Q::new(BigInt::from(2), b.pow(next as u32));
            return RatInterval::new(sum.clone(), sum + tail);
        }
        j += 1;
    }
}

/// First `count` base-`b` digits of the Champernowne constant, as an integer.
pub fn champernowne_digits(base: u32, count: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(count);
    let mut k = 1u64;
    while out.len() < count {
        let mut ds = Vec::new();
        let mut m = k;
        while m > 0 {
            ds.push((m % base as u64) as u32);
            m /= base as u64;
        }
        out.extend(ds.into_iter().rev());
        k += 1;
    }
    out.truncate(count);
    out
}

fn champernowne_interval(base: u32, bits: u32) -> RatInterval {
    let count = ((bits as f64 + 1.0) / (base as f64).log2()).ceil() as usize + 1;
    let digits = champernowne_digits(base, count);
    let b = BigInt::from(base);
    let mut n = BigInt::zero();
    for d in &digits {
        n = n * &b + BigInt::from(*d);
    }
    let den = b.pow(count as u32);
    let lo = Q::new(n.clone(), den.clone());
    let hi = Q::new(n + 1, den);
    RatInterval::new(lo, hi)
}

/// `⌊x⌋` for a rational, exposed for the expansion code.
pub fn floor_rational(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}
