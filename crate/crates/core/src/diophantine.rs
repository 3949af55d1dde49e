//! Continued fractions, irrationality-measure estimates and a registry of
//! known measures.
//!
//! Quadratic surds expand by the exact Gauss map in `Q(√d)`. Every other
//! class expands both endpoints of a certified enclosure and keeps the
//! common prefix, which is correct for every real in the interval because
//! each continued-fraction cylinder is an interval.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{bigint_to_f64, ln_bigint, QuadRational, RatInterval, Q};
use crate::real::{floor_rational, CertifiedReal, RealSpec};

/// The μ_k values past this are taken as the Liouville signature.
pub const DEFAULT_GROWTH_THRESHOLD: f64 = 100.0;
/// Number of trailing μ_k entering μ̂.
pub const DEFAULT_MU_TAIL: usize = 3;
const START_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CfStatus {
    /// The requested depth was reached with every quotient certified.
    Complete,
    /// A rational input whose expansion ended before the requested depth.
    Terminated,
    /// Certification stopped early at the precision cap.
    TruncationLimited,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    /// `a_0, a_1, …, a_N`.
    pub quotients: Vec<BigInt>,
    /// `(p_k, q_k)` for every emitted quotient.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// Largest index whose quotient is guaranteed for the underlying real,
    /// `None` when not even `a_0` is.
    pub certified_depth: Option<usize>,
    pub status: CfStatus,
    /// Enclosure precision used, `None` for exact expansions.
    pub bits: Option<u32>,
}

impl ContinuedFraction {
    fn from_quotients(
        quotients: Vec<BigInt>,
        certified: Option<usize>,
        status: CfStatus,
        bits: Option<u32>,
    ) -> Self {
        let convergents = convergents(&quotients);
        ContinuedFraction {
            quotients,
            convergents,
            certified_depth: certified,
            status,
            bits,
        }
    }

    pub fn depth(&self) -> usize {
        self.quotients.len().saturating_sub(1)
    }

    /// Checks `p_k q_{k−1} − p_{k−1} q_k = (−1)^{k−1}` in exact arithmetic at
    /// every emitted index, with `p_{−1} = 1, q_{−1} = 0`.
    pub fn determinant_identity_holds(&self) -> bool {
        let mut prev = (BigInt::one(), BigInt::zero());
        for (k, (p, q)) in self.convergents.iter().enumerate() {
            let det = p * &prev.1 - &prev.0 * q;
            // (−1)^{k−1}: −1 for even k, +1 for odd k.
            let want = if k % 2 == 0 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            if det != want {
                return false;
            }
            prev = (p.clone(), q.clone());
        }
        true
    }
}

pub fn convergents(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        out.push((p.clone(), q.clone()));
        (p2, q2) = (p1, q1);
        (p1, q1) = (p, q);
    }
    out
}

/// Euclid's algorithm on a rational, at most `limit` quotients.
pub fn rational_quotients(x: &Q, limit: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    while !d.is_zero() && out.len() < limit {
        let a = floor_rational(&Q::new(n.clone(), d.clone()));
        let r = &n - &a * &d;
        out.push(a);
        (n, d) = (d, r);
    }
    out
}

fn common_prefix(a: &[BigInt], b: &[BigInt]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Quotients shared by every real in `iv`. A shorter endpoint expansion
/// ends the common prefix only if its last quotient matches; the prefix
/// rule is still sound because cylinders are intervals.
fn certified_prefix(iv: &RatInterval, limit: usize) -> Vec<BigInt> {
    let lo = rational_quotients(&iv.lo, limit);
    let hi = rational_quotients(&iv.hi, limit);
    let k = common_prefix(&lo, &hi);
    lo[..k].to_vec()
}

fn quadratic_quotients(x: &QuadRational, limit: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(limit);
    let mut x = x.clone();
    while out.len() < limit {
        let a = x.floor();
        let frac = x
            .try_sub(&QuadRational::rational(Q::from_integer(a.clone())))
            .expect("same field");
        out.push(a);
        if frac.is_zero() {
            break;
        }
        x = frac.inv().expect("nonzero");
    }
    out
}

/// Expands `α` through `a_depth`. `precision_cap` bounds the enclosure bits
/// in addition to the real's own cap.
pub fn cf_expand(
    alpha: &CertifiedReal,
    depth: usize,
    precision_cap: Option<u32>,
) -> Result<ContinuedFraction> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let want = depth + 1;
    match alpha.spec() {
        RealSpec::Rational(r) => {
            let qs = rational_quotients(r, want);
            let status = if qs.len() < want {
                CfStatus::Terminated
            } else {
                CfStatus::Complete
            };
            let cert = qs.len() - 1;
            Ok(ContinuedFraction::from_quotients(
                qs,
                Some(cert),
                status,
                None,
            ))
        }
        RealSpec::Sqrt(r) => {
            let x = QuadRational::sqrt_of(r)?;
            let qs = quadratic_quotients(&x, want);
            Ok(ContinuedFraction::from_quotients(
                qs,
                Some(depth),
                CfStatus::Complete,
                None,
            ))
        }
        RealSpec::DecimalString { .. } => Ok(expand_decimal(alpha.spec(), want)),
        _ => expand_enclosure(alpha, want, precision_cap),
    }
}

/// A decimal stands for the truncation of an unknown real. Quotients come
/// from the exact rational; a quotient counts as certified while
/// `10·q_k² < 10^digits` and while it is shared by both ends of the
/// truncation interval `[x − 10^-digits, x + 10^-digits]`.
fn expand_decimal(spec: &RealSpec, want: usize) -> ContinuedFraction {
    let x = spec.decimal_value().expect("decimal");
    let digits = spec.decimal_digits().expect("decimal");
    let qs = rational_quotients(&x, want);
    let convs = convergents(&qs);
    let bound = BigInt::from(10).pow(digits);
    let by_rule = convs
        .iter()
        .take_while(|(_, q)| BigInt::from(10) * q * q < bound)
        .count();
    let ulp = Q::new(BigInt::one(), bound.clone());
    let iv = RatInterval::new(&x - &ulp, &x + &ulp);
    let by_interval = certified_prefix(&iv, want).len();
    let n_cert = by_rule.min(by_interval).min(qs.len());
    let status = if n_cert >= want {
        CfStatus::Complete
    } else if n_cert == qs.len() && qs.len() < want {
        CfStatus::Terminated
    } else {
        CfStatus::TruncationLimited
    };
    ContinuedFraction::from_quotients(qs, n_cert.checked_sub(1), status, None)
}

fn expand_enclosure(
    alpha: &CertifiedReal,
    want: usize,
    cap: Option<u32>,
) -> Result<ContinuedFraction> {
    let cap = cap.unwrap_or(u32::MAX).min(alpha.pmax());
    let mut bits = START_BITS.min(cap);
    loop {
        let iv = alpha.enclosure(bits)?;
        let mut qs = certified_prefix(&iv, want);
        if qs.len() >= want {
            qs.truncate(want);
            let cert = qs.len() - 1;
            return Ok(ContinuedFraction::from_quotients(
                qs,
                Some(cert),
                CfStatus::Complete,
                Some(bits),
            ));
        }
        if bits >= cap {
            let cert = qs.len().checked_sub(1);
            return Ok(ContinuedFraction::from_quotients(
                qs,
                cert,
                CfStatus::TruncationLimited,
                Some(bits),
            ));
        }
        bits = bits.saturating_mul(2).min(cap);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MuStatus {
    Converged,
    /// Some μ_k exceeded the threshold. Heuristic: a finite cutoff cannot
    /// prove μ = ∞.
    GrowingUnbounded,
    TruncationLimited,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuEstimate {
    /// `(k, μ_k)` for `2 ≤ k < N`.
    pub mu: Vec<(usize, f64)>,
    pub mu_hat: f64,
    pub max_mu: f64,
    /// Index of the last convergent used.
    pub depth: usize,
    pub requested_depth: usize,
    pub status: MuStatus,
    pub threshold: f64,
    pub tail: usize,
    pub expansion: ContinuedFraction,
}

#[derive(Clone, Copy, Debug)]
pub struct MuOptions {
    pub threshold: f64,
    pub tail: usize,
    pub precision_cap: Option<u32>,
}

impl Default for MuOptions {
    fn default() -> Self {
        MuOptions {
            threshold: DEFAULT_GROWTH_THRESHOLD,
            tail: DEFAULT_MU_TAIL,
            precision_cap: None,
        }
    }
}

pub fn mu_estimate(alpha: &CertifiedReal, depth: usize) -> Result<MuEstimate> {
    mu_estimate_with(alpha, depth, MuOptions::default())
}

/// `μ_k = 1 + ln q_{k+1} / ln q_k` over the certified convergents, with
/// `μ̂` the maximum of the last `tail` values.
pub fn mu_estimate_with(
    alpha: &CertifiedReal,
    depth: usize,
    opts: MuOptions,
) -> Result<MuEstimate> {
    if depth < 3 {
        return Err(Error::InvalidArgument("depth must be at least 3".into()));
    }
    if !matches!(alpha.spec(), RealSpec::DecimalString { .. })
        && alpha.spec().is_irrational() == Some(false)
    {
        return Err(Error::InvalidArgument(format!(
            "{} is rational; its irrationality measure is 1",
            alpha.spec()
        )));
    }
    let cf = cf_expand(alpha, depth, opts.precision_cap)?;
    let n = cf.certified_depth.unwrap_or(0).min(depth);
    let mut mu = Vec::new();
    for k in 2..n {
        let qk = &cf.convergents[k].1;
        let qn = &cf.convergents[k + 1].1;
        mu.push((k, 1.0 + ln_bigint(qn) / ln_bigint(qk)));
    }
    if mu.is_empty() {
        return Err(Error::PrecisionExhausted {
            bits: cf.bits.unwrap_or(0),
            context: format!("fewer than four certified quotients of {}", alpha.spec()),
        });
    }
    let tail = opts.tail.max(1);
    let mu_hat = mu
        .iter()
        .rev()
        .take(tail)
        .map(|&(_, m)| m)
        .fold(f64::MIN, f64::max);
    let max_mu = mu.iter().map(|&(_, m)| m).fold(f64::MIN, f64::max);
    let status = if max_mu > opts.threshold {
        MuStatus::GrowingUnbounded
    } else if n < depth {
        MuStatus::TruncationLimited
    } else {
        MuStatus::Converged
    };
    Ok(MuEstimate {
        mu,
        mu_hat,
        max_mu,
        depth: n,
        requested_depth: depth,
        status,
        threshold: opts.threshold,
        tail,
        expansion: cf,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MuValue {
    Exact(f64),
    Infinite,
    /// Known bounds `lo ≤ μ ≤ hi` as decimal text, since some upper bounds
    /// exceed the `f64` range.
    Interval(String, String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuEntry {
    pub class: String,
    pub value: MuValue,
    pub citation: String,
    pub notes: Vec<String>,
}

fn entry(class: &str, value: MuValue, citation: &str) -> MuEntry {
    MuEntry {
        class: class.into(),
        value,
        citation: citation.into(),
        notes: Vec::new(),
    }
}

/// The full table, including constants with no [`RealSpec`] class.
pub fn registry() -> Vec<MuEntry> {
    vec![
        entry(
            "rational",
            MuValue::Exact(1.0),
            "elementary: |α − p/q| ≥ 1/(bq) for α = a/b ≠ p/q",
        ),
        entry(
            "algebraic irrational",
            MuValue::Exact(2.0),
            "K. F. Roth, Mathematika 2 (1955)",
        ),
        entry(
            "e",
            MuValue::Exact(2.0),
            "Euler's continued fraction of e; classical",
        ),
        entry(
            "champernowne base b",
            MuValue::Exact(f64::NAN),
            "M. Amou, J. Number Theory 37 (1991)",
        ),
        entry(
            "liouville",
            MuValue::Infinite,
            "J. Liouville (1844); Σ b^{-j!} beats every power",
        ),
        entry(
            "pi",
            MuValue::Interval("2".into(), "7.6063".into()),
            "V. Kh. Salikhov, Russian Math. Surveys 63 (2008)",
        ),
        entry(
            "gamma(1/4)",
            MuValue::Interval("2".into(), "1e330".into()),
            "published effective bound μ(Γ(1/4)) ≤ 10^330",
        ),
    ]
}

/// Looks up a constant by name: `pi` or `gamma(1/4)`.
pub fn registry_lookup_name(name: &str) -> Result<MuEntry> {
    registry()
        .into_iter()
        .find(|e| e.class == name && !matches!(e.value, MuValue::Exact(v) if v.is_nan()))
        .ok_or_else(|| Error::UnknownClass(format!("no registered measure for {name:?}")))
}

pub fn registry_lookup(spec: &RealSpec) -> Result<MuEntry> {
    let table = registry();
    let get = |class: &str| {
        table
            .iter()
            .find(|e| e.class == class)
            .cloned()
            .expect("registry class")
    };
    match spec {
        RealSpec::Rational(_) => Ok(get("rational")),
        RealSpec::Sqrt(_) => {
            let mut e = get("algebraic irrational");
            e.notes
                .push("consistent with μ(√r) ≤ 2μ(r) = 2 for rational r".into());
            Ok(e)
        }
        RealSpec::AlgebraicRoot { .. } => match spec.algebraic_rational_root()? {
            Some(_) => Ok(get("rational")),
            None => Ok(get("algebraic irrational")),
        },
        RealSpec::EulerE => Ok(get("e")),
        RealSpec::LiouvilleSeries(_) => Ok(get("liouville")),
        RealSpec::Champernowne(b) => {
            let mut e = get("champernowne base b");
            e.value = MuValue::Exact(*b as f64);
            Ok(e)
        }
        RealSpec::DecimalString { .. } => Err(Error::UnknownClass(
            "a decimal truncation carries no registered measure".into(),
        )),
    }
}

/// Lower bound on `|α − p/q|·q²`, useful for cross-checking convergents.
pub fn convergent_error(alpha: &RatInterval, p: &BigInt, q: &BigInt) -> (f64, f64) {
    let x = Q::new(p.clone(), q.clone());
    let d = alpha.shift(&-x).abs();
    let q2 = Q::from_integer(q * q);
    let lo = &d.lo * &q2;
    let hi = &d.hi * &q2;
    (
        bigint_to_f64(lo.numer()) / bigint_to_f64(lo.denom()),
        bigint_to_f64(hi.numer()) / bigint_to_f64(hi.denom()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn real(s: &str) -> CertifiedReal {
        CertifiedReal::new(s.parse().unwrap())
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn sqrt2_convergents() {
        let cf = cf_expand(&real("sqrt:2"), 4, None).unwrap();
        assert_eq!(ints(&cf.quotients), vec![1, 2, 2, 2, 2]);
        let got: Vec<Q> = cf
            .convergents
            .iter()
            .map(|(p, q)| Q::new(p.clone(), q.clone()))
            .collect();
        assert_eq!(got, vec![q(1, 1), q(3, 2), q(7, 5), q(17, 12), q(41, 29)]);
        assert!(cf.determinant_identity_holds());
    }

    #[test]
    fn rational_terminates() {
        let cf = cf_expand(&real("rat:7/3"), 10, None).unwrap();
        assert_eq!(ints(&cf.quotients), vec![2, 3]);
        assert_eq!(cf.status, CfStatus::Terminated);
        let cf = cf_expand(&real("rat:-7/3"), 10, None).unwrap();
        assert_eq!(ints(&cf.quotients), vec![-3, 1, 2]);
        assert!(cf.determinant_identity_holds());
    }

    #[test]
    fn e_pattern() {
        let cf = cf_expand(&real("e"), 30, None).unwrap();
        assert_eq!(cf.status, CfStatus::Complete);
        // [2; 1, 2, 1, 1, 4, 1, 1, 6, …]
        let mut want = vec![2i64];
        for k in 1..=10 {
            want.extend([1, 2 * k, 1]);
        }
        assert_eq!(ints(&cf.quotients), want[..31].to_vec());
    }

    #[test]
    fn surd_measures_near_two() {
        for d in [2, 3, 5] {
            let m = mu_estimate(&real(&format!("sqrt:{d}")), 20).unwrap();
            assert!((1.9..=2.1).contains(&m.mu_hat), "sqrt {d}: {}", m.mu_hat);
            assert_eq!(m.status, MuStatus::Converged);
            assert!(m.mu.iter().all(|&(_, v)| v >= 2.0 - 1e-12));
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(mu_estimate(&real("rat:3/2"), 10).is_err());
        assert!(mu_estimate(&real("sqrt:2"), 2).is_err());
        assert!(cf_expand(&real("sqrt:2"), 0, None).is_err());
    }

    #[test]
    fn decimal_certification_rule() {
        // 1.41421356 has 8 digits: 10·q² < 10^8 means q ≤ 3162.
        let cf = cf_expand(&real("dec:1.41421356"), 20, None).unwrap();
        assert_eq!(cf.status, CfStatus::TruncationLimited);
        let k = cf.certified_depth.unwrap();
        assert!(
            10 * cf.convergents[k].1.clone() * &cf.convergents[k].1 < BigInt::from(100_000_000)
        );
        assert!(cf.quotients[1..=k].iter().all(|a| a == &BigInt::from(2)));
    }

    #[test]
    fn registry_values() {
        assert_eq!(
            registry_lookup(&"sqrt:2".parse().unwrap()).unwrap().value,
            MuValue::Exact(2.0)
        );
        assert_eq!(
            registry_lookup(&"champernowne:4".parse().unwrap())
                .unwrap()
                .value,
            MuValue::Exact(4.0)
        );
        assert_eq!(
            registry_lookup(&"rat:3/2".parse().unwrap()).unwrap().value,
            MuValue::Exact(1.0)
        );
        assert_eq!(
            registry_lookup(&"liouville:10".parse().unwrap())
                .unwrap()
                .value,
            MuValue::Infinite
        );
        assert!(matches!(
            registry_lookup(&"dec:1.5".parse().unwrap()),
            Err(Error::UnknownClass(_))
        ));
        assert_eq!(
            registry_lookup_name("pi").unwrap().value,
            MuValue::Interval("2".into(), "7.6063".into())
        );
        assert!(registry_lookup_name("zeta(5)").is_err());
    }
}
