//! Fourier multiplier symbols on the torus.
//!
//! Every symbol evaluates either exactly (in `Q(√d)[i]`) or to a certified
//! complex enclosure. Whichever class applies, zero tests never guess.

mod kernel;
mod parse;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_q, q_to_f64, qi, ExactComplex, QuadRational, RatInterval, Q};
use crate::fixed::{exp_interval, ln_interval};
use crate::lattice::{l1, l2sq, Frequency};
use crate::real::{eval_poly, eval_poly_quad, CertifiedReal, RealSpec};

pub use kernel::{Kernel, PointEval};
pub use parse::{parse_symbol, parse_symbol_with};

/// A real coefficient with its exact value when one exists.
#[derive(Clone, Debug)]
pub struct Coefficient {
    pub real: Arc<CertifiedReal>,
    pub exact: Option<QuadRational>,
}

impl Coefficient {
    pub fn new(spec: RealSpec, pmax: u32) -> Self {
        let exact = spec.exact_value();
        Coefficient {
            real: Arc::new(CertifiedReal::with_pmax(spec, pmax)),
            exact,
        }
    }

    pub fn spec(&self) -> &RealSpec {
        self.real.spec()
    }

    /// Whether `t` equals the coefficient, decided exactly when possible.
    /// `None` means the question cannot be settled without refinement.
    fn equals_quad(&self, t: &QuadRational) -> Option<bool> {
        if let Some(v) = &self.exact {
            return Some(v == t);
        }
        match self.spec() {
            RealSpec::AlgebraicRoot { poly, lo, hi } => {
                let inside = t.cmp_q(lo).is_ge() && t.cmp_q(hi).is_le();
                if !inside {
                    return Some(false);
                }
                if t.is_rational() {
                    return Some(eval_poly(poly, &t.a).is_zero());
                }
                eval_poly_quad(poly, t).ok().map(|v| v.is_zero())
            }
            // Known transcendental constants.
            RealSpec::LiouvilleSeries(_) | RealSpec::Champernowne(_) | RealSpec::EulerE => {
                Some(false)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Kind {
    /// `−Σ ξ_j²` on `T^n`.
    Laplacian,
    /// `iξ_1 + Σ_{j≥2} ξ_j²` on `T^{n+1}`.
    Heat,
    /// `iξ_j` on `T^j`.
    Dx { j: usize },
    /// `i(ξ1 − αξ2)` with `α = α_re + i·α_im` on `T²`.
    Vf { alpha: Coefficient, im: Q },
    /// `−ξ_1² + η²(ξ_2² + … + ξ_{n+1}²)` on `T^{n+1}`.
    Wave {
        n: usize,
        eta2: Option<Q>,
        eta: Option<Coefficient>,
    },
    /// `(1 + ‖ξ‖²)^{−s/2}`, any dimension.
    Bessel { s: Q },
    /// `ξ / log(e + |ξ|)` on `T¹`.
    LogDamp,
}

/// A point value: exact, or a certified enclosure of real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolValue {
    Exact(ExactComplex),
    Enclosure { re: RatInterval, im: RatInterval },
}

impl SymbolValue {
    pub fn approx(&self) -> (f64, f64) {
        match self {
            SymbolValue::Exact(z) => z.to_f64(),
            SymbolValue::Enclosure { re, im } => (q_to_f64(&re.mid()), q_to_f64(&im.mid())),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SymbolValue::Exact(_))
    }
}

/// Outcome of the exact zero test with a log-modulus enclosure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AbsLower {
    Zero,
    NonzeroWithLog { abs: f64, log_lo: f64, log_hi: f64 },
}

#[derive(Clone, Debug)]
pub struct Symbol {
    pub name: String,
    /// `None` when the symbol makes sense in every dimension.
    pub dim: Option<usize>,
    pub order: f64,
    pub kind: Kind,
    pub transposed: bool,
    pub pmax: u32,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Relative slack attached to `f64` logs of exactly known moduli.
const LOG_SLACK: f64 = 1e-14;

impl Symbol {
    pub fn dimension_for(&self, requested: Option<usize>) -> Result<usize> {
        match (self.dim, requested) {
            (Some(d), None) => Ok(d),
            (Some(d), Some(r)) if d == r => Ok(d),
            (Some(d), Some(r)) => Err(Error::DimensionMismatch {
                expected: d,
                got: r,
            }),
            (None, Some(r)) if r >= 1 => Ok(r),
            (None, _) => Ok(1),
        }
    }

    fn check_dim(&self, xi: &[i64]) -> Result<()> {
        match self.dim {
            Some(d) if d != xi.len() => Err(Error::DimensionMismatch {
                expected: d,
                got: xi.len(),
            }),
            _ if xi.is_empty() => Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            }),
            _ => Ok(()),
        }
    }

    /// `ξ ↦ p(−ξ)` with the same order.
    pub fn transpose(&self) -> Symbol {
        let mut t = self.clone();
        t.transposed = !self.transposed;
        t.name = if self.transposed {
            self.name
                .strip_prefix("transpose(")
                .and_then(|s| s.strip_suffix(')'))
                .unwrap_or(&self.name)
                .to_string()
        } else {
            format!("transpose({})", self.name)
        };
        t
    }

    /// Whether every point value is exact.
    pub fn is_exact_class(&self) -> bool {
        match &self.kind {
            Kind::Laplacian | Kind::Heat | Kind::Dx { .. } => true,
            Kind::Vf { alpha, .. } => alpha.exact.is_some(),
            Kind::Wave { eta2, .. } => eta2.is_some(),
            Kind::Bessel { s } => (s / qi(2)).is_integer(),
            Kind::LogDamp => false,
        }
    }

    /// Field `Q(√d)` holding every exact value, `1` for Gaussian rationals.
    pub fn field_radicand(&self) -> BigInt {
        match &self.kind {
            Kind::Vf {
                alpha: Coefficient { exact: Some(v), .. },
                ..
            } => v.d.clone(),
            _ => BigInt::one(),
        }
    }

    fn oriented(&self, xi: &[i64]) -> Vec<i64> {
        if self.transposed {
            xi.iter().map(|c| -c).collect()
        } else {
            xi.to_vec()
        }
    }

    /// Exact value for exact classes, `None` otherwise.
    pub fn eval_exact(&self, xi: &[i64]) -> Result<Option<ExactComplex>> {
        self.check_dim(xi)?;
        let x = self.oriented(xi);
        Ok(match &self.kind {
            Kind::Laplacian => Some(ExactComplex::gaussian(
                -Q::from_integer(sq_sum(&x)),
                Q::zero(),
            )),
            Kind::Heat => Some(ExactComplex::gaussian(
                Q::from_integer(sq_sum(&x[1..])),
                qi(x[0]),
            )),
            Kind::Dx { j } => Some(ExactComplex::gaussian(Q::zero(), qi(x[j - 1]))),
            Kind::Vf { alpha, im } => match &alpha.exact {
                Some(a) => {
                    let re = QuadRational::rational(im * qi(x[1]));
                    let imag = QuadRational::from_int(x[0]).try_sub(&a.scale(&qi(x[1])))?;
                    Some(ExactComplex::new(re, imag))
                }
                None => None,
            },
            Kind::Wave { eta2: Some(e2), .. } => {
                let v = -Q::from_integer(BigInt::from(x[0]).pow(2u32))
                    + e2 * Q::from_integer(sq_sum(&x[1..]));
                Some(ExactComplex::gaussian(v, Q::zero()))
            }
            Kind::Wave { .. } => None,
            Kind::Bessel { s } => {
                let half = s / qi(2);
                if !half.is_integer() {
                    None
                } else {
                    let base = Q::from_integer(BigInt::one() + sq_sum(&x));
                    let e = half.to_integer().to_i64().unwrap_or(0);
                    let pw = Q::from_integer(base.numer().pow(e.unsigned_abs() as u32));
                    let v = if e >= 0 { pw.recip() } else { pw };
                    Some(ExactComplex::gaussian(v, Q::zero()))
                }
            }
            Kind::LogDamp => (x[0] == 0).then(ExactComplex::zero),
        })
    }

    /// Exact value, or an enclosure with each component of width at most
    /// `2^{-precision}`.
    pub fn eval(&self, xi: &[i64], precision: u32) -> Result<SymbolValue> {
        if let Some(v) = self.eval_exact(xi)? {
            return Ok(SymbolValue::Exact(v));
        }
        let mut work = precision + 8;
        loop {
            let (re, im) = self.enclose(xi, work)?;
            if re.within_bits(precision) && im.within_bits(precision) {
                return Ok(SymbolValue::Enclosure { re, im });
            }
            if work >= self.pmax {
                return Err(Error::PrecisionExhausted {
                    bits: self.pmax,
                    context: format!("evaluating {} at {}", self.name, Frequency(xi.to_vec())),
                });
            }
            work = (work * 2).min(self.pmax);
        }
    }

    /// Enclosure of `p(ξ)` from coefficient enclosures at `bits`.
    fn enclose(&self, xi: &[i64], bits: u32) -> Result<(RatInterval, RatInterval)> {
        let x = self.oriented(xi);
        let zero = RatInterval::point(Q::zero());
        match &self.kind {
            Kind::Vf { alpha, im } => {
                let extra = 64 - x[1].unsigned_abs().leading_zeros();
                let a = alpha
                    .real
                    .enclosure((bits + extra + 2).min(alpha.real.pmax()))?;
                let re = RatInterval::point(im * qi(x[1]));
                let imag = a.scale(&qi(-x[1])).shift(&qi(x[0]));
                Ok((re, imag))
            }
            Kind::Wave { eta: Some(eta), .. } => {
                let s = Q::from_integer(sq_sum(&x[1..]));
                let extra = 2
                    * (64
                        - (x.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)).leading_zeros())
                    + 4;
                let e = eta.real.enclosure((bits + extra).min(eta.real.pmax()))?;
                let e2 = e.square();
                let v = e2
                    .scale(&s)
                    .shift(&-Q::from_integer(BigInt::from(x[0]).pow(2u32)));
                Ok((v, zero))
            }
            Kind::Bessel { s } => {
                let base = Q::from_integer(BigInt::one() + sq_sum(&x));
                // exponent −(s/2)·ln(1+‖ξ‖²), enclosed
                let ln = ln_interval(&base, bits + 16)?;
                let k = -(s / qi(2));
                let t = ln.scale(&k);
                let lo = exp_interval(&t.lo, bits + 16)?;
                let hi = exp_interval(&t.hi, bits + 16)?;
                Ok((RatInterval::new(lo.lo, hi.hi), zero))
            }
            Kind::LogDamp => {
                let e = crate::fixed::euler_e_interval(bits + 16);
                let m = qi(x[0].abs());
                let lo = ln_interval(&(&e.lo + &m), bits + 16)?;
                let hi = ln_interval(&(&e.hi + &m), bits + 16)?;
                let (l_lo, l_hi) = (lo.lo, hi.hi);
                let v = qi(x[0]);
                let iv = if x[0] >= 0 {
                    RatInterval::new(&v / &l_hi, &v / &l_lo)
                } else {
                    RatInterval::new(&v / &l_lo, &v / &l_hi)
                };
                Ok((iv, zero))
            }
            _ => {
                let v = self.eval_exact(xi)?.expect("exact class");
                let (a, b) = (v.re, v.im);
                let to_iv = |q: &QuadRational| -> Result<RatInterval> {
                    if q.is_rational() {
                        return Ok(RatInterval::point(q.a.clone()));
                    }
                    let r = CertifiedReal::new(RealSpec::Sqrt(Q::from_integer(q.d.clone())));
                    let s = r.enclosure(bits + 8)?;
                    Ok(s.scale(&q.b).shift(&q.a))
                };
                Ok((to_iv(&a)?, to_iv(&b)?))
            }
        }
    }

    /// Exact structural or algebraic zero test for enclosure classes.
    /// `Some(true)` is a certified zero, `Some(false)` a certified nonzero.
    fn exact_zero(&self, xi: &[i64]) -> Option<bool> {
        let x = self.oriented(xi);
        match &self.kind {
            Kind::LogDamp => Some(x[0] == 0),
            Kind::Bessel { .. } => Some(false),
            Kind::Vf { alpha, im } => {
                if x[1] == 0 {
                    return Some(x[0] == 0);
                }
                if !im.is_zero() {
                    return Some(false);
                }
                alpha.equals_quad(&QuadRational::rational(Q::new(x[0].into(), x[1].into())))
            }
            Kind::Wave { eta: Some(eta), .. } => {
                let s = sq_sum(&x[1..]);
                if s.is_zero() {
                    return Some(x[0] == 0);
                }
                if x[0] == 0 {
                    return Some(false);
                }
                // p = 0 iff η = ±ξ1/√S.
                let t = Q::new(BigInt::from(x[0]).pow(2u32), s);
                let root = QuadRational::sqrt_of(&t).ok()?;
                let pos = eta.equals_quad(&root)?;
                let neg = eta.equals_quad(&root.neg_ref())?;
                Some(pos || neg)
            }
            _ => None,
        }
    }

    /// Decides `p(ξ) = 0` exactly; otherwise encloses `log|p(ξ)|`.
    pub fn abs_lower_exact(&self, xi: &[i64]) -> Result<AbsLower> {
        if let Some(v) = self.eval_exact(xi)? {
            if v.is_zero() {
                return Ok(AbsLower::Zero);
            }
            let abs = v.abs_f64();
            let l = abs.ln();
            let slack = LOG_SLACK * l.abs().max(1.0);
            return Ok(AbsLower::NonzeroWithLog {
                abs,
                log_lo: l - slack,
                log_hi: l + slack,
            });
        }
        let structural = self.exact_zero(xi);
        if structural == Some(true) {
            return Ok(AbsLower::Zero);
        }
        let mut bits = 64u32;
        loop {
            let (re, im) = self.enclose(xi, bits)?;
            let abs2 = &re.square() + &im.square();
            if abs2.lo.is_positive() {
                let (lo2, hi2) = abs2.to_f64_bounds();
                if lo2 > 0.0 && (hi2 - lo2) <= 1e-12 * lo2 {
                    let abs = q_to_f64(&abs2.mid()).sqrt();
                    return Ok(AbsLower::NonzeroWithLog {
                        abs,
                        log_lo: 0.5 * lo2.ln(),
                        log_hi: 0.5 * hi2.ln(),
                    });
                }
            }
            if bits >= self.pmax {
                return Err(Error::PrecisionExhausted {
                    bits: self.pmax,
                    context: format!("zero test of {} at {}", self.name, Frequency(xi.to_vec())),
                });
            }
            bits = (bits * 2).min(self.pmax);
        }
    }

    /// `p(ξ)` as an `f64` pair, for float pipelines.
    pub fn eval_f64(&self, xi: &[i64]) -> Result<(f64, f64)> {
        if let Some(v) = self.eval_exact(xi)? {
            return Ok(v.to_f64());
        }
        if self.exact_zero(xi) == Some(true) {
            return Ok((0.0, 0.0));
        }
        Ok(self.eval(xi, 64)?.approx())
    }

    pub fn kernel(&self) -> Kernel<'_> {
        Kernel::for_symbol(self)
    }

    /// Human-readable description of the coefficient data.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        match &self.kind {
            Kind::Vf { alpha, im } => {
                out.push(("alpha".into(), alpha.spec().to_string()));
                if !im.is_zero() {
                    out.push(("alpha_im".into(), fmt_q(im)));
                }
            }
            Kind::Wave { n, eta2, eta } => {
                out.push(("n".into(), n.to_string()));
                if let Some(e2) = eta2 {
                    out.push(("eta2".into(), fmt_q(e2)));
                }
                if let Some(e) = eta {
                    out.push(("eta".into(), e.spec().to_string()));
                }
            }
            Kind::Bessel { s } => out.push(("s".into(), fmt_q(s))),
            Kind::Dx { j } => out.push(("j".into(), j.to_string())),
            _ => {}
        }
        out
    }
}

fn sq_sum(x: &[i64]) -> BigInt {
    BigInt::from(l2sq(x))
}

/// `|ξ|` in ℓ1, as used by every exponent comparison.
pub fn xi_l1(x: &[i64]) -> u64 {
    l1(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn sym(s: &str) -> Symbol {
        parse_symbol(s).unwrap()
    }

    #[test]
    fn documented_values() {
        let heat = sym("heat:1");
        assert_eq!(
            heat.eval_exact(&[3, 2]).unwrap().unwrap(),
            ExactComplex::from_ints(4, 3)
        );
        let vf = sym("vf:alpha=rat:3/2");
        assert!(vf.eval_exact(&[3, 2]).unwrap().unwrap().is_zero());
        let w = sym("wave2d:eta=sqrt:2");
        assert_eq!(
            w.eval_exact(&[3, 2]).unwrap().unwrap(),
            ExactComplex::from_ints(-1, 0)
        );
        let lap = sym("laplacian:2");
        assert_eq!(
            lap.eval_exact(&[1, 2]).unwrap().unwrap(),
            ExactComplex::from_ints(-5, 0)
        );
    }

    #[test]
    fn surd_vector_field_is_exact() {
        let vf = sym("vf:alpha=sqrt:2");
        match vf.abs_lower_exact(&[8119, 5741]).unwrap() {
            AbsLower::NonzeroWithLog { abs, .. } => {
                let e = 1.0 / (8119.0 + 2f64.sqrt() * 5741.0);
                assert!(((abs - e) / e).abs() < 1e-12);
            }
            AbsLower::Zero => panic!("Pell point is not a zero"),
        }
        assert_eq!(vf.abs_lower_exact(&[0, 0]).unwrap(), AbsLower::Zero);
        assert_eq!(
            sym("vf:alpha=rat:3/2").abs_lower_exact(&[3, 2]).unwrap(),
            AbsLower::Zero
        );
    }

    #[test]
    fn transpose_is_an_involution() {
        let vf = sym("vf:alpha=sqrt:2");
        let t = vf.transpose();
        let v = t.eval_exact(&[3, 1]).unwrap().unwrap();
        // i(−3 + √2)
        let expected = ExactComplex::new(
            QuadRational::zero(),
            QuadRational::new(qi(-3), qi(1), BigInt::from(2)),
        );
        assert_eq!(v, expected);
        let tt = t.transpose();
        assert_eq!(tt.name, vf.name);
        for xi in [[1, 2], [-4, 7], [0, 3]] {
            assert_eq!(tt.eval_exact(&xi).unwrap(), vf.eval_exact(&xi).unwrap());
        }
        let lap = sym("laplacian:2");
        assert_eq!(
            lap.transpose().eval_exact(&[2, -5]).unwrap(),
            lap.eval_exact(&[2, -5]).unwrap()
        );
    }

    #[test]
    fn enclosure_classes() {
        let vf = sym("vf:alpha=e");
        assert!(!vf.is_exact_class());
        match vf.eval(&[19, 7], 100).unwrap() {
            SymbolValue::Enclosure { im, .. } => {
                assert!(im.within_bits(100));
                let v = 19.0 - std::f64::consts::E * 7.0;
                assert!((q_to_f64(&im.mid()) - v).abs() < 1e-14);
            }
            _ => panic!("expected an enclosure"),
        }
        assert!(matches!(
            vf.abs_lower_exact(&[19, 7]).unwrap(),
            AbsLower::NonzeroWithLog { .. }
        ));
        assert_eq!(vf.abs_lower_exact(&[0, 0]).unwrap(), AbsLower::Zero);
        let ld = sym("logdamp");
        match ld.abs_lower_exact(&[1000]).unwrap() {
            AbsLower::NonzeroWithLog { abs, .. } => {
                let v = 1000.0 / (std::f64::consts::E + 1000.0).ln();
                assert!((abs - v).abs() < 1e-12 * v);
            }
            _ => panic!(),
        }
        let b = sym("bessel:s=1");
        match b.eval(&[1, 1], 80).unwrap() {
            SymbolValue::Enclosure { re, .. } => {
                let (lo, hi) = re.to_f64_bounds();
                let v = 1.0 / 3f64.sqrt();
                assert!(lo <= v && v <= hi);
            }
            _ => panic!(),
        }
        let b2 = sym("bessel:s=2");
        assert_eq!(
            b2.eval_exact(&[1, 0]).unwrap().unwrap(),
            ExactComplex::gaussian(q(1, 2), Q::zero())
        );
    }

    #[test]
    fn algebraic_roots_decide_zeros_exactly() {
        // 2x − 3 = 0 has the rational root 3/2.
        let vf = sym("vf:alpha=alg:[2,-3],[0,5]");
        assert_eq!(vf.abs_lower_exact(&[3, 2]).unwrap(), AbsLower::Zero);
        assert!(matches!(
            vf.abs_lower_exact(&[3, 1]).unwrap(),
            AbsLower::NonzeroWithLog { .. }
        ));
        // η root of x² − 2 on T³: zeros exactly when ξ1² = 2(ξ2² + ξ3²).
        let w = sym("wave:n=2,eta=alg:[1,0,-2],[1,2]");
        assert_eq!(w.abs_lower_exact(&[2, 1, 1]).unwrap(), AbsLower::Zero);
        assert!(matches!(
            w.abs_lower_exact(&[3, 1, 1]).unwrap(),
            AbsLower::NonzeroWithLog { .. }
        ));
    }

    #[test]
    fn complex_alpha() {
        let vf = sym("vf:alpha=rat:1/2+i*1/3");
        let v = vf.eval_exact(&[1, 3]).unwrap().unwrap();
        // α_im ξ2 + i(ξ1 − α_re ξ2) = 1 + i(1 − 3/2)
        assert_eq!(v, ExactComplex::gaussian(qi(1), q(-1, 2)));
        assert!(matches!(
            vf.abs_lower_exact(&[1, 2]).unwrap(),
            AbsLower::NonzeroWithLog { .. }
        ));
    }

    #[test]
    fn logdamp_order_sandwich() {
        let ld = sym("logdamp");
        let kernel = ld.kernel();
        for eps in [0.5, 0.1, 0.01] {
            // K_ε = min over the window; finite and positive.
            let k = (2..20000i64)
                .map(|t| {
                    let PointEval::Nonzero(a) = kernel.eval(&[t]) else { panic!("t = {t}") };
                    a / (t as f64).powf(1.0 - eps)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(k > 0.0 && k.is_finite());
        }
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let t = 10i64.pow(k);
            let (a, _) = ld.eval_f64(&[t]).unwrap();
            let ratio = a / t as f64;
            assert!(ratio < prev);
            prev = ratio;
        }
        assert!(prev < 0.08);
    }
}
