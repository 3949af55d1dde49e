//! Finitely supported Fourier series and the operations on them.
//!
//! Norms omit the `(2π)^n` factor of the pairing; it rescales every norm
//! uniformly and cancels from all ratios. Float sums run in (ℓ1, lex) order
//! so results do not depend on how the support was assembled.

pub mod io;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::analysis::{certify_lower_bound, LowerBound};
use crate::error::{Error, Result};
use crate::exact::{ExactComplex, QuadRational, Q};
use crate::lattice::{sobolev_weight, Frequency, Window};
use crate::symbol::{AbsLower, Symbol};

pub use io::{distribution_from_json, distribution_to_json, parse_distribution};

#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(ExactComplex),
    Float { re: f64, im: f64 },
}

impl Coeff {
    pub fn one() -> Self {
        Coeff::Exact(ExactComplex::one())
    }

    pub fn rational(x: Q) -> Self {
        Coeff::Exact(ExactComplex::gaussian(x, Q::zero()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(z) => z.is_zero(),
            Coeff::Float { re, im } => *re == 0.0 && *im == 0.0,
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        match self {
            Coeff::Exact(z) => z.to_f64(),
            Coeff::Float { re, im } => (*re, *im),
        }
    }

    pub fn abs_sq_f64(&self) -> f64 {
        let (a, b) = self.to_f64();
        a * a + b * b
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    /// Exact when both sides are exact in a common field.
    pub fn mul(&self, o: &Coeff) -> Coeff {
        if let (Coeff::Exact(a), Coeff::Exact(b)) = (self, o) {
            if let Ok(v) = a.try_mul(b) {
                return Coeff::Exact(v);
            }
        }
        let ((a, b), (c, d)) = (self.to_f64(), o.to_f64());
        Coeff::Float { re: a * c - b * d, im: a * d + b * c }
    }

    pub fn div(&self, o: &Coeff) -> Result<Coeff> {
        if o.is_zero() {
            return Err(Error::InvalidArgument("division by a zero coefficient".into()));
        }
        if let (Coeff::Exact(a), Coeff::Exact(b)) = (self, o) {
            if let Ok(v) = a.try_div(b) {
                return Ok(Coeff::Exact(v));
            }
        }
        let ((a, b), (c, d)) = (self.to_f64(), o.to_f64());
        let n = c * c + d * d;
        Ok(Coeff::Float { re: (a * c + b * d) / n, im: (b * c - a * d) / n })
    }

    pub fn sub(&self, o: &Coeff) -> Coeff {
        if let (Coeff::Exact(a), Coeff::Exact(b)) = (self, o) {
            if let Ok(v) = a.try_sub(b) {
                return Coeff::Exact(v);
            }
        }
        let ((a, b), (c, d)) = (self.to_f64(), o.to_f64());
        Coeff::Float { re: a - c, im: b - d }
    }

    pub fn scale_real(&self, w: &Weight) -> Coeff {
        match (self, w) {
            (Coeff::Exact(z), Weight::Exact(q)) => Coeff::Exact(z.scale(q)),
            _ => {
                let (a, b) = self.to_f64();
                let f = w.to_f64();
                Coeff::Float { re: a * f, im: b * f }
            }
        }
    }
}

/// A real multiplier value, rational when possible.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(Q),
    Float(f64),
}

impl Weight {
    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(q) => crate::exact::q_to_f64(q),
            Weight::Float(f) => *f,
        }
    }
}

/// `(1 + ‖ξ‖²)^e`, rational when `e` is an integer.
pub fn bracket_power(xi: &Frequency, e: f64) -> Weight {
    if e.fract() == 0.0 && e.abs() <= 4096.0 {
        let base = BigInt::one() + BigInt::from(xi.l2sq());
        let p = Q::from_integer(base.pow(e.abs() as u32));
        return Weight::Exact(if e >= 0.0 { p } else { p.recip() });
    }
    Weight::Float(sobolev_weight(xi, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    User,
    Witness,
    Solver,
    Derived,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDistribution {
    pub dim: usize,
    pub coeffs: BTreeMap<Frequency, Coeff>,
    pub origin: Origin,
    /// Frequencies whose coefficient could not be certified zero or nonzero.
    pub flagged: BTreeSet<Frequency>,
}

impl SpectralDistribution {
    pub fn new(dim: usize, origin: Origin) -> Self {
        SpectralDistribution { dim, coeffs: BTreeMap::new(), origin, flagged: BTreeSet::new() }
    }

    /// `e^{iξ·x}`.
    pub fn mode(xi: Frequency) -> Self {
        let mut u = Self::new(xi.dim(), Origin::Derived);
        u.coeffs.insert(xi, Coeff::one());
        u
    }

    /// Sets a coefficient; zeros are not stored.
    pub fn set(&mut self, xi: Frequency, c: Coeff) -> Result<()> {
        if xi.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: xi.dim() });
        }
        if c.is_zero() {
            self.coeffs.remove(&xi);
        } else {
            self.coeffs.insert(xi, c);
        }
        Ok(())
    }

    /// Builds from pairs, rejecting repeated frequencies.
    pub fn from_pairs(dim: usize, origin: Origin, pairs: Vec<(Frequency, Coeff)>) -> Result<Self> {
        let mut u = Self::new(dim, origin);
        for (xi, c) in pairs {
            if u.coeffs.contains_key(&xi) {
                return Err(Error::Format(format!("duplicate frequency {xi}")));
            }
            if xi.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: xi.dim() });
            }
            if !c.is_zero() {
                u.coeffs.insert(xi, c);
            }
        }
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, xi: &Frequency) -> Option<&Coeff> {
        self.coeffs.get(xi)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.values().all(Coeff::is_exact)
    }

    /// Support in (ℓ1, lex) order.
    pub fn shell_order(&self) -> Vec<(&Frequency, &Coeff)> {
        let mut v: Vec<_> = self.coeffs.iter().collect();
        v.sort_by(|a, b| (a.0.l1(), a.0).cmp(&(b.0.l1(), b.0)));
        v
    }

    pub fn max_l1(&self) -> u64 {
        self.coeffs.keys().map(Frequency::l1).max().unwrap_or(0)
    }

    pub fn sub(&self, o: &SpectralDistribution) -> Result<SpectralDistribution> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: o.dim });
        }
        let mut out = self.clone();
        out.origin = Origin::Derived;
        for (xi, c) in &o.coeffs {
            let v = match self.coeffs.get(xi) {
                Some(a) => a.sub(c),
                None => Coeff::Exact(ExactComplex::zero()).sub(c),
            };
            out.set(xi.clone(), v)?;
        }
        Ok(out)
    }
}

/// `‖u‖²_{H^k}` with its exact value when available.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSq {
    pub exact: Option<QuadRational>,
    pub value: f64,
}

/// `Σ (1+‖ξ‖²)^k |û(ξ)|²`: exact for integer `k` and exact coefficients in a
/// common field, otherwise summed in `f64` in (ℓ1, lex) order.
pub fn sobolev_norm_sq(u: &SpectralDistribution, k: f64) -> NormSq {
    if u.is_exact() && k.fract() == 0.0 {
        let mut acc = QuadRational::zero();
        let mut ok = true;
        for (xi, c) in u.shell_order() {
            let Coeff::Exact(z) = c else { unreachable!() };
            let Weight::Exact(w) = bracket_power(xi, k) else { unreachable!() };
            match z.abs_sq().and_then(|a| acc.try_add(&a.scale(&w))) {
                Ok(v) => acc = v,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let value = acc.to_f64();
            return NormSq { exact: Some(acc), value };
        }
    }
    let value = u.shell_order().iter().map(|(xi, c)| sobolev_weight(xi, k) * c.abs_sq_f64()).sum();
    NormSq { exact: None, value }
}

pub fn sobolev_norm(u: &SpectralDistribution, k: f64) -> f64 {
    sobolev_norm_sq(u, k).value.sqrt()
}

pub(crate) fn symbol_coeff(sym: &Symbol, xi: &Frequency) -> Result<Option<Coeff>> {
    if let Some(v) = sym.eval_exact(xi.coords())? {
        return Ok((!v.is_zero()).then_some(Coeff::Exact(v)));
    }
    match sym.abs_lower_exact(xi.coords())? {
        AbsLower::Zero => Ok(None),
        AbsLower::NonzeroWithLog { .. } => {
            let (re, im) = sym.eval_f64(xi.coords())?;
            Ok(Some(Coeff::Float { re, im }))
        }
    }
}

fn check_dim(sym: &Symbol, u: &SpectralDistribution) -> Result<()> {
    sym.dimension_for(Some(u.dim)).map(|_| ())
}

/// `p(D)u`, coefficientwise. A coefficient whose symbol value cannot be
/// certified zero or nonzero is kept with its approximate product and
/// flagged.
pub fn apply(sym: &Symbol, u: &SpectralDistribution) -> Result<SpectralDistribution> {
    check_dim(sym, u)?;
    let mut out = SpectralDistribution::new(u.dim, Origin::Derived);
    for (xi, c) in &u.coeffs {
        match symbol_coeff(sym, xi) {
            Ok(Some(p)) => out.set(xi.clone(), p.mul(c))?,
            Ok(None) => {}
            Err(Error::PrecisionExhausted { .. }) => {
                let v = sym.eval(xi.coords(), 24)?.approx();
                out.set(xi.clone(), Coeff::Float { re: v.0, im: v.1 }.mul(c))?;
                out.flagged.insert(xi.clone());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Compatibility {
    Compatible,
    Violations(Vec<Frequency>),
}

/// `f̂` must vanish wherever the symbol does.
pub fn compatibility_check(sym: &Symbol, f: &SpectralDistribution) -> Result<Compatibility> {
    check_dim(sym, f)?;
    let mut bad = Vec::new();
    for xi in f.coeffs.keys() {
        if symbol_coeff(sym, xi)?.is_none() {
            bad.push(xi.clone());
        }
    }
    Ok(if bad.is_empty() { Compatibility::Compatible } else { Compatibility::Violations(bad) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub k: f64,
    pub r: f64,
    pub f_norm: f64,
    pub u_norm: f64,
    /// `‖u‖_{H^{k+m−r}} / ‖f‖_{H^k}`, zero for `f = 0`.
    pub ratio: f64,
    pub lower_bound: Option<LowerBound>,
    /// `(1+n)^{|m−r|/2} / K`.
    pub bound: Option<f64>,
    pub bound_holds: Option<bool>,
    /// `p(0) ≠ 0` with `0 ∈ supp f̂`: the bound does not cover that term.
    pub origin_in_support: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub u: SpectralDistribution,
    pub report: NormReport,
}

/// `û = f̂ / p` on the support of `f̂`, with the norm comparison against a
/// lower-bound certificate over the ℓ1 window spanned by the support.
pub fn solve(sym: &Symbol, f: &SpectralDistribution, k: f64, r: f64) -> Result<Solution> {
    solve_with(sym, f, k, r, true)
}

/// [`solve`], optionally skipping the window scan behind the certificate.
pub fn solve_with(sym: &Symbol, f: &SpectralDistribution, k: f64, r: f64, certify: bool) -> Result<Solution> {
    if let Compatibility::Violations(v) = compatibility_check(sym, f)? {
        return Err(Error::Incompatible { violations: v });
    }
    let mut u = SpectralDistribution::new(f.dim, Origin::Solver);
    for (xi, c) in &f.coeffs {
        let p = symbol_coeff(sym, xi)?.expect("compatible");
        u.set(xi.clone(), c.div(&p)?)?;
    }
    let m = sym.order;
    let f_norm = sobolev_norm(f, k);
    let u_norm = sobolev_norm(&u, k + m - r);
    let ratio = if f_norm > 0.0 { u_norm / f_norm } else { 0.0 };
    let radius = f.max_l1().max(1) as i64;
    let lower_bound = if certify {
        Window::l1(f.dim, radius).ok().and_then(|w| certify_lower_bound(sym, &w, r).ok())
    } else {
        None
    };
    let n = f.dim as f64;
    let bound = lower_bound.as_ref().map(|lb| (1.0 + n).powf((m - r).abs() / 2.0) / lb.k);
    let bound_holds = bound.map(|b| ratio <= b * (1.0 + 1e-12));
    let origin_in_support = f.coeffs.contains_key(&Frequency::zero(f.dim));
    Ok(Solution {
        u,
        report: NormReport { k, r, f_norm, u_norm, ratio, lower_bound, bound, bound_holds, origin_in_support },
    })
}

/// `Λ^s u`, multiplying by `(1+‖ξ‖²)^{−s/2}`. Exact for even integer `s`.
pub fn bessel(u: &SpectralDistribution, s: f64) -> SpectralDistribution {
    let mut out = SpectralDistribution::new(u.dim, Origin::Derived);
    for (xi, c) in &u.coeffs {
        let w = bracket_power(xi, -s / 2.0);
        out.coeffs.insert(xi.clone(), c.scale_real(&w));
    }
    out
}

/// `Σ_ξ û(ξ) φ̂(−ξ)`, exact when every term is.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    pub exact: Option<ExactComplex>,
    pub value: (f64, f64),
}

pub fn pairing(u: &SpectralDistribution, phi: &SpectralDistribution) -> Result<Pairing> {
    if u.dim != phi.dim {
        return Err(Error::DimensionMismatch { expected: u.dim, got: phi.dim });
    }
    let mut exact = Some(ExactComplex::zero());
    let (mut re, mut im) = (0.0, 0.0);
    for (xi, c) in u.shell_order() {
        let Some(d) = phi.coeffs.get(&xi.neg()) else { continue };
        let t = c.mul(d);
        let (a, b) = t.to_f64();
        re += a;
        im += b;
        exact = match (exact, &t) {
            (Some(acc), Coeff::Exact(z)) => acc.try_add(z).ok(),
            _ => None,
        };
    }
    let value = match &exact {
        Some(z) => z.to_f64(),
        None => (re, im),
    };
    Ok(Pairing { exact, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::symbol::parse_symbol;

    fn fr(v: &[i64]) -> Frequency {
        Frequency(v.to_vec())
    }

    #[test]
    fn norm_examples() {
        let u = SpectralDistribution::mode(fr(&[1, 0]));
        assert_eq!(sobolev_norm_sq(&u, 0.0).exact, Some(QuadRational::one()));
        assert_eq!(sobolev_norm_sq(&u, 1.0).exact, Some(QuadRational::from_int(2)));
        let mut u = u;
        u.set(fr(&[0, 2]), Coeff::one()).unwrap();
        assert_eq!(sobolev_norm_sq(&u, -1.0).exact, Some(QuadRational::rational(q(1, 2) + q(1, 5))));
    }

    #[test]
    fn apply_examples() {
        let lap = parse_symbol("laplacian:2").unwrap();
        let v = apply(&lap, &SpectralDistribution::mode(fr(&[1, 1]))).unwrap();
        assert_eq!(v.get(&fr(&[1, 1])), Some(&Coeff::rational(qi(-2))));
        let vf = parse_symbol("vf:alpha=rat:3/2").unwrap();
        assert!(apply(&vf, &SpectralDistribution::mode(fr(&[3, 2]))).unwrap().is_empty());
        let heat = parse_symbol("heat:1").unwrap();
        let v = apply(&heat, &SpectralDistribution::mode(fr(&[3, 2]))).unwrap();
        assert_eq!(v.get(&fr(&[3, 2])), Some(&Coeff::Exact(ExactComplex::from_ints(4, 3))));
    }

    #[test]
    fn compatibility_examples() {
        let vf = parse_symbol("vf:alpha=rat:3/2").unwrap();
        let f = SpectralDistribution::mode(fr(&[3, 2]));
        assert_eq!(compatibility_check(&vf, &f).unwrap(), Compatibility::Violations(vec![fr(&[3, 2])]));
        let f = SpectralDistribution::mode(fr(&[1, 0]));
        assert_eq!(compatibility_check(&vf, &f).unwrap(), Compatibility::Compatible);
        let lap = parse_symbol("laplacian:2").unwrap();
        let f = SpectralDistribution::mode(fr(&[0, 0]));
        assert!(matches!(solve(&lap, &f, 0.0, 0.0), Err(Error::Incompatible { .. })));
    }

    #[test]
    fn solve_examples() {
        let heat = parse_symbol("heat:1").unwrap();
        let s = solve(&heat, &SpectralDistribution::mode(fr(&[1, 0])), 0.0, 1.0).unwrap();
        assert_eq!(s.u.get(&fr(&[1, 0])), Some(&Coeff::Exact(ExactComplex::from_ints(0, -1))));
        assert!((s.report.ratio - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.report.bound_holds, Some(true));

        let lap = parse_symbol("laplacian:2").unwrap();
        let s = solve(&lap, &SpectralDistribution::mode(fr(&[1, 0])), 0.0, 0.0).unwrap();
        assert_eq!(s.u.get(&fr(&[1, 0])), Some(&Coeff::rational(qi(-1))));

        let vf = parse_symbol("vf:alpha=sqrt:2").unwrap();
        let s = solve_with(&vf, &SpectralDistribution::mode(fr(&[8119, 5741])), 0.0, 2.0, false).unwrap();
        let c = s.u.get(&fr(&[8119, 5741])).unwrap();
        let want = 8119.0 + 5741.0 * 2f64.sqrt();
        assert!((c.abs_sq_f64().sqrt() - want).abs() < 1e-9 * want);
        assert!(c.is_exact());
    }

    #[test]
    fn bessel_examples() {
        let u = SpectralDistribution::mode(fr(&[1, 0]));
        assert_eq!(bessel(&u, 0.0), {
            let mut v = u.clone();
            v.origin = Origin::Derived;
            v
        });
        assert_eq!(bessel(&u, 2.0).get(&fr(&[1, 0])), Some(&Coeff::rational(q(1, 2))));
    }
}
