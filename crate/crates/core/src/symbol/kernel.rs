//! Per-point modulus kernels for lattice scans.
//!
//! Exact classes test zeros in integer arithmetic and produce `|p(ξ)|` in
//! `f64` without cancellation (surds are rationalized). Enclosure classes
//! try an `f64` interval first and fall back to rational enclosures. Every
//! symbol here satisfies `|p(−ξ)| = |p(ξ)|`, so transposition is ignored.

use num_traits::{ToPrimitive, Zero};

use super::{AbsLower, Kind, Symbol};
use crate::exact::{q_to_f64, Q};
use crate::lattice::l2sq;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointEval {
    Zero,
    Nonzero(f64),
    /// Neither zero nor nonzero could be certified within the precision cap.
    Undecided,
}

#[derive(Clone, Debug)]
pub enum Kernel<'a> {
    Laplacian,
    Heat,
    Dx(usize),
    /// `i(ξ1 − αξ2)` with `α = u/v + (s/t)√d + i g/h`.
    VfExact {
        u: i128,
        v: i128,
        s: i128,
        t: i128,
        d: i128,
        sqrt_d: f64,
        g: f64,
        h: f64,
        sym: &'a Symbol,
    },
    /// `−ξ1² + (a/b)‖ξ′‖²`.
    WaveRat {
        a: i128,
        b: i128,
    },
    VfFloat {
        lo: f64,
        hi: f64,
        sym: &'a Symbol,
    },
    WaveFloat {
        lo: f64,
        hi: f64,
        sym: &'a Symbol,
    },
    Bessel {
        half: f64,
    },
    LogDamp,
    Generic(&'a Symbol),
}

/// Coefficients beyond this size make the i128 products unsafe.
const SMALL: i128 = 1 << 40;

fn small(q: &Q) -> Option<(i128, i128)> {
    let n = q.numer().to_i128()?;
    let d = q.denom().to_i128()?;
    (n.abs() < SMALL && d < SMALL).then_some((n, d))
}

impl<'a> Kernel<'a> {
    pub fn for_symbol(sym: &'a Symbol) -> Kernel<'a> {
        match &sym.kind {
            Kind::Laplacian => Kernel::Laplacian,
            Kind::Heat => Kernel::Heat,
            Kind::Dx { j } => Kernel::Dx(*j - 1),
            Kind::Bessel { s } => Kernel::Bessel {
                half: q_to_f64(s) / 2.0,
            },
            Kind::LogDamp => Kernel::LogDamp,
            Kind::Vf { alpha, im } => {
                if let Some(a) = &alpha.exact {
                    let parts = (small(&a.a), small(&a.b), a.d.to_i128(), small(im));
                    if let (Some((u, v)), Some((s, t)), Some(d), Some((g, h))) = parts {
                        if d < SMALL {
                            return Kernel::VfExact {
                                u,
                                v,
                                s,
                                t,
                                d,
                                sqrt_d: (d as f64).sqrt(),
                                g: g as f64,
                                h: h as f64,
                                sym,
                            };
                        }
                    }
                    return Kernel::Generic(sym);
                }
                if !im.is_zero() {
                    return Kernel::Generic(sym);
                }
                match alpha.real.f64_bounds() {
                    Ok((lo, hi)) => Kernel::VfFloat { lo, hi, sym },
                    Err(_) => Kernel::Generic(sym),
                }
            }
            Kind::Wave { eta2: Some(e2), .. } => match small(e2) {
                Some((a, b)) => Kernel::WaveRat { a, b },
                None => Kernel::Generic(sym),
            },
            Kind::Wave { eta: Some(eta), .. } => match eta.real.enclosure(64) {
                Ok(iv) => {
                    let (lo, hi) = iv.square().to_f64_bounds();
                    Kernel::WaveFloat { lo, hi, sym }
                }
                Err(_) => Kernel::Generic(sym),
            },
            Kind::Wave { .. } => Kernel::Generic(sym),
        }
    }

    #[inline]
    pub fn eval(&self, xi: &[i64]) -> PointEval {
        match self {
            Kernel::Laplacian => {
                let s = l2sq(xi);
                if s == 0 {
                    PointEval::Zero
                } else {
                    PointEval::Nonzero(s as f64)
                }
            }
            Kernel::Heat => {
                let s = l2sq(&xi[1..]);
                if s == 0 && xi[0] == 0 {
                    PointEval::Zero
                } else {
                    PointEval::Nonzero((xi[0] as f64).hypot(s as f64))
                }
            }
            Kernel::Dx(j) => {
                if xi[*j] == 0 {
                    PointEval::Zero
                } else {
                    PointEval::Nonzero(xi[*j].unsigned_abs() as f64)
                }
            }
            Kernel::VfExact {
                u,
                v,
                s,
                t,
                d,
                sqrt_d,
                g,
                h,
                sym,
            } => {
                let (x1, x2) = (xi[0] as i128, xi[1] as i128);
                // (vt)·(ξ1 − α_re ξ2) = A − B√d
                let a = t * (v * x1 - u * x2);
                let b = v * s * x2;
                let den = (*v as f64) * (*t as f64);
                let im = if b == 0 {
                    a.unsigned_abs() as f64 / den
                } else if a == 0 || (a > 0) != (b > 0) {
                    (a.unsigned_abs() as f64 + b.unsigned_abs() as f64 * sqrt_d) / den
                } else {
                    let (af, bf) = (a.unsigned_abs() as f64, b.unsigned_abs() as f64 * sqrt_d);
                    let diff = (af - bf).abs();
                    if diff > 1e-3 * af {
                        // Subtraction loses at most a few bits here.
                        diff / den
                    } else {
                        let n = a
                            .checked_mul(a)
                            .zip(b.checked_mul(b).and_then(|bb| bb.checked_mul(*d)));
                        match n {
                            Some((aa, dbb)) => {
                                let num = (aa - dbb).unsigned_abs() as f64;
                                num / ((a.unsigned_abs() as f64 + b.unsigned_abs() as f64 * sqrt_d)
                                    * den)
                            }
                            None => return generic(sym, xi),
                        }
                    }
                };
                if *g == 0.0 || xi[1] == 0 {
                    return if im == 0.0 {
                        PointEval::Zero
                    } else {
                        PointEval::Nonzero(im)
                    };
                }
                let re = g * xi[1] as f64 / h;
                // The real part is nonzero here.
                PointEval::Nonzero(re.hypot(im))
            }
            Kernel::WaveRat { a, b } => {
                let x1 = xi[0] as i128;
                let s = l2sq(&xi[1..]) as i128;
                let n = a * s - b * x1 * x1;
                if n == 0 {
                    PointEval::Zero
                } else {
                    PointEval::Nonzero(n.unsigned_abs() as f64 / *b as f64)
                }
            }
            Kernel::VfFloat { lo, hi, sym } => {
                let (x, y) = (xi[0] as f64, xi[1] as f64);
                if xi[1] == 0 {
                    return if xi[0] == 0 {
                        PointEval::Zero
                    } else {
                        PointEval::Nonzero(x.abs())
                    };
                }
                let p = x - hi * y;
                let q = x - lo * y;
                let err = 4.0 * f64::EPSILON * (x.abs() + (hi * y).abs()) + f64::MIN_POSITIVE;
                certify(p.min(q) - err, p.max(q) + err, sym, xi)
            }
            Kernel::WaveFloat { lo, hi, sym } => {
                let x1 = xi[0] as f64;
                let s = l2sq(&xi[1..]) as f64;
                if s == 0.0 {
                    return if xi[0] == 0 {
                        PointEval::Zero
                    } else {
                        PointEval::Nonzero(x1 * x1)
                    };
                }
                let p = lo * s - x1 * x1;
                let q = hi * s - x1 * x1;
                let err = 4.0 * f64::EPSILON * (x1 * x1 + hi * s) + f64::MIN_POSITIVE;
                certify(p - err, q + err, sym, xi)
            }
            Kernel::Bessel { half } => PointEval::Nonzero((1.0 + l2sq(xi) as f64).powf(-half)),
            Kernel::LogDamp => {
                if xi[0] == 0 {
                    PointEval::Zero
                } else {
                    let a = xi[0].unsigned_abs() as f64;
                    PointEval::Nonzero(a / (std::f64::consts::E + a).ln())
                }
            }
            Kernel::Generic(sym) => generic(sym, xi),
        }
    }
}

/// Accepts an `f64` interval that excludes zero and is tight enough, and
/// otherwise defers to the rational path.
#[inline]
fn certify(lo: f64, hi: f64, sym: &Symbol, xi: &[i64]) -> PointEval {
    if lo > 0.0 || hi < 0.0 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= 1e-9 * mid.abs() {
            return PointEval::Nonzero(mid.abs());
        }
    }
    generic(sym, xi)
}

fn generic(sym: &Symbol, xi: &[i64]) -> PointEval {
    match sym.abs_lower_exact(xi) {
        Ok(AbsLower::Zero) => PointEval::Zero,
        Ok(AbsLower::NonzeroWithLog { abs, .. }) => PointEval::Nonzero(abs),
        Err(_) => PointEval::Undecided,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Window;
    use crate::symbol::parse_symbol;

    /// Kernel moduli agree with the exact evaluator on a window.
    fn agree(spec: &str, radius: i64, tol: f64) {
        let sym = parse_symbol(spec).unwrap();
        let k = sym.kernel();
        let n = sym.dimension_for(None).unwrap();
        Window::l1(n, radius).unwrap().for_each(|xi| {
            let fast = k.eval(xi);
            let slow = generic(&sym, xi);
            match (fast, slow) {
                (PointEval::Zero, PointEval::Zero) => {}
                (PointEval::Nonzero(a), PointEval::Nonzero(b)) => {
                    assert!((a - b).abs() <= tol * b, "{spec} at {xi:?}: {a} vs {b}")
                }
                other => panic!("{spec} at {xi:?}: {other:?}"),
            }
        });
    }

    #[test]
    fn kernels_match_exact_evaluation() {
        for s in [
            "laplacian:2",
            "heat:1",
            "dx:2",
            "vf:alpha=sqrt:2",
            "vf:alpha=rat:3/2",
            "vf:alpha=sqrt:8/9",
            "vf:alpha=rat:1/2+i*1/3",
            "wave2d:eta=sqrt:2",
            "wave2d:eta=rat:1/1",
            "logdamp",
            "bessel:s=2",
        ] {
            agree(s, 40, 1e-13);
        }
        agree("wave:n=2,eta2=3/1", 14, 1e-13);
        agree("vf:alpha=e", 40, 1e-9);
        agree("wave2d:eta=liouville:10", 40, 1e-9);
    }

    #[test]
    fn pell_modulus_is_accurate() {
        let sym = parse_symbol("vf:alpha=sqrt:2").unwrap();
        let PointEval::Nonzero(a) = sym.kernel().eval(&[8119, 5741]) else {
            panic!()
        };
        let e = 1.0 / (8119.0 + 5741.0 * 2f64.sqrt());
        assert!(((a - e) / e).abs() < 1e-12);
    }
}
