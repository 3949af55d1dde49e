//! Zero census and finite-window lower-bound certificates.

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{QuadRational, Q};
use crate::lattice::{Frequency, Window};
use crate::scan::{scan, Scan, DEFAULT_ZERO_CAP};
use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CensusVerdict {
    /// No point of the window is a zero, not even the origin.
    NoZeros,
    OnlyOrigin,
    FiniteSuspected,
    /// Zero counts strictly increase across the nested radii. A finite scan
    /// cannot prove infinitude, so this stays a heuristic.
    GrowingSuspected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCensus {
    pub window: Window,
    /// First zeros in lexicographic order, capped.
    pub zeros: Vec<Frequency>,
    pub zero_total: u64,
    pub nested_radii: [i64; 3],
    pub nested_counts: [u64; 3],
    pub verdict: CensusVerdict,
    /// Points the enclosure could not decide; never counted as zeros.
    pub undecided: Vec<Frequency>,
    pub undecided_total: u64,
    pub evaluated: u64,
}

impl ZeroCensus {
    pub fn from_scan(sc: &Scan) -> Self {
        let c = sc.nested_zeros;
        let verdict = if sc.zero_total == 0 {
            CensusVerdict::NoZeros
        } else if sc.zero_total == 1 && sc.zeros.first().is_some_and(Frequency::is_zero) {
            CensusVerdict::OnlyOrigin
        } else if c[0] < c[1] && c[1] < c[2] {
            CensusVerdict::GrowingSuspected
        } else {
            CensusVerdict::FiniteSuspected
        };
        ZeroCensus {
            window: sc.window,
            zeros: sc.zeros.clone(),
            zero_total: sc.zero_total,
            nested_radii: sc.nested_radii,
            nested_counts: c,
            verdict,
            undecided: sc.undecided.clone(),
            undecided_total: sc.undecided_total,
            evaluated: sc.evaluated,
        }
    }

    /// Finite in the sense relevant to global hypoellipticity.
    pub fn finitely_many(&self) -> bool {
        self.verdict != CensusVerdict::GrowingSuspected
    }
}

pub fn zero_scan(sym: &Symbol, w: &Window) -> Result<ZeroCensus> {
    sym.dimension_for(Some(w.dim))?;
    Ok(ZeroCensus::from_scan(&scan(sym, w, DEFAULT_ZERO_CAP)))
}

/// `K = min |p(ξ)|·|ξ|^{r−m}` over the certified nonzero points `ξ ≠ 0` of a
/// window. A finite-window certificate, not an asymptotic statement.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerBound {
    pub r: f64,
    pub window: Window,
    pub k: f64,
    pub argmin: Frequency,
    /// Exact `K²` when `|p|²` is exact at the minimizer and `2(r−m)` is an
    /// integer.
    pub k_squared_exact: Option<QuadRational>,
    /// Exact `K` when additionally `K²` is the square of a rational.
    pub k_exact: Option<Q>,
    /// First point whose value could not be certified nonzero, so the bound
    /// does not cover it.
    pub violator: Option<Frequency>,
    pub undecided_total: u64,
}

impl LowerBound {
    pub fn label(&self) -> &'static str {
        "finite-window certificate (non-asymptotic)"
    }
}

pub fn certify_lower_bound(sym: &Symbol, w: &Window, r: f64) -> Result<LowerBound> {
    sym.dimension_for(Some(w.dim))?;
    let sc = scan(sym, w, DEFAULT_ZERO_CAP);
    certify_lower_bound_from_scan(sym, &sc, r)
}

/// Integer `e` with `e = 2x`, if any.
fn twice_as_integer(x: f64) -> Option<i64> {
    let t = 2.0 * x;
    (t.fract() == 0.0 && t.abs() < 1e6).then_some(t as i64)
}

fn pow_q(base: u64, e: i64) -> Q {
    let p = Q::from_integer(num_bigint::BigInt::from(base).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

fn exact_square_root(x: &Q) -> Option<Q> {
    use crate::exact::{is_square_big, isqrt_big};
    if x.is_negative() || !is_square_big(x.numer()) || !is_square_big(x.denom()) {
        return None;
    }
    Some(Q::new(isqrt_big(x.numer()), isqrt_big(x.denom())))
}

pub fn certify_lower_bound_from_scan(sym: &Symbol, sc: &Scan, r: f64) -> Result<LowerBound> {
    let e = r - sc.order;
    let mut per_level: Vec<(usize, f64)> = Vec::new();
    for (s, lvl) in sc.levels.iter().enumerate().skip(1) {
        if lvl.min_abs.is_finite() {
            per_level.push((s, lvl.min_abs * (s as f64).powf(e)));
        }
    }
    let Some(&(s_min, k)) = per_level.iter().min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))) else {
        let nonorigin_undecided = sc.undecided.iter().any(|x| !x.is_zero());
        return Err(if nonorigin_undecided {
            Error::PrecisionExhausted { bits: sym.pmax, context: "no certified nonzero value in the window".into() }
        } else {
            Error::Degenerate
        });
    };
    let argmin = sc.levels[s_min].argmin.clone().expect("finite level minimum has a point");

    // Exact recomputation over the levels whose float value ties the minimum.
    let mut k_squared_exact = None;
    let mut exact_argmin = None;
    if let Some(two_e) = twice_as_integer(e) {
        let mut best: Option<(QuadRational, Frequency)> = None;
        let mut all_exact = true;
        for &(s, v) in &per_level {
            if v > k * (1.0 + 1e-9) {
                continue;
            }
            let xi = sc.levels[s].argmin.as_ref().expect("argmin");
            let Some(p) = sym.eval_exact(xi.coords())? else {
                all_exact = false;
                break;
            };
            let cand = p.abs_sq()?.scale(&pow_q(s as u64, two_e));
            let better = match &best {
                None => true,
                Some((b, _)) => cand.try_sub(b)?.signum() < 0,
            };
            if better {
                best = Some((cand, xi.clone()));
            }
        }
        if all_exact {
            if let Some((b, xi)) = best {
                k_squared_exact = Some(b);
                exact_argmin = Some(xi);
            }
        }
    }
    let k_exact = k_squared_exact
        .as_ref()
        .filter(|v| v.is_rational())
        .and_then(|v| exact_square_root(&v.a));
    let k = match &k_exact {
        Some(q) => crate::exact::q_to_f64(q),
        None => k_squared_exact.as_ref().map_or(k, |v| v.to_f64().sqrt()),
    };
    Ok(LowerBound {
        r,
        window: sc.window,
        k,
        argmin: exact_argmin.unwrap_or(argmin),
        k_squared_exact,
        k_exact,
        violator: sc.undecided.iter().find(|x| !x.is_zero()).cloned(),
        undecided_total: sc.undecided_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::symbol::parse_symbol;

    #[test]
    fn census_examples() {
        let sym = parse_symbol("vf:alpha=sqrt:2").unwrap();
        let c = zero_scan(&sym, &Window::l1(2, 500).unwrap()).unwrap();
        assert_eq!(c.verdict, CensusVerdict::OnlyOrigin);
        assert_eq!(c.zeros, vec![Frequency::zero(2)]);

        let sym = parse_symbol("vf:alpha=rat:3/2").unwrap();
        let c = zero_scan(&sym, &Window::l1(2, 500).unwrap()).unwrap();
        assert_eq!(c.verdict, CensusVerdict::GrowingSuspected);
        assert!(c.zeros.iter().all(|z| z.0[0] * 2 == z.0[1] * 3));
        assert_eq!(c.zero_total, 201);

        let sym = parse_symbol("wave:n=2,eta2=3/1").unwrap();
        let c = zero_scan(&sym, &Window::l1(3, 200).unwrap()).unwrap();
        assert_eq!(c.verdict, CensusVerdict::OnlyOrigin);

        let sym = parse_symbol("bessel:s=2").unwrap();
        let c = zero_scan(&sym, &Window::l1(2, 20).unwrap()).unwrap();
        assert_eq!(c.verdict, CensusVerdict::NoZeros);
    }

    #[test]
    fn lower_bound_examples() {
        let heat = parse_symbol("heat:1").unwrap();
        let lb = certify_lower_bound(&heat, &Window::l1(2, 100).unwrap(), 1.0).unwrap();
        assert!(lb.k >= 0.5f64.sqrt() - 1e-12);
        assert_eq!(lb.k_squared_exact, Some(QuadRational::rational(q(1, 2))));

        let vf = parse_symbol("vf:alpha=rat:3/2").unwrap();
        let lb = certify_lower_bound(&vf, &Window::l1(2, 100).unwrap(), 1.0).unwrap();
        assert_eq!(lb.k_exact, Some(q(1, 2)));

        let lap = parse_symbol("laplacian:2").unwrap();
        let lb = certify_lower_bound(&lap, &Window::l1(2, 100).unwrap(), 0.0).unwrap();
        assert_eq!(lb.k_exact, Some(q(1, 2)));
        assert!(lb.violator.is_none());
    }

    #[test]
    fn oracle_minimum_matches() {
        // Brute-force minimum of |p|·|ξ|^{r−m} for the Laplacian at r = 0.5.
        let lap = parse_symbol("laplacian:2").unwrap();
        let w = Window::l1(2, 40).unwrap();
        let lb = certify_lower_bound(&lap, &w, 0.5).unwrap();
        let mut best = f64::INFINITY;
        w.for_each(|x| {
            if x != [0, 0] {
                let n2 = (x[0] * x[0] + x[1] * x[1]) as f64;
                let s = (x[0].abs() + x[1].abs()) as f64;
                best = best.min(n2 * s.powf(-1.5));
            }
        });
        assert!((lb.k - best).abs() <= 1e-14 * best);
    }

    #[test]
    fn monotone_in_radius() {
        let sym = parse_symbol("vf:alpha=sqrt:2").unwrap();
        let mut last = f64::INFINITY;
        for r in [10, 40, 160, 640] {
            let lb = certify_lower_bound(&sym, &Window::l1(2, r).unwrap(), 2.0).unwrap();
            assert!(lb.k <= last);
            last = lb.k;
        }
    }
}
