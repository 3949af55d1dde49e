//! Zero sets and indices of `p(ξ) = −ξ1² + η²‖ξ′‖²` for rational `η²`.
//!
//! With `η² = a/b` in lowest terms and `a = c²d`, `d` squarefree, the
//! points `ξ1 = c·d·j`, `‖ξ′‖² = b·d·j²` are zeros, since then
//! `bξ1² = b c² d² j² = a‖ξ′‖²`. Whether `‖ξ′‖² = bd·j²` is solvable is a
//! sums-of-squares question in each dimension.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{
    four_square_decomposition, is_square, is_sum_three_squares, is_sum_two_squares, obstruction_primes,
    squarefree_part,
};
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::lattice::{isqrt_u64, Frequency};
use crate::symbol::parse_symbol;

pub const DEFAULT_SAMPLES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroSet {
    NoNonzeroZeros,
    InfiniteZeros,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IndexValue {
    Finite(f64),
    Infinite,
    Bounds(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalWitness {
    pub xi: Frequency,
    /// Exact `p(ξ)`.
    pub value: BigInt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveClassification {
    pub n: usize,
    pub a: u64,
    pub b: u64,
    pub rational_eta: bool,
    pub zero_set: ZeroSet,
    pub family: String,
    /// Sample zeros, each verified by exact evaluation of the symbol.
    pub zeros: Vec<Frequency>,
    pub ind_gh: IndexValue,
    pub ind_gs: IndexValue,
    /// For rational `η` on `T²`: the value `μ(η)` of the index formula,
    /// reported next to `ind_gs`, which comes from the direct proof.
    pub ind_gs_formula: Option<IndexValue>,
    /// `p(D)` is GH-`r` / GS-`r` for these `r`.
    pub gh_at: Option<f64>,
    pub gs_at: Option<f64>,
    pub obstruction_primes: Vec<u64>,
    pub rational_witnesses: Vec<RationalWitness>,
    pub notes: Vec<String>,
}

fn to_u64(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64()
        .filter(|&v| v >= 1)
        .ok_or_else(|| Error::Overflow(format!("{what} {x} is outside 1..2^64")))
}

fn mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or_else(|| Error::Overflow(format!("{a}·{b} overflows u64")))
}

fn strip_fours(mut n: u64) -> u64 {
    while n.is_multiple_of(4) {
        n /= 4;
    }
    n
}

fn to_i64(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(format!("coordinate {v} exceeds i64")))
}

fn point(first: u64, rest: &[u64], n: usize) -> Result<Frequency> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(to_i64(first)?);
    for &x in rest {
        v.push(to_i64(x)?);
    }
    v.resize(n + 1, 0);
    Ok(Frequency(v))
}

/// Classifies the wave operator on `T^1 × T^n` for `η² = eta2`.
pub fn wave_classify(n: usize, eta2: &Q, samples: usize) -> Result<WaveClassification> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if eta2 <= &Q::zero() {
        return Err(Error::InvalidCoefficient("eta2 must be positive".into()));
    }
    let a = to_u64(eta2.numer(), "numerator")?;
    let b = to_u64(eta2.denom(), "denominator")?;
    let sym = parse_symbol(&format!("wave:n={n},eta2={a}/{b}"))?;
    let verify = |xi: &Frequency| -> Result<()> {
        let v = sym.eval_exact(xi.coords())?.expect("rational wave symbol is exact");
        if xi.is_zero() || !v.is_zero() {
            return Err(Error::InvalidArgument(format!("internal: {xi} is not a nonzero zero")));
        }
        Ok(())
    };
    let mut out = WaveClassification {
        n,
        a,
        b,
        rational_eta: false,
        zero_set: ZeroSet::InfiniteZeros,
        family: String::new(),
        zeros: Vec::new(),
        ind_gh: IndexValue::Infinite,
        ind_gs: IndexValue::Finite(2.0),
        ind_gs_formula: None,
        gh_at: None,
        gs_at: Some(2.0),
        obstruction_primes: Vec::new(),
        rational_witnesses: Vec::new(),
        notes: Vec::new(),
    };

    if is_square(a) && is_square(b) {
        let (p, q) = (isqrt_u64(a), isqrt_u64(b));
        out.rational_eta = true;
        out.family = format!("xi1 = {p}t, xi' = ({q}t, 0, ..., 0)");
        for t in 1..=samples as u64 {
            let xi = point(mul(p, t)?, &[mul(q, t)?], n)?;
            verify(&xi)?;
            out.zeros.push(xi);
        }
        out.gs_at = None;
        if n == 1 {
            out.ind_gs = IndexValue::Finite(1.0);
            out.ind_gs_formula = Some(IndexValue::Finite(1.0));
            out.gs_at = Some(1.0);
            out.notes.push(
                "rational eta: the index formula gives mu(eta) = 1 and the direct proof gives GS-1; both are reported and agree"
                    .into(),
            );
            for j in 1..=samples as u64 {
                let xi = point(mul(p, j + 1)?, &[mul(q, j)?], 1)?;
                let v = sym.eval_exact(xi.coords())?.expect("exact").re.a;
                let value = v.to_integer();
                out.rational_witnesses.push(RationalWitness { xi, value });
            }
            out.notes.push(format!(
                "xi = ({p}(j+1), {q}j) gives |p(xi)| = {p}^2 (2j+1) exactly; the source's last step reads {p}(2j+1)"
            ));
        } else {
            out.ind_gs = IndexValue::Bounds(1.0, 2.0);
        }
        return Ok(out);
    }

    let (c, d) = squarefree_part(a)?;
    let bd = mul(b, d)?;
    let cd = mul(c, d)?;
    match n {
        1 => {
            out.zero_set = ZeroSet::NoNonzeroZeros;
            out.family = "none: a/b is not a square".into();
            out.ind_gh = IndexValue::Finite(2.0);
            out.gh_at = Some(2.0);
        }
        2 => {
            let mut obs = obstruction_primes(a)?;
            obs.extend(obstruction_primes(b)?);
            obs.sort_unstable();
            out.notes.push(
                "the theorem statement ends with an empty 'If n=2' item; the worked two-dimensional analysis is followed"
                    .into(),
            );
            if !obs.is_empty() {
                out.zero_set = ZeroSet::NoNonzeroZeros;
                out.family = "none: an obstruction prime divides a or b to an odd power".into();
                out.ind_gh = IndexValue::Finite(2.0);
                out.gh_at = Some(2.0);
                out.obstruction_primes = obs;
            } else {
                out.family = format!("xi1 = {cd}j, |xi'|^2 = {bd}j^2");
                for j in 1..=samples as u64 {
                    let norm = mul(bd, mul(j, j)?)?;
                    let (_, Some((x, y))) = is_sum_two_squares(norm)? else {
                        unreachable!("no obstruction prime")
                    };
                    let xi = point(mul(cd, j)?, &[x, y], n)?;
                    verify(&xi)?;
                    out.zeros.push(xi);
                }
            }
        }
        3 => {
            let lambda = strip_fours(bd);
            if lambda % 8 == 7 {
                out.zero_set = ZeroSet::NoNonzeroZeros;
                out.family = format!("none: bd = {bd} reduces to {lambda} = 7 mod 8");
                out.ind_gh = IndexValue::Finite(2.0);
                out.gh_at = Some(2.0);
                out.notes.push("bd reduces to 7 mod 8 after removing factors of 4, so no ||xi'||^2 = bd j^2 is a sum of three squares and the zero set is {0}; the source asserts infinitely many zeros for every n >= 3".to_string());
            } else {
                out.family = format!("xi1 = {cd}j, |xi'|^2 = {bd}j^2, j = 2(2k+1)");
                for k in 0..samples as u64 {
                    let j = 2 * (2 * k + 1);
                    let norm = mul(bd, mul(j, j)?)?;
                    let (_, Some((x, y, z))) = is_sum_three_squares(norm)? else {
                        unreachable!("not of the excluded form")
                    };
                    let xi = point(mul(cd, j)?, &[x, y, z], n)?;
                    verify(&xi)?;
                    out.zeros.push(xi);
                }
            }
        }
        _ => {
            let ab = mul(a, b)?;
            out.family = format!("xi1 = {a}t, |xi'|^2 = {ab}t^2 by four squares");
            out.notes.push(
                "the source's four-square family satisfies b xi1^2 = a |xi'|^2 only with xi1 = a t and |xi'|^2 = ab t^2".into(),
            );
            for t in 1..=samples as u64 {
                let (w, x, y, z) = four_square_decomposition(mul(ab, mul(t, t)?)?)?;
                let xi = point(mul(a, t)?, &[w, x, y, z], n)?;
                verify(&xi)?;
                out.zeros.push(xi);
            }
        }
    }
    Ok(out)
}
