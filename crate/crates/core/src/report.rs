//! JSON and CSV renderings of every result type.
//!
//! Reals are strings with 17 significant digits (`{:.16e}`), exact values
//! are `p/q` strings, and object keys come out sorted, so identical inputs
//! give byte-identical output.

use serde_json::{json, Map, Value};

use crate::analysis::{
    CensusVerdict, ClosedRangeWitness, Construction, EnvelopePoint, GhEstimate, GhWitness, GsWitness, IndexReport,
    IndexValue, LowerBound, WaveClassification, WitnessSearch, ZeroCensus, ZeroSet,
};
use crate::diophantine::{ContinuedFraction, MuEntry, MuEstimate, MuValue};
use crate::error::Error;
use crate::exact::fmt_q;
use crate::lattice::{Frequency, Norm, Window};
use crate::spectral::{distribution_to_json, Coeff, NormReport, NormSq, Solution};

pub fn real(x: f64) -> Value {
    Value::String(fmt_real(x))
}

pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, real)
}

pub fn freq(xi: &Frequency) -> Value {
    json!(xi.coords())
}

fn freqs(v: &[Frequency]) -> Value {
    Value::Array(v.iter().map(freq).collect())
}

pub fn window(w: &Window) -> Value {
    json!({
        "dim": w.dim,
        "radius": w.radius,
        "norm": match w.norm { Norm::L1 => "l1", Norm::L2 => "l2" },
    })
}

fn coeff(c: &Coeff) -> Value {
    match c {
        Coeff::Exact(z) => json!({ "re": z.re.to_string(), "im": z.im.to_string(), "abs": real(z.abs_f64()) }),
        Coeff::Float { re, im } => json!({ "re": real(*re), "im": real(*im), "abs": real(re.hypot(*im)) }),
    }
}

fn norm_sq(n: &NormSq) -> Value {
    json!({ "value": real(n.value), "exact": n.exact.as_ref().map(|q| q.to_string()) })
}

pub fn census(c: &ZeroCensus) -> Value {
    let verdict = match c.verdict {
        CensusVerdict::NoZeros => "NoZeros",
        CensusVerdict::OnlyOrigin => "OnlyOrigin",
        CensusVerdict::FiniteSuspected => "FiniteSuspected",
        CensusVerdict::GrowingSuspected => "GrowingSuspected",
    };
    let nested: Vec<Value> = c
        .nested_radii
        .iter()
        .zip(c.nested_counts)
        .map(|(r, n)| json!({ "radius": r, "zeros": n }))
        .collect();
    json!({
        "window": window(&c.window),
        "verdict": verdict,
        "heuristic": c.verdict == CensusVerdict::GrowingSuspected,
        "zeros": freqs(&c.zeros),
        "zeros_listed": c.zeros.len(),
        "zero_total": c.zero_total,
        "nested": nested,
        "origin_is_zero": c.zeros.first().is_some_and(Frequency::is_zero),
        "undecided": freqs(&c.undecided),
        "undecided_total": c.undecided_total,
        "evaluated": c.evaluated,
    })
}

pub fn lower_bound(lb: &LowerBound) -> Value {
    json!({
        "r": real(lb.r),
        "K": real(lb.k),
        "K_exact": lb.k_exact.as_ref().map(fmt_q),
        "K_squared_exact": lb.k_squared_exact.as_ref().map(|q| q.to_string()),
        "argmin": freq(&lb.argmin),
        "window": window(&lb.window),
        "violator": lb.violator.as_ref().map(freq),
        "undecided_total": lb.undecided_total,
        "label": lb.label(),
    })
}

fn gh_estimate(g: Option<GhEstimate>) -> Value {
    match g {
        None => Value::Null,
        Some(GhEstimate::Finite(r)) => json!({ "value": real(r), "heuristic": false }),
        Some(GhEstimate::InfiniteHeuristic) => {
            json!({ "value": "inf", "heuristic": true, "reason": "heuristic (growing zero count in window)" })
        }
    }
}

fn envelope_point(p: &EnvelopePoint) -> Value {
    json!({
        "xi": freq(&p.xi),
        "l1": p.l1,
        "log_xi": real(p.log_xi),
        "abs_p": real(p.abs_p),
        "log_p": real(p.log_p),
        "exponent": real(p.exponent),
        "loss": real(p.loss),
    })
}

pub fn index_report(r: &IndexReport) -> Value {
    let shells: Vec<Value> = r
        .shells
        .iter()
        .map(|s| {
            json!({
                "t": s.t,
                "lo": s.lo,
                "hi": s.hi,
                "points": s.points,
                "zeros": s.zeros,
                "max_loss": opt_real(s.max_loss),
                "witness": s.witness.as_ref().map(freq),
                "witness_abs_p": opt_real(s.witness_abs_p),
            })
        })
        .collect();
    json!({
        "symbol": r.symbol,
        "order": real(r.order),
        "window": window(&r.window),
        "tail_shells": r.tail,
        "tail_shell_indices": r.tail_shells,
        "shells": shells,
        "r_hat_gs": opt_real(r.r_hat_gs),
        "r_hat_gh": gh_estimate(r.r_hat_gh),
        "census": census(&r.census),
        "lower_bound": r.lower_bound.as_ref().map(lower_bound),
        "lower_bound_error": r.lower_bound_error,
        "precision_dominated": r.precision_dominated,
        "envelope": r.envelope.iter().map(envelope_point).collect::<Vec<_>>(),
        "witnesses": r.shells.iter().filter_map(|s| s.witness.as_ref().map(freq)).collect::<Vec<_>>(),
    })
}

pub const ENVELOPE_HEADER: &str = "l1xi,log_l1xi,abs_p,log_abs_p,loss";

/// One row per ℓ1 level: the level minimizer of `|p|`.
pub fn envelope_csv(points: &[EnvelopePoint]) -> String {
    let mut out = String::from(ENVELOPE_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.l1,
            fmt_real(p.log_xi),
            fmt_real(p.abs_p),
            fmt_real(p.log_p),
            fmt_real(p.loss)
        ));
    }
    out
}

pub fn witness_search(s: &WitnessSearch) -> Value {
    let points: Vec<Value> = s
        .points
        .iter()
        .map(|p| {
            json!({
                "j": p.j,
                "xi": freq(&p.xi),
                "l1": p.l1,
                "value": coeff(&p.value),
                "abs_p": real(p.abs_p),
                "bound": real(p.bound),
                "certification": format!("{:?}", p.certification),
            })
        })
        .collect();
    json!({
        "symbol": s.symbol,
        "dim": s.dim,
        "order": real(s.order),
        "r": real(s.r),
        "requested": s.requested,
        "construction": match s.construction {
            Construction::SmallValues => "SmallValues",
            Construction::ZeroSequence => "ZeroSequence",
        },
        "generator": format!("{:?}", s.generator),
        "budget": s.budget,
        "radius_searched": s.radius_searched,
        "witnesses": points,
        "undecided": s.undecided,
    })
}

pub fn gh_witness(w: &GhWitness) -> Value {
    json!({
        "kind": "gh",
        "search": witness_search(&w.search),
        "u": distribution_to_json(&w.u),
        "u_norm_sq_h0": norm_sq(&w.u_norm_sq),
        "pu_norm_sq_h_r_minus_m": norm_sq(&w.pu_norm_sq),
        "proof_bound": real(w.bound),
        "bound_holds": w.bound_holds,
    })
}

pub fn gs_witness(w: &GsWitness) -> Value {
    json!({
        "kind": "gs",
        "search": witness_search(&w.search),
        "f": distribution_to_json(&w.f),
        "f_norm_sq_h_r_minus_m": norm_sq(&w.f_norm_sq),
        "proof_bound": real(w.bound),
        "bound_holds": w.bound_holds,
        "u": distribution_to_json(&w.u),
        "u_norm_sq_h0": norm_sq(&w.u_norm_sq),
    })
}

pub fn closed_range(w: &ClosedRangeWitness) -> Value {
    let reals = |v: &[f64]| Value::Array(v.iter().map(|&x| real(x)).collect());
    json!({
        "kind": "closed-range",
        "search": witness_search(&w.search),
        "k": real(w.k),
        "f": distribution_to_json(&w.f),
        "residual_norm_sq": reals(&w.residual_norm_sq),
        "tail": reals(&w.tail),
        "tail_k_weighted": reals(&w.tail_k_weighted),
        "strictly_decreasing": w.strictly_decreasing,
        "max_rel_deviation": real(w.max_rel_deviation),
    })
}

fn index_value(v: &IndexValue) -> Value {
    match v {
        IndexValue::Finite(x) => json!({ "value": real(*x) }),
        IndexValue::Infinite => json!({ "value": "inf" }),
        IndexValue::Bounds(a, b) => json!({ "lo": real(*a), "hi": real(*b) }),
    }
}

pub fn wave(c: &WaveClassification) -> Value {
    let witnesses: Vec<Value> = c
        .rational_witnesses
        .iter()
        .map(|w| json!({ "xi": freq(&w.xi), "p": w.value.to_string() }))
        .collect();
    json!({
        "n": c.n,
        "eta2": format!("{}/{}", c.a, c.b),
        "rational_eta": c.rational_eta,
        "zero_set": match c.zero_set {
            ZeroSet::NoNonzeroZeros => "NoNonzeroZeros",
            ZeroSet::InfiniteZeros => "InfiniteZeros",
        },
        "family": c.family,
        "zeros": freqs(&c.zeros),
        "zeros_verified": true,
        "ind_gh": index_value(&c.ind_gh),
        "ind_gs": index_value(&c.ind_gs),
        "ind_gs_formula": c.ind_gs_formula.as_ref().map(index_value),
        "gh_at": opt_real(c.gh_at),
        "gs_at": opt_real(c.gs_at),
        "obstruction_primes": c.obstruction_primes,
        "rational_witnesses": witnesses,
        "notes": c.notes,
    })
}

pub fn continued_fraction(cf: &ContinuedFraction) -> Value {
    json!({
        "quotients": cf.quotients.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "convergents": cf.convergents.iter().map(|(p, q)| json!([p.to_string(), q.to_string()])).collect::<Vec<_>>(),
        "certified_depth": cf.certified_depth,
        "status": format!("{:?}", cf.status),
        "bits": cf.bits,
        "determinant_identity": cf.determinant_identity_holds(),
    })
}

pub fn mu_estimate(m: &MuEstimate) -> Value {
    let mu: Vec<Value> = m.mu.iter().map(|(k, v)| json!({ "k": k, "mu": real(*v) })).collect();
    json!({
        "mu": mu,
        "mu_hat": real(m.mu_hat),
        "max_mu": real(m.max_mu),
        "depth": m.depth,
        "requested_depth": m.requested_depth,
        "status": format!("{:?}", m.status),
        "heuristic": true,
        "threshold": real(m.threshold),
        "tail": m.tail,
        "expansion": continued_fraction(&m.expansion),
    })
}

pub fn mu_entry(e: &MuEntry) -> Value {
    let value = match &e.value {
        MuValue::Exact(v) => json!({ "value": real(*v) }),
        MuValue::Infinite => json!({ "value": "inf" }),
        MuValue::Interval(a, b) => json!({ "lo": a, "hi": b }),
    };
    json!({ "class": e.class, "value": value, "citation": e.citation, "notes": e.notes })
}

pub fn norm_report(r: &NormReport) -> Value {
    json!({
        "k": real(r.k),
        "r": real(r.r),
        "f_norm": real(r.f_norm),
        "u_norm": real(r.u_norm),
        "ratio": real(r.ratio),
        "lower_bound": r.lower_bound.as_ref().map(lower_bound),
        "bound": opt_real(r.bound),
        "bound_holds": r.bound_holds,
        "origin_in_support": r.origin_in_support,
        "normalization": "(2 pi)^n factor omitted",
    })
}

pub fn solution(s: &Solution) -> Value {
    json!({ "u": distribution_to_json(&s.u), "norm_report": norm_report(&s.report) })
}

/// `{"error": {...}}` with a stable kind tag and structured details.
pub fn error(e: &Error) -> Value {
    let mut m = Map::new();
    let kind = match e {
        Error::Parse { position, .. } => {
            m.insert("position".into(), json!(position));
            "Parse"
        }
        Error::InvalidCoefficient(_) => "InvalidCoefficient",
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::DimensionMismatch { expected, got } => {
            m.insert("expected".into(), json!(expected));
            m.insert("got".into(), json!(got));
            "DimensionMismatch"
        }
        Error::Overflow(_) => "Overflow",
        Error::PrecisionExhausted { bits, .. } => {
            m.insert("bits".into(), json!(bits));
            "PrecisionExhausted"
        }
        Error::BudgetExhausted { found, requested, radius, max_r_supported } => {
            m.insert("found".into(), json!(found));
            m.insert("requested".into(), json!(requested));
            m.insert("radius".into(), json!(radius));
            m.insert("max_r_supported".into(), opt_real(*max_r_supported));
            "BudgetExhausted"
        }
        Error::Incompatible { violations } => {
            m.insert("violations".into(), freqs(violations));
            "Incompatible"
        }
        Error::Degenerate => "Degenerate",
        Error::UnknownClass(_) => "UnknownClass",
        Error::Format(_) => "Format",
    };
    m.insert("kind".into(), json!(kind));
    m.insert("message".into(), json!(e.to_string()));
    json!({ "error": Value::Object(m) })
}

/// Pretty JSON with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(2.0), "2.0000000000000000e0");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
        let back: f64 = fmt_real(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({ "b": 1, "a": 2 });
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":2,"b":1}"#);
    }

    #[test]
    fn errors_are_tagged() {
        let v = error(&Error::Incompatible { violations: vec![Frequency(vec![3, 2])] });
        assert_eq!(v["error"]["kind"], "Incompatible");
        assert_eq!(v["error"]["violations"], json!([[3, 2]]));
    }
}
