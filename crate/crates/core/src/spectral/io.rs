//! JSON interchange for distributions.
//!
//! ```text
//! { "n": 2, "coeffs": [ { "xi": [1, 0], "re": "1/1", "im": "0/1" } ] }
//! ```
//!
//! Components are `p/q`, `p/q+r/s*sqrt:d` for values in a quadratic field,
//! or `f:<float>` for inexact coefficients. Entries are written in (ℓ1, lex)
//! order; on input the order is irrelevant and repeated `xi` is an error.

use serde_json::{json, Value};

use super::{Coeff, Origin, SpectralDistribution};
use crate::error::{Error, Result};
use crate::exact::{ExactComplex, QuadRational};
use crate::lattice::Frequency;

fn fmt_component(v: f64) -> String {
    format!("f:{v:.16e}")
}

pub fn distribution_to_json(u: &SpectralDistribution) -> Value {
    let coeffs: Vec<Value> = u
        .shell_order()
        .into_iter()
        .map(|(xi, c)| {
            let (re, im) = match c {
                Coeff::Exact(z) => (z.re.to_string(), z.im.to_string()),
                Coeff::Float { re, im } => (fmt_component(*re), fmt_component(*im)),
            };
            json!({ "xi": xi.coords(), "re": re, "im": im })
        })
        .collect();
    let mut out = json!({ "n": u.dim, "coeffs": coeffs });
    if !u.flagged.is_empty() {
        let flagged: Vec<_> = u.flagged.iter().map(|x| x.coords().to_vec()).collect();
        out["flagged"] = json!(flagged);
    }
    out
}

enum Part {
    Exact(QuadRational),
    Float(f64),
}

fn part(v: Option<&Value>, what: &str) -> Result<Part> {
    let s = match v {
        None => return Ok(Part::Exact(QuadRational::zero())),
        Some(Value::String(s)) => s.as_str(),
        Some(Value::Number(n)) if n.is_i64() => return Ok(Part::Exact(QuadRational::from_int(n.as_i64().unwrap()))),
        Some(other) => return Err(Error::Format(format!("{what} must be a string, found {other}"))),
    };
    if let Some(f) = s.strip_prefix("f:") {
        let x: f64 = f.trim().parse().map_err(|_| Error::Format(format!("bad float {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::Format(format!("non-finite coefficient {s:?}")));
        }
        return Ok(Part::Float(x));
    }
    s.parse::<QuadRational>()
        .map(Part::Exact)
        .map_err(|e| Error::Format(format!("{what} {s:?}: {e}")))
}

pub fn distribution_from_json(v: &Value) -> Result<SpectralDistribution> {
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Format("missing positive integer field \"n\"".into()))? as usize;
    let entries = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format("missing array field \"coeffs\"".into()))?;
    let mut pairs = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let xi = e
            .get("xi")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format(format!("entry {i}: missing \"xi\"")))?;
        let coords = xi
            .iter()
            .map(|c| c.as_i64().ok_or_else(|| Error::Format(format!("entry {i}: non-integer coordinate"))))
            .collect::<Result<Vec<i64>>>()?;
        if coords.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: coords.len() });
        }
        let c = match (part(e.get("re"), "re")?, part(e.get("im"), "im")?) {
            (Part::Exact(re), Part::Exact(im)) => {
                if !re.is_rational() && !im.is_rational() && re.d != im.d {
                    return Err(Error::Format(format!("entry {i}: components in different fields")));
                }
                Coeff::Exact(ExactComplex::new(re, im))
            }
            (a, b) => {
                let f = |p: Part| match p {
                    Part::Exact(q) => q.to_f64(),
                    Part::Float(x) => x,
                };
                Coeff::Float { re: f(a), im: f(b) }
            }
        };
        pairs.push((Frequency(coords), c));
    }
    SpectralDistribution::from_pairs(n, Origin::User, pairs)
}

pub fn parse_distribution(text: &str) -> Result<SpectralDistribution> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    distribution_from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let text = r#"{"n":2,"coeffs":[{"xi":[0,2],"re":"1/3","im":"-2/1"},
            {"xi":[1,0],"re":"1/1+1/2*sqrt:8","im":"0/1"},{"xi":[1,1],"re":"f:0.25","im":"0/1"}]}"#;
        let u = parse_distribution(text).unwrap();
        assert_eq!(u.len(), 3);
        let back = distribution_from_json(&distribution_to_json(&u)).unwrap();
        assert_eq!(back.coeffs, u.coeffs);
        let first = &distribution_to_json(&u)["coeffs"][0];
        assert_eq!(first["xi"], json!([1, 0]));
        assert_eq!(first["re"], "1/1+1/1*sqrt:2");
    }

    #[test]
    fn rejects_bad_files() {
        let dup = r#"{"n":1,"coeffs":[{"xi":[1],"re":"1/1","im":"0/1"},{"xi":[1],"re":"2/1","im":"0/1"}]}"#;
        assert!(matches!(parse_distribution(dup), Err(Error::Format(_))));
        let dim = r#"{"n":2,"coeffs":[{"xi":[1],"re":"1/1","im":"0/1"}]}"#;
        assert!(matches!(parse_distribution(dim), Err(Error::DimensionMismatch { .. })));
        assert!(parse_distribution(r#"{"n":1,"coeffs":[{"xi":[1],"re":"1/0"}]}"#).is_err());
        assert!(parse_distribution("[]").is_err());
    }

    #[test]
    fn zero_entries_are_dropped() {
        let u = parse_distribution(r#"{"n":1,"coeffs":[{"xi":[3],"re":"0/5","im":"0/1"}]}"#).unwrap();
        assert!(u.is_empty());
    }
}
