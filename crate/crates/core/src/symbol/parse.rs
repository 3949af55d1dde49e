//! Parser for the symbol DSL.
//!
//! ```text
//! symbol := "laplacian:" INT | "heat:" INT | "dx:" INT
//!         | "vf:alpha=" real | "wave2d:eta=" real
//!         | "wave:n=" INT ",eta2=" rational | "wave:n=" INT ",eta=" real
//!         | "bessel:s=" decimal | "logdamp"
//! real   := rat:P/Q | sqrt:R | alg:[c_n,…,c_0],[lo,hi] | dec:D | liouville:B
//!         | champernowne:B | e | real "+i*" rational (vf only)
//! ```

use num_traits::{Signed, Zero};

use super::{Coefficient, Kind, Symbol};
use crate::error::{Error, Result};
use crate::exact::{parse_q, q_to_f64, Q};
use crate::real::{default_pmax, RealSpec};

fn perr(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn parse_dim(body: &str, at: usize, what: &str) -> Result<usize> {
    let n: usize = body
        .parse()
        .map_err(|_| perr(at, format!("{what} expects a positive integer")))?;
    if n == 0 {
        return Err(perr(at, format!("{what} must be at least 1")));
    }
    if n > 64 {
        return Err(perr(
            at,
            format!("{what} {n} is beyond the supported dimension"),
        ));
    }
    Ok(n)
}

fn parse_rational_at(body: &str, at: usize) -> Result<Q> {
    parse_q(body).map_err(|e| match e {
        Error::InvalidCoefficient(m) if m.contains("zero denominator") => {
            Error::InvalidCoefficient(m)
        }
        _ => perr(at, format!("expected a rational, found {body:?}")),
    })
}

fn coefficient(body: &str, at: usize, pmax: u32) -> Result<Coefficient> {
    Ok(Coefficient::new(RealSpec::parse_at(body, at)?, pmax))
}

/// `bessel:s=` accepts a signed decimal or a fraction.
fn parse_decimal_q(body: &str, at: usize) -> Result<Q> {
    if body.contains('/') {
        return parse_rational_at(body, at);
    }
    match RealSpec::parse_at(&format!("dec:{body}"), at.saturating_sub(4)) {
        Ok(spec) => Ok(spec.decimal_value().expect("decimal")),
        Err(_) => Err(perr(at, format!("expected a decimal, found {body:?}"))),
    }
}

pub fn parse_symbol(text: &str) -> Result<Symbol> {
    parse_symbol_with(text, default_pmax())
}

pub fn parse_symbol_with(text: &str, pmax: u32) -> Result<Symbol> {
    let name = text.to_string();
    let mk = |dim: Option<usize>, order: f64, kind: Kind| Symbol {
        name: name.clone(),
        dim,
        order,
        kind,
        transposed: false,
        pmax,
    };
    if text == "logdamp" {
        return Ok(mk(Some(1), 1.0, Kind::LogDamp));
    }
    let Some((head, body)) = text.split_once(':') else {
        return Err(perr(0, format!("unknown symbol {text:?}")));
    };
    let at = head.len() + 1;
    match head {
        "laplacian" => Ok(mk(
            Some(parse_dim(body, at, "laplacian")?),
            2.0,
            Kind::Laplacian,
        )),
        "heat" => {
            let n = parse_dim(body, at, "heat")?;
            Ok(mk(Some(n + 1), 2.0, Kind::Heat))
        }
        "dx" => {
            let j = parse_dim(body, at, "dx")?;
            Ok(mk(Some(j), 1.0, Kind::Dx { j }))
        }
        "vf" => {
            let rest = body
                .strip_prefix("alpha=")
                .ok_or_else(|| perr(at, "expected alpha="))?;
            let at = at + "alpha=".len();
            let (re_text, im) = match rest.rfind("+i*") {
                Some(k) => {
                    let im = parse_rational_at(&rest[k + 3..], at + k + 3)?;
                    (&rest[..k], im)
                }
                None => (rest, Q::zero()),
            };
            let alpha = coefficient(re_text, at, pmax)?;
            Ok(mk(Some(2), 1.0, Kind::Vf { alpha, im }))
        }
        "wave2d" => {
            let rest = body
                .strip_prefix("eta=")
                .ok_or_else(|| perr(at, "expected eta="))?;
            let at = at + 4;
            wave(1, rest, at, pmax).map(|k| mk(Some(2), 2.0, k))
        }
        "wave" => {
            let rest = body
                .strip_prefix("n=")
                .ok_or_else(|| perr(at, "expected n="))?;
            let at = at + 2;
            let comma = rest
                .find(',')
                .ok_or_else(|| perr(at + rest.len(), "expected ,eta2= or ,eta="))?;
            let n = parse_dim(&rest[..comma], at, "wave n")?;
            let tail = &rest[comma + 1..];
            let at = at + comma + 1;
            if let Some(r) = tail.strip_prefix("eta2=") {
                let e2 = parse_rational_at(r, at + 5)?;
                if !e2.is_positive() {
                    return Err(Error::InvalidCoefficient("eta2 must be positive".into()));
                }
                Ok(mk(
                    Some(n + 1),
                    2.0,
                    Kind::Wave {
                        n,
                        eta2: Some(e2),
                        eta: None,
                    },
                ))
            } else if let Some(r) = tail.strip_prefix("eta=") {
                wave(n, r, at + 4, pmax).map(|k| mk(Some(n + 1), 2.0, k))
            } else {
                Err(perr(at, "expected eta2= or eta="))
            }
        }
        "bessel" => {
            let rest = body
                .strip_prefix("s=")
                .ok_or_else(|| perr(at, "expected s="))?;
            let s = parse_decimal_q(rest, at + 2)?;
            let order = -q_to_f64(&s);
            Ok(mk(None, order, Kind::Bessel { s }))
        }
        _ => Err(perr(0, format!("unknown symbol family {head:?}"))),
    }
}

fn wave(n: usize, text: &str, at: usize, pmax: u32) -> Result<Kind> {
    if text.contains("+i*") {
        return Err(perr(at, "complex coefficients are only supported for vf"));
    }
    let eta = coefficient(text, at, pmax)?;
    let eta2 = eta.exact.as_ref().map(|v| {
        // η rational or √r: η² is rational.
        v.try_mul(v).expect("same field").a
    });
    if let Some(e2) = &eta2 {
        if e2.is_zero() {
            return Err(Error::InvalidCoefficient("eta must be nonzero".into()));
        }
    }
    let keep = if eta2.is_some() { None } else { Some(eta) };
    Ok(Kind::Wave { n, eta2, eta: keep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn orders_and_dimensions() {
        let cases = [
            ("laplacian:3", Some(3), 2.0),
            ("heat:2", Some(3), 2.0),
            ("dx:2", Some(2), 1.0),
            ("vf:alpha=sqrt:2", Some(2), 1.0),
            ("wave2d:eta=sqrt:2", Some(2), 2.0),
            ("wave:n=3,eta2=2/1", Some(4), 2.0),
            ("wave:n=2,eta=rat:1/2", Some(3), 2.0),
            ("bessel:s=1.5", None, -1.5),
            ("logdamp", Some(1), 1.0),
        ];
        for (s, d, m) in cases {
            let sym = parse_symbol(s).unwrap();
            assert_eq!(sym.dim, d, "{s}");
            assert_eq!(sym.order, m, "{s}");
        }
    }

    #[test]
    fn wave_eta_squares_exactly() {
        let s = parse_symbol("wave2d:eta=sqrt:2").unwrap();
        match s.kind {
            Kind::Wave { eta2: Some(e2), .. } => assert_eq!(e2, q(2, 1)),
            _ => panic!(),
        }
        let s = parse_symbol("wave:n=1,eta=rat:-3/2").unwrap();
        match s.kind {
            Kind::Wave { eta2: Some(e2), .. } => assert_eq!(e2, q(9, 4)),
            _ => panic!(),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_symbol("laplacian:x").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                position: 10,
                message: "laplacian expects a positive integer".into()
            }
        );
        assert!(matches!(
            parse_symbol("vf:alpha=pi"),
            Err(Error::Parse { position: 9, .. })
        ));
        assert!(matches!(
            parse_symbol("torus"),
            Err(Error::Parse { position: 0, .. })
        ));
        assert!(matches!(
            parse_symbol("vf:alpha=sqrt:9"),
            Err(Error::InvalidCoefficient(_))
        ));
        assert!(matches!(
            parse_symbol("wave:n=2,eta2=0/1"),
            Err(Error::InvalidCoefficient(_))
        ));
        assert!(matches!(
            parse_symbol("wave:n=2,eta2=1/0"),
            Err(Error::InvalidCoefficient(_))
        ));
        assert!(parse_symbol("wave2d:eta=sqrt:2+i*1/2").is_err());
        assert!(parse_symbol("heat:0").is_err());
    }
}
