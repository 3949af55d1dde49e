//! Integer frequency lattice: norms, Sobolev weights and window enumeration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible window radius (per axis). Coordinates stay far from
/// `i64` overflow in every norm computed below.
pub const MAX_RADIUS: i64 = 1_000_000;

/// A point of `Z^n`. Ordering is lexicographic on the coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frequency(pub Vec<i64>);

impl Frequency {
    pub fn new(coords: Vec<i64>) -> Self {
        Frequency(coords)
    }

    pub fn zero(n: usize) -> Self {
        Frequency(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `|ξ| = Σ |ξ_j|`.
    pub fn l1(&self) -> u64 {
        l1(&self.0)
    }

    /// `‖ξ‖² = Σ ξ_j²`.
    pub fn l2sq(&self) -> u128 {
        l2sq(&self.0)
    }

    pub fn neg(&self) -> Frequency {
        Frequency(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for Frequency {
    fn from(v: Vec<i64>) -> Self {
        Frequency(v)
    }
}

#[inline]
pub fn l1(xi: &[i64]) -> u64 {
    xi.iter().map(|c| c.unsigned_abs()).sum()
}

#[inline]
pub fn l2sq(xi: &[i64]) -> u128 {
    xi.iter().map(|&c| (c as i128 * c as i128) as u128).sum()
}

/// `(1 + ‖ξ‖²)^k`.
pub fn sobolev_weight(xi: &Frequency, k: f64) -> f64 {
    (1.0 + xi.l2sq() as f64).powf(k)
}

/// Checks `|ξ|^{-2τ} ≤ (1+n)^{|τ|} (1+‖ξ‖²)^{-τ}` in the log domain.
///
/// A relative slack of `1e-12` absorbs rounding at the equality cases
/// (`n = 1`, `|ξ| = 1`, `τ > 0`).
pub fn norm_equivalence_check(xi: &Frequency, tau: f64) -> Result<bool> {
    if xi.is_zero() {
        return Err(Error::InvalidArgument(
            "norm equivalence is only asserted for nonzero frequencies".into(),
        ));
    }
    let n = xi.dim() as f64;
    let lhs = -2.0 * tau * (xi.l1() as f64).ln();
    let rhs = tau.abs() * (1.0 + n).ln() - tau * (1.0 + xi.l2sq() as f64).ln();
    let slack = 1e-12 * (1.0 + lhs.abs().max(rhs.abs()));
    Ok(lhs <= rhs + slack)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

impl Norm {
    /// Whether `xi` lies in the closed ball of the given radius.
    pub fn contains(self, xi: &[i64], radius: i64) -> bool {
        match self {
            Norm::L1 => l1(xi) <= radius as u64,
            Norm::L2 => l2sq(xi) <= (radius as u128) * (radius as u128),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "L1" => Ok(Norm::L1),
            "l2" | "L2" => Ok(Norm::L2),
            other => Err(Error::InvalidArgument(format!("unknown norm {other:?}"))),
        }
    }
}

/// A finite ball `{ξ ∈ Z^n : norm(ξ) ≤ R}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub dim: usize,
    pub radius: i64,
    pub norm: Norm,
}

impl Window {
    pub fn new(dim: usize, radius: i64, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if radius < 0 {
            return Err(Error::InvalidArgument(
                "window radius must be non-negative".into(),
            ));
        }
        if radius > MAX_RADIUS {
            return Err(Error::Overflow(format!(
                "window radius {radius} exceeds the supported maximum {MAX_RADIUS}"
            )));
        }
        Ok(Window { dim, radius, norm })
    }

    pub fn l1(dim: usize, radius: i64) -> Result<Self> {
        Window::new(dim, radius, Norm::L1)
    }

    pub fn l2(dim: usize, radius: i64) -> Result<Self> {
        Window::new(dim, radius, Norm::L2)
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        xi.len() == self.dim && self.norm.contains(xi, self.radius)
    }

    /// Largest ℓ1 norm of a point in the window.
    pub fn max_l1(&self) -> u64 {
        match self.norm {
            Norm::L1 => self.radius as u64,
            Norm::L2 => {
                // max Σ|ξ_j| subject to Σ ξ_j² ≤ R² is at most R·√n.
                let bound = (self.radius as f64) * (self.dim as f64).sqrt();
                bound.floor() as u64 + 1
            }
        }
    }

    /// Range of the first coordinate.
    pub fn first_axis(&self) -> std::ops::RangeInclusive<i64> {
        -self.radius..=self.radius
    }

    /// Visits every point of the window in lexicographic order.
    pub fn for_each(&self, mut visit: impl FnMut(&[i64])) {
        for x1 in self.first_axis() {
            self.for_each_in_slab(x1, &mut visit);
        }
    }

    /// Visits, in lexicographic order, the points whose first coordinate is `x1`.
    pub fn for_each_in_slab(&self, x1: i64, visit: &mut impl FnMut(&[i64])) {
        if self.dim == 2 {
            // Hot path for planar scans.
            let rem = match self.norm {
                Norm::L1 => self.radius - x1.abs(),
                Norm::L2 => {
                    let r2 = (self.radius as i128).pow(2) - (x1 as i128).pow(2);
                    if r2 < 0 {
                        -1
                    } else {
                        isqrt_u128(r2 as u128) as i64
                    }
                }
            };
            let mut buf = [x1, 0];
            for x2 in -rem..=rem {
                buf[1] = x2;
                visit(&buf);
            }
            return;
        }
        let mut buf = vec![0i64; self.dim];
        buf[0] = x1;
        match self.norm {
            Norm::L1 => {
                let used = x1.unsigned_abs() as i64;
                if used > self.radius {
                    return;
                }
                l1_rec(&mut buf, 1, self.radius - used, visit);
            }
            Norm::L2 => {
                let r2 = (self.radius as i128).pow(2) - (x1 as i128).pow(2);
                if r2 < 0 {
                    return;
                }
                l2_rec(&mut buf, 1, r2, visit);
            }
        }
    }

    /// Lexicographic stream of the window's points.
    pub fn points(&self) -> Vec<Frequency> {
        let mut out = Vec::new();
        self.for_each(|xi| out.push(Frequency(xi.to_vec())));
        out
    }

    pub fn count(&self) -> u64 {
        let mut c = 0u64;
        self.for_each(|_| c += 1);
        c
    }
}

fn l1_rec(buf: &mut [i64], i: usize, rem: i64, visit: &mut impl FnMut(&[i64])) {
    if i == buf.len() {
        visit(buf);
        return;
    }
    for x in -rem..=rem {
        buf[i] = x;
        l1_rec(buf, i + 1, rem - x.abs(), visit);
    }
    buf[i] = 0;
}

fn l2_rec(buf: &mut [i64], i: usize, rem: i128, visit: &mut impl FnMut(&[i64])) {
    if i == buf.len() {
        visit(buf);
        return;
    }
    let bound = isqrt_u128(rem as u128) as i64;
    for x in -bound..=bound {
        buf[i] = x;
        l2_rec(buf, i + 1, rem - (x as i128) * (x as i128), visit);
    }
    buf[i] = 0;
}

/// Points with `|ξ| = s` in lexicographic order.
pub fn shell_points(dim: usize, s: i64) -> Vec<Frequency> {
    fn rec(buf: &mut Vec<i64>, dim: usize, rem: i64, out: &mut Vec<Frequency>) {
        if buf.len() + 1 == dim {
            if rem == 0 {
                buf.push(0);
                out.push(Frequency(buf.clone()));
                buf.pop();
            } else {
                for x in [-rem, rem] {
                    buf.push(x);
                    out.push(Frequency(buf.clone()));
                    buf.pop();
                }
            }
            return;
        }
        for x in -rem..=rem {
            buf.push(x);
            rec(buf, dim, rem - x.abs(), out);
            buf.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 || s < 0 {
        return out;
    }
    rec(&mut Vec::with_capacity(dim), dim, s, &mut out);
    out
}

/// Streams the points with `|ξ| = s` in lexicographic order, without
/// materializing the shell.
pub fn for_each_shell_point(dim: usize, s: i64, mut visit: impl FnMut(&[i64])) {
    fn rec(buf: &mut [i64], i: usize, rem: i64, visit: &mut impl FnMut(&[i64])) {
        if i + 1 == buf.len() {
            buf[i] = -rem;
            visit(buf);
            if rem > 0 {
                buf[i] = rem;
                visit(buf);
            }
            return;
        }
        for x in -rem..=rem {
            buf[i] = x;
            rec(buf, i + 1, rem - x.abs(), visit);
        }
    }
    if dim == 0 || s < 0 {
        return;
    }
    let mut buf = vec![0i64; dim];
    rec(&mut buf, 0, s, &mut visit);
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn isqrt_u64(n: u64) -> u64 {
    isqrt_u128(n as u128) as u64
}
