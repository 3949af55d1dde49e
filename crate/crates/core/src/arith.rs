//! Factorization, squarefree parts and sums of squares.
//!
//! Inputs are capped at `10^18`. Factoring uses trial division for small
//! primes, deterministic Miller-Rabin and Pollard's rho for the rest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::isqrt_u64;

pub const MAX_INPUT: u64 = 1_000_000_000_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredInteger {
    pub n: u64,
    /// `(prime, exponent)` with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| *q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn product(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

fn check_range(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("expected a positive integer".into()));
    }
    if n > MAX_INPUT {
        return Err(Error::Overflow(format!(
            "{n} exceeds the factoring cap 10^18"
        )));
    }
    Ok(())
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic for all `u64` with the first twelve prime bases.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Finds a nontrivial factor of an odd composite `n` (Brent's variant).
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

pub fn factor(n: u64) -> Result<FactoredInteger> {
    check_range(n)?;
    let mut primes = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
    }
    factor_into(m, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(FactoredInteger { n, factors })
}

/// `n = c² d` with `d` squarefree.
pub fn squarefree_part(n: u64) -> Result<(u64, u64)> {
    let f = factor(n)?;
    let (mut c, mut d) = (1u64, 1u64);
    for (p, e) in f.factors {
        c *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
    }
    Ok((c, d))
}

/// Some prime `q ≡ 3 (mod 4)` divides `n` to an odd power.
pub fn has_obstruction_prime(n: u64) -> Result<bool> {
    Ok(factor(n)?
        .factors
        .iter()
        .any(|&(p, e)| p % 4 == 3 && e % 2 == 1))
}

/// Primes `q ≡ 3 (mod 4)` dividing `n` to an odd power.
pub fn obstruction_primes(n: u64) -> Result<Vec<u64>> {
    Ok(factor(n)?
        .factors
        .into_iter()
        .filter(|&(p, e)| p % 4 == 3 && e % 2 == 1)
        .map(|(p, _)| p)
        .collect())
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt_u64(n);
    r * r == n
}

fn two_squares_test(n: u64) -> bool {
    if n == 0 {
        return true;
    }
    !has_obstruction_prime(n).unwrap_or(true)
}

fn three_squares_test(mut n: u64) -> bool {
    if n == 0 {
        return true;
    }
    while n.is_multiple_of(4) {
        n /= 4;
    }
    n % 8 != 7
}

/// Lexicographically smallest non-decreasing `k`-tuple of squares, each part
/// at least `min`, summing to `n`.
fn smallest_decomposition(n: u64, k: usize, min: u64) -> Option<Vec<u64>> {
    if k == 1 {
        let r = isqrt_u64(n);
        return (r * r == n && r >= min).then(|| vec![r]);
    }
    // The smallest part satisfies k·first² ≤ n.
    let top = isqrt_u64(n / k as u64);
    for first in min..=top {
        let rest = n - first * first;
        let plausible = match k - 1 {
            1 => is_square(rest),
            2 => two_squares_test(rest),
            3 => three_squares_test(rest),
            _ => true,
        };
        if !plausible {
            continue;
        }
        if let Some(mut tail) = smallest_decomposition(rest, k - 1, first) {
            let mut out = vec![first];
            out.append(&mut tail);
            return Some(out);
        }
    }
    None
}

/// Returns whether `n = x² + y²` is solvable and the smallest `(x, y)`
/// with `0 ≤ x ≤ y`.
pub fn is_sum_two_squares(n: u64) -> Result<(bool, Option<(u64, u64)>)> {
    check_range(n)?;
    if has_obstruction_prime(n)? {
        return Ok((false, None));
    }
    let v = smallest_decomposition(n, 2, 0).expect("two-squares theorem");
    Ok((true, Some((v[0], v[1]))))
}

/// Legendre's criterion plus the smallest `(x, y, z)` with `x ≤ y ≤ z`.
pub fn is_sum_three_squares(n: u64) -> Result<(bool, Option<(u64, u64, u64)>)> {
    check_range(n)?;
    if !three_squares_test(n) {
        return Ok((false, None));
    }
    let v = smallest_decomposition(n, 3, 0).expect("three-squares theorem");
    Ok((true, Some((v[0], v[1], v[2]))))
}

/// Lexicographically smallest `(w, x, y, z)`, `w ≤ x ≤ y ≤ z`.
pub fn four_square_decomposition(n: u64) -> Result<(u64, u64, u64, u64)> {
    if n > MAX_INPUT {
        return Err(Error::Overflow(format!("{n} exceeds the cap 10^18")));
    }
    if n == 0 {
        return Ok((0, 0, 0, 0));
    }
    let v = smallest_decomposition(n, 4, 0).expect("four-squares theorem");
    Ok((v[0], v[1], v[2], v[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(12).unwrap(), (2, 3));
        assert_eq!(squarefree_part(1).unwrap(), (1, 1));
        assert_eq!(squarefree_part(50).unwrap(), (5, 2));
        assert!(squarefree_part(0).is_err());
    }

    #[test]
    fn square_sum_examples() {
        assert_eq!(is_sum_two_squares(5).unwrap(), (true, Some((1, 2))));
        assert_eq!(is_sum_two_squares(21).unwrap(), (false, None));
        assert_eq!(is_sum_two_squares(2).unwrap(), (true, Some((1, 1))));
        assert!(!is_sum_three_squares(7).unwrap().0);
        assert_eq!(is_sum_three_squares(6).unwrap(), (true, Some((1, 1, 2))));
        assert!(!is_sum_three_squares(28).unwrap().0);
        assert_eq!(four_square_decomposition(0).unwrap(), (0, 0, 0, 0));
        assert_eq!(four_square_decomposition(7).unwrap(), (1, 1, 1, 2));
        assert_eq!(four_square_decomposition(18).unwrap(), (0, 0, 3, 3));
    }

    #[test]
    fn obstruction_examples() {
        assert!(has_obstruction_prime(3).unwrap());
        assert!(!has_obstruction_prime(9).unwrap());
        assert!(!has_obstruction_prime(45).unwrap());
        assert!(has_obstruction_prime(63).unwrap());
        assert_eq!(obstruction_primes(3 * 49 * 11).unwrap(), vec![3, 11]);
    }

    #[test]
    fn factoring_large_inputs() {
        let p = 999_999_937u64;
        let q = 1_000_000_007u64;
        let f = factor(p * q).unwrap();
        assert_eq!(f.factors, vec![(p, 1), (q, 1)]);
        let f = factor(MAX_INPUT).unwrap();
        assert_eq!(f.factors, vec![(2, 18), (5, 18)]);
        assert_eq!(f.product(), MAX_INPUT);
        assert!(factor(MAX_INPUT + 1).is_err());
        assert!(is_prime(1_000_000_000_000_000_003));
    }
}
