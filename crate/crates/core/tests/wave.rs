use num_integer::Integer;

use toruslab::analysis::{wave_classify, ZeroSet};
use toruslab::exact::q;
use toruslab::symbol::parse_symbol;

const R: i64 = 200;

/// Smallest ℓ1 norm of a point `(x, y)` with `x² + y² = n`, by enumeration.
fn min_l1_by_norm() -> Vec<Option<i64>> {
    let top = (R * R) as usize;
    let mut best = vec![None; top + 1];
    for x in -R..=R {
        for y in -(R - x.abs())..=(R - x.abs()) {
            let n = (x * x + y * y) as usize;
            let l = x.abs() + y.abs();
            if best[n].is_none_or(|b| l < b) {
                best[n] = Some(l);
            }
        }
    }
    best
}

/// Whether `b τ² = a (x² + y²)` has a nonzero solution with `|τ| + |x| + |y| ≤ R`.
fn brute_has_zero(a: i64, b: i64, table: &[Option<i64>]) -> bool {
    for (n, l) in table.iter().enumerate().skip(1) {
        let Some(l) = l else { continue };
        let num = a * n as i64;
        if num % b != 0 {
            continue;
        }
        let t2 = num / b;
        let t = (t2 as f64).sqrt().round() as i64;
        if t * t == t2 && t + l <= R {
            return true;
        }
    }
    false
}

fn is_square(n: i64) -> bool {
    let r = (n as f64).sqrt().round() as i64;
    r * r == n
}

#[test]
fn planar_verdicts_match_brute_force() {
    let table = min_l1_by_norm();
    let mut checked = 0;
    for a in 1..=50i64 {
        for b in 1..=50i64 {
            if a.gcd(&b) != 1 || (is_square(a) && is_square(b)) {
                continue;
            }
            let c = wave_classify(2, &q(a, b), 3).unwrap();
            let brute = brute_has_zero(a, b, &table);
            assert_eq!(c.zero_set == ZeroSet::InfiniteZeros, brute, "η² = {a}/{b}");
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn emitted_zeros_evaluate_to_zero() {
    for n in [2usize, 3, 4, 5] {
        for (a, b) in [(2, 1), (5, 1), (1, 2), (3, 5), (6, 1)] {
            let c = wave_classify(n, &q(a, b), 5).unwrap();
            if c.zero_set == ZeroSet::NoNonzeroZeros {
                assert!(c.zeros.is_empty());
                continue;
            }
            for z in &c.zeros {
                let x = z.coords();
                assert!(!z.is_zero());
                // Exact integer check of b·τ² = a·‖ξ′‖².
                let lhs = b as i128 * (x[0] as i128).pow(2);
                let rhs = a as i128 * x[1..].iter().map(|&v| (v as i128).pow(2)).sum::<i128>();
                assert_eq!(lhs, rhs, "n={n} η²={a}/{b} {z:?}");
            }
        }
    }
    // The symbol evaluator agrees on the planar family.
    let sym = parse_symbol("wave2d:eta=sqrt:2").unwrap();
    let c = wave_classify(1, &q(2, 1), 3).unwrap();
    assert_eq!(c.zero_set, ZeroSet::NoNonzeroZeros);
    assert!(!sym.eval_exact(&[3, 2]).unwrap().unwrap().is_zero());
}
