//! Brute-force agreement for the number-theory helpers up to 10^4.

use toruslab::arith::{
    factor, four_square_decomposition, has_obstruction_prime, is_prime, is_square, is_sum_three_squares,
    is_sum_two_squares, obstruction_primes, squarefree_part,
};

const LIMIT: u64 = 10_000;

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn isqrt(n: u64) -> u64 {
    (0..=n).take_while(|k| k * k <= n).last().unwrap()
}

#[test]
fn factorization_matches_trial_division() {
    for n in 1..=LIMIT {
        let f = factor(n).unwrap();
        assert_eq!(f.factors, trial_factor(n), "{n}");
        assert_eq!(f.product(), n);
        assert_eq!(is_prime(n), f.factors == vec![(n, 1)], "{n}");
    }
}

#[test]
fn squarefree_parts() {
    for n in 1..=LIMIT {
        let (c, d) = squarefree_part(n).unwrap();
        assert_eq!(c * c * d, n);
        assert!((2..=isqrt(d)).all(|p| d % (p * p) != 0), "{n}: {d} not squarefree");
    }
}

#[test]
fn obstruction_primes_match_definition() {
    for n in 1..=LIMIT {
        let want: Vec<u64> = trial_factor(n)
            .into_iter()
            .filter(|&(p, e)| p % 4 == 3 && e % 2 == 1)
            .map(|(p, _)| p)
            .collect();
        assert_eq!(obstruction_primes(n).unwrap(), want);
        assert_eq!(has_obstruction_prime(n).unwrap(), !want.is_empty());
    }
}

#[test]
fn squares() {
    let mut k = 0u64;
    for n in 0..=LIMIT {
        while (k + 1) * (k + 1) <= n {
            k += 1;
        }
        assert_eq!(is_square(n), k * k == n, "{n}");
    }
}

#[test]
fn two_squares_match_search() {
    let mut smallest: Vec<Option<(u64, u64)>> = vec![None; LIMIT as usize + 1];
    for x in 0..=100u64 {
        for y in x..=100u64 {
            let n = x * x + y * y;
            if (1..=LIMIT).contains(&n) && smallest[n as usize].is_none_or(|(x0, _)| x < x0) {
                smallest[n as usize] = Some((x, y));
            }
        }
    }
    for n in 1..=LIMIT {
        let (ok, rep) = is_sum_two_squares(n).unwrap();
        assert_eq!(ok, smallest[n as usize].is_some(), "{n}");
        assert_eq!(rep, smallest[n as usize], "{n}");
    }
}

#[test]
fn three_squares_match_search() {
    let mut found = vec![false; LIMIT as usize + 1];
    for x in 0..=100u64 {
        for y in x..=100u64 {
            for z in y..=100u64 {
                let n = x * x + y * y + z * z;
                if n <= LIMIT {
                    found[n as usize] = true;
                }
            }
        }
    }
    for n in 1..=LIMIT {
        let (ok, rep) = is_sum_three_squares(n).unwrap();
        assert_eq!(ok, found[n as usize], "{n}");
        if let Some((x, y, z)) = rep {
            assert!(x <= y && y <= z);
            assert_eq!(x * x + y * y + z * z, n);
        }
        // Legendre: exactly the numbers not of the form 4^a(8b+7).
        let mut m = n;
        while m % 4 == 0 {
            m /= 4;
        }
        assert_eq!(ok, m % 8 != 7, "{n}");
    }
}

#[test]
fn four_squares_are_lexicographically_smallest() {
    for n in 0..=LIMIT {
        let (w, x, y, z) = four_square_decomposition(n).unwrap();
        assert!(w <= x && x <= y && y <= z);
        assert_eq!(w * w + x * x + y * y + z * z, n);
    }
    for n in 0..=600u64 {
        let mut best = None;
        'outer: for w in 0..=isqrt(n) {
            for x in w..=isqrt(n) {
                for y in x..=isqrt(n) {
                    let rest = n as i64 - (w * w + x * x + y * y) as i64;
                    if rest < 0 {
                        break;
                    }
                    let z = isqrt(rest as u64);
                    if z * z == rest as u64 && z >= y {
                        best = Some((w, x, y, z));
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(Some(four_square_decomposition(n).unwrap()), best, "{n}");
    }
}

#[test]
fn out_of_range_inputs_are_rejected() {
    assert!(factor(0).is_err());
    assert!(factor(1_000_000_000_000_000_001).is_err());
    assert!(is_sum_two_squares(0).is_err());
    // 10^18 itself is in range.
    assert_eq!(factor(1_000_000_000_000_000_000).unwrap().factors, vec![(2, 18), (5, 18)]);
}
