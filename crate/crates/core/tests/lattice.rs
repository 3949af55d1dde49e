use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toruslab::lattice::{for_each_shell_point, norm_equivalence_check, shell_points, Frequency, Norm, Window};

/// Raising to the power `|τ|` preserves the inequality, so it reduces to an
/// integer comparison of the bases, one for each sign of `τ`.
fn base_inequality(xi: &Frequency, tau: f64) -> bool {
    let n = xi.dim() as u128;
    let l1 = xi.l1() as u128;
    let l2 = xi.l2sq();
    if tau >= 0.0 {
        l2 < (1 + n) * l1 * l1
    } else {
        l1 * l1 <= (1 + n) * (1 + l2)
    }
}

#[test]
fn norm_equivalence_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100_000 {
        let dim = rng.gen_range(1..=6);
        let scale = 10i64.pow(rng.gen_range(0..=6));
        let xi = loop {
            let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect();
            if v.iter().any(|&x| x != 0) {
                break Frequency(v);
            }
        };
        let tau = rng.gen_range(-20.0..20.0);
        assert!(base_inequality(&xi, tau));
        assert!(norm_equivalence_check(&xi, tau).unwrap(), "{xi:?} τ={tau}");
    }
}

#[test]
fn equality_cases_pass() {
    for tau in [0.5, 1.0, 7.0, -3.0] {
        assert!(norm_equivalence_check(&Frequency(vec![1]), tau).unwrap());
        assert!(norm_equivalence_check(&Frequency(vec![0, -1, 0]), tau).unwrap());
    }
    assert!(norm_equivalence_check(&Frequency(vec![0, 0]), 1.0).is_err());
}

fn brute_count(dim: usize, r: i64, norm: Norm) -> u64 {
    let mut c = 0;
    let mut v = vec![-r; dim];
    loop {
        if norm.contains(&v, r) {
            c += 1;
        }
        let mut i = 0;
        loop {
            if i == dim {
                return c;
            }
            if v[i] < r {
                v[i] += 1;
                break;
            }
            v[i] = -r;
            i += 1;
        }
    }
}

proptest! {
    #[test]
    fn window_counts_match_the_cube(dim in 1usize..=3, r in 0i64..=9, l2 in any::<bool>()) {
        let norm = if l2 { Norm::L2 } else { Norm::L1 };
        let w = Window::new(dim, r, norm).unwrap();
        prop_assert_eq!(w.count(), brute_count(dim, r, norm));
        let pts = w.points();
        prop_assert!(pts.windows(2).all(|p| p[0] < p[1]));
        prop_assert!(pts.iter().all(|p| w.contains(p.coords())));
    }

    #[test]
    fn shells_partition_the_l1_ball(dim in 1usize..=4, r in 0i64..=8) {
        let mut total = 0u64;
        for s in 0..=r {
            let shell = shell_points(dim, s);
            prop_assert!(shell.iter().all(|p| p.l1() == s as u64 && p.dim() == dim));
            prop_assert!(shell.windows(2).all(|p| p[0] < p[1]));
            let mut streamed = Vec::new();
            for_each_shell_point(dim, s, |x| streamed.push(Frequency(x.to_vec())));
            prop_assert_eq!(&streamed, &shell);
            total += shell.len() as u64;
        }
        prop_assert_eq!(total, Window::l1(dim, r).unwrap().count());
    }

    #[test]
    fn norms_are_symmetric(v in proptest::collection::vec(-1000i64..=1000, 1..6)) {
        let xi = Frequency(v);
        prop_assert_eq!(xi.l1(), xi.neg().l1());
        prop_assert_eq!(xi.l2sq(), xi.neg().l2sq());
        prop_assert!(xi.l2sq() <= (xi.l1() as u128).pow(2));
        prop_assert!((xi.l1() as u128).pow(2) <= xi.dim() as u128 * xi.l2sq());
    }
}
