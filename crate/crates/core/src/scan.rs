//! One pass over a window that feeds every downstream analysis.
//!
//! For each ℓ1 value `s` the scan keeps the point count, zero and undecided
//! counts, and the smallest nonzero `|p|` with its lexicographically first
//! minimizer. Work is split by first coordinate. Partial results combine
//! with an associative, order-preserving merge, so the outcome does not
//! depend on how rayon splits the range or on the thread count.

use rayon::prelude::*;

use crate::lattice::{l1, Frequency, Window};
use crate::symbol::{PointEval, Symbol};

pub const DEFAULT_ZERO_CAP: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct LevelStat {
    pub count: u64,
    pub zeros: u64,
    pub undecided: u64,
    /// `f64::INFINITY` when the level has no certified nonzero point.
    pub min_abs: f64,
    pub argmin: Option<Frequency>,
}

impl LevelStat {
    fn empty() -> Self {
        LevelStat {
            count: 0,
            zeros: 0,
            undecided: 0,
            min_abs: f64::INFINITY,
            argmin: None,
        }
    }

    /// `self` precedes `o` in lexicographic order.
    fn absorb(&mut self, o: LevelStat) {
        self.count += o.count;
        self.zeros += o.zeros;
        self.undecided += o.undecided;
        if o.min_abs < self.min_abs {
            self.min_abs = o.min_abs;
            self.argmin = o.argmin;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scan {
    pub window: Window,
    pub order: f64,
    /// Indexed by ℓ1 value `0..=max_l1`.
    pub levels: Vec<LevelStat>,
    /// First zeros in lexicographic order, at most `zero_cap` of them.
    pub zeros: Vec<Frequency>,
    pub zero_total: u64,
    pub zero_cap: usize,
    /// Radii `R/4, R/2, R` of the nested sub-windows, same norm.
    pub nested_radii: [i64; 3],
    pub nested_zeros: [u64; 3],
    pub undecided: Vec<Frequency>,
    pub undecided_total: u64,
    pub evaluated: u64,
}

struct Acc {
    levels: Vec<LevelStat>,
    zeros: Vec<Frequency>,
    zero_total: u64,
    nested: [u64; 3],
    undecided: Vec<Frequency>,
    undecided_total: u64,
    evaluated: u64,
}

impl Acc {
    fn new(n_levels: usize) -> Self {
        Acc {
            levels: vec![LevelStat::empty(); n_levels],
            zeros: Vec::new(),
            zero_total: 0,
            nested: [0; 3],
            undecided: Vec::new(),
            undecided_total: 0,
            evaluated: 0,
        }
    }

    fn merge(mut self, o: Acc, cap: usize) -> Acc {
        for (a, b) in self.levels.iter_mut().zip(o.levels) {
            a.absorb(b);
        }
        append_capped(&mut self.zeros, o.zeros, cap);
        append_capped(&mut self.undecided, o.undecided, cap);
        self.zero_total += o.zero_total;
        self.undecided_total += o.undecided_total;
        for j in 0..3 {
            self.nested[j] += o.nested[j];
        }
        self.evaluated += o.evaluated;
        self
    }
}

fn append_capped(a: &mut Vec<Frequency>, b: Vec<Frequency>, cap: usize) {
    let room = cap.saturating_sub(a.len());
    a.extend(b.into_iter().take(room));
}

pub fn nested_radii(radius: i64) -> [i64; 3] {
    [radius / 4, radius / 2, radius]
}

/// Scans `w` with the symbol's kernel on the current rayon pool.
pub fn scan(sym: &Symbol, w: &Window, zero_cap: usize) -> Scan {
    let kernel = sym.kernel();
    let n_levels = w.max_l1() as usize + 1;
    let radii = nested_radii(w.radius);
    let norm = w.norm;
    let slab = |mut acc: Acc, x1: i64| {
        w.for_each_in_slab(x1, &mut |xi: &[i64]| {
            let s = l1(xi) as usize;
            let lvl = &mut acc.levels[s];
            lvl.count += 1;
            acc.evaluated += 1;
            match kernel.eval(xi) {
                PointEval::Nonzero(a) => {
                    if a < lvl.min_abs {
                        lvl.min_abs = a;
                        lvl.argmin = Some(Frequency(xi.to_vec()));
                    }
                }
                PointEval::Zero => {
                    lvl.zeros += 1;
                    acc.zero_total += 1;
                    if acc.zeros.len() < zero_cap {
                        acc.zeros.push(Frequency(xi.to_vec()));
                    }
                    for (j, &r) in radii.iter().enumerate() {
                        if norm.contains(xi, r) {
                            acc.nested[j] += 1;
                        }
                    }
                }
                PointEval::Undecided => {
                    lvl.undecided += 1;
                    acc.undecided_total += 1;
                    if acc.undecided.len() < zero_cap {
                        acc.undecided.push(Frequency(xi.to_vec()));
                    }
                }
            }
        });
        acc
    };
    let acc = (-w.radius..=w.radius)
        .into_par_iter()
        .fold(|| Acc::new(n_levels), slab)
        .reduce(|| Acc::new(n_levels), |a, b| a.merge(b, zero_cap));
    Scan {
        window: *w,
        order: sym.order,
        levels: acc.levels,
        zeros: acc.zeros,
        zero_total: acc.zero_total,
        zero_cap,
        nested_radii: radii,
        nested_zeros: acc.nested,
        undecided: acc.undecided,
        undecided_total: acc.undecided_total,
        evaluated: acc.evaluated,
    }
}

/// Same as [`scan`] but strictly sequential, used as the reference in tests.
pub fn scan_serial(sym: &Symbol, w: &Window, zero_cap: usize) -> Scan {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool");
    pool.install(|| scan(sym, w, zero_cap))
}

impl Scan {
    /// Envelope loss `ρ = m − ln|p| / ln s` at level `s ≥ 2`.
    pub fn level_loss(&self, s: usize) -> Option<f64> {
        let lvl = self.levels.get(s)?;
        if s < 2 || !lvl.min_abs.is_finite() {
            return None;
        }
        Some(self.order - lvl.min_abs.ln() / (s as f64).ln())
    }

    /// Whether the window holds any certified nonzero point.
    pub fn has_nonzero(&self) -> bool {
        self.levels.iter().any(|l| l.min_abs.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::parse_symbol;

    #[test]
    fn counts_partition_the_window() {
        let sym = parse_symbol("vf:alpha=rat:3/2").unwrap();
        let w = Window::l1(2, 50).unwrap();
        let sc = scan(&sym, &w, 10);
        assert_eq!(sc.evaluated, 5101);
        assert_eq!(sc.levels.iter().map(|l| l.count).sum::<u64>(), 5101);
        // Zeros (3t, 2t) with 5|t| ≤ 50.
        assert_eq!(sc.zero_total, 21);
        assert_eq!(sc.zeros.len(), 10);
        assert_eq!(sc.zeros[0], Frequency(vec![-30, -20]));
        assert_eq!(sc.nested_zeros, [5, 11, 21]);
        assert_eq!(sc.levels[2].min_abs, 0.5);
    }

    #[test]
    fn serial_and_parallel_agree() {
        for s in ["heat:1", "vf:alpha=sqrt:2", "wave:n=2,eta2=2/1"] {
            let sym = parse_symbol(s).unwrap();
            let n = sym.dimension_for(None).unwrap();
            let w = Window::l2(n, 30).unwrap();
            assert_eq!(scan(&sym, &w, 50), scan_serial(&sym, &w, 50), "{s}");
        }
    }

    #[test]
    fn argmin_is_lexicographically_first() {
        let sym = parse_symbol("laplacian:2").unwrap();
        let sc = scan(&sym, &Window::l1(2, 8).unwrap(), 10);
        // ℓ1 = 4: the minimum ‖ξ‖² = 8 is first hit at (−2, −2).
        assert_eq!(sc.levels[4].argmin, Some(Frequency(vec![-2, -2])));
    }
}
