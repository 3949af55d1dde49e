//! Witness sequences behind the failure of global hypoellipticity and
//! solvability with loss `r`.
//!
//! The search walks frequencies in (ℓ1, lex) order and accepts `ξ` as the
//! `j`-th witness when `0 < |p(ξ)| ≤ (1/j)|ξ|^{m−r}`. The condition tightens
//! with `j`, so a point rejected once is never needed again and a single
//! greedy pass suffices. Candidates pass a float filter first and are then
//! certified exactly or with interval logarithms.

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exact::{ExactComplex, QuadRational, Q};
use crate::fixed::ln_interval;
use crate::lattice::{for_each_shell_point, l1, sobolev_weight, Frequency};
use crate::spectral::{
    apply, bracket_power, sobolev_norm_sq, symbol_coeff, Coeff, NormSq, Origin, SpectralDistribution,
};
use crate::symbol::{AbsLower, Kind, PointEval, Symbol};

pub const SPARSE_BUDGET: i64 = 1_000_000;
pub const DENSE_BUDGET_1D: i64 = 1_000_000;
pub const DENSE_BUDGET_2D: i64 = 4096;
/// Point count that sets the default ℓ1 budget in dimension three and up.
pub const DENSE_POINT_BUDGET: f64 = 5e7;

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessOptions {
    /// Largest ℓ1 norm searched; a default per generator when `None`.
    pub budget: Option<i64>,
    /// Prefer a sequence of nonzero zeros when one turns up.
    pub allow_zero_sequence: bool,
    /// Required for symbols that make sense in every dimension.
    pub dim: Option<usize>,
    /// Forces a generator; the sparse one only exists for planar symbols
    /// with `m − r ≤ 0`.
    pub generator: Option<Generator>,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { budget: None, allow_zero_sequence: true, dim: None, generator: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// `0 < |p(ξ_j)| ≤ (1/j)|ξ_j|^{m−r}`.
    SmallValues,
    /// `p(ξ_j) = 0`.
    ZeroSequence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    Exact,
    Enclosure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Every lattice point, shell by shell.
    Dense,
    /// Only points near the zero cone of a planar symbol, which contain all
    /// candidates when `m − r ≤ 0`.
    Sparse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessPoint {
    pub j: usize,
    pub xi: Frequency,
    pub l1: u64,
    pub value: Coeff,
    pub abs_p: f64,
    /// `(1/j)|ξ|^{m−r}`; zero in the zero-sequence construction.
    pub bound: f64,
    pub certification: Certification,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSearch {
    pub symbol: String,
    pub dim: usize,
    pub order: f64,
    pub r: f64,
    pub requested: usize,
    pub construction: Construction,
    pub generator: Generator,
    pub budget: i64,
    /// Largest ℓ1 norm actually visited.
    pub radius_searched: i64,
    pub points: Vec<WitnessPoint>,
    pub undecided: u64,
}

impl WitnessSearch {
    pub fn frequencies(&self) -> Vec<Frequency> {
        self.points.iter().map(|p| p.xi.clone()).collect()
    }
}

fn twice_as_integer(x: f64) -> Option<i64> {
    let t = 2.0 * x;
    (t.fract() == 0.0 && t.abs() < 1e6).then_some(t as i64)
}

fn pow_q(base: u64, e: i64) -> Q {
    let p = Q::from_integer(num_bigint::BigInt::from(base).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Certifies `0 < |p(ξ)| ≤ (1/j)|ξ|^e` for `e = m − r`.
fn certify(sym: &Symbol, xi: &[i64], j: usize, e: f64) -> Result<Option<(Coeff, f64, Certification)>> {
    let s = l1(xi);
    let exact = sym.eval_exact(xi)?;
    if let Some(v) = &exact {
        if v.is_zero() {
            return Ok(None);
        }
        let two_e = if s == 1 { Some(0) } else { twice_as_integer(e) };
        if let Some(two_e) = two_e {
            // |p|² j² ≤ s^{2e}, equality allowed.
            let jj = Q::from_integer((j as u64 * j as u64).into());
            let lhs = v.abs_sq()?.scale(&jj);
            let rhs = QuadRational::rational(pow_q(s, two_e));
            let ok = lhs.try_sub(&rhs)?.signum() <= 0;
            return Ok(ok.then(|| (Coeff::Exact(v.clone()), v.abs_f64(), Certification::Exact)));
        }
    }
    let (abs, log_hi) = match sym.abs_lower_exact(xi) {
        Ok(AbsLower::Zero) => return Ok(None),
        Ok(AbsLower::NonzeroWithLog { abs, log_hi, .. }) => (abs, log_hi),
        Err(Error::PrecisionExhausted { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    // log|p| + ln j ≤ e·ln s, with every term rounded against acceptance.
    let bits = 96;
    let lj = ln_interval(&Q::from_integer((j as u64).into()), bits)?;
    let lhs = BigRational::from_float(log_hi).expect("finite log") + lj.hi;
    let rhs = if s == 1 {
        Q::from_integer(0.into())
    } else {
        let ls = ln_interval(&Q::from_integer(s.into()), bits)?;
        let eq = BigRational::from_float(e).expect("finite exponent");
        if eq.is_negative() {
            ls.hi * eq
        } else {
            ls.lo * eq
        }
    };
    if lhs > rhs {
        return Ok(None);
    }
    let value = match exact {
        Some(v) => Coeff::Exact(v),
        None => {
            let (re, im) = sym.eval_f64(xi)?;
            Coeff::Float { re, im }
        }
    };
    let cert = if value.is_exact() { Certification::Exact } else { Certification::Enclosure };
    Ok(Some((value, abs, cert)))
}

fn is_exact_zero(sym: &Symbol, xi: &[i64]) -> bool {
    match sym.eval_exact(xi) {
        Ok(Some(v)) => v.is_zero(),
        Ok(None) => matches!(sym.abs_lower_exact(xi), Ok(AbsLower::Zero)),
        Err(_) => false,
    }
}

/// Slope of the zero line for the planar symbols with a sparse generator.
fn sparse_slope(sym: &Symbol, dim: usize, e: f64) -> Option<(f64, bool)> {
    if dim != 2 || e > 0.0 {
        return None;
    }
    match &sym.kind {
        Kind::Vf { alpha, .. } => Some((alpha.real.approx(), false)),
        Kind::Wave { n: 1, eta2: Some(e2), .. } => Some((crate::exact::q_to_f64(e2).sqrt(), true)),
        Kind::Wave { n: 1, eta: Some(eta), .. } => Some((eta.real.approx().abs(), true)),
        _ => None,
    }
}

fn default_dense_budget(dim: usize) -> i64 {
    match dim {
        1 => DENSE_BUDGET_1D,
        2 => DENSE_BUDGET_2D,
        n => {
            // |{ξ : |ξ| ≤ L}| ≈ (2L)^n / n!.
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            ((DENSE_POINT_BUDGET * fact).powf(1.0 / n as f64) / 2.0).floor().max(4.0) as i64
        }
    }
}

struct State<'a> {
    sym: &'a Symbol,
    kernel: crate::symbol::Kernel<'a>,
    e: f64,
    want: usize,
    allow_zero: bool,
    small: Vec<WitnessPoint>,
    zeros: Vec<WitnessPoint>,
    undecided: u64,
    last: i64,
    error: Option<Error>,
}

impl State<'_> {
    fn done(&self, level: i64) -> bool {
        if self.error.is_some() {
            return true;
        }
        if self.allow_zero && self.zeros.len() >= self.want {
            return true;
        }
        if self.small.len() >= self.want {
            if !self.allow_zero {
                return true;
            }
            let last = self.small.last().map_or(0, |p| p.l1 as i64);
            return level > 2 * last + 64;
        }
        false
    }

    fn visit(&mut self, xi: &[i64]) {
        let s = l1(xi);
        if s == 0 {
            return;
        }
        self.last = self.last.max(s as i64);
        match self.kernel.eval(xi) {
            PointEval::Zero => {
                if self.allow_zero && self.zeros.len() < self.want && is_exact_zero(self.sym, xi) {
                    self.zeros.push(WitnessPoint {
                        j: self.zeros.len() + 1,
                        xi: Frequency(xi.to_vec()),
                        l1: s,
                        value: Coeff::Exact(ExactComplex::zero()),
                        abs_p: 0.0,
                        bound: 0.0,
                        certification: Certification::Exact,
                    });
                }
            }
            PointEval::Undecided => self.undecided += 1,
            PointEval::Nonzero(a) => {
                if self.small.len() >= self.want {
                    return;
                }
                let j = self.small.len() + 1;
                let thr = (s as f64).powf(self.e) / j as f64;
                if a > thr * (1.0 + 1e-9) {
                    return;
                }
                match certify(self.sym, xi, j, self.e) {
                    Ok(Some((value, abs_p, certification))) => self.small.push(WitnessPoint {
                        j,
                        xi: Frequency(xi.to_vec()),
                        l1: s,
                        value,
                        abs_p,
                        bound: thr,
                        certification,
                    }),
                    Ok(None) => {}
                    Err(e) => self.error = Some(e),
                }
            }
        }
    }
}

fn sparse_band(alpha: f64, symmetric: bool, lo: i64, hi: i64) -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    for x2 in -hi..=hi {
        let centre = if symmetric { alpha * x2.abs() as f64 } else { alpha * x2 as f64 };
        let base = centre.floor() as i64;
        for x1 in base - 1..=base + 2 {
            let mut push = |p: [i64; 2]| {
                let s = l1(&p) as i64;
                if s >= lo && s < hi {
                    out.push(p);
                }
            };
            if symmetric {
                if x1 < 0 {
                    continue;
                }
                push([-x1, x2]);
                if x1 > 0 {
                    push([x1, x2]);
                }
            } else {
                push([x1, x2]);
            }
        }
    }
    out.sort_by(|a, b| (l1(a), a).cmp(&(l1(b), b)));
    out.dedup();
    out
}

/// Greedy search for `count` witnesses at loss `r`.
pub fn find_witnesses(sym: &Symbol, r: f64, count: usize, opts: &WitnessOptions) -> Result<WitnessSearch> {
    if count == 0 {
        return Err(Error::InvalidArgument("witness count must be positive".into()));
    }
    if !r.is_finite() {
        return Err(Error::InvalidArgument("r must be finite".into()));
    }
    let dim = sym.dimension_for(opts.dim)?;
    let e = sym.order - r;
    let sparse = match opts.generator {
        Some(Generator::Dense) => None,
        Some(Generator::Sparse) => Some(sparse_slope(sym, dim, e).ok_or_else(|| {
            Error::InvalidArgument("the sparse generator needs a planar field or wave symbol with m − r ≤ 0".into())
        })?),
        None => sparse_slope(sym, dim, e),
    };
    let generator = if sparse.is_some() { Generator::Sparse } else { Generator::Dense };
    let budget = opts.budget.unwrap_or(match generator {
        Generator::Sparse => SPARSE_BUDGET,
        Generator::Dense => default_dense_budget(dim),
    });
    if budget < 1 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let mut st = State {
        sym,
        kernel: sym.kernel(),
        e,
        want: count,
        allow_zero: opts.allow_zero_sequence,
        small: Vec::new(),
        zeros: Vec::new(),
        undecided: 0,
        last: 0,
        error: None,
    };
    match sparse {
        Some((alpha, symmetric)) => {
            let (mut lo, mut hi) = (1i64, 64i64);
            'bands: while lo <= budget {
                let top = hi.min(budget + 1);
                for p in sparse_band(alpha, symmetric, lo, top) {
                    if st.done(l1(&p) as i64) {
                        break 'bands;
                    }
                    st.visit(&p);
                }
                st.last = st.last.max(top - 1);
                lo = hi;
                hi *= 2;
            }
        }
        None => {
            for s in 1..=budget {
                if st.done(s) {
                    break;
                }
                for_each_shell_point(dim, s, |xi| {
                    if !st.done(s) {
                        st.visit(xi);
                    }
                });
                st.last = s;
            }
        }
    }
    if let Some(e) = st.error {
        return Err(e);
    }
    let (construction, points) = if st.allow_zero && st.zeros.len() >= count {
        (Construction::ZeroSequence, st.zeros)
    } else if st.small.len() >= count {
        (Construction::SmallValues, st.small)
    } else {
        let max_r_supported = st
            .small
            .iter()
            .filter(|p| p.l1 >= 2)
            .map(|p| sym.order - (p.j as f64 * p.abs_p).ln() / (p.l1 as f64).ln())
            .reduce(f64::min);
        return Err(Error::BudgetExhausted {
            found: st.small.len(),
            requested: count,
            radius: st.last,
            max_r_supported,
        });
    };
    Ok(WitnessSearch {
        symbol: sym.name.clone(),
        dim,
        order: sym.order,
        r,
        requested: count,
        construction,
        generator,
        budget,
        radius_searched: st.last,
        points,
        undecided: st.undecided,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GhWitness {
    pub search: WitnessSearch,
    /// `u_N = Σ_{j≤N} e^{iξ_j·x}`.
    pub u: SpectralDistribution,
    pub u_norm_sq: NormSq,
    /// `‖p(D)u_N‖²_{H^{r−m}}`.
    pub pu_norm_sq: NormSq,
    /// `(1+n)^{|m−r|} Σ_{j≤N} j^{−2}`.
    pub bound: f64,
    pub bound_holds: bool,
}

fn proof_bound(dim: usize, e: f64, count: usize) -> f64 {
    let harmonic: f64 = (1..=count).map(|j| 1.0 / (j as f64 * j as f64)).sum();
    (1.0 + dim as f64).powf(e.abs()) * harmonic
}

fn ones(search: &WitnessSearch) -> Result<SpectralDistribution> {
    let pairs = search.points.iter().map(|p| (p.xi.clone(), Coeff::one())).collect();
    SpectralDistribution::from_pairs(search.dim, Origin::Witness, pairs)
}

pub fn gh_witness(sym: &Symbol, r: f64, count: usize, opts: &WitnessOptions) -> Result<GhWitness> {
    let search = find_witnesses(sym, r, count, opts)?;
    let u = ones(&search)?;
    let u_norm_sq = sobolev_norm_sq(&u, 0.0);
    let pu = apply(sym, &u)?;
    let pu_norm_sq = sobolev_norm_sq(&pu, r - sym.order);
    let bound = proof_bound(search.dim, sym.order - r, count);
    let bound_holds = pu_norm_sq.value <= bound * (1.0 + 1e-12);
    Ok(GhWitness { search, u, u_norm_sq, pu_norm_sq, bound, bound_holds })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GsWitness {
    pub search: WitnessSearch,
    /// `f̂(ξ_j) = p(ξ_j)`.
    pub f: SpectralDistribution,
    /// `‖f_N‖²_{H^{r−m}}`.
    pub f_norm_sq: NormSq,
    pub bound: f64,
    pub bound_holds: bool,
    /// The solution `û = f̂/p = 1` on the witnesses.
    pub u: SpectralDistribution,
    /// `‖u_N‖²_{H^0} = N`.
    pub u_norm_sq: NormSq,
}

fn small_value_search(sym: &Symbol, r: f64, count: usize, opts: &WitnessOptions) -> Result<WitnessSearch> {
    let opts = WitnessOptions { allow_zero_sequence: false, ..opts.clone() };
    find_witnesses(sym, r, count, &opts)
}

pub fn gs_witness(sym: &Symbol, r: f64, count: usize, opts: &WitnessOptions) -> Result<GsWitness> {
    let search = small_value_search(sym, r, count, opts)?;
    let pairs = search.points.iter().map(|p| (p.xi.clone(), p.value.clone())).collect();
    let f = SpectralDistribution::from_pairs(search.dim, Origin::Witness, pairs)?;
    let f_norm_sq = sobolev_norm_sq(&f, r - sym.order);
    let bound = proof_bound(search.dim, sym.order - r, count);
    let bound_holds = f_norm_sq.value <= bound * (1.0 + 1e-12);
    let mut u = SpectralDistribution::new(search.dim, Origin::Solver);
    for (xi, c) in &f.coeffs {
        let p = symbol_coeff(sym, xi)?.expect("witness values are nonzero");
        u.set(xi.clone(), c.div(&p)?)?;
    }
    let u_norm_sq = sobolev_norm_sq(&u, 0.0);
    Ok(GsWitness { search, f, f_norm_sq, bound, bound_holds, u, u_norm_sq })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedRangeWitness {
    pub search: WitnessSearch,
    pub k: f64,
    /// `û_ℓ(ξ_j) = (1+‖ξ_j‖²)^{(−k−m+r)/2}` for `j ≤ ℓ`.
    pub u: Vec<SpectralDistribution>,
    /// `f̂(ξ_j) = p(ξ_j)(1+‖ξ_j‖²)^{(−k−m+r)/2}` for `j ≤ N`.
    pub f: SpectralDistribution,
    /// `‖p(D)u_ℓ − f‖²_{H^k}` computed from the distributions.
    pub residual_norm_sq: Vec<f64>,
    /// `Σ_{ℓ<j≤N} (1+‖ξ_j‖²)^{r−m}|p(ξ_j)|²`, the closed form of the residual.
    pub tail: Vec<f64>,
    /// `Σ_{ℓ<j≤N} (1+‖ξ_j‖²)^k|p(ξ_j)|²`; agrees with `tail` when `r−m = k`.
    pub tail_k_weighted: Vec<f64>,
    pub strictly_decreasing: bool,
    pub max_rel_deviation: f64,
}

pub fn closed_range_witness(
    sym: &Symbol,
    r: f64,
    k: f64,
    count: usize,
    opts: &WitnessOptions,
) -> Result<ClosedRangeWitness> {
    let search = small_value_search(sym, r, count, opts)?;
    let m = sym.order;
    let weights: Vec<_> = search.points.iter().map(|p| bracket_power(&p.xi, (-k - m + r) / 2.0)).collect();
    let mut f = SpectralDistribution::new(search.dim, Origin::Witness);
    for (p, w) in search.points.iter().zip(&weights) {
        f.set(p.xi.clone(), p.value.scale_real(w))?;
    }
    let mut u = Vec::with_capacity(count);
    let mut residual_norm_sq = Vec::with_capacity(count);
    let mut cur = SpectralDistribution::new(search.dim, Origin::Witness);
    for (p, w) in search.points.iter().zip(&weights) {
        cur.set(p.xi.clone(), Coeff::one().scale_real(w))?;
        let res = apply(sym, &cur)?.sub(&f)?;
        residual_norm_sq.push(sobolev_norm_sq(&res, k).value);
        u.push(cur.clone());
    }
    let term = |e: f64| -> Vec<f64> {
        search.points.iter().map(|p| sobolev_weight(&p.xi, e) * p.abs_p * p.abs_p).collect()
    };
    let suffix = |t: Vec<f64>| -> Vec<f64> {
        // Summed from the largest index down, so each entry is a partial sum
        // of the same ordered terms.
        let mut out = vec![0.0; t.len()];
        let mut acc = 0.0;
        for l in (0..t.len()).rev() {
            out[l] = acc;
            acc += t[l];
        }
        out
    };
    let tail = suffix(term(r - m));
    let tail_k_weighted = suffix(term(k));
    let strictly_decreasing = residual_norm_sq.windows(2).all(|w| w[1] < w[0]);
    let max_rel_deviation = residual_norm_sq
        .iter()
        .zip(&tail)
        .map(|(a, b)| if *b == 0.0 { a.abs() } else { (a - b).abs() / b })
        .fold(0.0, f64::max);
    Ok(ClosedRangeWitness {
        search,
        k,
        u,
        f,
        residual_norm_sq,
        tail,
        tail_k_weighted,
        strictly_decreasing,
        max_rel_deviation,
    })
}
