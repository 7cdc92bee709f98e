//! Piecewise-linear spectral charts of unital homomorphisms between interval
//! blocks: fibers, composition, spectral distribution witnesses and the
//! K₀ bookkeeping of the decomposition into small and finite-dimensional parts.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::blocks::{Block, BlockError};
use crate::ktheory::{k0_positive_contains, minimal_positive_classes};
use crate::num::{ceil_div, dot, floor_div, fmt_rat, fmt_vec, is_nonneg, rat_int, vadd, vscale, vsub, Int, Rat};
use crate::spectra::{SpectraError, Spectrum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("bad path: {0}")]
    BadPath(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("fiber dimension {got}, target needs n' = {expected}")]
    FiberDimMismatch { expected: Int, got: Int },
    #[error("base fiber {index} has dimension {got}, expected {expected}")]
    BaseFiberDimMismatch { index: usize, expected: Int, got: Int },
    #[error("boundary mismatch at x = {endpoint}: {detail}")]
    BoundaryMismatch { endpoint: u8, detail: String },
    #[error("target of the first chart is not the source of the second")]
    SourceTargetMismatch,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("no distribution witness found: {0}")]
    DistributionNotFound(String),
    #[error("composite fails the witness: {0}")]
    CompositionCheckFailed(String),
    #[error("{0} is not in K0+")]
    NotInK0Plus(String),
    #[error("witness interval {r} has length {len}, expected 1")]
    WitnessSpacingMismatch { r: usize, len: Int },
    #[error("inequality failed: {name}")]
    InequalityFailed { name: String },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("chart has base multiplicities; the bound needs interior-supported fibers")]
    NotInteriorSupported,
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Continuous piecewise-linear map `[0,1] → [0,1]` given by its breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlPath {
    points: Vec<(Rat, Rat)>,
}

impl PlPath {
    pub fn new(points: Vec<(Rat, Rat)>) -> Result<PlPath, ChartError> {
        if points.len() < 2 {
            return Err(ChartError::BadPath("need at least two breakpoints".into()));
        }
        if !points[0].0.is_zero() || !points[points.len() - 1].0.is_one() {
            return Err(ChartError::BadPath("breakpoints must start at x = 0 and end at x = 1".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(ChartError::BadPath("x must be strictly increasing".into()));
        }
        if let Some((_, y)) = points.iter().find(|(_, y)| y.is_negative() || *y > Rat::one()) {
            return Err(ChartError::BadPath(format!("value {} outside [0,1]", fmt_rat(y))));
        }
        Ok(PlPath { points })
    }

    pub fn constant(y: Rat) -> PlPath {
        PlPath { points: vec![(Rat::zero(), y.clone()), (Rat::one(), y)] }
    }

    pub fn identity() -> PlPath {
        PlPath { points: vec![(Rat::zero(), Rat::zero()), (Rat::one(), Rat::one())] }
    }

    pub fn points(&self) -> &[(Rat, Rat)] {
        &self.points
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let idx = self.points.partition_point(|(px, _)| px <= x);
        if idx == 0 {
            return self.points[0].1.clone();
        }
        if idx == self.points.len() {
            return self.points[idx - 1].1.clone();
        }
        let (x0, y0) = &self.points[idx - 1];
        let (x1, y1) = &self.points[idx];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Points `x` where the path crosses the level `v` on a non-constant piece.
    pub fn crossings(&self, v: &Rat) -> Vec<Rat> {
        let mut out = Vec::new();
        for w in self.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if y0 == y1 {
                continue;
            }
            let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
            if v >= lo && v <= hi {
                out.push(x0 + (v - y0) * (x1 - x0) / (y1 - y0));
            }
        }
        out
    }

    /// `self ∘ inner`, with breakpoints at those of `inner` and at preimages
    /// of the breakpoints of `self`.
    pub fn compose(&self, inner: &PlPath) -> PlPath {
        let mut xs: Vec<Rat> = inner.points.iter().map(|(x, _)| x.clone()).collect();
        for (bx, _) in &self.points {
            xs.extend(inner.crossings(bx));
        }
        xs.sort();
        xs.dedup();
        let points = xs.into_iter().map(|x| {
            let y = self.eval(&inner.eval(&x));
            (x, y)
        });
        PlPath { points: simplify(points.collect()) }
    }
}

fn simplify(points: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(points.len());
    for p in points {
        if out.len() >= 2 {
            let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
            if (&b.1 - &a.1) * (&p.0 - &b.0) == (&p.1 - &b.1) * (&b.0 - &a.0) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// A unital homomorphism `A → B` between interval blocks, seen through its
/// spectra: base fibers at the points of `Sp(F₁')`, a constant base part along
/// `(0,1)`, and interior eigenvalue branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralChart {
    source: Block,
    target: Block,
    base_fibers: Vec<Spectrum>,
    t: Vec<Int>,
    paths: Vec<PlPath>,
}

impl SpectralChart {
    pub fn new(
        source: Block,
        target: Block,
        base_fibers: Vec<Spectrum>,
        t: Vec<Int>,
        paths: Vec<PlPath>,
    ) -> Result<SpectralChart, ChartError> {
        let (n, _, _) = source.require_interval()?;
        let (n_t, alpha_t, beta_t) = target.require_interval()?;
        if base_fibers.len() != target.p() {
            return Err(ChartError::ShapeMismatch(format!(
                "{} base fibers for a target with p' = {}",
                base_fibers.len(),
                target.p()
            )));
        }
        if t.len() != source.p() || t.iter().any(Signed::is_negative) {
            return Err(ChartError::ShapeMismatch(format!("t = {} must be a nonnegative length-{} vector", fmt_vec(&t), source.p())));
        }
        for (index, (s, k)) in base_fibers.iter().zip(target.k()).enumerate() {
            if s.block() != &source {
                return Err(ChartError::ShapeMismatch(format!("base fiber {index} lives over another block")));
            }
            if &s.dimension() != k {
                return Err(ChartError::BaseFiberDimMismatch { index, expected: k.clone(), got: s.dimension() });
            }
        }
        let got = dot(&t, source.k()) + n * Int::from(paths.len());
        if &got != n_t {
            return Err(ChartError::FiberDimMismatch { expected: n_t.clone(), got });
        }
        let (alpha_t, beta_t) = (alpha_t.to_vec(), beta_t.to_vec());
        let chart = SpectralChart { source, target, base_fibers, t, paths };
        for (endpoint, row) in [(0u8, &alpha_t), (1u8, &beta_t)] {
            let x = Rat::from_integer(Int::from(endpoint));
            let fiber = chart.fiber(&x);
            let expected = Spectrum::scaled_union(&chart.source, row.iter().zip(&chart.base_fibers));
            if fiber != expected {
                let detail = format!(
                    "fiber has base {} interior {}, endpoint data give base {} interior {}",
                    fmt_vec(fiber.base()),
                    fmt_rats(fiber.interior()),
                    fmt_vec(expected.base()),
                    fmt_rats(expected.interior())
                );
                return Err(ChartError::BoundaryMismatch { endpoint, detail });
            }
        }
        Ok(chart)
    }

    pub fn source(&self) -> &Block {
        &self.source
    }

    pub fn target(&self) -> &Block {
        &self.target
    }

    pub fn base_fibers(&self) -> &[Spectrum] {
        &self.base_fibers
    }

    pub fn t(&self) -> &[Int] {
        &self.t
    }

    pub fn paths(&self) -> &[PlPath] {
        &self.paths
    }

    /// Spectrum of `π_x ∘ φ`; path values at 0 or 1 become base points.
    pub fn fiber(&self, x: &Rat) -> Spectrum {
        let alpha = self.source.alpha().expect("interval source");
        let beta = self.source.beta().expect("interval source");
        let mut base = self.t.clone();
        let mut interior = Vec::new();
        for p in &self.paths {
            let y = p.eval(x);
            if y.is_zero() {
                base = vadd(&base, alpha);
            } else if y.is_one() {
                base = vadd(&base, beta);
            } else {
                interior.push(y);
            }
        }
        Spectrum::from_parts(self.source.clone(), base, interior)
    }

    /// Pulls a spectrum over the target back to one over the source: base
    /// points go through the base fibers, interior points through `fiber`.
    pub fn pushforward(&self, s: &Spectrum) -> Spectrum {
        let mut acc = Spectrum::scaled_union(&self.source, s.base().iter().zip(&self.base_fibers));
        for x in s.interior() {
            let f = self.fiber(x);
            acc = Spectrum::scaled_union(&self.source, [(&Int::one(), &acc), (&Int::one(), &f)]);
        }
        acc
    }

    /// Sample points on which every window count is determined: breakpoints,
    /// crossings of the given levels, both ends, and midpoints between them.
    fn samples(&self, levels: &[Rat]) -> Vec<Rat> {
        let mut xs = vec![Rat::zero(), Rat::one()];
        for p in &self.paths {
            xs.extend(p.points.iter().map(|(x, _)| x.clone()));
            for v in levels {
                xs.extend(p.crossings(v));
            }
        }
        xs.sort();
        xs.dedup();
        let mids: Vec<Rat> = xs.windows(2).map(|w| (&w[0] + &w[1]) / Rat::from_integer(Int::from(2))).collect();
        xs.extend(mids);
        xs.sort();
        xs
    }

    fn crowded_fiber_at(&self, inner: (&Rat, &Rat), outer: (&Rat, &Rat), l: u64) -> Option<Rat> {
        let samples = self.samples(&[inner.0.clone(), inner.1.clone(), outer.0.clone(), outer.1.clone()]);
        let lp1 = l + 1;
        samples.into_iter().find(|x| {
            let vals: Vec<Rat> = self.paths.iter().map(|p| p.eval(x)).collect();
            let ci = count_open(&vals, inner.0, inner.1);
            let co = count_open(&vals, outer.0, outer.1);
            ci * lp1 as usize > co
        })
    }
}

fn fmt_rats(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("[{}]", parts.join(", "))
}

fn count_open(vals: &[Rat], lo: &Rat, hi: &Rat) -> usize {
    vals.iter().filter(|v| *v > lo && *v < hi).count()
}

fn count_closed(vals: &[Rat], lo: &Rat, hi: &Rat) -> usize {
    vals.iter().filter(|v| *v >= lo && *v <= hi).count()
}

/// Chart of `ψ ∘ φ` from charts of `φ: A → B` and `ψ: B → C`.
pub fn compose_charts(c1: &SpectralChart, c2: &SpectralChart) -> Result<SpectralChart, ChartError> {
    if c1.target != c2.source {
        return Err(ChartError::SourceTargetMismatch);
    }
    let mut t = vscale(&Int::from(c2.paths.len()), &c1.t);
    for (mult, s) in c2.t.iter().zip(&c1.base_fibers) {
        t = vadd(&t, &vscale(mult, s.base()));
    }
    let mut paths = Vec::new();
    for q in &c2.paths {
        for p in &c1.paths {
            paths.push(p.compose(q));
        }
    }
    for (mult, s) in c2.t.iter().zip(&c1.base_fibers) {
        let reps = mult.to_usize().expect("multiplicity fits in memory");
        for y in s.interior() {
            paths.extend(std::iter::repeat_n(PlPath::constant(y.clone()), reps));
        }
    }
    let base_fibers = c2.base_fibers.iter().map(|s| c1.pushforward(s)).collect();
    SpectralChart::new(c1.source.clone(), c2.target.clone(), base_fibers, t, paths)
        .map_err(|e| ChartError::CompositionCheckFailed(e.to_string()))
}

/// Index `c` of the cell `(lo + c·w, lo + (c+1)·w)`, `w = width/(L+1)^s`,
/// with `(L+1)·#(E_i ∩ cell) ≤ #(E_i ∩ (lo, lo+width))` for every set.
pub fn ccut_in(lo: &Rat, width: &Rat, sets: &[Vec<Rat>], l: u64) -> Int {
    let parts = Int::from(l + 1);
    let mut cell = Int::zero();
    let mut cur_lo = lo.clone();
    let mut cur_w = width.clone();
    for set in sets {
        let cur_hi = &cur_lo + &cur_w;
        let total = count_open(set, &cur_lo, &cur_hi);
        let sub_w = &cur_w / rat_int(&parts);
        let mut chosen = None;
        for j in 0..=l {
            let a = &cur_lo + &sub_w * rat_int(&Int::from(j));
            let b = &a + &sub_w;
            if count_open(set, &a, &b) * (l as usize + 1) <= total {
                chosen = Some((j, a));
                break;
            }
        }
        let (j, a) = chosen.expect("pigeonhole: some part holds at most the average");
        cell = cell * &parts + Int::from(j);
        cur_lo = a;
        cur_w = sub_w;
    }
    cell
}

/// Integers `c < d = c+1` on the grid `1/(L+1)^s` with
/// `(L+1)·#(E_i ∩ (c/(L+1)^s, d/(L+1)^s)) ≤ #E_i` for every `i`.
pub fn ccut(sets: &[Vec<Rat>], l: u64) -> (Int, Int) {
    let c = ccut_in(&Rat::zero(), &Rat::one(), sets, l);
    let d = &c + Int::one();
    (c, d)
}

/// Unit cells `(a_r/m, (a_r+1)/m)` inside each `((r−1)/K, r/K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionWitness {
    /// Grid size; the mesh is `1/mesh`.
    pub mesh: Int,
    pub k: u64,
    pub l: u64,
    /// `(a_r, b_r)` for `r = 1..=K`.
    pub intervals: Vec<(Int, Int)>,
}

impl DistributionWitness {
    pub fn eta(&self) -> Rat {
        Rat::new(Int::one(), self.mesh.clone())
    }
}

fn k_window(r: u64, k: u64) -> (Rat, Rat) {
    (Rat::new(Int::from(r - 1), Int::from(k)), Rat::new(Int::from(r), Int::from(k)))
}

fn check_kl(k: u64, l: u64) -> Result<(), ChartError> {
    if k == 0 || l == 0 {
        return Err(ChartError::BadParameter(format!("K and L must be positive, got K={k} L={l}")));
    }
    Ok(())
}

/// Reason the chart fails the witness, or `None` when every condition holds.
pub fn witness_failure(c: &SpectralChart, w: &DistributionWitness) -> Result<Option<String>, ChartError> {
    check_kl(w.k, w.l)?;
    if !w.mesh.is_positive() {
        return Err(ChartError::GridMismatch("mesh must be positive".into()));
    }
    if w.intervals.len() as u64 != w.k {
        return Err(ChartError::GridMismatch(format!("{} intervals for K = {}", w.intervals.len(), w.k)));
    }
    let eta = w.eta();
    for (idx, (a, b)) in w.intervals.iter().enumerate() {
        let r = idx as u64 + 1;
        let (klo, khi) = k_window(r, w.k);
        let (lo, hi) = (rat_int(a) * &eta, rat_int(b) * &eta);
        if b - a != Int::one() || lo < klo || hi > khi {
            return Err(ChartError::GridMismatch(format!("interval {r} = ({a}, {b}) is not a unit cell inside window {r}")));
        }
        if let Some(reason) = cell_failure(c, (&lo, &hi), (&klo, &khi), w.l) {
            return Ok(Some(format!("window {r}: {reason}")));
        }
    }
    Ok(None)
}

fn cell_failure(c: &SpectralChart, cell: (&Rat, &Rat), window: (&Rat, &Rat), l: u64) -> Option<String> {
    for (i, s) in c.base_fibers.iter().enumerate() {
        let ci = count_open(s.interior(), cell.0, cell.1);
        let co = count_open(s.interior(), window.0, window.1);
        if ci * (l as usize + 1) > co {
            return Some(format!("base fiber {i} has {ci} points in the cell and {co} in the window"));
        }
    }
    c.crowded_fiber_at(cell, window, l)
        .map(|x| format!("fiber at x = {} crowds the cell", fmt_rat(&x)))
}

/// Searches, window by window, for a unit cell on the grid `1/mesh`
/// satisfying both counting conditions.
pub fn has_distribution(c: &SpectralChart, mesh: &Int, k: u64, l: u64) -> Result<Option<DistributionWitness>, ChartError> {
    check_kl(k, l)?;
    if !mesh.is_positive() {
        return Err(ChartError::GridMismatch("mesh must be positive".into()));
    }
    let eta = Rat::new(Int::one(), mesh.clone());
    let kk = Int::from(k);
    let mut intervals = Vec::new();
    for r in 1..=k {
        let first = ceil_div(&(Int::from(r - 1) * mesh), &kk);
        let last = floor_div(&(Int::from(r) * mesh), &kk) - Int::one();
        if first > last {
            return Err(ChartError::GridMismatch(format!("window {r} holds no cell of width 1/{mesh}")));
        }
        let (klo, khi) = k_window(r, k);
        let mut a = first;
        let found = loop {
            if a > last {
                break None;
            }
            let lo = rat_int(&a) * &eta;
            let hi = &lo + &eta;
            if cell_failure(c, (&lo, &hi), (&klo, &khi), l).is_none() {
                break Some(a);
            }
            a += Int::one();
        };
        match found {
            Some(a) => {
                let b = &a + Int::one();
                intervals.push((a, b));
            }
            None => return Ok(None),
        }
    }
    Ok(Some(DistributionWitness { mesh: mesh.clone(), k, l, intervals }))
}

/// Constructs a witness by nested pigeonhole: an `8η` cell per window chosen
/// from the fiber over 0, then a `δ` cell inside its `2η`-shrink chosen for
/// the base fibers, with `η = 1/(8K(L+1))` and `δ = η/(L+1)^{p'}`.
pub fn find_distribution(c: &SpectralChart, k: u64, l: u64) -> Result<(Rat, DistributionWitness), ChartError> {
    check_kl(k, l)?;
    let lp1 = Int::from(l + 1);
    let pt = u32::try_from(c.target.p()).map_err(|_| ChartError::BadParameter("p' too large".into()))?;
    let scale = num_traits::pow(lp1.clone(), pt as usize);
    let eta_mesh = Int::from(8) * Int::from(k) * &lp1;
    let eta = Rat::new(Int::one(), eta_mesh.clone());
    let mesh = &eta_mesh * &scale;
    let delta = Rat::new(Int::one(), mesh.clone());
    let fiber0 = c.fiber(&Rat::zero());
    let mut intervals = Vec::new();
    for r in 1..=k {
        let (klo, khi) = k_window(r, k);
        let cell = ccut_in(&klo, &(&khi - &klo), &[fiber0.interior().to_vec()], l);
        let cell_index = Int::from(r - 1) * &lp1 + cell;
        let inner_lo = (rat_int(&(Int::from(8) * &cell_index)) + Rat::from_integer(Int::from(2))) * &eta;
        let inner_w = &eta * Rat::from_integer(Int::from(4));
        let inner_hi = &inner_lo + &inner_w;
        let sets: Vec<Vec<Rat>> = c
            .base_fibers
            .iter()
            .map(|s| s.interior().iter().filter(|y| **y > inner_lo && **y < inner_hi).cloned().collect())
            .collect();
        let sub = ccut_in(&inner_lo, &inner_w, &sets, l);
        // The chosen cell has width 4δ; its first δ-subcell inherits the bound.
        let a_rat = &inner_lo / &delta + rat_int(&(Int::from(4) * sub));
        debug_assert!(a_rat.is_integer());
        let a = a_rat.to_integer();
        let b = &a + Int::one();
        intervals.push((a, b));
    }
    let w = DistributionWitness { mesh, k, l, intervals };
    match witness_failure(c, &w)? {
        None => Ok((delta, w)),
        Some(reason) => Err(ChartError::DistributionNotFound(reason)),
    }
}

/// Re-verifies the same intervals on the composite chart.
pub fn distribution_composes(
    c1: &SpectralChart,
    c2: &SpectralChart,
    w: &DistributionWitness,
) -> Result<DistributionWitness, ChartError> {
    let composite = compose_charts(c1, c2)?;
    match witness_failure(&composite, w)? {
        None => Ok(w.clone()),
        Some(reason) => Err(ChartError::CompositionCheckFailed(reason)),
    }
}

/// Image of a K₀⁺ class of the source in K₀ of the target.
pub fn k0_image(c: &SpectralChart, g: &[Int]) -> Result<Vec<Int>, ChartError> {
    if !k0_positive_contains(&c.source, g).unwrap_or(false) {
        return Err(ChartError::NotInK0Plus(fmt_vec(g)));
    }
    let ag = dot(c.source.alpha().expect("interval source"), g);
    Ok(c.base_fibers
        .iter()
        .map(|s| dot(s.base(), g) + &ag * Int::from(s.interior().len()))
        .collect())
}

/// A named entrywise inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub lhs: Vec<Int>,
    pub rhs: Vec<Int>,
}

impl Check {
    pub fn holds(&self) -> bool {
        is_nonneg(&self.margin())
    }

    pub fn margin(&self) -> Vec<Int> {
        vsub(&self.rhs, &self.lhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCertificate {
    /// `δ/8`.
    pub eta: Rat,
    /// Closed intervals `V_0..V_K`.
    pub v: Vec<(Rat, Rat)>,
    /// `2η`-neighbourhoods of `V_0..V_K`, clipped to `[0,1]`.
    pub w: Vec<(Rat, Rat)>,
    /// `[P_r]` for `r = 1..K−1`.
    pub p_classes: Vec<Vec<Int>>,
    /// `[Q_j]` for `j = 1..p`.
    pub q_classes: Vec<Vec<Int>>,
    pub r_class: Vec<Int>,
    pub q: Vec<Int>,
    pub nu_unit: Vec<Int>,
    pub rho_unit: Vec<Int>,
    pub unit: Vec<Int>,
    pub checks: Vec<Check>,
}

/// K₀ bookkeeping for the splitting of a chart into a small corner `q`, a
/// part `ν` with interior spectrum and a part `ρ` through the base.
pub fn decompose(c: &SpectralChart, w: &DistributionWitness) -> Result<DecompositionCertificate, ChartError> {
    let k = w.k;
    if k < 3 {
        return Err(ChartError::BadParameter(format!("decomposition needs K >= 3, got {k}")));
    }
    if w.intervals.len() as u64 != k {
        return Err(ChartError::GridMismatch(format!("{} intervals for K = {k}", w.intervals.len())));
    }
    for (r, (a, b)) in w.intervals.iter().enumerate() {
        if b - a != Int::one() {
            return Err(ChartError::WitnessSpacingMismatch { r: r + 1, len: b - a });
        }
    }
    let eta = w.eta() / Rat::from_integer(Int::from(8));
    let at = |x: Int| rat_int(&x) * &eta;
    let eight = Int::from(8);
    let a_r = |r: usize| &w.intervals[r - 1].0 * &eight;
    let b_r = |r: usize| &w.intervals[r - 1].0 * &eight + &eight;
    let ku = k as usize;
    let two = Int::from(2);
    let mut v = Vec::with_capacity(ku + 1);
    v.push((Rat::zero(), at(a_r(2) + &two)));
    for r in 1..ku {
        v.push((at(b_r(r)), at(a_r(r + 1))));
    }
    v.push((at(b_r(ku - 1) - &two), Rat::one()));
    let w_sets: Vec<(Rat, Rat)> = v
        .iter()
        .map(|(lo, hi)| {
            let lo2 = lo - &eta * Rat::from_integer(two.clone());
            let hi2 = hi + &eta * Rat::from_integer(two.clone());
            (lo2.max(Rat::zero()), hi2.min(Rat::one()))
        })
        .collect();
    let (n, alpha, beta) = c.source.require_interval()?;
    let pt = c.target.p();
    let counts = |iv: &(Rat, Rat)| -> Vec<Int> {
        c.base_fibers.iter().map(|s| Int::from(count_closed(s.interior(), &iv.0, &iv.1))).collect()
    };
    let v_counts: Vec<Vec<Int>> = v.iter().map(counts).collect();
    let zero = vec![Int::zero(); pt];
    let p_classes: Vec<Vec<Int>> = (1..ku).map(|r| vscale(n, &v_counts[r])).collect();
    let q_classes: Vec<Vec<Int>> = (0..c.source.p())
        .map(|j| {
            let kj = &c.source.k()[j];
            let base: Vec<Int> = c.base_fibers.iter().map(|s| kj * &s.base()[j]).collect();
            let at0 = vscale(&(kj * &alpha[j]), &v_counts[0]);
            let at1 = vscale(&(kj * &beta[j]), &v_counts[ku]);
            vadd(&vadd(&base, &at0), &at1)
        })
        .collect();
    let p_sum = (2..ku - 1).fold(zero.clone(), |acc, r| vadd(&acc, &p_classes[r - 1]));
    let r_class = vadd(&p_classes[0], &p_classes[ku - 2]);
    let q_sum = q_classes.iter().fold(zero.clone(), |acc, x| vadd(&acc, x));
    let unit = c.target.k().to_vec();
    let q = vsub(&vsub(&unit, &p_sum), &q_sum);
    let nu_unit = vadd(&p_sum, &r_class);
    let rho_unit = vsub(&q_sum, &r_class);

    let l = Int::from(w.l);
    let mut checks = Vec::new();
    checks.push(Check { name: "q >= 0".into(), lhs: zero.clone(), rhs: q.clone() });
    let total = vadd(&vadd(&q, &p_sum), &q_sum);
    checks.push(Check { name: "q + P + Q <= unit".into(), lhs: total.clone(), rhs: unit.clone() });
    checks.push(Check { name: "q + P + Q >= unit".into(), lhs: unit.clone(), rhs: total });
    checks.push(Check { name: "L*q <= nu_unit".into(), lhs: vscale(&l, &q), rhs: nu_unit.clone() });
    checks.push(Check { name: "R <= Q".into(), lhs: r_class.clone(), rhs: q_sum.clone() });
    let gap_counts = (2..ku).fold(zero.clone(), |acc, r| {
        let (lo, hi) = (at(a_r(r)), at(b_r(r)));
        let cnt: Vec<Int> =
            c.base_fibers.iter().map(|s| Int::from(count_open(s.interior(), &lo, &hi))).collect();
        vadd(&acc, &cnt)
    });
    checks.push(Check { name: "q <= n * gap counts".into(), lhs: q.clone(), rhs: vscale(n, &gap_counts) });
    for r in 1..ku {
        let upper = vscale(n, &counts(&w_sets[r]));
        checks.push(Check { name: format!("P_{r} <= n * #W_{r}"), lhs: p_classes[r - 1].clone(), rhs: upper });
    }
    for (j, qj) in q_classes.iter().enumerate() {
        checks.push(Check { name: format!("Q_{} >= 0", j + 1), lhs: zero.clone(), rhs: qj.clone() });
    }
    // Small-corner bound against every minimal projection class of the source.
    let interior_total = (1..ku).fold(zero.clone(), |acc, r| vadd(&acc, &v_counts[r]));
    let factor = l.div_floor(n);
    for e in minimal_positive_classes(&c.source) {
        let ae = dot(alpha, &e);
        checks.push(Check {
            name: format!("floor(L/n)*q <= nu(e) for e = {}", fmt_vec(&e)),
            lhs: vscale(&factor, &q),
            rhs: vscale(&ae, &interior_total),
        });
    }
    if let Some(bad) = checks.iter().find(|ch| !ch.holds()) {
        let mut name = bad.name.clone();
        if bad.name == "L*q <= nu_unit" {
            if let Some(reason) = witness_failure(c, w)? {
                name = format!("{name} ({reason})");
            }
        }
        return Err(ChartError::InequalityFailed { name });
    }
    Ok(DecompositionCertificate {
        eta,
        v,
        w: w_sets,
        p_classes,
        q_classes,
        r_class,
        q,
        nu_unit,
        rho_unit,
        unit,
        checks,
    })
}

/// For a chart whose base fibers carry only interior points:
/// `n·[φ(e)] ≥ [φ(1)]` for every minimal positive class `e`.
pub fn interior_bound_checks(c: &SpectralChart) -> Result<Vec<Check>, ChartError> {
    if c.base_fibers.iter().any(|s| s.base().iter().any(|x| !x.is_zero())) {
        return Err(ChartError::NotInteriorSupported);
    }
    let (n, _, _) = c.source.require_interval()?;
    let unit_image = k0_image(c, c.source.k())?;
    minimal_positive_classes(&c.source)
        .into_iter()
        .map(|e| {
            let img = k0_image(c, &e)?;
            Ok(Check { name: format!("n*image({}) >= image(1)", fmt_vec(&e)), lhs: unit_image.clone(), rhs: vscale(n, &img) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ints, rat};
    use proptest::prelude::*;

    fn i2() -> Block {
        Block::dimension_drop(&int(2)).unwrap()
    }

    fn identity_chart() -> SpectralChart {
        let a = i2();
        let f1 = Spectrum::new(a.clone(), ints(&[1, 0]), vec![]).unwrap();
        let f2 = Spectrum::new(a.clone(), ints(&[0, 1]), vec![]).unwrap();
        SpectralChart::new(a.clone(), a, vec![f1, f2], ints(&[0, 0]), vec![PlPath::identity()]).unwrap()
    }

    /// `Ĩ₂ → M_2(C[0,1])`-type block with one constant branch at `y`.
    fn constant_chart(y: Rat) -> SpectralChart {
        let a = i2();
        let b = Block::interval(ints(&[2, 2]), int(2), ints(&[1, 0]), ints(&[0, 1])).unwrap();
        let s = Spectrum::new(a.clone(), ints(&[0, 0]), vec![y.clone()]).unwrap();
        SpectralChart::new(a, b, vec![s.clone(), s], ints(&[0, 0]), vec![PlPath::constant(y)]).unwrap()
    }

    #[test]
    fn validation() {
        let id = identity_chart();
        assert_eq!(id.fiber(&rat(1, 2)).interior(), &[rat(1, 2)]);
        assert_eq!(id.fiber(&rat(0, 1)).base(), ints(&[2, 0]).as_slice());
        let c = constant_chart(rat(1, 2));
        assert_eq!(c.fiber(&rat(1, 3)).interior(), &[rat(1, 2)]);
        let a = i2();
        let e = SpectralChart::new(
            a.clone(),
            a.clone(),
            id.base_fibers().to_vec(),
            ints(&[1, 0]),
            vec![PlPath::identity()],
        )
        .unwrap_err();
        assert!(matches!(e, ChartError::FiberDimMismatch { .. }));
        let flipped = PlPath::new(vec![(rat(0, 1), rat(1, 1)), (rat(1, 1), rat(0, 1))]).unwrap();
        let e = SpectralChart::new(a.clone(), a, id.base_fibers().to_vec(), ints(&[0, 0]), vec![flipped]).unwrap_err();
        assert!(matches!(e, ChartError::BoundaryMismatch { endpoint: 0, .. }));
    }

    #[test]
    fn pl_composition() {
        let p = PlPath::new(vec![(rat(0, 1), rat(0, 1)), (rat(1, 2), rat(1, 1)), (rat(1, 1), rat(1, 1))]).unwrap();
        let q = PlPath::new(vec![(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(1, 1))]).unwrap();
        let pq = p.compose(&q);
        assert_eq!(pq, p);
        let qp = q.compose(&p);
        for i in 0..=8 {
            let x = rat(i, 8);
            assert_eq!(qp.eval(&x), q.eval(&p.eval(&x)));
        }
    }

    #[test]
    fn composition_with_identity() {
        let id = identity_chart();
        let comp = compose_charts(&id, &id).unwrap();
        for i in 0..=6 {
            let x = rat(i, 6);
            assert_eq!(comp.fiber(&x), id.fiber(&x));
        }
        let c = constant_chart(rat(1, 3));
        let comp = compose_charts(&id, &c).unwrap();
        assert_eq!(comp.fiber(&rat(1, 2)), c.fiber(&rat(1, 2)));
    }

    #[test]
    fn ccut_examples() {
        assert_eq!(ccut(&[vec![]], 3), (int(0), int(1)));
        assert_eq!(ccut(&[vec![rat(1, 2)]], 1), (int(0), int(1)));
        // Four points in the first quarter push the cut elsewhere.
        let e = vec![rat(1, 10), rat(1, 9), rat(1, 8), rat(1, 7)];
        let (c, d) = ccut(std::slice::from_ref(&e), 1);
        let eta = rat(1, 2);
        assert!(2 * count_open(&e, &(rat_int(&c) * &eta), &(rat_int(&d) * &eta)) <= e.len());
    }

    #[test]
    fn distribution_examples() {
        let c = constant_chart(rat(1, 2));
        let w = has_distribution(&c, &int(4), 1, 1).unwrap().unwrap();
        assert_eq!(w.intervals, vec![(int(0), int(1))]);
        let w2 = has_distribution(&c, &int(4), 2, 1).unwrap().unwrap();
        assert_eq!(witness_failure(&c, &w2).unwrap(), None);
        assert!(matches!(has_distribution(&c, &int(3), 4, 1), Err(ChartError::GridMismatch(_))));
        let (delta, w) = find_distribution(&c, 3, 1).unwrap();
        assert_eq!(delta, rat(1, 8 * 3 * 2 * 4));
        assert_eq!(witness_failure(&c, &w).unwrap(), None);
        let id = identity_chart();
        assert!(distribution_composes(&c, &constant_chart_target_map(), &w).is_ok());
        // The identity's branch sweeps every cell, so no cell is sparse at L = 1.
        assert_eq!(has_distribution(&id, &int(8), 1, 1).unwrap(), None);
        assert!(matches!(find_distribution(&id, 1, 1), Err(ChartError::DistributionNotFound(_))));
    }

    /// Identity-like chart on the constant chart's target block.
    fn constant_chart_target_map() -> SpectralChart {
        let b = Block::interval(ints(&[2, 2]), int(2), ints(&[1, 0]), ints(&[0, 1])).unwrap();
        let f1 = Spectrum::new(b.clone(), ints(&[1, 0]), vec![]).unwrap();
        let f2 = Spectrum::new(b.clone(), ints(&[0, 1]), vec![]).unwrap();
        SpectralChart::new(b.clone(), b, vec![f1, f2], ints(&[0, 0]), vec![PlPath::identity()]).unwrap()
    }

    #[test]
    fn k0_images() {
        let id = identity_chart();
        assert_eq!(k0_image(&id, &ints(&[1, 1])).unwrap(), ints(&[1, 1]));
        assert_eq!(k0_image(&id, &ints(&[0, 0])).unwrap(), ints(&[0, 0]));
        assert!(matches!(k0_image(&id, &ints(&[1, 0])), Err(ChartError::NotInK0Plus(_))));
        let c = constant_chart(rat(1, 3));
        assert_eq!(k0_image(&c, &ints(&[1, 1])).unwrap(), ints(&[2, 2]));
        assert!(interior_bound_checks(&c).unwrap().iter().all(Check::holds));
        assert!(matches!(interior_bound_checks(&id), Err(ChartError::NotInteriorSupported)));
    }

    #[test]
    fn decomposition() {
        let c = constant_chart(rat(1, 2));
        let (_, w) = find_distribution(&c, 4, 1).unwrap();
        let cert = decompose(&c, &w).unwrap();
        assert!(cert.checks.iter().all(Check::holds));
        assert_eq!(vadd(&vadd(&cert.q, &cert.nu_unit), &cert.rho_unit), cert.unit);
        let mut bad = w.clone();
        bad.intervals[0].1 += int(1);
        assert!(matches!(decompose(&c, &bad), Err(ChartError::WitnessSpacingMismatch { r: 1, .. })));
        let mut k2 = w;
        k2.k = 2;
        assert!(matches!(decompose(&c, &k2), Err(ChartError::BadParameter(_))));
    }

    #[test]
    fn decomposition_rejects_crowded_cell() {
        // Put the branch inside the third window's witness cell.
        let mut probe = constant_chart(rat(1, 2));
        let (_, w) = find_distribution(&probe, 4, 1).unwrap();
        let (a, _) = &w.intervals[2];
        let y = (rat_int(a) + rat(1, 2)) * w.eta();
        probe = constant_chart(y);
        match decompose(&probe, &w) {
            Err(ChartError::InequalityFailed { name }) => assert!(name.contains("window 3"), "{name}"),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn ccut_postcondition(sets in prop::collection::vec(prop::collection::vec((0i64..=60).prop_map(|x| rat(x, 60)), 0..40), 1..4),
                              l in 1u64..5) {
            let (c, d) = ccut(&sets, l);
            let grid = num_traits::pow(Int::from(l + 1), sets.len());
            prop_assert!(c >= Int::zero() && d <= grid && &d - &c == Int::one());
            let (lo, hi) = (Rat::new(c, grid.clone()), Rat::new(d, grid));
            for e in &sets {
                prop_assert!((l as usize + 1) * count_open(e, &lo, &hi) <= e.len());
            }
        }
    }
}
