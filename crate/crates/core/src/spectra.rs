//! Spectra of homomorphisms into matrix algebras, test functions, eigenvalue
//! multisets and the alignment constructions used to compare point evaluations.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::blocks::{Block, BlockError};
use crate::num::{fmt_rat, is_zero_vec, rat_int, vadd, vscale, vsub, Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectraError {
    #[error("spectra live over different blocks")]
    BlockMismatch,
    #[error("eigenvalue multisets have sizes {left} and {right}")]
    CardinalityMismatch { left: Int, right: Int },
    #[error("interior multisets have {left} and {right} points")]
    InteriorCountMismatch { left: usize, right: usize },
    #[error("interior multisets differ")]
    InteriorMismatch,
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("bad spectrum: {0}")]
    BadSpectrum(String),
    #[error("bad test function: {0}")]
    BadTestFunction(String),
    #[error("window [{lo}, {hi}] holds {found} interior points, need {needed}")]
    DensityViolation { lo: String, hi: String, found: usize, needed: Int },
    #[error("spectra are not KK-equivalent")]
    NotKkEqual,
    #[error(transparent)]
    Block(#[from] BlockError),
}

/// Spectrum of a homomorphism `A → M_r(ℂ)`: multiplicities of the base
/// points and the interior points in `(0,1)`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    block: Block,
    base: Vec<Int>,
    interior: Vec<Rat>,
}

impl Spectrum {
    pub fn new(block: Block, base: Vec<Int>, mut interior: Vec<Rat>) -> Result<Spectrum, SpectraError> {
        if base.len() != block.p() {
            return Err(SpectraError::BadSpectrum(format!("base has {} entries, block has p = {}", base.len(), block.p())));
        }
        if base.iter().any(Signed::is_negative) {
            return Err(SpectraError::BadSpectrum("negative base multiplicity".into()));
        }
        if !interior.is_empty() && !block.is_interval() {
            return Err(SpectraError::BadSpectrum("finite-dimensional block has no interior points".into()));
        }
        if let Some(y) = interior.iter().find(|y| !y.is_positive() || **y >= Rat::one()) {
            return Err(SpectraError::BadSpectrum(format!("interior point {} is outside (0,1)", fmt_rat(y))));
        }
        interior.sort();
        let s = Spectrum { block, base, interior };
        if s.dimension().is_zero() {
            return Err(SpectraError::BadSpectrum("dimension 0".into()));
        }
        Ok(s)
    }

    pub fn block(&self) -> &Block {
        &self.block
    }

    pub fn base(&self) -> &[Int] {
        &self.base
    }

    pub fn interior(&self) -> &[Rat] {
        &self.interior
    }

    /// Unvalidated constructor for callers that maintain the invariants.
    pub(crate) fn from_parts(block: Block, base: Vec<Int>, mut interior: Vec<Rat>) -> Spectrum {
        interior.sort();
        Spectrum { block, base, interior }
    }

    /// `⊎ c_i·S_i` over a common block: base vectors add, interiors repeat.
    pub fn scaled_union<'a>(block: &Block, parts: impl IntoIterator<Item = (&'a Int, &'a Spectrum)>) -> Spectrum {
        let mut base = vec![Int::zero(); block.p()];
        let mut interior = Vec::new();
        for (c, s) in parts {
            base = vadd(&base, &vscale(c, &s.base));
            let reps = c.to_usize().expect("multiplicity fits in memory");
            for _ in 0..reps {
                interior.extend(s.interior.iter().cloned());
            }
        }
        Spectrum::from_parts(block.clone(), base, interior)
    }

    /// Matrix size `Σ t_j k_j + n·#interior`.
    pub fn dimension(&self) -> Int {
        let base: Int = self.base.iter().zip(self.block.k()).map(|(t, k)| t * k).sum();
        let n = self.block.n().cloned().unwrap_or_else(Int::zero);
        base + n * Int::from(self.interior.len())
    }
}

/// The grid `x_i = i/m` of mesh `η = 1/m`.
pub fn grid_from_eta(eta: &Rat) -> Result<u64, SpectraError> {
    if !eta.numer().is_one() || !eta.is_positive() {
        return Err(SpectraError::BadGrid(format!("eta = {} is not of the form 1/m", fmt_rat(eta))));
    }
    eta.denom().to_u64().ok_or_else(|| SpectraError::BadGrid("grid too fine".into()))
}

fn eta_of(m: u64) -> Rat {
    Rat::new(Int::one(), Int::from(m))
}

fn grid_point(i: u64, m: u64) -> Rat {
    Rat::new(Int::from(i), Int::from(m))
}

/// A union of grid points `x_i` and unit cells `[x_i, x_{i+1}]` inside
/// `[η, 1−η]`. Canonical: every included cell also lists its two endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridSet {
    /// Grid indices, each in `1..=m−1`.
    pub points: Vec<u64>,
    /// Left endpoints `i` of included cells `[x_i, x_{i+1}]`.
    pub cells: Vec<u64>,
}

impl GridSet {
    pub fn validate(&self, m: u64) -> Result<(), SpectraError> {
        let bad = |s: String| Err(SpectraError::BadTestFunction(s));
        if self.points.is_empty() {
            return bad("empty set".into());
        }
        if self.points.windows(2).any(|w| w[0] >= w[1]) || self.cells.windows(2).any(|w| w[0] >= w[1]) {
            return bad("indices must be strictly increasing".into());
        }
        if let Some(i) = self.points.iter().find(|&&i| i == 0 || i >= m) {
            return bad(format!("grid point {i} outside [1, {}]", m.saturating_sub(1)));
        }
        for c in &self.cells {
            if !self.points.contains(c) || !self.points.contains(&(c + 1)) {
                return bad(format!("cell at {c} is missing an endpoint"));
            }
        }
        Ok(())
    }

    /// Exact distance from `y` to the set.
    pub fn distance(&self, y: &Rat, m: u64) -> Rat {
        let mut best: Option<Rat> = None;
        let mut consider = |d: Rat| {
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        };
        for &i in &self.points {
            consider((y - grid_point(i, m)).abs());
        }
        for &c in &self.cells {
            let (lo, hi) = (grid_point(c, m), grid_point(c + 1, m));
            if y < &lo {
                consider(lo - y);
            } else if y > &hi {
                consider(y - hi);
            } else {
                consider(Rat::zero());
            }
        }
        best.expect("nonempty grid set")
    }
}

impl fmt::Display for GridSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "points {:?} cells {:?}", self.points, self.cells)
    }
}

/// Lazy lexicographic enumeration of canonical grid sets for mesh `1/m`.
///
/// Each grid point `1..m−1` is `Out`, `In`, or `Joined` (in, with the cell to
/// its left included); a `Joined` point needs an included left neighbour.
pub struct GridSets {
    m: u64,
    state: Vec<u8>,
    done: bool,
}

pub fn grid_sets(m: u64) -> GridSets {
    let len = m.saturating_sub(1) as usize;
    GridSets { m, state: vec![0; len], done: len == 0 }
}

impl GridSets {
    fn advance(&mut self) -> bool {
        let len = self.state.len();
        let mut i = len;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            let max = if i == 0 { 1 } else { 2 };
            if self.state[i] < max {
                self.state[i] += 1;
                if self.state[i] == 2 && self.state[i - 1] == 0 {
                    self.state[i] = 0;
                    continue;
                }
                for s in &mut self.state[i + 1..] {
                    *s = 0;
                }
                return true;
            }
            self.state[i] = 0;
        }
    }
}

impl Iterator for GridSets {
    type Item = GridSet;

    fn next(&mut self) -> Option<GridSet> {
        if self.done {
            return None;
        }
        if !self.advance() {
            self.done = true;
            return None;
        }
        let mut set = GridSet { points: vec![], cells: vec![] };
        for (idx, &s) in self.state.iter().enumerate() {
            let i = idx as u64 + 1;
            if s > 0 {
                set.points.push(i);
            }
            if s == 2 {
                set.cells.push(i - 1);
            }
        }
        debug_assert!(set.validate(self.m).is_ok());
        Some(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestKind {
    /// Attached to base point `j` (0-based) with ramps below `r·η` and above `s·η`.
    Type1 { j: usize, r: u64, s: u64 },
    Type2(GridSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestFunction {
    /// Grid size; the mesh is `η = 1/m`.
    pub m: u64,
    pub kind: TestKind,
}

impl TestFunction {
    pub fn type1(m: u64, j: usize, r: u64, s: u64) -> TestFunction {
        TestFunction { m, kind: TestKind::Type1 { j, r, s } }
    }

    pub fn type2(m: u64, set: GridSet) -> TestFunction {
        TestFunction { m, kind: TestKind::Type2(set) }
    }

    pub fn validate(&self, a: &Block) -> Result<(), SpectraError> {
        if self.m < 2 {
            return Err(SpectraError::BadGrid(format!("m = {} < 2", self.m)));
        }
        match &self.kind {
            TestKind::Type1 { j, r, s } => {
                if *j >= a.p() {
                    return Err(SpectraError::BadTestFunction(format!("index {j} out of range for p = {}", a.p())));
                }
                if r + 2 > *s || *s > self.m {
                    return Err(SpectraError::BadTestFunction(format!("need r + 2 <= s <= m, got r={r} s={s} m={}", self.m)));
                }
                Ok(())
            }
            TestKind::Type2(set) => set.validate(self.m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestFamily {
    pub functions: Vec<TestFunction>,
    /// Set when the grid-set enumeration stopped at the budget.
    pub type2_truncated: bool,
}

/// `H(η)` for a block: all type-1 triples and up to `budget` grid sets.
pub fn test_functions(a: &Block, m: u64, budget: usize) -> Result<TestFamily, SpectraError> {
    if m < 2 {
        return Err(SpectraError::BadGrid(format!("m = {m} < 2")));
    }
    let mut functions = Vec::new();
    for j in 0..a.p() {
        for s in 2..=m {
            for r in 0..=s - 2 {
                functions.push(TestFunction::type1(m, j, r, s));
            }
        }
    }
    let mut sets = grid_sets(m);
    let mut type2_truncated = false;
    for count in 0.. {
        match sets.next() {
            None => break,
            Some(_) if count == budget => {
                type2_truncated = true;
                break;
            }
            Some(x) => functions.push(TestFunction::type2(m, x)),
        }
    }
    Ok(TestFamily { functions, type2_truncated })
}

/// Multiset of rationals with big multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EigMultiset {
    counts: BTreeMap<Rat, Int>,
}

impl EigMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: Rat, mult: &Int) {
        if mult.is_positive() {
            *self.counts.entry(v).or_insert_with(Int::zero) += mult;
        }
    }

    pub fn from_values(values: &[Rat]) -> Self {
        let mut e = Self::new();
        for v in values {
            e.insert(v.clone(), &Int::one());
        }
        e
    }

    pub fn len(&self) -> Int {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, v: &Rat) -> Int {
        self.counts.get(v).cloned().unwrap_or_else(Int::zero)
    }

    /// `(value, multiplicity)` in ascending order.
    pub fn runs(&self) -> impl Iterator<Item = (&Rat, &Int)> {
        self.counts.iter()
    }
}

fn ramp(d: &Rat, eta: &Rat) -> Rat {
    let v = (eta - d) / eta;
    if v.is_negative() {
        Rat::zero()
    } else {
        v
    }
}

pub fn eig(h: &TestFunction, s: &Spectrum) -> Result<EigMultiset, SpectraError> {
    h.validate(&s.block)?;
    let a = &s.block;
    let eta = eta_of(h.m);
    let n = a.n().cloned().unwrap_or_else(Int::zero);
    let mut out = EigMultiset::new();
    let base_size: Int = s.base.iter().zip(a.k()).map(|(t, k)| t * k).sum();
    match &h.kind {
        TestKind::Type2(set) => {
            out.insert(Rat::zero(), &base_size);
            for y in &s.interior {
                out.insert(ramp(&set.distance(y, h.m), &eta), &Int::one());
                out.insert(Rat::zero(), &(&n - Int::one()));
            }
        }
        TestKind::Type1 { j, r, s: upper } => {
            let j = *j;
            out.insert(Rat::one(), &s.base[j]);
            out.insert(Rat::zero(), &(&base_size - &s.base[j]));
            let (alpha, beta) = match (a.alpha(), a.beta()) {
                (Some(x), Some(y)) => (x, y),
                _ => return Ok(out),
            };
            let low_end = grid_point(*r, h.m);
            let high_start = grid_point(*upper, h.m);
            let low_support = grid_point(r + 1, h.m);
            let high_support = grid_point(upper - 1, h.m);
            for y in &s.interior {
                // At y = (r+1)η = (s−1)η both ramps vanish, so one region suffices.
                let (value, copies) = if y < &low_support {
                    let d = if y <= &low_end { Rat::zero() } else { y - &low_end };
                    (ramp(&d, &eta), alpha[j].clone())
                } else if y > &high_support {
                    let d = if y >= &high_start { Rat::zero() } else { &high_start - y };
                    (ramp(&d, &eta), beta[j].clone())
                } else {
                    (Rat::zero(), Int::zero())
                };
                out.insert(value, &copies);
                out.insert(Rat::zero(), &(&n - &copies));
            }
        }
    }
    Ok(out)
}

/// Bottleneck distance between equal-size multisets: the sorted pairing is optimal.
pub fn eig_dist(e1: &EigMultiset, e2: &EigMultiset) -> Result<Rat, SpectraError> {
    let (l1, l2) = (e1.len(), e2.len());
    if l1 != l2 {
        return Err(SpectraError::CardinalityMismatch { left: l1, right: l2 });
    }
    let mut a = e1.runs().map(|(v, c)| (v.clone(), c.clone()));
    let mut b = e2.runs().map(|(v, c)| (v.clone(), c.clone()));
    let mut best = Rat::zero();
    let (mut ca, mut cb) = (a.next(), b.next());
    while let (Some((va, na)), Some((vb, nb))) = (&mut ca, &mut cb) {
        let d = (&*va - &*vb).abs();
        if d > best {
            best = d;
        }
        let take = na.clone().min(nb.clone());
        *na -= &take;
        *nb -= &take;
        if na.is_zero() {
            ca = a.next();
        }
        if nb.is_zero() {
            cb = b.next();
        }
    }
    Ok(best)
}

/// The integer `c` with `t − s = c·(α − β)` when the two point evaluations
/// agree in KK; `None` when they differ.
pub fn kk_equal_points(s1: &Spectrum, s2: &Spectrum) -> Result<Option<Int>, SpectraError> {
    if s1.block != s2.block {
        return Err(SpectraError::BlockMismatch);
    }
    if s1.interior.len() != s2.interior.len() {
        return Err(SpectraError::InteriorCountMismatch { left: s1.interior.len(), right: s2.interior.len() });
    }
    let d = vsub(&s1.base, &s2.base);
    let delta = match s1.block.boundary() {
        Some(x) => x,
        None => return Ok(is_zero_vec(&d).then(Int::zero)),
    };
    let Some(j) = delta.iter().position(|x| !x.is_zero()) else {
        return Ok(is_zero_vec(&d).then(Int::zero));
    };
    let c = &d[j] / &delta[j];
    Ok((vscale(&c, &delta) == d).then_some(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
}

/// Move every interior point to an endpoint, keeping the dimension.
pub fn push_to_base(s: &Spectrum, endpoint: Endpoint) -> Result<Spectrum, SpectraError> {
    let (_, alpha, beta) = s.block.require_interval()?;
    let row = if endpoint == Endpoint::Zero { alpha } else { beta };
    let base = vadd(&s.base, &vscale(&Int::from(s.interior.len()), row));
    Ok(Spectrum { block: s.block.clone(), base, interior: vec![] })
}

/// Remove the `count` smallest (`Zero`) or largest (`One`) interior points,
/// adding their endpoint expansion to the base.
fn push_extreme(s: &Spectrum, count: usize, endpoint: Endpoint) -> (Spectrum, Vec<Rat>) {
    let (_, alpha, beta) = s.block.require_interval().expect("interval block");
    let len = s.interior.len();
    let (moved, kept) = match endpoint {
        Endpoint::Zero => (s.interior[..count].to_vec(), s.interior[count..].to_vec()),
        Endpoint::One => (s.interior[len - count..].to_vec(), s.interior[..len - count].to_vec()),
    };
    let row = if endpoint == Endpoint::Zero { alpha } else { beta };
    let base = vadd(&s.base, &vscale(&Int::from(count), row));
    (Spectrum { block: s.block.clone(), base, interior: kept }, moved)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub c: Int,
    pub left: Spectrum,
    pub right: Spectrum,
    /// Sorted index-wise pairing of the remaining interiors.
    pub pairing: Vec<(Rat, Rat)>,
    pub maxdist: Rat,
    /// Largest distance a moved point travelled to its endpoint.
    pub max_move: Rat,
    /// `4·N_A·η`.
    pub bound: Rat,
}

/// Push `|c|` extreme interior points of each side to opposite endpoints so
/// the base parts agree, then pair the interiors in sorted order.
pub fn align_spectra(s1: &Spectrum, s2: &Spectrum, m: u64) -> Result<Alignment, SpectraError> {
    if s1.block != s2.block {
        return Err(SpectraError::BlockMismatch);
    }
    let a = &s1.block;
    a.require_interval()?;
    if s1.interior != s2.interior {
        return Err(SpectraError::InteriorMismatch);
    }
    let c = kk_equal_points(s1, s2)?.ok_or(SpectraError::NotKkEqual)?;
    let big_n = a.n_constant()?;
    let eta = eta_of(m);
    let bound = rat_int(&(Int::from(4) * &big_n)) * &eta;
    let span = (Int::from(2) * &big_n).to_u64().filter(|w| *w <= m).ok_or_else(|| {
        SpectraError::BadGrid(format!("m = {m} is below 2·N_A = {}", Int::from(2) * &big_n))
    })?;
    if c.is_zero() {
        let pairing: Vec<(Rat, Rat)> = s1.interior.iter().map(|y| (y.clone(), y.clone())).collect();
        return Ok(Alignment {
            c,
            left: s1.clone(),
            right: s2.clone(),
            pairing,
            maxdist: Rat::zero(),
            max_move: Rat::zero(),
            bound,
        });
    }
    let needed = c.abs();
    for r in 0..=m - span {
        let (lo, hi) = (grid_point(r, m), grid_point(r + span, m));
        let found = s1.interior.iter().filter(|y| **y >= lo && **y <= hi).count();
        if Int::from(found) < needed {
            return Err(SpectraError::DensityViolation { lo: fmt_rat(&lo), hi: fmt_rat(&hi), found, needed });
        }
    }
    let count = needed.to_usize().expect("bounded by the interior size");
    let (e1, e2) = if c.is_positive() { (Endpoint::One, Endpoint::Zero) } else { (Endpoint::Zero, Endpoint::One) };
    let (left, moved1) = push_extreme(s1, count, e1);
    let (right, moved2) = push_extreme(s2, count, e2);
    let dist_to = |y: &Rat, e: Endpoint| if e == Endpoint::Zero { y.clone() } else { Rat::one() - y };
    let max_move = moved1
        .iter()
        .map(|y| dist_to(y, e1))
        .chain(moved2.iter().map(|y| dist_to(y, e2)))
        .max()
        .unwrap_or_else(Rat::zero);
    let pairing: Vec<(Rat, Rat)> = left.interior.iter().cloned().zip(right.interior.iter().cloned()).collect();
    let maxdist = pairing.iter().map(|(x, y)| (x - y).abs()).max().unwrap_or_else(Rat::zero);
    Ok(Alignment { c, left, right, pairing, maxdist, max_move, bound })
}

/// Pairing of interior points within `2η` covering every point in `[η, 1−η]`
/// on both sides; the optional points near the ends are matched when possible.
pub fn pair_cores(s1: &Spectrum, s2: &Spectrum, eta: &Rat) -> Result<Option<Vec<(Rat, Rat)>>, SpectraError> {
    if s1.block != s2.block {
        return Err(SpectraError::BlockMismatch);
    }
    let xs = &s1.interior;
    let ys = &s2.interior;
    let lo = eta.clone();
    let hi = Rat::one() - eta;
    let core = |v: &Rat| v >= &lo && v <= &hi;
    let reach = eta * Rat::from_integer(Int::from(2));
    let adj: Vec<Vec<usize>> =
        xs.iter().map(|x| (0..ys.len()).filter(|&j| (x - &ys[j]).abs() <= reach).collect()).collect();
    let mut matcher = Matcher::new(adj, ys.len());
    for i in (0..xs.len()).filter(|&i| core(&xs[i])) {
        if !matcher.augment_from_left(i) {
            return Ok(None);
        }
    }
    for j in (0..ys.len()).filter(|&j| core(&ys[j])) {
        if matcher.right_match[j].is_none() && !matcher.cover_right(j, |k| core(&ys[k])) {
            return Ok(None);
        }
    }
    for i in 0..xs.len() {
        if matcher.left_match[i].is_none() {
            matcher.augment_from_left(i);
        }
    }
    let mut pairs: Vec<(Rat, Rat)> = (0..xs.len())
        .filter_map(|i| matcher.left_match[i].map(|j| (xs[i].clone(), ys[j].clone())))
        .collect();
    pairs.sort();
    Ok(Some(pairs))
}

/// Bipartite matching by augmenting paths. Augmentation never unmatches a vertex.
struct Matcher {
    adj: Vec<Vec<usize>>,
    left_match: Vec<Option<usize>>,
    right_match: Vec<Option<usize>>,
}

impl Matcher {
    fn new(adj: Vec<Vec<usize>>, right: usize) -> Self {
        let left = adj.len();
        Matcher { adj, left_match: vec![None; left], right_match: vec![None; right] }
    }

    fn augment_from_left(&mut self, i: usize) -> bool {
        let mut seen = vec![false; self.right_match.len()];
        self.try_left(i, &mut seen)
    }

    fn try_left(&mut self, i: usize, seen: &mut [bool]) -> bool {
        for idx in 0..self.adj[i].len() {
            let j = self.adj[i][idx];
            if seen[j] {
                continue;
            }
            seen[j] = true;
            let free = match self.right_match[j] {
                None => true,
                Some(i2) => self.try_left(i2, seen),
            };
            if free {
                self.left_match[i] = Some(j);
                self.right_match[j] = Some(i);
                return true;
            }
        }
        false
    }

    /// Match the free right vertex `j` along an alternating path that ends at a
    /// free left vertex or releases a right vertex outside `mandatory`.
    fn cover_right(&mut self, j: usize, mandatory: impl Fn(usize) -> bool) -> bool {
        let left_n = self.left_match.len();
        // BFS over right vertices; parent[i] = right vertex from which left i was reached.
        let mut parent: Vec<Option<usize>> = vec![None; left_n];
        let mut queue = std::collections::VecDeque::from([j]);
        let mut seen_right = vec![false; self.right_match.len()];
        seen_right[j] = true;
        let mut end: Option<(usize, Option<usize>)> = None;
        'bfs: while let Some(y) = queue.pop_front() {
            #[allow(clippy::needless_range_loop)]
            for i in 0..left_n {
                if parent[i].is_some() || !self.adj[i].contains(&y) || self.left_match[i] == Some(y) {
                    continue;
                }
                parent[i] = Some(y);
                match self.left_match[i] {
                    None => {
                        end = Some((i, None));
                        break 'bfs;
                    }
                    Some(y2) if !mandatory(y2) => {
                        end = Some((i, Some(y2)));
                        break 'bfs;
                    }
                    Some(y2) => {
                        if !seen_right[y2] {
                            seen_right[y2] = true;
                            queue.push_back(y2);
                        }
                    }
                }
            }
        }
        let Some((mut i, released)) = end else { return false };
        if let Some(y2) = released {
            self.right_match[y2] = None;
        }
        loop {
            let y = parent[i].expect("reached vertex has a parent");
            let prev = self.right_match[y];
            self.left_match[i] = Some(y);
            self.right_match[y] = Some(i);
            match prev {
                Some(i2) if y != j => i = i2,
                _ => break,
            }
        }
        true
    }
}

/// Count of eigenvalue 1 for the type-1 function `(j0, r, r+2)` next to the
/// closed-form count `t_j + α_j·#(0, rη] + β_j·#[(r+2)η, 1)`.
pub fn count_formula_check(s: &Spectrum, j0: usize, r: u64, m: u64) -> Result<(Int, Int), SpectraError> {
    let h = TestFunction::type1(m, j0, r, r + 2);
    let lhs = eig(&h, s)?.count(&Rat::one());
    let (_, alpha, beta) = s.block.require_interval()?;
    let low = grid_point(r, m);
    let high = grid_point(r + 2, m);
    let below = s.interior.iter().filter(|y| **y <= low).count();
    let above = s.interior.iter().filter(|y| **y >= high).count();
    let rhs = &s.base[j0] + &alpha[j0] * Int::from(below) + &beta[j0] * Int::from(above);
    Ok((lhs, rhs))
}
