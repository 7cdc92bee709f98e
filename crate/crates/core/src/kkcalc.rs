//! Diagram calculus for KK(A, B): commuting pairs `(λ₀, λ₁)`, the subgroup
//! `M(A, B)` of diagrams factoring through `K₁(SF₂)`, positivity, and the
//! finite generator set used to test order preservation.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::blocks::{Block, BlockError};
use crate::ktheory::k0_contains;
use crate::num::{bezout, ceil_div, dot, floor_div, fmt_vec, gcd_all, is_nonneg, is_zero_vec, Int, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KkError {
    #[error("lambda0 must be {rows}x{cols}, got {got_rows}x{got_cols}")]
    ShapeMismatch { rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("square does not commute in column {column}: lhs {lhs}, rhs {rhs}")]
    NotCommutative { column: usize, lhs: Int, rhs: Int },
    #[error("lambda1 must be 0 when either block is finite dimensional")]
    Lambda1OnFiniteDim,
    #[error("source/target mismatch")]
    SourceTargetMismatch,
    #[error("vector {0} is not in K0 of the source")]
    NotInK0(String),
    #[error("vector has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Block(#[from] BlockError),
}

/// An element of `C(A, B)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    source: Block,
    target: Block,
    lambda0: IntMatrix,
    lambda1: Int,
}

/// Certificate that a diagram equals `λ_μ`: `λ₀ = μ ⊗ (α−β)`, `λ₁ = (α'−β')·μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MWitness {
    pub mu: Vec<Int>,
}

impl Diagram {
    pub fn new(source: Block, target: Block, lambda0: IntMatrix, lambda1: Int) -> Result<Diagram, KkError> {
        if lambda0.rows() != target.p() || lambda0.cols() != source.p() {
            return Err(KkError::ShapeMismatch {
                rows: target.p(),
                cols: source.p(),
                got_rows: lambda0.rows(),
                got_cols: lambda0.cols(),
            });
        }
        if (!source.is_interval() || !target.is_interval()) && !lambda1.is_zero() {
            return Err(KkError::Lambda1OnFiniteDim);
        }
        if let Some(dt) = target.boundary() {
            let lhs = lambda0.left_mul_vec(&dt);
            let rhs: Vec<Int> = match source.boundary() {
                Some(ds) => ds.iter().map(|x| x * &lambda1).collect(),
                None => vec![Int::zero(); source.p()],
            };
            if let Some(column) = (0..lhs.len()).find(|&j| lhs[j] != rhs[j]) {
                return Err(KkError::NotCommutative { column, lhs: lhs[column].clone(), rhs: rhs[column].clone() });
            }
        }
        Ok(Diagram { source, target, lambda0, lambda1 })
    }

    pub fn zero(source: &Block, target: &Block) -> Diagram {
        Diagram {
            lambda0: IntMatrix::zeros(target.p(), source.p()),
            lambda1: Int::zero(),
            source: source.clone(),
            target: target.clone(),
        }
    }

    pub fn identity(a: &Block) -> Diagram {
        let lambda1 = if a.is_interval() { Int::one() } else { Int::zero() };
        Diagram { lambda0: IntMatrix::identity(a.p()), lambda1, source: a.clone(), target: a.clone() }
    }

    /// The diagram `λ_μ ∈ M(A, B)`.
    pub fn from_mu(source: &Block, target: &Block, mu: &[Int]) -> Result<Diagram, KkError> {
        if mu.len() != target.p() {
            return Err(KkError::DimensionMismatch { expected: target.p(), got: mu.len() });
        }
        let delta = match source.boundary() {
            Some(d) => d,
            None => return Ok(Diagram::zero(source, target)),
        };
        let lambda1 = target.boundary().map_or_else(Int::zero, |dt| dot(&dt, mu));
        Ok(Diagram {
            lambda0: IntMatrix::outer(mu, &delta),
            lambda1,
            source: source.clone(),
            target: target.clone(),
        })
    }

    pub fn source(&self) -> &Block {
        &self.source
    }

    pub fn target(&self) -> &Block {
        &self.target
    }

    pub fn lambda0(&self) -> &IntMatrix {
        &self.lambda0
    }

    pub fn lambda1(&self) -> &Int {
        &self.lambda1
    }

    fn same_ends(&self, other: &Diagram) -> Result<(), KkError> {
        if self.source != other.source || self.target != other.target {
            return Err(KkError::SourceTargetMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Diagram) -> Result<Diagram, KkError> {
        self.same_ends(other)?;
        Ok(Diagram {
            lambda0: self.lambda0.add(&other.lambda0),
            lambda1: &self.lambda1 + &other.lambda1,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> Diagram {
        Diagram { lambda0: self.lambda0.neg(), lambda1: -&self.lambda1, ..self.clone() }
    }

    pub fn sub(&self, other: &Diagram) -> Result<Diagram, KkError> {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.lambda0.is_zero() && self.lambda1.is_zero()
    }
}

/// Product `d × e`: first `d: A → B`, then `e: B → C`.
pub fn compose(d: &Diagram, e: &Diagram) -> Result<Diagram, KkError> {
    if d.target != e.source {
        return Err(KkError::SourceTargetMismatch);
    }
    Ok(Diagram {
        source: d.source.clone(),
        target: e.target.clone(),
        lambda0: e.lambda0.mul(&d.lambda0),
        lambda1: &e.lambda1 * &d.lambda1,
    })
}

pub fn in_m(d: &Diagram) -> Option<MWitness> {
    let pt = d.target.p();
    let delta = match d.source.boundary() {
        Some(x) => x,
        None => return d.is_zero().then(|| MWitness { mu: vec![Int::zero(); pt] }),
    };
    let target_delta = d.target.boundary();
    let mu = if is_zero_vec(&delta) {
        if !d.lambda0.is_zero() {
            return None;
        }
        match &target_delta {
            None => vec![Int::zero(); pt],
            Some(dt) => {
                let (g, coeffs) = bezout(dt);
                if g.is_zero() {
                    if !d.lambda1.is_zero() {
                        return None;
                    }
                    vec![Int::zero(); pt]
                } else {
                    let (q, r) = d.lambda1.div_rem(&g);
                    if !r.is_zero() {
                        return None;
                    }
                    // Prefer a single-entry witness when some entry already equals ±gcd.
                    match dt.iter().position(|x| x.abs() == g) {
                        Some(i) => {
                            let mut mu = vec![Int::zero(); pt];
                            mu[i] = &d.lambda1 / &dt[i];
                            mu
                        }
                        None => coeffs.iter().map(|c| c * &q).collect(),
                    }
                }
            }
        }
    } else {
        let j0 = delta.iter().position(|x| !x.is_zero()).expect("nonzero boundary");
        let mut mu = Vec::with_capacity(pt);
        for i in 0..pt {
            let row = d.lambda0.row(i);
            let (q, r) = row[j0].div_rem(&delta[j0]);
            if !r.is_zero() || row.iter().zip(&delta).any(|(x, y)| x != &(&q * y)) {
                return None;
            }
            mu.push(q);
        }
        mu
    };
    if let Some(dt) = &target_delta {
        if dot(dt, &mu) != d.lambda1 {
            return None;
        }
    }
    Some(MWitness { mu })
}

pub fn kk_equal(d1: &Diagram, d2: &Diagram) -> Result<bool, KkError> {
    Ok(in_m(&d1.sub(d2)?).is_some())
}

/// Definition of positivity: the zero element, or `λ₀ ≥ 0` entrywise and `λ₀ ≠ 0`.
pub fn is_positive(d: &Diagram) -> bool {
    d.is_zero() || (d.lambda0.is_nonneg() && !d.lambda0.is_zero())
}

/// Integer interval `[lo, hi]`; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuRange {
    pub lo: Option<Int>,
    pub hi: Option<Int>,
}

impl MuRange {
    fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(l), Some(h)) if l > h)
    }

    fn nearest_to_zero(&self) -> Int {
        let z = Int::zero();
        match (&self.lo, &self.hi) {
            (Some(l), _) if l > &z => l.clone(),
            (_, Some(h)) if h < &z => h.clone(),
            _ => z,
        }
    }
}

/// Per-row ranges of `μ_i` keeping `row_i + μ_i(α−β) ≥ 0`; `None` if some
/// row admits no value. Requires an interval source.
fn mu_ranges(lambda0: &IntMatrix, delta: &[Int]) -> Option<Vec<MuRange>> {
    let mut out = Vec::with_capacity(lambda0.rows());
    for i in 0..lambda0.rows() {
        let mut r = MuRange { lo: None, hi: None };
        for (x, dj) in lambda0.row(i).iter().zip(delta) {
            if dj.is_positive() {
                let b = ceil_div(&-x, dj);
                if r.lo.as_ref().is_none_or(|l| &b > l) {
                    r.lo = Some(b);
                }
            } else if dj.is_negative() {
                let b = floor_div(x, &-dj);
                if r.hi.as_ref().is_none_or(|h| &b < h) {
                    r.hi = Some(b);
                }
            } else if x.is_negative() {
                return None;
            }
        }
        if r.is_empty() {
            return None;
        }
        out.push(r);
    }
    Some(out)
}

/// Finds `μ` with `d + λ_μ` positive, preferring the zero representative
/// when `d ∈ M`.
pub fn positive_mod_m(d: &Diagram) -> Option<(MWitness, Diagram)> {
    if let Some(w) = in_m(d) {
        let mu: Vec<Int> = w.mu.iter().map(|x| -x).collect();
        return Some((MWitness { mu }, Diagram::zero(&d.source, &d.target)));
    }
    let delta = match d.source.boundary() {
        Some(x) => x,
        None => {
            return is_positive(d).then(|| (MWitness { mu: vec![Int::zero(); d.target.p()] }, d.clone()));
        }
    };
    let ranges = mu_ranges(&d.lambda0, &delta)?;
    let mu: Vec<Int> = ranges.iter().map(MuRange::nearest_to_zero).collect();
    let rep = d.add(&Diagram::from_mu(&d.source, &d.target, &mu).expect("mu length")).expect("same ends");
    // A vanishing λ₀ here would force d ∈ M, which was excluded above; with
    // α = β every μ leaves λ₀ unchanged.
    (!rep.lambda0.is_zero()).then_some((MWitness { mu }, rep))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PositiveReps {
    Finite(Vec<(MWitness, Diagram)>),
    /// `α − β` lacks entries of one sign, so the admissible `μ` form half-lines.
    Unbounded,
    /// The finite box holds more points than the enumeration budget.
    OverBudget { box_size: Int },
}

/// All positive representatives of the class of `d`, ordered by `μ` lexicographically.
pub fn enumerate_positive_reps(d: &Diagram, budget: u64) -> PositiveReps {
    let delta = match d.source.boundary() {
        Some(x) => x,
        None => {
            let reps = if is_positive(d) { vec![(MWitness { mu: vec![Int::zero(); d.target.p()] }, d.clone())] } else { vec![] };
            return PositiveReps::Finite(reps);
        }
    };
    let ranges = match mu_ranges(&d.lambda0, &delta) {
        Some(r) => r,
        None => return PositiveReps::Finite(vec![]),
    };
    let mixed = delta.iter().any(Signed::is_positive) && delta.iter().any(Signed::is_negative);
    if !mixed {
        return PositiveReps::Unbounded;
    }
    let bounds: Vec<(Int, Int)> = ranges
        .into_iter()
        .map(|r| (r.lo.expect("mixed signs bound below"), r.hi.expect("mixed signs bound above")))
        .collect();
    let box_size: Int = bounds.iter().map(|(l, h)| h - l + Int::one()).product();
    if box_size > Int::from(budget) {
        return PositiveReps::OverBudget { box_size };
    }
    let mut out = Vec::new();
    let mut mu: Vec<Int> = bounds.iter().map(|(l, _)| l.clone()).collect();
    loop {
        let rep = d.add(&Diagram::from_mu(&d.source, &d.target, &mu).expect("mu length")).expect("same ends");
        if is_positive(&rep) {
            out.push((MWitness { mu: mu.clone() }, rep));
        }
        // Odometer with the last coordinate fastest, giving lexicographic order.
        let mut i = mu.len();
        loop {
            if i == 0 {
                return PositiveReps::Finite(out);
            }
            i -= 1;
            if mu[i] < bounds[i].1 {
                mu[i] += 1;
                for (m, b) in mu.iter_mut().zip(&bounds).skip(i + 1) {
                    *m = b.0.clone();
                }
                break;
            }
        }
    }
}

/// A KK class held by a representative diagram.
#[derive(Debug, Clone)]
pub struct KkClass {
    pub representative: Diagram,
}

impl KkClass {
    /// Uses the positive representative with least `μ` when the coset has
    /// finitely many, otherwise keeps the given diagram.
    pub fn normalized(d: Diagram, budget: u64) -> KkClass {
        match enumerate_positive_reps(&d, budget) {
            PositiveReps::Finite(reps) if !reps.is_empty() => KkClass { representative: reps[0].1.clone() },
            _ => KkClass { representative: d },
        }
    }

    pub fn equals(&self, other: &KkClass) -> Result<bool, KkError> {
        kk_equal(&self.representative, &other.representative)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorLabel {
    /// Source `Ĩ_w` with `w = a_x · b_y`; `x`, `y` are original summand indices.
    DimensionDrop { x: usize, y: usize, w: Int },
    /// Source `C(S¹)` hitting summand `index` where `α = β`.
    Circle { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlGenerator {
    pub label: GeneratorLabel,
    pub source: Block,
    pub diagram: Diagram,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlGenerators {
    /// Original indices in the order (positive entries, negative entries, zeros).
    pub permutation: Vec<usize>,
    pub generators: Vec<DlGenerator>,
}

pub fn dl_generators(a: &Block) -> Result<DlGenerators, KkError> {
    a.require_interval()?;
    let delta = a.boundary().expect("interval");
    let pos: Vec<usize> = (0..delta.len()).filter(|&j| delta[j].is_positive()).collect();
    let neg: Vec<usize> = (0..delta.len()).filter(|&j| delta[j].is_negative()).collect();
    let zero: Vec<usize> = (0..delta.len()).filter(|&j| delta[j].is_zero()).collect();
    let p = a.p();
    let mut generators = Vec::new();
    for &x in &pos {
        for &y in &neg {
            let ax = delta[x].clone();
            let by = -&delta[y];
            let w = &ax * &by;
            let source = Block::dimension_drop_any(&w);
            let mut l0 = IntMatrix::zeros(p, 2);
            l0.set(x, 0, by);
            l0.set(y, 1, ax);
            let diagram = Diagram::new(source.clone(), a.clone(), l0, Int::one())?;
            generators.push(DlGenerator { label: GeneratorLabel::DimensionDrop { x, y, w }, source, diagram });
        }
    }
    for &i in &zero {
        let source = Block::circle();
        let mut l0 = IntMatrix::zeros(p, 1);
        l0.set(i, 0, Int::one());
        let diagram = Diagram::new(source.clone(), a.clone(), l0, Int::one())?;
        generators.push(DlGenerator { label: GeneratorLabel::Circle { index: i }, source, diagram });
    }
    let permutation = pos.into_iter().chain(neg).chain(zero).collect();
    Ok(DlGenerators { permutation, generators })
}

/// Generators whose image under `g` is not positive modulo `M`. For a
/// finite-dimensional source the cone is `ℕ^p`, so the columns of `λ₀` are tested.
pub fn dl_order_failures(g: &Diagram) -> Result<Vec<DlGenerator>, KkError> {
    if !g.source.is_interval() {
        let mut out = Vec::new();
        for j in 0..g.source.p() {
            if !is_nonneg(&g.lambda0.col(j)) {
                let mut e = IntMatrix::zeros(g.source.p(), 1);
                e.set(j, 0, Int::one());
                let one = Block::finite_dim(vec![Int::one()])?;
                let diagram = Diagram::new(one.clone(), g.source.clone(), e, Int::zero())?;
                out.push(DlGenerator { label: GeneratorLabel::Circle { index: j }, source: one, diagram });
            }
        }
        return Ok(out);
    }
    let gens = dl_generators(&g.source)?;
    let mut out = Vec::new();
    for f in gens.generators {
        if positive_mod_m(&compose(&f.diagram, g)?).is_none() {
            out.push(f);
        }
    }
    Ok(out)
}

pub fn preserves_dl_order(g: &Diagram) -> Result<bool, KkError> {
    Ok(dl_order_failures(g)?.is_empty())
}

pub fn apply_to_k0(d: &Diagram, v: &[Int]) -> Result<Vec<Int>, KkError> {
    let inside = k0_contains(&d.source, v)
        .map_err(|_| KkError::DimensionMismatch { expected: d.source.p(), got: v.len() })?;
    if !inside {
        return Err(KkError::NotInK0(fmt_vec(v)));
    }
    Ok(d.lambda0.mul_vec(v))
}

pub fn kills_unit(d: &Diagram) -> bool {
    is_zero_vec(&d.lambda0.mul_vec(d.source.k()))
}

/// `gcd(α − β)` of the target, used to explain failures of `λ₁ ∈ Im`.
pub fn target_index_gcd(d: &Diagram) -> Option<Int> {
    d.target.boundary().map(|dt| gcd_all(&dt))
}

/// A diagram between direct sums, one component per pair of summands.
#[derive(Debug, Clone)]
pub struct SumDiagram {
    /// `parts[i][j]` maps source summand `j` to target summand `i`.
    pub parts: Vec<Vec<Diagram>>,
}

impl SumDiagram {
    pub fn is_positive(&self) -> bool {
        self.parts.iter().flatten().all(is_positive)
    }

    pub fn kk_equal(&self, other: &SumDiagram) -> Result<bool, KkError> {
        if self.parts.len() != other.parts.len() {
            return Err(KkError::SourceTargetMismatch);
        }
        for (r1, r2) in self.parts.iter().zip(&other.parts) {
            if r1.len() != r2.len() {
                return Err(KkError::SourceTargetMismatch);
            }
            for (a, b) in r1.iter().zip(r2) {
                if !kk_equal(a, b)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
