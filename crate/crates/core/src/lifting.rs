//! Sufficient conditions for realizing a diagram by a homomorphism, and the
//! composed-existence pipeline for maps with finite-dimensional pieces.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::blocks::BlockError;
use crate::kkcalc::{
    compose, in_m, is_positive, kills_unit, kk_equal, positive_mod_m, preserves_dl_order, Diagram, KkError,
};
use crate::ktheory::k0_contains;
use crate::num::{fmt_vec, is_nonneg, is_zero_vec, vadd, vscale, vsub, Int, IntMatrix};

/// Largest number of l-indexed rows listed in a plan. Rows are affine in l,
/// so beyond this only the two extreme rows are listed and checked.
pub const MAX_LISTED_ROWS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("diagram is not positive")]
    NotPositive,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(Hypothesis),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error(transparent)]
    Kk(#[from] KkError),
    #[error(transparent)]
    Block(#[from] BlockError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    /// `[ψ_(0,1)(1)] ≥ [ψ_r(1)]` fails at the given index.
    UnitOrder { index: usize },
    /// `g` does not preserve the Dadarlat-Loring order.
    OrderPreservation,
    /// The decomposition data disagree with each other.
    Inconsistent(String),
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::UnitOrder { index } => write!(f, "[psi_(0,1)(1)] >= [psi_r(1)] fails at index {index}"),
            Hypothesis::OrderPreservation => write!(f, "g does not preserve the Dadarlat-Loring order"),
            Hypothesis::Inconsistent(s) => write!(f, "inconsistent decomposition: {s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// `λ₁ > 0` with `α'λ₀ − α − l(α−β) ≥ 0`.
    PositiveIndex,
    /// `λ₁ = 0`.
    ZeroIndex,
    /// `λ₁ < 0` with `β'λ₀ − β − l(β−α) ≥ 0`.
    NegativeIndex,
    /// The two entrywise inequalities bounding `α'λ₀` and `β'λ₀`.
    EntrywiseBounds,
    /// Circle source: liftable iff positive modulo M.
    CircleSource,
    /// Source in `𝒞_O`: KK agrees with the diagram order.
    SplitSource,
    /// The composite class vanishes.
    ZeroClass,
    /// Realized by a homomorphism with finite-dimensional image.
    FiniteDimImage,
    None,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::PositiveIndex => "index_positive_rows",
            Criterion::ZeroIndex => "index_zero",
            Criterion::NegativeIndex => "index_negative_rows",
            Criterion::EntrywiseBounds => "entrywise_bounds",
            Criterion::CircleSource => "circle_source",
            Criterion::SplitSource => "split_source",
            Criterion::ZeroClass => "zero_class",
            Criterion::FiniteDimImage => "finite_dim_image",
            Criterion::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftStatus {
    Liftable,
    NotLiftable,
    Unknown,
}

impl LiftStatus {
    pub fn name(self) -> &'static str {
        match self {
            LiftStatus::Liftable => "liftable",
            LiftStatus::NotLiftable => "not_liftable",
            LiftStatus::Unknown => "unknown",
        }
    }
}

/// A named integer row that a plan requires to be entrywise nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRow {
    pub name: String,
    pub values: Vec<Int>,
}

impl WitnessRow {
    pub fn holds(&self) -> bool {
        is_nonneg(&self.values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftVerdict {
    pub status: LiftStatus,
    pub criterion: Criterion,
    pub rows: Vec<WitnessRow>,
    /// The diagram the plan realizes.
    pub diagram: Diagram,
    /// `λ₀·k ≤ k'`: the realization can be cut down to a unital map.
    pub unital: bool,
    pub note: String,
}

impl LiftVerdict {
    fn new(status: LiftStatus, criterion: Criterion, rows: Vec<WitnessRow>, diagram: &Diagram, note: impl Into<String>) -> Self {
        let unital = unital_flag(diagram);
        LiftVerdict { status, criterion, rows, diagram: diagram.clone(), unital, note: note.into() }
    }

    /// Re-checks every listed row; vacuous unless the status is `Liftable`.
    pub fn plan_verifies(&self) -> bool {
        self.status != LiftStatus::Liftable || self.rows.iter().all(WitnessRow::holds)
    }

    pub fn first_failure(&self) -> Option<&WitnessRow> {
        self.rows.iter().find(|r| !r.holds())
    }
}

fn unital_flag(d: &Diagram) -> bool {
    let image = d.lambda0().mul_vec(d.source().k());
    image.iter().zip(d.target().k()).all(|(a, b)| a <= b)
}

fn both_intervals(d: &Diagram) -> Result<(), LiftError> {
    d.source().require_interval()?;
    d.target().require_interval()?;
    Ok(())
}

/// Rows `base − l·step` for `l = 0..count`, listing at most [`MAX_LISTED_ROWS`].
fn affine_rows(label: &str, base: &[Int], step: &[Int], count: &Int) -> Vec<WitnessRow> {
    let row = |l: &Int| WitnessRow { name: format!("{label} l={l}"), values: vsub(base, &vscale(l, step)) };
    match count.to_usize() {
        Some(c) if c <= MAX_LISTED_ROWS => (0..c).map(|l| row(&Int::from(l))).collect(),
        _ => vec![row(&Int::zero()), row(&(count - Int::one()))],
    }
}

fn index_rows(d: &Diagram) -> (Criterion, Vec<WitnessRow>) {
    let src = d.source();
    let tgt = d.target();
    let (alpha, beta) = (src.alpha().unwrap(), src.beta().unwrap());
    let l1 = d.lambda1();
    if l1.is_positive() {
        let a_img = d.lambda0().left_mul_vec(tgt.alpha().unwrap());
        let base = vsub(&a_img, alpha);
        (Criterion::PositiveIndex, affine_rows("a'L0-a-l(a-b)", &base, &vsub(alpha, beta), l1))
    } else if l1.is_negative() {
        let b_img = d.lambda0().left_mul_vec(tgt.beta().unwrap());
        let base = vsub(&b_img, beta);
        (Criterion::NegativeIndex, affine_rows("b'L0-b-l(b-a)", &base, &vsub(beta, alpha), &-l1))
    } else {
        (Criterion::ZeroIndex, vec![])
    }
}

/// The three index conditions: all listed rows nonnegative gives a lift.
pub fn d0_conditions(d: &Diagram) -> Result<LiftVerdict, LiftError> {
    both_intervals(d)?;
    if !is_positive(d) {
        return Err(LiftError::NotPositive);
    }
    let (criterion, rows) = index_rows(d);
    let ok = rows.iter().all(WitnessRow::holds);
    let status = if ok { LiftStatus::Liftable } else { LiftStatus::Unknown };
    let note = if ok { "" } else { "index rows fail; the condition is only sufficient" };
    Ok(LiftVerdict::new(status, criterion, rows, d, note))
}

/// Entrywise bounds on `α'λ₀` and `β'λ₀` in terms of `α·λ₁`, `β·λ₁`.
pub fn suff_condition(d: &Diagram) -> Result<LiftVerdict, LiftError> {
    both_intervals(d)?;
    if !is_positive(d) {
        return Err(LiftError::NotPositive);
    }
    let src = d.source();
    let tgt = d.target();
    let l1 = d.lambda1();
    let a_img = d.lambda0().left_mul_vec(tgt.alpha().unwrap());
    let b_img = d.lambda0().left_mul_vec(tgt.beta().unwrap());
    let mut rhs_a = Vec::with_capacity(src.p());
    let mut rhs_b = Vec::with_capacity(src.p());
    for (a, b) in src.alpha().unwrap().iter().zip(src.beta().unwrap()) {
        let al = a * l1;
        let bl = b * l1;
        let mut ra = Int::zero();
        let mut rb = Int::zero();
        if !al.is_negative() {
            ra += &al;
        }
        if !bl.is_positive() {
            ra -= &bl;
        }
        if !al.is_positive() {
            rb -= &al;
        }
        if !bl.is_negative() {
            rb += &bl;
        }
        rhs_a.push(ra);
        rhs_b.push(rb);
    }
    let rows = vec![
        WitnessRow { name: "a'L0 - rhs_alpha".into(), values: vsub(&a_img, &rhs_a) },
        WitnessRow { name: "b'L0 - rhs_beta".into(), values: vsub(&b_img, &rhs_b) },
    ];
    let ok = rows.iter().all(WitnessRow::holds);
    let status = if ok { LiftStatus::Liftable } else { LiftStatus::Unknown };
    Ok(LiftVerdict::new(status, Criterion::EntrywiseBounds, rows, d, if ok { "" } else { "entrywise bound fails" }))
}

/// Combined decision: exact answers for circle and split sources, otherwise
/// the sufficient criteria applied to the positive representative.
pub fn decide_lift(d: &Diagram) -> Result<LiftVerdict, LiftError> {
    both_intervals(d)?;
    let src = d.source();
    let exact = if src.boundary().is_some_and(|x| is_zero_vec(&x)) && src.p() == 1 {
        Some(Criterion::CircleSource)
    } else if src.classify().is_in_c_o {
        Some(Criterion::SplitSource)
    } else {
        None
    };
    let Some((w, rep)) = positive_mod_m(d) else {
        return Ok(match exact {
            Some(c) => LiftVerdict::new(LiftStatus::NotLiftable, c, vec![], d, "class has no positive representative"),
            None => LiftVerdict::new(LiftStatus::Unknown, Criterion::None, vec![], d, "class has no positive representative"),
        });
    };
    if let Some(c) = exact {
        let rows = vec![WitnessRow { name: "positive representative lambda0".into(), values: rep.lambda0().entries().to_vec() }];
        return Ok(LiftVerdict::new(LiftStatus::Liftable, c, rows, &rep, format!("mu = {}", fmt_vec(&w.mu))));
    }
    let v = d0_conditions(&rep)?;
    if v.status == LiftStatus::Liftable {
        return Ok(v);
    }
    suff_condition(&rep)
}

/// Zero-KK rigidity: an order-preserving class that kills the unit is zero.
pub fn zero_kk_check(g: &Diagram) -> Result<bool, LiftError> {
    if !preserves_dl_order(g)? {
        return Err(LiftError::PreconditionUnmet("diagram does not preserve the Dadarlat-Loring order".into()));
    }
    if !kills_unit(g) {
        return Err(LiftError::PreconditionUnmet("diagram does not kill the unit".into()));
    }
    Ok(kk_equal(g, &Diagram::zero(g.source(), g.target()))?)
}

/// K₀ data of `ψ = ψ_F1 ⊕ ψ_(0,1) ⊕ ψ_r : A → B`.
#[derive(Debug, Clone)]
pub struct FinDimDecomposition {
    pub psi_f1_unit: Vec<Int>,
    /// Diagram of `ψ_F1`, when available; its λ₁ is 0.
    pub psi_f1_diagram: Option<Diagram>,
    pub psi_int_unit: Vec<Int>,
    /// Diagram `η` of `ψ_r`.
    pub psi_r_diagram: Diagram,
    /// Vectors `g^i` with `[ψ_(0,1)(1)] = n·Σ g^i`.
    pub psi_int_g_vectors: Vec<Vec<Int>>,
}

fn inconsistent(s: impl Into<String>) -> LiftError {
    LiftError::HypothesisViolation(Hypothesis::Inconsistent(s.into()))
}

pub fn composed_existence(dec: &FinDimDecomposition, g: &Diagram) -> Result<LiftVerdict, LiftError> {
    let eta = &dec.psi_r_diagram;
    let (a, b) = (eta.source(), eta.target());
    if g.source() != b {
        return Err(KkError::SourceTargetMismatch.into());
    }
    let (n_a, alpha, beta) = a.require_interval()?;
    b.require_interval()?;
    g.target().require_interval()?;
    let pb = b.p();
    for (name, v) in [("psi_f1_unit", &dec.psi_f1_unit), ("psi_int_unit", &dec.psi_int_unit)] {
        if v.len() != pb {
            return Err(inconsistent(format!("{name} has {} entries, expected {pb}", v.len())));
        }
    }
    let mut gsum = vec![Int::zero(); pb];
    for (i, gi) in dec.psi_int_g_vectors.iter().enumerate() {
        if gi.len() != pb || !is_nonneg(gi) || !k0_contains(b, gi).unwrap_or(false) {
            return Err(inconsistent(format!("g^{i} = {} is not in K0+(B)", fmt_vec(gi))));
        }
        gsum = vadd(&gsum, gi);
    }
    if vscale(n_a, &gsum) != dec.psi_int_unit {
        return Err(inconsistent("psi_int_unit differs from n * sum g^i"));
    }
    if let Some(f1) = &dec.psi_f1_diagram {
        if f1.source() != a || f1.target() != b || !f1.lambda1().is_zero() || !f1.lambda0().is_nonneg() {
            return Err(inconsistent("psi_F1 diagram must be a nonnegative A -> B diagram with lambda1 = 0"));
        }
        if f1.lambda0().mul_vec(a.k()) != dec.psi_f1_unit {
            return Err(inconsistent("psi_F1 diagram does not carry psi_f1_unit"));
        }
    }
    if !is_positive(eta) {
        return Err(inconsistent("psi_r diagram is not positive"));
    }
    let r_unit = eta.lambda0().mul_vec(a.k());
    if let Some(index) = (0..pb).find(|&i| dec.psi_int_unit[i] < r_unit[i]) {
        return Err(LiftError::HypothesisViolation(Hypothesis::UnitOrder { index }));
    }
    if !preserves_dl_order(g)? {
        return Err(LiftError::HypothesisViolation(Hypothesis::OrderPreservation));
    }
    let (_, lam) = positive_mod_m(g).ok_or_else(|| inconsistent("order-preserving class without a positive representative"))?;

    let m = lam.lambda1() * eta.lambda1();
    let pushed = if m.is_negative() { beta } else { alpha };
    let zeta = Diagram::new(a.clone(), b.clone(), IntMatrix::outer(&gsum, pushed), Int::zero())?;
    let main = zeta.add(eta)?;
    let total = match &dec.psi_f1_diagram {
        Some(f1) => main.add(f1)?,
        None => main.clone(),
    };
    let composite = compose(&total, &lam)?;
    let main_composite = compose(&main, &lam)?;

    if m.is_zero() {
        // Index zero: the entrywise bounds reduce to α''Λ₀ ≥ 0, β''Λ₀ ≥ 0.
        let c = g.target();
        let rows = vec![
            WitnessRow { name: "a''L0".into(), values: composite.lambda0().left_mul_vec(c.alpha().unwrap()) },
            WitnessRow { name: "b''L0".into(), values: composite.lambda0().left_mul_vec(c.beta().unwrap()) },
        ];
        let status = if rows.iter().all(WitnessRow::holds) { LiftStatus::Liftable } else { LiftStatus::Unknown };
        return Ok(LiftVerdict::new(status, Criterion::FiniteDimImage, rows, &composite, "index product is zero"));
    }

    let killed: Vec<bool> = (0..pb).map(|i| is_zero_vec(&lam.lambda0().col(i))).collect();
    let in_e = (0..pb).all(|i| dec.psi_int_unit[i].is_zero() || killed[i]);
    if in_e {
        // Zero-KK rigidity applies to (ζ+η)×λ, which kills the unit.
        return match in_m(&main_composite) {
            Some(w) => {
                let note = format!("(zeta+eta)xlambda lies in M with mu = {}", fmt_vec(&w.mu));
                Ok(LiftVerdict::new(LiftStatus::Liftable, Criterion::ZeroClass, vec![], &composite, note))
            }
            None => Ok(LiftVerdict::new(
                LiftStatus::Unknown,
                Criterion::ZeroClass,
                vec![],
                &composite,
                "unit is killed but the class is nonzero; hypotheses of the rigidity lemma fail",
            )),
        };
    }

    let c = g.target();
    let top = if m.is_positive() { c.alpha().unwrap() } else { c.beta().unwrap() };
    let (own, step) = if m.is_positive() { (alpha, vsub(alpha, beta)) } else { (beta, vsub(beta, alpha)) };
    let mabs = m.abs();
    let zeta_img = lam.lambda0().mul(zeta.lambda0()).left_mul_vec(top);
    let eta_img = lam.lambda0().mul(eta.lambda0()).left_mul_vec(top);
    let mut rows = vec![WitnessRow { name: "pushed part: c''L0 Z0 - own".into(), values: vsub(&zeta_img, own) }];
    // The η part stays nonnegative over the whole range of j, inclusive.
    let upto = &mabs + Int::one();
    rows.extend(affine_rows("eta part: c''L0 H0 - j step", &eta_img, &step, &upto));
    let comp_img = composite.lambda0().left_mul_vec(top);
    rows.extend(affine_rows("composite", &vsub(&comp_img, own), &step, &mabs));
    let criterion = if m.is_positive() { Criterion::PositiveIndex } else { Criterion::NegativeIndex };
    let status = if rows.iter().all(WitnessRow::holds) { LiftStatus::Liftable } else { LiftStatus::Unknown };
    let note = if status == LiftStatus::Liftable { "" } else { "a required row fails; hypotheses not met by the data" };
    Ok(LiftVerdict::new(status, criterion, rows, &composite, note))
}
