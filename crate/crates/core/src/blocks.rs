//! Building blocks: interval blocks `A(F₁, M_n, φ₀, φ₁)` recorded by their
//! multiplicity rows, and finite-dimensional summands.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::num::{dot, fmt_vec, int, vsub, Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("unitality violated: {which}·k = {got}, expected n = {n}")]
    UnitalityViolation { which: &'static str, got: Int, n: Int },
    #[error("summand {0} is killed by both endpoint maps")]
    ZeroColumn(usize),
    #[error("nonpositive size: {0}")]
    NonpositiveSize(String),
    #[error("negative multiplicity in {0}")]
    NegativeMultiplicity(&'static str),
    #[error("length mismatch: k has {k} entries, {which} has {got}")]
    LengthMismatch { which: &'static str, k: usize, got: usize },
    #[error("operation needs an interval block")]
    WrongKind,
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Interval,
    FiniteDim,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct IntervalData {
    n: Int,
    alpha: Vec<Int>,
    beta: Vec<Int>,
}

/// A validated block. Construct with [`Block::interval`] or [`Block::finite_dim`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    k: Vec<Int>,
    interval: Option<IntervalData>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockFlags {
    pub is_finite_dim: bool,
    pub is_in_c_o: bool,
}

impl Block {
    pub fn interval(k: Vec<Int>, n: Int, alpha: Vec<Int>, beta: Vec<Int>) -> Result<Block, BlockError> {
        check_sizes(&k)?;
        if !n.is_positive() {
            return Err(BlockError::NonpositiveSize(format!("n = {n}")));
        }
        for (which, row) in [("alpha", &alpha), ("beta", &beta)] {
            if row.len() != k.len() {
                return Err(BlockError::LengthMismatch { which, k: k.len(), got: row.len() });
            }
            if row.iter().any(Signed::is_negative) {
                return Err(BlockError::NegativeMultiplicity(which));
            }
            let got = dot(row, &k);
            if got != n {
                return Err(BlockError::UnitalityViolation { which, got, n });
            }
        }
        if let Some(j) = (0..k.len()).find(|&j| alpha[j].is_zero() && beta[j].is_zero()) {
            return Err(BlockError::ZeroColumn(j));
        }
        Ok(Block { k, interval: Some(IntervalData { n, alpha, beta }) })
    }

    pub fn finite_dim(k: Vec<Int>) -> Result<Block, BlockError> {
        check_sizes(&k)?;
        Ok(Block { k, interval: None })
    }

    /// `C(S¹)` presented as `A(ℂ, ℂ, id, id)`.
    pub fn circle() -> Block {
        Block::interval(vec![Int::one()], Int::one(), vec![Int::one()], vec![Int::one()]).expect("circle block")
    }

    /// The dimension-drop block `Ĩ_q` with boundary row `(q, −q)`; requires `q ≥ 2`.
    pub fn dimension_drop(q: &Int) -> Result<Block, BlockError> {
        if q < &int(2) {
            return Err(BlockError::BadParameter(format!("dimension drop needs q >= 2, got {q}")));
        }
        Ok(Self::dimension_drop_any(q))
    }

    /// Same shape as [`Block::dimension_drop`] but also allows `q = 1`
    /// (the interval algebra), which appears among order generators.
    pub(crate) fn dimension_drop_any(q: &Int) -> Block {
        let one = Int::one();
        let zero = Int::zero();
        Block::interval(vec![one.clone(), one], q.clone(), vec![q.clone(), zero.clone()], vec![zero, q.clone()])
            .expect("dimension drop block")
    }

    pub fn kind(&self) -> BlockKind {
        if self.interval.is_some() {
            BlockKind::Interval
        } else {
            BlockKind::FiniteDim
        }
    }

    pub fn is_interval(&self) -> bool {
        self.interval.is_some()
    }

    pub fn p(&self) -> usize {
        self.k.len()
    }

    pub fn k(&self) -> &[Int] {
        &self.k
    }

    pub fn n(&self) -> Option<&Int> {
        self.interval.as_ref().map(|d| &d.n)
    }

    pub fn alpha(&self) -> Option<&[Int]> {
        self.interval.as_ref().map(|d| d.alpha.as_slice())
    }

    pub fn beta(&self) -> Option<&[Int]> {
        self.interval.as_ref().map(|d| d.beta.as_slice())
    }

    /// The index row `α − β`; `None` for finite-dimensional blocks.
    pub fn boundary(&self) -> Option<Vec<Int>> {
        self.interval.as_ref().map(|d| vsub(&d.alpha, &d.beta))
    }

    pub fn require_interval(&self) -> Result<(&Int, &[Int], &[Int]), BlockError> {
        let d = self.interval.as_ref().ok_or(BlockError::WrongKind)?;
        Ok((&d.n, &d.alpha, &d.beta))
    }

    pub fn classify(&self) -> BlockFlags {
        match &self.interval {
            None => BlockFlags { is_finite_dim: true, is_in_c_o: false },
            Some(d) => BlockFlags {
                is_finite_dim: false,
                is_in_c_o: d.alpha.iter().zip(&d.beta).all(|(a, b)| a.is_zero() || b.is_zero()),
            },
        }
    }

    /// `N_A`: one more than the least integer bounding `|(α_j+β_j)/(α_j−β_j)|`
    /// over summands with `α_j ≠ β_j`; equals 1 when `α = β`.
    pub fn n_constant(&self) -> Result<Int, BlockError> {
        let (_, alpha, beta) = self.require_interval()?;
        let mut bound = Rat::zero();
        for (a, b) in alpha.iter().zip(beta) {
            if a != b {
                let r = Rat::new(a + b, (a - b).abs());
                if r > bound {
                    bound = r;
                }
            }
        }
        Ok(bound.ceil().to_integer() + Int::one())
    }
}

fn check_sizes(k: &[Int]) -> Result<(), BlockError> {
    if k.is_empty() {
        return Err(BlockError::NonpositiveSize("p = 0".into()));
    }
    if let Some(x) = k.iter().find(|x| !x.is_positive()) {
        return Err(BlockError::NonpositiveSize(format!("k entry {x} in {}", fmt_vec(k))));
    }
    Ok(())
}

/// A finite direct sum of blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    blocks: Vec<Block>,
}

impl Algebra {
    pub fn new(blocks: Vec<Block>) -> Result<Algebra, BlockError> {
        if blocks.is_empty() {
            return Err(BlockError::NonpositiveSize("algebra with no blocks".into()));
        }
        Ok(Algebra { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}
