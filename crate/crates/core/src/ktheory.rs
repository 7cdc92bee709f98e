//! K₀ and K₁ of a block from the six-term sequence: `K₀ = ker(α−β)`,
//! `K₁ = coker(α−β)`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::blocks::Block;
use crate::num::{dot, gcd_all, is_nonneg, is_zero_vec, kernel_of_row, lattice_coords, Int};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KTheoryError {
    #[error("vector has {got} entries, block has p = {p}")]
    DimensionMismatch { p: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum K1Group {
    FreeZ,
    /// `ℤ/g`; `Cyclic(1)` is the trivial group.
    Cyclic(Int),
}

impl fmt::Display for K1Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            K1Group::FreeZ => write!(f, "Z"),
            K1Group::Cyclic(g) => write!(f, "Z/{g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTheoryData {
    pub k0_basis: Vec<Vec<Int>>,
    pub k0_rank: usize,
    pub k1: K1Group,
    pub unit_class: Vec<Int>,
}

pub fn compute_ktheory(a: &Block) -> KTheoryData {
    let p = a.p();
    let delta = a.boundary().unwrap_or_else(|| vec![Int::zero(); p]);
    let k0_basis = kernel_of_row(&delta);
    let k1 = if !a.is_interval() {
        K1Group::Cyclic(Int::one())
    } else if is_zero_vec(&delta) {
        K1Group::FreeZ
    } else {
        K1Group::Cyclic(gcd_all(&delta))
    };
    KTheoryData { k0_rank: k0_basis.len(), k0_basis, k1, unit_class: a.k().to_vec() }
}

fn check_len(a: &Block, v: &[Int]) -> Result<(), KTheoryError> {
    if v.len() != a.p() {
        return Err(KTheoryError::DimensionMismatch { p: a.p(), got: v.len() });
    }
    Ok(())
}

pub fn k0_contains(a: &Block, v: &[Int]) -> Result<bool, KTheoryError> {
    check_len(a, v)?;
    Ok(match a.boundary() {
        Some(delta) => dot(&delta, v).is_zero(),
        None => true,
    })
}

pub fn k0_positive_contains(a: &Block, v: &[Int]) -> Result<bool, KTheoryError> {
    Ok(k0_contains(a, v)? && is_nonneg(v))
}

/// Coordinates of `v` in the stored K₀ basis, if `v ∈ K₀`.
pub fn k0_coordinates(data: &KTheoryData, v: &[Int]) -> Option<Vec<Int>> {
    lattice_coords(&data.k0_basis, v)
}

/// Minimal nonzero elements of `K₀⁺(A)` under the entrywise order (the
/// Hilbert basis of the cone). Entries of such elements never exceed
/// `max |α_j − β_j|`, which bounds the search box.
pub fn minimal_positive_classes(a: &Block) -> Vec<Vec<Int>> {
    let p = a.p();
    let delta = match a.boundary() {
        Some(d) => d,
        None => return unit_vectors(p),
    };
    let bound = delta.iter().map(Signed::abs).max().unwrap_or_else(Int::zero).max(Int::one());
    let bound = usize::try_from(&bound).expect("boundary entries too large to enumerate");
    let mut found: Vec<Vec<Int>> = Vec::new();
    let mut cur = vec![0usize; p];
    loop {
        let v: Vec<Int> = cur.iter().map(|&x| Int::from(x)).collect();
        if !is_zero_vec(&v) && dot(&delta, &v).is_zero() {
            found.push(v);
        }
        let mut i = 0;
        while i < p {
            cur[i] += 1;
            if cur[i] <= bound {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == p {
            break;
        }
    }
    let mut minimal: Vec<Vec<Int>> = found
        .iter()
        .filter(|v| !found.iter().any(|w| w != *v && w.iter().zip(v.iter()).all(|(x, y)| x <= y)))
        .cloned()
        .collect();
    minimal.sort();
    minimal
}

fn unit_vectors(p: usize) -> Vec<Vec<Int>> {
    (0..p)
        .map(|j| (0..p).map(|i| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ints};

    fn a_c() -> Block {
        Block::interval(ints(&[1, 1, 1, 1, 1]), int(3), ints(&[1, 1, 0, 0, 1]), ints(&[0, 0, 1, 1, 1])).unwrap()
    }

    #[test]
    fn groups_of_examples() {
        let kt = compute_ktheory(&a_c());
        assert_eq!(kt.k0_rank, 4);
        assert_eq!(kt.k1, K1Group::Cyclic(int(1)));
        assert_eq!(kt.k1.to_string(), "Z/1");
        assert!(k0_coordinates(&kt, &kt.unit_class).is_some());

        let b = Block::interval(ints(&[1, 1, 1, 1, 1]), int(5), ints(&[2, 2, 0, 0, 1]), ints(&[0, 0, 2, 2, 1])).unwrap();
        assert_eq!(compute_ktheory(&b).k1, K1Group::Cyclic(int(2)));

        let c = compute_ktheory(&Block::circle());
        assert_eq!(c.k0_rank, 1);
        assert_eq!(c.k1, K1Group::FreeZ);

        let i3 = compute_ktheory(&Block::dimension_drop(&int(3)).unwrap());
        assert_eq!(i3.k1, K1Group::Cyclic(int(3)));
        assert_eq!(i3.k0_basis, vec![ints(&[1, 1])]);

        let f = compute_ktheory(&Block::finite_dim(ints(&[2, 3])).unwrap());
        assert_eq!(f.k0_rank, 2);
        assert_eq!(f.k1, K1Group::Cyclic(int(1)));
    }

    #[test]
    fn membership() {
        let a = a_c();
        assert!(k0_contains(&a, &ints(&[1, 0, 1, 0, 0])).unwrap());
        assert!(!k0_contains(&a, &ints(&[1, 0, 0, 0, 0])).unwrap());
        assert!(k0_contains(&a, &ints(&[0, 0, 0, 0, 0])).unwrap());
        assert!(k0_positive_contains(&a, &ints(&[1, 0, 1, 0, 0])).unwrap());
        assert!(!k0_positive_contains(&a, &ints(&[1, -1, 0, 0, 0])).unwrap());
        assert!(k0_positive_contains(&a, &ints(&[0, 0, 0, 0, 1])).unwrap());
        assert_eq!(k0_contains(&a, &ints(&[1])), Err(KTheoryError::DimensionMismatch { p: 5, got: 1 }));
    }

    #[test]
    fn hilbert_basis() {
        let i2 = Block::dimension_drop(&int(2)).unwrap();
        assert_eq!(minimal_positive_classes(&i2), vec![ints(&[1, 1])]);
        let m = minimal_positive_classes(&a_c());
        assert_eq!(m.len(), 5);
        assert!(m.contains(&ints(&[0, 0, 0, 0, 1])));
        assert!(m.contains(&ints(&[1, 0, 1, 0, 0])));
    }
}
