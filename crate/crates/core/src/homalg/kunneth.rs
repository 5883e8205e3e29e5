//! Künneth products of torsion-free graded groups.

use super::chain::{AbGroup, GradedGroup};
use crate::error::{Error, Result};

/// `(A ⊗ B)_s = ⊕_{i+j=s} A_i ⊗ B_j` for torsion-free inputs.
pub fn kunneth_product(a: &[AbGroup], b: &[AbGroup]) -> Result<GradedGroup> {
    if a.iter().chain(b).any(|g| !g.torsion.is_empty()) {
        return Err(Error::Unsupported("Künneth product with torsion".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = vec![0usize; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x.free * y.free;
        }
    }
    Ok(out.into_iter().map(AbGroup::free).collect())
}

pub fn point() -> GradedGroup {
    vec![AbGroup::free(1)]
}

/// Homology of the free group of rank `m`.
pub fn free_group_homology(m: usize) -> GradedGroup {
    vec![AbGroup::free(1), AbGroup::free(m)]
}

/// Homology of a product of free groups of the given ranks.
pub fn product_of_free_homology(ranks: &[usize]) -> GradedGroup {
    ranks.iter().fold(point(), |acc, &m| {
        kunneth_product(&acc, &free_group_homology(m)).expect("torsion-free")
    })
}
