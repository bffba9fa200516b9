//! OXS trees for the budgeted-additive and matroid-rank functions. All leaves
//! have weight 1.

use super::{Leaves, Oxs};
use crate::error::{Error, Result};
use crate::itemset::ItemSet;

/// OXS representation of `min(c, |S ∩ R'|)`: `min(c, |R'|)` MAX trees, each
/// holding every element of `R'`.
pub fn build_oxs_budgeted(rset: &ItemSet, c: u64) -> Oxs {
    let copies = (rset.len() as u64).min(c) as usize;
    let tree = Leaves::uniform(rset, 1.0).expect("members are in range");
    Oxs::new(rset.n(), vec![tree; copies]).expect("members are in range")
}

/// Which case of the matroid-rank construction applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoemansBranch {
    /// `n <= alpha`: the `alpha` cap never binds.
    SmallGround,
    /// `alpha <= beta`: the function collapses to `min(alpha, |S|)`.
    CapDominates,
    /// `n > alpha > beta`.
    General,
}

pub fn goemans_branch(n: usize, alpha: u64, beta: u64) -> GoemansBranch {
    if n as u64 <= alpha {
        GoemansBranch::SmallGround
    } else if alpha <= beta {
        GoemansBranch::CapDominates
    } else {
        GoemansBranch::General
    }
}

/// OXS representation of `min(beta + |S \ R|, |S|, alpha)`.
pub fn build_oxs_goemans(rset: &ItemSet, alpha: u64, beta: u64, n: usize) -> Result<Oxs> {
    if rset.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rset.n(),
        });
    }
    let outside = rset.complement();
    match goemans_branch(n, alpha, beta) {
        GoemansBranch::SmallGround => {
            // |S \ R| + min(beta, |S ∩ R|)
            let mut trees = build_oxs_budgeted(rset, beta).trees().to_vec();
            for i in outside.iter() {
                trees.push(Leaves::from_pairs(n, [(i, 1.0)])?);
            }
            Oxs::new(n, trees)
        }
        GoemansBranch::CapDominates => Ok(build_oxs_budgeted(&ItemSet::full(n), alpha)),
        GoemansBranch::General => {
            let outside_tree = Leaves::uniform(&outside, 1.0)?;
            let all_tree = Leaves::uniform(&ItemSet::full(n), 1.0)?;
            let mut trees = vec![outside_tree; (alpha - beta) as usize];
            trees.extend(std::iter::repeat_n(all_tree, beta as usize));
            Oxs::new(n, trees)
        }
    }
}
