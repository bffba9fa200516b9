//! Maximum-weight bipartite matching on a dense nonnegative weight matrix.
//!
//! Because every weight is nonnegative, a maximum-weight matching in which
//! vertices may stay unmatched has the same value as a maximum-weight
//! assignment of the smaller side into the larger one: an assignment to a
//! zero entry is the same as leaving the vertex unmatched. The assignment is
//! solved with the shortest-augmenting-path Hungarian method with potentials,
//! `O(r^2 c)` for `r <= c`.

/// Result of [`max_weight_matching`]: total weight and, for each row, the
/// column it is matched to (if the matched edge has positive weight).
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub value: f64,
    pub row_to_col: Vec<Option<usize>>,
}

/// `weights[r][c]` must be finite and nonnegative; all rows must have equal
/// length.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> Matching {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Matching {
            value: 0.0,
            row_to_col: vec![None; rows],
        };
    }
    debug_assert!(weights.iter().all(|r| r.len() == cols));

    if rows <= cols {
        let assign = hungarian_min(rows, cols, |r, c| -weights[r][c]);
        collect(weights, assign.into_iter().map(Some).collect())
    } else {
        let assign = hungarian_min(cols, rows, |c, r| -weights[r][c]);
        let mut row_to_col = vec![None; rows];
        for (c, r) in assign.into_iter().enumerate() {
            row_to_col[r] = Some(c);
        }
        collect(weights, row_to_col)
    }
}

fn collect(weights: &[Vec<f64>], row_to_col: Vec<Option<usize>>) -> Matching {
    // Edges of weight zero carry nothing; report them as unmatched.
    let row_to_col: Vec<Option<usize>> = row_to_col
        .into_iter()
        .enumerate()
        .map(|(r, c)| c.filter(|&c| weights[r][c] > 0.0))
        .collect();
    let value = row_to_col
        .iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| weights[r][c]))
        .fold(0.0, |a, b| a + b);
    Matching { value, row_to_col }
}

/// Minimum-cost assignment of every one of `n` rows to a distinct one of `m`
/// columns (`n <= m`). Returns the column chosen for each row.
fn hungarian_min(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    const INF: f64 = f64::INFINITY;
    // 1-based arrays; index 0 is the virtual source column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![INF; m + 1];
    let mut used = vec![false; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = INF);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=m {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = j - 1;
        }
    }
    row_to_col
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(weights: &[Vec<f64>]) -> f64 {
        fn go(r: usize, used: &mut Vec<bool>, w: &[Vec<f64>]) -> f64 {
            if r == w.len() {
                return 0.0;
            }
            let mut best = go(r + 1, used, w);
            for c in 0..used.len() {
                if !used[c] {
                    used[c] = true;
                    best = best.max(w[r][c] + go(r + 1, used, w));
                    used[c] = false;
                }
            }
            best
        }
        let cols = weights.first().map_or(0, Vec::len);
        go(0, &mut vec![false; cols], weights)
    }

    #[test]
    fn small_cases() {
        // items a, b against trees {a:3,b:2} and {a:1,b:5}
        let w = vec![vec![3.0, 1.0], vec![2.0, 5.0]];
        assert_eq!(max_weight_matching(&w).value, 8.0);
        assert_eq!(max_weight_matching(&[]).value, 0.0);
        let single = vec![vec![3.0], vec![1.0]];
        let m = max_weight_matching(&single);
        assert_eq!(m.value, 3.0);
        assert_eq!(m.row_to_col, vec![Some(0), None]);
    }

    proptest! {
        #[test]
        fn matches_exhaustive_search(
            rows in 1usize..6, cols in 1usize..6,
            seed in prop::collection::vec(0u32..7, 36)
        ) {
            let w: Vec<Vec<f64>> = (0..rows)
                .map(|r| (0..cols).map(|c| seed[r * 6 + c] as f64).collect())
                .collect();
            let m = max_weight_matching(&w);
            prop_assert_eq!(m.value, brute(&w));
            let mut seen = std::collections::HashSet::new();
            for c in m.row_to_col.iter().flatten() {
                prop_assert!(seen.insert(*c));
            }
        }
    }
}
