use super::ContingencyMatrix;

/// Injective row→column matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// (row, column) index pairs sorted by row. Rows matched only to padding
    /// are absent.
    pub pairs: Vec<(usize, usize)>,
    pub total: u64,
}

/// Maximum-weight injective assignment on a rectangular weight matrix.
///
/// The matrix is padded to square with zeros and solved as a minimum-cost
/// problem with the shortest augmenting path (potentials) method in O(m³).
pub fn max_weight_assignment(weights: &[Vec<u64>]) -> Matching {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let m = rows.max(cols);
    if m == 0 {
        return Matching {
            pairs: Vec::new(),
            total: 0,
        };
    }
    let max = weights.iter().flatten().copied().max().unwrap_or(0) as i128;
    let cost = |i: usize, j: usize| -> i128 {
        let w = if i < rows && j < cols { weights[i][j] as i128 } else { 0 };
        max - w
    };

    // 1-based arrays; column 0 is the virtual source
    let mut u = vec![0i128; m + 1];
    let mut v = vec![0i128; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i128::MAX; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = i128::MAX;
            let mut j1 = 0;
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
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter_map(|j| {
            let i = row_of[j];
            (i >= 1 && i <= rows && j <= cols).then(|| (i - 1, j - 1))
        })
        .collect();
    pairs.sort_unstable();
    let total = pairs.iter().map(|&(i, j)| weights[i][j]).sum();
    Matching { pairs, total }
}

/// Optimal cluster↔intent matching maximizing the total matched count.
pub fn hungarian_match(matrix: &ContingencyMatrix) -> Matching {
    max_weight_assignment(&matrix.counts)
}
