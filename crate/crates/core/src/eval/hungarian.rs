/// Maximum-weight assignment on a rectangular weight matrix given as rows.
///
/// Returns, for every row, the column it is matched to. When there are more
/// rows than columns some rows stay unmatched (`None`); otherwise every row
/// is matched to a distinct column.
///
/// Shortest augmenting path formulation of the Hungarian algorithm with row
/// and column potentials, `O(n^2 m)`.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = weights[0].len();
    assert!(
        weights.iter().all(|r| r.len() == cols),
        "ragged weight matrix"
    );
    if cols == 0 {
        return vec![None; rows];
    }
    if rows > cols {
        // solve the transpose so the left side is the smaller one
        let t: Vec<Vec<f64>> = (0..cols)
            .map(|j| (0..rows).map(|i| weights[i][j]).collect())
            .collect();
        let col_to_row = max_weight_assignment(&t);
        let mut out = vec![None; rows];
        for (j, i) in col_to_row.into_iter().enumerate() {
            if let Some(i) = i {
                out[i] = Some(j);
            }
        }
        return out;
    }

    // minimize negated weights; 1-based arrays with a virtual column 0
    let cost = |i: usize, j: usize| -weights[i - 1][j - 1];
    let (n, m) = (rows, cols);
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut matched_row = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut out = vec![None; n];
    for j in 1..=m {
        if matched_row[j] != 0 {
            out[matched_row[j] - 1] = Some(j - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(w: &[Vec<f64>], a: &[Option<usize>]) -> f64 {
        a.iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| w[i][j]))
            .sum()
    }

    #[test]
    fn diagonal_and_swap() {
        let w = vec![vec![5.0, 0.0], vec![0.0, 5.0]];
        assert_eq!(max_weight_assignment(&w), vec![Some(0), Some(1)]);
        let w = vec![vec![0.0, 5.0], vec![5.0, 0.0]];
        assert_eq!(max_weight_assignment(&w), vec![Some(1), Some(0)]);
    }

    #[test]
    fn rectangular_both_ways() {
        let w = vec![vec![1.0, 9.0, 3.0], vec![8.0, 7.0, 1.0]];
        let a = max_weight_assignment(&w);
        assert_eq!(total(&w, &a), 17.0);
        let t: Vec<Vec<f64>> = (0..3).map(|j| (0..2).map(|i| w[i][j]).collect()).collect();
        let b = max_weight_assignment(&t);
        assert_eq!(b.iter().filter(|x| x.is_some()).count(), 2);
        assert_eq!(total(&t, &b), 17.0);
    }
}
