//! Maximum-weight bipartite assignment (Hungarian method, O(n^2 m)).

use crate::types::BBox;

/// Solves the rectangular assignment problem maximizing the summed weight.
///
/// `weights` is row-major with `rows` rows. Returns, for each row, the
/// assigned column (every row gets one when `rows <= cols`; otherwise every
/// column is used once and the surplus rows get `None`).
pub fn max_weight_assignment(weights: &[f64], rows: usize, cols: usize) -> Vec<Option<usize>> {
    assert_eq!(weights.len(), rows * cols, "weight matrix shape mismatch");
    if rows == 0 || cols == 0 {
        return vec![None; rows];
    }
    if rows > cols {
        let mut transposed = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                transposed[c * rows + r] = weights[r * cols + c];
            }
        }
        let by_col = max_weight_assignment(&transposed, cols, rows);
        let mut out = vec![None; rows];
        for (c, r) in by_col.into_iter().enumerate() {
            if let Some(r) = r {
                out[r] = Some(c);
            }
        }
        return out;
    }

    // min-cost formulation with 1-based potentials; column 0 is a sentinel
    let n = rows;
    let m = cols;
    let cost = |i: usize, j: usize| -weights[(i - 1) * m + (j - 1)];
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
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

    let mut out = vec![None; n];
    for j in 1..=m {
        if owner[j] != 0 {
            out[owner[j] - 1] = Some(j - 1);
        }
    }
    out
}

/// One-to-one matching between two box sets maximizing summed IoU over pairs
/// with IoU >= `threshold`. Returns `(left, right, iou)` sorted by `left`.
pub fn match_by_iou(left: &[BBox], right: &[BBox], threshold: f64) -> Vec<(usize, usize, f64)> {
    let (rows, cols) = (left.len(), right.len());
    let ious: Vec<f64> = left.iter().flat_map(|a| right.iter().map(move |b| a.iou(b))).collect();
    // pairs below threshold weigh zero, so they never displace a valid pair
    let weights: Vec<f64> = ious.iter().map(|&iou| if iou >= threshold { iou } else { 0.0 }).collect();
    max_weight_assignment(&weights, rows, cols)
        .into_iter()
        .enumerate()
        .filter_map(|(i, j)| {
            let j = j?;
            let iou = ious[i * cols + j];
            (iou >= threshold && iou > 0.0).then_some((i, j, iou))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive maximum over all partial injections rows -> cols.
    fn brute_force(weights: &[f64], rows: usize, cols: usize) -> f64 {
        fn go(r: usize, rows: usize, cols: usize, w: &[f64], used: &mut Vec<bool>) -> f64 {
            if r == rows {
                return 0.0;
            }
            let mut best = go(r + 1, rows, cols, w, used);
            for c in 0..cols {
                if !used[c] {
                    used[c] = true;
                    best = best.max(w[r * cols + c] + go(r + 1, rows, cols, w, used));
                    used[c] = false;
                }
            }
            best
        }
        go(0, rows, cols, weights, &mut vec![false; cols])
    }

    fn total(weights: &[f64], cols: usize, a: &[Option<usize>]) -> f64 {
        a.iter().enumerate().filter_map(|(r, c)| c.map(|c| weights[r * cols + c])).sum()
    }

    #[test]
    fn empty_inputs() {
        assert!(max_weight_assignment(&[], 0, 3).is_empty());
        assert_eq!(max_weight_assignment(&[], 2, 0), vec![None, None]);
        let boxes = [BBox::new(0.0, 0.0, 1.0, 1.0).unwrap(); 3];
        assert!(match_by_iou(&[], &boxes, 0.3).is_empty());
    }

    #[test]
    fn picks_global_optimum_over_greedy() {
        // greedy would take (0,0)=0.9 then (1,1)=0.1; optimum is 0.8 + 0.8
        let w = [0.9, 0.8, 0.8, 0.1];
        assert_eq!(max_weight_assignment(&w, 2, 2), vec![Some(1), Some(0)]);
    }

    #[test]
    fn crossing_boxes_match_exhaustive_optimum() {
        let tracks = [BBox::new(100.0, 100.0, 40.0, 100.0).unwrap(), BBox::new(130.0, 100.0, 40.0, 100.0).unwrap()];
        let dets = [BBox::new(128.0, 102.0, 40.0, 100.0).unwrap(), BBox::new(104.0, 98.0, 40.0, 100.0).unwrap()];
        let m = match_by_iou(&tracks, &dets, 0.3);
        let w: Vec<f64> = tracks.iter().flat_map(|a| dets.iter().map(move |b| a.iou(b))).collect();
        let best = brute_force(&w, 2, 2);
        let got: f64 = m.iter().map(|x| x.2).sum();
        assert!((got - best).abs() < 1e-12);
        assert_eq!(m.iter().map(|x| (x.0, x.1)).collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn threshold_excludes_weak_pairs() {
        let a = [BBox::new(0.0, 0.0, 10.0, 10.0).unwrap()];
        let b = [BBox::new(8.0, 0.0, 10.0, 10.0).unwrap()];
        assert!(match_by_iou(&a, &b, 0.3).is_empty());
        assert_eq!(match_by_iou(&a, &a, 0.3), vec![(0, 0, 1.0)]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            rows in 0usize..5, cols in 0usize..5,
            seed in proptest::collection::vec(0.0f64..1.0, 25),
        ) {
            let w: Vec<f64> = seed[..rows * cols].to_vec();
            let a = max_weight_assignment(&w, rows, cols);
            prop_assert_eq!(a.len(), rows);
            let mut seen = vec![false; cols];
            for c in a.iter().flatten() {
                prop_assert!(!seen[*c]);
                seen[*c] = true;
            }
            prop_assert!((total(&w, cols, &a) - brute_force(&w, rows, cols)).abs() < 1e-9);
        }
    }
}
