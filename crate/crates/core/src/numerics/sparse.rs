use crate::C64;

/// δ_n = 1/(|w_n| + ‖w‖∞); all-zero w falls back to a uniform δ of ones.
pub fn reweight(w: &[C64]) -> Vec<f64> {
    let max = w.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return vec![1.0; w.len()];
    }
    w.iter().map(|x| 1.0 / (x.norm() + max)).collect()
}

/// Mark the `n_a` largest magnitudes; ties go to the lower index.
pub fn select_top(magnitudes: &[f64], n_a: usize) -> Vec<bool> {
    let mut idx: Vec<usize> = (0..magnitudes.len()).collect();
    idx.sort_by(|&a, &b| magnitudes[b].total_cmp(&magnitudes[a]).then(a.cmp(&b)));
    let mut p = vec![false; magnitudes.len()];
    for &i in idx.iter().take(n_a) {
        p[i] = true;
    }
    p
}
