//! Minimum-norm pseudo-inverse of a 2×K complex system.
//!
//! The rows are factored as A = L·Q (modified Gram–Schmidt with one
//! re-orthogonalization pass) with L 2×2 lower-triangular and Q having
//! orthonormal rows, so pinv(A) = Qᴴ·pinv(L). The singular values of A are
//! those of L and come from a closed form; working on L instead of A·Aᴴ avoids
//! squaring the condition number.

use super::{dot, norm_sqr};
use crate::C64;

/// Singular values below `RANK_TOL·σ_max` are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Pinv2 {
    /// The two columns of the K×2 pseudo-inverse.
    pub cols: [Vec<C64>; 2],
    pub singular_values: [f64; 2],
    pub rank: usize,
}

impl Pinv2 {
    pub fn rank_deficient(&self) -> bool {
        self.rank < 2
    }

    /// pinv·rhs
    pub fn apply(&self, rhs: [C64; 2]) -> Vec<C64> {
        self.cols[0].iter().zip(&self.cols[1]).map(|(a, b)| a * rhs[0] + b * rhs[1]).collect()
    }

    pub fn len(&self) -> usize {
        self.cols[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Pseudo-inverse of the 2×K matrix with rows `r1`, `r2`.
pub fn pinv2(r1: &[C64], r2: &[C64]) -> Pinv2 {
    assert_eq!(r1.len(), r2.len(), "rows must have equal length");
    let k = r1.len();
    let zero = C64::new(0.0, 0.0);
    // Pivot the heavier row first.
    let swapped = norm_sqr(r2) > norm_sqr(r1);
    let (a, b) = if swapped { (r2, r1) } else { (r1, r2) };

    let l11 = norm_sqr(a).sqrt();
    if l11 == 0.0 {
        return Pinv2 { cols: [vec![zero; k], vec![zero; k]], singular_values: [0.0, 0.0], rank: 0 };
    }
    let q1: Vec<C64> = a.iter().map(|x| x / l11).collect();
    let mut l21 = dot(&q1, b);
    let mut rest: Vec<C64> = b.iter().zip(&q1).map(|(x, q)| x - l21 * q).collect();
    let fix = dot(&q1, &rest);
    rest.iter_mut().zip(&q1).for_each(|(x, q)| *x -= fix * q);
    l21 += fix;
    let l22 = norm_sqr(&rest).sqrt();
    let q2: Vec<C64> = if l22 > 0.0 { rest.iter().map(|x| x / l22).collect() } else { vec![zero; k] };

    // Singular values of L = [[l11, 0], [l21, l22]] from LLᴴ = [[h11, h12], [h12*, h22]].
    let h11 = l11 * l11;
    let h12 = l11 * l21.conj();
    let h22 = l21.norm_sqr() + l22 * l22;
    let gap = ((h11 - h22).powi(2) + 4.0 * h12.norm_sqr()).sqrt();
    let s1 = (0.5 * (h11 + h22 + gap)).sqrt();
    let s2 = l11 * l22 / s1;
    let rank = if s2 > RANK_TOL * s1 { 2 } else { 1 };

    // pinv(L) as a 2×2 matrix `pl[i][j]`.
    let pl: [[C64; 2]; 2] = if rank == 2 {
        [[C64::new(1.0 / l11, 0.0), zero], [-l21 / (l11 * l22), C64::new(1.0 / l22, 0.0)]]
    } else {
        // Top singular pair only: pinv = v₁u₁ᴴ/σ₁ with u₁ the top eigenvector of LLᴴ.
        let lam = s1 * s1;
        let cand1 = [h12, C64::new(lam - h11, 0.0)];
        let cand2 = [C64::new(lam - h22, 0.0), h12.conj()];
        let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
        let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
        let (u, nu) = if n1 >= n2 { (cand1, n1) } else { (cand2, n2) };
        let u = if nu > 0.0 { [u[0] / nu.sqrt(), u[1] / nu.sqrt()] } else { [C64::new(1.0, 0.0), zero] };
        let v = [(u[0] * l11 + u[1] * l21.conj()) / s1, u[1] * l22 / s1];
        let mut m = [[zero; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = v[i] * u[j].conj() / s1;
            }
        }
        m
    };

    let mut cols = [vec![zero; k], vec![zero; k]];
    for idx in 0..k {
        let (c1, c2) = (q1[idx].conj(), q2[idx].conj());
        for j in 0..2 {
            cols[j][idx] = c1 * pl[0][j] + c2 * pl[1][j];
        }
    }
    if swapped {
        cols.swap(0, 1);
    }
    Pinv2 { cols, singular_values: [s1, s2], rank }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn apply_rows(r1: &[C64], r2: &[C64], x: &[C64]) -> [C64; 2] {
        [r1.iter().zip(x).map(|(a, b)| a * b).sum(), r2.iter().zip(x).map(|(a, b)| a * b).sum()]
    }

    fn cvec(len: usize) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), len)
    }

    #[test]
    fn identity_block() {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let p = pinv2(&[o, z, z, z], &[z, o, z, z]);
        assert_eq!(p.rank, 2);
        for (j, col) in p.cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                let want = if i == j { o } else { z };
                assert!((x - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn duplicated_rows_flag_rank_deficiency() {
        let r: Vec<C64> = (0..6).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let p = pinv2(&r, &r);
        assert_eq!(p.rank, 1);
        assert!(p.singular_values[1] < 1e-10 * p.singular_values[0]);
        // On the consistent rhs [1, 1] the rank-1 solution still satisfies both rows.
        let x = p.apply([C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let y = apply_rows(&r, &r, &x);
        assert!((y[0] - 1.0).norm() < 1e-12 && (y[1] - 1.0).norm() < 1e-12);
        let zero = vec![C64::new(0.0, 0.0); 4];
        assert_eq!(pinv2(&zero, &zero).rank, 0);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let r1: Vec<C64> = (0..5).map(|k| C64::new(0.3 * k as f64, 0.1)).collect();
        let r2: Vec<C64> = (0..5).map(|k| C64::new(1.0, -0.2 * k as f64)).collect();
        let p = pinv2(&r1, &r2);
        let (a, b, c) = (norm_sqr(&r1), dot(&r1, &r2), norm_sqr(&r2));
        let tr = a + c;
        let det = a * c - b.norm_sqr();
        let l1 = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
        let l2 = det / l1;
        assert!((p.singular_values[0] - l1.sqrt()).abs() < 1e-12);
        assert!((p.singular_values[1] - l2.sqrt()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn projector_identity(r1 in cvec(8), r2 in cvec(8), rhs in cvec(2)) {
            let p = pinv2(&r1, &r2);
            prop_assume!(p.rank == 2 && p.singular_values[1] > 1e-3);
            let x = p.apply([rhs[0], rhs[1]]);
            let y = apply_rows(&r1, &r2, &x);
            let scale = rhs[0].norm().max(rhs[1].norm());
            prop_assert!((y[0] - rhs[0]).norm() <= 1e-10 * scale.max(1e-300));
            prop_assert!((y[1] - rhs[1]).norm() <= 1e-10 * scale.max(1e-300));
        }

        #[test]
        fn moore_penrose_identities(r1 in cvec(5), r2 in cvec(5)) {
            let p = pinv2(&r1, &r2);
            prop_assume!(p.rank == 2);
            // A·A⁺ = I₂
            for j in 0..2 {
                let y = apply_rows(&r1, &r2, &p.cols[j]);
                for (i, yi) in y.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((yi - want).norm() < 1e-8);
                }
            }
            // A⁺A is Hermitian: (A⁺A)_{ab} = Σ_j cols[j][a]·rows[j][b]
            let rows = [&r1, &r2];
            for a in 0..5 {
                for b in 0..5 {
                    let x: C64 = (0..2).map(|j| p.cols[j][a] * rows[j][b]).sum();
                    let y: C64 = (0..2).map(|j| p.cols[j][b] * rows[j][a]).sum();
                    prop_assert!((x - y.conj()).norm() < 1e-8);
                }
            }
        }

        #[test]
        fn minimum_norm(r1 in cvec(6), r2 in cvec(6), rhs in cvec(2), z in cvec(6)) {
            let p = pinv2(&r1, &r2);
            prop_assume!(p.rank == 2);
            let x0 = p.apply([rhs[0], rhs[1]]);
            // Any other solution is x0 plus a null-space vector (I − A⁺A)z.
            let az = apply_rows(&r1, &r2, &z);
            let proj = p.apply(az);
            let x: Vec<C64> = x0.iter().zip(&z).zip(&proj).map(|((a, b), c)| a + b - c).collect();
            prop_assert!(norm_sqr(&x0).sqrt() <= norm_sqr(&x).sqrt() + 1e-9);
        }
    }
}
