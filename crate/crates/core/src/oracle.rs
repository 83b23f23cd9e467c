//! Independent reference routines used only by tests.
//!
//! Written as plain index loops on purpose, to stay close to the textbook
//! formulas and share no code with the routines under test.

#![allow(clippy::needless_range_loop)]

use crate::cplx::{CMatrix, CVector, C64};

pub fn naive_matvec(a: &CMatrix, v: &CVector) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.rows()];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..a.cols() {
            let (ar, ai) = (a[(i, j)].re, a[(i, j)].im);
            let (vr, vi) = (v[j].re, v[j].im);
            o.re += ar * vr - ai * vi;
            o.im += ar * vi + ai * vr;
        }
    }
    out
}

/// Gaussian elimination with partial pivoting on a general complex system.
pub fn gauss_solve(a: &CMatrix, b: &CVector) -> Option<CVector> {
    let n = a.rows();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))?;
        if m[piv][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for k in col..=n {
                let t = m[col][k];
                m[r][k] -= f * t;
            }
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = m[i][n];
        for k in i + 1..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(CVector::from_vec(x))
}

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi on its real 2n x 2n
/// embedding `[[Re, -Im], [Im, Re]]`; each eigenvalue appears twice there,
/// so every other sorted value is returned.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.rows();
    let m = 2 * n;
    let mut s = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            s[i][j] = z.re;
            s[i + n][j + n] = z.re;
            s[i][j + n] = -z.im;
            s[i + n][j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..m {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| s[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}
