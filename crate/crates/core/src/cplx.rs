//! Dense complex linear algebra.
//!
//! Just enough for the detectors and the unfolded network: Hermitian
//! transpose, matrix-vector and matrix-matrix products, Cholesky solves of
//! Hermitian positive-definite systems and a power-iteration bound on the
//! largest eigenvalue of a Gram matrix. Storage is row-major `Vec<C64>`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sysmodel::Rng;

pub type C64 = Complex64;

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector(Vec<C64>);

impl CVector {
    pub fn from_vec(entries: Vec<C64>) -> Self {
        CVector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        CVector(vec![C64::new(0.0, 0.0); len])
    }

    /// Builds a vector from real parts only.
    pub fn from_reals(re: &[f64]) -> Self {
        CVector(re.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.0.iter()
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Inner product `self^H other`, conjugate-linear in `self`.
    pub fn dot(&self, other: &CVector) -> Result<C64> {
        check_len("dot", self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn sub(&self, other: &CVector) -> Result<CVector> {
        check_len("sub", self.len(), other.len())?;
        Ok(CVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &CVector) -> Result<CVector> {
        check_len("add", self.len(), other.len())?;
        Ok(CVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn scale(&self, s: f64) -> CVector {
        CVector(self.0.iter().map(|z| z * s).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl FromIterator<C64> for CVector {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        CVector(iter.into_iter().collect())
    }
}

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "from_row_major",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_len("from_rows", cols, r.len())?;
            data.extend_from_slice(r);
        }
        CMatrix::from_row_major(rows.len(), cols, data)
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = CMatrix::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> CVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Returns a copy with column `j` removed.
    pub fn without_column(&self, j: usize) -> CMatrix {
        let cols = self.cols - 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            for (k, z) in self.row(i).iter().enumerate() {
                if k != j {
                    data.push(*z);
                }
            }
        }
        CMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Adds `s` to every diagonal entry.
    pub fn add_diag(&self, s: f64) -> CMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += s;
        }
        m
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}j", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn check_len(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension {
            op,
            expected,
            found,
        });
    }
    Ok(())
}

/// Conjugate transpose.
pub fn hermitian(a: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

pub fn matvec(a: &CMatrix, v: &CVector) -> Result<CVector> {
    check_len("matvec", a.cols, v.len())?;
    Ok((0..a.rows)
        .map(|i| a.row(i).iter().zip(v.iter()).map(|(x, y)| x * y).sum())
        .collect())
}

/// `A^H v` without materializing the Hermitian transpose.
pub fn matvec_h(a: &CMatrix, v: &CVector) -> Result<CVector> {
    check_len("matvec_h", a.rows, v.len())?;
    let mut out = CVector::zeros(a.cols);
    for i in 0..a.rows {
        let vi = v[i];
        for (o, aij) in out.as_mut_slice().iter_mut().zip(a.row(i)) {
            *o += aij.conj() * vi;
        }
    }
    Ok(out)
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_len("matmul", a.cols, b.rows)?;
    let mut out = CMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            for j in 0..b.cols {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

/// Gram matrix `A^H A`, Hermitian by construction (the diagonal is exactly real).
pub fn gram(a: &CMatrix) -> CMatrix {
    let n = a.cols;
    let mut g = CMatrix::zeros(n, n);
    // accumulate the upper triangle row by row, then mirror
    for row in a.data.chunks_exact(n) {
        for (i, ai) in row.iter().enumerate() {
            let ai = ai.conj();
            let gi = &mut g.data[i * n..(i + 1) * n];
            for (gij, aj) in gi[i..].iter_mut().zip(&row[i..]) {
                *gij += ai * aj;
            }
        }
    }
    for i in 0..n {
        g.data[i * n + i].im = 0.0;
        for j in i + 1..n {
            g.data[j * n + i] = g.data[i * n + j].conj();
        }
    }
    g
}

/// Lower-triangular Cholesky factor `L` with `A = L L^H`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    /// Factors a Hermitian positive-definite matrix. Only the lower triangle
    /// of `a` is read.
    pub fn new(a: &CMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Dimension {
                op: "cholesky",
                expected: a.rows,
                found: a.cols,
            });
        }
        let n = a.rows;
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = C64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor(&self) -> &CMatrix {
        &self.l
    }

    pub fn solve(&self, b: &CVector) -> Result<CVector> {
        let n = self.l.rows;
        check_len("cholesky_solve", n, b.len())?;
        // L z = b
        let mut z = b.clone();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.l[(i, k)] * z[k];
            }
            z[i] = s / self.l[(i, i)].re;
        }
        // L^H x = z
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s -= self.l[(k, i)].conj() * z[k];
            }
            z[i] = s / self.l[(i, i)].re;
        }
        Ok(z)
    }

    /// Diagonal of `A^{-1}`, computed column by column.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.l.rows;
        (0..n)
            .map(|j| {
                let mut e = CVector::zeros(n);
                e[j] = C64::new(1.0, 0.0);
                // infallible: e has length n
                self.solve(&e).map(|col| col[j].re).unwrap_or(f64::NAN)
            })
            .collect()
    }
}

/// Solves `A x = b` for Hermitian positive-definite `A`.
pub fn solve_hpd(a: &CMatrix, b: &CVector) -> Result<CVector> {
    check_len("solve_hpd", a.rows, b.len())?;
    Cholesky::new(a)?.solve(b)
}

/// Power-iteration estimate of the largest eigenvalue of a Hermitian PSD
/// matrix. Returns the Rayleigh quotient of the final iterate, which never
/// exceeds the true maximum.
pub fn spectral_bound(a: &CMatrix, iters: usize, seed: u64) -> f64 {
    let n = a.cols;
    let mut rng = Rng::new(seed);
    let mut v: CVector = (0..n).map(|_| rng.complex_normal(1.0)).collect();
    let mut norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    v = v.scale(1.0 / norm);
    let mut lambda = 0.0;
    for _ in 0..iters.max(1) {
        let w = matvec(a, &v).expect("square operand");
        lambda = v.dot(&w).expect("same length").re;
        norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w.scale(1.0 / norm);
    }
    let w = matvec(a, &v).expect("square operand");
    let rq = v.dot(&w).expect("same length").re;
    if rq.is_finite() {
        rq.max(0.0)
    } else {
        lambda
    }
}
