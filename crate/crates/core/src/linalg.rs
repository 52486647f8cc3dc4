//! Dense row-major matrices and a Cholesky solver, sized for one slice NLP
//! (a few hundred unknowns at most).

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `y = Aᵀ x`
    pub fn tr_mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![S::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == S::zero() {
                continue;
            }
            axpy(xi, self.row(i), &mut y);
        }
        y
    }

    /// `self += scale · Σ_i weight_i · row_i row_iᵀ` over the rows of `a`
    /// (Gauss-Newton accumulation of `scale · Aᵀ diag(weight) A`).
    pub fn add_weighted_gram(&mut self, a: &DenseMatrix<S>, weights: &[S], scale: S) {
        assert_eq!(self.rows, a.cols);
        assert_eq!(self.cols, a.cols);
        for (r, &wr) in weights.iter().enumerate() {
            if wr == S::zero() {
                continue;
            }
            let row = a.row(r);
            let nz: Vec<usize> = (0..row.len()).filter(|&j| row[j] != S::zero()).collect();
            let f = scale * wr;
            for &i in &nz {
                let fi = f * row[i];
                let out = self.row_mut(i);
                for &j in &nz {
                    out[j] = out[j] + fi * row[j];
                }
            }
        }
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, v| m.max(v.abs()))
    }
}

impl<S> std::ops::Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for DenseMatrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `y += alpha · x`
#[inline]
pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

pub fn norm_inf<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |m, x| m.max(x.abs()))
}

/// Lower Cholesky factor of a symmetric positive-definite matrix, or `None`
/// if a pivot is not positive.
pub fn cholesky<S: Scalar>(a: &DenseMatrix<S>) -> Option<DenseMatrix<S>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > S::zero()) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            let (ri, rj) = (i * n, j * n);
            for k in 0..j {
                s = s - l.data[ri + k] * l.data[rj + k];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the lower factor `L`.
pub fn cholesky_solve<S: Scalar>(l: &DenseMatrix<S>, b: &[S]) -> Vec<S> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s = s - l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s = s - l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => 4.0,
            (1, 1) => 5.0,
            (2, 2) => 6.0,
            (0, 1) | (1, 0) => 1.0,
            (1, 2) | (2, 1) => 2.0,
            _ => 0.5,
        });
        let x = [1.0f64, -2.0, 3.0];
        let b = a.mul_vec(&x);
        let l = cholesky(&a).unwrap();
        let sol = cholesky_solve(&l, &b);
        for (s, e) in sol.iter().zip(x) {
            assert!((s - e).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(cholesky(&a).is_none());
    }

    #[test]
    fn weighted_gram_matches_explicit_product() {
        let a = DenseMatrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64 - 2.0);
        let mut g = DenseMatrix::zeros(3, 3);
        g.add_weighted_gram(&a, &[2.0, 0.5], 3.0);
        for i in 0..3 {
            for j in 0..3 {
                let e = 3.0 * (2.0 * a[(0, i)] * a[(0, j)] + 0.5 * a[(1, i)] * a[(1, j)]);
                assert!((g[(i, j)] - e).abs() < 1e-12);
            }
        }
    }
}
