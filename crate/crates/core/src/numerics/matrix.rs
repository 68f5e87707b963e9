//! Dense row-major square matrices and the symmetric kernels the mixture needs.

use crate::error::{check_dim, Error, Result};

/// Smallest Cholesky pivot accepted before a matrix is declared not
/// positive definite.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// A dense, row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a
    /// perfect square.
    pub fn from_row_major(order: usize, entries: Vec<f64>) -> Result<Self> {
        check_dim(order * order, entries.len())?;
        Ok(Self { order, entries })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let order = rows.len();
        let mut entries = Vec::with_capacity(order * order);
        for row in rows {
            check_dim(order, row.len())?;
            entries.extend_from_slice(row);
        }
        Ok(Self { order, entries })
    }

    /// Rebuilds a symmetric matrix from its upper triangle, row by row.
    pub fn from_upper_triangle(order: usize, upper: &[f64]) -> Result<Self> {
        check_dim(order * (order + 1) / 2, upper.len())?;
        let mut m = Self::zeros(order);
        let mut k = 0;
        for i in 0..order {
            for j in i..order {
                m[(i, j)] = upper[k];
                m[(j, i)] = upper[k];
                k += 1;
            }
        }
        Ok(m)
    }

    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.order;
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(self[(i, j)]);
            }
        }
        out
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }

    /// Replaces the matrix with `(M + Mᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.order;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.entries.iter_mut().for_each(|v| *v *= factor);
    }

    /// `M ← M + c·v·vᵀ`, writing both triangles from the same product so the
    /// result is exactly symmetric when `M` was.
    pub fn add_scaled_outer(&mut self, v: &[f64], c: f64) -> Result<()> {
        check_dim(self.order, v.len())?;
        let n = self.order;
        for i in 0..n {
            let ci = c * v[i];
            self[(i, i)] += ci * v[i];
            for j in (i + 1)..n {
                let delta = ci * v[j];
                self[(i, j)] += delta;
                self[(j, i)] += delta;
            }
        }
        Ok(())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.order, v.len())?;
        Ok((0..self.order)
            .map(|i| dot(self.row(i), v))
            .collect())
    }

    pub fn matmul(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        check_dim(self.order, other.order)?;
        let n = self.order;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.order, v.len())?;
        let n = self.order;
        let mut acc = 0.0;
        for i in 0..n {
            acc += v[i] * dot(self.row(i), v);
        }
        Ok(acc)
    }

    /// The square submatrix selecting `idx` for both rows and columns.
    pub fn principal_submatrix(&self, idx: &[usize]) -> SquareMatrix {
        let k = idx.len();
        let mut out = Self::zeros(k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// Maximum absolute deviation from the identity.
    pub fn max_identity_deviation(&self) -> f64 {
        let n = self.order;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_F / ‖other‖_F`.
    pub fn relative_frobenius_error(&self, other: &SquareMatrix) -> f64 {
        let diff: f64 = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        diff / other.frobenius_norm()
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.order + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.order + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor `L` with `M = L·Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: SquareMatrix,
}

impl Cholesky {
    pub fn factor(m: &SquareMatrix) -> Result<Self> {
        let n = m.order();
        let mut lower = SquareMatrix::zeros(n);
        for j in 0..n {
            let mut diag = m[(j, j)];
            for k in 0..j {
                diag -= lower[(j, k)] * lower[(j, k)];
            }
            if !(diag > PIVOT_TOLERANCE) {
                return Err(Error::NotPositiveDefinite { pivot: diag });
            }
            let ljj = diag.sqrt();
            lower[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= lower[(i, k)] * lower[(j, k)];
                }
                lower[(i, j)] = s / ljj;
            }
        }
        Ok(Self { lower })
    }

    pub fn order(&self) -> usize {
        self.lower.order()
    }

    pub fn determinant(&self) -> f64 {
        let d: f64 = (0..self.order()).map(|i| self.lower[(i, i)]).product();
        d * d
    }

    pub fn log_determinant(&self) -> f64 {
        2.0 * (0..self.order())
            .map(|i| self.lower[(i, i)].ln())
            .sum::<f64>()
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        check_dim(n, b.len())?;
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[(i, k)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] -= l[(k, i)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        Ok(y)
    }

    pub fn inverse(&self) -> SquareMatrix {
        let n = self.order();
        let mut inv = SquareMatrix::zeros(n);
        let mut unit = vec![0.0; n];
        for j in 0..n {
            unit.iter_mut().for_each(|u| *u = 0.0);
            unit[j] = 1.0;
            let col = self.solve(&unit).expect("order checked");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv.symmetrize();
        inv
    }
}

/// Returns `M + c·v·vᵀ`.
pub fn rank_one_symmetric_update(m: &SquareMatrix, v: &[f64], c: f64) -> Result<SquareMatrix> {
    let mut out = m.clone();
    out.add_scaled_outer(v, c)?;
    Ok(out)
}

/// Inverse of a symmetric positive-definite matrix through its Cholesky
/// factor.
pub fn invert_symmetric(m: &SquareMatrix) -> Result<SquareMatrix> {
    Ok(Cholesky::factor(m)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_matrix_eq(a: &SquareMatrix, b: &SquareMatrix, tol: f64) {
        assert_eq!(a.order(), b.order());
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn rank_one_examples() {
        let i2 = SquareMatrix::identity(2);
        let r = rank_one_symmetric_update(&i2, &[1.0, 0.0], 1.0).unwrap();
        assert_eq!(r, SquareMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap());

        let m = SquareMatrix::from_rows(&[&[3.0, 1.0], &[1.0, 5.0]]).unwrap();
        assert_eq!(rank_one_symmetric_update(&m, &[7.0, -2.0], 0.0).unwrap(), m);

        let r = rank_one_symmetric_update(&i2, &[1.0, 1.0], 0.5).unwrap();
        assert_eq!(r, SquareMatrix::from_rows(&[&[1.5, 0.5], &[0.5, 1.5]]).unwrap());
    }

    #[test]
    fn rank_one_dimension_mismatch() {
        let err = rank_one_symmetric_update(&SquareMatrix::identity(3), &[1.0], 1.0);
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 3, found: 1 })));
    }

    #[test]
    fn inverse_examples() {
        let i3 = SquareMatrix::identity(3);
        assert_matrix_eq(&invert_symmetric(&i3).unwrap(), &i3, 1e-15);

        let d = SquareMatrix::from_diagonal(&[4.0, 2.0]);
        let expect = SquareMatrix::from_diagonal(&[0.25, 0.5]);
        assert_matrix_eq(&invert_symmetric(&d).unwrap(), &expect, 1e-15);

        let m = SquareMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        // 2x2 closed form: [[d, -b], [-c, a]] / (ad - bc)
        let expect = SquareMatrix::from_rows(&[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 2.0 / 3.0]])
            .unwrap();
        assert_matrix_eq(&invert_symmetric(&m).unwrap(), &expect, 1e-14);
    }

    #[test]
    fn not_positive_definite_is_reported() {
        let m = SquareMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(matches!(invert_symmetric(&m), Err(Error::NotPositiveDefinite { .. })));
        let zero = SquareMatrix::zeros(2);
        assert!(matches!(invert_symmetric(&zero), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn determinant_and_solve() {
        let m = SquareMatrix::from_rows(&[&[4.0, 2.0, 0.4], &[2.0, 3.0, 0.5], &[0.4, 0.5, 2.0]])
            .unwrap();
        let c = Cholesky::factor(&m).unwrap();
        // cofactor expansion
        let det = 4.0 * (3.0 * 2.0 - 0.25) - 2.0 * (2.0 * 2.0 - 0.2) + 0.4 * (1.0 - 1.2);
        assert_abs_diff_eq!(c.determinant(), det, epsilon = 1e-12);
        assert_abs_diff_eq!(c.log_determinant(), det.ln(), epsilon = 1e-12);
        let x = c.solve(&[1.0, 2.0, 3.0]).unwrap();
        let back = m.mul_vec(&x).unwrap();
        for (b, e) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*b, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn upper_triangle_roundtrip() {
        let m = SquareMatrix::from_rows(&[&[4.0, 2.0, 0.4], &[2.0, 3.0, 0.5], &[0.4, 0.5, 2.0]])
            .unwrap();
        let up = m.upper_triangle();
        assert_eq!(up, vec![4.0, 2.0, 0.4, 3.0, 0.5, 2.0]);
        assert_eq!(SquareMatrix::from_upper_triangle(3, &up).unwrap(), m);
    }

    fn spd_strategy() -> impl Strategy<Value = SquareMatrix> {
        (1usize..=12).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(-1.0f64..1.0, n * n),
                0.1f64..2.0,
            )
                .prop_map(|(n, a, shift)| {
                    // A·Aᵀ + shift·I is SPD with condition number bounded by the shift.
                    let a = SquareMatrix::from_row_major(n, a).unwrap();
                    let mut m = a.matmul(&a.transpose()).unwrap();
                    for i in 0..n {
                        m[(i, i)] += shift;
                    }
                    m.symmetrize();
                    m
                })
        })
    }

    proptest! {
        #[test]
        fn inverse_is_involution(m in spd_strategy()) {
            let inv = invert_symmetric(&m).unwrap();
            prop_assert!(m.matmul(&inv).unwrap().max_identity_deviation() < 1e-8);
            let back = invert_symmetric(&inv).unwrap();
            prop_assert!(back.relative_frobenius_error(&m) < 1e-6);
        }

        #[test]
        fn rank_one_preserves_exact_symmetry(
            m in spd_strategy(),
            seed in prop::collection::vec(-3.0f64..3.0, 12),
            c in -2.0f64..2.0,
        ) {
            let v = &seed[..m.order()];
            let r = rank_one_symmetric_update(&m, v, c).unwrap();
            for i in 0..r.order() {
                for j in 0..r.order() {
                    prop_assert_eq!(r[(i, j)].to_bits(), r[(j, i)].to_bits());
                }
            }
        }
    }
}
