use num::{BigRational, One, Signed, Zero};

/// Dense matrix over the rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigRational>]) -> Self {
        let mut m = QMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not chain");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !v[j].is_zero())
                    .fold(BigRational::zero(), |s, j| s + &self[(i, j)] * &v[j])
            })
            .collect()
    }

    pub fn trace(&self) -> BigRational {
        (0..self.rows.min(self.cols)).fold(BigRational::zero(), |s, i| s + &self[(i, i)])
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip();
            for j in col..m.cols {
                let v = &m[(row, j)] * &inv;
                m[(row, j)] = v;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for j in col..m.cols {
                        let v = &m[(row, j)] * &factor;
                        m[(r, j)] -= v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Solves `self * x = b` when the columns are independent and `b` lies
    /// in their span.
    pub fn solve_exact(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        let mut cols: Vec<Vec<BigRational>> = (0..self.cols).map(|j| self.column(j)).collect();
        cols.push(b.to_vec());
        let aug = QMatrix::from_columns(self.rows, &cols);
        let (r, pivots) = aug.rref();
        if pivots.len() != self.cols || pivots.contains(&self.cols) {
            return None;
        }
        Some((0..self.cols).map(|i| r[(i, self.cols)].clone()).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn max_abs(&self) -> BigRational {
        self.data
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn mat(rows: usize, v: &[i64]) -> QMatrix {
        let cols = v.len() / rows;
        let mut m = QMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = q(v[i * cols + j]);
            }
        }
        m
    }

    #[test]
    fn rank_kernel_and_solve() {
        let m = mat(3, &[1, 2, 3, 2, 4, 6, 1, 0, 1]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
        let a = mat(3, &[1, 0, 0, 1, 1, 1]);
        let x = a.solve_exact(&[q(2), q(3), q(5)]).unwrap();
        assert_eq!(x, vec![q(2), q(3)]);
        assert!(a.solve_exact(&[q(2), q(3), q(4)]).is_none());
    }

    #[test]
    fn product_and_trace() {
        let a = mat(2, &[1, 2, 3, 4]);
        let b = mat(2, &[0, 1, 1, 0]);
        assert_eq!(a.mul(&b), mat(2, &[2, 1, 4, 3]));
        assert_eq!(a.trace(), q(5));
    }
}
