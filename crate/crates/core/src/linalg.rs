//! Small dense linear algebra used by the simplex solver and recombination.
//!
//! Sizes here are at most a few hundred columns by a few dozen rows, so
//! everything is row-major `Vec<T>` with straightforward elimination.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `eps * max|a|`.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T], eps: T) -> Option<Vec<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    assert_eq!(n, b.len());
    let scale = a.max_abs().max(T::one());
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, m.get(i, k).abs()))
            .fold((k, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= eps * scale {
            return None;
        }
        m.swap_rows(k, p);
        rhs.swap(k, p);
        let pivot = m.get(k, k);
        for i in k + 1..n {
            let f = m.get(i, k) / pivot;
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let v = m.get(i, j) - f * m.get(k, j);
                m.set(i, j, v);
            }
            rhs[i] = rhs[i] - f * rhs[k];
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s = s - m.get(k, j) * x[j];
        }
        x[k] = s / m.get(k, k);
    }
    Some(x)
}

/// Solves `aᵀ y = c` for square `a`.
pub fn solve_transposed<T: Scalar>(a: &Matrix<T>, c: &[T], eps: T) -> Option<Vec<T>> {
    let at = Matrix::from_fn(a.cols(), a.rows(), |i, j| a.get(j, i));
    solve(&at, c, eps)
}

/// Null space basis from the reduced row echelon form.
///
/// Returns one vector per free column, in increasing column order, together
/// with the numerical rank. Each basis vector has a 1 in its own free column
/// and 0 in every other free column.
pub fn null_space<T: Scalar>(a: &Matrix<T>, eps: T) -> (Vec<Vec<T>>, usize) {
    let (rows, cols) = (a.rows(), a.cols());
    let scale = a.max_abs().max(T::min_positive_value());
    let mut m = a.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, m.get(i, c).abs()))
            .fold((r, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= eps * scale {
            continue;
        }
        m.swap_rows(r, p);
        let pivot = m.get(r, c);
        for j in c..cols {
            let v = m.get(r, j) / pivot;
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c);
            if f == T::zero() {
                continue;
            }
            for j in c..cols {
                let v = m.get(i, j) - f * m.get(r, j);
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let basis = (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![T::zero(); cols];
            v[free] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(row, free);
            }
            v
        })
        .collect();
    (basis, rank)
}

/// Least squares `min ‖a x − b‖` for `rows ≥ cols` via Householder QR.
/// Returns `None` if `a` is numerically column-rank deficient.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, b: &[T], eps: T) -> Option<Vec<T>> {
    let (rows, cols) = (a.rows(), a.cols());
    if rows < cols {
        return None;
    }
    let scale = a.max_abs().max(T::min_positive_value());
    let mut r = a.clone();
    let mut qtb = b.to_vec();
    for k in 0..cols {
        let norm = (k..rows)
            .map(|i| r.get(i, k) * r.get(i, k))
            .sum::<T>()
            .sqrt();
        if norm <= eps * scale {
            return None;
        }
        let alpha = if r.get(k, k) > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|i| r.get(i, k)).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|x| *x * *x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::one() + T::one();
        for j in k..cols {
            let dot: T = (k..rows).map(|i| v[i - k] * r.get(i, j)).sum();
            let f = two * dot / vnorm2;
            for i in k..rows {
                let val = r.get(i, j) - f * v[i - k];
                r.set(i, j, val);
            }
        }
        let dot: T = (k..rows).map(|i| v[i - k] * qtb[i]).sum();
        let f = two * dot / vnorm2;
        for i in k..rows {
            qtb[i] = qtb[i] - f * v[i - k];
        }
    }
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let mut s = qtb[k];
        for j in k + 1..cols {
            s = s - r.get(k, j) * x[j];
        }
        x[k] = s / r.get(k, k);
    }
    Some(x)
}
