//! Dense square matrices with Gaussian elimination over any [`Scalar`].
//!
//! nalgebra covers the float eigenvalue work; determinants and inverses are
//! needed over exact rationals as well, so elimination lives here.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a.clone() * other[(k, j)].clone();
                    let cell = &mut out[(i, j)];
                    *cell = cell.clone() + prod;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    /// Submatrix with the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DenseMatrix<T> {
        assert_eq!(rows.len(), cols.len());
        Self::from_fn(rows.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn lu(&self) -> Lu<T> {
        Lu::new(self.clone())
    }

    pub fn det(&self) -> T {
        self.lu().det()
    }

    /// Inverse, or `None` when singular (exactly, or below `1e-300` pivots
    /// for floats).
    pub fn inverse(&self) -> Option<Self> {
        let lu = self.lu();
        if lu.is_singular() {
            return None;
        }
        let n = self.n;
        let mut inv = Self::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            for (i, v) in e.iter_mut().enumerate() {
                *v = if i == j { T::one() } else { T::zero() };
            }
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i].clone();
            }
        }
        Some(inv)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Row-pivoted LU factorization `P A = L U` stored in place.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    parity: bool,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    fn new(mut a: DenseMatrix<T>) -> Self {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = false;
        let mut singular = false;
        for k in 0..n {
            let best = if T::EXACT {
                (k..n).find(|&i| !a[(i, k)].is_zero()).unwrap_or(k)
            } else {
                (k..n)
                    .max_by(|&i, &j| a[(i, k)].magnitude().total_cmp(&a[(j, k)].magnitude()).then(j.cmp(&i)))
                    .unwrap_or(k)
            };
            if a[(best, k)].is_zero() || (!T::EXACT && a[(best, k)].magnitude() < 1e-300) {
                singular = true;
                continue;
            }
            if best != k {
                for j in 0..n {
                    a.data.swap(k * n + j, best * n + j);
                }
                perm.swap(k, best);
                parity = !parity;
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone() / pivot.clone();
                for j in k + 1..n {
                    let delta = factor.clone() * a[(k, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - delta;
                }
                a[(i, k)] = factor;
            }
        }
        Self { lu: a, perm, parity, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        let mut d = T::one();
        for i in 0..self.lu.n {
            d = d * self.lu[(i, i)].clone();
        }
        if self.parity {
            -d
        } else {
            d
        }
    }

    /// Solves `A x = b`. Meaningless when singular.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let delta = self.lu[(i, j)].clone() * x[j].clone();
                x[i] = x[i].clone() - delta;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let delta = self.lu[(i, j)].clone() * x[j].clone();
                x[i] = x[i].clone() - delta;
            }
            x[i] = x[i].clone() / self.lu[(i, i)].clone();
        }
        x
    }
}

/// Determinant of a small matrix by permutation expansion; used as an oracle.
pub fn det_by_permutations<T: Scalar>(m: &DenseMatrix<T>) -> T {
    fn rec<T: Scalar>(m: &DenseMatrix<T>, row: usize, used: &mut Vec<bool>, acc: T, sign: bool, out: &mut T) {
        let n = m.size();
        if row == n {
            *out = out.clone() + if sign { -acc } else { acc };
            return;
        }
        for c in 0..n {
            if used[c] || m[(row, c)].is_zero() {
                continue;
            }
            let inversions = used[c + 1..].iter().filter(|&&u| u).count();
            used[c] = true;
            rec(m, row + 1, used, acc.clone() * m[(row, c)].clone(), sign ^ (inversions % 2 == 1), out);
            used[c] = false;
        }
    }
    let mut out = T::zero();
    let mut used = vec![false; m.size()];
    rec(m, 0, &mut used, T::one(), false, &mut out);
    out
}
