//! Dense exact linear algebra over `Q(i)`.

use super::jet::Jet;
use super::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![Scalar::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<Scalar>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows);
        let mut m = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = &self.data[i][k] * &o.data[k][j];
                    m.data[i][j] += &t;
                }
            }
        }
        m
    }

    /// `M v` for a vector in any module over the scalars.
    pub fn apply<T: Module>(&self, v: &[T], zero: &T) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = zero.clone();
                for (j, x) in v.iter().enumerate() {
                    if !self.data[i][j].is_zero() {
                        acc = acc.add(&x.scale(&self.data[i][j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let r = rref(self);
        (r.pivots.len() == self.rows).then_some(r.transform)
    }

    /// Basis of `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let r = rref(self);
        let free: Vec<usize> = (0..self.cols).filter(|c| !r.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (k, &pc) in r.pivots.iter().enumerate() {
                    v[pc] = -r.reduced.get(k, f);
                }
                v
            })
            .collect()
    }

    /// Solves `M x = b`, setting free variables to zero. `None` if inconsistent.
    pub fn solve<T: Module>(&self, b: &[T], zero: &T) -> Option<Vec<T>> {
        rref(self).solve(b, zero)
    }
}

/// Something scalars act on linearly.
pub trait Module: Clone {
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, c: &Scalar) -> Self;
    fn is_zero(&self) -> bool;
}

impl Module for Scalar {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, c: &Scalar) -> Self {
        self * c
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl Module for Jet {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, c: &Scalar) -> Self {
        Jet::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        Jet::is_zero(self)
    }
}

/// Reduced row echelon form with the row operations recorded: `transform · M = reduced`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub transform: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve<T: Module>(&self, b: &[T], zero: &T) -> Option<Vec<T>> {
        let y = self.transform.apply(b, zero);
        if y[self.pivots.len()..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut x = vec![zero.clone(); self.reduced.cols];
        for (k, &pc) in self.pivots.iter().enumerate() {
            x[pc] = y[k].clone();
        }
        Some(x)
    }
}

pub fn rref(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut t = Matrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !a.data[i][c].is_zero()) else {
            continue;
        };
        a.data.swap(r, p);
        t.data.swap(r, p);
        let inv = a.data[r][c].inv().unwrap();
        for v in a.data[r].iter_mut().chain(t.data[r].iter_mut()) {
            *v = &*v * &inv;
        }
        for i in 0..m.rows {
            if i == r || a.data[i][c].is_zero() {
                continue;
            }
            let f = a.data[i][c].clone();
            for j in 0..m.cols {
                if !a.data[r][j].is_zero() {
                    let d = &f * &a.data[r][j];
                    a.data[i][j] -= &d;
                }
            }
            for j in 0..m.rows {
                if !t.data[r][j].is_zero() {
                    let d = &f * &t.data[r][j];
                    t.data[i][j] -= &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { reduced: a, transform: t, pivots }
}
