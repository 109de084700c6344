use crate::algebra::{Jet, Matrix, Scalar};
use crate::error::{PnfError, Result};
use crate::polyvector::PolyVector;

/// The eigenvalue matrix `λ` (p rows, n columns) of the diagonal family
/// `S_j = Σ_i λ_{j,i} x_i ∂_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFamily {
    n: usize,
    p: usize,
    lambda: Vec<Vec<Scalar>>,
}

impl LinearFamily {
    /// Rows must be linearly independent over `C`.
    pub fn new(lambda: Vec<Vec<Scalar>>) -> Result<Self> {
        let p = lambda.len();
        if p == 0 {
            return Err(PnfError::Structural("empty eigenvalue matrix".into()));
        }
        let n = lambda[0].len();
        if n == 0 || lambda.iter().any(|r| r.len() != n) {
            return Err(PnfError::Structural("ragged eigenvalue matrix".into()));
        }
        let rank = Matrix::from_rows(lambda.clone()).rank();
        if rank < p {
            return Err(PnfError::Structural(format!("eigenvalue rows are dependent (rank {rank} < {p})")));
        }
        Ok(LinearFamily { n, p, lambda })
    }

    /// Convenience constructor from integer rows.
    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `λ_{j,i}` with 0-based `j < p`, `i < n`.
    pub fn get(&self, j: usize, i: usize) -> &Scalar {
        &self.lambda[j][i]
    }

    /// Row `λ^j`, the eigenvalues of `S_j`.
    pub fn row(&self, j: usize) -> &[Scalar] {
        &self.lambda[j]
    }

    /// Column `(λ_{1,i}, ..., λ_{p,i})`, the coefficients of `Λ_i`.
    pub fn column(&self, i: usize) -> Vec<Scalar> {
        self.lambda.iter().map(|r| r[i].clone()).collect()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.lambda
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_rows(self.lambda.clone())
    }

    pub fn is_real(&self) -> bool {
        self.lambda.iter().flatten().all(|v| v.is_real())
    }

    /// `S_j` as a vector field on `n + n_param` variables.
    pub fn s_field(&self, j: usize, n_param: usize, order: u32) -> PolyVector {
        let nv = self.n + n_param;
        let comps: Vec<Jet> = (0..nv)
            .map(|i| {
                if i < self.n {
                    Jet::var(self.n, n_param, order, i).scale(&self.lambda[j][i])
                } else {
                    Jet::zero(self.n, n_param, order)
                }
            })
            .collect();
        PolyVector::vector_field(&comps)
    }

    /// `Λ_i = Σ_j λ_{j,i} ∂_{n+j}` on `n + p` variables.
    pub fn lambda_field(&self, i: usize, order: u32) -> PolyVector {
        let comps: Vec<Jet> = (0..self.n + self.p)
            .map(|k| {
                if k >= self.n {
                    Jet::constant(self.n, self.p, order, self.lambda[k - self.n][i].clone())
                } else {
                    Jet::zero(self.n, self.p, order)
                }
            })
            .collect();
        PolyVector::vector_field(&comps)
    }

    /// The linear Poisson structure `𝓛 = Σ_k S_k ∧ ∂_{n+k}` on `n + p` variables.
    pub fn linear_poisson(&self, order: u32) -> PolyVector {
        let mut out = PolyVector::zero(2, self.n, self.p, order);
        for k in 0..self.p {
            for i in 0..self.n {
                out.add_term(vec![i, self.n + k], Jet::var(self.n, self.p, order, i).scale(&self.lambda[k][i]));
            }
        }
        out
    }

    /// Same family with phase indices permuted: new column `c` is old column `perm[c]`.
    pub fn permute_columns(&self, perm: &[usize]) -> LinearFamily {
        LinearFamily {
            n: self.n,
            p: self.p,
            lambda: self.lambda.iter().map(|r| perm.iter().map(|&c| r[c].clone()).collect()).collect(),
        }
    }

    /// `λ' = B λ` for an invertible `p × p` matrix.
    pub fn transform_rows(&self, b: &Matrix) -> Result<LinearFamily> {
        LinearFamily::new(b.mul(&self.matrix()).row_vecs())
    }
}

impl Matrix {
    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows()).map(|i| self.row(i).to_vec()).collect()
    }
}
