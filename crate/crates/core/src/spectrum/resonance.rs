use serde::Serialize;

use super::family::LinearFamily;
use crate::algebra::{MultiIndex, Scalar};
use crate::error::{PnfError, Result};

/// `((Q, λ^j) − λ_{j,i})_{j=1..p}` for a phase multi-index `Q`.
pub fn weight(s: &LinearFamily, q: &MultiIndex, i: usize) -> Result<Vec<Scalar>> {
    if i >= s.n() {
        return Err(PnfError::Structural(format!("target index {} out of range 1..={}", i + 1, s.n())));
    }
    if q.nvars() < s.n() {
        return Err(PnfError::Structural("multi-index shorter than the phase dimension".into()));
    }
    Ok((0..s.p()).map(|j| &q.dot(s.row(j)) - s.get(j, i)).collect())
}

fn phase_dot(s: &LinearFamily, q: &MultiIndex, j: usize) -> Scalar {
    let r = s.row(j);
    let mut acc = Scalar::zero();
    for (k, v) in r.iter().enumerate() {
        let e = q.get(k);
        if e != 0 {
            acc += &(v * &Scalar::from_int(e as i64));
        }
    }
    acc
}

/// `(Q, λ^j) = 0` for all `j` (phase exponents only are read).
pub fn is_invariant(s: &LinearFamily, q: &MultiIndex) -> bool {
    (0..s.p()).all(|j| phase_dot(s, q, j).is_zero())
}

/// `(Q, λ^j) = λ_{j,i}` for all `j`.
pub fn is_vector_resonant(s: &LinearFamily, q: &MultiIndex, i: usize) -> bool {
    (0..s.p()).all(|j| phase_dot(s, q, j) == *s.get(j, i))
}

/// `(Q, λ^r) = λ_{r,i} + λ_{r,k}` for all `r`.
pub fn is_bivector_resonant(s: &LinearFamily, q: &MultiIndex, i: usize, k: usize) -> bool {
    (0..s.p()).all(|r| phase_dot(s, q, r) == s.get(r, i) + s.get(r, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceKind {
    Function,
    Vector,
    Bivector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResonanceEntry {
    /// Phase exponents.
    pub monomial: Vec<u32>,
    /// Empty for functions, `[i]` for vectors, `[i, k]` for bivectors (1-based).
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResonanceReport {
    pub kind: ResonanceKind,
    pub degree_bound: u32,
    pub entries: Vec<ResonanceEntry>,
}

impl ResonanceReport {
    pub fn contains(&self, q: &[u32], targets: &[usize]) -> bool {
        self.entries.iter().any(|e| e.monomial == q && e.targets == targets)
    }
}

/// Exhaustive list of resonant monomials with `2 <= |Q| <= d`
/// (`1 <= |Q| <= d` for functions).
pub fn resonant_monomials(s: &LinearFamily, kind: ResonanceKind, d: u32) -> ResonanceReport {
    let n = s.n();
    let lo = if kind == ResonanceKind::Function { 1 } else { 2 };
    let mut entries = Vec::new();
    for q in MultiIndex::up_to_degree(n, lo, d) {
        match kind {
            ResonanceKind::Function => {
                if is_invariant(s, &q) {
                    entries.push(ResonanceEntry { monomial: q.exps().to_vec(), targets: vec![] });
                }
            }
            ResonanceKind::Vector => {
                for i in 0..n {
                    if is_vector_resonant(s, &q, i) {
                        entries.push(ResonanceEntry { monomial: q.exps().to_vec(), targets: vec![i + 1] });
                    }
                }
            }
            ResonanceKind::Bivector => {
                for i in 0..n {
                    for k in i + 1..n {
                        if is_bivector_resonant(s, &q, i, k) {
                            entries.push(ResonanceEntry { monomial: q.exps().to_vec(), targets: vec![i + 1, k + 1] });
                        }
                    }
                }
            }
        }
    }
    ResonanceReport { kind, degree_bound: d, entries }
}
