use serde::Serialize;

use super::family::LinearFamily;
use super::hypotheses::primitive_integer;
use super::resonance::is_invariant;
use crate::algebra::{Matrix, MultiIndex, Scalar};

/// Monomial generators of the ring of functions killed by every `S_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantRing {
    /// Exponent vectors `R_1, ..., R_t`, pairwise incomparable.
    pub generators: Vec<Vec<u32>>,
    pub degree_bound: u32,
    /// True when the bound provably reaches every generator.
    pub complete: bool,
    /// Primitive vectors on the extreme rays of the solution cone.
    pub extreme_rays: Vec<Vec<u32>>,
    /// Degree up to which generators can occur (from the ray data).
    pub certified_degree: u32,
}

impl InvariantRing {
    pub fn generator_indices(&self, n_total: usize) -> Vec<MultiIndex> {
        self.generators
            .iter()
            .map(|g| {
                let mut e = g.clone();
                e.resize(n_total, 0);
                MultiIndex::new(e)
            })
            .collect()
    }

    /// Whether `q` (phase part) is a product of generators.
    pub fn is_generated(&self, q: &[u32]) -> bool {
        if q.iter().all(|&e| e == 0) {
            return true;
        }
        self.generators.iter().any(|g| {
            g.iter().zip(q).all(|(a, b)| a <= b) && {
                let rest: Vec<u32> = q.iter().zip(g).map(|(b, a)| b - a).collect();
                self.is_generated(&rest)
            }
        })
    }
}

/// Real matrix whose non-negative kernel is the invariant cone.
fn cone_matrix(s: &LinearFamily) -> Matrix {
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for j in 0..s.p() {
        rows.push(s.row(j).iter().map(|v| Scalar::from_rational(v.re().clone())).collect());
        rows.push(s.row(j).iter().map(|v| Scalar::from_rational(v.im().clone())).collect());
    }
    Matrix::from_rows(rows)
}

fn submatrix(m: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_rows((0..m.rows()).map(|i| cols.iter().map(|&c| m.get(i, c).clone()).collect()).collect())
}

/// Extreme rays of `{q >= 0 : (q, λ^j) = 0}`: minimal supports whose kernel is
/// one-dimensional and spanned by a positive vector.
pub fn extreme_rays(s: &LinearFamily) -> Vec<Vec<u32>> {
    let n = s.n();
    let a = cone_matrix(s);
    let mut rays: Vec<Vec<u32>> = Vec::new();
    let mut supports: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    supports.sort_by_key(|t: &Vec<usize>| t.len());
    for t in supports {
        let k = submatrix(&a, &t).kernel();
        if k.len() != 1 {
            continue;
        }
        let v = primitive_integer(&k[0]);
        let sign = if v.iter().all(|&x| x > 0) {
            1
        } else if v.iter().all(|&x| x < 0) {
            -1
        } else {
            continue;
        };
        let mut full = vec![0u32; n];
        for (c, &i) in t.iter().enumerate() {
            full[i] = (sign * v[c]) as u32;
        }
        if !rays.contains(&full) {
            rays.push(full);
        }
    }
    rays
}

/// Minimal generating monomials with `1 <= |Q| <= d`, plus a completeness flag.
///
/// Every Hilbert basis element is a ray vector or lies in the half-open
/// parallelepiped of at most `r = dim` rays, so its degree is at most
/// `max(max ray degree, (sum of the r largest ray degrees) − 1)`.
pub fn invariant_generators(s: &LinearFamily, d: u32) -> InvariantRing {
    let n = s.n();
    let mut gens: Vec<MultiIndex> = Vec::new();
    for q in MultiIndex::up_to_degree(n, 1, d) {
        if !is_invariant(s, &q) {
            continue;
        }
        if gens.iter().any(|g| g.divides(&q)) {
            continue;
        }
        gens.push(q);
    }
    let rays = extreme_rays(s);
    let certified = if rays.is_empty() {
        0
    } else {
        let dim = Matrix::from_rows(
            rays.iter().map(|r| r.iter().map(|&e| Scalar::from_int(e as i64)).collect()).collect(),
        )
        .rank();
        let mut degs: Vec<u32> = rays.iter().map(|r| r.iter().sum()).collect();
        degs.sort_unstable_by(|a, b| b.cmp(a));
        let top: u32 = degs[..dim].iter().sum();
        degs[0].max(top.saturating_sub(1))
    };
    InvariantRing {
        generators: gens.iter().map(|g| g.exps().to_vec()).collect(),
        degree_bound: d,
        complete: d >= certified,
        extreme_rays: rays,
        certified_degree: certified,
    }
}
