use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::family::LinearFamily;
use crate::algebra::{MultiIndex, Scalar};

/// One term of the small-divisor sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaEntry {
    pub k: u32,
    /// Exact `ω_k²` as a rational string.
    pub omega_squared: String,
    /// The minimizing monomial and target index (1-based).
    pub argmin_monomial: Vec<u32>,
    pub argmin_target: usize,
    /// Float rendering of `ω_k` (diagnostic).
    pub omega: f64,
    /// `Σ_{m <= k} −log ω_m / 2^m` (diagnostic).
    pub partial_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaReport {
    pub k_max: u32,
    pub monomials_scanned: u64,
    pub warning: Option<String>,
    pub entries: Vec<OmegaEntry>,
}

const LARGE_SCAN: u64 = 2_000_000;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// `ω_k = min over 2 <= |Q| <= 2^k and targets j of max_i |(Q, λ^i) − λ_{i,j}|`,
/// restricted to nonzero maxima. Comparisons use exact squared moduli.
pub fn omega_sequence(s: &LinearFamily, k_max: u32) -> OmegaReport {
    let n = s.n();
    let top = 1u32 << k_max.min(30);
    let total = binomial(top as u64 + n as u64, n as u64);
    let warning = (total > LARGE_SCAN).then(|| format!("scanning about {total} monomials"));
    let mut best: Option<(BigRational, MultiIndex, usize)> = None;
    let mut entries = Vec::new();
    let mut scanned = 0u64;
    let mut partial = 0.0f64;
    let mut lo = 2u32;
    for k in 1..=k_max {
        let hi = 1u32 << k;
        for deg in lo..=hi {
            for q in MultiIndex::of_degree(n, deg) {
                scanned += 1;
                let dots: Vec<Scalar> = (0..s.p()).map(|i| q.dot(s.row(i))).collect();
                for j in 0..n {
                    let m = (0..s.p())
                        .map(|i| (&dots[i] - s.get(i, j)).norm_sqr())
                        .max()
                        .unwrap();
                    if num_traits::Zero::is_zero(&m) {
                        continue;
                    }
                    if best.as_ref().is_none_or(|(b, _, _)| m < *b) {
                        best = Some((m, q.clone(), j));
                    }
                }
            }
        }
        lo = hi + 1;
        if let Some((m, q, j)) = &best {
            let sq = m.to_f64().unwrap_or(f64::NAN);
            let omega = sq.sqrt();
            partial += -omega.ln() / f64::from(hi);
            entries.push(OmegaEntry {
                k,
                omega_squared: m.to_string(),
                argmin_monomial: q.exps().to_vec(),
                argmin_target: j + 1,
                omega,
                partial_sum: partial,
            });
        }
    }
    OmegaReport { k_max, monomials_scanned: scanned, warning, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_spectra_have_unit_divisors() {
        for rows in [&[2i64, 3][..], &[1, -1][..]] {
            let r = omega_sequence(&LinearFamily::from_ints(&[rows]).unwrap(), 3);
            assert_eq!(r.entries.len(), 3);
            assert!(r.entries.iter().all(|e| e.omega_squared == "1" && e.partial_sum == 0.0));
        }
    }

    #[test]
    fn monotone_in_k() {
        let s = LinearFamily::new(vec![vec![Scalar::from_ratio(1, 3), Scalar::complex((1, 2), (1, 5))]]).unwrap();
        let r = omega_sequence(&s, 4);
        for w in r.entries.windows(2) {
            assert!(w[1].omega <= w[0].omega);
        }
    }
}
