use serde::Serialize;

use super::family::LinearFamily;
use crate::algebra::{Matrix, MultiIndex, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisVerdict {
    pub pass: bool,
    /// 1-based indices of the first failing tuple.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NonResonance {
    /// No integer relation exists at all (certified exactly).
    Certified { reason: String },
    /// No admissible relation up to the search bound.
    Bounded { degree_bound: u32 },
    /// An admissible relation `Σ q_i λ_{j,i} = 0` for every `j`.
    Resonant { q: Vec<i64> },
}

impl NonResonance {
    pub fn is_resonant(&self) -> bool {
        matches!(self, NonResonance::Resonant { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesesReport {
    pub h1: HypothesisVerdict,
    pub h2: HypothesisVerdict,
    pub h3: HypothesisVerdict,
    pub h4: HypothesisVerdict,
    pub non_resonance: NonResonance,
}

impl HypothesesReport {
    pub fn h_all(&self) -> bool {
        self.h1.pass && self.h2.pass && self.h3.pass && self.h4.pass
    }

    /// Names of the failing items among H1–H4.
    pub fn failures(&self) -> Vec<&'static str> {
        [("H1", &self.h1), ("H2", &self.h2), ("H3", &self.h3), ("H4", &self.h4)]
            .into_iter()
            .filter(|(_, v)| !v.pass)
            .map(|(n, _)| n)
            .collect()
    }
}

fn verdict<I: Iterator<Item = Vec<usize>>>(tuples: I, ok: impl Fn(&[usize]) -> bool) -> HypothesisVerdict {
    for t in tuples {
        if !ok(&t) {
            return HypothesisVerdict { pass: false, witness: Some(t.iter().map(|i| i + 1).collect()) };
        }
    }
    HypothesisVerdict { pass: true, witness: None }
}

/// H1–H4 and a non-resonance verdict for `𝓛`, searched up to `d_nonres`.
pub fn hypotheses_report(s: &LinearFamily, d_nonres: u32) -> HypothesesReport {
    let n = s.n();
    let p = s.p();
    let l = |j: usize, i: usize| s.get(j, i).clone();
    let pairs = || (0..n).flat_map(move |i| (0..n).map(move |k| vec![i, k]));
    let h1 = verdict(pairs().filter(|t| t[0] < t[1]), |t| (0..p).any(|j| l(j, t[0]) != l(j, t[1])));
    let h2 = verdict((0..n).map(|i| vec![i]), |t| (0..p).any(|j| !l(j, t[0]).is_zero()));
    let h3 = verdict(pairs().filter(|t| t[0] <= t[1]), |t| (0..p).any(|j| !(l(j, t[0]) + l(j, t[1])).is_zero()));
    let triples = (0..n).flat_map(move |i| (i..n).flat_map(move |k| (0..n).map(move |m| vec![i, k, m])));
    let h4 = verdict(triples, |t| (0..p).any(|j| l(j, t[0]) + l(j, t[1]) != l(j, t[2])));
    HypothesesReport { h1, h2, h3, h4, non_resonance: non_resonance(s, d_nonres) }
}

/// Integer matrix whose kernel is the set of integer relations: real and
/// imaginary parts stacked.
fn relation_matrix(s: &LinearFamily) -> Matrix {
    let mut rows = Vec::new();
    for j in 0..s.p() {
        rows.push(s.row(j).iter().map(|v| Scalar::from_rational(v.re().clone())).collect());
        if !s.row(j).iter().all(|v| v.is_real()) {
            rows.push(s.row(j).iter().map(|v| Scalar::from_rational(v.im().clone())).collect());
        }
    }
    Matrix::from_rows(rows)
}

fn relation_holds(s: &LinearFamily, q: &[i64]) -> bool {
    (0..s.p()).all(|j| {
        let mut acc = Scalar::zero();
        for (i, &qi) in q.iter().enumerate() {
            acc += &(s.get(j, i) * &Scalar::from_int(qi));
        }
        acc.is_zero()
    })
}

fn admissible(q: &[i64]) -> bool {
    q.iter().any(|&v| v != 0) && q.iter().all(|&v| v >= -1) && q.iter().filter(|&&v| v == -1).count() <= 2
}

fn non_resonance(s: &LinearFamily, bound: u32) -> NonResonance {
    let n = s.n();
    let kernel = relation_matrix(s).kernel();
    if kernel.is_empty() {
        return NonResonance::Certified { reason: "no integer relation among the eigenvalue columns".into() };
    }
    if kernel.len() == 1 {
        // every integer relation is t·v for the primitive vector v
        let v = primitive_integer(&kernel[0]);
        for t in [1i64, -1] {
            let q: Vec<i64> = v.iter().map(|x| t * x).collect();
            if admissible(&q) {
                return NonResonance::Resonant { q };
            }
        }
        // |t| >= 2 only pushes negative entries further below -1
        return NonResonance::Certified {
            reason: "all relations are multiples of one primitive vector, none admissible".into(),
        };
    }
    // bounded search: up to two entries equal to -1, the rest non-negative
    let mut negs: Vec<Vec<usize>> = vec![vec![]];
    for a in 0..n {
        negs.push(vec![a]);
        for b in a + 1..n {
            negs.push(vec![a, b]);
        }
    }
    for neg in &negs {
        let free: Vec<usize> = (0..n).filter(|i| !neg.contains(i)).collect();
        for deg in 0..=bound {
            for pos in MultiIndex::of_degree(free.len(), deg) {
                let mut q = vec![0i64; n];
                for &i in neg {
                    q[i] = -1;
                }
                for (k, &i) in free.iter().enumerate() {
                    q[i] = pos.get(k) as i64;
                }
                if admissible(&q) && relation_holds(s, &q) {
                    return NonResonance::Resonant { q };
                }
            }
        }
    }
    NonResonance::Bounded { degree_bound: bound }
}

/// Scales a rational vector to a primitive integer vector.
pub(crate) fn primitive_integer(v: &[Scalar]) -> Vec<i64> {
    use num_integer::Integer;
    use num_traits::{One, ToPrimitive, Zero};
    let mut l = num_bigint::BigInt::one();
    for x in v {
        l = l.lcm(x.re().denom());
    }
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x.re() * &l).to_integer()).collect();
    let mut g = num_bigint::BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return vec![0; v.len()];
    }
    ints.iter().map(|x| (x / &g).to_i64().expect("small relation")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = hypotheses_report(&LinearFamily::from_ints(&[&[2, 3]]).unwrap(), 8);
        assert!(r.h_all());
        assert!(!r.non_resonance.is_resonant());

        let r = hypotheses_report(&LinearFamily::from_ints(&[&[1, -1]]).unwrap(), 8);
        assert!(!r.h3.pass);
        assert_eq!(r.h3.witness, Some(vec![1, 2]));

        let r = hypotheses_report(&LinearFamily::from_ints(&[&[1, 3]]).unwrap(), 8);
        assert!(r.h_all());
        assert_eq!(r.non_resonance, NonResonance::Resonant { q: vec![3, -1] });
    }

    #[test]
    fn certificates() {
        let s = LinearFamily::from_ints(&[&[1, 0], &[0, 1]]).unwrap();
        assert!(matches!(hypotheses_report(&s, 4).non_resonance, NonResonance::Certified { .. }));
        // 2q1 + 3q2 = 0 only along (3, -2)
        let s = LinearFamily::from_ints(&[&[2, 3]]).unwrap();
        assert!(matches!(hypotheses_report(&s, 4).non_resonance, NonResonance::Certified { .. }));
    }
}
