//! Simultaneous normalization of commuting vector fields with diagonal linear
//! parts, degree by degree in the phase variables.

use std::collections::BTreeSet;

use crate::algebra::{Jet, MultiIndex, Scalar};
use crate::error::{PnfError, Result};
use crate::polyvector::{DiffeoJet, PolyVector};
use crate::spectrum::{is_invariant, is_vector_resonant, resonant_monomials, LinearFamily, ResonanceKind, ResonanceReport};

/// Commuting phase vector fields `X_1, ..., X_p` on `n` phase and `k` parameter
/// variables, each vanishing on the parameter axis with linear part `S_j`.
#[derive(Clone, Debug)]
pub struct FieldFamily {
    fields: Vec<PolyVector>,
    linear: LinearFamily,
    order: u32,
}

impl FieldFamily {
    pub fn new(fields: Vec<PolyVector>, linear: LinearFamily) -> Result<Self> {
        if fields.len() != linear.p() {
            return Err(PnfError::Structural(format!("{} fields for {} eigenvalue rows", fields.len(), linear.p())));
        }
        let n = linear.n();
        let order = fields.iter().map(|f| f.order()).min().unwrap_or(0);
        for (j, f) in fields.iter().enumerate() {
            if f.degree() != 1 || f.n_phase() != n {
                return Err(PnfError::Structural(format!("field {} is not a vector field over {n} phase variables", j + 1)));
            }
            let comps = f.components();
            for (i, c) in comps.iter().enumerate() {
                if i >= n {
                    if !c.is_zero() {
                        return Err(PnfError::Structural(format!("field {} moves parameter x{}", j + 1, i + 1)));
                    }
                    continue;
                }
                if !c.at_phase_zero().is_zero() {
                    return Err(PnfError::Structural(format!("field {} does not vanish on the parameter axis", j + 1)));
                }
                let lin = c.phase_homogeneous(1);
                let expect = Jet::var(n, f.n_param(), c.order(), i).scale(linear.get(j, i));
                if lin != expect {
                    return Err(PnfError::Structural(format!(
                        "linear part of field {} differs from S_{} in component {}",
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        for a in 0..fields.len() {
            for b in a + 1..fields.len() {
                let br = fields[a].schouten(&fields[b]);
                if !br.truncate(order).is_zero() {
                    return Err(PnfError::NonCommuting { i: a + 1, j: b + 1, bracket: br.to_string() });
                }
            }
        }
        Ok(FieldFamily { fields, linear, order })
    }

    pub fn fields(&self) -> &[PolyVector] {
        &self.fields
    }

    pub fn linear(&self) -> &LinearFamily {
        &self.linear
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn n_param(&self) -> usize {
        self.fields[0].n_param()
    }
}

#[derive(Clone, Debug)]
pub struct NormalizationResult {
    pub diffeo: DiffeoJet,
    pub normal_forms: Vec<PolyVector>,
    pub resonance_support: ResonanceReport,
}

/// Finds `Φ` tangent to the identity with `Φ_* X_j` supported on monomials
/// resonant for every `j`. At a slot `(Q, i)` the smallest `j` with a nonzero
/// divisor `(Q, λ^j) − λ_{j,i}` fixes `φ_{i,Q}`; the other equations are checked.
pub fn normalize_family(fam: &FieldFamily) -> Result<NormalizationResult> {
    let n = fam.linear.n();
    let k = fam.n_param();
    let d = fam.order;
    let mut fields = fam.fields.clone();
    let mut total = DiffeoJet::identity(n, k, d);
    for m in 2..=d {
        let comps: Vec<Vec<Jet>> = fields.iter().map(|f| f.components()).collect();
        let mut phi: Vec<Jet> = (0..n + k).map(|_| Jet::zero(n, k, d)).collect();
        for i in 0..n {
            let parts: Vec<_> = comps.iter().map(|c| c[i].phase_homogeneous(m).phase_expansion()).collect();
            let keys: BTreeSet<MultiIndex> = parts.iter().flat_map(|p| p.keys().cloned()).collect();
            for q in keys {
                let deltas: Vec<Scalar> = (0..fam.linear.p()).map(|j| &q.dot(fam.linear.row(j)) - fam.linear.get(j, i)).collect();
                let Some(j0) = deltas.iter().position(|v| !v.is_zero()) else { continue };
                let zero = Jet::zero(n, k, d);
                let r = |j: usize| parts[j].get(&q).cloned().unwrap_or_else(|| zero.clone());
                let coef = r(j0).scale(&(-&Scalar::one() / &deltas[j0]));
                for (j, dj) in deltas.iter().enumerate() {
                    if j != j0 && !(&r(j) + &coef.scale(dj)).is_zero() {
                        return Err(PnfError::InconsistentCrossEquation {
                            field: j + 1,
                            component: i + 1,
                            monomial: q.pretty(),
                        });
                    }
                }
                phi[i] = &phi[i] + &coef.mul_monomial(&q);
            }
        }
        if phi.iter().all(|c| c.is_zero()) {
            continue;
        }
        let step = DiffeoJet::new((0..n + k).map(|v| &Jet::var(n, k, d, v) + &phi[v]).collect())?;
        let inv = step.inverse()?;
        fields = fields.iter().map(|f| step.pushforward_with_inverse(f, &inv)).collect::<Result<_>>()?;
        total = step.compose(&total);
    }
    let result = NormalizationResult {
        diffeo: total,
        normal_forms: fields,
        resonance_support: resonant_monomials(&fam.linear, ResonanceKind::Vector, d),
    };
    verify_normalization(fam, &result)?;
    Ok(result)
}

/// Re-checks the conjugacy with a fresh pushforward and scans the support.
pub fn verify_normalization(fam: &FieldFamily, r: &NormalizationResult) -> Result<()> {
    let inv = r.diffeo.inverse()?;
    for (j, (x, nf)) in fam.fields.iter().zip(&r.normal_forms).enumerate() {
        let pushed = r.diffeo.pushforward_with_inverse(x, &inv)?;
        if !pushed.eq_to(nf, fam.order) {
            return Err(PnfError::Verification(format!("pushforward of field {} differs from its normal form", j + 1)));
        }
        if let Some((i, q)) = nonresonant_term(&fam.linear, nf) {
            return Err(PnfError::Verification(format!(
                "normal form {} keeps the non-resonant term {} d{}",
                j + 1,
                q.pretty(),
                i + 1
            )));
        }
    }
    Ok(())
}

/// First term `x^Q ∂_i` with `|Q|_phase >= 2` that is not resonant for every `S_j`.
pub fn nonresonant_term(s: &LinearFamily, field: &PolyVector) -> Option<(usize, MultiIndex)> {
    let n = s.n();
    for (idx, c) in field.terms() {
        let i = idx[0];
        for q in c.terms().keys() {
            if q.partial_degree(0..n) >= 2 && (i >= n || !is_vector_resonant(s, q, i)) {
                return Some((i, q.clone()));
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct TheoremHypothesis {
    pub holds: bool,
    /// `a_{i,j}` with `NF_i = Σ_j a_{i,j} S_j`, when it exists.
    pub a: Option<Vec<Vec<Jet>>>,
    pub reason: Option<String>,
}

/// Decides whether each normal form is `Σ_j a_{i,j} S_j` with `a_{i,j}` built
/// from invariant monomials in `x'` (any parameter dependence) and
/// `a_{i,j}(0, x'') = δ_{i,j}`.
pub fn check_theorem_hypothesis(s: &LinearFamily, r: &NormalizationResult) -> TheoremHypothesis {
    match extract_coefficients(s, &r.normal_forms) {
        Ok(a) => TheoremHypothesis { holds: true, a: Some(a), reason: None },
        Err(reason) => TheoremHypothesis { holds: false, a: None, reason: Some(reason) },
    }
}

/// Solves `NF_i = Σ_j a_{i,j} S_j` and checks the shape of `a`.
pub fn extract_coefficients(s: &LinearFamily, nfs: &[PolyVector]) -> std::result::Result<Vec<Vec<Jet>>, String> {
    let n = s.n();
    let lt = s.matrix().transpose();
    let mut out = Vec::new();
    for (ii, nf) in nfs.iter().enumerate() {
        let k = nf.n_param();
        let d = nf.order();
        let zero = Jet::zero(n, k, d.saturating_sub(1));
        let mut quot = Vec::new();
        for i in 0..n {
            let c = nf.component(&[i]);
            let mut qj = zero.clone();
            for (q, v) in c.terms() {
                let Some(rest) = q.dec(i) else {
                    return Err(format!("component {} of field {} has the term {} not divisible by x{}", i + 1, ii + 1, q.pretty(), i + 1));
                };
                qj.add_term(rest, v.clone());
            }
            quot.push(qj);
        }
        for i in n..n + k {
            if !nf.component(&[i]).is_zero() {
                return Err(format!("field {} has a parameter component", ii + 1));
            }
        }
        let a = lt
            .solve(&quot, &zero)
            .ok_or_else(|| format!("field {} is not a combination of the S_j", ii + 1))?;
        for (j, aij) in a.iter().enumerate() {
            if let Some(q) = aij.terms().keys().find(|q| !is_invariant(s, q)) {
                return Err(format!("a_{},{} has the non-invariant monomial {}", ii + 1, j + 1, q.pretty()));
            }
            let at0 = aij.at_phase_zero();
            let expect = if ii == j { Jet::one(n, k, zero.order()) } else { zero.clone() };
            if at0 != expect {
                return Err(format!("a_{},{}(0, x'') = {} instead of {}", ii + 1, j + 1, at0, expect));
            }
        }
        out.push(a);
    }
    Ok(out)
}

/// `Σ_j a_j S_j` as a vector field (the converse of [`extract_coefficients`]).
pub fn combine(s: &LinearFamily, a: &[Jet]) -> PolyVector {
    let n = s.n();
    let k = a[0].n_param();
    let mut out = PolyVector::zero(1, n, k, a[0].order());
    for (j, aj) in a.iter().enumerate() {
        out = out.add(&s.s_field(j, k, aj.order()).mul_jet(aj));
    }
    out
}
