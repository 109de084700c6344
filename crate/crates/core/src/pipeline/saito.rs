use std::collections::BTreeMap;

use crate::algebra::{Jet, Matrix, MultiIndex, Scalar};
use crate::error::{PnfError, Result};
use crate::polyvector::PolyVector;
use crate::spectrum::{is_vector_resonant, LinearFamily};

/// `β` with `V = Σ_m β_m S_m`, read off component by component
/// (`V^i = x_i Σ_m λ_{m,i} β_m`). The result has order `order(V) - 1`.
pub fn s_coefficients(s: &LinearFamily, v: &PolyVector) -> Result<Vec<Jet>> {
    let n = s.n();
    let (k, d) = (v.n_param(), v.order().saturating_sub(1));
    let zero = Jet::zero(n, k, d);
    let mut quot = Vec::with_capacity(n);
    for i in 0..v.nvars() {
        let c = v.component(&[i]);
        if i >= n {
            if !c.is_zero() {
                return Err(PnfError::NoDivision(format!("field has a parameter component along x{}", i + 1)));
            }
            continue;
        }
        let mut q = zero.clone();
        for (m, a) in c.terms() {
            let Some(rest) = m.dec(i) else {
                return Err(PnfError::NoDivision(format!("component {} has {} not divisible by x{}", i + 1, m.pretty(), i + 1)));
            };
            q.add_term(rest, a.clone());
        }
        quot.push(q.truncate(d));
    }
    s.matrix().transpose().solve(&quot, &zero).ok_or_else(|| PnfError::NoDivision("field is not a combination of the S_j".into()))
}

/// Solves `M y = b` over jets when `M(0)` is invertible.
pub(crate) fn solve_unit_system(m: &[Vec<Jet>], b: &[Jet]) -> Result<Vec<Jet>> {
    let p = b.len();
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut rhs: Vec<Jet> = b.to_vec();
    for col in 0..p {
        let piv = (col..p)
            .find(|&r| !a[r][col].constant_term().is_zero())
            .ok_or_else(|| PnfError::NoDivision("coefficient matrix is singular at the origin".into()))?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        let inv = a[col][col].recip()?;
        a[col] = a[col].iter().map(|x| x * &inv).collect();
        rhs[col] = &rhs[col] * &inv;
        for r in 0..p {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                a[r] = a[r].iter().zip(&a[col]).map(|(x, y)| x - &(&f * y)).collect();
                rhs[r] = &rhs[r] - &(&f * &rhs[col]);
            }
        }
    }
    Ok(rhs)
}

/// `θ` with `V = Σ_l θ_l X_l`, for fields `X_l = Σ_m a_{l,m} S_m` with
/// `a(0) = I`. Exact to order `order - 1`.
pub fn divide_field(s: &LinearFamily, v: &PolyVector, xs: &[PolyVector]) -> Result<Vec<Jet>> {
    let beta = s_coefficients(s, v)?;
    let a: Vec<Vec<Jet>> = xs.iter().map(|x| s_coefficients(s, x)).collect::<Result<_>>()?;
    // Σ_l θ_l a_{l,m} = β_m
    let p = xs.len();
    let at: Vec<Vec<Jet>> = (0..p).map(|m| (0..p).map(|l| a[l][m].clone()).collect()).collect();
    let theta = solve_unit_system(&at, &beta)?;
    let d = v.order().saturating_sub(1);
    let mut back = v.zero_like(1).truncate(d);
    for (t, x) in theta.iter().zip(xs) {
        back = back.add(&x.mul_jet(t));
    }
    if !back.eq_to(&v.truncate(d), d) {
        return Err(PnfError::Verification("field division does not reconstruct the field".into()));
    }
    Ok(theta)
}

/// Finds phase vector fields `A_i`, vanishing on the parameter axis and of
/// weight zero for every `S_j`, with `T = Σ_i X_i ∧ A_i` up to the order.
/// Works degree by degree in the phase variables: at phase degree `m` the
/// unknown `A_i^{(m-1)}` enters through `Σ_i S_i ∧ A_i^{(m-1)}` and the
/// higher terms of `X_i` act on already computed degrees. Free unknowns of
/// each linear system are set to zero.
pub fn saito_divide(s: &LinearFamily, t: &PolyVector, xs: &[PolyVector]) -> Result<Vec<PolyVector>> {
    let n = s.n();
    let (k, d) = (t.n_param(), t.order());
    let nv = n + k;
    if t.degree() != 2 || xs.len() != s.p() {
        return Err(PnfError::Structural("saito division expects a bivector and p fields".into()));
    }
    if let Some((idx, _)) = t.terms().iter().find(|(idx, _)| idx[1] >= n) {
        return Err(PnfError::NoDivision(format!("bivector has a parameter slot {:?}", idx)));
    }
    if t.terms().values().any(|c| c.min_phase_degree().is_some_and(|m| m < 2)) {
        return Err(PnfError::NoDivision("bivector is not of order 2 in the phase variables".into()));
    }
    let mut top = t.clone();
    for x in xs {
        top = top.wedge_any(x);
    }
    if !top.truncate(d).is_zero() {
        return Err(PnfError::NoDivision("T ∧ X_1 ∧ ... ∧ X_p is not zero".into()));
    }

    let mut a: Vec<PolyVector> = xs.iter().map(|_| PolyVector::zero(1, n, k, d)).collect();
    for m in 2..=d {
        let mut residual = t.clone();
        for (x, ai) in xs.iter().zip(&a) {
            residual = residual.sub(&x.wedge_any(ai));
        }
        let mut rhs_terms: BTreeMap<(usize, usize, MultiIndex), Jet> = BTreeMap::new();
        for (idx, c) in residual.terms() {
            for (q, cq) in c.phase_homogeneous(m).phase_expansion() {
                rhs_terms.insert((idx[0], idx[1], q), cq);
            }
        }
        if rhs_terms.is_empty() {
            continue;
        }
        let mut cols: Vec<(usize, usize, MultiIndex)> = Vec::new();
        for i in 0..xs.len() {
            for l in 0..n {
                for q in MultiIndex::of_degree(n, m - 1) {
                    let q = q.concat(&MultiIndex::zero(k));
                    if is_vector_resonant(s, &q, l) {
                        cols.push((i, l, q));
                    }
                }
            }
        }
        let mut rows: BTreeMap<(usize, usize, MultiIndex), usize> = BTreeMap::new();
        for key in rhs_terms.keys() {
            let len = rows.len();
            rows.entry(key.clone()).or_insert(len);
        }
        let mut entries: Vec<(usize, usize, Scalar)> = Vec::new();
        for (ci, (i, l, q)) in cols.iter().enumerate() {
            for a_ in 0..n {
                let lam = s.get(*i, a_);
                if a_ == *l || lam.is_zero() {
                    continue;
                }
                let (lo, hi, sign) = if a_ < *l { (a_, *l, Scalar::one()) } else { (*l, a_, -&Scalar::one()) };
                let key = (lo, hi, q.inc(a_));
                let len = rows.len();
                let r = *rows.entry(key).or_insert(len);
                entries.push((r, ci, &sign * lam));
            }
        }
        let mut mat = Matrix::zeros(rows.len(), cols.len());
        for (r, c, v) in entries {
            let cur = mat.get(r, c).clone();
            mat.set(r, c, &cur + &v);
        }
        let zero = Jet::zero(n, k, d);
        let mut b = vec![zero.clone(); rows.len()];
        for (key, v) in rhs_terms {
            b[rows[&key]] = v;
        }
        let sol = mat
            .solve(&b, &zero)
            .ok_or_else(|| PnfError::NoDivision(format!("no zero-weight solution at phase degree {m}")))?;
        for ((i, l, q), c) in cols.iter().zip(sol) {
            if !c.is_zero() {
                let mut e = vec![zero.clone(); nv];
                e[*l] = c.mul_monomial(q);
                a[*i] = a[*i].add(&PolyVector::vector_field(&e));
            }
        }
    }
    let mut back = PolyVector::zero(2, n, k, d);
    for (x, ai) in xs.iter().zip(&a) {
        back = back.add(&x.wedge_any(ai));
    }
    if let Some((idx, q, _, _)) = back.first_difference(t, d) {
        return Err(PnfError::NoDivision(format!(
            "reconstruction differs at {:?}, monomial {}",
            idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
            q.pretty()
        )));
    }
    for ai in &a {
        for j in 0..s.p() {
            if !s.s_field(j, k, d).schouten(ai).truncate(d).is_zero() {
                return Err(PnfError::Verification("a Saito quotient has nonzero weight".into()));
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bivector_gives_zero_quotients() {
        let s = LinearFamily::from_ints(&[&[1, 3, 5]]).unwrap();
        let t = PolyVector::zero(2, 3, 1, 4);
        let a = saito_divide(&s, &t, &[s.s_field(0, 1, 4)]).unwrap();
        assert!(a[0].is_zero());
    }

    #[test]
    fn exact_wedge_factor_is_recovered() {
        // W = x1^2 x2 ∂3 has weight 2 + 3 - 5 = 0; with all λ positive the
        // only invariant is 1, so the quotient is unique
        let s = LinearFamily::from_ints(&[&[1, 3, 5]]).unwrap();
        let d = 5;
        let x = |i| Jet::var(3, 1, d, i);
        let sf = s.s_field(0, 1, d);
        let zero = Jet::zero(3, 1, d);
        let w = PolyVector::vector_field(&[zero.clone(), zero.clone(), &x(0).pow(2) * &(&x(1) * &(&Jet::one(3, 1, d) + &x(3))), zero.clone()]);
        let t = sf.wedge(&w).unwrap();
        let a = saito_divide(&s, &t, std::slice::from_ref(&sf)).unwrap();
        assert_eq!(sf.wedge(&a[0]).unwrap(), t);
        assert!(a[0].eq_to(&w, d));
    }

    #[test]
    fn divide_field_recovers_coefficients() {
        let s = LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap();
        let d = 5;
        let u = &Jet::var(3, 1, d, 0) * &Jet::var(3, 1, d, 1);
        let x4 = Jet::var(3, 1, d, 3);
        let a = &Jet::one(3, 1, d) + &(&u * &x4);
        let x = s.s_field(0, 1, d).mul_jet(&a);
        let theta = &u + &x4;
        let v = x.mul_jet(&theta);
        let got = divide_field(&s, &v, &[x]).unwrap();
        assert_eq!(got[0], theta.truncate(d - 1));
    }
}
