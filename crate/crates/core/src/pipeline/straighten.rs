use crate::algebra::Jet;
use crate::error::{PnfError, Result};
use crate::polyvector::{DiffeoJet, PolyVector};

/// Lie bracket of vector fields, `[X, Y]^i = X(Y^i) - Y(X^i)`.
pub(crate) fn lie_bracket(x: &PolyVector, y: &PolyVector) -> PolyVector {
    let xc = x.components();
    let yc = y.components();
    let comps: Vec<Jet> = (0..x.nvars()).map(|i| &x.apply(&yc[i]) - &y.apply(&xc[i])).collect();
    PolyVector::vector_field(&comps)
}

/// `ψ(x) = φ_{x_v}(x |_{x_v = 0})` for the flow `φ_t` of a field whose
/// `x_v`-component is `1`. Solved by Picard iteration of
/// `ψ = x + ∫_0^{x_v} X(ψ)`, leaving `x_v` itself fixed.
pub fn flow_map(field: &PolyVector, v: usize) -> Result<DiffeoJet> {
    let comps = field.components();
    let nv = field.nvars();
    let d = field.order();
    let one = field.zero_jet().constant_like(crate::algebra::Scalar::one());
    if comps[v] != one {
        return Err(PnfError::Structural(format!("the field does not have unit component along x{}", v + 1)));
    }
    let x: Vec<Jet> = (0..nv).map(|i| Jet::var(field.n_phase(), field.n_param(), d, i)).collect();
    let base: Vec<Jet> = x.iter().map(|xi| xi.set_zero(&[v])).collect();
    let mut psi = x.clone();
    for _ in 0..=d {
        let next: Vec<Jet> = (0..nv)
            .map(|i| {
                if i == v {
                    x[i].clone()
                } else {
                    &base[i] + &comps[i].compose(&psi).expect("arity").integrate_within_order(v)
                }
            })
            .collect();
        if next == psi {
            break;
        }
        psi = next;
    }
    DiffeoJet::new(psi)
}

/// A coordinate change `Φ = ψ⁻¹` with `Φ_* Ã = ∂_{n+q}`, fixing every other
/// parameter coordinate. Each field in `preserve` must commute with `Ã`;
/// it is then left unchanged. Checked up to `order - 1`.
pub fn straighten_field(field: &PolyVector, q: usize, preserve: &[PolyVector]) -> Result<DiffeoJet> {
    let n = field.n_phase();
    let v = n + q;
    let d = field.order();
    let t = d.saturating_sub(1);
    for (k, c) in field.components().iter().enumerate().skip(n) {
        let want = if k == v { c.constant_like(crate::algebra::Scalar::one()) } else { c.zero_like() };
        if *c != want {
            return Err(PnfError::Structural(format!("parameter component {} is not {}", k + 1, want)));
        }
    }
    for (k, w) in preserve.iter().enumerate() {
        let br = lie_bracket(field, w).truncate(t);
        if !br.is_zero() {
            return Err(PnfError::PreconditionBracket(format!("the field does not commute with preserved field {}", k + 1)));
        }
    }
    let psi = flow_map(field, v)?;
    let phi = psi.inverse()?;
    let target = PolyVector::basis(&[v], Jet::one(n, field.n_param(), d));
    if !phi.pushforward_with_inverse(field, &psi)?.eq_to(&target, t) {
        return Err(PnfError::Verification("straightened field is not the coordinate field".into()));
    }
    for (k, w) in preserve.iter().enumerate() {
        if !phi.pushforward_with_inverse(w, &psi)?.eq_to(w, t) {
            return Err(PnfError::Verification(format!("preserved field {} changed under straightening", k + 1)));
        }
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::LinearFamily;

    #[test]
    fn coordinate_field_gives_identity() {
        let f = PolyVector::basis(&[2], Jet::one(2, 1, 5));
        assert!(straighten_field(&f, 0, &[]).unwrap().is_identity());
    }

    #[test]
    fn transport_is_straightened() {
        // ∂_2 + x2 x1 ∂_1 on one phase and one parameter variable
        let d = 6;
        let x = |i| Jet::var(1, 1, d, i);
        let f = PolyVector::vector_field(&[&x(1) * &x(0), Jet::one(1, 1, d)]);
        let phi = straighten_field(&f, 0, &[]).unwrap();
        // the flow is x1 exp(x2^2 / 2), so Φ has first component x1 exp(-x2^2 / 2)
        let e = x(1).pow(2).scale(&crate::algebra::Scalar::from_ratio(-1, 2)).exp().unwrap();
        assert!(phi.components()[0].eq_to(&(&x(0) * &e), d));
    }

    #[test]
    fn commuting_linear_field_is_preserved() {
        let s = LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap();
        let d = 5;
        let x = |i| Jet::var(3, 1, d, i);
        let sf = s.s_field(0, 1, d);
        // ∂_4 + x4 (x1 x2) S commutes with S
        let u = &x(0) * &x(1);
        let f = PolyVector::basis(&[3], Jet::one(3, 1, d)).add(&sf.mul_jet(&(&x(3) * &u)));
        let phi = straighten_field(&f, 0, std::slice::from_ref(&sf)).unwrap();
        assert!(phi.pushforward(&sf).unwrap().eq_to(&sf, d - 1));

        let bad = PolyVector::basis(&[3], Jet::one(3, 1, d)).add(&PolyVector::basis(&[0], x(1).pow(2)));
        assert!(matches!(straighten_field(&bad, 0, &[sf]), Err(PnfError::PreconditionBracket(_))));
    }
}
