//! Forward constructions: start from a known normal form, push it by a
//! random change of coordinates, and scan what the pipelines return.
#![allow(dead_code)]

use pnf_core::algebra::{Jet, Scalar};
use pnf_core::normalform::combine;
use pnf_core::pipeline::{FrobeniusSystem, PoissonJet, Theorem1Result, Theorem2Result};
use pnf_core::spectrum::invariant_generators;
use pnf_core::{DiffeoJet, LinearFamily, PolyVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bivector_conjugate, diffeo, field_conjugate, monomial, real_scalar, weight_vanishes};

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// `x_i ↦ x_i (1 + a_i x_{n+1})` on the phase variables.
pub fn parameter_rescaling(r: &mut ChaCha8Rng, n: usize, p: usize, d: u32) -> DiffeoJet {
    let t = Jet::var(n, p, d, n);
    let comps = (0..n + p)
        .map(|i| {
            let x = Jet::var(n, p, d, i);
            if i < n && r.gen_bool(0.7) {
                &x + &(&x * &t).scale(&Scalar::from_int(r.gen_range(-2..=2)))
            } else {
                x
            }
        })
        .collect();
    DiffeoJet::new(comps).unwrap()
}

/// `Ψ_* (𝓛 + extra)` for a random `Ψ`.
pub fn forward_poisson(r: &mut ChaCha8Rng, s: &LinearFamily, extra: &PolyVector, d: u32) -> PoissonJet {
    let (n, p) = (s.n(), s.p());
    let p0 = s.linear_poisson(d).add(extra);
    let psi = diffeo(r, n, p, d, 3).compose(&parameter_rescaling(r, n, p, d));
    PoissonJet::new(psi.pushforward(&p0).unwrap(), s.clone()).unwrap()
}

/// `Σ_{e=1,2} c_e u^e (+ c'_e u^e t)` with small integer coefficients.
pub fn invariant_poly(r: &mut ChaCha8Rng, u: &Jet, t: Option<&Jet>) -> Jet {
    let mut a = u.zero_like();
    for e in 1..=2 {
        a = &a + &u.pow(e).scale(&Scalar::from_int(r.gen_range(-2..=2)));
        if let Some(t) = t {
            a = &a + &(&u.pow(e) * t).scale(&Scalar::from_int(r.gen_range(-1..=1)));
        }
    }
    a
}

/// `f S ∧ (∂4 + w x1 ∂1)` with `f = 1 + a(u, x4)`, `u = x1 x2`, for
/// `λ = (1, -1, 2)`, pushed by a random `Ψ`.
pub fn forward_rank2(r: &mut ChaCha8Rng, d: u32) -> PoissonJet {
    let s = LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap();
    let x = |i| Jet::var(3, 1, d, i);
    let u = &x(0) * &x(1);
    let f = &Jet::one(3, 1, d) + &invariant_poly(r, &u, Some(&x(3)));
    let w = invariant_poly(r, &u, None);
    let zero = Jet::zero(3, 1, d);
    let at = PolyVector::vector_field(&[&w * &x(0), zero.clone(), zero, Jet::one(3, 1, d)]);
    let p0 = s.s_field(0, 1, d).mul_jet(&f).wedge(&at).unwrap();
    let psi = diffeo(r, 3, 1, d, 3);
    PoissonJet::new(psi.pushforward(&p0).unwrap(), s).unwrap()
}

/// `Σ_k (Σ_l a_{k,l}(u, v) S_l) ∧ ∂_{n+k}` on four phase variables with
/// `u = x1 x2`, `v = x3 x4`, pushed by a random `Ψ`.
pub fn forward_rank4(r: &mut ChaCha8Rng, d: u32) -> PoissonJet {
    let (n, p) = (4, 2);
    let s = LinearFamily::from_ints(&[&[1, -1, 0, 0], &[0, 0, 1, -1]]).unwrap();
    let x = |i| Jet::var(n, p, d, i);
    let (u, v) = (&x(0) * &x(1), &x(2) * &x(3));
    let mut p0 = PolyVector::zero(2, n, p, d);
    for k in 0..p {
        let mut y = PolyVector::zero(1, n, p, d);
        for l in 0..p {
            let mut a = &invariant_poly(r, &u, None) + &invariant_poly(r, &v, None);
            if k == l {
                a = &a + &Jet::one(n, p, d);
            }
            y = y.add(&s.s_field(l, p, d).mul_jet(&a));
        }
        p0 = p0.add(&y.wedge(&PolyVector::basis(&[n + k], Jet::one(n, p, d))).unwrap());
    }
    let psi = diffeo(r, n, p, d, 3);
    PoissonJet::new(psi.pushforward(&p0).unwrap(), s).unwrap()
}

/// Resonant-only vector field: random monomials kept when the weight
/// vanishes for every row.
pub fn resonant_field(r: &mut ChaCha8Rng, s: &LinearFamily, k: usize, d: u32, terms: usize) -> PolyVector {
    let n = s.n();
    let rows = s.rows().to_vec();
    let mut comps = vec![Jet::zero(n, k, d); n + k];
    let mut found = 0;
    for _ in 0..400 {
        if found == terms {
            break;
        }
        let q = monomial(r, n, 2, d);
        let i = r.gen_range(0..n);
        if !weight_vanishes(&rows, q.exps(), &[i], n) {
            continue;
        }
        let param = monomial(r, k, 0, d - q.degree());
        comps[i].add_term(q.concat(&param), real_scalar(r));
        found += 1;
    }
    PolyVector::vector_field(&comps)
}

/// Commuting family in normal form, pushed by a random diffeomorphism:
/// `S + R` for `λ = (1, -1, 2)` (`which = 0`) or `Σ_l a_{j,l}(x1 x2, x4) S_l`
/// for the rows `(1, -1, 0), (0, 0, 1)`.
pub fn forward_family(r: &mut ChaCha8Rng, which: usize, d: u32) -> (LinearFamily, Vec<PolyVector>) {
    let k = 1;
    let (s, nfs) = if which == 0 {
        let s = LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap();
        let nf = s.s_field(0, k, d).add(&resonant_field(r, &s, k, d, 4));
        (s, vec![nf])
    } else {
        let s = LinearFamily::from_ints(&[&[1, -1, 0], &[0, 0, 1]]).unwrap();
        let u = &Jet::var(3, k, d, 0) * &Jet::var(3, k, d, 1);
        let t = Jet::var(3, k, d, 3);
        let nfs = (0..2)
            .map(|j| {
                let a: Vec<Jet> = (0..2)
                    .map(|l| {
                        let c = invariant_poly(r, &u, Some(&t));
                        if l == j {
                            &Jet::one(3, k, d) + &c
                        } else {
                            c
                        }
                    })
                    .collect();
                combine(&s, &a)
            })
            .collect();
        (s, nfs)
    };
    let psi = diffeo(r, s.n(), k, d, 4);
    let xs = nfs.iter().map(|nf| psi.pushforward(nf).unwrap()).collect();
    (s, xs)
}

/// Conjugacy by the independent path and resonant-only support.
pub fn normal_form_sound(s: &LinearFamily, xs: &[PolyVector], phi: &DiffeoJet, nfs: &[PolyVector], d: u32) -> Result<(), String> {
    let rows = s.rows().to_vec();
    let n = s.n();
    for (j, (x, nf)) in xs.iter().zip(nfs).enumerate() {
        ensure!(field_conjugate(x, phi, nf, d), "field {} is not conjugate to its normal form", j + 1);
        for (idx, c) in nf.terms() {
            ensure!(idx[0] < n, "normal form {} moves a parameter", j + 1);
            for q in c.terms().keys() {
                let (qp, _) = q.split(n);
                if qp.degree() >= 2 {
                    ensure!(weight_vanishes(&rows, qp.exps(), &[idx[0]], n), "non-resonant {} d{}", q.pretty(), idx[0] + 1);
                }
            }
        }
    }
    Ok(())
}

/// Coefficient scans of a rescaled first normal form.
pub fn theorem1_shape(input: &PoissonJet, res: &Theorem1Result) -> Result<(), String> {
    let out = &res.poisson;
    let s = out.linear();
    let (n, p, d) = (out.n(), out.p(), out.order());
    let lam = s.rows().to_vec();
    ensure!(bivector_conjugate(input.bracket(), &res.diffeo, out.bracket(), d - 1), "output is not conjugate to the input");
    let linear = s.linear_poisson(d);
    for (idx, c) in out.bracket().sub(&linear).terms() {
        let (i, j) = (idx[0], idx[1]);
        ensure!(j < n, "parameter slot {:?} beyond the linear part", idx);
        for q in c.terms().keys() {
            let (qp, qt) = q.split(n);
            ensure!(weight_vanishes(&lam, qp.exps(), &[i, j], n), "non-resonant {} in {{x{}, x{}}}", q.pretty(), i + 1, j + 1);
            if qp.get(i) == 1 && qp.get(j) == 1 && qp.degree() == 2 {
                ensure!(qt.degree() == 0, "E{} + E{} coefficient depends on the parameters", i + 1, j + 1);
                ensure!(i >= p, "E{} + E{} coefficient survives", i + 1, j + 1);
            }
        }
    }
    if n <= p + 1 {
        ensure!(out.bracket() == &linear, "output is not the linear part");
    }
    Ok(())
}

/// `∂β/∂x_v + Θ β = r` for every equation, up to `order - 1`.
pub fn frobenius_holds(sys: &FrobeniusSystem) -> bool {
    let order = sys.theta.iter().flatten().flatten().chain(sys.rhs.iter().flatten()).map(|j| j.order()).min().unwrap_or(0);
    let t = order.saturating_sub(1);
    sys.vars.iter().enumerate().all(|(i, &v)| {
        (0..sys.solution.len()).all(|k| {
            let mut lhs = sys.solution[k].diff(v);
            for (l, b) in sys.solution.iter().enumerate() {
                lhs = &lhs + &(&sys.theta[i][k][l] * b);
            }
            lhs.eq_to(&sys.rhs[i][k], t)
        })
    })
}

/// Support scan of the second normal form, Saito reconstruction, Frobenius
/// residuals and the θ/γ symmetries.
pub fn theorem2_shape(input: &PoissonJet, t1: &Theorem1Result, t2: &Theorem2Result) -> Result<(), String> {
    let out = &t2.poisson;
    let s = out.linear();
    let (n, p, d) = (out.n(), out.p(), out.order());
    let ring = invariant_generators(s, d);
    let total = t2.diffeo.compose(&t1.diffeo);
    ensure!(bivector_conjugate(input.bracket(), &total, out.bracket(), d - 1), "output is not conjugate to the input");
    let mut expect = PolyVector::zero(2, n, p, d);
    for k in 0..p {
        for l in 0..p {
            let b = &t2.b[k][l];
            for q in b.terms().keys() {
                let (qp, qt) = q.split(n);
                ensure!(qt.degree() == 0, "b_{},{} depends on the parameters", k + 1, l + 1);
                ensure!(ring.is_generated(qp.exps()), "b_{},{} has the non-invariant {}", k + 1, l + 1, q.pretty());
            }
            let y = s.s_field(l, p, d).mul_jet(&b.with_order(d));
            expect = expect.add(&y.wedge(&PolyVector::basis(&[n + k], Jet::one(n, p, d))).unwrap());
        }
    }
    ensure!(out.bracket().eq_to(&expect, d - 1), "output is not Σ b S ∧ ∂");
    let mut back = PolyVector::zero(2, n, p, d);
    for (x, a) in t1.poisson.hamiltonians().iter().zip(&t2.connection.a) {
        back = back.add(&x.wedge(a).unwrap());
    }
    ensure!(back.eq_to(&t1.poisson.phase_part(), d), "Saito quotients do not reconstruct the phase part");
    for sys in &t2.connection.systems {
        ensure!(frobenius_holds(sys), "Frobenius system {} is not solved", sys.name);
    }
    let c = &t2.connection;
    for i in 0..p {
        for j in 0..p {
            for l in 0..p {
                ensure!(c.theta[i][j][l].eq_to(&c.theta[l][j][i], d - 2), "θ is not symmetric");
                ensure!(c.gamma[i][j][l].eq_to(&c.gamma[l][j][i], d - 2), "γ is not symmetric");
            }
        }
    }
    Ok(())
}
