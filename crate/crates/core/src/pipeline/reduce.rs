use crate::algebra::{Jet, Scalar};
use crate::error::{PnfError, Result};
use crate::polyvector::DiffeoJet;

use super::PoissonJet;

#[derive(Clone, Debug)]
pub struct Reduction {
    pub poisson: PoissonJet,
    /// `y' = x' - g(x'')`, `y'' = x''`.
    pub diffeo: DiffeoJet,
    /// Coefficients of the combination `X_c = Σ c_j X_j` used for the solve.
    pub combination: Vec<Scalar>,
    /// `g(x'')`, the zero set of the hamiltonian fields.
    pub shift: Vec<Jet>,
}

/// First `c` (units, then a few fixed generic vectors) with
/// `μ_i = Σ_j c_j λ_{j,i} ≠ 0` for all `i`.
fn generic_combination(pj: &PoissonJet) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
    let (n, p) = (pj.n(), pj.p());
    let s = pj.linear();
    let mut candidates: Vec<Vec<i64>> = (0..p).map(|j| (0..p).map(|k| (k == j) as i64).collect()).collect();
    for base in [1i64, 2, 3, 5, 7] {
        candidates.push((0..p as u32).map(|k| base.pow(k)).collect());
        candidates.push((0..p as i64).map(|k| 1 + k * base).collect());
    }
    candidates.into_iter().find_map(|c| {
        let c: Vec<Scalar> = c.into_iter().map(Scalar::from_int).collect();
        let mu: Vec<Scalar> = (0..n).map(|i| (0..p).fold(Scalar::zero(), |acc, j| &acc + &(&c[j] * s.get(j, i)))).collect();
        mu.iter().all(|m| !m.is_zero()).then_some((c, mu))
    })
}

/// Moves the zero set `{X_1 = ... = X_p = 0}` onto the parameter axis by the
/// translation `x' ↦ x' - g(x'')`, then checks that the hamiltonians vanish on
/// the axis with constant diagonal linear part and that every phase bracket
/// lies in `M²`.
pub fn reduce_poisson(pj: &PoissonJet) -> Result<Reduction> {
    let (n, p, d) = (pj.n(), pj.p(), pj.order());
    let nv = n + p;
    let (c, mu) = generic_combination(pj).ok_or(PnfError::NonInvertibleLinearization)?;
    let xs = pj.hamiltonians();
    let xc: Vec<Jet> = (0..n)
        .map(|i| (0..p).fold(Jet::zero(n, p, d), |acc, j| &acc + &xs[j].component(&[i]).scale(&c[j])))
        .collect();

    let params: Vec<Jet> = (n..nv).map(|v| Jet::var(n, p, d, v)).collect();
    let subst = |g: &[Jet]| -> Vec<Jet> { g.iter().chain(params.iter()).cloned().collect() };
    let mut g: Vec<Jet> = vec![Jet::zero(n, p, d); n];
    for _ in 0..=d {
        let at = subst(&g);
        let next: Vec<Jet> = (0..n)
            .map(|i| {
                let v = xc[i].compose(&at).expect("arity");
                &g[i] - &v.scale(&mu[i].inv().unwrap())
            })
            .collect();
        if next == g {
            break;
        }
        g = next;
    }
    let at = subst(&g);
    for (k, x) in xs.iter().enumerate() {
        for i in 0..n {
            if !x.component(&[i]).compose(&at)?.is_zero() {
                return Err(PnfError::Verification(format!(
                    "X{} does not vanish on the zero set of the combined field (component {})",
                    k + 1,
                    i + 1
                )));
            }
        }
    }

    let diffeo = if g.iter().all(|f| f.is_zero()) {
        DiffeoJet::identity(n, p, d)
    } else {
        let shift: Vec<Jet> = (0..nv).map(|i| if i < n { -&g[i] } else { Jet::zero(n, p, d) }).collect();
        DiffeoJet::translation(&shift)?
    };
    let bracket = if diffeo.is_identity() { pj.bracket().clone() } else { diffeo.pushforward(pj.bracket())? };
    let reduced = PoissonJet::new_unchecked(bracket, pj.linear().clone())?;
    verify_reduced(&reduced)?;
    let poisson = PoissonJet::new(reduced.bracket().clone(), pj.linear().clone())?;
    Ok(Reduction { poisson, diffeo, combination: c, shift: g })
}

/// `X_j(0, x'') = 0`, `D_{x'} X_j(0, x'') = diag(λ_j)` and `{x_i, x_j} ∈ M²`.
pub fn verify_reduced(pj: &PoissonJet) -> Result<()> {
    let n = pj.n();
    let (p, d) = (pj.p(), pj.order());
    for k in 0..p {
        let x = pj.hamiltonian(k);
        for i in 0..n {
            let c = x.component(&[i]);
            if !c.at_phase_zero().is_zero() {
                return Err(PnfError::Verification(format!("X{} does not vanish on the parameter axis", k + 1)));
            }
            let lin = c.phase_homogeneous(1);
            let want = Jet::var(n, p, d, i).scale(pj.linear().get(k, i));
            if lin != want {
                return Err(PnfError::ParameterDependentSpectrum(format!(
                    "component {} of X{} has linear part {} instead of {}",
                    i + 1,
                    k + 1,
                    lin,
                    want
                )));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !pj.get(i, j).phase_up_to(1).is_zero() {
                return Err(PnfError::OrderTwoViolation { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}
