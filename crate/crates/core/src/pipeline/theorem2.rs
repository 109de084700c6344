use crate::algebra::{Jet, MultiIndex};
use crate::error::{PnfError, Result, StageExt};
use crate::polyvector::{DiffeoJet, PolyVector};
use crate::spectrum::{invariant_generators, is_invariant, LinearFamily};

use super::frobenius::{frobenius_solve, mat_vec};
use super::saito::{divide_field, s_coefficients, saito_divide};
use super::straighten::{lie_bracket, straighten_field};
use super::{verify_stage, Check, PoissonJet, Stage};

/// `P ∧ ... ∧ P` (`k` factors).
pub fn wedge_power(p: &PolyVector, k: usize) -> PolyVector {
    let mut out = PolyVector::function(Jet::one(p.n_phase(), p.n_param(), p.order()));
    for _ in 0..k {
        out = out.wedge_any(p);
    }
    out
}

/// Connection coefficients of the decomposition `P = Σ_i X_i ∧ Ã_i`.
/// Indices are 0-based: `theta[i][j][l] = θ_{i,j}^l` with
/// `[Ã_i, X_j] = Σ_l θ_{i,j}^l X_l`, and likewise `gamma` for `[Ã_i, Ã_j]`.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub a: Vec<PolyVector>,
    pub theta: Vec<Vec<Vec<Jet>>>,
    pub gamma: Vec<Vec<Vec<Jet>>>,
    /// Per induction step `q`: the correction `β_q`, the remainder `c_q`,
    /// the potential `g_q` and the symmetric matrix `f`.
    pub beta: Vec<Vec<Jet>>,
    pub c: Vec<Vec<Jet>>,
    pub g: Vec<Vec<Jet>>,
    pub f: Vec<Vec<Vec<Jet>>>,
    /// Every Frobenius system solved on the way, with its solution.
    pub systems: Vec<FrobeniusSystem>,
}

/// `∂β/∂x_{vars[i]} = -theta[i] β + rhs[i]`.
#[derive(Clone, Debug)]
pub struct FrobeniusSystem {
    pub name: String,
    pub vars: Vec<usize>,
    pub theta: Vec<Vec<Vec<Jet>>>,
    pub rhs: Vec<Vec<Jet>>,
    pub solution: Vec<Jet>,
}

#[derive(Clone, Debug)]
pub struct Theorem2Result {
    pub poisson: PoissonJet,
    pub diffeo: DiffeoJet,
    pub stages: Vec<Stage>,
    pub connection: ConnectionData,
    /// `b[k][l]`: the output is `Σ_k (Σ_l b_{k,l} S_l) ∧ ∂_{n+k}`.
    pub b: Vec<Vec<Jet>>,
}

type Connection = (Vec<Vec<Vec<Jet>>>, Vec<Vec<Vec<Jet>>>);

fn connection(s: &LinearFamily, xs: &[PolyVector], at: &[PolyVector]) -> Result<Connection> {
    let p = xs.len();
    let mut theta = Vec::with_capacity(p);
    let mut gamma = Vec::with_capacity(p);
    for ai in at {
        theta.push(xs.iter().map(|x| divide_field(s, &lie_bracket(ai, x), xs)).collect::<Result<Vec<_>>>()?);
        gamma.push(at.iter().map(|aj| divide_field(s, &lie_bracket(ai, aj), xs)).collect::<Result<Vec<_>>>()?);
    }
    Ok((theta, gamma))
}

fn connection_checks(s: &LinearFamily, theta: &[Vec<Vec<Jet>>], gamma: &[Vec<Vec<Jet>>], t: u32) -> Vec<Check> {
    let p = theta.len();
    let mut sym_t = true;
    let mut sym_g = true;
    let mut inv = true;
    let mut axis = true;
    for i in 0..p {
        for j in 0..p {
            for l in 0..p {
                sym_t &= theta[i][j][l].eq_to(&theta[l][j][i], t);
                sym_g &= gamma[i][j][l].eq_to(&gamma[l][j][i], t);
                for f in [&theta[i][j][l], &gamma[i][j][l]] {
                    inv &= f.truncate(t).terms().keys().all(|q| is_invariant(s, q));
                }
                axis &= theta[i][j][l].at_phase_zero().truncate(t).is_zero();
            }
        }
    }
    vec![
        Check::new("theta-symmetric", sym_t),
        Check::new("gamma-symmetric", sym_g),
        Check::new("connection-invariant", inv),
        Check::new("theta-vanishes-on-axis", axis),
    ]
}

fn require(checks: &[Check], stage: &str) -> Result<()> {
    match checks.iter().find(|c| !c.pass) {
        Some(c) => Err(PnfError::Verification(format!("{} failed", c.name)).in_stage(stage)),
        None => Ok(()),
    }
}

fn combine_fields(coef: &[Jet], xs: &[PolyVector]) -> PolyVector {
    xs.iter().zip(coef).fold(xs[0].zero_like(1), |acc, (x, c)| acc.add(&x.mul_jet(c)))
}

struct State {
    s: LinearFamily,
    bracket: PolyVector,
    at: Vec<PolyVector>,
    total: DiffeoJet,
}

impl State {
    fn hamiltonians(&self) -> Result<Vec<PolyVector>> {
        Ok(PoissonJet::new_unchecked(self.bracket.clone(), self.s.clone())?.hamiltonians())
    }

    fn apply(&mut self, name: &str, phi: DiffeoJet, stages: &mut Vec<Stage>) -> Result<()> {
        if phi.is_identity() {
            stages.push(Stage { name: name.into(), diffeo: phi, checks: vec![Check::new("identity", true)] });
            return Ok(());
        }
        let inv = phi.inverse()?;
        let next = phi.pushforward_with_inverse(&self.bracket, &inv)?;
        let checks = verify_stage(name, &self.bracket, &next, &phi)?;
        self.at = self.at.iter().map(|a| phi.pushforward_with_inverse(a, &inv)).collect::<Result<_>>()?;
        self.bracket = next;
        self.total = phi.compose(&self.total);
        stages.push(Stage { name: name.into(), diffeo: phi, checks });
        Ok(())
    }

    /// `P = Σ X_i ∧ Ã_i` up to the order.
    fn decomposition_holds(&self) -> Result<bool> {
        let xs = self.hamiltonians()?;
        let mut sum = self.bracket.zero_like(2);
        for (x, a) in xs.iter().zip(&self.at) {
            sum = sum.add(&x.wedge_any(a));
        }
        Ok(sum.eq_to(&self.bracket, self.bracket.order()))
    }
}

/// Brings a rank-`2p` structure whose hamiltonian fields are already in
/// normal form to `Σ_k (Σ_l b_{k,l}(x') S_l) ∧ ∂_{n+k}` with `b` built from
/// invariant monomials only.
pub fn normalize_rank2p_theorem2(pj: &PoissonJet) -> Result<Theorem2Result> {
    let (n, p, d) = (pj.n(), pj.p(), pj.order());
    let s = pj.linear().clone();
    if n <= p + 1 {
        return Err(PnfError::Hypothesis(format!("the rank-2p normal form needs n > p + 1 (n = {n}, p = {p})")));
    }
    if !wedge_power(pj.bracket(), p + 1).truncate(d).is_zero() {
        return Err(PnfError::RankCondition);
    }
    let xs = pj.hamiltonians();
    for (k, x) in xs.iter().enumerate() {
        let a = s_coefficients(&s, x).map_err(|_| {
            PnfError::Hypothesis(format!("X{} is not a combination of the S_j; normalize the hamiltonian fields first", k + 1))
        })?;
        if a.iter().any(|f| f.terms().keys().any(|q| !is_invariant(&s, q))) {
            return Err(PnfError::Hypothesis(format!("X{} has non-invariant coefficients", k + 1)));
        }
    }
    let sf: Vec<PolyVector> = (0..p).map(|j| s.s_field(j, p, d)).collect();
    let dpar = |i: usize| PolyVector::basis(&[n + i], Jet::one(n, p, d));
    let zero = Jet::zero(n, p, d);
    let t = d.saturating_sub(2);
    let mut stages = Vec::new();

    let a = saito_divide(&s, &pj.phase_part(), &xs).stage("saito")?;
    let at: Vec<PolyVector> = (0..p).map(|i| dpar(i).add(&a[i])).collect();
    let (theta0, gamma0) = connection(&s, &xs, &at).stage("connection")?;
    let mut checks = vec![Check::new("saito-reconstruction", true), Check::new("saito-zero-weight", true)];
    checks.extend(connection_checks(&s, &theta0, &gamma0, t));
    require(&checks, "connection")?;
    stages.push(Stage { name: "saito".into(), diffeo: DiffeoJet::identity(n, p, d), checks });

    let mut conn = ConnectionData { a, theta: theta0, gamma: gamma0, beta: vec![], c: vec![], g: vec![], f: vec![], systems: vec![] };
    let mut st = State { s: s.clone(), bracket: pj.bracket().clone(), at, total: DiffeoJet::identity(n, p, d) };

    for q in 0..p {
        let label = |what: &str| format!("{what}-{}", q + 1);
        // β_q from the Frobenius system in x_{n+1}, ..., x_{n+q-1}
        let xs_cur = st.hamiltonians()?;
        let beta = if q == 0 {
            vec![zero.clone(); p]
        } else {
            let (theta, gamma) = connection(&s, &xs_cur, &st.at).stage(&label("beta"))?;
            let th: Vec<Vec<Vec<Jet>>> =
                (0..q).map(|i| (0..p).map(|k| (0..p).map(|l| theta[i][l][k].clone()).collect()).collect()).collect();
            let rhs: Vec<Vec<Jet>> = (0..q).map(|i| gamma[i][q].clone()).collect();
            let vars: Vec<usize> = (0..q).map(|i| n + i).collect();
            let sol = frobenius_solve(&th, &rhs, &vars).stage(&label("beta"))?;
            let out = sol.iter().map(|b| b.with_order(d)).collect();
            conn.systems.push(FrobeniusSystem { name: label("beta"), vars, theta: th, rhs, solution: sol });
            out
        };
        let beta_inv = beta.iter().all(|b| b.truncate(t).terms().keys().all(|m| is_invariant(&s, m)));
        let field = st.at[q].sub(&combine_fields(&beta, &xs_cur));
        let mut preserve: Vec<PolyVector> = sf.clone();
        preserve.extend((0..q).map(dpar));
        let g1 = straighten_field(&field, q, &preserve).stage(&label("straighten"))?;
        st.apply(&label("straighten"), g1, &mut stages)?;
        if let Some(last) = stages.last_mut() {
            last.checks.push(Check::new("beta-invariant", beta_inv));
        }

        // Ã_q = ∂_{n+q} + Σ c_{q,j} X_j
        let xs_cur = st.hamiltonians()?;
        let c: Vec<Jet> = divide_field(&s, &st.at[q].sub(&dpar(q)).truncate(d - 1), &xs_cur)
            .stage(&label("remainder"))?
            .iter()
            .map(|f| f.with_order(d))
            .collect();

        // g_q = h e_q with ∂h/∂x_{n+i} = -c_{q,i} for i < q, then f from the g_q equations
        let h = if q == 0 {
            zero.clone()
        } else {
            let z = vec![vec![zero.clone()]];
            let rhs: Vec<Vec<Jet>> = (0..q).map(|i| vec![-&c[i]]).collect();
            let vars: Vec<usize> = (0..q).map(|i| n + i).collect();
            let th = vec![z; q];
            let sol = frobenius_solve(&th, &rhs, &vars).stage(&label("potential"))?;
            let h = sol[0].with_order(d);
            conn.systems.push(FrobeniusSystem { name: label("potential"), vars, theta: th, rhs, solution: sol });
            h
        };
        let g: Vec<Jet> = (0..p).map(|l| if l == q { h.clone() } else { zero.clone() }).collect();
        let (theta, _) = connection(&s, &xs_cur, &st.at).stage(&label("commute"))?;
        let f: Vec<Vec<Jet>> = (0..p)
            .map(|i| {
                if i > q {
                    return vec![zero.clone(); p];
                }
                let th: Vec<Vec<Jet>> = (0..p).map(|k| (0..p).map(|l| theta[i][l][k].with_order(d)).collect()).collect();
                let tg = mat_vec(&th, &g);
                (0..p)
                    .map(|k| {
                        let v = &g[k].diff(n + i) - &tg[k];
                        if i == q {
                            &v - &c[k]
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let symmetric = (0..p).all(|i| (0..p).all(|l| f[i][l].eq_to(&f[l][i], t)));
        if !symmetric {
            return Err(PnfError::Verification("the correction matrix f is not symmetric".into()).in_stage(&label("commute")));
        }
        let fields: Vec<PolyVector> = (0..=q).map(|i| st.at[i].add(&combine_fields(&f[i], &xs_cur))).collect();
        let commute = (0..=q).all(|i| (i + 1..=q).all(|j| lie_bracket(&fields[i], &fields[j]).truncate(t).is_zero()));
        if !commute {
            return Err(PnfError::Verification("corrected fields do not commute".into()).in_stage(&label("commute")));
        }
        // P is unchanged when Ã_i gains Σ f_{i,l} X_l with f symmetric
        for (i, fi) in fields.into_iter().enumerate() {
            st.at[i] = fi;
        }
        if !st.decomposition_holds()? {
            return Err(PnfError::Verification("decomposition changed by the symmetric correction".into())
                .in_stage(&label("commute")));
        }
        for i in 0..=q {
            let mut preserve: Vec<PolyVector> = sf.clone();
            preserve.extend((0..i).map(dpar));
            let phi = straighten_field(&st.at[i], i, &preserve).stage(&label("simultaneous"))?;
            st.apply(&format!("simultaneous-{}-{}", q + 1, i + 1), phi, &mut stages)?;
        }
        let straight = (0..=q).all(|i| st.at[i].eq_to(&dpar(i), d - 1));
        for i in 0..=q {
            st.at[i] = dpar(i);
        }
        let decomposed = st.decomposition_holds()?;
        if let Some(last) = stages.last_mut() {
            last.checks.push(Check::new("straightened", straight));
            last.checks.push(Check::new("decomposition", decomposed));
            last.checks.push(Check::new("f-symmetric", symmetric));
            last.checks.push(Check::new("commuting", commute));
        }
        if !straight || !decomposed {
            return Err(PnfError::Verification("straightening left a phase part".into()).in_stage(&label("simultaneous")));
        }
        conn.beta.push(beta);
        conn.c.push(c);
        conn.g.push(g);
        conn.f.push(f);
    }

    // Γ stage: remove the parameter dependence of a
    let xs_cur = st.hamiltonians()?;
    let a: Vec<Vec<Jet>> = xs_cur
        .iter()
        .map(|x| s_coefficients(&s, x).map(|v| v.iter().map(|f| f.with_order(d)).collect()))
        .collect::<Result<_>>()
        .stage("parameters")?;
    let gammas: Vec<PolyVector> = (0..p)
        .map(|k| PolyVector::vector_field(&(0..n + p).map(|v| if v < n { zero.clone() } else { a[v - n][k].clone() }).collect::<Vec<_>>()))
        .collect();
    for r in 0..p {
        for s_ in r + 1..p {
            if !lie_bracket(&gammas[r], &gammas[s_]).truncate(d - 1).is_zero() {
                return Err(PnfError::PreconditionBracket(format!("[Γ{}, Γ{}] ≠ 0", r + 1, s_ + 1)).in_stage("parameters"));
            }
        }
    }
    let phase: Vec<Jet> = (0..n).map(|i| Jet::var(n, p, d, i)).collect();
    let mut y: Vec<Jet> = vec![zero.clone(); p];
    for k in (0..p).rev() {
        let start = y.clone();
        for _ in 0..=d {
            let at: Vec<Jet> = phase.iter().chain(y.iter()).cloned().collect();
            let next: Vec<Jet> = (0..p)
                .map(|m| &start[m] + &a[m][k].compose(&at).expect("arity").integrate_within_order(n + k))
                .collect();
            if next == y {
                break;
            }
            y = next;
        }
    }
    let params: Vec<usize> = (n..n + p).collect();
    let expo = DiffeoJet::new(phase.iter().chain(y.iter()).cloned().collect()).stage("parameters")?;
    let lin: Vec<Jet> = (0..p)
        .map(|m| (0..p).fold(zero.clone(), |acc, k| &acc + &(&a[m][k].set_zero(&params) * &Jet::var(n, p, d, n + k))))
        .collect();
    let target = DiffeoJet::new(phase.iter().chain(lin.iter()).cloned().collect()).stage("parameters")?;
    let psi = target.compose(&expo.inverse()?);
    st.apply("parameters", psi, &mut stages)?;

    let out = PoissonJet::new(st.bracket.clone(), s.clone()).stage("final")?;
    let xs_out = out.hamiltonians();
    let b: Vec<Vec<Jet>> = xs_out.iter().map(|x| s_coefficients(&s, x)).collect::<Result<_>>().stage("final")?;
    let ring = invariant_generators(&s, d);
    let phase_free = out.phase_part().is_zero();
    let no_params = b.iter().flatten().all(|f| !f.depends_on_params());
    let generated = b.iter().flatten().all(|f| {
        f.terms().keys().all(|q: &MultiIndex| is_invariant(&s, q) && (!ring.complete || ring.is_generated(&q.exps()[..n])))
    });
    let frozen = (0..p).all(|k| (0..p).all(|l| b[k][l].eq_to(&a[k][l].set_zero(&params), d - 1)));
    let checks = vec![
        Check::new("phase-part-zero", phase_free),
        Check::new("b-parameter-free", no_params),
        Check::new("b-invariant-support", generated),
        Check::new("b-equals-frozen-a", frozen),
    ];
    require(&checks, "final")?;
    stages.push(Stage { name: "final".into(), diffeo: DiffeoJet::identity(n, p, d), checks });
    Ok(Theorem2Result { poisson: out, diffeo: st.total, stages, connection: conn, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> LinearFamily {
        LinearFamily::from_ints(&[&[1, -1, 2]]).unwrap()
    }

    fn product(s: &LinearFamily, a: &Jet) -> PolyVector {
        s.s_field(0, 1, a.order()).mul_jet(a).wedge(&PolyVector::basis(&[3], Jet::one(3, 1, a.order()))).unwrap()
    }

    #[test]
    fn linear_structure_is_fixed() {
        let s = frame();
        let pj = PoissonJet::new(s.linear_poisson(5), s).unwrap();
        let r = normalize_rank2p_theorem2(&pj).unwrap();
        assert!(r.diffeo.is_identity());
        assert_eq!(r.poisson, pj);
    }

    #[test]
    fn invariant_factor_is_kept() {
        let s = frame();
        let d = 5;
        let u = &Jet::var(3, 1, d, 0) * &Jet::var(3, 1, d, 1);
        let a = &Jet::one(3, 1, d) + &u;
        let pj = PoissonJet::new(product(&s, &a), s).unwrap();
        let r = normalize_rank2p_theorem2(&pj).unwrap();
        assert_eq!(r.b[0][0], a.truncate(d - 1));
    }

    #[test]
    fn parameter_dependence_is_removed() {
        let s = frame();
        let d = 6;
        let x = |i| Jet::var(3, 1, d, i);
        let u = &x(0) * &x(1);
        let a = &Jet::one(3, 1, d) + &(&x(3) * &u);
        let pj = PoissonJet::new(product(&s, &a), s).unwrap();
        let r = normalize_rank2p_theorem2(&pj).unwrap();
        assert!(r.b[0][0].is_constant() && r.b[0][0].constant_term().is_one());
        assert!(!r.diffeo.is_identity());
    }

    #[test]
    fn phase_part_is_absorbed() {
        // P = X ∧ (∂4 + u x1 ∂1) with X = (1+u)S; the corrector has weight zero
        // and [Ã, X] = u²S lies in the span of X
        let s = frame();
        let d = 6;
        let x = |i| Jet::var(3, 1, d, i);
        let u = &x(0) * &x(1);
        let xf = s.s_field(0, 1, d).mul_jet(&(&Jet::one(3, 1, d) + &u));
        let corr = PolyVector::basis(&[3], Jet::one(3, 1, d)).add(&PolyVector::basis(&[0], &u * &x(0)));
        let pj = PoissonJet::new(xf.wedge(&corr).unwrap(), s.clone()).unwrap();
        assert!(!pj.phase_part().is_zero());
        let r = normalize_rank2p_theorem2(&pj).unwrap();
        assert!(r.poisson.phase_part().is_zero());
        assert_eq!(r.b[0][0], (&Jet::one(3, 1, d) + &u).truncate(d - 1));
    }

    #[test]
    fn unnormalized_fields_are_rejected() {
        let s = frame();
        let d = 5;
        let x = |i| Jet::var(3, 1, d, i);
        let p0 = product(&s, &Jet::one(3, 1, d));
        let phi = DiffeoJet::new(vec![x(0), x(1), &x(2) + &x(1).pow(2), x(3)]).unwrap();
        let pj = PoissonJet::new(phi.pushforward(&p0).unwrap(), s).unwrap();
        assert!(matches!(normalize_rank2p_theorem2(&pj), Err(PnfError::Hypothesis(_))));
    }

    #[test]
    fn rank_condition_is_checked() {
        let s = LinearFamily::from_ints(&[&[1, 3, 5]]).unwrap();
        let d = 4;
        let x = |i| Jet::var(3, 1, d, i);
        let p = s.linear_poisson(d).add(&PolyVector::bivector(3, 1, d, vec![(1, 2, &x(1) * &x(2))]));
        let pj = PoissonJet::new(p, s).unwrap();
        assert!(matches!(normalize_rank2p_theorem2(&pj), Err(PnfError::RankCondition)));
    }
}
