use crate::algebra::{Jet, Matrix, Scalar};
use crate::error::{PnfError, Result, StageExt};
use crate::normalform::{extract_coefficients, normalize_family, FieldFamily};
use crate::polyvector::DiffeoJet;
use crate::spectrum::{hypotheses_report, is_bivector_resonant, HypothesesReport, LinearFamily};

use super::{cocycle_check, reduce_poisson, verify_stage, Check, PoissonJet, Stage};

#[derive(Clone, Debug)]
pub struct Theorem1Options {
    /// Run despite failed hypotheses, recording them.
    pub force: bool,
    /// Degree bound for the non-resonance scan of the report.
    pub nonres_bound: u32,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Theorem1Options { force: false, nonres_bound: 6 }
    }
}

#[derive(Clone, Debug)]
pub struct Theorem1Result {
    pub poisson: PoissonJet,
    /// Composite change of coordinates, input to output.
    pub diffeo: DiffeoJet,
    pub stages: Vec<Stage>,
    pub hypotheses: HypothesesReport,
    /// `ã_{k,l}` with `X_k = Σ_l ã_{k,l} S_l`, when that shape was reached.
    pub a: Option<Vec<Vec<Jet>>>,
    /// Constant coefficients `c_{i,j}` of `x_i x_j` in `{x_i, x_j}`, 0-based `i < j`.
    pub constants: Vec<(usize, usize, Scalar)>,
    /// Phase indices whose `Λ_i` were used to absorb the quadratic coefficients.
    pub free: Vec<usize>,
    /// Hypotheses that failed and were overridden by `force`.
    pub overridden: Vec<String>,
}

/// First bivector term `x^Q ∂_i ∧ ∂_j` (phase `i < j`) that is not resonant.
pub fn resonant_support_violation(pj: &PoissonJet) -> Option<String> {
    let n = pj.n();
    let s = pj.linear();
    for i in 0..n {
        for j in i + 1..n {
            for q in pj.get(i, j).terms().keys() {
                if !is_bivector_resonant(s, q, i, j) {
                    return Some(format!("{{x{}, x{}}} has the term {}", i + 1, j + 1, q.pretty()));
                }
            }
        }
    }
    None
}

/// Lexicographically first `p` phase indices with independent `Λ_i`.
pub fn free_columns(s: &LinearFamily) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..s.n() {
        let mut cols = chosen.clone();
        cols.push(i);
        let m = Matrix::from_rows((0..s.p()).map(|j| cols.iter().map(|&c| s.get(j, c).clone()).collect()).collect());
        if m.rank() == cols.len() {
            chosen = cols;
            if chosen.len() == s.p() {
                return Ok(chosen);
            }
        }
    }
    Err(PnfError::LambdaRankDeficient { rank: chosen.len(), p: s.p() })
}

#[derive(Clone, Debug)]
pub struct Rescaling {
    pub poisson: PoissonJet,
    pub diffeo: DiffeoJet,
    pub free: Vec<usize>,
    pub stages: Vec<Stage>,
}

fn slices_ok<F: Fn(usize, usize, &Jet) -> bool>(pj: &PoissonJet, ok: F) -> bool {
    let t = pj.bracket_table();
    let n = pj.n();
    let d = pj.order().saturating_sub(2);
    (0..n).all(|i| (0..n).all(|j| i == j || ok(i, j, &t.quadratic_slice(i, j).truncate(d))))
}

/// Makes the coefficient of `x_i x_j` in `{x_i, x_j}` constant, and zero when
/// `i` or `j` is a free index, by rescalings `x_i = exp(γ_i(y'')) y_i`.
/// Phase indices are permuted so that the free ones come first and the
/// parameters are changed linearly so that `Λ_k = ∂_{n+k}`; both are undone at
/// the end.
pub fn rescale_quadratic_constants(pj: &PoissonJet) -> Result<Rescaling> {
    let (n, p, d) = (pj.n(), pj.p(), pj.order());
    let nv = n + p;
    let s = pj.linear();
    let free = free_columns(s)?;
    let mut perm = free.clone();
    perm.extend((0..n).filter(|i| !free.contains(i)));
    let permuted = s.permute_columns(&perm);
    let m = Matrix::from_rows((0..p).map(|j| (0..p).map(|k| permuted.get(j, k).clone()).collect()).collect());
    let b = m.inverse().ok_or(PnfError::LambdaRankDeficient { rank: m.rank(), p })?;
    let mut l = Matrix::zeros(nv, nv);
    for (c, &old) in perm.iter().enumerate() {
        l.set(c, old, Scalar::one());
    }
    for a in 0..p {
        for c in 0..p {
            l.set(n + a, n + c, b.get(a, c).clone());
        }
    }
    let frame = DiffeoJet::linear(&l, n, p, d)?;
    let family = permuted.transform_rows(&b)?;
    let mut cur = PoissonJet::new(frame.pushforward(pj.bracket())?, family.clone()).stage("frame")?;
    let mut total = frame.clone();
    let mut stages = Vec::new();

    for k in 0..p {
        let name = format!("rescale-{}", k + 1);
        let table = cur.bracket_table();
        let gammas: Vec<Jet> = (0..n)
            .map(|i| table.quadratic_slice(k, i).truncate(d.saturating_sub(2)).with_order(d - 1).integrate_within_order(n + k))
            .collect();
        let mut checks = Vec::new();
        let mut step = DiffeoJet::identity(n, p, d);
        if gammas.iter().any(|g| !g.is_zero()) {
            let comps = (0..nv)
                .map(|v| {
                    let x = Jet::var(n, p, d, v);
                    if v < n {
                        Ok(&x * &(-&gammas[v]).with_order(d).exp()?)
                    } else {
                        Ok(x)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            step = DiffeoJet::new(comps)?;
            let next = PoissonJet::new(step.pushforward(cur.bracket())?, family.clone()).stage(&name)?;
            checks = verify_stage(&name, cur.bracket(), next.bracket(), &step).stage(&name)?;
            total = step.compose(&total);
            cur = next;
        }
        let d3 = d.saturating_sub(3);
        let p1 = slices_ok(&cur, |i, _, c| i > k || c.is_zero());
        let p2 = slices_ok(&cur, |i, j, c| i >= p || j >= p || (n..=n + k).all(|v| !c.depends_on(v)));
        let p3 = slices_ok(&cur, |_, _, c| (0..=k).all(|m| c.diff(n + m).truncate(d3).is_zero()));
        checks.push(Check::new("vanishing-row", p1));
        checks.push(Check::new("parameter-support", p2));
        checks.push(Check::new("lambda-annihilated", p3));
        if !(p1 && p2 && p3) {
            return Err(PnfError::Verification(format!("induction properties after stage {} ({p1}, {p2}, {p3})", k + 1)))
                .stage(&name);
        }
        stages.push(Stage { name, diffeo: step, checks });
    }

    let unframe = frame.inverse()?;
    let out = PoissonJet::new(unframe.pushforward(cur.bracket())?, s.clone()).stage("unframe")?;
    total = unframe.compose(&total);
    let checks = verify_stage("rescale", pj.bracket(), out.bracket(), &total).stage("rescale")?;
    stages.push(Stage { name: "unframe".into(), diffeo: unframe, checks });
    Ok(Rescaling { poisson: out, diffeo: total, free, stages })
}

fn constant_table(pj: &PoissonJet) -> Result<Vec<(usize, usize, Scalar)>> {
    let n = pj.n();
    let t = pj.bracket_table();
    let d = pj.order().saturating_sub(2);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = t.quadratic_slice(i, j).truncate(d);
            if !c.is_constant() {
                return Err(PnfError::Verification(format!(
                    "coefficient of x{} x{} in {{x{}, x{}}} is not constant: {}",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1,
                    c
                )));
            }
            out.push((i, j, c.constant_term()));
        }
    }
    Ok(out)
}

/// Reduction, simultaneous normalization of the hamiltonians of the
/// parameters, pushforward of `P`, resonant-support and cocycle checks, and
/// the exponential rescaling of the quadratic coefficients.
pub fn normalize_poisson_theorem1(input: &PoissonJet, opts: &Theorem1Options) -> Result<Theorem1Result> {
    let s = input.linear().clone();
    let (n, p, d) = (input.n(), input.p(), input.order());
    let hypotheses = hypotheses_report(&s, opts.nonres_bound);
    let mut overridden: Vec<String> = hypotheses
        .failures()
        .into_iter()
        .filter(|f| f.starts_with('H'))
        .map(|f| format!("{f} fails"))
        .collect();
    if !overridden.is_empty() && !opts.force {
        return Err(PnfError::Hypothesis(overridden.join(", "))).stage("hypotheses");
    }
    let mut stages = Vec::new();

    let red = reduce_poisson(input).stage("reduce")?;
    let checks = verify_stage("reduce", input.bracket(), red.poisson.bracket(), &red.diffeo).stage("reduce")?;
    stages.push(Stage { name: "reduce".into(), diffeo: red.diffeo.clone(), checks });
    let mut total = red.diffeo.clone();
    let reduced = red.poisson;

    let family = FieldFamily::new(reduced.hamiltonians(), s.clone()).stage("normalize")?;
    let norm = normalize_family(&family).stage("normalize")?;
    let shape = extract_coefficients(&s, &norm.normal_forms);
    if let Err(reason) = &shape {
        if !opts.force {
            return Err(PnfError::Hypothesis(format!("normal form is not Σ a S: {reason}"))).stage("normalize");
        }
        overridden.push(format!("normal form shape: {reason}"));
    }
    let normalized =
        PoissonJet::new(norm.diffeo.pushforward(reduced.bracket())?, s.clone()).stage("normalize")?;
    let mut checks = verify_stage("normalize", reduced.bracket(), normalized.bracket(), &norm.diffeo).stage("normalize")?;
    let ham_ok = normalized.hamiltonians().iter().zip(&norm.normal_forms).all(|(a, b)| a.eq_to(b, d));
    checks.push(Check::new("hamiltonians-normalized", ham_ok));
    if !ham_ok {
        return Err(PnfError::Verification("hamiltonians of the pushed structure differ from the normal forms".into()))
            .stage("normalize");
    }
    checks.push(Check::new("normal-form-shape", shape.is_ok()));
    if let Some(v) = resonant_support_violation(&normalized) {
        return Err(PnfError::ResonantSupportViolation(v)).stage("resonant-support");
    }
    checks.push(Check::new("resonant-support", true));
    let cocycle = cocycle_check(&normalized.bracket_table(), &s);
    checks.push(Check::new("cocycle", cocycle.holds));
    if let Some((i, j, k)) = cocycle.violation {
        return Err(PnfError::CocycleViolation { i, j, k }).stage("cocycle");
    }
    stages.push(Stage { name: "normalize".into(), diffeo: norm.diffeo.clone(), checks });
    total = norm.diffeo.compose(&total);

    let resc = rescale_quadratic_constants(&normalized).stage("rescale")?;
    stages.extend(resc.stages);
    total = resc.diffeo.compose(&total);
    let out = resc.poisson;

    let mut checks = verify_stage("theorem1", input.bracket(), out.bracket(), &total).stage("final")?;
    if let Some(v) = resonant_support_violation(&out) {
        return Err(PnfError::ResonantSupportViolation(v)).stage("final");
    }
    checks.push(Check::new("resonant-support", true));
    let constants = constant_table(&out).stage("final")?;
    checks.push(Check::new("constant-quadratic", true));
    let free_zero = constants.iter().all(|(i, j, c)| c.is_zero() || !(resc.free.contains(i) || resc.free.contains(j)));
    checks.push(Check::new("free-quadratic-zero", free_zero));
    if !free_zero {
        return Err(PnfError::Verification("a quadratic coefficient on a free index survived".into())).stage("final");
    }
    let a = extract_coefficients(&s, &out.hamiltonians()).ok();
    checks.push(Check::new("hamiltonian-shape", a.is_some()));
    if n <= p + 1 {
        let linear = out.bracket().eq_to(&s.linear_poisson(d), d);
        checks.push(Check::new("linearized", linear));
    }
    stages.push(Stage { name: "final".into(), diffeo: DiffeoJet::identity(n, p, d), checks });
    Ok(Theorem1Result {
        poisson: out,
        diffeo: total,
        stages,
        hypotheses,
        a,
        constants,
        free: resc.free,
        overridden,
    })
}
