//! Machine-readable reports for the `analyze`, `normalize` and `check`
//! commands. Each builder takes file contents and never touches the disk,
//! so the same code serves the command line and the browser demo.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{PnfError, Result};
use crate::pipeline::{
    normalize_poisson_theorem1, normalize_rank2p_theorem2, Check, PoissonJet, Stage, Theorem1Options,
};
use crate::polyvector::DiffeoJet;
use crate::serial::{diffeo_from_json, diffeo_to_json, digest, jet_to_json, parse_json, DiffeoJson, ProblemFile};
use crate::spectrum::{hypotheses_report, invariant_generators, omega_sequence, resonant_monomials, ResonanceKind};

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub diffeo: DiffeoJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    /// Stage names from outermost to innermost.
    pub stage: Vec<String>,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the input bytes (joined by a zero byte when there are several).
    pub input_digest: String,
    pub order: Option<u32>,
    pub flags: BTreeMap<String, Value>,
    pub verdicts: BTreeMap<String, Value>,
    pub stages: Vec<StageReport>,
    pub output: BTreeMap<String, Value>,
    pub checklist: Vec<Check>,
    pub warnings: Vec<String>,
    pub error: Option<Failure>,
    /// Wall-clock seconds per phase. Only filled on request, since it
    /// breaks byte-for-byte reproducibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    fn new(command: &str, inputs: &[&str]) -> Self {
        Report {
            command: command.into(),
            input_digest: digest(inputs.join("\0").as_bytes()),
            order: None,
            flags: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            stages: Vec::new(),
            output: BTreeMap::new(),
            checklist: Vec::new(),
            warnings: Vec::new(),
            error: None,
            timings: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(f) => f.exit_code,
            None if self.checklist.iter().all(|c| c.pass) => 0,
            None => 5,
        }
    }

    pub fn success(&self) -> bool {
        self.exit_code() == 0
    }

    pub fn to_json(&self) -> String {
        crate::serial::to_json(self)
    }

    fn fail(mut self, e: PnfError) -> Self {
        self.error = Some(Failure { stage: e.stage_path(), message: e.root().to_string(), exit_code: e.exit_code() });
        self
    }

    fn set(&mut self, key: &str, v: impl Serialize) {
        self.output.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    fn verdict(&mut self, key: &str, v: impl Serialize) {
        self.verdicts.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    fn push_stage(&mut self, prefix: &str, st: &Stage) {
        let name = if prefix.is_empty() { st.name.clone() } else { format!("{prefix}/{}", st.name) };
        for c in &st.checks {
            self.checklist.push(Check::new(format!("{name}/{}", c.name), c.pass));
        }
        self.stages.push(StageReport { name, checks: st.checks.clone(), diffeo: diffeo_to_json(&st.diffeo) });
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = format!("{}: ", self.command);
        match &self.error {
            Some(f) if f.stage.is_empty() => s.push_str(&format!("error: {}", f.message)),
            Some(f) => s.push_str(&format!("error in {}: {}", f.stage.join("/"), f.message)),
            None => {
                let failed: Vec<&str> = self.checklist.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                if failed.is_empty() {
                    s.push_str(&format!("ok ({} checks)", self.checklist.len()));
                } else {
                    s.push_str(&format!("failed checks: {}", failed.join(", ")));
                }
            }
        }
        for w in &self.warnings {
            s.push_str(&format!("\nwarning: {w}"));
        }
        s
    }
}

struct Clock {
    on: bool,
    marks: BTreeMap<String, f64>,
}

impl Clock {
    fn new(on: bool) -> Self {
        Clock { on, marks: BTreeMap::new() }
    }

    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        if !self.on {
            return f();
        }
        let t = Instant::now();
        let out = f();
        self.marks.insert(name.into(), t.elapsed().as_secs_f64());
        out
    }

    fn finish(self, r: &mut Report) {
        if self.on {
            r.timings = Some(self.marks);
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalyzeOptions {
    pub order: Option<u32>,
    /// Largest `k` of the small-divisor sequence (default 3).
    pub k_max: Option<u32>,
    /// Degree bound of the non-resonance and invariant scans (default: the order).
    pub degree_bound: Option<u32>,
    pub timings: bool,
}

/// Spectral analysis of the linear part of a problem file.
pub fn analyze(text: &str, opts: &AnalyzeOptions) -> Report {
    let mut r = Report::new("analyze", &[text]);
    let file = match ProblemFile::parse(text) {
        Ok(f) => f,
        Err(e) => return r.fail(e),
    };
    let d = file.effective_order(opts.order);
    let k_max = opts.k_max.unwrap_or(3);
    let bound = opts.degree_bound.unwrap_or(d);
    r.order = Some(d);
    r.flags.insert("k_max".into(), json!(k_max));
    r.flags.insert("degree_bound".into(), json!(bound));
    let mut clock = Clock::new(opts.timings);
    if let Err(e) = clock.time("constructor", || file.to_poisson(Some(d))) {
        return r.fail(e);
    }
    r.checklist.push(Check::new("constructor", true));
    let s = file.linear().expect("validated by parse");
    let hyp = clock.time("hypotheses", || hypotheses_report(&s, bound));
    r.verdict("hypotheses", &hyp);
    r.verdict("h_all", hyp.h_all());
    r.verdict("nonresonant", !hyp.non_resonance.is_resonant());
    let res: BTreeMap<&str, _> = clock.time("resonances", || {
        [("function", ResonanceKind::Function), ("vector", ResonanceKind::Vector), ("bivector", ResonanceKind::Bivector)]
            .into_iter()
            .map(|(k, kind)| (k, resonant_monomials(&s, kind, bound)))
            .collect()
    });
    r.set("resonant_monomials", res);
    let ring = clock.time("invariants", || invariant_generators(&s, bound));
    r.set("invariant_generators", ring);
    let omega = clock.time("omega", || omega_sequence(&s, k_max));
    r.verdict("diophantine", &omega);
    clock.finish(&mut r);
    r
}

#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    pub order: Option<u32>,
    /// 1 or 2.
    pub theorem: u32,
    pub force: bool,
    pub degree_bound: Option<u32>,
    pub timings: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { order: None, theorem: 1, force: false, degree_bound: None, timings: false }
    }
}

/// Runs the normal-form pipeline and records every stage.
pub fn normalize(text: &str, opts: &NormalizeOptions) -> Report {
    let mut r = Report::new("normalize", &[text]);
    r.flags.insert("theorem".into(), json!(opts.theorem));
    r.flags.insert("force".into(), json!(opts.force));
    if !(1..=2).contains(&opts.theorem) {
        return r.fail(PnfError::Parse(format!("unknown theorem {}", opts.theorem)));
    }
    let file = match ProblemFile::parse(text) {
        Ok(f) => f,
        Err(e) => return r.fail(e),
    };
    let d = file.effective_order(opts.order);
    r.order = Some(d);
    let mut clock = Clock::new(opts.timings);
    let input = match clock.time("constructor", || file.to_poisson(Some(d))) {
        Ok(p) => p,
        Err(e) => return r.fail(e),
    };
    r.checklist.push(Check::new("constructor", true));
    let t1opts = Theorem1Options { force: opts.force, nonres_bound: opts.degree_bound.unwrap_or(d) };
    let t1 = match clock.time("theorem1", || normalize_poisson_theorem1(&input, &t1opts)) {
        Ok(t) => t,
        Err(e) => {
            r.verdict("hypotheses", hypotheses_report(input.linear(), t1opts.nonres_bound));
            clock.finish(&mut r);
            return r.fail(e.in_stage("theorem1"));
        }
    };
    r.verdict("hypotheses", &t1.hypotheses);
    r.verdict("overridden", &t1.overridden);
    for st in &t1.stages {
        r.push_stage("theorem1", st);
    }
    r.set(
        "quadratic_constants",
        t1.constants
            .iter()
            .map(|(i, j, c)| json!({"i": i + 1, "j": j + 1, "re": c.re_string(), "im": c.im_string()}))
            .collect::<Vec<_>>(),
    );
    r.set("free_indices", t1.free.iter().map(|i| i + 1).collect::<Vec<_>>());
    if let Some(a) = &t1.a {
        r.set("a", jet_matrix(a));
    }
    let (out, total) = if opts.theorem == 2 {
        let t2 = match clock.time("theorem2", || normalize_rank2p_theorem2(&t1.poisson)) {
            Ok(t) => t,
            Err(e) => {
                clock.finish(&mut r);
                return r.fail(e.in_stage("theorem2"));
            }
        };
        for st in &t2.stages {
            r.push_stage("theorem2", st);
        }
        r.set("b", jet_matrix(&t2.b));
        let total = t2.diffeo.compose(&t1.diffeo);
        (t2.poisson, total)
    } else {
        (t1.poisson, t1.diffeo)
    };
    let replay = clock.time("replay", || replay(&input, &out, &total));
    r.checklist.push(Check::new("composite-conjugacy", replay.is_none()));
    if let Some(msg) = replay {
        r.warnings.push(msg);
    }
    r.set("poisson", ProblemFile::from_poisson(&out, file.metadata.clone()));
    r.set("diffeo", diffeo_to_json(&total));
    clock.finish(&mut r);
    r
}

fn jet_matrix(m: &[Vec<crate::algebra::Jet>]) -> Vec<Vec<Value>> {
    m.iter().map(|row| row.iter().map(|j| serde_json::to_value(jet_to_json(j)).expect("json")).collect()).collect()
}

/// Independent pushforward of the input by the composite diffeomorphism.
fn replay(input: &PoissonJet, out: &PoissonJet, phi: &DiffeoJet) -> Option<String> {
    let d = out.order();
    match phi.pushforward(input.bracket()) {
        Err(e) => Some(format!("replay failed: {e}")),
        Ok(pushed) => pushed.first_difference(out.bracket(), d).map(|(idx, q, a, b)| {
            format!(
                "replayed pushforward differs at {:?}, monomial {}: {} vs {}",
                idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                q.pretty(),
                a,
                b
            )
        }),
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub order: Option<u32>,
    pub timings: bool,
}

/// Accepts either a problem file or a `normalize` report (its output).
fn problem_of(text: &str) -> Result<ProblemFile> {
    let v: Value = parse_json(text)?;
    if v.get("command").is_some() {
        let p = v.pointer("/output/poisson").ok_or_else(|| PnfError::Parse("report has no output structure".into()))?;
        return serde_json::from_value(p.clone()).map_err(|e| PnfError::Parse(e.to_string()));
    }
    ProblemFile::parse(text)
}

/// Accepts either a diffeomorphism file or a `normalize` report.
fn diffeo_of(text: &str) -> Result<DiffeoJet> {
    let v: Value = parse_json(text)?;
    let v = if v.get("command").is_some() {
        v.pointer("/output/diffeo").cloned().ok_or_else(|| PnfError::Parse("report has no diffeomorphism".into()))?
    } else {
        v
    };
    let d: DiffeoJson = serde_json::from_value(v).map_err(|e| PnfError::Parse(e.to_string()))?;
    diffeo_from_json(&d)
}

/// Verifies `Φ_* A = B` up to the order and reports the first differing
/// coefficient. Without an explicit `Φ` the one recorded in a `normalize`
/// report `B` is used, else the identity.
pub fn check(a: &str, b: &str, diffeo: Option<&str>, opts: &CheckOptions) -> Report {
    let mut inputs = vec![a, b];
    inputs.extend(diffeo);
    let mut r = Report::new("check", &inputs);
    let mut clock = Clock::new(opts.timings);
    let run = |r: &mut Report, clock: &mut Clock| -> Result<()> {
        let fa = problem_of(a).map_err(|e| e.in_stage("a"))?;
        let fb = problem_of(b).map_err(|e| e.in_stage("b"))?;
        let recorded = diffeo.is_none() && parse_json::<Value>(b).is_ok_and(|v| v.pointer("/output/diffeo").is_some());
        let phi = match diffeo {
            Some(t) => Some(diffeo_of(t).map_err(|e| e.in_stage("diffeo"))?),
            None if recorded => Some(diffeo_of(b).map_err(|e| e.in_stage("b"))?),
            None => None,
        };
        r.set("diffeo_source", if diffeo.is_some() { "argument" } else if recorded { "b" } else { "identity" });
        let (da, db) = (fa.effective_order(None), fb.effective_order(None));
        if da != db {
            r.warnings.push(format!("orders differ: {da} and {db}"));
        }
        let mut d = opts.order.unwrap_or(da.min(db));
        if let Some(phi) = &phi {
            if phi.order() < d {
                r.warnings.push(format!("diffeomorphism has order {} < {d}", phi.order()));
                d = phi.order();
            }
        }
        r.order = Some(d);
        let pa = fa.to_poisson(Some(d)).map_err(|e| e.in_stage("a"))?;
        let pb = fb.to_poisson(Some(d)).map_err(|e| e.in_stage("b"))?;
        r.checklist.push(Check::new("constructor", true));
        let same_linear = pa.linear() == pb.linear();
        r.checklist.push(Check::new("same-linear-part", same_linear));
        let pushed = clock.time("pushforward", || match &phi {
            Some(phi) => phi.with_order(d).pushforward(pa.bracket()),
            None => Ok(pa.bracket().clone()),
        })?;
        let diff = pushed.first_difference(pb.bracket(), d);
        r.checklist.push(Check::new("pushforward-equal", diff.is_none()));
        r.set(
            "first_difference",
            diff.map(|(idx, q, x, y)| {
                json!({
                    "indices": idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "monomial": q.exps(),
                    "pushed": x.to_string(),
                    "target": y.to_string(),
                })
            }),
        );
        Ok(())
    };
    let res = run(&mut r, &mut clock);
    clock.finish(&mut r);
    match res {
        Ok(()) => r,
        Err(e) => r.fail(e),
    }
}
