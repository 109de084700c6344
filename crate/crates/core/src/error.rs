use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PnfError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("truncation loss: integrating in x{var} would push degree {degree} past order {order}")]
    TruncationLoss { var: usize, degree: u32, order: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular linear part")]
    SingularLinearPart,

    #[error("constructor check failed: {0}")]
    Constructor(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("fields {i} and {j} do not commute: [X{i}, X{j}] = {bracket}")]
    NonCommuting { i: usize, j: usize, bracket: String },

    #[error("inconsistent cross-equation for field {field}, component {component}, monomial {monomial}")]
    InconsistentCrossEquation { field: usize, component: usize, monomial: String },

    #[error("linearization is not invertible")]
    NonInvertibleLinearization,

    #[error("eigenvalues depend on the parameters after translation: {0}")]
    ParameterDependentSpectrum(String),

    #[error("bracket {{x{i}, x{j}}} has a term of degree < 2 in the phase variables")]
    OrderTwoViolation { i: usize, j: usize },

    #[error("non-resonant bracket term: {0}")]
    ResonantSupportViolation(String),

    #[error("cocycle identity fails at (i, j, k) = ({i}, {j}, {k})")]
    CocycleViolation { i: usize, j: usize, k: usize },

    #[error("the fields Lambda_i have rank {rank} < p = {p}")]
    LambdaRankDeficient { rank: usize, p: usize },

    #[error("no division: {0}")]
    NoDivision(String),

    #[error("incompatible system: {0}")]
    Incompatible(String),

    #[error("precondition bracket is nonzero: {0}")]
    PreconditionBracket(String),

    #[error("rank condition fails: P^(p+1) != 0")]
    RankCondition,

    #[error("post-verification failed: {0}")]
    Verification(String),

    #[error("stage {stage}: {source}")]
    Stage { stage: String, source: Box<PnfError> },
}

impl PnfError {
    pub fn in_stage(self, stage: &str) -> PnfError {
        PnfError::Stage { stage: stage.to_string(), source: Box::new(self) }
    }

    /// Innermost error, looking through stage wrappers.
    pub fn root(&self) -> &PnfError {
        match self {
            PnfError::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn stage_path(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut e = self;
        while let PnfError::Stage { stage, source } = e {
            out.push(stage.clone());
            e = source;
        }
        out
    }

    /// Process exit code: 2 parse, 3 constructor, 4 hypothesis, 5 anything else.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            PnfError::Parse(_) => 2,
            PnfError::Constructor(_) => 3,
            PnfError::Hypothesis(_)
            | PnfError::LambdaRankDeficient { .. }
            | PnfError::ParameterDependentSpectrum(_)
            | PnfError::NonInvertibleLinearization => 4,
            _ => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, PnfError>;

pub(crate) trait StageExt<T> {
    fn stage(self, name: &str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, name: &str) -> Result<T> {
        self.map_err(|e| e.in_stage(name))
    }
}
