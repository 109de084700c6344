//! Poisson normalization pipelines: reduction to the parameter axis, the
//! rescaled normal form with resonant brackets, and the rank-`2p` normal form.

mod frobenius;
mod poisson;
mod reduce;
mod saito;
mod straighten;
mod theorem1;
mod theorem2;

pub use frobenius::{check_compatibility, frobenius_solve};
pub use poisson::{cocycle_check, lambda_derivative, BracketTable, CocycleVerdict, PoissonJet};
pub use reduce::{reduce_poisson, verify_reduced, Reduction};
pub use saito::{divide_field, saito_divide, s_coefficients};
pub use straighten::{flow_map, straighten_field};
pub use theorem1::{
    free_columns, normalize_poisson_theorem1, rescale_quadratic_constants, resonant_support_violation, Rescaling,
    Theorem1Options, Theorem1Result,
};
pub use theorem2::{normalize_rank2p_theorem2, wedge_power, ConnectionData, FrobeniusSystem, Theorem2Result};

use serde::Serialize;

use crate::error::{PnfError, Result};
use crate::polyvector::{DiffeoJet, PolyVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), pass }
    }
}

/// One pipeline step: the coordinate change it applied and what was verified.
#[derive(Clone, Debug)]
pub struct Stage {
    pub name: String,
    pub diffeo: DiffeoJet,
    pub checks: Vec<Check>,
}

/// Re-verifies a stage with a fresh pushforward: `Φ_* old = new` and
/// `[new, new] = 0` up to the order.
pub(crate) fn verify_stage(name: &str, old: &PolyVector, new: &PolyVector, phi: &DiffeoJet) -> Result<Vec<Check>> {
    let d = new.order().min(old.order());
    let pushed = phi.pushforward(old)?;
    if let Some((idx, q, a, b)) = pushed.first_difference(new, d) {
        return Err(PnfError::Verification(format!(
            "{name}: pushforward differs at {:?}, monomial {} ({} vs {})",
            idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
            q.pretty(),
            a,
            b
        )));
    }
    let jacobi = new.jacobi_defect().truncate(d).is_zero();
    if !jacobi {
        return Err(PnfError::Verification(format!("{name}: the result fails the Jacobi identity")));
    }
    Ok(vec![Check::new("conjugacy", true), Check::new("jacobi", true)])
}
