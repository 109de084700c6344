//! Linear-part analysis: weights, resonances, the hypotheses, small divisors
//! and monomial invariants.

mod family;
mod hypotheses;
mod invariants;
mod omega;
mod resonance;

pub use family::LinearFamily;
pub use hypotheses::{hypotheses_report, HypothesesReport, HypothesisVerdict, NonResonance};
pub use invariants::{extreme_rays, invariant_generators, InvariantRing};
pub use omega::{omega_sequence, OmegaEntry, OmegaReport};
pub use resonance::{
    is_bivector_resonant, is_invariant, is_vector_resonant, resonant_monomials, weight, ResonanceEntry,
    ResonanceKind, ResonanceReport,
};
