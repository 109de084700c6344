use std::collections::HashMap;

use super::PolyVector;
use crate::algebra::{Jet, Matrix, MultiIndex, Scalar};
use crate::error::{PnfError, Result};

/// A polynomial coordinate change `y = Φ(x)` fixing the origin.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffeoJet {
    comps: Vec<Jet>,
}

impl DiffeoJet {
    pub fn identity(n_phase: usize, n_param: usize, order: u32) -> Self {
        DiffeoJet { comps: (0..n_phase + n_param).map(|i| Jet::var(n_phase, n_param, order, i)).collect() }
    }

    /// Checks arity, a common ring, `Φ(0) = 0` and an invertible linear part.
    pub fn new(comps: Vec<Jet>) -> Result<Self> {
        let Some(first) = comps.first() else {
            return Err(PnfError::Structural("empty diffeomorphism".into()));
        };
        if comps.len() != first.nvars() || comps.iter().any(|c| !c.same_ring(first)) {
            return Err(PnfError::Structural("diffeomorphism components do not match the ring".into()));
        }
        if comps.iter().any(|c| !c.constant_term().is_zero()) {
            return Err(PnfError::Structural("diffeomorphism does not fix the origin".into()));
        }
        let order = comps.iter().map(|c| c.order()).min().unwrap();
        let d = DiffeoJet { comps: comps.into_iter().map(|c| c.truncate(order)).collect() };
        if d.linear_part().inverse().is_none() {
            return Err(PnfError::SingularLinearPart);
        }
        Ok(d)
    }

    /// `y = M x`.
    pub fn linear(m: &Matrix, n_phase: usize, n_param: usize, order: u32) -> Result<Self> {
        let n = n_phase + n_param;
        let comps = (0..n)
            .map(|a| {
                Jet::from_terms(n_phase, n_param, order, (0..n).map(|b| (MultiIndex::unit(n, b), m.get(a, b).clone())))
            })
            .collect();
        Self::new(comps)
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    pub fn order(&self) -> u32 {
        self.comps[0].order()
    }

    pub fn n_phase(&self) -> usize {
        self.comps[0].n_phase()
    }

    pub fn n_param(&self) -> usize {
        self.comps[0].n_param()
    }

    pub fn nvars(&self) -> usize {
        self.comps.len()
    }

    pub fn linear_part(&self) -> Matrix {
        let n = self.nvars();
        Matrix::from_rows(
            (0..n).map(|a| (0..n).map(|b| self.comps[a].coeff(&MultiIndex::unit(n, b))).collect()).collect(),
        )
    }

    pub fn is_tangent_to_identity(&self) -> bool {
        self.linear_part() == Matrix::identity(self.nvars())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n_phase(), self.n_param(), self.order())
    }

    pub fn truncate(&self, order: u32) -> DiffeoJet {
        DiffeoJet { comps: self.comps.iter().map(|c| c.truncate(order)).collect() }
    }

    pub fn with_order(&self, order: u32) -> DiffeoJet {
        DiffeoJet { comps: self.comps.iter().map(|c| c.with_order(order)).collect() }
    }

    /// `self ∘ inner`, i.e. `x ↦ Φ(Ψ(x))`.
    pub fn compose(&self, inner: &DiffeoJet) -> DiffeoJet {
        DiffeoJet { comps: self.comps.iter().map(|c| c.compose(&inner.comps).expect("arity")).collect() }
    }

    /// `f ∘ Φ`.
    pub fn pull(&self, f: &Jet) -> Jet {
        f.compose(&self.comps).expect("arity")
    }

    /// Formal inverse to the same order, by fixed-point iteration
    /// `ψ ← L⁻¹ (y − h(ψ))` where `Φ = L + h`.
    pub fn inverse(&self) -> Result<DiffeoJet> {
        let l = self.linear_part();
        let linv = l.inverse().ok_or(PnfError::SingularLinearPart)?;
        let n = self.nvars();
        let h: Vec<Jet> = self.comps.iter().map(|c| c.filter(|q| q.degree() >= 2)).collect();
        let y: Vec<Jet> = (0..n).map(|i| self.comps[0].var_like(i)).collect();
        let zero = self.comps[0].zero_like();
        let mut psi = linv.apply(&y, &zero);
        for _ in 1..self.order() {
            let hp: Vec<Jet> = h.iter().map(|hc| hc.compose(&psi).expect("arity")).collect();
            let rhs: Vec<Jet> = y.iter().zip(&hp).map(|(a, b)| a - b).collect();
            psi = linv.apply(&rhs, &zero);
        }
        Ok(DiffeoJet { comps: psi })
    }

    /// `∂Φ_a / ∂x_b`.
    pub fn jacobian(&self) -> Vec<Vec<Jet>> {
        let n = self.nvars();
        self.comps.iter().map(|c| (0..n).map(|b| c.diff(b)).collect()).collect()
    }

    /// `Φ_*T(y) = DΦ(Φ⁻¹(y)) T(Φ⁻¹(y))`.
    pub fn pushforward(&self, t: &PolyVector) -> Result<PolyVector> {
        let inv = self.inverse()?;
        self.pushforward_with_inverse(t, &inv)
    }

    /// Pushforward reusing a precomputed inverse.
    pub fn pushforward_with_inverse(&self, t: &PolyVector, inv: &DiffeoJet) -> Result<PolyVector> {
        if t.nvars() != self.nvars() {
            return Err(PnfError::Structural("pushforward across different dimensions".into()));
        }
        let jac = self.jacobian();
        let n = self.nvars();
        let order = self.order().min(t.order());
        // images of the coordinate fields ∂_j
        let images: Vec<PolyVector> = (0..n)
            .map(|j| {
                let comps: Vec<Jet> = (0..n).map(|a| jac[a][j].truncate(order)).collect();
                PolyVector::vector_field(&comps)
            })
            .collect();
        let mut cache: HashMap<Vec<usize>, PolyVector> = HashMap::new();
        let mut pushed = PolyVector::zero(t.degree(), t.n_phase(), t.n_param(), order);
        for (idx, c) in t.terms() {
            let w = cache
                .entry(idx.clone())
                .or_insert_with(|| {
                    let mut w = PolyVector::function(Jet::one(t.n_phase(), t.n_param(), order));
                    for &j in idx {
                        w = w.wedge(&images[j]).expect("degree");
                    }
                    w
                })
                .clone();
            pushed = pushed.add(&w.mul_jet(c));
        }
        Ok(pushed.map(|f| f.compose(inv.components()).expect("arity")))
    }
}

impl DiffeoJet {
    /// `y_i = x_i + shift_i` for every `i` (used for translations along the
    /// parameter axis, where `shift` must vanish at the origin).
    pub fn translation(shift: &[Jet]) -> Result<DiffeoJet> {
        let comps = shift.iter().enumerate().map(|(i, s)| &s.var_like(i) + s).collect();
        Self::new(comps)
    }

    /// Renders the components as strings for reports.
    pub fn describe(&self) -> Vec<String> {
        self.comps.iter().map(|c| c.to_string()).collect()
    }

    pub fn scale_component(&self, i: usize, c: &Scalar) -> DiffeoJet {
        let mut d = self.clone();
        d.comps[i] = d.comps[i].scale(c);
        d
    }
}
