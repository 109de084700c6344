use std::collections::BTreeMap;

use crate::algebra::{Jet, MultiIndex, Scalar};
use crate::error::{PnfError, Result};
use crate::polyvector::PolyVector;
use crate::spectrum::LinearFamily;

/// A truncated Poisson bivector on `n` phase and `p` parameter variables,
/// split as `P = Σ_k X_k ∧ ∂_{n+k} + Σ_{i<j<=n} g_{i,j} ∂_i ∧ ∂_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonJet {
    linear: LinearFamily,
    bracket: PolyVector,
}

impl PoissonJet {
    /// Checks `P(0) = 0`, that parameters Poisson-commute, the Jacobi identity
    /// up to the order, and `D_{x'} X_k(0) = diag(λ_k)`.
    pub fn new(bracket: PolyVector, linear: LinearFamily) -> Result<Self> {
        let pj = Self::new_unchecked(bracket, linear)?;
        pj.check()?;
        Ok(pj)
    }

    /// Only checks the shape (degree and variable split).
    pub fn new_unchecked(bracket: PolyVector, linear: LinearFamily) -> Result<Self> {
        if bracket.degree() != 2 {
            return Err(PnfError::Structural(format!("expected a bivector, got degree {}", bracket.degree())));
        }
        if bracket.n_phase() != linear.n() || bracket.n_param() != linear.p() {
            return Err(PnfError::Structural(format!(
                "bivector on ({}, {}) variables does not match n = {}, p = {}",
                bracket.n_phase(),
                bracket.n_param(),
                linear.n(),
                linear.p()
            )));
        }
        Ok(PoissonJet { linear, bracket })
    }

    fn check(&self) -> Result<()> {
        let (n, p) = (self.n(), self.p());
        for (idx, c) in self.bracket.terms() {
            if !c.constant_term().is_zero() {
                return Err(PnfError::Constructor(format!(
                    "{{x{}, x{}}} does not vanish at the origin",
                    idx[0] + 1,
                    idx[1] + 1
                )));
            }
            if idx[0] >= n {
                return Err(PnfError::Constructor(format!(
                    "parameters x{} and x{} do not Poisson-commute",
                    idx[0] + 1,
                    idx[1] + 1
                )));
            }
        }
        let defect = self.bracket.jacobi_defect().truncate(self.order());
        if let Some((idx, c)) = defect.terms().iter().next() {
            let q = c.terms().keys().next().unwrap();
            return Err(PnfError::Constructor(format!(
                "Jacobi identity fails: [P,P] has the term {} at ({})",
                q.pretty(),
                idx.iter().map(|i| format!("x{}", i + 1)).collect::<Vec<_>>().join(",")
            )));
        }
        let nv = n + p;
        for k in 0..p {
            for i in 0..n {
                let c = self.bracket.component(&[i, n + k]);
                for l in 0..n {
                    let got = c.coeff(&MultiIndex::unit(nv, l));
                    let want = if l == i { self.linear.get(k, i).clone() } else { Scalar::zero() };
                    if got != want {
                        return Err(PnfError::Constructor(format!(
                            "{{x{}, x{}}} has linear coefficient {} on x{} instead of {}",
                            i + 1,
                            n + k + 1,
                            got,
                            l + 1,
                            want
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn linear(&self) -> &LinearFamily {
        &self.linear
    }

    pub fn bracket(&self) -> &PolyVector {
        &self.bracket
    }

    pub fn n(&self) -> usize {
        self.linear.n()
    }

    pub fn p(&self) -> usize {
        self.linear.p()
    }

    pub fn order(&self) -> u32 {
        self.bracket.order()
    }

    /// `{x_i, x_j}`.
    pub fn get(&self, i: usize, j: usize) -> Jet {
        self.bracket.component(&[i, j])
    }

    /// `X_k = Σ_i {x_i, x_{n+k}} ∂_i`, the hamiltonian field of `x_{n+k}`.
    pub fn hamiltonian(&self, k: usize) -> PolyVector {
        let n = self.n();
        let zero = self.bracket.zero_jet();
        let comps: Vec<Jet> =
            (0..n + self.p()).map(|i| if i < n { self.get(i, n + k) } else { zero.clone() }).collect();
        PolyVector::vector_field(&comps)
    }

    pub fn hamiltonians(&self) -> Vec<PolyVector> {
        (0..self.p()).map(|k| self.hamiltonian(k)).collect()
    }

    /// `Σ_{i<j<=n} {x_i, x_j} ∂_i ∧ ∂_j`.
    pub fn phase_part(&self) -> PolyVector {
        let n = self.n();
        let mut out = self.bracket.zero_like(2);
        for (idx, c) in self.bracket.terms() {
            if idx[1] < n {
                out.add_term(idx.clone(), c.clone());
            }
        }
        out
    }

    pub fn bracket_table(&self) -> BracketTable {
        let n = self.n();
        let mut g = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                g.insert((i, j), self.get(i, j));
            }
        }
        BracketTable { n, p: self.p(), order: self.order(), g }
    }
}

/// The phase brackets `g_{i,j} = {x_i, x_j}` for `i < j <= n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTable {
    n: usize,
    p: usize,
    order: u32,
    g: BTreeMap<(usize, usize), Jet>,
}

impl BracketTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn zero(&self) -> Jet {
        Jet::zero(self.n, self.p, self.order)
    }

    /// Antisymmetric access.
    pub fn get(&self, i: usize, j: usize) -> Jet {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.g.get(&(i, j)).cloned().unwrap_or_else(|| self.zero()),
            std::cmp::Ordering::Greater => self.g.get(&(j, i)).map(|f| -f).unwrap_or_else(|| self.zero()),
            std::cmp::Ordering::Equal => self.zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, f: Jet) {
        if i < j {
            self.g.insert((i, j), f);
        } else {
            self.g.insert((j, i), -&f);
        }
    }

    /// The parameter-only coefficient `g_{i,j,E_i+E_j}(x'')` of `x_i x_j`.
    pub fn quadratic_slice(&self, i: usize, j: usize) -> Jet {
        let key = MultiIndex::unit(self.n + self.p, i).add(&MultiIndex::unit(self.n + self.p, j));
        self.get(i, j).phase_expansion().remove(&key).unwrap_or_else(|| Jet::zero(self.n, self.p, self.order))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Jet)> {
        self.g.iter()
    }
}

/// `Λ_i(f) = Σ_j λ_{j,i} ∂f/∂x_{n+j}`.
pub fn lambda_derivative(s: &LinearFamily, i: usize, f: &Jet) -> Jet {
    let mut out = f.zero_like();
    for j in 0..s.p() {
        let l = s.get(j, i);
        if !l.is_zero() {
            out = &out + &f.diff(s.n() + j).scale(l);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleVerdict {
    pub holds: bool,
    /// First violating triple, 1-based.
    pub violation: Option<(usize, usize, usize)>,
}

/// Checks `Λ_k(c_{i,j}) + Λ_i(c_{j,k}) + Λ_j(c_{k,i}) = 0` for all distinct
/// `i, j, k`, where `c_{i,j}` is the coefficient of `x_i x_j` in `{x_i, x_j}`.
/// This is the cubic coefficient of the Jacobi identity on `(x_i, x_j, x_k)`
/// and is exact in parameter degree `<= order - 3`.
pub fn cocycle_check(table: &BracketTable, s: &LinearFamily) -> CocycleVerdict {
    let n = table.n;
    let Some(trusted) = table.order.checked_sub(3) else {
        return CocycleVerdict { holds: true, violation: None };
    };
    let slices: BTreeMap<(usize, usize), Jet> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| ((i, j), table.quadratic_slice(i, j)))
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let sum = &(&lambda_derivative(s, k, &slices[&(i, j)]) + &lambda_derivative(s, i, &slices[&(j, k)]))
                    + &lambda_derivative(s, j, &slices[&(k, i)]);
                if !sum.truncate(trusted).is_zero() {
                    return CocycleVerdict { holds: false, violation: Some((i + 1, j + 1, k + 1)) };
                }
            }
        }
    }
    CocycleVerdict { holds: true, violation: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> (LinearFamily, PolyVector) {
        let s = LinearFamily::from_ints(&[&[1, 3, 5]]).unwrap();
        (s.clone(), s.linear_poisson(5))
    }

    #[test]
    fn linear_structure_is_accepted() {
        let (s, l) = frame();
        let pj = PoissonJet::new(l, s.clone()).unwrap();
        for k in 0..s.p() {
            assert_eq!(pj.hamiltonian(k), s.s_field(k, 1, 5));
        }
        assert!(pj.phase_part().is_zero());
    }

    #[test]
    fn constructor_rejections() {
        let (s, l) = frame();
        let x = |i| Jet::var(3, 1, 5, i);
        // fails Jacobi: {x1,x2} = x4 x1 (weight mismatch) does not commute with S
        let bad = l.add(&PolyVector::bivector(3, 1, 5, vec![(0, 1, &x(3) * &x(0))]));
        assert!(matches!(PoissonJet::new(bad, s.clone()), Err(PnfError::Constructor(_))));
        // constant term
        let bad = l.add(&PolyVector::bivector(3, 1, 5, vec![(0, 1, Jet::one(3, 1, 5))]));
        assert!(matches!(PoissonJet::new(bad, s.clone()), Err(PnfError::Constructor(_))));
        // wrong linear part
        let bad = l.add(&PolyVector::bivector(3, 1, 5, vec![(0, 3, x(1))]));
        assert!(matches!(PoissonJet::new(bad, s), Err(PnfError::Constructor(_))));
    }

    #[test]
    fn cocycle_examples() {
        let (s, l) = frame();
        let pj = PoissonJet::new(l, s.clone()).unwrap();
        let table = pj.bracket_table();
        assert!(cocycle_check(&table, &s).holds);

        let mut bad = table.clone();
        let x = |i| Jet::var(3, 1, 5, i);
        bad.set(0, 1, &(&x(0) * &x(1)) * &x(3));
        let v = cocycle_check(&bad, &s);
        assert_eq!(v.violation, Some((1, 2, 3)));
    }

    #[test]
    fn quadratic_slice_reads_parameter_coefficient() {
        let x = |i| Jet::var(3, 1, 5, i);
        let mut t = BracketTable { n: 3, p: 1, order: 5, g: BTreeMap::new() };
        t.set(1, 2, &(&x(1) * &x(2)) * &(&Jet::one(3, 1, 5) + &x(3)));
        assert_eq!(t.quadratic_slice(1, 2), &Jet::one(3, 1, 5) + &x(3));
        assert_eq!(t.quadratic_slice(2, 1), -&(&Jet::one(3, 1, 5) + &x(3)));
        assert!(t.quadratic_slice(0, 1).is_zero());
    }
}
