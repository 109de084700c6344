//! Antisymmetric contravariant tensors with jet coefficients.

mod diffeo;

pub use diffeo::DiffeoJet;

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Jet, MultiIndex, Scalar};
use crate::error::{PnfError, Result};

/// `Σ_J T_J ∂_{j_1} ∧ ... ∧ ∂_{j_k}` over strictly increasing `J`.
/// Degree 0 stores a single function under the empty tuple.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyVector {
    degree: usize,
    n_phase: usize,
    n_param: usize,
    order: u32,
    terms: BTreeMap<Vec<usize>, Jet>,
}

/// Sorts `idx` in place and returns the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl PolyVector {
    pub fn zero(degree: usize, n_phase: usize, n_param: usize, order: u32) -> Self {
        PolyVector { degree, n_phase, n_param, order, terms: BTreeMap::new() }
    }

    pub fn zero_like(&self, degree: usize) -> Self {
        Self::zero(degree, self.n_phase, self.n_param, self.order)
    }

    pub fn function(f: Jet) -> Self {
        let mut t = Self::zero(0, f.n_phase(), f.n_param(), f.order());
        t.add_term(Vec::new(), f);
        t
    }

    /// `f ∂_{idx}` with unsorted indices allowed.
    pub fn basis(idx: &[usize], f: Jet) -> Self {
        let mut t = Self::zero(idx.len(), f.n_phase(), f.n_param(), f.order());
        t.add_term(idx.to_vec(), f);
        t
    }

    /// `Σ_i comps[i] ∂_i`.
    pub fn vector_field(comps: &[Jet]) -> Self {
        let f = &comps[0];
        assert_eq!(comps.len(), f.nvars());
        let mut t = Self::zero(1, f.n_phase(), f.n_param(), f.order());
        for (i, c) in comps.iter().enumerate() {
            t.add_term(vec![i], c.clone());
        }
        t
    }

    /// Bivector from `(i, j, P_ij)` triples.
    pub fn bivector(n_phase: usize, n_param: usize, order: u32, entries: Vec<(usize, usize, Jet)>) -> Self {
        let mut t = Self::zero(2, n_phase, n_param, order);
        for (i, j, f) in entries {
            t.add_term(vec![i, j], f);
        }
        t
    }

    /// Constant-coefficient `∂_{idx}`.
    pub fn coordinate(idx: &[usize], n_phase: usize, n_param: usize, order: u32) -> Self {
        Self::basis(idx, Jet::one(n_phase, n_param, order))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_phase(&self) -> usize {
        self.n_phase
    }

    pub fn n_param(&self) -> usize {
        self.n_param
    }

    pub fn nvars(&self) -> usize {
        self.n_phase + self.n_param
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Jet> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn zero_jet(&self) -> Jet {
        Jet::zero(self.n_phase, self.n_param, self.order)
    }

    /// Adds `f ∂_{idx}`; the tuple is normalized with its sign.
    pub fn add_term(&mut self, mut idx: Vec<usize>, f: Jet) {
        assert_eq!(idx.len(), self.degree, "index tuple length");
        assert!(idx.iter().all(|&i| i < self.nvars()), "index out of range");
        if f.is_zero() {
            return;
        }
        let Some(sign) = sort_with_sign(&mut idx) else { return };
        let f = if sign < 0 { -&f } else { f };
        let f = if f.order() > self.order { f.truncate(self.order) } else { f };
        if f.order() < self.order {
            self.lower_order(f.order());
        }
        let merged = match self.terms.remove(&idx) {
            Some(g) => &g + &f,
            None => f,
        };
        if !merged.is_zero() {
            self.terms.insert(idx, merged);
        }
    }

    fn lower_order(&mut self, order: u32) {
        self.order = order;
        let old = std::mem::take(&mut self.terms);
        for (k, v) in old {
            let v = v.truncate(order);
            if !v.is_zero() {
                self.terms.insert(k, v);
            }
        }
    }

    /// Coefficient on `∂_{idx}`, with the sign of the reordering.
    pub fn component(&self, idx: &[usize]) -> Jet {
        let mut k = idx.to_vec();
        match sort_with_sign(&mut k) {
            None => self.zero_jet(),
            Some(s) => {
                let f = self.terms.get(&k).cloned().unwrap_or_else(|| self.zero_jet());
                if s < 0 {
                    -&f
                } else {
                    f
                }
            }
        }
    }

    /// The function of a degree-0 polyvector.
    pub fn as_function(&self) -> Jet {
        assert_eq!(self.degree, 0);
        self.component(&[])
    }

    /// Component list of a vector field.
    pub fn components(&self) -> Vec<Jet> {
        assert_eq!(self.degree, 1);
        (0..self.nvars()).map(|i| self.component(&[i])).collect()
    }

    fn check_ring(&self, o: &PolyVector) -> Result<()> {
        if self.n_phase == o.n_phase && self.n_param == o.n_param {
            Ok(())
        } else {
            Err(PnfError::Structural("polyvectors over different variable splits".into()))
        }
    }

    pub fn try_add(&self, o: &PolyVector) -> Result<PolyVector> {
        self.check_ring(o)?;
        if self.degree != o.degree {
            return Err(PnfError::Structural(format!("adding degrees {} and {}", self.degree, o.degree)));
        }
        let mut out = self.clone();
        if o.order < out.order {
            out.lower_order(o.order);
        }
        for (k, v) in &o.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn add(&self, o: &PolyVector) -> PolyVector {
        self.try_add(o).expect("polyvector addition")
    }

    pub fn sub(&self, o: &PolyVector) -> PolyVector {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> PolyVector {
        self.map(|f| -f)
    }

    pub fn scale(&self, c: &Scalar) -> PolyVector {
        self.map(|f| f.scale(c))
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_jet(&self, f: &Jet) -> PolyVector {
        let mut out = self.zero_like(self.degree);
        out.lower_order(self.order.min(f.order()));
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * f);
        }
        out
    }

    /// Applies `g` to every coefficient.
    pub fn map<F: Fn(&Jet) -> Jet>(&self, g: F) -> PolyVector {
        let mut out = self.zero_like(self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), g(v));
        }
        out
    }

    pub fn truncate(&self, order: u32) -> PolyVector {
        let mut out = self.clone();
        if order < out.order {
            out.lower_order(order);
        }
        out
    }

    pub fn with_order(&self, order: u32) -> PolyVector {
        let mut out = Self::zero(self.degree, self.n_phase, self.n_param, order);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.with_order(order));
        }
        out
    }

    /// Equality of all coefficients up to `order`.
    pub fn eq_to(&self, o: &PolyVector, order: u32) -> bool {
        self.degree == o.degree && self.check_ring(o).is_ok() && self.truncate(order).terms == o.truncate(order).terms
    }

    /// First coefficient (tuple, monomial, left, right) where the two differ up to `order`.
    pub fn first_difference(&self, o: &PolyVector, order: u32) -> Option<(Vec<usize>, MultiIndex, Scalar, Scalar)> {
        let d = self.truncate(order).sub(&o.truncate(order));
        let (k, v) = d.terms.iter().next()?;
        let (q, _) = v.terms().iter().next()?;
        Some((k.clone(), q.clone(), self.component(k).coeff(q), o.component(k).coeff(q)))
    }

    /// Exterior product.
    pub fn wedge(&self, o: &PolyVector) -> Result<PolyVector> {
        self.check_ring(o)?;
        let deg = self.degree + o.degree;
        if deg > self.nvars() {
            return Err(PnfError::Structural(format!("wedge degree {deg} exceeds dimension {}", self.nvars())));
        }
        Ok(self.wedge_any(o))
    }

    /// Exterior product that returns an empty polyvector above the dimension.
    pub(crate) fn wedge_any(&self, o: &PolyVector) -> PolyVector {
        let deg = self.degree + o.degree;
        let mut out = Self::zero(deg, self.n_phase, self.n_param, self.order.min(o.order));
        for (a, f) in &self.terms {
            for (b, g) in &o.terms {
                if a.iter().any(|i| b.contains(i)) {
                    continue;
                }
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                out.add_term(idx, f * g);
            }
        }
        out
    }

    /// `X(f) = Σ X_i ∂_i f` for a vector field.
    pub fn apply(&self, f: &Jet) -> Jet {
        assert_eq!(self.degree, 1);
        let mut acc = Jet::zero(self.n_phase, self.n_param, self.order.min(f.order()));
        for (k, c) in &self.terms {
            acc = &acc + &(c * &f.diff(k[0]));
        }
        acc
    }

    /// `T(df_1, ..., df_k)`.
    pub fn pair(&self, fs: &[Jet]) -> Jet {
        assert_eq!(fs.len(), self.degree);
        let grads: Vec<Vec<Jet>> = fs.iter().map(|f| (0..self.nvars()).map(|v| f.diff(v)).collect()).collect();
        let mut acc = self.zero_jet();
        for (idx, c) in &self.terms {
            // det [∂_{idx_s} f_r]
            let mut det = self.zero_jet();
            for perm in permutations(self.degree) {
                let (p, sign) = perm;
                let mut t = Jet::one(self.n_phase, self.n_param, self.order);
                for (r, &s) in p.iter().enumerate() {
                    t = &t * &grads[r][idx[s]];
                    if t.is_zero() {
                        break;
                    }
                }
                det = if sign > 0 { &det + &t } else { &det - &t };
            }
            acc = &acc + &(c * &det);
        }
        acc
    }

    /// Lie derivative `L_X T` along a vector field.
    pub fn lie_derivative(x: &PolyVector, t: &PolyVector) -> PolyVector {
        assert_eq!(x.degree, 1);
        let mut out = Self::zero(t.degree, t.n_phase, t.n_param, t.order.min(x.order));
        for (idx, g) in &t.terms {
            out.add_term(idx.clone(), x.apply(g));
            for (xi, f) in &x.terms {
                let i = xi[0];
                for (slot, &j) in idx.iter().enumerate() {
                    let dj = f.diff(j);
                    if dj.is_zero() {
                        continue;
                    }
                    let mut nidx = idx.clone();
                    nidx[slot] = i;
                    out.add_term(nidx, -&(g * &dj));
                }
            }
        }
        out
    }

    /// Schouten–Nijenhuis bracket, normalized so that `[X, Y]` is the Lie
    /// bracket, `[X, f] = [f, X] = X(f)`, `[P, Q] = (-1)^{pq} [Q, P]`, and
    /// `[P, Q∧R] = [P, Q]∧R + (-1)^{pq+q} Q∧[P, R]`.
    pub fn schouten(&self, o: &PolyVector) -> PolyVector {
        self.check_ring(o).expect("schouten ring");
        let (p, q) = (self.degree, o.degree);
        let order = self.order.min(o.order);
        if p + q == 0 {
            return Self::zero(0, self.n_phase, self.n_param, order);
        }
        if q == 0 {
            return function_bracket(&o.as_function(), self);
        }
        if p == 0 {
            return function_bracket(&self.as_function(), o);
        }
        if p == 1 {
            return Self::lie_derivative(self, o);
        }
        if q == 1 {
            let l = Self::lie_derivative(o, self);
            return if p % 2 == 0 { l } else { l.neg() };
        }
        // Q = Σ g ∂_{j0} ∧ ∂_{rest}: split off Y = g ∂_{j0}
        let sign = if p % 2 == 1 { Scalar::one() } else { Scalar::from_int(-1) };
        let mut out = Self::zero(p + q - 1, self.n_phase, self.n_param, order);
        for (idx, g) in &o.terms {
            let y = Self::basis(&idx[..1], g.clone());
            let r = Self::coordinate(&idx[1..], self.n_phase, self.n_param, order);
            let py = self.schouten(&y);
            out = out.add(&py.wedge_any(&r));
            let pr = self.schouten(&r);
            if !pr.is_zero() {
                out = out.add(&y.wedge_any(&pr).scale(&sign));
            }
        }
        out
    }

    /// Moves the polyvector into a relabelled ring (see [`Jet::relabel`]).
    pub fn relabel(&self, n_phase: usize, n_param: usize, map: &[usize]) -> PolyVector {
        let mut out = Self::zero(self.degree, n_phase, n_param, self.order);
        for (idx, f) in &self.terms {
            out.add_term(idx.iter().map(|&i| map[i]).collect(), f.relabel(n_phase, n_param, map));
        }
        out
    }

    pub fn resplit(&self, n_phase: usize) -> PolyVector {
        let n_param = self.nvars() - n_phase;
        let mut out = Self::zero(self.degree, n_phase, n_param, self.order);
        for (idx, f) in &self.terms {
            out.add_term(idx.clone(), f.resplit(n_phase));
        }
        out
    }

    // Poisson operations on bivectors

    /// `{f, g} = <P, df ∧ dg>`.
    pub fn poisson_bracket(&self, f: &Jet, g: &Jet) -> Jet {
        assert_eq!(self.degree, 2);
        let mut acc = Jet::zero(self.n_phase, self.n_param, self.order.min(f.order()).min(g.order()));
        for (idx, c) in &self.terms {
            let (i, j) = (idx[0], idx[1]);
            let t = &(&f.diff(i) * &g.diff(j)) - &(&g.diff(i) * &f.diff(j));
            acc = &acc + &(c * &t);
        }
        acc
    }

    /// `X_f = Σ_i {x_i, f} ∂_i`. With this orientation `X_f(g) = {g, f}` and
    /// `P = Σ_k X_{x_{n+k}} ∧ ∂_{n+k} + (phase part)`.
    pub fn hamiltonian_field(&self, f: &Jet) -> PolyVector {
        assert_eq!(self.degree, 2);
        let n = self.nvars();
        let comps: Vec<Jet> = (0..n)
            .map(|i| self.poisson_bracket(&Jet::var(self.n_phase, self.n_param, self.order, i), f))
            .collect();
        Self::vector_field(&comps)
    }

    /// `[P, P]`; zero iff the Jacobi identity holds to the trusted order.
    pub fn jacobi_defect(&self) -> PolyVector {
        assert_eq!(self.degree, 2);
        self.schouten(self)
    }

    /// The componentwise Jacobi sums
    /// `Σ_l (P_il ∂_l P_jk + P_jl ∂_l P_ki + P_kl ∂_l P_ij)` for `i < j < k`.
    pub fn jacobi_sums(&self) -> BTreeMap<(usize, usize, usize), Jet> {
        assert_eq!(self.degree, 2);
        let n = self.nvars();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = self.zero_jet();
                    for l in 0..n {
                        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                            let pal = self.component(&[a, l]);
                            if pal.is_zero() {
                                continue;
                            }
                            acc = &acc + &(&pal * &self.component(&[b, c]).diff(l));
                        }
                    }
                    if !acc.is_zero() {
                        out.insert((i, j, k), acc);
                    }
                }
            }
        }
        out
    }
}

/// `[f, T]` for a function `f`: `Σ_J g_J Σ_s (-1)^s ∂_{j_s} f ∂_{J \ j_s}`.
fn function_bracket(f: &Jet, t: &PolyVector) -> PolyVector {
    let order = f.order().min(t.order);
    if t.degree == 0 {
        return PolyVector::zero(0, t.n_phase, t.n_param, order);
    }
    let mut out = PolyVector::zero(t.degree - 1, t.n_phase, t.n_param, order);
    for (idx, g) in &t.terms {
        for (s, &j) in idx.iter().enumerate() {
            let df = f.diff(j);
            if df.is_zero() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(s);
            let c = g * &df;
            out.add_term(rest, if s % 2 == 0 { c } else { -&c });
        }
    }
    out
}

/// All permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            // moving k-1 from the end to `pos` costs (len - pos) transpositions
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

impl fmt::Display for PolyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                if idx.is_empty() {
                    format!("{c}")
                } else {
                    let d: Vec<String> = idx.iter().map(|i| format!("d{}", i + 1)).collect();
                    format!("({c}) {}", d.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PolyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyVector<{}>[{}]", self.degree, self)
    }
}
