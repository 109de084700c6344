//! Truncated polynomials in `N = n + p` variables: phase variables `x'` first,
//! parameters `x''` after.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::monomial::MultiIndex;
use super::scalar::Scalar;
use crate::error::{PnfError, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Jet {
    n_phase: usize,
    n_param: usize,
    order: u32,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl Jet {
    pub fn zero(n_phase: usize, n_param: usize, order: u32) -> Self {
        Jet { n_phase, n_param, order, terms: BTreeMap::new() }
    }

    pub fn constant(n_phase: usize, n_param: usize, order: u32, c: Scalar) -> Self {
        let mut j = Self::zero(n_phase, n_param, order);
        j.add_term(MultiIndex::zero(n_phase + n_param), c);
        j
    }

    pub fn one(n_phase: usize, n_param: usize, order: u32) -> Self {
        Self::constant(n_phase, n_param, order, Scalar::one())
    }

    /// The coordinate function `x_{var}` (0-based).
    pub fn var(n_phase: usize, n_param: usize, order: u32, var: usize) -> Self {
        Self::monomial(n_phase, n_param, order, MultiIndex::unit(n_phase + n_param, var), Scalar::one())
    }

    /// `c x^Q`, dropped if `|Q|` exceeds the order.
    pub fn monomial(n_phase: usize, n_param: usize, order: u32, q: MultiIndex, c: Scalar) -> Self {
        assert_eq!(q.nvars(), n_phase + n_param, "monomial arity");
        let mut j = Self::zero(n_phase, n_param, order);
        j.add_term(q, c);
        j
    }

    pub fn from_terms<I>(n_phase: usize, n_param: usize, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let mut j = Self::zero(n_phase, n_param, order);
        for (q, c) in terms {
            assert_eq!(q.nvars(), n_phase + n_param, "monomial arity");
            j.add_term(q, c);
        }
        j
    }

    /// Same ring, no terms.
    pub fn zero_like(&self) -> Self {
        Self::zero(self.n_phase, self.n_param, self.order)
    }

    pub fn constant_like(&self, c: Scalar) -> Self {
        Self::constant(self.n_phase, self.n_param, self.order, c)
    }

    pub fn var_like(&self, var: usize) -> Self {
        Self::var(self.n_phase, self.n_param, self.order, var)
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

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, q: &MultiIndex) -> Scalar {
        self.terms.get(q).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&MultiIndex::zero(self.nvars()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|q| q.degree() == 0)
    }

    /// Adds `c x^Q` in place, keeping the canonical form.
    pub fn add_term(&mut self, q: MultiIndex, c: Scalar) {
        if c.is_zero() || q.degree() > self.order {
            return;
        }
        match self.terms.get_mut(&q) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&q);
                }
            }
            None => {
                self.terms.insert(q, c);
            }
        }
    }

    pub fn same_ring(&self, other: &Jet) -> bool {
        self.n_phase == other.n_phase && self.n_param == other.n_param
    }

    fn check_ring(&self, other: &Jet) -> Result<()> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(PnfError::Structural(format!(
                "variable split ({}, {}) vs ({}, {})",
                self.n_phase, self.n_param, other.n_phase, other.n_param
            )))
        }
    }

    /// Lowers the order to `min(order, self.order)` and drops terms above it.
    pub fn truncate(&self, order: u32) -> Jet {
        let order = order.min(self.order);
        Jet {
            n_phase: self.n_phase,
            n_param: self.n_param,
            order,
            terms: self.terms.iter().filter(|(q, _)| q.degree() <= order).map(|(q, c)| (q.clone(), c.clone())).collect(),
        }
    }

    /// Reinterprets the polynomial at a new order (terms above it are dropped).
    /// Raising the order is only meaningful for jets that are exact polynomials.
    pub fn with_order(&self, order: u32) -> Jet {
        Jet {
            n_phase: self.n_phase,
            n_param: self.n_param,
            order,
            terms: self.terms.iter().filter(|(q, _)| q.degree() <= order).map(|(q, c)| (q.clone(), c.clone())).collect(),
        }
    }

    /// Equality after truncating both sides to `order`.
    pub fn eq_to(&self, other: &Jet, order: u32) -> bool {
        self.same_ring(other) && self.truncate(order).terms == other.truncate(order).terms
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_ring(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (q, c) in &other.terms {
            out.add_term(q.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_ring(other)?;
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        // both maps iterate by increasing degree, so the inner loop can stop early
        for (qa, ca) in &self.terms {
            let da = qa.degree();
            if da > order {
                break;
            }
            for (qb, cb) in &other.terms {
                if da + qb.degree() > order {
                    break;
                }
                let q = qa.add(qb);
                let prod = ca * cb;
                match acc.get_mut(&q) {
                    Some(v) => *v += &prod,
                    None => {
                        acc.insert(q, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Jet { n_phase: self.n_phase, n_param: self.n_param, order, terms: acc })
    }

    pub fn scale(&self, c: &Scalar) -> Jet {
        if c.is_zero() {
            return self.zero_like();
        }
        Jet {
            n_phase: self.n_phase,
            n_param: self.n_param,
            order: self.order,
            terms: self.terms.iter().map(|(q, v)| (q.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `x^Q`, truncating.
    pub fn mul_monomial(&self, q: &MultiIndex) -> Jet {
        let mut out = self.zero_like();
        for (k, c) in &self.terms {
            out.add_term(k.add(q), c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Jet {
        let mut acc = self.constant_like(Scalar::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative; the order is kept.
    pub fn diff(&self, var: usize) -> Jet {
        let mut out = self.zero_like();
        for (q, c) in &self.terms {
            let e = q.get(var);
            if e > 0 {
                out.add_term(q.dec(var).unwrap(), c * &Scalar::from_int(e as i64));
            }
        }
        out
    }

    /// Antiderivative in `var` vanishing on `x_var = 0`. Fails instead of
    /// truncating when a term would exceed the order.
    pub fn integrate(&self, var: usize) -> Result<Jet> {
        if let Some((q, _)) = self.terms.iter().rev().find(|(q, _)| q.degree() + 1 > self.order) {
            return Err(PnfError::TruncationLoss { var, degree: q.degree() + 1, order: self.order });
        }
        Ok(self.integrate_within_order(var))
    }

    /// Antiderivative in `var`, explicitly dropping terms above the order.
    pub fn integrate_within_order(&self, var: usize) -> Jet {
        let mut out = self.zero_like();
        for (q, c) in &self.terms {
            let e = q.get(var) + 1;
            out.add_term(q.inc(var), c / &Scalar::from_int(e as i64));
        }
        out
    }

    /// `f(subst_1, ..., subst_N)`, truncated at the order of `self` (and of
    /// the substituted jets). The result lives in the ring of `subst`.
    pub fn compose(&self, subst: &[Jet]) -> Result<Jet> {
        if subst.len() != self.nvars() {
            return Err(PnfError::Structural(format!(
                "substitution has {} entries, expected {}",
                subst.len(),
                self.nvars()
            )));
        }
        let Some(first) = subst.first() else {
            // no variables: a constant
            return Ok(self.clone());
        };
        for s in subst {
            first.check_ring(s)?;
        }
        let order = subst.iter().map(|s| s.order).min().unwrap().min(self.order);
        let subst: Vec<Jet> = subst.iter().map(|s| s.truncate(order)).collect();
        let mut cache: HashMap<MultiIndex, Jet> = HashMap::new();
        let mut out = Jet::zero(first.n_phase, first.n_param, order);
        for (q, c) in &self.terms {
            let m = power_product(q, &subst, &mut cache, first, order);
            for (k, v) in &m.terms {
                out.add_term(k.clone(), v * c);
            }
        }
        Ok(out)
    }

    /// `Σ_{k<=order} g^k / k!`; requires a zero constant term.
    pub fn exp(&self) -> Result<Jet> {
        if !self.constant_term().is_zero() {
            return Err(PnfError::Domain("exp of a jet with nonzero constant term".into()));
        }
        let mut acc = self.constant_like(Scalar::one());
        let mut term = acc.clone();
        for k in 1..=self.order {
            term = (&term * self).scale(&Scalar::from_ratio(1, k as i64));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a jet with invertible constant term.
    pub fn recip(&self) -> Result<Jet> {
        let c0 = self.constant_term();
        let inv0 = c0.inv().ok_or_else(|| PnfError::Domain("reciprocal of a jet vanishing at 0".into()))?;
        // 1/(c0 (1 + h)) = inv0 Σ (-h)^k
        let h = (self - &self.constant_like(c0)).scale(&inv0);
        let mut acc = self.constant_like(Scalar::one());
        let mut term = acc.clone();
        for _ in 1..=self.order {
            term = -&(&term * &h);
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(&inv0))
    }

    /// Terms of phase degree exactly `m`.
    pub fn phase_homogeneous(&self, m: u32) -> Jet {
        self.filter(|q| q.partial_degree(0..self.n_phase) == m)
    }

    /// Terms of phase degree at most `m`.
    pub fn phase_up_to(&self, m: u32) -> Jet {
        self.filter(|q| q.partial_degree(0..self.n_phase) <= m)
    }

    pub fn filter<F: Fn(&MultiIndex) -> bool>(&self, keep: F) -> Jet {
        Jet {
            n_phase: self.n_phase,
            n_param: self.n_param,
            order: self.order,
            terms: self.terms.iter().filter(|(q, _)| keep(q)).map(|(q, c)| (q.clone(), c.clone())).collect(),
        }
    }

    /// Smallest phase degree present, if any.
    pub fn min_phase_degree(&self) -> Option<u32> {
        self.terms.keys().map(|q| q.partial_degree(0..self.n_phase)).min()
    }

    /// Groups terms by their phase exponents: `f = Σ_Q f_Q(x'') x'^Q`.
    /// Each `f_Q` lives in the same ring and only involves parameters.
    pub fn phase_expansion(&self) -> BTreeMap<MultiIndex, Jet> {
        let mut out: BTreeMap<MultiIndex, Jet> = BTreeMap::new();
        for (q, c) in &self.terms {
            let (ph, pa) = q.split(self.n_phase);
            let key = ph.concat(&MultiIndex::zero(self.n_param));
            let val = MultiIndex::zero(self.n_phase).concat(&pa);
            out.entry(key).or_insert_with(|| self.zero_like()).add_term(val, c.clone());
        }
        out
    }

    /// Sets the listed variables to zero.
    pub fn set_zero(&self, vars: &[usize]) -> Jet {
        self.filter(|q| vars.iter().all(|&v| q.get(v) == 0))
    }

    /// Restriction to the parameter axis `x' = 0`.
    pub fn at_phase_zero(&self) -> Jet {
        self.filter(|q| q.partial_degree(0..self.n_phase) == 0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|q| q.get(var) > 0)
    }

    pub fn depends_on_params(&self) -> bool {
        (self.n_phase..self.nvars()).any(|v| self.depends_on(v))
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|q| q.degree()).max()
    }

    /// Moves the polynomial into a ring with a different variable split.
    /// `map[k]` gives the new index of old variable `k`.
    pub fn relabel(&self, n_phase: usize, n_param: usize, map: &[usize]) -> Jet {
        assert_eq!(map.len(), self.nvars());
        let mut out = Jet::zero(n_phase, n_param, self.order);
        for (q, c) in &self.terms {
            let mut e = vec![0u32; n_phase + n_param];
            for (k, &t) in map.iter().enumerate() {
                e[t] += q.get(k);
            }
            out.add_term(MultiIndex::new(e), c.clone());
        }
        out
    }

    /// Same variables, re-split as `n_phase` phase and the rest parameters.
    pub fn resplit(&self, n_phase: usize) -> Jet {
        let n = self.nvars();
        Jet { n_phase, n_param: n - n_phase, order: self.order, terms: self.terms.clone() }
    }

    /// Value of the polynomial at a point (all terms used).
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (q, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in q.exps().iter().enumerate() {
                if e > 0 {
                    t = &t * &point[k].pow(e);
                }
            }
            acc += &t;
        }
        acc
    }
}

fn power_product(
    q: &MultiIndex,
    subst: &[Jet],
    cache: &mut HashMap<MultiIndex, Jet>,
    like: &Jet,
    order: u32,
) -> Jet {
    if let Some(v) = cache.get(q) {
        return v.clone();
    }
    let v = match q.exps().iter().position(|&e| e > 0) {
        None => Jet::constant(like.n_phase, like.n_param, order, Scalar::one()),
        Some(k) => {
            let rest = q.dec(k).unwrap();
            let r = power_product(&rest, subst, cache, like, order);
            &r * &subst[k]
        }
    };
    cache.insert(q.clone(), v.clone());
    v
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        self.try_add(o).expect("jet addition")
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        self.try_add(&-o).expect("jet subtraction")
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        self.try_mul(o).expect("jet product")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            n_phase: self.n_phase,
            n_param: self.n_param,
            order: self.order,
            terms: self.terms.iter().map(|(q, c)| (q.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (q, c) in &self.terms {
            let coef = if c.is_real() { c.to_string() } else { format!("({c})") };
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if q.degree() == 0 {
                write!(f, "{coef}")?;
            } else if c.is_one() {
                write!(f, "{}", q.pretty())?;
            } else {
                write!(f, "{coef}*{}", q.pretty())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[{}+{}; {}]({})", self.n_phase, self.n_param, self.order, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, p: usize, d: u32, i: usize) -> Jet {
        Jet::var(n, p, d, i)
    }

    fn c(n: usize, p: usize, d: u32, v: Scalar) -> Jet {
        Jet::constant(n, p, d, v)
    }

    #[test]
    fn product_examples() {
        let one = Jet::one(2, 0, 2);
        let x1 = x(2, 0, 2, 0);
        let lhs = &(&one + &x1) * &(&one - &x1);
        assert_eq!(lhs, &one - &(&x1 * &x1));

        let s = &x(2, 0, 1, 0) + &x(2, 0, 1, 1);
        assert!((&s * &s).is_zero());

        let a = &c(1, 0, 3, Scalar::from_ratio(1, 2)) + &x(1, 0, 3, 0).scale(&Scalar::i());
        let b = c(1, 0, 3, Scalar::from_int(2));
        let got = &a * &b;
        assert_eq!(got.constant_term(), Scalar::one());
        assert_eq!(got.coeff(&MultiIndex::unit(1, 0)), Scalar::complex((0, 1), (2, 1)));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        assert!(x(2, 0, 3, 0).try_mul(&x(1, 1, 3, 0)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let (x1, x2, x3) = (x(3, 0, 4, 0), x(3, 0, 4, 1), x(3, 0, 4, 2));
        let f = &(&x1 * &x1) * &x2;
        assert_eq!(f.diff(0), (&x1 * &x2).scale(&Scalar::from_int(2)));
        assert!((&x1 * &x1).diff(1).is_zero());
        let g = x3.pow(3).scale(&Scalar::from_ratio(1, 3));
        assert_eq!(g.diff(2), x3.pow(2));
    }

    #[test]
    fn integral_examples() {
        let one = Jet::one(2, 2, 3);
        let x3 = x(2, 2, 3, 2);
        let x4 = x(2, 2, 3, 3);
        assert_eq!(one.integrate(2).unwrap(), x3);
        assert_eq!(x3.scale(&Scalar::from_int(2)).integrate(2).unwrap(), &x3 * &x3);
        assert_eq!(x4.integrate(2).unwrap(), &x3 * &x4);
        let top = x3.pow(3);
        assert!(matches!(top.integrate(2), Err(PnfError::TruncationLoss { .. })));
        assert!(top.integrate_within_order(2).is_zero());
    }

    #[test]
    fn composition_examples() {
        let (x1, x2) = (x(2, 0, 3, 0), x(2, 0, 3, 1));
        let f = &x1 * &x1;
        let s = &x1 + &x2;
        let g = f.compose(&[s.clone(), x2.clone()]).unwrap();
        assert_eq!(g, &s * &s);
        assert_eq!(x1.compose(&[x1.clone(), x2.clone()]).unwrap(), x1);
        let h = (&x1 * &x2)
            .compose(&[x1.scale(&Scalar::from_int(2)), x2.scale(&Scalar::from_int(3))])
            .unwrap();
        assert_eq!(h, (&x1 * &x2).scale(&Scalar::from_int(6)));
        assert!(f.compose(std::slice::from_ref(&x1)).is_err());
    }

    #[test]
    fn exponential_examples() {
        let z = Jet::zero(0, 1, 3);
        assert_eq!(z.exp().unwrap(), Jet::one(0, 1, 3));
        let t = x(0, 1, 3, 0);
        let e = t.exp().unwrap();
        let expect = Jet::from_terms(
            0,
            1,
            3,
            (0..=3u32).map(|k| (MultiIndex::new(vec![k]), Scalar::from_ratio(1, [1, 1, 2, 6][k as usize]))),
        );
        assert_eq!(e, expect);
        assert_eq!(&e * &(-&t).exp().unwrap(), Jet::one(0, 1, 3));
        assert!(Jet::one(0, 1, 3).exp().is_err());
    }

    #[test]
    fn reciprocal() {
        let t = &Jet::one(1, 0, 5) + &x(1, 0, 5, 0).scale(&Scalar::from_int(3));
        assert_eq!(&t * &t.recip().unwrap(), Jet::one(1, 0, 5));
    }

    #[test]
    fn phase_expansion_groups_parameters() {
        let (x1, x3) = (x(2, 1, 4, 0), x(2, 1, 4, 2));
        let f = &(&x1 * &x3) + &x1;
        let e = f.phase_expansion();
        assert_eq!(e.len(), 1);
        assert_eq!(e.values().next().unwrap(), &(&Jet::one(2, 1, 4) + &x3));
    }
}
