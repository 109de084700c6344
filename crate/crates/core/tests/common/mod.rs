#![allow(dead_code)]

use pnf_core::algebra::{Jet, MultiIndex, Scalar};
use pnf_core::{DiffeoJet, PolyVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub mod forward;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small Gaussian rational, imaginary part present about half the time.
pub fn scalar(r: &mut ChaCha8Rng) -> Scalar {
    let re = (r.gen_range(-4..=4), r.gen_range(1..=3));
    if r.gen_bool(0.5) {
        Scalar::complex(re, (r.gen_range(-3..=3), r.gen_range(1..=2)))
    } else {
        Scalar::from_ratio(re.0, re.1)
    }
}

pub fn real_scalar(r: &mut ChaCha8Rng) -> Scalar {
    Scalar::from_ratio(r.gen_range(-4..=4), r.gen_range(1..=3))
}

/// Random monomial of degree in `lo..=hi`.
pub fn monomial(r: &mut ChaCha8Rng, nvars: usize, lo: u32, hi: u32) -> MultiIndex {
    let deg = r.gen_range(lo..=hi);
    let mut e = vec![0u32; nvars];
    for _ in 0..deg {
        e[r.gen_range(0..nvars)] += 1;
    }
    MultiIndex::new(e)
}

/// Random jet with up to `terms` terms of degree `lo..=hi`.
pub fn jet(r: &mut ChaCha8Rng, n: usize, p: usize, order: u32, terms: usize, lo: u32, hi: u32) -> Jet {
    let k = r.gen_range(0..=terms);
    Jet::from_terms(n, p, order, (0..k).map(|_| (monomial(r, n + p, lo, hi), scalar(r))).collect::<Vec<_>>())
}

/// Random polyvector of the given degree.
pub fn polyvector(r: &mut ChaCha8Rng, degree: usize, n: usize, order: u32, terms: usize, hi: u32) -> PolyVector {
    let mut t = PolyVector::zero(degree, n, 0, order);
    for _ in 0..r.gen_range(1..=terms) {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, r.gen_range(0..=i));
        }
        idx.truncate(degree);
        t.add_term(idx, jet(r, n, 0, order, 2, 0, hi));
    }
    t
}

pub fn sign(e: usize) -> Scalar {
    if e.is_multiple_of(2) {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// Random jet whose monomials have phase degree `>= lo` and total degree `<= hi`.
pub fn phase_jet(r: &mut ChaCha8Rng, n: usize, p: usize, order: u32, terms: usize, lo: u32, hi: u32) -> Jet {
    let mut f = Jet::zero(n, p, order);
    for _ in 0..r.gen_range(0..=terms) {
        let deg = r.gen_range(lo..=hi);
        let phase_deg = r.gen_range(lo..=deg);
        let mut e = vec![0u32; n + p];
        for _ in 0..phase_deg {
            e[r.gen_range(0..n)] += 1;
        }
        for _ in phase_deg..deg {
            e[n + r.gen_range(0..p)] += 1;
        }
        f.add_term(MultiIndex::new(e), real_scalar(r));
    }
    f
}

/// Identity-tangent change of coordinates fixing the parameters and the
/// parameter axis, with phase-linear part exactly the identity.
pub fn diffeo(r: &mut ChaCha8Rng, n: usize, p: usize, order: u32, terms: usize) -> DiffeoJet {
    let comps = (0..n + p)
        .map(|i| {
            let x = Jet::var(n, p, order, i);
            if i < n {
                &x + &phase_jet(r, n, p, order, terms, 2, order.min(4))
            } else {
                x
            }
        })
        .collect();
    DiffeoJet::new(comps).unwrap()
}

/// `Σ_k q_k λ_{j,k} = t_j` for every row, checked directly.
pub fn weight_vanishes(rows: &[Vec<Scalar>], q: &[u32], targets: &[usize], n: usize) -> bool {
    rows.iter().all(|row| {
        let mut w = Scalar::zero();
        for k in 0..n {
            w = &w + &(&Scalar::from_int(q[k] as i64) * &row[k]);
        }
        for &t in targets {
            w = &w - &row[t];
        }
        w.is_zero()
    })
}

/// `Φ_* X = Y` checked as `X(Φ^i) = Y^i ∘ Φ`, with no inversion.
pub fn field_conjugate(x: &PolyVector, phi: &DiffeoJet, y: &PolyVector, order: u32) -> bool {
    let comps = phi.components();
    let yc = y.components();
    (0..comps.len()).all(|i| {
        let lhs = x.apply(&comps[i]);
        let rhs = yc[i].compose(comps).unwrap();
        lhs.eq_to(&rhs, order)
    })
}

/// `Φ_* P = Q` checked as `{Φ^a, Φ^b}_P = Q^{ab} ∘ Φ`, with no inversion.
pub fn bivector_conjugate(p: &PolyVector, phi: &DiffeoJet, q: &PolyVector, order: u32) -> bool {
    let comps = phi.components();
    let nv = comps.len();
    (0..nv).all(|a| {
        (a + 1..nv).all(|b| {
            let lhs = p.poisson_bracket(&comps[a], &comps[b]);
            let rhs = q.component(&[a, b]).compose(comps).unwrap();
            lhs.eq_to(&rhs, order)
        })
    })
}
