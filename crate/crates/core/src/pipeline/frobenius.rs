use crate::algebra::Jet;
use crate::error::{PnfError, Result};

pub(crate) fn mat_vec(m: &[Vec<Jet>], v: &[Jet]) -> Vec<Jet> {
    m.iter().map(|row| row.iter().zip(v).fold(v[0].zero_like(), |acc, (a, b)| &acc + &(a * b))).collect()
}

fn mat_mul(a: &[Vec<Jet>], b: &[Vec<Jet>]) -> Vec<Vec<Jet>> {
    let p = b.len();
    (0..a.len())
        .map(|r| {
            (0..b[0].len())
                .map(|c| (0..p).fold(a[r][0].zero_like(), |acc, k| &acc + &(&a[r][k] * &b[k][c])))
                .collect()
        })
        .collect()
}

fn common_order(theta: &[Vec<Vec<Jet>>], rhs: &[Vec<Jet>]) -> u32 {
    let a = theta.iter().flatten().flatten().map(|j| j.order());
    let b = rhs.iter().flatten().map(|j| j.order());
    a.chain(b).min().unwrap_or(0)
}

/// Checks the integrability conditions of `∂β/∂x_{v_i} = -Θ_i β + r_i`:
/// `-∂_j Θ_i + Θ_i Θ_j = -∂_i Θ_j + Θ_j Θ_i` and
/// `∂_j r_i - Θ_i r_j = ∂_i r_j - Θ_j r_i`, up to `order - 1`.
pub fn check_compatibility(theta: &[Vec<Vec<Jet>>], rhs: &[Vec<Jet>], vars: &[usize]) -> Result<()> {
    if theta.len() != vars.len() || rhs.len() != vars.len() {
        return Err(PnfError::Structural("one matrix and one right-hand side per variable expected".into()));
    }
    let t = common_order(theta, rhs).saturating_sub(1);
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            let (vi, vj) = (vars[i], vars[j]);
            let ti_tj = mat_mul(&theta[i], &theta[j]);
            let tj_ti = mat_mul(&theta[j], &theta[i]);
            for r in 0..theta[i].len() {
                for c in 0..theta[i][r].len() {
                    let lhs = &ti_tj[r][c] - &theta[i][r][c].diff(vj);
                    let rhs_ = &tj_ti[r][c] - &theta[j][r][c].diff(vi);
                    if !lhs.eq_to(&rhs_, t) {
                        return Err(PnfError::Incompatible(format!(
                            "matrices for x{} and x{} fail the zero-curvature condition at ({}, {})",
                            vi + 1,
                            vj + 1,
                            r + 1,
                            c + 1
                        )));
                    }
                }
            }
            let ti_rj = mat_vec(&theta[i], &rhs[j]);
            let tj_ri = mat_vec(&theta[j], &rhs[i]);
            for k in 0..rhs[i].len() {
                let lhs = &rhs[i][k].diff(vj) - &ti_rj[k];
                let rhs_ = &rhs[j][k].diff(vi) - &tj_ri[k];
                if !lhs.eq_to(&rhs_, t) {
                    return Err(PnfError::Incompatible(format!(
                        "right-hand sides for x{} and x{} are incompatible in component {}",
                        vi + 1,
                        vj + 1,
                        k + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The solution of `∂β/∂x_{v_i} = -Θ_i β + r_i` (for every listed variable)
/// that vanishes on `x_{v_1} = ... = x_{v_m} = 0`. Built one variable at a
/// time: along `x_{v_i}` with the later variables set to zero, by Picard
/// iteration from the previous slice.
pub fn frobenius_solve(theta: &[Vec<Vec<Jet>>], rhs: &[Vec<Jet>], vars: &[usize]) -> Result<Vec<Jet>> {
    check_compatibility(theta, rhs, vars)?;
    let Some(first) = rhs.first() else {
        return Err(PnfError::Structural("empty Frobenius system".into()));
    };
    let order = common_order(theta, rhs);
    let dim = first.len();
    let zero = first[0].zero_like().truncate(order);
    let mut beta = vec![zero.clone(); dim];
    for (i, &v) in vars.iter().enumerate() {
        let later = &vars[i + 1..];
        let th: Vec<Vec<Jet>> = theta[i].iter().map(|row| row.iter().map(|a| a.set_zero(later)).collect()).collect();
        let r: Vec<Jet> = rhs[i].iter().map(|a| a.set_zero(later)).collect();
        let start = beta.clone();
        for _ in 0..=order {
            let tb = mat_vec(&th, &beta);
            let next: Vec<Jet> = (0..dim)
                .map(|k| &start[k] + &(&r[k] - &tb[k]).truncate(order).integrate_within_order(v))
                .collect();
            if next == beta {
                break;
            }
            beta = next;
        }
    }
    let t = order.saturating_sub(1);
    for (i, &v) in vars.iter().enumerate() {
        let tb = mat_vec(&theta[i], &beta);
        for k in 0..dim {
            let residual = &(&beta[k].diff(v) + &tb[k]) - &rhs[i][k];
            if !residual.truncate(t).is_zero() {
                return Err(PnfError::Verification(format!(
                    "Frobenius solution fails equation {} in x{}, component {}",
                    i + 1,
                    v + 1,
                    k + 1
                )));
            }
        }
    }
    Ok(beta)
}
