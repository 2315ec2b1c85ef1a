use nalgebra::DMatrix;

use super::{Poly, C64, EPS_TRIM, ONE, ZERO};
use crate::error::{Error, Result};

/// All roots of `p` with multiplicity.
///
/// Exact zero low-order coefficients become roots at 0; the rest are the
/// eigenvalues of the balanced companion matrix of the monic normalization,
/// each polished by a guarded Newton step on `p` itself.
///
/// A constant nonzero polynomial has no roots. The zero polynomial, or one
/// whose leading coefficient is negligible against the others, is rejected.
pub fn roots(p: &Poly) -> Result<Vec<C64>> {
    let n = p.degree().ok_or(Error::DegenerateLeadingCoefficient)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.leading().norm() <= EPS_TRIM * p.max_abs() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let zeros_at_origin = p.low_order();
    let q = p.unshift(zeros_at_origin);
    let mut out = vec![ZERO; zeros_at_origin];
    out.extend(nonzero_roots(&q));
    Ok(out)
}

fn nonzero_roots(q: &Poly) -> Vec<C64> {
    let n = q.degree().unwrap_or(0);
    match n {
        0 => return Vec::new(),
        1 => return vec![-q.coeff(0) / q.coeff(1)],
        _ => {}
    }
    let lead = q.leading();
    let mut comp = DMatrix::<C64>::zeros(n, n);
    for k in 1..n {
        comp[(k, k - 1)] = ONE;
    }
    for k in 0..n {
        comp[(k, n - 1)] = -q.coeff(k) / lead;
    }
    balance(&mut comp);
    let eig = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .map(|v| v.iter().copied().collect::<Vec<_>>());
    let mut found = match eig {
        Some(v) if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => v,
        _ => aberth(q),
    };
    let dq = q.derivative();
    for z in found.iter_mut() {
        *z = polish(q, &dq, *z);
    }
    found
}

/// Parlett-Reinsch diagonal balancing with radix 2.
fn balance(a: &mut DMatrix<C64>) {
    let n = a.nrows();
    let l1 = |z: C64| z.re.abs() + z.im.abs();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[(j, i)]);
                    r += l1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c > g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn polish(p: &Poly, dp: &Poly, mut z: C64) -> C64 {
    let mut val = p.eval(z);
    for _ in 0..3 {
        if val == ZERO {
            break;
        }
        let d = dp.eval(z);
        if d == ZERO {
            break;
        }
        let step = val / d;
        if step.norm() > 1e-3 * z.norm().max(1.0) {
            break;
        }
        let cand = z - step;
        let cand_val = p.eval(cand);
        if cand_val.norm() < val.norm() {
            z = cand;
            val = cand_val;
        } else {
            break;
        }
    }
    z
}

/// Aberth-Ehrlich simultaneous iteration, used only when the Schur
/// iteration fails to converge.
fn aberth(p: &Poly) -> Vec<C64> {
    let n = p.degree().unwrap_or(0);
    let dp = p.derivative();
    let radius = {
        let lead = p.leading().norm();
        1.0 + (0..n).map(|k| p.coeff(k).norm() / lead).fold(0.0, f64::max)
    };
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = p.eval(z[i]) / dp.eval(z[i]);
            let sum: C64 = (0..n).filter(|&j| j != i).map(|j| ONE / (z[i] - z[j])).sum();
            let w = ratio / (ONE - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Greedy nearest-first matching between two root lists.
///
/// Returns index pairs `(i, j)` with `|a[i] - b[j]| <= tol * max(1, |b[j]|)`,
/// each index used at most once.
pub(crate) fn match_pairs(a: &[C64], b: &[C64], tol: f64) -> Vec<(usize, usize)> {
    let mut cands = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let dist = (x - y).norm();
            if dist <= tol * y.norm().max(1.0) {
                cands.push((dist, i, j));
            }
        }
    }
    cands.sort_by(|l, r| l.0.total_cmp(&r.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::new();
    for (_, i, j) in cands {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j));
        }
    }
    out
}
