use crate::error::{Error, Result};
use crate::polycore::{CMatrix, C64, ONE, ZERO};

/// Relative singular-value threshold for declaring a matrix singular.
pub const EPS_RANK: f64 = 1e-8;

/// How the unit null vector is completed to a unitary matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Completion {
    /// A Householder reflector mapping `e1` onto the null vector.
    #[default]
    Householder,
    /// Gram-Schmidt on the null vector followed by the standard basis,
    /// taken in reverse order.
    GramSchmidt,
}

/// A unitary `U` whose first column spans a null vector of `a`, so that
/// `a * U` has a (numerically) zero first column.
pub fn kernel_unitary(a: &CMatrix, completion: Completion) -> Result<CMatrix> {
    kernel_unitary_scaled(a, 0.0, completion)
}

/// As [`kernel_unitary`], but singularity is judged against
/// `max(|a|, scale)`. Callers pass a bound on the matrix function near the
/// evaluation point so that a matrix that is small everywhere, such as a
/// scalar at its root, still counts as singular.
pub fn kernel_unitary_scaled(a: &CMatrix, scale: f64, completion: Completion) -> Result<CMatrix> {
    let m = a.nrows();
    let svd = a.clone().svd(false, true);
    let sv = &svd.singular_values;
    let norm = sv.iter().copied().fold(0.0, f64::max);
    if norm == 0.0 {
        return Ok(CMatrix::identity(m, m));
    }
    let (k, sigma) = sv
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    if sigma > EPS_RANK * norm.max(scale) {
        return Err(Error::NotSingular { sigma, norm });
    }
    let v_t = svd.v_t.expect("right singular vectors requested");
    let v: Vec<C64> = (0..m).map(|j| v_t[(k, j)].conj()).collect();
    Ok(match completion {
        Completion::Householder => householder_completion(&v),
        Completion::GramSchmidt => gram_schmidt_completion(&v),
    })
}

fn householder_completion(v: &[C64]) -> CMatrix {
    let m = v.len();
    let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
    // rotate so the first component is real and nonnegative
    let vr: Vec<C64> = v.iter().map(|x| x / phase).collect();
    let mut w = vr.clone();
    w[0] -= ONE;
    let wn: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let mut h = CMatrix::identity(m, m);
    if wn > 1e-30 {
        for i in 0..m {
            for j in 0..m {
                h[(i, j)] -= w[i] * w[j].conj() * (2.0 / wn);
            }
        }
    }
    // H e1 = vr, so scaling the first column by the phase gives U e1 = v
    for i in 0..m {
        h[(i, 0)] *= phase;
    }
    h
}

fn gram_schmidt_completion(v: &[C64]) -> CMatrix {
    let m = v.len();
    let mut basis: Vec<Vec<C64>> = vec![v.to_vec()];
    for e in (0..m).rev() {
        if basis.len() == m {
            break;
        }
        let mut u: Vec<C64> = (0..m).map(|i| if i == e { ONE } else { ZERO }).collect();
        // two passes for orthogonality in floating point
        for _ in 0..2 {
            for b in &basis {
                let dot: C64 = b.iter().zip(&u).map(|(x, y)| x.conj() * y).sum();
                for (ui, bi) in u.iter_mut().zip(b) {
                    *ui -= dot * bi;
                }
            }
        }
        let n = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            basis.push(u.into_iter().map(|x| x / n).collect());
        }
    }
    CMatrix::from_fn(m, m, |i, j| basis[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn is_unitary(u: &CMatrix) -> bool {
        let m = u.nrows();
        (u.adjoint() * u - CMatrix::identity(m, m)).iter().all(|z| z.norm() < 1e-13)
    }

    #[test]
    fn swap_for_lower_left_one() {
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
        let u = kernel_unitary(&a, Completion::Householder).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!((u.clone() - want).iter().all(|z| z.norm() < 1e-14), "{u}");
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let u = kernel_unitary(&CMatrix::zeros(2, 2), Completion::Householder).unwrap();
        assert_eq!(u, CMatrix::identity(2, 2));
    }

    #[test]
    fn diagonal_rank_one() {
        let a = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let u = kernel_unitary(&a, Completion::Householder).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!((u - want).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn both_completions_annihilate_first_column() {
        let a = CMatrix::from_row_slice(3, 3, &[re(1.0), C64::new(2.0, 1.0), re(0.0), re(2.0), C64::new(4.0, 2.0), re(0.0), re(0.5), C64::new(1.0, 0.5), re(3.0)]);
        for c in [Completion::Householder, Completion::GramSchmidt] {
            let u = kernel_unitary(&a, c).unwrap();
            assert!(is_unitary(&u));
            let first = &a * u.column(0);
            assert!(first.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn nonsingular_is_rejected() {
        assert!(matches!(
            kernel_unitary(&CMatrix::identity(2, 2), Completion::Householder),
            Err(Error::NotSingular { .. })
        ));
    }
}
