use super::{FactorizationCertificate, SpectralFactor};
use crate::error::{Error, Result};
use crate::polycore::{matrix_norm_fro, CMatrix, Domain, MatrixLaurentPoly, RationalMatrix, C64, EPS_TRIM};

/// Determinant roots this close to the boundary mark the input as
/// boundary-degenerate.
pub const EPS_DEGENERATE: f64 = 1e-5;

/// Degree bound `N` of the factor of `s`: the top power on the disc, half
/// of it on the line.
pub fn factor_degree(s: &MatrixLaurentPoly, d: Domain) -> i32 {
    if s.is_zero() {
        return 0;
    }
    match d {
        Domain::Disc => s.hi().max(0),
        Domain::Line => (s.hi() + 1) / 2,
    }
}

/// Converts a swept factor into a matrix polynomial and certifies its degree.
pub fn extract_polynomial(sp: &RationalMatrix, s: &MatrixLaurentPoly, d: Domain, grid: usize) -> Result<SpectralFactor> {
    let m = sp.dim();
    let n = factor_degree(s, d);
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let f = sp.get(i, j);
            let p = f.to_poly().ok_or(Error::ResidualDenominator { row: i, col: j })?;
            if let Some(deg) = p.degree() {
                if deg as i32 > n {
                    return Err(Error::DegreeOverflow { found: deg, bound: n as usize });
                }
            }
            entries.push(crate::polycore::LaurentPoly::from_poly(&p));
        }
    }
    let plus = MatrixLaurentPoly::from_entries(m, &entries)?;
    if d == Domain::Line {
        let top = plus.coeff(n);
        let scale = plus.max_coeff_norm().max(f64::MIN_POSITIVE);
        if plus.hi() != n || matrix_norm_fro(&(&top * top.adjoint())) <= EPS_TRIM * scale * scale {
            return Err(Error::DegreeDeficit { found: plus.hi().max(0) as usize, required: n as usize });
        }
    }
    let det_roots = plus.det_poly()?.roots()?;
    let certificate = FactorizationCertificate {
        recon_residual: boundary_residual(&plus, s, d, grid),
        boundary_degenerate: det_roots.iter().any(|&r| d.depth(r).abs() <= EPS_DEGENERATE),
        det_roots,
        sweep_transcript: Vec::new(),
        unitary_fix: CMatrix::identity(m, m),
        degree_certified: true,
        cholesky: None,
    };
    Ok(SpectralFactor { plus, certificate })
}

/// Max over the boundary grid of `|P P* - S|_F / (1 + |S|_F)`.
pub fn boundary_residual(plus: &MatrixLaurentPoly, s: &MatrixLaurentPoly, d: Domain, grid: usize) -> f64 {
    d.boundary_grid(grid)
        .into_iter()
        .map(|z: C64| match (plus.eval(z), s.eval(z)) {
            (Ok(p), Ok(sz)) => matrix_norm_fro(&(&p * p.adjoint() - &sz)) / (1.0 + matrix_norm_fro(&sz)),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}
