use nalgebra::DMatrix;
use num_complex::Complex64;

use super::lowrank::sorted_svd;
use crate::error::{Error, Result};
use crate::frontend::PilotMatrix;

/// Right pseudo-inverse `X^† = Xᴴ(X·Xᴴ)⁻¹` of a full-row-rank pilot matrix.
pub fn pseudo_inverse(x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let m_t = x.nrows();
    let s = sorted_svd(x)?.singular_values;
    let rank = s.iter().filter(|&&v| v > 1e-10 * s[0]).count();
    if rank < m_t {
        return Err(Error::RankDeficient {
            rank,
            required: m_t,
        });
    }
    let chol = (x * x.adjoint()).cholesky().ok_or(Error::RankDeficient {
        rank,
        required: m_t,
    })?;
    // (X^†)ᴴ = G⁻¹·X with G = X·Xᴴ Hermitian
    Ok(chol.solve(x).adjoint())
}

/// Least-squares channel from an estimate of `H·X`: `Ĥ = X̂·X^†`.
pub fn recover_channel(
    x_hat: &DMatrix<Complex64>,
    pilots: &PilotMatrix,
) -> Result<DMatrix<Complex64>> {
    if x_hat.ncols() != pilots.x.ncols() {
        return Err(Error::Dimension(format!(
            "estimate has {} columns, pilots {}",
            x_hat.ncols(),
            pilots.x.ncols()
        )));
    }
    Ok(x_hat * pseudo_inverse(&pilots.x)?)
}
