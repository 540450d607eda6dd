use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{CalibrationProfile, Homography, Rotation};
use crate::math;
use crate::{Error, Mat3, Result, Vec3};

/// Singular values below this fraction of the largest count as null directions.
const NULL_TOLERANCE: f64 = 1e-9;

/// Least-squares `K̃` from rotation/homography pairs.
///
/// Each pair contributes the nine linear equations `H K̃ - K̃ R = 0`. Every
/// `H` is first rescaled to unit determinant, the scale at which
/// `H = K̃ R K̃⁻¹` holds exactly. The stacked system's smallest right-singular
/// vector is the solution up to scale, which is then fixed by
/// `k_tilde[2][2] = 1`.
///
/// The rotations must be the coordinate-change rotations used to build the
/// homographies (see [`super::integrate_rotation`]) and must span at least two
/// independent axes; otherwise the null space has more than one dimension and
/// [`Error::RankDeficient`] reports its size.
pub fn calibrate_k_tilde(pairs: &[(Rotation, Homography)]) -> Result<CalibrationProfile> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData("calibration needs at least two pairs"));
    }
    let mut a = DMatrix::<f64>::zeros(9 * pairs.len(), 9);
    for (p, (rot, hom)) in pairs.iter().enumerate() {
        let h = unit_determinant(hom.matrix())?;
        let r = rot.matrix();
        for row in 0..3 {
            for col in 0..3 {
                let eq = 9 * p + 3 * row + col;
                // Coefficient of K[ka][kb] in (H K - K R)[row][col].
                for ka in 0..3 {
                    for kb in 0..3 {
                        let mut c = 0.0;
                        if kb == col {
                            c += h[(row, ka)];
                        }
                        if ka == row {
                            c -= r[(kb, col)];
                        }
                        a[(eq, 3 * ka + kb)] = c;
                    }
                }
            }
        }
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::Calibration("singular value decomposition failed"))?;
    let sigma = &svd.singular_values;
    let sigma_max = sigma.max();
    let null_dimension = sigma.iter().filter(|&&s| s <= NULL_TOLERANCE * sigma_max).count();
    if sigma_max == 0.0 || null_dimension > 1 {
        return Err(Error::RankDeficient { null_dimension: if sigma_max == 0.0 { 9 } else { null_dimension } });
    }
    let (imin, _) = sigma
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nine singular values");
    let v: Vec<f64> = v_t.row(imin).iter().copied().collect();
    let k = Mat3::from_row_slice(&v);
    CalibrationProfile::new(k, Vec3::zeros(), 0.0)
}

/// Root-mean-square Frobenius norm of `H K̃ - K̃ R` over the pairs, with each
/// `H` at unit determinant.
pub fn calibration_residual(k_tilde: &Mat3, pairs: &[(Rotation, Homography)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no calibration pairs"));
    }
    let mut acc = 0.0;
    for (rot, hom) in pairs {
        let h = unit_determinant(hom.matrix())?;
        acc += (h * k_tilde - k_tilde * rot.matrix()).norm_squared();
    }
    Ok(math::sqrt(acc / pairs.len() as f64))
}

fn unit_determinant(h: &Mat3) -> Result<Mat3> {
    let det = h.determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Calibration("homography is singular"));
    }
    Ok(h / math::cbrt(det))
}
