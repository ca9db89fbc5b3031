//! Construction of the charge-conjugation matrix from the γ^μ alone.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat4;

const NULL_TOL: f64 = 1e-10;
const CHECK_TOL: f64 = 1e-12;

/// Solves `Cγ^μ + γ^{μT}C = 0` for μ = 0..3, normalizes the one-dimensional
/// solution to a unitary matrix with C² = −I and fixes the remaining sign.
///
/// Sign rule: of the two candidates ±C, keep the one whose first nonzero entry
/// (row-major) has argument in (−π/2, π/2].
pub fn find_charge_conjugation(name: &str, gamma: &[Mat4; 4]) -> Result<Mat4> {
    let reject = |reason: String| Error::InadmissibleRepresentation {
        name: name.to_string(),
        reason,
    };

    // Row (16μ + 4i + j) is entry (i, j) of Cγ^μ + γ^{μT}C; column 4p + q is C_pq.
    let mut system = DMatrix::<Complex64>::zeros(64, 16);
    for (mu, g) in gamma.iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let row = 16 * mu + 4 * i + j;
                for k in 0..4 {
                    // (Cγ)_ij = Σ_k C_ik γ_kj
                    system[(row, 4 * i + k)] += g.0[k][j];
                    // (γᵀC)_ij = Σ_k γ_ki C_kj
                    system[(row, 4 * k + j)] += g.0[k][i];
                }
            }
        }
    }

    let svd = system.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| reject("singular value decomposition failed".into()))?;
    let sv = &svd.singular_values;
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    let null_dim = sv
        .iter()
        .filter(|&&s| s <= NULL_TOL * largest.max(1.0))
        .count();
    if null_dim != 1 {
        return Err(reject(format!(
            "charge-conjugation null space has dimension {null_dim}, expected 1"
        )));
    }
    let k = (0..sv.len())
        .min_by(|&a, &b| sv[a].total_cmp(&sv[b]))
        .expect("non-empty spectrum");

    // Null vector = k-th column of V = conjugate of the k-th row of Vᴴ.
    let mut c = Mat4::zero();
    for p in 0..4 {
        for q in 0..4 {
            c.0[p][q] = v_t[(k, 4 * p + q)].conj();
        }
    }
    // A unitary 4×4 matrix has Frobenius norm 2.
    c = c * (2.0 / c.frobenius_norm());

    let sq = c * c;
    let mu = sq.0[0][0];
    if (sq - Mat4::identity().scale(mu)).max_abs() > 1e-9 || mu.norm() < 0.5 {
        return Err(reject("C² is not proportional to the identity".into()));
    }
    // Rotate the phase so that C² = −I: e^{2iθ}μ = −1.
    let phase = (Complex64::new(-1.0, 0.0) / mu).sqrt();
    c = c.scale(phase / phase.norm());

    if let Some(first) = c.0.iter().flatten().find(|z| z.norm() > 1e-9) {
        let arg = first.arg();
        let in_half_plane =
            arg > -std::f64::consts::FRAC_PI_2 && arg <= std::f64::consts::FRAC_PI_2;
        if !in_half_plane {
            c = -c;
        }
    }
    // Snap roundoff-level entries so that exact representations give exact C.
    let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    c = c.map(|z| Complex64::new(snap(z.re), snap(z.im)));

    let id = Mat4::identity();
    if (c * c + id).max_abs() > CHECK_TOL {
        return Err(reject("no sign choice achieves C² = −I".into()));
    }
    if (c.transpose() + c).max_abs() > CHECK_TOL || (c * c.dagger()).max_abs_diff(&id) > CHECK_TOL {
        return Err(reject(
            "charge-conjugation candidate violates Cᵀ = C† = −C".into(),
        ));
    }
    let c_inv = c.dagger();
    let worst = gamma
        .iter()
        .map(|g| (c * *g * c_inv + g.transpose()).max_abs())
        .fold(0.0, f64::max);
    if worst > CHECK_TOL {
        return Err(reject(format!("Cγ^μC⁻¹ = −γ^μᵀ violated by {worst:e}")));
    }
    Ok(c)
}
