use num_complex::Complex64;

use super::GammaRepresentation;
use crate::error::{Error, Result};
use crate::linalg::Mat4;

/// Spinor representative Λ = exp(−(i/4) ω_{μν} σ^{μν}) of a proper Lorentz
/// transformation with covariant generator parameters ω_{μν}.
///
/// ω must be antisymmetric; e.g. ω₀₁ = −ω₁₀ = η is a boost of rapidity η
/// along x¹.
pub fn lorentz_spinor_map(omega_lower: &[[f64; 4]; 4], rep: &GammaRepresentation) -> Result<Mat4> {
    let scale = omega_lower
        .iter()
        .flatten()
        .fold(1.0f64, |m, x| m.max(x.abs()));
    for mu in 0..4 {
        for nu in 0..4 {
            let asym = omega_lower[mu][nu] + omega_lower[nu][mu];
            if !asym.is_finite() || asym.abs() > 1e-12 * scale {
                return Err(Error::InvalidLorentzParameters(format!(
                    "omega[{mu}][{nu}] + omega[{nu}][{mu}] = {asym:e}"
                )));
            }
        }
    }
    let sigma = rep.sigma_table();
    let mut generator = Mat4::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            if omega_lower[mu][nu] != 0.0 {
                generator += sigma[mu][nu] * omega_lower[mu][nu];
            }
        }
    }
    Ok(generator.scale(Complex64::new(0.0, -0.25)).expm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{eigen_deviation, make_chiral_basis, Chirality, Metric};

    fn boost(eta: f64) -> [[f64; 4]; 4] {
        let mut w = [[0.0; 4]; 4];
        w[0][1] = eta;
        w[1][0] = -eta;
        w
    }

    #[test]
    fn zero_generator_is_identity() {
        let r = GammaRepresentation::builtin("chiral").unwrap();
        let l = lorentz_spinor_map(&[[0.0; 4]; 4], &r).unwrap();
        assert_eq!(l, Mat4::identity());
    }

    #[test]
    fn rejects_symmetric_parameters() {
        let r = GammaRepresentation::builtin("chiral").unwrap();
        let mut w = [[0.0; 4]; 4];
        w[1][2] = 0.4;
        w[2][1] = 0.4;
        assert!(lorentz_spinor_map(&w, &r).is_err());
    }

    #[test]
    fn boost_preserves_chirality_of_basis_spinor() {
        let r = GammaRepresentation::builtin("dirac-standard").unwrap();
        let l = lorentz_spinor_map(&boost(0.3), &r).unwrap();
        assert!(l.commutator(&r.gamma5).max_abs() < 1e-10);
        let b = make_chiral_basis(&r, Chirality::Right, None).unwrap();
        assert!(eigen_deviation(&(l * b.xi), Chirality::Right, &r) < 1e-10);
    }

    #[test]
    fn conjugated_gammas_form_a_lorentz_matrix() {
        // Λ⁻¹γ^μΛ = L^μ_ν γ^ν with L real and Lᵀ g L = g.
        let r = GammaRepresentation::builtin("chiral").unwrap();
        let mut w = boost(0.4);
        w[2][3] = 0.7;
        w[3][2] = -0.7;
        let l = lorentz_spinor_map(&w, &r).unwrap();
        let l_inv = l.inverse().unwrap();
        let mut lm = [[0.0; 4]; 4];
        for mu in 0..4 {
            let t = l_inv * r.gamma[mu] * l;
            for nu in 0..4 {
                // tr(γ^ν γ^ρ) = 4 g^{νρ}
                let c = (t * r.gamma[nu]).trace() / (4.0 * Metric::g(nu, nu));
                assert!(c.im.abs() < 1e-12);
                lm[mu][nu] = c.re;
            }
            let mut rebuilt = Mat4::zero();
            for nu in 0..4 {
                rebuilt += r.gamma[nu] * lm[mu][nu];
            }
            assert!(rebuilt.max_abs_diff(&t) < 1e-12);
        }
        for a in 0..4 {
            for b in 0..4 {
                let s: f64 = (0..4).map(|m| lm[m][a] * Metric::g(m, m) * lm[m][b]).sum();
                assert!((s - Metric::g(a, b)).abs() < 1e-12);
            }
        }
    }
}
