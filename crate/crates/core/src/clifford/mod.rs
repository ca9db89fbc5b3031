//! Gamma-matrix representations and the spinor algebra built on them.

mod charge;
mod lorentz;
mod representation;
mod spinor;

pub use charge::find_charge_conjugation;
pub use lorentz::lorentz_spinor_map;
pub use representation::{
    validate_representation, GammaRepresentation, InvariantCheck, ValidationReport, ALGEBRA_TOL,
    BUILTIN_NAMES,
};
pub use spinor::{
    charge_conjugate, chiral_project, coefficient_quadruple, dirac_adjoint, eigen_deviation,
    make_chiral_basis, BasisBilinears, ChiralBasis, Chirality, CoefficientQuadruple,
    FieldBilinears, EIGEN_TOL, INDEPENDENCE_FLOOR,
};

/// Minkowski metric with signature (+, −, −, −).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Metric;

impl Metric {
    pub const DIAG: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

    pub fn g(mu: usize, nu: usize) -> f64 {
        if mu == nu {
            Self::DIAG[mu]
        } else {
            0.0
        }
    }

    /// Raises (or lowers) an index; the metric is its own inverse.
    pub fn raise(v: [f64; 4]) -> [f64; 4] {
        [v[0], -v[1], -v[2], -v[3]]
    }

    /// `u^μ v_μ` given both vectors with lower indices.
    pub fn dot_lower(u: [f64; 4], v: [f64; 4]) -> f64 {
        u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]
    }
}
