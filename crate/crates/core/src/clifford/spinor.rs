//! Spinor algebra over a fixed representation: adjoints, charge conjugation,
//! chiral projection, chiral bases and the bilinear coefficient quadruple.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GammaRepresentation;
use crate::error::{Error, Result};
use crate::linalg::{CoSpinor, Mat4, Spinor};

/// A basis is rejected when |ξ̄η^c| falls below this.
pub const INDEPENDENCE_FLOOR: f64 = 1e-8;

/// Tolerance of the γ⁵-eigenvector test, relative to the spinor norm.
pub const EIGEN_TOL: f64 = 1e-12;

/// Eigenvalue of γ⁵.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Chirality {
    Right,
    Left,
}

impl Chirality {
    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Chirality::Right),
            -1 => Ok(Chirality::Left),
            other => Err(Error::InvalidSign(other)),
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Chirality::Right => 1,
            Chirality::Left => -1,
        }
    }

    pub fn value(self) -> f64 {
        self.sign() as f64
    }

    pub fn opposite(self) -> Self {
        match self {
            Chirality::Right => Chirality::Left,
            Chirality::Left => Chirality::Right,
        }
    }
}

impl TryFrom<i32> for Chirality {
    type Error = Error;
    fn try_from(s: i32) -> Result<Self> {
        Chirality::from_sign(s)
    }
}

impl From<Chirality> for i32 {
    fn from(c: Chirality) -> i32 {
        c.sign()
    }
}

/// χ̄ = χ†γ⁰.
pub fn dirac_adjoint(chi: &Spinor, rep: &GammaRepresentation) -> CoSpinor {
    CoSpinor(chi.conj().0).mul_mat(&rep.gamma[0])
}

/// χ^c = Cχ̄ᵀ.
pub fn charge_conjugate(chi: &Spinor, rep: &GammaRepresentation) -> Spinor {
    rep.c_matrix * dirac_adjoint(chi, rep).transpose()
}

/// ½(1 + sγ⁵)ψ.
pub fn chiral_project(psi: &Spinor, s: Chirality, rep: &GammaRepresentation) -> Spinor {
    (*psi + rep.gamma5 * *psi * s.value()) * 0.5
}

/// `‖γ⁵χ − sχ‖`, scaled by `max(1, ‖χ‖)`.
pub fn eigen_deviation(chi: &Spinor, s: Chirality, rep: &GammaRepresentation) -> f64 {
    (rep.gamma5 * *chi - *chi * s.value()).norm() / chi.norm().max(1.0)
}

/// Two linearly independent constant spinors of the same chirality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiralBasis {
    pub xi: Spinor,
    pub eta: Spinor,
    pub sign: Chirality,
}

impl ChiralBasis {
    /// ξ̄η^c, the independence witness and the denominator of the coefficients.
    pub fn bilinear(&self, rep: &GammaRepresentation) -> Complex64 {
        dirac_adjoint(&self.xi, rep).apply(&charge_conjugate(&self.eta, rep))
    }

    /// η′ = ση + τξ, validated as a basis.
    pub fn substitute_eta(
        &self,
        rep: &GammaRepresentation,
        sigma: Complex64,
        tau: Complex64,
    ) -> Result<ChiralBasis> {
        if sigma.norm() == 0.0 {
            return Err(Error::InvalidParameter("sigma must be nonzero".into()));
        }
        let eta = self.eta * sigma + self.xi * tau;
        make_chiral_basis(rep, self.sign, Some((self.xi, eta)))
    }
}

/// Builds a chiral basis. The default projects e₁…e₄ onto the `sign`
/// eigenspace and orthonormalizes in scan order; an override pair is validated
/// instead.
pub fn make_chiral_basis(
    rep: &GammaRepresentation,
    sign: Chirality,
    override_pair: Option<(Spinor, Spinor)>,
) -> Result<ChiralBasis> {
    let basis = match override_pair {
        Some((xi, eta)) => {
            for (label, chi) in [("xi", &xi), ("eta", &eta)] {
                if chi.norm() == 0.0 {
                    return Err(Error::InvalidBasis(format!("{label} is the zero spinor")));
                }
                let dev = eigen_deviation(chi, sign, rep);
                if dev > EIGEN_TOL {
                    return Err(Error::InvalidBasis(format!(
                        "{label} is not a gamma5 eigenvector with eigenvalue {} (deviation {dev:e})",
                        sign.sign()
                    )));
                }
            }
            ChiralBasis { xi, eta, sign }
        }
        None => {
            let proj = rep.projector(sign.value());
            let mut found: Vec<Spinor> = Vec::with_capacity(2);
            for i in 0..4 {
                let mut v = proj * Spinor::basis(i);
                for u in &found {
                    v -= *u * u.inner(&v);
                }
                let n = v.norm();
                if n > 1e-8 {
                    found.push(v * (1.0 / n));
                }
                if found.len() == 2 {
                    break;
                }
            }
            if found.len() < 2 {
                return Err(Error::InvalidBasis(
                    "gamma5 eigenspace is not two-dimensional".into(),
                ));
            }
            ChiralBasis {
                xi: found[0],
                eta: found[1],
                sign,
            }
        }
    };
    let witness = basis.bilinear(rep).norm();
    if witness < INDEPENDENCE_FLOOR {
        return Err(Error::InvalidBasis(format!(
            "xi and eta are not linearly independent (|xi-bar eta^c| = {witness:e})"
        )));
    }
    Ok(basis)
}

/// Pointwise values of the coefficient fields a, b, a′, b′.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientQuadruple {
    pub a: Complex64,
    pub b: Complex64,
    pub a_prime: Complex64,
    pub b_prime: Complex64,
}

/// The constant spinors of a basis with their adjoints and conjugates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisBilinears {
    pub xi_bar: CoSpinor,
    pub eta_bar: CoSpinor,
    pub xi_c: Spinor,
    pub eta_c: Spinor,
    /// ξ̄η^c
    pub xi_eta_c: Complex64,
    /// η̄ξ^c
    pub eta_xi_c: Complex64,
}

/// Field-dependent numerators ξ̄Fη^c, ξ̄Fξ^c, η̄Fη^c, η̄Fξ^c.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldBilinears {
    pub xi_f_eta_c: Complex64,
    pub xi_f_xi_c: Complex64,
    pub eta_f_eta_c: Complex64,
    pub eta_f_xi_c: Complex64,
}

impl BasisBilinears {
    pub fn new(basis: &ChiralBasis, rep: &GammaRepresentation) -> Self {
        let xi_bar = dirac_adjoint(&basis.xi, rep);
        let eta_bar = dirac_adjoint(&basis.eta, rep);
        let xi_c = charge_conjugate(&basis.xi, rep);
        let eta_c = charge_conjugate(&basis.eta, rep);
        BasisBilinears {
            xi_bar,
            eta_bar,
            xi_c,
            eta_c,
            xi_eta_c: xi_bar.apply(&eta_c),
            eta_xi_c: eta_bar.apply(&xi_c),
        }
    }

    pub fn field(&self, f: &Mat4) -> FieldBilinears {
        let f_xi_c = *f * self.xi_c;
        let f_eta_c = *f * self.eta_c;
        FieldBilinears {
            xi_f_eta_c: self.xi_bar.apply(&f_eta_c),
            xi_f_xi_c: self.xi_bar.apply(&f_xi_c),
            eta_f_eta_c: self.eta_bar.apply(&f_eta_c),
            eta_f_xi_c: self.eta_bar.apply(&f_xi_c),
        }
    }

    pub fn quadruple(&self, f: &Mat4) -> CoefficientQuadruple {
        let n = self.field(f);
        CoefficientQuadruple {
            a: n.xi_f_eta_c / self.xi_eta_c,
            b: n.xi_f_xi_c / self.eta_xi_c,
            a_prime: n.eta_f_eta_c / self.xi_eta_c,
            b_prime: n.eta_f_xi_c / self.eta_xi_c,
        }
    }
}

/// a = ξ̄Fη^c/ξ̄η^c, b = ξ̄Fξ^c/η̄ξ^c, a′ = η̄Fη^c/ξ̄η^c, b′ = η̄Fξ^c/η̄ξ^c.
///
/// b′ is computed from its own ratio; callers can compare it against −a.
pub fn coefficient_quadruple(
    basis: &ChiralBasis,
    f_matrix: &Mat4,
    rep: &GammaRepresentation,
) -> CoefficientQuadruple {
    BasisBilinears::new(basis, rep).quadruple(f_matrix)
}
