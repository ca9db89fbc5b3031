use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::charge::find_charge_conjugation;
use super::Metric;
use crate::error::{Error, Result};
use crate::linalg::{Mat4, I, ONE, ZERO};

/// Names accepted by [`GammaRepresentation::builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["chiral", "dirac-standard", "majorana"];

/// Largest deviation tolerated by [`GammaRepresentation::validate`].
pub const ALGEBRA_TOL: f64 = 1e-12;

/// The Dirac matrices γ⁰…γ³, γ⁵ and the charge-conjugation matrix C.
///
/// The commutators σ^{μν} are cached at construction since every field-matrix
/// evaluation needs them.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRepresentation {
    pub name: String,
    pub gamma: [Mat4; 4],
    pub gamma5: Mat4,
    pub c_matrix: Mat4,
    sigma: [[Mat4; 4]; 4],
}

fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    let r = |x: f64| Complex64::new(x, 0.0);
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, r(-1.0)]],
    ]
}

fn scale2(m: [[Complex64; 2]; 2], s: Complex64) -> [[Complex64; 2]; 2] {
    m.map(|row| row.map(|z| z * s))
}

const Z2: [[Complex64; 2]; 2] = [[ZERO; 2]; 2];
const ID2: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];

impl GammaRepresentation {
    /// Builds a representation from its parts, caching σ^{μν}. No validation.
    pub fn from_parts(
        name: impl Into<String>,
        gamma: [Mat4; 4],
        gamma5: Mat4,
        c_matrix: Mat4,
    ) -> Self {
        let sigma = build_sigma_table(&gamma);
        GammaRepresentation {
            name: name.into(),
            gamma,
            gamma5,
            c_matrix,
            sigma,
        }
    }

    /// Builds a representation from γ^μ alone: γ⁵ = iγ⁰γ¹γ²γ³ and C from the
    /// null-space solver.
    pub fn from_gammas(name: impl Into<String>, gamma: [Mat4; 4]) -> Result<Self> {
        let name = name.into();
        let gamma5 = (gamma[0] * gamma[1] * gamma[2] * gamma[3]).scale(I);
        let c = find_charge_conjugation(&name, &gamma)?;
        Ok(Self::from_parts(name, gamma, gamma5, c))
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let p = pauli();
        let minus = Complex64::new(-1.0, 0.0);
        match name {
            "chiral" => {
                let g0 = Mat4::from_blocks(Z2, scale2(ID2, minus), scale2(ID2, minus), Z2);
                let gi = |s: [[Complex64; 2]; 2]| Mat4::from_blocks(Z2, s, scale2(s, minus), Z2);
                let g5 = Mat4::from_blocks(ID2, Z2, Z2, scale2(ID2, minus));
                let c = Mat4::from_blocks(scale2(p[1], -I), Z2, Z2, scale2(p[1], I));
                Ok(Self::from_parts(
                    "chiral",
                    [g0, gi(p[0]), gi(p[1]), gi(p[2])],
                    g5,
                    c,
                ))
            }
            "dirac-standard" => {
                let g0 = Mat4::from_blocks(ID2, Z2, Z2, scale2(ID2, minus));
                let gi = |s: [[Complex64; 2]; 2]| Mat4::from_blocks(Z2, s, scale2(s, minus), Z2);
                Self::from_gammas("dirac-standard", [g0, gi(p[0]), gi(p[1]), gi(p[2])])
            }
            "majorana" => {
                // All four γ^μ purely imaginary.
                let g0 = Mat4::from_blocks(Z2, p[1], p[1], Z2);
                let g1 = Mat4::from_blocks(scale2(p[2], I), Z2, Z2, scale2(p[2], I));
                let g2 = Mat4::from_blocks(Z2, scale2(p[1], minus), p[1], Z2);
                let g3 = Mat4::from_blocks(scale2(p[0], -I), Z2, Z2, scale2(p[0], -I));
                Self::from_gammas("majorana", [g0, g1, g2, g3])
            }
            other => Err(Error::UnknownRepresentation {
                name: other.to_string(),
                known: BUILTIN_NAMES.join(", "),
            }),
        }
    }

    /// `S γ^μ S⁻¹` for every γ, with C recomputed by the solver.
    pub fn similarity(&self, s: &Mat4, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let s_inv = s
            .inverse()
            .ok_or_else(|| Error::InadmissibleRepresentation {
                name: name.clone(),
                reason: "similarity matrix is singular".into(),
            })?;
        let gamma = self.gamma.map(|g| *s * g * s_inv);
        let gamma5 = *s * self.gamma5 * s_inv;
        let c = find_charge_conjugation(&name, &gamma)?;
        Ok(Self::from_parts(name, gamma, gamma5, c))
    }

    /// Same matrices with C replaced by −C.
    pub fn with_negated_c(&self) -> Self {
        let mut r = self.clone();
        r.c_matrix = -r.c_matrix;
        r
    }

    /// σ^{μν} = (i/2)[γ^μ, γ^ν].
    pub fn sigma(&self, mu: usize, nu: usize) -> Result<Mat4> {
        if mu > 3 || nu > 3 {
            return Err(Error::IndexOutOfRange(format!("sigma({mu}, {nu})")));
        }
        Ok(self.sigma[mu][nu])
    }

    pub(crate) fn sigma_table(&self) -> &[[Mat4; 4]; 4] {
        &self.sigma
    }

    /// Feynman slash `v_μ γ^μ` of a covariant vector.
    pub fn slash_lower(&self, v_lower: [f64; 4]) -> Mat4 {
        let mut m = Mat4::zero();
        for (mu, &v) in v_lower.iter().enumerate() {
            m += self.gamma[mu] * v;
        }
        m
    }

    /// ½(1 + sγ⁵).
    pub fn projector(&self, sign: f64) -> Mat4 {
        (Mat4::identity() + self.gamma5 * sign) * 0.5
    }

    pub fn validate(&self) -> ValidationReport {
        validate_representation(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&RepresentationJson::from(
            self,
        ))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: RepresentationJson = serde_json::from_str(s)?;
        Ok(j.into())
    }
}

fn build_sigma_table(gamma: &[Mat4; 4]) -> [[Mat4; 4]; 4] {
    let mut t = [[Mat4::zero(); 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            t[mu][nu] = gamma[mu]
                .commutator(&gamma[nu])
                .scale(Complex64::new(0.0, 0.5));
        }
    }
    t
}

/// On-disk JSON layout of a representation.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepresentationJson {
    name: String,
    gamma0: Mat4,
    gamma1: Mat4,
    gamma2: Mat4,
    gamma3: Mat4,
    gamma5: Mat4,
    #[serde(rename = "C")]
    c: Mat4,
}

impl From<&GammaRepresentation> for RepresentationJson {
    fn from(r: &GammaRepresentation) -> Self {
        RepresentationJson {
            name: r.name.clone(),
            gamma0: r.gamma[0],
            gamma1: r.gamma[1],
            gamma2: r.gamma[2],
            gamma3: r.gamma[3],
            gamma5: r.gamma5,
            c: r.c_matrix,
        }
    }
}

impl From<RepresentationJson> for GammaRepresentation {
    fn from(j: RepresentationJson) -> Self {
        GammaRepresentation::from_parts(
            j.name,
            [j.gamma0, j.gamma1, j.gamma2, j.gamma3],
            j.gamma5,
            j.c,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub representation: String,
    pub tolerance: f64,
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.max_deviation))
    }
}

/// Runs every algebraic invariant of a representation and reports the largest
/// deviation per invariant.
pub fn validate_representation(rep: &GammaRepresentation) -> ValidationReport {
    let g = &rep.gamma;
    let g5 = &rep.gamma5;
    let c = &rep.c_matrix;
    let id = Mat4::identity();
    let mut checks = Vec::new();
    let mut push = |name: &str, dev: f64| {
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        checks.push(InvariantCheck {
            name: name.to_string(),
            max_deviation: dev,
            pass: dev <= ALGEBRA_TOL,
        });
    };

    let max_over = |f: &dyn Fn(usize, usize) -> f64| {
        let mut m = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                m = m.max(f(mu, nu));
            }
        }
        m
    };

    push(
        "clifford_relation",
        max_over(&|mu, nu| {
            g[mu]
                .anticommutator(&g[nu])
                .max_abs_diff(&(id * (2.0 * Metric::g(mu, nu))))
        }),
    );
    push(
        "gamma_hermiticity",
        (0..4)
            .map(|mu| g[mu].dagger().max_abs_diff(&(g[0] * g[mu] * g[0])))
            .fold(0.0, f64::max),
    );
    push("gamma5_hermitian", g5.dagger().max_abs_diff(g5));
    push("gamma5_squared", (*g5 * *g5).max_abs_diff(&id));
    push(
        "gamma5_anticommutes",
        (0..4)
            .map(|mu| g5.anticommutator(&g[mu]).max_abs())
            .fold(0.0, f64::max),
    );

    match c.inverse() {
        Some(c_inv) => {
            push(
                "c_gamma",
                (0..4)
                    .map(|mu| (*c * g[mu] * c_inv + g[mu].transpose()).max_abs())
                    .fold(0.0, f64::max),
            );
            push("c_gamma5", (*c * *g5 * c_inv).max_abs_diff(&g5.transpose()));
            let sigma = rep.sigma_table();
            push(
                "c_sigma",
                max_over(&|mu, nu| {
                    (*c * sigma[mu][nu] * c_inv + sigma[mu][nu].transpose()).max_abs()
                }),
            );
        }
        None => {
            push("c_gamma", f64::INFINITY);
            push("c_gamma5", f64::INFINITY);
            push("c_sigma", f64::INFINITY);
        }
    }
    push("c_transpose_antisymmetric", (c.transpose() + *c).max_abs());
    push("c_dagger_antihermitian", (c.dagger() + *c).max_abs());
    push(
        "c_unitary",
        (*c * c.dagger())
            .max_abs_diff(&id)
            .max((c.dagger() * *c).max_abs_diff(&id)),
    );
    push("c_squared", (*c * *c + id).max_abs());

    ValidationReport {
        representation: rep.name.clone(),
        tolerance: ALGEBRA_TOL,
        checks,
    }
}
