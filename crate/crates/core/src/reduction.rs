//! One-component reduction and reconstruction.
//!
//! The component is φ = ξ̄ψ for a fixed chiral basis (ξ, η). Writing
//! β = ξ̄η^c, N_a = ξ̄Fη^c, N_b = ξ̄Fξ^c and N_a′ = η̄Fη^c, the one-component
//! equation is
//!
//! ```text
//! (β□′ − N_a) N_b⁻¹ (β□′ + N_a) φ + N_a′ φ = 0,
//! ```
//!
//! which equals −β times the ratio form ((□′ − a) b⁻¹ (□′ + a) − a′)φ computed
//! by [`fourth_order_apply`]. Reconstruction goes
//! φ → η̄ψ → ψ_∓ → ψ_± = (i∂̸ − A̸)ψ_∓ → ψ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{
    make_chiral_basis, BasisBilinears, ChiralBasis, Chirality, GammaRepresentation,
    INDEPENDENCE_FLOOR,
};
use crate::emfield::{field_matrix, PotentialField};
use crate::error::{Error, Result};
use crate::gridops::{
    box_prime_apply, current, dirac_apply, divide_masked, fourth_order_apply, plus_coefficient,
    CurrentFields, ScalarGridField, SpacetimeGrid, SpinorGridField,
};
use crate::linalg::Spinor;
use crate::par;

/// Points with |b| below this fraction of max|b| are masked.
pub const SINGULARITY_FLOOR: f64 = 1e-6;

/// Absolute part of the floor, relative to the largest field-matrix entry.
/// It only matters when b vanishes identically.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

/// Minimum unmasked fraction for a run to count.
pub const MIN_COVERAGE: f64 = 0.9;

/// Representation, basis and potential shared by every pipeline stage.
#[derive(Clone, Debug)]
pub struct ReductionContext {
    rep: GammaRepresentation,
    basis: ChiralBasis,
    bilinears: BasisBilinears,
    const_bilinear: Complex64,
    field: PotentialField,
}

impl ReductionContext {
    pub fn new(
        rep: GammaRepresentation,
        basis: ChiralBasis,
        field: PotentialField,
    ) -> Result<Self> {
        let bilinears = BasisBilinears::new(&basis, &rep);
        let const_bilinear = bilinears.xi_eta_c;
        if !(const_bilinear.norm() >= INDEPENDENCE_FLOOR) {
            return Err(Error::InvalidBasis(format!(
                "|xi-bar eta^c| = {:e} is below the independence floor",
                const_bilinear.norm()
            )));
        }
        Ok(ReductionContext {
            rep,
            basis,
            bilinears,
            const_bilinear,
            field,
        })
    }

    /// Context with the default basis of the given chirality.
    pub fn with_default_basis(
        rep: GammaRepresentation,
        sign: Chirality,
        field: PotentialField,
    ) -> Result<Self> {
        let basis = make_chiral_basis(&rep, sign, None)?;
        Self::new(rep, basis, field)
    }

    pub fn rep(&self) -> &GammaRepresentation {
        &self.rep
    }

    pub fn basis(&self) -> &ChiralBasis {
        &self.basis
    }

    pub fn bilinears(&self) -> &BasisBilinears {
        &self.bilinears
    }

    pub fn field(&self) -> &PotentialField {
        &self.field
    }

    /// β = ξ̄η^c.
    pub fn const_bilinear(&self) -> Complex64 {
        self.const_bilinear
    }

    /// Same representation and field with η replaced by ση + τξ.
    pub fn substitute_eta(&self, sigma: Complex64, tau: Complex64) -> Result<Self> {
        let basis = self.basis.substitute_eta(&self.rep, sigma, tau)?;
        Self::new(self.rep.clone(), basis, self.field.clone())
    }

    /// Same pipeline with C replaced by −C.
    pub fn with_negated_c(&self) -> Result<Self> {
        Self::new(self.rep.with_negated_c(), self.basis, self.field.clone())
    }

    /// Samples the coefficient fields and the singular mask on `grid`.
    pub fn coefficient_fields(&self, grid: &SpacetimeGrid) -> CoefficientFields {
        let samples = par::map_indices(grid.len(), |i| {
            let f = field_matrix(&self.field.tensor(grid.coords(i)), &self.rep);
            (
                self.bilinears.field(&f),
                self.bilinears.quadruple(&f),
                f.max_abs(),
            )
        });
        let scalar = |pick: &dyn Fn(usize) -> Complex64| {
            ScalarGridField::from_values(grid.clone(), (0..grid.len()).map(pick).collect())
                .expect("sample count matches grid")
        };
        let max_b = samples.iter().map(|s| s.1.b.norm()).fold(0.0, f64::max);
        let max_f = samples.iter().map(|s| s.2).fold(0.0, f64::max);
        let floor = (SINGULARITY_FLOOR * max_b)
            .max(ABSOLUTE_FLOOR * max_f)
            .max(f64::MIN_POSITIVE);
        let singular: Vec<bool> = samples.iter().map(|s| !(s.1.b.norm() >= floor)).collect();
        CoefficientFields {
            a: scalar(&|i| samples[i].1.a),
            b: scalar(&|i| samples[i].1.b),
            a_prime: scalar(&|i| samples[i].1.a_prime),
            b_prime: scalar(&|i| samples[i].1.b_prime),
            xi_f_eta_c: scalar(&|i| samples[i].0.xi_f_eta_c),
            xi_f_xi_c: scalar(&|i| samples[i].0.xi_f_xi_c),
            eta_f_eta_c: scalar(&|i| samples[i].0.eta_f_eta_c),
            singular,
            floor,
            max_b,
        }
    }
}

/// Sampled coefficients of the one-component equation.
#[derive(Clone, Debug)]
pub struct CoefficientFields {
    pub a: ScalarGridField,
    pub b: ScalarGridField,
    pub a_prime: ScalarGridField,
    pub b_prime: ScalarGridField,
    /// ξ̄Fη^c
    pub xi_f_eta_c: ScalarGridField,
    /// ξ̄Fξ^c
    pub xi_f_xi_c: ScalarGridField,
    /// η̄Fη^c
    pub eta_f_eta_c: ScalarGridField,
    singular: Vec<bool>,
    pub floor: f64,
    pub max_b: f64,
}

impl CoefficientFields {
    /// Points where |b| is below the floor.
    pub fn singular(&self) -> &[bool] {
        &self.singular
    }

    /// Unmasked fraction of all grid points.
    pub fn coverage(&self) -> f64 {
        let n = self.singular.len();
        if n == 0 {
            return 0.0;
        }
        self.singular.iter().filter(|&&s| !s).count() as f64 / n as f64
    }

    /// max |b′ + a| over all points.
    pub fn b_prime_defect(&self) -> f64 {
        self.b_prime
            .values()
            .iter()
            .zip(self.a.values())
            .map(|(bp, a)| (bp + a).norm())
            .fold(0.0, f64::max)
    }
}

/// φ = ξ̄ψ pointwise.
pub fn extract_component(psi: &SpinorGridField, ctx: &ReductionContext) -> ScalarGridField {
    let xi_bar = ctx.bilinears.xi_bar;
    psi.map(|v| xi_bar.apply(&v))
}

/// η̄ψ pointwise, for comparisons against reconstruction.
pub fn extract_eta_component(psi: &SpinorGridField, ctx: &ReductionContext) -> ScalarGridField {
    let eta_bar = ctx.bilinears.eta_bar;
    psi.map(|v| eta_bar.apply(&v))
}

/// Result of [`one_component_residual`].
#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// (β□′ − N_a) N_b⁻¹ (β□′ + N_a)φ + N_a′φ, masked where b is singular.
    pub residual: ScalarGridField,
    /// Interior max-norm of `residual` over unmasked points.
    pub max_norm: f64,
    /// Unmasked fraction of the residual's valid interior.
    pub coverage: f64,
    /// max |residual + β · ratio form| relative to max|residual| (or 1).
    pub form_mismatch: f64,
}

/// Applies the one-component operator to φ in both forms and cross-checks them.
pub fn one_component_residual(
    phi: &ScalarGridField,
    ctx: &ReductionContext,
) -> Result<ResidualReport> {
    let coeffs = ctx.coefficient_fields(phi.grid());
    if coeffs.coverage() == 0.0 {
        return Err(Error::DegenerateField);
    }
    let beta = ctx.const_bilinear;
    let inner = box_prime_apply(phi, &ctx.field)?.map(|z| z * beta);
    let v = plus_coefficient(&inner, phi, &coeffs.xi_f_eta_c, 1.0)?;
    let w = divide_masked(&v, &coeffs.xi_f_xi_c, coeffs.singular())?;
    let outer = box_prime_apply(&w, &ctx.field)?.map(|z| z * beta);
    let out = plus_coefficient(&outer, &w, &coeffs.xi_f_eta_c, -1.0)?;
    let residual = plus_coefficient(&out, phi, &coeffs.eta_f_eta_c, 1.0)?;
    let coverage = residual.coverage();
    if coverage == 0.0 {
        return Err(Error::DegenerateField);
    }
    let ratio = fourth_order_apply(phi, ctx)?;
    let max_norm = residual.max_norm();
    let mismatch = residual.zip_with(&ratio, |r, q| r + q * beta)?.max_norm();
    Ok(ResidualReport {
        max_norm,
        coverage,
        form_mismatch: mismatch / max_norm.max(1.0),
        residual,
    })
}

/// Which algebraic form to use for η̄ψ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaForm {
    /// −b⁻¹(□′ + a)φ
    #[default]
    Ratio,
    /// (ξ̄Fξ^c)⁻¹(β□′ + ξ̄Fη^c)φ
    Bilinear,
}

/// η̄ψ from φ. Fails when fewer than [`MIN_COVERAGE`] of the interior points
/// survive the singularity mask.
pub fn reconstruct_eta_component(
    phi: &ScalarGridField,
    ctx: &ReductionContext,
) -> Result<ScalarGridField> {
    reconstruct_eta_component_with(phi, ctx, EtaForm::Ratio)
}

pub fn reconstruct_eta_component_with(
    phi: &ScalarGridField,
    ctx: &ReductionContext,
    form: EtaForm,
) -> Result<ScalarGridField> {
    let coeffs = ctx.coefficient_fields(phi.grid());
    if coeffs.coverage() == 0.0 {
        return Err(Error::DegenerateField);
    }
    let bp = box_prime_apply(phi, &ctx.field)?;
    let out = match form {
        EtaForm::Ratio => {
            let v = plus_coefficient(&bp, phi, &coeffs.a, 1.0)?;
            divide_masked(&v, &coeffs.b, coeffs.singular())?.map(|z| -z)
        }
        EtaForm::Bilinear => {
            let beta = ctx.const_bilinear;
            let v = plus_coefficient(&bp.map(|z| z * beta), phi, &coeffs.xi_f_eta_c, 1.0)?;
            divide_masked(&v, &coeffs.xi_f_xi_c, coeffs.singular())?
        }
    };
    let coverage = out.coverage();
    if coverage < MIN_COVERAGE {
        return Err(Error::CoverageShortfall {
            coverage,
            required: MIN_COVERAGE,
        });
    }
    Ok(out)
}

/// ψ_∓ = (φη^c − (η̄ψ)ξ^c)/β, the part of ψ with chirality opposite to the basis.
pub fn reconstruct_chiral_part(
    phi: &ScalarGridField,
    eta_phi: &ScalarGridField,
    ctx: &ReductionContext,
) -> Result<SpinorGridField> {
    let b = &ctx.bilinears;
    let inv_beta = 1.0 / ctx.const_bilinear;
    phi.zip_with(eta_phi, |p, e| (b.eta_c * p - b.xi_c * e) * inv_beta)
}

/// ψ = ψ_∓ + (i∂̸ − A̸)ψ_∓.
pub fn reconstruct_full(
    psi_part: &SpinorGridField,
    ctx: &ReductionContext,
) -> Result<SpinorGridField> {
    let other = dirac_apply(psi_part, &ctx.field, &ctx.rep)?;
    psi_part.zip_with(&other, |a, b| a + b)
}

/// Every intermediate of the reconstruction chain.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub eta_phi: ScalarGridField,
    pub chiral_part: SpinorGridField,
    pub psi: SpinorGridField,
}

/// φ → η̄ψ → ψ_∓ → ψ.
pub fn reconstruct(phi: &ScalarGridField, ctx: &ReductionContext) -> Result<Reconstruction> {
    let eta_phi = reconstruct_eta_component(phi, ctx)?;
    let chiral_part = reconstruct_chiral_part(phi, &eta_phi, ctx)?;
    let psi = reconstruct_full(&chiral_part, ctx)?;
    Ok(Reconstruction {
        eta_phi,
        chiral_part,
        psi,
    })
}

/// Outcome of substituting η′ = ση + τξ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaIndependenceReport {
    pub sigma: Complex64,
    pub tau: Complex64,
    /// max |L′φ − (σ*)²Lφ| / max |(σ*)²Lφ|
    pub operator_scaling_error: f64,
    /// max |ψ′_∓ − ψ_∓| / max |ψ_∓|
    pub reconstruction_error: f64,
    /// max |ψ′ − ψ| / max |ψ| for the full spinor
    pub full_reconstruction_error: f64,
}

impl EtaIndependenceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.operator_scaling_error <= tol
            && self.reconstruction_error <= tol
            && self.full_reconstruction_error <= tol
    }
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Compares operator and reconstruction under η′ = ση + τξ. Norms are
/// interior max-norms, so the operator error is relative to the largest
/// output rather than pointwise.
pub fn eta_independence_check(
    phi: &ScalarGridField,
    ctx: &ReductionContext,
    sigma: Complex64,
    tau: Complex64,
) -> Result<EtaIndependenceReport> {
    let primed = ctx.substitute_eta(sigma, tau)?;
    let scale = sigma.conj() * sigma.conj();
    let l = one_component_residual(phi, ctx)?
        .residual
        .map(|z| z * scale);
    let lp = one_component_residual(phi, &primed)?.residual;
    let r = reconstruct(phi, ctx)?;
    let rp = reconstruct(phi, &primed)?;
    Ok(EtaIndependenceReport {
        sigma,
        tau,
        operator_scaling_error: relative(lp.max_diff(&l)?, l.max_norm()),
        reconstruction_error: relative(
            rp.chiral_part.max_diff(&r.chiral_part)?,
            r.chiral_part.max_norm(),
        ),
        full_reconstruction_error: relative(rp.psi.max_diff(&r.psi)?, r.psi.max_norm()),
    })
}

/// j^μ of the spinor reconstructed from φ. The chain differentiates φ at
/// most three times: twice for η̄ψ and once more for ψ_±. The overall
/// normalization is fixed to 1.
pub fn current_from_component(
    phi: &ScalarGridField,
    ctx: &ReductionContext,
) -> Result<CurrentFields> {
    let r = reconstruct(phi, ctx)?;
    Ok(current(&r.psi, &ctx.rep))
}

/// Largest γ⁵ defect of a reconstructed chiral part, i.e. the max norm of
/// ½(1 + sγ⁵)ψ_∓ with s the basis sign.
pub fn chirality_defect(part: &SpinorGridField, ctx: &ReductionContext) -> f64 {
    let p = ctx.rep.projector(ctx.basis.sign.value());
    part.map(|v: Spinor| p * v).max_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emfield::FieldConfig;
    use crate::gridops::{Boundary, GridField};
    use crate::linalg::{I, ONE, ZERO};

    fn chiral() -> GammaRepresentation {
        GammaRepresentation::builtin("chiral").unwrap()
    }

    fn published(rep: &GammaRepresentation, field: PotentialField) -> ReductionContext {
        let basis = make_chiral_basis(
            rep,
            Chirality::Left,
            Some((
                Spinor::from_real([0.0, 0.0, -1.0, 0.0]),
                Spinor::from_real([0.0, 0.0, 0.0, 1.0]),
            )),
        )
        .unwrap();
        ReductionContext::new(rep.clone(), basis, field).unwrap()
    }

    fn small_grid() -> SpacetimeGrid {
        SpacetimeGrid::new(
            [9, 8, 1, 1],
            [0.05, 2.0 * std::f64::consts::PI / 8.0, 1.0, 1.0],
            [0.0; 4],
            [
                Boundary::Trim,
                Boundary::Periodic,
                Boundary::Periodic,
                Boundary::Periodic,
            ],
        )
        .unwrap()
    }

    #[test]
    fn extract_picks_first_component_in_chiral_basis() {
        let rep = chiral();
        let ctx = published(&rep, PotentialField::zero());
        let g = small_grid();
        let psi = GridField::from_fn(&g, |x| {
            Spinor::new([Complex64::new(x[0], 1.0), ONE, I, ZERO])
        });
        let phi = extract_component(&psi, &ctx);
        for i in 0..g.len() {
            assert_eq!(phi.get(i), psi.get(i).0[0]);
        }
    }

    #[test]
    fn constant_e_coefficients_and_b_prime() {
        let rep = chiral();
        let field = FieldConfig::new("constant-E", &[("e", 0.8)])
            .build()
            .unwrap();
        let ctx = published(&rep, field);
        let c = ctx.coefficient_fields(&small_grid());
        assert!(c.b_prime_defect() < 1e-12);
        assert_eq!(c.coverage(), 1.0);
        // E along x¹ gives F¹ = E and b = −iF¹
        assert!((c.b.get(0) - Complex64::new(0.0, -0.8)).norm() < 1e-14);
    }

    #[test]
    fn pure_h3_is_degenerate() {
        let rep = chiral();
        let field = FieldConfig::new("constant-H", &[("h", 1.0)])
            .build()
            .unwrap();
        let ctx = published(&rep, field);
        let g = small_grid();
        let c = ctx.coefficient_fields(&g);
        assert_eq!(c.coverage(), 0.0);
        let phi = ScalarGridField::from_fn(&g, |x| Complex64::new(x[1].cos(), 0.0));
        assert!(matches!(
            one_component_residual(&phi, &ctx),
            Err(Error::DegenerateField)
        ));
        assert!(matches!(
            reconstruct_eta_component(&phi, &ctx),
            Err(Error::DegenerateField)
        ));
    }

    #[test]
    fn zero_component_reconstructs_zero() {
        let rep = chiral();
        let field = FieldConfig::new("constant-E", &[("e", 0.5), ("gauge", 1.0)])
            .build()
            .unwrap();
        let ctx = published(&rep, field);
        let phi = ScalarGridField::zeros(&small_grid());
        let r = reconstruct(&phi, &ctx).unwrap();
        assert_eq!(r.psi.max_norm(), 0.0);
        assert_eq!(one_component_residual(&phi, &ctx).unwrap().max_norm, 0.0);
        let j = current_from_component(&phi, &ctx).unwrap();
        assert!(j.total.iter().all(|c| c.max_norm() == 0.0));
    }

    #[test]
    fn chiral_part_round_trip_is_exact() {
        let rep = chiral();
        let field = FieldConfig::new("constant-E", &[("e", 0.5), ("gauge", 1.0)])
            .build()
            .unwrap();
        let ctx = published(&rep, field);
        let g = small_grid();
        let phi = ScalarGridField::from_fn(&g, |x| Complex64::new(x[1].sin(), x[0]));
        let eta = ScalarGridField::from_fn(&g, |x| Complex64::new(1.0, x[1].cos()));
        let part = reconstruct_chiral_part(&phi, &eta, &ctx).unwrap();
        assert!(extract_component(&part, &ctx).max_diff(&phi).unwrap() < 1e-12);
        assert!(extract_eta_component(&part, &ctx).max_diff(&eta).unwrap() < 1e-12);
        assert!(chirality_defect(&part, &ctx) < 1e-12);
    }

    #[test]
    fn both_eta_forms_agree() {
        let rep = chiral();
        let field = FieldConfig::new("plane-wave", &[("amplitude", 0.4), ("k", 1.0)])
            .build()
            .unwrap();
        let ctx = published(&rep, field);
        let g = small_grid();
        let phi = ScalarGridField::from_fn(&g, |x| {
            Complex64::new(x[1].cos() * x[0], (2.0 * x[1]).sin())
        });
        let a = reconstruct_eta_component_with(&phi, &ctx, EtaForm::Ratio).unwrap();
        let b = reconstruct_eta_component_with(&phi, &ctx, EtaForm::Bilinear).unwrap();
        assert!(a.max_diff(&b).unwrap() <= 1e-12 * a.max_norm().max(1.0));
    }

    #[test]
    fn residual_forms_agree_and_eta_substitution() {
        let rep = chiral();
        let field = FieldConfig::new("constant-E", &[("e", 0.7), ("gauge", 1.0)])
            .build()
            .unwrap();
        let ctx = published(&rep, field);
        let g = small_grid();
        let phi = ScalarGridField::from_fn(&g, |x| Complex64::new(x[1].cos(), x[0] * x[1].sin()));
        let r = one_component_residual(&phi, &ctx).unwrap();
        assert!(r.form_mismatch < 1e-12, "{}", r.form_mismatch);
        let same = eta_independence_check(&phi, &ctx, ONE, ZERO).unwrap();
        assert_eq!(same.operator_scaling_error, 0.0);
        let twice = eta_independence_check(&phi, &ctx, Complex64::new(2.0, 0.0), ZERO).unwrap();
        assert!(twice.passes(1e-10), "{twice:?}");
        assert!(ctx.substitute_eta(ZERO, ONE).is_err());
    }
}
