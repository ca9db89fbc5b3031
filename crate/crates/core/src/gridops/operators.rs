//! Differential operators on grid fields.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{
    ComplexValue, FieldValue, GridField, RealGridField, ScalarGridField, SpinorGridField,
};
use super::stencil::apply_radius1;
use crate::clifford::{dirac_adjoint, Chirality, GammaRepresentation, Metric};
use crate::emfield::{field_matrix, PotentialField};
use crate::error::{Error, Result};
use crate::linalg::{Mat4, Spinor, I};
use crate::par;
use crate::reduction::ReductionContext;

/// (iγ^μ∂_μ − A_μγ^μ)ψ. The Dirac residual is this minus ψ.
pub fn dirac_apply(
    psi: &SpinorGridField,
    field: &PotentialField,
    rep: &GammaRepresentation,
) -> Result<SpinorGridField> {
    let i_gamma = rep.gamma.map(|g| g.scale(I));
    apply_radius1(psi, |p| {
        let a = field.potential(p.coords());
        let mut out = rep.slash_lower(a) * p.value() * -1.0;
        for (mu, ig) in i_gamma.iter().enumerate() {
            out += ig * p.d1(mu);
        }
        out
    })
}

/// Dirac residual (i∂̸ − A̸)ψ − ψ.
pub fn dirac_residual(
    psi: &SpinorGridField,
    field: &PotentialField,
    rep: &GammaRepresentation,
) -> Result<SpinorGridField> {
    dirac_apply(psi, field, rep)?.zip_with(psi, |d, v| d - v)
}

/// □′u = (∂^μ∂_μ + 2iA^μ∂_μ + iA^μ_{,μ} − A^μA_μ + 1)u, with the potential
/// terms evaluated analytically.
pub fn box_prime_apply<T: ComplexValue>(
    u: &GridField<T>,
    field: &PotentialField,
) -> Result<GridField<T>> {
    apply_radius1(u, |p| {
        let x = p.coords();
        let a_up = Metric::raise(field.potential(x));
        let a_low = field.potential(x);
        let mut out = T::zero();
        for mu in 0..4 {
            out = out + p.d2(mu) * Metric::DIAG[mu];
            if a_up[mu] != 0.0 {
                out = out + p.d1(mu) * Complex64::new(0.0, 2.0 * a_up[mu]);
            }
        }
        let a_sq = Metric::dot_lower(a_low, a_low);
        let zeroth = Complex64::new(1.0 - a_sq, field.divergence(x));
        out + p.value() * zeroth
    })
}

/// Pointwise F(x)φ(x).
pub fn field_matrix_apply(
    phi: &SpinorGridField,
    field: &PotentialField,
    rep: &GammaRepresentation,
) -> SpinorGridField {
    phi.map_with_coords(|x, v| field_matrix(&field.tensor(x), rep) * v)
}

/// ‖(i∂̸ − A̸)²φ − φ + (□′ + F)φ‖ per point (max over components).
///
/// The expression vanishes identically in the continuum for any smooth φ, so
/// on the grid it is pure truncation error.
pub fn squared_identity_residual(
    phi: &SpinorGridField,
    field: &PotentialField,
    rep: &GammaRepresentation,
) -> Result<RealGridField> {
    let twice = dirac_apply(&dirac_apply(phi, field, rep)?, field, rep)?;
    let box_prime = box_prime_apply(phi, field)?;
    let f_phi = field_matrix_apply(phi, field, rep);
    let lhs = twice.zip_with(&box_prime, |a, b| a + b)?;
    let rhs = f_phi.zip_with(phi, |f, v| f - v)?;
    lhs.zip_with(&rhs, |a, b| (a + b).max_abs())
}

/// Fourth-order one-component operator
/// ((□′ − a) b⁻¹ (□′ + a) − a′)φ, masked where |b| is below the singularity
/// floor of the context.
pub fn fourth_order_apply(
    phi: &ScalarGridField,
    ctx: &ReductionContext,
) -> Result<ScalarGridField> {
    let coeffs = ctx.coefficient_fields(phi.grid());
    let field = ctx.field();
    let inner = box_prime_apply(phi, field)?;
    let v = plus_coefficient(&inner, phi, &coeffs.a, 1.0)?;
    let w = divide_masked(&v, &coeffs.b, coeffs.singular())?;
    if w.coverage() == 0.0 {
        return Err(Error::DegenerateField);
    }
    let outer = box_prime_apply(&w, field)?;
    let out = plus_coefficient(&outer, &w, &coeffs.a, -1.0)?;
    let out = plus_coefficient(&out, phi, &coeffs.a_prime, -1.0)?;
    if out.coverage() == 0.0 {
        return Err(Error::DegenerateField);
    }
    Ok(out)
}

/// `base + sign · coeff · u` pointwise.
pub(crate) fn plus_coefficient(
    base: &ScalarGridField,
    u: &ScalarGridField,
    coeff: &ScalarGridField,
    sign: f64,
) -> Result<ScalarGridField> {
    let cu = u.zip_with(coeff, |x, c| x * c * sign)?;
    base.zip_with(&cu, |x, y| x + y)
}

/// `num / den` where `singular` is false; masked elsewhere.
pub(crate) fn divide_masked(
    num: &ScalarGridField,
    den: &ScalarGridField,
    singular: &[bool],
) -> Result<ScalarGridField> {
    let q = num.zip_with(den, |n, d| {
        if d.norm() > 0.0 {
            n / d
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    Ok(q.with_mask(singular.to_vec()).zero_dead())
}

/// j^μ = ψ̄γ^μψ together with its chiral decomposition.
#[derive(Clone, Debug)]
pub struct CurrentFields {
    pub total: [RealGridField; 4],
    /// ψ̄₊γ^μψ₊
    pub right: [RealGridField; 4],
    /// ψ̄₋γ^μψ₋
    pub left: [RealGridField; 4],
    /// Largest |ψ̄₊γ^μψ₋| over the live interior and all μ.
    pub max_cross_term: f64,
    /// Largest |Im ψ̄γ^μψ|; zero up to roundoff.
    pub max_imaginary: f64,
}

fn bilinear(rep: &GammaRepresentation, mu: usize, l: &Spinor, r: &Spinor) -> Complex64 {
    dirac_adjoint(l, rep).apply(&(rep.gamma[mu] * *r))
}

/// Evaluates the current and its chiral split pointwise.
pub fn current(psi: &SpinorGridField, rep: &GammaRepresentation) -> CurrentFields {
    let p_right = rep.projector(Chirality::Right.value());
    let p_left = rep.projector(Chirality::Left.value());
    let component = |mu: usize, which: u8| -> RealGridField {
        psi.map(|v| {
            let (l, r) = match which {
                0 => (v, v),
                1 => (p_right * v, p_right * v),
                _ => (p_left * v, p_left * v),
            };
            bilinear(rep, mu, &l, &r).re
        })
    };
    let total = [0, 1, 2, 3].map(|mu| component(mu, 0));
    let right = [0, 1, 2, 3].map(|mu| component(mu, 1));
    let left = [0, 1, 2, 3].map(|mu| component(mu, 2));
    let cross = psi.map(|v| {
        let (r, l) = (p_right * v, p_left * v);
        (0..4)
            .map(|mu| {
                bilinear(rep, mu, &r, &l)
                    .norm()
                    .max(bilinear(rep, mu, &l, &r).norm())
            })
            .fold(0.0, f64::max)
    });
    let imag = psi.map(|v| {
        (0..4)
            .map(|mu| bilinear(rep, mu, &v, &v).im.abs())
            .fold(0.0, f64::max)
    });
    CurrentFields {
        total,
        right,
        left,
        max_cross_term: cross.max_norm(),
        max_imaginary: imag.max_norm(),
    }
}

/// ∂_μ j^μ by central differences.
pub fn divergence(j: &[RealGridField; 4]) -> Result<RealGridField> {
    let mut acc: Option<RealGridField> = None;
    for (mu, comp) in j.iter().enumerate() {
        let d = apply_radius1(comp, |p| p.d1(mu))?;
        acc = Some(match acc {
            None => d,
            Some(a) => a.zip_with(&d, |x, y| x + y)?,
        });
    }
    Ok(acc.expect("four components"))
}

/// Matrix form of γ⁰γ^k, used by the evolver.
pub fn alpha(rep: &GammaRepresentation, k: usize) -> Mat4 {
    rep.gamma[0] * rep.gamma[k]
}

/// Least-squares convergence order of `(h, norm)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEstimate {
    pub order: f64,
    pub levels: Vec<(f64, f64)>,
    pub warning: Option<String>,
}

/// Slope of log‖r‖ against log h. Needs at least three levels; norms that do
/// not decrease under refinement, or spacings that do not halve, produce a
/// warning alongside the estimate.
pub fn convergence_order(levels: &[(f64, f64)]) -> Result<ConvergenceEstimate> {
    if levels.len() < 3 {
        return Err(Error::TooFewLevels {
            needed: 3,
            got: levels.len(),
        });
    }
    if levels
        .iter()
        .any(|&(h, n)| !(h > 0.0) || !n.is_finite() || n < 0.0)
    {
        return Err(Error::InvalidParameter(
            "convergence levels need positive spacings and finite nonnegative norms".into(),
        ));
    }
    let mut warnings = Vec::new();
    if levels.iter().any(|&(_, n)| n == 0.0) {
        return Ok(ConvergenceEstimate {
            order: f64::NAN,
            levels: levels.to_vec(),
            warning: Some("residual is exactly zero on at least one level".into()),
        });
    }
    let mut sorted = levels.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    if sorted.windows(2).any(|w| !(w[1].1 < w[0].1)) {
        warnings.push("norms are not monotonically decreasing under refinement".to_string());
    }
    if sorted
        .windows(2)
        .any(|w| ((w[0].0 / w[1].0) - 2.0).abs() > 1e-6)
    {
        warnings.push("spacings do not halve between levels".to_string());
    }
    let xs: Vec<f64> = sorted.iter().map(|l| l.0.ln()).collect();
    let ys: Vec<f64> = sorted.iter().map(|l| l.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ConvergenceEstimate {
        order: sxy / sxx,
        levels: sorted,
        warning: if warnings.is_empty() {
            None
        } else {
            Some(warnings.join("; "))
        },
    })
}

/// Axis-aligned physical box `(lo, hi)`.
pub type Region = ([f64; 4], [f64; 4]);

/// Bounding box of the live points of a field.
pub fn live_region<T: FieldValue>(f: &GridField<T>) -> Region {
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for idx in f.interior_indices() {
        if f.is_masked(idx) {
            continue;
        }
        let x = f.grid().coords(idx);
        for a in 0..4 {
            lo[a] = lo[a].min(x[a]);
            hi[a] = hi[a].max(x[a]);
        }
    }
    (lo, hi)
}

pub fn intersect_regions(a: Region, b: Region) -> Region {
    (
        std::array::from_fn(|k| a.0[k].max(b.0[k])),
        std::array::from_fn(|k| a.1[k].min(b.1[k])),
    )
}

/// Max-norm over live points inside `region`.
pub fn max_norm_in<T: FieldValue>(f: &GridField<T>, (lo, hi): Region) -> f64 {
    let eps = 1e-9 * f.grid().max_spacing();
    let interior = f.interior_indices();
    par::max_over(interior.len(), |k| {
        let idx = interior[k];
        let x = f.grid().coords(idx);
        if f.is_masked(idx) || (0..4).any(|a| x[a] < lo[a] - eps || x[a] > hi[a] + eps) {
            0.0
        } else {
            f.get(idx).magnitude()
        }
    })
}

/// Convergence order of per-level fields, each measured on the region where
/// every level is live. With trimmed margins the live region grows under
/// refinement; comparing on a fixed region keeps boundary-adjacent points of
/// the fine levels out of the fit.
pub fn convergence_order_on_common_region<T: FieldValue>(
    fields: &[GridField<T>],
) -> Result<ConvergenceEstimate> {
    let region = fields
        .iter()
        .map(live_region)
        .reduce(intersect_regions)
        .ok_or(Error::TooFewLevels { needed: 3, got: 0 })?;
    let levels: Vec<(f64, f64)> = fields
        .iter()
        .map(|f| (f.grid().max_spacing(), max_norm_in(f, region)))
        .collect();
    convergence_order(&levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emfield::FieldConfig;
    use crate::gridops::grid::{Boundary, SpacetimeGrid};

    fn chiral() -> GammaRepresentation {
        GammaRepresentation::builtin("chiral").unwrap()
    }

    fn time_line(n: usize, dt: f64) -> SpacetimeGrid {
        SpacetimeGrid::new(
            [n, 1, 1, 1],
            [dt, 1.0, 1.0, 1.0],
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
    fn dirac_of_zero_and_constant() {
        let rep = chiral();
        let g = time_line(6, 0.1);
        let zero = SpinorGridField::zeros(&g);
        assert_eq!(
            dirac_apply(&zero, &PotentialField::zero(), &rep)
                .unwrap()
                .max_norm(),
            0.0
        );
        let c = Spinor::from_real([1.0, -2.0, 0.5, 3.0]);
        let f = GridField::from_fn(&g, |_| c);
        let r = dirac_residual(&f, &PotentialField::zero(), &rep).unwrap();
        for i in r.interior_indices() {
            assert!((r.get(i) + c).max_abs() < 1e-15);
        }
    }

    #[test]
    fn box_prime_of_plane_waves() {
        let zero = PotentialField::zero();
        // p = 0: □′u = u
        let g = time_line(8, 0.1);
        let u = GridField::from_fn(&g, |_| Complex64::new(1.0, 2.0));
        let b = box_prime_apply(&u, &zero).unwrap();
        assert!(b.max_diff(&u.with_margin(b.margin())).unwrap() < 1e-14);
        // on shell p² = 1: □′u → 0 at second order in h
        let res = |n: usize| {
            let dt = 1.0 / n as f64;
            let g = time_line(n + 1, dt);
            let u = GridField::from_fn(&g, |x| Complex64::new(0.0, -x[0]).exp());
            box_prime_apply(&u, &zero).unwrap().max_norm()
        };
        let order = (res(32) / res(64)).log2();
        assert!((order - 2.0).abs() < 0.05, "{order}");
    }

    #[test]
    fn box_prime_matches_symbolic_expansion_for_polynomials() {
        // u = x⁰x¹ + (x²)² with constant-E potential A₀ = −e x¹:
        // ∂^μ∂_μ u = −2, 2iA^0∂_0 u = 2i(−e x¹)(x¹), divergence 0, A² = e²(x¹)².
        let e = 0.7;
        let field = FieldConfig::new("constant-E", &[("e", e)]).build().unwrap();
        let g = SpacetimeGrid::new(
            [5, 6, 5, 1],
            [0.1, 0.2, 0.15, 1.0],
            [0.3, -0.4, 0.2, 0.0],
            [Boundary::Trim; 4],
        )
        .unwrap();
        let u = GridField::from_fn(&g, |x| Complex64::new(x[0] * x[1] + x[2] * x[2], 0.0));
        let b = box_prime_apply(&u, &field).unwrap();
        for i in b.interior_indices() {
            let x = g.coords(i);
            let uu = x[0] * x[1] + x[2] * x[2];
            let expect =
                Complex64::new(-2.0 - e * e * x[1] * x[1] * uu + uu, -2.0 * e * x[1] * x[1]);
            assert!(
                (b.get(i) - expect).norm() < 1e-11,
                "{:?}",
                b.get(i) - expect
            );
        }
    }

    #[test]
    fn squared_identity_is_exact_for_constants() {
        let rep = chiral();
        let g = time_line(7, 0.1);
        let c = Spinor::from_real([0.3, 1.0, -1.0, 2.0]);
        let f = GridField::from_fn(&g, |_| c);
        let r = squared_identity_residual(&f, &PotentialField::zero(), &rep).unwrap();
        assert!(r.max_norm() < 1e-14);
    }

    #[test]
    fn current_of_zero_is_zero() {
        let g = time_line(4, 0.1);
        let j = current(&SpinorGridField::zeros(&g), &chiral());
        for c in &j.total {
            assert_eq!(c.max_norm(), 0.0);
        }
        assert_eq!(j.max_cross_term, 0.0);
    }

    #[test]
    fn convergence_order_examples() {
        let synthetic: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| (h, 3.0 * h * h))
            .collect();
        let est = convergence_order(&synthetic).unwrap();
        assert!((est.order - 2.0).abs() < 1e-12);
        assert!(est.warning.is_none());
        let flat = convergence_order(&[(0.1, 1.0), (0.05, 1.0), (0.025, 1.0)]).unwrap();
        assert!(flat.order.abs() < 1e-12);
        assert!(flat.warning.is_some());
        assert!(convergence_order(&synthetic[..2]).is_err());
    }
}
