//! Crank–Nicolson reference solutions of the Dirac equation in 1+1 dimensions.
//!
//! The grid has a trim time axis 0 and one periodic spatial axis k; the other
//! axes have extent 1. Writing α^j = γ⁰γ^j, the evolution is i∂₀ψ = Hψ with
//!
//! ```text
//! H = −iα^k∂_k + Σ_j A_j α^j + γ⁰ + A₀
//! ```
//!
//! (A covariant), discretized with a central difference in x^k. Each step
//! solves the periodic block-tridiagonal system
//! (I + i·dt/2·H_{n+½})ψ_{n+1} = (I − i·dt/2·H_{n+½})ψ_n.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::GammaRepresentation;
use crate::emfield::PotentialField;
use crate::error::{Error, Result};
use crate::gridops::{
    convergence_order_on_common_region, dirac_residual, Boundary, ConvergenceEstimate,
    SpacetimeGrid, SpinorGridField,
};
use crate::linalg::{Lu4, Mat4, Spinor, I};
use crate::par;

/// Relative per-step drift of Σ|ψ|²·dx beyond which a run is flagged.
pub const NORM_TOL: f64 = 1e-10;

/// A validated 1+1-dimensional initial-value problem.
#[derive(Clone, Debug)]
pub struct EvolutionProblem {
    rep: GammaRepresentation,
    field: PotentialField,
    grid: SpacetimeGrid,
    axis: usize,
    initial: Vec<Spinor>,
}

impl EvolutionProblem {
    pub fn new(
        rep: GammaRepresentation,
        field: PotentialField,
        grid: SpacetimeGrid,
        initial: Vec<Spinor>,
    ) -> Result<Self> {
        let axis = spatial_axis(&grid)?;
        if initial.len() != grid.extents[axis] {
            return Err(Error::InvalidProblem(format!(
                "{} initial samples for {} spatial points",
                initial.len(),
                grid.extents[axis]
            )));
        }
        if initial.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidProblem("initial data is not finite".into()));
        }
        if grid.spacings[0] > grid.spacings[axis] * (1.0 + 1e-12) {
            return Err(Error::InvalidProblem(format!(
                "dt = {} exceeds dx = {}",
                grid.spacings[0], grid.spacings[axis]
            )));
        }
        check_field(&field, &grid, axis)?;
        Ok(EvolutionProblem {
            rep,
            field,
            grid,
            axis,
            initial,
        })
    }

    /// Samples `data` at t = origin and builds the problem.
    pub fn from_data(
        rep: GammaRepresentation,
        field: PotentialField,
        grid: SpacetimeGrid,
        data: &InitialData,
    ) -> Result<Self> {
        let axis = spatial_axis(&grid)?;
        let initial = data.sample(&rep, &grid, axis)?;
        Self::new(rep, field, grid, initial)
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn steps(&self) -> usize {
        self.grid.extents[0] - 1
    }

    pub fn field(&self) -> &PotentialField {
        &self.field
    }

    pub fn rep(&self) -> &GammaRepresentation {
        &self.rep
    }
}

fn spatial_axis(grid: &SpacetimeGrid) -> Result<usize> {
    if grid.boundary[0] != Boundary::Trim || grid.extents[0] < 2 {
        return Err(Error::InvalidProblem(
            "axis 0 must be a trim time axis with at least two points".into(),
        ));
    }
    let active: Vec<usize> = (1..4).filter(|&a| grid.is_active(a)).collect();
    match active.as_slice() {
        [k] if grid.boundary[*k] == Boundary::Periodic && grid.extents[*k] >= 3 => Ok(*k),
        [k] => Err(Error::InvalidProblem(format!(
            "spatial axis {k} must be periodic with at least three points"
        ))),
        _ => Err(Error::InvalidProblem(format!(
            "exactly one spatial axis must be active, found {active:?}"
        ))),
    }
}

/// Checks, by sampling, that A does not depend on the inactive axes and is
/// periodic along the spatial axis.
fn check_field(field: &PotentialField, grid: &SpacetimeGrid, axis: usize) -> Result<()> {
    let n_t = grid.extents[0];
    let n_x = grid.extents[axis];
    let length = grid.spacings[axis] * n_x as f64;
    let scale = |v: [f64; 4]| v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for it in [0, n_t / 2, n_t - 1] {
        for ix in [0, n_x / 3, (2 * n_x) / 3] {
            let mut m = [0; 4];
            m[0] = it;
            m[axis] = ix;
            let x = grid.coords_of(m);
            let grad = field.gradient(x);
            for nu in (1..4).filter(|&a| a != axis) {
                if (0..4).any(|mu| grad[mu][nu].abs() > 1e-12 * scale(field.potential(x))) {
                    return Err(Error::InvalidProblem(format!(
                        "potential `{}` depends on inactive axis {nu}",
                        field.name()
                    )));
                }
            }
            let a0 = field.potential(x);
            let mut shifted = x;
            shifted[axis] += length;
            let a1 = field.potential(shifted);
            let tol = 1e-9 * scale(a0).max(scale(a1));
            if (0..4).any(|mu| (a0[mu] - a1[mu]).abs() > tol) {
                return Err(Error::InvalidProblem(format!(
                    "potential `{}` is not periodic along axis {axis}",
                    field.name()
                )));
            }
        }
    }
    Ok(())
}

/// An evolved block with its norm history.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub block: SpinorGridField,
    /// Σ|ψ|²·dx after each step, starting with the initial slice.
    pub norms: Vec<f64>,
    /// Largest relative change of the norm over a single step.
    pub max_step_drift: f64,
}

/// Runs the problem and returns the full spacetime block.
pub fn evolve(problem: &EvolutionProblem) -> Result<SpinorGridField> {
    Ok(evolve_with_report(problem)?.block)
}

pub fn evolve_with_report(problem: &EvolutionProblem) -> Result<Evolution> {
    let g = &problem.grid;
    let k = problem.axis;
    let n = g.extents[k];
    let dt = g.spacings[0];
    let dx = g.spacings[k];
    let alpha: [Mat4; 4] = std::array::from_fn(|j| problem.rep.gamma[0] * problem.rep.gamma[j]);
    let c = dt / (4.0 * dx);
    let coupling = alpha[k] * c;

    let mut values = vec![Spinor::zero(); g.len()];
    let slice_index = |step: usize, i: usize| {
        let mut m = [0; 4];
        m[0] = step;
        m[k] = i;
        g.index(m)
    };
    for (i, s) in problem.initial.iter().enumerate() {
        values[slice_index(0, i)] = *s;
    }
    let norm = |psi: &[Spinor]| psi.iter().map(Spinor::norm_sqr).sum::<f64>() * dx;
    let mut psi = problem.initial.clone();
    let mut norms = vec![norm(&psi)];
    let mut max_step_drift: f64 = 0.0;

    for step in 0..problem.steps() {
        let half: Vec<Mat4> = par::map_indices(n, |i| {
            let mut m = [0; 4];
            m[0] = step;
            m[k] = i;
            let mut x = g.coords_of(m);
            x[0] += 0.5 * dt;
            let a = problem.field.potential(x);
            let mut h = problem.rep.gamma[0] + Mat4::identity() * a[0];
            for (j, al) in alpha.iter().enumerate().skip(1) {
                if a[j] != 0.0 {
                    h += *al * a[j];
                }
            }
            h * Complex64::new(0.0, 0.5 * dt)
        });
        let rhs: Vec<Spinor> = par::map_indices(n, |i| {
            let next = psi[(i + 1) % n];
            let prev = psi[(i + n - 1) % n];
            psi[i] - half[i] * psi[i] - coupling * (next - prev)
        });
        let diag: Vec<Mat4> = half.iter().map(|h| Mat4::identity() + *h).collect();
        psi = solve_periodic(&diag, &coupling, &rhs).ok_or(Error::SingularStep { step })?;
        let nn = norm(&psi);
        let prev = *norms.last().expect("initial norm");
        if prev > 0.0 {
            max_step_drift = max_step_drift.max((nn - prev).abs() / prev);
        }
        norms.push(nn);
        for (i, s) in psi.iter().enumerate() {
            values[slice_index(step + 1, i)] = *s;
        }
    }
    let block = SpinorGridField::from_values(g.clone(), values)?;
    Ok(Evolution {
        block,
        norms,
        max_step_drift,
    })
}

/// Solves D_i x_i + U x_{i+1} − U x_{i−1} = r_i with cyclic indices.
///
/// The last unknown is eliminated by bordering: block Thomas on the first
/// n − 1 rows for the right-hand side and the four coupling columns, then a
/// 4×4 solve for x_{n−1}.
fn solve_periodic(diag: &[Mat4], upper: &Mat4, rhs: &[Spinor]) -> Option<Vec<Spinor>> {
    let n = diag.len();
    let m = n - 1;
    let lower = -*upper;
    // forward sweep on rows 0..m with unknowns x_0..x_{m-1}
    let mut c_prime: Vec<Mat4> = Vec::with_capacity(m);
    let mut d_r: Vec<Spinor> = Vec::with_capacity(m);
    let mut d_b: Vec<Mat4> = Vec::with_capacity(m);
    for i in 0..m {
        // coupling of row i to x_{n−1}
        let border = if i == 0 && m == 1 {
            lower + *upper
        } else if i == 0 {
            lower
        } else if i == m - 1 {
            *upper
        } else {
            Mat4::zero()
        };
        let (pivot, r, b) = if i == 0 {
            (diag[0], rhs[0], border)
        } else {
            (
                diag[i] - lower * c_prime[i - 1],
                rhs[i] - lower * d_r[i - 1],
                border - lower * d_b[i - 1],
            )
        };
        let lu = Lu4::new(&pivot)?;
        c_prime.push(lu.solve_mat(upper));
        d_r.push(lu.solve(r));
        d_b.push(lu.solve_mat(&b));
    }
    // back substitution: x_i = y_i − Z_i x_{n−1}
    let mut y = vec![Spinor::zero(); m];
    let mut z = vec![Mat4::zero(); m];
    y[m - 1] = d_r[m - 1];
    z[m - 1] = d_b[m - 1];
    for i in (0..m - 1).rev() {
        y[i] = d_r[i] - c_prime[i] * y[i + 1];
        z[i] = d_b[i] - c_prime[i] * z[i + 1];
    }
    let (first, prev) = (0, m - 1);
    let schur = diag[n - 1] - lower * z[prev] - *upper * z[first];
    let last_rhs = rhs[n - 1] - lower * y[prev] - *upper * y[first];
    let last = Lu4::new(&schur)?.solve(last_rhs);
    let mut out: Vec<Spinor> = (0..m).map(|i| y[i] - z[i] * last).collect();
    out.push(last);
    Some(out)
}

/// Initial data catalog. Wave numbers are integers so that every entry is
/// periodic on the spatial box; p = 2πm/L.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// Constant spinor (p = 0).
    RestFrame { spinor: Spinor },
    /// Positive-energy free plane wave e^{ipx}(E + H_p)w/(2E).
    BoostedPlaneWave { mode: i32, weights: Spinor },
    /// Smooth periodic packet exp((cos(2π(x − c)/L) − 1)/w²) e^{ipx} w.
    GaussianPacket {
        center: f64,
        width: f64,
        mode: i32,
        weights: Spinor,
    },
    /// Σ_m e^{ip_m x} w_m.
    FourierMix { modes: Vec<(i32, Spinor)> },
}

impl InitialData {
    pub fn sample(
        &self,
        rep: &GammaRepresentation,
        grid: &SpacetimeGrid,
        axis: usize,
    ) -> Result<Vec<Spinor>> {
        let n = grid.extents[axis];
        let length = grid.spacings[axis] * n as f64;
        let wave = |m: i32| 2.0 * std::f64::consts::PI * m as f64 / length;
        let xs: Vec<f64> = (0..n)
            .map(|i| grid.origin[axis] + i as f64 * grid.spacings[axis])
            .collect();
        let out = match self {
            InitialData::RestFrame { spinor } => vec![*spinor; n],
            InitialData::BoostedPlaneWave { mode, weights } => {
                let p = wave(*mode);
                let u = positive_energy(rep, axis, p, weights);
                xs.iter()
                    .map(|&x| u * Complex64::new(0.0, p * x).exp())
                    .collect()
            }
            InitialData::GaussianPacket {
                center,
                width,
                mode,
                weights,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidParameter(
                        "packet width must be positive".into(),
                    ));
                }
                let p = wave(*mode);
                xs.iter()
                    .map(|&x| {
                        let theta = 2.0 * std::f64::consts::PI * (x - center) / length;
                        let env = ((theta.cos() - 1.0) / (width * width)).exp();
                        *weights * (Complex64::new(0.0, p * x).exp() * env)
                    })
                    .collect()
            }
            InitialData::FourierMix { modes } => xs
                .iter()
                .map(|&x| {
                    modes.iter().fold(Spinor::zero(), |acc, (m, w)| {
                        acc + *w * Complex64::new(0.0, wave(*m) * x).exp()
                    })
                })
                .collect(),
        };
        Ok(out)
    }
}

/// Free Hamiltonian α^k p + γ⁰ for momentum p along `axis`.
pub fn free_hamiltonian(rep: &GammaRepresentation, axis: usize, p: f64) -> Mat4 {
    rep.gamma[0] * rep.gamma[axis] * p + rep.gamma[0]
}

fn positive_energy(rep: &GammaRepresentation, axis: usize, p: f64, w: &Spinor) -> Spinor {
    let e = (1.0 + p * p).sqrt();
    (free_hamiltonian(rep, axis, p) + Mat4::identity() * e) * *w * (0.5 / e)
}

/// Exact free solution Σ_m e^{ip_m x} e^{−iH_{p_m}t} w_m for Fourier-mix
/// data on a box of length `length`.
pub fn free_solution(
    rep: &GammaRepresentation,
    axis: usize,
    length: f64,
    modes: &[(i32, Spinor)],
    t: f64,
    x: f64,
) -> Spinor {
    modes.iter().fold(Spinor::zero(), |acc, (m, w)| {
        let p = 2.0 * std::f64::consts::PI * *m as f64 / length;
        let prop = (free_hamiltonian(rep, axis, p) * Complex64::new(0.0, -t)).expm();
        acc + prop * *w * Complex64::new(0.0, p * x).exp()
    })
}

/// Dirac residuals of evolved blocks at several refinement levels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiracResidualReport {
    /// Interior max residual of the finest level.
    pub max_residual: f64,
    pub estimate: ConvergenceEstimate,
}

/// Max-norm of (i∂̸ − A̸)ψ − ψ per level, on the region live at every level,
/// and the fitted order.
pub fn dirac_residual_report(
    blocks: &[SpinorGridField],
    field: &PotentialField,
    rep: &GammaRepresentation,
) -> Result<DiracResidualReport> {
    let residuals = blocks
        .iter()
        .map(|b| dirac_residual(b, field, rep))
        .collect::<Result<Vec<_>>>()?;
    let estimate = convergence_order_on_common_region(&residuals)?;
    let max_residual = estimate.levels.last().map(|l| l.1).unwrap_or(0.0);
    Ok(DiracResidualReport {
        max_residual,
        estimate,
    })
}

/// e^{−it}: the phase of a rest-frame γ⁰ = +1 eigenstate.
pub fn rest_phase(t: f64) -> Complex64 {
    (-I * t).exp()
}
