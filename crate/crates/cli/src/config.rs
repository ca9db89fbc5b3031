//! Experiment configuration: a JSON document with every key optional.

use std::path::{Path, PathBuf};

use dirac_reduce::clifford::{make_chiral_basis, ChiralBasis, Chirality, GammaRepresentation};
use dirac_reduce::emfield::FieldConfig;
use dirac_reduce::evolver::InitialData;
use dirac_reduce::gridops::{Boundary, SpacetimeGrid};
use dirac_reduce::Spinor;
use serde::{Deserialize, Serialize};

use crate::report::Format;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_representation")]
    pub representation: String,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default = "default_field")]
    pub field: FieldConfig,
    #[serde(default)]
    pub grid: GridSpec,
    /// Initial data; a seeded random Fourier mix when absent.
    #[serde(default)]
    pub initial: Option<InitialData>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default)]
    pub seed: u64,
    /// Number of random (σ, τ) pairs in the η-substitution sweep.
    #[serde(default = "default_eta_sweep")]
    pub eta_sweep: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_representation() -> String {
    "chiral".into()
}

fn default_field() -> FieldConfig {
    FieldConfig::new("constant-E", &[("e", 0.6), ("gauge", 1.0)])
}

fn default_levels() -> usize {
    3
}

fn default_eta_sweep() -> usize {
    20
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            representation: default_representation(),
            basis: BasisSpec::default(),
            field: default_field(),
            grid: GridSpec::default(),
            initial: None,
            levels: default_levels(),
            seed: 0,
            eta_sweep: default_eta_sweep(),
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn representation(&self) -> dirac_reduce::Result<GammaRepresentation> {
        GammaRepresentation::builtin(&self.representation)
    }

    pub fn chiral_basis(&self, rep: &GammaRepresentation) -> dirac_reduce::Result<ChiralBasis> {
        match &self.basis {
            BasisSpec::Default { sign } => {
                make_chiral_basis(rep, Chirality::from_sign(*sign)?, None)
            }
            BasisSpec::Explicit { sign, xi, eta } => {
                make_chiral_basis(rep, Chirality::from_sign(*sign)?, Some((*xi, *eta)))
            }
        }
    }
}

/// How the chiral basis (ξ, η) is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BasisSpec {
    Default { sign: i32 },
    Explicit { sign: i32, xi: Spinor, eta: Spinor },
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec::Default { sign: -1 }
    }
}

/// Coarsest 1+1 grid; finer levels halve both spacings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    /// dt / dx
    #[serde(default = "default_courant")]
    pub courant: f64,
    /// Spatial axis, 1 to 3.
    #[serde(default = "default_axis")]
    pub axis: usize,
}

fn default_nx() -> usize {
    32
}

fn default_steps() -> usize {
    10
}

fn default_length() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_courant() -> f64 {
    0.5
}

fn default_axis() -> usize {
    1
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nx: default_nx(),
            steps: default_steps(),
            length: default_length(),
            courant: default_courant(),
            axis: default_axis(),
        }
    }
}

impl GridSpec {
    pub fn coarse_grid(&self) -> dirac_reduce::Result<SpacetimeGrid> {
        if !(1..=3).contains(&self.axis) {
            return Err(dirac_reduce::Error::InvalidGrid(format!(
                "spatial axis {} not in 1..=3",
                self.axis
            )));
        }
        if self.nx == 0 {
            return Err(dirac_reduce::Error::InvalidGrid(
                "nx must be positive".into(),
            ));
        }
        let dx = self.length / self.nx as f64;
        let mut extents = [1; 4];
        let mut spacings = [1.0; 4];
        extents[0] = self.steps + 1;
        spacings[0] = self.courant * dx;
        extents[self.axis] = self.nx;
        spacings[self.axis] = dx;
        let mut boundary = [Boundary::Periodic; 4];
        boundary[0] = Boundary::Trim;
        SpacetimeGrid::new(extents, spacings, [0.0; 4], boundary)
    }

    /// The coarse grid followed by `levels − 1` refinements.
    pub fn levels(&self, levels: usize) -> dirac_reduce::Result<Vec<SpacetimeGrid>> {
        let mut g = self.coarse_grid()?;
        let mut out = Vec::with_capacity(levels);
        for _ in 0..levels {
            let next = g.refined();
            out.push(g);
            g = next;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_order_min")]
    pub order_min: f64,
    #[serde(default = "default_order_max")]
    pub order_max: f64,
    #[serde(default = "default_coverage")]
    pub coverage_min: f64,
    #[serde(default = "default_eta_rel")]
    pub eta_relative: f64,
    #[serde(default = "default_form_rel")]
    pub form_relative: f64,
    #[serde(default = "default_exact")]
    pub exact: f64,
    #[serde(default = "default_norm_drift")]
    pub norm_drift: f64,
    /// Largest order a negative control may show.
    #[serde(default = "default_negative_order")]
    pub negative_order_max: f64,
}

fn default_order_min() -> f64 {
    1.8
}

fn default_order_max() -> f64 {
    2.2
}

fn default_coverage() -> f64 {
    0.9
}

fn default_eta_rel() -> f64 {
    1e-10
}

fn default_form_rel() -> f64 {
    1e-12
}

fn default_exact() -> f64 {
    1e-12
}

fn default_norm_drift() -> f64 {
    1e-10
}

fn default_negative_order() -> f64 {
    0.5
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            order_min: default_order_min(),
            order_max: default_order_max(),
            coverage_min: default_coverage(),
            eta_relative: default_eta_rel(),
            form_relative: default_form_rel(),
            exact: default_exact(),
            norm_drift: default_norm_drift(),
            negative_order_max: default_negative_order(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
