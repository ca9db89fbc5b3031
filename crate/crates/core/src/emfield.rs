//! Analytic electromagnetic potentials with exact first derivatives.
//!
//! Potentials are stored covariantly, A_μ, with the charge absorbed. The
//! field tensor follows F^{μν} = ∂^μA^ν − ∂^νA^μ, so that F^{0i} = −E^i,
//! F^{12} = −H³, F^{13} = H², F^{23} = −H¹.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clifford::{GammaRepresentation, Metric};
use crate::error::{Error, Result};
use crate::linalg::Mat4;

pub const CATALOG: [&str; 6] = [
    "zero",
    "constant-E",
    "constant-H",
    "crossed-constant",
    "plane-wave",
    "polynomial-test",
];

/// Serialized form of a catalog entry.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl FieldConfig {
    pub fn new(name: &str, params: &[(&str, f64)]) -> Self {
        FieldConfig {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn build(&self) -> Result<PotentialField> {
        catalog(&self.name, &self.params)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Zero,
    ConstantE {
        e: f64,
        axis: usize,
        temporal_gauge: bool,
    },
    ConstantH {
        h: f64,
        axis: usize,
    },
    /// A_μ = −½ F_{μν} x^ν
    Crossed {
        f_lower: [[f64; 4]; 4],
    },
    PlaneWave {
        amplitude: f64,
        k: f64,
        circular: bool,
        phase: f64,
    },
    /// A_μ = c_μ + l_{μν} x^ν + q_{μν} (x^ν)²
    Polynomial {
        c: [f64; 4],
        l: [[f64; 4]; 4],
        q: [[f64; 4]; 4],
    },
}

/// A named potential A_μ(x) with its exact gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    name: String,
    params: BTreeMap<String, f64>,
    kind: Kind,
}

struct Params<'a> {
    field: &'a str,
    given: &'a BTreeMap<String, f64>,
    allowed: Vec<String>,
}

impl<'a> Params<'a> {
    fn new(field: &'a str, given: &'a BTreeMap<String, f64>) -> Self {
        Params {
            field,
            given,
            allowed: Vec::new(),
        }
    }

    fn err(&self, reason: String) -> Error {
        Error::InvalidFieldParams {
            field: self.field.to_string(),
            reason,
        }
    }

    fn get(&mut self, key: &str) -> Option<f64> {
        self.allowed.push(key.to_string());
        self.given.get(key).copied()
    }

    fn required(&mut self, key: &str) -> Result<f64> {
        let v = self
            .get(key)
            .ok_or_else(|| self.err(format!("missing parameter `{key}`")))?;
        if !v.is_finite() {
            return Err(self.err(format!("parameter `{key}` is not finite")));
        }
        Ok(v)
    }

    fn or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(v) if !v.is_finite() => Err(self.err(format!("parameter `{key}` is not finite"))),
            Some(v) => Ok(v),
            None => Ok(default),
        }
    }

    fn axis(&mut self, default: usize) -> Result<usize> {
        let a = self.or("axis", default as f64)?;
        if a.fract() != 0.0 || !(1.0..=3.0).contains(&a) {
            return Err(self.err(format!("axis must be 1, 2 or 3, got {a}")));
        }
        Ok(a as usize)
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.or(key, if default { 1.0 } else { 0.0 })? {
            0.0 => Ok(false),
            1.0 => Ok(true),
            x => Err(self.err(format!("`{key}` must be 0 or 1, got {x}"))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.given.keys().find(|k| !self.allowed.contains(k)) {
            return Err(self.err(format!(
                "unknown parameter `{k}` (accepted: {})",
                self.allowed.join(", ")
            )));
        }
        Ok(())
    }
}

/// Builds a catalog field by name.
///
/// | name | parameters |
/// |---|---|
/// | `zero` | none |
/// | `constant-E` | `e`, `axis` (1), `gauge` (0: A₀ = −E·x^i, 1: A_i = E·x⁰) |
/// | `constant-H` | `h`, `axis` (3); A_l = −H·x^k for cyclic (axis, k, l) |
/// | `crossed-constant` | `ex`, `ey`, `ez`, `hx`, `hy`, `hz` (0) |
/// | `plane-wave` | `amplitude`, `k`, `circular` (1), `phase` (0); travels along +x¹ |
/// | `polynomial-test` | `c{μ}`, `l{μ}{ν}` (l00 = 1, others 0), `q{μ}{ν}` (0) |
pub fn catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<PotentialField> {
    let mut p = Params::new(name, params);
    let kind = match name {
        "zero" => Kind::Zero,
        "constant-E" => {
            let e = p.required("e")?;
            let axis = p.axis(1)?;
            let temporal_gauge = p.flag("gauge", false)?;
            Kind::ConstantE {
                e,
                axis,
                temporal_gauge,
            }
        }
        "constant-H" => {
            let h = p.required("h")?;
            let axis = p.axis(3)?;
            Kind::ConstantH { h, axis }
        }
        "crossed-constant" => {
            let e = [p.or("ex", 0.0)?, p.or("ey", 0.0)?, p.or("ez", 0.0)?];
            let h = [p.or("hx", 0.0)?, p.or("hy", 0.0)?, p.or("hz", 0.0)?];
            Kind::Crossed {
                f_lower: FieldTensor::from_e_h(e, h).lower(),
            }
        }
        "plane-wave" => Kind::PlaneWave {
            amplitude: p.required("amplitude")?,
            k: p.required("k")?,
            circular: p.flag("circular", true)?,
            phase: p.or("phase", 0.0)?,
        },
        "polynomial-test" => {
            let mut c = [0.0; 4];
            let mut l = [[0.0; 4]; 4];
            let mut q = [[0.0; 4]; 4];
            for mu in 0..4 {
                c[mu] = p.or(&format!("c{mu}"), 0.0)?;
                for nu in 0..4 {
                    let default = if mu == 0 && nu == 0 { 1.0 } else { 0.0 };
                    l[mu][nu] = p.or(&format!("l{mu}{nu}"), default)?;
                    q[mu][nu] = p.or(&format!("q{mu}{nu}"), 0.0)?;
                }
            }
            Kind::Polynomial { c, l, q }
        }
        other => {
            return Err(Error::UnknownField {
                name: other.to_string(),
                known: CATALOG.join(", "),
            })
        }
    };
    p.finish()?;
    Ok(PotentialField {
        name: name.to_string(),
        params: params.clone(),
        kind,
    })
}

/// (k, l) such that (axis, k, l) is a cyclic permutation of (1, 2, 3).
fn cyclic(axis: usize) -> (usize, usize) {
    match axis {
        1 => (2, 3),
        2 => (3, 1),
        _ => (1, 2),
    }
}

impl PotentialField {
    pub fn zero() -> Self {
        catalog("zero", &BTreeMap::new()).expect("zero field")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn config(&self) -> FieldConfig {
        FieldConfig {
            name: self.name.clone(),
            params: self.params.clone(),
        }
    }

    /// Covariant components A_μ at `x`.
    pub fn potential(&self, x: [f64; 4]) -> [f64; 4] {
        let mut a = [0.0; 4];
        match &self.kind {
            Kind::Zero => {}
            Kind::ConstantE {
                e,
                axis,
                temporal_gauge,
            } => {
                if *temporal_gauge {
                    a[*axis] = e * x[0];
                } else {
                    a[0] = -e * x[*axis];
                }
            }
            Kind::ConstantH { h, axis } => {
                let (k, l) = cyclic(*axis);
                a[l] = -h * x[k];
            }
            Kind::Crossed { f_lower } => {
                for mu in 0..4 {
                    a[mu] = -0.5 * (0..4).map(|nu| f_lower[mu][nu] * x[nu]).sum::<f64>();
                }
            }
            Kind::PlaneWave {
                amplitude,
                k,
                circular,
                phase,
            } => {
                let theta = k * (x[0] - x[1]) + phase;
                a[2] = amplitude * theta.cos();
                if *circular {
                    a[3] = amplitude * theta.sin();
                }
            }
            Kind::Polynomial { c, l, q } => {
                for mu in 0..4 {
                    a[mu] = c[mu]
                        + (0..4)
                            .map(|nu| l[mu][nu] * x[nu] + q[mu][nu] * x[nu] * x[nu])
                            .sum::<f64>();
                }
            }
        }
        a
    }

    /// Exact partials: `d[μ][ν] = ∂_ν A_μ`.
    pub fn gradient(&self, x: [f64; 4]) -> [[f64; 4]; 4] {
        let mut d = [[0.0; 4]; 4];
        match &self.kind {
            Kind::Zero => {}
            Kind::ConstantE {
                e,
                axis,
                temporal_gauge,
            } => {
                if *temporal_gauge {
                    d[*axis][0] = *e;
                } else {
                    d[0][*axis] = -e;
                }
            }
            Kind::ConstantH { h, axis } => {
                let (k, l) = cyclic(*axis);
                d[l][k] = -h;
            }
            Kind::Crossed { f_lower } => {
                for mu in 0..4 {
                    for nu in 0..4 {
                        d[mu][nu] = -0.5 * f_lower[mu][nu];
                    }
                }
            }
            Kind::PlaneWave {
                amplitude,
                k,
                circular,
                phase,
            } => {
                let theta = k * (x[0] - x[1]) + phase;
                let (s, c) = theta.sin_cos();
                d[2][0] = -amplitude * k * s;
                d[2][1] = amplitude * k * s;
                if *circular {
                    d[3][0] = amplitude * k * c;
                    d[3][1] = -amplitude * k * c;
                }
            }
            Kind::Polynomial { l, q, .. } => {
                for mu in 0..4 {
                    for nu in 0..4 {
                        d[mu][nu] = l[mu][nu] + 2.0 * q[mu][nu] * x[nu];
                    }
                }
            }
        }
        d
    }

    /// A^μ_{,μ}.
    pub fn divergence(&self, x: [f64; 4]) -> f64 {
        let d = self.gradient(x);
        (0..4).map(|mu| Metric::DIAG[mu] * d[mu][mu]).sum()
    }

    /// A^μ A_μ.
    pub fn square(&self, x: [f64; 4]) -> f64 {
        let a = self.potential(x);
        Metric::dot_lower(a, a)
    }

    pub fn tensor(&self, x: [f64; 4]) -> FieldTensor {
        field_tensor(self, x)
    }

    /// Human-readable potential, field strengths and gauge notes.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "field: {}", self.name);
        if !self.params.is_empty() {
            let kv: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            let _ = writeln!(s, "params: {}", kv.join(", "));
        }
        let text = match &self.kind {
            Kind::Zero => "A_mu = 0\nE = 0, H = 0\ngauge: trivial".to_string(),
            Kind::ConstantE {
                axis,
                temporal_gauge,
                ..
            } => {
                if *temporal_gauge {
                    format!(
                        "A_{axis} = e * x0, other components 0\nE^{axis} = e, H = 0\n\
                         gauge: temporal (A_0 = 0); spatially uniform, compatible with periodic axes"
                    )
                } else {
                    format!(
                        "A_0 = -e * x{axis}, other components 0\nE^{axis} = e, H = 0\n\
                         gauge: static scalar potential; divergence-free"
                    )
                }
            }
            Kind::ConstantH { axis, .. } => {
                let (k, l) = cyclic(*axis);
                format!("A_{l} = -h * x{k}, other components 0\nH^{axis} = h, E = 0\ngauge: Landau; divergence-free")
            }
            Kind::Crossed { .. } => {
                "A_mu = -1/2 F_mu_nu x^nu\nE = (ex, ey, ez), H = (hx, hy, hz)\n\
                 gauge: symmetric; divergence-free"
                    .to_string()
            }
            Kind::PlaneWave { circular, .. } => {
                let mut t = "theta = k (x0 - x1) + phase\nA_2 = amplitude * cos(theta)".to_string();
                if *circular {
                    t.push_str("\nA_3 = amplitude * sin(theta)");
                }
                t.push_str("\nE^2 = -amplitude k sin(theta), H^3 = -amplitude k sin(theta)");
                if *circular {
                    t.push_str("\nE^3 = amplitude k cos(theta), H^2 = -amplitude k cos(theta)");
                }
                t.push_str("\ngauge: Lorenz (A^mu_,mu = 0), null wave vector along +x1");
                t
            }
            Kind::Polynomial { .. } => {
                "A_mu = c_mu + l_mu_nu x^nu + q_mu_nu (x^nu)^2\nE, H: affine in x\n\
                 gauge: none imposed (used for stencil exactness tests)"
                    .to_string()
            }
        };
        s.push_str(&text);
        s.push('\n');
        s
    }
}

/// F^{μν} at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldTensor {
    pub f_upup: [[f64; 4]; 4],
}

impl FieldTensor {
    /// Assembles F^{μν} from E and H using the layout in the module docs.
    pub fn from_e_h(e: [f64; 3], h: [f64; 3]) -> Self {
        let mut f = [[0.0; 4]; 4];
        for i in 0..3 {
            f[0][i + 1] = -e[i];
            f[i + 1][0] = e[i];
        }
        f[1][2] = -h[2];
        f[2][1] = h[2];
        f[1][3] = h[1];
        f[3][1] = -h[1];
        f[2][3] = -h[0];
        f[3][2] = h[0];
        FieldTensor { f_upup: f }
    }

    pub fn electric(&self) -> [f64; 3] {
        let f = &self.f_upup;
        [-f[0][1], -f[0][2], -f[0][3]]
    }

    pub fn magnetic(&self) -> [f64; 3] {
        let f = &self.f_upup;
        [-f[2][3], f[1][3], -f[1][2]]
    }

    /// F_{μν}.
    pub fn lower(&self) -> [[f64; 4]; 4] {
        let mut l = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                l[mu][nu] = Metric::DIAG[mu] * Metric::DIAG[nu] * self.f_upup[mu][nu];
            }
        }
        l
    }
}

/// F^{μν} = ∂^μA^ν − ∂^νA^μ from the exact gradient.
pub fn field_tensor(field: &PotentialField, x: [f64; 4]) -> FieldTensor {
    let d = field.gradient(x);
    let mut f = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            if mu != nu {
                // ∂^μA^ν = g^{μμ} g^{νν} ∂_μ A_ν
                f[mu][nu] = Metric::DIAG[mu] * Metric::DIAG[nu] * (d[nu][mu] - d[mu][nu]);
            }
        }
    }
    FieldTensor { f_upup: f }
}

/// F = ½ F_{νμ} σ^{νμ}.
pub fn field_matrix(tensor: &FieldTensor, rep: &GammaRepresentation) -> Mat4 {
    let lower = tensor.lower();
    let sigma = rep.sigma_table();
    let mut m = Mat4::zero();
    // The summand is symmetric under (ν, μ) → (μ, ν), so the ½ pairs up the halves.
    for nu in 0..4 {
        for mu in (nu + 1)..4 {
            if lower[nu][mu] != 0.0 {
                m += sigma[nu][mu] * lower[nu][mu];
            }
        }
    }
    m
}

/// A^μ_{,μ}.
pub fn divergence_a(field: &PotentialField, x: [f64; 4]) -> f64 {
    field.divergence(x)
}
