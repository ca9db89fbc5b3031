//! Binary grid dumps and CSV slices.
//!
//! Dump layout: an 8-byte little-endian header length `n`, `n` bytes of JSON
//! header, then the samples as little-endian f64 `(re, im)` pairs in row-major
//! point order (axis 0 slowest), spinor components innermost. Masked points
//! are written as NaN pairs and read back as masked.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Boundary, GridField, Margin, ScalarGridField, SpacetimeGrid, SpinorGridField};
use crate::error::{Error, Result};
use crate::linalg::Spinor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Scalar,
    Spinor,
}

impl FieldKind {
    pub fn components(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Spinor => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpHeader {
    pub extents: [usize; 4],
    pub spacings: [f64; 4],
    pub origin: [f64; 4],
    pub boundary: [Boundary; 4],
    pub margins: Margin,
    pub kind: FieldKind,
}

/// A field read back from a dump.
#[derive(Clone, Debug, PartialEq)]
pub enum DumpedField {
    Scalar(ScalarGridField),
    Spinor(SpinorGridField),
}

/// Types that can be flattened into complex components.
pub trait DumpValue: super::grid::FieldValue {
    const KIND: FieldKind;
    fn components(&self) -> Vec<Complex64>;
    fn from_components(c: &[Complex64]) -> Self;
}

impl DumpValue for Complex64 {
    const KIND: FieldKind = FieldKind::Scalar;
    fn components(&self) -> Vec<Complex64> {
        vec![*self]
    }
    fn from_components(c: &[Complex64]) -> Self {
        c[0]
    }
}

impl DumpValue for Spinor {
    const KIND: FieldKind = FieldKind::Spinor;
    fn components(&self) -> Vec<Complex64> {
        self.0.to_vec()
    }
    fn from_components(c: &[Complex64]) -> Self {
        Spinor([c[0], c[1], c[2], c[3]])
    }
}

pub fn write_dump<T: DumpValue, W: Write>(field: &GridField<T>, mut out: W) -> Result<()> {
    let g = field.grid();
    let header = DumpHeader {
        extents: g.extents,
        spacings: g.spacings,
        origin: g.origin,
        boundary: g.boundary,
        margins: field.margin(),
        kind: T::KIND,
    };
    let json = serde_json::to_vec(&header)?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    let mut buf = Vec::with_capacity(g.len() * T::KIND.components() * 16);
    for (i, v) in field.values().iter().enumerate() {
        for z in v.components() {
            let (re, im) = if field.is_masked(i) {
                (f64::NAN, f64::NAN)
            } else {
                (z.re, z.im)
            };
            buf.extend_from_slice(&re.to_le_bytes());
            buf.extend_from_slice(&im.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut input: R) -> Result<DumpedField> {
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len);
    if len > 1 << 20 {
        return Err(Error::MalformedDump(format!(
            "header length {len} is implausible"
        )));
    }
    let mut json = vec![0u8; len as usize];
    input.read_exact(&mut json)?;
    let header: DumpHeader = serde_json::from_slice(&json)?;
    let grid = SpacetimeGrid::new(
        header.extents,
        header.spacings,
        header.origin,
        header.boundary,
    )?;
    let ncomp = header.kind.components();
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    let expected = grid.len() * ncomp * 16;
    if data.len() != expected {
        return Err(Error::MalformedDump(format!(
            "expected {expected} payload bytes, found {}",
            data.len()
        )));
    }
    let read_f64 =
        |k: usize| f64::from_le_bytes(data[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let mut mask = vec![false; grid.len()];
    let mut comps = vec![Complex64::new(0.0, 0.0); grid.len() * ncomp];
    for (k, c) in comps.iter_mut().enumerate() {
        let (re, im) = (read_f64(2 * k), read_f64(2 * k + 1));
        if re.is_nan() || im.is_nan() {
            mask[k / ncomp] = true;
        } else {
            *c = Complex64::new(re, im);
        }
    }
    let any_masked = mask.iter().any(|&m| m);
    fn build<T: DumpValue>(
        grid: SpacetimeGrid,
        comps: &[Complex64],
        margins: Margin,
        mask: Option<Vec<bool>>,
    ) -> Result<GridField<T>> {
        let n = T::KIND.components();
        let values = comps.chunks(n).map(T::from_components).collect();
        let mut f = GridField::from_values(grid, values)?.with_margin(margins);
        if let Some(m) = mask {
            f = f.with_mask(m);
        }
        Ok(f)
    }
    let mask = any_masked.then_some(mask);
    Ok(match header.kind {
        FieldKind::Scalar => DumpedField::Scalar(build(grid, &comps, header.margins, mask)?),
        FieldKind::Spinor => DumpedField::Spinor(build(grid, &comps, header.margins, mask)?),
    })
}

/// Writes a 1D or 2D slice as CSV.
///
/// `fixed` pins every axis not listed in `free`. Columns: the free-axis
/// indices and coordinates, then `re_k, im_k` per component, then `masked`.
pub fn write_csv_slice<T: DumpValue, W: Write>(
    field: &GridField<T>,
    free: &[usize],
    fixed: [usize; 4],
    mut out: W,
) -> Result<()> {
    let g = field.grid();
    if free.is_empty() || free.len() > 2 || free.iter().any(|&a| a > 3) {
        return Err(Error::InvalidParameter(
            "a CSV slice needs one or two free axes".into(),
        ));
    }
    if (0..4).any(|a| !free.contains(&a) && fixed[a] >= g.extents[a]) {
        return Err(Error::InvalidParameter(format!(
            "fixed index {fixed:?} outside grid"
        )));
    }
    let ncomp = T::KIND.components();
    let mut header: Vec<String> = Vec::new();
    for &a in free {
        header.push(format!("i{a}"));
        header.push(format!("x{a}"));
    }
    for k in 0..ncomp {
        header.push(format!("re{k}"));
        header.push(format!("im{k}"));
    }
    header.push("masked".into());
    writeln!(out, "{}", header.join(","))?;
    let second = free.get(1).map(|&a| g.extents[a]).unwrap_or(1);
    for i in 0..g.extents[free[0]] {
        for j in 0..second {
            let mut m = fixed;
            m[free[0]] = i;
            if let Some(&b) = free.get(1) {
                m[b] = j;
            }
            let idx = g.index(m);
            let x = g.coords_of(m);
            let mut row: Vec<String> = Vec::new();
            for &a in free {
                row.push(m[a].to_string());
                row.push(format!("{:.17e}", x[a]));
            }
            for z in field.get(idx).components() {
                row.push(format!("{:.17e}", z.re));
                row.push(format!("{:.17e}", z.im));
            }
            row.push(u8::from(field.is_masked(idx)).to_string());
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}
