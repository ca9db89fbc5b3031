use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Spinor;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Trim,
}

/// Per-axis `(low, high)` count of invalid layers at the grid edges.
pub type Margin = [(usize, usize); 4];

/// Uniform spacetime grid. Axis 0 is x⁰ (time).
///
/// Axes of extent 1 are inactive: derivatives along them vanish and they never
/// lose margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeGrid {
    pub extents: [usize; 4],
    pub spacings: [f64; 4],
    pub origin: [f64; 4],
    pub boundary: [Boundary; 4],
}

impl SpacetimeGrid {
    pub fn new(
        extents: [usize; 4],
        spacings: [f64; 4],
        origin: [f64; 4],
        boundary: [Boundary; 4],
    ) -> Result<Self> {
        let g = SpacetimeGrid {
            extents,
            spacings,
            origin,
            boundary,
        };
        g.validate()?;
        Ok(g)
    }

    /// Time axis trimmed, space axes periodic.
    pub fn with_default_boundaries(
        extents: [usize; 4],
        spacings: [f64; 4],
        origin: [f64; 4],
    ) -> Result<Self> {
        use Boundary::*;
        Self::new(
            extents,
            spacings,
            origin,
            [Trim, Periodic, Periodic, Periodic],
        )
    }

    pub fn validate(&self) -> Result<()> {
        for a in 0..4 {
            if self.extents[a] == 0 {
                return Err(Error::InvalidGrid(format!("axis {a} has zero extent")));
            }
            if !(self.spacings[a] > 0.0 && self.spacings[a].is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "axis {a} spacing must be positive, got {}",
                    self.spacings[a]
                )));
            }
            if !self.origin[a].is_finite() {
                return Err(Error::InvalidGrid(format!("axis {a} origin is not finite")));
            }
        }
        self.extents
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGrid("point count overflows".into()))?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_active(&self, axis: usize) -> bool {
        self.extents[axis] > 1
    }

    pub fn strides(&self) -> [usize; 4] {
        let n = &self.extents;
        [n[1] * n[2] * n[3], n[2] * n[3], n[3], 1]
    }

    /// Row-major linear index, axis 0 slowest.
    pub fn index(&self, m: [usize; 4]) -> usize {
        let s = self.strides();
        m[0] * s[0] + m[1] * s[1] + m[2] * s[2] + m[3]
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; 4] {
        let n = &self.extents;
        let i3 = idx % n[3];
        idx /= n[3];
        let i2 = idx % n[2];
        idx /= n[2];
        let i1 = idx % n[1];
        [idx / n[1], i1, i2, i3]
    }

    pub fn coords_of(&self, m: [usize; 4]) -> [f64; 4] {
        let mut x = [0.0; 4];
        for a in 0..4 {
            x[a] = self.origin[a] + self.spacings[a] * m[a] as f64;
        }
        x
    }

    pub fn coords(&self, idx: usize) -> [f64; 4] {
        self.coords_of(self.multi_index(idx))
    }

    /// Same physical box with every active spacing halved. Trim axes keep
    /// both endpoints (n → 2n − 1); periodic axes double (n → 2n).
    pub fn refined(&self) -> Self {
        let mut g = self.clone();
        for a in 0..4 {
            if !self.is_active(a) {
                continue;
            }
            g.spacings[a] *= 0.5;
            g.extents[a] = match self.boundary[a] {
                Boundary::Trim => 2 * self.extents[a] - 1,
                Boundary::Periodic => 2 * self.extents[a],
            };
        }
        g
    }

    /// Largest active spacing.
    pub fn max_spacing(&self) -> f64 {
        (0..4)
            .filter(|&a| self.is_active(a))
            .map(|a| self.spacings[a])
            .fold(0.0, f64::max)
    }

    pub fn check_same(&self, other: &SpacetimeGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "extents {:?} vs {:?}",
                self.extents, other.extents
            )));
        }
        Ok(())
    }

    pub(crate) fn neighbor(&self, m: [usize; 4], axis: usize, forward: bool) -> usize {
        let n = self.extents[axis];
        let mut q = m;
        q[axis] = if forward {
            if m[axis] + 1 == n {
                0
            } else {
                m[axis] + 1
            }
        } else if m[axis] == 0 {
            n - 1
        } else {
            m[axis] - 1
        };
        self.index(q)
    }

    /// Margin after one radius-1 stencil application.
    pub fn grow_margin(&self, margin: &Margin) -> Result<Margin> {
        let mut out = *margin;
        for a in 0..4 {
            if !self.is_active(a) || self.boundary[a] == Boundary::Periodic {
                continue;
            }
            let (lo, hi) = margin[a];
            if lo + hi + 3 > self.extents[a] {
                return Err(Error::MarginExhausted {
                    axis: a,
                    extent: self.extents[a],
                    lo,
                    hi,
                });
            }
            out[a] = (lo + 1, hi + 1);
        }
        Ok(out)
    }

    pub fn in_interior(&self, m: [usize; 4], margin: &Margin) -> bool {
        (0..4).all(|a| m[a] >= margin[a].0 && m[a] + margin[a].1 < self.extents[a])
    }
}

/// Values a grid field can carry.
pub trait FieldValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + 'static
{
    fn zero() -> Self;
    /// Max-norm of the value (largest component modulus).
    fn magnitude(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl FieldValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite(&self) -> bool {
        Complex64::is_finite(*self)
    }
}

impl FieldValue for Spinor {
    fn zero() -> Self {
        Spinor::zero()
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
    fn is_finite(&self) -> bool {
        Spinor::is_finite(self)
    }
}

/// Values that can be scaled by complex numbers.
pub trait ComplexValue: FieldValue + Mul<Complex64, Output = Self> {}
impl ComplexValue for Complex64 {}
impl ComplexValue for Spinor {}

/// Samples on a [`SpacetimeGrid`] with a valid-interior margin and an optional
/// mask of excluded points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    grid: SpacetimeGrid,
    values: Vec<T>,
    margin: Margin,
    mask: Option<Vec<bool>>,
}

pub type ScalarGridField = GridField<Complex64>;
pub type SpinorGridField = GridField<Spinor>;
pub type RealGridField = GridField<f64>;

impl<T: FieldValue> GridField<T> {
    pub fn from_values(grid: SpacetimeGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridField {
            grid,
            values,
            margin: [(0, 0); 4],
            mask: None,
        })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: &SpacetimeGrid, f: impl Fn([f64; 4]) -> T + Sync + Send) -> Self {
        let values = par::map_indices(grid.len(), |i| f(grid.coords(i)));
        GridField {
            grid: grid.clone(),
            values,
            margin: [(0, 0); 4],
            mask: None,
        }
    }

    pub fn zeros(grid: &SpacetimeGrid) -> Self {
        GridField {
            grid: grid.clone(),
            values: vec![T::zero(); grid.len()],
            margin: [(0, 0); 4],
            mask: None,
        }
    }

    pub(crate) fn from_parts(
        grid: SpacetimeGrid,
        values: Vec<T>,
        margin: Margin,
        mask: Option<Vec<bool>>,
    ) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridField {
            grid,
            values,
            margin,
            mask,
        }
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn margin(&self) -> Margin {
        self.margin
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn get(&self, idx: usize) -> T {
        self.values[idx]
    }

    pub fn at(&self, m: [usize; 4]) -> T {
        self.values[self.grid.index(m)]
    }

    pub fn is_masked(&self, idx: usize) -> bool {
        self.mask.as_ref().is_some_and(|m| m[idx])
    }

    pub fn with_margin(mut self, margin: Margin) -> Self {
        for a in 0..4 {
            self.margin[a].0 = self.margin[a].0.max(margin[a].0);
            self.margin[a].1 = self.margin[a].1.max(margin[a].1);
        }
        self
    }

    /// Adds `extra` to the mask (the mask never shrinks).
    pub fn with_mask(mut self, extra: Vec<bool>) -> Self {
        match &mut self.mask {
            Some(m) => m.iter_mut().zip(extra).for_each(|(a, b)| *a |= b),
            None => self.mask = Some(extra),
        }
        self
    }

    /// Whether `idx` is inside the valid interior and unmasked.
    pub fn is_live(&self, idx: usize) -> bool {
        !self.is_masked(idx)
            && self
                .grid
                .in_interior(self.grid.multi_index(idx), &self.margin)
    }

    pub fn interior_count(&self) -> usize {
        (0..4)
            .map(|a| self.grid.extents[a].saturating_sub(self.margin[a].0 + self.margin[a].1))
            .product()
    }

    /// Linear indices of the valid interior, masked points included.
    pub fn interior_indices(&self) -> Vec<usize> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(self.interior_count());
        let r = |a: usize| self.margin[a].0..g.extents[a].saturating_sub(self.margin[a].1);
        for i0 in r(0) {
            for i1 in r(1) {
                for i2 in r(2) {
                    for i3 in r(3) {
                        out.push(g.index([i0, i1, i2, i3]));
                    }
                }
            }
        }
        out
    }

    /// Fraction of interior points that are unmasked.
    pub fn coverage(&self) -> f64 {
        let interior = self.interior_indices();
        if interior.is_empty() {
            return 0.0;
        }
        let live = interior.iter().filter(|&&i| !self.is_masked(i)).count();
        live as f64 / interior.len() as f64
    }

    /// Max-norm over the unmasked valid interior.
    pub fn max_norm(&self) -> f64 {
        let interior = self.interior_indices();
        par::max_over(interior.len(), |k| {
            let i = interior[k];
            if self.is_masked(i) {
                0.0
            } else {
                self.values[i].magnitude()
            }
        })
    }

    /// Max-norm of `self − other` over the common unmasked interior.
    pub fn max_diff(&self, other: &GridField<T>) -> Result<f64> {
        Ok(self.zip_with(other, |a, b| a - b)?.max_norm())
    }

    /// Pointwise map, keeping margin and mask.
    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U + Sync + Send) -> GridField<U> {
        let values = par::map_indices(self.values.len(), |i| f(self.values[i]));
        GridField {
            grid: self.grid.clone(),
            values,
            margin: self.margin,
            mask: self.mask.clone(),
        }
    }

    /// Pointwise map with coordinates.
    pub fn map_with_coords<U: FieldValue>(
        &self,
        f: impl Fn([f64; 4], T) -> U + Sync + Send,
    ) -> GridField<U> {
        let values = par::map_indices(self.values.len(), |i| {
            f(self.grid.coords(i), self.values[i])
        });
        GridField {
            grid: self.grid.clone(),
            values,
            margin: self.margin,
            mask: self.mask.clone(),
        }
    }

    /// Pointwise combination; the result carries the larger margin and the
    /// union of both masks.
    pub fn zip_with<U: FieldValue, V: FieldValue>(
        &self,
        other: &GridField<U>,
        f: impl Fn(T, U) -> V + Sync + Send,
    ) -> Result<GridField<V>> {
        self.grid.check_same(&other.grid)?;
        let values = par::map_indices(self.values.len(), |i| f(self.values[i], other.values[i]));
        let mut margin = self.margin;
        for a in 0..4 {
            margin[a].0 = margin[a].0.max(other.margin[a].0);
            margin[a].1 = margin[a].1.max(other.margin[a].1);
        }
        let mask = match (&self.mask, &other.mask) {
            (None, None) => None,
            (Some(m), None) | (None, Some(m)) => Some(m.clone()),
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| *x || *y).collect()),
        };
        Ok(GridField {
            grid: self.grid.clone(),
            values,
            margin,
            mask,
        })
    }

    /// Whether every unmasked interior value is finite.
    pub fn is_finite(&self) -> bool {
        self.interior_indices()
            .into_iter()
            .all(|i| self.is_masked(i) || self.values[i].is_finite())
    }

    /// Zeroes values outside the live region; used to keep dumps tidy.
    pub fn zero_dead(mut self) -> Self {
        let g = self.grid.clone();
        let margin = self.margin;
        let mask = self.mask.clone();
        par::for_each_mut(&mut self.values, |i, v| {
            let dead =
                mask.as_ref().is_some_and(|m| m[i]) || !g.in_interior(g.multi_index(i), &margin);
            if dead {
                *v = T::zero();
            }
        });
        self
    }
}

impl<T: FieldValue> Add for &GridField<T> {
    type Output = GridField<T>;
    fn add(self, rhs: &GridField<T>) -> GridField<T> {
        self.zip_with(rhs, |a, b| a + b)
            .expect("grid mismatch in field addition")
    }
}

impl<T: FieldValue> Sub for &GridField<T> {
    type Output = GridField<T>;
    fn sub(self, rhs: &GridField<T>) -> GridField<T> {
        self.zip_with(rhs, |a, b| a - b)
            .expect("grid mismatch in field subtraction")
    }
}
