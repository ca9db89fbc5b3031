//! Second-order central stencils and the generic radius-1 application loop.

use super::grid::{FieldValue, GridField, SpacetimeGrid};
use crate::error::{Error, Result};
use crate::par;

/// Read access to one point and its axis neighbors during a stencil pass.
pub struct PointStencil<'a, T> {
    field: &'a GridField<T>,
    idx: usize,
    m: [usize; 4],
    coords: [f64; 4],
}

impl<'a, T: FieldValue> PointStencil<'a, T> {
    pub fn index(&self) -> usize {
        self.idx
    }

    pub fn coords(&self) -> [f64; 4] {
        self.coords
    }

    pub fn value(&self) -> T {
        self.field.get(self.idx)
    }

    /// Central first derivative (f₊ − f₋)/2h; zero on inactive axes.
    #[inline]
    pub fn d1(&self, axis: usize) -> T {
        let g = self.field.grid();
        if !g.is_active(axis) {
            return T::zero();
        }
        let plus = self.field.get(g.neighbor(self.m, axis, true));
        let minus = self.field.get(g.neighbor(self.m, axis, false));
        (plus - minus) * (0.5 / g.spacings[axis])
    }

    /// Central second derivative (f₊ − 2f + f₋)/h²; zero on inactive axes.
    #[inline]
    pub fn d2(&self, axis: usize) -> T {
        let g = self.field.grid();
        if !g.is_active(axis) {
            return T::zero();
        }
        let h = g.spacings[axis];
        let plus = self.field.get(g.neighbor(self.m, axis, true));
        let minus = self.field.get(g.neighbor(self.m, axis, false));
        let mid = self.value();
        (plus + minus - mid * 2.0) * (1.0 / (h * h))
    }
}

/// Applies a radius-1 pointwise kernel over the new valid interior.
///
/// Trim axes lose one layer per side; points outside the new interior are set
/// to zero. A point is masked when any point of its footprint was masked.
pub fn apply_radius1<T, U, F>(field: &GridField<T>, kernel: F) -> Result<GridField<U>>
where
    T: FieldValue,
    U: FieldValue,
    F: Fn(&PointStencil<'_, T>) -> U + Sync + Send,
{
    let grid = field.grid();
    let margin = grid.grow_margin(&field.margin())?;
    let values = par::map_indices(grid.len(), |idx| {
        let m = grid.multi_index(idx);
        if !grid.in_interior(m, &margin) {
            return U::zero();
        }
        let p = PointStencil {
            field,
            idx,
            m,
            coords: grid.coords_of(m),
        };
        kernel(&p)
    });
    let mask = field.mask().map(|mask| propagate_mask(grid, mask));
    Ok(GridField::from_parts(grid.clone(), values, margin, mask))
}

/// Masks every point whose radius-1 cross footprint touches a masked point.
pub fn propagate_mask(grid: &SpacetimeGrid, mask: &[bool]) -> Vec<bool> {
    par::map_indices(grid.len(), |idx| {
        if mask[idx] {
            return true;
        }
        let m = grid.multi_index(idx);
        (0..4).filter(|&a| grid.is_active(a)).any(|a| {
            let n = grid.extents[a];
            let periodic = grid.boundary[a] == super::grid::Boundary::Periodic;
            let fwd = m[a] + 1 < n || periodic;
            let bwd = m[a] > 0 || periodic;
            (fwd && mask[grid.neighbor(m, a, true)]) || (bwd && mask[grid.neighbor(m, a, false)])
        })
    })
}

/// Central derivative of order 1 or 2 along `axis`.
pub fn derivative<T: FieldValue>(
    field: &GridField<T>,
    axis: usize,
    order: u8,
) -> Result<GridField<T>> {
    if axis > 3 {
        return Err(Error::IndexOutOfRange(format!("axis {axis}")));
    }
    match order {
        1 => apply_radius1(field, |p| p.d1(axis)),
        2 => apply_radius1(field, |p| p.d2(axis)),
        o => Err(Error::InvalidParameter(format!(
            "derivative order {o} not in {{1, 2}}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridops::grid::Boundary;
    use num_complex::Complex64;

    fn line(n: usize, boundary: Boundary) -> SpacetimeGrid {
        let h = 1.0 / n as f64;
        SpacetimeGrid::new(
            [n, 1, 1, 1],
            [h, 1.0, 1.0, 1.0],
            [0.0; 4],
            [
                boundary,
                Boundary::Periodic,
                Boundary::Periodic,
                Boundary::Periodic,
            ],
        )
        .unwrap()
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = line(16, Boundary::Periodic);
        let f = GridField::from_fn(&g, |_| Complex64::new(2.0, -1.0));
        for order in [1, 2] {
            assert_eq!(derivative(&f, 0, order).unwrap().max_norm(), 0.0);
        }
    }

    #[test]
    fn quadratic_is_exact_on_trim_axis() {
        let g = line(11, Boundary::Trim);
        let f = GridField::from_fn(&g, |x| 3.0 * x[0] * x[0] - x[0] + 0.5);
        let d1 = derivative(&f, 0, 1).unwrap();
        let d2 = derivative(&f, 0, 2).unwrap();
        assert_eq!(d1.margin()[0], (1, 1));
        for i in d1.interior_indices() {
            let x = g.coords(i)[0];
            assert!((d1.get(i) - (6.0 * x - 1.0)).abs() < 1e-11);
            assert!((d2.get(i) - 6.0).abs() < 1e-11);
        }
        let lin = GridField::from_fn(&g, |x| 2.0 * x[0] + 1.0);
        assert!(derivative(&lin, 0, 2).unwrap().max_norm() < 1e-11);
    }

    #[test]
    fn plane_wave_derivative_is_second_order() {
        let p0 = 1.3;
        let err = |n: usize| {
            let h = 2.0 * std::f64::consts::PI / (p0 * n as f64);
            let g = SpacetimeGrid::new(
                [n, 1, 1, 1],
                [h, 1.0, 1.0, 1.0],
                [0.0; 4],
                [Boundary::Periodic; 4],
            )
            .unwrap();
            let f = GridField::from_fn(&g, |x| Complex64::new(0.0, -p0 * x[0]).exp());
            let d = derivative(&f, 0, 1).unwrap();
            let expect = f.map(|z| z * Complex64::new(0.0, -p0));
            d.max_diff(&expect).unwrap()
        };
        let (e1, e2) = (err(32), err(64));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.05, "order {order}");
    }

    #[test]
    fn inactive_axis_and_bad_order() {
        let g = line(8, Boundary::Periodic);
        let f = GridField::from_fn(&g, |x| x[0]);
        assert_eq!(derivative(&f, 2, 1).unwrap().max_norm(), 0.0);
        assert!(derivative(&f, 0, 3).is_err());
        assert!(derivative(&f, 4, 1).is_err());
    }

    #[test]
    fn trim_exhaustion() {
        let g = line(3, Boundary::Trim);
        let f = GridField::from_fn(&g, |x| x[0]);
        let d = derivative(&f, 0, 1).unwrap();
        assert!(matches!(
            derivative(&d, 0, 1),
            Err(Error::MarginExhausted { .. })
        ));
    }

    #[test]
    fn mask_spreads_to_neighbors() {
        let g = line(8, Boundary::Periodic);
        let mut mask = vec![false; 8];
        mask[0] = true;
        let f = GridField::from_fn(&g, |x| x[0]).with_mask(mask);
        let d = derivative(&f, 0, 1).unwrap();
        let masked: Vec<usize> = (0..8).filter(|&i| d.is_masked(i)).collect();
        assert_eq!(masked, vec![0, 1, 7]);
    }
}
