//! Spacetime grids, central stencils and the differential operators built on them.

mod dump;
mod grid;
mod operators;
mod stencil;

pub use dump::{
    read_dump, write_csv_slice, write_dump, DumpHeader, DumpValue, DumpedField, FieldKind,
};
pub use grid::{
    Boundary, ComplexValue, FieldValue, GridField, Margin, RealGridField, ScalarGridField,
    SpacetimeGrid, SpinorGridField,
};
pub use operators::{
    alpha, box_prime_apply, convergence_order, convergence_order_on_common_region, current,
    dirac_apply, dirac_residual, divergence, field_matrix_apply, fourth_order_apply,
    intersect_regions, live_region, max_norm_in, squared_identity_residual, ConvergenceEstimate,
    CurrentFields, Region,
};
pub(crate) use operators::{divide_masked, plus_coefficient};
pub use stencil::{apply_radius1, derivative, propagate_mask, PointStencil};
