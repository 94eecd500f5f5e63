//! Far-field representation, cross sections, the energy identity, residual
//! certificates, a-priori plane-wave bounds and their joint verification.

pub mod apriori;
pub mod certify;
pub mod far_field;
pub mod green;
pub mod verify;

pub use apriori::{apriori_bounds, AprioriBounds};
pub use certify::{certify, certify_parts, CertifiedReport, OracleComparison};
pub use far_field::{
    direction_grid, far_field_from_traces, far_field_gradient, far_field_grid_from_traces,
    total_cross_section, transport_cross_section, DirectionGrid, FarFieldGrid,
};
pub use green::{greens_identity_check, GreenDefect};
pub use verify::{verify_all, Instance, Resolutions, VerdictTable};
