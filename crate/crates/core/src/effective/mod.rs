//! Effective single-walker Hamiltonians.
//!
//! Closed-form Bloch expansions for the small bridge geometries, the star
//! series and its resummation, and the numerical least-action block
//! diagonalization (EBD-LA) that serves as the reference for all of them.

mod bloch;
mod dispatch;
mod ebd;
mod model;
mod scaling;
mod star;

pub use bloch::{bloch_2d, bloch_four_chain, bloch_three_qubit, bloch_three_qubit_second_order};
pub use dispatch::{default_nodes, effective_for_device, NODE_BAND_MHZ};
pub use ebd::{ebd_la, ebd_la_matrix, BlockDiagonalization, TIE_TOLERANCE};
pub use model::{EffectiveModel, Method, DISPERSIVE_BOUND};
pub use scaling::{fit_log_linear, sew_chain_device, sew_scaling, LogLinearFit};
pub use star::{catalan, star_arrowhead, star_closed, star_device, star_model, star_series, StarSeries, CATALAN_MAX, STAR_P_MAX};
