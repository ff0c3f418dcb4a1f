//! Local representation densities and Siegel series of hermitian lattices
//! over the unramified quadratic extension of `Q_p`, `p` odd.

pub mod budget;
pub mod decomp;
pub mod density;
pub mod error;
pub mod io;
pub mod kr;
pub mod lattice;
pub mod oracle;
pub mod overlat;
pub mod ring;
pub mod schwartz;
pub mod verify;

pub use error::{Error, Result};
