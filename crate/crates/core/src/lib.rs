pub mod cochain;
pub mod cover;
pub mod deform;
pub mod error;
pub mod family;
pub mod gerbe;
pub mod linalg;
pub mod mesh;
pub mod models;
pub mod spectral_flow;

pub use error::{Error, Result};
