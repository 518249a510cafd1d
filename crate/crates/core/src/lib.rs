pub mod cover;
pub mod domains;
pub mod error;
pub mod geom;
pub mod maps;
pub mod mu;
pub mod neighbors;
pub mod optim;
pub mod report;
pub mod svg;
pub mod tolerance;

mod delaunay;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
