pub mod aniso;
pub mod lemma41;
pub mod local;
pub mod prop11;
pub mod restriction;
pub mod scaling;

pub use aniso::verify_aniso;
pub use lemma41::verify_lemma41;
pub use local::{verify_dispersive, verify_local_strichartz};
pub use prop11::verify_prop11;
pub use restriction::verify_restriction;
pub use scaling::verify_scaling_law;
