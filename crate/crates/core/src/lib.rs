//! Locally repairable codes with multiple localities over prime fields:
//! arithmetic, linear algebra, code verification and repair, distance
//! bounds, regenerating sets, explicit optimal constructions and a repair
//! simulator.

pub mod bounds;
pub mod code;
pub mod construct;
pub mod descriptor;
pub mod field;
pub mod linalg;
pub mod regen;
pub mod sim;

pub use code::{LinearCode, LocalityProfile};
pub use construct::{build_ml_lrc, build_multi_delta_lrc, ConstructionParams};
pub use descriptor::CodeDescriptor;
pub use field::FieldSpec;
pub use linalg::Matrix;
