pub mod expr;
pub mod frac_ops;
pub mod ineq;
pub mod presets;
pub mod solver;
pub mod special_fn;
pub mod stability;
mod quad;

pub use expr::Expr;
pub use frac_ops::{FracOrder, SampleSeries, TimeGrid};
pub use ineq::{EnvelopeSpec, IneqReport};
pub use solver::{SystemDef, Trajectory};
pub use stability::{LyapunovCandidate, StabilityReport};
