//! Exact arithmetic on the circle, arithmetic sequences and digit expansions.

pub mod circle;
pub mod expansion;
pub mod interval;
pub mod sequence;
pub mod terms;

pub use circle::{dist_to_int, mult_mod1, CircleRational};
pub use expansion::{expand, expand_value, Depth, DigitExpansion};
pub use interval::{enclose, frac_scaled, sin_envelope, tail_bound, Enclosure, FracEnclosure, Horizon, RatInterval};
pub use sequence::ArithmeticSequence;
pub use terms::{decompose, Decomposition, TermSequence};
