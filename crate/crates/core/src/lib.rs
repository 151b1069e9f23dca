//! Exact k-edge statistics, halving lines and rectilinear crossing numbers.
//!
//! Point sets are handled with exact rational coordinates and the counts are
//! computed twice: once by brute-force orientation tests and once through the
//! halfperiod of the circular sequence of the set. Abstract allowable
//! sequences (halfperiods that need not come from points) are accepted
//! everywhere a halfperiod is.
//!
//! The crate also evaluates the known lower bounds on `E_{<=k}(n)` and on the
//! rectilinear crossing number, runs the blocks/classification/weights
//! machinery behind the upper bound on `E_{>=k}` in terms of `E_{k-1}`, and
//! generates the extremal point sets `S_r` together with two families that
//! attain equality in that bound.

pub mod approx;
pub mod bounds;
pub mod central;
pub mod constructions;
pub mod error;
pub mod geom;
pub mod golden;
pub mod pointfile;
pub mod random;
pub mod sequence;
pub mod stats;

pub use error::{Error, Result};
pub use geom::{Orientation, Point, PointSet, Rational};
pub use sequence::{Halfperiod, KCenterTrace, Transposition};
pub use stats::{CrossingReport, EdgeVector};
