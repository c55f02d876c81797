//! Knot Floer homology of (1,1)-satellite knots via immersed curve pairing.
//!
//! Pipeline: a CFK^- presentation of the companion becomes a type D
//! structure of the 0-framed complement, then an immersed multicurve in the
//! marked torus; pairing it with a pattern beta-curve in the plane yields a
//! filtered complex whose homology and reduction give the satellite's
//! Alexander-graded ranks, genus, fiberedness and tau.

pub mod bordered;
pub mod cfk;
pub mod companions;
pub mod curve;
pub mod error;
pub mod geom;
pub mod homology;
pub mod pattern;

pub use error::{Error, Result};
