//! Polarized light through elliptic dichroic and birefringent elements,
//! modelled with the Lorentz group.
//!
//! An absorber that favours the polarization state `n` moves every other
//! point of the Poincaré sphere along great circles towards `n`, exactly as
//! a Lorentz boost with rapidity equal to the relative absorption moves the
//! celestial sphere of an observer. A closed sequence of absorbers therefore
//! acts as a pure rotation of the sphere: the optical Thomas rotation.
//!
//! The crate computes that rotation three independent ways:
//!
//! * the exact operator product, through the SL(2,C) → SO(3,1) covering map
//!   and a polar decomposition ([`lorentz`]),
//! * the path-ordered exponential of the Thomas-precession gauge field around
//!   the corresponding loop of four-velocities ([`wilson`]),
//! * the solid angle of the geodesic triangle swept by the fixed
//!   polarization states, via the Pancharatnam phase ([`phases`]).
//!
//! [`sim`] runs declared element sequences on input states and records
//! Poincaré-sphere trajectories.

pub mod error;
pub mod geometry;
pub mod jones;
pub mod lorentz;
pub mod phases;
pub mod sim;
pub mod wilson;

pub use error::{Error, Result};
pub use geometry::{HyperbolicPolyline, SphericalPolyline};
pub use jones::{AbsorberSpec, Element, JonesMatrix, JonesVector, PoincarePoint, RetarderSpec};
pub use lorentz::{FourVelocity, LorentzMatrix, RotationResult};
pub use phases::{ClosedSequence, PhaseReport};
pub use sim::{Scenario, ScenarioOptions, ScenarioRun, SequenceReport, TrajectoryRecord};
pub use wilson::GaugeValue;
