//! Fixtures shared by the benchmarks.

use polthomas::phases::{close_sequence, hyperbolic_loop};
use polthomas::{AbsorberSpec, ClosedSequence, HyperbolicPolyline, PoincarePoint};

/// Lossless absorbers of rapidity 1 on ẑ then x̂.
pub fn zx_pair() -> (AbsorberSpec, AbsorberSpec) {
    let a = |axis| AbsorberSpec::lossless(axis, 1.0).expect("valid absorber");
    (a(PoincarePoint::z_axis()), a(PoincarePoint::x_axis()))
}

/// The ẑ/x̂ pair with its closing absorber.
pub fn zx_triple() -> ClosedSequence {
    let (a1, a2) = zx_pair();
    close_sequence(a1, a2).expect("closable pair").1
}

/// Loop of four-velocities traced by [`zx_triple`].
pub fn zx_loop() -> HyperbolicPolyline {
    hyperbolic_loop(zx_triple().elements()).expect("loop")
}
