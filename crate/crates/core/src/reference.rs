//! Published comparison values: finite-size transition points and classical
//! bond-percolation thresholds. Used to annotate `compare` output.

use crate::lattice::Geometry;

/// Classical bond-percolation threshold of the square lattice.
pub const CLASSICAL_PC_SQUARE: f64 = 0.5;
/// Classical bond-percolation threshold of the honeycomb lattice.
pub const CLASSICAL_PC_HONEYCOMB: f64 = 0.652;

/// Reported transition points `(geometry, n, p_a)` for finite n x n systems.
pub const TRANSITION_POINTS: [(Geometry, usize, f64); 12] = [
    (Geometry::Square, 50, 0.950),
    (Geometry::Square, 100, 0.972),
    (Geometry::Square, 200, 0.986),
    (Geometry::Square, 400, 0.992),
    (Geometry::Honeycomb, 50, 0.910),
    (Geometry::Honeycomb, 100, 0.955),
    (Geometry::Honeycomb, 200, 0.975),
    (Geometry::Honeycomb, 400, 0.985),
    (Geometry::Nanotube, 50, 0.910),
    (Geometry::Nanotube, 100, 0.950),
    (Geometry::Nanotube, 200, 0.975),
    (Geometry::Nanotube, 400, 0.985),
];

/// Reported transition point for the given geometry and linear size, if
/// tabulated.
pub fn reported_transition_point(geometry: Geometry, n: usize) -> Option<f64> {
    TRANSITION_POINTS
        .iter()
        .find(|(g, size, _)| *g == geometry && *size == n)
        .map(|(_, _, pa)| *pa)
}

/// Classical threshold used as a comparison constant for the geometry, if
/// one applies (the nanotube shares the honeycomb value).
pub fn classical_threshold(geometry: Geometry) -> f64 {
    match geometry {
        Geometry::Square => CLASSICAL_PC_SQUARE,
        Geometry::Honeycomb | Geometry::Nanotube => CLASSICAL_PC_HONEYCOMB,
    }
}
