//! Lattice geometries and seeded bond-percolation realizations.
//!
//! Disorder is bond percolation: every traversable move of the walk is backed
//! by an undirected edge that is independently present with probability `p`.
//! A realization is fully determined by `(spec, p, seed)`; flags are drawn
//! from a counter-based stream keyed by the canonical edge coordinates, so
//! sampling is order-independent and identical realizations can be
//! reconstructed from the compact `(geometry, n_x, n_y, p, seed)` record.
//!
//! Edges that cross the boundary of the simulated region are treated as
//! present: the exterior is fully connected and amplitude that crosses it is
//! absorbed by the walk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Square,
    Honeycomb,
    Nanotube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XBoundary {
    /// Amplitude leaving the region through a side is absorbed.
    Absorbing,
    /// Columns are indexed mod `n_x` (nanotube).
    Periodic,
}

/// How the two physical legs of a honeycomb composite move are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagonalSampling {
    /// One Bernoulli(p) draw per traversable move (default).
    #[default]
    Single,
    /// Two independent draws; the move requires both legs.
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub geometry: Geometry,
    /// Vertex count along x (nanotube circumference).
    pub n_x: usize,
    /// Vertex count along y (transport direction).
    pub n_y: usize,
    pub x_boundary: XBoundary,
    #[serde(default)]
    pub diagonal_sampling: DiagonalSampling,
}

/// Validates dimensions and fixes the boundary implied by the geometry.
pub fn build_spec(geometry: Geometry, n_x: usize, n_y: usize) -> Result<LatticeSpec> {
    if n_x < 2 || n_y < 2 {
        return Err(Error::DimensionOutOfRange { n_x, n_y });
    }
    let x_boundary = match geometry {
        Geometry::Nanotube => XBoundary::Periodic,
        Geometry::Square | Geometry::Honeycomb => XBoundary::Absorbing,
    };
    Ok(LatticeSpec {
        geometry,
        n_x,
        n_y,
        x_boundary,
        diagonal_sampling: DiagonalSampling::default(),
    })
}

impl LatticeSpec {
    pub fn periodic_x(&self) -> bool {
        self.x_boundary == XBoundary::Periodic
    }

    pub fn uses_diagonals(&self) -> bool {
        matches!(self.geometry, Geometry::Honeycomb | Geometry::Nanotube)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub x: usize,
    pub y: usize,
}

impl Vertex {
    pub fn new(x: usize, y: usize) -> Self {
        Vertex { x, y }
    }
}

/// Compact serializable description of a sampled realization.
///
/// The flags themselves are never stored; `reconstruct` resamples them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub geometry: Geometry,
    pub n_x: usize,
    pub n_y: usize,
    pub p: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pad: usize,
    #[serde(default, skip_serializing_if = "is_single")]
    pub diagonal_sampling: DiagonalSampling,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn is_single(v: &DiagonalSampling) -> bool {
    *v == DiagonalSampling::Single
}

impl EdgeRecord {
    pub fn reconstruct(&self) -> Result<EdgeConfig> {
        let mut spec = build_spec(self.geometry, self.n_x, self.n_y)?;
        spec.diagonal_sampling = self.diagonal_sampling;
        sample_edges_padded(&spec, self.p, self.seed, self.pad)
    }
}

// Stream kinds for the canonical edge keys.
const KIND_X: u64 = 0;
const KIND_UP: u64 = 1;
const KIND_DIAG_LEFT: u64 = 2;
const KIND_DIAG_RIGHT: u64 = 3;
const KIND_DIAG_LEFT_LEG: u64 = 4;
const KIND_DIAG_RIGHT_LEG: u64 = 5;

#[inline]
fn edge_stream_index(kind: u64, x: usize, y: usize) -> u64 {
    debug_assert!(x < (1 << 24) && y < (1 << 24));
    (kind << 48) | ((y as u64) << 24) | x as u64
}

#[inline]
fn draw(seed: u64, p: f64, kind: u64, x: usize, y: usize) -> bool {
    rng::stream_unit(seed, edge_stream_index(kind, x, y)) < p
}

/// One disorder realization: per-vertex presence flags for every move of the
/// walk, materialized over the (possibly padded) simulated region.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeConfig {
    spec: LatticeSpec,
    pad: usize,
    provenance: Option<(f64, u64)>,
    /// Edge (x, y)-(x+1, y); the entry of the last column is the wrap edge
    /// under periodic x and the (always present) exterior edge otherwise.
    x_edges: Vec<bool>,
    /// Edge (x, y)-(x, y+1); the top row holds the exit edge (present).
    up_edges: Vec<bool>,
    /// Composite move (x, y) -> (x-1, y+1).
    diag_left: Vec<bool>,
    /// Composite move (x, y) -> (x+1, y+1).
    diag_right: Vec<bool>,
}

impl EdgeConfig {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    /// Width of the simulated region (window plus padding columns).
    pub fn sim_nx(&self) -> usize {
        self.spec.n_x + 2 * self.pad
    }

    pub fn sim_ny(&self) -> usize {
        self.spec.n_y
    }

    pub fn n_vertices(&self) -> usize {
        self.sim_nx() * self.sim_ny()
    }

    #[inline]
    fn idx(&self, x: usize, y: usize) -> usize {
        y * self.sim_nx() + x
    }

    #[inline]
    pub fn x_edge_right(&self, x: usize, y: usize) -> bool {
        self.x_edges[self.idx(x, y)]
    }

    #[inline]
    pub fn x_edge_left(&self, x: usize, y: usize, wrap_x: bool) -> bool {
        if x > 0 {
            self.x_edges[self.idx(x - 1, y)]
        } else if wrap_x {
            self.x_edges[self.idx(self.sim_nx() - 1, y)]
        } else {
            true
        }
    }

    /// Both lateral edges present: the vertex shifts its components outward.
    #[inline]
    pub fn mover_x(&self, x: usize, y: usize, wrap_x: bool) -> bool {
        self.x_edge_right(x, y) && self.x_edge_left(x, y, wrap_x)
    }

    #[inline]
    pub fn up_edge(&self, x: usize, y: usize) -> bool {
        self.up_edges[self.idx(x, y)]
    }

    #[inline]
    pub fn diag_left(&self, x: usize, y: usize) -> bool {
        self.diag_left[self.idx(x, y)]
    }

    #[inline]
    pub fn diag_right(&self, x: usize, y: usize) -> bool {
        self.diag_right[self.idx(x, y)]
    }

    /// True iff amplitude reaching this vertex can never leave it: the up
    /// move is missing together with at least one lateral move (composite
    /// diagonals for honeycomb geometries).
    pub fn is_trapping(&self, x: usize, y: usize) -> bool {
        let wrap = self.spec.periodic_x();
        if self.up_edge(x, y) {
            return false;
        }
        if self.spec.uses_diagonals() {
            !self.diag_left(x, y) || !self.diag_right(x, y)
        } else {
            !self.x_edge_left(x, y, wrap) || !self.x_edge_right(x, y)
        }
    }

    /// Per-vertex trapping mask over the simulated region.
    pub fn trap_mask(&self) -> Vec<bool> {
        let (nx, ny) = (self.sim_nx(), self.sim_ny());
        let mut mask = vec![false; nx * ny];
        for y in 0..ny {
            for x in 0..nx {
                mask[y * nx + x] = self.is_trapping(x, y);
            }
        }
        mask
    }

    /// The compact record, if this realization was sampled (not hand-built).
    pub fn to_record(&self) -> Option<EdgeRecord> {
        self.provenance.map(|(p, seed)| EdgeRecord {
            geometry: self.spec.geometry,
            n_x: self.spec.n_x,
            n_y: self.spec.n_y,
            p,
            seed,
            pad: self.pad,
            diagonal_sampling: self.spec.diagonal_sampling,
        })
    }

    /// (present, total) over the sampled interior edges only; exterior and
    /// padding edges are excluded.
    pub fn interior_edge_stats(&self) -> (usize, usize) {
        let mut present = 0usize;
        let mut total = 0usize;
        let mut tally = |flag: bool| {
            total += 1;
            if flag {
                present += 1;
            }
        };
        let nx = self.sim_nx();
        let ny = self.sim_ny();
        for y in 0..ny {
            for x in 0..nx {
                let i = y * nx + x;
                match self.spec.geometry {
                    Geometry::Square => {
                        if self.window_x(x).is_some()
                            && self.window_x(x + 1).is_some()
                            && x + 1 < nx
                        {
                            tally(self.x_edges[i]);
                        }
                        if self.window_x(x).is_some() && y + 1 < ny {
                            tally(self.up_edges[i]);
                        }
                    }
                    Geometry::Honeycomb => {
                        if y + 1 < ny && self.window_x(x).is_some() {
                            tally(self.up_edges[i]);
                            if x > 0 && self.window_x(x - 1).is_some() {
                                tally(self.diag_left[i]);
                            }
                            if x + 1 < nx && self.window_x(x + 1).is_some() {
                                tally(self.diag_right[i]);
                            }
                        }
                    }
                    Geometry::Nanotube => {
                        if y + 1 < ny {
                            tally(self.up_edges[i]);
                            tally(self.diag_left[i]);
                            tally(self.diag_right[i]);
                        }
                    }
                }
            }
        }
        (present, total)
    }

    /// Window column index of a simulated column, if inside the disordered
    /// window (padding columns are outside).
    #[inline]
    fn window_x(&self, x: usize) -> Option<usize> {
        if x >= self.pad && x < self.pad + self.spec.n_x {
            Some(x - self.pad)
        } else {
            None
        }
    }
}

/// Samples a bond-percolation realization: every interior edge is an
/// independent Bernoulli(p) draw from the stream keyed by `seed` and the
/// canonical edge coordinates.
pub fn sample_edges(spec: &LatticeSpec, p: f64, seed: u64) -> Result<EdgeConfig> {
    sample_edges_padded(spec, p, seed, 0)
}

/// Like [`sample_edges`], with `pad` fully connected columns added on each
/// side of the disordered window (absorbing geometries only). The window
/// realization is independent of `pad`.
pub fn sample_edges_padded(
    spec: &LatticeSpec,
    p: f64,
    seed: u64,
    pad: usize,
) -> Result<EdgeConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if spec.periodic_x() && pad != 0 {
        return Err(Error::GeometryMismatch(spec.geometry));
    }
    let mut config = fully_connected_config(spec, pad);
    config.provenance = Some((p, seed));

    let nx = config.sim_nx();
    let ny = config.sim_ny();
    let double = spec.diagonal_sampling == DiagonalSampling::Double;
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            match spec.geometry {
                Geometry::Square => {
                    if let (Some(wx), Some(_)) = (config.window_x(x), config.window_x(x + 1)) {
                        if x + 1 < nx {
                            config.x_edges[i] = draw(seed, p, KIND_X, wx, y);
                        }
                    }
                    if y + 1 < ny {
                        if let Some(wx) = config.window_x(x) {
                            config.up_edges[i] = draw(seed, p, KIND_UP, wx, y);
                        }
                    }
                }
                Geometry::Honeycomb => {
                    if y + 1 < ny {
                        if let Some(wx) = config.window_x(x) {
                            config.up_edges[i] = draw(seed, p, KIND_UP, wx, y);
                            if x > 0 && config.window_x(x - 1).is_some() {
                                config.diag_left[i] = draw(seed, p, KIND_DIAG_LEFT, wx, y)
                                    && (!double || draw(seed, p, KIND_DIAG_LEFT_LEG, wx, y));
                            }
                            if x + 1 < nx && config.window_x(x + 1).is_some() {
                                config.diag_right[i] = draw(seed, p, KIND_DIAG_RIGHT, wx, y)
                                    && (!double || draw(seed, p, KIND_DIAG_RIGHT_LEG, wx, y));
                            }
                        }
                    }
                }
                Geometry::Nanotube => {
                    if y + 1 < ny {
                        config.up_edges[i] = draw(seed, p, KIND_UP, x, y);
                        config.diag_left[i] = draw(seed, p, KIND_DIAG_LEFT, x, y)
                            && (!double || draw(seed, p, KIND_DIAG_LEFT_LEG, x, y));
                        config.diag_right[i] = draw(seed, p, KIND_DIAG_RIGHT, x, y)
                            && (!double || draw(seed, p, KIND_DIAG_RIGHT_LEG, x, y));
                    }
                }
            }
        }
    }
    Ok(config)
}

fn fully_connected_config(spec: &LatticeSpec, pad: usize) -> EdgeConfig {
    let n = (spec.n_x + 2 * pad) * spec.n_y;
    EdgeConfig {
        spec: *spec,
        pad,
        provenance: None,
        x_edges: vec![true; n],
        up_edges: vec![true; n],
        diag_left: vec![true; n],
        diag_right: vec![true; n],
    }
}

/// True iff the up move at `v` is missing and at least one lateral move is
/// missing, so amplitude arriving at `v` can never leave.
pub fn is_trapping_vertex(config: &EdgeConfig, v: Vertex) -> Result<bool> {
    if v.x >= config.sim_nx() || v.y >= config.sim_ny() {
        return Err(Error::VertexOutOfBounds {
            x: v.x,
            y: v.y,
            n_x: config.sim_nx(),
            n_y: config.sim_ny(),
        });
    }
    Ok(config.is_trapping(v.x, v.y))
}

/// Hand-built edge configurations, mainly for tests and closed-system
/// operator checks. Starts fully connected; setters flip individual moves.
#[derive(Debug, Clone)]
pub struct EdgeConfigBuilder {
    config: EdgeConfig,
}

impl EdgeConfigBuilder {
    pub fn fully_connected(spec: &LatticeSpec) -> Self {
        EdgeConfigBuilder {
            config: fully_connected_config(spec, 0),
        }
    }

    fn idx(&self, x: usize, y: usize) -> usize {
        assert!(x < self.config.sim_nx() && y < self.config.sim_ny(), "vertex out of bounds");
        y * self.config.sim_nx() + x
    }

    /// Presence of edge (x, y)-(x+1, y) (wrap column allowed).
    pub fn x_edge(mut self, x: usize, y: usize, present: bool) -> Self {
        let i = self.idx(x, y);
        self.config.x_edges[i] = present;
        self
    }

    pub fn up_edge(mut self, x: usize, y: usize, present: bool) -> Self {
        let i = self.idx(x, y);
        self.config.up_edges[i] = present;
        self
    }

    pub fn diag_left(mut self, x: usize, y: usize, present: bool) -> Self {
        let i = self.idx(x, y);
        self.config.diag_left[i] = present;
        self
    }

    pub fn diag_right(mut self, x: usize, y: usize, present: bool) -> Self {
        let i = self.idx(x, y);
        self.config.diag_right[i] = present;
        self
    }

    pub fn build(self) -> EdgeConfig {
        self.config
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_spec_validates_dimensions() {
        assert!(build_spec(Geometry::Square, 200, 200).is_ok());
        let spec = build_spec(Geometry::Nanotube, 2, 2).unwrap();
        assert_eq!(spec.x_boundary, XBoundary::Periodic);
        assert_eq!(
            build_spec(Geometry::Square, 1, 5),
            Err(Error::DimensionOutOfRange { n_x: 1, n_y: 5 })
        );
    }

    #[test]
    fn square_and_honeycomb_are_absorbing() {
        assert_eq!(
            build_spec(Geometry::Square, 5, 5).unwrap().x_boundary,
            XBoundary::Absorbing
        );
        assert_eq!(
            build_spec(Geometry::Honeycomb, 5, 5).unwrap().x_boundary,
            XBoundary::Absorbing
        );
    }

    #[test]
    fn p_one_gives_all_edges_p_zero_none() {
        for geometry in [Geometry::Square, Geometry::Honeycomb, Geometry::Nanotube] {
            let spec = build_spec(geometry, 6, 6).unwrap();
            let full = sample_edges(&spec, 1.0, 99).unwrap();
            let (present, total) = full.interior_edge_stats();
            assert_eq!(present, total);
            assert!(total > 0);
            let empty = sample_edges(&spec, 0.0, 99).unwrap();
            let (present, total2) = empty.interior_edge_stats();
            assert_eq!(present, 0);
            assert_eq!(total, total2);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = build_spec(Geometry::Nanotube, 12, 12).unwrap();
        let a = sample_edges(&spec, 0.6, 777).unwrap();
        let b = sample_edges(&spec, 0.6, 777).unwrap();
        assert_eq!(a, b);
        let c = sample_edges(&spec, 0.6, 778).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn present_fraction_matches_p() {
        // 50x50 square: 2*50*49 = 4900 interior edges.
        let spec = build_spec(Geometry::Square, 50, 50).unwrap();
        let config = sample_edges(&spec, 0.9, 31415).unwrap();
        let (present, total) = config.interior_edge_stats();
        assert_eq!(total, 4900);
        let f = present as f64 / total as f64;
        let sigma = (0.9 * 0.1 / total as f64).sqrt();
        assert!((f - 0.9).abs() <= 3.0 * sigma, "fraction {f}");
    }

    #[test]
    fn present_fraction_calibration_many_edges() {
        // >= 10^4 edges at p = 0.75 within 4 standard errors.
        let spec = build_spec(Geometry::Square, 80, 80).unwrap();
        let config = sample_edges(&spec, 0.75, 8).unwrap();
        let (present, total) = config.interior_edge_stats();
        assert!(total >= 10_000);
        let f = present as f64 / total as f64;
        let sigma = (0.75 * 0.25 / total as f64).sqrt();
        assert!((f - 0.75).abs() <= 4.0 * sigma, "fraction {f}");
    }

    #[test]
    fn out_of_bounds_edges_present() {
        let spec = build_spec(Geometry::Square, 4, 4).unwrap();
        let config = sample_edges(&spec, 0.0, 5).unwrap();
        // Exterior lateral edge on the left of column 0 and right of the last
        // column; exit edge above the top row.
        assert!(config.x_edge_left(0, 2, false));
        assert!(config.x_edge_right(3, 2));
        assert!(config.up_edge(1, 3));
        // Interior edges all missing at p = 0.
        assert!(!config.x_edge_right(0, 2));
        assert!(!config.up_edge(1, 1));
    }

    #[test]
    fn trapping_requires_missing_up_and_lateral() {
        let spec = build_spec(Geometry::Square, 5, 5).unwrap();
        let v = Vertex::new(2, 2);
        // Up missing, both laterals missing.
        let config = EdgeConfigBuilder::fully_connected(&spec)
            .up_edge(2, 2, false)
            .x_edge(1, 2, false)
            .x_edge(2, 2, false)
            .build();
        assert!(is_trapping_vertex(&config, v).unwrap());
        // Up missing, both laterals present: escapes laterally.
        let config = EdgeConfigBuilder::fully_connected(&spec)
            .up_edge(2, 2, false)
            .build();
        assert!(!is_trapping_vertex(&config, v).unwrap());
        // All edges present.
        let config = EdgeConfigBuilder::fully_connected(&spec).build();
        assert!(!is_trapping_vertex(&config, v).unwrap());
        // Up missing and one lateral missing.
        let config = EdgeConfigBuilder::fully_connected(&spec)
            .up_edge(2, 2, false)
            .x_edge(2, 2, false)
            .build();
        assert!(is_trapping_vertex(&config, v).unwrap());
        // Out of bounds reports an error.
        assert!(is_trapping_vertex(&config, Vertex::new(9, 0)).is_err());
    }

    #[test]
    fn honeycomb_trapping_uses_diagonals() {
        let spec = build_spec(Geometry::Honeycomb, 5, 5).unwrap();
        let config = EdgeConfigBuilder::fully_connected(&spec)
            .up_edge(2, 2, false)
            .diag_left(2, 2, false)
            .build();
        assert!(config.is_trapping(2, 2));
        let config = EdgeConfigBuilder::fully_connected(&spec)
            .up_edge(2, 2, false)
            .build();
        assert!(!config.is_trapping(2, 2));
    }

    #[test]
    fn record_round_trips_through_json() {
        let spec = build_spec(Geometry::Nanotube, 8, 10).unwrap();
        let config = sample_edges(&spec, 0.85, 4242).unwrap();
        let record = config.to_record().unwrap();
        let json = serde_json::to_string(&record).unwrap();
        let back: EdgeRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.reconstruct().unwrap(), config);
        // Hand-built configs have no compact record.
        let built = EdgeConfigBuilder::fully_connected(&spec).build();
        assert!(built.to_record().is_none());
    }

    #[test]
    fn padding_keeps_window_realization() {
        let spec = build_spec(Geometry::Square, 6, 6).unwrap();
        let bare = sample_edges(&spec, 0.5, 2718).unwrap();
        let padded = sample_edges_padded(&spec, 0.5, 2718, 3).unwrap();
        assert_eq!(padded.sim_nx(), 12);
        for y in 0..6 {
            for x in 0..5 {
                assert_eq!(bare.x_edge_right(x, y), padded.x_edge_right(x + 3, y));
            }
            for x in 0..6 {
                if y < 5 {
                    assert_eq!(bare.up_edge(x, y), padded.up_edge(x + 3, y));
                }
            }
        }
        // Padding columns are fully connected.
        assert!(padded.x_edge_right(0, 0) && padded.up_edge(1, 0));
        // Periodic geometries reject padding.
        let tube = build_spec(Geometry::Nanotube, 6, 6).unwrap();
        assert!(sample_edges_padded(&tube, 0.5, 1, 2).is_err());
    }

    #[test]
    fn double_draw_requires_both_legs() {
        let mut spec = build_spec(Geometry::Nanotube, 60, 60).unwrap();
        let single = sample_edges(&spec, 0.8, 12).unwrap();
        spec.diagonal_sampling = DiagonalSampling::Double;
        let double = sample_edges(&spec, 0.8, 12).unwrap();
        // Double sampling can only remove moves relative to single sampling.
        let mut single_present = 0usize;
        let mut double_present = 0usize;
        for y in 0..59 {
            for x in 0..60 {
                assert!(!(double.diag_left(x, y) && !single.diag_left(x, y)));
                single_present += single.diag_left(x, y) as usize;
                double_present += double.diag_left(x, y) as usize;
            }
        }
        // The double-draw fraction is near p^2 = 0.64.
        let total = 60.0 * 59.0;
        let f_single = single_present as f64 / total;
        let f_double = double_present as f64 / total;
        assert!((f_single - 0.8).abs() < 0.03, "single {f_single}");
        assert!((f_double - 0.64).abs() < 0.03, "double {f_double}");
    }

    #[test]
    fn rejects_bad_probability() {
        let spec = build_spec(Geometry::Square, 4, 4).unwrap();
        assert!(sample_edges(&spec, -0.1, 0).is_err());
        assert!(sample_edges(&spec, 1.1, 0).is_err());
    }
}
