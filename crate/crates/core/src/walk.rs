//! Shift operators and full walk steps on complete and broken lattices.
//!
//! One step is an x substep (coin, then conditional lateral shift) followed
//! by a y substep (directed shift, with a coin for r >= 2). Honeycomb and
//! nanotube geometries replace the lateral shift with the composite diagonal
//! shift, so each of their steps advances up to two rows.
//!
//! A component whose move is blocked by a missing edge transfers onto a
//! self-looping edge of its vertex. Self-loop edges do not couple back into
//! the transport basis, so the parked probability joins a per-vertex trapped
//! field and never re-enters the walk. Each substep therefore attenuates the
//! mobile amplitude by one bond-probability factor, which is what collapses
//! the percolation probability to `p^(2n)` for even mildly diluted regions.
//! Because a component leaves its register either by moving or by parking,
//! every register has exactly one source and the step conserves
//! `norm_inside + exited` to rounding on every configuration. Amplitude
//! shifted out of the simulated region is removed and accumulated in
//! `exited`.

use num_complex::Complex64;

use crate::coin::{coin_y, theta_field_dims, CoinParams, ThetaField};
use crate::error::{Error, Result};
use crate::lattice::{EdgeConfig, Geometry, LatticeSpec, Vertex};

/// Initial spinor `cos(delta/2)|down> + e^{i eta} sin(delta/2)|up>` placed at
/// `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub delta: f64,
    pub eta: f64,
    pub origin: Vertex,
}

impl InitialState {
    pub fn new(delta: f64, eta: f64, origin: Vertex) -> Self {
        InitialState { delta, eta, origin }
    }

    /// `|down>` at `origin`.
    pub fn down_at(origin: Vertex) -> Self {
        InitialState::new(0.0, 0.0, origin)
    }

    /// `|up>` at `origin`.
    pub fn up_at(origin: Vertex) -> Self {
        InitialState::new(std::f64::consts::PI, 0.0, origin)
    }

    /// `(|down> + i |up>)/sqrt(2)`.
    pub fn symmetric_at(origin: Vertex) -> Self {
        InitialState::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, origin)
    }

    /// `(|down> + |up>)/sqrt(2)`: the state whose distribution is exactly
    /// mirror-symmetric in x under the coin family used here.
    pub fn equal_at(origin: Vertex) -> Self {
        InitialState::new(std::f64::consts::FRAC_PI_2, 0.0, origin)
    }

    pub fn spinor(&self) -> (Complex64, Complex64) {
        let down = Complex64::new((self.delta / 2.0).cos(), 0.0);
        let up = Complex64::from_polar((self.delta / 2.0).sin(), self.eta);
        (down, up)
    }
}

/// Default walker origin: bottom row, center column of the simulated region.
pub fn default_origin(config: &EdgeConfig) -> Vertex {
    Vertex::new(config.sim_nx() / 2, 0)
}

/// Two complex amplitude fields over the simulated region, the per-vertex
/// trapped probability, and the cumulative probability absorbed at the
/// region boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub n_x: usize,
    pub n_y: usize,
    pub psi_down: Vec<Complex64>,
    pub psi_up: Vec<Complex64>,
    /// Probability parked on the self-loop edges of each vertex.
    pub trapped: Vec<f64>,
    pub exited: f64,
    pub t: usize,
}

impl WalkState {
    pub fn new_at(n_x: usize, n_y: usize, init: &InitialState) -> Result<Self> {
        if init.origin.x >= n_x || init.origin.y >= n_y {
            return Err(Error::VertexOutOfBounds { x: init.origin.x, y: init.origin.y, n_x, n_y });
        }
        let mut psi_down = vec![Complex64::new(0.0, 0.0); n_x * n_y];
        let mut psi_up = psi_down.clone();
        let (down, up) = init.spinor();
        let i = init.origin.y * n_x + init.origin.x;
        psi_down[i] = down;
        psi_up[i] = up;
        Ok(WalkState {
            n_x,
            n_y,
            psi_down,
            psi_up,
            trapped: vec![0.0; n_x * n_y],
            exited: 0.0,
            t: 0,
        })
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize) -> usize {
        y * self.n_x + x
    }

    /// Probability of finding the walker at `(x, y)`, mobile or trapped.
    #[inline]
    pub fn probability(&self, x: usize, y: usize) -> f64 {
        let i = self.idx(x, y);
        self.psi_down[i].norm_sqr() + self.psi_up[i].norm_sqr() + self.trapped[i]
    }

    /// On-lattice probability still carried by the amplitude fields.
    pub fn mobile_norm(&self) -> f64 {
        self.psi_down.iter().map(|a| a.norm_sqr()).sum::<f64>()
            + self.psi_up.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    /// Total trapped probability.
    pub fn trapped_total(&self) -> f64 {
        self.trapped.iter().sum()
    }

    /// Total on-lattice probability (mobile plus trapped).
    pub fn norm_inside(&self) -> f64 {
        self.mobile_norm() + self.trapped_total()
    }

    /// `|norm_inside + exited - 1|`.
    pub fn bookkeeping_defect(&self) -> f64 {
        (self.norm_inside() + self.exited - 1.0).abs()
    }

    fn check_config(&self, config: &EdgeConfig) -> Result<()> {
        if config.sim_nx() != self.n_x || config.sim_ny() != self.n_y {
            return Err(Error::ConfigMismatch {
                got_nx: config.sim_nx(),
                got_ny: config.sim_ny(),
                want_nx: self.n_x,
                want_ny: self.n_y,
            });
        }
        Ok(())
    }
}

/// State with unit amplitude at the origin of the spec's region.
pub fn init_state(spec: &LatticeSpec, init: &InitialState) -> Result<WalkState> {
    WalkState::new_at(spec.n_x, spec.n_y, init)
}

/// State sized for the (possibly padded) simulated region of `config`.
pub fn init_state_for(config: &EdgeConfig, init: &InitialState) -> Result<WalkState> {
    WalkState::new_at(config.sim_nx(), config.sim_ny(), init)
}

/// Boundary handling for a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// Absorb amplitude leaving the region (periodic x for nanotubes).
    Standard,
    /// Wrap both axes; nothing exits. Used for operator-level verification on
    /// closed systems.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// All remaining mobile probability is below the stationarity tolerance
    /// or parked on trapping self-loops.
    Converged,
    MaxSteps,
}

/// Evolution policy: step budget and stationarity tolerance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvolvePolicy {
    pub max_steps: usize,
    pub eps_stat: f64,
}

impl EvolvePolicy {
    /// `max_steps = 4 (n_x + n_y)`, `eps_stat = 1e-8`.
    pub fn default_for(n_x: usize, n_y: usize) -> Self {
        EvolvePolicy { max_steps: 4 * (n_x + n_y), eps_stat: 1e-8 }
    }

    pub fn default_for_config(config: &EdgeConfig) -> Self {
        Self::default_for(config.sim_nx(), config.sim_ny())
    }

    pub fn with_step_budget(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }
}

#[inline]
fn zeroed(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

#[inline]
fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

fn coin_pass(state: &mut WalkState, cos: &[f64], sin: &[f64]) {
    for i in 0..state.psi_down.len() {
        let d = state.psi_down[i];
        let u = state.psi_up[i];
        if is_zero(d) && is_zero(u) {
            continue;
        }
        let c = cos[i];
        let s = sin[i];
        // [[c, -is], [-is, c]]
        state.psi_down[i] = Complex64::new(c * d.re + s * u.im, c * d.im - s * u.re);
        state.psi_up[i] = Complex64::new(s * d.im + c * u.re, -s * d.re + c * u.im);
    }
}

fn shift_x_pass(state: &mut WalkState, config: &EdgeConfig, mode: StepMode) {
    let (nx, ny) = (state.n_x, state.n_y);
    let wrap = config.spec().periodic_x() || mode == StepMode::Closed;
    let mut nd = zeroed(nx * ny);
    let mut nu = zeroed(nx * ny);
    let mut exited = 0.0;
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            let d = state.psi_down[i];
            let u = state.psi_up[i];
            if is_zero(d) && is_zero(u) {
                continue;
            }
            // Down component traverses the left edge.
            if !is_zero(d) {
                if config.x_edge_left(x, y, wrap) {
                    if x > 0 {
                        nd[i - 1] += d;
                    } else if wrap {
                        nd[i + nx - 1] += d;
                    } else {
                        exited += d.norm_sqr();
                    }
                } else {
                    state.trapped[i] += d.norm_sqr();
                }
            }
            // Up component traverses the right edge.
            if !is_zero(u) {
                if config.x_edge_right(x, y) {
                    if x + 1 < nx {
                        nu[i + 1] += u;
                    } else if wrap {
                        nu[i + 1 - nx] += u;
                    } else {
                        exited += u.norm_sqr();
                    }
                } else {
                    state.trapped[i] += u.norm_sqr();
                }
            }
        }
    }
    state.psi_down = nd;
    state.psi_up = nu;
    state.exited += exited;
}

fn shift_diag_pass(state: &mut WalkState, config: &EdgeConfig, mode: StepMode) {
    let (nx, ny) = (state.n_x, state.n_y);
    let wrap_x = config.spec().periodic_x() || mode == StepMode::Closed;
    let wrap_y = mode == StepMode::Closed;
    let mut nd = zeroed(nx * ny);
    let mut nu = zeroed(nx * ny);
    let mut exited = 0.0;
    for y in 0..ny {
        let ty = if y + 1 < ny {
            Some(y + 1)
        } else if wrap_y {
            Some(0)
        } else {
            None
        };
        for x in 0..nx {
            let i = y * nx + x;
            let d = state.psi_down[i];
            let u = state.psi_up[i];
            if !is_zero(d) {
                if config.diag_left(x, y) {
                    let tx = if x > 0 {
                        Some(x - 1)
                    } else if wrap_x {
                        Some(nx - 1)
                    } else {
                        None
                    };
                    match (tx, ty) {
                        (Some(tx), Some(ty)) => nd[ty * nx + tx] += d,
                        _ => exited += d.norm_sqr(),
                    }
                } else {
                    state.trapped[i] += d.norm_sqr();
                }
            }
            if !is_zero(u) {
                if config.diag_right(x, y) {
                    let tx = if x + 1 < nx {
                        Some(x + 1)
                    } else if wrap_x {
                        Some(0)
                    } else {
                        None
                    };
                    match (tx, ty) {
                        (Some(tx), Some(ty)) => nu[ty * nx + tx] += u,
                        _ => exited += u.norm_sqr(),
                    }
                } else {
                    state.trapped[i] += u.norm_sqr();
                }
            }
        }
    }
    state.psi_down = nd;
    state.psi_up = nu;
    state.exited += exited;
}

fn shift_y_directed_pass(state: &mut WalkState, config: &EdgeConfig, mode: StepMode) {
    let (nx, ny) = (state.n_x, state.n_y);
    let wrap_y = mode == StepMode::Closed;
    let mut nd = zeroed(nx * ny);
    let mut nu = zeroed(nx * ny);
    let mut exited = 0.0;
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            let d = state.psi_down[i];
            let u = state.psi_up[i];
            if is_zero(d) && is_zero(u) {
                continue;
            }
            if config.up_edge(x, y) {
                if y + 1 < ny {
                    nd[i + nx] += d;
                    nu[i + nx] += u;
                } else if wrap_y {
                    nd[x] += d;
                    nu[x] += u;
                } else {
                    exited += d.norm_sqr() + u.norm_sqr();
                }
            } else {
                // The spinor transfers onto the vertex's self-looping edges
                // and drops out of the transport basis.
                state.trapped[i] += d.norm_sqr() + u.norm_sqr();
            }
        }
    }
    state.psi_down = nd;
    state.psi_up = nu;
    state.exited += exited;
}

fn coin_shift_y_pass(state: &mut WalkState, config: &EdgeConfig, alpha: f64, beta: f64, mode: StepMode) {
    let (nx, ny) = (state.n_x, state.n_y);
    let wrap_y = mode == StepMode::Closed;
    let mut nd = zeroed(nx * ny);
    let mut nu = zeroed(nx * ny);
    let mut exited = 0.0;
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            let d = state.psi_down[i];
            let u = state.psi_up[i];
            if is_zero(d) && is_zero(u) {
                continue;
            }
            // [[alpha, beta], [beta, -alpha]] on (|+> = down, |loop> = up)
            let plus = alpha * d + beta * u;
            let stay = beta * d - alpha * u;
            nu[i] += stay;
            if config.up_edge(x, y) {
                if y + 1 < ny {
                    nd[i + nx] += plus;
                } else if wrap_y {
                    nd[x] += plus;
                } else {
                    exited += plus.norm_sqr();
                }
            } else {
                state.trapped[i] += plus.norm_sqr();
            }
        }
    }
    state.psi_down = nd;
    state.psi_up = nu;
    state.exited += exited;
}

/// Applies the x coin at every vertex.
pub fn apply_coin_x(state: &mut WalkState, field: &ThetaField) -> Result<()> {
    if field.values.len() != state.psi_down.len() || field.n_x != state.n_x {
        return Err(Error::ShapeMismatch { got: field.values.len(), want: state.psi_down.len() });
    }
    let (cos, sin) = field.tables();
    coin_pass(state, &cos, &sin);
    Ok(())
}

/// Lateral shift: the down component traverses the left edge of its vertex
/// and the up component the right edge. A component whose edge is missing
/// transfers onto a self-looping edge in place and its probability joins the
/// trapped field.
pub fn apply_shift_x(state: &mut WalkState, config: &EdgeConfig) -> Result<()> {
    state.check_config(config)?;
    shift_x_pass(state, config, StepMode::Standard);
    Ok(())
}

/// Directed vertical shift for r = 1: the full spinor moves one row up where
/// the up edge is present; where it is missing the spinor parks on the
/// vertex's self-loops and its probability joins the trapped field.
pub fn apply_shift_y_directed(state: &mut WalkState, config: &EdgeConfig) -> Result<()> {
    state.check_config(config)?;
    shift_y_directed_pass(state, config, StepMode::Standard);
    Ok(())
}

/// Directed coin plus shift for r >= 2: applies the directed coin, then moves
/// the `|+>` (down) component up where possible while the loop component
/// stays in place. A blocked `|+>` component parks like in the r = 1 shift.
pub fn apply_coin_shift_y_r2(state: &mut WalkState, config: &EdgeConfig, r: u32) -> Result<()> {
    state.check_config(config)?;
    let c = coin_y(r)?;
    coin_shift_y_pass(state, config, c.a.re, c.b.re, StepMode::Standard);
    Ok(())
}

/// Prepared per-run stepping context: coin tables over the simulated region
/// and the resolved step mode.
#[derive(Debug, Clone)]
pub struct StepContext {
    cos: Vec<f64>,
    sin: Vec<f64>,
    r: u32,
    coin_y: Option<(f64, f64)>,
    mode: StepMode,
}

impl StepContext {
    pub fn new(config: &EdgeConfig, coins: &CoinParams) -> Result<Self> {
        Self::with_mode(config, coins, StepMode::Standard)
    }

    pub fn closed(config: &EdgeConfig, coins: &CoinParams) -> Result<Self> {
        Self::with_mode(config, coins, StepMode::Closed)
    }

    pub fn with_mode(config: &EdgeConfig, coins: &CoinParams, mode: StepMode) -> Result<Self> {
        if coins.r < 1 {
            return Err(Error::SelfLoopCountOutOfRange(coins.r));
        }
        let field = theta_field_dims(config.sim_nx(), config.sim_ny(), coins);
        let (cos, sin) = field.tables();
        let coin = if coins.r >= 2 {
            let c = coin_y(coins.r)?;
            Some((c.a.re, c.b.re))
        } else {
            None
        };
        Ok(StepContext { cos, sin, r: coins.r, coin_y: coin, mode })
    }

    /// One full step; increments `state.t`.
    pub fn step(&self, state: &mut WalkState, config: &EdgeConfig) -> Result<()> {
        state.check_config(config)?;
        if self.cos.len() != state.psi_down.len() {
            return Err(Error::ShapeMismatch { got: self.cos.len(), want: state.psi_down.len() });
        }
        coin_pass(state, &self.cos, &self.sin);
        match config.spec().geometry {
            Geometry::Square => shift_x_pass(state, config, self.mode),
            Geometry::Honeycomb | Geometry::Nanotube => shift_diag_pass(state, config, self.mode),
        }
        match self.coin_y {
            None => shift_y_directed_pass(state, config, self.mode),
            Some((alpha, beta)) => coin_shift_y_pass(state, config, alpha, beta, self.mode),
        }
        state.t += 1;
        Ok(())
    }

    pub fn r(&self) -> u32 {
        self.r
    }
}

/// One full step of the walk, dispatching on the geometry.
pub fn step(state: &mut WalkState, config: &EdgeConfig, coins: &CoinParams) -> Result<()> {
    StepContext::new(config, coins)?.step(state, config)
}

/// Honeycomb/nanotube step: coin, composite diagonal shift (down component to
/// `(x-1, y+1)`, up component to `(x+1, y+1)`, self-loop where the move is
/// missing), then the directed vertical shift. Nanotubes wrap columns mod
/// `n_x`.
pub fn step_honeycomb(state: &mut WalkState, config: &EdgeConfig, coins: &CoinParams) -> Result<()> {
    if !config.spec().uses_diagonals() {
        return Err(Error::GeometryMismatch(config.spec().geometry));
    }
    step(state, config, coins)
}

/// True iff both traversal edges of the coming lateral/diagonal substep are
/// missing at `(x, y)`: the coin has nowhere to send the spinor, so the whole
/// vertex parks at the next substep.
fn fully_blocked(config: &EdgeConfig, x: usize, y: usize) -> bool {
    if config.spec().uses_diagonals() {
        !config.diag_left(x, y) && !config.diag_right(x, y)
    } else {
        let wrap = config.spec().periodic_x();
        !config.x_edge_left(x, y, wrap) && !config.x_edge_right(x, y)
    }
}

/// Per-vertex mobile probability that is certain to park at the next
/// substep (both traversal edges missing), so it already counts as trapped.
pub fn blocked_mobile_map(state: &WalkState, config: &EdgeConfig) -> Vec<f64> {
    let mut map = vec![0.0; state.psi_down.len()];
    for y in 0..state.n_y {
        for x in 0..state.n_x {
            if fully_blocked(config, x, y) {
                let i = y * state.n_x + x;
                map[i] = state.psi_down[i].norm_sqr() + state.psi_up[i].norm_sqr();
            }
        }
    }
    map
}

/// Mobile probability that is not yet certain to be trapped.
pub fn stray_mass(state: &WalkState, config: &EdgeConfig) -> f64 {
    let mut sum = 0.0;
    for y in 0..state.n_y {
        for x in 0..state.n_x {
            if !fully_blocked(config, x, y) {
                let i = y * state.n_x + x;
                sum += state.psi_down[i].norm_sqr() + state.psi_up[i].norm_sqr();
            }
        }
    }
    sum
}

/// Steps until the in-transit probability falls below `eps_stat` (everything
/// left is trapped) or the step budget runs out, whichever comes first.
pub fn evolve(
    state: &mut WalkState,
    config: &EdgeConfig,
    coins: &CoinParams,
    policy: &EvolvePolicy,
) -> Result<Termination> {
    let ctx = StepContext::new(config, coins)?;
    loop {
        if stray_mass(state, config) <= policy.eps_stat {
            return Ok(Termination::Converged);
        }
        if state.t >= policy.max_steps {
            return Ok(Termination::MaxSteps);
        }
        ctx.step(state, config)?;
    }
}
