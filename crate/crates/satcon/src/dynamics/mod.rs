//! Saturated consensus dynamics: the output-saturation nonlinearity, the
//! single- and double-integrator right-hand sides, and a deterministic
//! fixed-step integrator whose steps never straddle a schedule switch time.

mod integrator;

pub use integrator::simulate_damped;

use crate::graph::{Graph, GraphSchedule, WeightFn};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("state has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("saturation level {0} is not a positive finite number")]
    BadLevel(f64),
    #[error("saturation spec is empty")]
    EmptyLevels,
    #[error("this model requires homogeneous saturation levels")]
    HeterogeneousLevels,
    #[error("double-integrator model requires a symmetric (undirected) network")]
    AsymmetricNetwork,
    #[error("step size {0} is not a positive finite number")]
    BadStep(f64),
    #[error("horizon {0} admits no integration step")]
    BadHorizon(f64),
    #[error("record stride must be positive")]
    BadStride,
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("damping vector has {got} entries, expected {expected}")]
    BadDamping { expected: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Output saturation `sign(x) * min(|x|, s)`: identity on `[-s, s]`, clipped
/// outside. Odd, continuous, nondecreasing, strictly increasing on `[-s, s]`.
#[inline]
pub fn saturate(x: f64, s: f64) -> f64 {
    x.clamp(-s, s)
}

/// Per-agent saturation levels `s_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationSpec {
    levels: Vec<f64>,
}

impl SaturationSpec {
    pub fn new(levels: Vec<f64>) -> Result<Self, SimError> {
        if levels.is_empty() {
            return Err(SimError::EmptyLevels);
        }
        for &s in &levels {
            if !(s.is_finite() && s > 0.0) {
                return Err(SimError::BadLevel(s));
            }
        }
        Ok(Self { levels })
    }

    pub fn homogeneous(n: usize, s: f64) -> Result<Self, SimError> {
        Self::new(vec![s; n])
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> f64 {
        self.levels[i]
    }

    /// True iff all levels are equal.
    pub fn is_homogeneous(&self) -> bool {
        self.levels.iter().all(|&s| s == self.levels[0])
    }

    pub fn min_level(&self) -> f64 {
        self.levels.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// True iff no two levels coincide.
    pub fn levels_distinct(&self) -> bool {
        let mut sorted = self.levels.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Saturates a state vector in place into `out`.
    pub(crate) fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (k, (&v, &s)) in x.iter().zip(&self.levels).enumerate() {
            out[k] = saturate(v, s);
        }
    }
}

/// Integration method for the fixed-step integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Method {
    Euler,
    Rk4,
}

/// Which dynamics a state vector encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Model {
    Single,
    Double,
}

/// Fixed-step simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    pub record_stride: usize,
}

/// Cap on stored samples used when choosing the default record stride.
const MAX_STORED_SAMPLES: f64 = 20_000.0;

impl SimConfig {
    /// RK4 configuration with a record stride keeping stored samples under
    /// twenty thousand.
    pub fn new(dt: f64, t_end: f64) -> Result<Self, SimError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::BadStep(dt));
        }
        if !(t_end.is_finite() && t_end > 0.0 && t_end / dt >= 1.0) {
            return Err(SimError::BadHorizon(t_end));
        }
        let steps = (t_end / dt).ceil();
        let record_stride = ((steps / MAX_STORED_SAMPLES).ceil() as usize).max(1);
        Ok(Self {
            dt,
            t_end,
            method: Method::Rk4,
            record_stride,
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self, SimError> {
        if stride == 0 {
            return Err(SimError::BadStride);
        }
        self.record_stride = stride;
        Ok(self)
    }
}

/// The network a simulation runs over: a fixed graph or a switching schedule.
#[derive(Debug, Clone)]
pub enum Network<'a> {
    Fixed(&'a Graph),
    Switching(&'a GraphSchedule),
}

impl Network<'_> {
    pub fn node_count(&self) -> usize {
        match self {
            Network::Fixed(g) => g.n(),
            Network::Switching(s) => s.n(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Network::Fixed(g) => !g.is_directed(),
            Network::Switching(s) => s.is_symmetric(),
        }
    }
}

/// A recorded state history: strictly increasing sample times and one state
/// row per sample (`n` columns for single integrators, `[x; v]` with `2n`
/// columns for double integrators).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    model: Model,
    n: usize,
    dt: f64,
    steps: usize,
    times: Vec<f64>,
    states: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn new(model: Model, n: usize, dt: f64) -> Self {
        Self {
            model,
            n,
            dt,
            steps: 0,
            times: Vec::new(),
            states: Vec::new(),
        }
    }

    pub(crate) fn from_parts(
        model: Model,
        n: usize,
        dt: f64,
        times: Vec<f64>,
        states: Vec<f64>,
    ) -> Self {
        Self {
            model,
            n,
            dt,
            steps: 0,
            times,
            states,
        }
    }

    pub(crate) fn set_steps(&mut self, steps: usize) {
        self.steps = steps;
    }

    /// Number of integration steps taken (not the number of stored samples).
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub(crate) fn push(&mut self, t: f64, state: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(state);
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Number of agents (not the state width).
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn state_dim(&self) -> usize {
        match self.model {
            Model::Single => self.n,
            Model::Double => 2 * self.n,
        }
    }

    /// Integration step the trajectory was produced with.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, k: usize) -> &[f64] {
        let w = self.state_dim();
        &self.states[k * w..(k + 1) * w]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Position block of sample `k`.
    pub fn positions(&self, k: usize) -> &[f64] {
        &self.state(k)[..self.n]
    }

    /// Velocity block of sample `k`; empty for single integrators.
    pub fn velocities(&self, k: usize) -> &[f64] {
        match self.model {
            Model::Single => &[],
            Model::Double => &self.state(k)[self.n..],
        }
    }

    /// `max_i x_i - min_i x_i` over the position block of sample `k`.
    pub fn position_disagreement(&self, k: usize) -> f64 {
        spread(self.positions(k))
    }

    /// Velocity spread of sample `k`; zero for single integrators.
    pub fn velocity_disagreement(&self, k: usize) -> f64 {
        match self.model {
            Model::Single => 0.0,
            Model::Double => spread(self.velocities(k)),
        }
    }

    /// The larger of position and velocity spread at sample `k`.
    pub fn disagreement(&self, k: usize) -> f64 {
        self.position_disagreement(k)
            .max(self.velocity_disagreement(k))
    }
}

/// `max - min` of a slice.
pub fn spread(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// Arithmetic mean, summed left to right.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Single-integrator consensus derivative under output saturation:
/// `dx_i = sum_j w_ij (sat_j(x_j) - sat_i(x_i))`.
pub fn single_rhs(x: &[f64], weights: &[f64], sat: &SaturationSpec) -> Result<Vec<f64>, SimError> {
    let n = x.len();
    if sat.len() != n {
        return Err(SimError::DimensionMismatch {
            expected: n,
            got: sat.len(),
        });
    }
    if weights.len() != n * n {
        return Err(SimError::DimensionMismatch {
            expected: n * n,
            got: weights.len(),
        });
    }
    let mut y = vec![0.0; n];
    sat.apply(x, &mut y);
    let mut dx = vec![0.0; n];
    single_rhs_into(weights, &y, &mut dx);
    Ok(dx)
}

#[inline]
pub(crate) fn single_rhs_into(weights: &[f64], y: &[f64], dx: &mut [f64]) {
    let n = y.len();
    for i in 0..n {
        let row = &weights[i * n..(i + 1) * n];
        let yi = y[i];
        let mut acc = 0.0;
        for (j, &w) in row.iter().enumerate() {
            acc += w * (y[j] - yi);
        }
        dx[i] = acc;
    }
}

/// Double-integrator consensus derivative with saturated velocity outputs:
/// `dx_i = v_i`, `dv_i = sum_j w_ij ((x_j - x_i) + (sat(v_j) - sat(v_i)))`.
/// Velocity saturation levels must be homogeneous.
pub fn double_rhs(
    state: &[f64],
    weights: &[f64],
    sat: &SaturationSpec,
) -> Result<Vec<f64>, SimError> {
    if !sat.is_homogeneous() {
        return Err(SimError::HeterogeneousLevels);
    }
    let n = sat.len();
    if state.len() != 2 * n {
        return Err(SimError::DimensionMismatch {
            expected: 2 * n,
            got: state.len(),
        });
    }
    if weights.len() != n * n {
        return Err(SimError::DimensionMismatch {
            expected: n * n,
            got: weights.len(),
        });
    }
    let s = sat.level(0);
    let mut yv = vec![0.0; n];
    for (k, &v) in state[n..].iter().enumerate() {
        yv[k] = saturate(v, s);
    }
    let mut d = vec![0.0; 2 * n];
    double_rhs_into(weights, state, &yv, &mut d);
    Ok(d)
}

#[inline]
pub(crate) fn double_rhs_into(weights: &[f64], state: &[f64], yv: &[f64], d: &mut [f64]) {
    let n = yv.len();
    let (x, v) = state.split_at(n);
    d[..n].copy_from_slice(v);
    for i in 0..n {
        let row = &weights[i * n..(i + 1) * n];
        let xi = x[i];
        let yi = yv[i];
        let mut acc = 0.0;
        for (j, &w) in row.iter().enumerate() {
            acc += w * ((x[j] - xi) + (yv[j] - yi));
        }
        d[n + i] = acc;
    }
}

/// Damped consensus derivative without saturation:
/// `dx_i = sum_j w_ij (x_j - x_i) - d_i x_i`.
#[inline]
pub(crate) fn damped_rhs_into(weights: &[f64], x: &[f64], damping: &[f64], dx: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let row = &weights[i * n..(i + 1) * n];
        let xi = x[i];
        let mut acc = -damping[i] * xi;
        for (j, &w) in row.iter().enumerate() {
            acc += w * (x[j] - xi);
        }
        dx[i] = acc;
    }
}

/// Integrates the saturated consensus dynamics from `x0` over `net`.
///
/// Steps are clipped so that no step straddles a schedule switch time; the
/// trajectory is a deterministic function of the inputs. Aborts with the
/// offending time if the state becomes non-finite.
pub fn simulate(
    model: Model,
    x0: &[f64],
    net: &Network,
    sat: &SaturationSpec,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    let n = net.node_count();
    let expected = match model {
        Model::Single => n,
        Model::Double => 2 * n,
    };
    if x0.len() != expected {
        return Err(SimError::DimensionMismatch {
            expected,
            got: x0.len(),
        });
    }
    if sat.len() != n {
        return Err(SimError::DimensionMismatch {
            expected: n,
            got: sat.len(),
        });
    }
    if model == Model::Double {
        if !sat.is_homogeneous() {
            return Err(SimError::HeterogeneousLevels);
        }
        if !net.is_symmetric() {
            return Err(SimError::AsymmetricNetwork);
        }
    }
    integrator::run(model, x0, net, sat, cfg)
}

/// Per-agent damping shape used by the damped consensus system.
pub type DampingFns = Vec<WeightFn>;
