//! Fixed-step Euler/RK4 core with schedule-aware step clipping.
//!
//! Switching networks are piecewise continuous in time; every integration
//! step is shortened to land exactly on the next switch time so that no
//! Runge-Kutta stage ever samples across a weight discontinuity. Within one
//! step the active segment is pinned at the step's start time.

use super::{
    damped_rhs_into, double_rhs_into, saturate, single_rhs_into, Method, Model, Network,
    SaturationSpec, SimConfig, SimError, Trajectory,
};
use crate::graph::{GraphSchedule, WeightFn};

enum Weights<'a> {
    Fixed(&'a [f64]),
    Switching {
        sched: &'a GraphSchedule,
        seg: usize,
        reduced_t0: f64,
        step_t0: f64,
        cached_t: f64,
        buf: Vec<f64>,
    },
}

impl<'a> Weights<'a> {
    fn for_network(net: &Network<'a>) -> Self {
        match net {
            Network::Fixed(g) => Weights::Fixed(g.weights()),
            Network::Switching(s) => Weights::Switching {
                sched: s,
                seg: 0,
                reduced_t0: 0.0,
                step_t0: 0.0,
                cached_t: f64::NAN,
                buf: vec![0.0; s.n() * s.n()],
            },
        }
    }

    fn begin_step(&mut self, t: f64) -> Result<(), SimError> {
        if let Weights::Switching {
            sched,
            seg,
            reduced_t0,
            step_t0,
            cached_t,
            ..
        } = self
        {
            let (s, r) = sched.step_context(t)?;
            *seg = s;
            *reduced_t0 = r;
            *step_t0 = t;
            *cached_t = f64::NAN;
        }
        Ok(())
    }

    /// Period-reduced evaluation time for stage time `t` of the current step.
    fn reduced(&self, t: f64) -> f64 {
        match self {
            Weights::Fixed(_) => t,
            Weights::Switching {
                reduced_t0,
                step_t0,
                ..
            } => reduced_t0 + (t - step_t0),
        }
    }

    fn at(&mut self, t: f64) -> &[f64] {
        match self {
            Weights::Fixed(w) => w,
            Weights::Switching {
                sched,
                seg,
                reduced_t0,
                step_t0,
                cached_t,
                buf,
            } => {
                if *cached_t != t {
                    let r = *reduced_t0 + (t - *step_t0);
                    sched.fill_weights(*seg, r, buf);
                    *cached_t = t;
                }
                buf
            }
        }
    }

    fn next_switch_after(&self, t: f64) -> Option<f64> {
        match self {
            Weights::Fixed(_) => None,
            Weights::Switching { sched, .. } => sched.next_switch_after(t),
        }
    }
}

enum Eval<'a> {
    Single {
        sat: &'a SaturationSpec,
        y: Vec<f64>,
    },
    Double {
        s: f64,
        n: usize,
        yv: Vec<f64>,
    },
    Damped {
        fns: &'a [WeightFn],
        d: Vec<f64>,
    },
}

impl Eval<'_> {
    fn eval(&mut self, t: f64, x: &[f64], dx: &mut [f64], w: &mut Weights) {
        match self {
            Eval::Single { sat, y } => {
                sat.apply(x, y);
                single_rhs_into(w.at(t), y, dx);
            }
            Eval::Double { s, n, yv } => {
                for (k, &v) in x[*n..].iter().enumerate() {
                    yv[k] = saturate(v, *s);
                }
                double_rhs_into(w.at(t), x, yv, dx);
            }
            Eval::Damped { fns, d } => {
                let r = w.reduced(t);
                for (k, f) in fns.iter().enumerate() {
                    d[k] = f.eval(r);
                }
                damped_rhs_into(w.at(t), x, d, dx);
            }
        }
    }
}

pub(crate) fn run(
    model: Model,
    x0: &[f64],
    net: &Network,
    sat: &SaturationSpec,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    let n = net.node_count();
    let eval = match model {
        Model::Single => Eval::Single {
            sat,
            y: vec![0.0; n],
        },
        Model::Double => Eval::Double {
            s: sat.level(0),
            n,
            yv: vec![0.0; n],
        },
    };
    integrate(model, n, x0, net, eval, cfg)
}

/// Simulates the damped consensus system
/// `dx_i = sum_j a_ij(t)(x_j - x_i) - d_i(t) x_i` over a switching schedule.
/// Damping functions are evaluated at the same period-reduced time as the
/// schedule weights.
pub fn simulate_damped(
    x0: &[f64],
    sched: &GraphSchedule,
    damping: &[WeightFn],
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    let n = sched.n();
    if x0.len() != n {
        return Err(SimError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    if damping.len() != n {
        return Err(SimError::BadDamping {
            expected: n,
            got: damping.len(),
        });
    }
    let eval = Eval::Damped {
        fns: damping,
        d: vec![0.0; n],
    };
    integrate(Model::Single, n, x0, &Network::Switching(sched), eval, cfg)
}

fn integrate(
    model: Model,
    n_nodes: usize,
    x0: &[f64],
    net: &Network,
    mut eval: Eval,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(SimError::BadStep(cfg.dt));
    }
    if !(cfg.t_end.is_finite() && cfg.t_end > 0.0) {
        return Err(SimError::BadHorizon(cfg.t_end));
    }
    if cfg.record_stride == 0 {
        return Err(SimError::BadStride);
    }
    let dim = x0.len();
    let mut weights = Weights::for_network(net);
    let mut x = x0.to_vec();
    let mut xtmp = vec![0.0; dim];
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];

    let mut traj = Trajectory::new(model, n_nodes, cfg.dt);
    traj.push(0.0, &x);

    let eps = cfg.dt * 1e-9;
    let mut t = 0.0;
    let mut step_idx: usize = 0;
    while cfg.t_end - t > eps {
        let mut h = cfg.dt.min(cfg.t_end - t);
        let mut boundary = None;
        if let Some(b) = weights.next_switch_after(t) {
            if b <= t + h + eps && b < cfg.t_end - eps {
                h = b - t;
                boundary = Some(b);
            }
        }
        weights.begin_step(t)?;
        match cfg.method {
            Method::Euler => {
                eval.eval(t, &x, &mut k1, &mut weights);
                for i in 0..dim {
                    x[i] += h * k1[i];
                }
            }
            Method::Rk4 => {
                let half = 0.5 * h;
                eval.eval(t, &x, &mut k1, &mut weights);
                for i in 0..dim {
                    xtmp[i] = x[i] + half * k1[i];
                }
                eval.eval(t + half, &xtmp, &mut k2, &mut weights);
                for i in 0..dim {
                    xtmp[i] = x[i] + half * k2[i];
                }
                eval.eval(t + half, &xtmp, &mut k3, &mut weights);
                for i in 0..dim {
                    xtmp[i] = x[i] + h * k3[i];
                }
                eval.eval(t + h, &xtmp, &mut k4, &mut weights);
                let sixth = h / 6.0;
                for i in 0..dim {
                    x[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        step_idx += 1;
        t = match boundary {
            Some(b) => b,
            None => {
                let next = t + h;
                if cfg.t_end - next <= eps {
                    cfg.t_end
                } else {
                    next
                }
            }
        };
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SimError::NonFinite { t });
        }
        let done = cfg.t_end - t <= eps;
        if step_idx.is_multiple_of(cfg.record_stride) || done {
            traj.push(t, &x);
        }
    }
    traj.set_steps(step_idx);
    Ok(traj)
}
