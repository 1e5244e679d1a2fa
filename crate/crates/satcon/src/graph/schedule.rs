//! Time-varying graph schedules: piecewise segments of sinusoidal edge
//! weights, periodic repetition, and the integral-graph connectivity test.

use super::{Graph, GraphError};

/// Default threshold on the one-period edge-weight integral: any edge whose
/// period integral exceeds this has a divergent integral over `[0, inf)`.
pub const DEFAULT_INTEGRAL_EPS: f64 = 1e-9;

const SIMPSON_PANELS: usize = 1000;

/// Edge weight of the form `w(t) = c0 + c_sin * sin(t) + c_cos * cos(t)`.
///
/// Construction rejects coefficient triples that can go negative:
/// `c0 - sqrt(c_sin^2 + c_cos^2) >= 0` is required unless the function is
/// identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFn {
    c0: f64,
    c_sin: f64,
    c_cos: f64,
}

impl WeightFn {
    pub fn new(c0: f64, c_sin: f64, c_cos: f64) -> Result<Self, GraphError> {
        let ok = [c0, c_sin, c_cos].iter().all(|v| v.is_finite());
        if !ok
            || (c0 - (c_sin * c_sin + c_cos * c_cos).sqrt() < 0.0
                && !(c0 == 0.0 && c_sin == 0.0 && c_cos == 0.0))
        {
            return Err(GraphError::NegativeWeightFn { c0, c_sin, c_cos });
        }
        Ok(Self { c0, c_sin, c_cos })
    }

    pub fn constant(w: f64) -> Result<Self, GraphError> {
        Self::new(w, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Self {
            c0: 0.0,
            c_sin: 0.0,
            c_cos: 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.c0 + self.c_sin * t.sin() + self.c_cos * t.cos()
    }

    /// Lower bound of the range over all of `R`.
    pub fn min_value(&self) -> f64 {
        self.c0 - (self.c_sin * self.c_sin + self.c_cos * self.c_cos).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0.0 && self.c_sin == 0.0 && self.c_cos == 0.0
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.c0, self.c_sin, self.c_cos)
    }

    /// Antiderivative-based integral over `[a, b]`; used as a quadrature
    /// oracle in tests.
    pub fn integral_closed_form(&self, a: f64, b: f64) -> f64 {
        self.c0 * (b - a) - self.c_sin * (b.cos() - a.cos()) + self.c_cos * (b.sin() - a.sin())
    }
}

/// One piece of a schedule: the active edge weight functions on `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub entries: Vec<(usize, usize, WeightFn)>,
}

impl Segment {
    pub fn new(start: f64, end: f64, entries: Vec<(usize, usize, WeightFn)>) -> Self {
        Self {
            start,
            end,
            entries,
        }
    }
}

/// A piecewise weight schedule on `[0, period)` (repeating) or `[0, horizon)`.
///
/// Right-continuity convention: at a segment boundary the new segment's
/// weights apply. Periodic schedules repeat exactly: weight functions are
/// evaluated at the period-reduced time, so `weights_at(t + period)` equals
/// `weights_at(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSchedule {
    n: usize,
    segments: Vec<Segment>,
    period: Option<f64>,
    symmetric: bool,
}

impl GraphSchedule {
    /// Periodic schedule; the period is the end of the last segment.
    pub fn periodic(n: usize, segments: Vec<Segment>, symmetric: bool) -> Result<Self, GraphError> {
        Self::build(n, segments, true, symmetric)
    }

    /// One-shot schedule on `[0, horizon)` where the horizon is the end of the
    /// last segment.
    pub fn non_periodic(
        n: usize,
        segments: Vec<Segment>,
        symmetric: bool,
    ) -> Result<Self, GraphError> {
        Self::build(n, segments, false, symmetric)
    }

    /// A fixed graph as a one-segment periodic schedule.
    pub fn from_graph(g: &Graph, period: f64) -> Result<Self, GraphError> {
        let n = g.n();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = g.weight(i, j);
                if w > 0.0 {
                    entries.push((i, j, WeightFn::constant(w)?));
                }
            }
        }
        Self::periodic(
            n,
            vec![Segment::new(0.0, period, entries)],
            !g.is_directed(),
        )
    }

    fn build(
        n: usize,
        mut segments: Vec<Segment>,
        periodic: bool,
        symmetric: bool,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if segments.is_empty() {
            return Err(GraphError::BadSegments("no segments".into()));
        }
        if segments[0].start != 0.0 {
            return Err(GraphError::BadSegments(format!(
                "first segment starts at {}, expected 0",
                segments[0].start
            )));
        }
        for k in 0..segments.len() {
            let seg = &segments[k];
            if !seg.start.is_finite() || !seg.end.is_finite() || seg.end <= seg.start {
                return Err(GraphError::BadSegments(format!(
                    "segment [{}, {}) is empty or not finite",
                    seg.start, seg.end
                )));
            }
            if k + 1 < segments.len() && segments[k + 1].start != seg.end {
                return Err(GraphError::BadSegments(format!(
                    "gap or overlap between segment ending at {} and segment starting at {}",
                    seg.end,
                    segments[k + 1].start
                )));
            }
        }
        for seg in &mut segments {
            let mut seen = std::collections::HashSet::new();
            for &(i, j, _) in &seg.entries {
                if i >= n || j >= n || i == j {
                    return Err(GraphError::EdgeOutOfRange { i, j, n });
                }
                if !seen.insert((i, j)) {
                    return Err(GraphError::DuplicateEdge { i, j });
                }
            }
            if symmetric {
                // Mirror-complete: install (j,i) for each (i,j) that lacks it,
                // and reject contradictory pairs.
                let mut extra = Vec::new();
                for &(i, j, f) in &seg.entries {
                    match seg.entries.iter().find(|&&(a, b, _)| (a, b) == (j, i)) {
                        Some(&(_, _, g)) if g != f => {
                            return Err(GraphError::AsymmetricSchedule { i, j });
                        }
                        Some(_) => {}
                        None => {
                            if !seen.contains(&(j, i)) {
                                seen.insert((j, i));
                                extra.push((j, i, f));
                            }
                        }
                    }
                }
                seg.entries.extend(extra);
            }
            seg.entries.sort_by_key(|&(i, j, _)| (i, j));
        }
        let period = periodic.then(|| segments.last().unwrap().end);
        Ok(Self {
            n,
            segments,
            period,
            symmetric,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// End of the covered interval: the period for periodic schedules, the
    /// last segment end otherwise.
    pub fn span(&self) -> f64 {
        self.segments.last().unwrap().end
    }

    /// Maps an absolute time into `[0, span)` for periodic schedules.
    fn reduce(&self, t: f64) -> Result<f64, GraphError> {
        if t < 0.0 || !t.is_finite() {
            return Err(GraphError::NegativeTime(t));
        }
        match self.period {
            Some(p) => {
                let r = t - p * (t / p).floor();
                Ok(if r >= p { 0.0 } else { r })
            }
            None => {
                if t >= self.span() {
                    Err(GraphError::BeyondHorizon {
                        t,
                        horizon: self.span(),
                    })
                } else {
                    Ok(t)
                }
            }
        }
    }

    /// Index of the segment active at reduced time `r` (right-continuous).
    pub(crate) fn segment_index(&self, r: f64) -> usize {
        self.segments
            .iter()
            .rposition(|seg| seg.start <= r)
            .unwrap_or(0)
    }

    /// Evaluates one segment's weight functions at time `t` into a dense
    /// row-major matrix buffer.
    pub(crate) fn fill_weights(&self, seg_idx: usize, t: f64, buf: &mut [f64]) {
        buf.fill(0.0);
        for &(i, j, f) in &self.segments[seg_idx].entries {
            buf[i * self.n + j] = f.eval(t);
        }
    }

    /// Dense weight matrix at absolute time `t`.
    pub fn weights_at(&self, t: f64) -> Result<Vec<f64>, GraphError> {
        let r = self.reduce(t)?;
        let mut buf = vec![0.0; self.n * self.n];
        self.fill_weights(self.segment_index(r), r, &mut buf);
        Ok(buf)
    }

    /// Reduced time and active segment for a step starting at `t`; stage
    /// evaluations within a step stay pinned to this segment.
    pub(crate) fn step_context(&self, t: f64) -> Result<(usize, f64), GraphError> {
        let r = self.reduce(t)?;
        Ok((self.segment_index(r), r))
    }

    /// The first switch time strictly after `t` (segment boundary or period
    /// wrap). Returns `None` past the horizon of a non-periodic schedule.
    pub fn next_switch_after(&self, t: f64) -> Option<f64> {
        if t < 0.0 {
            return Some(0.0);
        }
        match self.period {
            Some(p) => {
                let k = (t / p).floor();
                let r = t - p * k;
                let base = p * k;
                for seg in &self.segments {
                    if seg.end > r && base + seg.end > t {
                        return Some(base + seg.end);
                    }
                }
                Some(base + p)
            }
            None => self.segments.iter().map(|s| s.end).find(|&e| e > t),
        }
    }

    /// Smallest lower bound over the active (not identically zero) weight
    /// functions; positive iff every active weight is bounded away from zero.
    pub fn min_active_weight(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| s.entries.iter())
            .filter(|(_, _, f)| !f.is_zero())
            .map(|(_, _, f)| f.min_value())
            .fold(f64::INFINITY, f64::min)
    }

    /// The integral graph over one period: edge `(i,j)` present (weight 1)
    /// iff the quadrature of its weight over a period exceeds `eps`.
    ///
    /// A positive one-period integral of a periodic weight implies a
    /// divergent integral over `[0, inf)`; non-periodic schedules are
    /// rejected because the infinite-horizon integral has no finite decision
    /// procedure.
    pub fn integral_graph(&self, eps: f64) -> Result<Graph, GraphError> {
        if self.period.is_none() {
            return Err(GraphError::NonPeriodicIntegral);
        }
        if !self.symmetric {
            return Err(GraphError::NonSymmetricSchedule);
        }
        if !(eps > 0.0) {
            return Err(GraphError::BadThreshold(eps));
        }
        let mut totals = std::collections::HashMap::new();
        for seg in &self.segments {
            for &(i, j, f) in &seg.entries {
                if i < j {
                    let v = simpson(|t| f.eval(t), seg.start, seg.end, SIMPSON_PANELS);
                    *totals.entry((i, j)).or_insert(0.0) += v;
                }
            }
        }
        let edges: Vec<(usize, usize, f64)> = totals
            .into_iter()
            .filter(|&(_, v)| v > eps)
            .map(|((i, j), _)| (i, j, 1.0))
            .collect();
        Graph::undirected(self.n, &edges)
    }

    pub fn is_integrally_connected(&self, eps: f64) -> Result<bool, GraphError> {
        self.integral_graph(eps)?.is_connected()
    }
}

/// Composite Simpson quadrature with `panels` parabolic panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels.max(1);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}
