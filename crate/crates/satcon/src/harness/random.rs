//! Seeded random scenario ingredients: connected graphs, strongly connected
//! digraphs, switching schedules and initial states. Everything is a pure
//! function of the supplied generator, so a fixed seed reproduces a scenario
//! bit for bit.

use super::RunError;
use crate::graph::{Graph, GraphSchedule, Segment, WeightFn};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

const MAX_GRAPH_ATTEMPTS: usize = 5000;

/// Erdos-Renyi graph with uniform weights, redrawn until connected. The edge
/// probability is gently inflated every hundred failures so termination does
/// not depend on the initial probability.
pub fn connected_graph(
    n: usize,
    edge_prob: f64,
    w_lo: f64,
    w_hi: f64,
    rng: &mut StdRng,
) -> Result<Graph, RunError> {
    let mut p = edge_prob.clamp(0.0, 1.0);
    for attempt in 0..MAX_GRAPH_ATTEMPTS {
        if attempt > 0 && attempt % 100 == 0 {
            p = (p * 1.25).min(1.0);
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((i, j, rng.gen_range(w_lo..w_hi)));
                }
            }
        }
        let g = Graph::undirected(n, &edges)?;
        if n == 1 || g.is_connected()? {
            return Ok(g);
        }
    }
    Err(RunError::RandomGraphFailed(MAX_GRAPH_ATTEMPTS))
}

/// Directed cycle through all nodes plus random extra arcs; strongly
/// connected by construction.
pub fn strongly_connected_digraph(
    n: usize,
    extra_arc_prob: f64,
    w_lo: f64,
    w_hi: f64,
    rng: &mut StdRng,
) -> Result<Graph, RunError> {
    let mut arcs: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| (i, (i + 1) % n, rng.gen_range(w_lo..w_hi)))
        .collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && (i + 1) % n != j && rng.gen_bool(extra_arc_prob) {
                arcs.push((i, j, rng.gen_range(w_lo..w_hi)));
            }
        }
    }
    Ok(Graph::directed(n, &arcs)?)
}

/// Splits the edges of a connected base graph over `segments` phases of
/// equal length with sinusoidal weights bounded away from zero, so the
/// schedule is integrally connected and satisfies the bounded-weight
/// assumption while individual instants may be disconnected.
pub fn switching_schedule(
    base: &Graph,
    segments: usize,
    period: f64,
    rng: &mut StdRng,
) -> Result<GraphSchedule, RunError> {
    let n = base.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if base.weight(i, j) > 0.0 {
                edges.push((i, j));
            }
        }
    }
    let seg_len = period / segments as f64;
    let mut entries: Vec<Vec<(usize, usize, WeightFn)>> = vec![Vec::new(); segments];
    for &(i, j) in &edges {
        let mut active_any = false;
        let home = rng.gen_range(0..segments);
        for (k, seg) in entries.iter_mut().enumerate() {
            let active = rng.gen_bool(0.7) || k == home;
            if active {
                active_any = true;
                let c0 = rng.gen_range(1.0..2.5);
                // Keep the minimum of c0 + a sin t + b cos t at or above 0.5.
                let amp = rng.gen_range(0.0..(c0 - 0.5));
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                let f = WeightFn::new(c0, amp * phase.cos(), amp * phase.sin())?;
                seg.push((i, j, f));
            }
        }
        debug_assert!(active_any);
    }
    let segs = entries
        .into_iter()
        .enumerate()
        .map(|(k, e)| Segment::new(k as f64 * seg_len, (k + 1) as f64 * seg_len, e))
        .collect();
    Ok(GraphSchedule::periodic(n, segs, true)?)
}

/// Uniform draw on `[lo, hi)` per component.
pub fn uniform_vector(dim: usize, lo: f64, hi: f64, rng: &mut StdRng) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Heterogeneous saturation levels with pairwise gaps of at least a third of
/// the even spacing of `[lo, hi]`, assigned to agents in random order.
pub fn distinct_levels(n: usize, lo: f64, hi: f64, rng: &mut StdRng) -> Vec<f64> {
    if n == 1 {
        return vec![rng.gen_range(lo..hi)];
    }
    let gap = (hi - lo) / (n - 1) as f64;
    let mut levels: Vec<f64> = (0..n)
        .map(|k| {
            let center = lo + gap * k as f64;
            (center + rng.gen_range(-0.3 * gap..0.3 * gap)).clamp(lo, hi)
        })
        .collect();
    levels.shuffle(rng);
    levels
}
