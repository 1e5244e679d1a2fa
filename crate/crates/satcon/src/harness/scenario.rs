//! Line-oriented scenario documents.
//!
//! The format is a diff-friendly key-value text with bracketed sections:
//!
//! ```text
//! name = demo
//! model = single            # single | double
//!
//! [network.graph]           # or [network.schedule] / [network.random]
//! n = 4
//! directed = false
//! edge = 1 2 1.0            # 1-based node ids, then the weight
//!
//! [saturation]
//! homogeneous = 1.0         # or: levels = 1 2 3 4
//!
//! [initial]
//! uniform = -10 10          # or: values = ...
//! seed = 7
//! target_mean = -0.75
//!
//! [sim]
//! dt = 0.001
//! t_end = 400
//! method = rk4              # rk4 | euler
//! record_stride = 20
//!
//! [detection]
//! tol = 0.001
//! window = 0.1
//! ```
//!
//! Schedule networks declare `period`, `symmetric`, and a sequence of
//! `segment = start end` lines, each followed by its `edge = i j c0 c_sin
//! c_cos` entries (the two trailing coefficients may be omitted). Random
//! networks take `n`, `edge_prob`, `weight_range = lo hi` and `seed`.
//! Everything is validated while parsing; errors carry the offending line.

use super::{Detection, InitialSpec, NetworkSpec, SaturationSource, Scenario};
use crate::dynamics::{Method, Model, SimConfig};
use crate::graph::{Graph, GraphSchedule, Segment, WeightFn};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Document(String),
}

/// Hard limits keeping hostile documents from exhausting memory.
const MAX_NODES: usize = 512;
const MAX_VALUES: usize = 100_000;
const MAX_SEGMENTS: usize = 512;

fn err(line: usize, message: impl Into<String>) -> ScenarioParseError {
    ScenarioParseError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SectionKind {
    Top,
    NetGraph,
    NetSchedule,
    NetRandom,
    Saturation,
    Initial,
    Sim,
    Detection,
}

#[derive(Default)]
struct GraphDraft {
    n: Option<usize>,
    directed: bool,
    edges: Vec<(usize, usize, f64)>,
}

type SegmentDraft = (f64, f64, Vec<(usize, usize, WeightFn)>);

#[derive(Default)]
struct ScheduleDraft {
    n: Option<usize>,
    period: Option<f64>,
    symmetric: bool,
    segments: Vec<SegmentDraft>,
}

#[derive(Default)]
struct RandomDraft {
    n: Option<usize>,
    edge_prob: Option<f64>,
    weight_range: Option<(f64, f64)>,
    seed: Option<u64>,
}

#[derive(Default)]
struct Draft {
    name: Option<String>,
    model: Option<Model>,
    graph: Option<(usize, GraphDraft)>,
    schedule: Option<(usize, ScheduleDraft)>,
    random: Option<(usize, RandomDraft)>,
    homogeneous: Option<f64>,
    levels: Option<Vec<f64>>,
    initial_values: Option<Vec<f64>>,
    initial_uniform: Option<(f64, f64)>,
    initial_seed: Option<u64>,
    target_mean: Option<f64>,
    dt: Option<f64>,
    t_end: Option<f64>,
    method: Option<Method>,
    record_stride: Option<usize>,
    tol: Option<f64>,
    window: Option<f64>,
}

/// Parses a scenario document, enforcing every referenced-type invariant.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioParseError> {
    let mut draft = Draft::default();
    let mut section = SectionKind::Top;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line_no, "unterminated section header"))?
                .trim();
            section = open_section(name, line_no, &mut draft)?;
            continue;
        }
        let (key, value) = split_key_value(line, line_no)?;
        match section {
            SectionKind::Top => parse_top_key(&mut draft, key, value, line_no)?,
            SectionKind::NetGraph => {
                let (_, g) = draft.graph.as_mut().expect("section opened");
                parse_graph_key(g, key, value, line_no)?;
            }
            SectionKind::NetSchedule => {
                let (_, s) = draft.schedule.as_mut().expect("section opened");
                parse_schedule_key(s, key, value, line_no)?;
            }
            SectionKind::NetRandom => {
                let (_, r) = draft.random.as_mut().expect("section opened");
                parse_random_key(r, key, value, line_no)?;
            }
            SectionKind::Saturation => parse_saturation_key(&mut draft, key, value, line_no)?,
            SectionKind::Initial => parse_initial_key(&mut draft, key, value, line_no)?,
            SectionKind::Sim => parse_sim_key(&mut draft, key, value, line_no)?,
            SectionKind::Detection => parse_detection_key(&mut draft, key, value, line_no)?,
        }
    }
    finish(draft)
}

/// Reads and parses a scenario file.
pub fn read_scenario(path: &std::path::Path) -> Result<Scenario, ScenarioParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioParseError::Document(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn split_key_value(line: &str, line_no: usize) -> Result<(&str, &str), ScenarioParseError> {
    let (key, value) = line
        .split_once('=')
        .ok_or_else(|| err(line_no, "expected `key = value`"))?;
    Ok((key.trim(), value.trim()))
}

fn open_section(
    name: &str,
    line_no: usize,
    draft: &mut Draft,
) -> Result<SectionKind, ScenarioParseError> {
    let network_already =
        draft.graph.is_some() || draft.schedule.is_some() || draft.random.is_some();
    if matches!(
        name,
        "network.graph" | "network.schedule" | "network.random"
    ) && network_already
    {
        return Err(err(line_no, "a network section was already declared"));
    }
    match name {
        "network.graph" => {
            draft.graph = Some((line_no, GraphDraft::default()));
            Ok(SectionKind::NetGraph)
        }
        "network.schedule" => {
            draft.schedule = Some((
                line_no,
                ScheduleDraft {
                    symmetric: true,
                    ..ScheduleDraft::default()
                },
            ));
            Ok(SectionKind::NetSchedule)
        }
        "network.random" => {
            draft.random = Some((line_no, RandomDraft::default()));
            Ok(SectionKind::NetRandom)
        }
        "saturation" => Ok(SectionKind::Saturation),
        "initial" => Ok(SectionKind::Initial),
        "sim" => Ok(SectionKind::Sim),
        "detection" => Ok(SectionKind::Detection),
        other => Err(err(line_no, format!("unknown section [{other}]"))),
    }
}

fn parse_top_key(
    draft: &mut Draft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "name" => {
            draft.name = Some(value.to_string());
            Ok(())
        }
        "model" => {
            draft.model = Some(match value {
                "single" => Model::Single,
                "double" => Model::Double,
                other => return Err(err(line_no, format!("unknown model `{other}`"))),
            });
            Ok(())
        }
        other => Err(err(line_no, format!("unknown key `{other}` at top level"))),
    }
}

fn parse_node_count(value: &str, line_no: usize) -> Result<usize, ScenarioParseError> {
    let n: usize = value
        .parse()
        .map_err(|_| err(line_no, format!("invalid node count `{value}`")))?;
    if n == 0 || n > MAX_NODES {
        return Err(err(
            line_no,
            format!("node count must be in 1..={MAX_NODES}, got {n}"),
        ));
    }
    Ok(n)
}

fn parse_f64(value: &str, line_no: usize, what: &str) -> Result<f64, ScenarioParseError> {
    let v: f64 = value
        .parse()
        .map_err(|_| err(line_no, format!("invalid {what} `{value}`")))?;
    if !v.is_finite() {
        return Err(err(
            line_no,
            format!("{what} must be finite, got `{value}`"),
        ));
    }
    Ok(v)
}

fn parse_numbers(value: &str, line_no: usize, what: &str) -> Result<Vec<f64>, ScenarioParseError> {
    let mut out = Vec::new();
    for tok in value.split_whitespace() {
        out.push(parse_f64(tok, line_no, what)?);
        if out.len() > MAX_VALUES {
            return Err(err(line_no, format!("too many {what} values")));
        }
    }
    Ok(out)
}

/// 1-based node id.
fn parse_node_id(tok: &str, n: usize, line_no: usize) -> Result<usize, ScenarioParseError> {
    let id: usize = tok
        .parse()
        .map_err(|_| err(line_no, format!("invalid node id `{tok}`")))?;
    if id == 0 || id > n {
        return Err(err(line_no, format!("node id {id} out of range 1..={n}")));
    }
    Ok(id - 1)
}

fn parse_graph_key(
    g: &mut GraphDraft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "n" => {
            g.n = Some(parse_node_count(value, line_no)?);
            Ok(())
        }
        "directed" => {
            g.directed = parse_bool(value, line_no)?;
            Ok(())
        }
        "edge" => {
            let n =
                g.n.ok_or_else(|| err(line_no, "`n` must be set before edges"))?;
            let toks: Vec<&str> = value.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(err(line_no, "edge takes `i j weight`"));
            }
            let i = parse_node_id(toks[0], n, line_no)?;
            let j = parse_node_id(toks[1], n, line_no)?;
            let w = parse_f64(toks[2], line_no, "edge weight")?;
            if i == j {
                return Err(err(line_no, "self-loops are not allowed"));
            }
            if w < 0.0 {
                return Err(err(
                    line_no,
                    format!("edge weight must be nonnegative, got {w}"),
                ));
            }
            g.edges.push((i, j, w));
            Ok(())
        }
        other => Err(err(
            line_no,
            format!("unknown key `{other}` in [network.graph]"),
        )),
    }
}

fn parse_schedule_key(
    s: &mut ScheduleDraft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "n" => {
            s.n = Some(parse_node_count(value, line_no)?);
            Ok(())
        }
        "period" => {
            let p = parse_f64(value, line_no, "period")?;
            if p <= 0.0 {
                return Err(err(line_no, format!("period must be positive, got {p}")));
            }
            s.period = Some(p);
            Ok(())
        }
        "symmetric" => {
            s.symmetric = parse_bool(value, line_no)?;
            Ok(())
        }
        "segment" => {
            if s.segments.len() >= MAX_SEGMENTS {
                return Err(err(line_no, "too many segments"));
            }
            let toks: Vec<&str> = value.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(err(line_no, "segment takes `start end`"));
            }
            let start = parse_f64(toks[0], line_no, "segment start")?;
            let end = parse_f64(toks[1], line_no, "segment end")?;
            if end <= start {
                return Err(err(
                    line_no,
                    format!("segment [{start}, {end}) is empty or reversed"),
                ));
            }
            if let Some(last) = s.segments.last() {
                if start != last.1 {
                    return Err(err(
                        line_no,
                        format!(
                            "segments must tile without overlap or gap: previous ends at {}, this starts at {start}",
                            last.1
                        ),
                    ));
                }
            } else if start != 0.0 {
                return Err(err(line_no, "first segment must start at 0"));
            }
            s.segments.push((start, end, Vec::new()));
            Ok(())
        }
        "edge" => {
            let n =
                s.n.ok_or_else(|| err(line_no, "`n` must be set before edges"))?;
            let seg = s
                .segments
                .last_mut()
                .ok_or_else(|| err(line_no, "edge lines must follow a `segment`"))?;
            let toks: Vec<&str> = value.split_whitespace().collect();
            if toks.len() != 3 && toks.len() != 5 {
                return Err(err(line_no, "edge takes `i j c0 [c_sin c_cos]`"));
            }
            let i = parse_node_id(toks[0], n, line_no)?;
            let j = parse_node_id(toks[1], n, line_no)?;
            if i == j {
                return Err(err(line_no, "self-loops are not allowed"));
            }
            let c0 = parse_f64(toks[2], line_no, "weight coefficient")?;
            let (c_sin, c_cos) = if toks.len() == 5 {
                (
                    parse_f64(toks[3], line_no, "weight coefficient")?,
                    parse_f64(toks[4], line_no, "weight coefficient")?,
                )
            } else {
                (0.0, 0.0)
            };
            let f = WeightFn::new(c0, c_sin, c_cos).map_err(|e| err(line_no, e.to_string()))?;
            seg.2.push((i, j, f));
            Ok(())
        }
        other => Err(err(
            line_no,
            format!("unknown key `{other}` in [network.schedule]"),
        )),
    }
}

fn parse_random_key(
    r: &mut RandomDraft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "n" => {
            r.n = Some(parse_node_count(value, line_no)?);
            Ok(())
        }
        "edge_prob" => {
            let p = parse_f64(value, line_no, "edge probability")?;
            if !(0.0..=1.0).contains(&p) {
                return Err(err(
                    line_no,
                    format!("edge_prob must be in [0, 1], got {p}"),
                ));
            }
            r.edge_prob = Some(p);
            Ok(())
        }
        "weight_range" => {
            let v = parse_numbers(value, line_no, "weight range")?;
            if v.len() != 2 || v[0] <= 0.0 || v[1] <= v[0] {
                return Err(err(line_no, "weight_range takes `lo hi` with 0 < lo < hi"));
            }
            r.weight_range = Some((v[0], v[1]));
            Ok(())
        }
        "seed" => {
            r.seed = Some(
                value
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid seed `{value}`")))?,
            );
            Ok(())
        }
        other => Err(err(
            line_no,
            format!("unknown key `{other}` in [network.random]"),
        )),
    }
}

fn parse_saturation_key(
    draft: &mut Draft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "homogeneous" => {
            let s = parse_f64(value, line_no, "saturation level")?;
            if s <= 0.0 {
                return Err(err(
                    line_no,
                    format!("saturation level must be positive, got {s}"),
                ));
            }
            draft.homogeneous = Some(s);
            Ok(())
        }
        "levels" => {
            let levels = parse_numbers(value, line_no, "saturation level")?;
            if levels.is_empty() {
                return Err(err(line_no, "levels must not be empty"));
            }
            if let Some(bad) = levels.iter().find(|&&s| s <= 0.0) {
                return Err(err(
                    line_no,
                    format!("saturation level must be positive, got {bad}"),
                ));
            }
            draft.levels = Some(levels);
            Ok(())
        }
        other => Err(err(
            line_no,
            format!("unknown key `{other}` in [saturation]"),
        )),
    }
}

fn parse_initial_key(
    draft: &mut Draft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "values" => {
            draft.initial_values = Some(parse_numbers(value, line_no, "initial value")?);
            Ok(())
        }
        "uniform" => {
            let v = parse_numbers(value, line_no, "uniform bound")?;
            if v.len() != 2 || v[1] <= v[0] {
                return Err(err(line_no, "uniform takes `lo hi` with lo < hi"));
            }
            draft.initial_uniform = Some((v[0], v[1]));
            Ok(())
        }
        "seed" => {
            draft.initial_seed = Some(
                value
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid seed `{value}`")))?,
            );
            Ok(())
        }
        "target_mean" => {
            draft.target_mean = Some(parse_f64(value, line_no, "target mean")?);
            Ok(())
        }
        other => Err(err(line_no, format!("unknown key `{other}` in [initial]"))),
    }
}

fn parse_sim_key(
    draft: &mut Draft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "dt" => {
            let dt = parse_f64(value, line_no, "step size")?;
            if dt <= 0.0 {
                return Err(err(line_no, format!("dt must be positive, got {dt}")));
            }
            draft.dt = Some(dt);
            Ok(())
        }
        "t_end" => {
            let t = parse_f64(value, line_no, "horizon")?;
            if t <= 0.0 {
                return Err(err(line_no, format!("t_end must be positive, got {t}")));
            }
            draft.t_end = Some(t);
            Ok(())
        }
        "method" => {
            draft.method = Some(match value {
                "rk4" => Method::Rk4,
                "euler" => Method::Euler,
                other => return Err(err(line_no, format!("unknown method `{other}`"))),
            });
            Ok(())
        }
        "record_stride" => {
            let s: usize = value
                .parse()
                .map_err(|_| err(line_no, format!("invalid record_stride `{value}`")))?;
            if s == 0 {
                return Err(err(line_no, "record_stride must be positive"));
            }
            draft.record_stride = Some(s);
            Ok(())
        }
        other => Err(err(line_no, format!("unknown key `{other}` in [sim]"))),
    }
}

fn parse_detection_key(
    draft: &mut Draft,
    key: &str,
    value: &str,
    line_no: usize,
) -> Result<(), ScenarioParseError> {
    match key {
        "tol" => {
            let tol = parse_f64(value, line_no, "tolerance")?;
            if tol <= 0.0 {
                return Err(err(line_no, format!("tol must be positive, got {tol}")));
            }
            draft.tol = Some(tol);
            Ok(())
        }
        "window" => {
            let w = parse_f64(value, line_no, "window fraction")?;
            if !(w > 0.0 && w <= 1.0) {
                return Err(err(line_no, format!("window must be in (0, 1], got {w}")));
            }
            draft.window = Some(w);
            Ok(())
        }
        other => Err(err(
            line_no,
            format!("unknown key `{other}` in [detection]"),
        )),
    }
}

fn parse_bool(value: &str, line_no: usize) -> Result<bool, ScenarioParseError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(err(line_no, format!("expected true/false, got `{other}`"))),
    }
}

fn finish(draft: Draft) -> Result<Scenario, ScenarioParseError> {
    let model = draft.model.unwrap_or(Model::Single);

    let network = if let Some((line, g)) = draft.graph {
        let n = g.n.ok_or_else(|| err(line, "[network.graph] needs `n`"))?;
        let graph = if g.directed {
            Graph::directed(n, &g.edges)
        } else {
            Graph::undirected(n, &g.edges)
        }
        .map_err(|e| err(line, e.to_string()))?;
        NetworkSpec::Graph(graph)
    } else if let Some((line, s)) = draft.schedule {
        let n =
            s.n.ok_or_else(|| err(line, "[network.schedule] needs `n`"))?;
        if s.segments.is_empty() {
            return Err(err(line, "[network.schedule] needs at least one segment"));
        }
        let segments: Vec<Segment> = s
            .segments
            .into_iter()
            .map(|(start, end, entries)| Segment::new(start, end, entries))
            .collect();
        let sched = match s.period {
            Some(p) => {
                let last_end = segments.last().unwrap().end;
                if last_end != p {
                    return Err(err(
                        line,
                        format!("segments end at {last_end} but period is {p}"),
                    ));
                }
                GraphSchedule::periodic(n, segments, s.symmetric)
            }
            None => GraphSchedule::non_periodic(n, segments, s.symmetric),
        }
        .map_err(|e| err(line, e.to_string()))?;
        NetworkSpec::Schedule(sched)
    } else if let Some((line, r)) = draft.random {
        let n = r.n.ok_or_else(|| err(line, "[network.random] needs `n`"))?;
        let edge_prob = r
            .edge_prob
            .ok_or_else(|| err(line, "[network.random] needs `edge_prob`"))?;
        let (weight_lo, weight_hi) = r.weight_range.unwrap_or((0.5, 1.5));
        NetworkSpec::Random {
            n,
            edge_prob,
            weight_lo,
            weight_hi,
            seed: r.seed.unwrap_or(0),
        }
    } else {
        return Err(ScenarioParseError::Document(
            "missing a [network.graph], [network.schedule] or [network.random] section".into(),
        ));
    };

    let n = match &network {
        NetworkSpec::Graph(g) => g.n(),
        NetworkSpec::Schedule(s) => s.n(),
        NetworkSpec::Random { n, .. } => *n,
    };
    let state_dim = match model {
        Model::Single => n,
        Model::Double => 2 * n,
    };

    let saturation = match (draft.homogeneous, draft.levels) {
        (Some(s), None) => SaturationSource::Homogeneous(s),
        (None, Some(levels)) => {
            if levels.len() != n {
                return Err(ScenarioParseError::Document(format!(
                    "saturation has {} levels but the network has {} nodes",
                    levels.len(),
                    n
                )));
            }
            SaturationSource::Levels(levels)
        }
        (None, None) => {
            return Err(ScenarioParseError::Document(
                "missing a [saturation] section with `homogeneous` or `levels`".into(),
            ));
        }
        (Some(_), Some(_)) => {
            return Err(ScenarioParseError::Document(
                "[saturation] takes either `homogeneous` or `levels`, not both".into(),
            ));
        }
    };

    let initial = match (draft.initial_values, draft.initial_uniform) {
        (Some(values), None) => {
            if values.len() != state_dim {
                return Err(ScenarioParseError::Document(format!(
                    "initial has {} values but the model needs {}",
                    values.len(),
                    state_dim
                )));
            }
            InitialSpec::Values(values)
        }
        (None, Some((lo, hi))) => InitialSpec::Uniform {
            lo,
            hi,
            seed: draft.initial_seed.unwrap_or(0),
        },
        (None, None) => {
            return Err(ScenarioParseError::Document(
                "missing an [initial] section with `values` or `uniform`".into(),
            ));
        }
        (Some(_), Some(_)) => {
            return Err(ScenarioParseError::Document(
                "[initial] takes either `values` or `uniform`, not both".into(),
            ));
        }
    };

    let dt = draft.dt.unwrap_or(1e-3);
    let t_end = draft.t_end.unwrap_or(200.0);
    let mut sim =
        SimConfig::new(dt, t_end).map_err(|e| ScenarioParseError::Document(e.to_string()))?;
    if let Some(method) = draft.method {
        sim = sim.with_method(method);
    }
    if let Some(stride) = draft.record_stride {
        sim = sim
            .with_stride(stride)
            .map_err(|e| ScenarioParseError::Document(e.to_string()))?;
    }

    Ok(Scenario {
        name: draft.name.unwrap_or_else(|| "scenario".into()),
        model,
        network,
        saturation,
        initial,
        target_mean: draft.target_mean,
        sim,
        detection: Detection {
            tol: draft.tol.unwrap_or(1e-3),
            window: draft.window.unwrap_or(0.1),
        },
    })
}
