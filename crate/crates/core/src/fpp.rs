//! First-passage percolation on implicit Cartesian powers `G^n`.
//!
//! States of `G^n` are byte vectors of base-vertex positions. Edge weights
//! are never stored: each one is a pure function of the seed, the replica
//! and a canonical edge id, so a lazy Dijkstra search sees a consistent
//! random environment while touching only the states it pops.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, FiniteGraph, VertexId};
use crate::numeric::{quantile_sorted, Neumaier};
use crate::par::{self, Execution};
use crate::walk::{batched, McEstimate};

/// Node pops allowed per search before giving up.
pub const DEFAULT_BUDGET: u64 = 50_000_000;
pub const MAX_POWER: usize = 64;
pub const MAX_BASE_VERTICES: usize = 255;
/// Marks the moving coordinate in canonical edge ids; never a valid index.
const HOLE: u8 = 0xFF;

pub type State = SmallVec<[u8; 24]>;

/// Edge-weight distribution as written by the user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    Exp { rate: f64 },
    Uniform { a: f64, b: f64 },
    /// Piecewise-linear quantile function through `(p, x)` knots.
    Table { knots: Vec<(f64, f64)> },
}

/// A validated weight distribution `F` with its coupling map
/// `h(t) = inf{x ≥ 0 : F(x) ≥ 1 − e^{−t}}` and density `ρ` at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightModel {
    pub spec: WeightSpec,
    pub rho: f64,
}

/// Validates a weight specification.
pub fn make_weight_model(spec: WeightSpec) -> Result<WeightModel> {
    let bad = |msg: String| Err(Error::InvalidDistribution(msg));
    let rho = match &spec {
        WeightSpec::Exp { rate } => {
            if !(*rate > 0.0) || !rate.is_finite() {
                return bad(format!("exponential rate must be positive, got {rate}"));
            }
            *rate
        }
        WeightSpec::Uniform { a, b } => {
            if !(*a >= 0.0) || !(a < b) || !b.is_finite() {
                return bad(format!("uniform needs 0 ≤ a < b, got a={a}, b={b}"));
            }
            if *a == 0.0 {
                1.0 / b
            } else {
                0.0
            }
        }
        WeightSpec::Table { knots } => {
            if knots.len() < 2 {
                return bad("a quantile table needs at least two knots".into());
            }
            if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
                return bad("table probabilities must start at 0 and end at 1".into());
            }
            for pair in knots.windows(2) {
                let ((p0, x0), (p1, x1)) = (pair[0], pair[1]);
                if !(p1 > p0) || x1 < x0 {
                    return bad(format!("table must be strictly increasing in p and nondecreasing in x near p={p1}"));
                }
            }
            if knots.iter().any(|&(_, x)| !(x >= 0.0) || !x.is_finite()) {
                return bad("table values must be finite and nonnegative".into());
            }
            let (x0, (p1, x1)) = (knots[0].1, knots[1]);
            if x0 > 0.0 {
                0.0
            } else if x1 > 0.0 {
                p1 / x1
            } else {
                return bad("an atom at 0 gives an infinite density at 0".into());
            }
        }
    };
    Ok(WeightModel { spec, rho })
}

impl WeightModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        make_weight_model(WeightSpec::Exp { rate })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        make_weight_model(WeightSpec::Uniform { a, b })
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        make_weight_model(WeightSpec::Table { knots })
    }

    /// Parses `exp:λ`, `uniform:a,b` or `table:path` (a JSON list of
    /// `[p, x]` pairs).
    pub fn parse(token: &str) -> Result<Self> {
        let (kind, rest) = token
            .split_once(':')
            .ok_or_else(|| Error::InvalidDistribution(format!("expected kind:params, got `{token}`")))?;
        let num = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| Error::InvalidDistribution(format!("not a number: `{s}`")))
        };
        match kind {
            "exp" => Self::exponential(num(rest)?),
            "uniform" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidDistribution("uniform needs a,b".into()))?;
                Self::uniform(num(a)?, num(b)?)
            }
            "table" => {
                let text = std::fs::read_to_string(Path::new(rest))?;
                let knots: Vec<(f64, f64)> =
                    serde_json::from_str(&text).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
                Self::table(knots)
            }
            other => Err(Error::InvalidDistribution(format!("unknown weight kind `{other}`"))),
        }
    }

    /// `h(t)`, the weight coupled to an exponential time `t`.
    pub fn h(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.spec {
            WeightSpec::Exp { rate } => t / rate,
            WeightSpec::Uniform { a, b } => a + (b - a) * -(-t).exp_m1(),
            WeightSpec::Table { knots } => {
                let p = -(-t).exp_m1();
                let k = knots.partition_point(|&(q, _)| q < p).clamp(1, knots.len() - 1);
                let ((p0, x0), (p1, x1)) = (knots[k - 1], knots[k]);
                x0 + (x1 - x0) * ((p - p0) / (p1 - p0)).clamp(0.0, 1.0)
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.spec {
            WeightSpec::Exp { rate } => format!("exp:{rate}"),
            WeightSpec::Uniform { a, b } => format!("uniform:{a},{b}"),
            WeightSpec::Table { knots } => format!("table:{} knots", knots.len()),
        }
    }
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on `(0, 1)` keyed by `(seed, replica, coordinate, base edge,
/// rest of the state)`.
pub fn edge_uniform(seed: u64, replica: u64, coord: usize, edge: usize, state: &[u8]) -> f64 {
    let mut h = mix(seed);
    h = mix(h ^ replica);
    h = mix(h ^ ((coord as u64) << 32 | edge as u64));
    h = mix(h ^ state.len() as u64);
    for chunk in state.chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        h = mix(h ^ u64::from_le_bytes(word));
    }
    ((h >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Weight of the power-graph edge moving coordinate `coord` of `state`
/// along base edge `edge`. Both orientations of an undirected edge share
/// the same key because the moving coordinate is blanked.
fn edge_weight(model: &WeightModel, rate: f64, seed: u64, replica: u64, coord: usize, edge: usize, state: &[u8]) -> f64 {
    let mut key: State = SmallVec::from_slice(state);
    key[coord] = HOLE;
    let e = -edge_uniform(seed, replica, coord, edge, &key).ln();
    model.h(e / rate)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FppResult {
    pub time: f64,
    pub geodesic_length: usize,
    pub pops: u64,
}

struct Entry_ {
    time: f64,
    len: usize,
    state: State,
}

impl PartialEq for Entry_ {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry_ {}

impl PartialOrd for Entry_ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry_ {
    // min-heap on time, then on length, then on state for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.len.cmp(&self.len))
            .then_with(|| other.state.cmp(&self.state))
    }
}

fn check_sizes(base: &FiniteGraph, n: usize) -> Result<()> {
    if n == 0 || n > MAX_POWER {
        return Err(Error::TooLarge { size: n, limit: MAX_POWER });
    }
    if base.len() > MAX_BASE_VERTICES {
        return Err(Error::TooLarge { size: base.len(), limit: MAX_BASE_VERTICES });
    }
    Ok(())
}

/// Shortest weighted path between two states of `base^n`.
#[allow(clippy::too_many_arguments)]
pub fn first_passage_between(
    base: &FiniteGraph,
    start: &[u8],
    target: &[u8],
    model: &WeightModel,
    seed: u64,
    replica: u64,
    budget: u64,
) -> Result<FppResult> {
    let n = start.len();
    check_sizes(base, n)?;
    if target.len() != n {
        return Err(Error::InvalidArgument("start and target have different powers".into()));
    }
    let reach = base.reachability();
    for k in 0..n {
        if !reach[start[k] as usize][target[k] as usize] {
            return Err(Error::Unreachable {
                from: base.id(start[k] as usize).clone(),
                to: base.id(target[k] as usize).clone(),
            });
        }
    }
    let mut best: HashMap<State, f64> = HashMap::new();
    let mut done: HashSet<State> = HashSet::new();
    let mut heap = BinaryHeap::new();
    let s0: State = SmallVec::from_slice(start);
    best.insert(s0.clone(), 0.0);
    heap.push(Entry_ { time: 0.0, len: 0, state: s0 });
    let mut pops = 0u64;
    while let Some(Entry_ { time, len, state }) = heap.pop() {
        if !done.insert(state.clone()) {
            continue;
        }
        pops += 1;
        if pops > budget {
            return Err(Error::FrontierExhausted(budget));
        }
        if state.as_slice() == target {
            return Ok(FppResult { time, geodesic_length: len, pops });
        }
        for k in 0..n {
            for step in base.out_steps(state[k] as usize) {
                let mut next = state.clone();
                next[k] = step.to as u8;
                if done.contains(&next) {
                    continue;
                }
                let wgt = edge_weight(model, step.rate, seed, replica, k, step.edge, &state);
                let cand = time + wgt;
                match best.entry(next.clone()) {
                    Entry::Occupied(mut o) => {
                        if cand < *o.get() {
                            o.insert(cand);
                            heap.push(Entry_ { time: cand, len: len + 1, state: next });
                        }
                    }
                    Entry::Vacant(slot) => {
                        slot.insert(cand);
                        heap.push(Entry_ { time: cand, len: len + 1, state: next });
                    }
                }
            }
        }
    }
    Err(Error::Unreachable { from: base.id(start[0] as usize).clone(), to: base.id(target[0] as usize).clone() })
}

/// `T(v̄, w̄)` on `base^n` for replica 0 of `seed`.
pub fn first_passage_time(
    base: &BaseGraph,
    n: usize,
    v: &VertexId,
    w: &VertexId,
    model: &WeightModel,
    seed: u64,
) -> Result<FppResult> {
    let f = base.require_finite()?;
    check_sizes(f, n)?;
    let (vi, wi) = (f.require(v)? as u8, f.require(w)? as u8);
    first_passage_between(f, &vec![vi; n], &vec![wi; n], model, seed, 0, DEFAULT_BUDGET)
}

/// Ensemble configuration.
#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub powers: Vec<usize>,
    pub v: VertexId,
    pub w: VertexId,
    pub model: WeightModel,
    pub replicas: usize,
    pub seed: u64,
    /// Hamming mode: the target differs from the start in the first `k`
    /// coordinates only.
    pub hamming: Option<Vec<usize>>,
    pub budget: u64,
    pub execution: Execution,
}

impl EnsembleConfig {
    pub fn new(powers: Vec<usize>, v: VertexId, w: VertexId, model: WeightModel, replicas: usize, seed: u64) -> Self {
        EnsembleConfig {
            powers,
            v,
            w,
            model,
            replicas,
            seed,
            hamming: None,
            budget: DEFAULT_BUDGET,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub p: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub mean: f64,
    pub min: usize,
    pub max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub graph: String,
    pub n: usize,
    pub hamming_k: Option<usize>,
    pub v: VertexId,
    pub w: VertexId,
    pub seed: u64,
    pub weights: String,
    pub rho: f64,
    pub replicas: usize,
    pub mean: f64,
    pub stderr: f64,
    pub quantiles: Vec<Quantile>,
    /// `(t, P̂(T ≤ t))` at every distinct observed time.
    pub cdf_points: Vec<(f64, f64)>,
    pub geodesic_lengths: LengthSummary,
    /// Sorted passage times.
    pub times: Vec<f64>,
}

impl SimulationSummary {
    /// Empirical `P(T ≤ x)`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.times.partition_point(|&t| t <= x) as f64 / self.times.len() as f64
    }

    pub fn median(&self) -> f64 {
        quantile_sorted(&self.times, 0.5)
    }
}

fn summarize(cfg: &EnsembleConfig, graph: String, n: usize, k: Option<usize>, seed: u64, results: &[FppResult]) -> SimulationSummary {
    let mut times: Vec<f64> = results.iter().map(|r| r.time).collect();
    let mean = times.iter().copied().collect::<Neumaier>().value() / times.len() as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).collect::<Neumaier>().value() / (times.len().max(2) - 1) as f64;
    times.sort_by(f64::total_cmp);
    let total = times.len() as f64;
    let mut cdf_points: Vec<(f64, f64)> = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let p = (i + 1) as f64 / total;
        match cdf_points.last_mut() {
            Some(last) if last.0 == t => last.1 = p,
            _ => cdf_points.push((t, p)),
        }
    }
    let lengths: Vec<usize> = results.iter().map(|r| r.geodesic_length).collect();
    SimulationSummary {
        graph,
        n,
        hamming_k: k,
        v: cfg.v.clone(),
        w: cfg.w.clone(),
        seed,
        weights: cfg.model.describe(),
        rho: cfg.model.rho,
        replicas: results.len(),
        mean,
        stderr: (var / total).sqrt(),
        quantiles: [0.05, 0.25, 0.5, 0.75, 0.95]
            .iter()
            .map(|&p| Quantile { p, value: quantile_sorted(&times, p) })
            .collect(),
        cdf_points,
        geodesic_lengths: LengthSummary {
            mean: lengths.iter().sum::<usize>() as f64 / total,
            min: lengths.iter().copied().min().unwrap_or(0),
            max: lengths.iter().copied().max().unwrap_or(0),
        },
        times,
    }
}

/// Runs every configuration of the ensemble. Replica `r` of a
/// configuration uses replica key `r`; results depend only on the config.
pub fn run_ensemble(base: &BaseGraph, cfg: &EnsembleConfig) -> Result<Vec<SimulationSummary>> {
    if cfg.replicas == 0 {
        return Err(Error::InvalidArgument("replicas must be at least 1".into()));
    }
    let f = base.require_finite()?;
    let (vi, wi) = (f.require(&cfg.v)? as u8, f.require(&cfg.w)? as u8);
    let mut out = Vec::new();
    for &n in &cfg.powers {
        check_sizes(f, n)?;
        let ks: Vec<Option<usize>> = match &cfg.hamming {
            None => vec![None],
            Some(ks) => ks.iter().map(|&k| Some(k)).collect(),
        };
        for k in ks {
            let differing = k.unwrap_or(n);
            if differing > n {
                return Err(Error::InvalidArgument(format!("hamming distance {differing} exceeds the power {n}")));
            }
            let start = vec![vi; n];
            let target: Vec<u8> = (0..n).map(|i| if i < differing { wi } else { vi }).collect();
            let results = par::map_range(cfg.execution, cfg.replicas, |r| {
                first_passage_between(f, &start, &target, &cfg.model, cfg.seed, r as u64, cfg.budget)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            out.push(summarize(cfg, base.name(), n, k, cfg.seed, &results));
        }
    }
    Ok(out)
}

/// Monte Carlo `P(E_1 + … + E_k ≤ t)` for i.i.d. standard exponentials.
pub fn sum_of_exponentials_cdf(k: usize, t: f64, samples: u64, seed: u64, exec: Execution) -> McEstimate {
    use rand::Rng;
    let parts = batched(samples, seed, exec, |rng| {
        let s: f64 = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).sum();
        f64::from(u8::from(s <= t))
    });
    let (hits, n) = parts.iter().fold((0.0, 0u64), |a, p| (a.0 + p.0, a.1 + p.2));
    McEstimate::proportion(hits as u64, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, directed_edge, FiniteGraph, RawEdge};

    #[test]
    fn coupling_maps() {
        let e = WeightModel::exponential(1.0).unwrap();
        let u1 = WeightModel::uniform(0.0, 1.0).unwrap();
        let u2 = WeightModel::uniform(0.0, 2.0).unwrap();
        for t in [0.0, 0.1, 0.7, 3.0] {
            assert_eq!(e.h(t), t);
            assert!((u1.h(t) - (1.0 - (-t).exp())).abs() < 1e-15);
            assert!((u2.h(t) - 2.0 * (1.0 - (-t).exp())).abs() < 1e-15);
        }
        assert_eq!((e.rho, u1.rho, u2.rho), (1.0, 1.0, 0.5));
        let tab = WeightModel::table(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 4.0)]).unwrap();
        assert_eq!(tab.rho, 0.5);
        assert!((tab.h(2f64.ln()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_models() {
        assert!(WeightModel::exponential(0.0).is_err());
        assert!(WeightModel::uniform(1.0, 1.0).is_err());
        assert!(WeightModel::table(vec![(0.0, 1.0), (1.0, 0.5)]).is_err());
        assert!(WeightModel::table(vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]).is_err());
        assert!(WeightModel::parse("gamma:2").is_err());
        assert_eq!(WeightModel::parse("uniform:0,2").unwrap().rho, 0.5);
    }

    #[test]
    fn single_edge_is_its_weight() {
        let g = directed_edge();
        let m = WeightModel::exponential(1.0).unwrap();
        let r = first_passage_time(&g, 1, &0.into(), &1.into(), &m, 42).unwrap();
        let mut key: State = SmallVec::from_slice(&[0u8]);
        key[0] = HOLE;
        assert_eq!(r.time, -edge_uniform(42, 0, 0, 0, &key).ln());
        assert_eq!(r.geodesic_length, 1);
    }

    #[test]
    fn undirected_weights_are_symmetric() {
        let m = WeightModel::exponential(1.0).unwrap();
        let forward = edge_weight(&m, 1.0, 7, 3, 1, 0, &[0, 0, 1]);
        let backward = edge_weight(&m, 1.0, 7, 3, 1, 0, &[0, 1, 1]);
        assert_eq!(forward, backward);
        assert_ne!(forward, edge_weight(&m, 1.0, 7, 4, 1, 0, &[0, 0, 1]));
    }

    #[test]
    fn point_mass_gives_graph_distance() {
        let m = WeightModel::table(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let r = first_passage_time(&complete(2), 2, &0.into(), &1.into(), &m, 1).unwrap();
        assert_eq!((r.time, r.geodesic_length), (2.0, 2));
    }

    #[test]
    fn repeat_runs_match() {
        let m = WeightModel::exponential(1.0).unwrap();
        let a = first_passage_time(&complete(2), 8, &0.into(), &1.into(), &m, 11).unwrap();
        let b = first_passage_time(&complete(2), 8, &0.into(), &1.into(), &m, 11).unwrap();
        assert_eq!(a.time.to_bits(), b.time.to_bits());
    }

    #[test]
    fn limits_and_errors() {
        let m = WeightModel::exponential(1.0).unwrap();
        let g = complete(2);
        assert!(matches!(first_passage_time(&g, 65, &0.into(), &1.into(), &m, 1), Err(Error::TooLarge { .. })));
        let f = g.as_finite().unwrap();
        let e = first_passage_between(f, &[0; 10], &[1; 10], &m, 1, 0, 5).unwrap_err();
        assert_eq!(e, Error::FrontierExhausted(5));
        let iso: BaseGraph = FiniteGraph::new(vec![0.into(), 1.into()], Vec::<RawEdge>::new()).unwrap().into();
        assert!(matches!(first_passage_time(&iso, 2, &0.into(), &1.into(), &m, 1), Err(Error::Unreachable { .. })));
    }

    #[test]
    fn ensemble_is_schedule_independent() {
        let g = complete(2);
        let m = WeightModel::exponential(1.0).unwrap();
        let mut cfg = EnsembleConfig::new(vec![5], 0.into(), 1.into(), m, 40, 9);
        cfg.execution = Execution::Sequential;
        let a = run_ensemble(&g, &cfg).unwrap();
        cfg.execution = Execution::Parallel;
        let b = run_ensemble(&g, &cfg).unwrap();
        assert_eq!(a, b);
        let s = &a[0];
        assert!(s.quantiles.windows(2).all(|q| q[0].value <= q[1].value));
        assert!(s.cdf_points.windows(2).all(|c| c[0].0 < c[1].0 && c[0].1 <= c[1].1));
        assert!(s.geodesic_lengths.min >= 5);
    }

    #[test]
    fn hamming_targets() {
        let g = complete(2);
        let m = WeightModel::table(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let mut cfg = EnsembleConfig::new(vec![6], 0.into(), 1.into(), m, 3, 1);
        cfg.hamming = Some(vec![0, 2, 6]);
        let out = run_ensemble(&g, &cfg).unwrap();
        let means: Vec<f64> = out.iter().map(|s| s.mean).collect();
        assert_eq!(means, vec![0.0, 2.0, 6.0]);
    }
}
