//! Conditioned random walks and the Monte Carlo estimators built on them.
//!
//! A walk from `v` conditioned to sit at `w` at time `t*` traces a path `γ`
//! with probability proportional to `Π λ(e) · t*^|γ| / |γ|!`, and given its
//! length its jump times are sorted uniforms on `(0, t*)`. Sampling is
//! exact up to a truncation of the length law whose mass is reported.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::{m_matrix, MMatrix, SeriesPlan};
use crate::graph::{BaseGraph, Direction, FiniteGraph, VertexId};
use crate::numeric::mean_stderr;
use crate::par::{self, Execution};

/// Truncation of the jump-length law: the omitted probability is below this.
pub const LENGTH_TAIL: f64 = 1e-9;
/// Time quantum for memoizing generating function matrices in `C(X)`.
pub const TIME_QUANTUM: f64 = 1e-9;
/// Samples per independent random stream.
pub const BATCH: usize = 4096;

/// Law of the number of jumps `L` of the conditioned walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpLengthLaw {
    /// `probs[ℓ] = P(L = ℓ)` for `ℓ ≤ ℓ_max`.
    pub probs: Vec<f64>,
    /// Upper bound on `P(L > ℓ_max)`; `Σ probs + tail_mass = 1`.
    pub tail_mass: f64,
}

/// One realization of a (possibly power) conditioned walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSample {
    /// Visited states; each is one base vertex per coordinate.
    pub vertices: Vec<Vec<VertexId>>,
    pub jump_times: Vec<f64>,
    /// Coordinate moved at each jump; empty for base-graph walks.
    pub coordinates: Vec<usize>,
}

/// A base-graph walk in vertex positions.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseWalk {
    pub path: Vec<usize>,
    pub times: Vec<f64>,
}

impl BaseWalk {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Position at time `t` (right-continuous).
    pub fn position_at(&self, t: f64) -> usize {
        self.path[self.times.partition_point(|&s| s <= t)]
    }
}

/// Exact sampler for the conditioned walk on one base graph.
#[derive(Clone, Debug)]
pub struct ConditionedSampler {
    graph: Arc<FiniteGraph>,
    v: usize,
    w: usize,
    t_star: f64,
    law: JumpLengthLaw,
    cdf: Vec<f64>,
    /// `scaled[j][x] = N_j(x, w) · t*^j / j!`, `N_j` the weighted count of
    /// length-`j` paths from `x` to `w`.
    scaled: Vec<Vec<f64>>,
}

impl ConditionedSampler {
    pub fn new(g: &BaseGraph, v: &VertexId, w: &VertexId, t_star: f64) -> Result<Self> {
        if !(t_star > 0.0) || !t_star.is_finite() {
            return Err(Error::InvalidArgument(format!("t* must be positive and finite, got {t_star}")));
        }
        let ell_max = SeriesPlan::new(g.delta_out(), t_star, LENGTH_TAIL)?.order;
        let graph = match g {
            BaseGraph::Finite(f) => f.clone(),
            // every path of length ≤ ℓ_max from v stays inside this ball
            BaseGraph::Oracle(_) => Arc::new(g.induced(&g.directed_ball(v, ell_max, Direction::Out)?)?),
        };
        g.require_vertex(w)?;
        let vi = graph.require(v)?;
        let wi = graph.index_of(w).ok_or_else(|| Error::Unreachable { from: v.clone(), to: w.clone() })?;
        let n = graph.len();
        let mut scaled = Vec::with_capacity(ell_max + 1);
        let mut cur = vec![0.0; n];
        cur[wi] = 1.0;
        scaled.push(cur);
        for j in 1..=ell_max {
            let prev = &scaled[j - 1];
            let f = t_star / j as f64;
            let next: Vec<f64> =
                (0..n).map(|x| f * graph.out_steps(x).iter().map(|s| s.rate * prev[s.to]).sum::<f64>()).collect();
            scaled.push(next);
        }
        let weights: Vec<f64> = scaled.iter().map(|q| q[vi]).collect();
        let z: f64 = weights.iter().sum();
        if z <= 0.0 {
            return Err(Error::Unreachable { from: v.clone(), to: w.clone() });
        }
        let tail = SeriesPlan::new(g.delta_out(), t_star, LENGTH_TAIL)?.tail_bound;
        let tail_mass = (tail / (z + tail)).min(1.0);
        let probs: Vec<f64> = weights.iter().map(|q| q / z * (1.0 - tail_mass)).collect();
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|q| {
                acc += q / z;
                acc
            })
            .collect();
        Ok(ConditionedSampler { graph, v: vi, w: wi, t_star, law: JumpLengthLaw { probs, tail_mass }, cdf, scaled })
    }

    pub fn law(&self) -> &JumpLengthLaw {
        &self.law
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn start(&self) -> usize {
        self.v
    }

    pub fn target(&self) -> usize {
        self.w
    }

    /// Draws one walk.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BaseWalk {
        let u: f64 = rng.random();
        let ell = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let mut path = Vec::with_capacity(ell + 1);
        let mut x = self.v;
        path.push(x);
        for r in (1..=ell).rev() {
            let below = &self.scaled[r - 1];
            let steps = self.graph.out_steps(x);
            let total: f64 = steps.iter().map(|s| s.rate * below[s.to]).sum();
            let mut pick = rng.random::<f64>() * total;
            let mut next = None;
            for s in steps {
                let wgt = s.rate * below[s.to];
                if wgt <= 0.0 {
                    continue;
                }
                next = Some(s.to);
                if pick < wgt {
                    break;
                }
                pick -= wgt;
            }
            x = next.expect("a positive-weight step exists whenever the remaining count is positive");
            path.push(x);
        }
        let mut times: Vec<f64> = (0..ell).map(|_| rng.random::<f64>() * self.t_star).collect();
        times.sort_by(f64::total_cmp);
        BaseWalk { path, times }
    }

    fn ids(&self, path: &[usize]) -> Vec<Vec<VertexId>> {
        path.iter().map(|&x| vec![self.graph.id(x).clone()]).collect()
    }
}

/// One conditioned walk on the base graph.
pub fn sample_conditioned_walk<R: Rng + ?Sized>(
    g: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    t_star: f64,
    rng: &mut R,
) -> Result<WalkSample> {
    let sampler = ConditionedSampler::new(g, v, w, t_star)?;
    let walk = sampler.sample(rng);
    Ok(WalkSample { vertices: sampler.ids(&walk.path), jump_times: walk.times, coordinates: Vec::new() })
}

/// A walk on the `n`-th power, as merged coordinate jumps.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerWalk {
    pub start: Vec<usize>,
    /// `(time, coordinate, new base vertex)`, increasing in time.
    pub jumps: Vec<(f64, usize, usize)>,
}

impl PowerWalk {
    /// Merges independent coordinate walks by jump time.
    pub fn merge(start: usize, coords: &[BaseWalk]) -> PowerWalk {
        let mut jumps: Vec<(f64, usize, usize)> = coords
            .iter()
            .enumerate()
            .flat_map(|(k, walk)| walk.times.iter().enumerate().map(move |(i, &t)| (t, k, walk.path[i + 1])))
            .collect();
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        PowerWalk { start: vec![start; coords.len()], jumps }
    }

    /// States `X_{T_0}, …, X_{T_L}`.
    pub fn states(&self) -> Vec<Vec<usize>> {
        let mut cur = self.start.clone();
        let mut out = Vec::with_capacity(self.jumps.len() + 1);
        out.push(cur.clone());
        for &(_, k, to) in &self.jumps {
            cur[k] = to;
            out.push(cur.clone());
        }
        out
    }

    pub fn is_self_avoiding(&self) -> bool {
        let states = self.states();
        let mut seen = HashSet::with_capacity(states.len());
        states.into_iter().all(|s| seen.insert(s))
    }
}

/// One walk on `base^n`: `n` independent conditioned walks merged by time.
pub fn sample_power_walk<R: Rng + ?Sized>(
    base: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    n: usize,
    t_star: f64,
    rng: &mut R,
) -> Result<WalkSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be positive".into()));
    }
    let sampler = ConditionedSampler::new(base, v, w, t_star)?;
    let coords: Vec<BaseWalk> = (0..n).map(|_| sampler.sample(rng)).collect();
    let pw = PowerWalk::merge(sampler.start(), &coords);
    let g = sampler.graph();
    Ok(WalkSample {
        vertices: pw.states().iter().map(|s| s.iter().map(|&x| g.id(x).clone()).collect()).collect(),
        jump_times: pw.jumps.iter().map(|j| j.0).collect(),
        coordinates: pw.jumps.iter().map(|j| j.1).collect(),
    })
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_sums(parts: &[(f64, f64, u64)]) -> McEstimate {
        let (s, q, n) = parts.iter().fold((0.0, 0.0, 0u64), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
        let (estimate, stderr) = mean_stderr(s, q, n);
        McEstimate { estimate, stderr, samples: n }
    }

    /// Estimate of a Bernoulli mean with its binomial standard error.
    pub fn proportion(hits: u64, n: u64) -> McEstimate {
        let p = hits as f64 / n as f64;
        McEstimate { estimate: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), samples: n }
    }
}

/// Runs `samples` draws of `draw` over independent ChaCha8 streams and
/// returns the sums of values and squares. Deterministic in `seed`.
pub(crate) fn batched<F>(samples: u64, seed: u64, exec: Execution, draw: F) -> Vec<(f64, f64, u64)>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    let plan = par::batches(samples as usize, BATCH);
    par::map(exec, &plan, |&(first, len)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((first / BATCH) as u64);
        let mut s = 0.0;
        let mut q = 0.0;
        for _ in 0..len {
            let x = draw(&mut rng);
            s += x;
            q += x * x;
        }
        (s, q, len as u64)
    })
}

/// Monte Carlo estimate of `f(s, t) = E ln m(X_s, X_{s+t}, t)`.
#[allow(clippy::too_many_arguments)]
pub fn mc_f_estimate(
    g: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    t_star: f64,
    s: f64,
    t: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    if !(s >= 0.0) || !(t >= 0.0) || s + t > t_star * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("(s, t) = ({s}, {t}) outside the triangle")));
    }
    if t == 0.0 {
        return Ok(McEstimate { estimate: 0.0, stderr: 0.0, samples });
    }
    let sampler = ConditionedSampler::new(g, v, w, t_star)?;
    let m = m_matrix(sampler.graph(), t, 1e-13, Execution::Sequential)?;
    let parts = batched(samples, seed, exec, |rng| {
        let walk = sampler.sample(rng);
        let x = walk.position_at(s);
        let y = walk.position_at(s + t);
        m.value(x, y).ln()
    });
    Ok(McEstimate::from_sums(&parts))
}

/// Memo of base-graph matrices keyed by quantized time.
struct MatrixMemo<'a> {
    graph: &'a FiniteGraph,
    cache: HashMap<u64, MMatrix>,
}

impl MatrixMemo<'_> {
    fn get(&mut self, dt: f64) -> &MMatrix {
        let key = (dt / TIME_QUANTUM).round() as u64;
        let graph = self.graph;
        self.cache.entry(key).or_insert_with(|| {
            m_matrix(graph, key as f64 * TIME_QUANTUM, 1e-13, Execution::Sequential).expect("walk times are small")
        })
    }
}

/// `C(X) = Σ_{i<j} m_{G^n}(X_{T_i}, X_{T_j}, T_j − T_i)`, each term a product
/// of base-graph values over coordinates.
fn collision_sum(walk: &PowerWalk, memo: &mut MatrixMemo<'_>) -> f64 {
    let states = walk.states();
    let mut times = Vec::with_capacity(states.len());
    times.push(0.0);
    times.extend(walk.jumps.iter().map(|j| j.0));
    let mut total = 0.0;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let m = memo.get(times[j] - times[i]);
            let prod: f64 = states[i].iter().zip(&states[j]).map(|(&a, &b)| m.value(a, b)).product();
            total += prod;
        }
    }
    total
}

/// Monte Carlo estimate of `E[1{X self-avoiding} e^{−C(X)}]` for the
/// conditioned walk on `base^n`.
#[allow(clippy::too_many_arguments)]
pub fn success_lower_bound(
    base: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    n: usize,
    t_star: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be positive".into()));
    }
    let sampler = ConditionedSampler::new(base, v, w, t_star)?;
    let parts = batched(samples, seed, exec, |rng| {
        let coords: Vec<BaseWalk> = (0..n).map(|_| sampler.sample(rng)).collect();
        let walk = PowerWalk::merge(sampler.start(), &coords);
        if !walk.is_self_avoiding() {
            return 0.0;
        }
        let mut memo = MatrixMemo { graph: sampler.graph(), cache: HashMap::new() };
        (-collision_sum(&walk, &mut memo)).exp()
    });
    Ok(McEstimate::from_sums(&parts))
}

/// Empirical probability that the merged walk on `base^n` is self-avoiding.
#[allow(clippy::too_many_arguments)]
pub fn self_avoiding_frequency(
    base: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    n: usize,
    t_star: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    let sampler = ConditionedSampler::new(base, v, w, t_star)?;
    let parts = batched(samples, seed, exec, |rng| {
        let coords: Vec<BaseWalk> = (0..n).map(|_| sampler.sample(rng)).collect();
        f64::from(u8::from(PowerWalk::merge(sampler.start(), &coords).is_self_avoiding()))
    });
    Ok(McEstimate::from_sums(&parts))
}

/// `Σ_{γ self-avoiding} Π λ(e) t^|γ| / |γ|!` by exhaustive enumeration.
pub fn self_avoiding_sum(g: &BaseGraph, v: &VertexId, w: &VertexId, t: f64) -> Result<f64> {
    const LIMIT: usize = 64;
    let f = g.require_finite()?;
    if f.len() > LIMIT {
        return Err(Error::TooLarge { size: f.len(), limit: LIMIT });
    }
    let (vi, wi) = (f.require(v)?, f.require(w)?);
    #[allow(clippy::too_many_arguments)]
    fn dfs(f: &FiniteGraph, x: usize, w: usize, depth: usize, weight: f64, t: f64, on: &mut [bool], acc: &mut f64) {
        if x == w {
            *acc += weight;
            return;
        }
        for s in f.out_steps(x) {
            if !on[s.to] {
                on[s.to] = true;
                let next = weight * s.rate * t / (depth + 1) as f64;
                dfs(f, s.to, w, depth + 1, next, t, on, acc);
                on[s.to] = false;
            }
        }
    }
    let mut on = vec![false; f.len()];
    on[vi] = true;
    let mut acc = 0.0;
    dfs(f, vi, wi, 0, 1.0, t, &mut on, &mut acc);
    Ok(acc)
}

/// Empirical frequency of the unconditioned walk sitting at `w` at time `t`.
///
/// The walk jumps at rate `Δ_o`; at a jump from `x` it follows a step of
/// rate `λ` with probability `λ / Δ_o` and is killed otherwise.
#[allow(clippy::too_many_arguments)]
pub fn unconditioned_hit_frequency(
    g: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    t: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    let f = g.require_finite()?;
    let (vi, wi) = (f.require(v)?, f.require(w)?);
    let rate = f.delta_out();
    let parts = batched(samples, seed, exec, |rng| {
        let mut x = vi;
        let mut clock = 0.0;
        loop {
            clock += -(1.0 - rng.random::<f64>()).ln() / rate;
            if clock > t {
                return f64::from(u8::from(x == wi));
            }
            let mut pick = rng.random::<f64>() * rate;
            let mut moved = false;
            for s in f.out_steps(x) {
                if pick < s.rate {
                    x = s.to;
                    moved = true;
                    break;
                }
                pick -= s.rate;
            }
            if !moved {
                return 0.0;
            }
        }
    });
    Ok(McEstimate::from_sums(&parts))
}

/// Counts of the position tuples `(X_{t_1}, …, X_{t_k})` over `samples`
/// conditioned walks.
pub fn empirical_positions(
    sampler: &ConditionedSampler,
    times: &[f64],
    samples: u64,
    seed: u64,
) -> HashMap<Vec<usize>, u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = HashMap::new();
    for _ in 0..samples {
        let walk = sampler.sample(&mut rng);
        *counts.entry(times.iter().map(|&t| walk.position_at(t)).collect()).or_insert(0) += 1;
    }
    counts
}

/// Plug-in entropy of `X_t` with a delta-method standard error.
pub fn entropy_estimate(sampler: &ConditionedSampler, t: f64, samples: u64, seed: u64) -> McEstimate {
    let counts = empirical_positions(sampler, &[t], samples, seed);
    let n = samples as f64;
    let mut h = 0.0;
    let mut second = 0.0;
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort();
    for (_, c) in keys {
        let p = c as f64 / n;
        h -= p * p.ln();
        second += p * p.ln() * p.ln();
    }
    McEstimate { estimate: h, stderr: ((second - h * h).max(0.0) / n).sqrt(), samples }
}
