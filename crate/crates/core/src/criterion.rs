//! The criterion function `f(s, t)`, the tilted sum `g`, the sign
//! classification of `sup f`, margin extraction and the symmetry check.
//!
//! `f(s, t) = Σ_{x,y} m(v,x,s) m(x,y,t) m(y,w,u) ln m(x,y,t)` with
//! `u = t* − s − t`, and `g(s, t, u, α) = Σ m(v,x,s) m(x,y,t)^{1+α} m(y,w,u)`.
//! Both are evaluated over a finite frame of vertex pairs with every
//! approximation folded into a certified absolute error.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::critical::critical_time;
use crate::error::{Error, Result};
use crate::genfun::{m_matrix, series_row, CertifiedValue, MMatrix, SeriesPlan};
use crate::graph::{BaseGraph, Direction, FiniteGraph, VertexId};
use crate::numeric::{sup_abs_xlogx, xlogx, xlogx_perturbation, Neumaier};
use crate::par::{self, Execution};

/// Threshold separating a numerical zero from a positive supremum.
pub const DEFAULT_DECISION_EPS: f64 = 1e-6;
/// Generating function tolerance used inside `f` and `g`.
pub const DEFAULT_M_TOL: f64 = 1e-12;
/// Tilt exponents tried when extracting a margin.
pub const DEFAULT_ALPHA_GRID: [f64; 10] = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.9];

/// Everything that does not depend on `(s, t)`.
#[derive(Clone, Debug)]
enum Support {
    /// Finite graph: reachability is exact, so structurally zero terms are
    /// skipped without error.
    Finite { graph: Arc<FiniteGraph>, reach: Arc<Vec<Vec<bool>>>, v: usize, w: usize },
    /// Oracle graph: frames are built per evaluation.
    Oracle(BaseGraph),
}

/// A finite set of `x` and `y` candidates with the three factors evaluated.
struct Frame {
    a: Vec<(usize, f64, f64)>,
    c: Vec<(usize, f64, f64)>,
    m: MMatrix,
    reach: Option<Arc<Vec<Vec<bool>>>>,
    /// Mass of `m(v,·,s)` outside the `x` candidates.
    tail_a: f64,
    /// Mass of `m(·,w,u)` outside the `y` candidates.
    tail_c: f64,
    /// `e^{Δ_o s}`, bound on `Σ_x m(v,x,s)`.
    mass_a: f64,
    /// `e^{Δ_in u}`, bound on `Σ_y m(y,w,u)`.
    mass_c: f64,
    /// `e^{Δ_o t}`, bound on each `m(x,y,t)`.
    max_m: f64,
}

/// Evaluator for `f` and `g` at a fixed graph, endpoints and `t*`.
#[derive(Clone, Debug)]
pub struct CriterionProblem {
    support: Support,
    v: VertexId,
    w: VertexId,
    pub t_star: f64,
    /// Uncertainty of `t_star`; folded into the `m(·,w,u)` factors.
    pub t_star_err: f64,
    pub tol: f64,
    rate_out: f64,
    rate_in: f64,
}

impl CriterionProblem {
    pub fn new(g: &BaseGraph, v: &VertexId, w: &VertexId, t_star: f64, tol: f64) -> Result<Self> {
        g.require_vertex(v)?;
        g.require_vertex(w)?;
        if !(t_star >= 0.0) || !t_star.is_finite() {
            return Err(Error::InvalidArgument(format!("t* must be finite and nonnegative, got {t_star}")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let support = match g {
            BaseGraph::Finite(f) => Support::Finite {
                graph: f.clone(),
                reach: Arc::new(f.reachability()),
                v: f.require(v)?,
                w: f.require(w)?,
            },
            BaseGraph::Oracle(_) => Support::Oracle(g.clone()),
        };
        Ok(CriterionProblem {
            support,
            v: v.clone(),
            w: w.clone(),
            t_star,
            t_star_err: 0.0,
            tol,
            rate_out: g.delta_out(),
            rate_in: g.delta_in(),
        })
    }

    /// Computes `t*` first, to `critical_tol`.
    pub fn with_critical_time(g: &BaseGraph, v: &VertexId, w: &VertexId, tol: f64, critical_tol: f64) -> Result<Self> {
        let ct = critical_time(g, v, w, critical_tol)?;
        let mut p = CriterionProblem::new(g, v, w, ct.t_star, tol)?;
        p.t_star_err = ct.abs_err;
        Ok(p)
    }

    fn check_point(&self, s: f64, t: f64) -> Result<f64> {
        if !(s >= 0.0) || !(t >= 0.0) || s + t > self.t_star * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::InvalidArgument(format!(
                "(s, t) = ({s}, {t}) lies outside the triangle s, t ≥ 0, s + t ≤ {}",
                self.t_star
            )));
        }
        Ok((self.t_star - s - t).max(0.0))
    }

    fn frame(&self, s: f64, t: f64, u: f64) -> Result<Frame> {
        let tol = self.tol;
        let plan_s = SeriesPlan::new(self.rate_out, s, tol)?;
        let plan_u = SeriesPlan::new(self.rate_in, u, tol)?;
        let mass_a = (self.rate_out * s).exp();
        let mass_c = (self.rate_in * u).exp();
        let max_m = (self.rate_out * t).exp();
        // a shift of t* moves u; |∂_u m(y,w,u)| ≤ Δ_o e^{Δ_in u}
        let shift = self.t_star_err * self.rate_out * (self.rate_in * (u + self.t_star_err)).exp();
        match &self.support {
            Support::Finite { graph, reach, v, w } => {
                let (av, ae) = series_row(graph, *v, s, Direction::Out, &plan_s);
                let (cv, ce) = series_row(graph, *w, u, Direction::In, &plan_u);
                let a = (0..graph.len()).filter(|&x| reach[*v][x]).map(|x| (x, av[x], ae[x])).collect();
                let c = (0..graph.len()).filter(|&y| reach[y][*w]).map(|y| (y, cv[y], ce[y] + shift)).collect();
                let m = m_matrix(graph, t, tol, Execution::Sequential)?;
                Ok(Frame { a, c, m, reach: Some(reach.clone()), tail_a: 0.0, tail_c: 0.0, mass_a, mass_c, max_m })
            }
            Support::Oracle(g) => {
                let plan_t = SeriesPlan::new(self.rate_out, t, tol)?;
                let xs = g.directed_ball(&self.v, plan_s.order, Direction::Out)?;
                let ys = g.directed_ball(&self.w, plan_u.order, Direction::In)?;
                let mut keep: BTreeSet<VertexId> = g.directed_ball(&self.v, plan_s.order + plan_t.order, Direction::Out)?;
                keep.extend(ys.iter().cloned());
                let win = g.induced(&keep)?;
                let vi = win.require(&self.v)?;
                let wi = win.require(&self.w)?;
                let (av, ae) = series_row(&win, vi, s, Direction::Out, &plan_s);
                let (cv, ce) = series_row(&win, wi, u, Direction::In, &plan_u);
                let a = xs
                    .iter()
                    .map(|x| win.require(x).map(|i| (i, av[i], ae[i])))
                    .collect::<Result<Vec<_>>>()?;
                let c = ys
                    .iter()
                    .map(|y| win.require(y).map(|i| (i, cv[i], ce[i] + shift)))
                    .collect::<Result<Vec<_>>>()?;
                let m = m_matrix(&win, t, tol, Execution::Sequential)?;
                Ok(Frame {
                    a,
                    c,
                    m,
                    reach: None,
                    tail_a: plan_s.tail_bound,
                    tail_c: plan_u.tail_bound,
                    mass_a,
                    mass_c,
                    max_m,
                })
            }
        }
    }

    /// Sums `a · K(m) · c` over the frame. `term` returns the value and the
    /// error of one summand, `sup_k` bounds `|K|` on `[0, b]`.
    fn triple_sum<T, S>(&self, frame: &Frame, term: T, sup_k: S) -> CertifiedValue
    where
        T: Fn(f64, f64, f64, f64, f64, f64) -> (f64, f64),
        S: Fn(f64) -> f64,
    {
        let mut value = Neumaier::new();
        let mut err = Neumaier::new();
        let mut magnitude = 0.0;
        let mut count = 0usize;
        for &(x, a, ea) in &frame.a {
            for &(y, c, ec) in &frame.c {
                if let Some(reach) = &frame.reach {
                    if !reach[x][y] {
                        continue;
                    }
                }
                let (tv, te) = term(a, ea, c, ec, frame.m.value(x, y), frame.m.err(x, y));
                value.add(tv);
                err.add(te);
                magnitude += tv.abs();
                count += 1;
            }
        }
        let k = sup_k(frame.max_m);
        let outside = frame.tail_a * k * frame.mass_c + frame.mass_a * k * frame.tail_c;
        // each product carries a few roundings; the sum itself is compensated
        let rounding = (8.0 + count as f64 * 1e-3) * f64::EPSILON * magnitude;
        CertifiedValue { value: value.value(), abs_err: err.value() * (1.0 + 4.0 * f64::EPSILON) + outside + rounding }
    }

    /// `f(s, t)`.
    pub fn f(&self, s: f64, t: f64) -> Result<CertifiedValue> {
        let u = self.check_point(s, t)?;
        if t == 0.0 {
            // every m(x,y,0) is 0 or 1, so every term vanishes
            return Ok(CertifiedValue::exact(0.0));
        }
        let frame = self.frame(s, t, u)?;
        Ok(self.triple_sum(&frame, f_term, sup_abs_xlogx))
    }

    /// `g(s, t, u, α)` for an arbitrary `u ≥ 0`.
    pub fn g(&self, s: f64, t: f64, u: f64, alpha: f64) -> Result<CertifiedValue> {
        if !(alpha > -1.0) {
            return Err(Error::InvalidArgument(format!("alpha must exceed -1, got {alpha}")));
        }
        if !(s >= 0.0) || !(t >= 0.0) || !(u >= 0.0) {
            return Err(Error::InvalidArgument(format!("s, t, u must be nonnegative, got ({s}, {t}, {u})")));
        }
        let frame = self.frame(s, t, u)?;
        let p = 1.0 + alpha;
        Ok(self.triple_sum(
            &frame,
            |a, ea, c, ec, m, em| {
                let val = a * c * m.powf(p);
                let hi = (a + ea) * (c + ec) * (m + em).powf(p);
                let lo = (a - ea).max(0.0) * (c - ec).max(0.0) * (m - em).max(0.0).powf(p);
                (val, (hi - val).max(val - lo))
            },
            |b| b.powf(p),
        ))
    }

    /// `Σ a m^{1+α} (ln m)^k c`, uncertified. The `k`-th α-derivative of `g`.
    pub fn g_derivative(&self, s: f64, t: f64, u: f64, alpha: f64, k: i32) -> Result<f64> {
        let frame = self.frame(s, t, u)?;
        let mut acc = Neumaier::new();
        for &(x, a, _) in &frame.a {
            for &(y, c, _) in &frame.c {
                let m = frame.m.value(x, y);
                if m > 0.0 {
                    acc.add(a * c * m.powf(1.0 + alpha) * m.ln().powi(k));
                }
            }
        }
        Ok(acc.value())
    }
}

/// One summand of `f` with its error.
///
/// When the certified interval of `m` reaches 0 the term is clamped to 0 and
/// charged `sup |φ|` over `[0, m + err]`.
fn f_term(a: f64, ea: f64, c: f64, ec: f64, m: f64, em: f64) -> (f64, f64) {
    let outer = (a + ea) * (c + ec);
    if m <= em {
        return (0.0, outer * sup_abs_xlogx(m + em));
    }
    let phi = xlogx(m);
    let dphi = xlogx_perturbation(m, em);
    let val = a * c * phi;
    (val, outer * (phi.abs() + dphi) - a * c * phi.abs())
}

/// `f_g^{vw}(s, t)` at the given `t*`.
pub fn f_eval(g: &BaseGraph, v: &VertexId, w: &VertexId, t_star: f64, s: f64, t: f64, tol: f64) -> Result<CertifiedValue> {
    CriterionProblem::new(g, v, w, t_star, tol)?.f(s, t)
}

/// `g(s, t, u, α)`; independent of `t*`.
#[allow(clippy::too_many_arguments)]
pub fn tilted_sum(
    g: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    s: f64,
    t: f64,
    u: f64,
    alpha: f64,
    tol: f64,
) -> Result<CertifiedValue> {
    CriterionProblem::new(g, v, w, s + t + u, tol)?.g(s, t, u, alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Classification {
    Positive,
    Nonpositive,
    Undecided,
}

/// Options for [`sup_f_classify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Cells per side of the coarse grid.
    pub grid: usize,
    pub max_depth: usize,
    pub decision_eps: f64,
    /// Generating function tolerance.
    pub tol: f64,
    /// Cells refined per level, both overall and inside the strip.
    pub beam: usize,
    /// Cells with `t` above this fraction of `t*` form the boundary strip.
    pub strip: f64,
    pub critical_tol: f64,
    pub execution: Execution,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            grid: 32,
            max_depth: 12,
            decision_eps: DEFAULT_DECISION_EPS,
            tol: DEFAULT_M_TOL,
            beam: 8,
            strip: 0.9,
            critical_tol: 1e-12,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub s: f64,
    pub t: f64,
    pub value: f64,
    pub err: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridStats {
    pub evaluations: usize,
    pub coarse_points: usize,
    pub refined_cells: usize,
    pub depth_reached: usize,
}

/// Certificate that the tilted sum stays below 1 on a `u`-interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginCertificate {
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
    pub c: f64,
    /// `t* − s − t` at the computed `t*`.
    pub u_start: f64,
    /// Certified upper bound of `g(s, t, ·, −α)` over the whole interval.
    pub max_tilted_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub classification: Classification,
    pub t_star: f64,
    pub t_star_err: f64,
    pub sup_value: f64,
    pub sup_err: f64,
    pub argmax: (f64, f64),
    pub decision_eps: f64,
    pub grid_stats: GridStats,
    pub margin: Option<MarginCertificate>,
    /// The coarse grid, ordered by `t` then `s`.
    pub grid: Vec<GridPoint>,
}

/// Cell of the refinement quadtree in lattice units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Cell {
    i: u64,
    j: u64,
    size: u64,
}

/// Searches the triangle `{s, t ≥ 0, s + t ≤ t*}` for the supremum of `f`.
///
/// The triangle is parameterized by `t = τ t*`, `s = σ (t* − t)` over the
/// unit square. A coarse grid is followed by quadtree refinement of the
/// best cells overall and of the best cells with `τ > strip`, where the
/// known positive maxima sit.
pub fn sup_f_classify(g: &BaseGraph, v: &VertexId, w: &VertexId, opts: &ClassifyOptions) -> Result<CriterionReport> {
    if opts.grid == 0 || opts.max_depth > 40 {
        return Err(Error::InvalidArgument("grid must be positive and depth at most 40".into()));
    }
    let problem = CriterionProblem::with_critical_time(g, v, w, opts.tol, opts.critical_tol)?;
    classify_problem(&problem, opts)
}

/// [`sup_f_classify`] for a prepared problem.
pub fn classify_problem(problem: &CriterionProblem, opts: &ClassifyOptions) -> Result<CriterionReport> {
    let t_star = problem.t_star;
    let scale = 1u64 << opts.max_depth;
    let denom = (opts.grid as u64 * scale) as f64;
    let coords = |i: u64, j: u64| {
        let tau = j as f64 / denom;
        let t = tau * t_star;
        let s = i as f64 / denom * (t_star - t);
        (s, t)
    };
    let mut memo: BTreeMap<(u64, u64), CertifiedValue> = BTreeMap::new();
    let evaluate = |keys: Vec<(u64, u64)>, memo: &mut BTreeMap<(u64, u64), CertifiedValue>| -> Result<()> {
        let fresh: Vec<(u64, u64)> = keys.into_iter().filter(|k| !memo.contains_key(k)).collect::<BTreeSet<_>>().into_iter().collect();
        let out = par::map(opts.execution, &fresh, |&(i, j)| {
            let (s, t) = coords(i, j);
            problem.f(s, t)
        });
        for (k, r) in fresh.into_iter().zip(out) {
            memo.insert(k, r?);
        }
        Ok(())
    };

    let n = opts.grid as u64;
    let coarse: Vec<(u64, u64)> = (0..=n).flat_map(|j| (0..=n).map(move |i| (i * scale, j * scale))).collect();
    evaluate(coarse.clone(), &mut memo)?;

    let score = |c: &Cell, memo: &BTreeMap<(u64, u64), CertifiedValue>| {
        [(c.i, c.j), (c.i + c.size, c.j), (c.i, c.j + c.size), (c.i + c.size, c.j + c.size), (c.i + c.size / 2, c.j + c.size / 2)]
            .iter()
            .filter_map(|k| memo.get(k))
            .map(|v| v.value)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let strip_j = (opts.strip * denom).floor() as u64;
    let mut frontier: Vec<Cell> =
        (0..n).flat_map(|j| (0..n).map(move |i| Cell { i: i * scale, j: j * scale, size: scale })).collect();
    let mut stats = GridStats { coarse_points: coarse.len(), ..GridStats::default() };
    for depth in 0..opts.max_depth {
        let mut ranked: Vec<(f64, Cell)> = frontier.iter().map(|c| (score(c, &memo), *c)).collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut chosen: BTreeSet<Cell> = ranked.iter().take(opts.beam).map(|r| r.1).collect();
        chosen.extend(ranked.iter().filter(|r| r.1.j + r.1.size > strip_j).take(opts.beam).map(|r| r.1));
        let mut children = Vec::with_capacity(chosen.len() * 4);
        let mut keys = Vec::new();
        for c in &chosen {
            let h = c.size / 2;
            for (di, dj) in [(0, 0), (h, 0), (0, h), (h, h)] {
                let child = Cell { i: c.i + di, j: c.j + dj, size: h };
                keys.extend([
                    (child.i, child.j),
                    (child.i + h, child.j),
                    (child.i, child.j + h),
                    (child.i + h, child.j + h),
                    (child.i + h / 2, child.j + h / 2),
                ]);
                children.push(child);
            }
        }
        evaluate(keys, &mut memo)?;
        stats.refined_cells += chosen.len();
        stats.depth_reached = depth + 1;
        frontier = children;
    }
    stats.evaluations = memo.len();

    let (best_key, best) = memo
        .iter()
        .fold(None::<(&(u64, u64), &CertifiedValue)>, |acc, (k, v)| match acc {
            Some((_, b)) if b.value >= v.value => acc,
            _ => Some((k, v)),
        })
        .expect("grid is never empty");
    let all_below = memo.values().all(|v| v.value + v.abs_err <= opts.decision_eps);
    let classification = if best.value - best.abs_err > opts.decision_eps {
        Classification::Positive
    } else if all_below {
        Classification::Nonpositive
    } else {
        Classification::Undecided
    };
    let grid = coarse
        .iter()
        .map(|&(i, j)| {
            let (s, t) = coords(i, j);
            let v = memo[&(i, j)];
            GridPoint { s, t, value: v.value, err: v.abs_err }
        })
        .collect();
    Ok(CriterionReport {
        classification,
        t_star,
        t_star_err: problem.t_star_err,
        sup_value: best.value,
        sup_err: best.abs_err,
        argmax: coords(best_key.0, best_key.1),
        decision_eps: opts.decision_eps,
        grid_stats: stats,
        margin: None,
        grid,
    })
}

/// Extracts `c > 0` such that `g(s, t, u, −α) < 1` for every
/// `u ∈ [t* − s − t, t* − s − t + c]`, at the report's argmax.
///
/// `g` is increasing in `u`, so certifying the right endpoint certifies the
/// interval. The right endpoint is pushed out by the `t*` uncertainty too.
pub fn not_sharp_margin(
    g: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    report: &CriterionReport,
    alpha_grid: &[f64],
    tol: f64,
) -> Result<MarginCertificate> {
    if report.classification != Classification::Positive {
        return Err(Error::NotPositive);
    }
    let mut problem = CriterionProblem::new(g, v, w, report.t_star, tol)?;
    problem.t_star_err = report.t_star_err;
    margin_for_problem(&problem, report.argmax, alpha_grid)
}

/// [`not_sharp_margin`] for a prepared problem.
pub fn margin_for_problem(problem: &CriterionProblem, argmax: (f64, f64), alpha_grid: &[f64]) -> Result<MarginCertificate> {
    let (s, t) = argmax;
    let u0 = (problem.t_star - s - t).max(0.0);
    let slack = problem.t_star_err;
    let upper = |alpha: f64, c: f64| problem.g(s, t, u0 + slack + c, -alpha).map(|g| g.hi());

    let mut best: Option<(f64, f64)> = None;
    for &alpha in alpha_grid {
        if !(alpha > 0.0 && alpha < 1.0) {
            continue;
        }
        let hi = upper(alpha, 0.0)?;
        if hi < 1.0 && best.is_none_or(|(_, b)| hi < b) {
            best = Some((alpha, hi));
        }
    }
    let (alpha, _) = best.ok_or(Error::NoMargin)?;

    let mut lo = 0.0;
    let mut hi = 1e-9;
    loop {
        if upper(alpha, hi)? >= 1.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 4.0 * problem.t_star.max(1.0) {
            break;
        }
    }
    for _ in 0..60 {
        if hi - lo <= 1e-3 * lo.max(1e-15) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if upper(alpha, mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(Error::NoMargin);
    }
    Ok(MarginCertificate { s, t, alpha, c: lo, u_start: u0, max_tilted_sum: upper(alpha, lo)? })
}

/// Automorphisms of a small finite graph, as position permutations.
///
/// Two graphs are compared through the matrix of total rates `x → y`, so
/// orientation and intensity are respected.
pub fn automorphisms(g: &FiniteGraph) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut w = vec![vec![0.0; n]; n];
    for (x, row) in w.iter_mut().enumerate() {
        for s in g.out_steps(x) {
            row[s.to] += s.rate;
        }
    }
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(k: usize, w: &[Vec<f64>], perm: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = w.len();
        if k == n {
            out.push(perm.clone());
            return;
        }
        for img in 0..n {
            if used[img] {
                continue;
            }
            let consistent = (0..k).all(|j| w[k][j] == w[img][perm[j]] && w[j][k] == w[perm[j]][img]);
            if !consistent || w[k][k] != w[img][img] {
                continue;
            }
            perm[k] = img;
            used[img] = true;
            extend(k + 1, w, perm, used, out);
            used[img] = false;
        }
        perm[k] = usize::MAX;
    }
    extend(0, &w, &mut perm, &mut used, &mut out);
    out
}

/// Looks for a permutation `σ` with `(v, x) ≅ (σ(x), w)` and
/// `(x, w) ≅ (v, σ(x))` for all `x`, where `≅` means some automorphism maps
/// the first pair onto the second.
pub fn symmetry_condition(
    g: &BaseGraph,
    v: &VertexId,
    w: &VertexId,
    max_vertices: usize,
) -> Result<Option<BTreeMap<VertexId, VertexId>>> {
    let f = g.require_finite()?;
    if f.len() > max_vertices {
        return Err(Error::TooLarge { size: f.len(), limit: max_vertices });
    }
    let (vi, wi) = (f.require(v)?, f.require(w)?);
    let n = f.len();
    let autos = automorphisms(f);

    // pair orbits through union-find over the group action
    let mut parent: Vec<usize> = (0..n * n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for phi in &autos {
        for a in 0..n {
            for b in 0..n {
                let (p, q) = (find(&mut parent, a * n + b), find(&mut parent, phi[a] * n + phi[b]));
                if p != q {
                    parent[p.max(q)] = p.min(q);
                }
            }
        }
    }
    let orbit: Vec<usize> = (0..n * n).map(|k| find(&mut parent, k)).collect();
    let pair = |a: usize, b: usize| orbit[a * n + b];

    let allowed: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| pair(vi, x) == pair(y, wi) && pair(x, wi) == pair(vi, y)).collect())
        .collect();
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn assign(x: usize, allowed: &[Vec<usize>], sigma: &mut [usize], used: &mut [bool]) -> bool {
        if x == allowed.len() {
            return true;
        }
        for &y in &allowed[x] {
            if !used[y] {
                used[y] = true;
                sigma[x] = y;
                if assign(x + 1, allowed, sigma, used) {
                    return true;
                }
                used[y] = false;
            }
        }
        false
    }
    if !assign(0, &allowed, &mut sigma, &mut used) {
        return Ok(None);
    }
    Ok(Some((0..n).map(|x| (f.id(x).clone(), f.id(sigma[x]).clone())).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, directed_edge, paw};

    fn vid(s: &str) -> VertexId {
        VertexId::parse(s)
    }

    #[test]
    fn directed_edge_is_t_ln_t() {
        let g = directed_edge();
        let f = f_eval(&g, &vid("0"), &vid("1"), 1.0, 0.2, 0.5, 1e-12).unwrap();
        assert!((f.value - 0.5 * 0.5f64.ln()).abs() < 1e-10);
        assert!((f.value + 0.3465736).abs() < 1e-7);
    }

    #[test]
    fn boundary_is_zero() {
        let g = paw();
        let p = CriterionProblem::with_critical_time(&g, &vid("v"), &vid("w"), 1e-12, 1e-12).unwrap();
        let z = p.f(0.3, 0.0).unwrap();
        assert_eq!(z.value, 0.0);
        let e = p.f(0.0, p.t_star).unwrap();
        assert!(e.value.abs() <= e.abs_err + 1e-12, "{e:?}");
    }

    #[test]
    fn paw_signal_near_the_edge() {
        let g = paw();
        let p = CriterionProblem::with_critical_time(&g, &vid("v"), &vid("w"), 1e-12, 1e-12).unwrap();
        assert!((p.t_star - 1.0310759384).abs() < 1e-9);
        let f = p.f(0.0, 1.01561).unwrap();
        assert!((f.value - 8.062e-4).abs() < 5e-6, "{f:?}");
        assert!(f.abs_err < 1e-8);
    }

    #[test]
    fn k2_midpoint_entropy() {
        let g = complete(2);
        let p = CriterionProblem::with_critical_time(&g, &vid("0"), &vid("1"), 1e-12, 1e-13).unwrap();
        for s in [0.0, 0.1, 0.3] {
            let f = p.f(s, p.t_star / 2.0).unwrap();
            assert!((f.value + 0.5 * 2f64.ln()).abs() < 1e-9 + f.abs_err, "{f:?}");
        }
    }

    #[test]
    fn tilted_sum_identities() {
        let g = directed_edge();
        let one = tilted_sum(&g, &vid("0"), &vid("1"), 0.0, 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((one.value - 1.0).abs() < 1e-12);
        let p = CriterionProblem::with_critical_time(&paw(), &vid("v"), &vid("w"), 1e-12, 1e-13).unwrap();
        let (s, t) = (0.2, 0.5);
        let u = p.t_star - s - t;
        let g0 = p.g(s, t, u, 0.0).unwrap();
        assert!((g0.value - 1.0).abs() <= g0.abs_err + 1e-10, "{g0:?}");
    }

    #[test]
    fn symmetric_examples() {
        let s = symmetry_condition(&complete(2), &vid("0"), &vid("1"), 8).unwrap().unwrap();
        assert_eq!(s[&vid("0")], vid("1"));
        assert!(symmetry_condition(&cycle(4), &vid("0"), &vid("2"), 8).unwrap().is_some());
        assert!(symmetry_condition(&paw(), &vid("v"), &vid("w"), 8).unwrap().is_none());
        let big = complete(9);
        assert!(matches!(symmetry_condition(&big, &vid("0"), &vid("1"), 8), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(cycle(4).as_finite().unwrap()).len(), 8);
        assert_eq!(automorphisms(complete(4).as_finite().unwrap()).len(), 24);
        assert_eq!(automorphisms(paw().as_finite().unwrap()).len(), 2);
        assert_eq!(automorphisms(directed_edge().as_finite().unwrap()).len(), 1);
    }

    #[test]
    fn margin_needs_positive_report() {
        let g = directed_edge();
        let opts = ClassifyOptions { grid: 4, max_depth: 2, ..ClassifyOptions::default() };
        let r = sup_f_classify(&g, &vid("0"), &vid("1"), &opts).unwrap();
        assert_eq!(r.classification, Classification::Nonpositive);
        assert_eq!(not_sharp_margin(&g, &vid("0"), &vid("1"), &r, &DEFAULT_ALPHA_GRID, 1e-12), Err(Error::NotPositive));
    }
}
