//! Generating functions `m_H(v, w, t)`.
//!
//! `m_H(v, w, t)` sums `Π λ(e) · t^|γ| / |γ|!` over every path `γ` from `v`
//! to `w`, i.e. it is the `(v, w)` entry of `exp(tA)` for the weighted
//! adjacency matrix `A`. We evaluate the action of the truncated exponential
//! series on an indicator vector. The truncation order is chosen from the
//! bound "weighted length-`j` path mass from a fixed vertex is at most
//! `Δ_o^j`", so the omitted tail is certified without knowing `A`'s spectrum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Direction, FiniteGraph, VertexId};
use crate::numeric::{ln_factorial, Neumaier};
use crate::par::{self, Execution};

/// Default tolerance for scalar queries.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default per-entry tolerance for rows.
pub const DEFAULT_ROW_TOL: f64 = 1e-10;
/// Largest truncation order we are willing to run.
pub const MAX_ORDER: usize = 10_000;

/// A value with a rigorous absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: f64,
    pub abs_err: f64,
}

impl CertifiedValue {
    pub fn exact(value: f64) -> Self {
        CertifiedValue { value, abs_err: 0.0 }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.abs_err
    }

    pub fn hi(&self) -> f64 {
        self.value + self.abs_err
    }

    /// True when `x` lies in the certified interval widened by `slack`.
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        (x - self.value).abs() <= self.abs_err + slack
    }
}

/// Truncation order and the certified bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPlan {
    pub order: usize,
    /// Upper bound on `Σ_{j>order} x^j / j!` where `x = rate · t`.
    pub tail_bound: f64,
}

impl SeriesPlan {
    /// Smallest `N` with `x^{N+1}/(N+1)! · e^x ≤ tol`, `x = rate · t`.
    pub fn new(rate: f64, t: f64, tol: f64) -> Result<SeriesPlan> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time must be finite and nonnegative, got {t}")));
        }
        let x = rate * t;
        if x == 0.0 {
            return Ok(SeriesPlan { order: 0, tail_bound: 0.0 });
        }
        let ln_x = x.ln();
        let ln_tol = tol.ln();
        // ln of x^{n+1}/(n+1)! · e^x, stepped in n
        let mut ln_bound = ln_x + x;
        let mut n = 0usize;
        while ln_bound > ln_tol {
            n += 1;
            ln_bound += ln_x - ((n + 1) as f64).ln();
            if n > 50 * MAX_ORDER {
                break;
            }
        }
        if n > MAX_ORDER {
            return Err(Error::TolUnreachable { needed: n, cap: MAX_ORDER, rate_time: x });
        }
        // Re-derive the bound directly to avoid drift from the recurrence.
        let tail = ((n + 1) as f64 * ln_x - ln_factorial(n + 1) + x).exp();
        Ok(SeriesPlan { order: n, tail_bound: tail.max(ln_bound.exp()) })
    }
}

/// Roundoff bound per unit of value for a series of order `n` on a graph
/// with maximal degree `delta`.
fn rounding_factor(order: usize, delta: usize) -> f64 {
    (order as f64 * (delta as f64 + 2.0) + 4.0) * f64::EPSILON
}

/// Truncated series for `m(src, ·, t)` (direction `Out`) or `m(·, src, t)`
/// (direction `In`) on a finite graph. Returns values and per-entry error
/// bounds.
pub fn series_row(g: &FiniteGraph, src: usize, t: f64, dir: Direction, plan: &SeriesPlan) -> (Vec<f64>, Vec<f64>) {
    let n = g.len();
    let mut acc = vec![Neumaier::new(); n];
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut active = vec![src];
    let mut mark = vec![false; n];
    cur[src] = 1.0;
    acc[src].add(1.0);
    for j in 1..=plan.order {
        let scale = t / j as f64;
        let mut touched = Vec::with_capacity(active.len() * 2);
        for &x in &active {
            let p = cur[x];
            if p == 0.0 {
                continue;
            }
            for s in g.steps(x, dir) {
                if !mark[s.to] {
                    mark[s.to] = true;
                    touched.push(s.to);
                }
                next[s.to] += p * s.rate;
            }
        }
        for &x in &active {
            cur[x] = 0.0;
        }
        for &y in &touched {
            mark[y] = false;
            let v = next[y] * scale;
            next[y] = 0.0;
            cur[y] = v;
            acc[y].add(v);
        }
        if touched.is_empty() {
            break;
        }
        active = touched;
    }
    let rf = rounding_factor(plan.order, g.delta());
    let values: Vec<f64> = acc.iter().map(Neumaier::value).collect();
    let errs = values.iter().map(|&v| plan.tail_bound + rf * v).collect();
    (values, errs)
}

/// Dense `m(x, y, t)` for every pair of a finite graph.
#[derive(Clone, Debug)]
pub struct MMatrix {
    pub n: usize,
    pub t: f64,
    values: Vec<f64>,
    errs: Vec<f64>,
}

impl MMatrix {
    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n + y]
    }

    #[inline]
    pub fn err(&self, x: usize, y: usize) -> f64 {
        self.errs[x * self.n + y]
    }

    pub fn get(&self, x: usize, y: usize) -> CertifiedValue {
        CertifiedValue { value: self.value(x, y), abs_err: self.err(x, y) }
    }
}

/// All-pairs generating function of a finite graph at time `t`, rows in
/// parallel.
pub fn m_matrix(g: &FiniteGraph, t: f64, tol: f64, exec: Execution) -> Result<MMatrix> {
    let plan = SeriesPlan::new(g.delta_out(), t, tol)?;
    let n = g.len();
    let rows = par::map_range(exec, n, |x| series_row(g, x, t, Direction::Out, &plan));
    let mut values = Vec::with_capacity(n * n);
    let mut errs = Vec::with_capacity(n * n);
    for (v, e) in rows {
        values.extend(v);
        errs.extend(e);
    }
    Ok(MMatrix { n, t, values, errs })
}

/// The finite ball on which a row of an oracle graph was computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallInfo {
    pub center: VertexId,
    pub radius: usize,
    pub direction: Direction,
    pub vertices: usize,
}

/// One row (or column) of the generating function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Row {
    pub center: VertexId,
    pub direction: Direction,
    pub t: f64,
    pub entries: BTreeMap<VertexId, CertifiedValue>,
    /// Bound on the total mass of entries not listed in `entries`.
    pub outside_mass: f64,
    /// Set for oracle graphs.
    pub ball: Option<BallInfo>,
    pub plan: SeriesPlan,
}

impl Row {
    pub fn get(&self, x: &VertexId) -> CertifiedValue {
        self.entries
            .get(x)
            .copied()
            .unwrap_or(CertifiedValue { value: 0.0, abs_err: self.outside_mass })
    }

    pub fn total(&self) -> f64 {
        self.entries.values().map(|c| c.value).collect::<Neumaier>().value()
    }
}

/// `m(v, x, t)` for every `x` (`Out`) or `m(x, v, t)` for every `x` (`In`).
///
/// On oracle graphs the series runs on the directed ball of radius `N`
/// around `v`, which holds every path of length at most `N`; the truncated
/// sums are therefore exact there and everything outside is tail mass.
pub fn m_row(g: &BaseGraph, v: &VertexId, t: f64, tol: f64, dir: Direction) -> Result<Row> {
    let plan = SeriesPlan::new(g.max_rate(dir), t, tol)?;
    let (local, ball) = match g {
        BaseGraph::Finite(_) => (None, None),
        BaseGraph::Oracle(_) => {
            let keep = g.directed_ball(v, plan.order, dir)?;
            let sub = g.induced(&keep)?;
            let info = BallInfo { center: v.clone(), radius: plan.order, direction: dir, vertices: sub.len() };
            (Some(sub), Some(info))
        }
    };
    let fg: &FiniteGraph = match (&local, g) {
        (Some(sub), _) => sub,
        (None, BaseGraph::Finite(f)) => f,
        (None, BaseGraph::Oracle(_)) => unreachable!(),
    };
    let src = fg.require(v)?;
    let (values, errs) = series_row(fg, src, t, dir, &plan);
    let entries = fg
        .ids()
        .iter()
        .zip(values.iter().zip(&errs))
        .map(|(id, (&value, &abs_err))| (id.clone(), CertifiedValue { value, abs_err }))
        .collect();
    let outside_mass = if ball.is_some() { plan.tail_bound } else { 0.0 };
    Ok(Row { center: v.clone(), direction: dir, t, entries, outside_mass, ball, plan })
}

/// `m_g(v, w, t)` with `abs_err ≤ tol` (up to roundoff, which is also
/// included in the reported bound).
pub fn m_eval(g: &BaseGraph, v: &VertexId, w: &VertexId, t: f64, tol: f64) -> Result<CertifiedValue> {
    g.require_vertex(v)?;
    g.require_vertex(w)?;
    if t == 0.0 {
        return Ok(CertifiedValue::exact(if v == w { 1.0 } else { 0.0 }));
    }
    let row = m_row(g, v, t, tol, Direction::Out)?;
    Ok(row.get(w))
}

/// Graph families with a closed-form generating function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `K₂`; `same` selects the diagonal entry.
    K2 { same: bool },
    Kq { q: usize, same: bool },
    /// `m_ℤ(0, k, t) = I_k(2t)`.
    ZChain { k: i64 },
    DirectedEdge,
    /// Directed path of length `l` with intensity `lambda`, endpoints.
    CalibratedChain { l: usize, lambda: f64 },
}

/// Closed-form generating function value.
pub fn closed_form_m(family: ClosedForm, t: f64) -> f64 {
    match family {
        ClosedForm::K2 { same: true } => t.cosh(),
        ClosedForm::K2 { same: false } => t.sinh(),
        ClosedForm::Kq { q, same } => {
            let q = q as f64;
            let big = ((q - 1.0) * t).exp();
            let small = (-t).exp();
            if same {
                (big + (q - 1.0) * small) / q
            } else {
                (big - small) / q
            }
        }
        ClosedForm::ZChain { k } => bessel_i(k.unsigned_abs() as usize, 2.0 * t),
        ClosedForm::DirectedEdge => t,
        ClosedForm::CalibratedChain { l, lambda } => {
            if t == 0.0 {
                return 0.0;
            }
            (l as f64 * (lambda * t).ln() - ln_factorial(l)).exp()
        }
    }
}

/// Modified Bessel function `I_k(x)` of integer order from its power series
/// `Σ_j (x/2)^{2j+k} / (j! (j+k)!)`.
pub fn bessel_i(k: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x.abs();
    let mut term = (k as f64 * half.ln() - ln_factorial(k)).exp();
    let q = half * half;
    let mut acc = Neumaier::new();
    acc.add(term);
    let mut j = 0usize;
    loop {
        j += 1;
        term *= q / (j as f64 * (j + k) as f64);
        acc.add(term);
        // terms decrease once j(j+k) > q
        if (j * (j + k)) as f64 > q && term < 1e-17 * acc.value() {
            break;
        }
        if j > 100_000 {
            break;
        }
    }
    let v = acc.value();
    if x < 0.0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, directed_edge, integer_line, paw};

    #[test]
    fn plan_tail_is_below_tol() {
        for (rate, t, tol) in [(1.0, 1.0, 1e-12), (3.0, 2.5, 1e-10), (2.0, 17.4, 1e-13)] {
            let p = SeriesPlan::new(rate, t, tol).unwrap();
            assert!(p.tail_bound <= tol * 1.0000001, "{p:?}");
            let x: f64 = rate * t;
            let exact_tail: f64 = (p.order + 1..p.order + 400)
                .map(|j| (j as f64 * x.ln() - ln_factorial(j)).exp())
                .sum();
            assert!(exact_tail <= p.tail_bound);
        }
        assert_eq!(SeriesPlan::new(5.0, 0.0, 1e-12).unwrap().order, 0);
    }

    #[test]
    fn cap_is_enforced() {
        let err = SeriesPlan::new(1.0, 20_000.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::TolUnreachable { .. }));
        assert!(err.is_numerical());
    }

    #[test]
    fn k2_is_sinh() {
        let g = complete(2);
        let m = m_eval(&g, &0.into(), &1.into(), 1.0, 1e-12).unwrap();
        assert!((m.value - 1.0f64.sinh()).abs() < 1e-12);
        assert!((m.value - 1.1752011936).abs() < 1e-10);
        assert!(m.abs_err <= 1e-12 + 1e-14);
    }

    #[test]
    fn zero_time_is_identity() {
        let g = paw();
        let v: VertexId = "v".into();
        assert_eq!(m_eval(&g, &v, &v, 0.0, 1e-12).unwrap(), CertifiedValue::exact(1.0));
        assert_eq!(m_eval(&g, &v, &"w".into(), 0.0, 1e-12).unwrap().value, 0.0);
        let row = m_row(&g, &v, 0.0, 1e-10, Direction::Out).unwrap();
        assert_eq!(row.get(&v).value, 1.0);
        assert_eq!(row.total(), 1.0);
    }

    #[test]
    fn integer_line_is_bessel() {
        let g = integer_line();
        let m = m_eval(&g, &0.into(), &1.into(), 1.0, 1e-13).unwrap();
        assert!((m.value - 1.590636854637329).abs() < 1e-12, "{}", m.value);
        let row = m_row(&g, &0.into(), 1.0, 1e-10, Direction::Out).unwrap();
        let ball = row.ball.as_ref().unwrap();
        assert_eq!(ball.vertices, 2 * ball.radius + 1);
        assert!(row.outside_mass <= 1e-10);
    }

    #[test]
    fn k3_closed_form() {
        let expected = (2f64.exp() - (-1f64).exp()) / 3.0;
        assert!((expected - 2.34039221925307).abs() < 1e-12);
        let m = m_eval(&complete(3), &0.into(), &1.into(), 1.0, 1e-13).unwrap();
        assert!((m.value - expected).abs() < 1e-12);
    }

    #[test]
    fn k2_row() {
        let row = m_row(&complete(2), &0.into(), 0.7, 1e-10, Direction::Out).unwrap();
        assert!((row.get(&0.into()).value - 0.7f64.cosh()).abs() < 1e-10);
        assert!((row.get(&1.into()).value - 0.7f64.sinh()).abs() < 1e-10);
        assert!(row.ball.is_none());
    }

    #[test]
    fn paw_row_mass_bound() {
        let row = m_row(&paw(), &"v".into(), 0.5, 1e-10, Direction::Out).unwrap();
        assert!(row.total() <= (3.0f64 * 0.5).exp());
    }

    #[test]
    fn closed_forms_agree_with_series() {
        let k2 = complete(2);
        let k5 = complete(5);
        let de = directed_edge();
        let z = integer_line();
        for i in 0..=20 {
            let t = 0.1 * i as f64;
            let s = m_eval(&k2, &0.into(), &1.into(), t, 1e-13).unwrap().value;
            assert!((s - closed_form_m(ClosedForm::K2 { same: false }, t)).abs() < 1e-10);
            let s = m_eval(&k5, &2.into(), &2.into(), t, 1e-13).unwrap().value;
            assert!((s - closed_form_m(ClosedForm::Kq { q: 5, same: true }, t)).abs() < 1e-10);
            let s = m_eval(&de, &0.into(), &1.into(), t, 1e-13).unwrap().value;
            assert!((s - closed_form_m(ClosedForm::DirectedEdge, t)).abs() < 1e-10);
            let s = m_eval(&z, &0.into(), &(-3).into(), t, 1e-13).unwrap().value;
            assert!((s - closed_form_m(ClosedForm::ZChain { k: -3 }, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn k2_antipodal_at_asinh_one() {
        let t = (1.0 + 2f64.sqrt()).ln();
        assert!((closed_form_m(ClosedForm::K2 { same: false }, t) - 1.0).abs() < 1e-12);
        assert_eq!(closed_form_m(ClosedForm::ZChain { k: 0 }, 0.0), 1.0);
        assert_eq!(closed_form_m(ClosedForm::DirectedEdge, 0.5), 0.5);
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_i(1, 2.0) - 1.590636854637329).abs() < 1e-14);
        assert!((bessel_i(0, 1.0) - 1.2660658777520084).abs() < 1e-14);
        assert!((bessel_i(50, 34.8083) / bessel_i(50, 34.8083) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn in_rows_are_columns() {
        let g = cycle(5);
        let f = g.as_finite().unwrap();
        let m = m_matrix(f, 0.9, 1e-12, Execution::Sequential).unwrap();
        let col = m_row(&g, &2.into(), 0.9, 1e-12, Direction::In).unwrap();
        for x in 0..5 {
            assert!((col.get(&(x as i64).into()).value - m.value(x, 2)).abs() < 1e-13);
        }
    }
}
