//! Base graphs: finite graphs with labelled vertices, and countably infinite
//! graphs described by a neighbour oracle.
//!
//! Edges may be directed or undirected, carry a positive intensity and a
//! multiplicity. Multiplicity `k` is folded into the intensity at
//! construction (`k` parallel copies of rate `λ` behave exactly like one copy
//! of rate `kλ` both for generating functions and for exponential passage
//! times). Loops are rejected.

mod oracle;
mod spec;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use oracle::{DirectedLine, IntegerLine, NeighborOracle, OracleStep};
pub use spec::{build_graph, BuiltinSpec, EdgeSpec, GraphSpec};

/// Vertex label. Finite graphs read from files use whatever the file holds
/// (strings, or integers); integer oracles and the built-in families use
/// integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexId {
    Int(i64),
    Label(String),
}

impl VertexId {
    /// Parses a command-line token: integers become [`VertexId::Int`].
    pub fn parse(token: &str) -> VertexId {
        match token.trim().parse::<i64>() {
            Ok(i) => VertexId::Int(i),
            Err(_) => VertexId::Label(token.to_string()),
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Int(i) => write!(f, "{i}"),
            VertexId::Label(s) => f.write_str(s),
        }
    }
}

impl From<i64> for VertexId {
    fn from(i: i64) -> Self {
        VertexId::Int(i)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::Label(s.to_string())
    }
}

/// Orientation used for walks over the adjacency structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

/// An edge of a finite graph; `tail` and `head` index into the vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub oriented: bool,
    /// Rate `λ(e)`, already multiplied by the declared multiplicity.
    pub intensity: f64,
    pub multiplicity: u32,
}

/// One traversal of an edge from the current vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub to: usize,
    pub rate: f64,
    pub edge: usize,
}

#[derive(Debug, Clone)]
pub struct FiniteGraph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    edges: Vec<Edge>,
    out_steps: Vec<Vec<Step>>,
    in_steps: Vec<Vec<Step>>,
    delta: usize,
    delta_out: f64,
    delta_in: f64,
}

/// Edge description in terms of vertex positions, used by the builders.
#[derive(Clone, Debug)]
pub struct RawEdge {
    pub tail: usize,
    pub head: usize,
    pub oriented: bool,
    pub intensity: f64,
    pub multiplicity: u32,
}

impl RawEdge {
    pub fn undirected(a: usize, b: usize) -> Self {
        RawEdge { tail: a, head: b, oriented: false, intensity: 1.0, multiplicity: 1 }
    }

    pub fn directed(a: usize, b: usize) -> Self {
        RawEdge { tail: a, head: b, oriented: true, intensity: 1.0, multiplicity: 1 }
    }

    pub fn with_intensity(mut self, intensity: f64) -> Self {
        self.intensity = intensity;
        self
    }
}

impl FiniteGraph {
    /// Validates and builds a graph. Multiplicities are folded into
    /// intensities.
    pub fn new(ids: Vec<VertexId>, raw_edges: Vec<RawEdge>) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        let n = ids.len();
        let mut edges = Vec::with_capacity(raw_edges.len());
        for raw in raw_edges {
            if raw.tail >= n || raw.head >= n {
                let bad = if raw.tail >= n { raw.tail } else { raw.head };
                return Err(Error::UnknownVertex(VertexId::Int(bad as i64)));
            }
            if raw.tail == raw.head {
                return Err(Error::LoopEdge(ids[raw.tail].clone()));
            }
            let rate = raw.intensity * f64::from(raw.multiplicity.max(1));
            if !(raw.intensity > 0.0) || !rate.is_finite() || raw.multiplicity == 0 {
                return Err(Error::NonpositiveIntensity {
                    tail: ids[raw.tail].clone(),
                    head: ids[raw.head].clone(),
                    intensity: raw.intensity,
                });
            }
            edges.push(Edge {
                tail: raw.tail,
                head: raw.head,
                oriented: raw.oriented,
                intensity: rate,
                multiplicity: 1,
            });
        }

        let mut out_steps = vec![Vec::new(); n];
        let mut in_steps = vec![Vec::new(); n];
        let mut degree = vec![0usize; n];
        for (k, e) in edges.iter().enumerate() {
            degree[e.tail] += 1;
            degree[e.head] += 1;
            out_steps[e.tail].push(Step { to: e.head, rate: e.intensity, edge: k });
            in_steps[e.head].push(Step { to: e.tail, rate: e.intensity, edge: k });
            if !e.oriented {
                out_steps[e.head].push(Step { to: e.tail, rate: e.intensity, edge: k });
                in_steps[e.tail].push(Step { to: e.head, rate: e.intensity, edge: k });
            }
        }
        let total = |steps: &Vec<Step>| steps.iter().map(|s| s.rate).sum::<f64>();
        let delta = degree.iter().copied().max().unwrap_or(0);
        let delta_out = out_steps.iter().map(total).fold(0.0, f64::max);
        let delta_in = in_steps.iter().map(total).fold(0.0, f64::max);

        Ok(FiniteGraph { ids, index, edges, out_steps, in_steps, delta, delta_out, delta_in })
    }

    /// Builds from labelled edges `(tail, head, oriented, intensity)`.
    pub fn from_labelled(
        ids: Vec<VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, bool, f64)>,
    ) -> Result<Self> {
        let lookup: HashMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut raw = Vec::new();
        for (a, b, oriented, intensity) in edges {
            let tail = *lookup.get(&a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let head = *lookup.get(&b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            raw.push(RawEdge { tail, head, oriented, intensity, multiplicity: 1 });
        }
        FiniteGraph::new(ids, raw)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &VertexId {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &VertexId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &VertexId) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownVertex(id.clone()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn steps(&self, v: usize, dir: Direction) -> &[Step] {
        match dir {
            Direction::Out => &self.out_steps[v],
            Direction::In => &self.in_steps[v],
        }
    }

    pub fn out_steps(&self, v: usize) -> &[Step] {
        &self.out_steps[v]
    }

    /// Maximal total degree (edge ends, after multiplicity folding).
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Maximal total outgoing intensity `Δ_o`.
    pub fn delta_out(&self) -> f64 {
        self.delta_out
    }

    /// Maximal total incoming intensity.
    pub fn delta_in(&self) -> f64 {
        self.delta_in
    }

    pub fn max_rate(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Out => self.delta_out,
            Direction::In => self.delta_in,
        }
    }

    /// True when every edge is undirected and has unit intensity.
    pub fn is_simple_undirected(&self) -> bool {
        self.edges.iter().all(|e| !e.oriented && e.intensity == 1.0)
    }

    /// Breadth-first distances from `src` following `dir`.
    pub fn distances(&self, src: usize, dir: Direction) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap_or(0);
            for s in self.steps(x, dir) {
                if dist[s.to].is_none() {
                    dist[s.to] = Some(d + 1);
                    queue.push_back(s.to);
                }
            }
        }
        dist
    }

    /// `reach[x][y]`: some path (possibly empty) leads from `x` to `y`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|x| self.distances(x, Direction::Out).into_iter().map(|d| d.is_some()).collect())
            .collect()
    }

    fn induced(&self, keep: &BTreeSet<usize>) -> FiniteGraph {
        let order: Vec<usize> = keep.iter().copied().collect();
        let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ids = order.iter().map(|&v| self.ids[v].clone()).collect();
        let raw = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(RawEdge {
                    tail: *pos.get(&e.tail)?,
                    head: *pos.get(&e.head)?,
                    oriented: e.oriented,
                    intensity: e.intensity,
                    multiplicity: 1,
                })
            })
            .collect();
        FiniteGraph::new(ids, raw).expect("induced subgraph of a valid graph")
    }
}

/// A base graph: either finite, or countable behind a neighbour oracle.
#[derive(Clone, Debug)]
pub enum BaseGraph {
    Finite(Arc<FiniteGraph>),
    Oracle(Arc<dyn NeighborOracle>),
}

impl From<FiniteGraph> for BaseGraph {
    fn from(g: FiniteGraph) -> Self {
        BaseGraph::Finite(Arc::new(g))
    }
}

impl BaseGraph {
    pub fn is_finite(&self) -> bool {
        matches!(self, BaseGraph::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&FiniteGraph> {
        match self {
            BaseGraph::Finite(g) => Some(g),
            BaseGraph::Oracle(_) => None,
        }
    }

    pub fn require_finite(&self) -> Result<&FiniteGraph> {
        match self {
            BaseGraph::Finite(g) => Ok(g),
            BaseGraph::Oracle(o) => Err(Error::OracleGraphUnsupported(o.name())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            BaseGraph::Finite(g) => format!("finite({} vertices, {} edges)", g.len(), g.edges().len()),
            BaseGraph::Oracle(o) => o.name(),
        }
    }

    pub fn delta(&self) -> usize {
        match self {
            BaseGraph::Finite(g) => g.delta(),
            BaseGraph::Oracle(o) => o.delta(),
        }
    }

    pub fn delta_out(&self) -> f64 {
        match self {
            BaseGraph::Finite(g) => g.delta_out(),
            BaseGraph::Oracle(o) => o.delta_out(),
        }
    }

    pub fn delta_in(&self) -> f64 {
        match self {
            BaseGraph::Finite(g) => g.delta_in(),
            BaseGraph::Oracle(o) => o.delta_in(),
        }
    }

    pub fn max_rate(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Out => self.delta_out(),
            Direction::In => self.delta_in(),
        }
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        match self {
            BaseGraph::Finite(g) => g.index_of(v).is_some(),
            BaseGraph::Oracle(_) => matches!(v, VertexId::Int(_)),
        }
    }

    pub fn require_vertex(&self, v: &VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.clone()))
        }
    }

    /// Resolves a command-line token against this graph's labels.
    pub fn resolve(&self, token: &str) -> Result<VertexId> {
        let parsed = VertexId::parse(token);
        if self.contains(&parsed) {
            return Ok(parsed);
        }
        let label = VertexId::Label(token.to_string());
        if self.contains(&label) {
            return Ok(label);
        }
        Err(Error::UnknownVertex(parsed))
    }

    /// Steps out of (or into) `v`, as vertex ids.
    pub fn neighbours(&self, v: &VertexId, dir: Direction) -> Result<Vec<(VertexId, f64, bool)>> {
        match self {
            BaseGraph::Finite(g) => {
                let i = g.require(v)?;
                Ok(g.steps(i, dir)
                    .iter()
                    .map(|s| (g.id(s.to).clone(), s.rate, g.edges()[s.edge].oriented))
                    .collect())
            }
            BaseGraph::Oracle(o) => {
                let VertexId::Int(i) = v else {
                    return Err(Error::UnknownVertex(v.clone()));
                };
                let steps = match dir {
                    Direction::Out => o.out_steps(*i),
                    Direction::In => o.in_steps(*i),
                };
                Ok(steps.into_iter().map(|s| (VertexId::Int(s.to), s.rate, s.oriented)).collect())
            }
        }
    }

    /// Vertices within `radius` steps of `center` along `dir`.
    pub fn directed_ball(&self, center: &VertexId, radius: usize, dir: Direction) -> Result<BTreeSet<VertexId>> {
        self.require_vertex(center)?;
        let mut seen = BTreeSet::from([center.clone()]);
        let mut frontier = vec![center.clone()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &frontier {
                for (y, _, _) in self.neighbours(x, dir)? {
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(seen)
    }

    /// Graph distance from `from` to `to`, searching at most `horizon` steps.
    pub fn distance(&self, from: &VertexId, to: &VertexId, horizon: usize) -> Result<Option<usize>> {
        self.require_vertex(from)?;
        self.require_vertex(to)?;
        if from == to {
            return Ok(Some(0));
        }
        let mut seen = std::collections::HashSet::from([from.clone()]);
        let mut frontier = vec![from.clone()];
        for d in 1..=horizon {
            let mut next = Vec::new();
            for x in &frontier {
                for (y, _, _) in self.neighbours(x, Direction::Out)? {
                    if &y == to {
                        return Ok(Some(d));
                    }
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                return Ok(None);
            }
            frontier = next;
        }
        Ok(None)
    }

    /// Induced finite subgraph on the given vertex set.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Result<FiniteGraph> {
        match self {
            BaseGraph::Finite(g) => {
                let idx = keep.iter().map(|v| g.require(v)).collect::<Result<BTreeSet<_>>>()?;
                Ok(g.induced(&idx))
            }
            BaseGraph::Oracle(o) => {
                let ids: Vec<VertexId> = keep.iter().cloned().collect();
                let pos: HashMap<i64, usize> = ids
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| match v {
                        VertexId::Int(x) => Some((*x, i)),
                        VertexId::Label(_) => None,
                    })
                    .collect();
                let mut raw = Vec::new();
                for (i, v) in ids.iter().enumerate() {
                    let VertexId::Int(x) = *v else { continue };
                    for s in o.out_steps(x) {
                        let Some(&j) = pos.get(&s.to) else { continue };
                        // undirected edges are reported from both ends; keep one copy
                        if s.oriented || x < s.to {
                            raw.push(RawEdge {
                                tail: i,
                                head: j,
                                oriented: s.oriented,
                                intensity: s.rate,
                                multiplicity: 1,
                            });
                        }
                    }
                }
                FiniteGraph::new(ids, raw)
            }
        }
    }
}

/// Induced subgraph on every vertex reachable from, or reaching, `center`
/// within `radius` steps.
pub fn ball(g: &BaseGraph, center: &VertexId, radius: usize) -> Result<BaseGraph> {
    let mut keep = g.directed_ball(center, radius, Direction::Out)?;
    keep.extend(g.directed_ball(center, radius, Direction::In)?);
    Ok(g.induced(&keep)?.into())
}

/// Cartesian product of two finite graphs. The pair `(i, j)` of vertex
/// positions lands at position `i * |V(g2)| + j` and is labelled `"(a,b)"`.
pub fn cartesian_product(g1: &BaseGraph, g2: &BaseGraph) -> Result<BaseGraph> {
    let a = g1.require_finite()?;
    let b = g2.require_finite()?;
    let nb = b.len();
    let mut ids = Vec::with_capacity(a.len() * nb);
    for x in a.ids() {
        for y in b.ids() {
            ids.push(VertexId::Label(format!("({x},{y})")));
        }
    }
    let mut raw = Vec::with_capacity(a.edges().len() * nb + b.edges().len() * a.len());
    for e in a.edges() {
        for j in 0..nb {
            raw.push(RawEdge {
                tail: e.tail * nb + j,
                head: e.head * nb + j,
                oriented: e.oriented,
                intensity: e.intensity,
                multiplicity: 1,
            });
        }
    }
    for e in b.edges() {
        for i in 0..a.len() {
            raw.push(RawEdge {
                tail: i * nb + e.tail,
                head: i * nb + e.head,
                oriented: e.oriented,
                intensity: e.intensity,
                multiplicity: 1,
            });
        }
    }
    Ok(FiniteGraph::new(ids, raw)?.into())
}

/// Label of the product vertex built by [`cartesian_product`].
pub fn product_label(a: &VertexId, b: &VertexId) -> VertexId {
    VertexId::Label(format!("({a},{b})"))
}

fn int_ids(n: usize) -> Vec<VertexId> {
    (0..n as i64).map(VertexId::Int).collect()
}

/// Complete graph `K_q` on vertices `0..q`.
pub fn complete(q: usize) -> BaseGraph {
    let mut raw = Vec::new();
    for a in 0..q {
        for b in a + 1..q {
            raw.push(RawEdge::undirected(a, b));
        }
    }
    FiniteGraph::new(int_ids(q), raw).expect("valid complete graph").into()
}

/// Undirected path `0 - 1 - … - k`.
pub fn path(k: usize) -> BaseGraph {
    let raw = (0..k).map(|i| RawEdge::undirected(i, i + 1)).collect();
    FiniteGraph::new(int_ids(k + 1), raw).expect("valid path").into()
}

/// Undirected cycle on `n ≥ 3` vertices.
pub fn cycle(n: usize) -> BaseGraph {
    let raw = (0..n).map(|i| RawEdge::undirected(i, (i + 1) % n)).collect();
    FiniteGraph::new(int_ids(n), raw).expect("valid cycle").into()
}

/// Directed path `0 → 1 → … → l` with common intensity `rate`.
pub fn directed_path(l: usize, rate: f64) -> Result<BaseGraph> {
    let raw = (0..l).map(|i| RawEdge::directed(i, i + 1).with_intensity(rate)).collect();
    Ok(FiniteGraph::new(int_ids(l + 1), raw)?.into())
}

/// The single directed edge `0 → 1`.
pub fn directed_edge() -> BaseGraph {
    directed_path(1, 1.0).expect("valid edge")
}

/// Intensity making the directed path of length `l` have critical time
/// `t_star` between its endpoints: `λ = (l!)^{1/l} / t*`.
pub fn calibrated_intensity(l: usize, t_star: f64) -> f64 {
    let ln_fact: f64 = (1..=l).map(|i| (i as f64).ln()).sum();
    (ln_fact / l as f64).exp() / t_star
}

/// Directed path of length `l` whose endpoint critical time equals `t_star`.
pub fn calibrated_chain(l: usize, t_star: f64) -> Result<BaseGraph> {
    if l == 0 || !(t_star > 0.0) {
        return Err(Error::InvalidArgument(format!("calibrated chain needs l ≥ 1 and t* > 0, got l={l}, t*={t_star}")));
    }
    directed_path(l, calibrated_intensity(l, t_star))
}

/// The paw graph: triangle `{a, b, v}` with a pendant `w` attached to `a`.
pub fn paw() -> BaseGraph {
    let ids: Vec<VertexId> = ["v", "a", "b", "w"].into_iter().map(VertexId::from).collect();
    let raw = vec![
        RawEdge::undirected(0, 1),
        RawEdge::undirected(0, 2),
        RawEdge::undirected(1, 2),
        RawEdge::undirected(1, 3),
    ];
    FiniteGraph::new(ids, raw).expect("valid paw").into()
}

/// The doubly infinite undirected chain ℤ.
pub fn integer_line() -> BaseGraph {
    BaseGraph::Oracle(Arc::new(IntegerLine))
}

/// The doubly infinite directed chain `… → -1 → 0 → 1 → …`.
pub fn directed_line() -> BaseGraph {
    BaseGraph::Oracle(Arc::new(DirectedLine))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paw_has_expected_shape() {
        let g = paw();
        let f = g.as_finite().unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.edges().len(), 4);
        assert_eq!(g.delta(), 3);
        assert_eq!(g.delta_out(), 3.0);
    }

    #[test]
    fn loop_rejected() {
        let err = FiniteGraph::new(vec!["x".into()], vec![RawEdge::undirected(0, 0)]).unwrap_err();
        assert_eq!(err, Error::LoopEdge("x".into()));
    }

    #[test]
    fn nonpositive_intensity_rejected() {
        let err = FiniteGraph::new(
            vec!["x".into(), "y".into()],
            vec![RawEdge::undirected(0, 1).with_intensity(0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonpositiveIntensity { .. }));
    }

    #[test]
    fn k2_degrees() {
        let g = complete(2);
        assert_eq!(g.delta(), 1);
        assert_eq!(g.delta_out(), 1.0);
    }

    #[test]
    fn multiplicity_folds_into_intensity() {
        let e = RawEdge { tail: 0, head: 1, oriented: true, intensity: 0.5, multiplicity: 3 };
        let g = FiniteGraph::new(vec![0.into(), 1.into()], vec![e]).unwrap();
        assert_eq!(g.edges()[0].intensity, 1.5);
        assert_eq!(g.delta_out(), 1.5);
        assert_eq!(g.delta_in(), 1.5);
    }

    #[test]
    fn product_of_k2s_is_four_cycle() {
        let g = cartesian_product(&complete(2), &complete(2)).unwrap();
        let f = g.as_finite().unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.edges().len(), 4);
        assert!(f.edges().iter().all(|e| !e.oriented));
        assert_eq!(g.delta(), 2);
    }

    #[test]
    fn product_of_directed_edges_is_oriented_square() {
        let g = cartesian_product(&directed_edge(), &directed_edge()).unwrap();
        let f = g.as_finite().unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.edges().len(), 4);
        assert!(f.edges().iter().all(|e| e.oriented));
        let src = f.index_of(&product_label(&0.into(), &0.into())).unwrap();
        let dst = f.index_of(&product_label(&1.into(), &1.into())).unwrap();
        assert_eq!(f.distances(src, Direction::Out)[dst], Some(2));
        assert_eq!(f.distances(dst, Direction::Out)[src], None);
    }

    #[test]
    fn product_rejects_oracles() {
        let err = cartesian_product(&integer_line(), &complete(2)).unwrap_err();
        assert!(matches!(err, Error::OracleGraphUnsupported(_)));
    }

    #[test]
    fn balls() {
        let b = ball(&integer_line(), &0.into(), 3).unwrap();
        let ids: Vec<_> = b.as_finite().unwrap().ids().to_vec();
        assert_eq!(ids, (-3..=3).map(VertexId::Int).collect::<Vec<_>>());
        assert_eq!(b.as_finite().unwrap().edges().len(), 6);

        let b = ball(&complete(2), &0.into(), 5).unwrap();
        assert_eq!(b.as_finite().unwrap().len(), 2);

        let b = ball(&directed_line(), &0.into(), 2).unwrap();
        let f = b.as_finite().unwrap();
        assert_eq!(f.ids().to_vec(), (-2..=2).map(VertexId::Int).collect::<Vec<_>>());
        assert!(f.edges().iter().all(|e| e.oriented));
        assert_eq!(f.edges().len(), 4);
    }

    #[test]
    fn calibrated_chain_rate() {
        // l = 2: λ = √2 / t*
        assert!((calibrated_intensity(2, 0.5) - 2f64.sqrt() / 0.5).abs() < 1e-14);
        assert!(calibrated_chain(0, 1.0).is_err());
    }

    #[test]
    fn resolve_tokens() {
        assert_eq!(paw().resolve("w").unwrap(), VertexId::from("w"));
        assert_eq!(complete(3).resolve("2").unwrap(), VertexId::Int(2));
        assert!(complete(3).resolve("7").is_err());
        assert_eq!(integer_line().resolve("-4").unwrap(), VertexId::Int(-4));
    }
}
