use std::fmt::Debug;

use super::spec::BuiltinSpec;

/// A step out of (or into) an oracle vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleStep {
    pub to: i64,
    pub rate: f64,
    pub oriented: bool,
}

/// Adjacency oracle for a countable, bounded-degree, loopless graph on the
/// integers. Undirected edges are reported from both ends. Implementations
/// must be pure functions of the vertex.
pub trait NeighborOracle: Debug + Send + Sync {
    fn name(&self) -> String;
    fn out_steps(&self, v: i64) -> Vec<OracleStep>;
    fn in_steps(&self, v: i64) -> Vec<OracleStep>;
    /// Declared maximal total degree.
    fn delta(&self) -> usize;
    /// Declared maximal outgoing intensity.
    fn delta_out(&self) -> f64;
    /// Declared maximal incoming intensity.
    fn delta_in(&self) -> f64;
    /// File-format description, when the oracle has one.
    fn spec(&self) -> Option<BuiltinSpec> {
        None
    }
}

/// ℤ with nearest-neighbour undirected edges.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegerLine;

impl NeighborOracle for IntegerLine {
    fn name(&self) -> String {
        "Z".into()
    }

    fn out_steps(&self, v: i64) -> Vec<OracleStep> {
        vec![
            OracleStep { to: v - 1, rate: 1.0, oriented: false },
            OracleStep { to: v + 1, rate: 1.0, oriented: false },
        ]
    }

    fn in_steps(&self, v: i64) -> Vec<OracleStep> {
        self.out_steps(v)
    }

    fn delta(&self) -> usize {
        2
    }

    fn delta_out(&self) -> f64 {
        2.0
    }

    fn delta_in(&self) -> f64 {
        2.0
    }

    fn spec(&self) -> Option<BuiltinSpec> {
        Some(BuiltinSpec::Z)
    }
}

/// ℤ with directed edges `v → v + 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectedLine;

impl NeighborOracle for DirectedLine {
    fn name(&self) -> String {
        "Zdir".into()
    }

    fn out_steps(&self, v: i64) -> Vec<OracleStep> {
        vec![OracleStep { to: v + 1, rate: 1.0, oriented: true }]
    }

    fn in_steps(&self, v: i64) -> Vec<OracleStep> {
        vec![OracleStep { to: v - 1, rate: 1.0, oriented: true }]
    }

    fn delta(&self) -> usize {
        2
    }

    fn delta_out(&self) -> f64 {
        1.0
    }

    fn delta_in(&self) -> f64 {
        1.0
    }

    fn spec(&self) -> Option<BuiltinSpec> {
        Some(BuiltinSpec::Zdir)
    }
}
