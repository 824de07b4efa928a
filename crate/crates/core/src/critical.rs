//! Critical times and the special constants attached to them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::m_eval;
use crate::graph::{BaseGraph, VertexId};

/// Default root tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Reachability horizon for oracle graphs, in steps.
pub const ORACLE_SEARCH_HORIZON: usize = 1024;

const MAX_BISECTIONS: usize = 200;

/// Root of `m(v, w, t) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalTime {
    pub t_star: f64,
    pub abs_err: f64,
    pub reachable: bool,
}

/// Generic bisection of an increasing predicate boundary: returns the final
/// bracket `(lo, hi)` with `below(lo)` and `!below(hi)`.
fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, mut below: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<bool>,
{
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Solves `m_g(v, w, t) = 1` by bisection.
///
/// The bracket is found by doubling `t` from 1/2 until `m > 1`. Inner
/// generating function evaluations use `tol / 10`.
pub fn critical_time(g: &BaseGraph, v: &VertexId, w: &VertexId, tol: f64) -> Result<CriticalTime> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    g.require_vertex(v)?;
    g.require_vertex(w)?;
    if v == w {
        return Ok(CriticalTime { t_star: 0.0, abs_err: 0.0, reachable: true });
    }
    let horizon = match g {
        BaseGraph::Finite(f) => f.len(),
        BaseGraph::Oracle(_) => ORACLE_SEARCH_HORIZON,
    };
    if g.distance(v, w, horizon)?.is_none() {
        return Err(Error::Unreachable { from: v.clone(), to: w.clone() });
    }
    let inner = tol / 10.0;
    let m = |t: f64| m_eval(g, v, w, t, inner).map(|c| c.value);
    let mut lo = 0.0;
    let mut hi = 0.5;
    while m(hi)? < 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    let (lo, hi) = bisect(lo, hi, tol, |t| Ok(m(t)? < 1.0))?;
    Ok(CriticalTime { t_star: 0.5 * (lo + hi), abs_err: 0.5 * (hi - lo), reachable: true })
}

/// `α*` and the diagonal time constant derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaStar {
    pub alpha_star: f64,
    pub diagonal_constant: f64,
    pub rho: f64,
}

/// Positive root of `coth α = α`, and `√(α*² − 1) / (2ρ)`.
pub fn solve_alpha_star(tol: f64, rho: f64) -> Result<AlphaStar> {
    if !(tol > 0.0) || !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("need tol > 0 and rho > 0, got tol={tol}, rho={rho}")));
    }
    // coth α − α is positive at 1+ε and negative at 2
    let (lo, hi) = bisect(1.0 + 1e-9, 2.0, tol, |a| Ok(1.0 / a.tanh() - a > 0.0))?;
    let alpha_star = 0.5 * (lo + hi);
    Ok(AlphaStar { alpha_star, diagonal_constant: diagonal_constant(alpha_star, rho), rho })
}

/// `√(α² − 1) / (2ρ)`.
pub fn diagonal_constant(alpha: f64, rho: f64) -> f64 {
    (alpha * alpha - 1.0).sqrt() / (2.0 * rho)
}

/// Nonnegative root `ϑ` of `(sinh ϑ)^x (cosh ϑ)^{1−x} = 1`.
pub fn solve_theta(x: f64, tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("x must lie in [0, 1], got {x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // x ln sinh + (1−x) ln cosh is increasing, −∞ at 0 and ≥ 0 at asinh(1)
    let h = |th: f64| x * th.sinh().ln() + (1.0 - x) * th.cosh().ln();
    let (lo, hi) = bisect(0.0, 1f64.asinh(), tol, |th| Ok(h(th) < 0.0))?;
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        calibrated_chain, complete, directed_edge, directed_line, integer_line, FiniteGraph, RawEdge,
    };

    #[test]
    fn k2_antipodal() {
        let c = critical_time(&complete(2), &0.into(), &1.into(), 1e-11).unwrap();
        assert!((c.t_star - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-9);
        assert!(c.reachable);
    }

    #[test]
    fn directed_edge_is_one() {
        let c = critical_time(&directed_edge(), &0.into(), &1.into(), 1e-13).unwrap();
        assert!((c.t_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_vertex_is_zero() {
        let c = critical_time(&complete(3), &1.into(), &1.into(), 1e-10).unwrap();
        assert_eq!(c, CriticalTime { t_star: 0.0, abs_err: 0.0, reachable: true });
    }

    #[test]
    fn isolated_pair_is_unreachable() {
        let g = FiniteGraph::new(vec![0.into(), 1.into()], Vec::<RawEdge>::new()).unwrap().into();
        let err = critical_time(&g, &0.into(), &1.into(), 1e-10).unwrap_err();
        assert!(matches!(err, Error::Unreachable { .. }));
        assert!(!err.is_numerical());
    }

    #[test]
    fn backwards_on_directed_line_is_unreachable() {
        let err = critical_time(&directed_line(), &3.into(), &0.into(), 1e-8).unwrap_err();
        assert!(matches!(err, Error::Unreachable { .. }));
    }

    #[test]
    fn integer_line_small_k() {
        let c = critical_time(&integer_line(), &0.into(), &2.into(), 1e-11).unwrap();
        assert!((c.t_star - 1.1477753140).abs() < 1e-9, "{}", c.t_star);
    }

    #[test]
    fn calibrated_chain_hits_target() {
        for (l, t) in [(1usize, 0.7), (3, 1.3), (6, 2.0)] {
            let g = calibrated_chain(l, t).unwrap();
            let c = critical_time(&g, &0.into(), &(l as i64).into(), 1e-11).unwrap();
            assert!((c.t_star - t).abs() < 1e-9, "l={l}");
        }
    }

    #[test]
    fn alpha_star_and_diagonal() {
        let a = solve_alpha_star(1e-13, 1.0).unwrap();
        assert!((a.alpha_star - 1.199_678_640_257_734).abs() < 1e-11);
        // the quoted digits 0.3313… are a truncation
        assert!((0.3313..0.3314).contains(&a.diagonal_constant));
        assert!((a.diagonal_constant - 0.33137170967459).abs() < 1e-12);
        let b = solve_alpha_star(1e-13, 2.0).unwrap();
        assert!((b.diagonal_constant - a.diagonal_constant / 2.0).abs() < 1e-15);
        assert!(1.0 / 1.2f64.tanh() < 1.2);
    }

    #[test]
    fn theta_values() {
        assert_eq!(solve_theta(0.0, 1e-12).unwrap(), 0.0);
        assert!((solve_theta(1.0, 1e-12).unwrap() - 1f64.asinh()).abs() < 1e-9);
        let half = 0.5 * (2.0 + 5f64.sqrt()).ln();
        assert!((solve_theta(0.5, 1e-13).unwrap() - half).abs() < 1e-11);
        assert!((half - 0.7218177375894052).abs() < 1e-15);
        assert!(solve_theta(1.5, 1e-9).is_err());
    }
}
