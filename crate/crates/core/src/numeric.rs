//! Small numeric helpers shared across modules.

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `ln(n!)`, exact summation for small `n`, Stirling series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 64 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // ln Γ(x) by Stirling with three correction terms; error < 1e-15 here
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// `φ(m) = m ln m` with `0 ln 0 = 0`.
#[inline]
pub fn xlogx(m: f64) -> f64 {
    if m <= 0.0 {
        0.0
    } else {
        m * m.ln()
    }
}

/// `sup |m ln m|` over `m ∈ [0, b]`.
pub fn sup_abs_xlogx(b: f64) -> f64 {
    let inv_e = (-1.0f64).exp();
    if b <= 0.0 {
        0.0
    } else if b <= inv_e {
        -b * b.ln()
    } else if b <= 1.0 {
        inv_e
    } else {
        inv_e.max(b * b.ln())
    }
}

/// Bound on `|φ(x) − φ(m)|` for `x ∈ [m − e, m + e]`, assuming `m − e > 0`.
/// Mean value theorem with `φ'(x) = ln x + 1`, extremal at an endpoint.
pub fn xlogx_perturbation(m: f64, e: f64) -> f64 {
    let lo = m - e;
    let hi = m + e;
    e * (lo.ln() + 1.0).abs().max((hi.ln() + 1.0).abs())
}

/// Sample mean and standard error from running sums.
pub fn mean_stderr(sum: f64, sum_sq: f64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let nf = n as f64;
    let mean = sum / nf;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Linear-interpolation quantile of sorted data (type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = p.clamp(0.0, 1.0) * (n - 1) as f64;
            let i = h.floor() as usize;
            if i + 1 >= n {
                sorted[n - 1]
            } else {
                sorted[i] + (h - i as f64) * (sorted[i + 1] - sorted[i])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let acc: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn stirling_matches_direct_sum() {
        for n in [64usize, 100, 500, 2000] {
            let direct: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
            assert!((ln_factorial(n) - direct).abs() < 1e-9 * direct, "{n}");
        }
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn xlogx_sup() {
        let inv_e = (-1.0f64).exp();
        assert_eq!(sup_abs_xlogx(0.0), 0.0);
        assert!((sup_abs_xlogx(0.5) - inv_e).abs() < 1e-15);
        assert!((sup_abs_xlogx(3.0) - 3.0 * 3f64.ln()).abs() < 1e-15);
        assert!((sup_abs_xlogx(0.1) - 0.1 * 10f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn quantiles() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&xs, 0.5), 3.0);
        assert_eq!(quantile_sorted(&xs, 0.25), 2.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 5.0);
    }
}
