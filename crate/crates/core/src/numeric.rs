//! Deterministic reductions shared by every module.

/// Neumaier-compensated sum in iteration order.
pub(crate) fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut s = 0.0_f64;
    let mut c = 0.0_f64;
    for x in iter {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// `ln Σ exp(x_i)` without overflow. Empty input gives `-inf`.
pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + sum(values.iter().map(|&x| (x - max).exp())).ln()
}

/// Same as [`log_sum_exp`] applied to `-x`.
pub(crate) fn log_sum_exp_neg(values: &[f64]) -> f64 {
    let max = values.iter().map(|&x| -x).fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + sum(values.iter().map(|&x| (-x - max).exp())).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(xs), 2.0);
    }

    #[test]
    fn log_sum_exp_handles_large_arguments() {
        let v = [1000.0, 1000.0];
        assert!((log_sum_exp(&v) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((log_sum_exp_neg(&[-1000.0, -1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
