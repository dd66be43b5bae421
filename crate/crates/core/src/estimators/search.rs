//! One-dimensional minimizers used by the profiled fits.

#[derive(Debug, Clone, Copy)]
pub(crate) struct Minimum {
    pub at: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Derivative-free compass search on a scalar function.
///
/// Moves to whichever neighbour `t ± step` improves, doubling the step after
/// a success and halving it after a failure. Stops when the step falls below
/// `tol * (1 + |t|)`.
pub(crate) fn compass_search<F>(
    f: F,
    start: f64,
    step: f64,
    tol: f64,
    max_iterations: usize,
) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let mut t = start;
    let mut ft = f(t);
    let mut h = step;
    let mut iterations = 0;
    while iterations < max_iterations {
        if h < tol * (1.0 + t.abs()) {
            return Minimum {
                at: t,
                value: ft,
                iterations,
                converged: true,
            };
        }
        iterations += 1;
        let (up, down) = (t + h, t - h);
        let (fu, fd) = (f(up), f(down));
        if fu < ft && fu <= fd {
            t = up;
            ft = fu;
            h *= 2.0;
        } else if fd < ft {
            t = down;
            ft = fd;
            h *= 2.0;
        } else {
            h *= 0.5;
        }
    }
    Minimum {
        at: t,
        value: ft,
        iterations,
        converged: false,
    }
}

/// Safeguarded Newton iteration for a stationary point of a smooth function
/// inside `(lo, hi)`, given `value_and_derivs(t) = (f, f', f'')`. Falls back
/// to bisection on `f'` whenever the Newton step leaves the bracket or the
/// curvature is not positive.
pub(crate) fn newton_bracketed<F>(
    value_and_derivs: F,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    tol: f64,
    max_iterations: usize,
) -> Minimum
where
    F: Fn(f64) -> (f64, f64, f64),
{
    let mut t = start.clamp(lo, hi);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let (_, d1, d2) = value_and_derivs(t);
        if d1 == 0.0 {
            converged = true;
            break;
        }
        if d1 > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = t - d1 / d2;
        let next = if d2 > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let moved = (next - t).abs();
        t = next;
        if moved <= tol * (1.0 + t.abs()) || hi - lo <= tol * (1.0 + t.abs()) {
            converged = true;
            break;
        }
    }
    Minimum {
        at: t,
        value: value_and_derivs(t).0,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compass_finds_quadratic_minimum() {
        let m = compass_search(|t| (t - 1.25).powi(2) + 3.0, 0.0, 0.1, 1e-12, 10_000);
        assert!(m.converged);
        assert!((m.at - 1.25).abs() < 1e-6);
        assert!((m.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn compass_handles_kinks() {
        let m = compass_search(|t| (t - 0.3).abs(), 5.0, 0.5, 1e-12, 10_000);
        assert!((m.at - 0.3).abs() < 1e-10);
    }

    #[test]
    fn newton_converges_inside_bracket() {
        let f = |t: f64| {
            (
                (t - 2.0).powi(4) + t * t,
                4.0 * (t - 2.0).powi(3) + 2.0 * t,
                12.0 * (t - 2.0).powi(2) + 2.0,
            )
        };
        let m = newton_bracketed(f, -10.0, 10.0, 9.0, 1e-14, 200);
        assert!(m.converged);
        assert!(f(m.at).1.abs() < 1e-10);
    }
}
