//! Weighted medians and exact weighted least-absolute-deviation lines.

use crate::error::{Error, Result};

/// Weighted median of `values`, returning the lower candidate when the total
/// weight splits evenly. Zero-weight entries are ignored.
///
/// Returns `None` when there is no positive weight.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Option<f64> {
    weighted_median_index(values, weights).map(|i| values[i])
}

pub(crate) fn weighted_median_index(values: &[f64], weights: &[f64]) -> Option<usize> {
    debug_assert_eq!(values.len(), weights.len());
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| weights[i] > 0.0).collect();
    if order.is_empty() {
        return None;
    }
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let total: f64 = order.iter().map(|&i| weights[i]).sum();
    let half = 0.5 * total;
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= half {
            return Some(i);
        }
    }
    order.last().copied()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct L1Line {
    pub intercept: f64,
    pub slope: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn weighted_abs_objective(xs: &[f64], ys: &[f64], w: &[f64], a: f64, b: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .zip(w)
        .map(|((x, y), w)| w * (y - a - b * x).abs())
        .sum()
}

/// Best line constrained to pass through point `p`: the slope is the weighted
/// median of the slopes to every other point, weighted by `w_i |x_i - x_p|`.
fn best_line_through(xs: &[f64], ys: &[f64], w: &[f64], p: usize) -> Option<(f64, f64)> {
    let (xp, yp) = (xs[p], ys[p]);
    let mut slopes = Vec::with_capacity(xs.len());
    let mut weights = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        let dx = xs[i] - xp;
        if i == p || dx == 0.0 {
            continue;
        }
        slopes.push((ys[i] - yp) / dx);
        weights.push(w[i] * dx.abs());
    }
    let slope = weighted_median(&slopes, &weights)?;
    Some((yp - slope * xp, slope))
}

/// Globally minimizes `Σ w_i |y_i - a - b x_i|` over all lines.
///
/// Descends from vertex to vertex of the piecewise-linear objective: at each
/// step the line is rotated about every observation it interpolates, and the
/// best strict improvement is taken. When no rotation improves, every edge
/// direction from the vertex is non-descending, which for a convex objective
/// is global optimality.
pub(crate) fn weighted_l1_line(
    xs: &[f64],
    ys: &[f64],
    w: &[f64],
    max_iterations: usize,
) -> Result<L1Line> {
    let n = xs.len();
    if n < 2 || xs.iter().all(|x| *x == xs[0]) {
        return Err(Error::RankDeficient);
    }
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(1.0);
    let on_line_tol = 1e-9 * scale;

    // start by rotating about the point with the median x
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]).then(i.cmp(&j)));
    let start = by_x[(n - 1) / 2];
    let (mut a, mut b) = best_line_through(xs, ys, w, start).ok_or(Error::RankDeficient)?;
    let mut obj = weighted_abs_objective(xs, ys, w, a, b);

    let mut iterations = 1;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let mut best: Option<(f64, f64, f64)> = None;
        for p in 0..n {
            if (ys[p] - a - b * xs[p]).abs() > on_line_tol {
                continue;
            }
            if let Some((ca, cb)) = best_line_through(xs, ys, w, p) {
                let cobj = weighted_abs_objective(xs, ys, w, ca, cb);
                let incumbent = best.map_or(obj, |(_, _, o)| o);
                if cobj < incumbent - 1e-14 * obj.max(f64::MIN_POSITIVE) {
                    best = Some((ca, cb, cobj));
                }
            }
        }
        match best {
            Some((ca, cb, cobj)) => {
                a = ca;
                b = cb;
                obj = cobj;
            }
            None => {
                converged = true;
                break;
            }
        }
    }
    Ok(L1Line {
        intercept: a,
        slope: b,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_median_basic() {
        assert_eq!(
            weighted_median(&[1.0, 2.0, 4.0], &[1.0, 1.0, 1.0]),
            Some(2.0)
        );
        // weights 1/y: 1, 0.5, 0.25 -> the first point already holds half
        assert_eq!(
            weighted_median(&[1.0, 2.0, 4.0], &[1.0, 0.5, 0.25]),
            Some(1.0)
        );
        assert_eq!(weighted_median(&[], &[]), None);
        assert_eq!(weighted_median(&[3.0], &[0.0]), None);
    }

    #[test]
    fn weighted_median_even_split_takes_lower() {
        assert_eq!(weighted_median(&[5.0, 1.0, 3.0, 7.0], &[1.0; 4]), Some(3.0));
        assert_eq!(weighted_median(&[2.0, 9.0], &[0.5, 0.5]), Some(2.0));
    }

    #[test]
    fn exact_line_is_recovered() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x).collect();
        let w = vec![1.0; xs.len()];
        let line = weighted_l1_line(&xs, &ys, &w, 10_000).unwrap();
        assert!(line.converged);
        assert!((line.intercept - 3.0).abs() < 1e-12);
        assert!((line.slope - 2.0).abs() < 1e-12);
        assert_eq!(
            weighted_abs_objective(&xs, &ys, &w, line.intercept, line.slope),
            0.0
        );
    }

    #[test]
    fn identical_x_is_rank_deficient() {
        let r = weighted_l1_line(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0], &[1.0; 3], 100);
        assert!(matches!(r, Err(Error::RankDeficient)));
    }
}
