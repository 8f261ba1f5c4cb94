//! Cubic B-spline least-squares smoothing and analytic derivatives.
//!
//! Raw curves are projected on a clamped B-spline basis with uniformly
//! spaced interior knots by ordinary (unpenalized) least squares; the design
//! matrix and its Gram factorization are shared across curves and
//! dimensions. Derivatives are evaluated by differentiating the basis
//! analytically, not by finite differences.

use crate::error::{Error, Result};
use crate::fda::{Grid, MultivariateFunctionalSample};
use crate::linalg;
use crate::scalar::Real;

/// Clamped B-spline basis of a given order over an interval.
///
/// `order` is the polynomial order (4 = cubic); the knot vector carries
/// `order`-fold boundary multiplicity and `n_basis - order` uniformly spaced
/// interior knots.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineBasis<F: Real> {
    order: usize,
    n_basis: usize,
    knots: Vec<F>,
}

impl<F: Real> BSplineBasis<F> {
    /// Builds the basis over `[a, b]`.
    pub fn new(order: usize, n_basis: usize, a: F, b: F) -> Result<Self> {
        if order < 2 {
            return Err(Error::Argument(format!("order must be >= 2, got {order}")));
        }
        if n_basis < order {
            return Err(Error::Argument(format!(
                "n_basis ({n_basis}) must be >= order ({order})"
            )));
        }
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(Error::Argument("basis interval must have b > a".into()));
        }
        let n_interior = n_basis - order;
        let mut knots = Vec::with_capacity(n_basis + order);
        for _ in 0..order {
            knots.push(a);
        }
        let step = (b - a) / F::of_usize(n_interior + 1);
        for i in 1..=n_interior {
            knots.push(a + step * F::of_usize(i));
        }
        for _ in 0..order {
            knots.push(b);
        }
        Ok(BSplineBasis {
            order,
            n_basis,
            knots,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    /// Full knot vector including boundary multiplicities.
    pub fn knots(&self) -> &[F] {
        &self.knots
    }

    /// Index `s` of the knot span containing `t`, clamped so the last grid
    /// point falls in the final nonempty span.
    fn find_span(&self, t: F) -> usize {
        let degree = self.order - 1;
        let last = self.n_basis; // knots[n_basis] starts the right clamp
        if t >= self.knots[last] {
            return self.n_basis - 1;
        }
        if t <= self.knots[degree] {
            return degree;
        }
        let (mut lo, mut hi) = (degree, last);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Values and derivatives up to `max_deriv` of the `order` basis
    /// functions that are nonzero at `t` (functions `span-degree ..= span`).
    /// Returns `ders[r][j]`, the r-th derivative of the j-th of those.
    fn basis_derivatives(&self, span: usize, t: F, max_deriv: usize) -> Vec<Vec<F>> {
        let d = self.order - 1;
        let knots = &self.knots;
        let mut ndu = vec![vec![F::zero(); d + 1]; d + 1];
        let mut left = vec![F::zero(); d + 1];
        let mut right = vec![F::zero(); d + 1];
        ndu[0][0] = F::one();
        for j in 1..=d {
            left[j] = t - knots[span + 1 - j];
            right[j] = knots[span + j] - t;
            let mut saved = F::zero();
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![F::zero(); d + 1]; max_deriv + 1];
        for j in 0..=d {
            ders[0][j] = ndu[j][d];
        }
        if max_deriv == 0 {
            return ders;
        }

        let mut a = vec![vec![F::zero(); d + 1]; 2];
        for r in 0..=d {
            let mut s1 = 0usize;
            let mut s2 = 1usize;
            a[0].iter_mut().for_each(|v| *v = F::zero());
            a[1].iter_mut().for_each(|v| *v = F::zero());
            a[0][0] = F::one();
            for k in 1..=max_deriv.min(d) {
                let mut dsum = F::zero();
                let rk = r as isize - k as isize;
                let pk = d - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    dsum = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize {
                    k - 1
                } else {
                    d - r
                };
                for j in j1..=j2 {
                    a[s2][j] =
                        (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][(rk + j as isize) as usize];
                    dsum += a[s2][j] * ndu[(rk + j as isize) as usize][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    dsum += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = dsum;
                std::mem::swap(&mut s1, &mut s2);
            }
        }

        let mut factor = F::of_usize(d);
        for k in 1..=max_deriv.min(d) {
            for j in 0..=d {
                ders[k][j] *= factor;
            }
            if d > k {
                factor *= F::of_usize(d - k);
            }
        }
        ders
    }

    /// Row-major `points.len() x n_basis` matrix of the `deriv`-th basis
    /// derivatives evaluated at `points`.
    pub fn design_matrix(&self, points: &[F], deriv: usize) -> Vec<F> {
        let nb = self.n_basis;
        let d = self.order - 1;
        let mut design = vec![F::zero(); points.len() * nb];
        for (row, &t) in points.iter().enumerate() {
            let span = self.find_span(t);
            let ders = self.basis_derivatives(span, t, deriv);
            for j in 0..=d {
                design[row * nb + (span - d + j)] = ders[deriv][j];
            }
        }
        design
    }
}

/// Per-curve, per-dimension basis coefficients plus the basis and grid they
/// refer to. Labels are carried through from the raw sample.
#[derive(Debug, Clone)]
pub struct SmoothedSample<F: Real> {
    coefficients: Vec<F>,
    n: usize,
    p: usize,
    basis: BSplineBasis<F>,
    grid: Grid<F>,
    labels: Option<Vec<usize>>,
}

impl<F: Real> SmoothedSample<F> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn basis(&self) -> &BSplineBasis<F> {
        &self.basis
    }

    pub fn grid(&self) -> &Grid<F> {
        &self.grid
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Coefficients of dimension `dim` of curve `curve`.
    pub fn coefficients(&self, curve: usize, dim: usize) -> &[F] {
        let nb = self.basis.n_basis();
        let start = (curve * self.p + dim) * nb;
        &self.coefficients[start..start + nb]
    }
}

/// Least-squares fit of every curve and dimension on a shared B-spline
/// basis. No roughness penalty; the design matrix is factored once.
pub fn fit_bspline<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
    n_basis: usize,
    order: usize,
) -> Result<SmoothedSample<F>> {
    let m = sample.m();
    if m < n_basis {
        return Err(Error::Argument(format!(
            "ill-posed fit: {m} grid points cannot support {n_basis} basis functions"
        )));
    }
    let basis = BSplineBasis::new(order, n_basis, sample.grid().first(), sample.grid().last())?;
    let design = basis.design_matrix(sample.grid().points(), 0);
    let nb = n_basis;

    // Normal equations; the Gram matrix is SPD for any strictly increasing
    // grid with m >= n_basis and uniform interior knots.
    let mut gram = vec![F::zero(); nb * nb];
    for row in 0..m {
        let r = &design[row * nb..(row + 1) * nb];
        for a in 0..nb {
            if r[a] == F::zero() {
                continue;
            }
            for b in 0..nb {
                gram[a * nb + b] += r[a] * r[b];
            }
        }
    }
    let factor = linalg::cholesky(&gram, nb).map_err(|e| {
        Error::Numerical(format!(
            "rank-deficient B-spline design (order {order}, n_basis {n_basis}, m {m}): {e}"
        ))
    })?;

    let mut coefficients = Vec::with_capacity(sample.n() * sample.p() * nb);
    let mut rhs = vec![F::zero(); nb];
    for i in 0..sample.n() {
        for k in 0..sample.p() {
            let y = sample.curve_dim(i, k);
            for v in rhs.iter_mut() {
                *v = F::zero();
            }
            for row in 0..m {
                let yv = y[row];
                let r = &design[row * nb..(row + 1) * nb];
                for b in 0..nb {
                    rhs[b] += r[b] * yv;
                }
            }
            coefficients.extend(linalg::cholesky_solve(&factor, nb, &rhs));
        }
    }

    Ok(SmoothedSample {
        coefficients,
        n: sample.n(),
        p: sample.p(),
        basis,
        grid: sample.grid().clone(),
        labels: sample.labels().map(|l| l.to_vec()),
    })
}

/// Evaluates the `deriv_order`-th derivative of the fitted spline expansion
/// at every original grid point; order 0 returns the smoothed curves.
pub fn eval_derivative<F: Real>(
    smoothed: &SmoothedSample<F>,
    deriv_order: usize,
) -> Result<MultivariateFunctionalSample<F>> {
    let order = smoothed.basis.order();
    if deriv_order + 2 > order {
        return Err(Error::Argument(format!(
            "derivative order {deriv_order} not supported by a basis of order {order}"
        )));
    }
    let design = smoothed
        .basis
        .design_matrix(smoothed.grid.points(), deriv_order);
    let nb = smoothed.basis.n_basis();
    let m = smoothed.grid.len();

    let mut values = Vec::with_capacity(smoothed.n * smoothed.p * m);
    for i in 0..smoothed.n {
        for k in 0..smoothed.p {
            let coef = smoothed.coefficients(i, k);
            for row in 0..m {
                let r = &design[row * nb..(row + 1) * nb];
                values.push(linalg::dot(r, coef));
            }
        }
    }
    MultivariateFunctionalSample::new(
        values,
        smoothed.n,
        smoothed.p,
        smoothed.grid.clone(),
        smoothed.labels.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample_from_fn(
        m: usize,
        fs: &[&dyn Fn(f64) -> f64],
    ) -> MultivariateFunctionalSample<f64> {
        let grid = Grid::equidistant(0.0, 1.0, m).unwrap();
        let mut values = Vec::new();
        for f in fs {
            for &t in grid.points() {
                values.push(f(t));
            }
        }
        MultivariateFunctionalSample::new(values, fs.len(), 1, grid, None).unwrap()
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn basis_partition_of_unity() {
        let basis = BSplineBasis::new(4, 35, 0.0f64, 1.0).unwrap();
        assert_eq!(basis.knots().len(), 39);
        let grid = Grid::equidistant(0.0, 1.0, 150).unwrap();
        let design = basis.design_matrix(grid.points(), 0);
        for row in 0..150 {
            let sum: f64 = design[row * 35..(row + 1) * 35].iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "row {row} sums to {sum}");
        }
        // Derivatives of a partition of unity sum to zero.
        for deriv in 1..=2 {
            let dd = basis.design_matrix(grid.points(), deriv);
            for row in 0..150 {
                let sum: f64 = dd[row * 35..(row + 1) * 35].iter().sum();
                assert!(sum.abs() < 1e-8, "deriv {deriv} row {row} sums to {sum}");
            }
        }
    }

    #[test]
    fn cubic_polynomial_is_reproduced() {
        let q = |t: f64| t.powi(3) - t;
        let sample = sample_from_fn(150, &[&q]);
        let fit = fit_bspline(&sample, 35, 4).unwrap();
        let evals = eval_derivative(&fit, 0).unwrap();
        assert!(max_abs_diff(evals.curve_dim(0, 0), sample.curve_dim(0, 0)) < 1e-8);
    }

    #[test]
    fn constant_curve_is_exact() {
        let sample = sample_from_fn(60, &[&|_| 5.0]);
        let fit = fit_bspline(&sample, 20, 4).unwrap();
        let evals = eval_derivative(&fit, 0).unwrap();
        for &v in evals.curve_dim(0, 0) {
            assert!((v - 5.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sine_reconstruction_error() {
        let f = |t: f64| (2.0 * PI * t).sin();
        let sample = sample_from_fn(150, &[&f]);
        let fit = fit_bspline(&sample, 35, 4).unwrap();
        let evals = eval_derivative(&fit, 0).unwrap();
        assert!(max_abs_diff(evals.curve_dim(0, 0), sample.curve_dim(0, 0)) < 1e-5);
    }

    #[test]
    fn first_derivative_of_square() {
        let sample = sample_from_fn(150, &[&|t| t * t]);
        let fit = fit_bspline(&sample, 35, 4).unwrap();
        let deriv = eval_derivative(&fit, 1).unwrap();
        let grid = sample.grid().points().to_vec();
        for j in 1..149 {
            assert!((deriv.curve_dim(0, 0)[j] - 2.0 * grid[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn second_derivative_of_sine() {
        let f = |t: f64| (2.0 * PI * t).sin();
        let sample = sample_from_fn(150, &[&f]);
        let fit = fit_bspline(&sample, 35, 4).unwrap();
        let deriv = eval_derivative(&fit, 2).unwrap();
        let grid = sample.grid().points().to_vec();
        // Boundary-trimmed relative error against the analytic derivative.
        for j in 15..135 {
            let want = -4.0 * PI * PI * (2.0 * PI * grid[j]).sin();
            if want.abs() > 1.0 {
                let rel = ((deriv.curve_dim(0, 0)[j] - want) / want).abs();
                assert!(rel < 1e-2, "point {j}: rel err {rel}");
            }
        }
    }

    #[test]
    fn derivative_zero_of_constant_fit() {
        let sample = sample_from_fn(40, &[&|_| 5.0]);
        let fit = fit_bspline(&sample, 10, 4).unwrap();
        let evals = eval_derivative(&fit, 0).unwrap();
        for &v in evals.curve_dim(0, 0) {
            assert!((v - 5.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_more_basis_than_points() {
        let sample = sample_from_fn(20, &[&|t| t]);
        assert!(matches!(
            fit_bspline(&sample, 35, 4),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn rejects_third_derivative_of_cubic_basis() {
        let sample = sample_from_fn(50, &[&|t| t]);
        let fit = fit_bspline(&sample, 12, 4).unwrap();
        assert!(matches!(eval_derivative(&fit, 3), Err(Error::Argument(_))));
    }

    #[test]
    fn fit_is_linear_in_the_data() {
        let f = |t: f64| (3.0 * t).sin() + 0.5 * t;
        let g = |t: f64| (t - 0.3).powi(2);
        let (a, b) = (1.7, -0.4);
        let sum_fn = move |t: f64| a * f(t) + b * g(t);
        let sx = sample_from_fn(100, &[&f]);
        let sy = sample_from_fn(100, &[&g]);
        let sz = sample_from_fn(100, &[&sum_fn]);
        let ex = eval_derivative(&fit_bspline(&sx, 25, 4).unwrap(), 0).unwrap();
        let ey = eval_derivative(&fit_bspline(&sy, 25, 4).unwrap(), 0).unwrap();
        let ez = eval_derivative(&fit_bspline(&sz, 25, 4).unwrap(), 0).unwrap();
        for j in 0..100 {
            let combined = a * ex.curve_dim(0, 0)[j] + b * ey.curve_dim(0, 0)[j];
            assert!((combined - ez.curve_dim(0, 0)[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn central_differences_approximate_first_derivative() {
        let f = |t: f64| (2.0 * t).cos() + t * t;
        let m = 200;
        let sample = sample_from_fn(m, &[&f]);
        let fit = fit_bspline(&sample, 30, 4).unwrap();
        let e0 = eval_derivative(&fit, 0).unwrap();
        let e1 = eval_derivative(&fit, 1).unwrap();
        let h = 1.0 / (m as f64 - 1.0);
        for j in 5..m - 5 {
            let central = (e0.curve_dim(0, 0)[j + 1] - e0.curve_dim(0, 0)[j - 1]) / (2.0 * h);
            assert!(
                (central - e1.curve_dim(0, 0)[j]).abs() < 10.0 * h * h,
                "point {j}"
            );
        }
    }

    #[test]
    fn refitting_the_fit_is_idempotent() {
        let f = |t: f64| (5.0 * t).sin() * (1.0 - t);
        let sample = sample_from_fn(120, &[&f]);
        let fit = fit_bspline(&sample, 30, 4).unwrap();
        let evals = eval_derivative(&fit, 0).unwrap();
        let refit = fit_bspline(&evals, 30, 4).unwrap();
        let revals = eval_derivative(&refit, 0).unwrap();
        assert!(max_abs_diff(evals.curve_dim(0, 0), revals.curve_dim(0, 0)) < 1e-8);
    }
}
