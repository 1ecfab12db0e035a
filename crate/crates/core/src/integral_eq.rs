//! First-kind integral equations on a uniform grid, solved by random row
//! projections (a randomized Kaczmarz sweep in the quadrature inner
//! product).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::sampling::RngStream;

/// Relative row-norm threshold below which a row is excluded from the
/// index law.
const ROW_NORM_REL_TOL: f64 = 1e-14;

/// A discretized operator equation `(Tx)(t) = g(t)` on `[a, b]`:
/// uniform grid, composite-trapezoid weights, tabulated kernel and
/// right-hand side. The inner product is `<u, v> = sum_j w_j u_j v_j`.
#[derive(Debug)]
pub struct DiscreteL2Problem {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major `n x n` kernel values `K(t_i, s_j)`.
    kernel: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `||u_t||^2` in the weighted inner product, per row.
    pub row_norms_sq: Vec<f64>,
    pub usable: Vec<bool>,
}

/// Tabulate the kernel and right-hand side on a uniform `n`-node grid.
pub fn discretize(
    kernel: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    n: usize,
) -> Result<DiscreteL2Problem> {
    if n < 2 {
        return Err(Error::Config("need at least 2 grid nodes".into()));
    }
    if a >= b {
        return Err(Error::Config(format!("need a < b, got [{a}, {b}]")));
    }
    let h = (b - a) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    let mut weights = vec![h; n];
    weights[0] = h / 2.0;
    weights[n - 1] = h / 2.0;

    let mut kernel_values = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        rhs[i] = g(grid[i]);
        if !rhs[i].is_finite() {
            return Err(Error::Numeric(format!("g({}) is not finite", grid[i])));
        }
        for j in 0..n {
            let v = kernel(grid[i], grid[j]);
            if !v.is_finite() {
                return Err(Error::Numeric(format!(
                    "kernel({}, {}) is not finite",
                    grid[i], grid[j]
                )));
            }
            kernel_values[i * n + j] = v;
        }
    }

    let row_norms_sq: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| weights[j] * kernel_values[i * n + j].powi(2))
                .sum()
        })
        .collect();
    let max_norm = row_norms_sq.iter().cloned().fold(0.0, f64::max);
    let threshold = ROW_NORM_REL_TOL * max_norm.max(ROW_NORM_REL_TOL);
    let usable = row_norms_sq.iter().map(|&r| r > threshold).collect();

    Ok(DiscreteL2Problem {
        grid,
        weights,
        kernel: kernel_values,
        rhs,
        row_norms_sq,
        usable,
    })
}

impl DiscreteL2Problem {
    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn kernel_row(&self, i: usize) -> &[f64] {
        let n = self.nodes();
        &self.kernel[i * n..(i + 1) * n]
    }

    pub fn usable_rows(&self) -> Vec<usize> {
        (0..self.nodes()).filter(|&i| self.usable[i]).collect()
    }

    pub fn weighted_dot(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(u)
            .zip(v)
            .map(|((w, a), b)| w * a * b)
            .sum()
    }

    pub fn weighted_norm(&self, u: &[f64]) -> f64 {
        self.weighted_dot(u, u).sqrt()
    }

    /// `(Tx)(t_i) = sum_j w_j K(t_i, s_j) x_j` for every row.
    pub fn apply_op(&self, x: &Point) -> Result<Point> {
        let n = self.nodes();
        if x.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: x.dim(),
            });
        }
        Ok(Point::new(
            (0..n)
                .map(|i| self.weighted_dot(self.kernel_row(i), x.as_slice()))
                .collect(),
        ))
    }

    /// Project `x` onto `{z : (Tz)(t_row) = g(t_row)}` in the weighted
    /// inner product: `x + (g - <u, x>) / ||u||^2 * u`.
    pub fn project_row(&self, row: usize, x: &Point) -> Result<Point> {
        let n = self.nodes();
        if x.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: x.dim(),
            });
        }
        if !self.usable[row] {
            return Err(Error::RowSkipped(row));
        }
        let u = self.kernel_row(row);
        let value = self.weighted_dot(u, x.as_slice());
        let coeff = (self.rhs[row] - value) / self.row_norms_sq[row];
        Ok(Point::new(
            x.as_slice()
                .iter()
                .zip(u)
                .map(|(xi, ui)| xi + coeff * ui)
                .collect(),
        ))
    }

    /// Residual vector `Tx - g`.
    pub fn residual(&self, x: &Point) -> Result<Vec<f64>> {
        let tx = self.apply_op(x)?;
        Ok(tx
            .as_slice()
            .iter()
            .zip(&self.rhs)
            .map(|(a, g)| a - g)
            .collect())
    }

    /// Weighted least-squares solution of the discrete system, used as the
    /// independent oracle for solver tolerances.
    pub fn least_squares_solution(&self) -> Result<Point> {
        let n = self.nodes();
        // Row i of the system matrix is w_j K(t_i, s_j); scale each row by
        // sqrt(w_i) so the plain 2-norm residual matches the weighted one.
        let mat = DMatrix::from_fn(n, n, |i, j| {
            self.weights[i].sqrt() * self.weights[j] * self.kernel[i * n + j]
        });
        let b = DVector::from_fn(n, |i, _| self.weights[i].sqrt() * self.rhs[i]);
        let svd = mat.svd(true, true);
        let x = svd
            .solve(&b, 1e-13)
            .map_err(|e| Error::Solver(e.to_string()))?;
        Ok(Point::new(x.iter().cloned().collect()))
    }
}

/// Per-iteration residual norms of a random sweep.
#[derive(Clone, Debug)]
pub struct ResidualHistory {
    pub sup: Vec<f64>,
    pub weighted_l2: Vec<f64>,
    /// Weighted distance to a reference solution, when one was supplied.
    pub dist_to_reference: Option<Vec<f64>>,
}

impl ResidualHistory {
    /// Means of the weighted-L2 residual over consecutive windows.
    pub fn smoothed_l2(&self, window: usize) -> Vec<f64> {
        self.weighted_l2
            .chunks(window)
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect()
    }
}

/// Iterate random row projections from `x0`, drawing rows uniformly from
/// the usable set, and record the residual after every projection.
///
/// The residual vector is maintained incrementally through a precomputed
/// Gram matrix of the rows (one row projection changes `Tx` by a multiple
/// of one Gram column) and refreshed periodically against drift.
pub fn solve_random_sweep(
    problem: &DiscreteL2Problem,
    x0: &Point,
    iterations: usize,
    seed: u64,
) -> Result<(Point, ResidualHistory)> {
    solve_random_sweep_tracking(problem, x0, iterations, seed, None)
}

/// As `solve_random_sweep`, additionally recording the weighted distance
/// to a reference point (typically the least-squares solution) after every
/// projection. Row projections never increase that distance when the
/// reference solves the system, which is the checkable form of the
/// iteration's monotonicity.
pub fn solve_random_sweep_tracking(
    problem: &DiscreteL2Problem,
    x0: &Point,
    iterations: usize,
    seed: u64,
    reference: Option<&Point>,
) -> Result<(Point, ResidualHistory)> {
    let n = problem.nodes();
    if x0.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.dim(),
        });
    }
    let rows = problem.usable_rows();
    if rows.is_empty() {
        return Err(Error::Degenerate("no usable rows".into()));
    }

    // gram[t][i] = <u_t, u_i> in the weighted inner product
    let gram: Vec<Vec<f64>> = rows
        .iter()
        .map(|&t| {
            let ut = problem.kernel_row(t);
            (0..n)
                .map(|i| problem.weighted_dot(ut, problem.kernel_row(i)))
                .collect()
        })
        .collect();
    let row_slot: Vec<Option<usize>> = {
        let mut slots = vec![None; n];
        for (slot, &r) in rows.iter().enumerate() {
            slots[r] = Some(slot);
        }
        slots
    };

    if let Some(r) = reference {
        if r.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: r.dim(),
            });
        }
    }
    let mut rng = RngStream::new(seed, 0);
    let mut x = x0.0.clone();
    let mut residual = problem.residual(&Point::new(x.clone()))?;
    let mut sup = Vec::with_capacity(iterations);
    let mut weighted_l2 = Vec::with_capacity(iterations);
    let mut dist_to_reference = reference.map(|_| Vec::with_capacity(iterations));

    for iter in 0..iterations {
        let draw = (rng.uniform() * rows.len() as f64) as usize;
        let t = rows[draw.min(rows.len() - 1)];
        let coeff = -residual[t] / problem.row_norms_sq[t];
        let u = problem.kernel_row(t);
        for (xi, ui) in x.iter_mut().zip(u) {
            *xi += coeff * ui;
        }
        let g = &gram[row_slot[t].expect("drawn row is usable")];
        for (ri, gi) in residual.iter_mut().zip(g) {
            *ri += coeff * gi;
        }
        if (iter + 1) % 1000 == 0 {
            residual = problem.residual(&Point::new(x.clone()))?;
        }
        sup.push(residual.iter().fold(0.0f64, |m, r| m.max(r.abs())));
        weighted_l2.push(problem.weighted_norm(&residual));
        if let (Some(hist), Some(r)) = (dist_to_reference.as_mut(), reference) {
            let diff: Vec<f64> = x.iter().zip(r.as_slice()).map(|(a, b)| a - b).collect();
            hist.push(problem.weighted_norm(&diff));
        }
    }

    Ok((
        Point::new(x),
        ResidualHistory {
            sup,
            weighted_l2,
            dist_to_reference,
        },
    ))
}

/// Built-in kernels selectable by name. Kernels may depend on the domain
/// endpoints.
///
/// The `indicator` kernel is the cumulative-integration kernel
/// `1_{[a,t]}(s)`, tabulated with the trapezoid convention at its jump:
/// value 1/2 at `s = t` (and 1 at `s = t = b`, where the global quadrature
/// weight is already halved). With that convention the tabulated operator
/// is exactly the composite-trapezoid cumulative integral, so the
/// discretized equation stays consistent whenever the continuous one is.
pub fn kernel_by_name(name: &str, _a: f64, b: f64) -> Option<Box<dyn Fn(f64, f64) -> f64>> {
    match name {
        "indicator" => Some(Box::new(move |t, s| {
            if s < t {
                1.0
            } else if s == t {
                if t == b {
                    1.0
                } else {
                    0.5
                }
            } else {
                0.0
            }
        })),
        "product_ts" => Some(Box::new(|t, s| t * s)),
        "gaussian_kernel" => Some(Box::new(|t, s| (-(t - s) * (t - s) / 0.02).exp())),
        _ => None,
    }
}

/// Built-in right-hand sides selectable by name.
pub fn rhs_by_name(name: &str) -> Option<fn(f64) -> f64> {
    match name {
        "t_squared_half" => Some(|t| t * t / 2.0),
        "t_thirds" => Some(|t| t / 3.0),
        "zero" => Some(|_| 0.0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn differentiation_problem(n: usize) -> DiscreteL2Problem {
        let kernel = kernel_by_name("indicator", 0.0, 1.0).unwrap();
        discretize(&*kernel, &|t| t * t / 2.0, 0.0, 1.0, n).unwrap()
    }

    #[test]
    fn zero_kernel_flags_all_rows() {
        let p = discretize(&|_, _| 0.0, &|_| 0.0, 0.0, 1.0, 11).unwrap();
        assert!(p.usable.iter().all(|&u| !u));
        assert!(p.usable_rows().is_empty());
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let p = differentiation_problem(101);
        let total: f64 = p.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_row_norms_track_t() {
        let p = differentiation_problem(101);
        for (i, &t) in p.grid.iter().enumerate() {
            assert!((p.row_norms_sq[i] - t).abs() <= 1.0 / 100.0, "row {i}");
        }
    }

    #[test]
    fn apply_op_known_integrals() {
        // zero in, zero out
        let p = differentiation_problem(101);
        let out = p.apply_op(&Point::zeros(101)).unwrap();
        assert!(out.as_slice().iter().all(|&v| v == 0.0));

        // Indicator kernel with x = 1: the tabulated operator is the
        // trapezoid cumulative integral, exact on constants away from the
        // first row (whose panel has zero length but carries weight h/4).
        let h = 0.01;
        let ones = Point::new(vec![1.0; 101]);
        let out = p.apply_op(&ones).unwrap();
        for (i, &t) in p.grid.iter().enumerate().skip(1) {
            assert!((out[i] - t).abs() <= 1e-3, "t = {t}, got {}", out[i]);
            assert!((out[i] - t).abs() <= 1e-12);
        }
        assert!((out[0] - h / 4.0).abs() <= 1e-15);

        // separable kernel t*s with x(s) = s: (Tx)(t) = t/3
        let p = discretize(&|t, s| t * s, &|_| 0.0, 0.0, 1.0, 101).unwrap();
        let x = Point::new(p.grid.clone());
        let out = p.apply_op(&x).unwrap();
        for (i, &t) in p.grid.iter().enumerate() {
            assert!((out[i] - t / 3.0).abs() <= 1e-3);
        }
    }

    #[test]
    fn project_row_identities() {
        let p = differentiation_problem(51);
        let x = Point::new(p.grid.iter().map(|t| t * t).collect());

        // projection makes the row exact
        let row = 30;
        let projected = p.project_row(row, &x).unwrap();
        let after = p.apply_op(&projected).unwrap();
        assert!(
            (after[row] - p.rhs[row]).abs() <= 1e-10 * (1.0 + p.rhs[row].abs()),
            "row value {} vs {}",
            after[row],
            p.rhs[row]
        );

        // idempotence
        let twice = p.project_row(row, &projected).unwrap();
        assert!(twice.dist(&projected) <= 1e-12);

        // a point already on the row constraint is unchanged
        let solved = p.least_squares_solution().unwrap();
        let moved = p.project_row(row, &solved).unwrap();
        assert!(moved.dist(&solved) <= 1e-10);
    }

    #[test]
    fn project_row_matches_continuous_formula() {
        // For the cumulative kernel: P_t x = x - (g(t) - int_0^t x)/(t - a) on [0, t],
        // up to the O(h) difference between t and the quadrature row norm.
        let p = differentiation_problem(201);
        let x = Point::new(p.grid.iter().map(|t| t.sin()).collect());
        let row = 150;
        let t = p.grid[row];
        let projected = p.project_row(row, &x).unwrap();
        let tx = p.apply_op(&x).unwrap();
        let coeff = (p.rhs[row] - tx[row]) / t;
        for j in 0..row {
            let formula = x[j] + coeff;
            assert!(
                (projected[j] - formula).abs() <= 0.02 * coeff.abs() + 1e-12,
                "node {j}"
            );
        }
        // the jump node carries the tabulated kernel value 1/2
        assert!((projected[row] - (x[row] + coeff / 2.0)).abs() <= 0.02 * coeff.abs() + 1e-12);
        for j in row + 1..p.nodes() {
            assert_eq!(projected[j], x[j]);
        }
    }

    #[test]
    fn unusable_row_is_error() {
        let p = discretize(&|_, _| 0.0, &|_| 0.0, 0.0, 1.0, 5).unwrap();
        assert!(matches!(
            p.project_row(2, &Point::zeros(5)),
            Err(Error::RowSkipped(2))
        ));
    }

    #[test]
    fn apply_is_linear() {
        let p = discretize(&|t, s| (t + s).cos(), &|_| 0.0, 0.0, 1.0, 31).unwrap();
        let x = Point::new(p.grid.iter().map(|t| t.exp()).collect());
        let y = Point::new(p.grid.iter().map(|t| 1.0 - t).collect());
        let (a, b) = (1.7, -0.4);
        let lhs = p.apply_op(&x.scale(a).add(&y.scale(b))).unwrap();
        let rhs = p
            .apply_op(&x)
            .unwrap()
            .scale(a)
            .add(&p.apply_op(&y).unwrap().scale(b));
        assert!(lhs.dist(&rhs) <= 1e-12);
    }

    #[test]
    fn sweep_from_exact_solution_stays_put() {
        let p = differentiation_problem(101);
        let solved = p.least_squares_solution().unwrap();
        let initial_res = p.weighted_norm(&p.residual(&solved).unwrap());
        assert!(initial_res <= 1e-10, "oracle residual {initial_res}");
        let (x, history) = solve_random_sweep(&p, &solved, 2000, 7).unwrap();
        assert!(history.weighted_l2.iter().all(|&r| r <= 1e-10));
        assert!(x.dist(&solved) <= 1e-9);
    }

    #[test]
    fn sweep_never_increases_distance_to_solution() {
        let p = differentiation_problem(51);
        let solved = p.least_squares_solution().unwrap();
        let mut x = Point::zeros(51);
        let mut rng = RngStream::new(3, 0);
        let rows = p.usable_rows();
        let mut dist = {
            let diff: Vec<f64> = x
                .as_slice()
                .iter()
                .zip(solved.as_slice())
                .map(|(a, b)| a - b)
                .collect();
            p.weighted_norm(&diff)
        };
        for _ in 0..2000 {
            let r = rows[(rng.uniform() * rows.len() as f64) as usize % rows.len()];
            x = p.project_row(r, &x).unwrap();
            let diff: Vec<f64> = x
                .as_slice()
                .iter()
                .zip(solved.as_slice())
                .map(|(a, b)| a - b)
                .collect();
            let next = p.weighted_norm(&diff);
            assert!(next <= dist + 1e-9);
            dist = next;
        }
    }

    /// Sup error against a target function over interior nodes with
    /// t >= 0.05. The right-endpoint node is excluded: only the final row
    /// constrains it, with a weighted coupling that vanishes like h/2, so
    /// its value converges at an artifact-of-discretization rate unrelated
    /// to the solver (and a single node carries no L2 mass).
    fn sup_error(p: &DiscreteL2Problem, x: &Point, target: impl Fn(f64) -> f64) -> f64 {
        let n = p.nodes();
        let mut sup = 0.0f64;
        for (i, &t) in p.grid.iter().enumerate().take(n - 1) {
            if t >= 0.05 {
                sup = sup.max((x[i] - target(t)).abs());
            }
        }
        sup
    }

    #[test]
    fn discrete_solution_is_node_exact_for_quadratic_rhs() {
        // The trapezoid rule integrates linear functions exactly, so
        // x(s) = s solves every row of the tabulated system for g = t^2/2.
        let p = differentiation_problem(101);
        let solved = p.least_squares_solution().unwrap();
        for (i, &t) in p.grid.iter().enumerate() {
            assert!((solved[i] - t).abs() < 1e-8, "node {i}");
        }
    }

    #[test]
    fn differentiation_solve_recovers_derivative() {
        let p = differentiation_problem(101);
        let (x, history) = solve_random_sweep(&p, &Point::zeros(101), 50_000, 2024).unwrap();
        let sup_err = sup_error(&p, &x, |t| t);
        assert!(sup_err <= 0.08, "sup error {sup_err}");
        assert!(history.weighted_l2.last().unwrap() < &history.weighted_l2[0]);
    }

    #[test]
    fn grid_refinement_reduces_discretization_error() {
        // A curved solution (x* = sin) keeps genuine O(h^2) quadrature
        // error in the cumulative kernel; refinement must shrink it.
        let mut last = f64::INFINITY;
        for n in [51usize, 101, 201, 401] {
            let kernel = kernel_by_name("indicator", 0.0, 1.0).unwrap();
            let p = discretize(&*kernel, &|t: f64| 1.0 - t.cos(), 0.0, 1.0, n).unwrap();
            let solved = p.least_squares_solution().unwrap();
            let sup = sup_error(&p, &solved, |t| t.sin());
            assert!(sup < last, "n = {n}: {sup} vs previous {last}");
            last = sup;
        }
    }
}
