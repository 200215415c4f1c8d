//! Uniform radial mesh on `[0, r_max]` and the discrete operators built on it.
//!
//! Every node `i` owns the dual cell `[r_i - h/2, r_i + h/2] ∩ [0, r_max]`.
//! Integrals against the measure `(r+ε) dr` use the exact measure of those
//! cells as weights, and the radial laplacian is the flux difference across
//! the cell faces divided by the same weight. Interior rows coincide with the
//! usual central-difference / trapezoid forms; the end rows are half cells,
//! which is the ghost-node Neumann reflection written in conservative form.

use crate::{Error, Result};

/// Smallest admissible number of nodes.
pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    n_nodes: usize,
    h: f64,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_nodes: usize) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "r_max must be positive and finite, got {r_max}"
            )));
        }
        if n_nodes < MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "n_nodes must be at least {MIN_NODES}, got {n_nodes}"
            )));
        }
        Ok(Self {
            r_max,
            n_nodes,
            h: r_max / (n_nodes - 1) as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Node coordinate `r_i`; the last node is exactly `r_max`.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.r_max * i as f64 / (self.n_nodes - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.node(i)).collect()
    }

    /// Coordinate of the face between nodes `i` and `i + 1`.
    #[inline]
    pub fn face(&self, i: usize) -> f64 {
        0.5 * (self.node(i) + self.node(i + 1))
    }

    /// Exact `∫ (r+eps) dr` over each dual cell.
    pub fn cell_weights(&self, eps: f64) -> Vec<f64> {
        let h = self.h;
        let last = self.n_nodes - 1;
        (0..self.n_nodes)
            .map(|i| {
                let a = if i == 0 { 0.0 } else { self.node(i) - 0.5 * h };
                let b = if i == last {
                    self.r_max
                } else {
                    self.node(i) + 0.5 * h
                };
                0.5 * (b * b - a * a) + eps * (b - a)
            })
            .collect()
    }

    /// `(r_f + eps)` at the `n_nodes - 1` interior faces.
    pub fn face_factors(&self, eps: f64) -> Vec<f64> {
        (0..self.n_nodes - 1).map(|i| self.face(i) + eps).collect()
    }

    /// Index `i` and fraction `t ∈ [0, 1]` such that `r = (1-t) r_i + t r_{i+1}`.
    /// Radii outside the grid are clamped.
    pub fn locate(&self, r: f64) -> (usize, f64) {
        if r <= 0.0 {
            return (0, 0.0);
        }
        if r >= self.r_max {
            return (self.n_nodes - 2, 1.0);
        }
        let s = r / self.h;
        let i = (s.floor() as usize).min(self.n_nodes - 2);
        let t = ((r - self.node(i)) / self.h).clamp(0.0, 1.0);
        (i, t)
    }
}

/// Build a uniform grid; thin wrapper over [`RadialGrid::new`].
pub fn build_grid(r_max: f64, n_nodes: usize) -> Result<RadialGrid> {
    RadialGrid::new(r_max, n_nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryCondition {
    /// `n'(0) = n'(r_max) = 0`.
    #[default]
    NeumannBoth,
}

/// Nodal values of a density on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    grid: RadialGrid,
    values: Vec<f64>,
    bc: BoundaryCondition,
}

impl DensityField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { node, value });
        }
        Ok(Self {
            grid,
            values,
            bc: BoundaryCondition::NeumannBoth,
        })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn constant(grid: RadialGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Piecewise-linear interpolation; clamped to the end values outside the grid.
    pub fn interpolate(&self, r: f64) -> f64 {
        let (i, t) = self.grid.locate(r);
        (1.0 - t) * self.values[i] + t * self.values[i + 1]
    }

    /// Largest nodal difference `max |self - other|`; grids must agree.
    pub fn sup_distance(&self, other: &DensityField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("fields live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

fn check_len(grid: &RadialGrid, f: &[f64]) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values for a grid of {} nodes",
            f.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// `∫_0^{r_max} (r+eps) f(r) dr` with dual-cell weights.
pub fn radial_integral(grid: &RadialGrid, f: &[f64], eps: f64) -> Result<f64> {
    check_len(grid, f)?;
    Ok(grid
        .cell_weights(eps)
        .iter()
        .zip(f)
        .map(|(w, v)| w * v)
        .sum())
}

/// Precomputed coefficients of the discrete operator
/// `(1/(r+ε)) ∂_r((r+ε) ∂_r f)` with zero flux through both ends.
#[derive(Debug, Clone)]
pub(crate) struct LaplacianStencil {
    /// Coupling to the right neighbour, `(r_{i+1/2}+ε) / (h W_i)`.
    pub right: Vec<f64>,
    /// Coupling to the left neighbour, `(r_{i-1/2}+ε) / (h W_i)`.
    pub left: Vec<f64>,
}

impl LaplacianStencil {
    pub fn new(grid: &RadialGrid, eps: f64) -> Self {
        let n = grid.len();
        let h = grid.h();
        let w = grid.cell_weights(eps);
        let faces = grid.face_factors(eps);
        let mut right = vec![0.0; n];
        let mut left = vec![0.0; n];
        for i in 0..n {
            if i + 1 < n {
                right[i] = faces[i] / (h * w[i]);
            }
            if i > 0 {
                left[i] = faces[i - 1] / (h * w[i]);
            }
        }
        Self { right, left }
    }

    #[inline]
    pub fn apply_at(&self, f: &[f64], i: usize) -> f64 {
        let n = f.len();
        let mut acc = 0.0;
        if i + 1 < n {
            acc += self.right[i] * (f[i + 1] - f[i]);
        }
        if i > 0 {
            acc -= self.left[i] * (f[i] - f[i - 1]);
        }
        acc
    }

    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.apply_at(f, i);
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn spectral_bound(&self) -> f64 {
        self.right
            .iter()
            .zip(&self.left)
            .map(|(a, b)| 2.0 * (a + b))
            .fold(0.0, f64::max)
    }
}

/// Second-order radial laplacian with homogeneous Neumann conditions.
///
/// At `r = 0` with `eps = 0` the row reduces to `4 (f_1 - f_0) / h²`, the
/// discrete form of `Δf(0) = 2 f''(0)`.
pub fn radial_laplacian(grid: &RadialGrid, f: &DensityField, eps: f64) -> Result<DensityField> {
    check_len(grid, f.values())?;
    let stencil = LaplacianStencil::new(grid, eps);
    let mut out = vec![0.0; grid.len()];
    stencil.apply(f.values(), &mut out);
    DensityField::new(*grid, out)
}

/// Forward differences `(f_{i+1} - f_i) / h` at the interior faces.
pub fn face_gradient(grid: &RadialGrid, f: &DensityField) -> Result<Vec<f64>> {
    check_len(grid, f.values())?;
    let h = grid.h();
    Ok(f.values().windows(2).map(|w| (w[1] - w[0]) / h).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn field(grid: RadialGrid, f: impl Fn(f64) -> f64) -> DensityField {
        DensityField::from_fn(grid, f).unwrap()
    }

    #[test]
    fn build_grid_examples() {
        let g = build_grid(1.0, 11).unwrap();
        assert_relative_eq!(g.h(), 0.1);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(10), 1.0);
        assert_relative_eq!(g.node(3), 0.3, epsilon = 1e-15);

        let g = build_grid(10.0, 300).unwrap();
        assert_relative_eq!(g.h(), 10.0 / 299.0);
        assert_eq!(g.node(299), 10.0);

        assert!(matches!(build_grid(1.0, 2), Err(Error::InvalidArgument(_))));
        assert!(build_grid(0.0, 20).is_err());
        assert!(build_grid(-1.0, 20).is_err());
    }

    #[test]
    fn nodes_strictly_increasing() {
        let g = build_grid(3.7, 57).unwrap();
        let nodes = g.nodes();
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn cell_weights_sum_to_measure() {
        let g = build_grid(2.0, 31).unwrap();
        let sum: f64 = g.cell_weights(0.3).iter().sum();
        assert_relative_eq!(sum, 2.0 + 0.3 * 2.0, epsilon = 1e-14);
    }

    #[test]
    fn integral_of_constant_and_zero() {
        let g = build_grid(1.5, 40).unwrap();
        let one = field(g, |_| 1.0);
        assert_relative_eq!(radial_integral(&g, one.values(), 0.0).unwrap(), 1.5 * 1.5 / 2.0, epsilon = 1e-14);
        let zero = field(g, |_| 0.0);
        assert_eq!(radial_integral(&g, zero.values(), 0.0).unwrap(), 0.0);
        assert!(radial_integral(&g, &[1.0; 3], 0.0).is_err());
    }

    #[test]
    fn integral_of_r_converges_second_order() {
        // Refinement oracle: errors against 1/3 shrink by ~4 per halving and
        // the Richardson combination lands on the exact value.
        let vals: Vec<f64> = [11, 21, 41, 81]
            .iter()
            .map(|&n| {
                let g = build_grid(1.0, n).unwrap();
                radial_integral(&g, field(g, |r| r).values(), 0.0).unwrap()
            })
            .collect();
        let errs: Vec<f64> = vals.iter().map(|v| (v - 1.0 / 3.0).abs()).collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
        let extrapolated = (4.0 * vals[3] - vals[2]) / 3.0;
        assert!((extrapolated - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let g = build_grid(1.0, 20).unwrap();
        for eps in [0.0, 0.05] {
            let lap = radial_laplacian(&g, &field(g, |_| 3.2), eps).unwrap();
            assert!(lap.values().iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn laplacian_of_r_squared_is_four() {
        let g = build_grid(1.0, 21).unwrap();
        let lap = radial_laplacian(&g, &field(g, |r| r * r), 0.0).unwrap();
        // includes the r = 0 symmetry row; the last row is the Neumann row
        for v in &lap.values()[..20] {
            assert_relative_eq!(*v, 4.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn laplacian_symmetry_row_at_origin() {
        let g = build_grid(1.0, 11).unwrap();
        let f = field(g, |r| (3.0 * r).cos());
        let lap = radial_laplacian(&g, &f, 0.0).unwrap();
        let v = f.values();
        assert_relative_eq!(lap.values()[0], 4.0 * (v[1] - v[0]) / (g.h() * g.h()), epsilon = 1e-12);
    }

    #[test]
    fn laplacian_of_r4_second_order_at_half() {
        // Refinement oracle at r = 0.5 against 16 r² = 4.
        let errs: Vec<f64> = [11, 21, 41, 81]
            .iter()
            .map(|&n| {
                let g = build_grid(1.0, n).unwrap();
                let lap = radial_laplacian(&g, &field(g, |r| r.powi(4)), 0.0).unwrap();
                (lap.values()[(n - 1) / 2] - 4.0).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
        assert!(errs[3] < 1e-3);
    }

    #[test]
    fn face_gradient_examples() {
        let g = build_grid(1.0, 11).unwrap();
        assert!(face_gradient(&g, &field(g, |_| 2.0)).unwrap().iter().all(|v| *v == 0.0));
        for v in face_gradient(&g, &field(g, |r| r)).unwrap() {
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
        let grad = face_gradient(&g, &field(g, |r| r * r)).unwrap();
        assert_eq!(grad.len(), 10);
        assert_relative_eq!(grad[0], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn density_field_rejects_bad_input() {
        let g = build_grid(1.0, 10).unwrap();
        assert!(DensityField::new(g, vec![0.0; 9]).is_err());
        let mut v = vec![0.0; 10];
        v[4] = f64::NAN;
        assert!(matches!(DensityField::new(g, v), Err(Error::NonFinite { node: 4, .. })));
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let g = build_grid(2.0, 17).unwrap();
        let f = field(g, |r| r.sin());
        for i in 0..g.len() {
            assert_relative_eq!(f.interpolate(g.node(i)), f.values()[i], epsilon = 1e-14);
        }
    }

    proptest! {
        #[test]
        fn laplacian_exact_on_quadratics(a in -5.0f64..5.0, b in -5.0f64..5.0, n in 8usize..60) {
            let g = build_grid(1.3, n).unwrap();
            let lap = radial_laplacian(&g, &field(g, |r| a + b * r * r), 0.0).unwrap();
            for v in &lap.values()[..n - 1] {
                prop_assert!((v - 4.0 * b).abs() <= 1e-12 * b.abs().max(1.0) * (n * n) as f64);
            }
        }

        #[test]
        fn integral_linear_and_monotone(
            vals in proptest::collection::vec(-3.0f64..3.0, 12),
            bump in proptest::collection::vec(0.0f64..2.0, 12),
            a in -2.0f64..2.0,
            eps in 0.0f64..0.5,
        ) {
            let g = build_grid(1.0, 12).unwrap();
            let f = vals.clone();
            let upper: Vec<f64> = vals.iter().zip(&bump).map(|(v, b)| v + b).collect();
            let i_f = radial_integral(&g, &f, eps).unwrap();
            let i_up = radial_integral(&g, &upper, eps).unwrap();
            prop_assert!(i_up >= i_f - 1e-14);
            let scaled: Vec<f64> = f.iter().zip(&upper).map(|(x, y)| a * x + y).collect();
            let lin = radial_integral(&g, &scaled, eps).unwrap();
            prop_assert!((lin - (a * i_f + i_up)).abs() < 1e-12);
        }
    }
}
