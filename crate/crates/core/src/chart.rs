//! Coordinate charts and metric fields.
//!
//! Everything downstream works with a single chart at a time: a [`MetricField`]
//! is a pure map from chart coordinates to a symmetric positive-definite
//! matrix, together with the axis-aligned box on which it is valid. Fields are
//! cheap to clone (the evaluator is shared) and are composed by block sums,
//! pullbacks and pointwise combinations.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

/// A point in a coordinate chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "chart coordinates must be finite: {coords:?}"
        );
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Copy of the point with one coordinate shifted.
    pub fn shifted(&self, axis: usize, delta: f64) -> Self {
        let mut coords = self.coords.clone();
        coords[axis] += delta;
        Self { coords }
    }

    /// Concatenation of two chart points (product chart).
    pub fn concat(&self, other: &ChartPoint) -> Self {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self { coords }
    }
}

impl From<Vec<f64>> for ChartPoint {
    fn from(coords: Vec<f64>) -> Self {
        Self::new(coords)
    }
}

/// Axis-aligned box in chart coordinates. A zero-dimensional box is the
/// chart of a point and is valid (its grid has exactly one node).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds must have equal length");
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a < b),
            "box must have positive extent on every axis"
        );
        Self { lo, hi }
    }

    /// The chart of a point: zero axes.
    pub fn point() -> Self {
        Self {
            lo: Vec::new(),
            hi: Vec::new(),
        }
    }

    /// Centered cube [-half, half]^dim.
    pub fn centered_cube(dim: usize, half: f64) -> Self {
        Self {
            lo: vec![-half; dim],
            hi: vec![half; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &ChartPoint, margin: f64) -> bool {
        p.dim() == self.dim()
            && p.coords
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (lo, hi))| *c >= lo + margin && *c <= hi - margin)
    }

    pub fn center(&self) -> ChartPoint {
        ChartPoint::new(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        )
    }

    /// Product box (concatenated axes).
    pub fn product(&self, other: &BoxDomain) -> BoxDomain {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.extend_from_slice(&other.lo);
        hi.extend_from_slice(&other.hi);
        BoxDomain { lo, hi }
    }

    /// Euclidean volume of the box (1 for a point chart).
    pub fn euclidean_volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .product()
    }

    /// Cell midpoints of the uniform grid with `cells` cells per axis.
    /// A zero-dimensional box yields the single empty point.
    pub fn midpoints(&self, cells: usize) -> Vec<ChartPoint> {
        assert!(cells >= 1);
        let dim = self.dim();
        let total = cells.pow(dim as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        loop {
            let coords: Vec<f64> = (0..dim)
                .map(|a| {
                    let h = (self.hi[a] - self.lo[a]) / cells as f64;
                    self.lo[a] + (idx[a] as f64 + 0.5) * h
                })
                .collect();
            out.push(ChartPoint::new(coords));
            // odometer increment
            let mut axis = 0;
            loop {
                if axis == dim {
                    return out;
                }
                idx[axis] += 1;
                if idx[axis] < cells {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Evenly spaced interior points on each axis, `count` per axis,
    /// keeping `margin` away from the boundary.
    pub fn interior_grid(&self, count: usize, margin: f64) -> Vec<ChartPoint> {
        assert!(count >= 1);
        let dim = self.dim();
        let mut out = Vec::new();
        let mut idx = vec![0usize; dim];
        loop {
            let coords: Vec<f64> = (0..dim)
                .map(|a| {
                    let lo = self.lo[a] + margin;
                    let hi = self.hi[a] - margin;
                    if count == 1 {
                        0.5 * (lo + hi)
                    } else {
                        lo + (hi - lo) * idx[a] as f64 / (count - 1) as f64
                    }
                })
                .collect();
            out.push(ChartPoint::new(coords));
            let mut axis = 0;
            loop {
                if axis == dim {
                    return out;
                }
                idx[axis] += 1;
                if idx[axis] < count {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }
}

type EvalFn = dyn Fn(&ChartPoint) -> DMatrix<f64> + Send + Sync;

/// A coordinate-chart metric: a pure map from chart points to symmetric
/// positive-definite matrices, valid on a declared box.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    domain: BoxDomain,
    eval: Arc<EvalFn>,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl MetricField {
    pub fn new<F>(domain: BoxDomain, eval: F) -> Self
    where
        F: Fn(&ChartPoint) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            dim: domain.dim(),
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Evaluate the metric matrix. The caller is responsible for staying
    /// inside the domain; use [`MetricField::contains`] when in doubt.
    pub fn eval(&self, p: &ChartPoint) -> DMatrix<f64> {
        (self.eval)(p)
    }

    pub fn contains(&self, p: &ChartPoint, margin: f64) -> bool {
        self.domain.contains(p, margin)
    }

    /// sqrt(det g) at a point, failing if the matrix is not positive definite.
    pub fn sqrt_det(&self, p: &ChartPoint) -> Result<f64> {
        if self.dim == 0 {
            return Ok(1.0);
        }
        let g = self.eval(p);
        let chol = Cholesky::new(g).ok_or_else(|| Error::NotPositiveDefinite {
            point: p.coords.clone(),
        })?;
        // det g = det(L)^2
        Ok(chol.l_dirty().diagonal().iter().product::<f64>())
    }

    /// Inverse by Cholesky; a failure means the metric is not positive
    /// definite there and is reported, never patched.
    pub fn inverse_at(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        cholesky_inverse(&self.eval(p)).ok_or_else(|| Error::NotPositiveDefinite {
            point: p.coords.clone(),
        })
    }

    /// Flat (identity) metric on a box.
    pub fn flat(domain: BoxDomain) -> Self {
        let dim = domain.dim();
        Self::new(domain, move |_| DMatrix::identity(dim, dim))
    }

    /// Constant metric on a box.
    pub fn constant(domain: BoxDomain, g: DMatrix<f64>) -> Self {
        assert_eq!(g.nrows(), domain.dim());
        assert_eq!(g.ncols(), domain.dim());
        Self::new(domain, move |_| g.clone())
    }

    /// Product chart g1 ⊕ g2 (block diagonal on concatenated coordinates).
    pub fn block_sum(&self, other: &MetricField) -> MetricField {
        let d1 = self.dim;
        let d2 = other.dim;
        let domain = self.domain.product(&other.domain);
        let f1 = self.eval.clone();
        let f2 = other.eval.clone();
        MetricField::new(domain, move |p| {
            let p1 = ChartPoint::new(p.coords[..d1].to_vec());
            let p2 = ChartPoint::new(p.coords[d1..].to_vec());
            let g1 = f1(&p1);
            let g2 = f2(&p2);
            let mut g = DMatrix::zeros(d1 + d2, d1 + d2);
            g.view_mut((0, 0), (d1, d1)).copy_from(&g1);
            g.view_mut((d1, d1), (d2, d2)).copy_from(&g2);
            g
        })
    }

    /// Metric rescaled by a constant factor c (g -> c·g).
    pub fn scaled(&self, c: f64) -> MetricField {
        assert!(c > 0.0);
        let f = self.eval.clone();
        MetricField::new(self.domain.clone(), move |p| f(p) * c)
    }

    /// Pullback of an ambient metric under a chart map. `map` returns the
    /// ambient point and the Jacobian d(ambient)/d(chart), with one row per
    /// ambient coordinate and one column per chart coordinate.
    pub fn pullback<F>(ambient: &MetricField, domain: BoxDomain, map: F) -> MetricField
    where
        F: Fn(&ChartPoint) -> (ChartPoint, DMatrix<f64>) + Send + Sync + 'static,
    {
        let amb = ambient.eval.clone();
        let amb_dim = ambient.dim;
        let chart_dim = domain.dim();
        MetricField::new(domain, move |p| {
            let (q, jac) = map(p);
            debug_assert_eq!(q.dim(), amb_dim);
            debug_assert_eq!(jac.nrows(), amb_dim);
            debug_assert_eq!(jac.ncols(), chart_dim);
            let g = amb(&q);
            jac.transpose() * g * jac
        })
    }

    /// Max |g - g^T| entry at a point.
    pub fn symmetry_defect(&self, p: &ChartPoint) -> f64 {
        let g = self.eval(p);
        let d = &g - g.transpose();
        d.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Check positive-definiteness by Cholesky on a uniform sample grid.
    pub fn check_spd_on_grid(&self, cells: usize) -> Result<()> {
        for p in self.domain.midpoints(cells) {
            if self.dim > 0 && Cholesky::new(self.eval(&p)).is_none() {
                return Err(Error::NotPositiveDefinite {
                    point: p.coords.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Inverse of an SPD matrix via Cholesky; `None` if not positive definite.
pub fn cholesky_inverse(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if g.nrows() == 0 {
        return Some(g.clone());
    }
    Cholesky::<f64, Dyn>::new(g.clone()).map(|c| c.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoints_cover_box() {
        let b = BoxDomain::new(vec![0.0, -1.0], vec![1.0, 1.0]);
        let pts = b.midpoints(4);
        assert_eq!(pts.len(), 16);
        assert!(pts.iter().all(|p| b.contains(p, 0.0)));
        // first midpoint of [0,1] with 4 cells is 0.125
        assert!((pts[0].coords[0] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn point_chart_has_single_node() {
        let b = BoxDomain::point();
        assert_eq!(b.dim(), 0);
        assert_eq!(b.midpoints(7).len(), 1);
        assert_eq!(b.euclidean_volume(), 1.0);
    }

    #[test]
    fn block_sum_is_block_diagonal() {
        let a = MetricField::constant(
            BoxDomain::centered_cube(1, 1.0),
            DMatrix::from_element(1, 1, 2.0),
        );
        let b = MetricField::flat(BoxDomain::centered_cube(2, 1.0));
        let g = a.block_sum(&b).eval(&ChartPoint::new(vec![0.1, 0.2, 0.3]));
        assert_eq!(g[(0, 0)], 2.0);
        assert_eq!(g[(1, 1)], 1.0);
        assert_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn pullback_of_flat_under_scaling_is_conformal() {
        let flat = MetricField::flat(BoxDomain::centered_cube(2, 10.0));
        let pulled = MetricField::pullback(&flat, BoxDomain::centered_cube(2, 1.0), |p| {
            let q = ChartPoint::new(p.coords.iter().map(|c| 3.0 * c).collect());
            (q, DMatrix::identity(2, 2) * 3.0)
        });
        let g = pulled.eval(&ChartPoint::new(vec![0.2, -0.4]));
        assert!((g[(0, 0)] - 9.0).abs() < 1e-14);
        assert!((g[(1, 1)] - 9.0).abs() < 1e-14);
    }

    #[test]
    fn spd_check_rejects_indefinite() {
        let bad = MetricField::constant(
            BoxDomain::centered_cube(2, 1.0),
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]),
        );
        assert!(bad.check_spd_on_grid(2).is_err());
    }
}
