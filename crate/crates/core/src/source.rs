//! Discretized bivariate Gaussian source.
//!
//! Both sources have unit variance and correlation `rho`. The real line is
//! truncated to `[-grid_halfwidth, +grid_halfwidth]` and split into
//! `grid_points` equal cells; every integral in the design equations then
//! becomes a finite sum over cell midpoints.
//!
//! The joint mass table is built once from the midpoint density and
//! normalized as a whole. Marginal weights and conditional rows are derived
//! from that single symmetric table, so the discrete model is exactly
//! exchangeable and one conditional table serves both directions
//! (`U2 | U1` and `U1 | U2`).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Standard bivariate normal density with unit variances and correlation `rho`.
pub fn joint_pdf(u1: f64, u2: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let det = 1.0 - rho * rho;
    let q = (u1 * u1 - 2.0 * rho * u1 * u2 + u2 * u2) / det;
    Ok((-0.5 * q).exp() / (2.0 * PI * det.sqrt()))
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::DegenerateDensity(rho.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub rho: f64,
    /// Half-width of the truncated support, in source standard deviations.
    pub grid_halfwidth: f64,
    /// Cells per axis.
    pub grid_points: usize,
}

impl SourceConfig {
    pub const DEFAULT_HALFWIDTH: f64 = 10.0;
    pub const DEFAULT_POINTS: usize = 2000;

    /// Default discretization (2000 cells on +-10 sigma) for the given correlation.
    pub fn new(rho: f64) -> Self {
        Self {
            rho,
            grid_halfwidth: Self::DEFAULT_HALFWIDTH,
            grid_points: Self::DEFAULT_POINTS,
        }
    }

    pub fn with_grid(rho: f64, grid_halfwidth: f64, grid_points: usize) -> Self {
        Self {
            rho,
            grid_halfwidth,
            grid_points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        if self.grid_points < 2 {
            return Err(Error::InvalidSource(format!(
                "grid_points = {} (need at least 2)",
                self.grid_points
            )));
        }
        if !(self.grid_halfwidth.is_finite() && self.grid_halfwidth > 0.0) {
            return Err(Error::InvalidSource(format!(
                "grid_halfwidth = {} (must be positive)",
                self.grid_halfwidth
            )));
        }
        Ok(())
    }

    /// Midpoints of the grid cells, in increasing order.
    pub fn centers(&self) -> Vec<f64> {
        let n = self.grid_points;
        let spacing = 2.0 * self.grid_halfwidth / n as f64;
        (0..n)
            .map(|i| -self.grid_halfwidth + (i as f64 + 0.5) * spacing)
            .collect()
    }
}

/// Source pair discretized on a uniform midpoint grid.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct SourceGrid {
    config: SourceConfig,
    spacing: f64,
    centers: Vec<f64>,
    weights: Vec<f64>,
    /// Row-major `points x points`; row `j` is the conditional mass of the
    /// other source over all cells given the local source lies in cell `j`.
    cond: Vec<f64>,
}

impl SourceGrid {
    pub fn build(config: SourceConfig) -> Result<Self> {
        config.validate()?;
        let n = config.grid_points;
        let lo = -config.grid_halfwidth;
        let spacing = 2.0 * config.grid_halfwidth / n as f64;
        let centers = config.centers();

        // The normalizing constant of the density cancels after renormalization.
        let rho = config.rho;
        let scale = 0.5 / (1.0 - rho * rho);
        let mut joint = vec![0.0; n * n];
        for (j, &a) in centers.iter().enumerate() {
            for (k, &b) in centers.iter().enumerate().skip(j) {
                let v = (-(a * a - 2.0 * rho * a * b + b * b) * scale).exp();
                joint[j * n + k] = v;
                joint[k * n + j] = v;
            }
        }
        let total: f64 = joint.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numerical("joint mass table is empty".into()));
        }

        let mut weights = vec![0.0; n];
        let mut cond = joint;
        for j in 0..n {
            let row = &mut cond[j * n..(j + 1) * n];
            let row_sum: f64 = row.iter().sum();
            weights[j] = row_sum / total;
            if row_sum > 0.0 {
                row.iter_mut().for_each(|v| *v /= row_sum);
            } else {
                // Underflowed row (far tail, |rho| near 1): put all mass on
                // the cell nearest the conditional mean.
                let target = rho * centers[j];
                let k = nearest_cell(target, lo, spacing, n);
                row.iter_mut().for_each(|v| *v = 0.0);
                row[k] = 1.0;
            }
        }
        let wsum: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= wsum);

        Ok(Self {
            config,
            spacing,
            centers,
            weights,
            cond,
        })
    }

    pub fn config(&self) -> &SourceConfig {
        &self.config
    }

    pub fn rho(&self) -> f64 {
        self.config.rho
    }

    pub fn points(&self) -> usize {
        self.centers.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Conditional masses of the other source given the local cell `j`.
    pub fn cond_row(&self, j: usize) -> &[f64] {
        let n = self.points();
        &self.cond[j * n..(j + 1) * n]
    }

    /// P(other source in cell `k` | local source in cell `j`).
    pub fn cond_mass(&self, j: usize, k: usize) -> f64 {
        self.cond[j * self.points() + k]
    }

    /// Conditional first moment of the other source restricted to cell `k`.
    pub fn cond_first(&self, j: usize, k: usize) -> f64 {
        self.cond_mass(j, k) * self.centers[k]
    }

    /// Conditional second moment of the other source restricted to cell `k`.
    pub fn cond_second(&self, j: usize, k: usize) -> f64 {
        let c = self.centers[k];
        self.cond_mass(j, k) * c * c
    }

    /// E[other source | local cell `j`].
    pub fn cond_mean(&self, j: usize) -> f64 {
        self.cond_row(j)
            .iter()
            .zip(&self.centers)
            .map(|(q, c)| q * c)
            .sum()
    }

    /// Joint mass of (local cell `j`, other cell `k`).
    pub fn joint_mass(&self, j: usize, k: usize) -> f64 {
        self.weights[j] * self.cond_mass(j, k)
    }

    /// Cell containing `u`; samples outside the support are clamped to the edge cells.
    pub fn cell_of(&self, u: f64) -> usize {
        nearest_cell(u, -self.config.grid_halfwidth, self.spacing, self.points())
    }
}

fn nearest_cell(u: f64, lo: f64, spacing: f64, n: usize) -> usize {
    let pos = ((u - lo) / spacing).floor();
    if pos.is_nan() || pos < 0.0 {
        0
    } else {
        (pos as usize).min(n - 1)
    }
}
