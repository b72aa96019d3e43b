//! Uniform centered periodic grids.
//!
//! A grid of `N` points and period `L` samples `[-L/2, L/2)` with spacing
//! `Δ = L/N`. Node `j` sits at `(j - N/2)Δ`, frequency node `n` at
//! `(n - N/2)/L`. Every array in this crate is stored in this centered order,
//! so index `N/2` is always the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    num_points: usize,
    period: f64,
}

impl GridSpec {
    pub fn new(num_points: usize, period: f64) -> Result<Self> {
        if num_points < 16 || !num_points.is_power_of_two() {
            return Err(Error::InvalidGridSize(num_points));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidPeriod(period));
        }
        Ok(Self { num_points, period })
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Sample spacing `Δ = L/N`.
    pub fn spacing(&self) -> f64 {
        self.period / self.num_points as f64
    }

    /// Spacing of the frequency nodes, `1/L`.
    pub fn freq_spacing(&self) -> f64 {
        1.0 / self.period
    }

    pub fn center(&self) -> usize {
        self.num_points / 2
    }

    pub fn time_node(&self, j: usize) -> f64 {
        (j as f64 - self.center() as f64) * self.spacing()
    }

    pub fn freq_node(&self, n: usize) -> f64 {
        (n as f64 - self.center() as f64) / self.period
    }

    /// The frequency axis viewed as a grid in its own right: `N` points with
    /// spacing `1/L`, hence period `N/L`. Its frequency nodes are spaced `Δ`.
    pub fn dual(&self) -> GridSpec {
        GridSpec {
            num_points: self.num_points,
            period: self.num_points as f64 / self.period,
        }
    }

    /// Signed offset of index `j` from the origin node.
    pub fn signed_index(&self, j: usize) -> isize {
        j as isize - self.center() as isize
    }

    /// Reduces an arbitrary signed index onto `0..N`.
    pub fn wrap(&self, j: isize) -> usize {
        j.rem_euclid(self.num_points as isize) as usize
    }

    pub fn time_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|j| self.time_node(j))
    }
}

/// Builds a grid of `n` points with period `l`.
pub fn make_grid(n: usize, l: f64) -> Result<GridSpec> {
    GridSpec::new(n, l)
}
