//! Semigroupization on a uniform grid.
//!
//! For a bound `m` with `m(0) = 1`, the envelope
//! `m̃(t) = inf m(t₁)⋯m(t_K)` over all decompositions `t = t₁ + … + t_K` into
//! positive grid times is again a bound for `‖S(t)‖`. In log form this is a
//! min-plus closure, computed by dynamic programming in increasing `k`; only
//! splits `j ≤ k/2` are needed since the smallest part can be peeled off.

use serde::{Deserialize, Serialize};

use crate::bound::{Piece, PiecewiseLogAffineBound, CONTINUITY_TOL};
use crate::error::{Error, Result};

/// Slack in [`is_subadditive`].
pub const SUBADDITIVE_TOL: f64 = 1e-10;

/// Log-values of a bound at `t = 0, h, 2h, …, Nh`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridBound {
    h: f64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    h: f64,
    values: Vec<f64>,
}

impl TryFrom<RawGrid> for GridBound {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        GridBound::new(raw.h, raw.values)
    }
}

impl From<GridBound> for RawGrid {
    fn from(g: GridBound) -> Self {
        RawGrid {
            h: g.h,
            values: g.values,
        }
    }
}

impl GridBound {
    pub fn new(h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain(format!("grid step must be positive, got {h}")));
        }
        if values.len() < 2 {
            return Err(Error::invalid("grid bound", "need at least the values at 0 and h"));
        }
        if values[0].abs() > CONTINUITY_TOL {
            return Err(Error::invalid(
                "grid bound",
                format!("log m(0) must be 0, got {}", values[0]),
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid("grid bound", format!("value {k} is not finite")));
        }
        let mut values = values;
        values[0] = 0.0;
        Ok(Self { h, values })
    }

    /// Samples `log m` at `kh`, `k = 0..=n`.
    pub fn sample(m: &PiecewiseLogAffineBound, h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain(format!("grid step must be positive, got {h}")));
        }
        if n == 0 {
            return Err(Error::domain("grid needs N >= 1"));
        }
        if !m.is_normalized() {
            return Err(Error::Precondition("sampled bound must satisfy m(0) = 1".into()));
        }
        let values = (0..=n).map(|k| m.log_at(k as f64 * h)).collect();
        Self::new(h, values)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of steps `N` (there are `N + 1` values).
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.time(k), v))
    }

    /// Sup-norm distance on the common grid; `+∞` if the grids differ.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        if self.h != other.h || self.values.len() != other.values.len() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn pointwise_min(&self, other: &Self) -> Result<Self> {
        if self.h != other.h || self.values.len() != other.values.len() {
            return Err(Error::domain("grid bounds live on different grids"));
        }
        Ok(Self {
            h: self.h,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.min(*b))
                .collect(),
        })
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { h: self.h, values }
    }

    /// The continuous piecewise-affine interpolant of the grid values; the
    /// last grid slope is continued past `Nh`.
    pub fn interpolant(&self) -> PiecewiseLogAffineBound {
        let h = self.h;
        let pieces = self
            .values
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let start = k as f64 * h;
                let slope = (w[1] - w[0]) / h;
                Piece {
                    start,
                    slope,
                    intercept: w[0] - slope * start,
                }
            })
            .collect();
        PiecewiseLogAffineBound::from_pieces(pieces)
            .expect("interpolating pieces are continuous by construction")
    }
}

/// The grid envelope `m̃_{∞,h}`:
/// `out[k] = min(g[k], min_{1 ≤ j ≤ k/2} out[j] + out[k - j])`.
pub fn semigroupize(g: &GridBound) -> GridBound {
    closure(g, g.n())
}

/// Like [`semigroupize`] but every part of a decomposition, including a
/// single-part one, must be at most `s` (a grid time).
pub fn semigroupize_capped(g: &GridBound, s: f64) -> Result<GridBound> {
    let ratio = s / g.h;
    if !(ratio >= 1.0 - 1e-9) {
        return Err(Error::domain(format!("cap s = {s} is below the grid step {}", g.h)));
    }
    let cap = (ratio + 1e-9).floor() as usize;
    Ok(closure(g, cap))
}

fn closure(g: &GridBound, cap: usize) -> GridBound {
    let n = g.n();
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        let mut best = if k <= cap { g.values[k] } else { f64::INFINITY };
        for j in 1..=(k / 2).min(cap) {
            let v = out[j] + out[k - j];
            if v < best {
                best = v;
            }
        }
        out[k] = best;
    }
    g.with_values(out)
}

/// `g[i + j] ≤ g[i] + g[j] + 1e-10` for all `i, j ≥ 1`, `i + j ≤ N`.
pub fn is_subadditive(g: &GridBound) -> bool {
    let v = &g.values;
    let n = g.n();
    (1..=n).all(|k| (1..=k / 2).all(|i| v[k] <= v[i] + v[k - i] + SUBADDITIVE_TOL))
}

impl GridBound {
    pub fn semigroupize(&self) -> Self {
        semigroupize(self)
    }

    pub fn semigroupize_capped(&self, s: f64) -> Result<Self> {
        semigroupize_capped(self, s)
    }

    pub fn is_subadditive(&self) -> bool {
        is_subadditive(self)
    }
}
