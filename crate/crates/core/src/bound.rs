//! Continuous bounds `m(t)` on `[0, ∞)` whose logarithm is piecewise affine.
//!
//! Everything is stored and manipulated in log scale: a bound is a list of
//! affine pieces `log m(t) = slope * t + intercept`, each active from its
//! `start` time up to the next piece's start, the last one extending to
//! infinity. The class is closed under pointwise minima, which is all the
//! Riccati update needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuity tolerance on log values at breakpoints, relative to the size
/// of the values involved (floored at 1).
pub const CONTINUITY_TOL: f64 = 1e-12;

/// Crossings and breakpoints closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// One affine piece of `log m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Piece {
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }
}

/// A continuous positive function `m` on `[0, ∞)` with `log m` piecewise
/// affine, kept in canonical form (adjacent pieces have distinct slopes).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBound", into = "RawBound")]
pub struct PiecewiseLogAffineBound {
    pieces: Vec<Piece>,
}

/// JSON layout: `{"breakpoints":[…],"slopes":[…],"intercepts":[…]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBound {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
}

impl TryFrom<RawBound> for PiecewiseLogAffineBound {
    type Error = Error;

    fn try_from(raw: RawBound) -> Result<Self> {
        Self::new(raw.breakpoints, raw.slopes, raw.intercepts)
    }
}

impl From<PiecewiseLogAffineBound> for RawBound {
    fn from(m: PiecewiseLogAffineBound) -> Self {
        RawBound {
            breakpoints: m.breakpoints(),
            slopes: m.slopes(),
            intercepts: m.intercepts(),
        }
    }
}

/// Result of [`PiecewiseLogAffineBound::check_log_concave`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogConcavityReport {
    pub is_concave: bool,
    /// First piece index `j` with `slope[j + 1] > slope[j]`.
    pub first_violation: Option<usize>,
}

fn continuity_gap_ok(left: &Piece, right: &Piece) -> bool {
    let t = right.start;
    let a = left.value(t);
    let b = right.value(t);
    let scale = 1f64
        .max((left.slope * t).abs())
        .max(left.intercept.abs())
        .max((right.slope * t).abs())
        .max(right.intercept.abs());
    (a - b).abs() <= CONTINUITY_TOL * scale
}

impl PiecewiseLogAffineBound {
    /// Builds a bound from parallel arrays, validating the structure and
    /// continuity, then merging equal-slope neighbours.
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, intercepts: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::invalid("bound", "at least one piece is required"));
        }
        if breakpoints.len() != slopes.len() || breakpoints.len() != intercepts.len() {
            return Err(Error::invalid(
                "bound",
                format!(
                    "length mismatch: {} breakpoints, {} slopes, {} intercepts",
                    breakpoints.len(),
                    slopes.len(),
                    intercepts.len()
                ),
            ));
        }
        let pieces = breakpoints
            .into_iter()
            .zip(slopes)
            .zip(intercepts)
            .map(|((start, slope), intercept)| Piece {
                start,
                slope,
                intercept,
            })
            .collect();
        Self::from_pieces(pieces)
    }

    /// Same as [`new`](Self::new) but from a list of pieces.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("bound", "at least one piece is required"));
        }
        if pieces[0].start != 0.0 {
            return Err(Error::invalid(
                "bound",
                format!("first breakpoint must be 0, got {}", pieces[0].start),
            ));
        }
        for (j, p) in pieces.iter().enumerate() {
            if !(p.start.is_finite() && p.slope.is_finite() && p.intercept.is_finite()) {
                return Err(Error::invalid("bound", format!("piece {j} is not finite")));
            }
        }
        for (j, w) in pieces.windows(2).enumerate() {
            if w[1].start <= w[0].start {
                return Err(Error::invalid(
                    "bound",
                    format!("breakpoints not strictly increasing at index {}", j + 1),
                ));
            }
            if !continuity_gap_ok(&w[0], &w[1]) {
                return Err(Error::invalid(
                    "bound",
                    format!(
                        "discontinuity at t = {}: {} vs {}",
                        w[1].start,
                        w[0].value(w[1].start),
                        w[1].value(w[1].start)
                    ),
                ));
            }
        }
        Ok(Self::canonical(pieces))
    }

    /// Merges adjacent pieces with identical slopes, keeping the leftmost.
    fn canonical(pieces: Vec<Piece>) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match out.last() {
                Some(last) if last.slope == p.slope => {}
                _ => out.push(p),
            }
        }
        Self { pieces: out }
    }

    /// `m ≡ 1`.
    pub fn one() -> Self {
        Self::exponential(0.0)
    }

    /// `m(t) = e^{slope t}`.
    pub fn exponential(slope: f64) -> Self {
        Self::scaled_exponential(0.0, slope)
    }

    /// `m(t) = M e^{slope t}` with `log_scale = log M`.
    pub fn scaled_exponential(log_scale: f64, slope: f64) -> Self {
        Self {
            pieces: vec![Piece {
                start: 0.0,
                slope,
                intercept: log_scale,
            }],
        }
    }

    /// Wei's bound for a contraction semigroup with resolvent bound `r`:
    /// `1` on `[0, π/(2r)]`, then `e^{π/2 - r t}`.
    pub fn wei(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("Wei bound needs r > 0, got {r}")));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        Ok(Self {
            pieces: vec![
                Piece {
                    start: 0.0,
                    slope: 0.0,
                    intercept: 0.0,
                },
                Piece {
                    start: half_pi / r,
                    slope: -r,
                    intercept: half_pi,
                },
            ],
        })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.start).collect()
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.slope).collect()
    }

    pub fn intercepts(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.intercept).collect()
    }

    /// End of piece `j` (`+∞` for the last one).
    pub fn piece_end(&self, j: usize) -> f64 {
        self.pieces
            .get(j + 1)
            .map_or(f64::INFINITY, |p| p.start)
    }

    pub fn last_slope(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].slope
    }

    /// `m(0) = 1`.
    pub fn is_normalized(&self) -> bool {
        self.pieces[0].intercept.abs() <= CONTINUITY_TOL
    }

    /// Index of the piece containing `t` (right-continuous at breakpoints).
    pub fn piece_index(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.start <= t).saturating_sub(1)
    }

    /// `log m(t)`.
    pub fn eval_log(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("bound evaluated at t = {t} < 0")));
        }
        Ok(self.log_at(t))
    }

    /// `log m(t)` without the domain check; `t` must be `≥ 0`.
    #[inline]
    pub(crate) fn log_at(&self, t: f64) -> f64 {
        self.pieces[self.piece_index(t)].value(t)
    }

    pub fn check_log_concave(&self) -> LogConcavityReport {
        let first_violation = self
            .pieces
            .windows(2)
            .position(|w| w[1].slope > w[0].slope);
        LogConcavityReport {
            is_concave: first_violation.is_none(),
            first_violation,
        }
    }

    /// The pointwise minimum, again in canonical form. Where both inputs
    /// coincide, the piece of `self` is kept.
    pub fn pointwise_min(&self, other: &Self) -> Self {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(other.pieces.iter())
            .map(|p| p.start)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|later, kept| *later - *kept < MERGE_TOL);

        let mut out = Vec::with_capacity(cuts.len() + 4);
        for (k, &lo) in cuts.iter().enumerate() {
            let hi = cuts.get(k + 1).copied().unwrap_or(f64::INFINITY);
            let rep = representative(lo, hi);
            let p1 = self.pieces[self.piece_index(rep)];
            let p2 = other.pieces[other.piece_index(rep)];

            let mut starts = [lo, f64::NAN];
            if p1.slope != p2.slope {
                let x = (p2.intercept - p1.intercept) / (p1.slope - p2.slope);
                if x > lo + MERGE_TOL && x < hi - MERGE_TOL {
                    starts[1] = x;
                }
            }
            let n_sub = if starts[1].is_nan() { 1 } else { 2 };
            for s in 0..n_sub {
                let start = starts[s];
                let end = if s + 1 < n_sub { starts[s + 1] } else { hi };
                let t = representative(start, end);
                let chosen = if p2.value(t) < p1.value(t) { p2 } else { p1 };
                out.push(Piece {
                    start,
                    slope: chosen.slope,
                    intercept: chosen.intercept,
                });
            }
        }
        Self::canonical(out)
    }

    /// Pointwise maximum, via `max(f, g) = -min(-f, -g)` on log values.
    pub(crate) fn pointwise_max(&self, other: &Self) -> Self {
        self.negated().pointwise_min(&other.negated()).negated()
    }

    fn negated(&self) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    start: p.start,
                    slope: -p.slope,
                    intercept: -p.intercept,
                })
                .collect(),
        }
    }

    /// `self` on `[0, at)`, `other` on `[at, ∞)`. The caller guarantees the
    /// two agree at `at` up to rounding.
    pub(crate) fn splice(&self, other: &Self, at: f64) -> Self {
        let mut out: Vec<Piece> = self
            .pieces
            .iter()
            .copied()
            .filter(|p| p.start < at - MERGE_TOL || p.start == 0.0)
            .collect();
        // a piece of `other` starting within the merge tolerance after `at`
        // (e.g. a crossing computed a rounding error away) takes over at `at`
        let first_right = other.pieces[other.piece_index(at + MERGE_TOL)];
        if at > MERGE_TOL {
            out.push(Piece {
                start: at,
                ..first_right
            });
        } else {
            out.clear();
            out.push(Piece {
                start: 0.0,
                ..first_right
            });
        }
        out.extend(
            other
                .pieces
                .iter()
                .copied()
                .filter(|p| p.start > at + MERGE_TOL),
        );
        Self::canonical(out)
    }

    /// `sup_t |log self(t) - log other(t)|`; infinite when the final
    /// slopes differ.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        if self.last_slope() != other.last_slope() {
            return f64::INFINITY;
        }
        self.pieces
            .iter()
            .chain(other.pieces.iter())
            .map(|p| (self.log_at(p.start) - other.log_at(p.start)).abs())
            .fold(0.0, f64::max)
    }

    /// `(t, log m(t))` at each requested time.
    pub fn sample(&self, times: impl IntoIterator<Item = f64>) -> Result<Vec<(f64, f64)>> {
        times
            .into_iter()
            .map(|t| self.eval_log(t).map(|v| (t, v)))
            .collect()
    }
}

fn representative(lo: f64, hi: f64) -> f64 {
    if hi.is_finite() {
        0.5 * (lo + hi)
    } else {
        lo + 1.0
    }
}

/// Free-function form of [`PiecewiseLogAffineBound::pointwise_min`].
pub fn pointwise_min(
    m1: &PiecewiseLogAffineBound,
    m2: &PiecewiseLogAffineBound,
) -> PiecewiseLogAffineBound {
    m1.pointwise_min(m2)
}
