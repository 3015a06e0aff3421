//! The `n × n` Jordan block `J` with eigenvalue 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complex_spectral_norm, spectral_norm};

/// Points of the coarse scan along `Re z = ω` before refinement.
const PROFILE_SCAN_POINTS: usize = 1000;
/// Golden-section tolerance on `Im z`.
const PROFILE_REFINE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawJordan")]
pub struct JordanBlockModel {
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJordan {
    n: usize,
}

impl TryFrom<RawJordan> for JordanBlockModel {
    type Error = Error;
    fn try_from(raw: RawJordan) -> Result<Self> {
        Self::new(raw.n)
    }
}

impl JordanBlockModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("Jordan block size must be >= 1"));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `e^{tJ}` row-major: `t^{j-i}/(j-i)!` on and above the diagonal.
pub fn jordan_exponential(model: JordanBlockModel, t: f64) -> Vec<f64> {
    let n = model.n;
    let mut coef = vec![1.0; n];
    for k in 1..n {
        coef[k] = coef[k - 1] * t / k as f64;
    }
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            e[i * n + j] = coef[j - i];
        }
    }
    e
}

/// `‖e^{tJ}‖` (largest singular value).
pub fn jordan_true_norm(model: JordanBlockModel, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    Ok(spectral_norm(&jordan_exponential(model, t), model.n, model.n))
}

/// `max Re` of the numerical range of `J`: `cos(π/(n+1))`, so that
/// `‖e^{tJ}‖ ≤ e^{t cos(π/(n+1))}`.
pub fn jordan_numrange_slope(model: JordanBlockModel) -> f64 {
    (std::f64::consts::PI / (model.n + 1) as f64).cos()
}

/// `‖(z - J)^{-1}‖` at `z = x + iy`. The inverse is upper-triangular Toeplitz
/// with entries `z^{-(k+1)}` on the `k`-th superdiagonal.
pub fn jordan_resolvent_norm(model: JordanBlockModel, x: f64, y: f64) -> f64 {
    let n = model.n;
    let d = x * x + y * y;
    let (wr, wi) = (x / d, -y / d);
    let mut powers = Vec::with_capacity(n);
    let (mut pr, mut pi) = (wr, wi);
    for _ in 0..n {
        powers.push((pr, pi));
        (pr, pi) = (pr * wr - pi * wi, pr * wi + pi * wr);
    }
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let (a, b) = powers[j - i];
            re[i * n + j] = a;
            im[i * n + j] = b;
        }
    }
    complex_spectral_norm(&re, &im, n)
}

/// `r(ω) = 1 / sup_{Re z > ω} ‖(z - J)^{-1}‖`, for `ω > 0`.
///
/// The supremum sits on the line `Re z = ω` and is symmetric in `Im z`, so
/// only `Im z ≥ 0` is scanned, up to the height where the crude bound
/// `Σ_k |z|^{-k}` drops below the value on the real axis; the best scan
/// point is then refined by golden-section search.
pub fn jordan_resolvent_profile(model: JordanBlockModel, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!(
            "Jordan resolvent profile needs omega > 0, got {omega}"
        )));
    }
    let norm = |y: f64| jordan_resolvent_norm(model, omega, y);
    let on_axis = norm(0.0);
    let crude = |rho: f64| (1..=model.n).map(|k| rho.powi(-(k as i32))).sum::<f64>();

    let mut hi = 2.0 * omega;
    while crude(hi) > on_axis {
        hi *= 2.0;
    }
    let mut lo = omega;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if crude(mid) > on_axis {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y_max = (hi * hi - omega * omega).max(0.0).sqrt();
    if y_max == 0.0 {
        return Ok(1.0 / on_axis);
    }

    let step = y_max / PROFILE_SCAN_POINTS as f64;
    let (mut best_k, mut best) = (0, on_axis);
    for k in 1..=PROFILE_SCAN_POINTS {
        let v = norm(k as f64 * step);
        if v > best {
            best_k = k;
            best = v;
        }
    }
    let a = (best_k as f64 - 1.0).max(0.0) * step;
    let b = (best_k as f64 + 1.0) * step;
    let refined = golden_max(norm, a, b, PROFILE_REFINE_TOL);
    Ok(1.0 / best.max(refined))
}

/// Maximum of a unimodal `f` on `[a, b]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}
