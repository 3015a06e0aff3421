//! Independent reference computations for the integration tests. Nothing
//! here calls into the closed forms being tested.

#![allow(dead_code)]

use rand::Rng;
use semigroup_bounds::{Piece, PiecewiseLogAffineBound};

/// Integrates `Φ' = Φ² + 2μΦ + 1` from `Φ(0) = phi0` with classical RK4 and
/// step-doubling error control. Stops at `b_end` or when `Φ` reaches 1
/// (located by bisection on the last step). Returns the dense output
/// `(b, Φ(b))` and the crossing time if any.
pub fn riccati_oracle(mu: f64, phi0: f64, b_end: f64) -> (Vec<(f64, f64)>, Option<f64>) {
    let f = |p: f64| p * p + 2.0 * mu * p + 1.0;
    let rk4 = |p: f64, h: f64| {
        let k1 = f(p);
        let k2 = f(p + 0.5 * h * k1);
        let k3 = f(p + 0.5 * h * k2);
        let k4 = f(p + h * k3);
        p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let tol = 1e-13;
    let (mut b, mut p, mut h) = (0.0f64, phi0, 1e-3f64);
    let mut out = vec![(0.0, phi0)];
    while b < b_end {
        h = h.min(b_end - b);
        let full = rk4(p, h);
        let half = rk4(rk4(p, 0.5 * h), 0.5 * h);
        let err = (full - half).abs() / 15.0;
        if err > tol * half.abs().max(1.0) && h > 1e-12 {
            h *= 0.5;
            continue;
        }
        let next = half + (half - full) / 15.0;
        if next >= 1.0 && p < 1.0 {
            // refine the crossing inside [b, b + h]
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let v = rk4(rk4(p, 0.5 * mid), 0.5 * mid);
                if v < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return (out, Some(b + 0.5 * (lo + hi)));
        }
        b += h;
        p = next;
        out.push((b, p));
        if err < 0.01 * tol {
            h *= 2.0;
        }
    }
    (out, None)
}

/// Minimum of `Σ g[k_i]` over all compositions `k = k_1 + … + k_M`,
/// `k_i ≥ 1`, `k_i ≤ cap`, enumerated recursively.
pub fn brute_force_envelope(g: &[f64], cap: usize) -> Vec<f64> {
    fn best(g: &[f64], k: usize, cap: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let mut b = f64::INFINITY;
        for first in 1..=k.min(cap) {
            b = b.min(g[first] + best(g, k - first, cap));
        }
        b
    }
    (0..g.len()).map(|k| best(g, k, cap)).collect()
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 30)
}

/// Largest root of `λ³ + c2 λ² + c1 λ + c0` with three real roots
/// (trigonometric form).
pub fn largest_cubic_root(c2: f64, c1: f64, c0: f64) -> f64 {
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let m = 2.0 * (-p / 3.0).sqrt();
    let theta = (3.0 * q / (p * m)).acos() / 3.0;
    m * theta.cos() - c2 / 3.0
}

/// `‖e^{2J}‖` for the 3 × 3 Jordan block from the characteristic
/// polynomial of `EᵀE`, `E = [[1,2,2],[0,1,2],[0,0,1]]`.
pub fn jordan3_norm_at_2() -> f64 {
    let e = [[1.0, 2.0, 2.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]];
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (0..3).map(|k| e[k][i] * e[k][j]).sum();
        }
    }
    let tr = g[0][0] + g[1][1] + g[2][2];
    let minors = g[0][0] * g[1][1] - g[0][1] * g[1][0] + g[0][0] * g[2][2] - g[0][2] * g[2][0]
        + g[1][1] * g[2][2] - g[1][2] * g[2][1];
    let det = 1.0; // det(E)² with det(E) = 1
    largest_cubic_root(-tr, minors, -det).sqrt()
}

/// Power iteration for the largest eigenvalue of a symmetric positive
/// semi-definite matrix.
pub fn power_iteration(a: &[Vec<f64>], iters: usize) -> f64 {
    let n = a.len();
    let mut x = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..iters {
        let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * x[j]).sum()).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        lambda = norm / x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    lambda
}

/// `‖(z - J)^{-1}‖` for a 3 × 3 Jordan block via the 6 × 6 real embedding
/// and power iteration on its Gram matrix.
pub fn jordan3_resolvent_norm(x: f64, y: f64) -> f64 {
    // (z - J)^{-1} entries: 1/z, 1/z², 1/z³ on the diagonals
    let d = x * x + y * y;
    let w = (x / d, -y / d);
    let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let p = [w, mul(w, w), mul(mul(w, w), w)];
    let mut emb = vec![vec![0.0; 6]; 6];
    for i in 0..3 {
        for j in i..3 {
            let (a, b) = p[j - i];
            emb[i][j] = a;
            emb[i][3 + j] = -b;
            emb[3 + i][j] = b;
            emb[3 + i][3 + j] = a;
        }
    }
    let gram: Vec<Vec<f64>> = (0..6)
        .map(|i| (0..6).map(|j| (0..6).map(|k| emb[k][i] * emb[k][j]).sum()).collect())
        .collect();
    power_iteration(&gram, 2000).sqrt()
}

/// `1 / σ_min(z - A_h)` for the upwind discretization of `d/dx` on `]0, 1[`
/// with `u(1) = 0` and `n` unknowns, by inverse iteration (the matrix is
/// upper bidiagonal, so each solve is a substitution).
pub fn diffop_discrete_resolvent_norm(z: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let (d, s) = (z + 1.0 / h, -1.0 / h);
    // B x = y, B upper bidiagonal (diag d, superdiag s)
    let solve_b = |y: &[f64]| {
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let next = if i + 1 < n { x[i + 1] } else { 0.0 };
            x[i] = (y[i] - s * next) / d;
        }
        x
    };
    // Bᵀ x = y, lower bidiagonal
    let solve_bt = |y: &[f64]| {
        let mut x = vec![0.0; n];
        for i in 0..n {
            let prev = if i > 0 { x[i - 1] } else { 0.0 };
            x[i] = (y[i] - s * prev) / d;
        }
        x
    };
    let mut v = vec![1.0; n];
    let mut est = 0.0;
    for _ in 0..500 {
        let w = solve_b(&solve_bt(&v));
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nw = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        est = nw / nv;
        v = w.into_iter().map(|a| a / nw).collect();
    }
    est.sqrt()
}

/// A random continuous bound with `1..=max_pieces` pieces on `[0, horizon]`.
pub fn random_bound<R: Rng>(rng: &mut R, max_pieces: usize, horizon: f64, normalized: bool) -> PiecewiseLogAffineBound {
    let n = rng.gen_range(1..=max_pieces);
    let slopes: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    random_with_slopes(rng, slopes, horizon, normalized)
}

/// Random log-concave bound (non-increasing slopes).
pub fn random_concave_bound<R: Rng>(rng: &mut R, max_pieces: usize, horizon: f64) -> PiecewiseLogAffineBound {
    let n = rng.gen_range(1..=max_pieces);
    let mut slopes: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..2.0)).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    random_with_slopes(rng, slopes, horizon, true)
}

fn random_with_slopes<R: Rng>(rng: &mut R, mut slopes: Vec<f64>, horizon: f64, normalized: bool) -> PiecewiseLogAffineBound {
    slopes.dedup();
    let mut starts: Vec<f64> = (1..slopes.len()).map(|_| rng.gen_range(0.05..horizon)).collect();
    starts.sort_by(f64::total_cmp);
    starts.dedup_by(|a, b| *a - *b < 1e-3);
    starts.insert(0, 0.0);
    slopes.truncate(starts.len());
    let mut value = if normalized { 0.0 } else { rng.gen_range(-1.0..1.0) };
    let mut pieces = Vec::new();
    for (j, (&start, &slope)) in starts.iter().zip(&slopes).enumerate() {
        if j > 0 {
            value += slopes[j - 1] * (start - starts[j - 1]);
        }
        pieces.push(Piece {
            start,
            slope,
            intercept: value - slope * start,
        });
    }
    PiecewiseLogAffineBound::from_pieces(pieces).expect("continuous by construction")
}
