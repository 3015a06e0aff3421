//! The differentiation operator on `]0, 1[` with a zero boundary value: its
//! semigroup is nilpotent (`‖S(t)‖ = 0` for `t ≥ 1`), yet every resolvent
//! bound is finite. Shows `r(ω)`, the crossing times and how much a single
//! update recovers.

use semigroup_bounds::models::{diffop_astar, diffop_nu, diffop_r, diffop_true_norm};
use semigroup_bounds::{update_bound, OmegaRPair, PiecewiseLogAffineBound};

fn main() -> semigroup_bounds::Result<()> {
    println!("{:>6}  {:>24}  {:>10}  {:>8}", "omega", "root", "r(omega)", "a*");
    for omega in [-20.0, -5.0, -2.0, -1.0, -0.5, 0.0, 1.0, 5.0] {
        let nu = diffop_nu(omega)?;
        println!(
            "{omega:>6.1}  {:>24}  {:>10.6}  {:>8.5}",
            format!("{:?}", nu.root),
            diffop_r(omega)?,
            diffop_astar(omega)?
        );
    }

    let one = PiecewiseLogAffineBound::one();
    println!("\n{:>5}  {:>6}  {:>12}", "t", "truth", "best update");
    for k in 0..=6 {
        let t = 0.5 * k as f64;
        let best = [-20.0, -10.0, -5.0, -2.0, 0.0]
            .iter()
            .map(|&w| {
                let u = update_bound(&one, OmegaRPair::new(w, diffop_r(w)?)?);
                u.eval_log(t)
            })
            .collect::<semigroup_bounds::Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        println!("{t:>5.1}  {:>6}  {:>12.4e}", diffop_true_norm(t)?, best.exp());
    }
    Ok(())
}
