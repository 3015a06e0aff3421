//! The quantitative Gearhart–Prüss bound for `‖S(t)‖ ≤ 1`, `r(0) = 1`, with
//! and without the decay factor, against the Riccati update.

use semigroup_bounds::riccati::gp_bound_without_decay;
use semigroup_bounds::{gp_bound, update_bound, OmegaRPair, PiecewiseLogAffineBound};

fn main() -> semigroup_bounds::Result<()> {
    let m = PiecewiseLogAffineBound::one();
    let pair = OmegaRPair::new(0.0, 1.0)?;
    let u = update_bound(&m, pair);
    let (a, b) = (1.0, 1.0);

    println!("{:>5}  {:>11}  {:>11}  {:>11}", "t", "GP", "GP no decay", "update");
    for k in 0..=8 {
        let t = a + b + 0.5 * k as f64;
        println!(
            "{t:>5.1}  {:>11.4e}  {:>11.4e}  {:>11.4e}",
            gp_bound(&m, pair, a, b, t)?.exp(),
            gp_bound_without_decay(&m, pair, a, b, t)?.exp(),
            u.eval_log(t)?.exp()
        );
    }
    Ok(())
}
