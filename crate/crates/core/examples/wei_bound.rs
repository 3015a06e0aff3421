//! The bound obtained from `‖S(t)‖ ≤ 1` and a single resolvent bound `r` on
//! the imaginary axis: `min(1, e^{π/2 - rt})`, optimal for contractions.
//!
//! ```text
//! cargo run --example wei_bound -- 0.5
//! ```

use semigroup_bounds::{a_star, update_bound, OmegaRPair, PiecewiseLogAffineBound};

fn main() -> semigroup_bounds::Result<()> {
    let r: f64 = std::env::args().nth(1).map_or(Ok(1.0), |s| s.parse()).expect("r must be a number");
    let pair = OmegaRPair::new(0.0, r)?;
    let m = update_bound(&PiecewiseLogAffineBound::one(), pair);

    println!("r = {r}, a* = {:.6} (π/(4r) = {:.6})", a_star(&PiecewiseLogAffineBound::one(), pair), std::f64::consts::FRAC_PI_4 / r);
    println!("{:>6}  {:>12}", "t", "m(t)");
    for k in 0..=12 {
        let t = 0.5 * k as f64 / r;
        println!("{t:>6.2}  {:>12.6e}", m.eval_log(t)?.exp());
    }
    // the closed form, for comparison
    assert_eq!(m, PiecewiseLogAffineBound::wei(r)?);
    Ok(())
}
