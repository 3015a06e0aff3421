//! A 3 × 3 nilpotent Jordan block: exact norms `‖e^{tJ}‖`, the resolvent
//! profile and the updated bound for three frequencies, starting from the
//! numerical-range bound.

use semigroup_bounds::experiment::jordan_updated_bound;
use semigroup_bounds::models::{
    jordan_numrange_slope, jordan_resolvent_profile, jordan_true_norm, JordanBlockModel,
};
use semigroup_bounds::OmegaSet;

fn main() -> semigroup_bounds::Result<()> {
    let model = JordanBlockModel::new(3)?;
    let slope = jordan_numrange_slope(model);
    println!("numerical range abscissa: {slope:.6}");
    for omega in [0.5, 1.0, 2.0] {
        println!("r({omega}) = {:.6}", jordan_resolvent_profile(model, omega)?);
    }

    let m = jordan_updated_bound(3, &OmegaSet::new(vec![0.5, 1.0, 2.0])?)?;
    println!("\n{:>4}  {:>10}  {:>10}  {:>10}", "t", "true", "bound", "e^{wt}");
    for k in 0..=10 {
        let t = k as f64;
        println!(
            "{t:>4}  {:>10.4}  {:>10.4}  {:>10.4}",
            jordan_true_norm(model, t)?,
            m.eval_log(t)?.exp(),
            (slope * t).exp()
        );
    }
    Ok(())
}
