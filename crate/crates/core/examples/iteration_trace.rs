//! Iterating the updates over a frequency set, with semigroupization between
//! rounds, until the bound stops changing. Uses a config file if given.
//!
//! ```text
//! cargo run --example iteration_trace -- crates/core/examples/configs/diffop_iterate.json
//! ```

use semigroup_bounds::experiment::ExperimentConfig;
use semigroup_bounds::iteration::{iterate_with, IterationOptions};
use semigroup_bounds::output::grid_steps;

fn main() -> semigroup_bounds::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/diffop_iterate.json").into()
    });
    let ex = ExperimentConfig::from_path(&path)?.resolve()?;
    let opts = IterationOptions {
        max_steps: ex.config.iteration.max_steps,
        h: ex.h,
        n: grid_steps(ex.h, ex.t_max),
        semigroupize: ex.config.iteration.use_semigroupize,
    };
    let trace = iterate_with(&ex.initial, &ex.omegas, &ex.profile, opts)?;

    for step in &trace.steps {
        let g = step.grid.as_ref().expect("grid iterates");
        let at = |t: f64| g.values()[((t / g.h()).round() as usize).min(g.n())].exp();
        println!(
            "step {:>2}: m(1) = {:.4e}, m(2) = {:.4e}, min a* = {:?}, minimizing omegas {:?}",
            step.index,
            at(1.0),
            at(2.0),
            step.min_a_star,
            step.minimizing_omegas
        );
    }
    match trace.stationary_at {
        Some(k) => println!("stationary from step {k}"),
        None => println!("not stationary within {} steps", opts.max_steps),
    }
    Ok(())
}
