//! Two resolvent bounds, `r(0) = 1` and `r(-1) = 1/20`, applied one after
//! the other. The second update only bites once the first has brought the
//! bound down, and the order matters.

use semigroup_bounds::iteration::apply_in_order;
use semigroup_bounds::{a_star, OmegaRPair, PiecewiseLogAffineBound};

fn show(label: &str, m: &PiecewiseLogAffineBound) {
    println!("{label}:");
    for p in m.pieces() {
        println!("  from t = {:>9.6}: log m = {:+.6} t {:+.6}", p.start, p.slope, p.intercept);
    }
}

fn main() -> semigroup_bounds::Result<()> {
    let axis = OmegaRPair::new(0.0, 1.0)?;
    let left = OmegaRPair::new(-1.0, 0.05)?;
    let one = PiecewiseLogAffineBound::one();

    let first = apply_in_order(&one, &[axis]);
    println!("a*(1, 0, 1) = {:.6}", a_star(&one, axis));
    println!("a*(m1, -1, 1/20) = {:.6}", a_star(&first, left));
    show("after r(0) = 1", &first);

    let both = apply_in_order(&one, &[axis, left]);
    show("then r(-1) = 1/20", &both);

    let reversed = apply_in_order(&one, &[left, axis]);
    show("the other order", &reversed);

    for t in [10.0, 40.0, 50.0, 60.0] {
        println!(
            "t = {t:>4}: {:.4e} vs {:.4e}",
            both.eval_log(t)?.exp(),
            reversed.eval_log(t)?.exp()
        );
    }
    Ok(())
}
