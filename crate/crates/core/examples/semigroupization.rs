//! Making a sampled bound submultiplicative: `g ↦ min over compositions`.
//! A bound that is good at one time improves every later multiple of it.

use semigroup_bounds::{is_subadditive, semigroupize, semigroupize_capped, GridBound};

fn main() -> semigroup_bounds::Result<()> {
    // log m on t = 0, 0.5, ..., 5: flat, then a single dip at t = 1
    let mut values = vec![0.0; 11];
    values[2] = -1.0;
    let g = GridBound::new(0.5, values)?;
    let s = semigroupize(&g);
    let capped = semigroupize_capped(&g, 2.0)?;

    println!("subadditive before: {}, after: {}", is_subadditive(&g), is_subadditive(&s));
    println!("{:>4}  {:>8}  {:>8}  {:>8}", "t", "g", "S g", "S_2 g");
    for k in 0..g.values().len() {
        println!(
            "{:>4.1}  {:>8.3}  {:>8.3}  {:>8.3}",
            g.time(k),
            g.values()[k].exp(),
            s.values()[k].exp(),
            capped.values()[k].exp()
        );
    }
    Ok(())
}
