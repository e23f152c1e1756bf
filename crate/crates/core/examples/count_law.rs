//! The law of the next-generation schema count: binomial tails, extinction
//! of a fresh schema, Chebychev intervals and the alpha-tilde threshold.

use schema_forge::ga_theorems::{
    alpha_tilde, chebychev_bounds, neutral_extinction_probability, next_count_distribution,
};
use schema_forge::rational::{ratio, to_f64};

fn main() -> schema_forge::Result<()> {
    let law = next_count_distribution(&ratio(3, 20), 40)?;
    println!("n = 40, alpha = 3/20: mean {} variance {} snr {:.3}", law.mean(), law.variance(), law.signal_to_noise());
    println!("Pr(m >= 10) = {:.6}", to_f64(&law.tail(10)));

    let fresh = next_count_distribution(&ratio(1, 100), 100)?;
    println!("one instance in 100, neutral: Pr(extinct next) = {:.4}", to_f64(&fresh.extinction()));
    println!("within two generations: {:.4}", neutral_extinction_probability(100, 1, 2));

    for k in [1.5, 2.0, 3.0] {
        let b = chebychev_bounds(0.15, 40, k)?;
        println!("k = {k}: [{:.2}, {:.2}] with probability >= {:.3}", b.lower, b.upper, b.confidence);
    }
    for x in [0.0, 5.0, 20.0] {
        println!("alpha~(2, {x}, 40) = {:.4}", alpha_tilde(2.0, x, 40)?);
    }
    Ok(())
}
