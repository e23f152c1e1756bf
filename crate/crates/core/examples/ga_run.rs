//! Evolve one-max strings and watch one schema's share grow.

use schema_forge::ga::{next_generation, FitnessFunction, GaConfig, Population};
use schema_forge::rational::{ratio, to_f64};
use schema_forge::schema::{count_and_fitness, GaSchema};

fn main() -> schema_forge::Result<()> {
    let f = FitnessFunction::one_max();
    let cfg = GaConfig::new(40, ratio(7, 10), ratio(1, 40), 17);
    let h: GaSchema = "1111********".parse()?;
    let mut pop = Population::random(40, 12, 17)?;
    println!("gen  mean fitness  m({h})");
    for _ in 0..15 {
        let c = count_and_fitness(&h, &pop, &f)?;
        println!("{:>3}  {:>12.3}  {:>3}", pop.generation(), to_f64(&pop.mean_fitness(&f)?), c.instances);
        pop = next_generation(&pop, &f, &cfg)?;
    }
    Ok(())
}
