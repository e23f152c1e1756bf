//! Fitness optima, operator-adjusted optima and deceptive channels of a
//! three-bit trap over the uniform population.

use schema_forge::ga::{BitString, FitnessFunction, GaConfig, Population};
use schema_forge::ga_theorems::{adjusted_and_effective_fitness, deception_report, DeceptionScope};
use schema_forge::rational::ratio;

fn main() -> schema_forge::Result<()> {
    let pop = Population::new(BitString::enumerate(3).collect())?;
    let f = FitnessFunction::trap(3);
    let cfg = GaConfig::new(8, ratio(1, 2), ratio(0, 1), 0);
    let report = deception_report(&pop, &f, &cfg, DeceptionScope::Schemata { max_order: 3 })?;
    let show = |hs: &[schema_forge::schema::GaSchema]| hs.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" ");
    println!("fitness optima:  {}", show(&report.fitness_optima));
    println!("adjusted optima: {}", show(&report.adjusted_optima));
    println!("deceptive: {}", report.deceptive);
    println!("channels with p(L) p(R) < p(H): {}", report.channels.len());
    for text in ["111", "000", "1*1"] {
        let h = text.parse()?;
        let fit = adjusted_and_effective_fitness(&h, &pop, &f, &cfg)?;
        println!("{text}: f_a = {}, f_e = {}", fit.adjusted, fit.effective.map(|v| v.to_string()).unwrap_or("-".into()));
    }
    Ok(())
}
