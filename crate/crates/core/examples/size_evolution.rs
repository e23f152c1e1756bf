//! Expected program size after one generation, for several crossover
//! rates, checked against the oracle.

use schema_forge::gp::{GpConfig, GpFitness, GpPopulation};
use schema_forge::gp_theorems::size_evolution;
use schema_forge::oracle::{oracle_expected_mean_size, OracleCaps};
use schema_forge::rational::ratio;

fn main() -> schema_forge::Result<()> {
    let pop = GpPopulation::parse(&["(+ x (* y y))", "(* x y)", "y", "(+ (+ x x) x)"])?;
    for f in [GpFitness::flat(), GpFitness::Size, GpFitness::quadratic_regression()] {
        let predicted = size_evolution(&pop, &f)?;
        print!("{:<12} mean size {} -> predicted {}", f.name(), pop.mean_size(), predicted.by_program);
        for p_c in [ratio(0, 1), ratio(1, 2), ratio(1, 1)] {
            let cfg = GpConfig::new(4, p_c.clone(), ratio(0, 1), 0);
            let exact = oracle_expected_mean_size(&pop, &f, &cfg, &OracleCaps::default())?;
            print!(", oracle@{p_c} {exact}");
        }
        println!();
    }
    Ok(())
}
