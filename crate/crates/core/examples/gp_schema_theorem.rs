//! Exact GP schema transmission (microscopic and macroscopic), the oracle,
//! the creation correction and the lower bound under one-point crossover.

use schema_forge::gp::{GpConfig, GpFitness, GpPopulation};
use schema_forge::gp_schema::{GpSchema, LowerBlockReading};
use schema_forge::gp_theorems::{
    creation_correction, gp_schema_theorem_bound, macroscopic_alpha_gp, microscopic_alpha_gp,
};
use schema_forge::oracle::{oracle_alpha_gp, OracleCaps};
use schema_forge::rational::ratio;

fn main() -> schema_forge::Result<()> {
    let pop = GpPopulation::parse(&["(+ x y)", "(* x (+ y y))", "(+ (* x x) y)", "x"])?;
    let f = GpFitness::Size;
    let cfg = GpConfig::new(4, ratio(1, 2), ratio(0, 1), 0);
    let reading = LowerBlockReading::SubtreeWildcard;
    for text in ["(+ = =)", "(+ (* = =) =)", "(* x (+ = y))"] {
        let h: GpSchema = text.parse()?;
        let micro = microscopic_alpha_gp(&h, &pop, &f, &cfg, reading)?;
        let macro_ = macroscopic_alpha_gp(&h, &pop, &f, &cfg, reading)?;
        let oracle = oracle_alpha_gp(&h, &pop, &f, &cfg, &OracleCaps::default())?;
        let cc = creation_correction(&h, &pop, &f, &cfg)?;
        let bound = gp_schema_theorem_bound(&h, &pop, &f, &cfg)?;
        println!("{h}");
        println!("  alpha: micro {micro}, macro {macro_}, oracle {oracle}");
        println!("  same-shape lower bound {}, creation {}", cc.lower_bound, cc.delta_alpha);
        println!("  E[m] >= {} (p_diff {})", bound.bound, bound.p_diff);
    }
    Ok(())
}
