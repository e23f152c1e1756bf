//! Exact transmission probability against Holland's bound and the
//! exhaustive offspring oracle.

use schema_forge::ga::{FitnessFunction, GaConfig, Population};
use schema_forge::ga_theorems::{alpha_len_divisor_variant, exact_alpha, holland_bound};
use schema_forge::oracle::{oracle_alpha, OracleCaps};
use schema_forge::rational::{from_usize, ratio};
use schema_forge::schema::GaSchema;

fn main() -> schema_forge::Result<()> {
    let pop = Population::parse(&["1100", "0110", "1011", "0001", "1111"])?;
    let f = FitnessFunction::one_max();
    let cfg = GaConfig::new(5, ratio(1, 2), ratio(0, 1), 0);
    let caps = OracleCaps::default();
    println!("H      alpha        oracle       n*alpha   holland   len-divisor variant");
    for text in ["1***", "11**", "1**1", "*01*"] {
        let h: GaSchema = text.parse()?;
        let exact = exact_alpha(&h, &pop, &f, &cfg)?;
        let oracle = oracle_alpha(&h, &pop, &f, &cfg, &caps)?;
        assert_eq!(exact.alpha, oracle);
        let holland = holland_bound(&h, &pop, &f, &cfg)?;
        let variant = alpha_len_divisor_variant(&h, &pop, &f, &cfg.p_c)?;
        println!(
            "{h}  {:<11}  {:<11}  {:<8}  {:<8}  {}",
            exact.alpha.to_string(),
            oracle.to_string(),
            exact.expected_count.to_string(),
            holland.to_string(),
            from_usize(5) * variant
        );
    }
    Ok(())
}
