//! Schema arithmetic, a low-order census and the implicit-parallelism count.

use schema_forge::ga::{FitnessFunction, Population};
use schema_forge::schema::{implicit_parallelism, schema_census, schema_metrics, GaSchema};

fn main() -> schema_forge::Result<()> {
    for text in ["1**0*1", "**11**", "0*****"] {
        let h: GaSchema = text.parse()?;
        let (order, defining, fragility) = schema_metrics(&h)?;
        println!("{h}: o = {order}, d = {defining}, fragility = {fragility}");
    }

    let pop = Population::parse(&["110100", "011101", "111000", "010111"])?;
    let f = FitnessFunction::royal_road(3);
    println!("\nschema  m  f(H)");
    for row in schema_census(&pop, &f, 1)? {
        println!("{}  {}  {}", row.schema, row.instances, row.mean_fitness);
    }

    let ip = implicit_parallelism(1024, 64, 8)?;
    println!("\nn = 1024, len = 64, phi = 8: theta = {}, 2^theta C(64, theta) = {}, >= n^3: {}", ip.theta, ip.schema_count, ip.holds);
    Ok(())
}
