//! Parse trees, their common region, and one-point and uniform crossover.

use schema_forge::gp::{common_region, one_point_crossover_gp, uniform_crossover_gp, GpMask, Tree};

fn main() -> schema_forge::Result<()> {
    let a: Tree = "(+ (* x y) x)".parse()?;
    let b: Tree = "(* y (+ x (* y y)))".parse()?;
    let region = common_region(&a, &b);
    let show = |ps: &[schema_forge::gp::NodePath]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
    println!("common region: {}", show(region.nodes()));
    println!("links: {}", show(region.links()));
    for point in region.links() {
        println!("cut at {point}: {}", one_point_crossover_gp(&a, &b, point)?);
    }
    let mask = GpMask::from_fn(region.nodes(), |p| p.depth() % 2 == 0);
    println!("alternating-depth mask: {}", uniform_crossover_gp(&a, &b, &mask)?);
    Ok(())
}
