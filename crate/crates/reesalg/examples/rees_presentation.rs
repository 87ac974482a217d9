//! Computes the filtration subalgebra presentation for the standard
//! derivation on the coordinate ring of SL2.
//!
//! The ring is k[x, y, u, v]/(x*v - y*u - 1) with derivation u -> x, v -> y.
//! Run with: cargo run --example rees_presentation

use reesalg::cli::parse_poly;
use reesalg::lnd::{Derivation, QuotientAlgebra, DEFAULT_NILPOTENCY_BOUND};
use reesalg::poly::Ring;
use reesalg::rees;

fn main() -> reesalg::Result<()> {
    let ring = Ring::new(&["x", "y", "u", "v"]);
    let relation = parse_poly("x*v - y*u - 1", &ring)?;
    let algebra = QuotientAlgebra::new(&ring, vec![relation]);
    let images = ["0", "0", "x", "y"]
        .iter()
        .map(|s| parse_poly(s, &ring))
        .collect::<reesalg::Result<Vec<_>>>()?;
    let derivation = Derivation::new(&algebra, images, DEFAULT_NILPOTENCY_BOUND)?;

    let (presentation, trace) = rees::rees_algorithm(&derivation, rees::DEFAULT_MAX_ITER)?;

    println!("trace:");
    for line in trace.render_lines() {
        println!("  {line}");
    }
    println!("generators:");
    for g in presentation.generators() {
        println!("  {} = {}  (weight {})", g.label, g.element, g.weight);
    }
    println!("relations:");
    for p in presentation.relations().reduced_gb()? {
        println!("  {}", p.format(presentation.relations().order()));
    }
    Ok(())
}
