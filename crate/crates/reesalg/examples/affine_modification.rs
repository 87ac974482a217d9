//! Modifies the plane along the origin with divisor x, producing a blowup
//! chart where the induced derivation has a slice, then checks that the
//! modification commutes with forming the filtration subalgebra.
//!
//! Run with: cargo run --example affine_modification

use reesalg::cli::parse_poly;
use reesalg::lnd::{Derivation, QuotientAlgebra, DEFAULT_NILPOTENCY_BOUND};
use reesalg::modification::{self, ModificationInput};
use reesalg::poly::Ring;
use reesalg::rees;

fn main() -> reesalg::Result<()> {
    let ring = Ring::new(&["x", "y"]);
    let algebra = QuotientAlgebra::free(&ring);
    let images = vec![parse_poly("0", &ring)?, parse_poly("x", &ring)?];
    let derivation = Derivation::new(&algebra, images, DEFAULT_NILPOTENCY_BOUND)?;

    let center = vec![parse_poly("x", &ring)?, parse_poly("y", &ring)?];
    let divisor = parse_poly("x", &ring)?;
    let input = ModificationInput::new(&derivation, center, divisor)?;

    let report = modification::check_invariants(&input)?;
    println!("divisor in center: {}", report.divisor_in_ideal);
    println!("divisor invariant: {}", report.divisor_invariant);
    println!("center invariant:  {:?}", report.ideal_invariant);

    let output = modification::modify(&input)?;
    println!("modified ring: {:?}", output.algebra.ring().var_names());
    println!("adjoined: {:?}", output.adjoined);
    println!("defining relations:");
    for p in output.algebra.defining_ideal().reduced_gb()? {
        println!("  {p}");
    }
    println!("induced derivation:");
    for (name, image) in output
        .algebra
        .ring()
        .var_names()
        .iter()
        .zip(output.derivation.images())
    {
        println!("  {name} -> {image}");
    }

    let verdict = modification::verify_rees_modification(&input, rees::DEFAULT_MAX_ITER)?;
    println!("filtration subalgebra commutes with the modification: {verdict}");
    Ok(())
}
