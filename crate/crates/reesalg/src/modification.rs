//! Equivariant affine modifications A[I/f] and their compatibility with the
//! graded filtration subalgebra.
//!
//! Given an invariant ideal I of A and an invariant divisor f in I, the
//! modification adjoins the fractions g/f for generators g of I. The induced
//! derivation stays locally nilpotent, and forming the filtration subalgebra
//! commutes with the modification; `verify_rees_modification` checks that
//! statement on concrete data.

use std::collections::BTreeMap;

use crate::groebner::{self, Ideal, RingMap};
use crate::lnd::{Derivation, QuotientAlgebra};
use crate::poly::{rat, Monomial, MonomialOrder, Poly, Ring, RingRef};
use crate::rees;
use crate::{Error, Result};

/// Input datum: a derivation together with an invariant center and divisor.
#[derive(Debug, Clone)]
pub struct ModificationInput {
    derivation: Derivation,
    ideal_gens: Vec<Poly>,
    divisor: Poly,
}

impl ModificationInput {
    /// Normalizes the center generators and the divisor. Zero generators are
    /// dropped; an empty center or a zero divisor is rejected.
    pub fn new(
        derivation: &Derivation,
        ideal_gens: Vec<Poly>,
        divisor: Poly,
    ) -> Result<ModificationInput> {
        assert!(
            derivation.is_validated_nilpotent(),
            "modification requires a validated locally nilpotent derivation"
        );
        let algebra = derivation.algebra();
        let mut gens = Vec::with_capacity(ideal_gens.len());
        for g in &ideal_gens {
            let g = algebra.normal_form(g)?;
            if !g.is_zero() {
                gens.push(g);
            }
        }
        if gens.is_empty() {
            return Err(Error::InvalidInput("the center ideal has no nonzero generators".to_string()));
        }
        let divisor = algebra.normal_form(&divisor)?;
        if divisor.is_zero() {
            return Err(Error::InvalidInput("the divisor is zero".to_string()));
        }
        Ok(ModificationInput { derivation: derivation.clone(), ideal_gens: gens, divisor })
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn ideal_generators(&self) -> &[Poly] {
        &self.ideal_gens
    }

    pub fn divisor(&self) -> &Poly {
        &self.divisor
    }

    /// The center together with the defining relations, as a polynomial
    /// ideal over the ambient ring.
    fn center_ideal(&self) -> Ideal {
        let algebra = self.derivation.algebra();
        let ring = algebra.ring();
        let mut gens = self.ideal_gens.clone();
        gens.extend(algebra.defining_ideal().generators().iter().cloned());
        Ideal::new(ring, gens, MonomialOrder::degrevlex(ring.nvars()))
    }
}

/// Verdicts for the three preconditions of a modification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    /// The divisor lies in the center ideal.
    pub divisor_in_ideal: bool,
    /// The derivation kills the divisor.
    pub divisor_invariant: bool,
    /// Per center generator: its derivative lies back in the center.
    pub ideal_invariant: Vec<bool>,
}

impl InvariantReport {
    pub fn passes(&self) -> bool {
        self.divisor_in_ideal && self.divisor_invariant && self.ideal_invariant.iter().all(|&b| b)
    }
}

/// Checks the modification preconditions and reports each verdict.
pub fn check_invariants(input: &ModificationInput) -> Result<InvariantReport> {
    let derivation = input.derivation();
    let center = input.center_ideal();
    let divisor_in_ideal = groebner::ideal_member(input.divisor(), &center)?;
    let divisor_invariant = derivation.apply(input.divisor())?.is_zero();
    let ideal_invariant = input
        .ideal_generators()
        .iter()
        .map(|g| groebner::ideal_member(&derivation.apply(g)?, &center))
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantReport { divisor_in_ideal, divisor_invariant, ideal_invariant })
}

/// The modified algebra with its induced derivation.
#[derive(Debug, Clone)]
pub struct ModificationOutput {
    /// A' = A[I/f] on the base variables plus one fraction variable per
    /// center generator.
    pub algebra: QuotientAlgebra,
    /// The induced derivation; agrees with the input on base variables.
    pub derivation: Derivation,
    /// Base variables as elements of the modified algebra.
    pub embedding: Vec<Poly>,
    /// Names of the adjoined fraction variables.
    pub adjoined: Vec<String>,
}

/// Names r fresh fraction variables, avoiding the base variables and the
/// reserved upsilon.
fn fraction_names(ring: &RingRef, count: usize) -> Result<Vec<String>> {
    for prefix in ["t", "s", "m"] {
        let names: Vec<String> = (1..=count).map(|j| format!("{prefix}{j}")).collect();
        if names
            .iter()
            .all(|n| ring.var_index(n).is_none() && n != rees::UPSILON)
        {
            return Ok(names);
        }
    }
    Err(Error::InvalidInput("cannot name the adjoined fraction variables".to_string()))
}

/// Performs the modification: presents A' = A[I/f] as the kernel of
/// evaluating fraction variables at g/f inside A with f inverted, and
/// induces the derivation by lifting each derivative through the center.
pub fn modify(input: &ModificationInput) -> Result<ModificationOutput> {
    let report = check_invariants(input)?;
    if !report.passes() {
        return Err(Error::InvalidInput(
            "modification input fails the invariance checks".to_string(),
        ));
    }
    let derivation = input.derivation();
    let algebra = derivation.algebra();
    let aring = algebra.ring();
    let n = aring.nvars();
    let gens = input.ideal_generators();

    // localized model A[z]/(z*f - 1)
    let lring = aring.extend(&["#inv"]);
    let z = Poly::var(&lring, n);
    let mut lgens: Vec<Poly> = algebra
        .defining_ideal()
        .generators()
        .iter()
        .map(|g| g.embed(&lring))
        .collect::<Result<Vec<_>>>()?;
    lgens.push(&(&input.divisor().embed(&lring)? * &z) - &Poly::one(&lring));
    let lideal = Ideal::new(&lring, lgens, MonomialOrder::degrevlex(lring.nvars()));

    let adjoined = fraction_names(aring, gens.len())?;
    let mut names: Vec<String> = aring.var_names().to_vec();
    names.extend(adjoined.iter().cloned());
    let sring = Ring::new(&names);

    let mut images: Vec<Poly> = (0..n).map(|i| Poly::var(&lring, i)).collect();
    for g in gens {
        images.push(&g.embed(&lring)? * &z);
    }
    let map = RingMap::new(&sring, lideal, images)?;
    let kernel = groebner::ringmap_kernel(&map)?;
    let modified = QuotientAlgebra::new(&sring, kernel.generators().to_vec());

    // induced derivation: base variables keep their images, each fraction
    // variable differentiates through a lift of its generator's derivative
    let lift_basis = input.center_ideal();
    let mut dimages: Vec<Poly> = derivation
        .images()
        .iter()
        .map(|p| p.embed(&sring))
        .collect::<Result<Vec<_>>>()?;
    for g in gens {
        let cofactors = groebner::lift_combination(&derivation.apply(g)?, &lift_basis)?;
        let mut image = Poly::zero(&sring);
        for (m, c) in cofactors.iter().take(gens.len()).enumerate() {
            image = &image + &(&c.embed(&sring)? * &Poly::var(&sring, n + m));
        }
        dimages.push(image);
    }
    let induced = Derivation::new(&modified, dimages, derivation.nilpotency_bound_used())?;
    let embedding = (0..n)
        .map(|i| modified.normal_form(&Poly::var(&sring, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModificationOutput { algebra: modified, derivation: induced, embedding, adjoined })
}

/// Values of the center's graded ideal over the presentation: generators of
/// J = I*A[upsilon] intersected with the subalgebra, each e-homogeneous,
/// computed by contracting the extended center along the presentation map.
fn graded_center_values(
    input: &ModificationInput,
    presentation: &rees::ReesPresentation,
) -> Result<Vec<Poly>> {
    let model = presentation.upsilon_values()?;
    let mut target_gens = model.defining.generators().to_vec();
    for g in input.ideal_generators() {
        target_gens.push(g.embed(&model.ring)?);
    }
    let order = MonomialOrder::degrevlex(model.ring.nvars());
    let target = Ideal::new(&model.ring, target_gens, order);
    let map = RingMap::new(presentation.presentation_ring(), target, model.values.clone())?;
    let contraction = groebner::ringmap_kernel(&map)?;
    let bindings: BTreeMap<usize, Poly> = model.values.iter().cloned().enumerate().collect();
    let mut values = Vec::new();
    for p in contraction.reduced_gb()? {
        let value = p.substitute(&model.ring, &bindings)?;
        let value = groebner::normal_form(&value, &model.defining)?;
        if !value.is_zero() {
            values.push(value);
        }
    }
    Ok(values)
}

/// Checks that modification commutes with forming the filtration subalgebra.
///
/// Both sides are realized inside A[upsilon] with the divisor inverted: one
/// side adjoins the graded center over the divisor to the base presentation,
/// the other takes the presentation of the modified algebra. The verdict is
/// mutual membership of all generators.
pub fn verify_rees_modification(input: &ModificationInput, max_iter: u32) -> Result<bool> {
    let derivation = input.derivation();
    let algebra = derivation.algebra();
    let aring = algebra.ring();
    let n = aring.nvars();
    let (base_pres, _) = rees::rees_algorithm(derivation, max_iter)?;
    let output = modify(input)?;
    let (mod_pres, _) = rees::rees_algorithm(&output.derivation, max_iter)?;

    // common localization A[upsilon, z] with z inverting the divisor
    let mring = aring.extend(&[rees::UPSILON, "#inv"]);
    let z = Poly::var(&mring, n + 1);
    let mut mgens: Vec<Poly> = algebra
        .defining_ideal()
        .generators()
        .iter()
        .map(|g| g.embed(&mring))
        .collect::<Result<Vec<_>>>()?;
    mgens.push(&(&input.divisor().embed(&mring)? * &z) - &Poly::one(&mring));
    let mideal = Ideal::new(&mring, mgens, MonomialOrder::degrevlex(mring.nvars()));

    // side 1: the base presentation plus the graded center over the divisor
    let base_model = base_pres.upsilon_values()?;
    let mut side1: Vec<(String, Poly)> = base_pres
        .generators()
        .iter()
        .zip(&base_model.values)
        .map(|(g, v)| Ok((g.label.clone(), v.embed(&mring)?)))
        .collect::<Result<Vec<_>>>()?;
    for (k, value) in graded_center_values(input, &base_pres)?.iter().enumerate() {
        side1.push((format!("#j{k}"), &value.embed(&mring)? * &z));
    }

    // side 2: the modified presentation, pushed through g/f -> g*z
    let mut push: Vec<Poly> = (0..n).map(|i| Poly::var(&mring, i)).collect();
    for g in input.ideal_generators() {
        push.push(&g.embed(&mring)? * &z);
    }
    let bindings: BTreeMap<usize, Poly> = push.into_iter().enumerate().collect();
    let ups = Monomial::var(n);
    let side2: Vec<(String, Poly)> = mod_pres
        .generators()
        .iter()
        .map(|g| {
            let value = g.element.substitute(&mring, &bindings)?;
            Ok((g.label.clone(), value.mul_term(&ups.pow(g.weight), &rat(1))))
        })
        .collect::<Result<Vec<_>>>()?;

    for (_, p) in &side2 {
        if groebner::subalgebra_member(p, &side1, &mideal)?.is_none() {
            return Ok(false);
        }
    }
    for (_, p) in &side1 {
        if groebner::subalgebra_member(p, &side2, &mideal)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_poly;
    use crate::lnd::DEFAULT_NILPOTENCY_BOUND;

    fn derivation(vars: &[&str], relations: &[&str], images: &[&str]) -> Derivation {
        let ring = Ring::new(vars);
        let rels = relations.iter().map(|r| parse_poly(r, &ring).unwrap()).collect();
        let algebra = QuotientAlgebra::new(&ring, rels);
        let imgs = images.iter().map(|s| parse_poly(s, &ring).unwrap()).collect();
        Derivation::new(&algebra, imgs, DEFAULT_NILPOTENCY_BOUND).unwrap()
    }

    fn slice_input() -> ModificationInput {
        let d = derivation(&["x", "y"], &[], &["0", "x"]);
        let ring = d.algebra().ring().clone();
        ModificationInput::new(
            &d,
            vec![parse_poly("x", &ring).unwrap(), parse_poly("y", &ring).unwrap()],
            parse_poly("x", &ring).unwrap(),
        )
        .unwrap()
    }

    fn sl2_input() -> ModificationInput {
        let d = derivation(&["x", "y", "u", "v"], &["x*v - y*u - 1"], &["0", "0", "x", "y"]);
        let ring = d.algebra().ring().clone();
        ModificationInput::new(
            &d,
            vec![parse_poly("x", &ring).unwrap(), parse_poly("y", &ring).unwrap()],
            parse_poly("x", &ring).unwrap(),
        )
        .unwrap()
    }

    fn expect_ideal(ideal: &Ideal, gens: &[&str]) -> bool {
        let ring = ideal.ring().clone();
        let gens = gens.iter().map(|s| parse_poly(s, &ring).unwrap()).collect();
        let expected = Ideal::new(&ring, gens, ideal.order().clone());
        groebner::ideal_equal(ideal, &expected).unwrap()
    }

    #[test]
    fn invariant_report_rows() {
        let input = slice_input();
        let report = check_invariants(&input).unwrap();
        assert!(report.passes());
        assert_eq!(report.ideal_invariant, [true, true]);

        // divisor y is not invariant
        let d = derivation(&["x", "y"], &[], &["0", "x"]);
        let ring = d.algebra().ring().clone();
        let bad = ModificationInput::new(
            &d,
            vec![parse_poly("x", &ring).unwrap(), parse_poly("y", &ring).unwrap()],
            parse_poly("y", &ring).unwrap(),
        )
        .unwrap();
        let report = check_invariants(&bad).unwrap();
        assert!(report.divisor_in_ideal);
        assert!(!report.divisor_invariant);
        assert!(!report.passes());

        // the unit center passes trivially
        let trivial = ModificationInput::new(
            &d,
            vec![Poly::one(&ring)],
            Poly::one(&ring),
        )
        .unwrap();
        assert!(check_invariants(&trivial).unwrap().passes());
    }

    #[test]
    fn blowup_chart_produces_a_slice() {
        let input = slice_input();
        let out = modify(&input).unwrap();
        assert_eq!(out.adjoined, ["t1", "t2"]);
        assert_eq!(out.algebra.ring().var_names(), ["x", "y", "t1", "t2"]);
        assert!(expect_ideal(out.algebra.defining_ideal(), &["t1 - 1", "x*t2 - y"]));
        let images: Vec<String> = out.derivation.images().iter().map(Poly::to_string).collect();
        assert_eq!(images, ["0", "x", "0", "1"]);
        let embedding: Vec<String> = out.embedding.iter().map(Poly::to_string).collect();
        assert_eq!(embedding, ["x", "y"]);
        assert!(out.derivation.is_validated_nilpotent());
    }

    #[test]
    fn principal_center_changes_nothing() {
        let d = derivation(&["x", "y"], &[], &["0", "x"]);
        let ring = d.algebra().ring().clone();
        let input =
            ModificationInput::new(&d, vec![parse_poly("x", &ring).unwrap()], parse_poly("x", &ring).unwrap())
                .unwrap();
        let out = modify(&input).unwrap();
        assert!(expect_ideal(out.algebra.defining_ideal(), &["t1 - 1"]));
        let images: Vec<String> = out.derivation.images().iter().map(Poly::to_string).collect();
        assert_eq!(images, ["0", "x", "0"]);
    }

    #[test]
    fn sl2_center_kills_both_fractions() {
        let input = sl2_input();
        let out = modify(&input).unwrap();
        let images: Vec<String> = out.derivation.images().iter().map(Poly::to_string).collect();
        assert_eq!(images, ["0", "0", "x", "y", "0", "0"]);
        for (i, image) in input.derivation().images().iter().enumerate() {
            assert_eq!(
                out.derivation.image(i),
                &image.embed(out.algebra.ring()).unwrap()
            );
        }
    }

    #[test]
    fn modification_rejects_noninvariant_input() {
        let d = derivation(&["x", "y"], &[], &["0", "x"]);
        let ring = d.algebra().ring().clone();
        let bad = ModificationInput::new(
            &d,
            vec![parse_poly("x", &ring).unwrap(), parse_poly("y", &ring).unwrap()],
            parse_poly("y", &ring).unwrap(),
        )
        .unwrap();
        assert!(matches!(modify(&bad), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn localization_identifies_both_sides() {
        let input = slice_input();
        let aring = input.derivation().algebra().ring();
        let lring = aring.extend(&["#inv"]);
        let z = Poly::var(&lring, aring.nvars());
        let lgens = vec![&(&input.divisor().embed(&lring).unwrap() * &z) - &Poly::one(&lring)];
        let lideal = Ideal::new(&lring, lgens, MonomialOrder::degrevlex(lring.nvars()));
        // the modified generators, with the inverse adjoined, reach every
        // base generator, and conversely
        let mut modified_side: Vec<(String, Poly)> = vec![
            ("x".into(), Poly::var(&lring, 0)),
            ("y".into(), Poly::var(&lring, 1)),
            ("t1".into(), &parse_poly("x", aring).unwrap().embed(&lring).unwrap() * &z),
            ("t2".into(), &parse_poly("y", aring).unwrap().embed(&lring).unwrap() * &z),
        ];
        modified_side.push(("w".into(), z.clone()));
        let base_side: Vec<(String, Poly)> = vec![
            ("x".into(), Poly::var(&lring, 0)),
            ("y".into(), Poly::var(&lring, 1)),
            ("w".into(), z.clone()),
        ];
        for (_, p) in &base_side {
            assert!(groebner::subalgebra_member(p, &modified_side, &lideal).unwrap().is_some());
        }
        for (_, p) in &modified_side {
            assert!(groebner::subalgebra_member(p, &base_side, &lideal).unwrap().is_some());
        }
    }

    #[test]
    fn modification_composes() {
        let input = slice_input();
        let first = modify(&input).unwrap();
        let ring = first.algebra.ring().clone();
        let second_input = ModificationInput::new(
            &first.derivation,
            vec![parse_poly("x", &ring).unwrap(), parse_poly("x*t2", &ring).unwrap()],
            parse_poly("x", &ring).unwrap(),
        )
        .unwrap();
        assert!(check_invariants(&second_input).unwrap().passes());
        let second = modify(&second_input).unwrap();
        // t-names are taken, so the fallback prefix kicks in
        assert_eq!(second.adjoined, ["s1", "s2"]);
        assert!(second.derivation.is_validated_nilpotent());
    }

    #[test]
    fn graded_center_of_the_slice() {
        let input = slice_input();
        let (pres, _) = rees::rees_algorithm(input.derivation(), rees::DEFAULT_MAX_ITER).unwrap();
        let values: Vec<String> = graded_center_values(&input, &pres)
            .unwrap()
            .iter()
            .map(Poly::to_string)
            .collect();
        assert_eq!(values, ["y*upsilon", "x"]);
    }

    #[test]
    fn lemma_holds_on_the_blowup_chart() {
        let input = slice_input();
        assert!(verify_rees_modification(&input, rees::DEFAULT_MAX_ITER).unwrap());
    }

    #[test]
    fn lemma_holds_on_a_principal_center() {
        let d = derivation(&["x", "y"], &[], &["0", "x"]);
        let ring = d.algebra().ring().clone();
        let input =
            ModificationInput::new(&d, vec![parse_poly("x", &ring).unwrap()], parse_poly("x", &ring).unwrap())
                .unwrap();
        assert!(verify_rees_modification(&input, rees::DEFAULT_MAX_ITER).unwrap());
    }

    #[test]
    fn lemma_holds_on_sl2() {
        let input = sl2_input();
        assert!(verify_rees_modification(&input, rees::DEFAULT_MAX_ITER).unwrap());
    }
}
