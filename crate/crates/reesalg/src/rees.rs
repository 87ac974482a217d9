//! Graded presentations of the filtration algebra of a locally nilpotent
//! derivation.
//!
//! For a validated derivation D on A with filtration F_n = Ker D^(n+1), the
//! subalgebra R = sum_n F_n * upsilon^n of A[upsilon] is finitely generated.
//! This module finds generators for R by fixed-point iteration, presents R by
//! an e-homogeneous relation ideal, and derives the specializations at
//! upsilon = 0 (the associated graded algebra) and upsilon = 1 (A itself).

use std::collections::BTreeMap;

use crate::groebner::{self, Ideal, RingMap};
use crate::lnd::{Derivation, QuotientAlgebra};
use crate::poly::{rat, Monomial, MonomialOrder, Poly, Ring, RingRef, WeightVector};
use crate::{Error, Result};

/// Iteration cap for the generator search.
pub const DEFAULT_MAX_ITER: u32 = 32;

/// Reserved name of the distinguished degree-one generator.
pub const UPSILON: &str = "upsilon";

/// One generator a * upsilon^w of the graded subalgebra: an element of A
/// placed at a filtration level it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedGenerator {
    /// Element of A, kept in normal form.
    pub element: Poly,
    /// Power of upsilon attached; must be a filtration level of `element`.
    pub weight: u32,
    /// Variable name in the presentation ring.
    pub label: String,
}

impl GradedGenerator {
    pub fn new(element: Poly, weight: u32, label: impl Into<String>) -> GradedGenerator {
        GradedGenerator { element, weight, label: label.into() }
    }

    fn is_upsilon(&self) -> bool {
        self.label == UPSILON
    }
}

/// The distinguished generator 1 * upsilon.
pub fn upsilon_generator(algebra: &QuotientAlgebra) -> GradedGenerator {
    GradedGenerator::new(Poly::one(algebra.ring()), 1, UPSILON)
}

/// A finite presentation of R = sum_n F_n * upsilon^n.
///
/// The presentation ring has one variable per generator, named by its label,
/// and the relation ideal is reduced under the weighted-lex order for the
/// generator weights, so equal presentations print identically.
#[derive(Debug, Clone)]
pub struct ReesPresentation {
    derivation: Derivation,
    generators: Vec<GradedGenerator>,
    ring: RingRef,
    weights: WeightVector,
    relations: Ideal,
}

impl ReesPresentation {
    /// Builds the presentation on an explicit generator list.
    ///
    /// The list must contain the upsilon generator exactly once, labels must
    /// be distinct, and every element must lie in the filtration level given
    /// by its weight. Elements are brought to normal form; the relation ideal
    /// is computed. Generator order is kept as given.
    pub fn assemble(
        derivation: &Derivation,
        generators: Vec<GradedGenerator>,
    ) -> Result<ReesPresentation> {
        assert!(
            derivation.is_validated_nilpotent(),
            "presentation requires a validated locally nilpotent derivation"
        );
        let algebra = derivation.algebra();
        let mut seen = std::collections::BTreeSet::new();
        let mut upsilons = 0usize;
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if !seen.insert(g.label.clone()) {
                return Err(Error::InvalidInput(format!("duplicate generator label `{}`", g.label)));
            }
            let element = algebra.normal_form(&g.element)?;
            if g.is_upsilon() {
                upsilons += 1;
                if element != Poly::one(algebra.ring()) || g.weight != 1 {
                    return Err(Error::InvalidInput(
                        "the upsilon generator must be 1 at weight 1".to_string(),
                    ));
                }
            } else if element.is_zero() {
                return Err(Error::InvalidInput(format!("generator `{}` is zero", g.label)));
            }
            if !derivation.in_filtration(&element, g.weight)? {
                return Err(Error::NotInFiltration {
                    element: element.to_string(),
                    level: g.weight,
                });
            }
            gens.push(GradedGenerator::new(element, g.weight, g.label));
        }
        if upsilons != 1 {
            return Err(Error::InvalidInput(
                "the generator list must contain `upsilon` exactly once".to_string(),
            ));
        }
        let relations = presentation_relations(derivation, &gens)?;
        let ring = relations.ring().clone();
        let weights = weight_vector(&gens);
        Ok(ReesPresentation { derivation: derivation.clone(), generators: gens, ring, weights, relations })
    }

    pub fn algebra(&self) -> &QuotientAlgebra {
        self.derivation.algebra()
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn generators(&self) -> &[GradedGenerator] {
        &self.generators
    }

    /// The presentation ring, one variable per generator label.
    pub fn presentation_ring(&self) -> &RingRef {
        &self.ring
    }

    /// Generator weights, indexed like the presentation ring.
    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// The e-homogeneous relation ideal in the presentation ring.
    pub fn relations(&self) -> &Ideal {
        &self.relations
    }

    pub fn generator(&self, label: &str) -> Option<&GradedGenerator> {
        self.generators.iter().find(|g| g.label == label)
    }

    /// Position of the upsilon generator.
    pub fn upsilon_index(&self) -> usize {
        self.generators
            .iter()
            .position(GradedGenerator::is_upsilon)
            .expect("assembled presentation contains upsilon")
    }

    /// The generators' values inside A[upsilon].
    pub fn upsilon_values(&self) -> Result<UpsilonModel> {
        let (ring, upsilon, defining) = upsilon_model(&self.derivation)?;
        let values = self
            .generators
            .iter()
            .map(|g| phi_image(g, &ring, upsilon))
            .collect::<Result<Vec<_>>>()?;
        Ok(UpsilonModel { ring, upsilon, defining, values })
    }
}

/// A[upsilon] together with the images of a presentation's generators.
#[derive(Debug, Clone)]
pub struct UpsilonModel {
    pub ring: RingRef,
    /// Index of the upsilon variable.
    pub upsilon: usize,
    /// Defining ideal of A carried into A[upsilon].
    pub defining: Ideal,
    /// For each generator, element * upsilon^weight.
    pub values: Vec<Poly>,
}

/// A[upsilon] with the defining ideal of A carried over. The returned index
/// is the upsilon variable.
fn upsilon_model(derivation: &Derivation) -> Result<(RingRef, usize, Ideal)> {
    let aring = derivation.algebra().ring();
    if aring.var_index(UPSILON).is_some() {
        return Err(Error::InvalidInput(format!("variable name `{UPSILON}` is reserved")));
    }
    let ring = aring.extend(&[UPSILON]);
    let ups = aring.nvars();
    let gens = derivation
        .algebra()
        .defining_ideal()
        .generators()
        .iter()
        .map(|g| g.embed(&ring))
        .collect::<Result<Vec<_>>>()?;
    let order = MonomialOrder::degrevlex(ring.nvars());
    let ideal = Ideal::new(&ring, gens, order);
    Ok((ring, ups, ideal))
}

/// The generator's value in A[upsilon]: element * upsilon^weight.
fn phi_image(g: &GradedGenerator, ring: &RingRef, ups: usize) -> Result<Poly> {
    Ok(g.element.embed(ring)?.mul_term(&Monomial::var(ups).pow(g.weight), &rat(1)))
}

fn presentation_ring(gens: &[GradedGenerator]) -> RingRef {
    let labels: Vec<&str> = gens.iter().map(|g| g.label.as_str()).collect();
    Ring::new(&labels)
}

fn weight_vector(gens: &[GradedGenerator]) -> WeightVector {
    WeightVector::new(gens.iter().map(|g| u64::from(g.weight)).collect())
}

fn check_homogeneous(ideal: &Ideal, weights: &WeightVector) -> Result<()> {
    for g in ideal.reduced_gb()? {
        if !g.is_homogeneous(weights) {
            return Err(Error::Inconsistency(format!(
                "relation `{}` is not homogeneous for the generator weights",
                g
            )));
        }
    }
    Ok(())
}

/// The relation ideal of the generators: the kernel of label -> element *
/// upsilon^weight into A[upsilon], reduced under the weighted-lex order for
/// the generator weights. Always e-homogeneous; verified on the way out.
pub fn presentation_relations(
    derivation: &Derivation,
    generators: &[GradedGenerator],
) -> Result<Ideal> {
    let (uring, ups, uideal) = upsilon_model(derivation)?;
    let source = presentation_ring(generators);
    let images = generators
        .iter()
        .map(|g| phi_image(g, &uring, ups))
        .collect::<Result<Vec<_>>>()?;
    let map = RingMap::new(&source, uideal, images)?;
    let kernel = groebner::ringmap_kernel(&map)?;
    let weights = weight_vector(generators);
    let order = MonomialOrder::WDegLex(weights.clone());
    let relations = Ideal::new(&source, kernel.generators().to_vec(), order);
    check_homogeneous(&relations, &weights)?;
    Ok(relations)
}

/// Top divided power of `a` at filtration level `n`: D^n(a) / n!, the leading
/// coefficient of the shifted exponential flow. Errors unless a lies in F_n.
///
/// For fixed n this is multiplicative across filtration levels and vanishes
/// exactly on F_(n-1), so its kernel recovers the previous filtration step.
pub fn sigma(derivation: &Derivation, a: &Poly, n: u32) -> Result<Poly> {
    if !derivation.in_filtration(a, n)? {
        let element = derivation.algebra().normal_form(a)?.to_string();
        return Err(Error::NotInFiltration { element, level: n });
    }
    derivation.divided_power(a, n)
}

/// Kernel of the top-degree evaluation of the generators.
///
/// Each generator is sent to sigma(element, weight) * h^weight in A[h], where
/// h is a fresh degree-one variable; upsilon is sent to zero. The kernel is
/// homogeneous for the generator weights, and its generators are the
/// candidates from which new subalgebra generators are extracted.
pub fn graded_kernel(derivation: &Derivation, generators: &[GradedGenerator]) -> Result<Ideal> {
    let aring = derivation.algebra().ring();
    let hring = aring.extend(&["#h"]);
    let h = aring.nvars();
    let defining = derivation
        .algebra()
        .defining_ideal()
        .generators()
        .iter()
        .map(|g| g.embed(&hring))
        .collect::<Result<Vec<_>>>()?;
    let target = Ideal::new(&hring, defining, MonomialOrder::degrevlex(hring.nvars()));
    let source = presentation_ring(generators);
    let mut images = Vec::with_capacity(generators.len());
    for g in generators {
        if g.is_upsilon() {
            images.push(Poly::zero(&hring));
        } else {
            let top = sigma(derivation, &g.element, g.weight)?;
            images.push(top.embed(&hring)?.mul_term(&Monomial::var(h).pow(g.weight), &rat(1)));
        }
    }
    let map = RingMap::new(&source, target, images)?;
    let kernel = groebner::ringmap_kernel(&map)?;
    check_homogeneous(&kernel, &weight_vector(generators))?;
    Ok(kernel)
}

/// What became of one candidate read off the graded kernel.
#[derive(Debug, Clone)]
pub enum CandidateOutcome {
    /// The candidate's value in A[upsilon] is already zero.
    MapsToZero { candidate: Poly },
    /// The extracted element is expressible in the current generators.
    AlreadyPresent { candidate: Poly, element: Poly, weight: u32 },
    /// The extracted element enlarges the subalgebra and was added.
    Added { candidate: Poly, generator: GradedGenerator },
}

/// One iteration of the generator search.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub outcomes: Vec<CandidateOutcome>,
}

impl IterationRecord {
    pub fn added_count(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| matches!(o, CandidateOutcome::Added { .. }))
            .count()
    }
}

/// Full log of the generator search.
#[derive(Debug, Clone, Default)]
pub struct AlgorithmTrace {
    pub iterations: Vec<IterationRecord>,
    pub stabilized: bool,
}

impl AlgorithmTrace {
    /// One line per event, suitable for reports and error payloads.
    pub fn render_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for (i, it) in self.iterations.iter().enumerate() {
            lines.push(format!("iteration {}: {} candidate(s)", i + 1, it.outcomes.len()));
            for outcome in &it.outcomes {
                lines.push(match outcome {
                    CandidateOutcome::MapsToZero { candidate } => {
                        format!("  {candidate}: maps to zero")
                    }
                    CandidateOutcome::AlreadyPresent { candidate, element, weight } => {
                        format!("  {candidate}: value {element} (weight {weight}) already expressible")
                    }
                    CandidateOutcome::Added { candidate, generator } => format!(
                        "  {candidate}: new generator {} = {} (weight {})",
                        generator.label, generator.element, generator.weight
                    ),
                });
            }
            lines.push(format!("  added {} generator(s)", it.added_count()));
        }
        if self.stabilized {
            lines.push("stabilized".to_string());
        }
        lines
    }
}

/// One pass of the generator search.
///
/// Computes the graded kernel of the current generators, evaluates each
/// kernel generator in A[upsilon], divides the value by upsilon, and keeps
/// the results that enlarge the subalgebra, at their nil degree and monic
/// under degree-reverse-lex. New generators are labelled g1, g2, ... using
/// `next_label`, which persists across iterations.
pub fn rees_step(
    derivation: &Derivation,
    generators: &[GradedGenerator],
    next_label: &mut u32,
) -> Result<(IterationRecord, Vec<GradedGenerator>)> {
    let algebra = derivation.algebra();
    let aring = algebra.ring();
    let bound = derivation.nilpotency_bound_used();
    let (uring, ups, uideal) = upsilon_model(derivation)?;
    let kernel = graded_kernel(derivation, generators)?;
    let phi: Vec<Poly> = generators
        .iter()
        .map(|g| phi_image(g, &uring, ups))
        .collect::<Result<Vec<_>>>()?;
    let bindings: BTreeMap<usize, Poly> = phi.iter().cloned().enumerate().collect();
    let mut labeled: Vec<(String, Poly)> = generators
        .iter()
        .zip(&phi)
        .map(|(g, p)| (g.label.clone(), p.clone()))
        .collect();
    let mut outcomes = Vec::new();
    let mut added = Vec::new();
    for q in kernel.reduced_gb()? {
        let value = groebner::normal_form(&q.substitute(&uring, &bindings)?, &uideal)?;
        if value.is_zero() {
            outcomes.push(CandidateOutcome::MapsToZero { candidate: q.clone() });
            continue;
        }
        let parts = value.decompose_by_var(ups);
        if parts.len() != 1 {
            return Err(Error::Inconsistency(format!(
                "kernel candidate `{q}` evaluates with mixed upsilon degrees"
            )));
        }
        let (&n, part) = parts.iter().next().expect("nonzero value has a part");
        if n == 0 {
            return Err(Error::Inconsistency(format!(
                "kernel candidate `{q}` does not vanish at upsilon = 0"
            )));
        }
        let element = algebra.normal_form(&part.map_vars(aring, |i| i))?;
        debug_assert!(!element.is_zero());
        let weight = derivation.nil_degree(&element, bound)?;
        if weight >= n {
            return Err(Error::Inconsistency(format!(
                "extracted element `{element}` has nil degree {weight}, too high for upsilon degree {n}"
            )));
        }
        let element = element.monic(&MonomialOrder::degrevlex(aring.nvars()));
        let probe = element.embed(&uring)?.mul_term(&Monomial::var(ups).pow(weight), &rat(1));
        if groebner::subalgebra_member(&probe, &labeled, &uideal)?.is_some() {
            outcomes.push(CandidateOutcome::AlreadyPresent { candidate: q.clone(), element, weight });
        } else {
            let label = loop {
                let candidate = format!("g{next_label}");
                *next_label += 1;
                if labeled.iter().all(|(l, _)| *l != candidate) {
                    break candidate;
                }
            };
            let generator = GradedGenerator::new(element, weight, label);
            labeled.push((generator.label.clone(), phi_image(&generator, &uring, ups)?));
            outcomes.push(CandidateOutcome::Added { candidate: q.clone(), generator: generator.clone() });
            added.push(generator);
        }
    }
    Ok((IterationRecord { outcomes }, added))
}

// Presentation order: weight ascending; within a weight, ring variables in
// declaration order, then discovered generators in discovery order, then
// upsilon.
type SortKey = (u32, u8, u32);

fn initial_keyed(derivation: &Derivation) -> Result<Vec<(SortKey, GradedGenerator)>> {
    let algebra = derivation.algebra();
    let aring = algebra.ring();
    let degrees = derivation.variable_nil_degrees(derivation.nilpotency_bound_used())?;
    let mut keyed = Vec::with_capacity(aring.nvars() + 1);
    for (i, name) in aring.var_names().iter().enumerate() {
        let element = algebra.normal_form(&Poly::var(aring, i))?;
        keyed.push(((degrees[i], 0, i as u32), GradedGenerator::new(element, degrees[i], name)));
    }
    keyed.push(((1, 2, 0), upsilon_generator(algebra)));
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed)
}

/// The starting generators of the search: the ring variables at their nil
/// degrees, plus upsilon, in presentation order.
pub fn initial_generators(derivation: &Derivation) -> Result<Vec<GradedGenerator>> {
    Ok(initial_keyed(derivation)?.into_iter().map(|(_, g)| g).collect())
}

/// Runs the generator search to stabilization.
///
/// Starts from `initial_generators` and repeats `rees_step` until an
/// iteration adds nothing, then assembles the presentation. Fails with
/// `NonTermination` carrying the rendered partial trace if `max_iter`
/// iterations do not stabilize.
pub fn rees_algorithm(
    derivation: &Derivation,
    max_iter: u32,
) -> Result<(ReesPresentation, AlgorithmTrace)> {
    assert!(
        derivation.is_validated_nilpotent(),
        "generator search requires a validated locally nilpotent derivation"
    );
    let mut keyed = initial_keyed(derivation)?;
    let mut trace = AlgorithmTrace::default();
    let mut next_label = 1u32;
    let mut discovered = 0u32;
    for _ in 0..max_iter {
        let gens: Vec<GradedGenerator> = keyed.iter().map(|(_, g)| g.clone()).collect();
        let (record, added) = rees_step(derivation, &gens, &mut next_label)?;
        let stable = added.is_empty();
        trace.iterations.push(record);
        for g in added {
            keyed.push(((g.weight, 1, discovered), g));
            discovered += 1;
        }
        keyed.sort_by_key(|(k, _)| *k);
        if stable {
            trace.stabilized = true;
            let gens = keyed.into_iter().map(|(_, g)| g).collect();
            let presentation = ReesPresentation::assemble(derivation, gens)?;
            return Ok((presentation, trace));
        }
    }
    Err(Error::NonTermination { max_iter, partial_trace: trace.render_lines() })
}

/// The associated graded algebra: the presentation with upsilon set to zero
/// and removed.
///
/// The derivation induces a degree -1 map on the result; its action is
/// reported on generators as `shifted_images` and not analysed further.
#[derive(Debug, Clone)]
pub struct AssociatedGraded {
    pub ring: RingRef,
    pub weights: WeightVector,
    pub generators: Vec<GradedGenerator>,
    pub relations: Ideal,
    /// For each generator label, the derivation applied to its element.
    pub shifted_images: Vec<(String, Poly)>,
}

pub fn associated_graded(presentation: &ReesPresentation) -> Result<AssociatedGraded> {
    let ups = presentation.upsilon_index();
    let kept: Vec<&GradedGenerator> = presentation
        .generators()
        .iter()
        .filter(|g| !g.is_upsilon())
        .collect();
    let labels: Vec<&str> = kept.iter().map(|g| g.label.as_str()).collect();
    let ring = Ring::new(&labels);
    let weights = WeightVector::new(kept.iter().map(|g| u64::from(g.weight)).collect());
    let zero = Poly::zero(presentation.presentation_ring());
    let down = |i: usize| if i < ups { i } else { i - 1 };
    let relations: Vec<Poly> = presentation
        .relations()
        .reduced_gb()?
        .iter()
        .map(|r| r.substitute_var(ups, &zero).map_vars(&ring, down))
        .filter(|r| !r.is_zero())
        .collect();
    let relations = Ideal::new(&ring, relations, MonomialOrder::WDegLex(weights.clone()));
    check_homogeneous(&relations, &weights)?;
    let shifted_images = kept
        .iter()
        .map(|g| Ok((g.label.clone(), presentation.derivation().apply(&g.element)?)))
        .collect::<Result<Vec<_>>>()?;
    let generators = kept.into_iter().cloned().collect();
    Ok(AssociatedGraded { ring, weights, generators, relations, shifted_images })
}

/// The presentation with upsilon set to one, together with a verdict that it
/// presents A itself.
#[derive(Debug, Clone)]
pub struct Dehomogenized {
    pub ring: RingRef,
    pub generators: Vec<GradedGenerator>,
    pub relations: Ideal,
    /// True when the specialized relations are exactly the kernel of
    /// evaluating labels at their elements, and every ring variable of A is
    /// expressible in the generators.
    pub verdict: bool,
}

pub fn specialize_upsilon_one(presentation: &ReesPresentation) -> Result<Dehomogenized> {
    let derivation = presentation.derivation();
    let algebra = derivation.algebra();
    let aring = algebra.ring();
    let ups = presentation.upsilon_index();
    let kept: Vec<&GradedGenerator> = presentation
        .generators()
        .iter()
        .filter(|g| !g.is_upsilon())
        .collect();
    let labels: Vec<&str> = kept.iter().map(|g| g.label.as_str()).collect();
    let ring = Ring::new(&labels);
    let weights = WeightVector::new(kept.iter().map(|g| u64::from(g.weight)).collect());
    let order = MonomialOrder::WDegLex(weights);
    let one = Poly::one(presentation.presentation_ring());
    let down = |i: usize| if i < ups { i } else { i - 1 };
    let substituted: Vec<Poly> = presentation
        .relations()
        .reduced_gb()?
        .iter()
        .map(|r| r.substitute_var(ups, &one).map_vars(&ring, down))
        .filter(|r| !r.is_zero())
        .collect();
    let relations = Ideal::new(&ring, substituted, order.clone());
    let images: Vec<Poly> = kept.iter().map(|g| g.element.clone()).collect();
    let map = RingMap::new(&ring, algebra.defining_ideal().clone(), images)?;
    let kernel = groebner::ringmap_kernel(&map)?;
    let kernel = Ideal::new(&ring, kernel.generators().to_vec(), order);
    let mut verdict = groebner::ideal_equal(&relations, &kernel)?;
    let labeled: Vec<(String, Poly)> = kept
        .iter()
        .map(|g| (g.label.clone(), g.element.clone()))
        .collect();
    for i in 0..aring.nvars() {
        if algebra.subalgebra_member(&Poly::var(aring, i), &labeled)?.is_none() {
            verdict = false;
        }
    }
    let generators = kept.into_iter().cloned().collect();
    Ok(Dehomogenized { ring, generators, relations, verdict })
}

/// Module generators of the filtration piece F_n over the weight-zero part:
/// normal forms of the monomials of total weight at most n in the
/// positive-weight generators, upsilon excluded, 1 included.
///
/// Sorted by weight, then by exponents on earlier generators; duplicates and
/// zeros are dropped.
pub fn degree_module_gens(presentation: &ReesPresentation, n: u32) -> Result<Vec<Poly>> {
    let algebra = presentation.algebra();
    let positive: Vec<&GradedGenerator> = presentation
        .generators()
        .iter()
        .filter(|g| g.weight > 0 && !g.is_upsilon())
        .collect();
    let mut tuples: Vec<(u32, Vec<u32>)> = vec![(0, Vec::new())];
    for g in &positive {
        let mut extended = Vec::new();
        for (w, t) in &tuples {
            let mut k = 0u32;
            loop {
                let weight = w + k * g.weight;
                if weight > n {
                    break;
                }
                let mut t = t.clone();
                t.push(k);
                extended.push((weight, t));
                k += 1;
            }
        }
        tuples = extended;
    }
    tuples.sort_by(|(wa, ta), (wb, tb)| wa.cmp(wb).then_with(|| tb.cmp(ta)));
    let mut out: Vec<Poly> = Vec::new();
    for (_, t) in tuples {
        let mut p = Poly::one(algebra.ring());
        for (g, &k) in positive.iter().zip(&t) {
            p = &p * &g.element.pow(k);
        }
        let p = algebra.normal_form(&p)?;
        if p.is_zero() || out.contains(&p) {
            continue;
        }
        debug_assert!(presentation.derivation().in_filtration(&p, n)?);
        out.push(p);
    }
    Ok(out)
}

/// The weight-zero generators: algebra generators of Ker D.
pub fn kernel_generators(presentation: &ReesPresentation) -> Vec<&GradedGenerator> {
    presentation.generators().iter().filter(|g| g.weight == 0).collect()
}

/// Drops generators expressible in the remaining ones.
///
/// Scans from the back of the presentation order; upsilon is never dropped.
/// Each drop is justified by an explicit membership witness, so the surviving
/// set generates the same subalgebra. Relations are recomputed.
pub fn prune_generators(presentation: &ReesPresentation) -> Result<ReesPresentation> {
    let derivation = presentation.derivation();
    let (uring, ups, uideal) = upsilon_model(derivation)?;
    let mut kept: Vec<GradedGenerator> = presentation.generators().to_vec();
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        if kept[i].is_upsilon() {
            continue;
        }
        let others: Vec<(String, Poly)> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| Ok((g.label.clone(), phi_image(g, &uring, ups)?)))
            .collect::<Result<Vec<_>>>()?;
        let probe = phi_image(&kept[i], &uring, ups)?;
        if groebner::subalgebra_member(&probe, &others, &uideal)?.is_some() {
            kept.remove(i);
        }
    }
    ReesPresentation::assemble(derivation, kept)
}

/// Deterministic description of Proj of the presentation: the weighted
/// projective ambient over the weight-zero part, the relations, the boundary
/// at upsilon = 0, and the affine chart at upsilon = 1.
pub fn proj_report(presentation: &ReesPresentation) -> Result<String> {
    let mut out = String::new();
    let base: Vec<&str> = presentation
        .generators()
        .iter()
        .filter(|g| g.weight == 0)
        .map(|g| g.label.as_str())
        .collect();
    let positive: Vec<String> = presentation
        .generators()
        .iter()
        .filter(|g| g.weight > 0)
        .map(|g| g.weight.to_string())
        .collect();
    out.push_str(&format!("ambient: P({})", positive.join(", ")));
    if base.is_empty() {
        out.push_str(" over k\n");
    } else {
        out.push_str(&format!(" over k[{}]\n", base.join(", ")));
    }
    let section = |out: &mut String, title: &str, gens: &[Poly], order: &MonomialOrder| {
        out.push_str(title);
        out.push('\n');
        if gens.is_empty() {
            out.push_str("  (0)\n");
        } else {
            for g in gens {
                out.push_str(&format!("  {}\n", g.format(order)));
            }
        }
    };
    let relations = presentation.relations();
    section(&mut out, "relations:", relations.reduced_gb()?, relations.order());
    let graded = associated_graded(presentation)?;
    section(
        &mut out,
        "boundary (upsilon = 0):",
        graded.relations.reduced_gb()?,
        graded.relations.order(),
    );
    let chart = specialize_upsilon_one(presentation)?;
    section(
        &mut out,
        "chart (upsilon = 1):",
        chart.relations.reduced_gb()?,
        chart.relations.order(),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_poly;
    use crate::lnd::DEFAULT_NILPOTENCY_BOUND;

    fn derivation(
        vars: &[&str],
        relations: &[&str],
        images: &[&str],
    ) -> Derivation {
        let ring = Ring::new(vars);
        let rels = relations.iter().map(|r| parse_poly(r, &ring).unwrap()).collect();
        let algebra = QuotientAlgebra::new(&ring, rels);
        let imgs = images.iter().map(|s| parse_poly(s, &ring).unwrap()).collect();
        Derivation::new(&algebra, imgs, DEFAULT_NILPOTENCY_BOUND).unwrap()
    }

    fn sl2() -> Derivation {
        derivation(&["x", "y", "u", "v"], &["x*v - y*u - 1"], &["0", "0", "x", "y"])
    }

    fn triangular() -> Derivation {
        derivation(&["x", "y", "z", "t"], &[], &["0", "x^2", "2*y", "0"])
    }

    fn danielewski() -> Derivation {
        derivation(&["x", "y", "z"], &["x*z - y^2 + 1"], &["0", "x", "2*y"])
    }

    fn polynomial_line() -> Derivation {
        derivation(&["t"], &[], &["1"])
    }

    fn labels(gens: &[GradedGenerator]) -> Vec<&str> {
        gens.iter().map(|g| g.label.as_str()).collect()
    }

    fn expect_ideal(ideal: &Ideal, gens: &[&str]) -> bool {
        let ring = ideal.ring().clone();
        let gens = gens.iter().map(|s| parse_poly(s, &ring).unwrap()).collect();
        let expected = Ideal::new(&ring, gens, ideal.order().clone());
        groebner::ideal_equal(ideal, &expected).unwrap()
    }

    #[test]
    fn sigma_rows() {
        let d = sl2();
        let ring = d.algebra().ring().clone();
        let s = |a: &str, n: u32| sigma(&d, &parse_poly(a, &ring).unwrap(), n);
        assert_eq!(s("u", 1).unwrap().to_string(), "x");
        assert_eq!(s("u*v", 2).unwrap().to_string(), "x*y");
        assert_eq!(s("x", 0).unwrap().to_string(), "x");
        // above the nil degree the divided power vanishes
        assert!(s("u", 2).unwrap().is_zero());
        // below it the element is rejected
        assert_eq!(
            s("u", 0),
            Err(Error::NotInFiltration { element: "u".to_string(), level: 0 })
        );
    }

    #[test]
    fn initial_generator_order() {
        let d = triangular();
        let gens = initial_generators(&d).unwrap();
        assert_eq!(labels(&gens), ["x", "t", "y", "upsilon", "z"]);
        let weights: Vec<u32> = gens.iter().map(|g| g.weight).collect();
        assert_eq!(weights, [0, 0, 1, 1, 2]);
    }

    #[test]
    fn graded_kernel_sl2_initial() {
        let d = sl2();
        let gens = initial_generators(&d).unwrap();
        let kernel = graded_kernel(&d, &gens).unwrap();
        assert_eq!(kernel.ring().var_names(), ["x", "y", "u", "v", "upsilon"]);
        assert!(expect_ideal(&kernel, &["upsilon", "x*v - y*u"]));
        let weights = WeightVector::new(vec![0, 0, 1, 1, 1]);
        for g in kernel.reduced_gb().unwrap() {
            assert!(g.is_homogeneous(&weights));
        }
    }

    #[test]
    fn graded_kernel_images_vanish() {
        // substituting the defining images into each kernel generator gives
        // zero in A[#h]
        let d = sl2();
        let gens = initial_generators(&d).unwrap();
        let kernel = graded_kernel(&d, &gens).unwrap();
        let aring = d.algebra().ring();
        let hring = aring.extend(&["#h"]);
        let h = aring.nvars();
        let defining: Vec<Poly> = d
            .algebra()
            .defining_ideal()
            .generators()
            .iter()
            .map(|g| g.embed(&hring).unwrap())
            .collect();
        let target = Ideal::new(&hring, defining, MonomialOrder::degrevlex(hring.nvars()));
        let images: BTreeMap<usize, Poly> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let img = if g.label == UPSILON {
                    Poly::zero(&hring)
                } else {
                    let top = sigma(&d, &g.element, g.weight).unwrap();
                    top.embed(&hring)
                        .unwrap()
                        .mul_term(&Monomial::var(h).pow(g.weight), &rat(1))
                };
                (i, img)
            })
            .collect();
        for q in kernel.reduced_gb().unwrap() {
            let value = q.substitute(&hring, &images).unwrap();
            assert!(groebner::normal_form(&value, &target).unwrap().is_zero());
        }
    }

    #[test]
    fn rees_step_sl2_adds_nothing() {
        let d = sl2();
        let gens = initial_generators(&d).unwrap();
        let mut next = 1;
        let (record, added) = rees_step(&d, &gens, &mut next).unwrap();
        assert!(added.is_empty());
        assert_eq!(record.outcomes.len(), 2);
        assert_eq!(record.added_count(), 0);
    }

    #[test]
    fn rees_step_triangular_finds_the_invariant() {
        let d = triangular();
        let gens = initial_generators(&d).unwrap();
        let mut next = 1;
        let (_, added) = rees_step(&d, &gens, &mut next).unwrap();
        assert_eq!(added.len(), 1);
        assert_eq!(added[0].label, "g1");
        assert_eq!(added[0].weight, 0);
        assert_eq!(added[0].element.to_string(), "x^2*z - y^2");
    }

    #[test]
    fn algorithm_polynomial_line() {
        let d = polynomial_line();
        let (pres, trace) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.stabilized);
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(labels(pres.generators()), ["t", "upsilon"]);
        assert_eq!(pres.weights().weights(), [1, 1]);
        assert!(pres.relations().reduced_gb().unwrap().is_empty());
    }

    #[test]
    fn algorithm_sl2() {
        let d = sl2();
        let (pres, trace) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.stabilized);
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(labels(pres.generators()), ["x", "y", "u", "v", "upsilon"]);
        assert_eq!(pres.weights().weights(), [0, 0, 1, 1, 1]);
        let gb = pres.relations().reduced_gb().unwrap();
        assert_eq!(gb.len(), 1);
        assert_eq!(gb[0].format(pres.relations().order()), "x*v - y*u - upsilon");
    }

    #[test]
    fn algorithm_danielewski() {
        let d = danielewski();
        let (pres, trace) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.stabilized);
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(labels(pres.generators()), ["x", "y", "upsilon", "z"]);
        assert_eq!(pres.weights().weights(), [0, 1, 1, 2]);
        let gb = pres.relations().reduced_gb().unwrap();
        assert_eq!(gb.len(), 1);
        assert_eq!(gb[0].format(pres.relations().order()), "x*z - y^2 + upsilon^2");
    }

    #[test]
    fn algorithm_triangular() {
        let d = triangular();
        let (pres, trace) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.stabilized);
        assert_eq!(trace.iterations.len(), 2);
        assert_eq!(labels(pres.generators()), ["x", "t", "g1", "y", "upsilon", "z"]);
        assert_eq!(pres.weights().weights(), [0, 0, 0, 1, 1, 2]);
        assert_eq!(pres.generator("g1").unwrap().element.to_string(), "x^2*z - y^2");
        let gb = pres.relations().reduced_gb().unwrap();
        assert_eq!(gb.len(), 1);
        assert_eq!(
            gb[0].format(pres.relations().order()),
            "x^2*z - g1*upsilon^2 - y^2"
        );
    }

    #[test]
    fn algorithm_threefold() {
        let d = derivation(
            &["x", "y", "w1", "w2", "w3"],
            &["x*w2 - y^2*w1 - y", "y*w3 - w1*w2", "x*w3 - y*w1^2 - w1"],
            &["0", "0", "x", "y^2", "2*y*w1 + 1"],
        );
        let (pres, trace) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.stabilized);
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(labels(pres.generators()), ["x", "y", "w1", "w2", "upsilon", "w3"]);
        assert_eq!(pres.weights().weights(), [0, 0, 1, 1, 1, 2]);
        assert!(expect_ideal(
            pres.relations(),
            &[
                "x*w2 - y^2*w1 - y*upsilon",
                "y*w3 - w1*w2",
                "x*w3 - y*w1^2 - w1*upsilon",
            ]
        ));
    }

    #[test]
    fn algorithm_winkelmann() {
        let d = derivation(
            &["u", "v", "x", "y", "z"],
            &[],
            &["0", "0", "u", "v", "1 + x*v - y*u"],
        );
        let (pres, trace) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        assert!(trace.stabilized);
        assert_eq!(trace.iterations.len(), 3);
        assert_eq!(
            labels(pres.generators()),
            ["u", "v", "g1", "g2", "g3", "x", "y", "z", "upsilon"]
        );
        assert_eq!(pres.generator("g1").unwrap().element.to_string(), "v*x - u*y");
        assert_eq!(
            pres.generator("g2").unwrap().element.to_string(),
            "v*x*y - u*y^2 - v*z + y"
        );
        assert_eq!(
            pres.generator("g3").unwrap().element.to_string(),
            "v*x^2 - u*x*y - u*z + x"
        );
        let kernel = kernel_generators(&pres);
        assert_eq!(
            kernel.iter().map(|g| g.label.as_str()).collect::<Vec<_>>(),
            ["u", "v", "g1", "g2", "g3"]
        );
        assert!(expect_ideal(
            pres.relations(),
            &[
                "u*y - v*x + g1*upsilon",
                "u*z - x - x*g1 + g3*upsilon",
                "v*z - y - y*g1 + g2*upsilon",
                "v*g3 - u*g2 - g1^2 - g1",
                "x*g2 - y*g3 + z*g1",
            ]
        ));
    }

    #[test]
    fn algorithm_reports_non_termination() {
        let d = triangular();
        match rees_algorithm(&d, 1) {
            Err(Error::NonTermination { max_iter, partial_trace }) => {
                assert_eq!(max_iter, 1);
                assert!(partial_trace.iter().any(|l| l.contains("new generator g1")));
            }
            other => panic!("expected non-termination, got {other:?}"),
        }
        match rees_algorithm(&d, 0) {
            Err(Error::NonTermination { max_iter, partial_trace }) => {
                assert_eq!(max_iter, 0);
                assert!(partial_trace.is_empty());
            }
            other => panic!("expected non-termination, got {other:?}"),
        }
    }

    #[test]
    fn algorithm_rejects_reserved_name() {
        let d = derivation(&["upsilon"], &[], &["0"]);
        assert!(matches!(
            rees_algorithm(&d, DEFAULT_MAX_ITER),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn stabilized_presentation_is_a_fixed_point() {
        let d = sl2();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let mut next = 100;
        let (_, added) = rees_step(&d, pres.generators(), &mut next).unwrap();
        assert!(added.is_empty());
    }

    #[test]
    fn associated_graded_rows() {
        let d = sl2();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let graded = associated_graded(&pres).unwrap();
        assert_eq!(graded.ring.var_names(), ["x", "y", "u", "v"]);
        assert!(expect_ideal(&graded.relations, &["x*v - y*u"]));
        let images: Vec<(&str, String)> = graded
            .shifted_images
            .iter()
            .map(|(l, p)| (l.as_str(), p.to_string()))
            .collect();
        assert_eq!(
            images,
            [("x", "0".to_string()), ("y", "0".to_string()), ("u", "x".to_string()), ("v", "y".to_string())]
        );

        let line = polynomial_line();
        let (pres, _) = rees_algorithm(&line, DEFAULT_MAX_ITER).unwrap();
        let graded = associated_graded(&pres).unwrap();
        assert_eq!(graded.ring.var_names(), ["t"]);
        assert!(graded.relations.reduced_gb().unwrap().is_empty());
    }

    #[test]
    fn specialization_at_one_recovers_the_algebra() {
        for d in [sl2(), danielewski(), triangular(), polynomial_line()] {
            let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
            let chart = specialize_upsilon_one(&pres).unwrap();
            assert!(chart.verdict);
        }
        let d = sl2();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let chart = specialize_upsilon_one(&pres).unwrap();
        assert_eq!(chart.ring.var_names(), ["x", "y", "u", "v"]);
        assert!(expect_ideal(&chart.relations, &["x*v - y*u - 1"]));
    }

    #[test]
    fn degree_module_rows() {
        let d = sl2();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let render = |n: u32| {
            degree_module_gens(&pres, n)
                .unwrap()
                .iter()
                .map(Poly::to_string)
                .collect::<Vec<_>>()
        };
        assert_eq!(render(0), ["1"]);
        assert_eq!(render(1), ["1", "u", "v"]);
        assert_eq!(render(2), ["1", "u", "v", "u^2", "u*v", "v^2"]);

        let d = danielewski();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let gens: Vec<String> = degree_module_gens(&pres, 2)
            .unwrap()
            .iter()
            .map(Poly::to_string)
            .collect();
        // y^2 reduces to x*z + 1 modulo the defining relation
        assert_eq!(gens, ["1", "y", "x*z + 1", "z"]);
    }

    #[test]
    fn kernel_generator_rows() {
        let d = triangular();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let kernel = kernel_generators(&pres);
        let rendered: Vec<String> = kernel.iter().map(|g| g.element.to_string()).collect();
        assert_eq!(rendered, ["x", "t", "x^2*z - y^2"]);
        for g in kernel {
            assert!(pres.derivation().apply(&g.element).unwrap().is_zero());
        }

        let d = polynomial_line();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        assert!(kernel_generators(&pres).is_empty());
    }

    #[test]
    fn prune_drops_expressible_generators() {
        let d = derivation(&["x", "t"], &[], &["0", "1"]);
        let ring = d.algebra().ring().clone();
        let gens = vec![
            GradedGenerator::new(parse_poly("x", &ring).unwrap(), 0, "x"),
            GradedGenerator::new(parse_poly("x^2", &ring).unwrap(), 0, "g1"),
            GradedGenerator::new(parse_poly("t", &ring).unwrap(), 1, "t"),
            upsilon_generator(d.algebra()),
        ];
        let pres = ReesPresentation::assemble(&d, gens).unwrap();
        let pruned = prune_generators(&pres).unwrap();
        assert_eq!(labels(pruned.generators()), ["x", "t", "upsilon"]);

        let d = sl2();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let pruned = prune_generators(&pres).unwrap();
        assert_eq!(labels(pruned.generators()), labels(pres.generators()));
    }

    #[test]
    fn assemble_validates_input() {
        let d = sl2();
        let ring = d.algebra().ring().clone();
        let x = parse_poly("x", &ring).unwrap();
        // missing upsilon
        assert!(matches!(
            ReesPresentation::assemble(&d, vec![GradedGenerator::new(x.clone(), 0, "x")]),
            Err(Error::InvalidInput(_))
        ));
        // duplicate label
        assert!(matches!(
            ReesPresentation::assemble(
                &d,
                vec![
                    GradedGenerator::new(x.clone(), 0, "x"),
                    GradedGenerator::new(x.clone(), 0, "x"),
                    upsilon_generator(d.algebra()),
                ]
            ),
            Err(Error::InvalidInput(_))
        ));
        // element outside the claimed filtration level
        let u = parse_poly("u", &ring).unwrap();
        match ReesPresentation::assemble(
            &d,
            vec![GradedGenerator::new(u, 0, "a"), upsilon_generator(d.algebra())],
        ) {
            Err(Error::NotInFiltration { element, level }) => {
                assert_eq!(element, "u");
                assert_eq!(level, 0);
            }
            other => panic!("expected a filtration failure, got {other:?}"),
        }
    }

    #[test]
    fn proj_report_sl2() {
        let d = sl2();
        let (pres, _) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
        let report = proj_report(&pres).unwrap();
        assert_eq!(
            report,
            "ambient: P(1, 1, 1) over k[x, y]\n\
             relations:\n  x*v - y*u - upsilon\n\
             boundary (upsilon = 0):\n  x*v - y*u\n\
             chart (upsilon = 1):\n  x*v - y*u - 1\n"
        );
    }

    #[test]
    fn runs_are_deterministic() {
        let d = triangular();
        let render = || {
            let (pres, trace) = rees_algorithm(&d, DEFAULT_MAX_ITER).unwrap();
            let mut lines = trace.render_lines();
            for g in pres.generators() {
                lines.push(format!("{} {} {}", g.label, g.weight, g.element));
            }
            for r in pres.relations().reduced_gb().unwrap() {
                lines.push(r.format(pres.relations().order()));
            }
            lines.join("\n")
        };
        assert_eq!(render(), render());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn sl2_poly() -> impl Strategy<Value = String> {
            let term = (0u32..3, 0u32..3, 0u32..3, 0u32..3, -4i64..5).prop_map(
                |(a, b, c, d, k)| format!("{k}*x^{a}*y^{b}*u^{c}*v^{d}"),
            );
            proptest::collection::vec(term, 1..3).prop_map(|ts| ts.join(" + "))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn sigma_is_multiplicative_at_nil_degrees(a in sl2_poly(), b in sl2_poly()) {
                let d = sl2();
                let ring = d.algebra().ring().clone();
                let algebra = d.algebra();
                let a = algebra.normal_form(&parse_poly(&a, &ring).unwrap()).unwrap();
                let b = algebra.normal_form(&parse_poly(&b, &ring).unwrap()).unwrap();
                prop_assume!(!a.is_zero() && !b.is_zero());
                let m = d.nil_degree(&a, 64).unwrap();
                let n = d.nil_degree(&b, 64).unwrap();
                let lhs = sigma(&d, &(&a * &b), m + n).unwrap();
                let rhs = &sigma(&d, &a, m).unwrap() * &sigma(&d, &b, n).unwrap();
                prop_assert_eq!(
                    algebra.normal_form(&lhs).unwrap(),
                    algebra.normal_form(&rhs).unwrap()
                );
            }

            #[test]
            fn sigma_vanishes_exactly_above_the_nil_degree(a in sl2_poly()) {
                let d = sl2();
                let ring = d.algebra().ring().clone();
                let a = d.algebra().normal_form(&parse_poly(&a, &ring).unwrap()).unwrap();
                prop_assume!(!a.is_zero());
                let m = d.nil_degree(&a, 64).unwrap();
                prop_assert!(!sigma(&d, &a, m).unwrap().is_zero());
                prop_assert!(sigma(&d, &a, m + 1).unwrap().is_zero());
            }
        }
    }
}
