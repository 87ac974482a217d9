//! Locally nilpotent derivations on presented algebras.
//!
//! A derivation is given by one image per ring variable and extends by the
//! Leibniz rule; every application reduces to normal form modulo the
//! defining ideal to keep representatives canonical. Validation is explicit:
//! well-definedness means the defining ideal is carried into itself, and
//! local nilpotency is semi-decided variable by variable under a bound.
//! Divided powers, the exponential with a formal parameter, and filtration
//! membership (does the (n+1)-st derivative vanish?) all live here.

use num_bigint::BigInt;
use num_traits::One;

use crate::groebner::{self, Ideal};
use crate::poly::{Monomial, MonomialOrder, Poly, Rational, RingRef, WeightVector};
use crate::{Error, Result};

/// Default iteration cap when establishing nilpotency.
pub const DEFAULT_NILPOTENCY_BOUND: u32 = 64;

/// A finitely presented commutative algebra: variables modulo relations.
#[derive(Debug, Clone)]
pub struct QuotientAlgebra {
    ring: RingRef,
    weights: Option<WeightVector>,
    defining: Ideal,
}

impl QuotientAlgebra {
    pub fn new(ring: &RingRef, relations: Vec<Poly>) -> QuotientAlgebra {
        let order = MonomialOrder::degrevlex(ring.nvars());
        QuotientAlgebra {
            ring: ring.clone(),
            weights: None,
            defining: Ideal::new(ring, relations, order),
        }
    }

    pub fn free(ring: &RingRef) -> QuotientAlgebra {
        QuotientAlgebra::new(ring, Vec::new())
    }

    pub fn with_weights(mut self, weights: WeightVector) -> QuotientAlgebra {
        assert_eq!(weights.len(), self.ring.nvars());
        self.weights = Some(weights);
        self
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn weights(&self) -> Option<&WeightVector> {
        self.weights.as_ref()
    }

    pub fn defining_ideal(&self) -> &Ideal {
        &self.defining
    }

    pub fn normal_form(&self, p: &Poly) -> Result<Poly> {
        groebner::normal_form(p, &self.defining)
    }

    /// Membership in the subalgebra generated by labeled elements; the
    /// witness is a polynomial in the labels evaluating to `g`.
    pub fn subalgebra_member(&self, g: &Poly, gens: &[(String, Poly)]) -> Result<Option<Poly>> {
        groebner::subalgebra_member(g, gens, &self.defining)
    }
}

/// Leibniz derivative of a polynomial representative, before reduction.
fn polynomial_derivative(ring: &RingRef, images: &[Poly], p: &Poly) -> Poly {
    let mut out = Poly::zero(ring);
    for (m, c) in p.terms() {
        for (v, e) in m.iter() {
            if images[v].is_zero() {
                continue;
            }
            let lowered = m
                .try_div(&Monomial::var(v))
                .expect("positive exponent is divisible");
            let factor = images[v].mul_term(&lowered, &(c * &Rational::from_integer(e.into())));
            out = &out + &factor;
        }
    }
    out
}

/// Confirms the defining ideal is mapped into itself: the derivative of each
/// defining relation must reduce to zero.
pub fn check_derivation(algebra: &QuotientAlgebra, images: &[Poly]) -> Result<()> {
    assert_eq!(images.len(), algebra.ring().nvars(), "one image per variable");
    let fmt_order = MonomialOrder::degrevlex(algebra.ring().nvars());
    for g in algebra.defining_ideal().generators() {
        let dg = polynomial_derivative(algebra.ring(), images, g);
        let nf = algebra.normal_form(&dg)?;
        if !nf.is_zero() {
            return Err(Error::NotWellDefined {
                relation: g.format(&fmt_order),
                image: nf.format(&fmt_order),
            });
        }
    }
    Ok(())
}

/// A derivation of a presented algebra, with its validation state.
#[derive(Debug, Clone)]
pub struct Derivation {
    algebra: QuotientAlgebra,
    images: Vec<Poly>,
    well_defined: bool,
    locally_nilpotent: bool,
    nilpotency_bound_used: u32,
}

impl Derivation {
    /// Fully validated constructor: checks well-definedness, then establishes
    /// local nilpotency variable by variable within the bound.
    pub fn new(algebra: &QuotientAlgebra, images: Vec<Poly>, bound: u32) -> Result<Derivation> {
        let mut d = Derivation::unvalidated(algebra, images)?;
        check_derivation(&d.algebra, &d.images)?;
        d.well_defined = true;
        d.variable_nil_degrees(bound)?;
        d.locally_nilpotent = true;
        d.nilpotency_bound_used = bound;
        Ok(d)
    }

    /// Stores normalized images without running any checks.
    pub fn unvalidated(algebra: &QuotientAlgebra, images: Vec<Poly>) -> Result<Derivation> {
        assert_eq!(images.len(), algebra.ring().nvars(), "one image per variable");
        let images = images
            .iter()
            .map(|p| {
                assert!(**p.ring() == **algebra.ring(), "image over a different registry");
                algebra.normal_form(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation {
            algebra: algebra.clone(),
            images,
            well_defined: false,
            locally_nilpotent: false,
            nilpotency_bound_used: 0,
        })
    }

    pub fn algebra(&self) -> &QuotientAlgebra {
        &self.algebra
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn image(&self, var: usize) -> &Poly {
        &self.images[var]
    }

    pub fn is_well_defined(&self) -> bool {
        self.well_defined
    }

    pub fn is_validated_nilpotent(&self) -> bool {
        self.locally_nilpotent
    }

    pub fn nilpotency_bound_used(&self) -> u32 {
        self.nilpotency_bound_used
    }

    /// One application of the derivation, reduced to normal form.
    pub fn apply(&self, a: &Poly) -> Result<Poly> {
        let d = polynomial_derivative(self.algebra.ring(), &self.images, a);
        self.algebra.normal_form(&d)
    }

    /// Minimal `n` with the `(n+1)`-st derivative vanishing, up to `bound`.
    pub fn nil_degree(&self, a: &Poly, bound: u32) -> Result<u32> {
        let mut cur = self.algebra.normal_form(a)?;
        if cur.is_zero() {
            return Ok(0);
        }
        for n in 0..=bound {
            cur = self.apply(&cur)?;
            if cur.is_zero() {
                return Ok(n);
            }
        }
        Err(Error::NilpotencyBound {
            element: a.format(&MonomialOrder::degrevlex(self.algebra.ring().nvars())),
            bound,
        })
    }

    /// Nil-degree of every ring variable, in declaration order.
    pub fn variable_nil_degrees(&self, bound: u32) -> Result<Vec<u32>> {
        (0..self.algebra.ring().nvars())
            .map(|v| self.nil_degree(&Poly::var(self.algebra.ring(), v), bound))
            .collect()
    }

    /// Semi-decision: do all variables reach a vanishing derivative within
    /// the bound? Nilpotency of the variables propagates to the whole
    /// algebra through the Leibniz rule.
    pub fn is_locally_nilpotent(&self, bound: u32) -> Result<bool> {
        match self.variable_nil_degrees(bound) {
            Ok(_) => Ok(true),
            Err(Error::NilpotencyBound { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Whether the `(n+1)`-st derivative of `a` vanishes.
    pub fn in_filtration(&self, a: &Poly, n: u32) -> Result<bool> {
        let mut cur = self.algebra.normal_form(a)?;
        for _ in 0..=n {
            if cur.is_zero() {
                return Ok(true);
            }
            cur = self.apply(&cur)?;
        }
        Ok(cur.is_zero())
    }

    /// The `i`-th divided power: `i`-th derivative divided by `i!`, exact.
    pub fn divided_power(&self, a: &Poly, i: u32) -> Result<Poly> {
        let mut cur = self.algebra.normal_form(a)?;
        for _ in 0..i {
            cur = self.apply(&cur)?;
        }
        Ok(cur.scale(&Rational::new(BigInt::one(), factorial(i))))
    }

    /// Expansion Σ (i-th divided power)·t^i in a freshly named parameter.
    ///
    /// The parameter gets the first free name among `t, s, r, q`; the result
    /// lives over the extended registry, retrievable via [`Poly::ring`].
    pub fn exp_t(&self, a: &Poly) -> Result<Poly> {
        let ring = self.algebra.ring();
        let name = ["t", "s", "r", "q"]
            .iter()
            .find(|n| ring.var_index(n).is_none())
            .expect("a parameter name is free");
        let extended = ring.extend(&[*name]);
        let param = extended.nvars() - 1;
        self.exp_in(a, &extended, param)
    }

    /// Expansion with a caller-supplied parameter variable.
    pub fn exp_in(&self, a: &Poly, target: &RingRef, param: usize) -> Result<Poly> {
        assert!(
            self.locally_nilpotent,
            "exponential requires validated local nilpotency"
        );
        let mut out = Poly::zero(target);
        let mut cur = self.algebra.normal_form(a)?;
        let mut i: u32 = 0;
        while !cur.is_zero() {
            let coeff = cur
                .embed(target)?
                .scale(&Rational::new(BigInt::one(), factorial(i)));
            out = &out + &coeff.mul_term(&Monomial::from_pairs(&[(param, i)]), &Rational::one());
            cur = self.apply(&cur)?;
            i += 1;
        }
        Ok(out)
    }
}

fn factorial(i: u32) -> BigInt {
    (1..=i).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
