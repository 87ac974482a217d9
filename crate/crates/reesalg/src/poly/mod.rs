//! Exact sparse multivariate polynomials over the rationals.
//!
//! Polynomials are stored in canonical form: a map from monomials to nonzero
//! coefficients over a shared variable registry. Equality is structural, so
//! two polynomials are equal exactly when they have the same terms. Weighted
//! degrees, homogenization, and substitution live here; term orders are in
//! [`order`], and everything downstream (Groebner bases, derivations, graded
//! presentations) builds on this module.

mod monomial;
mod order;
mod ring;

pub use monomial::Monomial;
pub use order::MonomialOrder;
pub use ring::{Ring, RingRef, WeightVector};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational coefficient: arbitrary precision, always reduced, positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a fraction; reduces and normalizes the sign.
pub fn ratq(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// A sparse polynomial with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    ring: RingRef,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(ring: &RingRef) -> Poly {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &RingRef) -> Poly {
        Poly::constant(ring, Rational::one())
    }

    pub fn constant(ring: &RingRef, c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn var(ring: &RingRef, index: usize) -> Poly {
        assert!(index < ring.nvars(), "variable index out of range");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(index), Rational::one());
        Poly { ring: ring.clone(), terms }
    }

    /// Variable by name; panics when undeclared (internal construction only).
    pub fn named_var(ring: &RingRef, name: &str) -> Poly {
        let index = ring
            .var_index(name)
            .unwrap_or_else(|| panic!("variable `{name}` not declared in {ring}"));
        Poly::var(ring, index)
    }

    /// Builds from terms, merging duplicates and dropping zeros.
    pub fn from_terms(ring: &RingRef, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Poly {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert!(m.max_var().map_or(true, |v| v < ring.nvars()));
            if c.is_zero() {
                continue;
            }
            match map.entry(m) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get() + &c;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Poly { ring: ring.clone(), terms: map }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in structural storage order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial, zero when absent.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant coefficient.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    fn assert_same_ring(&self, other: &Poly) {
        assert!(
            *self.ring == *other.ring,
            "mismatched variable registries: {} vs {}",
            self.ring,
            other.ring
        );
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Multiplies by a single term.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m), tc * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Largest term under the order, if any.
    pub fn leading(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    /// Scales so the leading coefficient under the order is one.
    pub fn monic(&self, order: &MonomialOrder) -> Poly {
        match self.leading(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Rational::one() / c;
                self.scale(&inv)
            }
        }
    }

    /// Weighted degree: maximum term weight, `None` for the zero polynomial.
    pub fn weighted_degree(&self, w: &WeightVector) -> Option<u64> {
        self.terms.keys().map(|m| w.monomial_weight(m)).max()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Degree in a single variable, `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exp(var)).max()
    }

    /// Whether all terms share one weighted degree. Zero is homogeneous.
    pub fn is_homogeneous(&self, w: &WeightVector) -> bool {
        let mut degrees = self.terms.keys().map(|m| w.monomial_weight(m));
        match degrees.next() {
            None => true,
            Some(first) => degrees.all(|d| d == first),
        }
    }

    /// Pads every term with powers of `hvar` up to the top weighted degree.
    ///
    /// Requires `hvar` to have weight one and not occur in the polynomial;
    /// substituting `hvar = 1` in the result recovers the input.
    pub fn homogenize(&self, w: &WeightVector, hvar: usize) -> Result<Poly> {
        if w.weight(hvar) != 1 {
            return Err(Error::InvalidInput(format!(
                "homogenization variable `{}` must have weight 1",
                self.ring.var_name(hvar)
            )));
        }
        if self.degree_in(hvar).unwrap_or(0) > 0 {
            return Err(Error::InvalidInput(format!(
                "homogenization variable `{}` occurs in the polynomial",
                self.ring.var_name(hvar)
            )));
        }
        let top = match self.weighted_degree(w) {
            None => return Ok(self.clone()),
            Some(d) => d,
        };
        let terms = self.terms.iter().map(|(m, c)| {
            let deficit = top - w.monomial_weight(m);
            let padded = m.mul(&Monomial::from_pairs(&[(hvar, deficit as u32)]));
            (padded, c.clone())
        });
        Ok(Poly::from_terms(&self.ring, terms))
    }

    /// Evaluates with each bound variable replaced by its image and every
    /// other variable carried over to `target` by name.
    pub fn substitute(&self, target: &RingRef, bindings: &BTreeMap<usize, Poly>) -> Result<Poly> {
        for image in bindings.values() {
            assert!(
                *image.ring == **target,
                "substitution image not over the target registry"
            );
        }
        // Carried variables resolve by name in the target registry.
        let mut carry: BTreeMap<usize, usize> = BTreeMap::new();
        for (m, _) in self.terms.iter() {
            for (var, _) in m.iter() {
                if bindings.contains_key(&var) || carry.contains_key(&var) {
                    continue;
                }
                let name = self.ring.var_name(var);
                match target.var_index(name) {
                    Some(t) => {
                        carry.insert(var, t);
                    }
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "variable `{name}` is not bound and not declared in the target registry"
                        )))
                    }
                }
            }
        }
        let mut acc = Poly::zero(target);
        for (m, c) in self.terms.iter() {
            let mut factor = Poly::constant(target, c.clone());
            for (var, exp) in m.iter() {
                let piece = match bindings.get(&var) {
                    Some(image) => image.pow(exp),
                    None => Poly::var(target, carry[&var]).pow(exp),
                };
                factor = &factor * &piece;
            }
            acc = &acc + &factor;
        }
        Ok(acc)
    }

    /// Carries the polynomial into another registry by variable name.
    pub fn embed(&self, target: &RingRef) -> Result<Poly> {
        self.substitute(target, &BTreeMap::new())
    }

    /// Reindexes variables into another registry; `f` maps old to new index.
    pub fn map_vars(&self, target: &RingRef, f: impl Fn(usize) -> usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.remap(&f), c.clone()));
        Poly::from_terms(target, terms)
    }

    /// Replaces one variable within the same registry.
    pub fn substitute_var(&self, var: usize, image: &Poly) -> Poly {
        let mut bindings = BTreeMap::new();
        bindings.insert(var, image.clone());
        self.substitute(&self.ring, &bindings)
            .expect("same-registry substitution cannot fail")
    }

    /// Splits as a polynomial in one variable: power of `var` to cofactor,
    /// cofactors free of `var`.
    pub fn decompose_by_var(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut parts: BTreeMap<u32, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let k = m.exp(var);
            let rest = m.filter(|v| v != var);
            parts.entry(k).or_default().push((rest, c.clone()));
        }
        parts
            .into_iter()
            .map(|(k, terms)| (k, Poly::from_terms(&self.ring, terms)))
            .collect()
    }

    /// Renders with terms sorted descending under the order.
    pub fn format(&self, order: &MonomialOrder) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| order.cmp(b, a));
        let mut out = String::new();
        for (i, (m, c)) in terms.iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&format_magnitude(&self.ring, m, &c.abs()));
        }
        out
    }
}

fn format_magnitude(ring: &Ring, m: &Monomial, c: &Rational) -> String {
    if m.is_one() {
        return c.to_string();
    }
    let mono = m
        .iter()
        .map(|(var, exp)| {
            let name = ring.var_name(var);
            if exp == 1 {
                name.to_string()
            } else {
                format!("{name}^{exp}")
            }
        })
        .collect::<Vec<_>>()
        .join("*");
    if c.is_one() {
        mono
    } else {
        format!("{c}*{mono}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(&MonomialOrder::degrevlex(self.ring.nvars())))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.assert_same_ring(rhs);
        let mut terms = self.terms.clone();
        for (m, c) in rhs.terms.iter() {
            match terms.entry(m.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get() + c;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Poly { ring: self.ring.clone(), terms }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.assert_same_ring(rhs);
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (am, ac) in self.terms.iter() {
            for (bm, bc) in rhs.terms.iter() {
                let m = am.mul(bm);
                let c = ac * bc;
                match terms.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let sum = e.get() + &c;
                        if sum.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = sum;
                        }
                    }
                }
            }
        }
        Poly { ring: self.ring.clone(), terms }
    }
}
