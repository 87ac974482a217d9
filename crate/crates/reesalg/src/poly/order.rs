//! Term orders on monomials.
//!
//! All orders here are total, multiplicative, and have the empty monomial as
//! minimum, so Buchberger-style division terminates. Weighted variants accept
//! zero weights; ties fall through to refinements that keep the order valid.

use std::cmp::Ordering;

use crate::poly::{Monomial, WeightVector};

/// A monomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Pure lexicographic, earlier variables dominate.
    Lex,
    /// Weighted degree, then total degree, then reverse lexicographic.
    ///
    /// The total-degree refinement keeps the order valid when some weights
    /// are zero: a weight-zero variable still ranks above the constant
    /// monomial.
    WDegRevLex(WeightVector),
    /// Weighted degree, then lexicographic.
    WDegLex(WeightVector),
    /// Elimination order: monomials are compared on the front block first,
    /// so any monomial meeting the front block ranks above every monomial
    /// that avoids it.
    Block {
        /// Sorted variable indices of the block to eliminate.
        front: Vec<usize>,
        inner: Box<MonomialOrder>,
    },
}

impl MonomialOrder {
    /// Ordinary graded reverse lexicographic order.
    pub fn degrevlex(nvars: usize) -> Self {
        MonomialOrder::WDegRevLex(WeightVector::unit(nvars))
    }

    /// Elimination order dropping `front`, with the given order inside blocks.
    pub fn block(front: &[usize], inner: MonomialOrder) -> Self {
        let mut front = front.to_vec();
        front.sort_unstable();
        front.dedup();
        MonomialOrder::Block { front, inner: Box::new(inner) }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => cmp_lex(a, b),
            MonomialOrder::WDegRevLex(w) => w
                .monomial_weight(a)
                .cmp(&w.monomial_weight(b))
                .then_with(|| a.total_degree().cmp(&b.total_degree()))
                .then_with(|| cmp_revlex(a, b)),
            MonomialOrder::WDegLex(w) => w
                .monomial_weight(a)
                .cmp(&w.monomial_weight(b))
                .then_with(|| cmp_lex(a, b)),
            MonomialOrder::Block { front, inner } => {
                let in_front = |v: usize| front.binary_search(&v).is_ok();
                let af = a.filter(in_front);
                let bf = b.filter(in_front);
                inner.cmp(&af, &bf).then_with(|| {
                    let ab = a.filter(|v| !in_front(v));
                    let bb = b.filter(|v| !in_front(v));
                    inner.cmp(&ab, &bb)
                })
            }
        }
    }

    pub fn max<'a>(&self, a: &'a Monomial, b: &'a Monomial) -> &'a Monomial {
        if self.cmp(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

/// First differing variable in increasing index order decides; the larger
/// exponent wins.
fn cmp_lex(a: &Monomial, b: &Monomial) -> Ordering {
    let mut ai = a.iter();
    let mut bi = b.iter();
    loop {
        match (ai.next(), bi.next()) {
            (None, None) => return Ordering::Equal,
            // `a` has a variable where `b` has none: `a` is lex-larger there.
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((av, ae)), Some((bv, be))) => match av.cmp(&bv) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ae.cmp(&be) {
                    Ordering::Equal => continue,
                    other => return other,
                },
            },
        }
    }
}

/// Last differing variable in increasing index order decides; the smaller
/// exponent wins. Only meaningful as a tie-break between monomials of equal
/// degree.
fn cmp_revlex(a: &Monomial, b: &Monomial) -> Ordering {
    let av: Vec<(usize, u32)> = a.iter().collect();
    let bv: Vec<(usize, u32)> = b.iter().collect();
    let (mut i, mut j) = (av.len(), bv.len());
    loop {
        match (i, j) {
            (0, 0) => return Ordering::Equal,
            (_, 0) => return Ordering::Less,
            (0, _) => return Ordering::Greater,
            _ => {
                let (avr, ae) = av[i - 1];
                let (bvr, be) = bv[j - 1];
                match avr.cmp(&bvr) {
                    // `a` carries the later variable: smaller there means
                    // larger overall, and `b` has exponent zero.
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Equal => {
                        if ae != be {
                            return be.cmp(&ae);
                        }
                        i -= 1;
                        j -= 1;
                    }
                }
            }
        }
    }
}
