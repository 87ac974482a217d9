//! Buchberger-based ideal machinery.
//!
//! Everything downstream that needs a decision procedure routes through this
//! module: normal forms and ideal membership, ideal equality via unique
//! reduced bases, elimination, kernels of ring maps into quotient rings, and
//! subalgebra membership with an expressing witness. The S-pair queue uses
//! the normal strategy with a deterministic tie-break, so identical inputs
//! always produce byte-identical bases. A configurable budget on processed
//! S-pairs turns runaway computations into a structured error.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::poly::{Monomial, MonomialOrder, Poly, Rational, Ring, RingRef};
use crate::{Error, Result};

/// Default cap on processed S-pairs per basis computation.
pub const DEFAULT_PAIR_BUDGET: usize = 200_000;

/// An ideal with a lazily computed, cached reduced Groebner basis.
///
/// The cache is shared across clones; once computed, every handle observes
/// the same canonical basis. Generators are kept verbatim (zeros included)
/// so cofactor positions from [`lift_combination`] line up with the input.
#[derive(Debug, Clone)]
pub struct Ideal {
    ring: RingRef,
    gens: Vec<Poly>,
    order: MonomialOrder,
    budget: usize,
    gb: Arc<OnceLock<Result<Vec<Poly>>>>,
}

impl Ideal {
    pub fn new(ring: &RingRef, gens: Vec<Poly>, order: MonomialOrder) -> Ideal {
        for g in &gens {
            assert!(**g.ring() == **ring, "generator over a different registry");
        }
        Ideal {
            ring: ring.clone(),
            gens,
            order,
            budget: DEFAULT_PAIR_BUDGET,
            gb: Arc::new(OnceLock::new()),
        }
    }

    pub fn zero(ring: &RingRef, order: MonomialOrder) -> Ideal {
        Ideal::new(ring, Vec::new(), order)
    }

    /// Same ideal with a different S-pair budget and a fresh cache.
    pub fn with_budget(&self, budget: usize) -> Ideal {
        Ideal {
            ring: self.ring.clone(),
            gens: self.gens.clone(),
            order: self.order.clone(),
            budget,
            gb: Arc::new(OnceLock::new()),
        }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The unique reduced basis: monic, mutually irreducible, sorted by
    /// ascending leading monomial.
    pub fn reduced_gb(&self) -> Result<&[Poly]> {
        self.gb
            .get_or_init(|| {
                let basis = engine(&self.ring, &self.gens, &self.order, self.budget, false)?;
                Ok(basis.into_iter().map(|(p, _)| p).collect())
            })
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }
}

/// Reduced Groebner basis of the given generators under the default budget.
pub fn buchberger(ring: &RingRef, gens: &[Poly], order: &MonomialOrder) -> Result<Vec<Poly>> {
    let basis = engine(ring, gens, order, DEFAULT_PAIR_BUDGET, false)?;
    Ok(basis.into_iter().map(|(p, _)| p).collect())
}

/// Unique remainder of `p` modulo the ideal's reduced basis.
pub fn normal_form(p: &Poly, ideal: &Ideal) -> Result<Poly> {
    assert!(**p.ring() == **ideal.ring(), "element over a different registry");
    let gb = ideal.reduced_gb()?;
    let basis: Vec<OrdPoly> = gb
        .iter()
        .map(|g| OrdPoly::from_poly(g, ideal.order()))
        .collect();
    let work = OrdPoly::from_poly(p, ideal.order());
    let (rem, _) = divide(&work, &basis, None, ideal.order(), false);
    Ok(rem.to_poly(ideal.ring()))
}

/// Membership test: `p` reduces to zero.
pub fn ideal_member(p: &Poly, ideal: &Ideal) -> Result<bool> {
    Ok(normal_form(p, ideal)?.is_zero())
}

/// Equality of ideals over the same registry and order.
pub fn ideal_equal(a: &Ideal, b: &Ideal) -> Result<bool> {
    assert!(**a.ring() == **b.ring(), "ideals over different registries");
    assert!(a.order() == b.order(), "ideals under different orders");
    Ok(a.reduced_gb()? == b.reduced_gb()?)
}

/// Intersection with the subring omitting the dropped variables, via a
/// block order that ranks every dropped variable above the rest.
pub fn eliminate(ideal: &Ideal, drop: &BTreeSet<usize>) -> Result<Ideal> {
    if drop.is_empty() {
        return Ok(ideal.clone());
    }
    let front: Vec<usize> = drop.iter().copied().collect();
    let order = MonomialOrder::block(&front, ideal.order().clone());
    let basis = engine(ideal.ring(), ideal.generators(), &order, ideal.budget(), false)?;
    let kept: Vec<Poly> = basis
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| p.terms().all(|(m, _)| m.iter().all(|(v, _)| !drop.contains(&v))))
        .collect();
    Ok(Ideal::new(ideal.ring(), kept, ideal.order().clone()).with_budget(ideal.budget()))
}

/// A ring homomorphism from a free polynomial ring into a quotient ring,
/// given by one image per source variable.
#[derive(Debug, Clone)]
pub struct RingMap {
    source: RingRef,
    target_ideal: Ideal,
    images: Vec<Poly>,
}

impl RingMap {
    /// Images are normalized modulo the target's defining ideal on entry.
    pub fn new(source: &RingRef, target_ideal: Ideal, images: Vec<Poly>) -> Result<RingMap> {
        assert_eq!(
            images.len(),
            source.nvars(),
            "one image per source variable required"
        );
        let images = images
            .iter()
            .map(|p| normal_form(p, &target_ideal))
            .collect::<Result<Vec<_>>>()?;
        Ok(RingMap { source: source.clone(), target_ideal, images })
    }

    pub fn source(&self) -> &RingRef {
        &self.source
    }

    pub fn target(&self) -> &RingRef {
        self.target_ideal.ring()
    }

    pub fn target_ideal(&self) -> &Ideal {
        &self.target_ideal
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    /// Applies the map and reduces to normal form in the target.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        assert!(**p.ring() == **self.source(), "element over a different registry");
        let bindings: BTreeMap<usize, Poly> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, im)| (i, im.clone()))
            .collect();
        let image = p.substitute(self.target(), &bindings)?;
        normal_form(&image, &self.target_ideal)
    }
}

/// Kernel of a ring map, as an ideal in the source variables.
///
/// Joins a renamed copy of the target ring with the source ring, adjoins the
/// target's defining ideal plus one relation `X_i - image(X_i)` per source
/// variable, and eliminates the target block.
pub fn ringmap_kernel(map: &RingMap) -> Result<Ideal> {
    let target = map.target();
    let source = map.source();
    let nt = target.nvars();
    let mut names: Vec<String> = target.var_names().iter().map(|n| format!("#{n}")).collect();
    names.extend(source.var_names().iter().cloned());
    let joint = Ring::new(&names);

    let mut gens: Vec<Poly> = map
        .target_ideal()
        .generators()
        .iter()
        .map(|g| g.map_vars(&joint, |i| i))
        .collect();
    for (j, image) in map.images().iter().enumerate() {
        let xj = Poly::var(&joint, nt + j);
        gens.push(&xj - &image.map_vars(&joint, |i| i));
    }

    let inner = MonomialOrder::degrevlex(joint.nvars());
    let front: Vec<usize> = (0..nt).collect();
    let order = MonomialOrder::block(&front, inner);
    let basis = engine(&joint, &gens, &order, map.target_ideal().budget(), false)?;
    let kept: Vec<Poly> = basis
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| p.terms().all(|(m, _)| m.iter().all(|(v, _)| v >= nt)))
        .map(|p| p.map_vars(source, |i| i - nt))
        .collect();
    Ok(Ideal::new(source, kept, MonomialOrder::degrevlex(source.nvars()))
        .with_budget(map.target_ideal().budget()))
}

/// Membership of `g` in the subalgebra generated by labeled elements of a
/// quotient ring. On success returns the witness: a polynomial in the labels
/// that evaluates to `g` modulo the defining ideal.
pub fn subalgebra_member(
    g: &Poly,
    gens: &[(String, Poly)],
    defining: &Ideal,
) -> Result<Option<Poly>> {
    assert!(!gens.is_empty(), "subalgebra membership needs at least one generator");
    let ambient = defining.ring();
    assert!(**g.ring() == **ambient, "element over a different registry");
    let na = ambient.nvars();
    let tags: Vec<String> = (0..gens.len()).map(|i| format!("#t{i}")).collect();
    let joint = ambient.extend(&tags);

    let mut eqs: Vec<Poly> = defining
        .generators()
        .iter()
        .map(|p| p.map_vars(&joint, |i| i))
        .collect();
    for (i, (_, gen)) in gens.iter().enumerate() {
        assert!(**gen.ring() == **ambient, "generator over a different registry");
        let tag = Poly::var(&joint, na + i);
        eqs.push(&tag - &gen.map_vars(&joint, |i| i));
    }

    let inner = MonomialOrder::degrevlex(joint.nvars());
    let front: Vec<usize> = (0..na).collect();
    let order = MonomialOrder::block(&front, inner);
    let basis = engine(&joint, &eqs, &order, defining.budget(), false)?;
    let ord_basis: Vec<OrdPoly> = basis.iter().map(|(p, _)| OrdPoly::from_poly(p, &order)).collect();
    let work = OrdPoly::from_poly(&g.map_vars(&joint, |i| i), &order);
    let (nf, _) = divide(&work, &ord_basis, None, &order, false);
    let nf = nf.to_poly(&joint);

    let pure = nf.terms().all(|(m, _)| m.iter().all(|(v, _)| v >= na));
    if !pure {
        return Ok(None);
    }
    let labels: Vec<&str> = gens.iter().map(|(l, _)| l.as_str()).collect();
    let label_ring = Ring::new(&labels);
    Ok(Some(nf.map_vars(&label_ring, |i| i - na)))
}

/// Exact cofactors expressing a member as a combination of the ideal's
/// generators, in generator order.
pub fn lift_combination(p: &Poly, ideal: &Ideal) -> Result<Vec<Poly>> {
    assert!(**p.ring() == **ideal.ring(), "element over a different registry");
    let tracked = engine(ideal.ring(), ideal.generators(), ideal.order(), ideal.budget(), true)?;
    let basis: Vec<OrdPoly> = tracked
        .iter()
        .map(|(g, _)| OrdPoly::from_poly(g, ideal.order()))
        .collect();
    let work = OrdPoly::from_poly(p, ideal.order());
    let (rem, quotients) = divide(&work, &basis, None, ideal.order(), true);
    if !rem.terms.is_empty() {
        return Err(Error::InvalidInput(
            "lift requested for an element outside the ideal".to_string(),
        ));
    }
    let n = ideal.generators().len();
    let mut cofactors = vec![Poly::zero(ideal.ring()); n];
    for (k, q) in quotients.iter().enumerate() {
        if q.is_empty() {
            continue;
        }
        let qp = Poly::from_terms(ideal.ring(), q.iter().cloned());
        for (j, c) in cofactors.iter_mut().enumerate() {
            *c = &*c + &(&qp * &tracked[k].1[j]);
        }
    }
    // Reconstruction is exact by construction; guard against engine bugs.
    let mut check = Poly::zero(ideal.ring());
    for (c, g) in cofactors.iter().zip(ideal.generators()) {
        check = &check + &(c * g);
    }
    assert_eq!(&check, p, "lift reconstruction failed");
    Ok(cofactors)
}

type Term = (Monomial, Rational);

/// Terms sorted strictly descending under the active order.
#[derive(Debug, Clone)]
struct OrdPoly {
    terms: Vec<Term>,
}

impl OrdPoly {
    fn from_poly(p: &Poly, order: &MonomialOrder) -> OrdPoly {
        let mut terms: Vec<Term> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|(a, _), (b, _)| order.cmp(b, a));
        OrdPoly { terms }
    }

    fn to_poly(&self, ring: &RingRef) -> Poly {
        Poly::from_terms(ring, self.terms.iter().cloned())
    }

    fn leading(&self) -> (&Monomial, &Rational) {
        let t = &self.terms[0];
        (&t.0, &t.1)
    }

    /// `self - c * m * other`; merges in one pass.
    fn sub_scaled(&self, c: &Rational, m: &Monomial, other: &OrdPoly, order: &MonomialOrder) -> OrdPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() && j < other.terms.len() {
            let bm = other.terms[j].0.mul(m);
            match order.cmp(&self.terms[i].0, &bm) {
                std::cmp::Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((bm, -(c * &other.terms[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = &self.terms[i].1 - &(c * &other.terms[j].1);
                    if !s.is_zero() {
                        out.push((bm, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        for (bm, bc) in &other.terms[j..] {
            out.push((bm.mul(m), -(c * bc)));
        }
        OrdPoly { terms: out }
    }

    fn scale(&self, c: &Rational) -> OrdPoly {
        OrdPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    fn mul_monomial(&self, m: &Monomial) -> OrdPoly {
        OrdPoly {
            terms: self.terms.iter().map(|(tm, c)| (tm.mul(m), c.clone())).collect(),
        }
    }
}

/// Full multivariate division: reduces every term of `p`, picking the first
/// divisor in basis order. Returns the remainder and, when requested, the
/// quotient terms per basis element.
fn divide(
    p: &OrdPoly,
    basis: &[OrdPoly],
    skip: Option<usize>,
    order: &MonomialOrder,
    want_quotients: bool,
) -> (OrdPoly, Vec<Vec<Term>>) {
    let mut quotients = vec![Vec::new(); if want_quotients { basis.len() } else { 0 }];
    let mut rem: Vec<Term> = Vec::new();
    let mut work = p.clone();
    'outer: while let Some((lm, lc)) = work.terms.first().cloned() {
        for (k, g) in basis.iter().enumerate() {
            if Some(k) == skip || g.terms.is_empty() {
                continue;
            }
            let (glm, glc) = g.leading();
            if let Some(t) = lm.try_div(glm) {
                let c = &lc / glc;
                work = work.sub_scaled(&c, &t, g, order);
                if want_quotients {
                    quotients[k].push((t, c));
                }
                continue 'outer;
            }
        }
        rem.push(work.terms.remove(0));
    }
    (OrdPoly { terms: rem }, quotients)
}

fn strategy_degree(order: &MonomialOrder, m: &Monomial) -> u64 {
    match order {
        MonomialOrder::WDegRevLex(w) | MonomialOrder::WDegLex(w) => w.monomial_weight(m),
        _ => m.total_degree(),
    }
}

fn norm_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Buchberger with the normal selection strategy, coprimality and chain
/// criteria, then minimization and full interreduction. Every basis element
/// is kept monic throughout. With `track`, each output carries cofactors
/// expressing it in terms of the input generators.
fn engine(
    ring: &RingRef,
    gens: &[Poly],
    order: &MonomialOrder,
    budget: usize,
    track: bool,
) -> Result<Vec<(Poly, Vec<Poly>)>> {
    let nreps = if track { gens.len() } else { 0 };
    let mut elems: Vec<OrdPoly> = Vec::new();
    let mut reps: Vec<Vec<Poly>> = Vec::new();

    for (j, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let op = OrdPoly::from_poly(g, order);
        let lc = op.leading().1.clone();
        let inv = Rational::one() / &lc;
        let mut rep = vec![Poly::zero(ring); nreps];
        if track {
            rep[j] = Poly::constant(ring, inv.clone());
        }
        elems.push(op.scale(&inv));
        reps.push(rep);
    }

    let mut queue: BTreeSet<(u64, usize, usize)> = BTreeSet::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    let enqueue = |queue: &mut BTreeSet<(u64, usize, usize)>,
                       pending: &mut BTreeSet<(usize, usize)>,
                       elems: &[OrdPoly],
                       i: usize,
                       j: usize| {
        let lcm = elems[i].leading().0.lcm(elems[j].leading().0);
        queue.insert((strategy_degree(order, &lcm), i, j));
        pending.insert((i, j));
    };
    for j in 1..elems.len() {
        for i in 0..j {
            enqueue(&mut queue, &mut pending, &elems, i, j);
        }
    }

    let mut processed = 0usize;
    while let Some(&(d, i, j)) = queue.iter().next() {
        queue.remove(&(d, i, j));
        pending.remove(&(i, j));

        let lmi = elems[i].leading().0.clone();
        let lmj = elems[j].leading().0.clone();
        if lmi.coprime(&lmj) {
            continue;
        }
        let lcm = lmi.lcm(&lmj);
        let chain = (0..elems.len()).any(|k| {
            k != i
                && k != j
                && elems[k].leading().0.divides(&lcm)
                && !pending.contains(&norm_pair(i, k))
                && !pending.contains(&norm_pair(j, k))
        });
        if chain {
            continue;
        }

        if processed >= budget {
            return Err(Error::Budget { processed, cap: budget });
        }
        processed += 1;

        // Both elements are monic, so the S-polynomial needs no scaling.
        let mi = lcm.try_div(&lmi).expect("lcm divisible by lm");
        let mj = lcm.try_div(&lmj).expect("lcm divisible by lm");
        let s = elems[i]
            .mul_monomial(&mi)
            .sub_scaled(&Rational::one(), &mj, &elems[j], order);
        let (rem, quotients) = divide(&s, &elems, None, order, track);
        if rem.terms.is_empty() {
            continue;
        }

        let lc = rem.leading().1.clone();
        let inv = Rational::one() / &lc;
        let rep = if track {
            let mi_p = Poly::from_terms(ring, [(mi.clone(), Rational::one())]);
            let mj_p = Poly::from_terms(ring, [(mj.clone(), Rational::one())]);
            let mut r: Vec<Poly> = (0..nreps)
                .map(|t| &(&mi_p * &reps[i][t]) - &(&mj_p * &reps[j][t]))
                .collect();
            for (k, q) in quotients.iter().enumerate() {
                if q.is_empty() {
                    continue;
                }
                let qp = Poly::from_terms(ring, q.iter().cloned());
                for (t, entry) in r.iter_mut().enumerate() {
                    *entry = &*entry - &(&qp * &reps[k][t]);
                }
            }
            r.iter().map(|c| c.scale(&inv)).collect()
        } else {
            Vec::new()
        };

        elems.push(rem.scale(&inv));
        reps.push(rep);
        let t = elems.len() - 1;
        for i2 in 0..t {
            enqueue(&mut queue, &mut pending, &elems, i2, t);
        }
    }

    // Minimize: keep, in ascending leading-monomial order, only elements
    // whose leading monomial no kept element divides.
    let mut by_lm: Vec<usize> = (0..elems.len()).collect();
    by_lm.sort_by(|&a, &b| order.cmp(elems[a].leading().0, elems[b].leading().0));
    let mut kept: Vec<usize> = Vec::new();
    for idx in by_lm {
        if !kept.iter().any(|&k| elems[k].leading().0.divides(elems[idx].leading().0)) {
            kept.push(idx);
        }
    }

    // Interreduce: fully reduce each survivor against the others.
    let mut basis: Vec<OrdPoly> = kept.iter().map(|&k| elems[k].clone()).collect();
    let mut basis_reps: Vec<Vec<Poly>> = kept.iter().map(|&k| reps[k].clone()).collect();
    for i in 0..basis.len() {
        let (rem, quotients) = divide(&basis[i], &basis, Some(i), order, track);
        if track {
            let mut r = basis_reps[i].clone();
            for (k, q) in quotients.iter().enumerate() {
                if q.is_empty() {
                    continue;
                }
                let qp = Poly::from_terms(ring, q.iter().cloned());
                for (t, entry) in r.iter_mut().enumerate() {
                    *entry = &*entry - &(&qp * &basis_reps[k][t]);
                }
            }
            basis_reps[i] = r;
        }
        debug_assert!(rem.terms.is_empty() || rem.leading().1.is_one());
        basis[i] = rem;
    }

    Ok(basis
        .into_iter()
        .zip(basis_reps)
        .filter(|(p, _)| !p.terms.is_empty())
        .map(|(p, r)| (p.to_poly(ring), r))
        .collect())
}
