//! Sparse monomials: exponent lists keyed by variable index.

use std::cmp::Ordering;

/// A power product of ring variables.
///
/// Stored as `(variable index, exponent)` pairs sorted by index with no zero
/// exponents, so equal monomials have equal representations. The derived
/// `Ord` is a structural order used only for canonical storage; ranking under
/// a term order goes through `MonomialOrder`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: Vec<(u32, u32)>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    /// A single variable.
    pub fn var(index: usize) -> Self {
        Monomial { exps: vec![(index as u32, 1)] }
    }

    /// Builds from arbitrary pairs: merges duplicates, drops zeros, sorts.
    pub fn from_pairs(pairs: &[(usize, u32)]) -> Self {
        let mut exps: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for &(var, exp) in pairs {
            if exp == 0 {
                continue;
            }
            exps.push((var as u32, exp));
        }
        exps.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { exps: merged }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent of one variable (zero when absent).
    pub fn exp(&self, var: usize) -> u32 {
        let var = var as u32;
        self.exps
            .binary_search_by_key(&var, |&(v, _)| v)
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    /// Pairs `(variable index, exponent)` in increasing variable order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn total_degree(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| u64::from(e)).sum()
    }

    /// Largest variable index that occurs, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.exps.last().map(|&(v, _)| v as usize)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (av, ae) = self.exps[i];
            let (bv, be) = other.exps[j];
            match av.cmp(&bv) {
                Ordering::Less => {
                    exps.push((av, ae));
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push((bv, be));
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((av, ae + be));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[j..]);
        Monomial { exps }
    }

    /// Quotient monomial, or `None` when `divisor` does not divide `self`.
    pub fn try_div(&self, divisor: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut i = 0;
        for &(dv, de) in &divisor.exps {
            loop {
                if i >= self.exps.len() {
                    return None;
                }
                let (sv, se) = self.exps[i];
                match sv.cmp(&dv) {
                    Ordering::Less => {
                        exps.push((sv, se));
                        i += 1;
                    }
                    Ordering::Equal => {
                        if se < de {
                            return None;
                        }
                        if se > de {
                            exps.push((sv, se - de));
                        }
                        i += 1;
                        break;
                    }
                    Ordering::Greater => return None,
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        Some(Monomial { exps })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.try_div(self).is_some()
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (av, ae) = self.exps[i];
            let (bv, be) = other.exps[j];
            match av.cmp(&bv) {
                Ordering::Less => {
                    exps.push((av, ae));
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push((bv, be));
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((av, ae.max(be)));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[j..]);
        Monomial { exps }
    }

    /// Whether the two monomials share no variable.
    pub fn coprime(&self, other: &Monomial) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return false,
            }
        }
        true
    }

    /// Raises every exponent by the factor.
    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|&(v, e)| (v, e * k)).collect(),
        }
    }

    /// Restriction to the variables accepted by the predicate.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .copied()
                .filter(|&(v, _)| keep(v as usize))
                .collect(),
        }
    }

    /// Re-indexes every variable through the map.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Monomial {
        let pairs: Vec<(usize, u32)> = self.exps.iter().map(|&(v, e)| (map(v as usize), e)).collect();
        Monomial::from_pairs(&pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(usize, u32)]) -> Monomial {
        Monomial::from_pairs(pairs)
    }

    #[test]
    fn construction_normalizes() {
        assert_eq!(m(&[(2, 1), (0, 2)]), m(&[(0, 2), (2, 1)]));
        assert_eq!(m(&[(1, 0)]), Monomial::one());
        assert_eq!(m(&[(0, 1), (0, 2)]), m(&[(0, 3)]));
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = m(&[(0, 2), (1, 1)]);
        let b = m(&[(1, 2), (3, 1)]);
        let prod = a.mul(&b);
        assert_eq!(prod, m(&[(0, 2), (1, 3), (3, 1)]));
        assert_eq!(prod.try_div(&b), Some(a.clone()));
        assert_eq!(prod.try_div(&prod), Some(Monomial::one()));
        assert_eq!(a.try_div(&b), None);
    }

    #[test]
    fn lcm_and_coprimality() {
        let a = m(&[(0, 2), (1, 1)]);
        let b = m(&[(1, 2), (3, 1)]);
        assert_eq!(a.lcm(&b), m(&[(0, 2), (1, 2), (3, 1)]));
        assert!(!a.coprime(&b));
        assert!(a.coprime(&m(&[(2, 5)])));
        assert!(Monomial::one().coprime(&a));
    }

    #[test]
    fn degree_and_exponent_queries() {
        let a = m(&[(0, 2), (3, 1)]);
        assert_eq!(a.total_degree(), 3);
        assert_eq!(a.exp(0), 2);
        assert_eq!(a.exp(1), 0);
        assert_eq!(a.exp(3), 1);
        assert_eq!(a.pow(2), m(&[(0, 4), (3, 2)]));
        assert_eq!(a.pow(0), Monomial::one());
    }
}
