//! Variable registries and weight assignments.
//!
//! A `Ring` is an ordered list of variable names. Every polynomial carries a
//! shared reference to the registry it lives over, and all operations that
//! combine polynomials insist on matching registries. Registries compare by
//! name list, not by pointer, so structurally equal rings are interchangeable.

use std::fmt;
use std::sync::Arc;

use crate::poly::Monomial;

/// Shared handle to a variable registry.
pub type RingRef = Arc<Ring>;

/// An ordered set of named variables.
#[derive(Debug, PartialEq, Eq)]
pub struct Ring {
    vars: Vec<String>,
}

impl Ring {
    /// Builds a registry from an ordered list of distinct names.
    pub fn new<S: AsRef<str>>(vars: &[S]) -> RingRef {
        let names: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, name) in names.iter().enumerate() {
            assert!(!name.is_empty(), "empty variable name");
            assert!(
                !names[..i].contains(name),
                "duplicate variable name `{name}`"
            );
        }
        Arc::new(Ring { vars: names })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_name(&self, index: usize) -> &str {
        &self.vars[index]
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    /// Index of a variable by name, if declared.
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// New registry with extra variables appended after the existing ones.
    pub fn extend<S: AsRef<str>>(&self, extra: &[S]) -> RingRef {
        let mut vars = self.vars.clone();
        vars.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Ring::new(&vars)
    }

    /// Whether `other` declares every variable of `self` (by name).
    pub fn embeds_into(&self, other: &Ring) -> bool {
        self.vars.iter().all(|v| other.var_index(v).is_some())
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k[{}]", self.vars.join(", "))
    }
}

/// One non-negative integer weight per variable of a registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<u64>,
}

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Self {
        WeightVector { weights }
    }

    /// All weights one: ordinary total degree.
    pub fn unit(nvars: usize) -> Self {
        WeightVector { weights: vec![1; nvars] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, var: usize) -> u64 {
        self.weights[var]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Weighted degree of a monomial.
    pub fn monomial_weight(&self, m: &Monomial) -> u64 {
        m.iter()
            .map(|(var, exp)| self.weight(var) * u64::from(exp))
            .sum()
    }
}
