//! Primitive formulas of the act language: `∃ū (s·x = t·y ∧ ...)`.
//!
//! Variables are numbered with the free ones first, then the bound block.
//! Parameters are never constants of the language: a parameter is a free
//! variable from the tail of the free list that gets a carrier point
//! substituted before evaluation.

mod eliminate;
mod enumerate;
mod eval;
mod parse;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::monoid::{Elem, Monoid};

pub use eliminate::{eliminate_variable, Elimination, EliminationError, Eliminator, Pivot, Precondition};
pub use enumerate::{canonical_form, enumerate_formulas, FormulaBounds, FormulaIter, FORMULA_LIMITS};
pub use eval::{
    detect_primitive_group, group_certificate, group_identity, is_copy_normal, is_primitive_equivalence,
    operation_table, satisfies, solution_set, CopyNormality,
    GeneralizedPrimitiveSet, GroupCertificate, GroupError, Instantiated, PrimitiveEquivalence, TupleSet,
};
pub use parse::{parse_formula, parse_formula_with_free, ParseError};

/// Variable index: free variables first, then bound ones.
pub type Var = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Term {
    pub var: Var,
    pub coef: Elem,
}

/// `lhs.coef · lhs.var = rhs.coef · rhs.var`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub lhs: Term,
    pub rhs: Term,
}

impl Atom {
    pub fn new(c1: Elem, v1: Var, c2: Elem, v2: Var) -> Atom {
        Atom { lhs: Term { var: v1, coef: c1 }, rhs: Term { var: v2, coef: c2 } }
    }

    /// The same atom with the smaller term on the left.
    pub fn oriented(self) -> Atom {
        if self.rhs < self.lhs {
            Atom { lhs: self.rhs, rhs: self.lhs }
        } else {
            self
        }
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.lhs.var == v || self.rhs.var == v
    }

    pub(crate) fn map_vars(self, f: impl Fn(Var) -> Var) -> Atom {
        Atom {
            lhs: Term { var: f(self.lhs.var), coef: self.lhs.coef },
            rhs: Term { var: f(self.rhs.var), coef: self.rhs.coef },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable {0} is out of scope")]
    VariableOutOfScope(Var),
    #[error("coefficient {0} is not a monoid element")]
    CoefficientOutOfRange(Elem),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("{what} = {requested} exceeds the limit {limit}")]
    BoundExceeded { what: &'static str, requested: usize, limit: usize },
}

/// `∃ bound (atom ∧ ...)` with the free variables in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    free: Vec<String>,
    bound: Vec<String>,
    atoms: Vec<Atom>,
}

impl Formula {
    pub fn new(free: Vec<String>, bound: Vec<String>, atoms: Vec<Atom>) -> Result<Formula, FormulaError> {
        let all: Vec<&String> = free.iter().chain(&bound).collect();
        for (i, n) in all.iter().enumerate() {
            if all[..i].contains(n) {
                return Err(FormulaError::DuplicateVariable(n.to_string()));
            }
        }
        if let Some(a) = atoms.iter().find(|a| a.lhs.var >= all.len() || a.rhs.var >= all.len()) {
            return Err(FormulaError::VariableOutOfScope(a.lhs.var.max(a.rhs.var)));
        }
        Ok(Formula { free, bound, atoms })
    }

    /// Free variables `x0, x1, ...`, bound variables `u0, u1, ...`.
    pub fn with_default_names(free: usize, bound: usize, atoms: Vec<Atom>) -> Formula {
        let free = (0..free).map(|i| format!("x{i}")).collect();
        let bound = (0..bound).map(|i| format!("u{i}")).collect();
        Formula::new(free, bound, atoms).expect("default names are distinct")
    }

    /// Checks every coefficient against `m`.
    pub fn check_coefficients(&self, m: &Monoid) -> Result<(), FormulaError> {
        for a in &self.atoms {
            for t in [a.lhs, a.rhs] {
                if t.coef >= m.order() {
                    return Err(FormulaError::CoefficientOutOfRange(t.coef));
                }
            }
        }
        Ok(())
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn bound_count(&self) -> usize {
        self.bound.len()
    }

    pub fn var_count(&self) -> usize {
        self.free.len() + self.bound.len()
    }

    pub fn free_names(&self) -> &[String] {
        &self.free
    }

    pub fn bound_names(&self) -> &[String] {
        &self.bound
    }

    pub fn var_name(&self, v: Var) -> &str {
        if v < self.free.len() {
            &self.free[v]
        } else {
            &self.bound[v - self.free.len()]
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.bound.is_empty()
    }

    /// `Φ(x̄, x̄)`: the second block of `width` free variables is identified
    /// with the first. Free variables after the two blocks are kept.
    pub fn identify_blocks(&self, width: usize) -> Formula {
        let f = self.free.len();
        // second block onto the first, everything after it shifts down
        let map = |v: Var| if v >= width { v - width } else { v };
        let free = self.free[..width].iter().chain(&self.free[2 * width..f]).cloned().collect();
        let atoms = self.atoms.iter().map(|a| a.map_vars(map)).collect();
        Formula { free, bound: self.bound.clone(), atoms }
    }

    /// Text in the parser grammar, coefficients named by `m`.
    pub fn display<'a>(&'a self, m: &'a Monoid) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, monoid: m }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    monoid: &'a Monoid,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (phi, m) = (self.formula, self.monoid);
        if !phi.bound.is_empty() {
            write!(f, "exists {} : ", phi.bound.join(" "))?;
        }
        let term = |t: Term| {
            if t.coef == m.identity() {
                phi.var_name(t.var).to_string()
            } else {
                format!("{}*{}", m.name(t.coef), phi.var_name(t.var))
            }
        };
        for (i, a) in phi.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{} = {}", term(a.lhs), term(a.rhs))?;
        }
        Ok(())
    }
}

/// Serializable form of a formula.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaSummary {
    pub text: String,
    pub free: Vec<String>,
    pub bound: Vec<String>,
}

impl FormulaSummary {
    pub fn new(phi: &Formula, m: &Monoid) -> Self {
        FormulaSummary { text: phi.display(m).to_string(), free: phi.free.clone(), bound: phi.bound.clone() }
    }
}
