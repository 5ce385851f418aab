//! Exhaustive cross-validation sweeps over small monoids, acts and formulas.
//!
//! Every sweep walks its cases in a fixed order, evaluates them in parallel
//! and collects results in input order, so reports do not depend on the
//! thread count.

mod antiadditive;
mod audit;
mod class;
mod crossval;
mod elimination;
pub mod generate;
pub mod space;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::act::{validate_act, Act, Point};
use crate::formula::{Atom, Formula, FormulaBounds, FORMULA_LIMITS};
use crate::monoid::{enumerate_commutative_monoids, enumerate_monoids, Elem, Monoid};

pub use antiadditive::{run_antiadditivity_sweep, run_antiadditivity_sweep_with};
pub use audit::{instance_classes, run_reduction_audit, InstanceClasses};
pub use class::run_class_decision_sweep;
pub use crossval::{run_theorem1_crossval, run_theorem1_crossval_with};
pub use elimination::run_elimination_sweep;

pub const MAX_MONOID_ORDER: usize = 5;
pub const MAX_ACT_SIZE: usize = 5;
pub const MAX_AUDIT_WIDTH: usize = 3;
/// Largest tuple space a relation sweep may allocate.
pub const MAX_TUPLE_CELLS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    Theorem1Crossval,
    ReductionAudit,
    ClassDecision,
    Antiadditivity,
    Elimination,
}

fn default_formula() -> FormulaBounds {
    FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 }
}

fn default_audit_width() -> usize {
    2
}

fn default_sweeps() -> Vec<Sweep> {
    vec![Sweep::Theorem1Crossval, Sweep::ReductionAudit, Sweep::ClassDecision, Sweep::Antiadditivity, Sweep::Elimination]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub monoid_order: usize,
    pub act_size: usize,
    #[serde(default = "default_formula")]
    pub formula: FormulaBounds,
    /// Tuple length of the explicit instances in the reduction audit.
    #[serde(default = "default_audit_width")]
    pub audit_width: usize,
    #[serde(default)]
    pub commutative_only: bool,
    /// At most this many acts per (monoid, size), drawn with `seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; the global pool when absent.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default = "default_sweeps")]
    pub sweeps: Vec<Sweep>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{what} = {requested} exceeds the limit {limit}")]
    BoundExceeded { what: &'static str, requested: usize, limit: usize },
    #[error("{0} must be positive")]
    ZeroBound(&'static str),
    #[error("sampling requires an explicit seed")]
    SampleWithoutSeed,
}

impl ExperimentConfig {
    pub fn new(monoid_order: usize, act_size: usize, formula: FormulaBounds) -> Self {
        ExperimentConfig {
            monoid_order,
            act_size,
            formula,
            audit_width: default_audit_width(),
            commutative_only: false,
            sample: None,
            seed: None,
            threads: None,
            sweeps: default_sweeps(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let exceeded = |what, requested, limit| ConfigError::BoundExceeded { what, requested, limit };
        for (what, v) in [("monoid_order", self.monoid_order), ("act_size", self.act_size), ("max_atoms", self.formula.max_atoms)] {
            if v == 0 {
                return Err(ConfigError::ZeroBound(what));
            }
        }
        if self.monoid_order > MAX_MONOID_ORDER {
            return Err(exceeded("monoid_order", self.monoid_order, MAX_MONOID_ORDER));
        }
        if self.act_size > MAX_ACT_SIZE {
            return Err(exceeded("act_size", self.act_size, MAX_ACT_SIZE));
        }
        if self.audit_width > MAX_AUDIT_WIDTH {
            return Err(exceeded("audit_width", self.audit_width, MAX_AUDIT_WIDTH));
        }
        self.formula.check().map_err(|_| {
            let f = self.formula;
            let (what, requested, limit) = if f.max_free > FORMULA_LIMITS.max_free {
                ("max_free", f.max_free, FORMULA_LIMITS.max_free)
            } else if f.max_bound > FORMULA_LIMITS.max_bound {
                ("max_bound", f.max_bound, FORMULA_LIMITS.max_bound)
            } else {
                ("max_atoms", f.max_atoms, FORMULA_LIMITS.max_atoms)
            };
            exceeded(what, requested, limit)
        })?;
        let width = (self.formula.max_free + self.formula.max_bound) as u32;
        let cells = self.act_size.saturating_pow(width);
        if cells > MAX_TUPLE_CELLS {
            return Err(exceeded("act_size^(max_free + max_bound)", cells, MAX_TUPLE_CELLS));
        }
        if self.sample.is_some() && self.seed.is_none() {
            return Err(ConfigError::SampleWithoutSeed);
        }
        Ok(())
    }

    fn monoids(&self, commutative: bool) -> Vec<Arc<Monoid>> {
        (1..=self.monoid_order)
            .flat_map(|n| {
                if commutative || self.commutative_only {
                    enumerate_commutative_monoids(n)
                } else {
                    enumerate_monoids(n)
                }
                .expect("order validated")
            })
            .map(Arc::new)
            .collect()
    }

    /// Acts of every size up to the bound, optionally sampled.
    fn acts(&self, sizes: impl Iterator<Item = Vec<Act>>, rng: &mut Option<ChaCha8Rng>) -> Vec<Act> {
        let mut out = Vec::new();
        for acts in sizes {
            match (self.sample, rng.as_mut()) {
                (Some(k), Some(rng)) if acts.len() > k => {
                    let mut picked = sample(rng, acts.len(), k).into_vec();
                    picked.sort_unstable();
                    out.extend(picked.into_iter().map(|i| acts[i].clone()));
                }
                _ => out.extend(acts),
            }
        }
        out
    }

    fn rng(&self) -> Option<ChaCha8Rng> {
        self.sample.and(self.seed).map(ChaCha8Rng::seed_from_u64)
    }

    /// Runs `f` on a pool with the configured thread count.
    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.threads {
            Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool").install(f),
            None => f(),
        }
    }
}

/// A formula recorded by its atoms over default variable names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulaRecord {
    pub text: String,
    pub free: usize,
    pub bound: usize,
    pub atoms: Vec<Atom>,
}

impl FormulaRecord {
    pub fn new(phi: &Formula, m: &Monoid) -> Self {
        FormulaRecord {
            text: phi.display(m).to_string(),
            free: phi.free_count(),
            bound: phi.bound_count(),
            atoms: phi.atoms().to_vec(),
        }
    }

    pub fn formula(&self) -> Formula {
        Formula::with_default_names(self.free, self.bound, self.atoms.clone())
    }
}

/// What two oracles disagreed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    /// The criterion holds yet the formula has overlapping unequal copies.
    CopyViolation { formula: FormulaRecord, params: usize, witness: [Vec<Point>; 2] },
    /// The criterion fails at `triple` but the necessity formula does not
    /// separate the copies.
    NecessityNotReproduced { triple: [Point; 3] },
    /// The reduced criterion and the explicit instance disagree.
    Instance { instance: crate::deciders::ExplicitInstance },
    /// A regular act found by only one generator.
    GeneratorGap { only_in: String, act_size: usize },
    /// A link of the class-level chain of implications broke.
    ClassChain { check: String, act_size: usize },
    /// A group structure on a generalized primitive set with at least two
    /// elements.
    Certificate {
        basis: FormulaRecord,
        alpha: FormulaRecord,
        op: FormulaRecord,
        /// Parameter of basis, equivalence and operation.
        params: [Point; 3],
        size: usize,
    },
    /// The eliminator got stuck or changed the solution set.
    Elimination { formula: FormulaRecord, x0: usize, problem: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub sweep: Sweep,
    /// Multiplication table rows.
    pub monoid: Vec<Vec<Elem>>,
    /// Action table rows, when the finding concerns one act.
    pub act: Option<Vec<Vec<Point>>>,
    pub finding: Finding,
    pub left: String,
    pub right: String,
}

impl Discrepancy {
    fn new(sweep: Sweep, m: &Monoid, act: Option<&Act>, finding: Finding, left: &str, right: &str) -> Self {
        Discrepancy {
            sweep,
            monoid: m.rows(),
            act: act.map(Act::rows),
            finding,
            left: left.to_string(),
            right: right.to_string(),
        }
    }

    pub fn monoid(&self) -> Arc<Monoid> {
        Arc::new(Monoid::from_table(self.monoid.clone()).expect("recorded monoid is valid"))
    }

    pub fn act(&self) -> Option<Act> {
        let m = self.monoid();
        self.act.as_ref().map(|rows| {
            let names = (0..rows[0].len()).map(|i| format!("p{i}")).collect();
            validate_act(m, names, rows.clone()).expect("recorded act is valid")
        })
    }

    /// Re-runs the disagreeing oracles on the stored inputs; true when the
    /// disagreement reappears.
    pub fn replay(&self) -> bool {
        self.replay_with(&crate::deciders::theorem1_check)
    }

    /// As [`Discrepancy::replay`] with a substitute per-act criterion.
    pub fn replay_with(&self, criterion: &Criterion) -> bool {
        match self.sweep {
            Sweep::Theorem1Crossval => crossval::replay(self, criterion),
            Sweep::ReductionAudit => audit::replay(self),
            Sweep::ClassDecision => class::replay(self),
            Sweep::Antiadditivity => antiadditive::replay(self),
            Sweep::Elimination => elimination::replay(self),
        }
    }
}

pub type Criterion = dyn Fn(&Act) -> crate::deciders::Verdict<crate::deciders::CriterionWitness> + Sync;

/// Outcome of one sweep. The runtime is kept out of the serialized form so
/// reports stay byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub sweep: Sweep,
    pub cases: usize,
    pub counts: BTreeMap<String, u64>,
    pub discrepancies: Vec<Discrepancy>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl SweepReport {
    fn new(sweep: Sweep) -> Self {
        SweepReport { sweep, cases: 0, counts: BTreeMap::new(), discrepancies: Vec::new(), runtime: Duration::ZERO }
    }

    fn add(&mut self, key: &str, n: u64) {
        *self.counts.entry(key.to_string()).or_default() += n;
    }

    fn absorb(&mut self, part: CaseResult) {
        self.cases += 1;
        for (k, v) in part.counts {
            self.add(&k, v);
        }
        self.discrepancies.extend(part.discrepancies);
    }

    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Partial result of one case, merged in case order.
#[derive(Debug, Default)]
struct CaseResult {
    counts: BTreeMap<String, u64>,
    discrepancies: Vec<Discrepancy>,
}

impl CaseResult {
    fn add(&mut self, key: &str, n: u64) {
        *self.counts.entry(key.to_string()).or_default() += n;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub config: ExperimentConfig,
    pub sweeps: Vec<SweepReport>,
}

impl HarnessReport {
    pub fn is_clean(&self) -> bool {
        self.sweeps.iter().all(SweepReport::is_clean)
    }
}

/// Runs every sweep listed in the configuration.
pub fn run_sweeps(cfg: &ExperimentConfig) -> Result<HarnessReport, ConfigError> {
    cfg.validate()?;
    let mut sweeps = Vec::new();
    for s in &cfg.sweeps {
        sweeps.push(match s {
            Sweep::Theorem1Crossval => run_theorem1_crossval(cfg)?,
            Sweep::ReductionAudit => run_reduction_audit(cfg)?,
            Sweep::ClassDecision => run_class_decision_sweep(cfg)?,
            Sweep::Antiadditivity => run_antiadditivity_sweep(cfg)?,
            Sweep::Elimination => run_elimination_sweep(cfg)?,
        });
    }
    Ok(HarnessReport { config: cfg.clone(), sweeps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing_and_limits() {
        let cfg = ExperimentConfig::from_toml("monoid_order = 2\nact_size = 2\n").unwrap();
        assert_eq!(cfg.formula, default_formula());
        assert_eq!(cfg.sweeps.len(), 5);
        let bad = |t: &str| ExperimentConfig::from_toml(t).unwrap_err();
        assert!(matches!(bad("monoid_order = 9\nact_size = 2\n"), ConfigError::BoundExceeded { what: "monoid_order", .. }));
        assert!(matches!(bad("monoid_order = 0\nact_size = 2\n"), ConfigError::ZeroBound("monoid_order")));
        assert!(matches!(bad("monoid_order = 2\nact_size = 2\nsample = 3\n"), ConfigError::SampleWithoutSeed));
        assert!(matches!(bad("monoid_order = 2\nact_size = 2\nbogus = 1\n"), ConfigError::Syntax(_)));
        assert!(matches!(
            bad("monoid_order = 2\nact_size = 5\n[formula]\nmax_free = 6\nmax_bound = 3\nmax_atoms = 2\n"),
            ConfigError::BoundExceeded { .. }
        ));
    }

    #[test]
    fn sampling_is_seeded() {
        let mut cfg = ExperimentConfig::new(3, 3, default_formula());
        cfg.sample = Some(2);
        cfg.seed = Some(11);
        let m = cfg.monoids(false).pop().unwrap();
        let pick = |cfg: &ExperimentConfig| {
            let mut rng = cfg.rng();
            cfg.acts((1..=3).map(|k| crate::act::enumerate_acts(&m, k)), &mut rng)
                .iter()
                .map(Act::rows)
                .collect::<Vec<_>>()
        };
        assert_eq!(pick(&cfg), pick(&cfg));
        assert!(pick(&cfg).len() <= 6);
    }
}
