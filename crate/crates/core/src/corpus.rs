//! The default test corpus and the lacunary family adapted to each space.

use serde::Serialize;

use crate::analytic::{AnalyticFunction, FunctionSpec};
use crate::error::Result;
use crate::means::SpaceSpec;

/// One corpus member.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub spec: FunctionSpec,
    pub function: AnalyticFunction,
    pub kind: EntryKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryKind {
    Constant,
    Polynomial,
    /// `Σ 2^{−nα} z^{2^n}`.
    Lacunary { alpha: f64 },
    /// Closed forms with a boundary singularity.
    Singular,
}

impl CorpusEntry {
    pub fn new(spec: &str) -> Result<Self> {
        let parsed = FunctionSpec::parse_short(spec)?;
        let function = parsed.build()?;
        let kind = match &parsed {
            FunctionSpec::Lacunary { alpha } => EntryKind::Lacunary { alpha: *alpha },
            _ if function.is_polynomial() && function.coefficients().iter().skip(1).all(|c| c.norm() == 0.0) => {
                EntryKind::Constant
            }
            _ if function.is_polynomial() => EntryKind::Polynomial,
            _ => EntryKind::Singular,
        };
        Ok(Self {
            id: spec.to_string(),
            spec: parsed,
            function,
            kind,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.kind, EntryKind::Polynomial)
    }

    /// Mean-Lipschitz exponent of this entry in `space`, where it is known
    /// exactly (no logarithmic factors).
    pub fn known_exponent(&self, space: &SpaceSpec) -> Option<f64> {
        match self.kind {
            EntryKind::Polynomial => Some(1.0),
            EntryKind::Lacunary { alpha } => {
                let a = alpha + space_shift(space);
                (a > 0.0 && a < 1.0).then_some(a)
            }
            EntryKind::Constant | EntryKind::Singular => None,
        }
    }
}

/// The built-in corpus.
pub fn default_corpus() -> Vec<CorpusEntry> {
    DEFAULT_SPECS
        .iter()
        .map(|s| CorpusEntry::new(s).expect("built-in corpus spec parses"))
        .collect()
}

pub const DEFAULT_SPECS: &[&str] = &[
    "monomial:1",
    "monomial:2",
    "monomial:5",
    "poly:1,1",
    "poly:0,1,1",
    "poly:1,-0.5,0,0.25",
    "lacunary:0.25",
    "lacunary:0.5",
    "lacunary:0.75",
    "lacunary:1",
    "binomial:0.5",
    "geometric",
    "log",
    "constant:1",
];

/// How much the mean-Lipschitz exponent of `Σ 2^{−nα} z^{2^n}` moves away from
/// `α` in `space`. Bergman norms damp the `2^n`-th coefficient by `2^{−n/p}`,
/// the Dirichlet norm amplifies it by `2^{n/2}`.
fn space_shift(space: &SpaceSpec) -> f64 {
    match space {
        SpaceSpec::Hardy { .. } | SpaceSpec::DiscAlgebra => 0.0,
        SpaceSpec::Bergman { p } => 1.0 / p,
        SpaceSpec::Dirichlet => -0.5,
    }
}

/// Lacunary series whose mean-Lipschitz exponent in `space` is `alpha`.
pub fn lacunary_for_space(alpha: f64, space: &SpaceSpec) -> AnalyticFunction {
    AnalyticFunction::lacunary(alpha - space_shift(space))
}
