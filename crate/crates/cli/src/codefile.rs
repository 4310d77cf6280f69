//! The TOML code file format.
//!
//! ```toml
//! format_version = 1
//! name = "example1"
//! m = 4
//! n = 4
//! alpha = 2
//!
//! [declared]
//! k = 2
//! r = 3
//! beta = 1
//!
//! [[nodes]]
//! basis = ["1000", "0011"]
//!
//! [[repair_plans]]
//! failed = 0
//! helpers = [1, 2, 3]
//! spaces = [["1001"], ["0010"], ["0001"]]
//! ```
//!
//! A `[functional]` table turns the file into a functional-repair
//! specification whose `nodes` are the starting arrangement.

use serde::{Deserialize, Serialize};
use storage_codes::code::{CodeParams, RepairPlan, StorageCode};
use storage_codes::constructions::{FunctionalSpec, NamedCode, SpecRule};
use storage_codes::{BitMatrix, Subspace};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub format_version: u32,
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub alpha: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared: Option<Declared>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Functional>,
    pub nodes: Vec<Node>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub repair_plans: Vec<Plan>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Declared {
    pub k: usize,
    pub r: usize,
    pub beta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Functional {
    /// `pairwise-trivial` or `subsets-span:<s>`.
    pub rules: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub basis: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    pub failed: usize,
    pub helpers: Vec<usize>,
    pub spaces: Vec<Vec<String>>,
}

/// A parsed file turned into library objects.
#[derive(Debug, Clone)]
pub enum Loaded {
    Exact {
        code: StorageCode,
        plans: Option<Vec<RepairPlan>>,
    },
    Functional {
        spec: FunctionalSpec,
        bases: Vec<BitMatrix>,
    },
}

#[derive(Debug)]
pub enum LoadError {
    Parse(String),
    Invalid(Vec<String>),
}

fn parse_rule(s: &str) -> Result<SpecRule, String> {
    if s == "pairwise-trivial" {
        return Ok(SpecRule::PairwiseTrivial);
    }
    s.strip_prefix("subsets-span:")
        .and_then(|k| k.parse().ok())
        .map(SpecRule::SubsetsSpan)
        .ok_or_else(|| format!("unknown rule {s:?}"))
}

fn rule_name(rule: &SpecRule) -> String {
    match rule {
        SpecRule::PairwiseTrivial => "pairwise-trivial".to_string(),
        SpecRule::SubsetsSpan(s) => format!("subsets-span:{s}"),
    }
}

impl CodeFile {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let file: CodeFile = toml::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(LoadError::Parse(format!(
                "unsupported format_version {}, expected {FORMAT_VERSION}",
                file.format_version
            )));
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("code files serialize")
    }

    pub fn from_named(named: &NamedCode) -> Self {
        let code = &named.code;
        Self {
            format_version: FORMAT_VERSION,
            name: named.name.clone(),
            m: code.message_dim(),
            n: code.n(),
            alpha: code.alpha(),
            declared: Some(Declared {
                k: named.declared.k,
                r: named.declared.r,
                beta: named.declared.beta,
            }),
            functional: None,
            nodes: code
                .bases()
                .iter()
                .map(|b| Node {
                    basis: b.to_strings(),
                })
                .collect(),
            repair_plans: named
                .repair_plans
                .iter()
                .flatten()
                .map(|p| Plan {
                    failed: p.failed,
                    helpers: p.helpers.clone(),
                    spaces: p
                        .repair_spaces
                        .iter()
                        .map(|w| w.basis().to_strings())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_functional(spec: &FunctionalSpec, bases: &[BitMatrix], declared: Declared) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            name: spec.name.clone(),
            m: spec.ambient_dim,
            n: spec.node_count,
            alpha: spec.node_dim,
            declared: Some(declared),
            functional: Some(Functional {
                rules: spec.rules.iter().map(rule_name).collect(),
            }),
            nodes: bases
                .iter()
                .map(|b| Node {
                    basis: b.to_strings(),
                })
                .collect(),
            repair_plans: Vec::new(),
        }
    }

    fn bases(&self) -> Result<Vec<BitMatrix>, LoadError> {
        let mut problems = Vec::new();
        if self.nodes.len() != self.n {
            problems.push(format!(
                "n = {} but {} nodes listed",
                self.n,
                self.nodes.len()
            ));
        }
        let mut out = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(bad) = node.basis.iter().find(|s| s.len() != self.m) {
                problems.push(format!(
                    "node {i}: vector {bad:?} does not have length m = {}",
                    self.m
                ));
                continue;
            }
            match BitMatrix::from_strs(self.m, &node.basis) {
                Ok(b) => out.push(b),
                Err(e) => problems.push(format!("node {i}: {e}")),
            }
        }
        if problems.is_empty() {
            Ok(out)
        } else {
            Err(LoadError::Invalid(problems))
        }
    }

    /// Builds the code, checking structure, declared parameters and plans.
    pub fn load(&self) -> Result<Loaded, LoadError> {
        let bases = self.bases()?;
        if let Some(f) = &self.functional {
            let rules = f
                .rules
                .iter()
                .map(|s| parse_rule(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(LoadError::Parse)?;
            let spec = FunctionalSpec {
                name: self.name.clone(),
                ambient_dim: self.m,
                node_count: self.n,
                node_dim: self.alpha,
                beta: self.declared.map_or(1, |d| d.beta),
                rules,
            };
            let spaces: Vec<Subspace> = bases.iter().map(Subspace::row_space).collect();
            let mut problems = spec.check(&spaces);
            for (i, b) in bases.iter().enumerate() {
                if b.row_count() != self.alpha {
                    problems.push(format!(
                        "node {i} has {} basis vectors, expected {}",
                        b.row_count(),
                        self.alpha
                    ));
                }
            }
            if !problems.is_empty() {
                return Err(LoadError::Invalid(problems));
            }
            return Ok(Loaded::Functional { spec, bases });
        }

        let code = StorageCode::unchecked(self.m, self.alpha, bases)
            .map_err(|e| LoadError::Invalid(vec![e.to_string()]))?;
        let problems = code.validate();
        if !problems.is_empty() {
            return Err(LoadError::Invalid(problems));
        }
        let plans = if self.repair_plans.is_empty() {
            None
        } else {
            let mut out = Vec::new();
            let mut problems = Vec::new();
            for (i, p) in self.repair_plans.iter().enumerate() {
                let spaces = p
                    .spaces
                    .iter()
                    .map(|w| Subspace::from_strs(self.m, w))
                    .collect::<Result<Vec<_>, _>>();
                match spaces {
                    Ok(spaces) => {
                        let beta = self.declared.map_or(1, |d| d.beta);
                        let plan = RepairPlan::new(p.failed, p.helpers.clone(), spaces, beta);
                        problems.extend(
                            plan.validate(&code)
                                .into_iter()
                                .map(|v| format!("plan {i}: {v}")),
                        );
                        out.push(plan);
                    }
                    Err(e) => problems.push(format!("plan {i}: {e}")),
                }
            }
            if !problems.is_empty() {
                return Err(LoadError::Invalid(problems));
            }
            Some(out)
        };
        Ok(Loaded::Exact { code, plans })
    }
}

/// Checks declared parameters against recomputed ones.
pub fn check_declared(declared: Option<Declared>, actual: &CodeParams) -> Vec<String> {
    match declared {
        Some(d) if (d.k, d.r, d.beta) != (actual.k, actual.r, actual.beta) => vec![format!(
            "declared k={} r={} beta={}, computed k={} r={} beta={}",
            d.k, d.r, d.beta, actual.k, actual.r, actual.beta
        )],
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use storage_codes::constructions::example1;

    #[test]
    fn round_trip() {
        let file = CodeFile::from_named(&example1());
        let text = file.to_toml();
        assert_eq!(CodeFile::parse(&text).unwrap(), file);
        assert!(
            matches!(file.load().unwrap(), Loaded::Exact { plans: Some(p), .. } if p.len() == 4)
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = CodeFile::parse("format_version = 1\nname = \"x\"\nm = 4\nn = \n").unwrap_err();
        let LoadError::Parse(msg) = err else { panic!() };
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in [SpecRule::PairwiseTrivial, SpecRule::SubsetsSpan(3)] {
            assert_eq!(parse_rule(&rule_name(&rule)).unwrap(), rule);
        }
        assert!(parse_rule("subsets-span:x").is_err());
    }
}
