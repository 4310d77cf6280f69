//! Named code families.

use itertools::Itertools;

use crate::code::{permutation_matrix, CodeParams, RepairPlan, StorageCode};
use crate::error::{Error, Result};
use crate::linalg::{BitMatrix, BitVector, Subspace};

/// A code bundled with the parameters it is claimed to have and, where
/// known, one repair plan per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCode {
    pub name: String,
    pub code: StorageCode,
    pub declared: CodeParams,
    pub repair_plans: Option<Vec<RepairPlan>>,
}

impl NamedCode {
    /// Recomputes `k`, `r` and the rate of `code` and checks every
    /// supplied plan before accepting the declaration.
    pub fn new(
        name: impl Into<String>,
        code: StorageCode,
        declared: CodeParams,
        repair_plans: Option<Vec<RepairPlan>>,
    ) -> Result<Self> {
        let violations = code.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidCode(violations));
        }
        let actual = code.params(declared.beta)?.ok_or_else(|| {
            Error::DeclaredMismatch(format!(
                "some node cannot be repaired with beta = {}",
                declared.beta
            ))
        })?;
        if actual != declared {
            return Err(Error::DeclaredMismatch(format!(
                "declared {declared}, computed {actual}"
            )));
        }
        if let Some(plans) = &repair_plans {
            if plans.len() != code.n() {
                return Err(Error::InvalidPlan(vec![format!(
                    "{} plans for {} nodes",
                    plans.len(),
                    code.n()
                )]));
            }
            for (i, p) in plans.iter().enumerate() {
                let mut problems = p.validate(&code);
                if p.failed != i {
                    problems.push(format!("plan {i} repairs node {}", p.failed));
                }
                if p.beta != declared.beta {
                    problems.push(format!("plan {i} uses beta = {}", p.beta));
                }
                if !problems.is_empty() {
                    return Err(Error::InvalidPlan(problems));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            code,
            declared,
            repair_plans,
        })
    }

    /// Supplied plans, or the canonical ones computed from the code.
    pub fn plans_or_canonical(&self) -> Result<Vec<RepairPlan>> {
        match &self.repair_plans {
            Some(p) => Ok(p.clone()),
            None => self
                .code
                .canonical_repair_plans(self.declared.beta)?
                .ok_or_else(|| Error::DeclaredMismatch("code is not repairable".to_string())),
        }
    }
}

fn mat(m: usize, rows: &[&str]) -> BitMatrix {
    BitMatrix::from_strs(m, rows).expect("static basis")
}

/// The binary `(4; 4,2,3,2,1)` code with `U_i = ⟨e_i, e_{i+2} + e_{i+3}⟩`
/// (indices mod 4), invariant under the cyclic shift `e_i ↦ e_{i+1}`.
pub fn example1() -> NamedCode {
    let code = StorageCode::new(
        4,
        vec![
            mat(4, &["1000", "0011"]),
            mat(4, &["0100", "1001"]),
            mat(4, &["0010", "1100"]),
            mat(4, &["0001", "0110"]),
        ],
    )
    .expect("example 1 is a valid code");

    // node 0 downloads x0+x3, x2, x3; the other plans follow by rotation
    let plan0 = RepairPlan::new(
        0,
        vec![1, 2, 3],
        vec![
            Subspace::from_strs(4, &["1001"]).unwrap(),
            Subspace::from_strs(4, &["0010"]).unwrap(),
            Subspace::from_strs(4, &["0001"]).unwrap(),
        ],
        1,
    );
    let shift = permutation_matrix(&[1, 2, 3, 0]).unwrap();
    let mut plans = vec![plan0];
    for _ in 1..4 {
        let next = plans.last().unwrap().map(&shift, |i| (i + 1) % 4).unwrap();
        plans.push(next);
    }

    let declared = CodeParams {
        m: 4,
        n: 4,
        k: 2,
        r: 3,
        alpha: 2,
        beta: 1,
    };
    NamedCode::new("example1", code, declared, Some(plans)).expect("example 1 parameters hold")
}

/// Coordinate of the unordered pair `{i, j}` among all pairs of `0..n`
/// sorted lexicographically.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    assert!(a != b && b < n, "bad pair {{{i},{j}}} for n = {n}");
    // pairs with a smaller first element come first
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Largest `n` whose `C(n, 2)` coordinates fit in one word.
pub const RBT_MBR_MAX_N: usize = 11;

/// The rate-1/2 repair-by-transfer MBR code on `n` nodes: coordinates are
/// the pairs `{i, j}`, node `v` stores `x_{v,j}` for `j ≠ v`, and node `j`
/// repairs node `v` by sending `x_{v,j}` verbatim.
pub fn rbt_mbr(n: usize) -> Result<NamedCode> {
    if !(3..=RBT_MBR_MAX_N).contains(&n) {
        return Err(Error::InvalidParams(format!(
            "rbt-mbr needs 3 <= n <= {RBT_MBR_MAX_N}, got {n}"
        )));
    }
    let m = n * (n - 1) / 2;
    let unit = |v: usize, j: usize| BitVector::unit(m, pair_index(n, v, j));
    let bases = (0..n)
        .map(|v| BitMatrix::new(m, (0..n).filter(|&j| j != v).map(|j| unit(v, j)).collect()))
        .collect::<Result<Vec<_>>>()?;
    let code = StorageCode::new(m, bases)?;
    let plans = (0..n)
        .map(|v| {
            let helpers: Vec<usize> = (0..n).filter(|&j| j != v).collect();
            let spaces = helpers
                .iter()
                .map(|&j| Subspace::span(m, [unit(j, v)]))
                .collect::<Result<Vec<_>>>()?;
            Ok(RepairPlan::new(v, helpers, spaces, 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let declared = CodeParams {
        m,
        n,
        k: n - 1,
        r: n - 1,
        alpha: n - 1,
        beta: 1,
    };
    NamedCode::new(format!("rbt-mbr-{n}"), code, declared, Some(plans))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepetitionVariant {
    /// `r` group peers each send an `α/r`-dimensional slice.
    Split,
    /// A single peer sends its whole block (`β = α`).
    Copy,
}

impl RepetitionVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Split => "split",
            Self::Copy => "copy",
        }
    }
}

/// `n/(r+1)` groups of `r + 1` replicas; group `t` stores coordinates
/// `tα..(t+1)α` on each of its nodes.
pub fn repetition_code(
    n: usize,
    r: usize,
    alpha: usize,
    variant: RepetitionVariant,
) -> Result<NamedCode> {
    if r == 0 || alpha == 0 || !n.is_multiple_of(r + 1) {
        return Err(Error::InvalidParams(format!(
            "repetition code needs (r+1) | n with r, alpha >= 1; got n={n} r={r} alpha={alpha}"
        )));
    }
    if variant == RepetitionVariant::Split && !alpha.is_multiple_of(r) {
        return Err(Error::InvalidParams(format!(
            "split variant needs r | alpha; got r={r} alpha={alpha}"
        )));
    }
    let groups = n / (r + 1);
    let m = alpha * groups;
    let block = |t: usize, range: std::ops::Range<usize>| -> Vec<BitVector> {
        range.map(|c| BitVector::unit(m, t * alpha + c)).collect()
    };
    let bases = (0..n)
        .map(|i| BitMatrix::new(m, block(i / (r + 1), 0..alpha)))
        .collect::<Result<Vec<_>>>()?;
    let code = StorageCode::new(m, bases)?;

    let (beta, locality) = match variant {
        RepetitionVariant::Split => (alpha / r, r),
        RepetitionVariant::Copy => (alpha, 1),
    };
    let plans = (0..n)
        .map(|i| {
            let t = i / (r + 1);
            let peers: Vec<usize> = (t * (r + 1)..(t + 1) * (r + 1))
                .filter(|&p| p != i)
                .take(locality)
                .collect();
            let spaces = peers
                .iter()
                .enumerate()
                .map(|(slot, _)| Subspace::span(m, block(t, slot * beta..(slot + 1) * beta)))
                .collect::<Result<Vec<_>>>()?;
            Ok(RepairPlan::new(i, peers, spaces, beta))
        })
        .collect::<Result<Vec<_>>>()?;
    let declared = CodeParams {
        m,
        n,
        k: groups,
        r: locality,
        alpha,
        beta,
    };
    NamedCode::new(
        format!("repetition-{}-n{n}-r{r}-a{alpha}", variant.name()),
        code,
        declared,
        Some(plans),
    )
}

/// The binary `[r+1, r]` single-parity MDS code with `α = β = 1`.
pub fn parity_code(r: usize) -> Result<NamedCode> {
    if !(1..crate::linalg::MAX_DIM).contains(&r) {
        return Err(Error::InvalidParams(format!(
            "parity code needs 1 <= r < 64, got {r}"
        )));
    }
    let n = r + 1;
    let mut rows: Vec<BitVector> = (0..r).map(|i| BitVector::unit(r, i)).collect();
    rows.push(BitVector::from_support(r, 0..r));
    let bases = rows
        .iter()
        .map(|v| BitMatrix::new(r, vec![*v]))
        .collect::<Result<Vec<_>>>()?;
    let code = StorageCode::new(r, bases)?;
    let plans = (0..n)
        .map(|i| {
            let helpers: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let spaces = helpers.iter().map(|&j| code.node(j).clone()).collect();
            RepairPlan::new(i, helpers, spaces, 1)
        })
        .collect();
    let declared = CodeParams {
        m: r,
        n,
        k: r,
        r,
        alpha: 1,
        beta: 1,
    };
    NamedCode::new(format!("parity-{n}"), code, declared, Some(plans))
}

/// A decidable rule over the list of current node subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecRule {
    /// `U_i ∩ U_j = {0}` for all `i ≠ j`.
    PairwiseTrivial,
    /// Every `s`-subset of nodes spans the message space.
    SubsetsSpan(usize),
}

/// A functional-repair code given as rules a subspace arrangement must
/// keep satisfying.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalSpec {
    pub name: String,
    pub ambient_dim: usize,
    pub node_count: usize,
    pub node_dim: usize,
    pub beta: usize,
    pub rules: Vec<SpecRule>,
}

impl FunctionalSpec {
    /// Violations of the rules by `nodes`; empty iff the state is valid.
    pub fn check(&self, nodes: &[Subspace]) -> Vec<String> {
        let mut out = Vec::new();
        if nodes.len() != self.node_count {
            out.push(format!(
                "{} nodes, expected {}",
                nodes.len(),
                self.node_count
            ));
            return out;
        }
        for (i, u) in nodes.iter().enumerate() {
            if u.ambient_dim() != self.ambient_dim || u.dim() != self.node_dim {
                out.push(format!(
                    "node {i} is {}-dimensional in GF(2)^{}, expected {} in GF(2)^{}",
                    u.dim(),
                    u.ambient_dim(),
                    self.node_dim,
                    self.ambient_dim
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for rule in &self.rules {
            match *rule {
                SpecRule::PairwiseTrivial => {
                    for (i, j) in (0..nodes.len()).tuple_combinations() {
                        if !nodes[i].intersect(&nodes[j]).unwrap().is_zero() {
                            out.push(format!("nodes {i} and {j} intersect nontrivially"));
                        }
                    }
                }
                SpecRule::SubsetsSpan(s) => {
                    for set in (0..nodes.len()).combinations(s) {
                        let span =
                            crate::linalg::subspace_sum(set.iter().map(|&i| &nodes[i])).unwrap();
                        if !span.is_full() {
                            out.push(format!("nodes {set:?} span only dimension {}", span.dim()));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_satisfied(&self, nodes: &[Subspace]) -> bool {
        self.check(nodes).is_empty()
    }
}

/// The `(5; 4,3,3,2,1)` functional-repair specification: any two node
/// spaces meet trivially and any three span GF(2)^5.
pub fn example3_spec() -> FunctionalSpec {
    FunctionalSpec {
        name: "example3".to_string(),
        ambient_dim: 5,
        node_count: 4,
        node_dim: 2,
        beta: 1,
        rules: vec![SpecRule::PairwiseTrivial, SpecRule::SubsetsSpan(3)],
    }
}

/// A starting arrangement for [`example3_spec`], as node basis matrices.
pub fn example3_initial() -> Vec<BitMatrix> {
    vec![
        mat(5, &["10000", "00100"]),
        mat(5, &["01000", "00010"]),
        mat(5, &["00001", "11000"]),
        mat(5, &["00110", "00101"]),
    ]
}

/// Every bundled family at a representative size.
pub fn catalogue() -> Result<Vec<NamedCode>> {
    let mut out = vec![example1()];
    for n in 3..=7 {
        out.push(rbt_mbr(n)?);
    }
    for r in 1..=5 {
        out.push(parity_code(r)?);
    }
    out.push(repetition_code(4, 3, 3, RepetitionVariant::Split)?);
    out.push(repetition_code(4, 3, 3, RepetitionVariant::Copy)?);
    out.push(repetition_code(3, 2, 2, RepetitionVariant::Split)?);
    out.push(repetition_code(6, 2, 2, RepetitionVariant::Split)?);
    out.push(repetition_code(6, 2, 2, RepetitionVariant::Copy)?);
    Ok(out)
}
