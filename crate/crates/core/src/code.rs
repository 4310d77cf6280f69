//! Exact-repair storage codes as families of subspaces.
//!
//! A code stores a message `x ∈ GF(2)^m` on `n` nodes; node `i` keeps the
//! `α` inner products of `x` with a basis of its storage space `U_i`.

use std::fmt;

use itertools::Itertools;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::{
    enumerate_subspaces_capped, subspace_sum, BitMatrix, Subspace, DEFAULT_ENUMERATION_CAP,
};

/// `(m; n, k, r, α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl CodeParams {
    /// Whether `k ≤ r ≤ n − 1` holds, as it must when a newcomer may
    /// contact any `r` live nodes. Codes with chosen repair sets (e.g.
    /// several disjoint repetition groups) can have `k > r`.
    pub fn is_regenerating_regime(&self) -> bool {
        self.k <= self.r && self.r < self.n
    }

    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.m as u64, (self.n * self.alpha) as u64)
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}; {},{},{},{},{})",
            self.m, self.n, self.k, self.r, self.alpha, self.beta
        )
    }
}

/// A linear exact-repair storage code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageCode {
    message_dim: usize,
    alpha: usize,
    nodes: Vec<Subspace>,
    bases: Vec<BitMatrix>,
    search_cap: u128,
}

impl StorageCode {
    /// Builds a code from per-node basis matrices (rows are the basis
    /// vectors `b_{i,j}`) and rejects it unless every invariant holds.
    pub fn new(message_dim: usize, bases: Vec<BitMatrix>) -> Result<Self> {
        let alpha = bases.first().map_or(0, BitMatrix::row_count);
        let code = Self::unchecked(message_dim, alpha, bases)?;
        let violations = code.validate();
        if violations.is_empty() {
            Ok(code)
        } else {
            Err(Error::InvalidCode(violations))
        }
    }

    /// Builds a code whose node bases are the canonical bases.
    pub fn from_subspaces(message_dim: usize, nodes: Vec<Subspace>) -> Result<Self> {
        Self::new(
            message_dim,
            nodes.iter().map(|s| s.basis().clone()).collect(),
        )
    }

    /// Builds a code without checking the storage invariants; only the
    /// column counts must match `message_dim`. Use [`Self::validate`].
    pub fn unchecked(message_dim: usize, alpha: usize, bases: Vec<BitMatrix>) -> Result<Self> {
        if let Some(b) = bases.iter().find(|b| b.col_count() != message_dim) {
            return Err(Error::DimensionMismatch {
                expected: message_dim,
                found: b.col_count(),
            });
        }
        Ok(Self {
            message_dim,
            alpha,
            nodes: bases.iter().map(Subspace::row_space).collect(),
            bases,
            search_cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    /// Overrides the subspace-enumeration cap used by repair searches.
    pub fn with_search_cap(mut self, cap: u128) -> Self {
        self.search_cap = cap;
        self
    }

    pub fn message_dim(&self) -> usize {
        self.message_dim
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn nodes(&self) -> &[Subspace] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Subspace {
        &self.nodes[i]
    }

    /// The basis matrix `B_i` used on the data plane.
    pub fn basis(&self, i: usize) -> &BitMatrix {
        &self.bases[i]
    }

    pub fn bases(&self) -> &[BitMatrix] {
        &self.bases
    }

    /// Human-readable descriptions of every violated invariant.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            out.push("code has no nodes".to_string());
            return out;
        }
        if self.alpha == 0 {
            out.push("storage capacity alpha must be positive".to_string());
        }
        for (i, (basis, space)) in self.bases.iter().zip(&self.nodes).enumerate() {
            if basis.row_count() != self.alpha {
                out.push(format!(
                    "node {i} has {} basis vectors, expected alpha = {}",
                    basis.row_count(),
                    self.alpha
                ));
            }
            if space.dim() != basis.row_count() {
                out.push(format!(
                    "node {i} basis is dependent: {} vectors span dimension {}",
                    basis.row_count(),
                    space.dim()
                ));
            } else if space.dim() != self.alpha {
                out.push(format!(
                    "node {i} has dimension {}, expected {}",
                    space.dim(),
                    self.alpha
                ));
            }
        }
        let all = subspace_sum(&self.nodes).expect("nodes share the ambient dimension");
        if !all.is_full() {
            out.push(format!(
                "nodes span only dimension {} of the {}-dimensional message space",
                all.dim(),
                self.message_dim
            ));
        }
        out
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// Span of the storage spaces of `set`.
    pub fn span_of(&self, set: &[usize]) -> Result<Subspace> {
        for &i in set {
            self.check_index(i)?;
        }
        let parts = set.iter().map(|&i| &self.nodes[i]);
        Ok(subspace_sum(parts).unwrap_or_else(|_| Subspace::zero(self.message_dim)))
    }

    pub fn is_recovery_set(&self, set: &[usize]) -> Result<bool> {
        Ok(self.span_of(set)?.is_full())
    }

    /// Size of the smallest recovery set, searched by increasing size.
    pub fn recovery_dimension(&self) -> usize {
        (1..=self.n())
            .find(|&s| {
                (0..self.n())
                    .combinations(s)
                    .any(|set| self.is_recovery_set(&set).unwrap())
            })
            .unwrap_or(self.n())
    }

    fn repair_candidates(&self, helper: usize, beta: usize) -> Result<Vec<Subspace>> {
        let basis = &self.bases[helper];
        let mut out = enumerate_subspaces_capped(basis.row_count(), beta, self.search_cap)?
            .map(|coords| Subspace::image_of(&coords, basis))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| a.basis().rows().cmp(b.basis().rows()));
        Ok(out)
    }

    /// Searches for β-dimensional repair spaces `W_i ⊆ U_i`, one per
    /// helper, whose span contains `U_failed`. Returns the first solution
    /// in lexicographic order of the helpers' canonical bases, or `None`
    /// when no choice covers the failed node.
    pub fn find_repair_plan(
        &self,
        failed: usize,
        helpers: &[usize],
        beta: usize,
    ) -> Result<Option<RepairPlan>> {
        self.check_index(failed)?;
        let mut helpers = helpers.to_vec();
        helpers.sort_unstable();
        for w in helpers.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParams(format!(
                    "helper {} listed twice",
                    w[0]
                )));
            }
        }
        for &h in &helpers {
            self.check_index(h)?;
            if h == failed {
                return Err(Error::InvalidParams(format!(
                    "failed node {failed} cannot help repair itself"
                )));
            }
        }
        if beta == 0 || beta > self.alpha {
            return Ok(None);
        }

        let target = &self.nodes[failed];
        let m = self.message_dim;
        // suffix[j] = span of the full storage spaces of helpers j..
        let mut suffix = vec![Subspace::zero(m); helpers.len() + 1];
        for j in (0..helpers.len()).rev() {
            suffix[j] = suffix[j + 1].sum(&self.nodes[helpers[j]])?;
        }
        if !suffix[0].contains_subspace(target)? {
            return Ok(None);
        }

        let mut search = PlanSearch {
            code: self,
            helpers: &helpers,
            beta,
            target,
            suffix: &suffix,
            candidates: vec![None; helpers.len()],
            chosen: Vec::with_capacity(helpers.len()),
        };
        let found = search.dfs(0, Subspace::zero(m))?;
        Ok(found.then(|| RepairPlan {
            failed,
            helpers: helpers.clone(),
            repair_spaces: search.chosen,
            beta,
        }))
    }

    /// The canonical plan for `failed`: smallest helper set, ties broken by
    /// the lexicographic order of helper sets and then of repair bases.
    pub fn canonical_repair_plan(&self, failed: usize, beta: usize) -> Result<Option<RepairPlan>> {
        self.check_index(failed)?;
        let others: Vec<usize> = (0..self.n()).filter(|&i| i != failed).collect();
        for size in 1..=others.len() {
            for set in others.iter().copied().combinations(size) {
                if let Some(plan) = self.find_repair_plan(failed, &set, beta)? {
                    return Ok(Some(plan));
                }
            }
        }
        Ok(None)
    }

    /// Canonical plans for every node, or `None` if some node cannot be
    /// repaired at all.
    pub fn canonical_repair_plans(&self, beta: usize) -> Result<Option<Vec<RepairPlan>>> {
        let mut plans = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            match self.canonical_repair_plan(i, beta)? {
                Some(p) => plans.push(p),
                None => return Ok(None),
            }
        }
        Ok(Some(plans))
    }

    /// Smallest `r` such that every node has a repair set of size `r`
    /// with respect to `beta`; `None` if some node is unrepairable.
    pub fn repair_locality(&self, beta: usize) -> Result<Option<usize>> {
        Ok(self
            .canonical_repair_plans(beta)?
            .map(|plans| plans.iter().map(|p| p.helpers.len()).max().unwrap_or(0)))
    }

    /// Coding rate `m/(nα)` and excess storage overhead `(nα − m)/m`.
    pub fn rate_and_overhead(&self) -> (Ratio<u64>, Ratio<u64>) {
        let m = self.message_dim as u64;
        let total = (self.n() * self.alpha) as u64;
        (Ratio::new(m, total), Ratio::new(total - m, m))
    }

    /// Recomputes `(m; n, k, r, α, β)` for the given transport capacity.
    pub fn params(&self, beta: usize) -> Result<Option<CodeParams>> {
        Ok(self.repair_locality(beta)?.map(|r| CodeParams {
            m: self.message_dim,
            n: self.n(),
            k: self.recovery_dimension(),
            r,
            alpha: self.alpha,
            beta,
        }))
    }

    /// Applies the linear map `v ↦ vᵀ·map` to every basis vector. A map
    /// that sends the code onto itself is an automorphism.
    pub fn map_linear(&self, map: &BitMatrix) -> Result<StorageCode> {
        let bases = self
            .bases
            .iter()
            .map(|b| map_rows(b, map))
            .collect::<Result<Vec<_>>>()?;
        let mut code = Self::unchecked(self.message_dim, self.alpha, bases)?;
        code.search_cap = self.search_cap;
        Ok(code)
    }
}

pub(crate) fn map_rows(rows: &BitMatrix, map: &BitMatrix) -> Result<BitMatrix> {
    let mapped = rows
        .rows()
        .iter()
        .map(|r| map.combine(r))
        .collect::<Result<Vec<_>>>()?;
    BitMatrix::new(map.col_count(), mapped)
}

/// The matrix of the coordinate permutation `e_i ↦ e_{perm[i]}`.
pub fn permutation_matrix(perm: &[usize]) -> Result<BitMatrix> {
    let m = perm.len();
    let mut seen = vec![false; m];
    for &p in perm {
        if p >= m || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParams(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    BitMatrix::new(
        m,
        perm.iter()
            .map(|&p| crate::linalg::BitVector::unit(m, p))
            .collect(),
    )
}

struct PlanSearch<'a> {
    code: &'a StorageCode,
    helpers: &'a [usize],
    beta: usize,
    target: &'a Subspace,
    suffix: &'a [Subspace],
    candidates: Vec<Option<Vec<Subspace>>>,
    chosen: Vec<Subspace>,
}

impl PlanSearch<'_> {
    fn dfs(&mut self, depth: usize, partial: Subspace) -> Result<bool> {
        if depth == self.helpers.len() {
            return partial.contains_subspace(self.target);
        }
        // every remaining helper contributes at most β new dimensions
        let remaining = self.helpers.len() - depth;
        if partial.sum(self.target)?.dim() > partial.dim() + self.beta * remaining {
            return Ok(false);
        }
        if !partial
            .sum(&self.suffix[depth])?
            .contains_subspace(self.target)?
        {
            return Ok(false);
        }
        if self.candidates[depth].is_none() {
            self.candidates[depth] = Some(
                self.code
                    .repair_candidates(self.helpers[depth], self.beta)?,
            );
        }
        let count = self.candidates[depth].as_ref().unwrap().len();
        for c in 0..count {
            let w = self.candidates[depth].as_ref().unwrap()[c].clone();
            let next = partial.sum(&w)?;
            self.chosen.push(w);
            if self.dfs(depth + 1, next)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

/// Helpers and their repair spaces for one failed node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepairPlan {
    pub failed: usize,
    /// Helper indices, ascending.
    pub helpers: Vec<usize>,
    /// `repair_spaces[j]` is `W_{helpers[j], failed}`.
    pub repair_spaces: Vec<Subspace>,
    pub beta: usize,
}

impl RepairPlan {
    pub fn new(
        failed: usize,
        helpers: Vec<usize>,
        repair_spaces: Vec<Subspace>,
        beta: usize,
    ) -> Self {
        let mut pairs: Vec<_> = helpers.into_iter().zip(repair_spaces).collect();
        pairs.sort_by_key(|(h, _)| *h);
        let (helpers, repair_spaces) = pairs.into_iter().unzip();
        Self {
            failed,
            helpers,
            repair_spaces,
            beta,
        }
    }

    pub fn locality(&self) -> usize {
        self.helpers.len()
    }

    /// Repair space used by helper `h`, if it is one.
    pub fn space_of(&self, h: usize) -> Option<&Subspace> {
        self.helpers
            .iter()
            .position(|&x| x == h)
            .map(|j| &self.repair_spaces[j])
    }

    /// Checks the plan against `code` independently of how it was found.
    pub fn validate(&self, code: &StorageCode) -> Vec<String> {
        let mut out = Vec::new();
        let n = code.n();
        if self.failed >= n {
            out.push(format!("failed node {} out of range", self.failed));
            return out;
        }
        if self.helpers.len() != self.repair_spaces.len() {
            out.push(format!(
                "{} helpers but {} repair spaces",
                self.helpers.len(),
                self.repair_spaces.len()
            ));
            return out;
        }
        if self.helpers.iter().duplicates().next().is_some() {
            out.push("helper listed twice".to_string());
        }
        for (&h, w) in self.helpers.iter().zip(&self.repair_spaces) {
            if h >= n {
                out.push(format!("helper {h} out of range"));
                continue;
            }
            if h == self.failed {
                out.push(format!("failed node {h} listed as its own helper"));
            }
            if w.ambient_dim() != code.message_dim() {
                out.push(format!(
                    "repair space of helper {h} has the wrong ambient dimension"
                ));
                continue;
            }
            if w.dim() != self.beta {
                out.push(format!(
                    "repair space of helper {h} has dimension {}, expected beta = {}",
                    w.dim(),
                    self.beta
                ));
            }
            if !code.node(h).contains_subspace(w).unwrap() {
                out.push(format!("repair space {w} is not inside node {h}"));
            }
        }
        if out.is_empty() {
            let cover = subspace_sum(&self.repair_spaces)
                .unwrap_or_else(|_| Subspace::zero(code.message_dim()));
            if !cover.contains_subspace(code.node(self.failed)).unwrap() {
                out.push(format!(
                    "repair spaces span {cover}, which does not contain node {} = {}",
                    self.failed,
                    code.node(self.failed)
                ));
            }
        }
        out
    }

    /// Image of the plan under `v ↦ vᵀ·map` with node indices relabelled
    /// by `relabel`.
    pub fn map(&self, map: &BitMatrix, relabel: impl Fn(usize) -> usize) -> Result<RepairPlan> {
        let spaces = self
            .repair_spaces
            .iter()
            .map(|w| Ok(Subspace::row_space(&map_rows(w.basis(), map)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(RepairPlan::new(
            relabel(self.failed),
            self.helpers.iter().map(|&h| relabel(h)).collect(),
            spaces,
            self.beta,
        ))
    }
}
