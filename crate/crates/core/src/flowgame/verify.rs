//! Game searches checked against the closed-form bounds.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{cutset_bound, theorem1_bound, theorem2_bound, Theorem1Case};
use crate::error::{Error, Result};
use crate::record::Record;

use super::game::{minimax_capped, GameRules, GameState, GameValue};
use super::graph::FlowGraph;

/// Parameter regime of a locality–rate bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameCase {
    AlphaEqBeta,
    AlphaEqRBeta,
    LocalityTwo,
}

impl GameCase {
    pub const ALL: [GameCase; 3] = [Self::AlphaEqBeta, Self::AlphaEqRBeta, Self::LocalityTwo];

    pub fn name(&self) -> &'static str {
        match self {
            Self::AlphaEqBeta => "alpha-eq-beta",
            Self::AlphaEqRBeta => "alpha-eq-r-beta",
            Self::LocalityTwo => "r2",
        }
    }

    /// Closed-form upper bound on `m` for this regime.
    pub fn formula(&self, n: u64, r: u64, alpha: u64, beta: u64) -> Result<u64> {
        let ok = match self {
            Self::AlphaEqBeta => alpha == beta,
            Self::AlphaEqRBeta => alpha == r * beta,
            Self::LocalityTwo => r == 2,
        };
        if !ok {
            return Err(Error::InvalidParams(format!(
                "case {} does not apply to r={r} alpha={alpha} beta={beta}",
                self.name()
            )));
        }
        match self {
            Self::AlphaEqBeta => theorem1_bound(Theorem1Case::AlphaEqBeta, n, r, alpha),
            Self::AlphaEqRBeta => theorem1_bound(Theorem1Case::AlphaEqRBeta, n, r, alpha),
            Self::LocalityTwo => Ok(theorem2_bound(n, alpha, beta)?.max_m),
        }
    }
}

impl fmt::Display for GameCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown case {s:?}")))
    }
}

/// Game value against the bound for one parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub case: GameCase,
    pub n: usize,
    pub r: usize,
    pub alpha: u64,
    pub beta: u64,
    pub formula: u64,
    pub game: GameValue,
}

impl TheoremReport {
    /// The required inequality: game value ≤ formula.
    pub fn holds(&self) -> bool {
        self.game.value <= self.formula
    }

    pub fn tight(&self) -> bool {
        self.game.value == self.formula
    }

    /// `holds`; `violated` if a search of at least `2n` rounds ends above
    /// the formula; otherwise `inconclusive` (capped or short search).
    pub fn verdict(&self) -> &'static str {
        if self.holds() {
            "holds"
        } else if self.game.capped || self.game.horizon < 2 * self.n {
            "inconclusive"
        } else {
            "violated"
        }
    }

    pub fn to_record(&self) -> Record {
        let mut rec = Record::new()
            .with("case", self.case.name())
            .with("n", self.n as u64)
            .with("r", self.r as u64)
            .with("alpha", self.alpha)
            .with("beta", self.beta)
            .with("formula", self.formula)
            .with("holds", self.holds())
            .with("verdict", self.verdict())
            .with("tight", self.tight());
        for (k, v) in self.game.to_record().fields() {
            rec.push(k, v.clone());
        }
        rec
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_record())
    }
}

/// Plays the game from the start to `horizon` rounds and compares the
/// value with the regime's formula.
pub fn verify_theorem(
    case: GameCase,
    n: usize,
    r: usize,
    alpha: u64,
    beta: u64,
    horizon: usize,
    cap: usize,
) -> Result<TheoremReport> {
    let formula = case.formula(n as u64, r as u64, alpha, beta)?;
    let state = GameState::new(GameRules::new(n, r, alpha, beta)?)?;
    let game = minimax_capped(&state, horizon, cap)?;
    Ok(TheoremReport {
        case,
        n,
        r,
        alpha,
        beta,
        formula,
        game,
    })
}

/// The classical adversarial sequence: `k` rounds, each killing the oldest
/// surviving original node and rebuilding from every earlier newcomer plus
/// the first surviving originals. Returns the max flow into the `k`
/// newcomers, which is the cutset bound.
pub fn scripted_cutset_value(n: usize, k: usize, r: usize, alpha: u64, beta: u64) -> Result<u64> {
    if k == 0 || k > r || r >= n {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= r < n, got n={n} k={k} r={r}"
        )));
    }
    let mut g = FlowGraph::initial(n, alpha)?;
    let mut newcomers = Vec::new();
    for j in 0..k {
        g.kill(j)?;
        let mut helpers = newcomers.clone();
        helpers.extend((j + 1..n).take(r - j));
        newcomers.push(g.rebuild(&helpers, beta)?);
    }
    g.collector_value_on(&newcomers)
}

/// Cutset bound computed both ways, for cross-checking.
pub fn scripted_cutset_check(
    n: usize,
    k: usize,
    r: usize,
    alpha: u64,
    beta: u64,
) -> Result<(u64, u64)> {
    Ok((
        scripted_cutset_value(n, k, r, alpha, beta)?,
        cutset_bound(k as u64, r as u64, alpha, beta)?,
    ))
}
