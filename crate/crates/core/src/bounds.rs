//! Closed-form storage bounds, all in exact integer or rational arithmetic.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::record::Record;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg()))
    }
}

fn positive(pairs: &[(&str, u64)]) -> Result<()> {
    for (name, v) in pairs {
        require(*v > 0, || format!("{name} must be positive"))?;
    }
    Ok(())
}

/// Max-flow bound on storable information with `k`-node recovery and
/// `r` helpers each sending `β`: `Σ_{j<k} min((r − j)β, α)`.
pub fn cutset_bound(k: u64, r: u64, alpha: u64, beta: u64) -> Result<u64> {
    positive(&[("k", k), ("alpha", alpha), ("beta", beta)])?;
    require(k <= r, || format!("need k <= r, got k={k} r={r}"))?;
    Ok((0..k).map(|j| ((r - j) * beta).min(alpha)).sum())
}

/// Minimum-storage point: `α = (r − k + 1)β`, `m = kα`.
pub fn msr_point(k: u64, r: u64, beta: u64) -> Result<(u64, u64)> {
    positive(&[("k", k), ("beta", beta)])?;
    require(k <= r, || format!("need k <= r, got k={k} r={r}"))?;
    let alpha = (r - k + 1) * beta;
    Ok((alpha, k * alpha))
}

/// Minimum-bandwidth point: `α = rβ`, `m = β(kr − k(k−1)/2)`.
pub fn mbr_point(k: u64, r: u64, beta: u64) -> Result<(u64, u64)> {
    positive(&[("k", k), ("beta", beta)])?;
    require(k <= r, || format!("need k <= r, got k={k} r={r}"))?;
    Ok((r * beta, beta * (k * r - k * (k - 1) / 2)))
}

/// Smallest length of a linear `[n, k, d]` code with locality `r`:
/// `k + ⌈k/r⌉ + d − 2`.
pub fn linear_locality_distance_bound(k: u64, r: u64, d: u64) -> Result<u64> {
    positive(&[("k", k), ("r", r), ("d", d)])?;
    Ok(k + k.div_ceil(r) + d - 2)
}

/// Largest information-theoretical distance:
/// `n − ⌈m/α⌉ − ⌈m/(rα)⌉ + 2`. Nonpositive results are returned as-is.
pub fn info_distance_bound(n: u64, m: u64, r: u64, alpha: u64) -> Result<i64> {
    positive(&[("n", n), ("m", m), ("r", r), ("alpha", alpha)])?;
    Ok(n as i64 - m.div_ceil(alpha) as i64 - m.div_ceil(r * alpha) as i64 + 2)
}

/// The two extreme transport regimes of the locality–rate bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem1Case {
    /// `α = β`: rate at most `r/(r+1)`.
    AlphaEqBeta,
    /// `α = rβ`: rate at most `1/2`.
    AlphaEqRBeta,
}

impl Theorem1Case {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AlphaEqBeta => "alpha-eq-beta",
            Self::AlphaEqRBeta => "alpha-eq-r-beta",
        }
    }

    pub fn max_rate(&self, r: u64) -> Ratio<u64> {
        match self {
            Self::AlphaEqBeta => Ratio::new(r, r + 1),
            Self::AlphaEqRBeta => Ratio::new(1, 2),
        }
    }
}

/// Largest integer `m` allowed by the rate bound: `⌊nα · R_max⌋`.
pub fn theorem1_bound(case: Theorem1Case, n: u64, r: u64, alpha: u64) -> Result<u64> {
    positive(&[("n", n), ("r", r), ("alpha", alpha)])?;
    Ok((case.max_rate(r) * (n * alpha)).to_integer())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Theorem2Bound {
    pub q: u64,
    pub e: u64,
    pub max_m: u64,
    /// `(α + β)/(3α)`.
    pub max_rate: Ratio<u64>,
}

/// Locality-2 bound: with `n = 3q − e`, `e ∈ {0,1,2}`, `m ≤ qα + (q − e)β`.
pub fn theorem2_bound(n: u64, alpha: u64, beta: u64) -> Result<Theorem2Bound> {
    positive(&[("alpha", alpha), ("beta", beta)])?;
    require(n >= 3, || format!("need n >= 3, got {n}"))?;
    let q = n.div_ceil(3);
    let e = 3 * q - n;
    Ok(Theorem2Bound {
        q,
        e,
        max_m: q * alpha + (q - e) * beta,
        max_rate: Ratio::new(alpha + beta, 3 * alpha),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Integer(i64),
    Point { alpha: u64, m: u64 },
    Rated { max_m: u64, max_rate: Ratio<u64> },
}

/// A bound evaluation with its inputs, ready for printing.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound: &'static str,
    pub inputs: Vec<(&'static str, u64)>,
    pub value: BoundValue,
    /// Whether a bundled construction meets the bound, and which one.
    pub tight: Option<(bool, String)>,
    pub note: Option<String>,
}

impl BoundReport {
    pub fn cutset(k: u64, r: u64, alpha: u64, beta: u64) -> Result<Self> {
        let v = cutset_bound(k, r, alpha, beta)?;
        Ok(Self::plain(
            "cutset",
            vec![("k", k), ("r", r), ("alpha", alpha), ("beta", beta)],
            BoundValue::Integer(v as i64),
        ))
    }

    pub fn msr(k: u64, r: u64, beta: u64) -> Result<Self> {
        let (alpha, m) = msr_point(k, r, beta)?;
        Ok(Self::plain(
            "msr",
            vec![("k", k), ("r", r), ("beta", beta)],
            BoundValue::Point { alpha, m },
        ))
    }

    pub fn mbr(k: u64, r: u64, beta: u64) -> Result<Self> {
        let (alpha, m) = mbr_point(k, r, beta)?;
        Ok(Self::plain(
            "mbr",
            vec![("k", k), ("r", r), ("beta", beta)],
            BoundValue::Point { alpha, m },
        ))
    }

    pub fn lrc_linear(k: u64, r: u64, d: u64) -> Result<Self> {
        let v = linear_locality_distance_bound(k, r, d)?;
        let mut rep = Self::plain(
            "lrc-linear",
            vec![("k", k), ("r", r), ("d", d)],
            BoundValue::Integer(v as i64),
        );
        rep.note = Some("value is the minimum length n".to_string());
        Ok(rep)
    }

    pub fn info_distance(n: u64, m: u64, r: u64, alpha: u64) -> Result<Self> {
        let v = info_distance_bound(n, m, r, alpha)?;
        let mut rep = Self::plain(
            "info-distance",
            vec![("n", n), ("m", m), ("r", r), ("alpha", alpha)],
            BoundValue::Integer(v),
        );
        rep.note = Some(if v <= 0 {
            "no positive distance is feasible".to_string()
        } else {
            "value is the maximum distance d".to_string()
        });
        Ok(rep)
    }

    pub fn theorem1(case: Theorem1Case, n: u64, r: u64, alpha: u64) -> Result<Self> {
        let v = theorem1_bound(case, n, r, alpha)?;
        let mut rep = Self::plain(
            "theorem1",
            vec![("n", n), ("r", r), ("alpha", alpha)],
            BoundValue::Rated {
                max_m: v,
                max_rate: case.max_rate(r),
            },
        );
        rep.note = Some(format!("case {}; max_m = floor(n*alpha*rate)", case.name()));
        if n == r + 1 {
            rep.tight = Some(match case {
                Theorem1Case::AlphaEqBeta => (true, "parity".to_string()),
                Theorem1Case::AlphaEqRBeta => (true, "rbt-mbr".to_string()),
            });
        }
        Ok(rep)
    }

    pub fn theorem2(n: u64, alpha: u64, beta: u64) -> Result<Self> {
        let t = theorem2_bound(n, alpha, beta)?;
        let mut rep = Self::plain(
            "theorem2",
            vec![("n", n), ("alpha", alpha), ("beta", beta)],
            BoundValue::Rated {
                max_m: t.max_m,
                max_rate: t.max_rate,
            },
        );
        rep.note = Some(format!("r=2, q={}, e={}", t.q, t.e));
        Ok(rep)
    }

    fn plain(bound: &'static str, inputs: Vec<(&'static str, u64)>, value: BoundValue) -> Self {
        Self {
            bound,
            inputs,
            value,
            tight: None,
            note: None,
        }
    }

    pub fn to_record(&self) -> Record {
        let mut rec = Record::new().with("bound", self.bound);
        for (k, v) in &self.inputs {
            rec.push(k, *v);
        }
        match &self.value {
            BoundValue::Integer(v) => rec.push("value", *v),
            BoundValue::Point { alpha, m } => {
                rec.push("value_alpha", *alpha);
                rec.push("value_m", *m);
            }
            BoundValue::Rated { max_m, max_rate } => {
                rec.push("value", *max_m);
                rec.push("max_rate", max_rate.to_string());
            }
        }
        if let Some((tight, witness)) = &self.tight {
            rec.push("tight", *tight);
            rec.push("witness", witness.as_str());
        }
        if let Some(note) = &self.note {
            rec.push("note", note.as_str());
        }
        rec
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_record())
    }
}
