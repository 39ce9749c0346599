use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{ceil_log2, Prob};
use crate::error::{domain, Error, Result};
use crate::model::NoiseModel;

/// Which protocol variant to run.
///
/// `rounds` is the number of qubit-pair parity measurements of a subspace
/// readout; `embedded` is the number of ensemble copies embedded into the
/// auxiliary register (`d = 2^embedded`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    Rank2Full,
    Rank2Subspace { rounds: u32 },
    WernerFull,
    WernerSubspace { rounds: u32 },
    DirectEmbedMeasure { embedded: u32 },
    EmbedEng { embedded: u32 },
    EmbedEngSubspace { embedded: u32, rounds: u32 },
    SingleCopyBaseline,
}

/// How the auxiliary register is prepared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxInit {
    /// Ideal `|Φ^d_00⟩`.
    Pure,
    /// `embedded` noisy copies, depolarized to isotropic form.
    Embedded(u32),
}

/// How the auxiliary register is read out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Readout {
    Full,
    Subspace(u32),
}

impl Strategy {
    /// Short CLI/CSV name.
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Rank2Full => "rank2-full",
            Strategy::Rank2Subspace { .. } => "rank2-subspace",
            Strategy::WernerFull => "werner-full",
            Strategy::WernerSubspace { .. } => "werner-subspace",
            Strategy::DirectEmbedMeasure { .. } => "direct-embed",
            Strategy::EmbedEng { .. } => "embed-eng",
            Strategy::EmbedEngSubspace { .. } => "embed-eng-subspace",
            Strategy::SingleCopyBaseline => "single-copy",
        }
    }

    /// Builds a strategy from its name and the optional `m` (subspace rounds)
    /// and `m_embed` parameters.
    pub fn from_parts(name: &str, rounds: Option<u32>, embedded: Option<u32>) -> Result<Self> {
        let need = |v: Option<u32>, what: &str| {
            v.ok_or_else(|| Error::Domain(format!("strategy {name} requires {what}")))
        };
        Ok(match name {
            "rank2-full" => Strategy::Rank2Full,
            "rank2-subspace" => Strategy::Rank2Subspace { rounds: need(rounds, "m")? },
            "werner-full" => Strategy::WernerFull,
            "werner-subspace" => Strategy::WernerSubspace { rounds: need(rounds, "m")? },
            "direct-embed" => Strategy::DirectEmbedMeasure { embedded: need(embedded, "m_embed")? },
            "embed-eng" => Strategy::EmbedEng { embedded: need(embedded, "m_embed")? },
            "embed-eng-subspace" => Strategy::EmbedEngSubspace {
                embedded: need(embedded, "m_embed")?,
                rounds: need(rounds, "m")?,
            },
            "single-copy" => Strategy::SingleCopyBaseline,
            other => return domain(format!("unknown strategy {other}")),
        })
    }

    pub fn rounds(&self) -> Option<u32> {
        match self {
            Strategy::Rank2Subspace { rounds }
            | Strategy::WernerSubspace { rounds }
            | Strategy::EmbedEngSubspace { rounds, .. } => Some(*rounds),
            _ => None,
        }
    }

    pub fn embedded(&self) -> Option<u32> {
        match self {
            Strategy::DirectEmbedMeasure { embedded }
            | Strategy::EmbedEng { embedded }
            | Strategy::EmbedEngSubspace { embedded, .. } => Some(*embedded),
            _ => None,
        }
    }

    /// Noise family the strategy was designed for, at fidelity `F`.
    pub fn design_noise<P: Prob>(&self, fidelity: P) -> Result<NoiseModel<P>> {
        match self {
            Strategy::Rank2Full | Strategy::Rank2Subspace { .. } | Strategy::SingleCopyBaseline => {
                NoiseModel::rank2(fidelity)
            }
            _ => NoiseModel::werner(fidelity),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match (self.embedded(), self.rounds()) {
            (Some(e), Some(r)) => write!(f, "(m_embed={e},m={r})"),
            (Some(e), None) => write!(f, "(m_embed={e})"),
            (None, Some(r)) => write!(f, "(m={r})"),
            (None, None) => Ok(()),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// Parses names without parameters; parameterized strategies need
    /// [`Strategy::from_parts`].
    fn from_str(s: &str) -> Result<Self> {
        Strategy::from_parts(s, None, None)
    }
}

/// A strategy together with the ensemble size it is applied to.
///
/// For [`Strategy::SingleCopyBaseline`], `n` is the number of copies
/// measured. For [`Strategy::DirectEmbedMeasure`], `n` must be zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategySpec {
    pub strategy: Strategy,
    pub n: u64,
}

/// Largest auxiliary dimension exponent supported by the symbolic layers.
pub const MAX_EMBEDDED: u32 = 40;

impl StrategySpec {
    pub fn new(strategy: Strategy, n: u64) -> Result<Self> {
        let spec = Self { strategy, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        match self.strategy {
            Strategy::DirectEmbedMeasure { .. } if n != 0 => {
                return domain("direct-embed measures the auxiliary register only; n must be 0")
            }
            Strategy::DirectEmbedMeasure { .. } | Strategy::EmbedEng { .. } | Strategy::EmbedEngSubspace { .. } => {}
            _ if n == 0 => return domain("ensemble size must be >= 1"),
            _ => {}
        }
        if let Some(e) = self.strategy.embedded() {
            if e == 0 || e > MAX_EMBEDDED {
                return domain(format!("m_embed must lie in 1..={MAX_EMBEDDED}, got {e}"));
            }
            if (1u64 << e) < n + 1 {
                return domain(format!("2^m_embed = {} is smaller than n + 1 = {}", 1u64 << e, n + 1));
            }
        }
        if let (Some(r), Some(d)) = (self.strategy.rounds(), self.aux_dim()) {
            let k = ceil_log2(d);
            if r == 0 || r > k {
                return domain(format!("subspace rounds must lie in 1..={k} for d = {d}, got {r}"));
            }
        }
        Ok(())
    }

    /// Auxiliary dimension, or `None` for the single-copy baseline.
    ///
    /// Full readout with a pure register uses `d = n + 1`; every other
    /// collective strategy uses a power of two so subspace readouts decompose
    /// into qubit-pair parities.
    pub fn aux_dim(&self) -> Option<u64> {
        match self.strategy {
            Strategy::Rank2Full | Strategy::WernerFull => Some(self.n + 1),
            Strategy::Rank2Subspace { .. } | Strategy::WernerSubspace { .. } => {
                Some(1u64 << ceil_log2(self.n + 1).max(1))
            }
            Strategy::DirectEmbedMeasure { embedded }
            | Strategy::EmbedEng { embedded }
            | Strategy::EmbedEngSubspace { embedded, .. } => Some(1u64 << embedded),
            Strategy::SingleCopyBaseline => None,
        }
    }

    pub fn aux_init(&self) -> AuxInit {
        match self.strategy.embedded() {
            Some(e) => AuxInit::Embedded(e),
            None => AuxInit::Pure,
        }
    }

    pub fn readout(&self) -> Readout {
        match self.strategy.rounds() {
            Some(r) => Readout::Subspace(r),
            None => Readout::Full,
        }
    }

    /// Ensemble copies destroyed by the protocol when it runs to completion.
    pub fn copies_consumed(&self) -> u64 {
        match self.strategy {
            Strategy::Rank2Full | Strategy::WernerFull => ceil_log2(self.n + 1) as u64,
            Strategy::Rank2Subspace { rounds } | Strategy::WernerSubspace { rounds } => rounds as u64,
            Strategy::DirectEmbedMeasure { embedded }
            | Strategy::EmbedEng { embedded }
            | Strategy::EmbedEngSubspace { embedded, .. } => embedded as u64,
            Strategy::SingleCopyBaseline => self.n,
        }
    }

    /// Entanglement measured when the protocol runs to completion.
    pub fn ebits_consumed(&self) -> f64 {
        match self.strategy {
            Strategy::Rank2Full | Strategy::WernerFull => ((self.n + 1) as f64).log2(),
            Strategy::SingleCopyBaseline => self.n as f64,
            _ => match self.readout() {
                Readout::Subspace(r) => r as f64,
                Readout::Full => self.strategy.embedded().unwrap_or(0) as f64,
            },
        }
    }
}
