//! Resource limits shared by every evaluator in the crate.

/// Environment variable overriding [`Budget::DEFAULT_BITS`].
pub const BIT_BUDGET_ENV: &str = "ATL_BIT_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest intermediate integer, in bits, an evaluator may materialize.
    pub bits: u64,
    /// Largest number of lattice points a brute-force enumeration may visit.
    pub points: u64,
}

impl Budget {
    pub const DEFAULT_BITS: u64 = 1 << 24;
    pub const DEFAULT_POINTS: u64 = 10_000_000;

    pub const fn new(bits: u64, points: u64) -> Self {
        Budget { bits, points }
    }

    /// Defaults, with the bit limit taken from `ATL_BIT_BUDGET` when set.
    pub fn from_env() -> Self {
        let bits = std::env::var(BIT_BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(Self::DEFAULT_BITS);
        Budget::new(bits, Self::DEFAULT_POINTS)
    }

    pub fn with_bits(self, bits: u64) -> Self {
        Budget { bits, ..self }
    }

    pub fn with_points(self, points: u64) -> Self {
        Budget { points, ..self }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_BITS, Self::DEFAULT_POINTS)
    }
}
