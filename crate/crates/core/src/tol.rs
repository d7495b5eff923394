use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default node-matching radius on the half-line.
pub const DEFAULT_EPS_NODE: f64 = 1e-9;

/// Default half-width of the band around x = 1 inside which the summed form
/// of `Q_n` is authoritative (the closed form loses ~8 digits there).
pub const DEFAULT_SINGULAR_BAND: f64 = 1e-4;

/// Numerical thresholds shared by every verdict-producing operation.
///
/// `eps_psd` is relative to the largest matrix entry, so positivity tests
/// behave the same whether the moments are O(1) or O(10^15).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Relative eigenvalue threshold for semidefiniteness tests.
    pub eps_psd: f64,
    /// Relative equality threshold for scalar comparisons and residual gates.
    pub eps_eq: f64,
    /// Node-matching radius on the half-line.
    pub eps_node: f64,
    /// Half-width around x = 1 for switching the `Q_n` evaluation form.
    pub singular_band: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_psd: 1e-8,
            eps_eq: 1e-7,
            eps_node: DEFAULT_EPS_NODE,
            singular_band: DEFAULT_SINGULAR_BAND,
        }
    }
}

impl ToleranceConfig {
    /// Checks that every threshold lies strictly inside (0, 1).
    pub fn validated(self) -> Result<Self> {
        let fields = [
            ("eps_psd", self.eps_psd),
            ("eps_eq", self.eps_eq),
            ("eps_node", self.eps_node),
            ("singular_band", self.singular_band),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {value} must lie strictly inside (0, 1)"
                )));
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validated().unwrap();
    }

    #[test]
    fn rejects_out_of_range_thresholds() {
        let mut tol = ToleranceConfig::default();
        tol.eps_psd = 0.0;
        assert!(tol.validated().is_err());
        let mut tol = ToleranceConfig::default();
        tol.eps_eq = 1.0;
        assert!(tol.validated().is_err());
        let mut tol = ToleranceConfig::default();
        tol.eps_node = -1e-9;
        assert!(tol.validated().is_err());
    }
}
