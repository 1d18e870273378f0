use thiserror::Error;

use crate::cost::Cost;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{0} must be positive (got {1})")]
    NonPositive(&'static str, i64),
    #[error("alpha must be non-negative")]
    NegativeAlpha,
}

/// Design rules and pipeline switches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub w_min: i64,
    pub s_min: i64,
    /// Minimum coloring distance; closer same-mask features conflict.
    pub dis_m: i64,
    /// Minimum spacing between two trim-mask end-cuts.
    pub dis_c: i64,
    /// Minimum printed width of an end-cut.
    pub w_th: i64,
    /// Weight of one stitch relative to one conflict.
    pub alpha: Cost,
    /// Largest gap at which two end-cuts around a shared feature may merge.
    pub merge_gap: i64,
    pub enable_stitch: bool,
    pub enable_preselect: bool,
    pub enable_bridges: bool,
}

impl Config {
    /// Defaults derived from the two basic design rules:
    /// `dis_m = 2 w_min + 3 s_min`, `w_th = dis_c = dis_m`, `merge_gap = s_min`,
    /// `alpha = 1/10`.
    ///
    /// End-cut pre-selection defaults to off: contracting the two features of
    /// a conflict-free end-cut fixes their masks equal, and that can raise
    /// the optimum (see `decomposer::preselect_endcuts`).
    pub fn from_rules(w_min: i64, s_min: i64) -> Self {
        let dis_m = 2 * w_min + 3 * s_min;
        Self {
            w_min,
            s_min,
            dis_m,
            dis_c: dis_m,
            w_th: dis_m,
            alpha: Cost::new(1, 10),
            merge_gap: s_min,
            enable_stitch: true,
            enable_preselect: false,
            enable_bridges: true,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("w_min", self.w_min),
            ("s_min", self.s_min),
            ("dis_m", self.dis_m),
            ("dis_c", self.dis_c),
            ("w_th", self.w_th),
            ("merge_gap", self.merge_gap),
        ] {
            if v <= 0 {
                return Err(ConfigError::NonPositive(name, v));
            }
        }
        if self.alpha < Cost::from_integer(0) {
            return Err(ConfigError::NegativeAlpha);
        }
        Ok(())
    }

    pub(crate) fn dis_m_sq(&self) -> i128 {
        self.dis_m as i128 * self.dis_m as i128
    }

    pub(crate) fn dis_c_sq(&self) -> i128 {
        self.dis_c as i128 * self.dis_c as i128
    }

    pub(crate) fn merge_gap_sq(&self) -> i128 {
        self.merge_gap as i128 * self.merge_gap as i128
    }
}
