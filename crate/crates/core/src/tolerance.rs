use serde::{Deserialize, Serialize};

/// Every numerical threshold in the crate, in one place.
///
/// All values are relative unless stated otherwise. The defaults correspond to a global
/// tolerance of `1e-9`; [`Tolerances::scaled`] rescales them together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Hermiticity and reconstruction checks, relative to `‖M‖_F`.
    pub hermitian: f64,
    /// `λ_min ≥ −psd · max(1, λ_max)`.
    pub psd: f64,
    /// Range projectors keep singular values above `rank · s_max`.
    pub rank: f64,
    /// Eigenvalues within `cluster · λ_max` of each other are treated as degenerate.
    pub cluster: f64,
    /// Schmidt coefficients below `schmidt_cutoff · s_max` are discarded.
    pub schmidt_cutoff: f64,
    /// Split checks, zero-map detection and invariance residuals.
    pub decomposition: f64,
    /// Fresh random draws allowed when isolating a block inside a degenerate eigenspace.
    pub retries: usize,
    /// Power iteration stopping threshold on successive normalized iterates.
    pub power_tol: f64,
    pub power_max_iter: usize,
    /// Unbiasedness and resolution-identity checks for MUB sets.
    pub mub: f64,
    /// Gap around 0 and 1 for the spectrum of the completion operator.
    pub spectrum_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            psd: 1e-9,
            rank: 1e-9,
            cluster: 1e-8,
            schmidt_cutoff: 1e-12,
            decomposition: 1e-9,
            retries: 5,
            power_tol: 1e-12,
            power_max_iter: 10_000,
            mub: 1e-9,
            spectrum_gap: 1e-8,
        }
    }
}

impl Tolerances {
    pub const DEFAULT_GLOBAL: f64 = 1e-9;

    /// Scales every threshold by `global / 1e-9`, leaving iteration counts untouched.
    pub fn scaled(&self, global: f64) -> Self {
        let f = global / Self::DEFAULT_GLOBAL;
        Self {
            hermitian: self.hermitian * f,
            psd: self.psd * f,
            rank: self.rank * f,
            cluster: self.cluster * f,
            schmidt_cutoff: self.schmidt_cutoff * f,
            decomposition: self.decomposition * f,
            retries: self.retries,
            power_tol: self.power_tol * f,
            power_max_iter: self.power_max_iter,
            mub: self.mub * f,
            spectrum_gap: self.spectrum_gap * f,
        }
    }

    pub fn with_global(global: f64) -> Self {
        Self::default().scaled(global)
    }
}
