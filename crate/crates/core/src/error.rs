use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("duplicate site position {position:?} in sample {sample}")]
    DuplicateSite { sample: usize, position: [f64; 3] },

    #[error("explicit coupling table is not symmetric at pair ({i}, {j}): {forward} vs {backward}")]
    AsymmetricTable {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },

    #[error(
        "couplings of sample {sample} are not translation invariant: pair ({i}, {j}) deviates by {deviation:e}"
    )]
    NotTranslationInvariant {
        sample: usize,
        i: usize,
        j: usize,
        deviation: f64,
    },

    #[error("Hilbert space dimension {dimension} exceeds the cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error(
        "total S^z is not conserved (max |Dxx-Dyy|, |Dxy|, |Dzx|, |Dzy| = {violation:e}); run symmetry_report"
    )]
    SzNotConserved { violation: f64 },

    #[error("term does not conserve magnon number: {0}")]
    NonConservingTerm(String),

    #[error("Fock space is empty")]
    EmptyFockSpace,

    #[error("missing Fourier entry for {component} at {key}")]
    MissingFourier { key: String, component: String },

    #[error("synchronism impossible: lambda1 * lambda2 = {product:e} < 0")]
    SynchronismImpossible { product: f64 },

    #[error("negative radicand {radicand:e} in synchronism condition {form}")]
    NegativeRadicand { form: String, radicand: f64 },

    #[error("Fourier components are not symmetric: E(k) - E(-k) = {difference:e} in sample {sample}")]
    Asymmetry { sample: usize, difference: f64 },

    #[error("no solution in bracket [{lo}, {hi}]")]
    NoSolution {
        lo: f64,
        hi: f64,
        scanned: Vec<(f64, f64)>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero-norm initial state")]
    ZeroNorm,

    #[error("state {0:?} is not in the basis")]
    StateNotInBasis(Vec<u32>),
}
