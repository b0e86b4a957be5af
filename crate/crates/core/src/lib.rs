//! Analytical and desk-scale numerical models of a flip-chip stack of two
//! superconducting chips, each carrying a transmon and a quarter-wave readout
//! resonator, coupled through a dielectric interlayer.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod coupling;
pub mod cpw;
pub mod device;
pub mod fieldsolve;
pub mod format;
pub mod loss;
pub mod network;
pub mod numerics;
pub mod transmon;

pub use coupling::{CoupledPair, CouplingError, CouplingGeometry};
pub use cpw::{CpwError, CpwGeometry, ResonatorSpec};
pub use device::{
    analyze, parse_spec, sweep, DeviceError, DeviceReport, DeviceSpec, Dimension, SweepParameter,
    SweepTable,
};
pub use fieldsolve::{CrossSection, FieldSolution, FieldSolveError, SolverOptions};
pub use loss::{LossBudget, LossError, LossRegion};
pub use network::{FrequencyResponse, NetworkError, NotchResonator, SParams, TwoPortABCD};
pub use numerics::{NumericsError, RealInterval, SymmetricMatrix};
pub use transmon::{EnergyScales, TransmonError, TransmonParams};

/// Any failure raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Cpw(#[from] CpwError),
    #[error(transparent)]
    FieldSolve(#[from] FieldSolveError),
    #[error(transparent)]
    Transmon(#[from] TransmonError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

fn numerics_failed(e: &NumericsError) -> bool {
    matches!(e, NumericsError::Bracket { .. })
}

impl Error {
    /// True when the inputs were acceptable but a numerical method failed
    /// (non-convergence, extraction, a truncated basis); false for
    /// validation errors.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerics(e) => numerics_failed(e),
            Error::Cpw(CpwError::Numerics(e)) => numerics_failed(e),
            Error::Cpw(_) => false,
            Error::FieldSolve(e) => matches!(e, FieldSolveError::NonConvergence { .. }),
            Error::Transmon(TransmonError::Cutoff { .. }) => true,
            Error::Transmon(TransmonError::Numerics(e)) => numerics_failed(e),
            Error::Transmon(_) => false,
            Error::Network(e) => {
                matches!(e, NetworkError::Extraction(_) | NetworkError::Ambiguous(_))
            }
            Error::Coupling(CouplingError::DispersiveBreakdown(_)) => true,
            Error::Coupling(CouplingError::Numerics(e)) => numerics_failed(e),
            Error::Coupling(_) => false,
            Error::Loss(_) => false,
            Error::Device(e) => match e {
                DeviceError::Config(_) | DeviceError::Sweep(_) => false,
                DeviceError::Cpw(e) => Error::Cpw(e.clone()).is_numerical(),
                DeviceError::Transmon(e) => Error::Transmon(e.clone()).is_numerical(),
                DeviceError::Network(e) => Error::Network(e.clone()).is_numerical(),
                DeviceError::Coupling(e) => Error::Coupling(e.clone()).is_numerical(),
                DeviceError::Loss(_) => false,
            },
        }
    }
}
