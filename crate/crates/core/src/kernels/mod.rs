//! Fourier kernel evaluation, diagonal and off-diagonal asymptotics,
//! stratum selection, cyclic averaging and convention calibration.

pub mod averaging;
pub mod calibrate;
pub mod eval;
pub mod fits;
pub mod stratum;

pub use averaging::{averaged_kernel, cyclic_act, AveragedKernel};
pub use calibrate::{calibrate, calibrate_dim, Calibration};
pub use eval::{
    diagonal_series, reproducing_check, szego_diag, szego_eval, szego_eval_log, DiagonalSeries,
    KernelValue,
};
pub use fits::{fit_leading, offdiag_decay, DecayFit, FitResult};
pub use stratum::{stratum_selection, SelectionReport};
