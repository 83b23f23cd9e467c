//! Complex-domain MIMO detection.
//!
//! The centrepiece is [`dpst`], a gradient-descent detector unrolled into a
//! fixed number of layers with learned per-layer step sizes and a partially
//! applied tanh shrinkage, trained by hand-written reverse-mode
//! differentiation through the layers. Around it sit the classical
//! [`detectors`] (ZF, MMSE, ordered SIC, exhaustive ML), the Rayleigh/AWGN
//! [`sysmodel`], a small dense complex [`cplx`] algebra, and the Monte-Carlo
//! [`bench`] harness that produces BER and timing tables and charts.
//!
//! ```
//! use dpst_mimo::prelude::*;
//!
//! let c = make_constellation(4).unwrap();
//! let frame = realize(&SystemConfig::new(4, 8, 4, 20.0).unwrap(), &c, &mut Rng::new(1));
//! let zf = detect_zf(&frame.h, &frame.y, &c).unwrap();
//! assert_eq!(zf.bits.len(), 8);
//! ```

pub mod bench;
pub mod cli;
pub mod cplx;
pub mod detectors;
pub mod dpst;
pub mod error;
pub mod sysmodel;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bench::{
        emit_csv, emit_plot, report, run_sweep, BerRecord, DetectorId, FileParamStore, PlotKind,
        SweepConfig,
    };
    pub use crate::cplx::{hermitian, matvec, solve_hpd, spectral_bound, CMatrix, CVector, C64};
    pub use crate::detectors::{
        detect_ml, detect_mmse, detect_sic, detect_zf, DetectionResult, SicMode,
    };
    pub use crate::dpst::{
        dpst_backward, dpst_detect, dpst_forward, load_params, objective, save_params, shrink,
        train, wirtinger_grad, DpstParams, LossMode, TrainConfig,
    };
    pub use crate::error::{Error, Result};
    pub use crate::sysmodel::{
        bit_error_rate, demodulate_hard, make_constellation, modulate, noise_variance, realize,
        realize_with_noise, sample_channel, Constellation, Rng, SystemConfig,
    };
}
