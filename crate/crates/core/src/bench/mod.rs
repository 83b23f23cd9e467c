//! Monte-Carlo BER/SER sweeps over SNR with detection-only timing, plus CSV,
//! SVG and text-table output.
//!
//! Every `(detector, snr)` cell draws its frames from a generator seeded with
//! `seed ^ hash64(snr_index)`. All detectors at one SNR therefore see the same
//! channels, symbols and noise, which makes BER comparisons paired.

mod csv;
mod plot;
mod report;

pub use self::csv::{emit_csv, parse_csv, read_csv, write_csv, CSV_HEADER};
pub use self::plot::{emit_plot, render_svg, PlotKind, BER_FLOOR};
pub use self::report::report;

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::detectors::{detect_ml, detect_mmse, detect_sic, detect_zf, DetectionResult, SicMode};
use crate::dpst::{dpst_detect, load_params, DpstParams};
use crate::error::{Error, Result};
use crate::sysmodel::{
    hash64, make_constellation, noise_variance, realize_with_noise, ChannelRealization,
    Constellation, Rng,
};

pub const DEFAULT_SNR_LIST_DB: [f64; 6] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0];

/// Detector identifier as written on the command line and in CSV files.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DetectorId {
    Zf,
    Mmse,
    ZfSic,
    MmseSic,
    Ml,
    /// Trained network, resolved through a [`ParamStore`] by this key
    /// (a file path for [`FileParamStore`]).
    Dpst(String),
}

impl DetectorId {
    pub fn baselines() -> Vec<DetectorId> {
        vec![
            DetectorId::Zf,
            DetectorId::Mmse,
            DetectorId::ZfSic,
            DetectorId::MmseSic,
            DetectorId::Ml,
        ]
    }

    /// Parses a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<DetectorId>> {
        s.split(',').map(|t| t.trim().parse()).collect()
    }
}

impl FromStr for DetectorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "zf" => DetectorId::Zf,
            "mmse" => DetectorId::Mmse,
            "zf-sic" => DetectorId::ZfSic,
            "mmse-sic" => DetectorId::MmseSic,
            "ml" => DetectorId::Ml,
            _ => match s.strip_prefix("dpst:") {
                Some(key) if !key.is_empty() => DetectorId::Dpst(key.to_string()),
                _ => {
                    return Err(Error::Config(format!(
                        "unknown detector `{s}` (zf, mmse, zf-sic, mmse-sic, ml, dpst:<params>)"
                    )))
                }
            },
        })
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorId::Zf => f.write_str("zf"),
            DetectorId::Mmse => f.write_str("mmse"),
            DetectorId::ZfSic => f.write_str("zf-sic"),
            DetectorId::MmseSic => f.write_str("mmse-sic"),
            DetectorId::Ml => f.write_str("ml"),
            DetectorId::Dpst(key) => write!(f, "dpst:{key}"),
        }
    }
}

/// Anything that turns a received frame into a decision.
pub trait Detect: Send + Sync {
    fn detect(&self, frame: &ChannelRealization, c: &Constellation) -> Result<DetectionResult>;
}

/// Built-in detectors with their parameters resolved.
#[derive(Clone, Debug)]
pub enum Detector {
    Zf,
    Mmse,
    Sic(SicMode),
    Ml,
    Dpst(DpstParams),
}

impl Detect for Detector {
    fn detect(&self, r: &ChannelRealization, c: &Constellation) -> Result<DetectionResult> {
        match self {
            Detector::Zf => detect_zf(&r.h, &r.y, c),
            Detector::Mmse => detect_mmse(&r.h, &r.y, r.noise_var, c),
            Detector::Sic(mode) => detect_sic(&r.h, &r.y, r.noise_var, *mode, c),
            Detector::Ml => detect_ml(&r.h, &r.y, c),
            Detector::Dpst(params) => dpst_detect(&r.h, &r.y, params, c),
        }
    }
}

/// Resolves `dpst:<key>` detector entries to parameters.
pub trait ParamStore {
    fn resolve(&self, key: &str) -> Result<DpstParams>;
}

/// Loads parameter files from disk, relative keys against `root`.
#[derive(Clone, Debug, Default)]
pub struct FileParamStore {
    pub root: Option<PathBuf>,
}

impl ParamStore for FileParamStore {
    fn resolve(&self, key: &str) -> Result<DpstParams> {
        let path = Path::new(key);
        match &self.root {
            Some(root) if path.is_relative() => load_params(root.join(path)),
            _ => load_params(path),
        }
    }
}

impl ParamStore for HashMap<String, DpstParams> {
    fn resolve(&self, key: &str) -> Result<DpstParams> {
        self.get(key).cloned().ok_or_else(|| Error::ParamsPath {
            path: PathBuf::from(key),
            source: Box::new(Error::Config(
                "no parameters registered under this key".into(),
            )),
        })
    }
}

pub struct NamedDetector {
    pub name: String,
    pub detector: Box<dyn Detect>,
}

impl NamedDetector {
    pub fn new(name: impl Into<String>, detector: impl Detect + 'static) -> Self {
        NamedDetector {
            name: name.into(),
            detector: Box::new(detector),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub nt: usize,
    pub nr: usize,
    pub mod_order: usize,
    pub snr_list_db: Vec<f64>,
    pub detectors: Vec<DetectorId>,
    /// Channel realizations per `(detector, snr)` cell.
    pub frames: usize,
    pub seed: u64,
    /// Transmit without noise regardless of the SNR list. The receiver
    /// still sees `noise_var = 0`.
    pub noiseless: bool,
    /// When false, `wall_time_ms` is reported as 0 so that output files are
    /// byte-for-byte reproducible.
    pub record_timing: bool,
    /// Cell-level worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn new(nt: usize, nr: usize, mod_order: usize) -> Self {
        SweepConfig {
            nt,
            nr,
            mod_order,
            snr_list_db: DEFAULT_SNR_LIST_DB.to_vec(),
            detectors: DetectorId::baselines(),
            frames: 10_000,
            seed: 0,
            noiseless: false,
            record_timing: true,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::sysmodel::SystemConfig::new(self.nt, self.nr, self.mod_order, 0.0)?;
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.snr_list_db.is_empty() {
            return Err(Error::Config("SNR list is empty".into()));
        }
        if self.snr_list_db.iter().any(|s| s.is_nan()) {
            return Err(Error::Config("SNR list contains NaN".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Seed of every cell at SNR position `snr_index`.
    pub fn cell_seed(&self, snr_index: usize) -> u64 {
        self.seed ^ hash64(snr_index as u64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub detector: String,
    pub snr_db: f64,
    pub frames: usize,
    pub bit_errors: usize,
    pub total_bits: usize,
    pub ber: f64,
    pub symbol_errors: usize,
    pub ser: f64,
    /// Total detection time over the cell's frames.
    pub wall_time_ms: f64,
}

/// Resolves detector identifiers and runs the sweep.
pub fn run_sweep(cfg: &SweepConfig, store: &dyn ParamStore) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let mut named = Vec::with_capacity(cfg.detectors.len());
    for id in &cfg.detectors {
        let detector = match id {
            DetectorId::Zf => Detector::Zf,
            DetectorId::Mmse => Detector::Mmse,
            DetectorId::ZfSic => Detector::Sic(SicMode::Zf),
            DetectorId::MmseSic => Detector::Sic(SicMode::Mmse),
            DetectorId::Ml => Detector::Ml,
            DetectorId::Dpst(key) => {
                let params = store.resolve(key)?;
                if (params.nt, params.nr, params.mod_order) != (cfg.nt, cfg.nr, cfg.mod_order) {
                    return Err(Error::Config(format!(
                        "{id}: parameters were trained for {}x{} M={}, sweep is {}x{} M={}",
                        params.nt, params.nr, params.mod_order, cfg.nt, cfg.nr, cfg.mod_order
                    )));
                }
                Detector::Dpst(params)
            }
        };
        named.push(NamedDetector::new(id.to_string(), detector));
    }
    run_detectors(cfg, &named)
}

/// Runs every `(detector, snr)` cell, detector-major. `cfg.detectors` is
/// ignored in favour of `detectors`.
pub fn run_detectors(cfg: &SweepConfig, detectors: &[NamedDetector]) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let c = make_constellation(cfg.mod_order)?;
    let cells: Vec<(usize, usize)> = (0..detectors.len())
        .flat_map(|d| (0..cfg.snr_list_db.len()).map(move |s| (d, s)))
        .collect();

    let work = || -> Result<Vec<BerRecord>> {
        cells
            .par_iter()
            .map(|&(d, s)| run_cell(cfg, &c, &detectors[d], s))
            .collect()
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn run_cell(
    cfg: &SweepConfig,
    c: &Constellation,
    named: &NamedDetector,
    snr_index: usize,
) -> Result<BerRecord> {
    let snr_db = cfg.snr_list_db[snr_index];
    let noise_var = if cfg.noiseless {
        0.0
    } else {
        noise_variance(snr_db, cfg.nt)
    };
    let k = c.bits_per_symbol();
    let mut rng = Rng::new(cfg.cell_seed(snr_index));
    let mut bit_errors = 0;
    let mut symbol_errors = 0;
    let mut elapsed = 0.0;
    for _ in 0..cfg.frames {
        let frame = realize_with_noise(cfg.nt, cfg.nr, noise_var, c, &mut rng);
        let start = Instant::now();
        let result = named.detector.detect(&frame, c);
        elapsed += start.elapsed().as_secs_f64();
        let result = result.map_err(|e| Error::Cell {
            detector: named.name.clone(),
            snr_db,
            source: Box::new(e),
        })?;
        if result.bits.len() != frame.bits.len() {
            return Err(Error::Cell {
                detector: named.name.clone(),
                snr_db,
                source: Box::new(Error::Dimension {
                    op: "detected bits",
                    expected: frame.bits.len(),
                    found: result.bits.len(),
                }),
            });
        }
        for (got, want) in result.bits.chunks(k).zip(frame.bits.chunks(k)) {
            let wrong = got.iter().zip(want).filter(|(a, b)| a != b).count();
            bit_errors += wrong;
            symbol_errors += usize::from(wrong > 0);
        }
    }
    let total_bits = cfg.frames * cfg.nt * k;
    let total_symbols = cfg.frames * cfg.nt;
    Ok(BerRecord {
        detector: named.name.clone(),
        snr_db,
        frames: cfg.frames,
        bit_errors,
        total_bits,
        ber: bit_errors as f64 / total_bits as f64,
        symbol_errors,
        ser: symbol_errors as f64 / total_symbols as f64,
        wall_time_ms: if cfg.record_timing {
            elapsed * 1e3
        } else {
            0.0
        },
    })
}
