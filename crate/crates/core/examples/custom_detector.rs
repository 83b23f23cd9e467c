//! Plugging a user-defined detector into the sweep harness.
//!
//! cargo run --release --example custom_detector

use dpst_mimo::bench::{run_detectors, Detect, Detector, NamedDetector};
use dpst_mimo::prelude::*;
use dpst_mimo::sysmodel::ChannelRealization;

/// Matched filter `H^H y` normalized per stream.
struct MatchedFilter;

impl Detect for MatchedFilter {
    fn detect(&self, r: &ChannelRealization, c: &Constellation) -> Result<DetectionResult> {
        let z = matvec(&hermitian(&r.h), &r.y)?;
        let norms: Vec<f64> = (0..r.h.cols()).map(|j| r.h.column(j).norm_sqr()).collect();
        let soft = z.iter().zip(&norms).map(|(v, n)| v / n).collect();
        Ok(DetectionResult::from_soft(soft, c))
    }
}

fn main() -> Result<()> {
    let detectors = [
        NamedDetector::new("matched", MatchedFilter),
        NamedDetector::new("zf", Detector::Zf),
        NamedDetector::new("mmse", Detector::Mmse),
    ];
    let sweep = SweepConfig {
        frames: 5000,
        ..SweepConfig::new(4, 8, 4)
    };
    print!("{}", report(&run_detectors(&sweep, &detectors)?));
    Ok(())
}
