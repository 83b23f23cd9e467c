//! Per-frame detection time for each detector on identical frames.
//!
//! cargo run --release --example execution_time

use dpst_mimo::bench::{run_detectors, Detector, NamedDetector};
use dpst_mimo::prelude::*;

fn main() -> Result<()> {
    let c = make_constellation(4)?;
    let shape = SystemConfig::new(4, 8, 4, 0.0)?;
    let mut detectors = vec![
        NamedDetector::new("zf", Detector::Zf),
        NamedDetector::new("mmse", Detector::Mmse),
        NamedDetector::new("mmse-sic", Detector::Sic(SicMode::Mmse)),
        NamedDetector::new("ml", Detector::Ml),
    ];
    for layers in [10, 20, 50, 100] {
        let cfg = TrainConfig {
            steps: 200,
            ..TrainConfig::new(layers)
        };
        let params = train(&cfg, &shape, &c)?.params;
        detectors.push(NamedDetector::new(
            format!("dpst_t{layers}"),
            Detector::Dpst(params),
        ));
    }

    let frames = 5000;
    let sweep = SweepConfig {
        snr_list_db: vec![10.0],
        frames,
        workers: Some(1),
        ..SweepConfig::new(4, 8, 4)
    };
    let records = run_detectors(&sweep, &detectors)?;
    let mmse = records[1].wall_time_ms;
    println!("{:<10} {:>12} {:>10}", "detector", "us/frame", "x mmse");
    for r in &records {
        println!(
            "{:<10} {:>12.3} {:>10.2}",
            r.detector,
            r.wall_time_ms * 1e3 / frames as f64,
            r.wall_time_ms / mmse
        );
    }
    Ok(())
}
