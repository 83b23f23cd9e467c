//! Trains DPST networks for several depths, sweeps them against the
//! baselines, and writes the CSV table plus BER and timing charts.
//!
//! cargo run --release --example ber_sweep -- [out_dir]

use std::collections::HashMap;
use std::path::PathBuf;

use dpst_mimo::bench::DetectorId;
use dpst_mimo::prelude::*;

fn main() -> Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "sweep_out".into()),
    );
    std::fs::create_dir_all(&dir)?;
    let c = make_constellation(4)?;
    let shape = SystemConfig::new(4, 8, 4, 0.0)?;

    let mut store = HashMap::new();
    let mut detectors = DetectorId::baselines();
    for layers in [10, 20, 30] {
        let cfg = TrainConfig {
            steps: 1500,
            ..TrainConfig::new(layers)
        };
        let outcome = train(&cfg, &shape, &c)?;
        println!(
            "T={layers:<3} trained, final loss {:.4e}",
            outcome.final_loss()
        );
        let key = format!("t{layers}");
        store.insert(key.clone(), outcome.params);
        detectors.push(DetectorId::Dpst(key));
    }

    let sweep = SweepConfig {
        detectors,
        frames: 3000,
        ..SweepConfig::new(4, 8, 4)
    };
    let records = run_sweep(&sweep, &store)?;
    emit_csv(&records, dir.join("ber.csv"))?;
    emit_plot(&records, PlotKind::Ber, dir.join("ber.svg"))?;
    emit_plot(&records, PlotKind::Time, dir.join("time.svg"))?;
    print!("{}", report(&records));
    println!("wrote ber.csv, ber.svg, time.svg to {}", dir.display());
    Ok(())
}
