//! ZF, MMSE, ordered SIC and exhaustive ML on one frame, then a small
//! paired-seed BER comparison.
//!
//! cargo run --release --example baselines

use std::collections::HashMap;

use dpst_mimo::prelude::*;

fn main() -> Result<()> {
    let c = make_constellation(4)?;
    let cfg = SystemConfig::new(4, 8, 4, 5.0)?;
    let frame = realize(&cfg, &c, &mut Rng::new(21));
    let (h, y, nv) = (&frame.h, &frame.y, frame.noise_var);

    let results = [
        ("zf", detect_zf(h, y, &c)?),
        ("mmse", detect_mmse(h, y, nv, &c)?),
        ("zf-sic", detect_sic(h, y, nv, SicMode::Zf, &c)?),
        ("mmse-sic", detect_sic(h, y, nv, SicMode::Mmse, &c)?),
        ("ml", detect_ml(h, y, &c)?),
    ];
    println!("sent      {:?}", frame.bits);
    for (name, r) in &results {
        let cost = dpst_mimo::detectors::residual_cost(h, &r.symbols, y)?;
        println!("{name:<9} {:?}  ||y-Hx||^2 = {cost:.4}", r.bits);
    }

    let sweep = SweepConfig {
        snr_list_db: vec![0.0, 5.0, 10.0, 15.0],
        frames: 2000,
        ..SweepConfig::new(4, 8, 4)
    };
    let records = run_sweep(&sweep, &HashMap::new())?;
    println!("\n{}", report(&records));
    Ok(())
}
