//! Trains an unfolded detector and saves its parameters.
//!
//! cargo run --release --example train_dpst -- [layers] [steps] [out.json]

use dpst_mimo::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let layers: usize = args.next().map_or(20, |s| s.parse().expect("layers"));
    let steps: usize = args.next().map_or(2000, |s| s.parse().expect("steps"));
    let out = args.next().unwrap_or_else(|| "dpst_params.json".into());

    let c = make_constellation(4)?;
    let shape = SystemConfig::new(4, 8, 4, 0.0)?;
    let cfg = TrainConfig {
        steps,
        ..TrainConfig::new(layers)
    };
    let outcome = train(&cfg, &shape, &c)?;
    for &(step, loss) in outcome
        .history
        .iter()
        .filter(|(s, _)| s % (steps / 10).max(1) == 0 || *s == 1)
    {
        println!("step {step:>6}  mean batch loss {loss:.5e}");
    }
    let p = &outcome.params;
    let shrink_from = (1..=p.layers)
        .find(|&t| p.is_shrink_layer(t))
        .unwrap_or(p.layers);
    println!("shrinkage active from layer {shrink_from} of {}", p.layers);
    println!(
        "gamma {:?}",
        p.gamma
            .iter()
            .map(|g| format!("{g:.4}"))
            .collect::<Vec<_>>()
    );
    println!(
        "theta {:?}",
        p.theta
            .iter()
            .map(|t| format!("{t:.4}"))
            .collect::<Vec<_>>()
    );
    save_params(p, &out)?;
    println!("wrote {out}");
    Ok(())
}
