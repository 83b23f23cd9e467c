//! Gray-mapped constellations, a Rayleigh channel draw and hard slicing.
//!
//! cargo run --example constellations

use dpst_mimo::prelude::*;

fn main() -> Result<()> {
    for m in [2, 4, 16, 64] {
        let c = make_constellation(m)?;
        println!(
            "M={m:<2} bits/symbol={} energy={:.12} min distance={:.4}",
            c.bits_per_symbol(),
            c.average_energy(),
            c.min_distance()
        );
    }

    let c = make_constellation(4)?;
    println!("\nQPSK labels:");
    for (i, p) in c.points().iter().enumerate() {
        let label: String = c.label(i).map(|b| char::from(b'0' + b)).collect();
        println!("  {label} -> {:+.4}{:+.4}j", p.re, p.im);
    }

    let cfg = SystemConfig::new(4, 8, 4, 10.0)?;
    let frame = realize(&cfg, &c, &mut Rng::new(7));
    println!(
        "\n4x8 frame at 10 dB, noise variance {:.4}",
        frame.noise_var
    );
    println!("sent bits     {:?}", frame.bits);

    // slice the noisy matched-filter output just to show demodulation
    let mf = hermitian(&frame.h);
    let z = matvec(&mf, &frame.y)?;
    let scale = 1.0 / frame.h.rows() as f64;
    let (_, _, bits) = demodulate_hard(&z.scale(scale), &c);
    println!("matched filter {bits:?}");
    println!(
        "bit errors     {}",
        bit_error_rate(&bits, &frame.bits)? * bits.len() as f64
    );
    Ok(())
}
