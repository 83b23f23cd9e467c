//! The least-squares gradient H^H(Hx - y) against central differences, and
//! the unrolled network's parameter gradients against perturbing each one.
//!
//! cargo run --example gradient_check

use dpst_mimo::prelude::*;

fn main() -> Result<()> {
    let c = make_constellation(4)?;
    let mut rng = Rng::new(3);
    let frame = realize_with_noise(4, 8, 0.2, &c, &mut rng);
    let (h, y) = (&frame.h, &frame.y);

    let x: CVector = (0..4).map(|_| rng.complex_normal(1.0)).collect();
    let d: CVector = (0..4).map(|_| rng.complex_normal(1.0)).collect();
    let g = wirtinger_grad(h, &x, y)?;
    let eps = 1e-6;
    let f = |t: f64| objective(h, &x.add(&d.scale(t)).unwrap(), y).unwrap();
    let fd = (f(eps) - f(-eps)) / (2.0 * eps);
    let analytic = 2.0 * d.dot(&g)?.re;
    println!("directional derivative: analytic {analytic:.12e}, fd {fd:.12e}");

    let mut params = DpstParams::init(6, 0.5, 4, 8, 4)?;
    params.theta.iter_mut().for_each(|t| *t = 1.2);
    let traj = dpst_forward(h, y, &params)?;
    let (loss, grads) = dpst_backward(&traj, h, y, &frame.x, &params, LossMode::Supervised)?;
    println!("\nT=6 loss {loss:.6e}");
    println!(
        "{:>3} {:>14} {:>14} {:>14} {:>14}",
        "t", "dL/dgamma", "fd", "dL/dtheta", "fd"
    );
    let loss_with = |p: &DpstParams| {
        let out = dpst_forward(h, y, p).unwrap();
        out.output().sub(&frame.x).unwrap().norm_sqr()
    };
    for t in 0..params.layers {
        let bump = |field: fn(&mut DpstParams) -> &mut Vec<f64>, step: f64| {
            let mut p = params.clone();
            field(&mut p)[t] += step;
            loss_with(&p)
        };
        let fd_g = (bump(|p| &mut p.gamma, 1e-7) - bump(|p| &mut p.gamma, -1e-7)) / 2e-7;
        let fd_t = (bump(|p| &mut p.theta, 1e-7) - bump(|p| &mut p.theta, -1e-7)) / 2e-7;
        println!(
            "{:>3} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            t + 1,
            grads.d_gamma[t],
            fd_g,
            grads.d_theta[t],
            fd_t
        );
    }
    Ok(())
}
