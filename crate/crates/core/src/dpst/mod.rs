//! Dynamic partially shrinkage thresholding: a gradient-descent solver for
//! `min ||Hx - y||^2` unrolled into `T` layers, each with its own step size
//! `gamma_t`, followed from layer `ceil(p T)` onward by a scaled tanh
//! shrinkage `|theta_t| tanh(.)` that pulls the iterate toward the
//! constellation.
//!
//! # Conventions
//!
//! For a real-valued `f(x)` of a complex vector, the Wirtinger derivative
//! with respect to the conjugate is `df/dx^H = 1/2 (df/dRe x + j df/dIm x)`.
//! For the least-squares objective it equals `H^H (Hx - y)`, which is what
//! [`wirtinger_grad`] returns and what each layer steps along.
//!
//! The adjoint in [`dpst_backward`] carries the *real-pair* gradient
//! `dL/dRe + j dL/dIm` (twice the Wirtinger derivative). With that convention
//! a complex-linear map `u = A x` pulls back as `A^H`, and a real parameter
//! `s` entering as `du = v ds` gets `dL/ds = Re(a^H v)`.

mod io;
mod train;

pub use io::{load_params, params_from_json, params_to_json, save_params, PARAMS_VERSION};
pub use train::{train, train_with_rng, Adam, TrainConfig, TrainOutcome};

use crate::cplx::{gram, matvec, matvec_h, CMatrix, CVector, C64};
use crate::detectors::DetectionResult;
use crate::error::{Error, Result};
use crate::sysmodel::Constellation;

/// Learned parameters of a `T`-layer network and the system shape they were
/// trained for.
#[derive(Clone, Debug, PartialEq)]
pub struct DpstParams {
    pub layers: usize,
    pub p: f64,
    pub gamma: Vec<f64>,
    pub theta: Vec<f64>,
    pub nt: usize,
    pub nr: usize,
    pub mod_order: usize,
}

impl DpstParams {
    /// Default initialization: `gamma_t = 1/(sqrt(nr) + sqrt(nt))^2`, the
    /// asymptotic inverse of the largest Gram eigenvalue for CN(0,1) taps,
    /// and `theta_t = 1`.
    pub fn init(layers: usize, p: f64, nt: usize, nr: usize, mod_order: usize) -> Result<Self> {
        let step = ((nr as f64).sqrt() + (nt as f64).sqrt()).powi(-2);
        let params = DpstParams {
            layers,
            p,
            gamma: vec![step; layers],
            theta: vec![1.0; layers],
            nt,
            nr,
            mod_order,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let field = |field: &'static str, reason: String| Err(Error::ParamField { field, reason });
        if self.layers == 0 {
            return field("T", "must be at least 1".into());
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return field("p", format!("{} is outside (0, 1]", self.p));
        }
        if self.gamma.len() != self.layers {
            return field(
                "gamma",
                format!(
                    "length {} does not match T = {}",
                    self.gamma.len(),
                    self.layers
                ),
            );
        }
        if self.theta.len() != self.layers {
            return field(
                "theta",
                format!(
                    "length {} does not match T = {}",
                    self.theta.len(),
                    self.layers
                ),
            );
        }
        if let Some(i) = self.gamma.iter().position(|g| !g.is_finite()) {
            return field("gamma", format!("entry {i} is not finite"));
        }
        if let Some(i) = self.theta.iter().position(|g| !g.is_finite()) {
            return field("theta", format!("entry {i} is not finite"));
        }
        if self.nt == 0 {
            return field("nt", "must be at least 1".into());
        }
        if self.nr < self.nt {
            return field(
                "nr",
                format!("{} is smaller than nt = {}", self.nr, self.nt),
            );
        }
        if !matches!(self.mod_order, 2 | 4 | 16 | 64) {
            return field("mod_order", format!("unsupported order {}", self.mod_order));
        }
        Ok(())
    }

    /// Whether layer `t` (1-based) applies the shrinkage, i.e. `t >= p T`.
    /// The comparison allows 1e-9 of slack so decimal `p` values such as 0.3
    /// select the layers their exact rational product would.
    pub fn is_shrink_layer(&self, t: usize) -> bool {
        t as f64 + 1e-9 >= self.p * self.layers as f64
    }

    /// Flat parameter vector `[gamma_1..gamma_T, theta_1..theta_T]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.gamma.iter().chain(&self.theta).copied().collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let (g, t) = flat.split_at(self.layers);
        self.gamma.copy_from_slice(g);
        self.theta.copy_from_slice(t);
    }

    fn check_shape(&self, h: &CMatrix, y: &CVector) -> Result<()> {
        if h.cols() != self.nt {
            return Err(Error::Dimension {
                op: "dpst: channel columns vs nt",
                expected: self.nt,
                found: h.cols(),
            });
        }
        if h.rows() != self.nr {
            return Err(Error::Dimension {
                op: "dpst: channel rows vs nr",
                expected: self.nr,
                found: h.rows(),
            });
        }
        if y.len() != h.rows() {
            return Err(Error::Dimension {
                op: "dpst: received vector",
                expected: h.rows(),
                found: y.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpstTrajectory {
    /// `x_0 .. x_T`; `x_0` is the zero vector.
    pub states: Vec<CVector>,
    /// Post-gradient, pre-shrinkage iterates `u_1 .. u_T`.
    pub pre_shrink: Vec<CVector>,
}

impl DpstTrajectory {
    pub fn output(&self) -> &CVector {
        self.states.last().expect("at least x_0")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LossMode {
    /// `||x_T - x_true||^2`
    #[default]
    Supervised,
    /// `||H x_T - y||^2`
    Residual,
}

impl std::str::FromStr for LossMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "supervised" => Ok(LossMode::Supervised),
            "residual" => Ok(LossMode::Residual),
            other => Err(format!(
                "unknown loss mode `{other}` (supervised | residual)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub d_gamma: Vec<f64>,
    pub d_theta: Vec<f64>,
}

/// `||Hx - y||^2`.
pub fn objective(h: &CMatrix, x: &CVector, y: &CVector) -> Result<f64> {
    Ok(matvec(h, x)?.sub(y)?.norm_sqr())
}

/// `df/dx^H = H^H (Hx - y)` for `f = ||Hx - y||^2`.
pub fn wirtinger_grad(h: &CMatrix, x: &CVector, y: &CVector) -> Result<CVector> {
    matvec_h(h, &matvec(h, x)?.sub(y)?)
}

#[inline]
fn tanh_sep(z: C64) -> C64 {
    C64::new(tanh(z.re), tanh(z.im))
}

// One expm1 instead of libm tanh; this sits in the innermost detection loop.
fn tanh(v: f64) -> f64 {
    let e = (-2.0 * v.abs()).exp_m1();
    (-e / (2.0 + e)).copysign(v)
}

/// `|theta| (tanh(Re v) + j tanh(Im v))`, elementwise.
pub fn shrink(v: &CVector, theta: f64) -> CVector {
    let s = theta.abs();
    v.iter().map(|&z| tanh_sep(z) * s).collect()
}

/// `G x - b` with `G = H^H H`, `b = H^H y`: the Wirtinger gradient in
/// normal-equation form.
fn gram_grad(g: &CMatrix, b: &[C64], x: &[C64], out: &mut [C64]) {
    let n = b.len();
    for ((row, bi), o) in g.as_slice().chunks_exact(n).zip(b).zip(out.iter_mut()) {
        *o = row.iter().zip(x).fold(-bi, |s, (gk, xk)| s + gk * xk);
    }
}

fn forward_impl(g: &CMatrix, b: &CVector, params: &DpstParams, shrinkage: bool) -> DpstTrajectory {
    let n = b.len();
    let mut states = Vec::with_capacity(params.layers + 1);
    let mut pre_shrink = Vec::with_capacity(params.layers);
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut grad = vec![C64::new(0.0, 0.0); n];
    states.push(CVector::from_vec(x.clone()));
    for t in 1..=params.layers {
        let gamma = params.gamma[t - 1];
        gram_grad(g, b.as_slice(), &x, &mut grad);
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi -= gi * gamma;
        }
        pre_shrink.push(CVector::from_vec(x.clone()));
        if shrinkage && params.is_shrink_layer(t) {
            let s = params.theta[t - 1].abs();
            for xi in x.iter_mut() {
                *xi = tanh_sep(*xi) * s;
            }
        }
        states.push(CVector::from_vec(x.clone()));
    }
    DpstTrajectory { states, pre_shrink }
}

/// Runs the unrolled network from `x_0 = 0`, keeping every intermediate.
pub fn dpst_forward(h: &CMatrix, y: &CVector, params: &DpstParams) -> Result<DpstTrajectory> {
    params.check_shape(h, y)?;
    Ok(forward_impl(&gram(h), &matvec_h(h, y)?, params, true))
}

/// Same recursion with the shrinkage switched off everywhere: plain
/// gradient descent with per-layer steps.
pub fn dpst_forward_unshrunk(
    h: &CMatrix,
    y: &CVector,
    params: &DpstParams,
) -> Result<DpstTrajectory> {
    params.check_shape(h, y)?;
    Ok(forward_impl(&gram(h), &matvec_h(h, y)?, params, false))
}

/// Inference path: runs the layers without recording the trajectory and
/// slices the output.
pub fn dpst_detect(
    h: &CMatrix,
    y: &CVector,
    params: &DpstParams,
    c: &Constellation,
) -> Result<DetectionResult> {
    params.check_shape(h, y)?;
    let g = gram(h);
    let b = matvec_h(h, y)?;
    let n = b.len();
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut grad = vec![C64::new(0.0, 0.0); n];
    for t in 1..=params.layers {
        let gamma = params.gamma[t - 1];
        gram_grad(&g, b.as_slice(), &x, &mut grad);
        if params.is_shrink_layer(t) {
            let s = params.theta[t - 1].abs();
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi = tanh_sep(*xi - gi * gamma) * s;
            }
        } else {
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi -= gi * gamma;
            }
        }
    }
    Ok(DetectionResult::from_soft(CVector::from_vec(x), c))
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Loss of the trajectory output and its exact derivatives with respect to
/// every `gamma_t` and `theta_t`, by reverse accumulation through the layers.
///
/// Layers without shrinkage pass the adjoint through the affine step only
/// and report a zero `theta` derivative. At `theta_t = 0` the derivative of
/// `|theta_t|` is taken as 0.
pub fn dpst_backward(
    traj: &DpstTrajectory,
    h: &CMatrix,
    y: &CVector,
    x_true: &CVector,
    params: &DpstParams,
    loss_mode: LossMode,
) -> Result<(f64, Gradients)> {
    params.check_shape(h, y)?;
    let layers = params.layers;
    if traj.states.len() != layers + 1 {
        return Err(Error::Dimension {
            op: "dpst_backward: trajectory states",
            expected: layers + 1,
            found: traj.states.len(),
        });
    }
    if traj.pre_shrink.len() != layers {
        return Err(Error::Dimension {
            op: "dpst_backward: trajectory pre-shrink",
            expected: layers,
            found: traj.pre_shrink.len(),
        });
    }
    let g = gram(h);
    let b = matvec_h(h, y)?;
    let n = params.nt;
    let out = traj.output();

    let (loss, mut adj) = match loss_mode {
        LossMode::Supervised => {
            let diff = out.sub(x_true)?;
            (diff.norm_sqr(), diff.scale(2.0).into_vec())
        }
        LossMode::Residual => {
            let r = matvec(h, out)?.sub(y)?;
            (r.norm_sqr(), matvec_h(h, &r)?.scale(2.0).into_vec())
        }
    };

    let mut d_gamma = vec![0.0; layers];
    let mut d_theta = vec![0.0; layers];
    let mut grad = vec![C64::new(0.0, 0.0); n];
    let mut next = vec![C64::new(0.0, 0.0); n];
    for t in (1..=layers).rev() {
        if params.is_shrink_layer(t) {
            let theta = params.theta[t - 1];
            let u = &traj.pre_shrink[t - 1];
            let mut dth = 0.0;
            for (a, z) in adj.iter_mut().zip(u.iter()) {
                let (tr, ti) = (tanh(z.re), tanh(z.im));
                dth += a.re * tr + a.im * ti;
                *a = C64::new(a.re * (1.0 - tr * tr), a.im * (1.0 - ti * ti)) * theta.abs();
            }
            d_theta[t - 1] = sign(theta) * dth;
        }
        // u_t = x_{t-1} - gamma_t (G x_{t-1} - b)
        let x_prev = &traj.states[t - 1];
        gram_grad(&g, b.as_slice(), x_prev.as_slice(), &mut grad);
        d_gamma[t - 1] = -adj
            .iter()
            .zip(&grad)
            .map(|(a, gi)| (a.conj() * gi).re)
            .sum::<f64>();
        let gamma = params.gamma[t - 1];
        for i in 0..n {
            let row = g.row(i);
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += row[k] * adj[k];
            }
            next[i] = adj[i] - s * gamma;
        }
        std::mem::swap(&mut adj, &mut next);
    }
    Ok((loss, Gradients { d_gamma, d_theta }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::{spectral_bound, CMatrix};
    use crate::sysmodel::{make_constellation, realize_with_noise, Rng};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn instance(seed: u64, noise_var: f64) -> crate::sysmodel::ChannelRealization {
        let cons = make_constellation(4).unwrap();
        realize_with_noise(4, 8, noise_var, &cons, &mut Rng::new(seed))
    }

    fn random_params(layers: usize, p: f64, rng: &mut Rng) -> DpstParams {
        let mut params = DpstParams::init(layers, p, 4, 8, 4).unwrap();
        for g in params.gamma.iter_mut() {
            *g = 0.02 + 0.05 * rng.uniform();
        }
        for th in params.theta.iter_mut() {
            *th = (0.5 + rng.uniform()) * if rng.bit() == 1 { -1.0 } else { 1.0 };
        }
        params
    }

    /// Loss as a function of the flat parameter vector, evaluated by the
    /// forward pass alone.
    fn loss_at(
        r: &crate::sysmodel::ChannelRealization,
        params: &DpstParams,
        flat: &[f64],
        mode: LossMode,
    ) -> f64 {
        let mut p = params.clone();
        p.set_flat(flat);
        let out = dpst_forward(&r.h, &r.y, &p).unwrap();
        match mode {
            LossMode::Supervised => out.output().sub(&r.x).unwrap().norm_sqr(),
            LossMode::Residual => objective(&r.h, out.output(), &r.y).unwrap(),
        }
    }

    fn fd_check(r: &crate::sysmodel::ChannelRealization, params: &DpstParams, mode: LossMode) {
        let traj = dpst_forward(&r.h, &r.y, params).unwrap();
        let (loss, grads) = dpst_backward(&traj, &r.h, &r.y, &r.x, params, mode).unwrap();
        let flat = params.to_flat();
        assert!((loss - loss_at(r, params, &flat, mode)).abs() < 1e-12);
        let analytic: Vec<f64> = grads
            .d_gamma
            .iter()
            .chain(&grads.d_theta)
            .copied()
            .collect();
        for i in 0..flat.len() {
            let step = 1e-5 * flat[i].abs().max(1.0);
            let mut plus = flat.clone();
            let mut minus = flat.clone();
            plus[i] += step;
            minus[i] -= step;
            let fd =
                (loss_at(r, params, &plus, mode) - loss_at(r, params, &minus, mode)) / (2.0 * step);
            let err = (fd - analytic[i]).abs();
            assert!(
                err <= 1e-9 || err / fd.abs().max(analytic[i].abs()) < 1e-5,
                "param {i}: fd {fd} vs analytic {}",
                analytic[i]
            );
        }
    }

    #[test]
    fn objective_cases() {
        let r = instance(1, 0.0);
        assert!(objective(&r.h, &r.x, &r.y).unwrap() < 1e-24);
        let y = CVector::from_vec(vec![c(3.0, 0.0), c(0.0, 4.0)]);
        assert_eq!(
            objective(&CMatrix::identity(2), &CVector::zeros(2), &y).unwrap(),
            25.0
        );
        assert!(objective(&CMatrix::identity(2), &CVector::zeros(3), &y).is_err());
    }

    #[test]
    fn objective_matches_entrywise_sum() {
        let mut rng = Rng::new(3);
        for seed in 0..20 {
            let r = instance(seed, 1.0);
            let x: CVector = (0..4).map(|_| rng.complex_normal(1.0)).collect();
            let mut want = 0.0;
            for i in 0..8 {
                let mut re = -r.y[i].re;
                let mut im = -r.y[i].im;
                for j in 0..4 {
                    re += r.h[(i, j)].re * x[j].re - r.h[(i, j)].im * x[j].im;
                    im += r.h[(i, j)].re * x[j].im + r.h[(i, j)].im * x[j].re;
                }
                want += re * re + im * im;
            }
            assert!((objective(&r.h, &x, &r.y).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_cases() {
        let r = instance(2, 0.0);
        assert!(wirtinger_grad(&r.h, &r.x, &r.y).unwrap().norm() < 1e-12);
        let g = wirtinger_grad(
            &CMatrix::identity(1),
            &CVector::zeros(1),
            &CVector::from_reals(&[2.0]),
        )
        .unwrap();
        assert_eq!(g[0], c(-2.0, 0.0));
    }

    #[test]
    fn gradient_is_half_real_gradient() {
        let mut rng = Rng::new(8);
        for seed in 0..20 {
            let r = instance(seed, 0.5);
            let x: CVector = (0..4).map(|_| rng.complex_normal(1.0)).collect();
            let g = wirtinger_grad(&r.h, &x, &r.y).unwrap();
            let f = |x: &CVector| objective(&r.h, x, &r.y).unwrap();
            let h = 1e-6;
            for j in 0..4 {
                let mut num = C64::new(0.0, 0.0);
                for (k, dir) in [c(1.0, 0.0), c(0.0, 1.0)].into_iter().enumerate() {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[j] += dir * h;
                    xm[j] -= dir * h;
                    let d = (f(&xp) - f(&xm)) / (2.0 * h);
                    if k == 0 {
                        num.re = d;
                    } else {
                        num.im = d;
                    }
                }
                let half = num * 0.5;
                assert!(
                    (half - g[j]).norm() / g[j].norm().max(1e-3) < 1e-7,
                    "{half} vs {}",
                    g[j]
                );
            }
        }
    }

    #[test]
    fn shrink_cases() {
        let v = CVector::zeros(3);
        assert_eq!(shrink(&v, 2.5), v);
        let w = CVector::from_vec(vec![c(0.3, -1.2), c(5.0, 0.1)]);
        assert_eq!(shrink(&w, 0.0), CVector::zeros(2));
        let s = shrink(&CVector::from_vec(vec![c(100.0, 100.0)]), -2.0);
        assert!((s[0] - c(2.0, 2.0)).norm() < 1e-8);
    }

    #[test]
    fn zero_steps_freeze_state() {
        let r = instance(4, 0.3);
        let mut params = DpstParams::init(7, 0.5, 4, 8, 4).unwrap();
        params.gamma = vec![0.0; 7];
        let traj = dpst_forward(&r.h, &r.y, &params).unwrap();
        assert!(traj.states.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn single_layer_closed_form() {
        let y = CVector::from_vec(vec![c(0.7, -0.4)]);
        let mut params = DpstParams::init(1, 1.0, 1, 1, 4).unwrap();
        params.gamma = vec![1.0];
        params.theta = vec![1.3];
        let traj = dpst_forward(&CMatrix::identity(1), &y, &params).unwrap();
        assert_eq!(traj.pre_shrink[0], y);
        assert_eq!(traj.states[1], shrink(&y, 1.3));
    }

    #[test]
    fn single_layer_scalar_gradient_closed_form() {
        // u = gamma y, x1 = |theta| tanh_sep(u), L = |x1 - s|^2
        let y = c(0.8, -0.35);
        let s = c(0.6, -0.75);
        let (gamma, theta) = (0.9, -1.4);
        let mut params = DpstParams::init(1, 1.0, 1, 1, 4).unwrap();
        params.gamma = vec![gamma];
        params.theta = vec![theta];
        let yv = CVector::from_vec(vec![y]);
        let h = CMatrix::identity(1);
        let traj = dpst_forward(&h, &yv, &params).unwrap();
        let (loss, grads) = dpst_backward(
            &traj,
            &h,
            &yv,
            &CVector::from_vec(vec![s]),
            &params,
            LossMode::Supervised,
        )
        .unwrap();

        let (tr, ti) = ((gamma * y.re).tanh(), (gamma * y.im).tanh());
        let (er, ei) = (theta.abs() * tr - s.re, theta.abs() * ti - s.im);
        let want_loss = er * er + ei * ei;
        let want_dtheta = theta.signum() * 2.0 * (er * tr + ei * ti);
        let want_dgamma =
            2.0 * theta.abs() * (er * (1.0 - tr * tr) * y.re + ei * (1.0 - ti * ti) * y.im);
        assert!((loss - want_loss).abs() < 1e-12);
        assert!((grads.d_theta[0] - want_dtheta).abs() < 1e-10);
        assert!((grads.d_gamma[0] - want_dgamma).abs() < 1e-10);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = Rng::new(55);
        for (seed, (layers, p)) in [(1, 1.0), (5, 0.5), (10, 0.5), (10, 0.1), (6, 0.9)]
            .into_iter()
            .enumerate()
        {
            let r = instance(100 + seed as u64, 0.2);
            let params = random_params(layers, p, &mut rng);
            fd_check(&r, &params, LossMode::Supervised);
            fd_check(&r, &params, LossMode::Residual);
        }
    }

    #[test]
    fn backward_with_frozen_steps() {
        // gamma = 0 keeps every state at zero, so tanh'(0) = 1 and tanh(0) = 0:
        // theta derivatives vanish while step-size derivatives do not.
        let r = instance(9, 0.1);
        let mut params = DpstParams::init(6, 0.5, 4, 8, 4).unwrap();
        params.gamma = vec![0.0; 6];
        let traj = dpst_forward(&r.h, &r.y, &params).unwrap();
        let (_, grads) =
            dpst_backward(&traj, &r.h, &r.y, &r.x, &params, LossMode::Supervised).unwrap();
        assert!(grads.d_theta.iter().all(|&d| d == 0.0));
        assert!(grads.d_gamma.iter().all(|&d| d != 0.0));
        fd_check(&r, &params, LossMode::Supervised);
    }

    #[test]
    fn backward_rejects_mismatched_trajectory() {
        let r = instance(1, 0.1);
        let params = DpstParams::init(4, 0.5, 4, 8, 4).unwrap();
        let mut traj = dpst_forward(&r.h, &r.y, &params).unwrap();
        traj.states.pop();
        assert!(dpst_backward(&traj, &r.h, &r.y, &r.x, &params, LossMode::Supervised).is_err());
        let wrong = DpstParams::init(4, 0.5, 2, 8, 4).unwrap();
        assert!(dpst_forward(&r.h, &r.y, &wrong).is_err());
    }

    #[test]
    fn descent_is_monotone_without_shrinkage() {
        for seed in 0..100 {
            let r = instance(1000 + seed, 0.5);
            let lmax = spectral_bound(&gram(&r.h), 100, seed);
            let mut params = DpstParams::init(50, 1.0, 4, 8, 4).unwrap();
            params.gamma = vec![0.9 / lmax; 50];
            let traj = dpst_forward_unshrunk(&r.h, &r.y, &params).unwrap();
            let objs: Vec<f64> = traj
                .states
                .iter()
                .map(|x| objective(&r.h, x, &r.y).unwrap())
                .collect();
            for w in objs.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{} > {}", w[1], w[0]);
            }
        }
    }

    #[test]
    fn detect_matches_trajectory_output() {
        let cons = make_constellation(4).unwrap();
        let mut rng = Rng::new(1);
        for seed in 0..20 {
            let r = instance(seed, 0.3);
            let params = random_params(12, 0.5, &mut rng);
            let traj = dpst_forward(&r.h, &r.y, &params).unwrap();
            let d = dpst_detect(&r.h, &r.y, &params, &cons).unwrap();
            assert!(d.xhat_soft.sub(traj.output()).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn gram_step_equals_wirtinger_grad() {
        let r = instance(77, 1.0);
        let x: CVector = (0..4).map(|j| c(j as f64 * 0.3, -0.2)).collect();
        let mut out = vec![C64::new(0.0, 0.0); 4];
        gram_grad(
            &gram(&r.h),
            matvec_h(&r.h, &r.y).unwrap().as_slice(),
            x.as_slice(),
            &mut out,
        );
        let want = wirtinger_grad(&r.h, &x, &r.y).unwrap();
        assert!(CVector::from_vec(out).sub(&want).unwrap().norm() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(DpstParams::init(0, 0.5, 4, 8, 4).is_err());
        assert!(DpstParams::init(10, 0.0, 4, 8, 4).is_err());
        assert!(DpstParams::init(10, 1.5, 4, 8, 4).is_err());
        assert!(DpstParams::init(10, 1.0, 4, 8, 4).is_ok());
        let p = DpstParams::init(10, 0.5, 4, 8, 4).unwrap();
        assert!((p.gamma[0] - 0.04289).abs() < 1e-4);
        let mut bad = p.clone();
        bad.theta.push(1.0);
        assert!(matches!(
            bad.validate(),
            Err(Error::ParamField { field: "theta", .. })
        ));
    }

    proptest! {
        #[test]
        fn shrink_schedule(k in 1usize..10, layers in 1usize..=100) {
            let params = DpstParams::init(layers, k as f64 / 10.0, 1, 1, 4).unwrap();
            for t in 1..=layers {
                // exact rational test: t >= (k/10) T  <=>  10 t >= k T
                prop_assert_eq!(params.is_shrink_layer(t), 10 * t >= k * layers);
            }
        }

        #[test]
        fn shrink_is_bounded(re in -50.0f64..50.0, im in -50.0f64..50.0, theta in -5.0f64..5.0) {
            let out = shrink(&CVector::from_vec(vec![c(re, im)]), theta);
            prop_assert!(out[0].re.abs() <= theta.abs());
            prop_assert!(out[0].im.abs() <= theta.abs());
        }
    }
}
