use rayon::prelude::*;

use super::{dpst_backward, dpst_forward, DpstParams, LossMode};
use crate::error::{Error, Result};
use crate::sysmodel::{noise_variance, realize_with_noise, Constellation, Rng, SystemConfig};

pub const DEFAULT_SNR_SET_DB: [f64; 6] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0];

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub layers: usize,
    pub p: f64,
    pub batch_size: usize,
    pub steps: usize,
    /// Each batch item draws its SNR uniformly from this set.
    pub snr_set_db: Vec<f64>,
    pub learning_rate: f64,
    pub seed: u64,
    pub loss_mode: LossMode,
    /// Threads for batch evaluation; `None` uses the global pool. Results do
    /// not depend on this.
    pub workers: Option<usize>,
}

impl TrainConfig {
    pub fn new(layers: usize) -> Self {
        TrainConfig {
            layers,
            p: 0.5,
            batch_size: 24,
            steps: 10_000,
            snr_set_db: DEFAULT_SNR_SET_DB.to_vec(),
            learning_rate: 1e-3,
            seed: 0,
            loss_mode: LossMode::Supervised,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if self.snr_set_db.is_empty() || self.snr_set_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("SNR set must be non-empty and finite".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Config(format!(
                "learning rate {} must be a non-negative finite number",
                self.learning_rate
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Adam with bias correction.
#[derive(Clone, Debug)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: DpstParams,
    /// `(step, mean batch loss)` with steps counted from 1; the loss is the
    /// one evaluated before that step's update.
    pub history: Vec<(usize, f64)>,
}

impl TrainOutcome {
    pub fn final_loss(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |&(_, l)| l)
    }
}

/// Trains with a generator seeded from `cfg.seed`.
pub fn train(cfg: &TrainConfig, shape: &SystemConfig, c: &Constellation) -> Result<TrainOutcome> {
    train_with_rng(cfg, shape, c, &mut Rng::new(cfg.seed))
}

/// Minibatch training of all `gamma_t`, `theta_t` jointly.
///
/// Batches are drawn sequentially from `rng`; forward and backward passes
/// run in parallel but the batch gradient is summed in item order, so the
/// result is identical for any worker count.
pub fn train_with_rng(
    cfg: &TrainConfig,
    shape: &SystemConfig,
    c: &Constellation,
    rng: &mut Rng,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    shape.validate()?;
    if shape.mod_order != c.order() {
        return Err(Error::Config(format!(
            "system modulation order {} does not match constellation order {}",
            shape.mod_order,
            c.order()
        )));
    }
    let mut params = DpstParams::init(cfg.layers, cfg.p, shape.nt, shape.nr, shape.mod_order)?;
    let mut flat = params.to_flat();
    let mut adam = Adam::new(flat.len(), cfg.learning_rate);
    let mut history = Vec::with_capacity(cfg.steps);

    let pool = match cfg.workers {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
        ),
        None => None,
    };

    for step in 1..=cfg.steps {
        let batch: Vec<_> = (0..cfg.batch_size)
            .map(|_| {
                let snr = cfg.snr_set_db[rng.below(cfg.snr_set_db.len())];
                realize_with_noise(shape.nt, shape.nr, noise_variance(snr, shape.nt), c, rng)
            })
            .collect();

        let eval = || -> Result<Vec<(f64, Vec<f64>)>> {
            batch
                .par_iter()
                .map(|r| {
                    let traj = dpst_forward(&r.h, &r.y, &params)?;
                    let (loss, g) = dpst_backward(&traj, &r.h, &r.y, &r.x, &params, cfg.loss_mode)?;
                    Ok((loss, g.d_gamma.into_iter().chain(g.d_theta).collect()))
                })
                .collect()
        };
        let results = match &pool {
            Some(pool) => pool.install(eval)?,
            None => eval()?,
        };

        let scale = 1.0 / cfg.batch_size as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; flat.len()];
        for (l, g) in &results {
            loss += l;
            for (acc, gi) in grad.iter_mut().zip(g) {
                *acc += gi;
            }
        }
        loss *= scale;
        grad.iter_mut().for_each(|g| *g *= scale);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss { step });
        }
        history.push((step, loss));

        adam.step(&mut flat, &grad);
        params.set_flat(&flat);
    }

    Ok(TrainOutcome { params, history })
}
