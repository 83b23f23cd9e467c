//! Classical MIMO detectors: zero forcing, MMSE, ordered successive
//! interference cancellation on top of either, and exhaustive maximum
//! likelihood.

use crate::cplx::{gram, matvec, matvec_h, CMatrix, CVector, Cholesky, C64};
use crate::error::{Error, Result};
use crate::sysmodel::{demodulate_hard, Constellation};

/// Largest candidate set `detect_ml` will enumerate.
pub const ML_CANDIDATE_LIMIT: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    /// Estimate before slicing.
    pub xhat_soft: CVector,
    /// Sliced constellation points.
    pub symbols: CVector,
    pub bits: Vec<u8>,
}

impl DetectionResult {
    pub fn from_soft(xhat_soft: CVector, c: &Constellation) -> Self {
        let (_, symbols, bits) = demodulate_hard(&xhat_soft, c);
        DetectionResult {
            xhat_soft,
            symbols,
            bits,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SicMode {
    Zf,
    Mmse,
}

/// Solves the regularized normal equations `(H^H H + reg I) x = H^H y`.
fn normal_equations(h: &CMatrix, y: &CVector, reg: f64) -> Result<CVector> {
    let g = gram(h).add_diag(reg);
    Cholesky::new(&g)?.solve(&matvec_h(h, y)?)
}

pub fn detect_zf(h: &CMatrix, y: &CVector, c: &Constellation) -> Result<DetectionResult> {
    Ok(DetectionResult::from_soft(normal_equations(h, y, 0.0)?, c))
}

pub fn detect_mmse(
    h: &CMatrix,
    y: &CVector,
    noise_var: f64,
    c: &Constellation,
) -> Result<DetectionResult> {
    if noise_var.is_nan() || noise_var < 0.0 {
        return Err(Error::Config(format!(
            "noise variance {noise_var} is negative"
        )));
    }
    Ok(DetectionResult::from_soft(
        normal_equations(h, y, noise_var)?,
        c,
    ))
}

/// Ordered SIC. Each stage re-solves the reduced system, detects the stream
/// with the smallest post-filter error variance (lowest index on ties),
/// cancels it from the residual and drops its column.
pub fn detect_sic(
    h: &CMatrix,
    y: &CVector,
    noise_var: f64,
    mode: SicMode,
    c: &Constellation,
) -> Result<DetectionResult> {
    let reg = match mode {
        SicMode::Zf => 0.0,
        SicMode::Mmse => {
            if noise_var.is_nan() || noise_var < 0.0 {
                return Err(Error::Config(format!(
                    "noise variance {noise_var} is negative"
                )));
            }
            noise_var
        }
    };
    let nt = h.cols();
    let mut soft = CVector::zeros(nt);
    let mut sliced = CVector::zeros(nt);
    let mut indices = vec![0usize; nt];

    let mut hr = h.clone();
    let mut yr = y.clone();
    let mut remaining: Vec<usize> = (0..nt).collect();
    while !remaining.is_empty() {
        let chol = Cholesky::new(&gram(&hr).add_diag(reg))?;
        let est = chol.solve(&matvec_h(&hr, &yr)?)?;
        let errvar = chol.inverse_diagonal();
        let k = (0..errvar.len())
            .min_by(|&a, &b| errvar[a].total_cmp(&errvar[b]))
            .expect("non-empty");
        let stream = remaining[k];
        let idx = c.nearest(est[k]);
        let s = c.points()[idx];
        soft[stream] = est[k];
        sliced[stream] = s;
        indices[stream] = idx;

        for i in 0..hr.rows() {
            yr[i] -= hr[(i, k)] * s;
        }
        remaining.remove(k);
        if !remaining.is_empty() {
            hr = hr.without_column(k);
        }
    }

    let bits = indices.iter().flat_map(|&i| c.label(i)).collect();
    Ok(DetectionResult {
        xhat_soft: soft,
        symbols: sliced,
        bits,
    })
}

/// Exhaustive search for `argmin ||y - Hx||^2` over all `M^nt` candidates,
/// enumerated lexicographically over point indices (antenna 0 most
/// significant). Strict improvement is required to replace the incumbent,
/// so ties keep the earliest candidate.
pub fn detect_ml(h: &CMatrix, y: &CVector, c: &Constellation) -> Result<DetectionResult> {
    let nt = h.cols();
    let nr = h.rows();
    if y.len() != nr {
        return Err(Error::Dimension {
            op: "detect_ml",
            expected: nr,
            found: y.len(),
        });
    }
    let m = c.order();
    let candidates = (m as u128).checked_pow(nt as u32).unwrap_or(u128::MAX);
    if candidates > ML_CANDIDATE_LIMIT as u128 {
        return Err(Error::CandidateLimit {
            candidates,
            limit: ML_CANDIDATE_LIMIT,
        });
    }
    let pts = c.points();

    // Column contributions h_j * s for every antenna and point, laid out
    // [antenna][point][row].
    let mut contrib = vec![C64::new(0.0, 0.0); nt * m * nr];
    for j in 0..nt {
        for (p, s) in pts.iter().enumerate() {
            let base = (j * m + p) * nr;
            for i in 0..nr {
                contrib[base + i] = h[(i, j)] * s;
            }
        }
    }

    let mut digits = vec![0usize; nt];
    let mut best = digits.clone();
    let mut best_cost = f64::INFINITY;
    let mut resid = vec![C64::new(0.0, 0.0); nr];
    loop {
        resid.copy_from_slice(y.as_slice());
        for (j, &p) in digits.iter().enumerate() {
            let base = (j * m + p) * nr;
            for (r, v) in resid.iter_mut().zip(&contrib[base..base + nr]) {
                *r -= v;
            }
        }
        let cost: f64 = resid.iter().map(|r| r.norm_sqr()).sum();
        if cost < best_cost {
            best_cost = cost;
            best.copy_from_slice(&digits);
        }
        // odometer increment, last antenna fastest
        let mut j = nt;
        loop {
            if j == 0 {
                let symbols: CVector = best.iter().map(|&i| pts[i]).collect();
                let bits = best.iter().flat_map(|&i| c.label(i)).collect();
                return Ok(DetectionResult {
                    xhat_soft: symbols.clone(),
                    symbols,
                    bits,
                });
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < m {
                break;
            }
            digits[j] = 0;
        }
    }
}

/// `||y - Hx||^2`, the quantity every detector is ultimately judged by.
pub fn residual_cost(h: &CMatrix, x: &CVector, y: &CVector) -> Result<f64> {
    Ok(matvec(h, x)?.sub(y)?.norm_sqr())
}
