//! Monte-Carlo system model: constellations, Rayleigh channels, AWGN and
//! error counting.
//!
//! Channel entries are CN(0, 1) and symbols have unit average energy, so the
//! SNR is set purely through the noise variance: `snr = nt / noise_var` per
//! receive antenna.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cplx::{matvec, CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Deterministic seedable generator. Uniforms come from ChaCha8 (portable
/// across platforms); Gaussians use Box–Muller, caching the second variate.
#[derive(Clone, Debug)]
pub struct Rng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    pub fn bit(&mut self) -> u8 {
        (self.inner.next_u32() & 1) as u8
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Standard normal variate.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], keeping ln finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = std::f64::consts::TAU * u2;
        self.spare = Some(r * phi.sin());
        r * phi.cos()
    }

    /// Circularly symmetric complex Gaussian with total variance `var`.
    pub fn complex_normal(&mut self, var: f64) -> C64 {
        let s = (var / 2.0).sqrt();
        let re = self.gaussian();
        let im = self.gaussian();
        C64::new(s * re, s * im)
    }
}

/// 64-bit mixing function (SplitMix64 finalizer).
pub fn hash64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Gray-mapped constellation with unit average energy.
///
/// Point `i` carries the bit label whose big-endian value is `i`, so the
/// bit-to-index table is the identity. Square QAM puts the first half of
/// the label on the quadrature axis and the second half on the in-phase axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<C64>,
}

impl Constellation {
    pub fn new(order: usize) -> Result<Self> {
        make_constellation(order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Index of the point carrying `bits` (big-endian label).
    pub fn index_of(&self, bits: &[u8]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
    }

    /// Bit label of point `index`.
    pub fn label(&self, index: usize) -> impl Iterator<Item = u8> + '_ {
        (0..self.bits_per_symbol)
            .rev()
            .map(move |k| ((index >> k) & 1) as u8)
    }

    /// Nearest point index; ties go to the lowest index.
    pub fn nearest(&self, z: C64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.min((a - b).norm());
            }
        }
        d
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order as f64
    }
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = 0;
    while g != 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

/// Builds BPSK (`M = 2`) or square Gray QAM (`M = 4, 16, 64`).
pub fn make_constellation(order: usize) -> Result<Constellation> {
    let points = match order {
        2 => vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
        4 | 16 | 64 => {
            let k = order.trailing_zeros() as usize;
            let half = k / 2;
            let levels = 1usize << half;
            let scale = (2.0 * ((levels * levels) as f64 - 1.0) / 3.0)
                .sqrt()
                .recip();
            // Gray label g sits at PAM position gray_decode(g), counted from the top.
            let amp = |g: usize| (levels as f64 - 1.0 - 2.0 * gray_decode(g) as f64) * scale;
            (0..order)
                .map(|idx| {
                    let q = idx >> half;
                    let i = idx & (levels - 1);
                    C64::new(amp(i), amp(q))
                })
                .collect()
        }
        _ => return Err(Error::UnsupportedOrder(order)),
    };
    Ok(Constellation {
        order,
        bits_per_symbol: order.trailing_zeros() as usize,
        points,
    })
}

pub fn modulate(bits: &[u8], c: &Constellation) -> Result<CVector> {
    let k = c.bits_per_symbol;
    if !bits.len().is_multiple_of(k) {
        return Err(Error::BitLength {
            len: bits.len(),
            bits_per_symbol: k,
        });
    }
    Ok(bits
        .chunks(k)
        .map(|chunk| c.points[c.index_of(chunk)])
        .collect())
}

/// Slices each entry to the nearest point. Returns the point indices, the
/// sliced symbols and the concatenated bit labels.
pub fn demodulate_hard(xhat: &CVector, c: &Constellation) -> (Vec<usize>, CVector, Vec<u8>) {
    let idx: Vec<usize> = xhat.iter().map(|&z| c.nearest(z)).collect();
    let symbols = idx.iter().map(|&i| c.points[i]).collect();
    let bits = idx.iter().flat_map(|&i| c.label(i)).collect();
    (idx, symbols, bits)
}

/// I.i.d. CN(0, 1) channel matrix.
pub fn sample_channel(nr: usize, nt: usize, rng: &mut Rng) -> CMatrix {
    let data = (0..nr * nt).map(|_| rng.complex_normal(1.0)).collect();
    CMatrix::from_row_major(nr, nt, data).expect("nr, nt >= 1")
}

/// Per-antenna noise power for the given SNR with unit-energy symbols and
/// unit-variance channel taps.
pub fn noise_variance(snr_db: f64, nt: usize) -> f64 {
    nt as f64 / 10f64.powf(snr_db / 10.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemConfig {
    pub nt: usize,
    pub nr: usize,
    pub mod_order: usize,
    pub snr_db: f64,
}

impl SystemConfig {
    pub fn new(nt: usize, nr: usize, mod_order: usize, snr_db: f64) -> Result<Self> {
        let cfg = SystemConfig {
            nt,
            nr,
            mod_order,
            snr_db,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nt == 0 {
            return Err(Error::Config("nt must be at least 1".into()));
        }
        if self.nr < self.nt {
            return Err(Error::Config(format!(
                "nr ({}) must be at least nt ({})",
                self.nr, self.nt
            )));
        }
        if !self.mod_order.is_power_of_two() || self.mod_order < 2 {
            return Err(Error::Config(format!(
                "modulation order {} is not a power of two",
                self.mod_order
            )));
        }
        if self.snr_db.is_nan() {
            return Err(Error::Config("snr_db is NaN".into()));
        }
        Ok(())
    }

    pub fn noise_var(&self) -> f64 {
        noise_variance(self.snr_db, self.nt)
    }

    pub fn bits_per_frame(&self) -> usize {
        self.nt * self.mod_order.trailing_zeros() as usize
    }
}

/// One draw of `y = Hx + n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub h: CMatrix,
    pub x: CVector,
    pub bits: Vec<u8>,
    pub noise_var: f64,
    pub y: CVector,
}

pub fn realize(cfg: &SystemConfig, c: &Constellation, rng: &mut Rng) -> ChannelRealization {
    realize_with_noise(cfg.nt, cfg.nr, cfg.noise_var(), c, rng)
}

/// Draws bits, then `H`, then the noise, in that order. A zero `noise_var`
/// gives `y == Hx` exactly.
pub fn realize_with_noise(
    nt: usize,
    nr: usize,
    noise_var: f64,
    c: &Constellation,
    rng: &mut Rng,
) -> ChannelRealization {
    let bits: Vec<u8> = (0..nt * c.bits_per_symbol).map(|_| rng.bit()).collect();
    let x = modulate(&bits, c).expect("bit count is a multiple of bits_per_symbol");
    let h = sample_channel(nr, nt, rng);
    let mut y = matvec(&h, &x).expect("shapes agree");
    if noise_var > 0.0 {
        for yi in y.as_mut_slice() {
            *yi += rng.complex_normal(noise_var);
        }
    }
    ChannelRealization {
        h,
        x,
        bits,
        noise_var,
        y,
    }
}

pub fn bit_errors(bits_hat: &[u8], bits: &[u8]) -> Result<usize> {
    if bits_hat.len() != bits.len() {
        return Err(Error::Dimension {
            op: "bit_error_rate",
            expected: bits.len(),
            found: bits_hat.len(),
        });
    }
    Ok(bits_hat.iter().zip(bits).filter(|(a, b)| a != b).count())
}

pub fn bit_error_rate(bits_hat: &[u8], bits: &[u8]) -> Result<f64> {
    let errs = bit_errors(bits_hat, bits)?;
    Ok(if bits.is_empty() {
        0.0
    } else {
        errs as f64 / bits.len() as f64
    })
}

#[cfg(test)]
mod tests {
    use super::Rng;
    use super::*;
    use proptest::prelude::*;

    const ORDERS: [usize; 4] = [2, 4, 16, 64];

    #[test]
    fn bpsk_points() {
        let c = make_constellation(2).unwrap();
        assert_eq!(c.points(), &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        assert_eq!(modulate(&[0], &c).unwrap()[0], C64::new(1.0, 0.0));
        assert_eq!(modulate(&[1], &c).unwrap()[0], C64::new(-1.0, 0.0));
    }

    #[test]
    fn qpsk_mapping_is_bit_exact() {
        let c = make_constellation(4).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cases = [
            ([0, 0], C64::new(s, s)),
            ([0, 1], C64::new(-s, s)),
            ([1, 1], C64::new(-s, -s)),
            ([1, 0], C64::new(s, -s)),
        ];
        for (bits, want) in cases {
            let got = modulate(&bits, &c).unwrap()[0];
            assert!((got - want).norm() < 1e-15, "{bits:?}");
            assert!((got.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_energy_and_distinct_points() {
        for m in ORDERS {
            let c = make_constellation(m).unwrap();
            assert!((c.average_energy() - 1.0).abs() < 1e-12, "M={m}");
            assert!(c.min_distance() > 1e-3);
            assert_eq!(c.points().len(), m);
        }
    }

    #[test]
    fn gray_adjacency() {
        for m in ORDERS {
            let c = make_constellation(m).unwrap();
            let dmin = c.min_distance();
            let pts = c.points();
            let mut pairs = 0;
            for i in 0..m {
                for j in i + 1..m {
                    if (pts[i] - pts[j]).norm() < dmin * (1.0 + 1e-9) {
                        assert_eq!((i ^ j).count_ones(), 1, "M={m} {i} {j}");
                        pairs += 1;
                    }
                }
            }
            assert!(pairs >= m / 2);
        }
    }

    #[test]
    fn unsupported_order() {
        for m in [0, 1, 3, 8, 32, 128] {
            assert!(matches!(
                make_constellation(m),
                Err(Error::UnsupportedOrder(_))
            ));
        }
    }

    #[test]
    fn modulate_length_error() {
        let c = make_constellation(16).unwrap();
        assert!(matches!(
            modulate(&[0, 1, 1], &c),
            Err(Error::BitLength {
                len: 3,
                bits_per_symbol: 4
            })
        ));
    }

    #[test]
    fn slicing_basics() {
        let c = make_constellation(2).unwrap();
        let (idx, sym, bits) = demodulate_hard(&CVector::from_vec(vec![C64::new(0.3, 0.1)]), &c);
        assert_eq!(idx, vec![0]);
        assert_eq!(sym[0], C64::new(1.0, 0.0));
        assert_eq!(bits, vec![0]);
        // equidistant: lowest index wins
        let (idx, _, _) = demodulate_hard(&CVector::from_vec(vec![C64::new(0.0, 0.5)]), &c);
        assert_eq!(idx, vec![0]);
        let q = make_constellation(16).unwrap();
        for (i, p) in q.points().iter().enumerate() {
            assert_eq!(q.nearest(*p), i);
        }
    }

    #[test]
    fn perturbed_qpsk_points_recover() {
        let c = make_constellation(4).unwrap();
        let r = 0.5 * c.min_distance() * 0.999;
        for (i, p) in c.points().iter().enumerate() {
            for k in 0..360 {
                let phi = (k as f64).to_radians();
                let z = p + C64::from_polar(r, phi);
                // brute-force distance comparison
                let want = (0..4)
                    .min_by(|&a, &b| {
                        (z - c.points()[a])
                            .norm()
                            .total_cmp(&(z - c.points()[b]).norm())
                    })
                    .unwrap();
                assert_eq!(want, i);
                assert_eq!(c.nearest(z), i);
            }
        }
    }

    #[test]
    fn channel_moments() {
        let mut rng = Rng::new(7);
        let n = 100_000;
        let mut mean = C64::new(0.0, 0.0);
        let mut power = 0.0;
        let mut cross = C64::new(0.0, 0.0);
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        for _ in 0..n / 2 {
            let h = sample_channel(1, 2, &mut rng);
            let (a, b) = (h[(0, 0)], h[(0, 1)]);
            mean += a + b;
            power += a.norm_sqr() + b.norm_sqr();
            cross += a * b.conj();
            p0 += a.norm_sqr();
            p1 += b.norm_sqr();
        }
        mean /= n as f64;
        power /= n as f64;
        assert!(mean.norm() < 0.02, "mean {mean}");
        assert!((0.98..=1.02).contains(&power), "power {power}");
        let corr = cross.norm() / (p0 * p1).sqrt();
        assert!(corr < 0.02, "corr {corr}");
    }

    #[test]
    fn channel_is_deterministic() {
        let a = sample_channel(8, 4, &mut Rng::new(42));
        let b = sample_channel(8, 4, &mut Rng::new(42));
        assert_eq!(a, b);
        let c = sample_channel(8, 4, &mut Rng::new(43));
        assert_ne!(a, c);
    }

    #[test]
    fn noise_variance_values() {
        assert_eq!(noise_variance(0.0, 4), 4.0);
        assert!((noise_variance(10.0, 1) - 0.1).abs() < 1e-15);
        assert!((noise_variance(20.0, 4) - 0.04).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for k in -20..60 {
            let v = noise_variance(k as f64 * 0.5, 4);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn noiseless_realization_is_exact() {
        let c = make_constellation(4).unwrap();
        let r = realize_with_noise(4, 8, 0.0, &c, &mut Rng::new(1));
        assert_eq!(r.y, matvec(&r.h, &r.x).unwrap());
        assert_eq!(r.bits.len(), 8);
    }

    #[test]
    fn received_power_accounting() {
        let c = make_constellation(4).unwrap();
        let cfg = SystemConfig::new(4, 8, 4, 0.0).unwrap();
        let mut rng = Rng::new(2024);
        let trials = 10_000;
        let mut total = 0.0;
        for _ in 0..trials {
            total += realize(&cfg, &c, &mut rng).y.norm_sqr();
        }
        let per_antenna = total / (trials * cfg.nr) as f64;
        let want = cfg.nt as f64 + cfg.noise_var();
        assert!(
            (per_antenna - want).abs() / want < 0.05,
            "{per_antenna} vs {want}"
        );
    }

    #[test]
    fn realization_is_deterministic() {
        let c = make_constellation(16).unwrap();
        let cfg = SystemConfig::new(4, 8, 16, 12.0).unwrap();
        assert_eq!(
            realize(&cfg, &c, &mut Rng::new(5)),
            realize(&cfg, &c, &mut Rng::new(5))
        );
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(0, 8, 4, 0.0).is_err());
        assert!(SystemConfig::new(4, 3, 4, 0.0).is_err());
        assert!(SystemConfig::new(4, 8, 6, 0.0).is_err());
        assert!(SystemConfig::new(4, 4, 4, 0.0).is_ok());
    }

    #[test]
    fn ber_counting() {
        let b = [0u8, 1, 1, 0, 1, 0, 0, 1];
        assert_eq!(bit_error_rate(&b, &b).unwrap(), 0.0);
        let inv: Vec<u8> = b.iter().map(|x| 1 - x).collect();
        assert_eq!(bit_error_rate(&inv, &b).unwrap(), 1.0);
        let mut one = b;
        one[3] ^= 1;
        assert_eq!(bit_error_rate(&one, &b).unwrap(), 0.125);
        assert!(bit_error_rate(&b[..7], &b).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn modulation_round_trip(order_idx in 0usize..3, seed in any::<u64>(), syms in 1usize..64) {
            let c = make_constellation([2, 4, 16][order_idx]).unwrap();
            let mut rng = Rng::new(seed);
            let bits: Vec<u8> = (0..syms * c.bits_per_symbol()).map(|_| rng.bit()).collect();
            let x = modulate(&bits, &c).unwrap();
            let (_, sym, back) = demodulate_hard(&x, &c);
            prop_assert_eq!(back, bits);
            prop_assert_eq!(sym, x);
        }
    }
}
