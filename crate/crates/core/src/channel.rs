//! Seeded channel generation: distance-based path loss, log-normal shadowing,
//! transmit antenna gain and Rayleigh small-scale fading.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::model::NetworkConfig;
use crate::{Error, Result};

/// Random stream type used for every channel draw.
pub type Stream = ChaCha8Rng;

/// Large-scale propagation constants. Distances passed to the model are in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationParams {
    pub pathloss_intercept_db: f64,
    pub pathloss_slope_db: f64,
    /// Standard deviation of the log-normal shadowing, in dB. Zero disables shadowing.
    pub shadow_sigma_db: f64,
    pub antenna_gain_dbi: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self { pathloss_intercept_db: 128.1, pathloss_slope_db: 37.6, shadow_sigma_db: 8.0, antenna_gain_dbi: 15.0 }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.pathloss_intercept_db > 0.0
            && self.pathloss_slope_db > 0.0
            && self.shadow_sigma_db >= 0.0
            && self.antenna_gain_dbi.is_finite()
            && self.pathloss_intercept_db.is_finite()
            && self.pathloss_slope_db.is_finite()
            && self.shadow_sigma_db.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid propagation parameters {self:?}")))
        }
    }

    /// `β(d) = 10^(−(a + b·log10 d)/10)` with `d` in km.
    pub fn path_loss(&self, d_km: f64) -> Result<f64> {
        if !(d_km > 0.0) || !d_km.is_finite() {
            return Err(Error::domain(format!("distance must be positive, got {d_km}")));
        }
        Ok(10f64.powf(-(self.pathloss_intercept_db + self.pathloss_slope_db * d_km.log10()) / 10.0))
    }
}

/// Path loss of the default model at distance `d_km`.
pub fn path_loss_linear(d_km: f64) -> Result<f64> {
    PropagationParams::default().path_loss(d_km)
}

/// Draws `n` i.i.d. CN(0, 1) entries.
pub fn sample_rayleigh_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::domain("vector length must be at least 1"));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok((0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * s, im * s)
        })
        .collect())
}

/// `sqrt(β(d))·ψ·φ·h̃`: one shadowing draw per link, applied to all antennas.
pub fn make_channel<R: Rng + ?Sized>(
    rng: &mut R,
    d_km: f64,
    params: &PropagationParams,
    n: usize,
) -> Result<Vec<Complex64>> {
    let beta = params.path_loss(d_km)?;
    let x_db: f64 = rng.sample::<f64, _>(StandardNormal) * params.shadow_sigma_db;
    let psi = 10f64.powf(x_db / 20.0);
    let phi = 10f64.powf(params.antenna_gain_dbi / 20.0);
    let scale = beta.sqrt() * psi * phi;
    let mut h = sample_rayleigh_vector(rng, n)?;
    h.iter_mut().for_each(|v| *v *= scale);
    Ok(h)
}

/// Channel groups, each drawn from its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Group {
    MbsToMu = 0,
    MbsToIr = 1,
    MbsToEr = 2,
    FbsToIr = 3,
    FbsToEr = 4,
    FbsToMu = 5,
}

/// Independent stream for link `index` of `group` under `seed`.
pub fn stream(seed: u64, group: Group, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((group as u64) << 32) | index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    /// MBS → MU_m.
    #[serde(with = "complex_pairs::nested")]
    pub h_m: Vec<Vec<Complex64>>,
    /// MBS → IR.
    #[serde(with = "complex_pairs")]
    pub h_i0: Vec<Complex64>,
    /// MBS → ER_k.
    #[serde(with = "complex_pairs::nested")]
    pub g_k0: Vec<Vec<Complex64>>,
    /// FBS → IR.
    #[serde(with = "complex_pairs")]
    pub h_i: Vec<Complex64>,
    /// FBS → ER_k.
    #[serde(with = "complex_pairs::nested")]
    pub g_k: Vec<Vec<Complex64>>,
    /// FBS → MU_m.
    #[serde(with = "complex_pairs::nested")]
    pub l_m: Vec<Vec<Complex64>>,
}

impl ChannelSet {
    /// Checks vector counts, lengths and finiteness against `cfg`.
    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        let groups: [(&str, Vec<&Vec<Complex64>>, usize, usize); 6] = [
            ("h_m", self.h_m.iter().collect(), cfg.m, cfg.n_m),
            ("h_i0", vec![&self.h_i0], 1, cfg.n_m),
            ("g_k0", self.g_k0.iter().collect(), cfg.k, cfg.n_m),
            ("h_i", vec![&self.h_i], 1, cfg.n_f),
            ("g_k", self.g_k.iter().collect(), cfg.k, cfg.n_f),
            ("l_m", self.l_m.iter().collect(), cfg.m, cfg.n_f),
        ];
        for (name, vs, count, len) in groups {
            if vs.len() != count {
                return Err(Error::shape(format!("{name}: expected {count} vectors, got {}", vs.len())));
            }
            for v in vs {
                if v.len() != len {
                    return Err(Error::shape(format!("{name}: expected length {len}, got {}", v.len())));
                }
                if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::shape(format!("{name}: non-finite entry")));
                }
            }
        }
        Ok(())
    }
}

/// Draws every channel of one network realisation.
pub fn generate_channel_set(cfg: &NetworkConfig, seed: u64) -> Result<ChannelSet> {
    cfg.validate()?;
    let p = &cfg.propagation;
    let d = &cfg.distances;
    let km = |m: f64| m / 1000.0;
    let draw = |group, index: usize, d_m: f64, n| make_channel(&mut stream(seed, group, index as u64), km(d_m), p, n);
    let many =
        |group, count: usize, d_m: f64, n| (0..count).map(|i| draw(group, i, d_m, n)).collect::<Result<Vec<_>>>();
    Ok(ChannelSet {
        h_m: many(Group::MbsToMu, cfg.m, d.mbs_m, cfg.n_m)?,
        h_i0: draw(Group::MbsToIr, 0, d.mbs_m, cfg.n_m)?,
        g_k0: many(Group::MbsToEr, cfg.k, d.mbs_m, cfg.n_m)?,
        h_i: draw(Group::FbsToIr, 0, d.fbs_ir_m, cfg.n_f)?,
        g_k: many(Group::FbsToEr, cfg.k, d.fbs_er_m, cfg.n_f)?,
        l_m: many(Group::FbsToMu, cfg.m, d.fbs_mu_m, cfg.n_f)?,
    })
}

/// Serialises complex vectors as arrays of `[re, im]` pairs.
pub mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }

    pub mod nested {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|row| row.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
            let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
            Ok(rows.into_iter().map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect())
        }
    }
}
