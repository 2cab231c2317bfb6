//! Seeded random instance generation.
//!
//! Each quantity family is drawn from its own ChaCha stream of the seed
//! (positions, rewards, service times, speeds), so the families do not
//! perturb one another.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, InstanceMeta, Point, Target};
use crate::rng;
use crate::{Error, Result};

const STREAM_POSITIONS: u64 = 0;
const STREAM_REWARDS: u64 = 1;
const STREAM_SERVICE: u64 = 2;
const STREAM_SPEEDS: u64 = 3;

/// The three experiment scales: (UAVs, targets) = (5, 30), (10, 60), (15, 90).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Small,
    Medium,
    Large,
}

impl Scale {
    pub const ALL: [Scale; 3] = [Scale::Small, Scale::Medium, Scale::Large];

    pub fn name(self) -> &'static str {
        match self {
            Scale::Small => "small",
            Scale::Medium => "medium",
            Scale::Large => "large",
        }
    }

    pub fn params(self) -> GenParams {
        let (n_uavs, n_targets) = match self {
            Scale::Small => (5, 30),
            Scale::Medium => (10, 60),
            Scale::Large => (15, 90),
        };
        GenParams {
            n_targets,
            n_uavs,
            ..GenParams::default()
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Scale::Small),
            "medium" => Ok(Scale::Medium),
            "large" => Ok(Scale::Large),
            other => Err(Error::InvalidArgument(format!(
                "unknown scale '{other}' (expected small, medium or large)"
            ))),
        }
    }
}

pub fn scale_preset(name: &str) -> Result<GenParams> {
    name.parse::<Scale>().map(Scale::params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub n_targets: usize,
    pub n_uavs: usize,
    pub area_side: f64,
    pub reward_range: [f64; 2],
    pub service_time_range: [f64; 2],
    pub speed_range: [f64; 2],
    /// `t_max = t_max_factor * area_side / mean(speeds)`.
    pub t_max_factor: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n_targets: 30,
            n_uavs: 5,
            area_side: 100.0,
            reward_range: [1.0, 10.0],
            service_time_range: [0.1, 1.0],
            speed_range: [0.5, 1.5],
            t_max_factor: 0.75,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_targets == 0 {
            return Err(Error::InvalidArgument("n_targets must be positive".into()));
        }
        if self.n_uavs == 0 {
            return Err(Error::InvalidArgument("n_uavs must be positive".into()));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("area_side", self.area_side)?;
        positive("t_max_factor", self.t_max_factor)?;
        let range = |name: &str, [lo, hi]: [f64; 2], strict: bool| {
            let lo_ok = if strict { lo > 0.0 } else { lo >= 0.0 };
            if lo.is_finite() && hi.is_finite() && lo_ok && lo <= hi {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} [{lo}, {hi}] is not a valid range"
                )))
            }
        };
        range("reward_range", self.reward_range, true)?;
        range("service_time_range", self.service_time_range, false)?;
        range("speed_range", self.speed_range, true)?;
        Ok(())
    }
}

pub fn generate(params: &GenParams) -> Result<Instance> {
    params.validate()?;
    let n = params.n_targets;
    let side = params.area_side;

    let mut pos_rng = rng::stream(params.seed, STREAM_POSITIONS);
    let mut reward_rng = rng::stream(params.seed, STREAM_REWARDS);
    let mut service_rng = rng::stream(params.seed, STREAM_SERVICE);
    let mut speed_rng = rng::stream(params.seed, STREAM_SPEEDS);

    let [r_lo, r_hi] = params.reward_range;
    let [t_lo, t_hi] = params.service_time_range;
    let [s_lo, s_hi] = params.speed_range;

    let targets = (1..=n)
        .map(|id| {
            let x = rng::uniform(&mut pos_rng, 0.0, side);
            let y = rng::uniform(&mut pos_rng, 0.0, side);
            let reward = rng::uniform(&mut reward_rng, r_lo, r_hi);
            let service = rng::uniform(&mut service_rng, t_lo, t_hi);
            Target::new(id, Point::new(x, y), reward, service)
        })
        .collect();
    let speeds: Vec<f64> = (0..params.n_uavs)
        .map(|_| rng::uniform(&mut speed_rng, s_lo, s_hi))
        .collect();
    let mean_speed = speeds.iter().sum::<f64>() / speeds.len() as f64;
    let t_max = params.t_max_factor * (side / mean_speed);

    let depot = Point::new(side / 2.0, side / 2.0);
    Ok(
        Instance::new(depot, targets, speeds, t_max)?.with_meta(InstanceMeta {
            seed: Some(params.seed),
            scale: None,
            params: Some(params.clone()),
        }),
    )
}

/// Generates a preset-scale instance and labels it with the scale name.
pub fn generate_scale(scale: Scale, seed: u64) -> Result<Instance> {
    let params = scale.params().with_seed(seed);
    let instance = generate(&params)?;
    Ok(instance.with_meta(InstanceMeta {
        seed: Some(seed),
        scale: Some(scale.name().to_string()),
        params: Some(params),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_experiment_table() {
        let s = scale_preset("small").unwrap();
        assert_eq!((s.n_uavs, s.n_targets), (5, 30));
        let m = scale_preset("medium").unwrap();
        assert_eq!((m.n_uavs, m.n_targets), (10, 60));
        let l = scale_preset("large").unwrap();
        assert_eq!((l.n_uavs, l.n_targets), (15, 90));
        assert!(matches!(
            scale_preset("tiny"),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn deterministic_under_seed() {
        let p = Scale::Small.params().with_seed(42);
        let a = serde_json::to_string(&generate(&p).unwrap()).unwrap();
        let b = serde_json::to_string(&generate(&p).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = generate(&p.clone().with_seed(43)).unwrap();
        let a = generate(&p).unwrap();
        assert_ne!(a.targets()[0].position, c.targets()[0].position);
    }

    #[test]
    fn families_use_independent_streams() {
        let base = Scale::Small.params().with_seed(5);
        let mut wider = base.clone();
        wider.reward_range = [2.0, 3.0];
        let a = generate(&base).unwrap();
        let b = generate(&wider).unwrap();
        for (ta, tb) in a.targets().iter().zip(b.targets()) {
            assert_eq!(ta.position, tb.position);
            assert_eq!(ta.service_time, tb.service_time);
        }
        assert_eq!(a.speeds(), b.speeds());
    }

    #[test]
    fn reward_mean_law_of_large_numbers() {
        let p = GenParams {
            n_targets: 1000,
            seed: 2024,
            ..GenParams::default()
        };
        let inst = generate(&p).unwrap();
        let mean = inst.upper_bound_reward() / 1000.0;
        assert!((5.0..=6.0).contains(&mean), "mean reward {mean}");
    }

    #[test]
    fn generated_values_in_declared_ranges() {
        for seed in 0..20 {
            let p = Scale::Medium.params().with_seed(seed);
            let inst = generate(&p).unwrap();
            assert_eq!(inst.depot(), Point::new(50.0, 50.0));
            for t in inst.targets() {
                assert!((0.0..=100.0).contains(&t.position.x));
                assert!((0.0..=100.0).contains(&t.position.y));
                assert!(t.reward >= 1.0 && t.reward <= 10.0);
                assert!(t.service_time >= 0.1 && t.service_time <= 1.0);
            }
            assert!(inst.speeds().iter().all(|s| (0.5..=1.5).contains(s)));
            let mean = inst.speeds().iter().sum::<f64>() / inst.n_uavs() as f64;
            assert_eq!(inst.t_max(), 0.75 * (100.0 / mean));
        }
    }

    #[test]
    fn rejects_bad_params() {
        let zero = GenParams {
            n_targets: 0,
            ..GenParams::default()
        };
        assert!(matches!(generate(&zero), Err(Error::InvalidArgument(_))));
        let bad_range = GenParams {
            reward_range: [3.0, 1.0],
            ..GenParams::default()
        };
        assert!(generate(&bad_range).is_err());
        let zero_speed = GenParams {
            speed_range: [0.0, 1.0],
            ..GenParams::default()
        };
        assert!(generate(&zero_speed).is_err());
    }

    #[test]
    fn meta_records_params() {
        let inst = generate_scale(Scale::Large, 3).unwrap();
        let meta = inst.meta().unwrap();
        assert_eq!(meta.scale.as_deref(), Some("large"));
        assert_eq!(meta.seed, Some(3));
        assert_eq!(meta.params.as_ref().unwrap().n_targets, 90);
    }
}
