//! Replication over days, summary statistics and the fleet-size sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accounting::{daily_profit, AccountingError, CostModel, Money, MoneyReport, Tariff};
use crate::model::{run_day, DailyTally, ModelConfig, SimError};
use crate::rng::make_stream;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Accounting(#[from] AccountingError),
    #[error("at least one day must be simulated")]
    NoDays,
    #[error("the sweep needs at least one fleet level")]
    NoLevels,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Economics {
    pub tariff: Tariff,
    pub costs: CostModel,
}

/// Total, mean, sample sd (n - 1), variance, min and max of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatBlock {
    pub n: usize,
    pub total: f64,
    pub mean: f64,
    pub sd: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

impl StatBlock {
    /// Sums run in index order so the result never depends on how the
    /// values were produced. A single value has sd 0.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { n, total: 0.0, mean: 0.0, sd: 0.0, variance: 0.0, min: 0.0, max: 0.0 };
        }
        let total: f64 = values.iter().sum();
        let mean = total / n as f64;
        let variance = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let sd = variance.sqrt();
        // Recompute variance from sd so that the two agree to the last ulp.
        let variance = sd * sd;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Guard the rounding of total / n against the bounds.
        let mean = mean.clamp(min, max);
        Self { n, total, mean, sd, variance, min, max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayResult {
    pub day: u64,
    pub tally: DailyTally,
    pub money: MoneyReport,
}

/// Every per-day quantity that gets a summary block, in report order.
pub const METRICS: [&str; 14] = [
    "arrivals",
    "ordered_no_driver",
    "ordered_with_driver",
    "cancelled_ineligible",
    "cancelled_no_car",
    "cancelled_no_driver",
    "in_system_at_close",
    "cars_used",
    "drivers_used",
    "revenue",
    "loss",
    "overhead",
    "profit",
    "gap",
];

impl DayResult {
    pub fn metric(&self, name: &str) -> Option<f64> {
        let t = &self.tally;
        let m = &self.money;
        let v = match name {
            "arrivals" => t.arrivals.into(),
            "ordered_no_driver" => t.ordered_no_driver.into(),
            "ordered_with_driver" => t.ordered_with_driver.into(),
            "cancelled_ineligible" => t.cancelled_ineligible.into(),
            "cancelled_no_car" => t.cancelled_no_car.into(),
            "cancelled_no_driver" => t.cancelled_no_driver.into(),
            "in_system_at_close" => t.in_system_at_close.into(),
            "cars_used" => t.cars_used.into(),
            "drivers_used" => t.drivers_used.into(),
            "revenue" => m.revenue as f64,
            "loss" => m.loss as f64,
            "overhead" => m.overhead as f64,
            "profit" => m.profit as f64,
            "gap" => m.gap.into(),
            _ => return None,
        };
        Some(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub metric: String,
    #[serde(flatten)]
    pub stats: StatBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub fleet_size: u32,
    pub days: Vec<DayResult>,
    pub stats: Vec<MetricStats>,
}

impl Replication {
    pub fn stat(&self, metric: &str) -> Option<&StatBlock> {
        self.stats.iter().find(|m| m.metric == metric).map(|m| &m.stats)
    }

    pub fn series(&self, metric: &str) -> Vec<f64> {
        self.days.iter().filter_map(|d| d.metric(metric)).collect()
    }

    pub fn total_profit(&self) -> Money {
        self.days.iter().map(|d| d.money.profit).sum()
    }
}

/// Simulates days `0..n_days`. Days run in parallel on the current rayon
/// pool; the result is identical to a serial run.
pub fn replicate(cfg: &ModelConfig, econ: &Economics, n_days: u64) -> Result<Replication, ExperimentError> {
    if n_days == 0 {
        return Err(ExperimentError::NoDays);
    }
    cfg.validate().map_err(SimError::from)?;
    let days = (0..n_days)
        .into_par_iter()
        .map(|day| {
            let tally = run_day(cfg, day)?;
            let money = daily_profit(&tally, cfg.fleet_size, &econ.tariff, &econ.costs)?;
            Ok(DayResult { day, tally, money })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let stats = METRICS
        .iter()
        .map(|&name| {
            let values: Vec<f64> = days.iter().filter_map(|d| d.metric(name)).collect();
            MetricStats { metric: name.to_string(), stats: StatBlock::from_values(&values) }
        })
        .collect();
    Ok(Replication { fleet_size: cfg.fleet_size, days, stats })
}

/// How random streams relate across sweep levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamPolicy {
    /// Day `d` sees the same random numbers at every fleet level.
    #[default]
    Common,
    /// Each level gets its own master seed.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub level: u32,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub levels: Vec<u32>,
    pub policy: StreamPolicy,
    pub replications: Vec<Replication>,
    pub profit: Vec<StatBlock>,
    pub recommended: Recommendation,
}

impl SweepResult {
    /// Daily profit, one row per day, one column per level.
    pub fn profit_matrix(&self) -> Vec<Vec<Money>> {
        let n_days = self.replications.first().map_or(0, |r| r.days.len());
        (0..n_days)
            .map(|d| self.replications.iter().map(|r| r.days[d].money.profit).collect())
            .collect()
    }
}

fn level_seed(master_seed: u64, level: u32) -> u64 {
    // Any fixed, level-dependent key will do; a ChaCha stream makes a good mixer.
    make_stream(master_seed, 0xD1CE_0000_0000_0000 | u64::from(level)).next_u64()
}

pub fn sweep(
    cfg: &ModelConfig,
    econ: &Economics,
    levels: &[u32],
    n_days: u64,
    policy: StreamPolicy,
) -> Result<SweepResult, ExperimentError> {
    if levels.is_empty() {
        return Err(ExperimentError::NoLevels);
    }
    let replications = levels
        .par_iter()
        .map(|&level| {
            let master_seed = match policy {
                StreamPolicy::Common => cfg.master_seed,
                StreamPolicy::Independent => level_seed(cfg.master_seed, level),
            };
            let level_cfg = ModelConfig { fleet_size: level, master_seed, ..cfg.clone() };
            replicate(&level_cfg, econ, n_days)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let profit = replications
        .iter()
        .map(|r| *r.stat("profit").expect("profit is always summarised"))
        .collect();
    let mut result = SweepResult {
        levels: levels.to_vec(),
        policy,
        replications,
        profit,
        recommended: Recommendation { level: levels[0], mean: 0.0, min: 0.0, max: 0.0 },
    };
    result.recommended = recommend(&result);
    Ok(result)
}

/// The level with the highest mean daily profit; ties go to the smaller
/// fleet. Means are compared through exact integer totals, which is
/// equivalent because every level runs the same number of days.
pub fn recommend(sr: &SweepResult) -> Recommendation {
    let best = sr
        .levels
        .iter()
        .zip(&sr.replications)
        .zip(&sr.profit)
        .max_by(|((la, ra), _), ((lb, rb), _)| {
            ra.total_profit().cmp(&rb.total_profit()).then(lb.cmp(la))
        })
        .expect("sweep has at least one level");
    let ((&level, _), stats) = best;
    Recommendation { level, mean: stats.mean, min: stats.min, max: stats.max }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep_with_profits(level: u32, profits: &[Money]) -> Replication {
        let days = profits
            .iter()
            .enumerate()
            .map(|(i, &p)| DayResult {
                day: i as u64,
                tally: DailyTally::default(),
                money: MoneyReport { revenue: p, loss: 0, overhead: 0, profit: p, gap: 0 },
            })
            .collect();
        Replication { fleet_size: level, days, stats: Vec::new() }
    }

    fn fake_sweep(levels: &[u32], means: &[Money]) -> SweepResult {
        let replications: Vec<_> =
            levels.iter().zip(means).map(|(&l, &m)| rep_with_profits(l, &[m - 10, m, m + 10])).collect();
        let profit = replications
            .iter()
            .map(|r| StatBlock::from_values(&r.series("profit")))
            .collect();
        SweepResult {
            levels: levels.to_vec(),
            policy: StreamPolicy::Common,
            replications,
            profit,
            recommended: Recommendation { level: 0, mean: 0.0, min: 0.0, max: 0.0 },
        }
    }

    #[test]
    fn recommends_argmax_mean() {
        let sr = fake_sweep(&[30, 40, 50, 53], &[1010, 1250, 1050, 990]);
        let r = recommend(&sr);
        assert_eq!(r.level, 40);
        assert_eq!((r.mean, r.min, r.max), (1250.0, 1240.0, 1260.0));
    }

    #[test]
    fn ties_go_to_smaller_fleet() {
        let sr = fake_sweep(&[53, 30, 40], &[500, 500, 500]);
        assert_eq!(recommend(&sr).level, 30);
        let sr = fake_sweep(&[40], &[-3]);
        assert_eq!(recommend(&sr).level, 40);
    }

    #[test]
    fn stat_block_single_sample() {
        let s = StatBlock::from_values(&[7.0]);
        assert_eq!((s.sd, s.variance, s.min, s.max, s.mean, s.total), (0.0, 0.0, 7.0, 7.0, 7.0, 7.0));
    }

    #[test]
    fn stat_block_constant_series() {
        let s = StatBlock::from_values(&[3.0; 30]);
        assert_eq!((s.sd, s.variance), (0.0, 0.0));
        assert_eq!(s.total, 90.0);
    }

    #[test]
    fn stat_block_sample_sd() {
        // 2, 4, 4, 4, 5, 5, 7, 9: mean 5, squared deviations sum to 32, so s^2 = 32/7.
        let s = StatBlock::from_values(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(s.mean, 5.0);
        assert!((s.variance - 32.0 / 7.0).abs() < 1e-12);
        assert_eq!((s.min, s.max), (2.0, 9.0));
    }

    #[test]
    fn zero_days_and_no_levels_rejected() {
        let cfg = ModelConfig::default();
        let econ = Economics::default();
        assert!(matches!(replicate(&cfg, &econ, 0), Err(ExperimentError::NoDays)));
        assert!(matches!(sweep(&cfg, &econ, &[], 3, StreamPolicy::Common), Err(ExperimentError::NoLevels)));
    }

    #[test]
    fn single_level_sweep_recommends_itself() {
        let cfg = ModelConfig { master_seed: 3, ..ModelConfig::default() };
        let sr = sweep(&cfg, &Economics::default(), &[40], 5, StreamPolicy::Common).unwrap();
        assert_eq!(sr.recommended.level, 40);
        assert_eq!(sr.profit_matrix().len(), 5);
    }
}
