#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;

use rentsim::config::{load_config, Scenario};
use rentsim::model::{DayRecord, ModelConfig, PoolAction, PoolId, ServerCounts, TraceKind};
use rentsim::rng::{make_stream, RandomStream};

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn calibrated() -> Scenario {
    load_config(&workspace_root().join("configs/calibrated.toml")).expect("shipped config loads")
}

/// A random but valid model configuration, for fuzzing.
pub fn random_config(rng: &mut RandomStream) -> ModelConfig {
    let mut c = ModelConfig::default();
    let mut int = |lo: u32, hi: u32| lo + (rng.next_u64() % u64::from(hi - lo + 1)) as u32;
    c.fleet_size = int(0, 60);
    c.driver_count = int(0, 12);
    c.servers = ServerCounts { customer_service: int(0, 6), maintenance: int(0, 6), planning: int(0, 3) };
    c.probs.eligible = rng.next_f64();
    c.probs.wants_driver = rng.next_f64();
    c.probs.accept_driver_offer = rng.next_f64();
    c.probs.accept_reschedule = rng.next_f64();
    c.master_seed = rng.next_u64();
    c
}

pub fn fuzz_stream(tag: u64) -> RandomStream {
    make_stream(0xF022, tag)
}

/// Replays a day's trace and checks, record by record, that no pool is
/// ever over-committed and that queued entities are served in FIFO order.
pub fn audit_trace(rec: &DayRecord, cfg: &ModelConfig) -> Result<(), String> {
    let capacity = |p: PoolId| match p {
        PoolId::CustomerService => cfg.servers.customer_service,
        PoolId::Maintenance => cfg.servers.maintenance,
        PoolId::Planning => cfg.servers.planning,
        PoolId::Cars => cfg.fleet_size,
        PoolId::Drivers => cfg.driver_count,
    };
    let mut in_use: HashMap<PoolId, u32> = HashMap::new();
    let mut queues: HashMap<PoolId, VecDeque<u64>> = HashMap::new();
    let mut last_time = 0.0;
    for r in &rec.trace {
        if r.time < last_time {
            return Err(format!("clock went backwards at seq {}", r.seq));
        }
        last_time = r.time;
        let TraceKind::Pool(action, pool) = r.kind else { continue };
        let used = in_use.entry(pool).or_default();
        let queue = queues.entry(pool).or_default();
        match action {
            PoolAction::Enqueue => {
                if *used != capacity(pool) {
                    return Err(format!("{} queued {} while not full", pool.as_str(), r.entity_id));
                }
                queue.push_back(r.entity_id);
            }
            PoolAction::Grant => {
                if queue.contains(&r.entity_id) {
                    if queue.front() != Some(&r.entity_id) {
                        return Err(format!("{}: {} granted out of FIFO order", pool.as_str(), r.entity_id));
                    }
                    queue.pop_front();
                }
                *used += 1;
                if *used > capacity(pool) {
                    return Err(format!("{} over capacity at t={}", pool.as_str(), r.time));
                }
            }
            PoolAction::Release => {
                *used = used.checked_sub(1).ok_or_else(|| format!("{} released below zero", pool.as_str()))?;
            }
        }
    }
    Ok(())
}
