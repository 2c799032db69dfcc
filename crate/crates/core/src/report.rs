//! CSV and JSON report rendering.
//!
//! Every CSV starts with a `# manifest: {...}` comment line carrying the
//! run manifest as compact JSON, so any file can be regenerated from its
//! own header.

use serde::Serialize;

use crate::accounting::Money;
use crate::config::Scenario;
use crate::experiment::{Recommendation, Replication, StatBlock, SweepResult};
use crate::model::{DayRecord, TraceRecord};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmitFlags {
    pub csv: bool,
    pub json: bool,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: Command,
    pub config_path: Option<String>,
    pub out_dir: String,
    pub emit: EmitFlags,
    pub master_seed: u64,
    pub scenario: Scenario,
}

impl RunManifest {
    pub fn new(
        command: Command,
        config_path: Option<String>,
        out_dir: String,
        emit: EmitFlags,
        scenario: Scenario,
    ) -> Self {
        Self {
            tool: "rentsim",
            tool_version: TOOL_VERSION,
            command,
            config_path,
            out_dir,
            emit,
            master_seed: scenario.model.master_seed,
            scenario,
        }
    }

    fn header_line(&self) -> String {
        format!("# manifest: {}\n", serde_json::to_string(self).expect("manifest serializes"))
    }
}

const TALLY_COLUMNS: [&str; 10] = [
    "day",
    "arrivals",
    "ordered_no_driver",
    "ordered_with_driver",
    "cancelled_ineligible",
    "cancelled_no_car",
    "cancelled_no_driver",
    "in_system_at_close",
    "cars_used",
    "drivers_used",
];

const MONEY_COLUMNS: [&str; 5] = ["revenue", "loss", "overhead", "profit", "gap"];

fn fmt_stat(v: f64) -> String {
    format!("{v:.4}")
}

fn csv_with_manifest(manifest: &RunManifest, rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory cannot fail");
    }
    let body = String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8");
    manifest.header_line() + &body
}

fn day_row(prefix: &[String], d: &crate::experiment::DayResult) -> Vec<String> {
    let t = &d.tally;
    let m = &d.money;
    let mut row = prefix.to_vec();
    row.extend(
        [
            d.day,
            t.arrivals.into(),
            t.ordered_no_driver.into(),
            t.ordered_with_driver.into(),
            t.cancelled_ineligible.into(),
            t.cancelled_no_car.into(),
            t.cancelled_no_driver.into(),
            t.in_system_at_close.into(),
            t.cars_used.into(),
            t.drivers_used.into(),
        ]
        .iter()
        .map(u64::to_string),
    );
    row.extend([m.revenue, m.loss, m.overhead, m.profit, Money::from(m.gap)].iter().map(i64::to_string));
    row
}

fn stat_row(prefix: &[String], metric: &str, s: &StatBlock) -> Vec<String> {
    let mut row = prefix.to_vec();
    row.push(metric.to_string());
    row.push(s.n.to_string());
    row.extend([s.total, s.mean, s.sd, s.variance, s.min, s.max].into_iter().map(fmt_stat));
    row
}

fn header(prefix: &[&str], cols: &[&str]) -> Vec<String> {
    prefix.iter().chain(cols).map(|s| s.to_string()).collect()
}

/// Per-day tally and money, one row per day.
pub fn daily_csv(manifest: &RunManifest, rep: &Replication) -> String {
    let mut rows = vec![header(&[], &[&TALLY_COLUMNS[..], &MONEY_COLUMNS[..]].concat())];
    rows.extend(rep.days.iter().map(|d| day_row(&[], d)));
    csv_with_manifest(manifest, rows)
}

const STAT_COLUMNS: [&str; 8] = ["metric", "n", "total", "mean", "sd", "variance", "min", "max"];

pub fn summary_csv(manifest: &RunManifest, rep: &Replication) -> String {
    let mut rows = vec![header(&[], &STAT_COLUMNS)];
    rows.extend(rep.stats.iter().map(|m| stat_row(&[], &m.metric, &m.stats)));
    csv_with_manifest(manifest, rows)
}

pub fn sweep_daily_csv(manifest: &RunManifest, sr: &SweepResult) -> String {
    let mut rows = vec![header(&["fleet_size"], &[&TALLY_COLUMNS[..], &MONEY_COLUMNS[..]].concat())];
    for rep in &sr.replications {
        let prefix = [rep.fleet_size.to_string()];
        rows.extend(rep.days.iter().map(|d| day_row(&prefix, d)));
    }
    csv_with_manifest(manifest, rows)
}

pub fn sweep_summary_csv(manifest: &RunManifest, sr: &SweepResult) -> String {
    let mut rows = vec![header(&["fleet_size"], &STAT_COLUMNS)];
    for rep in &sr.replications {
        let prefix = [rep.fleet_size.to_string()];
        rows.extend(rep.stats.iter().map(|m| stat_row(&prefix, &m.metric, &m.stats)));
    }
    csv_with_manifest(manifest, rows)
}

/// Daily profit with one column per fleet level (days numbered from 1),
/// followed by Total, SD, Mean, Min and Max rows.
pub fn profit_matrix_csv(manifest: &RunManifest, sr: &SweepResult) -> String {
    let mut head = vec!["day".to_string()];
    head.extend(sr.levels.iter().map(u32::to_string));
    let mut rows = vec![head];
    for (d, profits) in sr.profit_matrix().iter().enumerate() {
        let mut row = vec![(d + 1).to_string()];
        row.extend(profits.iter().map(i64::to_string));
        rows.push(row);
    }
    type Fmt = fn(&StatBlock) -> String;
    let footer: [(&str, Fmt); 5] = [
        ("Total", |s| format!("{:.0}", s.total)),
        ("SD", |s| format!("{:.2}", s.sd)),
        ("Mean", |s| format!("{:.2}", s.mean)),
        ("Min", |s| format!("{:.0}", s.min)),
        ("Max", |s| format!("{:.0}", s.max)),
    ];
    for (label, f) in footer {
        let mut row = vec![label.to_string()];
        row.extend(sr.profit.iter().map(f));
        rows.push(row);
    }
    csv_with_manifest(manifest, rows)
}

pub fn trace_csv(manifest: &RunManifest, record: &DayRecord) -> String {
    let mut rows = vec![header(&[], &["time", "seq", "kind", "entity_id"])];
    rows.extend(record.trace.iter().map(|r: &TraceRecord| {
        vec![format!("{:.6}", r.time), r.seq.to_string(), r.kind.to_string(), r.entity_id.to_string()]
    }));
    csv_with_manifest(manifest, rows)
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    manifest: &'a RunManifest,
    fleet_size: u32,
    stats: &'a [crate::experiment::MetricStats],
}

pub fn simulate_json(manifest: &RunManifest, rep: &Replication) -> String {
    let s = SimulateSummary { manifest, fleet_size: rep.fleet_size, stats: &rep.stats };
    serde_json::to_string_pretty(&s).expect("summary serializes") + "\n"
}

#[derive(Serialize)]
struct LevelSummary<'a> {
    fleet_size: u32,
    profit: &'a StatBlock,
    stats: &'a [crate::experiment::MetricStats],
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    manifest: &'a RunManifest,
    levels: &'a [u32],
    policy: crate::experiment::StreamPolicy,
    recommended_level: u32,
    recommendation: &'a Recommendation,
    profit_matrix: Vec<Vec<Money>>,
    per_level: Vec<LevelSummary<'a>>,
}

pub fn sweep_json(manifest: &RunManifest, sr: &SweepResult) -> String {
    let s = SweepSummary {
        manifest,
        levels: &sr.levels,
        policy: sr.policy,
        recommended_level: sr.recommended.level,
        recommendation: &sr.recommended,
        profit_matrix: sr.profit_matrix(),
        per_level: sr
            .replications
            .iter()
            .zip(&sr.profit)
            .map(|(r, p)| LevelSummary { fleet_size: r.fleet_size, profit: p, stats: &r.stats })
            .collect(),
    };
    serde_json::to_string_pretty(&s).expect("summary serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{sweep, Economics, StreamPolicy};
    use crate::model::ModelConfig;

    fn manifest() -> RunManifest {
        RunManifest::new(
            Command::Sweep,
            None,
            "out".into(),
            EmitFlags { csv: true, json: true, trace: false },
            Scenario::default(),
        )
    }

    #[test]
    fn matrix_shape() {
        let cfg = ModelConfig { master_seed: 1, ..ModelConfig::default() };
        let sr = sweep(&cfg, &Economics::default(), &[30, 40, 50, 53], 4, StreamPolicy::Common).unwrap();
        let text = profit_matrix_csv(&manifest(), &sr);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# manifest: {"));
        assert_eq!(lines[1], "day,30,40,50,53");
        assert_eq!(lines.len(), 1 + 1 + 4 + 5);
        let labels: Vec<&str> = lines[6..].iter().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(labels, ["Total", "SD", "Mean", "Min", "Max"]);
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 5));
    }

    #[test]
    fn daily_header_order() {
        let cfg = ModelConfig { master_seed: 1, ..ModelConfig::default() };
        let rep = crate::experiment::replicate(&cfg, &Economics::default(), 2).unwrap();
        let text = daily_csv(&manifest(), &rep);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "day,arrivals,ordered_no_driver,ordered_with_driver,cancelled_ineligible,cancelled_no_car,\
             cancelled_no_driver,in_system_at_close,cars_used,drivers_used,revenue,loss,overhead,profit,gap"
        );
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn sweep_json_has_recommendation_fields() {
        let cfg = ModelConfig { master_seed: 1, ..ModelConfig::default() };
        let sr = sweep(&cfg, &Economics::default(), &[40], 3, StreamPolicy::Common).unwrap();
        let v: serde_json::Value = serde_json::from_str(&sweep_json(&manifest(), &sr)).unwrap();
        let rec = &v["recommendation"];
        for key in ["level", "mean", "min", "max"] {
            assert!(rec.get(key).is_some(), "{key}");
        }
        assert_eq!(v["recommended_level"], 40);
        assert_eq!(v["manifest"]["scenario"]["model"]["fleet_size"], 40);
    }
}
