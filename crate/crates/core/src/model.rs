//! The rental service model.
//!
//! A customer walks through up to four stages:
//!
//! 1. customer service: document verification, eligibility, survey, driver
//!    contract (driver package only) and a general car re-check, all on one
//!    customer-service clerk;
//! 2. maintenance: engine, equipment and insurance checks on one mechanic;
//! 3. planning: the car schedule check, with one reschedule offer when the
//!    fleet is exhausted (self-drive customers only);
//! 4. driver scheduling: driver-package customers take a car directly,
//!    skipping stage 3, and then need a free driver.
//!
//! Cars and drivers are committed for the rest of the day. The day closes
//! hard at `day_length`; anyone still in the pipeline is `InSystemAtClose`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionSpec, InvalidSpec};
use crate::engine::{Calendar, EngineError, Request, ResourcePool};
use crate::rng::{day_stream_id, make_stream, RandomStream, StreamPurpose};

/// Length of the business day in minutes (08:00 to 20:00).
pub const DEFAULT_DAY_LENGTH: f64 = 720.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Durations {
    pub arrival: DistributionSpec,
    pub verification: DistributionSpec,
    pub survey: DistributionSpec,
    pub driver_contract: DistributionSpec,
    pub car_recheck: DistributionSpec,
    pub engine_check: DistributionSpec,
    pub equipment_check: DistributionSpec,
    pub insurance_check: DistributionSpec,
    pub schedule_check: DistributionSpec,
    pub reschedule: DistributionSpec,
}

impl Default for Durations {
    fn default() -> Self {
        Self {
            arrival: DistributionSpec::exponential(15.0),
            verification: DistributionSpec::normal(10.0, 2.0),
            survey: DistributionSpec::normal(30.0, 15.0),
            driver_contract: DistributionSpec::normal(5.0, 0.01),
            car_recheck: DistributionSpec::normal(10.0, 0.2),
            engine_check: DistributionSpec::normal(30.0, 0.1),
            equipment_check: DistributionSpec::uniform(5.0, 10.0),
            insurance_check: DistributionSpec::constant(5.0),
            schedule_check: DistributionSpec::constant(10.0),
            reschedule: DistributionSpec::normal(15.0, 0.2),
        }
    }
}

impl Durations {
    pub fn named(&self) -> [(&'static str, &DistributionSpec); 10] {
        [
            ("arrival", &self.arrival),
            ("verification", &self.verification),
            ("survey", &self.survey),
            ("driver_contract", &self.driver_contract),
            ("car_recheck", &self.car_recheck),
            ("engine_check", &self.engine_check),
            ("equipment_check", &self.equipment_check),
            ("insurance_check", &self.insurance_check),
            ("schedule_check", &self.schedule_check),
            ("reschedule", &self.reschedule),
        ]
    }
}

/// Behavioural probabilities. These are calibration values; the defaults
/// are a starting point, not measured rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Probabilities {
    pub eligible: f64,
    pub wants_driver: f64,
    pub accept_driver_offer: f64,
    pub accept_reschedule: f64,
}

impl Default for Probabilities {
    fn default() -> Self {
        Self { eligible: 0.90, wants_driver: 0.18, accept_driver_offer: 0.30, accept_reschedule: 0.50 }
    }
}

/// Staff per department.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServerCounts {
    pub customer_service: u32,
    pub maintenance: u32,
    pub planning: u32,
}

impl Default for ServerCounts {
    fn default() -> Self {
        Self { customer_service: 1, maintenance: 1, planning: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dists: Durations,
    pub probs: Probabilities,
    pub fleet_size: u32,
    pub driver_count: u32,
    pub servers: ServerCounts,
    pub day_length: f64,
    pub master_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            dists: Durations::default(),
            probs: Probabilities::default(),
            fleet_size: 40,
            driver_count: 8,
            servers: ServerCounts::default(),
            day_length: DEFAULT_DAY_LENGTH,
            master_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{key}: {source}")]
    Distribution { key: String, source: InvalidSpec },
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, spec) in self.dists.named() {
            spec.validate().map_err(|source| ConfigError::Distribution {
                key: format!("distributions.{name}.{}", source.field),
                source,
            })?;
        }
        let p = &self.probs;
        for (name, v) in [
            ("eligible", p.eligible),
            ("wants_driver", p.wants_driver),
            ("accept_driver_offer", p.accept_driver_offer),
            ("accept_reschedule", p.accept_reschedule),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::Invalid {
                    key: format!("probabilities.{name}"),
                    reason: format!("{v} is not a probability in [0, 1]"),
                });
            }
        }
        if !(self.day_length.is_finite() && self.day_length >= 0.0) {
            return Err(ConfigError::Invalid {
                key: "model.day_length".into(),
                reason: format!("{} must be a finite number of minutes >= 0", self.day_length),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    OrderedNoDriver,
    OrderedWithDriver,
    CancelledIneligible,
    CancelledNoCar,
    CancelledNoDriver,
    InSystemAtClose,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [
        Outcome::OrderedNoDriver,
        Outcome::OrderedWithDriver,
        Outcome::CancelledIneligible,
        Outcome::CancelledNoCar,
        Outcome::CancelledNoDriver,
        Outcome::InSystemAtClose,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    CustomerService,
    Maintenance,
    ScheduleCheck,
    DriverScheduling,
}

/// Everything random about one customer, drawn when the customer is
/// generated. Drawing up front keeps the i-th customer of a day identical
/// across fleet sizes, whatever path earlier customers took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CustomerDraws {
    pub verification: f64,
    pub survey: f64,
    pub driver_contract: f64,
    pub car_recheck: f64,
    pub engine_check: f64,
    pub equipment_check: f64,
    pub insurance_check: f64,
    pub schedule_check: f64,
    pub reschedule: f64,
    pub u_eligible: f64,
    pub u_wants_driver: f64,
    pub u_accept_offer: f64,
    pub u_accept_reschedule: f64,
}

impl CustomerDraws {
    fn draw(d: &Durations, service: &mut RandomStream, coins: &mut RandomStream) -> Self {
        Self {
            verification: d.verification.sample_unchecked(service),
            survey: d.survey.sample_unchecked(service),
            driver_contract: d.driver_contract.sample_unchecked(service),
            car_recheck: d.car_recheck.sample_unchecked(service),
            engine_check: d.engine_check.sample_unchecked(service),
            equipment_check: d.equipment_check.sample_unchecked(service),
            insurance_check: d.insurance_check.sample_unchecked(service),
            schedule_check: d.schedule_check.sample_unchecked(service),
            reschedule: d.reschedule.sample_unchecked(service),
            u_eligible: coins.next_f64(),
            u_wants_driver: coins.next_f64(),
            u_accept_offer: coins.next_f64(),
            u_accept_reschedule: coins.next_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Customer {
    pub id: u64,
    pub arrival_min: f64,
    pub wants_driver: bool,
    pub eligible: bool,
    pub accepted_driver_offer: bool,
    pub accepted_reschedule: bool,
    /// `(start, end)` of every completed step.
    pub step_timestamps: BTreeMap<Step, (f64, f64)>,
    /// Step under way and its start time, if any.
    pub in_progress: Option<(Step, f64)>,
    pub outcome: Option<Outcome>,
    pub draws: CustomerDraws,
}

impl Customer {
    /// Time spent in a completed step.
    pub fn dwell(&self, step: Step) -> Option<f64> {
        self.step_timestamps.get(&step).map(|(s, e)| e - s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyTally {
    pub arrivals: u32,
    pub ordered_no_driver: u32,
    pub ordered_with_driver: u32,
    pub cancelled_ineligible: u32,
    pub cancelled_no_car: u32,
    pub cancelled_no_driver: u32,
    pub in_system_at_close: u32,
    pub cars_used: u32,
    pub drivers_used: u32,
}

impl DailyTally {
    pub fn count(&self, outcome: Outcome) -> u32 {
        match outcome {
            Outcome::OrderedNoDriver => self.ordered_no_driver,
            Outcome::OrderedWithDriver => self.ordered_with_driver,
            Outcome::CancelledIneligible => self.cancelled_ineligible,
            Outcome::CancelledNoCar => self.cancelled_no_car,
            Outcome::CancelledNoDriver => self.cancelled_no_driver,
            Outcome::InSystemAtClose => self.in_system_at_close,
        }
    }

    fn bump(&mut self, outcome: Outcome) {
        let slot = match outcome {
            Outcome::OrderedNoDriver => &mut self.ordered_no_driver,
            Outcome::OrderedWithDriver => &mut self.ordered_with_driver,
            Outcome::CancelledIneligible => &mut self.cancelled_ineligible,
            Outcome::CancelledNoCar => &mut self.cancelled_no_car,
            Outcome::CancelledNoDriver => &mut self.cancelled_no_driver,
            Outcome::InSystemAtClose => &mut self.in_system_at_close,
        };
        *slot += 1;
    }

    /// Customers leaving with an order or an unavailability refusal.
    pub fn customers_out(&self) -> u32 {
        self.ordered_with_driver + self.ordered_no_driver + self.cancelled_no_car + self.cancelled_no_driver
    }

    /// Checks the bookkeeping identities of a tally against its pool sizes.
    pub fn check(&self, fleet_size: u32, driver_count: u32) -> Result<(), String> {
        let total: u32 = Outcome::ALL.iter().map(|&o| self.count(o)).sum();
        if total != self.arrivals {
            return Err(format!("outcomes sum to {total}, arrivals {}", self.arrivals));
        }
        if self.cars_used != self.ordered_no_driver + self.ordered_with_driver {
            return Err(format!("cars_used {} != orders", self.cars_used));
        }
        if self.cars_used > fleet_size {
            return Err(format!("cars_used {} > fleet {fleet_size}", self.cars_used));
        }
        if self.drivers_used != self.ordered_with_driver || self.drivers_used > driver_count {
            return Err(format!("drivers_used {} inconsistent", self.drivers_used));
        }
        Ok(())
    }
}

/// Model events. Each names the completion of a timed activity, except
/// `Arrival`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival,
    VerificationDone,
    SurveyDone,
    ContractDone,
    RecheckDone,
    EngineDone,
    EquipmentDone,
    InsuranceDone,
    ScheduleCheckDone,
    CarRescheduleDone,
    DriverRescheduleDone,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Arrival => "arrival",
            EventKind::VerificationDone => "verification_done",
            EventKind::SurveyDone => "survey_done",
            EventKind::ContractDone => "contract_done",
            EventKind::RecheckDone => "recheck_done",
            EventKind::EngineDone => "engine_done",
            EventKind::EquipmentDone => "equipment_done",
            EventKind::InsuranceDone => "insurance_done",
            EventKind::ScheduleCheckDone => "schedule_check_done",
            EventKind::CarRescheduleDone => "car_reschedule_done",
            EventKind::DriverRescheduleDone => "driver_reschedule_done",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PoolId {
    CustomerService,
    Maintenance,
    Planning,
    Cars,
    Drivers,
}

impl PoolId {
    pub const ALL: [PoolId; 5] =
        [PoolId::CustomerService, PoolId::Maintenance, PoolId::Planning, PoolId::Cars, PoolId::Drivers];

    pub fn as_str(self) -> &'static str {
        match self {
            PoolId::CustomerService => "customer_service",
            PoolId::Maintenance => "maintenance",
            PoolId::Planning => "planning",
            PoolId::Cars => "cars",
            PoolId::Drivers => "drivers",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolAction {
    Grant,
    Enqueue,
    Release,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Event(EventKind),
    Pool(PoolAction, PoolId),
    Outcome(Outcome),
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceKind::Event(k) => f.write_str(k.as_str()),
            TraceKind::Pool(a, p) => {
                let a = match a {
                    PoolAction::Grant => "grant",
                    PoolAction::Enqueue => "enqueue",
                    PoolAction::Release => "release",
                };
                write!(f, "{a}:{}", p.as_str())
            }
            TraceKind::Outcome(o) => {
                let s = serde_json::to_value(o).map_err(|_| fmt::Error)?;
                write!(f, "outcome:{}", s.as_str().unwrap_or_default())
            }
        }
    }
}

/// One trace row. Pool and outcome rows carry the seq of the event whose
/// handler produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub time: f64,
    pub seq: u64,
    pub kind: TraceKind,
    pub entity_id: u64,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model logic error: {0}")]
    Engine(#[from] EngineError),
}

/// Interarrival times accumulated from `0` until the first one at or past
/// `day_length`.
pub fn generate_arrivals(cfg: &ModelConfig, stream: &mut RandomStream) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        t += cfg.dists.arrival.sample_unchecked(stream);
        if t >= cfg.day_length {
            return out;
        }
        out.push(t);
    }
}

/// Full record of one simulated day.
#[derive(Debug, Clone)]
pub struct DayRecord {
    pub tally: DailyTally,
    pub customers: Vec<Customer>,
    pub trace: Vec<TraceRecord>,
}

pub fn run_day(cfg: &ModelConfig, day_index: u64) -> Result<DailyTally, SimError> {
    Ok(simulate_day(cfg, day_index, false)?.tally)
}

/// Runs one day and keeps per-customer detail, plus the event trace when
/// `trace` is set.
pub fn simulate_day(cfg: &ModelConfig, day_index: u64, trace: bool) -> Result<DayRecord, SimError> {
    cfg.validate()?;
    let seed = cfg.master_seed;
    let mut arrivals_rng = make_stream(seed, day_stream_id(day_index, StreamPurpose::Arrivals));
    let mut service_rng = make_stream(seed, day_stream_id(day_index, StreamPurpose::ServiceTimes));
    let mut coin_rng = make_stream(seed, day_stream_id(day_index, StreamPurpose::Bernoullis));

    let customers: Vec<Customer> = generate_arrivals(cfg, &mut arrivals_rng)
        .into_iter()
        .enumerate()
        .map(|(i, t)| Customer {
            id: i as u64,
            arrival_min: t,
            wants_driver: false,
            eligible: false,
            accepted_driver_offer: false,
            accepted_reschedule: false,
            step_timestamps: BTreeMap::new(),
            in_progress: None,
            outcome: None,
            draws: CustomerDraws::draw(&cfg.dists, &mut service_rng, &mut coin_rng),
        })
        .collect();

    let mut day = Day {
        cfg,
        cal: Calendar::new(),
        customers,
        pools: [
            ResourcePool::new(PoolId::CustomerService.as_str(), cfg.servers.customer_service),
            ResourcePool::new(PoolId::Maintenance.as_str(), cfg.servers.maintenance),
            ResourcePool::new(PoolId::Planning.as_str(), cfg.servers.planning),
            ResourcePool::new(PoolId::Cars.as_str(), cfg.fleet_size),
            ResourcePool::new(PoolId::Drivers.as_str(), cfg.driver_count),
        ],
        trace: trace.then(Vec::new),
        current_seq: 0,
        tally: DailyTally::default(),
    };
    day.run()?;
    Ok(DayRecord { tally: day.tally, customers: day.customers, trace: day.trace.unwrap_or_default() })
}

struct Day<'a> {
    cfg: &'a ModelConfig,
    cal: Calendar<EventKind>,
    customers: Vec<Customer>,
    pools: [ResourcePool; 5],
    trace: Option<Vec<TraceRecord>>,
    current_seq: u64,
    tally: DailyTally,
}

impl Day<'_> {
    fn run(&mut self) -> Result<(), SimError> {
        for i in 0..self.customers.len() {
            let t = self.customers[i].arrival_min;
            self.cal.schedule(t, EventKind::Arrival, i as u64)?;
        }
        // Hard close: only events due by the end of the day fire.
        while self.cal.peek_time().is_some_and(|t| t <= self.cfg.day_length) {
            let Some(ev) = self.cal.next_event() else { break };
            self.current_seq = ev.seq;
            self.record(TraceKind::Event(ev.kind), ev.entity_id);
            self.handle(ev.kind, ev.entity_id)?;
        }
        self.tally.arrivals = self.customers.len() as u32;
        for c in &mut self.customers {
            if c.outcome.is_none() {
                c.outcome = Some(Outcome::InSystemAtClose);
                self.tally.in_system_at_close += 1;
            }
        }
        Ok(())
    }

    fn now(&self) -> f64 {
        self.cal.clock()
    }

    fn record(&mut self, kind: TraceKind, entity_id: u64) {
        let (time, seq) = (self.cal.clock(), self.current_seq);
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceRecord { time, seq, kind, entity_id });
        }
    }

    fn cust(&mut self, id: u64) -> &mut Customer {
        &mut self.customers[id as usize]
    }

    fn after(&mut self, delay: f64, kind: EventKind, id: u64) -> Result<(), EngineError> {
        let at = self.now() + delay;
        self.cal.schedule(at, kind, id).map(|_| ())
    }

    fn begin_step(&mut self, id: u64, step: Step) {
        let now = self.now();
        self.cust(id).in_progress = Some((step, now));
    }

    fn end_step(&mut self, id: u64, step: Step) {
        let now = self.now();
        let c = self.cust(id);
        if let Some((open, start)) = c.in_progress.take() {
            debug_assert_eq!(open, step);
            c.step_timestamps.insert(step, (start, now));
        }
    }

    fn finish(&mut self, id: u64, outcome: Outcome) {
        let c = self.cust(id);
        debug_assert!(c.outcome.is_none(), "outcome assigned twice");
        c.outcome = Some(outcome);
        self.tally.bump(outcome);
        match outcome {
            Outcome::OrderedNoDriver => self.tally.cars_used += 1,
            Outcome::OrderedWithDriver => {
                self.tally.cars_used += 1;
                self.tally.drivers_used += 1;
            }
            _ => {}
        }
        self.record(TraceKind::Outcome(outcome), id);
    }

    /// Queues for a staffed department; starts service at once if granted.
    fn request(&mut self, pool: PoolId, id: u64) -> Result<(), EngineError> {
        match self.pools[pool as usize].request(id)? {
            Request::Granted => {
                self.record(TraceKind::Pool(PoolAction::Grant, pool), id);
                self.start_service(pool, id)
            }
            Request::Enqueued => {
                self.record(TraceKind::Pool(PoolAction::Enqueue, pool), id);
                Ok(())
            }
        }
    }

    fn release(&mut self, pool: PoolId, id: u64) -> Result<(), EngineError> {
        let next = self.pools[pool as usize].release(id)?;
        self.record(TraceKind::Pool(PoolAction::Release, pool), id);
        if let Some(next) = next {
            self.record(TraceKind::Pool(PoolAction::Grant, pool), next);
            self.start_service(pool, next)?;
        }
        Ok(())
    }

    /// Day-scoped commitment of a car or driver. Never queues.
    fn try_commit(&mut self, pool: PoolId, id: u64) -> Result<bool, EngineError> {
        let ok = self.pools[pool as usize].try_acquire(id)?;
        if ok {
            self.record(TraceKind::Pool(PoolAction::Grant, pool), id);
        }
        Ok(ok)
    }

    fn give_back(&mut self, pool: PoolId, id: u64) -> Result<(), EngineError> {
        self.pools[pool as usize].release(id)?;
        self.record(TraceKind::Pool(PoolAction::Release, pool), id);
        Ok(())
    }

    fn start_service(&mut self, pool: PoolId, id: u64) -> Result<(), EngineError> {
        let d = self.customers[id as usize].draws;
        match pool {
            PoolId::CustomerService => {
                self.begin_step(id, Step::CustomerService);
                self.after(d.verification, EventKind::VerificationDone, id)
            }
            PoolId::Maintenance => {
                self.begin_step(id, Step::Maintenance);
                self.after(d.engine_check, EventKind::EngineDone, id)
            }
            PoolId::Planning => {
                self.begin_step(id, Step::ScheduleCheck);
                self.after(d.schedule_check, EventKind::ScheduleCheckDone, id)
            }
            PoolId::Cars | PoolId::Drivers => unreachable!("cars and drivers are never queued for"),
        }
    }

    fn handle(&mut self, kind: EventKind, id: u64) -> Result<(), EngineError> {
        let d = self.customers[id as usize].draws;
        let p = self.cfg.probs;
        match kind {
            EventKind::Arrival => self.request(PoolId::CustomerService, id),
            EventKind::VerificationDone => {
                let c = self.cust(id);
                c.eligible = d.u_eligible < p.eligible;
                if c.eligible {
                    c.wants_driver = d.u_wants_driver < p.wants_driver;
                } else {
                    // Ineligible customers may still rent under the driver package.
                    c.accepted_driver_offer = d.u_accept_offer < p.accept_driver_offer;
                    c.wants_driver = c.accepted_driver_offer;
                    if !c.accepted_driver_offer {
                        self.end_step(id, Step::CustomerService);
                        self.finish(id, Outcome::CancelledIneligible);
                        return self.release(PoolId::CustomerService, id);
                    }
                }
                self.after(d.survey, EventKind::SurveyDone, id)
            }
            EventKind::SurveyDone => {
                if self.customers[id as usize].wants_driver {
                    self.after(d.driver_contract, EventKind::ContractDone, id)
                } else {
                    self.after(d.car_recheck, EventKind::RecheckDone, id)
                }
            }
            EventKind::ContractDone => self.after(d.car_recheck, EventKind::RecheckDone, id),
            EventKind::RecheckDone => {
                self.end_step(id, Step::CustomerService);
                self.release(PoolId::CustomerService, id)?;
                self.request(PoolId::Maintenance, id)
            }
            EventKind::EngineDone => self.after(d.equipment_check, EventKind::EquipmentDone, id),
            EventKind::EquipmentDone => self.after(d.insurance_check, EventKind::InsuranceDone, id),
            EventKind::InsuranceDone => {
                self.end_step(id, Step::Maintenance);
                self.release(PoolId::Maintenance, id)?;
                if self.customers[id as usize].wants_driver {
                    self.driver_scheduling(id)
                } else {
                    self.request(PoolId::Planning, id)
                }
            }
            EventKind::ScheduleCheckDone => {
                if self.try_commit(PoolId::Cars, id)? {
                    self.finish(id, Outcome::OrderedNoDriver);
                } else if d.u_accept_reschedule < p.accept_reschedule {
                    self.cust(id).accepted_reschedule = true;
                    return self.after(d.reschedule, EventKind::CarRescheduleDone, id);
                } else {
                    self.finish(id, Outcome::CancelledNoCar);
                }
                self.end_step(id, Step::ScheduleCheck);
                self.release(PoolId::Planning, id)
            }
            EventKind::CarRescheduleDone => {
                let outcome = if self.try_commit(PoolId::Cars, id)? {
                    Outcome::OrderedNoDriver
                } else {
                    Outcome::CancelledNoCar
                };
                self.finish(id, outcome);
                self.end_step(id, Step::ScheduleCheck);
                self.release(PoolId::Planning, id)
            }
            EventKind::DriverRescheduleDone => {
                if self.try_commit(PoolId::Drivers, id)? {
                    self.finish(id, Outcome::OrderedWithDriver);
                } else {
                    self.give_back(PoolId::Cars, id)?;
                    self.finish(id, Outcome::CancelledNoDriver);
                }
                self.end_step(id, Step::DriverScheduling);
                Ok(())
            }
        }
    }

    /// Driver-package customers take a car without the schedule check, then
    /// need a driver.
    fn driver_scheduling(&mut self, id: u64) -> Result<(), EngineError> {
        let d = self.customers[id as usize].draws;
        self.begin_step(id, Step::DriverScheduling);
        if !self.try_commit(PoolId::Cars, id)? {
            self.finish(id, Outcome::CancelledNoCar);
        } else if self.try_commit(PoolId::Drivers, id)? {
            self.finish(id, Outcome::OrderedWithDriver);
        } else if d.u_accept_reschedule < self.cfg.probs.accept_reschedule {
            self.cust(id).accepted_reschedule = true;
            return self.after(d.reschedule, EventKind::DriverRescheduleDone, id);
        } else {
            self.give_back(PoolId::Cars, id)?;
            self.finish(id, Outcome::CancelledNoDriver);
        }
        self.end_step(id, Step::DriverScheduling);
        Ok(())
    }
}
