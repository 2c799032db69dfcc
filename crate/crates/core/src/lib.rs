//! Discrete-event simulation of a car-rental service desk.
//!
//! Customers arrive through the day, pass customer service, maintenance
//! and planning, and leave with a car (with or without a driver) or a
//! cancellation. An accounting layer turns daily outcome counts into
//! revenue, lost sales, fleet overhead and profit, and the experiment
//! harness replicates days and sweeps the fleet size to find the most
//! profitable inventory.

pub mod accounting;
pub mod cli;
pub mod config;
pub mod distributions;
pub mod engine;
pub mod experiment;
pub mod model;
pub mod report;
pub mod rng;
