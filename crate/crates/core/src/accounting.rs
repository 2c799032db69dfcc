//! Money arithmetic for a simulated day: revenue, lost sales, fleet overhead
//! and the resulting profit. All amounts are whole US dollars.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::DailyTally;

/// Whole US dollars.
pub type Money = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tariff {
    pub daily_with_driver: Money,
    pub daily_no_driver: Money,
}

impl Default for Tariff {
    fn default() -> Self {
        Self { daily_with_driver: 55, daily_no_driver: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostModel {
    pub maintenance_per_car_day: Money,
    pub idle_car_per_day: Money,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { maintenance_per_car_day: 5, idle_car_per_day: 15 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccountingError {
    #[error("customers out ({out}) exceed customers in ({incoming})")]
    OutExceedsIn { incoming: u32, out: u32 },
    #[error("cars used ({used}) exceed fleet size ({fleet})")]
    UsedExceedsFleet { used: u32, fleet: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoneyReport {
    pub revenue: Money,
    pub loss: Money,
    pub overhead: Money,
    pub profit: Money,
    pub gap: u32,
}

impl Tariff {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.daily_with_driver <= 0 {
            return Err("daily_with_driver");
        }
        if self.daily_no_driver <= 0 {
            return Err("daily_no_driver");
        }
        Ok(())
    }

    pub fn scaled(self, k: Money) -> Self {
        Self {
            daily_with_driver: self.daily_with_driver * k,
            daily_no_driver: self.daily_no_driver * k,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.maintenance_per_car_day < 0 {
            return Err("maintenance_per_car_day");
        }
        if self.idle_car_per_day < 0 {
            return Err("idle_car_per_day");
        }
        Ok(())
    }

    pub fn scaled(self, k: Money) -> Self {
        Self {
            maintenance_per_car_day: self.maintenance_per_car_day * k,
            idle_car_per_day: self.idle_car_per_day * k,
        }
    }
}

pub fn revenue(with_driver: u32, no_driver: u32, t: &Tariff) -> Money {
    t.daily_with_driver * Money::from(with_driver) + t.daily_no_driver * Money::from(no_driver)
}

/// Sales lost to unavailability.
///
/// A customer lost for want of a car is priced at the with-driver rate and
/// one lost for want of a driver at the no-driver rate. The crossing is
/// intentional and matches the published loss figures.
pub fn loss(unavail_after_resched: u32, unavail_driver: u32, t: &Tariff) -> Money {
    t.daily_with_driver * Money::from(unavail_after_resched)
        + t.daily_no_driver * Money::from(unavail_driver)
}

pub fn gap(customers_in: u32, customers_out: u32) -> Result<u32, AccountingError> {
    customers_in
        .checked_sub(customers_out)
        .ok_or(AccountingError::OutExceedsIn { incoming: customers_in, out: customers_out })
}

/// Maintenance on every car in the fleet plus the idle charge on cars nobody rented.
pub fn overhead(fleet_size: u32, cars_used: u32, c: &CostModel) -> Result<Money, AccountingError> {
    let idle = fleet_size
        .checked_sub(cars_used)
        .ok_or(AccountingError::UsedExceedsFleet { used: cars_used, fleet: fleet_size })?;
    Ok(c.maintenance_per_car_day * Money::from(fleet_size) + c.idle_car_per_day * Money::from(idle))
}

pub fn daily_profit(
    tally: &DailyTally,
    fleet_size: u32,
    t: &Tariff,
    c: &CostModel,
) -> Result<MoneyReport, AccountingError> {
    let revenue = revenue(tally.ordered_with_driver, tally.ordered_no_driver, t);
    let loss = loss(tally.cancelled_no_car, tally.cancelled_no_driver, t);
    let overhead = overhead(fleet_size, tally.cars_used, c)?;
    let gap = gap(tally.arrivals, tally.customers_out())?;
    Ok(MoneyReport { revenue, loss, overhead, profit: revenue - loss - overhead, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T: Tariff = Tariff { daily_with_driver: 55, daily_no_driver: 40 };
    const C: CostModel = CostModel { maintenance_per_car_day: 5, idle_car_per_day: 15 };

    #[test]
    fn revenue_rows() {
        assert_eq!(revenue(7, 28, &T), 1505);
        assert_eq!(revenue(9, 39, &T), 2055);
        assert_eq!(revenue(0, 0, &T), 0);
    }

    #[test]
    fn loss_rows() {
        assert_eq!(loss(0, 5, &T), 200);
        assert_eq!(loss(2, 3, &T), 230);
        assert_eq!(loss(1, 1, &T), 95);
    }

    #[test]
    fn gap_rows() {
        assert_eq!(gap(48, 40), Ok(8));
        assert_eq!(gap(56, 9 + 39 + 2 + 3), Ok(3));
        assert_eq!(gap(0, 0), Ok(0));
        assert!(gap(3, 4).is_err());
    }

    #[test]
    fn overhead_rows() {
        assert_eq!(overhead(40, 35, &C), Ok(275));
        assert_eq!(overhead(30, 30, &C), Ok(150));
        assert_eq!(overhead(40, 0, &C), Ok(800));
        assert_eq!(
            overhead(10, 11, &C),
            Err(AccountingError::UsedExceedsFleet { used: 11, fleet: 10 })
        );
    }

    #[test]
    fn profit_composition() {
        let empty = DailyTally::default();
        assert_eq!(daily_profit(&empty, 40, &T, &C).unwrap().profit, -800);

        let day = DailyTally {
            arrivals: 48,
            ordered_with_driver: 7,
            ordered_no_driver: 28,
            cancelled_no_driver: 5,
            cancelled_ineligible: 3,
            in_system_at_close: 5,
            cars_used: 35,
            drivers_used: 7,
            ..DailyTally::default()
        };
        // 1505 - 200 - (5 * 40 + 15 * (40 - 35)) = 1030
        let r = daily_profit(&day, 40, &T, &C).unwrap();
        assert_eq!(r, MoneyReport { revenue: 1505, loss: 200, overhead: 275, profit: 1030, gap: 8 });

        let free = CostModel { maintenance_per_car_day: 0, idle_car_per_day: 0 };
        let no_loss = DailyTally { cancelled_no_driver: 0, cancelled_ineligible: 8, ..day };
        let r = daily_profit(&no_loss, 40, &T, &free).unwrap();
        assert_eq!(r.profit, r.revenue);
    }

    proptest! {
        #[test]
        fn revenue_and_loss_are_linear(a in (0u32..1000, 0u32..1000), b in (0u32..1000, 0u32..1000)) {
            prop_assert_eq!(revenue(a.0 + b.0, a.1 + b.1, &T), revenue(a.0, a.1, &T) + revenue(b.0, b.1, &T));
            prop_assert_eq!(loss(a.0 + b.0, a.1 + b.1, &T), loss(a.0, a.1, &T) + loss(b.0, b.1, &T));
        }

        #[test]
        fn overhead_non_increasing_in_use(fleet in 0u32..200, x in 0u32..200, y in 0u32..200) {
            let (lo, hi) = (x.min(y).min(fleet), x.max(y).min(fleet));
            prop_assert!(overhead(fleet, hi, &C).unwrap() <= overhead(fleet, lo, &C).unwrap());
        }
    }
}
