//! Manpower supply versus demand, checked before any search.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, ShiftKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDeficit {
    pub shift: ShiftKind,
    pub ward: usize,
    pub day: usize,
    pub required: u32,
    /// Nurses skilled for the ward and not on leave that day.
    pub available: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupplyDemandReport {
    /// Assignable nurse-days after leave and minimum rest.
    pub supply: u64,
    pub demand: u64,
    pub per_cell_deficits: Vec<CellDeficit>,
    pub feasible: bool,
}

/// Working cells a nurse can supply: `D - leave - g_min`, floored at zero.
pub fn nurse_supply(instance: &Instance, nurse: usize) -> usize {
    instance
        .days()
        .saturating_sub(instance.leave_days(nurse))
        .saturating_sub(instance.g_min)
}

pub fn supply_demand_check(instance: &Instance) -> SupplyDemandReport {
    let supply: u64 = (0..instance.nurses()).map(|i| nurse_supply(instance, i) as u64).sum();
    let demand = instance.total_demand();
    let mut per_cell_deficits = Vec::new();
    for shift in ShiftKind::WORKING {
        for ward in 0..instance.wards() {
            for day in 0..instance.days() {
                let required = instance.demand(shift, ward, day);
                if required == 0 {
                    continue;
                }
                let available = (0..instance.nurses())
                    .filter(|&i| instance.skilled(i, ward) && !instance.on_leave(i, day))
                    .count() as u32;
                if required > available {
                    per_cell_deficits.push(CellDeficit {
                        shift,
                        ward,
                        day,
                        required,
                        available,
                    });
                }
            }
        }
    }
    let feasible = demand <= supply && per_cell_deficits.is_empty();
    SupplyDemandReport {
        supply,
        demand,
        per_cell_deficits,
        feasible,
    }
}
