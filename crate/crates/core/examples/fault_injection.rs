//! Paired runs with and without each fault kind, from the same seed, on a
//! seven-site layout. Prints what each fault does to the KPIs it should
//! move.
//!
//! ```text
//! cargo run --release --example fault_injection
//! ```

use ranforge::engine::{FaultEffect, FaultSpec};
use ranforge::{Deployment, Environment, ScenarioSpec, SimState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ScenarioSpec::hex_grid(Environment::UrbanEmbb, 1, 10);
    let deployment = Deployment::generate(&spec, 3, 0);
    let pair = || -> Result<(SimState, SimState), Box<dyn std::error::Error>> {
        Ok((SimState::new(&spec, deployment.clone(), 3)?, SimState::new(&spec, deployment.clone(), 3)?))
    };

    // power reduction: every UE sees the target cell exactly 20 dB weaker
    let (mut base, mut faulty) = pair()?;
    faulty.apply_fault(FaultSpec { target_cell: 0, start_s: 0.0, end_s: 10.0, effect: FaultEffect::PowerReduction { drop_db: 20.0 } });
    base.step(0.1)?;
    faulty.step(0.1)?;
    let shifts: Vec<f64> = (0..base.ues().len()).map(|u| base.cell_rsrp(u, 0) - faulty.cell_rsrp(u, 0)).collect();
    let (lo, hi) = shifts.iter().fold((f64::MAX, f64::MIN), |(a, b), s| (a.min(*s), b.max(*s)));
    println!("power fault: cell-0 RSRP shift over {} UEs in [{lo:.12}, {hi:.12}] dB", shifts.len());

    // interference: UEs served by the target cell lose SINR
    let (base, mut faulty) = pair()?;
    faulty.apply_fault(FaultSpec { target_cell: 0, start_s: 0.0, end_s: 10.0, effect: FaultEffect::Interference { power_dbm: -90.0 } });
    let served: Vec<usize> = (0..base.ues().len()).filter(|u| base.ues()[*u].serving == 0).collect();
    let mean = |s: &SimState| served.iter().map(|u| s.serving_kpis(*u).sinr).sum::<f64>() / served.len() as f64;
    println!("interference fault: mean SINR of {} served UEs {:.2} dB -> {:.2} dB", served.len(), mean(&base), mean(&faulty));

    // too-late handover: count handovers out of cell 0 over 60 s
    let (mut base, mut faulty) = pair()?;
    faulty.apply_fault(FaultSpec {
        target_cell: 0,
        start_s: 0.0,
        end_s: 60.0,
        effect: FaultEffect::LateHandover { hysteresis_db: 9.0, ttt_s: 1.0 },
    });
    for _ in 0..600 {
        base.step(0.1)?;
        faulty.step(0.1)?;
    }
    let out_of_0 = |s: &SimState| s.handovers().iter().filter(|h| h.from_cell == 0).count();
    println!("too-late handover: handovers out of cell 0 in 60 s, baseline {} vs faulty {}", out_of_0(&base), out_of_0(&faulty));
    Ok(())
}
