//! A UE walks from one site towards another. Each tick prints both cells'
//! RSRP and the A3 timer; the handover fires once the neighbor has been
//! more than the hysteresis stronger for the whole time-to-trigger.
//!
//! ```text
//! cargo run --example handover_trace
//! ```

use std::collections::VecDeque;

use ranforge::channel::PenetrationClass;
use ranforge::engine::Mobility;
use ranforge::geometry::Point;
use ranforge::scenario::SiteDecl;
use ranforge::topology::Ue;
use ranforge::{Deployment, Environment, ScenarioSpec, SimState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = ScenarioSpec::hex_grid(Environment::UrbanEmbb, 0, 0);
    spec.sites = vec![
        SiteDecl { position: Point::new(0.0, 0.0), sector_azimuths: vec![0.0] },
        SiteDecl { position: Point::new(400.0, 0.0), sector_azimuths: vec![180.0] },
    ];
    // deterministic radio so the trace shows pure geometry
    spec.params.shadow.los_db = 0.0;
    spec.params.shadow.los_far_db = 0.0;
    spec.params.shadow.nlos_db = 0.0;
    spec.max_ue_distance = 450.0;

    let mut deployment = Deployment::skeleton(&spec);
    deployment.ues.push(Ue {
        id: 0,
        position: Point::new(150.0, 0.0),
        height: 1.5,
        indoor: false,
        penetration_class: PenetrationClass::Low,
        speed_kmh: 30.0,
        home_site: 0,
    });
    let mut state = SimState::new(&spec, deployment, 1)?;
    state.set_mobility(0, Mobility::Path(VecDeque::from([Point::new(350.0, 0.0)])));

    let hyst = spec.params.hysteresis_db;
    println!("hysteresis {hyst} dB, time-to-trigger {} s", spec.params.time_to_trigger_s);
    println!("{:>6} {:>8} {:>9} {:>9} {:>7} {:>7}", "t_s", "x_m", "cell0", "cell1", "A3_s", "serves");
    while state.handovers().is_empty() && state.clock < 60.0 {
        state.step(0.1)?;
        let u = &state.ues()[0];
        let (r0, r1) = (state.cell_rsrp(0, 0), state.cell_rsrp(0, 1));
        if r1 - r0 > hyst - 1.0 {
            println!(
                "{:>6.1} {:>8.2} {:>9.2} {:>9.2} {:>7.2} {:>7}",
                state.clock,
                state.position(0).x,
                r0,
                r1,
                u.a3.elapsed,
                u.serving
            );
        }
    }
    for h in state.handovers() {
        println!("handover at {:.1} s: cell {} -> {} (executed: {})", h.time, h.from_cell, h.to_cell, h.executed);
    }
    Ok(())
}
