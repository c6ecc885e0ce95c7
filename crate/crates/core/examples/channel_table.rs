//! Propagation building blocks at 4 GHz: LOS probability, UMa/RMa path
//! loss, building penetration and the sector antenna pattern.
//!
//! ```text
//! cargo run --example channel_table
//! ```

use ranforge::channel::{element_gain, los_probability, penetration_loss, PenetrationClass};
use ranforge::cli::channel_table_csv;
use ranforge::params::{AntennaPattern, Materials};
use ranforge::{Environment, LinkGeometry, PathLossModel, RadioParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for env in [Environment::UrbanEmbb, Environment::RuralEmbb] {
        let p = RadioParams::for_environment(env);
        let model = PathLossModel::from_params(&p);
        println!("{env} ({:?}, BS {} m, fc {} GHz)", env.propagation(), p.bs_height_m, p.carrier_ghz);
        println!("  {:>7} {:>7} {:>9} {:>9}", "d2d_m", "P_LOS", "PL_LOS", "PL_NLOS");
        for d in [10.0, 35.0, 100.0, 300.0, 1000.0, 3000.0] {
            let g = LinkGeometry::new(d, p.bs_height_m, 1.5, 0.0, 0.0, 0.0);
            println!(
                "  {:>7} {:>7.3} {:>9.2} {:>9.2}",
                d,
                los_probability(env.propagation(), d, 1.5),
                model.path_loss(true, &g, p.carrier_ghz)?,
                model.path_loss(false, &g, p.carrier_ghz)?
            );
        }
        println!("  LOS breakpoint {:.1} m\n", model.breakpoint(p.bs_height_m, 1.5, p.carrier_ghz));
    }

    let m = Materials::default();
    println!(
        "penetration at 4 GHz: low {:.2} dB, high {:.2} dB",
        penetration_loss(PenetrationClass::Low, 4.0, &m),
        penetration_loss(PenetrationClass::High, 4.0, &m)
    );

    let a = AntennaPattern::default();
    for (az, zen) in [(0.0, 0.0), (30.0, 0.0), (65.0, 0.0), (90.0, 0.0), (180.0, 0.0), (0.0, 20.0)] {
        println!("element gain at az {az:>5}, zen {zen:>4}: {:>7.2} dBi", element_gain(&a, az, zen));
    }

    // the same table the CLI's `channel-table` subcommand writes
    let csv = channel_table_csv(Environment::UrbanEmbb, 10.0, 50.0, 10.0, 1.5)?;
    println!("\n{csv}");
    Ok(())
}
