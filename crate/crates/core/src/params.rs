//! Deployment environments and their radio parameter sets.
//!
//! Two mid-band eMBB environments are supported. Each comes with the
//! standard 3GPP values plus the calibrated values (maximum UE distance,
//! building height, thermal noise, background users) that make the
//! simulator's coupling-gain and geometry CDFs line up with reference
//! submissions.

use serde::{Deserialize, Serialize};

/// Deployment environment of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    UrbanEmbb,
    RuralEmbb,
}

impl Environment {
    pub fn name(&self) -> &'static str {
        match self {
            Environment::UrbanEmbb => "urban_embb",
            Environment::RuralEmbb => "rural_embb",
        }
    }

    pub fn propagation(&self) -> Propagation {
        match self {
            Environment::UrbanEmbb => Propagation::UMa,
            Environment::RuralEmbb => Propagation::RMa,
        }
    }
}

impl std::fmt::Display for Environment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// TR 38.901 large-scale propagation scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Propagation {
    UMa,
    RMa,
}

/// How indoor UE heights are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IndoorHeight {
    /// Floor-number model: `3 (nfl - 1) + 1.5` with a random building.
    Floors,
    /// Every UE at the given height.
    Fixed(f64),
}

/// Building-material loss as `intercept + slope * f_GHz`, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialLoss {
    pub intercept_db: f64,
    pub slope_db_per_ghz: f64,
}

impl MaterialLoss {
    pub const fn new(intercept_db: f64, slope_db_per_ghz: f64) -> Self {
        Self { intercept_db, slope_db_per_ghz }
    }

    pub fn at(&self, fc_ghz: f64) -> f64 {
        self.intercept_db + self.slope_db_per_ghz * fc_ghz
    }
}

/// Material coefficients feeding the low/high penetration-loss formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Materials {
    pub standard_glass: MaterialLoss,
    pub iirr_glass: MaterialLoss,
    pub concrete: MaterialLoss,
}

impl Default for Materials {
    /// TR 38.901 material table.
    fn default() -> Self {
        Self {
            standard_glass: MaterialLoss::new(2.0, 0.2),
            iirr_glass: MaterialLoss::new(23.0, 0.3),
            concrete: MaterialLoss::new(5.0, 4.0),
        }
    }
}

/// BS antenna element pattern parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub max_gain_dbi: f64,
    pub h_beamwidth_deg: f64,
    pub v_beamwidth_deg: f64,
    pub max_attenuation_db: f64,
    pub side_lobe_db: f64,
    /// Electrical downtilt below the horizon.
    pub downtilt_deg: f64,
}

impl Default for AntennaPattern {
    fn default() -> Self {
        Self {
            max_gain_dbi: 8.0,
            h_beamwidth_deg: 65.0,
            v_beamwidth_deg: 65.0,
            max_attenuation_db: 30.0,
            side_lobe_db: 30.0,
            downtilt_deg: 12.0,
        }
    }
}

/// Log-normal shadow-fading standard deviations, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowSigmas {
    pub los_db: f64,
    /// LOS beyond the breakpoint (RMa only; equals `los_db` otherwise).
    pub los_far_db: f64,
    pub nlos_db: f64,
}

/// The full parameter set of an environment. Every field is tunable;
/// [`RadioParams::for_environment`] gives the calibrated defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub environment: Environment,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub isd_m: f64,
    pub bs_height_m: f64,
    pub bs_tx_power_dbm: f64,
    pub ue_tx_power_dbm: f64,
    pub antenna: AntennaPattern,
    pub ue_antenna_gain_dbi: f64,
    pub bs_noise_figure_db: f64,
    pub ue_noise_figure_db: f64,
    /// Total effective noise over the carrier; used as-is.
    pub thermal_noise_dbm: f64,
    pub indoor_fraction: f64,
    pub high_loss_fraction: f64,
    pub outdoor_ue_height_m: f64,
    pub indoor_height: IndoorHeight,
    pub indoor_speed_kmh: f64,
    pub outdoor_speed_kmh: f64,
    pub min_ue_distance_m: f64,
    pub max_ue_distance_m: f64,
    pub building_height_m: f64,
    pub street_width_m: f64,
    pub materials: Materials,
    pub shadow: ShadowSigmas,
    /// Sites whose served UEs contribute calibration samples.
    pub collecting_sites: usize,
    pub background_users_per_cell: usize,
    pub background_tx_power_dbm: f64,
    pub resource_blocks: usize,
    pub subcarriers_per_rb: usize,
    pub hysteresis_db: f64,
    pub time_to_trigger_s: f64,
    pub tick_s: f64,
}

impl RadioParams {
    pub fn for_environment(environment: Environment) -> Self {
        match environment {
            Environment::UrbanEmbb => Self {
                environment,
                carrier_ghz: 4.0,
                bandwidth_mhz: 10.0,
                isd_m: 200.0,
                bs_height_m: 25.0,
                bs_tx_power_dbm: 41.0,
                ue_tx_power_dbm: 23.0,
                antenna: AntennaPattern::default(),
                ue_antenna_gain_dbi: 0.0,
                bs_noise_figure_db: 5.0,
                ue_noise_figure_db: 7.0,
                thermal_noise_dbm: -81.0,
                indoor_fraction: 0.8,
                high_loss_fraction: 0.2,
                outdoor_ue_height_m: 1.5,
                indoor_height: IndoorHeight::Floors,
                indoor_speed_kmh: 3.0,
                outdoor_speed_kmh: 30.0,
                min_ue_distance_m: 10.0,
                max_ue_distance_m: 50.0,
                building_height_m: 22.5,
                street_width_m: 20.0,
                materials: Materials::default(),
                shadow: ShadowSigmas { los_db: 4.0, los_far_db: 4.0, nlos_db: 6.0 },
                collecting_sites: 7,
                background_users_per_cell: 10,
                background_tx_power_dbm: 41.0,
                resource_blocks: 50,
                subcarriers_per_rb: 12,
                hysteresis_db: 3.0,
                time_to_trigger_s: 0.1,
                tick_s: 0.1,
            },
            Environment::RuralEmbb => Self {
                environment,
                carrier_ghz: 4.0,
                bandwidth_mhz: 10.0,
                isd_m: 1732.0,
                bs_height_m: 35.0,
                bs_tx_power_dbm: 46.0,
                ue_tx_power_dbm: 23.0,
                antenna: AntennaPattern { downtilt_deg: 10.0, ..AntennaPattern::default() },
                ue_antenna_gain_dbi: 0.0,
                bs_noise_figure_db: 5.0,
                ue_noise_figure_db: 7.0,
                thermal_noise_dbm: -82.0,
                indoor_fraction: 0.5,
                high_loss_fraction: 0.0,
                outdoor_ue_height_m: 1.5,
                indoor_height: IndoorHeight::Fixed(1.5),
                indoor_speed_kmh: 3.0,
                outdoor_speed_kmh: 120.0,
                min_ue_distance_m: 10.0,
                max_ue_distance_m: 200.0,
                building_height_m: 10.0,
                street_width_m: 20.0,
                materials: Materials::default(),
                shadow: ShadowSigmas { los_db: 4.0, los_far_db: 6.0, nlos_db: 8.0 },
                collecting_sites: 7,
                background_users_per_cell: 10,
                background_tx_power_dbm: 46.0,
                resource_blocks: 50,
                subcarriers_per_rb: 12,
                hysteresis_db: 3.0,
                time_to_trigger_s: 0.1,
                tick_s: 0.1,
            },
        }
    }

    pub fn subcarriers(&self) -> usize {
        self.resource_blocks * self.subcarriers_per_rb
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values_per_environment() {
        let u = RadioParams::for_environment(Environment::UrbanEmbb);
        assert_eq!(u.bs_tx_power_dbm, 41.0);
        assert_eq!(u.bs_height_m, 25.0);
        assert_eq!(u.isd_m, 200.0);
        assert_eq!(u.thermal_noise_dbm, -81.0);
        assert_eq!(u.max_ue_distance_m, 50.0);
        assert_eq!(u.building_height_m, 22.5);

        let r = RadioParams::for_environment(Environment::RuralEmbb);
        assert_eq!(r.bs_tx_power_dbm, 46.0);
        assert_eq!(r.bs_height_m, 35.0);
        assert_eq!(r.isd_m, 1732.0);
        assert_eq!(r.thermal_noise_dbm, -82.0);
        assert_eq!(r.max_ue_distance_m, 200.0);
        assert_eq!(r.high_loss_fraction, 0.0);
        assert_eq!(r.outdoor_speed_kmh, 120.0);
    }

    #[test]
    fn ten_mhz_carrier_has_600_subcarriers() {
        assert_eq!(RadioParams::for_environment(Environment::UrbanEmbb).subcarriers(), 600);
    }
}
