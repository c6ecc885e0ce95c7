//! Downlink radio KPIs: coupling gain, wideband SINR, RSRP and RSRQ.
//!
//! Coupling gain uses the received-minus-transmitted sign convention, so
//! values are negative dB.

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Linear-domain sum of dB powers, returned in dB.
pub fn sum_db(values: impl IntoIterator<Item = f64>) -> f64 {
    linear_to_db(values.into_iter().map(db_to_linear).sum())
}

/// Power budget of one link. Losses are positive dB, gains dBi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power: f64,
    pub path_loss: f64,
    pub penetration: f64,
    pub shadow: f64,
    pub tx_antenna_gain: f64,
    pub rx_antenna_gain: f64,
}

impl LinkBudget {
    pub fn rx_power(&self) -> f64 {
        self.tx_power - self.path_loss - self.penetration - self.shadow + self.tx_antenna_gain
            + self.rx_antenna_gain
    }
}

pub fn coupling_gain(budget: &LinkBudget) -> f64 {
    budget.rx_power() - budget.tx_power
}

/// Noise figures are informational; `thermal_noise_dbm` is already the
/// total effective noise over the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub thermal_noise_dbm: f64,
    pub ue_noise_figure_db: f64,
    pub bs_noise_figure_db: f64,
}

impl NoiseModel {
    pub fn from_params(params: &crate::params::RadioParams) -> Self {
        Self {
            thermal_noise_dbm: params.thermal_noise_dbm,
            ue_noise_figure_db: params.ue_noise_figure_db,
            bs_noise_figure_db: params.bs_noise_figure_db,
        }
    }

    pub fn total_dbm(&self) -> f64 {
        self.thermal_noise_dbm
    }
}

/// Full-buffer wideband SINR in dB. `interferers` must not contain the
/// serving cell.
pub fn wideband_sinr(serving_rx: f64, interferers: &[f64], noise: &NoiseModel) -> f64 {
    let denominator: f64 = interferers.iter().copied().map(db_to_linear).sum::<f64>()
        + db_to_linear(noise.total_dbm());
    linear_to_db(db_to_linear(serving_rx) / denominator)
}

/// Average received power per resource element.
pub fn rsrp(rx_power: f64, subcarriers: usize) -> f64 {
    debug_assert!(subcarriers >= 1);
    rx_power - linear_to_db(subcarriers as f64)
}

/// `N * RSRP / RSSI` in dB, with `N` resource blocks in the RSSI bandwidth.
pub fn rsrq(rsrp: f64, rssi: f64, resource_blocks: usize) -> f64 {
    debug_assert!(resource_blocks >= 1);
    linear_to_db(resource_blocks as f64) + rsrp - rssi
}

/// One UE measurement at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpiSample {
    pub time: f64,
    /// Monte Carlo drop index; 0 in timeline runs.
    pub drop: u32,
    pub ue_id: u32,
    pub serving_cell: u32,
    pub serving_site: u32,
    pub position: Point,
    pub serving_distance: f64,
    pub rsrp: f64,
    pub rsrq: f64,
    pub sinr: f64,
    pub coupling_gain: f64,
}

/// KPI names selectable in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kpi {
    Rsrp,
    Rsrq,
    Sinr,
    CouplingGain,
    ServingDistance,
    Position,
}

impl Kpi {
    pub const ALL: [Kpi; 6] =
        [Kpi::Rsrp, Kpi::Rsrq, Kpi::Sinr, Kpi::CouplingGain, Kpi::ServingDistance, Kpi::Position];

    pub fn name(&self) -> &'static str {
        match self {
            Kpi::Rsrp => "rsrp",
            Kpi::Rsrq => "rsrq",
            Kpi::Sinr => "sinr",
            Kpi::CouplingGain => "coupling_gain",
            Kpi::ServingDistance => "serving_distance",
            Kpi::Position => "position",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn noise(dbm: f64) -> NoiseModel {
        NoiseModel { thermal_noise_dbm: dbm, ue_noise_figure_db: 7.0, bs_noise_figure_db: 5.0 }
    }

    fn budget(tx: f64, pl: f64) -> LinkBudget {
        LinkBudget { tx_power: tx, path_loss: pl, penetration: 0.0, shadow: 0.0, tx_antenna_gain: 0.0, rx_antenna_gain: 0.0 }
    }

    #[test]
    fn coupling_gain_definition() {
        assert_eq!(coupling_gain(&budget(41.0, 101.0)), -101.0);
        assert_eq!(budget(41.0, 101.0).rx_power(), -60.0);
        assert_eq!(coupling_gain(&budget(0.0, 0.0)), 0.0);
    }

    #[test]
    fn rx_power_composition() {
        let b = LinkBudget { tx_power: 41.0, path_loss: 90.0, penetration: 12.5, shadow: -3.0, tx_antenna_gain: 8.0, rx_antenna_gain: 0.0 };
        assert_eq!(b.rx_power(), 41.0 - 90.0 - 12.5 + 3.0 + 8.0);
    }

    #[test]
    fn sinr_examples() {
        assert_abs_diff_eq!(wideband_sinr(-80.0, &[], &noise(-81.0)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wideband_sinr(-80.0, &[-80.0], &noise(-400.0)), 0.0, epsilon = 1e-12);
        // 1e-8 / (1e-9 + 10^-9.3 + 1e-10)
        let oracle = 10.0 * (1e-8 / (1e-9 + 10f64.powf(-9.3) + 1e-10)).log10();
        let got = wideband_sinr(-80.0, &[-90.0, -93.0], &noise(-100.0));
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(got, 7.96, epsilon = 0.01);
    }

    #[test]
    fn rsrp_examples() {
        assert_eq!(rsrp(-70.0, 1), -70.0);
        assert_abs_diff_eq!(rsrp(-70.0, 600), -97.78, epsilon = 0.005);
        assert_abs_diff_eq!(rsrp(-70.0, 600) - rsrp(-70.0, 1200), 3.0103, epsilon = 1e-4);
    }

    #[test]
    fn rsrq_examples() {
        assert_eq!(rsrq(-97.0, -97.0, 1), 0.0);
        assert_abs_diff_eq!(rsrq(-97.0, -70.0, 50), -10.01, epsilon = 0.005);
        assert_abs_diff_eq!(rsrq(-97.0, -73.0, 50) - rsrq(-97.0, -70.0, 50), 3.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn sinr_matches_linear_route(
            s in -130.0f64..-30.0,
            interferers in prop::collection::vec(-140.0f64..-40.0, 0..10),
            n in -110.0f64..-70.0,
        ) {
            let ps = 10f64.powf(s / 10.0);
            let pi: f64 = interferers.iter().map(|i| 10f64.powf(i / 10.0)).sum();
            let pn = 10f64.powf(n / 10.0);
            let linear = 10.0 * (ps / (pi + pn)).log10();
            prop_assert!((wideband_sinr(s, &interferers, &noise(n)) - linear).abs() < 1e-9);
        }

        #[test]
        fn extra_interferer_lowers_sinr(
            s in -130.0f64..-30.0,
            interferers in prop::collection::vec(-140.0f64..-40.0, 0..10),
            extra in -140.0f64..-40.0,
        ) {
            let before = wideband_sinr(s, &interferers, &noise(-90.0));
            let mut more = interferers.clone();
            more.push(extra);
            prop_assert!(wideband_sinr(s, &more, &noise(-90.0)) < before);
        }

        #[test]
        fn coupling_gain_ignores_tx_power_and_tracks_loss(
            tx in 0.0f64..60.0, pl in 40.0f64..180.0, dx in 0.0f64..30.0, dtx in -20.0f64..20.0,
        ) {
            let b = budget(tx, pl);
            prop_assert!((coupling_gain(&budget(tx + dtx, pl)) - coupling_gain(&b)).abs() < 1e-9);
            prop_assert!((coupling_gain(&b) - coupling_gain(&budget(tx, pl + dx)) - dx).abs() < 1e-9);
        }
    }
}
