//! Large-scale propagation: LOS probability, UMa/RMa path loss, O2I
//! penetration loss, shadow fading and the BS element pattern.
//!
//! Formulas follow TR 38.901 (path loss table 7.4.1-1, LOS probability
//! table 7.4.2-1, element pattern table 7.3-1). Fast fading and
//! beamforming gain are not modeled.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{AntennaPattern, Materials, Propagation, RadioParams};
use crate::seeding;

const SPEED_OF_LIGHT: f64 = 3.0e8;
/// Effective environment height for the UMa breakpoint distance.
const UMA_EFFECTIVE_ENV_HEIGHT: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("{model:?}: 2-D distance {d2d:.1} m outside validity range [{min}, {max}] m")]
    Domain { model: Propagation, d2d: f64, min: f64, max: f64 },
    #[error("non-physical link input: {0}")]
    Input(&'static str),
}

/// O2I building penetration class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PenetrationClass {
    Low,
    High,
}

/// Geometric inputs of one BS-UE link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d2d: f64,
    pub d3d: f64,
    pub bs_height: f64,
    pub ue_height: f64,
    /// Horizontal angle between the sector boresight and the UE.
    pub azimuth_offset: f64,
    /// Vertical angle between the tilted boresight and the UE.
    pub zenith_offset: f64,
}

impl LinkGeometry {
    /// Builds the geometry from a horizontal distance, the bearing of the
    /// UE seen from the site and the sector orientation.
    pub fn new(
        d2d: f64,
        bs_height: f64,
        ue_height: f64,
        bearing_deg: f64,
        boresight_deg: f64,
        downtilt_deg: f64,
    ) -> Self {
        let dh = bs_height - ue_height;
        let d3d = d2d.hypot(dh);
        let depression = dh.atan2(d2d).to_degrees();
        Self {
            d2d,
            d3d,
            bs_height,
            ue_height,
            azimuth_offset: crate::geometry::wrap_180(bearing_deg - boresight_deg),
            zenith_offset: depression - downtilt_deg,
        }
    }

    /// Same positions but a different horizontal distance.
    fn with_d2d(&self, d2d: f64) -> Self {
        Self { d2d, d3d: d2d.hypot(self.bs_height - self.ue_height), ..*self }
    }
}

/// Probability that a link is line-of-sight.
pub fn los_probability(model: Propagation, d2d: f64, ue_height: f64) -> f64 {
    match model {
        Propagation::UMa => {
            if d2d <= 18.0 {
                return 1.0;
            }
            let c = if ue_height <= 13.0 { 0.0 } else { ((ue_height - 13.0) / 10.0).powf(1.5) };
            let base = 18.0 / d2d + (-d2d / 63.0).exp() * (1.0 - 18.0 / d2d);
            let height = 1.0 + c * 1.25 * (d2d / 100.0).powi(3) * (-d2d / 150.0).exp();
            (base * height).clamp(0.0, 1.0)
        }
        Propagation::RMa => {
            if d2d <= 10.0 {
                1.0
            } else {
                (-(d2d - 10.0) / 1000.0).exp()
            }
        }
    }
}

/// Validity range of the 2-D distance for a model and LOS state.
pub fn validity_range(model: Propagation, los: bool) -> (f64, f64) {
    match (model, los) {
        (Propagation::UMa, _) => (10.0, 5_000.0),
        (Propagation::RMa, true) => (10.0, 10_000.0),
        (Propagation::RMa, false) => (10.0, 5_000.0),
    }
}

/// Path-loss evaluator for one environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub model: Propagation,
    /// Average building height (RMa `h`).
    pub building_height: f64,
    /// Average street width (RMa `W`).
    pub street_width: f64,
    /// Reject geometries outside the validity range instead of clamping the
    /// lower bound and extrapolating past the upper one.
    pub strict: bool,
}

impl PathLossModel {
    pub fn from_params(params: &RadioParams) -> Self {
        Self {
            model: params.environment.propagation(),
            building_height: params.building_height_m,
            street_width: params.street_width_m,
            strict: false,
        }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Breakpoint distance in meters.
    pub fn breakpoint(&self, bs_height: f64, ue_height: f64, fc_ghz: f64) -> f64 {
        let fc_hz = fc_ghz * 1e9;
        match self.model {
            Propagation::UMa => {
                4.0 * (bs_height - UMA_EFFECTIVE_ENV_HEIGHT)
                    * (ue_height - UMA_EFFECTIVE_ENV_HEIGHT)
                    * fc_hz
                    / SPEED_OF_LIGHT
            }
            Propagation::RMa => {
                2.0 * std::f64::consts::PI * bs_height * ue_height * fc_hz / SPEED_OF_LIGHT
            }
        }
    }

    /// Basic path loss (no penetration, no shadowing) in dB.
    pub fn path_loss(&self, los: bool, geom: &LinkGeometry, fc_ghz: f64) -> Result<f64, ChannelError> {
        if !(fc_ghz > 0.0) {
            return Err(ChannelError::Input("carrier frequency must be positive"));
        }
        if !geom.d2d.is_finite() || geom.d2d < 0.0 {
            return Err(ChannelError::Input("2-D distance must be finite and non-negative"));
        }
        let (min, max) = validity_range(self.model, los);
        let mut geom = *geom;
        if geom.d2d < min || geom.d2d > max {
            if self.strict {
                return Err(ChannelError::Domain { model: self.model, d2d: geom.d2d, min, max });
            }
            if geom.d2d < min {
                geom = geom.with_d2d(min);
            }
        }
        if !(geom.d3d > 0.0) {
            return Err(ChannelError::Input("3-D distance must be positive"));
        }
        let los_loss = self.los_loss(&geom, fc_ghz);
        Ok(if los { los_loss } else { los_loss.max(self.nlos_loss(&geom, fc_ghz)) })
    }

    fn los_loss(&self, g: &LinkGeometry, fc: f64) -> f64 {
        let bp = self.breakpoint(g.bs_height, g.ue_height, fc);
        match self.model {
            Propagation::UMa => {
                if g.d2d <= bp {
                    28.0 + 22.0 * g.d3d.log10() + 20.0 * fc.log10()
                } else {
                    let dh = g.bs_height - g.ue_height;
                    28.0 + 40.0 * g.d3d.log10() + 20.0 * fc.log10()
                        - 9.0 * (bp * bp + dh * dh).log10()
                }
            }
            Propagation::RMa => {
                if g.d2d <= bp {
                    self.rma_pl1(g.d3d, fc)
                } else {
                    self.rma_pl1(bp, fc) + 40.0 * (g.d3d / bp).log10()
                }
            }
        }
    }

    fn rma_pl1(&self, d: f64, fc: f64) -> f64 {
        let h = self.building_height;
        20.0 * (40.0 * std::f64::consts::PI * d * fc / 3.0).log10()
            + (0.03 * h.powf(1.72)).min(10.0) * d.log10()
            - (0.044 * h.powf(1.72)).min(14.77)
            + 0.002 * h.log10() * d
    }

    fn nlos_loss(&self, g: &LinkGeometry, fc: f64) -> f64 {
        match self.model {
            Propagation::UMa => {
                13.54 + 39.08 * g.d3d.log10() + 20.0 * fc.log10() - 0.6 * (g.ue_height - 1.5)
            }
            Propagation::RMa => {
                let (h, w, hbs) = (self.building_height, self.street_width, g.bs_height);
                161.04 - 7.1 * w.log10() + 7.5 * h.log10()
                    - (24.37 - 3.7 * (h / hbs).powi(2)) * hbs.log10()
                    + (43.42 - 3.1 * hbs.log10()) * (g.d3d.log10() - 3.0)
                    + 20.0 * fc.log10()
                    - (3.2 * (11.75 * g.ue_height).log10().powi(2) - 4.97)
            }
        }
    }
}

/// Building entry loss for an indoor UE.
///
/// Low loss mixes 30 % standard glass with 70 % concrete; high loss mixes
/// 70 % IRR glass with 30 % concrete.
pub fn penetration_loss(class: PenetrationClass, fc_ghz: f64, materials: &Materials) -> f64 {
    let lin = |loss_db: f64| 10f64.powf(-loss_db / 10.0);
    let concrete = lin(materials.concrete.at(fc_ghz));
    let mix = match class {
        PenetrationClass::Low => 0.3 * lin(materials.standard_glass.at(fc_ghz)) + 0.7 * concrete,
        PenetrationClass::High => 0.7 * lin(materials.iirr_glass.at(fc_ghz)) + 0.3 * concrete,
    };
    5.0 - 10.0 * mix.log10()
}

/// Element gain in dBi for a direction relative to the tilted boresight.
pub fn element_gain(pattern: &AntennaPattern, azimuth_offset: f64, zenith_offset: f64) -> f64 {
    let az = crate::geometry::wrap_180(azimuth_offset);
    let horizontal = (12.0 * (az / pattern.h_beamwidth_deg).powi(2)).min(pattern.max_attenuation_db);
    let vertical = (12.0 * (zenith_offset / pattern.v_beamwidth_deg).powi(2)).min(pattern.side_lobe_db);
    pattern.max_gain_dbi - (horizontal + vertical).min(pattern.max_attenuation_db)
}

/// Zero-mean normal shadowing draw with standard deviation `sigma_db`.
pub fn shadow_fading<R: Rng + ?Sized>(rng: &mut R, sigma_db: f64) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    let z: f64 = StandardNormal.sample(rng);
    sigma_db * z
}

/// Per-link random state, fixed for the whole run. LOS is decided by
/// comparing `los_uniform` against the LOS probability at the current
/// distance, so a moving UE changes LOS state consistently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDraw {
    pub los_uniform: f64,
    pub shadow_normal: f64,
    pub indoor_uniform: f64,
}

impl LinkDraw {
    /// Pure function of `(seed, key)`: concurrent callers asking for the
    /// same link always observe the same draw.
    pub fn for_link(seed: u64, key: &[u64]) -> Self {
        let mut rng = seeding::rng(seed, key);
        Self {
            los_uniform: rng.random(),
            shadow_normal: StandardNormal.sample(&mut rng),
            indoor_uniform: rng.random(),
        }
    }
}

/// Outcome of the large-scale channel for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub los: bool,
    pub shadow_fading: f64,
    pub penetration: f64,
    /// Basic path loss plus the indoor distance term.
    pub path_loss: f64,
}

/// Indoor state of the receiving UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indoor {
    pub class: PenetrationClass,
}

/// Evaluates links for one parameter set.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    pub path_loss: PathLossModel,
    pub carrier_ghz: f64,
    pub materials: Materials,
    pub shadow: crate::params::ShadowSigmas,
    pub antenna: AntennaPattern,
}

impl ChannelModel {
    pub fn from_params(params: &RadioParams) -> Self {
        Self {
            path_loss: PathLossModel::from_params(params),
            carrier_ghz: params.carrier_ghz,
            materials: params.materials,
            shadow: params.shadow,
            antenna: params.antenna,
        }
    }

    pub fn shadow_sigma(&self, los: bool, geom: &LinkGeometry) -> f64 {
        if !los {
            return self.shadow.nlos_db;
        }
        let bp = self.path_loss.breakpoint(geom.bs_height, geom.ue_height, self.carrier_ghz);
        if self.path_loss.model == Propagation::RMa && geom.d2d > bp {
            self.shadow.los_far_db
        } else {
            self.shadow.los_db
        }
    }

    pub fn realize(
        &self,
        geom: &LinkGeometry,
        indoor: Option<Indoor>,
        draw: &LinkDraw,
    ) -> Result<ChannelRealization, ChannelError> {
        let los = draw.los_uniform < los_probability(self.path_loss.model, geom.d2d, geom.ue_height);
        let (penetration, indoor_distance) = match indoor {
            Some(Indoor { class }) => (
                penetration_loss(class, self.carrier_ghz, &self.materials),
                draw.indoor_uniform * geom.d2d.min(25.0),
            ),
            None => (0.0, 0.0),
        };
        let path_loss = self.path_loss.path_loss(los, geom, self.carrier_ghz)? + 0.5 * indoor_distance;
        Ok(ChannelRealization {
            los,
            shadow_fading: self.shadow_sigma(los, geom) * draw.shadow_normal,
            penetration,
            path_loss,
        })
    }

    pub fn tx_gain(&self, geom: &LinkGeometry) -> f64 {
        element_gain(&self.antenna, geom.azimuth_offset, geom.zenith_offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Environment, MaterialLoss};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uma() -> PathLossModel {
        PathLossModel::from_params(&RadioParams::for_environment(Environment::UrbanEmbb))
    }

    fn rma() -> PathLossModel {
        PathLossModel::from_params(&RadioParams::for_environment(Environment::RuralEmbb))
    }

    fn geom(d2d: f64, hbs: f64, hut: f64) -> LinkGeometry {
        LinkGeometry::new(d2d, hbs, hut, 0.0, 0.0, 0.0)
    }

    #[test]
    fn los_probability_short_distance_clamps() {
        assert_eq!(los_probability(Propagation::UMa, 10.0, 1.5), 1.0);
        assert_eq!(los_probability(Propagation::RMa, 5.0, 1.5), 1.0);
    }

    #[test]
    fn los_probability_uma_500m() {
        // straight-line evaluation: 18/d + exp(-d/63)(1 - 18/d), C' = 0 below 13 m
        let d: f64 = 500.0;
        let oracle = 18.0 / d + (-d / 63.0_f64).exp() * (1.0 - 18.0 / d);
        assert_abs_diff_eq!(los_probability(Propagation::UMa, d, 1.5), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle, 0.036_345, epsilon = 1e-6);
    }

    #[test]
    fn los_probability_in_unit_interval_and_non_increasing() {
        for model in [Propagation::UMa, Propagation::RMa] {
            for h in [1.5, 10.5, 16.5, 22.5] {
                let mut prev = 1.0;
                for i in 0..5000 {
                    let d = i as f64;
                    let p = los_probability(model, d, h);
                    assert!((0.0..=1.0).contains(&p));
                    assert!(p <= prev + 1e-12, "{model:?} h={h} d={d}: {p} > {prev}");
                    prev = p;
                }
            }
        }
    }

    #[test]
    fn uma_los_slope_is_22_db_per_decade() {
        let m = uma();
        let a = m.path_loss(true, &geom(100.0, 25.0, 1.5), 4.0).unwrap();
        let g2 = geom(100.0, 25.0, 1.5);
        // place the second point at exactly twice the 3-D distance
        let d3 = 2.0 * g2.d3d;
        let d2 = (d3 * d3 - 23.5f64 * 23.5).sqrt();
        let b = m.path_loss(true, &geom(d2, 25.0, 1.5), 4.0).unwrap();
        assert_abs_diff_eq!(b - a, 22.0 * 2f64.log10(), epsilon = 1e-9);
        assert_abs_diff_eq!(b - a, 6.62, epsilon = 0.005);
    }

    #[test]
    fn nlos_never_below_los() {
        for m in [uma(), rma()] {
            for d in [10.0, 35.0, 120.0, 900.0, 4000.0] {
                let g = geom(d, 30.0, 1.5);
                assert!(m.path_loss(false, &g, 4.0).unwrap() >= m.path_loss(true, &g, 4.0).unwrap());
            }
        }
    }

    #[test]
    fn rma_los_1km_straight_line() {
        let m = rma();
        let g = LinkGeometry { d2d: (1000f64.powi(2) - 33.5f64.powi(2)).sqrt(), d3d: 1000.0, ..geom(999.0, 35.0, 1.5) };
        let h: f64 = 10.0;
        let expected = 20.0 * (40.0 * std::f64::consts::PI * 1000.0 * 4.0 / 3.0_f64).log10()
            + (0.03 * h.powf(1.72)).min(10.0) * 3.0
            - (0.044 * h.powf(1.72)).min(14.77)
            + 0.002 * h.log10() * 1000.0;
        assert_abs_diff_eq!(m.path_loss(true, &g, 4.0).unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn continuous_at_breakpoint() {
        for (m, hbs) in [(uma(), 25.0), (rma(), 35.0)] {
            let bp = m.breakpoint(hbs, 1.5, 4.0);
            let below = m.path_loss(true, &geom(bp - 1e-7, hbs, 1.5), 4.0).unwrap();
            let above = m.path_loss(true, &geom(bp + 1e-7, hbs, 1.5), 4.0).unwrap();
            assert!((above - below).abs() < 0.01, "{:?} jump {}", m.model, above - below);
        }
    }

    #[test]
    fn strict_mode_rejects_out_of_range() {
        let m = uma().strict();
        assert!(matches!(
            m.path_loss(true, &geom(6000.0, 25.0, 1.5), 4.0),
            Err(ChannelError::Domain { .. })
        ));
        assert!(matches!(m.path_loss(true, &geom(5.0, 25.0, 1.5), 4.0), Err(ChannelError::Domain { .. })));
        // permissive clamps the short end to the 10 m value
        let clamped = uma().path_loss(true, &geom(5.0, 25.0, 1.5), 4.0).unwrap();
        let at_min = uma().path_loss(true, &geom(10.0, 25.0, 1.5), 4.0).unwrap();
        assert_eq!(clamped, at_min);
        assert!(uma().path_loss(true, &geom(6000.0, 25.0, 1.5), 4.0).unwrap().is_finite());
    }

    #[test]
    fn penetration_values_at_4ghz() {
        let m = Materials::default();
        assert_abs_diff_eq!(penetration_loss(PenetrationClass::Low, 4.0, &m), 12.88, epsilon = 0.01);
        assert_abs_diff_eq!(penetration_loss(PenetrationClass::High, 4.0, &m), 27.97, epsilon = 0.01);
    }

    #[test]
    fn lossless_materials_leave_the_constant() {
        let zero = MaterialLoss::new(0.0, 0.0);
        let m = Materials { standard_glass: zero, iirr_glass: zero, concrete: zero };
        assert_abs_diff_eq!(penetration_loss(PenetrationClass::Low, 4.0, &m), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn high_loss_exceeds_low_loss() {
        let m = Materials::default();
        for f in [0.7, 4.0, 30.0] {
            assert!(penetration_loss(PenetrationClass::High, f, &m) > penetration_loss(PenetrationClass::Low, f, &m));
        }
    }

    #[test]
    fn element_pattern_values() {
        let p = AntennaPattern::default();
        assert_eq!(element_gain(&p, 0.0, 0.0), 8.0);
        assert_abs_diff_eq!(element_gain(&p, 90.0, 0.0), 8.0 - 12.0 * (90.0f64 / 65.0).powi(2), epsilon = 1e-12);
        assert_eq!(element_gain(&p, 180.0, 0.0), -22.0);
        assert_eq!(element_gain(&p, 60.0, 120.0), -22.0);
        let partial = 8.0 - 12.0 * (60.0f64 / 65.0).powi(2) - 12.0 * (80.0f64 / 65.0).powi(2);
        assert_abs_diff_eq!(element_gain(&p, 60.0, 80.0), partial, epsilon = 1e-12);
    }

    #[test]
    fn element_gain_below_peak_off_boresight() {
        let p = AntennaPattern::default();
        for a in -18..=18 {
            for z in -9..=9 {
                let g = element_gain(&p, a as f64 * 10.0, z as f64 * 10.0);
                assert!(g <= 8.0);
                if a != 0 || z != 0 {
                    assert!(g < 8.0);
                }
            }
        }
    }

    #[test]
    fn shadow_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(shadow_fading(&mut rng, 0.0), 0.0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| shadow_fading(&mut rng, 4.0)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((std - 4.0).abs() < 0.05, "std {std}");
    }

    #[test]
    fn link_draws_are_persistent() {
        assert_eq!(LinkDraw::for_link(5, &[2, 3, 4]), LinkDraw::for_link(5, &[2, 3, 4]));
        assert_ne!(LinkDraw::for_link(5, &[2, 3, 4]), LinkDraw::for_link(5, &[2, 4, 3]));
        let model = ChannelModel::from_params(&RadioParams::for_environment(Environment::UrbanEmbb));
        let g = geom(40.0, 25.0, 1.5);
        let d = LinkDraw::for_link(5, &[1]);
        let indoor = Some(Indoor { class: PenetrationClass::Low });
        assert_eq!(model.realize(&g, indoor, &d), model.realize(&g, indoor, &d));
    }

    #[test]
    fn outdoor_links_have_no_penetration() {
        let model = ChannelModel::from_params(&RadioParams::for_environment(Environment::UrbanEmbb));
        let r = model.realize(&geom(40.0, 25.0, 1.5), None, &LinkDraw::for_link(1, &[1])).unwrap();
        assert_eq!(r.penetration, 0.0);
        assert!(r.path_loss > 0.0);
    }
}
