//! Sites, sectors, UE drops and background entities.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::PenetrationClass;
use crate::geometry::{Point, Rect};
use crate::params::{IndoorHeight, RadioParams};
use crate::scenario::{BackgroundDecl, ScenarioSpec};
use crate::seeding::{self, tag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: u32,
    pub position: Point,
    pub antenna_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: u32,
    pub site_id: u32,
    pub azimuth: f64,
    pub tx_power: f64,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub hysteresis_db: f64,
    pub time_to_trigger_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ue {
    pub id: u32,
    pub position: Point,
    pub height: f64,
    pub indoor: bool,
    pub penetration_class: PenetrationClass,
    pub speed_kmh: f64,
    /// Site the UE was dropped around.
    pub home_site: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundCell {
    pub id: u32,
    pub position: Point,
    pub tx_power: f64,
    pub users: Vec<Point>,
}

/// A fully placed world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub sites: Vec<Site>,
    pub cells: Vec<Cell>,
    pub ues: Vec<Ue>,
    pub background: Vec<BackgroundCell>,
}

/// Hexagonal lattice of `1 + 3 r (r + 1)` sites, ordered ring by ring
/// starting with the center.
pub fn hex_layout(ring_count: u32, isd: f64, antenna_height: f64) -> Vec<Site> {
    let n = ring_count as i64;
    let mut axial: Vec<(i64, i64)> = Vec::new();
    for q in -n..=n {
        for r in (-n).max(-q - n)..=n.min(-q + n) {
            axial.push((q, r));
        }
    }
    let ring = |&(q, r): &(i64, i64)| (q.abs() + r.abs() + (q + r).abs()) / 2;
    let to_point = |&(q, r): &(i64, i64)| {
        Point::new(isd * (q as f64 + r as f64 / 2.0), isd * (3f64.sqrt() / 2.0) * r as f64)
    };
    let mut keyed: Vec<(i64, i64, (i64, i64))> = axial
        .iter()
        .map(|a| {
            let p = to_point(a);
            // integer angle key keeps the ordering exact across platforms
            let angle = (Point::ORIGIN.bearing_to(&p) * 1e6).round() as i64;
            (ring(a), angle, *a)
        })
        .collect();
    keyed.sort();
    keyed
        .iter()
        .enumerate()
        .map(|(i, (_, _, a))| Site { id: i as u32, position: to_point(a), antenna_height })
        .collect()
}

/// One cell per (site, azimuth), numbered site-major.
pub fn sectorize(sites: &[Site], azimuths: &[f64], params: &RadioParams) -> Vec<Cell> {
    sites
        .iter()
        .flat_map(|site| azimuths.iter().map(move |az| (site.id, *az)))
        .enumerate()
        .map(|(i, (site_id, azimuth))| Cell {
            id: i as u32,
            site_id,
            azimuth,
            tx_power: params.bs_tx_power_dbm,
            carrier_ghz: params.carrier_ghz,
            bandwidth_mhz: params.bandwidth_mhz,
            hysteresis_db: params.hysteresis_db,
            time_to_trigger_s: params.time_to_trigger_s,
        })
        .collect()
}

/// Indoor UE height from a random building: `Nfl ~ U{4..8}` floors,
/// `nfl ~ U{1..Nfl}`, height `3 (nfl - 1) + 1.5`.
pub fn ue_height<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let floors: u32 = rng.random_range(4..=8);
    let floor: u32 = rng.random_range(1..=floors);
    height_of_floor(floor)
}

pub fn height_of_floor(floor: u32) -> f64 {
    3.0 * (floor as f64 - 1.0) + 1.5
}

/// Drops `count` UEs uniformly over the annulus `[min_d, max_d]` around a
/// site. Ids start at `first_id`.
pub fn drop_ues<R: Rng + ?Sized>(
    site: &Site,
    count: usize,
    first_id: u32,
    min_d: f64,
    max_d: f64,
    params: &RadioParams,
    rng: &mut R,
) -> Vec<Ue> {
    (0..count)
        .map(|i| {
            let u: f64 = rng.random();
            let radius = (min_d * min_d + u * (max_d * max_d - min_d * min_d)).sqrt().clamp(min_d, max_d);
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let indoor = rng.random::<f64>() < params.indoor_fraction;
            let high_loss = rng.random::<f64>() < params.high_loss_fraction;
            let height = if indoor {
                match params.indoor_height {
                    IndoorHeight::Floors => ue_height(rng),
                    IndoorHeight::Fixed(h) => h,
                }
            } else {
                params.outdoor_ue_height_m
            };
            Ue {
                id: first_id + i as u32,
                position: site.position.offset(radius * theta.cos(), radius * theta.sin()),
                height,
                indoor,
                penetration_class: if high_loss { PenetrationClass::High } else { PenetrationClass::Low },
                speed_kmh: if indoor { params.indoor_speed_kmh } else { params.outdoor_speed_kmh },
                home_site: site.id,
            }
        })
        .collect()
}

fn uniform_in<R: Rng + ?Sized>(area: &Rect, rng: &mut R) -> Point {
    Point::new(
        area.min.x + rng.random::<f64>() * area.width(),
        area.min.y + rng.random::<f64>() * area.height(),
    )
}

/// Background cells and their users, uniformly inside the declared area.
pub fn place_background<R: Rng + ?Sized>(decl: &BackgroundDecl, tx_power: f64, rng: &mut R) -> Vec<BackgroundCell> {
    (0..decl.cell_count)
        .map(|i| {
            let position = uniform_in(&decl.area, rng);
            let users = (0..decl.users_per_cell).map(|_| uniform_in(&decl.area, rng)).collect();
            BackgroundCell { id: i as u32, position, tx_power, users }
        })
        .collect()
}

impl Deployment {
    /// Builds the sites and cells of a scenario without any UEs.
    pub fn skeleton(spec: &ScenarioSpec) -> Self {
        let params = &spec.params;
        let mut sites = Vec::with_capacity(spec.sites.len());
        let mut cells = Vec::new();
        for (i, decl) in spec.sites.iter().enumerate() {
            let site = Site { id: i as u32, position: decl.position, antenna_height: params.bs_height_m };
            for az in &decl.sector_azimuths {
                cells.push(Cell {
                    id: cells.len() as u32,
                    site_id: site.id,
                    azimuth: *az,
                    tx_power: params.bs_tx_power_dbm,
                    carrier_ghz: params.carrier_ghz,
                    bandwidth_mhz: params.bandwidth_mhz,
                    hysteresis_db: params.hysteresis_db,
                    time_to_trigger_s: params.time_to_trigger_s,
                });
            }
            sites.push(site);
        }
        Self { sites, cells, ues: Vec::new(), background: Vec::new() }
    }

    /// Places UEs and background entities for `seed`. `stream` separates
    /// independent drops of the same scenario.
    pub fn generate(spec: &ScenarioSpec, seed: u64, stream: u64) -> Self {
        let mut dep = Self::skeleton(spec);
        let params = &spec.params;
        let mut ues = Vec::new();
        for (site, decl) in dep.sites.iter().zip(&spec.sites) {
            let mut rng = seeding::rng(seed, &[tag::DEPLOYMENT, stream, site.id as u64]);
            let count = spec.users_per_sector * decl.sector_azimuths.len();
            ues.extend(drop_ues(
                site,
                count,
                ues.len() as u32,
                params.min_ue_distance_m,
                spec.max_ue_distance,
                params,
                &mut rng,
            ));
        }
        dep.ues = ues;
        let mut rng = seeding::rng(seed, &[tag::BACKGROUND, stream]);
        dep.background = place_background(&spec.background, params.background_tx_power_dbm, &mut rng);
        dep
    }

    pub fn site_of(&self, cell: u32) -> u32 {
        self.cells[cell as usize].site_id
    }

    /// Ids of the `count` sites closest to the layout centroid.
    pub fn inner_sites(&self, count: usize) -> Vec<u32> {
        if self.sites.is_empty() {
            return Vec::new();
        }
        let n = self.sites.len() as f64;
        let centroid = Point::new(
            self.sites.iter().map(|s| s.position.x).sum::<f64>() / n,
            self.sites.iter().map(|s| s.position.y).sum::<f64>() / n,
        );
        let mut ids: Vec<(f64, u32)> =
            self.sites.iter().map(|s| (s.position.distance(&centroid), s.id)).collect();
        // 1 mm buckets so lattice ties resolve by id
        ids.sort_by(|a, b| {
            let (ka, kb) = ((a.0 * 1e3).round(), (b.0 * 1e3).round());
            ka.total_cmp(&kb).then(a.1.cmp(&b.1))
        });
        let mut out: Vec<u32> = ids.into_iter().take(count).map(|(_, id)| id).collect();
        out.sort_unstable();
        out
    }

    /// Nearest-neighbor pairs of sites: distance within the minimum
    /// inter-site spacing plus 1 m.
    pub fn site_adjacency(&self) -> Vec<(u32, u32)> {
        let mut spacing = f64::INFINITY;
        for (i, a) in self.sites.iter().enumerate() {
            for b in &self.sites[i + 1..] {
                spacing = spacing.min(a.position.distance(&b.position));
            }
        }
        let mut pairs = Vec::new();
        for (i, a) in self.sites.iter().enumerate() {
            for b in &self.sites[i + 1..] {
                if a.position.distance(&b.position) <= spacing + 1.0 {
                    pairs.push((a.id, b.id));
                }
            }
        }
        pairs
    }

    /// CSV dump: `entity_type,id,x,y,height,attrs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("entity_type,id,x,y,height,attrs\n");
        for s in &self.sites {
            writeln!(out, "site,{},{},{},{},", s.id, s.position.x, s.position.y, s.antenna_height).unwrap();
        }
        for c in &self.cells {
            let site = &self.sites[c.site_id as usize];
            writeln!(
                out,
                "cell,{},{},{},{},site={};azimuth={};tx_power_dbm={}",
                c.id, site.position.x, site.position.y, site.antenna_height, c.site_id, c.azimuth, c.tx_power
            )
            .unwrap();
        }
        for u in &self.ues {
            writeln!(
                out,
                "ue,{},{},{},{},home_site={};indoor={};penetration={:?};speed_kmh={}",
                u.id, u.position.x, u.position.y, u.height, u.home_site, u.indoor as u8, u.penetration_class, u.speed_kmh
            )
            .unwrap();
        }
        for b in &self.background {
            writeln!(out, "background_cell,{},{},{},,tx_power_dbm={}", b.id, b.position.x, b.position.y, b.tx_power)
                .unwrap();
            for (k, p) in b.users.iter().enumerate() {
                writeln!(out, "background_ue,{},{},{},,cell={}", k, p.x, p.y, b.id).unwrap();
            }
        }
        out
    }
}
