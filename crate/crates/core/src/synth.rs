//! Synthetic collision data with planted rings and known ground truth.
//!
//! Background collisions join uniformly random distinct drivers. Each planted
//! ring of size `s` gets `s` dedicated drivers linked in a closed chain, plus
//! optional chord collisions between non-consecutive ring members and
//! attachment collisions tying ring members to background drivers.

use chrono::{Days, NaiveDate};
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cycles::{canonicalize_into, CanonicalKey, CycleSet};
use crate::error::{Error, Result};
use crate::graph::{NodeId, UndirectedMultigraph};
use crate::ingest::{CollisionDataset, CollisionRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub size: usize,
    #[serde(default)]
    pub chords: usize,
    #[serde(default)]
    pub attachments: usize,
}

impl RingSpec {
    pub fn isolated(size: usize) -> Self {
        RingSpec {
            size,
            chords: 0,
            attachments: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub driver_count: usize,
    pub background_collision_count: usize,
    /// Probability that a background collision involves three drivers
    /// instead of two.
    #[serde(default)]
    pub three_party_share: f64,
    #[serde(default)]
    pub planted_rings: Vec<RingSpec>,
    pub seed: u64,
    /// Attach uniformly random dates to every collision.
    #[serde(default)]
    pub with_dates: bool,
}

impl SyntheticSpec {
    /// 10,000 drivers, 12,000 two-party background collisions and isolated
    /// rings of sizes 4, 6, 8, 12 and 19.
    pub fn benchmark() -> Self {
        SyntheticSpec {
            driver_count: 10_000,
            background_collision_count: 12_000,
            three_party_share: 0.0,
            planted_rings: [4, 6, 8, 12, 19].map(RingSpec::isolated).to_vec(),
            seed: 42,
            with_dates: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.three_party_share) {
            return Err(Error::Spec(format!(
                "three_party_share must lie in [0, 1], got {}",
                self.three_party_share
            )));
        }
        let mut ring_drivers = 0usize;
        for r in &self.planted_rings {
            if r.size < 3 {
                return Err(Error::Spec(format!("ring size {} is below 3", r.size)));
            }
            let max_chords = r.size * (r.size - 1) / 2 - r.size;
            if r.chords > max_chords {
                return Err(Error::Spec(format!(
                    "ring of size {} admits at most {max_chords} chords, {} requested",
                    r.size, r.chords
                )));
            }
            ring_drivers += r.size;
        }
        if ring_drivers > self.driver_count {
            return Err(Error::Spec(format!(
                "planted rings need {ring_drivers} drivers but the pool has {}",
                self.driver_count
            )));
        }
        let background = self.driver_count - ring_drivers;
        let needed = if self.three_party_share > 0.0 { 3 } else { 2 };
        if self.background_collision_count > 0 && background < needed {
            return Err(Error::Spec(format!(
                "background collisions need at least {needed} non-ring drivers, {background} left"
            )));
        }
        if background == 0 && self.planted_rings.iter().any(|r| r.attachments > 0) {
            return Err(Error::Spec("attachments need at least one non-ring driver".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedRing {
    /// Canonical ring order of the driver keys, joined by `|`.
    pub key: String,
    /// Drivers in ring order.
    pub drivers: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub rings: Vec<PlantedRing>,
}

impl GroundTruth {
    /// Canonical key of each planted ring in `g`, or `None` when one of its
    /// drivers is not a node of `g`.
    pub fn keys_in(&self, g: &UndirectedMultigraph) -> Vec<Option<CanonicalKey>> {
        self.rings
            .iter()
            .map(|r| {
                let ids: Option<Vec<NodeId>> = r.drivers.iter().map(|d| g.node_by_key(d)).collect();
                ids.map(|ids| CanonicalKey::new(&ids))
            })
            .collect()
    }
}

fn driver_key(i: usize, width: usize) -> String {
    format!("D{i:0width$}")
}

/// Generates a dataset and its ground truth; identical specs give identical
/// output.
pub fn generate(spec: &SyntheticSpec) -> Result<(CollisionDataset, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let width = spec.driver_count.saturating_sub(1).to_string().len().max(6);

    let mut pool: Vec<usize> = (0..spec.driver_count).collect();
    pool.shuffle(&mut rng);
    let ring_total: usize = spec.planted_rings.iter().map(|r| r.size).sum();
    let (ring_pool, background) = pool.split_at(ring_total);
    let mut background = background.to_vec();
    background.sort_unstable();

    let start = NaiveDate::from_ymd_opt(2007, 1, 1).expect("valid date");
    let span_days = 6 * 365;
    let mut records = Vec::with_capacity(spec.background_collision_count + ring_total);
    let mut push = |rng: &mut ChaCha8Rng, drivers: Vec<usize>| {
        let occurred_on = spec
            .with_dates
            .then(|| start + Days::new(rng.gen_range(0..span_days)));
        records.push(CollisionRecord {
            collision_id: format!("C{:07}", records.len() + 1),
            driver_keys: drivers.into_iter().map(|d| driver_key(d, width)).collect(),
            occurred_on,
        });
    };

    for _ in 0..spec.background_collision_count {
        let k = if spec.three_party_share > 0.0 && rng.gen_bool(spec.three_party_share) {
            3
        } else {
            2
        };
        let picked = sample(&mut rng, background.len(), k)
            .into_iter()
            .map(|i| background[i])
            .collect();
        push(&mut rng, picked);
    }

    let mut truth = GroundTruth::default();
    let mut offset = 0;
    for ring in &spec.planted_rings {
        let members = &ring_pool[offset..offset + ring.size];
        offset += ring.size;
        let s = ring.size;
        for i in 0..s {
            push(&mut rng, vec![members[i], members[(i + 1) % s]]);
        }
        let chord_pairs: Vec<(usize, usize)> = (0..s)
            .flat_map(|i| (i + 2..s).map(move |j| (i, j)))
            .filter(|&(i, j)| !(i == 0 && j == s - 1))
            .collect();
        for idx in sample(&mut rng, chord_pairs.len(), ring.chords) {
            let (i, j) = chord_pairs[idx];
            push(&mut rng, vec![members[i], members[j]]);
        }
        for _ in 0..ring.attachments {
            let m = members[rng.gen_range(0..s)];
            let b = background[rng.gen_range(0..background.len())];
            push(&mut rng, vec![m, b]);
        }

        let drivers: Vec<String> = members.iter().map(|&d| driver_key(d, width)).collect();
        let mut canonical = Vec::new();
        canonicalize_into(&drivers, &mut canonical);
        truth.rings.push(PlantedRing {
            key: canonical.join("|"),
            drivers,
        });
    }

    Ok((CollisionDataset::new(records)?, truth))
}

/// Fraction of planted rings whose exact canonical key is in `detected`.
/// An empty ground truth has recall 1.
pub fn evaluate_recall(detected: &CycleSet, truth: &GroundTruth, g: &UndirectedMultigraph) -> f64 {
    if truth.rings.is_empty() {
        return 1.0;
    }
    let hits = truth
        .keys_in(g)
        .iter()
        .filter(|k| k.as_ref().is_some_and(|k| detected.contains(k)))
        .count();
    hits as f64 / truth.rings.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{enumerate_cycles, Cycle, CycleSource, RootMode};
    use crate::ingest::build_collision_network;
    use crate::tree::TreeStrategy;

    fn single_ring(size: usize) -> SyntheticSpec {
        SyntheticSpec {
            driver_count: size,
            background_collision_count: 0,
            three_party_share: 0.0,
            planted_rings: vec![RingSpec::isolated(size)],
            seed: 7,
            with_dates: false,
        }
    }

    #[test]
    fn lone_ring_is_a_cycle_graph() {
        let (ds, truth) = generate(&single_ring(5)).unwrap();
        assert_eq!(ds.len(), 5);
        let net = build_collision_network(&ds).unwrap();
        assert_eq!(net.graph.node_count(), 5);
        assert_eq!(net.graph.edge_count(), 5);
        assert!(net.graph.nodes().all(|v| net.graph.degree(v).unwrap() == 2));
        assert_eq!(net.graph.connected_components().len(), 1);

        let key = truth.keys_in(&net.graph)[0].clone().unwrap();
        let c = Cycle::new(key.as_slice().to_vec(), None, CycleSource::Oracle);
        assert!(c.is_simple_in(&net.graph));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec {
            with_dates: true,
            three_party_share: 0.3,
            planted_rings: vec![RingSpec {
                size: 6,
                chords: 2,
                attachments: 3,
            }],
            ..SyntheticSpec::benchmark()
        };
        let (a, ta) = generate(&spec).unwrap();
        let (b, tb) = generate(&spec).unwrap();
        let (mut ba, mut bb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ba).unwrap();
        b.write_csv(&mut bb).unwrap();
        assert_eq!(ba, bb);
        assert_eq!(ta, tb);

        let other = generate(&SyntheticSpec { seed: 43, ..spec }).unwrap().0;
        assert_ne!(other, a);
    }

    #[test]
    fn benchmark_truth_has_five_rings() {
        let (ds, truth) = generate(&SyntheticSpec::benchmark()).unwrap();
        assert_eq!(truth.rings.len(), 5);
        assert_eq!(ds.len(), 12_000 + 4 + 6 + 8 + 12 + 19);
        let sizes: Vec<_> = truth.rings.iter().map(|r| r.drivers.len()).collect();
        assert_eq!(sizes, vec![4, 6, 8, 12, 19]);
    }

    #[test]
    fn chords_and_attachments() {
        let spec = SyntheticSpec {
            driver_count: 30,
            background_collision_count: 0,
            three_party_share: 0.0,
            planted_rings: vec![RingSpec {
                size: 8,
                chords: 3,
                attachments: 2,
            }],
            seed: 1,
            with_dates: false,
        };
        let (ds, truth) = generate(&spec).unwrap();
        assert_eq!(ds.len(), 8 + 3 + 2);
        let net = build_collision_network(&ds).unwrap();
        let ring: Vec<NodeId> = truth.rings[0]
            .drivers
            .iter()
            .map(|d| net.graph.node_by_key(d).unwrap())
            .collect();
        let sub = net.graph.induced_subgraph(&ring).unwrap();
        assert_eq!(sub.edge_count(), 11);
    }

    #[test]
    fn invalid_specs() {
        let mut s = single_ring(5);
        s.driver_count = 4;
        assert!(matches!(generate(&s), Err(Error::Spec(_))));

        let mut s = single_ring(5);
        s.planted_rings[0].chords = 6;
        assert!(generate(&s).is_err());
        s.planted_rings[0].chords = 5;
        assert!(generate(&s).is_ok());

        let mut s = single_ring(5);
        s.planted_rings[0].size = 2;
        s.driver_count = 5;
        assert!(generate(&s).is_err());
    }

    #[test]
    fn recall_ratios() {
        let spec = SyntheticSpec {
            driver_count: 40,
            background_collision_count: 0,
            three_party_share: 0.0,
            planted_rings: [4, 5, 6, 7, 8].map(RingSpec::isolated).to_vec(),
            seed: 3,
            with_dates: false,
        };
        let (ds, truth) = generate(&spec).unwrap();
        let g = build_collision_network(&ds).unwrap().graph;
        let found = enumerate_cycles(&g, TreeStrategy::BreadthFirst, RootMode::AllRoots);
        assert_eq!(evaluate_recall(&found, &truth, &g), 1.0);
        assert_eq!(evaluate_recall(&CycleSet::new(), &truth, &g), 0.0);

        let four: Vec<Cycle> = found.cycles().filter(|c| c.len() != 8).cloned().collect();
        assert!((evaluate_recall(&CycleSet::from_cycles(four), &truth, &g) - 0.8).abs() < 1e-12);
    }
}
