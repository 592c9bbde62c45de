//! Collision records, the driver network built from them, and pruning of
//! nodes that cannot lie on any cycle.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphBuilder, NodeId, UndirectedMultigraph};

pub const CSV_HEADER: [&str; 4] = ["collision_id", "driver_id", "vehicle_id", "date"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionRecord {
    pub collision_id: String,
    /// Pairwise distinct, in order of first appearance.
    pub driver_keys: Vec<String>,
    pub occurred_on: Option<NaiveDate>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionDataset {
    records: Vec<CollisionRecord>,
}

impl CollisionDataset {
    /// Checks that collision ids are non-empty and unique and that no record
    /// lists a driver twice.
    pub fn new(records: Vec<CollisionRecord>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(records.len());
        for r in &records {
            if r.collision_id.is_empty() {
                return Err(Error::Format("empty collision id".into()));
            }
            if !ids.insert(r.collision_id.as_str()) {
                return Err(Error::Format(format!("duplicate collision id `{}`", r.collision_id)));
            }
            let mut seen = HashSet::with_capacity(r.driver_keys.len());
            if r.driver_keys.is_empty() {
                return Err(Error::Format(format!("collision `{}` lists no drivers", r.collision_id)));
            }
            for d in &r.driver_keys {
                if !seen.insert(d.as_str()) {
                    return Err(Error::Format(format!(
                        "collision `{}` lists driver `{d}` twice",
                        r.collision_id
                    )));
                }
            }
        }
        Ok(CollisionDataset { records })
    }

    pub fn records(&self) -> &[CollisionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct driver keys in order of first appearance.
    pub fn driver_keys(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.records
            .iter()
            .flat_map(|r| r.driver_keys.iter())
            .filter(|k| seen.insert(k.as_str()))
            .map(String::as_str)
            .collect()
    }

    /// Writes the dataset in the ingestion CSV format, one row per driver.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            let date = r.occurred_on.map(|d| d.format("%Y-%m-%d").to_string()).unwrap_or_default();
            for d in &r.driver_keys {
                w.write_record([r.collision_id.as_str(), d.as_str(), "", date.as_str()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Rows that did not make it into the dataset, by reason.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipReport {
    pub rows_read: usize,
    pub missing_driver: usize,
    pub malformed: usize,
    pub duplicate_pairs: usize,
    /// Rows whose date disagrees with an earlier row of the same collision;
    /// the first date is kept.
    pub conflicting_dates: usize,
}

impl SkipReport {
    pub fn skipped(&self) -> usize {
        self.missing_driver + self.malformed + self.duplicate_pairs
    }
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

/// Opens a collision file; errors name the path.
pub fn open_input(path: &std::path::Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Parses the collision CSV, aggregating rows by collision id.
pub fn parse_collisions<R: Read>(source: R) -> Result<(CollisionDataset, SkipReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows = reader.records();
    let mut skips = SkipReport::default();

    match rows.next() {
        None => return Ok((CollisionDataset::default(), skips)),
        Some(header) => {
            let header = header.map_err(csv_to_error)?;
            let names: Vec<&str> = header.iter().map(str::trim).collect();
            let expected = CSV_HEADER.to_vec();
            let names = match names.first() {
                Some(first) if first.starts_with('\u{feff}') => {
                    let mut n = names.clone();
                    n[0] = first.trim_start_matches('\u{feff}');
                    n
                }
                _ => names,
            };
            if names != expected {
                return Err(Error::Format(format!(
                    "expected header `{}`, found `{}`",
                    CSV_HEADER.join(","),
                    names.join(",")
                )));
            }
        }
    }

    let mut records: Vec<CollisionRecord> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for row in rows {
        let row = match row {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(csv_to_error(e)),
            Err(_) => {
                skips.rows_read += 1;
                skips.malformed += 1;
                continue;
            }
        };
        skips.rows_read += 1;
        if row.len() != CSV_HEADER.len() {
            skips.malformed += 1;
            continue;
        }
        let collision_id = row[0].trim();
        let driver = row[1].trim();
        let date_field = row[3].trim();
        if collision_id.is_empty() {
            skips.malformed += 1;
            continue;
        }
        let date = if date_field.is_empty() {
            None
        } else {
            match parse_date(date_field) {
                Some(d) => Some(d),
                None => {
                    skips.malformed += 1;
                    continue;
                }
            }
        };
        if driver.is_empty() {
            skips.missing_driver += 1;
            continue;
        }
        let idx = *by_id.entry(collision_id.to_owned()).or_insert_with(|| {
            records.push(CollisionRecord {
                collision_id: collision_id.to_owned(),
                driver_keys: Vec::new(),
                occurred_on: None,
            });
            records.len() - 1
        });
        let rec = &mut records[idx];
        if rec.driver_keys.iter().any(|d| d == driver) {
            skips.duplicate_pairs += 1;
            continue;
        }
        rec.driver_keys.push(driver.to_owned());
        match (rec.occurred_on, date) {
            (None, Some(d)) => rec.occurred_on = Some(d),
            (Some(a), Some(b)) if a != b => skips.conflicting_dates += 1,
            _ => {}
        }
    }
    Ok((CollisionDataset { records }, skips))
}

fn csv_to_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Format(format!("{other:?}")),
        }
    } else {
        Error::Csv(e)
    }
}

/// Driver network with per-edge collision metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionNetwork {
    pub graph: UndirectedMultigraph,
    /// Source collision of each edge, indexed by edge id.
    pub edge_collision: Vec<String>,
    pub edge_date: Vec<Option<NaiveDate>>,
}

impl CollisionNetwork {
    pub fn empty() -> Self {
        CollisionNetwork {
            graph: UndirectedMultigraph::empty(),
            edge_collision: Vec::new(),
            edge_date: Vec::new(),
        }
    }

    pub fn collision_of(&self, e: EdgeId) -> &str {
        &self.edge_collision[e.index()]
    }

    /// The 2-core of the network with edge metadata carried over.
    pub fn prune(&self) -> (CollisionNetwork, PrunedGraph) {
        let pruned = prune_to_cycle_core(&self.graph);
        let network = CollisionNetwork {
            graph: pruned.graph.clone(),
            edge_collision: pruned
                .edge_origin
                .iter()
                .map(|e| self.edge_collision[e.index()].clone())
                .collect(),
            edge_date: pruned.edge_origin.iter().map(|e| self.edge_date[e.index()]).collect(),
        };
        (network, pruned)
    }
}

/// One node per driver and, for every collision with `k` drivers, one edge
/// per unordered driver pair.
pub fn build_collision_network(ds: &CollisionDataset) -> Result<CollisionNetwork> {
    let mut builder = GraphBuilder::new();
    let mut edge_collision = Vec::new();
    let mut edge_date = Vec::new();
    for r in ds.records() {
        let ids: Vec<NodeId> = r.driver_keys.iter().map(|k| builder.add_node(k)).collect();
        for (i, &u) in ids.iter().enumerate() {
            for &v in &ids[i + 1..] {
                builder.add_edge(u, v)?;
                edge_collision.push(r.collision_id.clone());
                edge_date.push(r.occurred_on);
            }
        }
    }
    Ok(CollisionNetwork {
        graph: builder.build(),
        edge_collision,
        edge_date,
    })
}

/// Pruned graph plus the ids its nodes and edges had in the source graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrunedGraph {
    pub graph: UndirectedMultigraph,
    pub node_origin: Vec<NodeId>,
    pub edge_origin: Vec<EdgeId>,
}

/// Repeatedly deletes nodes of degree 0 or 1 until none remain, leaving the
/// 2-core. Surviving nodes and edges keep their relative order.
pub fn prune_to_cycle_core(g: &UndirectedMultigraph) -> PrunedGraph {
    let n = g.node_count();
    let mut degree: Vec<usize> = g.nodes().map(|v| g.adjacent(v).len()).collect();
    let mut removed = vec![false; n];
    let mut stack: Vec<NodeId> = g.nodes().filter(|v| degree[v.index()] < 2).collect();
    for v in &stack {
        removed[v.index()] = true;
    }
    while let Some(u) = stack.pop() {
        for &(w, _) in g.adjacent(u) {
            if removed[w.index()] {
                continue;
            }
            degree[w.index()] -= 1;
            if degree[w.index()] < 2 {
                removed[w.index()] = true;
                stack.push(w);
            }
        }
    }

    let mut builder = GraphBuilder::new();
    let mut node_origin = Vec::new();
    let mut new_id = vec![None; n];
    for v in g.nodes().filter(|v| !removed[v.index()]) {
        new_id[v.index()] = Some(builder.add_node(g.key(v)));
        node_origin.push(v);
    }
    let mut edge_origin = Vec::new();
    for (e, u, v) in g.edges() {
        if let (Some(a), Some(b)) = (new_id[u.index()], new_id[v.index()]) {
            builder
                .add_edge(a, b)
                .expect("edges of a loop-free graph stay loop-free");
            edge_origin.push(e);
        }
    }
    PrunedGraph {
        graph: builder.build(),
        node_origin,
        edge_origin,
    }
}
