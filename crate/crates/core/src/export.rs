//! Files written for reviewers and external graph viewers.
//!
//! A run directory holds `ranked.csv`, `comparison.csv`, `report.json`,
//! `metadata.json` and, per suspicious component, `graphs/component-NNN.graphml`
//! and `graphs/component-NNN.dot`. A suspicious component is a connected
//! component of the pruned network holding one of the top ranked cycles; its
//! nodes on those cycles carry the member flag.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExportFormat;
use crate::cycles::{Cycle, CycleSet, CycleSource};
use crate::error::{Error, Result};
use crate::graph::{NodeId, UndirectedMultigraph};
use crate::ingest::CollisionNetwork;
use crate::pipeline::{PipelineOutput, RankedRow, RunMetadata, RunReport};
use crate::scoring::{cycle_label, CycleAssessment, ScoringContext};

pub const RANKED_HEADER: [&str; 7] = ["rank", "cycle_id", "n", "m", "density", "score", "node_external_keys"];
const KEY_SEPARATOR: char = '|';

/// Writes the full review list in ranked order.
pub fn write_ranked_csv<W: Write>(sink: W, ranked: &[CycleAssessment], ctx: &ScoringContext<'_>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(RANKED_HEADER)?;
    for (i, a) in ranked.iter().enumerate() {
        let row = RankedRow::new(i + 1, a, ctx);
        w.write_record([
            row.rank.to_string(),
            row.cycle_id.to_string(),
            row.n.to_string(),
            row.m.to_string(),
            format!("{:.6}", row.density),
            row.score.to_string(),
            row.node_external_keys,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct CycleRow {
    cycle_id: usize,
    n: usize,
    node_external_keys: String,
}

/// Writes cycles as `cycle_id,n,node_external_keys`, keys in ring order.
pub fn write_cycles_csv<W: Write>(sink: W, cycles: &CycleSet, g: &UndirectedMultigraph) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["cycle_id", "n", "node_external_keys"])?;
    for (id, c) in cycles.cycles().enumerate() {
        w.write_record([id.to_string(), c.len().to_string(), cycle_label(g, c.vertices())])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cycle file against `g`; every listed ring must be a simple cycle
/// of `g`.
pub fn read_cycles_csv<R: Read>(source: R, g: &UndirectedMultigraph) -> Result<Vec<Cycle>> {
    let mut reader = csv::Reader::from_reader(source);
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let row: CycleRow = row?;
        let ids: Vec<NodeId> = row
            .node_external_keys
            .split(KEY_SEPARATOR)
            .map(|k| g.node_by_key(k.trim()).ok_or_else(|| Error::UnknownKey(k.trim().to_owned())))
            .collect::<Result<_>>()?;
        let cycle = Cycle::new(ids, None, CycleSource::Imported);
        if cycle.len() != row.n || !cycle.is_simple_in(g) {
            return Err(Error::Format(format!("row {} is not a simple cycle of the graph", row.cycle_id)));
        }
        out.push(cycle);
    }
    Ok(out)
}

pub fn write_report_json<W: Write>(sink: W, report: &RunReport) -> Result<()> {
    serde_json::to_writer_pretty(sink, report)?;
    Ok(())
}

pub fn read_report_json<R: Read>(source: R) -> Result<RunReport> {
    Ok(serde_json::from_reader(source)?)
}

/// Connected components holding the given cycles, in order of first
/// appearance, each with a member flag per component node.
pub fn suspicious_components<'a>(
    g: &UndirectedMultigraph,
    cycles: impl IntoIterator<Item = &'a [NodeId]>,
) -> Vec<(Vec<NodeId>, Vec<bool>)> {
    let components = g.connected_components();
    let mut component_of = vec![usize::MAX; g.node_count()];
    for (i, comp) in components.iter().enumerate() {
        for v in comp {
            component_of[v.index()] = i;
        }
    }
    let mut picked: Vec<usize> = Vec::new();
    let mut member = vec![false; g.node_count()];
    for walk in cycles {
        let Some(first) = walk.first() else { continue };
        let c = component_of[first.index()];
        if !picked.contains(&c) {
            picked.push(c);
        }
        for v in walk {
            member[v.index()] = true;
        }
    }
    picked
        .into_iter()
        .map(|c| {
            let nodes = components[c].clone();
            let flags = nodes.iter().map(|v| member[v.index()]).collect();
            (nodes, flags)
        })
        .collect()
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// GraphML of the subgraph induced by `nodes`. Nodes carry `driver_key` and
/// `ring_member`; edges carry `collision_id` and, when known, `date`.
pub fn write_graphml<W: Write>(
    mut w: W,
    network: &CollisionNetwork,
    name: &str,
    nodes: &[NodeId],
    member: &[bool],
) -> Result<()> {
    let g = &network.graph;
    let sub = g.induced_subgraph(nodes)?;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(w, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(w, r#"  <key id="driver" for="node" attr.name="driver_key" attr.type="string"/>"#)?;
    writeln!(w, r#"  <key id="member" for="node" attr.name="ring_member" attr.type="boolean"/>"#)?;
    writeln!(w, r#"  <key id="collision" for="edge" attr.name="collision_id" attr.type="string"/>"#)?;
    writeln!(w, r#"  <key id="date" for="edge" attr.name="date" attr.type="string"/>"#)?;
    writeln!(w, r#"  <graph id="{}" edgedefault="undirected">"#, xml_escape(name))?;
    for (v, &flag) in nodes.iter().zip(member) {
        writeln!(
            w,
            r#"    <node id="n{}"><data key="driver">{}</data><data key="member">{}</data></node>"#,
            v.index(),
            xml_escape(g.key(*v)),
            flag
        )?;
    }
    for e in sub.edges {
        let (u, v) = g.endpoints(e).expect("induced edge exists");
        write!(
            w,
            r#"    <edge id="e{}" source="n{}" target="n{}"><data key="collision">{}</data>"#,
            e.index(),
            u.index(),
            v.index(),
            xml_escape(network.collision_of(e))
        )?;
        if let Some(d) = network.edge_date[e.index()] {
            write!(w, r#"<data key="date">{d}</data>"#)?;
        }
        writeln!(w, "</edge>")?;
    }
    writeln!(w, "  </graph>")?;
    writeln!(w, "</graphml>")?;
    Ok(())
}

/// DOT of the subgraph induced by `nodes`: one statement per node, one per
/// edge, nodes named by driver key.
pub fn write_dot<W: Write>(mut w: W, network: &CollisionNetwork, name: &str, nodes: &[NodeId], member: &[bool]) -> Result<()> {
    let g = &network.graph;
    let sub = g.induced_subgraph(nodes)?;
    writeln!(w, "graph {} {{", dot_quote(name))?;
    for (v, &flag) in nodes.iter().zip(member) {
        let style = if flag { ", style=filled, fillcolor=salmon" } else { "" };
        writeln!(w, "  {} [member={flag}{style}];", dot_quote(g.key(*v)))?;
    }
    for e in sub.edges {
        let (u, v) = g.endpoints(e).expect("induced edge exists");
        writeln!(
            w,
            "  {} -- {} [collision={}];",
            dot_quote(g.key(u)),
            dot_quote(g.key(v)),
            dot_quote(network.collision_of(e))
        )?;
    }
    writeln!(w, "}}")?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes every selected format into `dir` and returns the written paths.
pub fn export_all(out: &PipelineOutput, dir: &Path, formats: &[ExportFormat]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let ctx = out.context();
    if formats.contains(&ExportFormat::Csv) {
        let path = dir.join("ranked.csv");
        let mut w = create(&path)?;
        write_ranked_csv(&mut w, &out.ranked, &ctx)?;
        w.flush()?;
        written.push(path);
        if let Some(cmp) = &out.report.comparison {
            let path = dir.join("comparison.csv");
            let mut w = create(&path)?;
            cmp.write_pairs_csv(&mut w)?;
            w.flush()?;
            written.push(path);
        }
    }
    if formats.contains(&ExportFormat::Json) {
        let path = dir.join("report.json");
        let mut w = create(&path)?;
        write_report_json(&mut w, &out.report)?;
        w.flush()?;
        written.push(path);
    }
    let graphml = formats.contains(&ExportFormat::Graphml);
    let dot = formats.contains(&ExportFormat::Dot);
    if graphml || dot {
        let top = out.report.scoring.top.len();
        let walks = out.ranked.iter().take(top).map(|a| a.cycle_key.as_slice());
        let components = suspicious_components(&out.network.graph, walks);
        if !components.is_empty() {
            fs::create_dir_all(dir.join("graphs"))?;
        }
        for (i, (nodes, member)) in components.iter().enumerate() {
            let name = format!("component-{:03}", i + 1);
            if graphml {
                let path = dir.join("graphs").join(format!("{name}.graphml"));
                let mut w = create(&path)?;
                write_graphml(&mut w, &out.network, &name, nodes, member)?;
                w.flush()?;
                written.push(path);
            }
            if dot {
                let path = dir.join("graphs").join(format!("{name}.dot"));
                let mut w = create(&path)?;
                write_dot(&mut w, &out.network, &name, nodes, member)?;
                w.flush()?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

pub fn write_metadata(metadata: &RunMetadata, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("metadata.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, metadata)?;
    w.flush()?;
    Ok(path)
}
