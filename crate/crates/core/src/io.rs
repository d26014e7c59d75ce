//! File formats: graph JSON, plan CSV, ensemble JSONL, and run manifests.
//!
//! Graph schema:
//!
//! ```json
//! {
//!   "vertices": [
//!     {"id": "w1", "pop": 120, "votes": {"SEN18": {"A": 61, "B": 48}}}
//!   ],
//!   "edges": [["w1", "w2"]]
//! }
//! ```
//!
//! Plans are two-column CSV (`unit_id,district`, 1-based labels); ensembles
//! are one JSON record per line. All writes go through a temp file and a
//! rename, so readers never observe a partial file.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::election::Election;
use crate::ensemble::EnsembleRecord;
use crate::error::{Error, Result};
use crate::graph::{DualGraph, Plan, VertexId};
use crate::util::fnv1a64;

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<VertexEntry>,
    edges: Vec<(String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexEntry {
    id: String,
    pop: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    votes: BTreeMap<String, PartyVotes>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PartyVotes {
    #[serde(rename = "A")]
    a: u64,
    #[serde(rename = "B")]
    b: u64,
}

fn schema_error(path: &Path, message: impl std::fmt::Display) -> Error {
    Error::Schema {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Loads and fully validates a dual graph: structure, connectivity, and
/// complete election coverage.
pub fn load_graph(path: impl AsRef<Path>) -> Result<DualGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let parsed: GraphFile =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| schema_error(path, e))?;

    let vertices: Vec<(String, u64)> = parsed
        .vertices
        .iter()
        .map(|v| (v.id.clone(), v.pop))
        .collect();
    let mut graph = DualGraph::new(vertices, parsed.edges)?;

    // any election mentioned on one vertex must cover all of them
    let names: BTreeSet<&String> = parsed
        .vertices
        .iter()
        .flat_map(|v| v.votes.keys())
        .collect();
    for name in names {
        let mut a = Vec::with_capacity(parsed.vertices.len());
        let mut b = Vec::with_capacity(parsed.vertices.len());
        for entry in &parsed.vertices {
            let votes = entry
                .votes
                .get(name)
                .ok_or_else(|| Error::IncompleteElection {
                    election: name.clone(),
                    vertex: entry.id.clone(),
                })?;
            a.push(votes.a);
            b.push(votes.b);
        }
        graph.add_election(Election::new(name.clone(), a, b))?;
    }
    Ok(graph)
}

/// Writes a graph in the JSON schema accepted by [`load_graph`].
pub fn save_graph(graph: &DualGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let vertices: Vec<VertexEntry> = graph
        .vertices()
        .map(|v| {
            let votes: BTreeMap<String, PartyVotes> = graph
                .elections()
                .map(|e| {
                    let (a, b) = e.votes(v);
                    (e.name().to_string(), PartyVotes { a, b })
                })
                .collect();
            VertexEntry {
                id: graph.vertex_name(v).to_string(),
                pop: graph.population(v),
                votes,
            }
        })
        .collect();
    let edges: Vec<(String, String)> = graph
        .edges()
        .map(|(a, b)| {
            (
                graph.vertex_name(a).to_string(),
                graph.vertex_name(b).to_string(),
            )
        })
        .collect();
    let file = GraphFile { vertices, edges };
    atomic_write(path, |w| {
        serde_json::to_writer_pretty(&mut *w, &file)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

/// Loads a plan CSV against a graph. District labels may have gaps; they are
/// relabeled densely (ascending numeric order) and the relabeling is
/// reported as a warning string.
pub fn load_plan(path: impl AsRef<Path>, graph: &DualGraph) -> Result<(Plan, Vec<String>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));

    let n = graph.num_vertices();
    let mut raw: Vec<Option<u64>> = vec![None; n];
    for (line, row) in reader.deserialize::<(String, u64)>().enumerate() {
        let (unit, label) = row.map_err(|e| schema_error(path, e))?;
        let v = graph
            .vertex_id(&unit)
            .ok_or(Error::UnknownVertex { id: unit.clone() })?;
        if raw[v.index()].is_some() {
            return Err(schema_error(
                path,
                format!("unit {unit:?} assigned twice (record {})", line + 1),
            ));
        }
        raw[v.index()] = Some(label);
    }

    let mut assignment_labels = Vec::with_capacity(n);
    for (i, slot) in raw.iter().enumerate() {
        match slot {
            Some(label) => assignment_labels.push(*label),
            None => {
                return Err(Error::UnassignedVertex {
                    id: graph.vertex_name(VertexId(i as u32)).to_string(),
                })
            }
        }
    }

    let labels: BTreeSet<u64> = assignment_labels.iter().copied().collect();
    let dense: BTreeMap<u64, u32> = labels
        .iter()
        .enumerate()
        .map(|(i, &label)| (label, i as u32))
        .collect();
    let mut warnings = Vec::new();
    let contiguous_1_based = labels
        .iter()
        .enumerate()
        .all(|(i, &label)| label == i as u64 + 1);
    if !contiguous_1_based {
        warnings.push(format!(
            "district labels {:?} relabeled densely to 1..{}",
            labels.iter().collect::<Vec<_>>(),
            labels.len()
        ));
    }
    let assignment: Vec<u32> = assignment_labels.iter().map(|l| dense[l]).collect();
    let plan = Plan::from_assignment(assignment, labels.len() as u32)?;
    Ok((plan, warnings))
}

/// Writes a plan as two-column CSV with 1-based labels, in vertex order.
pub fn save_plan(plan: &Plan, graph: &DualGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if plan.num_vertices() != graph.num_vertices() {
        return Err(Error::PlanGraphMismatch {
            expected: graph.num_vertices(),
            actual: plan.num_vertices(),
        });
    }
    atomic_write(path, |w| {
        writeln!(w, "unit_id,district")?;
        for (v, d) in plan.assignments() {
            writeln!(w, "{},{}", graph.vertex_name(v), d.label())?;
        }
        Ok(())
    })
}

/// Streams ensemble records to a JSONL file. The whole run must succeed for
/// the file to appear.
pub fn write_ensemble(
    path: impl AsRef<Path>,
    records: impl Iterator<Item = Result<EnsembleRecord>>,
) -> Result<u64> {
    let path = path.as_ref();
    let mut count = 0u64;
    let mut failure = None;
    atomic_write(path, |w| {
        for record in records {
            match record {
                Ok(r) => {
                    serde_json::to_writer(&mut *w, &r)?;
                    w.write_all(b"\n")?;
                    count += 1;
                }
                Err(e) => {
                    failure = Some(e);
                    return Err(std::io::Error::other("chain failed"));
                }
            }
        }
        Ok(())
    })
    .map_err(|e| failure.take().unwrap_or(e))?;
    Ok(count)
}

/// Reads a JSONL ensemble file back into memory.
pub fn read_ensemble(path: impl AsRef<Path>) -> Result<Vec<EnsembleRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EnsembleRecord = serde_json::from_str(&line)
            .map_err(|e| schema_error(path, format!("line {}: {e}", i + 1)))?;
        records.push(record);
    }
    Ok(records)
}

/// Reproducibility sidecar written next to every produced artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub digest: String,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> RunManifest {
        RunManifest {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            config,
            rng_seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn with_rng_seed(mut self, seed: u64) -> Self {
        self.rng_seed = Some(seed);
        self
    }

    pub fn record_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        self.inputs.push(FileDigest {
            path: path.as_ref().display().to_string(),
            digest: file_digest(&path)?,
        });
        Ok(())
    }

    pub fn record_output(&mut self, path: impl AsRef<Path>) {
        self.outputs.push(path.as_ref().display().to_string());
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        atomic_write(path.as_ref(), |w| {
            serde_json::to_writer_pretty(&mut *w, self)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }
}

/// Stable digest of a file's bytes, `fnv1a64:` prefixed.
pub fn file_digest(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    Ok(format!("fnv1a64:{:016x}", fnv1a64(&bytes)))
}

/// Conventional manifest location for an output file.
pub fn manifest_path(out: impl AsRef<Path>) -> PathBuf {
    let out = out.as_ref();
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Whole-file atomic write: stream to `<path>.tmp`, then rename.
fn atomic_write(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    let file = File::create(&tmp).map_err(|e| io_error(&tmp, e))?;
    let mut writer = BufWriter::new(file);
    let result = body(&mut writer).and_then(|()| writer.flush());
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(io_error(path, e));
    }
    std::fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}
