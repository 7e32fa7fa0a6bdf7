//! Command implementations and the append-only results database.
//!
//! The database is a JSON-lines file with one [`DbRecord`] per line. The
//! first line for a key fixes its identity and provenance; later lines for
//! the same key may only add region references, flags, or a missing
//! stabilizer. Region files live in `<db>.regions/`, one H-representation
//! per (network, bound) named by a digest of the network key.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bounds::{sufficiency_report, BoundTag, BoundsError, RegionBundle};
use crate::enumerate::{canonical_edge_sets, complete_edge_set, enumerate, Enumerated, Mode};
use crate::minimality::is_minimal;
use crate::model::{Label, ModelError, Network};
use crate::operators::{
    closure, combine, combine_region, embed, embed_region, ClosureConfig, ClosureError,
    ClosureResult, CombineKind, EmbedKind, OperatorError, Pairing, Provenance,
};
use crate::polyhedra::{Cone, PolyError};
use crate::symmetry::{canonicalize, Permutation};

/// Candidates between checkpoints of a long enumeration.
pub const CHECKPOINT_EVERY: usize = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("refused: {0}")]
    Cap(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl CliError {
    /// 2 for a refusal on size caps, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Cap(_) => 2,
            CliError::Bounds(BoundsError::Cap { .. } | BoundsError::GroundTooSmall { .. }) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where a record came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RecordSource {
    Enumerated {
        mode: Mode,
    },
    Operator(Provenance),
    /// Supplied directly by the user.
    Input,
}

impl RecordSource {
    fn label(&self) -> &str {
        match self {
            RecordSource::Enumerated { .. } => "enumerated",
            RecordSource::Operator(p) => &p.op_kind,
            RecordSource::Input => "input",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbRecord {
    /// Rendered canonical network.
    pub key: String,
    pub k: u32,
    pub l: u32,
    /// Stabilizer elements as label images.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stabilizer: Vec<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_size: Option<u64>,
    /// Region file per bound, relative to the database directory.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub regions: BTreeMap<BoundTag, String>,
    /// Whether each bound equals the outer bound.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub flags: BTreeMap<BoundTag, bool>,
    pub provenance: RecordSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl DbRecord {
    pub fn new(net: &Network, provenance: RecordSource) -> DbRecord {
        DbRecord {
            key: net.render(),
            k: net.k(),
            l: net.l(),
            stabilizer: Vec::new(),
            orbit_size: None,
            regions: BTreeMap::new(),
            flags: BTreeMap::new(),
            provenance,
            millis: None,
        }
    }

    pub fn enumerated(e: &Enumerated, mode: Mode) -> DbRecord {
        let mut r = DbRecord::new(&e.network, RecordSource::Enumerated { mode });
        r.stabilizer = e
            .stabilizer
            .iter()
            .map(|p| images(p, e.network.n()))
            .collect();
        r.orbit_size = Some(e.orbit_size);
        r
    }

    pub fn network(&self) -> Result<Network, ModelError> {
        Network::parse(&self.key)
    }

    /// Folds the additions of a later line into this record. Returns
    /// whether anything changed.
    fn absorb(&mut self, later: &DbRecord) -> bool {
        let mut changed = false;
        if self.stabilizer.is_empty() && !later.stabilizer.is_empty() {
            self.stabilizer = later.stabilizer.clone();
            changed = true;
        }
        if self.orbit_size.is_none() && later.orbit_size.is_some() {
            self.orbit_size = later.orbit_size;
            changed = true;
        }
        for (t, f) in &later.regions {
            if !self.regions.contains_key(t) {
                self.regions.insert(*t, f.clone());
                changed = true;
            }
        }
        for (t, f) in &later.flags {
            if !self.flags.contains_key(t) {
                self.flags.insert(*t, *f);
                changed = true;
            }
        }
        changed
    }
}

fn images(p: &Permutation, n: u32) -> Vec<Label> {
    (1..=n).map(|x| p.image(x)).collect()
}

/// Record filter; empty fields match everything.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Filter {
    pub key: Option<String>,
    pub size: Option<(u32, u32)>,
    pub flags: Vec<(BoundTag, bool)>,
    /// `enumerated`, `input`, or an operator kind such as `edge-merge`.
    pub provenance: Option<String>,
}

impl Filter {
    pub fn matches(&self, r: &DbRecord) -> bool {
        self.key.as_ref().is_none_or(|k| k == &r.key)
            && self.size.is_none_or(|s| s == (r.k, r.l))
            && self.flags.iter().all(|(t, v)| r.flags.get(t) == Some(v))
            && self
                .provenance
                .as_ref()
                .is_none_or(|p| p == r.provenance.label())
    }
}

/// Parses `tag=true` or `tag=false`.
pub fn parse_flag(s: &str) -> Result<(BoundTag, bool), CliError> {
    let (t, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("flag filter {s:?} needs tag=bool")))?;
    let v = v
        .parse()
        .map_err(|_| CliError::Usage(format!("flag filter {s:?} needs tag=bool")))?;
    Ok((t.parse()?, v))
}

/// An opened database.
#[derive(Debug)]
pub struct Db {
    path: PathBuf,
    records: BTreeMap<String, DbRecord>,
    /// Unparseable lines seen while loading.
    pub skipped: usize,
}

impl Db {
    /// Loads the file, or starts empty if it does not exist.
    pub fn open(path: &Path) -> Result<Db, CliError> {
        let mut db = Db {
            path: path.to_path_buf(),
            records: BTreeMap::new(),
            skipped: 0,
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(db),
            Err(e) => return Err(io_err(path)(e)),
        };
        for line in BufReader::new(file).lines() {
            let line = line.map_err(io_err(path))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<DbRecord>(&line) {
                Ok(r) => match db.records.get_mut(&r.key) {
                    Some(first) => {
                        first.absorb(&r);
                    }
                    None => {
                        db.records.insert(r.key.clone(), r);
                    }
                },
                Err(_) => db.skipped += 1,
            }
        }
        Ok(db)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&DbRecord> {
        self.records.get(key)
    }

    /// Records in key order.
    pub fn records(&self) -> impl Iterator<Item = &DbRecord> {
        self.records.values()
    }

    /// Appends a record. A record whose key is present is written only if
    /// it adds something. Returns whether a line was written.
    pub fn append(&mut self, rec: DbRecord) -> Result<bool, CliError> {
        let written = match self.records.get_mut(&rec.key) {
            Some(first) => first.absorb(&rec),
            None => {
                self.records.insert(rec.key.clone(), rec.clone());
                true
            }
        };
        if written {
            if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&self.path)
                .map_err(io_err(&self.path))?;
            let line = serde_json::to_string(&rec).map_err(|source| CliError::Json {
                path: self.path.clone(),
                source,
            })?;
            writeln!(f, "{line}").map_err(io_err(&self.path))?;
        }
        Ok(written)
    }

    pub fn query(&self, filter: &Filter) -> Vec<&DbRecord> {
        self.records
            .values()
            .filter(|r| filter.matches(r))
            .collect()
    }

    fn region_dir(&self) -> PathBuf {
        let mut name = self.path.file_name().unwrap_or_default().to_os_string();
        name.push(".regions");
        self.path.with_file_name(name)
    }

    /// Writes a region file and returns its path relative to the database
    /// directory.
    pub fn write_region(&self, key: &str, tag: BoundTag, cone: &Cone) -> Result<String, CliError> {
        let dir = self.region_dir();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let digest = Sha256::digest(key.as_bytes());
        let stem: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        let file = dir.join(format!("{stem}.{tag}.hrep"));
        fs::write(&file, cone.render_hrep()).map_err(io_err(&file))?;
        let rel = format!(
            "{}/{}",
            dir.file_name().unwrap_or_default().to_string_lossy(),
            file.file_name().unwrap_or_default().to_string_lossy()
        );
        Ok(rel)
    }

    pub fn read_region(&self, rel: &str) -> Result<Cone, CliError> {
        let file = self.path.with_file_name(rel);
        let text = fs::read_to_string(&file).map_err(io_err(&file))?;
        Ok(Cone::parse_hrep(&text)?)
    }
}

/// Reads a network from a file path, or parses the argument itself as
/// network text (which is also the database key format).
pub fn resolve_network(arg: &str) -> Result<Network, CliError> {
    let path = Path::new(arg);
    if !arg.trim_start().starts_with('{') && path.exists() {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        return Ok(Network::parse(&text)?);
    }
    Ok(Network::parse(arg)?)
}

/// Refuses enumerations beyond desk scale. General mode allows K + L ≤ 4
/// and the (4,1) and (1,4) classes; (2,3) and (3,2) need `long_run`.
/// IDSC allows K ≤ 3 and L ≤ 3.
pub fn check_enumerate_caps(k: u32, l: u32, mode: Mode, long_run: bool) -> Result<(), CliError> {
    if k == 0 || l == 0 {
        return Err(CliError::Usage("K and L must be positive".into()));
    }
    let ok = match mode {
        Mode::Idsc => k <= 3 && l <= 3,
        Mode::General => k + l <= 4 || (k + l == 5 && (k == 1 || l == 1 || long_run)),
    };
    if ok {
        Ok(())
    } else {
        let hint = if mode == Mode::General && k + l == 5 {
            " without --long-run"
        } else {
            ""
        };
        Err(CliError::Cap(format!(
            "({k},{l}) {mode:?} enumeration is beyond the size caps{hint}"
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateSummary {
    pub k: u32,
    pub l: u32,
    pub mode: Mode,
    pub networks: usize,
    pub orbit_sum: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    k: u32,
    l: u32,
    mode: Mode,
    /// Index of the first edge set not yet completed.
    next: usize,
    networks: usize,
    orbit_sum: u64,
}

fn read_checkpoint(path: &Path) -> Result<Option<Checkpoint>, CliError> {
    match fs::read_to_string(path) {
        Ok(t) => Ok(Some(serde_json::from_str(&t).map_err(|source| {
            CliError::Json {
                path: path.to_path_buf(),
                source,
            }
        })?)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_err(path)(e)),
    }
}

/// Enumerates canonical minimal networks, handing each record to `emit`.
///
/// With `checkpoint`, work proceeds in edge-set batches and the file is
/// rewritten once at least [`CHECKPOINT_EVERY`] candidates have been
/// emitted since the last write; a rerun resumes after the last completed
/// batch. The file is removed on completion.
pub fn cmd_enumerate(
    k: u32,
    l: u32,
    mode: Mode,
    long_run: bool,
    checkpoint: Option<&Path>,
    emit: &mut dyn FnMut(DbRecord) -> Result<(), CliError>,
) -> Result<EnumerateSummary, CliError> {
    check_enumerate_caps(k, l, mode, long_run)?;
    let mut summary = EnumerateSummary {
        k,
        l,
        mode,
        networks: 0,
        orbit_sum: 0,
    };
    let Some(ck) = checkpoint else {
        for e in enumerate(k, l, mode) {
            summary.networks += 1;
            summary.orbit_sum += e.orbit_size;
            emit(DbRecord::enumerated(&e, mode))?;
        }
        return Ok(summary);
    };
    let sets = canonical_edge_sets(k, l, mode);
    let mut next = 0;
    if let Some(c) = read_checkpoint(ck)? {
        if (c.k, c.l, c.mode) != (k, l, mode) {
            return Err(CliError::Usage(format!(
                "checkpoint {} belongs to ({},{}) {:?}",
                ck.display(),
                c.k,
                c.l,
                c.mode
            )));
        }
        next = c.next;
        summary.networks = c.networks;
        summary.orbit_sum = c.orbit_sum;
    }
    let batch = rayon::current_num_threads() * 8;
    let mut since = 0;
    while next < sets.len() {
        let end = (next + batch).min(sets.len());
        let found: Vec<Vec<Enumerated>> = sets[next..end]
            .par_iter()
            .map(|(q, stab)| complete_edge_set(k, l, q, stab, mode))
            .collect();
        for e in found.into_iter().flatten() {
            summary.networks += 1;
            summary.orbit_sum += e.orbit_size;
            since += 1;
            emit(DbRecord::enumerated(&e, mode))?;
        }
        next = end;
        if since >= CHECKPOINT_EVERY {
            since = 0;
            let c = Checkpoint {
                k,
                l,
                mode,
                next,
                networks: summary.networks,
                orbit_sum: summary.orbit_sum,
            };
            let text = serde_json::to_string(&c).map_err(|source| CliError::Json {
                path: ck.to_path_buf(),
                source,
            })?;
            fs::write(ck, text).map_err(io_err(ck))?;
        }
    }
    if ck.exists() {
        fs::remove_file(ck).map_err(io_err(ck))?;
    }
    Ok(summary)
}

/// Computes the requested bounds for the canonical form of `net`, storing
/// region files and flags when a database is given.
pub fn cmd_region(
    net: &Network,
    tags: &[BoundTag],
    db: Option<&mut Db>,
) -> Result<RegionBundle, CliError> {
    if !is_minimal(net) {
        return Err(BoundsError::NotMinimal.into());
    }
    let (canon, _) = canonicalize(net);
    let start = Instant::now();
    let bundle = sufficiency_report(&canon, tags)?;
    if let Some(db) = db {
        let mut rec = DbRecord::new(&canon, RecordSource::Input);
        rec.millis = Some(start.elapsed().as_millis() as u64);
        rec.regions.insert(
            BoundTag::Outer,
            db.write_region(&rec.key, BoundTag::Outer, &bundle.outer)?,
        );
        for (t, c) in &bundle.bounds {
            rec.regions.insert(*t, db.write_region(&rec.key, *t, c)?);
        }
        rec.flags = bundle.sufficient.clone();
        db.append(rec)?;
    }
    Ok(bundle)
}

/// Per-bound counts of networks whose bound equals the outer bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepTally {
    pub k: u32,
    pub l: u32,
    pub networks: usize,
    pub matches: BTreeMap<BoundTag, usize>,
    /// One flag record per network, in key order.
    pub records: Vec<DbRecord>,
}

impl SweepTally {
    /// A two-line table: header, then counts.
    pub fn table(&self) -> String {
        let mut head = format!("{:<8}{:>10}", "(K,L)", "networks");
        let mut row = format!(
            "{:<8}{:>10}",
            format!("({},{})", self.k, self.l),
            self.networks
        );
        for (t, m) in &self.matches {
            let w = t.to_string().len().max(6) + 2;
            let _ = write!(head, "{:>w$}", t.to_string());
            let _ = write!(row, "{m:>w$}");
        }
        format!("{head}\n{row}\n")
    }
}

/// Bound tags with a `+n` ground size resolved against `n`: `vector-2+1`
/// means `N + 1` ground elements.
pub fn resolve_tag(text: &str, n: u32) -> Result<BoundTag, CliError> {
    if let Some(rest) = text.strip_prefix("vector-") {
        if let Some((f, extra)) = rest.split_once('+') {
            let field = f
                .parse()
                .map_err(|_| CliError::Usage(format!("bad tag {text:?}")))?;
            let extra: u32 = extra
                .parse()
                .map_err(|_| CliError::Usage(format!("bad tag {text:?}")))?;
            return Ok(BoundTag::Vector {
                field,
                ground: n + extra,
            });
        }
    }
    Ok(text.parse()?)
}

/// Enumerates the (K, L) class and checks every requested bound against
/// the outer bound on each network.
pub fn cmd_sweep(
    k: u32,
    l: u32,
    tags: &[BoundTag],
    long_run: bool,
) -> Result<SweepTally, CliError> {
    check_enumerate_caps(k, l, Mode::General, long_run)?;
    let nets = enumerate(k, l, Mode::General);
    let results: Vec<Result<DbRecord, CliError>> = nets
        .par_iter()
        .map(|e| {
            let start = Instant::now();
            let b = sufficiency_report(&e.network, tags)?;
            let mut rec = DbRecord::enumerated(e, Mode::General);
            rec.flags = b.sufficient;
            rec.millis = Some(start.elapsed().as_millis() as u64);
            Ok(rec)
        })
        .collect();
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut matches: BTreeMap<BoundTag, usize> = tags.iter().map(|t| (*t, 0)).collect();
    for r in &records {
        for (t, f) in &r.flags {
            if *f {
                *matches.entry(*t).or_default() += 1;
            }
        }
    }
    Ok(SweepTally {
        k,
        l,
        networks: records.len(),
        matches,
        records,
    })
}

/// An operator and its arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operation {
    Embed { kind: EmbedKind, target: Label },
    Combine(Pairing),
}

/// Parses an operator name. Accepts `merge-edges` style aliases for the
/// combination kinds.
pub fn parse_operation(
    name: &str,
    pairs: &[(u32, u32)],
    target: Option<Label>,
) -> Result<Operation, CliError> {
    let embed = |kind| {
        target
            .map(|t| Operation::Embed { kind, target: t })
            .ok_or_else(|| CliError::Usage(format!("{name} needs a target label")))
    };
    let combine = |kind| {
        if pairs.is_empty() {
            Err(CliError::Usage(format!("{name} needs at least one pair")))
        } else {
            Ok(Operation::Combine(Pairing {
                kind,
                pairs: pairs.to_vec(),
            }))
        }
    };
    match name {
        "source-delete" | "delete-source" => embed(EmbedKind::SourceDelete),
        "edge-contract" | "contract-edge" => embed(EmbedKind::EdgeContract),
        "edge-delete" | "delete-edge" => embed(EmbedKind::EdgeDelete),
        "source-merge" | "merge-sources" => combine(CombineKind::SourceMerge),
        "sink-merge" | "merge-sinks" => combine(CombineKind::SinkMerge),
        "node-merge" | "merge-nodes" => combine(CombineKind::NodeMerge),
        "edge-merge" | "merge-edges" => combine(CombineKind::EdgeMerge),
        _ => Err(CliError::Usage(format!("unknown operation {name:?}"))),
    }
}

/// Parses `a:b,c:d` pair lists.
pub fn parse_pairs(text: &str) -> Result<Vec<(u32, u32)>, CliError> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("pair {p:?} needs a:b")))?;
            let n = |s: &str| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| CliError::Usage(format!("bad pair {p:?}")))
            };
            Ok((n(a)?, n(b)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperateOutcome {
    /// Canonical minimal parts of the result.
    pub results: Vec<Network>,
    /// Transferred outer bounds, when the operands' outer bounds were in
    /// the database.
    pub outer: Option<Vec<Cone>>,
}

fn stored_outer(db: &Db, net: &Network) -> Result<Option<Cone>, CliError> {
    match db
        .get(&net.render())
        .and_then(|r| r.regions.get(&BoundTag::Outer))
    {
        Some(rel) => Ok(Some(db.read_region(rel)?)),
        None => Ok(None),
    }
}

/// Applies one operator. Results are appended to the database with their
/// provenance, together with transferred outer bounds when available.
pub fn cmd_operate(
    op: &Operation,
    left: &Network,
    right: Option<&Network>,
    db: Option<&mut Db>,
) -> Result<OperateOutcome, CliError> {
    let (parts, outer, provenance) = match op {
        Operation::Embed { kind, target } => {
            let step = embed(left, *kind, *target)?;
            let outer = match db.as_deref() {
                Some(db) => match stored_outer(db, left)? {
                    Some(c) => Some(embed_region(&step, &c, BoundTag::Outer)?.regions),
                    None => None,
                },
                None => None,
            };
            let prov = |key: String| Provenance {
                result_key: key,
                op_kind: kind.to_string(),
                operand_keys: vec![left.render()],
                pairing: vec![(*target, 0)],
            };
            (
                step.post.into_iter().map(|p| p.network).collect::<Vec<_>>(),
                outer,
                Box::new(prov) as Box<dyn Fn(String) -> Provenance>,
            )
        }
        Operation::Combine(pairing) => {
            let right =
                right.ok_or_else(|| CliError::Usage("combination needs two operands".into()))?;
            let step = combine(left, right, pairing)?;
            let outer = match db.as_deref() {
                Some(db) => match (stored_outer(db, left)?, stored_outer(db, right)?) {
                    (Some(a), Some(b)) => Some(combine_region(&step, &a, &b)?),
                    _ => None,
                },
                None => None,
            };
            let keys = vec![left.render(), right.render()];
            let pairing = pairing.clone();
            let prov = move |key: String| Provenance {
                result_key: key,
                op_kind: pairing.kind.to_string(),
                operand_keys: keys.clone(),
                pairing: pairing.pairs.clone(),
            };
            (
                step.result.into_iter().map(|p| p.network).collect(),
                outer,
                Box::new(prov) as Box<dyn Fn(String) -> Provenance>,
            )
        }
    };
    if let Some(db) = db {
        for (i, n) in parts.iter().enumerate() {
            let mut rec = DbRecord::new(n, RecordSource::Operator(provenance(n.render())));
            if let Some(cones) = &outer {
                rec.regions.insert(
                    BoundTag::Outer,
                    db.write_region(&rec.key, BoundTag::Outer, &cones[i])?,
                );
            }
            db.append(rec)?;
        }
    }
    Ok(OperateOutcome {
        results: parts,
        outer,
    })
}

/// Reads a closure configuration from JSON.
pub fn read_closure_config(path: &Path) -> Result<ClosureConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a closure; appends new networks to the database and, if given,
/// writes provenance JSON-lines.
pub fn cmd_closure(
    config: &ClosureConfig,
    db: Option<&mut Db>,
    provenance: Option<&Path>,
) -> Result<ClosureResult, CliError> {
    let result = closure(config)?;
    if let Some(db) = db {
        for (n, p) in result.networks.values() {
            let src = if p.op_kind == "seed" {
                RecordSource::Input
            } else {
                RecordSource::Operator(p.clone())
            };
            db.append(DbRecord::new(n, src))?;
        }
    }
    if let Some(path) = provenance {
        let mut out = String::new();
        for (_, p) in result.networks.values() {
            let line = serde_json::to_string(p).map_err(|source| CliError::Json {
                path: path.to_path_buf(),
                source,
            })?;
            out.push_str(&line);
            out.push('\n');
        }
        fs::write(path, out).map_err(io_err(path))?;
    }
    Ok(result)
}

/// Per-generation and per-size counts of a closure.
pub fn closure_report(r: &ClosureResult) -> String {
    let mut s = String::new();
    for (i, g) in r.generations.iter().enumerate() {
        let _ = writeln!(s, "generation {i}: {g} added");
    }
    let mut sizes: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (n, _) in r.networks.values() {
        *sizes.entry((n.k(), n.l())).or_default() += 1;
    }
    for ((k, l), c) in sizes {
        let _ = writeln!(s, "({k},{l}) {c}");
    }
    let _ = writeln!(
        s,
        "new {} total {} converged {}",
        r.new_networks(),
        r.networks.len(),
        r.converged
    );
    s
}

pub fn cmd_query<'a>(db: &'a Db, filter: &Filter) -> Vec<&'a DbRecord> {
    db.query(filter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("netcode-db-{}-{name}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir.join("db.jsonl")
    }

    fn net11() -> Network {
        Network::new(1, 1, [(2, vec![1])], [(1, vec![2])])
    }

    #[test]
    fn append_then_query() {
        let p = tmp("aq");
        let mut db = Db::open(&p).unwrap();
        let rec = DbRecord::new(&net11(), RecordSource::Input);
        assert!(db.append(rec.clone()).unwrap());
        assert!(!db.append(rec.clone()).unwrap());
        let db = Db::open(&p).unwrap();
        assert_eq!(db.len(), 1);
        let f = Filter {
            key: Some(rec.key.clone()),
            ..Filter::default()
        };
        assert_eq!(db.query(&f), vec![&rec]);
    }

    #[test]
    fn corrupt_lines_are_counted() {
        let p = tmp("corrupt");
        let line = serde_json::to_string(&DbRecord::new(&net11(), RecordSource::Input)).unwrap();
        fs::write(&p, format!("{line}\nnot json\n{{\"key\":1}}\n")).unwrap();
        let db = Db::open(&p).unwrap();
        assert_eq!((db.len(), db.skipped), (1, 2));
    }

    #[test]
    fn later_lines_add_flags() {
        let p = tmp("flags");
        let mut db = Db::open(&p).unwrap();
        let mut rec = DbRecord::new(&net11(), RecordSource::Input);
        db.append(rec.clone()).unwrap();
        rec.flags.insert(BoundTag::Scalar { field: 2 }, true);
        assert!(db.append(rec).unwrap());
        let db = Db::open(&p).unwrap();
        let f = Filter {
            flags: vec![(BoundTag::Scalar { field: 2 }, true)],
            ..Filter::default()
        };
        assert_eq!(db.query(&f).len(), 1);
    }

    #[test]
    fn caps() {
        assert!(check_enumerate_caps(4, 1, Mode::General, false).is_ok());
        assert_eq!(
            check_enumerate_caps(2, 3, Mode::General, false)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert!(check_enumerate_caps(2, 3, Mode::General, true).is_ok());
        assert_eq!(
            check_enumerate_caps(4, 3, Mode::Idsc, true)
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn relative_tags() {
        assert_eq!(
            resolve_tag("vector-2+2", 4).unwrap(),
            BoundTag::Vector {
                field: 2,
                ground: 6
            }
        );
        assert_eq!(
            resolve_tag("scalar-2", 4).unwrap(),
            BoundTag::Scalar { field: 2 }
        );
        assert!(resolve_tag("bogus", 4).is_err());
    }

    #[test]
    fn operation_names() {
        let op = parse_operation("merge-edges", &[(2, 2)], None).unwrap();
        assert_eq!(
            op,
            Operation::Combine(Pairing {
                kind: CombineKind::EdgeMerge,
                pairs: vec![(2, 2)]
            })
        );
        assert!(parse_operation("edge-delete", &[], None).is_err());
        assert_eq!(parse_pairs("1:2,3:4").unwrap(), vec![(1, 2), (3, 4)]);
    }
}
