//! File formats: instance JSON, sparsification bundles, traces, profiles
//! and the LP/MILP models.

mod instance;
pub mod lp;
mod mtx;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kron::KronPayoff;
use crate::skeleton::Player;
use crate::solver::{ConvergenceTrace, StrategyProfile, TracePoint};
use crate::sparsify::{Sparsification, Technique};

pub use instance::{
    instance_from_json, instance_to_json, read_instance, write_instance, BettingSpec, BeliefsSpec, DeckSpec,
    InstanceFile, SCHEMA_VERSION,
};
pub use lp::{build_lp, build_milp, lp_assignment, write_lp, write_milp, LpEvaluation, LpModel};
pub use mtx::{read_matrix_market, write_matrix_market};

const BUNDLE_FORMAT: &str = "riverkron-sparsification";
const BUNDLE_VERSION: u32 = 1;
const ORIENTATION: &str =
    "rows: player-1 (hand, sequence) pairs, cols: player-2 pairs; flat index = hand * sequences + sequence";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleHeader {
    pub format: String,
    pub version: u32,
    pub technique: Technique,
    pub rows: usize,
    pub cols: usize,
    pub k: usize,
    pub hands: [usize; 2],
    pub sequences: [usize; 2],
    pub nnz: BundleNnz,
    pub orientation: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleNnz {
    pub a_hat: usize,
    pub u: usize,
    pub m: usize,
    pub v: usize,
}

/// Writes `header.json` and one Matrix Market file per factor into `dir`.
pub fn write_sparsification(s: &Sparsification, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let size = s.size();
    let header = BundleHeader {
        format: BUNDLE_FORMAT.into(),
        version: BUNDLE_VERSION,
        technique: s.technique(),
        rows: s.nrows(),
        cols: s.ncols(),
        k: s.k(),
        hands: s.hands(),
        sequences: s.seqs(),
        nnz: BundleNnz {
            a_hat: size.a_hat,
            u: size.u,
            m: size.m,
            v: size.v,
        },
        orientation: ORIENTATION.into(),
    };
    fs::write(dir.join("header.json"), serde_json::to_string_pretty(&header)? + "\n")?;
    let a = s.a_hat();
    write_mtx_file(&dir.join("a_hat.mtx"), a.nrows(), a.ncols(), a.nnz(), a.iter())?;
    let u = s.u();
    write_mtx_file(&dir.join("u.mtx"), u.nrows(), u.ncols(), u.nnz(), u.iter())?;
    let m = s.m();
    write_mtx_file(&dir.join("m.mtx"), m.nrows(), m.ncols(), m.nnz(), m.iter())?;
    let v = s.v();
    write_mtx_file(&dir.join("v.mtx"), v.nrows(), v.ncols(), v.nnz(), v.iter())?;
    Ok(())
}

fn write_mtx_file(
    path: &Path,
    rows: usize,
    cols: usize,
    nnz: usize,
    entries: impl Iterator<Item = (usize, usize, f64)>,
) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    write_matrix_market(&mut w, rows, cols, nnz, entries)?;
    w.flush()?;
    Ok(())
}

fn read_mtx_file(dir: &Path, name: &str, rows: usize, cols: usize, nnz: usize) -> Result<crate::sparse::Triplets> {
    let path = dir.join(name);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::CorruptHeader(format!("{}: {e}", path.display())))?;
    let t = read_matrix_market(&text, name)?;
    if t.nrows() != rows || t.ncols() != cols || t.len() != nnz {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{} with {} entries, header says {rows}x{cols} with {nnz}",
            t.nrows(),
            t.ncols(),
            t.len()
        )));
    }
    Ok(t)
}

/// Reads a bundle written by `write_sparsification`.
pub fn read_sparsification(dir: &Path) -> Result<Sparsification> {
    let text = fs::read_to_string(dir.join("header.json"))
        .map_err(|e| Error::CorruptHeader(format!("{}: {e}", dir.join("header.json").display())))?;
    let h: BundleHeader =
        serde_json::from_str(&text).map_err(|e| Error::CorruptHeader(format!("header.json: {e}")))?;
    if h.format != BUNDLE_FORMAT || h.version != BUNDLE_VERSION {
        return Err(Error::CorruptHeader(format!("unsupported bundle {} v{}", h.format, h.version)));
    }
    let a_hat = read_mtx_file(dir, "a_hat.mtx", h.rows, h.cols, h.nnz.a_hat)?.to_csr();
    let u = read_mtx_file(dir, "u.mtx", h.rows, h.k, h.nnz.u)?.to_csr();
    let m = read_mtx_file(dir, "m.mtx", h.k, h.k, h.nnz.m)?.to_csc();
    let v = read_mtx_file(dir, "v.mtx", h.cols, h.k, h.nnz.v)?.to_csc();
    Sparsification::new(h.technique, a_hat, u, m, v, h.hands, h.sequences)
}

/// `iteration,seconds,exploitability` with a header line.
pub fn write_trace(trace: &ConvergenceTrace, path: &Path) -> Result<()> {
    let mut out = String::from("iteration,seconds,exploitability\n");
    for p in &trace.points {
        out.push_str(&format!("{},{},{:e}\n", p.iteration, p.seconds, p.exploitability));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<ConvergenceTrace> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "iteration,seconds,exploitability")) => {}
        _ => return Err(Error::parse(format!("{} line 1", path.display()), "missing trace header")),
    }
    let mut trace = ConvergenceTrace::default();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::parse(format!("{} line {}", path.display(), n + 1), what.to_string());
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad("expected three fields"));
        }
        trace.points.push(TracePoint {
            iteration: fields[0].parse().map_err(|_| bad("bad iteration"))?,
            seconds: fields[1].parse().map_err(|_| bad("bad seconds"))?,
            exploitability: fields[2].parse().map_err(|_| bad("bad exploitability"))?,
        });
    }
    Ok(trace)
}

/// Sequence-form profile with hand codes and sequence labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub hands: [Vec<String>; 2],
    pub sequences: [Vec<String>; 2],
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl ProfileFile {
    pub fn new(payoff: &KronPayoff, profile: &StrategyProfile) -> Self {
        let labels = |p: Player| {
            (0..payoff.num_sequences(p))
                .map(|s| payoff.skeleton().sequence_label(p, s))
                .collect()
        };
        let hands = |p: Player| payoff.hands(p).iter().map(|h| h.to_string()).collect();
        ProfileFile {
            hands: [hands(Player::P1), hands(Player::P2)],
            sequences: [labels(Player::P1), labels(Player::P2)],
            x1: profile.x1.clone(),
            x2: profile.x2.clone(),
        }
    }

    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile {
            x1: self.x1.clone(),
            x2: self.x2.clone(),
        }
    }
}

pub fn write_profile(payoff: &KronPayoff, profile: &StrategyProfile, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&ProfileFile::new(payoff, profile))? + "\n")?;
    Ok(())
}

pub fn read_profile(path: &Path) -> Result<ProfileFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
