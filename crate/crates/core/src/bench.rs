//! Sparsification size and throughput reports.

use std::fmt::Write;
use std::time::Instant;

use crate::engine::Engine;
use crate::error::Result;
use crate::kron::KronPayoff;
use crate::skeleton::{BettingConfig, Player};
use crate::sparsify::{sparsify, Sparsification, Technique};
use crate::synth::synthetic;

/// Size and build time of one technique.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TechniqueCost {
    pub size: usize,
    pub seconds: f64,
    /// Gradient products per second, both directions counted.
    pub matvecs_per_second: Option<f64>,
}

/// One line of the size table.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub game: String,
    pub hands: [usize; 2],
    pub dense_nnz: usize,
    pub a: TechniqueCost,
    pub b: TechniqueCost,
}

impl BenchRow {
    pub fn ratio(&self, technique: Technique) -> f64 {
        let size = match technique {
            Technique::A => self.a.size,
            Technique::B => self.b.size,
        };
        self.dense_nnz as f64 / size.max(1) as f64
    }
}

fn timed(payoff: &KronPayoff, technique: Technique, matvecs: usize) -> Result<(Sparsification, TechniqueCost)> {
    let start = Instant::now();
    let s = sparsify(payoff, technique, true)?;
    let seconds = start.elapsed().as_secs_f64();
    let matvecs_per_second = if matvecs > 0 {
        let engine = Engine::new(&s);
        let mut ws = engine.workspace();
        let x = vec![1.0; s.ncols()];
        let y = vec![1.0; s.nrows()];
        let (mut ax, mut aty) = (vec![0.0; s.nrows()], vec![0.0; s.ncols()]);
        let start = Instant::now();
        for _ in 0..matvecs {
            engine.matvec_into(&x, &mut ax, &mut ws)?;
            engine.matvec_transpose_into(&y, &mut aty, &mut ws)?;
        }
        Some(2.0 * matvecs as f64 / start.elapsed().as_secs_f64().max(1e-12))
    } else {
        None
    };
    let size = s.size().total;
    Ok((s, TechniqueCost { size, seconds, matvecs_per_second }))
}

/// Sparsifies `payoff` with both techniques; `matvecs` products of each
/// kind are timed per technique when nonzero.
pub fn bench_payoff(game: &str, payoff: &KronPayoff, matvecs: usize) -> Result<BenchRow> {
    let (_, a) = timed(payoff, Technique::A, matvecs)?;
    let (_, b) = timed(payoff, Technique::B, matvecs)?;
    Ok(BenchRow {
        game: game.to_string(),
        hands: [payoff.num_hands(Player::P1), payoff.num_hands(Player::P2)],
        dense_nnz: payoff.dense_nnz(),
        a,
        b,
    })
}

/// Synthetic standard-deck instances for every hand count and seed.
pub fn sweep(hand_counts: &[usize], seeds: &[u64], config: &BettingConfig, matvecs: usize) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &hands in hand_counts {
        for &seed in seeds {
            let payoff = KronPayoff::assemble(&synthetic(hands, seed, config)?)?;
            rows.push(bench_payoff(&format!("synth-{hands}-s{seed}"), &payoff, matvecs)?);
        }
    }
    Ok(rows)
}

/// Game, unsparsified size, then size, time and ratio per technique.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:>14} | {:>10} {:>9} {:>7} | {:>10} {:>9} {:>7}",
        "Game", "Unsparsified", "A size", "A time", "A x", "B size", "B time", "B x"
    );
    let _ = writeln!(out, "{}", "-".repeat(96));
    for r in rows {
        let _ = writeln!(
            out,
            "{:<18} {:>14.3e} | {:>10.3e} {:>8.3}s {:>7.2} | {:>10.3e} {:>8.3}s {:>7.2}",
            r.game,
            r.dense_nnz as f64,
            r.a.size as f64,
            r.a.seconds,
            r.ratio(Technique::A),
            r.b.size as f64,
            r.b.seconds,
            r.ratio(Technique::B),
        );
    }
    if rows.iter().any(|r| r.a.matvecs_per_second.is_some()) {
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<18} {:>14} {:>14}", "Game", "A matvec/s", "B matvec/s");
        for r in rows {
            let f = |c: &TechniqueCost| c.matvecs_per_second.map_or("-".to_string(), |v| format!("{v:.1}"));
            let _ = writeln!(out, "{:<18} {:>14} {:>14}", r.game, f(&r.a), f(&r.b));
        }
    }
    out
}
