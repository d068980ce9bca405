//! Discounted CFR on the hand-indexed treeplex, best responses,
//! exploitability and the deterministic-strategy analysis.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{Engine, GradientWorkspace};
use crate::error::{Error, Result};
use crate::kron::KronPayoff;
use crate::skeleton::{Infoset, Player, Skeleton};
use crate::sparsify::Sparsification;

/// Sequence-form tolerance for strategy inputs.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Instantaneous regrets below this fraction of the largest gradient entry
/// count as zero.
pub const REGRET_TOL: f64 = 1e-11;

/// Default cap on the number of deterministic strategies enumerated.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 1_000_000;

/// Source of `A x` and `A^T y`.
pub trait PayoffOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `out = A x`.
    fn apply(&mut self, x: &[f64], out: &mut [f64]) -> Result<()>;
    /// `out = A^T y`.
    fn apply_transpose(&mut self, y: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Products through a sparsification, with its own workspace.
pub struct FactoredOperator<'a> {
    engine: Engine<'a>,
    ws: GradientWorkspace,
}

impl<'a> FactoredOperator<'a> {
    pub fn new(s: &'a Sparsification, parallel: bool) -> Self {
        let engine = Engine::new(s).with_parallel(parallel);
        let ws = engine.workspace();
        FactoredOperator { engine, ws }
    }

    pub fn engine(&self) -> &Engine<'a> {
        &self.engine
    }
}

impl PayoffOperator for FactoredOperator<'_> {
    fn nrows(&self) -> usize {
        self.engine.sparsification().nrows()
    }

    fn ncols(&self) -> usize {
        self.engine.sparsification().ncols()
    }

    fn apply(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.engine.matvec_into(x, out, &mut self.ws)
    }

    fn apply_transpose(&mut self, y: &[f64], out: &mut [f64]) -> Result<()> {
        self.engine.matvec_transpose_into(y, out, &mut self.ws)
    }
}

/// Products with an explicit dense matrix.
pub struct DenseOperator {
    a: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(a: DMatrix<f64>) -> Self {
        DenseOperator { a }
    }
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!("{what} has length {got}, expected {want}")));
    }
    Ok(())
}

impl PayoffOperator for DenseOperator {
    fn nrows(&self) -> usize {
        self.a.nrows()
    }

    fn ncols(&self) -> usize {
        self.a.ncols()
    }

    fn apply(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("x", x.len(), self.a.ncols())?;
        check_len("output", out.len(), self.a.nrows())?;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.a.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    fn apply_transpose(&mut self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("y", y.len(), self.a.nrows())?;
        check_len("output", out.len(), self.a.ncols())?;
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.a.column(j).iter().zip(y).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }
}

/// Products from the Kronecker structure of the payoff itself.
pub struct StructuredOperator<'a> {
    payoff: &'a KronPayoff,
}

impl<'a> StructuredOperator<'a> {
    pub fn new(payoff: &'a KronPayoff) -> Self {
        StructuredOperator { payoff }
    }
}

impl PayoffOperator for StructuredOperator<'_> {
    fn nrows(&self) -> usize {
        self.payoff.dim(Player::P1)
    }

    fn ncols(&self) -> usize {
        self.payoff.dim(Player::P2)
    }

    fn apply(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("output", out.len(), self.nrows())?;
        out.copy_from_slice(&self.payoff.structured_matvec(x)?);
        Ok(())
    }

    fn apply_transpose(&mut self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("output", out.len(), self.ncols())?;
        out.copy_from_slice(&self.payoff.structured_matvec_transpose(y)?);
        Ok(())
    }
}

/// The treeplex of one player: skeleton infosets repeated once per hand.
#[derive(Clone, Debug)]
pub struct Treeplex {
    hands: usize,
    n: usize,
    infosets: Vec<Infoset>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

impl Treeplex {
    pub fn new(skeleton: &Skeleton, player: Player, hands: usize) -> Self {
        let infosets = skeleton.infosets(player).to_vec();
        let n = skeleton.num_sequences(player);
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (i, info) in infosets.iter().enumerate() {
            match info.parent {
                Some(p) => children[p].push(i),
                None => roots.push(i),
            }
        }
        Treeplex {
            hands,
            n,
            infosets,
            children,
            roots,
        }
    }

    pub fn of(payoff: &KronPayoff, player: Player) -> Self {
        Treeplex::new(payoff.skeleton(), player, payoff.num_hands(player))
    }

    pub fn hands(&self) -> usize {
        self.hands
    }

    pub fn num_sequences(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.hands * self.n
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    /// Behavioral strategy playing every action uniformly.
    pub fn uniform_behavior(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.dim()];
        for h in 0..self.hands {
            for info in &self.infosets {
                for s in info.seqs() {
                    b[h * self.n + s] = 1.0 / info.num_actions as f64;
                }
            }
        }
        b
    }

    /// Realization weights of a behavioral strategy given per sequence.
    pub fn behavior_to_sequence(&self, behavior: &[f64], x: &mut [f64]) {
        for h in 0..self.hands {
            let (b, xh) = (&behavior[h * self.n..(h + 1) * self.n], &mut x[h * self.n..(h + 1) * self.n]);
            for info in &self.infosets {
                let reach = info.parent.map_or(1.0, |p| xh[p]);
                for s in info.seqs() {
                    xh[s] = reach * b[s];
                }
            }
        }
    }

    pub fn uniform(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.behavior_to_sequence(&self.uniform_behavior(), &mut x);
        x
    }

    /// Largest violation of the sequence-form constraints and of `x >= 0`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return f64::INFINITY;
        }
        let mut worst = x.iter().fold(0.0f64, |w, &v| w.max(-v));
        for h in 0..self.hands {
            let xh = &x[h * self.n..(h + 1) * self.n];
            for info in &self.infosets {
                let reach = info.parent.map_or(1.0, |p| xh[p]);
                let sum: f64 = info.seqs().map(|s| xh[s]).sum();
                worst = worst.max((sum - reach).abs());
            }
        }
        worst
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        check_len("strategy", x.len(), self.dim())?;
        let r = self.residual(x);
        if !(r <= FEASIBILITY_TOL) {
            return Err(Error::InfeasibleStrategy(r));
        }
        Ok(())
    }

    /// Best-response value against gradient `g` and one maximizing pure
    /// sequence-form strategy.
    pub fn best_response(&self, g: &[f64]) -> (f64, Vec<f64>) {
        let n = self.n;
        let mut total = 0.0;
        let mut x = vec![0.0; self.dim()];
        let mut q = vec![0.0; n];
        let mut choice = vec![0usize; self.infosets.len()];
        for h in 0..self.hands {
            q.copy_from_slice(&g[h * n..(h + 1) * n]);
            for (i, info) in self.infosets.iter().enumerate().rev() {
                let mut best = info.first_seq;
                for s in info.seqs() {
                    if q[s] > q[best] {
                        best = s;
                    }
                }
                choice[i] = best;
                match info.parent {
                    Some(p) => q[p] += q[best],
                    None => total += q[best],
                }
            }
            let xh = &mut x[h * n..(h + 1) * n];
            let mut stack: Vec<usize> = self.roots.clone();
            while let Some(i) = stack.pop() {
                let s = choice[i];
                xh[s] = 1.0;
                stack.extend(&self.children[s]);
            }
        }
        (total, x)
    }

    pub fn best_response_value(&self, g: &[f64]) -> f64 {
        let n = self.n;
        let mut q = vec![0.0; n];
        let mut total = 0.0;
        for h in 0..self.hands {
            q.copy_from_slice(&g[h * n..(h + 1) * n]);
            total += self.max_walk(&mut q);
        }
        total
    }

    fn max_walk(&self, q: &mut [f64]) -> f64 {
        let mut total = 0.0;
        for info in self.infosets.iter().rev() {
            let best = info.seqs().map(|s| q[s]).fold(f64::NEG_INFINITY, f64::max);
            match info.parent {
                Some(p) => q[p] += best,
                None => total += best,
            }
        }
        total
    }

    /// Reduced pure strategies of a single hand as lists of chosen sequences.
    pub fn pure_strategies(&self) -> Vec<Vec<usize>> {
        fn rec(t: &Treeplex, frontier: &[usize]) -> Vec<Vec<usize>> {
            let Some((&first, rest)) = frontier.split_first() else {
                return vec![Vec::new()];
            };
            let mut out = Vec::new();
            for s in t.infosets[first].seqs() {
                let mut next = rest.to_vec();
                next.extend(&t.children[s]);
                for mut tail in rec(t, &next) {
                    tail.insert(0, s);
                    out.push(tail);
                }
            }
            out
        }
        rec(self, &self.roots)
    }

    /// Number of deterministic behavioral strategies: the product of action
    /// counts over all (hand, infoset) pairs, saturating.
    pub fn behavioral_pure_count(&self) -> u128 {
        let per_hand = self
            .infosets
            .iter()
            .fold(1u128, |acc, i| acc.saturating_mul(i.num_actions as u128));
        (0..self.hands).fold(1u128, |acc, _| acc.saturating_mul(per_hand))
    }

    /// One hand's regret update and regret matching; `q` is scratch of
    /// length `n`. Returns nothing; `regret` and `behavior` are updated.
    fn cfr_hand(
        &self,
        g: &[f64],
        behavior: &mut [f64],
        regret: &mut [f64],
        q: &mut [f64],
        disc: (f64, f64),
        tol: f64,
    ) {
        q.copy_from_slice(g);
        for info in self.infosets.iter().rev() {
            let v: f64 = info.seqs().map(|s| behavior[s] * q[s]).sum();
            for s in info.seqs() {
                // roundoff-level regrets are zero, so ties break the same way
                // whichever operator produced the gradient
                let d = q[s] - v;
                let r = regret[s] + if d.abs() <= tol { 0.0 } else { d };
                regret[s] = r * if r > 0.0 { disc.0 } else { disc.1 };
            }
            if let Some(p) = info.parent {
                q[p] += v;
            }
        }
        for info in &self.infosets {
            regret_matching(&regret[info.seqs()], &mut behavior[info.seqs()]);
        }
    }
}

/// Positive-part normalization; uniform over the argmax actions when no
/// regret is positive.
pub fn regret_matching(regret: &[f64], out: &mut [f64]) {
    let pos: f64 = regret.iter().map(|r| r.max(0.0)).sum();
    if pos > 0.0 {
        for (o, r) in out.iter_mut().zip(regret) {
            *o = r.max(0.0) / pos;
        }
        return;
    }
    let best = regret.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let count = regret.iter().filter(|&&r| r == best).count() as f64;
    for (o, r) in out.iter_mut().zip(regret) {
        *o = if *r == best { 1.0 / count } else { 0.0 };
    }
}

/// Sequence-form strategies of both players.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl StrategyProfile {
    pub fn get(&self, player: Player) -> &[f64] {
        match player {
            Player::P1 => &self.x1,
            Player::P2 => &self.x2,
        }
    }

    pub fn uniform(payoff: &KronPayoff) -> Self {
        StrategyProfile {
            x1: Treeplex::of(payoff, Player::P1).uniform(),
            x2: Treeplex::of(payoff, Player::P2).uniform(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub seconds: f64,
    pub exploitability: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub points: Vec<TracePoint>,
}

impl ConvergenceTrace {
    pub fn last(&self) -> Option<&TracePoint> {
        self.points.last()
    }

    pub fn first(&self) -> Option<&TracePoint> {
        self.points.first()
    }

    /// First checkpoint at or below `threshold`.
    pub fn reached(&self, threshold: f64) -> Option<&TracePoint> {
        self.points.iter().find(|p| p.exploitability < threshold)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcfrParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub max_iters: usize,
    pub target_exploitability: f64,
    pub checkpoint_every: usize,
    /// Player 2 responds to player 1's freshly updated strategy within an
    /// iteration instead of both updating from the same profile.
    pub alternating: bool,
    /// Update hands on the rayon pool; results do not change.
    pub parallel: bool,
    /// Compare the sparsification with the structured product before solving.
    pub self_check: bool,
}

impl Default for DcfrParams {
    fn default() -> Self {
        DcfrParams {
            alpha: 1.5,
            beta: 0.0,
            gamma: 2.0,
            max_iters: 10_000,
            target_exploitability: 0.0,
            checkpoint_every: 50,
            alternating: true,
            parallel: false,
            self_check: false,
        }
    }
}

/// Exploitability of a profile through any operator, normalized by `pot`.
pub fn exploitability_with(
    op: &mut dyn PayoffOperator,
    t1: &Treeplex,
    t2: &Treeplex,
    profile: &StrategyProfile,
    pot: f64,
) -> Result<f64> {
    let br1 = best_response_with(op, t1, t2, Player::P1, &profile.x2)?;
    let br2 = best_response_with(op, t1, t2, Player::P2, &profile.x1)?;
    Ok((br1 + br2) / 2.0 / pot)
}

/// Best-response value of `player` against `opponent` through any operator.
pub fn best_response_with(
    op: &mut dyn PayoffOperator,
    t1: &Treeplex,
    t2: &Treeplex,
    player: Player,
    opponent: &[f64],
) -> Result<f64> {
    Ok(match player {
        Player::P1 => {
            t2.check(opponent)?;
            let mut g = vec![0.0; t1.dim()];
            op.apply(opponent, &mut g)?;
            t1.best_response_value(&g)
        }
        Player::P2 => {
            t1.check(opponent)?;
            let mut g = vec![0.0; t2.dim()];
            op.apply_transpose(opponent, &mut g)?;
            g.iter_mut().for_each(|v| *v = -*v);
            t2.best_response_value(&g)
        }
    })
}

struct Side {
    tree: Treeplex,
    behavior: Vec<f64>,
    regret: Vec<f64>,
    x: Vec<f64>,
    avg: Vec<f64>,
    grad: Vec<f64>,
}

impl Side {
    fn new(tree: Treeplex) -> Self {
        let behavior = tree.uniform_behavior();
        let dim = tree.dim();
        let mut x = vec![0.0; dim];
        tree.behavior_to_sequence(&behavior, &mut x);
        Side {
            tree,
            behavior,
            regret: vec![0.0; dim],
            x,
            avg: vec![0.0; dim],
            grad: vec![0.0; dim],
        }
    }

    fn accumulate(&mut self, w: f64) {
        for (a, x) in self.avg.iter_mut().zip(&self.x) {
            *a += w * x;
        }
    }

    fn update(&mut self, disc: (f64, f64), parallel: bool) {
        let n = self.tree.n;
        let tree = &self.tree;
        let grad = &self.grad;
        let tol = REGRET_TOL * grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if parallel {
            self.behavior
                .par_chunks_mut(n)
                .zip(self.regret.par_chunks_mut(n))
                .enumerate()
                .for_each_init(
                    || vec![0.0; n],
                    |q, (h, (b, r))| tree.cfr_hand(&grad[h * n..(h + 1) * n], b, r, q, disc, tol),
                );
        } else {
            let mut q = vec![0.0; n];
            for (h, (b, r)) in self.behavior.chunks_mut(n).zip(self.regret.chunks_mut(n)).enumerate() {
                tree.cfr_hand(&grad[h * n..(h + 1) * n], b, r, &mut q, disc, tol);
            }
        }
        self.tree.behavior_to_sequence(&self.behavior, &mut self.x);
    }
}

/// Simultaneous-update discounted CFR state over an arbitrary operator.
pub struct Dcfr<'o> {
    op: Box<dyn PayoffOperator + 'o>,
    sides: [Side; 2],
    params: DcfrParams,
    iteration: usize,
    weight_sum: f64,
}

impl<'o> Dcfr<'o> {
    pub fn new(op: Box<dyn PayoffOperator + 'o>, t1: Treeplex, t2: Treeplex, params: DcfrParams) -> Result<Self> {
        if op.nrows() != t1.dim() || op.ncols() != t2.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, treeplexes need {}x{}",
                op.nrows(),
                op.ncols(),
                t1.dim(),
                t2.dim()
            )));
        }
        Ok(Dcfr {
            op,
            sides: [Side::new(t1), Side::new(t2)],
            params,
            iteration: 0,
            weight_sum: 0.0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn current(&self) -> StrategyProfile {
        StrategyProfile {
            x1: self.sides[0].x.clone(),
            x2: self.sides[1].x.clone(),
        }
    }

    pub fn average(&self) -> StrategyProfile {
        if self.weight_sum == 0.0 {
            return self.current();
        }
        let scale = 1.0 / self.weight_sum;
        StrategyProfile {
            x1: self.sides[0].avg.iter().map(|v| v * scale).collect(),
            x2: self.sides[1].avg.iter().map(|v| v * scale).collect(),
        }
    }

    pub fn step(&mut self) -> Result<()> {
        self.iteration += 1;
        let t = self.iteration as f64;
        let w = t.powf(self.params.gamma);
        self.weight_sum += w;
        let ta = t.powf(self.params.alpha);
        let tb = t.powf(self.params.beta);
        let disc = (ta / (ta + 1.0), tb / (tb + 1.0));
        let parallel = self.params.parallel;

        let [s1, s2] = &mut self.sides;
        self.op.apply(&s2.x, &mut s1.grad)?;
        if !self.params.alternating {
            self.op.apply_transpose(&s1.x, &mut s2.grad)?;
        }
        s1.accumulate(w);
        s1.update(disc, parallel);
        if self.params.alternating {
            self.op.apply_transpose(&s1.x, &mut s2.grad)?;
        }
        s2.grad.iter_mut().for_each(|v| *v = -*v);
        s2.accumulate(w);
        s2.update(disc, parallel);
        Ok(())
    }

    pub fn exploitability(&mut self, profile: &StrategyProfile, pot: f64) -> Result<f64> {
        let [s1, s2] = &self.sides;
        exploitability_with(self.op.as_mut(), &s1.tree, &s2.tree, profile, pot)
    }

    /// Runs to the target or the iteration cap, measuring the average
    /// strategy every checkpoint and after the last iteration.
    pub fn run(&mut self, pot: f64) -> Result<(StrategyProfile, ConvergenceTrace)> {
        let start = Instant::now();
        let mut trace = ConvergenceTrace::default();
        let every = self.params.checkpoint_every.max(1);
        while self.iteration < self.params.max_iters {
            self.step()?;
            if self.iteration % every == 0 || self.iteration == self.params.max_iters {
                let avg = self.average();
                let e = self.exploitability(&avg, pot)?;
                trace.points.push(TracePoint {
                    iteration: self.iteration,
                    seconds: start.elapsed().as_secs_f64(),
                    exploitability: e,
                });
                log::debug!("iteration {} exploitability {e:.3e}", self.iteration);
                if e <= self.params.target_exploitability {
                    break;
                }
            }
        }
        Ok((self.average(), trace))
    }
}

/// Maximum relative error of the sparsification against the structured
/// product on a few pseudo-random vectors.
pub fn reconstruction_error(payoff: &KronPayoff, s: &Sparsification) -> Result<f64> {
    if s.nrows() != payoff.dim(Player::P1) || s.ncols() != payoff.dim(Player::P2) {
        return Err(Error::DimensionMismatch("sparsification does not match the payoff".into()));
    }
    let engine = Engine::new(s);
    let mut worst = 0.0f64;
    for k in 0..3u64 {
        let x: Vec<f64> = (0..s.ncols())
            .map(|i| (((i as u64 + 1) * (2 * k + 7)) % 97) as f64 / 97.0 - 0.5)
            .collect();
        let want = payoff.structured_matvec(&x)?;
        let got = engine.matvec(&x)?;
        let scale = want.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        let err = want.iter().zip(&got).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(err / scale);
    }
    Ok(worst)
}

/// DCFR with factored gradients.
pub fn dcfr_solve(
    payoff: &KronPayoff,
    s: &Sparsification,
    params: &DcfrParams,
) -> Result<(StrategyProfile, ConvergenceTrace)> {
    if params.self_check {
        let err = reconstruction_error(payoff, s)?;
        if !(err <= 1e-9) {
            return Err(Error::NonReconstructing(err));
        }
    }
    let op = FactoredOperator::new(s, params.parallel);
    let mut dcfr = Dcfr::new(
        Box::new(op),
        Treeplex::of(payoff, Player::P1),
        Treeplex::of(payoff, Player::P2),
        params.clone(),
    )?;
    dcfr.run(payoff.initial_pot())
}

/// DCFR with products against the dense matrix; an oracle for small games.
pub fn dcfr_solve_dense(
    payoff: &KronPayoff,
    guard: u128,
    params: &DcfrParams,
) -> Result<(StrategyProfile, ConvergenceTrace)> {
    let op = DenseOperator::new(payoff.dense_expand(guard)?);
    let mut dcfr = Dcfr::new(
        Box::new(op),
        Treeplex::of(payoff, Player::P1),
        Treeplex::of(payoff, Player::P2),
        params.clone(),
    )?;
    dcfr.run(payoff.initial_pot())
}

/// Best-response value of `player` against the opponent's sequence-form
/// strategy, in chips.
pub fn best_response_value(
    payoff: &KronPayoff,
    s: &Sparsification,
    player: Player,
    opponent: &[f64],
) -> Result<f64> {
    let mut op = FactoredOperator::new(s, false);
    best_response_with(
        &mut op,
        &Treeplex::of(payoff, Player::P1),
        &Treeplex::of(payoff, Player::P2),
        player,
        opponent,
    )
}

/// `(br1 + br2) / 2`, normalized by the initial pot.
pub fn exploitability(payoff: &KronPayoff, s: &Sparsification, profile: &StrategyProfile) -> Result<f64> {
    let mut op = FactoredOperator::new(s, false);
    exploitability_with(
        &mut op,
        &Treeplex::of(payoff, Player::P1),
        &Treeplex::of(payoff, Player::P2),
        profile,
        payoff.initial_pot(),
    )
}

/// Bracket `[-br2(x1), br1(x2)]` on the game value to player 1.
pub fn value_bounds(payoff: &KronPayoff, s: &Sparsification, profile: &StrategyProfile) -> Result<(f64, f64)> {
    let lo = -best_response_value(payoff, s, Player::P2, &profile.x1)?;
    let hi = best_response_value(payoff, s, Player::P1, &profile.x2)?;
    Ok((lo, hi))
}

/// Best value `player` can guarantee with a deterministic strategy, and a
/// strategy attaining it. Values are from `player`'s point of view.
pub fn enumerate_deterministic_optimum(payoff: &KronPayoff, player: Player, guard: u128) -> Result<(f64, Vec<f64>)> {
    let own = Treeplex::of(payoff, player);
    let opp = Treeplex::of(payoff, player.opponent());
    let count = own.behavioral_pure_count();
    if count > guard {
        return Err(Error::SizeGuard { size: count, guard });
    }
    let n = own.num_sequences();
    let hands = own.hands();
    let pures = own.pure_strategies();
    let mut op = StructuredOperator::new(payoff);

    // opponent gradient from own hand h playing pure strategy p, already
    // negated into the opponent's payoff
    let mut contrib: Vec<Vec<Vec<f64>>> = Vec::with_capacity(hands);
    let mut unit = vec![0.0; own.dim()];
    let mut g = vec![0.0; opp.dim()];
    for h in 0..hands {
        let mut per = Vec::with_capacity(pures.len());
        for p in &pures {
            unit.fill(0.0);
            for &s in p {
                unit[h * n + s] = 1.0;
            }
            match player {
                Player::P1 => {
                    op.apply_transpose(&unit, &mut g)?;
                    per.push(g.iter().map(|v| -v).collect());
                }
                Player::P2 => {
                    op.apply(&unit, &mut g)?;
                    per.push(g.clone());
                }
            }
        }
        contrib.push(per);
    }

    let mut choice = vec![0usize; hands];
    let mut sum = vec![0.0; opp.dim()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        sum.fill(0.0);
        for (h, &c) in choice.iter().enumerate() {
            for (a, b) in sum.iter_mut().zip(&contrib[h][c]) {
                *a += b;
            }
        }
        let value = -opp.best_response_value(&sum);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, choice.clone()));
        }
        let mut h = 0;
        while h < hands {
            choice[h] += 1;
            if choice[h] < pures.len() {
                break;
            }
            choice[h] = 0;
            h += 1;
        }
        if h == hands {
            break;
        }
    }
    let (value, choice) = best.expect("at least one pure strategy");
    let mut x = vec![0.0; own.dim()];
    for (h, &c) in choice.iter().enumerate() {
        for &s in &pures[c] {
            x[h * n + s] = 1.0;
        }
    }
    Ok((value, x))
}

/// Value lost to determinism as a fraction of the pot.
pub fn price_of_determinism(mixed_value: f64, det_value: f64, pot: f64) -> Result<f64> {
    if !(pot > 0.0) {
        return Err(Error::InvalidInput(format!("pot must be positive, got {pot}")));
    }
    Ok((mixed_value - det_value) / pot)
}
