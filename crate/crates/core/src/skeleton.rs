//! The betting tree of a single river round, shared by every hand deal.
//!
//! Player 1 (small blind) acts first. A player whose contribution matches
//! the opponent's may check, bet a fraction of the pot or move all-in; a
//! player facing a bet may fold, call, raise (call, then add a fraction of
//! the post-call pot) or move all-in. The round ends on a fold, a call or
//! two checks. Bets that exceed the effective stack are clamped to all-in
//! and actions that land on the same contribution are merged.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, Triplets};

/// Contributions closer than this are treated as equal.
pub const MONEY_TOL: f64 = 1e-6;

const MAX_NODES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn index(self) -> usize {
        match self {
            Player::P1 => 0,
            Player::P2 => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    pub fn from_number(n: u8) -> Result<Player> {
        match n {
            1 => Ok(Player::P1),
            2 => Ok(Player::P2),
            _ => Err(Error::InvalidInput(format!("player must be 1 or 2, got {n}"))),
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.index() + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BettingContext {
    FirstAction,
    FacingCheck,
    FacingBet,
    AfterOneRaise,
    AfterMultipleRaises,
}

/// Pot fractions available to one player in each betting context.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BetMenu {
    #[serde(default)]
    pub first_action: Vec<f64>,
    #[serde(default)]
    pub facing_check: Vec<f64>,
    #[serde(default)]
    pub facing_bet: Vec<f64>,
    #[serde(default)]
    pub after_one_raise: Vec<f64>,
    #[serde(default)]
    pub after_multiple_raises: Vec<f64>,
}

impl BetMenu {
    /// Same fractions in every context.
    pub fn uniform(fractions: &[f64]) -> Self {
        BetMenu {
            first_action: fractions.to_vec(),
            facing_check: fractions.to_vec(),
            facing_bet: fractions.to_vec(),
            after_one_raise: fractions.to_vec(),
            after_multiple_raises: fractions.to_vec(),
        }
    }

    pub fn fractions(&self, ctx: BettingContext) -> &[f64] {
        match ctx {
            BettingContext::FirstAction => &self.first_action,
            BettingContext::FacingCheck => &self.facing_check,
            BettingContext::FacingBet => &self.facing_bet,
            BettingContext::AfterOneRaise => &self.after_one_raise,
            BettingContext::AfterMultipleRaises => &self.after_multiple_raises,
        }
    }

    fn all(&self) -> impl Iterator<Item = f64> + '_ {
        self.first_action
            .iter()
            .chain(&self.facing_check)
            .chain(&self.facing_bet)
            .chain(&self.after_one_raise)
            .chain(&self.after_multiple_raises)
            .copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettingConfig {
    pub stacks: [f64; 2],
    pub pot_contribution: f64,
    pub menus: [BetMenu; 2],
    pub all_in: bool,
    #[serde(default)]
    pub raise_cap: Option<u32>,
}

impl BettingConfig {
    /// Single 3/4-pot size everywhere plus all-in, $1875 in, $18125 behind.
    pub fn fig1() -> Self {
        BettingConfig {
            stacks: [18125.0, 18125.0],
            pot_contribution: 1875.0,
            menus: [BetMenu::uniform(&[0.75]), BetMenu::uniform(&[0.75])],
            all_in: true,
            raise_cap: None,
        }
    }

    /// The asymmetric Libratus river abstraction: player 1 takes the bot's
    /// menu and player 2 the opponent's. All-in is always available.
    pub fn libratus(pot_contribution: f64, stack: f64) -> Self {
        let bot = BetMenu {
            first_action: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            facing_check: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            facing_bet: vec![0.4, 0.7, 1.1, 2.0],
            after_one_raise: vec![0.4, 0.7, 2.0],
            after_multiple_raises: vec![0.7],
        };
        let opponent = BetMenu {
            first_action: vec![0.35, 0.65, 1.0],
            facing_check: vec![0.5, 0.75, 1.0],
            facing_bet: vec![0.7, 1.1],
            after_one_raise: vec![0.7],
            after_multiple_raises: vec![0.7],
        };
        BettingConfig {
            stacks: [stack, stack],
            pot_contribution,
            menus: [bot, opponent],
            all_in: true,
            raise_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.stacks.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::InvalidConfig("stacks must be positive".into()));
        }
        if !(self.pot_contribution.is_finite() && self.pot_contribution > 0.0) {
            return Err(Error::InvalidConfig(
                "pot contribution must be positive".into(),
            ));
        }
        if !self
            .menus
            .iter()
            .flat_map(|m| m.all())
            .all(|f| f.is_finite() && f > 0.0)
        {
            return Err(Error::InvalidConfig("bet fractions must be positive".into()));
        }
        Ok(())
    }

    /// Largest contribution either player can reach.
    pub fn max_contribution(&self) -> f64 {
        self.pot_contribution + self.stacks[0].min(self.stacks[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Check,
    Bet,
    AllIn,
    Fold,
    Call,
    Raise,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ActionKind::Check => "check",
            ActionKind::Bet => "bet",
            ActionKind::AllIn => "allin",
            ActionKind::Fold => "fold",
            ActionKind::Call => "call",
            ActionKind::Raise => "raise",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Action {
    pub kind: ActionKind,
    /// Acting player's contribution after the action.
    pub contribution: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalKind {
    Fold(Player),
    Showdown,
}

#[derive(Clone, Debug)]
pub enum NodeKind {
    Decision {
        player: Player,
        infoset: usize,
        actions: Vec<Action>,
        children: Vec<usize>,
    },
    Terminal {
        terminal: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    pub contributions: [f64; 2],
    /// Last sequence of each player on the path to this node.
    pub parent_seq: [Option<usize>; 2],
    pub history: Vec<ActionKind>,
}

/// One decision point of a player; instantiated once per private hand.
#[derive(Clone, Debug)]
pub struct Infoset {
    pub node: usize,
    pub parent: Option<usize>,
    pub first_seq: usize,
    pub num_actions: usize,
}

impl Infoset {
    pub fn seqs(&self) -> Range<usize> {
        self.first_seq..self.first_seq + self.num_actions
    }
}

#[derive(Clone, Debug)]
pub struct Terminal {
    pub node: usize,
    pub kind: TerminalKind,
    pub contributions: [f64; 2],
    /// Last sequence of each player before the terminal.
    pub seqs: [usize; 2],
}

/// Fold payoffs `F` and showdown contributions `S`, both `n1 x n2`.
#[derive(Clone, Debug)]
pub struct PayoffComponents {
    pub fold: CsrMatrix,
    pub showdown: CsrMatrix,
}

#[derive(Clone, Debug)]
pub struct Skeleton {
    config: BettingConfig,
    nodes: Vec<Node>,
    infosets: [Vec<Infoset>; 2],
    seq_infoset: [Vec<usize>; 2],
    terminals: Vec<Terminal>,
}

struct State {
    contributions: [f64; 2],
    to_act: Player,
    aggressions: u32,
    checked: bool,
    parent_seq: [Option<usize>; 2],
    history: Vec<ActionKind>,
}

struct Builder<'a> {
    config: &'a BettingConfig,
    cap: f64,
    nodes: Vec<Node>,
    infosets: [Vec<Infoset>; 2],
    seq_infoset: [Vec<usize>; 2],
    terminals: Vec<Terminal>,
}

fn push_unique(actions: &mut Vec<Action>, action: Action) {
    if !actions
        .iter()
        .any(|a| (a.contribution - action.contribution).abs() < MONEY_TOL)
    {
        actions.push(action);
    }
}

impl Builder<'_> {
    fn actions(&self, s: &State) -> Vec<Action> {
        let me = s.to_act.index();
        let opp = s.to_act.opponent().index();
        let (mine, theirs) = (s.contributions[me], s.contributions[opp]);
        let menu = &self.config.menus[me];
        let mut actions = Vec::new();

        if (mine - theirs).abs() < MONEY_TOL {
            actions.push(Action {
                kind: ActionKind::Check,
                contribution: mine,
            });
            if mine < self.cap - MONEY_TOL {
                let ctx = if s.checked {
                    BettingContext::FacingCheck
                } else {
                    BettingContext::FirstAction
                };
                let pot = mine + theirs;
                let mut bets: Vec<Action> = Vec::new();
                for &f in menu.fractions(ctx) {
                    push_unique(&mut bets, self.clamp(mine + f * pot, ActionKind::Bet));
                }
                if self.config.all_in {
                    push_unique(&mut bets, self.clamp(self.cap, ActionKind::AllIn));
                }
                bets.sort_by(|a, b| a.contribution.total_cmp(&b.contribution));
                actions.extend(bets);
            }
        } else {
            debug_assert!(mine < theirs);
            actions.push(Action {
                kind: ActionKind::Fold,
                contribution: mine,
            });
            actions.push(Action {
                kind: ActionKind::Call,
                contribution: theirs,
            });
            let raises_so_far = s.aggressions.saturating_sub(1);
            let capped = self.config.raise_cap.is_some_and(|c| raises_so_far >= c);
            if theirs < self.cap - MONEY_TOL && !capped {
                let ctx = match s.aggressions {
                    0 | 1 => BettingContext::FacingBet,
                    2 => BettingContext::AfterOneRaise,
                    _ => BettingContext::AfterMultipleRaises,
                };
                let pot = 2.0 * theirs;
                let mut raises: Vec<Action> = Vec::new();
                for &f in menu.fractions(ctx) {
                    push_unique(&mut raises, self.clamp(theirs + f * pot, ActionKind::Raise));
                }
                if self.config.all_in {
                    push_unique(&mut raises, self.clamp(self.cap, ActionKind::AllIn));
                }
                raises.sort_by(|a, b| a.contribution.total_cmp(&b.contribution));
                actions.extend(raises);
            }
        }
        actions
    }

    fn clamp(&self, target: f64, kind: ActionKind) -> Action {
        if target >= self.cap - MONEY_TOL {
            Action {
                kind: ActionKind::AllIn,
                contribution: self.cap,
            }
        } else {
            Action {
                kind,
                contribution: target,
            }
        }
    }

    fn terminal(&mut self, s: State, kind: TerminalKind) -> Result<usize> {
        let seqs = match s.parent_seq {
            [Some(a), Some(b)] => [a, b],
            _ => {
                return Err(Error::Contract(
                    "terminal reached before both players acted".into(),
                ))
            }
        };
        let id = self.nodes.len();
        self.terminals.push(Terminal {
            node: id,
            kind,
            contributions: s.contributions,
            seqs,
        });
        self.nodes.push(Node {
            kind: NodeKind::Terminal {
                terminal: self.terminals.len() - 1,
            },
            contributions: s.contributions,
            parent_seq: s.parent_seq,
            history: s.history,
        });
        Ok(id)
    }

    fn expand(&mut self, s: State) -> Result<usize> {
        if self.nodes.len() >= MAX_NODES {
            return Err(Error::InvalidConfig(format!(
                "betting tree exceeds {MAX_NODES} nodes"
            )));
        }
        let actions = self.actions(&s);
        assert!(!actions.is_empty(), "decision node without actions");
        let p = s.to_act.index();
        let id = self.nodes.len();
        let infoset = self.infosets[p].len();
        let first_seq = self.seq_infoset[p].len();
        self.infosets[p].push(Infoset {
            node: id,
            parent: s.parent_seq[p],
            first_seq,
            num_actions: actions.len(),
        });
        self.seq_infoset[p].extend(std::iter::repeat_n(infoset, actions.len()));
        self.nodes.push(Node {
            kind: NodeKind::Decision {
                player: s.to_act,
                infoset,
                actions: actions.clone(),
                children: Vec::new(),
            },
            contributions: s.contributions,
            parent_seq: s.parent_seq,
            history: s.history.clone(),
        });

        let mut children = Vec::with_capacity(actions.len());
        for (a, action) in actions.iter().enumerate() {
            let mut contributions = s.contributions;
            contributions[p] = action.contribution;
            let mut parent_seq = s.parent_seq;
            parent_seq[p] = Some(first_seq + a);
            let mut history = s.history.clone();
            history.push(action.kind);
            let mut next = State {
                contributions,
                to_act: s.to_act.opponent(),
                aggressions: s.aggressions,
                checked: false,
                parent_seq,
                history,
            };
            let child = match action.kind {
                ActionKind::Fold => self.terminal(next, TerminalKind::Fold(s.to_act))?,
                ActionKind::Call => self.terminal(next, TerminalKind::Showdown)?,
                ActionKind::Check if s.checked => self.terminal(next, TerminalKind::Showdown)?,
                ActionKind::Check => {
                    next.checked = true;
                    self.expand(next)?
                }
                ActionKind::Bet | ActionKind::Raise | ActionKind::AllIn => {
                    next.aggressions += 1;
                    self.expand(next)?
                }
            };
            children.push(child);
        }
        if let NodeKind::Decision { children: c, .. } = &mut self.nodes[id].kind {
            *c = children;
        }
        Ok(id)
    }
}

impl Skeleton {
    pub fn build(config: &BettingConfig) -> Result<Skeleton> {
        config.validate()?;
        let mut b = Builder {
            config,
            cap: config.max_contribution(),
            nodes: Vec::new(),
            infosets: [Vec::new(), Vec::new()],
            seq_infoset: [Vec::new(), Vec::new()],
            terminals: Vec::new(),
        };
        let c = config.pot_contribution;
        b.expand(State {
            contributions: [c, c],
            to_act: Player::P1,
            aggressions: 0,
            checked: false,
            parent_seq: [None, None],
            history: Vec::new(),
        })?;
        let sk = Skeleton {
            config: config.clone(),
            nodes: b.nodes,
            infosets: b.infosets,
            seq_infoset: b.seq_infoset,
            terminals: b.terminals,
        };
        debug_assert!(sk.terminals.iter().all(|t| match t.kind {
            TerminalKind::Showdown => (t.contributions[0] - t.contributions[1]).abs() < MONEY_TOL,
            TerminalKind::Fold(_) => true,
        }));
        Ok(sk)
    }

    pub fn config(&self) -> &BettingConfig {
        &self.config
    }

    /// Number of sequences of `player`, empty sequence excluded.
    pub fn num_sequences(&self, player: Player) -> usize {
        self.seq_infoset[player.index()].len()
    }

    pub fn num_infosets(&self, player: Player) -> usize {
        self.infosets[player.index()].len()
    }

    /// Infosets of `player` in tree preorder: parents before children.
    pub fn infosets(&self, player: Player) -> &[Infoset] {
        &self.infosets[player.index()]
    }

    pub fn infoset_of_sequence(&self, player: Player, seq: usize) -> usize {
        self.seq_infoset[player.index()][seq]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    /// Terminal reached by the given action path from the root.
    pub fn terminal_by_path(&self, path: &[ActionKind]) -> Option<&Terminal> {
        self.terminals
            .iter()
            .find(|t| self.nodes[t.node].history == path)
    }

    /// Sequence of `player` reached by the given action path, where the last
    /// action on the path is taken by `player`.
    pub fn sequence_by_path(&self, player: Player, path: &[ActionKind]) -> Option<usize> {
        self.nodes
            .iter()
            .find(|n| n.history == path)
            .and_then(|n| n.parent_seq[player.index()])
    }

    pub fn payoff_components(&self) -> PayoffComponents {
        let (n1, n2) = (self.num_sequences(Player::P1), self.num_sequences(Player::P2));
        let mut fold = Triplets::new(n1, n2);
        let mut showdown = Triplets::new(n1, n2);
        for t in &self.terminals {
            let [q1, q2] = t.contributions;
            match t.kind {
                TerminalKind::Fold(Player::P2) => fold.push(t.seqs[0], t.seqs[1], q2),
                TerminalKind::Fold(Player::P1) => fold.push(t.seqs[0], t.seqs[1], -q1),
                TerminalKind::Showdown => showdown.push(t.seqs[0], t.seqs[1], q1),
            }
        }
        PayoffComponents {
            fold: fold.to_csr(),
            showdown: showdown.to_csr(),
        }
    }

    /// Sequence-form constraints `F x = f` over the full treeplex of
    /// `player` with `hands` private hands.
    ///
    /// Column 0 is the empty sequence; column `1 + h * n + s` is sequence
    /// `s` under hand `h`. Row 0 fixes the empty sequence to one; row
    /// `1 + h * m + i` is the flow constraint of infoset `i` under hand `h`.
    pub fn sequence_constraints(&self, player: Player, hands: usize) -> Result<(CsrMatrix, Vec<f64>)> {
        if hands == 0 {
            return Err(Error::InvalidInput("hand count must be at least 1".into()));
        }
        let n = self.num_sequences(player);
        let infosets = self.infosets(player);
        let m = infosets.len();
        let rows = 1 + hands * m;
        let mut t = Triplets::new(rows, 1 + hands * n);
        t.push(0, 0, 1.0);
        for h in 0..hands {
            for (i, info) in infosets.iter().enumerate() {
                let row = 1 + h * m + i;
                for s in info.seqs() {
                    t.push(row, 1 + h * n + s, 1.0);
                }
                let parent = info.parent.map_or(0, |p| 1 + h * n + p);
                t.push(row, parent, -1.0);
            }
        }
        let mut rhs = vec![0.0; rows];
        rhs[0] = 1.0;
        Ok((t.to_csr(), rhs))
    }

    /// Action path ending with sequence `seq` of `player`.
    pub fn sequence_label(&self, player: Player, seq: usize) -> String {
        let info = &self.infosets[player.index()][self.infoset_of_sequence(player, seq)];
        match &self.nodes[info.node].kind {
            NodeKind::Decision { children, .. } => self.path_label(children[seq - info.first_seq]),
            NodeKind::Terminal { .. } => unreachable!("infosets sit on decision nodes"),
        }
    }

    /// Human-readable action path of a node, e.g. `check/bet/fold`.
    pub fn path_label(&self, node: usize) -> String {
        let h = &self.nodes[node].history;
        if h.is_empty() {
            return "root".into();
        }
        h.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("/")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ActionKind::*;

    #[test]
    fn check_only_tree() {
        let cfg = BettingConfig {
            stacks: [100.0, 100.0],
            pot_contribution: 10.0,
            menus: [BetMenu::default(), BetMenu::default()],
            all_in: false,
            raise_cap: None,
        };
        let sk = Skeleton::build(&cfg).unwrap();
        assert_eq!(sk.terminals().len(), 1);
        assert_eq!(sk.terminals()[0].kind, TerminalKind::Showdown);
        assert_eq!(sk.num_sequences(Player::P1), 1);
        assert_eq!(sk.num_sequences(Player::P2), 1);
        assert_eq!(sk.terminal_by_path(&[Check, Check]).unwrap().contributions, [10.0, 10.0]);
    }

    #[test]
    fn fig1_node_d_contributions() {
        let sk = Skeleton::build(&BettingConfig::fig1()).unwrap();
        let d = sk.nodes().iter().find(|n| n.history == [Bet]).unwrap();
        assert_eq!(d.contributions, [4687.5, 1875.0]);
        assert_eq!(sk.terminals().len(), 21);
    }

    #[test]
    fn fold_and_showdown_payoffs() {
        let sk = Skeleton::build(&BettingConfig::fig1()).unwrap();
        let pc = sk.payoff_components();
        let l = sk.terminal_by_path(&[Bet, Fold]).unwrap();
        assert_eq!(pc.fold.get(l.seqs[0], l.seqs[1]), 1875.0);
        let p = sk.terminal_by_path(&[Check, Bet, Fold]).unwrap();
        assert_eq!(pc.fold.get(p.seqs[0], p.seqs[1]), -1875.0);
        let t = sk.terminal_by_path(&[Bet, Raise, Call]).unwrap();
        assert_eq!(pc.showdown.get(t.seqs[0], t.seqs[1]), 11718.75);
        assert_eq!(pc.fold.nnz() + pc.showdown.nnz(), sk.terminals().len());
        for (i, j, _) in pc.fold.iter() {
            assert_eq!(pc.showdown.get(i, j), 0.0);
        }
        for (_, _, v) in pc.showdown.iter() {
            assert!(v > 0.0);
        }
        // (check, check-by-P2-after-bet) is not a terminal pair
        let s1 = sk.sequence_by_path(Player::P1, &[Check]).unwrap();
        let s2 = sk.sequence_by_path(Player::P2, &[Bet, Call]).unwrap();
        assert_eq!(pc.fold.get(s1, s2), 0.0);
        assert_eq!(pc.showdown.get(s1, s2), 0.0);
    }

    #[test]
    fn raise_cap_limits_reraises() {
        let mut cfg = BettingConfig::fig1();
        cfg.raise_cap = Some(0);
        let sk = Skeleton::build(&cfg).unwrap();
        assert!(sk
            .nodes()
            .iter()
            .all(|n| !n.history.contains(&Raise)));
        assert!(sk.terminal_by_path(&[Bet, AllIn, Call]).is_none());
    }

    #[test]
    fn duplicate_sizes_collapse() {
        let mut cfg = BettingConfig::fig1();
        cfg.menus = [BetMenu::uniform(&[0.75, 0.75, 50.0]), BetMenu::uniform(&[0.75])];
        let sk = Skeleton::build(&cfg).unwrap();
        // 50x pot clamps onto the explicit all-in
        let root = &sk.nodes()[0];
        if let NodeKind::Decision { actions, .. } = &root.kind {
            assert_eq!(actions.len(), 3);
        } else {
            panic!("root is a decision node");
        }
    }

    #[test]
    fn constraints_for_single_sequence_tree() {
        let cfg = BettingConfig {
            stacks: [100.0, 100.0],
            pot_contribution: 10.0,
            menus: [BetMenu::default(), BetMenu::default()],
            all_in: false,
            raise_cap: None,
        };
        let sk = Skeleton::build(&cfg).unwrap();
        let (f, rhs) = sk.sequence_constraints(Player::P1, 3).unwrap();
        assert_eq!((f.nrows(), f.ncols()), (4, 4));
        assert_eq!(rhs, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(sk.sequence_constraints(Player::P1, 0).is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = BettingConfig::fig1();
        cfg.stacks[0] = 0.0;
        assert!(Skeleton::build(&cfg).is_err());
        let mut cfg = BettingConfig::fig1();
        cfg.menus[1].facing_bet = vec![-0.5];
        assert!(Skeleton::build(&cfg).is_err());
    }

    #[test]
    fn libratus_abstraction_builds() {
        let sk = Skeleton::build(&BettingConfig::libratus(1875.0, 18125.0)).unwrap();
        for t in sk.terminals() {
            assert!(t.contributions.iter().all(|&c| c <= 20000.0 + MONEY_TOL));
            if t.kind == TerminalKind::Showdown {
                assert_eq!(t.contributions[0], t.contributions[1]);
            }
        }
        assert!(sk.num_sequences(Player::P1) > 50);
        assert!(sk.num_sequences(Player::P2) > 50);
    }
}
