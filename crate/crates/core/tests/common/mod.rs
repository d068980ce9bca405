//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riverkron::cards::{Card, Hand};
use riverkron::skeleton::{NodeKind, TerminalKind};
use riverkron::synth::{deck20, random_instance};
use riverkron::{BettingConfig, Deck, Player, RiverInstance, Skeleton};

/// Five-card strength as (category, tiebreak ranks), compared
/// lexicographically. Categories: 0 high card .. 8 straight flush.
pub fn rank5(cards: &[Card; 5]) -> (u8, Vec<u8>) {
    let mut ranks: Vec<u8> = cards.iter().map(|c| c.rank()).collect();
    ranks.sort_unstable_by(|a, b| b.cmp(a));
    let flush = cards.iter().all(|c| c.suit() == cards[0].suit());
    let distinct = {
        let mut d = ranks.clone();
        d.dedup();
        d.len() == 5
    };
    let straight_high = if distinct && ranks[0] - ranks[4] == 4 {
        Some(ranks[0])
    } else if ranks == [14, 5, 4, 3, 2] {
        Some(5)
    } else {
        None
    };
    // groups sorted by (count desc, rank desc)
    let mut groups: Vec<(usize, u8)> = Vec::new();
    for &r in &ranks {
        match groups.iter_mut().find(|g| g.1 == r) {
            Some(g) => g.0 += 1,
            None => groups.push((1, r)),
        }
    }
    groups.sort_unstable_by(|a, b| b.cmp(a));
    let by_group: Vec<u8> = groups.iter().map(|g| g.1).collect();
    let shape: Vec<usize> = groups.iter().map(|g| g.0).collect();
    match (straight_high, flush, shape.as_slice()) {
        (Some(h), true, _) => (8, vec![h]),
        (_, _, [4, 1]) => (7, by_group),
        (_, _, [3, 2]) => (6, by_group),
        (None, true, _) => (5, ranks),
        (Some(h), false, _) => (4, vec![h]),
        (_, _, [3, 1, 1]) => (3, by_group),
        (_, _, [2, 2, 1]) => (2, by_group),
        (_, _, [2, 1, 1, 1]) => (1, by_group),
        _ => (0, ranks),
    }
}

/// Best five of seven by trying all 21 subsets.
pub fn rank7(cards: &[Card; 7]) -> (u8, Vec<u8>) {
    let mut best = None;
    for skip_a in 0..7 {
        for skip_b in skip_a + 1..7 {
            let five: Vec<Card> = (0..7)
                .filter(|&i| i != skip_a && i != skip_b)
                .map(|i| cards[i])
                .collect();
            let r = rank5(&five.try_into().unwrap());
            if best.as_ref().is_none_or(|b| &r > b) {
                best = Some(r);
            }
        }
    }
    best.unwrap()
}

pub fn seven(hand: &Hand, board: &[Card; 5]) -> [Card; 7] {
    let h = hand.cards();
    [h[0], h[1], board[0], board[1], board[2], board[3], board[4]]
}

/// +1 / 0 / -1 by the oracle ranker.
pub fn oracle_gamma(h1: &Hand, h2: &Hand, board: &[Card; 5]) -> i8 {
    match rank7(&seven(h1, board)).cmp(&rank7(&seven(h2, board))) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    }
}

/// Dense payoff built by walking every terminal for every hand pair,
/// with chance weights taken from the raw belief weights.
pub fn tree_walk_dense(inst: &RiverInstance) -> DMatrix<f64> {
    let sk = Skeleton::build(inst.config()).unwrap();
    let (n1, n2) = (sk.num_sequences(Player::P1), sk.num_sequences(Player::P2));
    let (h1, h2) = (inst.hands(Player::P1), inst.hands(Player::P2));
    let (w1, w2) = (inst.weights(Player::P1), inst.weights(Player::P2));
    let board = inst.board().cards();
    let mut total = 0.0;
    for (a, wa) in h1.iter().zip(w1) {
        for (b, wb) in h2.iter().zip(w2) {
            if !a.overlaps(b) {
                total += wa * wb;
            }
        }
    }
    let mut dense = DMatrix::zeros(h1.len() * n1, h2.len() * n2);
    for (i, a) in h1.iter().enumerate() {
        for (j, b) in h2.iter().enumerate() {
            if a.overlaps(b) {
                continue;
            }
            let pi = w1[i] * w2[j] / total;
            let g = oracle_gamma(a, b, &board) as f64;
            for node in sk.nodes() {
                let NodeKind::Terminal { terminal } = node.kind else {
                    continue;
                };
                let t = &sk.terminals()[terminal];
                let value = match t.kind {
                    TerminalKind::Fold(Player::P2) => node.contributions[1],
                    TerminalKind::Fold(Player::P1) => -node.contributions[0],
                    TerminalKind::Showdown => g * node.contributions[0],
                };
                let (s1, s2) = (
                    node.parent_seq[0].expect("player 1 acts first"),
                    node.parent_seq[1].expect("player 2 acts before any terminal"),
                );
                dense[(i * n1 + s1, j * n2 + s2)] += pi * value;
            }
        }
    }
    dense
}

/// Random small instances: decks of at most twenty cards, at most twelve
/// hands per side, random weights, the golden betting configuration.
pub fn corpus(count: usize, seed: u64) -> Vec<RiverInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decks = [
        deck20(),
        Deck::grid(8..=14, &[0, 1]).unwrap(),
        Deck::grid([2, 3, 4, 9, 10, 11, 12, 13, 14], &[0, 2]).unwrap(),
        Deck::grid(2..=6, &[0, 1, 2, 3]).unwrap(),
    ];
    (0..count)
        .map(|k| random_instance(&mut rng, &decks[k % decks.len()], 12, &BettingConfig::fig1()).unwrap())
        .collect()
}

/// Every deterministic behavioral strategy of `player` as a sequence-form
/// vector, one full action choice per (hand, infoset).
pub fn all_pure_strategies(sk: &Skeleton, player: Player, hands: usize) -> Vec<Vec<f64>> {
    let infos = sk.infosets(player);
    let n = sk.num_sequences(player);
    let mut per_hand: Vec<Vec<f64>> = Vec::new();
    let mut choice = vec![0usize; infos.len()];
    loop {
        let mut x = vec![0.0; n];
        for (i, info) in infos.iter().enumerate() {
            let reach = info.parent.map_or(1.0, |p| x[p]);
            x[info.first_seq + choice[i]] = reach;
        }
        if !per_hand.contains(&x) {
            per_hand.push(x);
        }
        let mut i = 0;
        while i < infos.len() {
            choice[i] += 1;
            if choice[i] < infos[i].num_actions {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == infos.len() {
            break;
        }
    }
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..hands {
        let mut next = Vec::new();
        for prefix in &out {
            for p in &per_hand {
                let mut v = prefix.clone();
                v.extend(p);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// `max_y x^T G y`-style best response by brute force over pure strategies.
pub fn brute_force_br(a: &DMatrix<f64>, sk: &Skeleton, responder: Player, hands: usize, opponent: &[f64]) -> f64 {
    let g: Vec<f64> = match responder {
        Player::P1 => (a * nalgebra::DVector::from_column_slice(opponent)).iter().copied().collect(),
        Player::P2 => (a.transpose() * nalgebra::DVector::from_column_slice(opponent))
            .iter()
            .map(|v| -v)
            .collect(),
    };
    all_pure_strategies(sk, responder, hands)
        .iter()
        .map(|x| x.iter().zip(&g).map(|(p, q)| p * q).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

use riverkron::skeleton::ActionKind;

/// Terminal pot contributions of the golden three-quarter-pot tree:
/// label, action path, contributions of players 1 and 2.
pub fn golden_table() -> Vec<(&'static str, Vec<ActionKind>, f64, f64)> {
    use ActionKind::*;
    vec![
        ("f", vec![Check, Check], 1875.0, 1875.0),
        ("h", vec![AllIn, Fold], 20000.0, 1875.0),
        ("i", vec![AllIn, Call], 20000.0, 20000.0),
        ("j", vec![Bet, Call], 4687.5, 4687.5),
        ("l", vec![Bet, Fold], 4687.5, 1875.0),
        ("n", vec![Check, Bet, Call], 4687.5, 4687.5),
        ("p", vec![Check, Bet, Fold], 1875.0, 4687.5),
        ("r", vec![Check, AllIn, Fold], 1875.0, 20000.0),
        ("s", vec![Check, AllIn, Call], 20000.0, 20000.0),
        ("t", vec![Bet, Raise, Call], 11718.75, 11718.75),
        ("v", vec![Bet, Raise, Fold], 4687.5, 11718.75),
        ("w", vec![Bet, AllIn, Fold], 4687.5, 20000.0),
        ("x", vec![Bet, AllIn, Call], 20000.0, 20000.0),
        ("y", vec![Check, Bet, Raise, Fold], 11718.75, 4687.5),
        ("z", vec![Check, Bet, Raise, Call], 11718.75, 11718.75),
        ("Phi", vec![Check, Bet, AllIn, Fold], 20000.0, 4687.5),
        ("Theta", vec![Check, Bet, AllIn, Call], 20000.0, 20000.0),
        ("Lambda", vec![Bet, Raise, AllIn, Fold], 20000.0, 11718.75),
        ("Xi", vec![Bet, Raise, AllIn, Call], 20000.0, 20000.0),
        ("Psi", vec![Check, Bet, Raise, AllIn, Fold], 11718.75, 20000.0),
        ("Omega", vec![Check, Bet, Raise, AllIn, Call], 20000.0, 20000.0),
    ]
}
