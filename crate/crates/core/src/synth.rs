//! Synthetic and bundled river instances.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cards::{Board, Card, Deck, Hand};
use crate::error::{Error, Result};
use crate::export::instance_from_json;
use crate::kron::RiverInstance;
use crate::skeleton::{BetMenu, BettingConfig};

/// Names of the instances shipped with the crate.
pub const BUNDLED: [&str; 4] = ["fig1", "synth20", "bluff", "all_tie"];

/// A bundled instance by name, parsed from its shipped JSON file.
pub fn bundled(name: &str) -> Result<RiverInstance> {
    instance_from_json(bundled_json(name)?)
}

pub fn bundled_json(name: &str) -> Result<&'static str> {
    Ok(match name {
        "fig1" => include_str!("../instances/fig1.json"),
        "synth20" => include_str!("../instances/synth20.json"),
        "bluff" => include_str!("../instances/bluff.json"),
        "all_tie" => include_str!("../instances/all_tie.json"),
        _ => return Err(Error::InvalidInput(format!("no bundled instance named {name:?}"))),
    })
}

/// The bundled instances rebuilt in code; the shipped files are generated
/// from these.
pub fn bundled_source(name: &str) -> Result<RiverInstance> {
    match name {
        "fig1" => fig1(),
        "synth20" => synth20(),
        "bluff" => bluff(),
        "all_tie" => all_tie(),
        _ => Err(Error::InvalidInput(format!("no bundled instance named {name:?}"))),
    }
}

/// Every two-card hand from `deck` that avoids `board`.
pub fn all_hands(deck: &Deck, board: &Board) -> Vec<Hand> {
    let cards: Vec<Card> = deck.cards().into_iter().filter(|c| !board.contains(*c)).collect();
    let mut hands = Vec::with_capacity(cards.len() * cards.len() / 2);
    for (i, &a) in cards.iter().enumerate() {
        for &b in &cards[i + 1..] {
            hands.push(Hand::new(a, b).expect("distinct cards"));
        }
    }
    hands.sort();
    hands
}

/// The twenty cards ten through ace.
pub fn deck20() -> Deck {
    Deck::grid(10..=14, &[0, 1, 2, 3]).expect("distinct cards")
}

/// Betting of the golden configuration with a handful of hands per side.
pub fn fig1() -> Result<RiverInstance> {
    let board: Board = "Qh9s6d3c2h".parse()?;
    let p1 = ["AhAd", "KsQd", "Jh8h", "9c9d", "7c5c", "4d4s"];
    let p2 = ["AsKs", "QcJc", "Th9h", "8d8s", "6c6s", "5d4c"];
    let list = |codes: &[&str]| -> Result<Vec<(Hand, f64)>> {
        codes.iter().map(|c| Ok((c.parse::<Hand>()?, 1.0))).collect()
    };
    RiverInstance::new(Deck::Standard52, board, [list(&p1)?, list(&p2)?], BettingConfig::fig1())
}

/// Twenty-card deck, every remaining hand for both players, uniform.
pub fn synth20() -> Result<RiverInstance> {
    let deck = deck20();
    let board: Board = "AhKdQsThTc".parse()?;
    let hands: Vec<(Hand, f64)> = all_hands(&deck, &board).into_iter().map(|h| (h, 1.0)).collect();
    RiverInstance::new(deck, board, [hands.clone(), hands], BettingConfig::fig1())
}

/// Player 1 holds the nuts or air with equal odds and may bet the pot;
/// player 2 holds a bluff catcher and can only check behind, call or fold.
pub fn bluff() -> Result<RiverInstance> {
    let board: Board = "2c7d9hJc3s".parse()?;
    let p1 = vec![("AsAh".parse()?, 0.5), ("5d4d".parse()?, 0.5)];
    let p2 = vec![("KsKh".parse()?, 1.0)];
    let config = BettingConfig {
        stacks: [1000.0, 1000.0],
        pot_contribution: 100.0,
        menus: [
            BetMenu {
                first_action: vec![1.0],
                ..BetMenu::default()
            },
            BetMenu::default(),
        ],
        all_in: false,
        raise_cap: Some(0),
    };
    RiverInstance::new(Deck::Standard52, board, [p1, p2], config)
}

/// A royal flush on the board: every showdown is a tie.
pub fn all_tie() -> Result<RiverInstance> {
    let board: Board = "AsKsQsJsTs".parse()?;
    let p1 = vec![("2c2d".parse()?, 1.0), ("8h7h".parse()?, 1.0)];
    let p2 = vec![("9d9c".parse()?, 1.0), ("5h4h".parse()?, 2.0)];
    RiverInstance::new(Deck::Standard52, board, [p1, p2], BettingConfig::fig1())
}

/// Random instance: `deck` shuffled, five board cards, then up to
/// `max_hands` distinct hands per side with weights in `(0, 1]`.
pub fn random_instance(
    rng: &mut impl Rng,
    deck: &Deck,
    max_hands: usize,
    config: &BettingConfig,
) -> Result<RiverInstance> {
    let mut cards = deck.cards();
    if cards.len() < 7 {
        return Err(Error::InvalidInput("deck needs at least seven cards".into()));
    }
    loop {
        cards.shuffle(rng);
        let board = Board::new(cards[..5].try_into().expect("five cards"))?;
        let pool = all_hands(deck, &board);
        let mut pick = || -> Vec<(Hand, f64)> {
            let count = rng.random_range(1..=max_hands.min(pool.len()).max(1));
            pool.choose_multiple(rng, count)
                .map(|&h| (h, 1.0 - rng.random::<f64>()))
                .collect()
        };
        let beliefs = [pick(), pick()];
        match RiverInstance::new(deck.clone(), board, beliefs, config.clone()) {
            Err(Error::DegenerateBeliefs) => continue,
            other => return other,
        }
    }
}

/// Uniform random subsets of `hands` hands per side from a standard deck.
pub fn synthetic(hands: usize, seed: u64, config: &BettingConfig) -> Result<RiverInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deck = Deck::Standard52;
    let mut cards = deck.cards();
    cards.shuffle(&mut rng);
    let board = Board::new(cards[..5].try_into().expect("five cards"))?;
    let pool = all_hands(&deck, &board);
    if hands == 0 || hands > pool.len() {
        return Err(Error::InvalidInput(format!("hand count must be in 1..={}", pool.len())));
    }
    let mut pick = || -> Vec<(Hand, f64)> {
        pool.choose_multiple(&mut rng, hands).map(|&h| (h, 1.0)).collect()
    };
    let beliefs = [pick(), pick()];
    RiverInstance::new(deck, board, beliefs, config.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::Player;

    #[test]
    fn synth20_has_all_hands() {
        let inst = synth20().unwrap();
        assert_eq!(inst.hands(Player::P1).len(), 105);
        assert_eq!(inst.hands(Player::P2).len(), 105);
    }

    #[test]
    fn synthetic_is_seeded() {
        let a = synthetic(30, 7, &BettingConfig::fig1()).unwrap();
        let b = synthetic(30, 7, &BettingConfig::fig1()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hands(Player::P2).len(), 30);
    }

    #[test]
    fn random_instances_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, &deck20(), 12, &BettingConfig::fig1()).unwrap();
            assert!(inst.hands(Player::P1).len() <= 12);
            assert!(inst.hands(Player::P2).len() <= 12);
        }
    }
}
