//! Cards, hands, boards and seven-card hand ranking.
//!
//! Ranks run from 2 to 14 (ace high), suits from 0 to 3 in the order
//! `c d h s`. Reduced decks are any subset of the 52 cards; the ranking
//! rules are the standard ones regardless of which cards exist.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const RANK_CHARS: &[u8; 13] = b"23456789TJQKA";
const SUIT_CHARS: &[u8; 4] = b"cdhs";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card {
    rank: u8,
    suit: u8,
}

impl Card {
    pub fn new(rank: u8, suit: u8) -> Result<Self> {
        if !(2..=14).contains(&rank) || suit > 3 {
            return Err(Error::InvalidInput(format!(
                "card out of range: rank {rank}, suit {suit}"
            )));
        }
        Ok(Card { rank, suit })
    }

    pub fn rank(self) -> u8 {
        self.rank
    }

    pub fn suit(self) -> u8 {
        self.suit
    }

    /// Dense index in `0..52`.
    pub fn index(self) -> usize {
        (self.rank as usize - 2) * 4 + self.suit as usize
    }

    fn bit(self) -> u64 {
        1u64 << self.index()
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            RANK_CHARS[self.rank as usize - 2] as char,
            SUIT_CHARS[self.suit as usize] as char
        )
    }
}

impl FromStr for Card {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.as_bytes();
        if b.len() != 2 {
            return Err(Error::UnknownCard(s.to_string()));
        }
        let rank = RANK_CHARS
            .iter()
            .position(|&c| c == b[0].to_ascii_uppercase())
            .ok_or_else(|| Error::UnknownCard(s.to_string()))?;
        let suit = SUIT_CHARS
            .iter()
            .position(|&c| c == b[1].to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownCard(s.to_string()))?;
        Ok(Card {
            rank: rank as u8 + 2,
            suit: suit as u8,
        })
    }
}

/// Parses a run of concatenated two-character card codes, e.g. `"2c7d9h"`.
pub fn parse_cards(s: &str) -> Result<Vec<Card>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.len() % 2 != 0 || !s.is_ascii() {
        return Err(Error::UnknownCard(s));
    }
    (0..s.len())
        .step_by(2)
        .map(|i| s[i..i + 2].parse())
        .collect()
}

fn check_distinct(cards: &[Card]) -> Result<()> {
    let mut seen = 0u64;
    for c in cards {
        if seen & c.bit() != 0 {
            return Err(Error::DuplicateCard(c.to_string()));
        }
        seen |= c.bit();
    }
    Ok(())
}

/// Two private cards, stored higher card first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hand {
    cards: [Card; 2],
}

impl Hand {
    pub fn new(a: Card, b: Card) -> Result<Self> {
        if a == b {
            return Err(Error::DuplicateCard(a.to_string()));
        }
        Ok(Hand::canonical(a, b))
    }

    fn canonical(a: Card, b: Card) -> Self {
        if a > b {
            Hand { cards: [a, b] }
        } else {
            Hand { cards: [b, a] }
        }
    }

    /// Re-applies the canonical ordering; a no-op on any constructed hand.
    pub fn canonicalize(self) -> Self {
        Hand::canonical(self.cards[0], self.cards[1])
    }

    pub fn cards(&self) -> [Card; 2] {
        self.cards
    }

    pub fn mask(&self) -> u64 {
        self.cards[0].bit() | self.cards[1].bit()
    }

    pub fn overlaps(&self, other: &Hand) -> bool {
        self.mask() & other.mask() != 0
    }
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.cards[0], self.cards[1])
    }
}

impl FromStr for Hand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cards = parse_cards(s)?;
        if cards.len() != 2 {
            return Err(Error::InvalidInput(format!("hand needs two cards: {s:?}")));
        }
        Hand::new(cards[0], cards[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Board {
    cards: [Card; 5],
}

impl Board {
    pub fn new(cards: [Card; 5]) -> Result<Self> {
        check_distinct(&cards)?;
        Ok(Board { cards })
    }

    pub fn cards(&self) -> [Card; 5] {
        self.cards
    }

    pub fn mask(&self) -> u64 {
        self.cards.iter().fold(0, |m, c| m | c.bit())
    }

    pub fn contains(&self, card: Card) -> bool {
        self.mask() & card.bit() != 0
    }

    fn check_disjoint(&self, hand: &Hand) -> Result<()> {
        if self.mask() & hand.mask() != 0 {
            return Err(Error::InvalidInput(format!(
                "hand {hand} overlaps board {self}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cards {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Board {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cards = parse_cards(s)?;
        let cards: [Card; 5] = cards
            .try_into()
            .map_err(|_| Error::InvalidInput(format!("board needs five cards: {s:?}")))?;
        Board::new(cards)
    }
}

/// Card universe of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deck {
    Standard52,
    Cards(Vec<Card>),
}

impl Deck {
    pub fn cards(&self) -> Vec<Card> {
        match self {
            Deck::Standard52 => (2..=14)
                .flat_map(|r| (0..4).map(move |s| Card { rank: r, suit: s }))
                .collect(),
            Deck::Cards(c) => c.clone(),
        }
    }

    /// Deck made of every combination of the given ranks and suits.
    pub fn grid(ranks: impl IntoIterator<Item = u8>, suits: &[u8]) -> Result<Self> {
        let mut cards = Vec::new();
        for r in ranks {
            for &s in suits {
                cards.push(Card::new(r, s)?);
            }
        }
        check_distinct(&cards)?;
        Ok(Deck::Cards(cards))
    }

    pub fn mask(&self) -> u64 {
        self.cards().iter().fold(0, |m, c| m | c.bit())
    }

    pub fn validate(&self) -> Result<()> {
        if let Deck::Cards(c) = self {
            check_distinct(c)?;
        }
        Ok(())
    }
}

/// Packed hand strength; larger is stronger. Only the ordering is meaningful.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HandRank(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    HighCard = 0,
    Pair,
    TwoPair,
    Trips,
    Straight,
    Flush,
    FullHouse,
    Quads,
    StraightFlush,
}

impl HandRank {
    fn pack(category: Category, kickers: &[u8]) -> Self {
        let mut key = (category as u32) << 20;
        for (i, &k) in kickers.iter().take(5).enumerate() {
            key |= (k as u32) << (16 - 4 * i);
        }
        HandRank(key)
    }

    pub fn category(self) -> Category {
        match self.0 >> 20 {
            0 => Category::HighCard,
            1 => Category::Pair,
            2 => Category::TwoPair,
            3 => Category::Trips,
            4 => Category::Straight,
            5 => Category::Flush,
            6 => Category::FullHouse,
            7 => Category::Quads,
            _ => Category::StraightFlush,
        }
    }
}

/// Highest straight in a rank bitmask (bit r set for rank r), wheel included.
fn straight_top(mask: u16) -> Option<u8> {
    for top in (6..=14u8).rev() {
        let run = 0b11111u16 << (top - 4);
        if mask & run == run {
            return Some(top);
        }
    }
    let wheel = (1 << 14) | 0b111100;
    (mask & wheel == wheel).then_some(5)
}

fn top_ranks(mask: u16, n: usize) -> Vec<u8> {
    (2..=14u8).rev().filter(|&r| mask & (1 << r) != 0).take(n).collect()
}

/// Best five-card rank over any 5 to 7 distinct cards.
pub fn evaluate_cards(cards: &[Card]) -> Result<HandRank> {
    if !(5..=7).contains(&cards.len()) {
        return Err(Error::InvalidInput(format!(
            "need 5 to 7 cards, got {}",
            cards.len()
        )));
    }
    check_distinct(cards)?;

    let mut counts = [0u8; 15];
    let mut suit_masks = [0u16; 4];
    let mut all = 0u16;
    for c in cards {
        counts[c.rank as usize] += 1;
        suit_masks[c.suit as usize] |= 1 << c.rank;
        all |= 1 << c.rank;
    }

    let flush_mask = suit_masks.iter().copied().find(|m| m.count_ones() >= 5);
    if let Some(fm) = flush_mask {
        if let Some(top) = straight_top(fm) {
            return Ok(HandRank::pack(Category::StraightFlush, &[top]));
        }
    }

    let ranks_with = |n: u8| -> Vec<u8> {
        (2..=14u8).rev().filter(|&r| counts[r as usize] == n).collect()
    };
    let quads = ranks_with(4);
    let trips = ranks_with(3);
    let pairs = ranks_with(2);

    if let Some(&q) = quads.first() {
        let kicker = top_ranks(all & !(1 << q), 1);
        return Ok(HandRank::pack(Category::Quads, &[q, kicker[0]]));
    }
    if let Some(&t) = trips.first() {
        // second trips can serve as the pair
        let pair = trips.get(1).copied().into_iter().chain(pairs.first().copied()).max();
        if let Some(p) = pair {
            return Ok(HandRank::pack(Category::FullHouse, &[t, p]));
        }
    }
    if let Some(fm) = flush_mask {
        return Ok(HandRank::pack(Category::Flush, &top_ranks(fm, 5)));
    }
    if let Some(top) = straight_top(all) {
        return Ok(HandRank::pack(Category::Straight, &[top]));
    }
    if let Some(&t) = trips.first() {
        let mut k = vec![t];
        k.extend(top_ranks(all & !(1 << t), 2));
        return Ok(HandRank::pack(Category::Trips, &k));
    }
    if pairs.len() >= 2 {
        let (hi, lo) = (pairs[0], pairs[1]);
        let kicker = top_ranks(all & !(1 << hi) & !(1 << lo), 1);
        return Ok(HandRank::pack(Category::TwoPair, &[hi, lo, kicker[0]]));
    }
    if let Some(&p) = pairs.first() {
        let mut k = vec![p];
        k.extend(top_ranks(all & !(1 << p), 3));
        return Ok(HandRank::pack(Category::Pair, &k));
    }
    Ok(HandRank::pack(Category::HighCard, &top_ranks(all, 5)))
}

/// Strength of `hand` on `board`.
pub fn evaluate7(hand: &Hand, board: &Board) -> Result<HandRank> {
    board.check_disjoint(hand)?;
    let mut cards = Vec::with_capacity(7);
    cards.extend_from_slice(&hand.cards);
    cards.extend_from_slice(&board.cards);
    evaluate_cards(&cards)
}

/// True iff the two hands share no card. Both hands must avoid the board.
pub fn compatible(h1: &Hand, h2: &Hand, board: &Board) -> Result<bool> {
    board.check_disjoint(h1)?;
    board.check_disjoint(h2)?;
    Ok(!h1.overlaps(h2))
}

/// Showdown outcome for player 1: +1 win, -1 loss, 0 tie or incompatible.
pub fn gamma(h1: &Hand, h2: &Hand, board: &Board) -> Result<i8> {
    if !compatible(h1, h2, board)? {
        return Ok(0);
    }
    let (r1, r2) = (evaluate7(h1, board)?, evaluate7(h2, board)?);
    Ok(match r1.cmp(&r2) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    })
}
