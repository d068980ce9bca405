//! Instance description files (JSON).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cards::{Board, Card, Deck, Hand};
use crate::error::{Error, Result};
use crate::kron::RiverInstance;
use crate::skeleton::{BetMenu, BettingConfig, Player};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeckSpec {
    /// Only `"standard52"` is recognized.
    Named(String),
    Cards(Vec<String>),
}

/// Hand code (e.g. `"AsKd"`) to unnormalized weight, per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefsSpec {
    pub player1: BTreeMap<String, f64>,
    pub player2: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BettingSpec {
    pub player1: BetMenu,
    pub player2: BetMenu,
    pub all_in: bool,
    #[serde(default)]
    pub raise_cap: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub deck: DeckSpec,
    pub board: Vec<String>,
    pub beliefs: BeliefsSpec,
    pub stacks: [f64; 2],
    pub pot_contribution: f64,
    pub betting: BettingSpec,
}

impl InstanceFile {
    pub fn from_instance(inst: &RiverInstance) -> Self {
        let deck = match inst.deck() {
            Deck::Standard52 => DeckSpec::Named("standard52".into()),
            Deck::Cards(cards) => DeckSpec::Cards(cards.iter().map(|c| c.to_string()).collect()),
        };
        let beliefs = |p: Player| {
            inst.beliefs(p)
                .into_iter()
                .map(|(h, w)| (h.to_string(), w))
                .collect()
        };
        let cfg = inst.config();
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            deck,
            board: inst.board().cards().iter().map(|c| c.to_string()).collect(),
            beliefs: BeliefsSpec {
                player1: beliefs(Player::P1),
                player2: beliefs(Player::P2),
            },
            stacks: cfg.stacks,
            pot_contribution: cfg.pot_contribution,
            betting: BettingSpec {
                player1: cfg.menus[0].clone(),
                player2: cfg.menus[1].clone(),
                all_in: cfg.all_in,
                raise_cap: cfg.raise_cap,
            },
        }
    }

    pub fn to_instance(&self) -> Result<RiverInstance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::parse(
                "schema_version",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        let deck = match &self.deck {
            DeckSpec::Named(n) if n == "standard52" => Deck::Standard52,
            DeckSpec::Named(n) => return Err(Error::parse("deck", format!("unknown deck {n:?}"))),
            DeckSpec::Cards(codes) => Deck::Cards(
                codes
                    .iter()
                    .map(|c| c.parse::<Card>())
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let board: Vec<Card> = self.board.iter().map(|c| c.parse()).collect::<Result<_>>()?;
        let board = Board::new(
            board
                .try_into()
                .map_err(|_| Error::parse("board", "expected five cards"))?,
        )?;
        let beliefs = |m: &BTreeMap<String, f64>| -> Result<Vec<(Hand, f64)>> {
            m.iter().map(|(h, &w)| Ok((h.parse::<Hand>()?, w))).collect()
        };
        let config = BettingConfig {
            stacks: self.stacks,
            pot_contribution: self.pot_contribution,
            menus: [self.betting.player1.clone(), self.betting.player2.clone()],
            all_in: self.betting.all_in,
            raise_cap: self.betting.raise_cap,
        };
        RiverInstance::new(
            deck,
            board,
            [beliefs(&self.beliefs.player1)?, beliefs(&self.beliefs.player2)?],
            config,
        )
    }
}

pub fn instance_from_json(text: &str) -> Result<RiverInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    file.to_instance()
}

pub fn instance_to_json(inst: &RiverInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceFile::from_instance(inst))? + "\n")
}

pub fn read_instance(path: &Path) -> Result<RiverInstance> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub fn write_instance(inst: &RiverInstance, path: &Path) -> Result<()> {
    fs::write(path, instance_to_json(inst)?)?;
    Ok(())
}
