//! Kronecker-factored payoff matrix of a river endgame.
//!
//! Rows of the payoff matrix `A` index player-1 `(hand, sequence)` pairs and
//! columns index player-2 pairs, flattened as `hand * n + sequence`. With
//! `lambda_i = mu_i / sqrt(beta)`,
//!
//! ```text
//! A = C (x) F + (L1 W L2) (x) S,   C = lambda1 lambda2^T - L1 Hx L2
//! ```
//!
//! where `W` is the win-lose matrix, `Hx` the incompatibility indicator and
//! `F`, `S` the skeleton's fold and showdown matrices.

use nalgebra::DMatrix;

use crate::cards::{compatible, evaluate7, gamma, Board, Deck, Hand, HandRank};
use crate::error::{Error, Result};
use crate::skeleton::{BettingConfig, Player, Skeleton};
use crate::sparse::{CsrMatrix, Triplets};

/// Default cap on the number of entries of a dense expansion.
pub const DENSE_GUARD: u128 = 50_000_000;

/// Dense `rows x cols` matrix of small integers (win-lose or 0/1 indicator).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl SignMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SignMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i8) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        SignMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let mut t = Triplets::new(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.push(i, j, self.get(i, j) as f64);
            }
        }
        t.to_csr()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) as f64)
    }
}

/// Validated river endgame: board, rank-sorted hand lists, beliefs, betting.
#[derive(Clone, Debug)]
pub struct RiverInstance {
    deck: Deck,
    board: Board,
    hands: [Vec<Hand>; 2],
    weights: [Vec<f64>; 2],
    ranks: [Vec<HandRank>; 2],
    order: [Vec<usize>; 2],
    config: BettingConfig,
}

/// Equal when deck, board, sorted beliefs and betting agree; the input
/// order of the belief lists is not compared.
impl PartialEq for RiverInstance {
    fn eq(&self, other: &Self) -> bool {
        self.deck == other.deck
            && self.board == other.board
            && self.hands == other.hands
            && self.weights == other.weights
            && self.config == other.config
    }
}

impl RiverInstance {
    /// Hands are sorted ascending by strength on the board, ties by the
    /// canonical card order; the sorting permutation is kept in `order`.
    pub fn new(
        deck: Deck,
        board: Board,
        beliefs: [Vec<(Hand, f64)>; 2],
        config: BettingConfig,
    ) -> Result<Self> {
        deck.validate()?;
        config.validate()?;
        let deck_mask = deck.mask();
        if board.mask() & !deck_mask != 0 {
            return Err(Error::InvalidInput(format!("board {board} is not in the deck")));
        }
        let mut hands: [Vec<Hand>; 2] = Default::default();
        let mut weights: [Vec<f64>; 2] = Default::default();
        let mut ranks: [Vec<HandRank>; 2] = Default::default();
        let mut order: [Vec<usize>; 2] = Default::default();
        for (p, list) in beliefs.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::InvalidInput(format!("player {} has no hands", p + 1)));
            }
            let mut entries = Vec::with_capacity(list.len());
            for (idx, &(hand, w)) in list.iter().enumerate() {
                if !(w.is_finite() && w >= 0.0) {
                    return Err(Error::InvalidInput(format!("belief weight of {hand} is {w}")));
                }
                if hand.mask() & !deck_mask != 0 {
                    return Err(Error::InvalidInput(format!("hand {hand} is not in the deck")));
                }
                let rank = evaluate7(&hand, &board)?;
                entries.push((rank, hand, w, idx));
            }
            entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
            if entries.windows(2).any(|w| w[0].1 == w[1].1) {
                return Err(Error::InvalidInput(format!(
                    "duplicate hand in player {} beliefs",
                    p + 1
                )));
            }
            for (rank, hand, w, idx) in entries {
                ranks[p].push(rank);
                hands[p].push(hand);
                weights[p].push(w);
                order[p].push(idx);
            }
        }
        let inst = RiverInstance {
            deck,
            board,
            hands,
            weights,
            ranks,
            order,
            config,
        };
        if inst.beta() <= 0.0 {
            return Err(Error::DegenerateBeliefs);
        }
        Ok(inst)
    }

    pub fn deck(&self) -> &Deck {
        &self.deck
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn config(&self) -> &BettingConfig {
        &self.config
    }

    pub fn hands(&self, player: Player) -> &[Hand] {
        &self.hands[player.index()]
    }

    pub fn weights(&self, player: Player) -> &[f64] {
        &self.weights[player.index()]
    }

    pub fn ranks(&self, player: Player) -> &[HandRank] {
        &self.ranks[player.index()]
    }

    /// `order(p)[i]` is the position in the input belief list of sorted hand `i`.
    pub fn order(&self, player: Player) -> &[usize] {
        &self.order[player.index()]
    }

    pub fn beliefs(&self, player: Player) -> Vec<(Hand, f64)> {
        let p = player.index();
        self.hands[p].iter().copied().zip(self.weights[p].iter().copied()).collect()
    }

    /// Total weight of compatible hand pairs.
    pub fn beta(&self) -> f64 {
        let mut beta = 0.0;
        for (h1, w1) in self.hands[0].iter().zip(&self.weights[0]) {
            for (h2, w2) in self.hands[1].iter().zip(&self.weights[1]) {
                if !h1.overlaps(h2) {
                    beta += w1 * w2;
                }
            }
        }
        beta
    }

    /// Copy without zero-weight hands.
    pub fn prune_zero_beliefs(&self) -> Result<RiverInstance> {
        let keep = |p: Player| -> Vec<(Hand, f64)> {
            self.beliefs(p).into_iter().filter(|&(_, w)| w > 0.0).collect()
        };
        RiverInstance::new(
            self.deck.clone(),
            self.board,
            [keep(Player::P1), keep(Player::P2)],
            self.config.clone(),
        )
    }

    pub fn with_config(&self, config: BettingConfig) -> Result<RiverInstance> {
        RiverInstance::new(
            self.deck.clone(),
            self.board,
            [self.beliefs(Player::P1), self.beliefs(Player::P2)],
            config,
        )
    }
}

/// The factored payoff representation.
#[derive(Clone, Debug)]
pub struct KronPayoff {
    skeleton: Skeleton,
    fold: CsrMatrix,
    showdown: CsrMatrix,
    hands: [Vec<Hand>; 2],
    lambda: [Vec<f64>; 2],
    beta: f64,
    win: SignMatrix,
    incompatible: SignMatrix,
    pot_contribution: f64,
}

impl KronPayoff {
    pub fn assemble(instance: &RiverInstance) -> Result<KronPayoff> {
        let skeleton = Skeleton::build(instance.config())?;
        let pc = skeleton.payoff_components();
        let beta = instance.beta();
        if beta <= 0.0 {
            return Err(Error::DegenerateBeliefs);
        }
        let scale = beta.sqrt();
        let lambda = [
            instance.weights(Player::P1).iter().map(|w| w / scale).collect(),
            instance.weights(Player::P2).iter().map(|w| w / scale).collect(),
        ];
        let (h1, h2) = (instance.hands(Player::P1), instance.hands(Player::P2));
        let board = instance.board();
        let mut win = SignMatrix::zeros(h1.len(), h2.len());
        let mut incompatible = SignMatrix::zeros(h1.len(), h2.len());
        for (i, a) in h1.iter().enumerate() {
            for (j, b) in h2.iter().enumerate() {
                if compatible(a, b, board)? {
                    win.set(i, j, gamma(a, b, board)?);
                } else {
                    incompatible.set(i, j, 1);
                }
            }
        }
        Ok(KronPayoff {
            skeleton,
            fold: pc.fold,
            showdown: pc.showdown,
            hands: [h1.to_vec(), h2.to_vec()],
            lambda,
            beta,
            win,
            incompatible,
            pot_contribution: instance.config().pot_contribution,
        })
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn fold(&self) -> &CsrMatrix {
        &self.fold
    }

    pub fn showdown(&self) -> &CsrMatrix {
        &self.showdown
    }

    pub fn hands(&self, player: Player) -> &[Hand] {
        &self.hands[player.index()]
    }

    pub fn num_hands(&self, player: Player) -> usize {
        self.hands[player.index()].len()
    }

    pub fn num_sequences(&self, player: Player) -> usize {
        self.skeleton.num_sequences(player)
    }

    /// Length of the `(hand, sequence)` index of `player`.
    pub fn dim(&self, player: Player) -> usize {
        self.num_hands(player) * self.num_sequences(player)
    }

    pub fn lambda(&self, player: Player) -> &[f64] {
        &self.lambda[player.index()]
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn win(&self) -> &SignMatrix {
        &self.win
    }

    pub fn incompatible(&self) -> &SignMatrix {
        &self.incompatible
    }

    pub fn pot_contribution(&self) -> f64 {
        self.pot_contribution
    }

    /// Money in the pot when the endgame starts.
    pub fn initial_pot(&self) -> f64 {
        2.0 * self.pot_contribution
    }

    /// Chance probability of the sorted hand pair `(i, j)`.
    #[inline]
    pub fn pi_index(&self, i: usize, j: usize) -> f64 {
        if self.incompatible.get(i, j) != 0 {
            0.0
        } else {
            self.lambda[0][i] * self.lambda[1][j]
        }
    }

    pub fn pi(&self, h1: &Hand, h2: &Hand) -> Result<f64> {
        let find = |p: usize, h: &Hand| {
            self.hands[p]
                .iter()
                .position(|x| x == h)
                .ok_or_else(|| Error::UnknownHand(h.to_string()))
        };
        Ok(self.pi_index(find(0, h1)?, find(1, h2)?))
    }

    /// Entry of `C = lambda1 lambda2^T - L1 Hx L2`.
    pub fn c_entry(&self, i: usize, j: usize) -> f64 {
        let l = self.lambda[0][i] * self.lambda[1][j];
        l - self.incompatible.get(i, j) as f64 * l
    }

    fn check_guard(&self, guard: u128) -> Result<()> {
        let size = self.dim(Player::P1) as u128 * self.dim(Player::P2) as u128;
        if size > guard {
            return Err(Error::SizeGuard { size, guard });
        }
        Ok(())
    }

    /// Dense `A` from the block identity `A[h1,h2] = pi (F + gamma S)`.
    pub fn dense_expand(&self, guard: u128) -> Result<DMatrix<f64>> {
        self.check_guard(guard)?;
        let (n1, n2) = (self.num_sequences(Player::P1), self.num_sequences(Player::P2));
        let mut a = DMatrix::zeros(self.dim(Player::P1), self.dim(Player::P2));
        for i in 0..self.num_hands(Player::P1) {
            for j in 0..self.num_hands(Player::P2) {
                let pi = self.pi_index(i, j);
                if pi == 0.0 {
                    continue;
                }
                let g = self.win.get(i, j) as f64;
                for (s1, s2, v) in self.fold.iter() {
                    a[(i * n1 + s1, j * n2 + s2)] += pi * v;
                }
                for (s1, s2, v) in self.showdown.iter() {
                    a[(i * n1 + s1, j * n2 + s2)] += pi * g * v;
                }
            }
        }
        Ok(a)
    }

    /// Dense `A` assembled as `C (x) F + (L1 W L2) (x) S`.
    pub fn dense_kron_sum(&self, guard: u128) -> Result<DMatrix<f64>> {
        self.check_guard(guard)?;
        let (m1, m2) = (self.num_hands(Player::P1), self.num_hands(Player::P2));
        let c = DMatrix::from_fn(m1, m2, |i, j| self.c_entry(i, j));
        let lwl = DMatrix::from_fn(m1, m2, |i, j| {
            self.lambda[0][i] * self.win.get(i, j) as f64 * self.lambda[1][j]
        });
        Ok(kronecker_product(&c, &self.fold.to_dense())
            + kronecker_product(&lwl, &self.showdown.to_dense()))
    }

    /// Sparse `A`; the guard bounds its nonzero count.
    pub fn sparse_expand(&self, guard: u128) -> Result<CsrMatrix> {
        let nnz = self.dense_nnz() as u128;
        if nnz > guard {
            return Err(Error::SizeGuard { size: nnz, guard });
        }
        let (n1, n2) = (self.num_sequences(Player::P1), self.num_sequences(Player::P2));
        let mut t = Triplets::new(self.dim(Player::P1), self.dim(Player::P2));
        for i in 0..self.num_hands(Player::P1) {
            for j in 0..self.num_hands(Player::P2) {
                let pi = self.pi_index(i, j);
                if pi == 0.0 {
                    continue;
                }
                let g = self.win.get(i, j) as f64;
                for (s1, s2, v) in self.fold.iter() {
                    t.push(i * n1 + s1, j * n2 + s2, pi * v);
                }
                if g != 0.0 {
                    for (s1, s2, v) in self.showdown.iter() {
                        t.push(i * n1 + s1, j * n2 + s2, pi * g * v);
                    }
                }
            }
        }
        Ok(t.to_csr())
    }

    /// `A x` straight from the Kronecker structure, without any
    /// factorization: per opposing hand `j`, `F x_j` and `S x_j` are formed
    /// once and combined with the hand-pair weights.
    pub fn structured_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (m1, m2) = (self.num_hands(Player::P1), self.num_hands(Player::P2));
        let (n1, n2) = (self.num_sequences(Player::P1), self.num_sequences(Player::P2));
        if x.len() != m2 * n2 {
            return Err(Error::DimensionMismatch(format!("x has {} entries, expected {}", x.len(), m2 * n2)));
        }
        let mut fx = vec![0.0; m2 * n1];
        let mut sx = vec![0.0; m2 * n1];
        for j in 0..m2 {
            let xj = &x[j * n2..(j + 1) * n2];
            self.fold.mul_vec_add(xj, &mut fx[j * n1..(j + 1) * n1])?;
            self.showdown.mul_vec_add(xj, &mut sx[j * n1..(j + 1) * n1])?;
        }
        let mut out = vec![0.0; m1 * n1];
        for i in 0..m1 {
            let oi = &mut out[i * n1..(i + 1) * n1];
            for j in 0..m2 {
                let c = self.c_entry(i, j);
                let w = self.lambda[0][i] * self.win.get(i, j) as f64 * self.lambda[1][j];
                for s in 0..n1 {
                    oi[s] += c * fx[j * n1 + s] + w * sx[j * n1 + s];
                }
            }
        }
        Ok(out)
    }

    /// `A^T y` from the Kronecker structure.
    pub fn structured_matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (m1, m2) = (self.num_hands(Player::P1), self.num_hands(Player::P2));
        let (n1, n2) = (self.num_sequences(Player::P1), self.num_sequences(Player::P2));
        if y.len() != m1 * n1 {
            return Err(Error::DimensionMismatch(format!("y has {} entries, expected {}", y.len(), m1 * n1)));
        }
        let mut fy = vec![0.0; m1 * n2];
        let mut sy = vec![0.0; m1 * n2];
        for i in 0..m1 {
            let yi = &y[i * n1..(i + 1) * n1];
            self.fold.tr_mul_vec_add(yi, &mut fy[i * n2..(i + 1) * n2])?;
            self.showdown.tr_mul_vec_add(yi, &mut sy[i * n2..(i + 1) * n2])?;
        }
        let mut out = vec![0.0; m2 * n2];
        for j in 0..m2 {
            let oj = &mut out[j * n2..(j + 1) * n2];
            for i in 0..m1 {
                let c = self.c_entry(i, j);
                let w = self.lambda[0][i] * self.win.get(i, j) as f64 * self.lambda[1][j];
                for s in 0..n2 {
                    oj[s] += c * fy[i * n2 + s] + w * sy[i * n2 + s];
                }
            }
        }
        Ok(out)
    }

    /// Number of nonzeros of `A`, counted without expanding it.
    pub fn dense_nnz(&self) -> usize {
        let (f, s) = (self.fold.nnz(), self.showdown.nnz());
        let mut nnz = 0;
        for i in 0..self.num_hands(Player::P1) {
            for j in 0..self.num_hands(Player::P2) {
                if self.pi_index(i, j) != 0.0 {
                    nnz += f + if self.win.get(i, j) != 0 { s } else { 0 };
                }
            }
        }
        nnz
    }
}

/// Dense Kronecker product `P (x) Q`.
pub fn kronecker_product(p: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, s) = q.shape();
    DMatrix::from_fn(p.nrows() * r, p.ncols() * s, |i, j| {
        p[(i / r, j / s)] * q[(i % r, j % s)]
    })
}
