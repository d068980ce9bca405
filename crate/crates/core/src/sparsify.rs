//! Low-rank-plus-sparse factorizations `A = A_hat + U M^-1 V^T` of the
//! Kronecker payoff, with `M` unit lower triangular.
//!
//! Technique A peels constant rectangles off the win-lose matrix `W` and
//! pushes the resulting factors through the Kronecker products. Technique B
//! uses the rank ordering of the hands: adjacent rows of `W` differ in few
//! places, so `Y = D W` is sparse, and `D^-1` is carried by `M`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kron::{KronPayoff, SignMatrix};
use crate::skeleton::Player;
use crate::sparse::{CscMatrix, CsrMatrix, Triplets};

/// Default iteration cap of the win-lose sparsifier.
pub const DEFAULT_W_ITERS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Technique {
    A,
    B,
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Technique::A => f.write_str("a"),
            Technique::B => f.write_str("b"),
        }
    }
}

impl std::str::FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Technique::A),
            "b" => Ok(Technique::B),
            _ => Err(Error::InvalidInput(format!("unknown technique {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub a_hat: usize,
    pub u: usize,
    pub m: usize,
    pub v: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sparsification {
    technique: Technique,
    a_hat: CsrMatrix,
    u: CsrMatrix,
    m: CscMatrix,
    v: CscMatrix,
    m_identity: bool,
    hands: [usize; 2],
    seqs: [usize; 2],
}

impl Sparsification {
    /// Checks shapes and that `m` is unit lower triangular.
    pub fn new(
        technique: Technique,
        a_hat: CsrMatrix,
        u: CsrMatrix,
        m: CscMatrix,
        v: CscMatrix,
        hands: [usize; 2],
        seqs: [usize; 2],
    ) -> Result<Self> {
        let (rows, cols) = (a_hat.nrows(), a_hat.ncols());
        let k = m.nrows();
        if rows != hands[0] * seqs[0] || cols != hands[1] * seqs[1] {
            return Err(Error::DimensionMismatch(format!(
                "A_hat is {rows}x{cols}, expected {}x{}",
                hands[0] * seqs[0],
                hands[1] * seqs[1]
            )));
        }
        if u.nrows() != rows || u.ncols() != k || m.ncols() != k || v.nrows() != cols || v.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "U {}x{}, M {}x{}, V {}x{} for A {rows}x{cols}",
                u.nrows(),
                u.ncols(),
                m.nrows(),
                m.ncols(),
                v.nrows(),
                v.ncols()
            )));
        }
        check_unit_lower(&m)?;
        let m_identity = m.nnz() == k;
        Ok(Sparsification {
            technique,
            a_hat,
            u,
            m,
            v,
            m_identity,
            hands,
            seqs,
        })
    }

    pub fn technique(&self) -> Technique {
        self.technique
    }

    pub fn a_hat(&self) -> &CsrMatrix {
        &self.a_hat
    }

    pub fn u(&self) -> &CsrMatrix {
        &self.u
    }

    pub fn m(&self) -> &CscMatrix {
        &self.m
    }

    pub fn v(&self) -> &CscMatrix {
        &self.v
    }

    pub fn m_is_identity(&self) -> bool {
        self.m_identity
    }

    pub fn nrows(&self) -> usize {
        self.a_hat.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.a_hat.ncols()
    }

    /// Inner dimension of the low-rank term.
    pub fn k(&self) -> usize {
        self.m.nrows()
    }

    pub fn hands(&self) -> [usize; 2] {
        self.hands
    }

    pub fn seqs(&self) -> [usize; 2] {
        self.seqs
    }

    pub fn size(&self) -> SizeReport {
        let (a_hat, u, m, v) = (self.a_hat.nnz(), self.u.nnz(), self.m.nnz(), self.v.nnz());
        SizeReport {
            a_hat,
            u,
            m,
            v,
            total: a_hat + u + m + v,
        }
    }

    /// Dense `A_hat + U M^-1 V^T`, for oracle checks on small instances.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let m = self.m.to_dense();
        let minv_vt = m
            .solve_lower_triangular(&self.v.to_dense().transpose())
            .expect("unit diagonal");
        self.a_hat.to_dense() + self.u.to_dense() * minv_vt
    }
}

pub fn size(s: &Sparsification) -> SizeReport {
    s.size()
}

fn check_unit_lower(m: &CscMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Contract("M is not square".into()));
    }
    for j in 0..m.ncols() {
        let mut diag = false;
        for (i, v) in m.col(j) {
            if i < j {
                return Err(Error::Contract(format!("M has an entry above the diagonal at ({i}, {j})")));
            }
            if i == j {
                if v != 1.0 {
                    return Err(Error::Contract(format!("M[{j},{j}] = {v}, expected 1")));
                }
                diag = true;
            }
        }
        if !diag {
            return Err(Error::Contract(format!("M[{j},{j}] is missing")));
        }
    }
    Ok(())
}

/// `W = W_hat + U_W V_W^T`.
#[derive(Clone, Debug)]
pub struct WFactorization {
    pub w_hat: CsrMatrix,
    pub u_w: CsrMatrix,
    pub v_w: CsrMatrix,
}

impl WFactorization {
    pub fn rank(&self) -> usize {
        self.u_w.ncols()
    }

    pub fn size(&self) -> usize {
        self.w_hat.nnz() + self.u_w.nnz() + self.v_w.nnz()
    }

    /// Exact reconstruction check; all entries are small integers.
    pub fn reconstructs(&self, w: &SignMatrix) -> bool {
        if self.w_hat.nrows() != w.rows() || self.w_hat.ncols() != w.cols() {
            return false;
        }
        let mut dense = self.w_hat.to_dense();
        dense += self.u_w.to_dense() * self.v_w.to_dense().transpose();
        (0..w.rows()).all(|i| (0..w.cols()).all(|j| dense[(i, j)] == w.get(i, j) as f64))
    }
}

struct Rect {
    gain: i64,
    value: i8,
    rows: (usize, usize),
    cols: (usize, usize),
}

/// Best constant-`value` contiguous rectangle of the residual by
/// `area - rows - cols`, via the largest-rectangle-in-histogram sweep.
fn best_interval_rect(res: &SignMatrix, value: i8, best: &mut Option<Rect>) {
    let (m, n) = (res.rows(), res.cols());
    let mut heights = vec![0usize; n];
    let mut stack: Vec<(usize, usize)> = Vec::with_capacity(n + 1);
    for i in 0..m {
        let row = res.row(i);
        for j in 0..n {
            heights[j] = if row[j] == value { heights[j] + 1 } else { 0 };
        }
        stack.clear();
        for j in 0..=n {
            let h = if j < n { heights[j] } else { 0 };
            let mut start = j;
            while let Some(&(s, sh)) = stack.last() {
                if sh < h {
                    break;
                }
                stack.pop();
                if sh > 0 {
                    let width = j - s;
                    let gain = (sh * width) as i64 - (sh + width) as i64;
                    if best.as_ref().is_none_or(|b| gain > b.gain) {
                        *best = Some(Rect {
                            gain,
                            value,
                            rows: (i + 1 - sh, i + 1),
                            cols: (s, j),
                        });
                    }
                }
                start = s;
            }
            stack.push((start, h));
        }
    }
}

/// Greedy rectangle peeling of a `{-1, 0, 1}` matrix.
///
/// Each round takes the contiguous (in rank order) constant rectangle with
/// the largest size reduction, widens it with any further rows and columns
/// that keep it constant, and moves it into the factors as the outer
/// product of a signed row indicator and a column indicator. Stops when no
/// rectangle shrinks the total size or after `max_iters` rounds.
pub fn sparsify_w(w: &SignMatrix, max_iters: usize) -> WFactorization {
    let (m, n) = (w.rows(), w.cols());
    let mut res = w.clone();
    let mut u_cols: Vec<(i8, Vec<usize>)> = Vec::new();
    let mut v_cols: Vec<Vec<usize>> = Vec::new();

    for _ in 0..max_iters {
        let mut best = None;
        best_interval_rect(&res, 1, &mut best);
        best_interval_rect(&res, -1, &mut best);
        let Some(rect) = best.filter(|r| r.gain > 0) else {
            break;
        };
        let v = rect.value;
        let mut cols: Vec<usize> = (rect.cols.0..rect.cols.1).collect();
        let mut rows: Vec<usize> = (rect.rows.0..rect.rows.1).collect();
        if cols.len() >= 2 {
            for i in (0..rect.rows.0).chain(rect.rows.1..m) {
                if cols.iter().all(|&j| res.get(i, j) == v) {
                    rows.push(i);
                }
            }
        }
        if rows.len() >= 2 {
            for j in (0..rect.cols.0).chain(rect.cols.1..n) {
                if rows.iter().all(|&i| res.get(i, j) == v) {
                    cols.push(j);
                }
            }
        }
        rows.sort_unstable();
        cols.sort_unstable();
        for &i in &rows {
            for &j in &cols {
                res.set(i, j, 0);
            }
        }
        u_cols.push((v, rows));
        v_cols.push(cols);
    }

    let k = u_cols.len();
    let mut ut = Triplets::new(m, k);
    let mut vt = Triplets::new(n, k);
    for (c, ((v, rows), cols)) in u_cols.iter().zip(&v_cols).enumerate() {
        for &i in rows {
            ut.push(i, c, *v as f64);
        }
        for &j in cols {
            vt.push(j, c, 1.0);
        }
    }
    WFactorization {
        w_hat: res.to_csr(),
        u_w: ut.to_csr(),
        v_w: vt.to_csr(),
    }
}

fn ones(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

fn unit_csc(k: usize) -> CscMatrix {
    CsrMatrix::identity(k).to_csc()
}

/// `-(L1 Hx L2) (x) F`, shared by both techniques.
fn fold_correction(payoff: &KronPayoff) -> CsrMatrix {
    payoff
        .incompatible()
        .to_csr()
        .scale_rows_cols(payoff.lambda(Player::P1), payoff.lambda(Player::P2))
        .kron(payoff.fold())
        .scale(-1.0)
}

fn shape(payoff: &KronPayoff) -> ([usize; 2], [usize; 2]) {
    (
        [payoff.num_hands(Player::P1), payoff.num_hands(Player::P2)],
        [payoff.num_sequences(Player::P1), payoff.num_sequences(Player::P2)],
    )
}

/// Technique A from a factorization of the win-lose matrix.
pub fn technique_a(payoff: &KronPayoff, wfac: &WFactorization) -> Result<Sparsification> {
    let (m1, m2) = (payoff.num_hands(Player::P1), payoff.num_hands(Player::P2));
    if wfac.w_hat.nrows() != m1
        || wfac.w_hat.ncols() != m2
        || wfac.u_w.nrows() != m1
        || wfac.v_w.nrows() != m2
        || wfac.u_w.ncols() != wfac.v_w.ncols()
    {
        return Err(Error::DimensionMismatch("W factorization does not match the hand counts".into()));
    }
    if !wfac.reconstructs(payoff.win()) {
        return Err(Error::Contract("W factorization does not reconstruct W".into()));
    }
    let (l1, l2) = (payoff.lambda(Player::P1), payoff.lambda(Player::P2));
    let n1 = payoff.num_sequences(Player::P1);
    let eye = CsrMatrix::identity(n1);
    let s_t = payoff.showdown().transpose();
    let f_t = payoff.fold().transpose();

    let a_hat = wfac
        .w_hat
        .scale_rows_cols(l1, l2)
        .kron(payoff.showdown())
        .add(&fold_correction(payoff))?;
    let kw = wfac.rank();
    let u = wfac
        .u_w
        .scale_rows_cols(l1, &ones(kw))
        .kron(&eye)
        .hstack(&CsrMatrix::column(l1).kron(&eye))?;
    let v = wfac
        .v_w
        .scale_rows_cols(l2, &ones(kw))
        .kron(&s_t)
        .hstack(&CsrMatrix::column(l2).kron(&f_t))?;
    let k = u.ncols();
    let (hands, seqs) = shape(payoff);
    Sparsification::new(Technique::A, a_hat, u, unit_csc(k), v.to_csc(), hands, seqs)
}

/// Row differences `Y = D W`: first row kept, then `W[i] - W[i-1]`.
pub fn row_differences(w: &SignMatrix) -> CsrMatrix {
    let mut t = Triplets::new(w.rows(), w.cols());
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            let prev = if i == 0 { 0 } else { w.get(i - 1, j) };
            t.push(i, j, (w.get(i, j) - prev) as f64);
        }
    }
    t.to_csr()
}

/// Lower bidiagonal `D` (ones on the diagonal, -1 below) of size `n`.
pub fn difference_matrix(n: usize) -> CsrMatrix {
    let mut t = Triplets::new(n, n);
    for i in 0..n {
        t.push(i, i, 1.0);
        if i > 0 {
            t.push(i, i - 1, -1.0);
        }
    }
    t.to_csr()
}

/// Technique B; hands must be rank sorted, which `RiverInstance` guarantees.
pub fn technique_b(payoff: &KronPayoff) -> Result<Sparsification> {
    let (l1, l2) = (payoff.lambda(Player::P1), payoff.lambda(Player::P2));
    let (m1, m2) = (payoff.num_hands(Player::P1), payoff.num_hands(Player::P2));
    let n1 = payoff.num_sequences(Player::P1);
    let eye = CsrMatrix::identity(n1);
    let y = row_differences(payoff.win());

    let a_hat = fold_correction(payoff);
    let u = CsrMatrix::diag(l1)
        .kron(&eye)
        .hstack(&CsrMatrix::column(l1).kron(&eye))?;

    let dk = difference_matrix(m1).kron(&eye);
    let k = m1 * n1 + n1;
    let mut m = Triplets::new(k, k);
    for (i, j, v) in dk.iter() {
        m.push(i, j, v);
    }
    for i in 0..n1 {
        m.push(m1 * n1 + i, m1 * n1 + i, 1.0);
    }

    let v = y
        .transpose()
        .scale_rows_cols(l2, &ones(m1))
        .kron(&payoff.showdown().transpose())
        .hstack(&CsrMatrix::column(l2).kron(&payoff.fold().transpose()))?;
    debug_assert_eq!(v.nrows(), m2 * payoff.num_sequences(Player::P2));
    let (hands, seqs) = shape(payoff);
    Sparsification::new(Technique::B, a_hat, u, m.to_csc(), v.to_csc(), hands, seqs)
}

fn add_entry(list: &mut Vec<(usize, f64)>, idx: usize, delta: f64) -> bool {
    match list.binary_search_by_key(&idx, |&(i, _)| i) {
        Ok(p) => {
            list[p].1 += delta;
            if list[p].1 == 0.0 {
                list.remove(p);
            }
            false
        }
        Err(p) => {
            list.insert(p, (idx, delta));
            true
        }
    }
}

/// Eliminates every inner index whose column of `V` is identically zero.
///
/// With `y = V^T x` the eliminated coordinate satisfies `z_j = -sum_i a_i z_i`
/// (`a_i = M[j, i]`, `i < j`), so column `j` of `U` is folded into columns
/// `i` with weight `-a_i`, and later rows of `M` that reference `j` are
/// rewritten the same way. Indices are processed in increasing order.
pub fn postprocess(s: &Sparsification) -> Result<Sparsification> {
    check_unit_lower(s.m())?;
    let k = s.k();
    let zero_cols: Vec<bool> = (0..k).map(|j| s.v().col(j).next().is_none()).collect();
    if !zero_cols.iter().any(|&z| z) {
        return Ok(s.clone());
    }

    // columns of U, strictly-lower rows of M and their column index
    let ut = s.u().transpose();
    let mut u_cols: Vec<Vec<(usize, f64)>> = (0..k).map(|j| ut.row(j).collect()).collect();
    let mut m_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    let mut m_refs: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, j, v) in s.m().iter() {
        if i != j {
            m_rows[i].push((j, v));
            m_refs[j].push(i);
        }
    }
    m_rows.iter_mut().for_each(|r| r.sort_unstable_by_key(|e| e.0));

    for j in (0..k).filter(|&j| zero_cols[j]) {
        let row_j = std::mem::take(&mut m_rows[j]);
        let col_j = std::mem::take(&mut u_cols[j]);
        for &(i, a) in &row_j {
            for &(r, val) in &col_j {
                add_entry(&mut u_cols[i], r, -a * val);
            }
            m_refs[i].retain(|&l| l != j);
        }
        let referencing = std::mem::take(&mut m_refs[j]);
        for l in referencing {
            let Ok(p) = m_rows[l].binary_search_by_key(&j, |e| e.0) else {
                continue;
            };
            let (_, b) = m_rows[l].remove(p);
            for &(i, a) in &row_j {
                if add_entry(&mut m_rows[l], i, -b * a) {
                    m_refs[i].push(l);
                }
            }
        }
    }

    let mut remap = vec![usize::MAX; k];
    let mut kept = 0;
    for j in 0..k {
        if !zero_cols[j] {
            remap[j] = kept;
            kept += 1;
        }
    }
    let mut u = Triplets::new(s.nrows(), kept);
    let mut m = Triplets::new(kept, kept);
    let mut v = Triplets::new(s.ncols(), kept);
    for j in (0..k).filter(|&j| !zero_cols[j]) {
        let c = remap[j];
        for &(r, val) in &u_cols[j] {
            u.push(r, c, val);
        }
        m.push(c, c, 1.0);
        for &(i, a) in &m_rows[j] {
            debug_assert!(!zero_cols[i]);
            m.push(c, remap[i], a);
        }
        for (r, val) in s.v().col(j) {
            v.push(r, c, val);
        }
    }
    Sparsification::new(
        s.technique(),
        s.a_hat().clone(),
        u.to_csr(),
        m.to_csc(),
        v.to_csc(),
        s.hands(),
        s.seqs(),
    )
}

/// Factorization by `technique` with the default W sparsifier settings.
pub fn sparsify(payoff: &KronPayoff, technique: Technique, postprocessed: bool) -> Result<Sparsification> {
    let s = match technique {
        Technique::A => technique_a(payoff, &sparsify_w(payoff.win(), DEFAULT_W_ITERS))?,
        Technique::B => technique_b(payoff)?,
    };
    if postprocessed {
        postprocess(&s)
    } else {
        Ok(s)
    }
}
