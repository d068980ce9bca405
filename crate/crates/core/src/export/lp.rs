//! Sequence-form LP and MILP of one player's maximin problem, in CPLEX LP
//! text format.
//!
//! For player `p` with payoff matrix `G` (`A` for player 1, `-A^T` for
//! player 2, rows always the player's own sequences):
//!
//! ```text
//! maximize   v0
//! subject to G^T x - F_opp^T v (+ V_G w) >= 0
//!            F_own x = f_own
//!            U_G^T x - M_G^T w = 0          (sparsified only)
//!            x >= 0, v and w free
//! ```
//!
//! The sparsification of `-A^T` is `(-A_hat^T, -V, M^T, U)`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::engine::{solve_lower_unit_in_place, solve_upper_unit_transpose_in_place};
use crate::error::{Error, Result};
use crate::kron::KronPayoff;
use crate::skeleton::Player;
use crate::solver::Treeplex;
use crate::sparse::CsrMatrix;
use crate::sparsify::Sparsification;

/// Coefficients smaller than this are not written.
pub const DROP_TOL: f64 = 1e-12;

const LINE_WIDTH: usize = 90;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpConstraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpModel {
    pub comments: Vec<String>,
    pub maximize: bool,
    pub objective: Vec<(usize, f64)>,
    pub var_names: Vec<String>,
    /// `false` for free variables; others are nonnegative.
    pub nonnegative: Vec<bool>,
    pub binary: Vec<bool>,
    pub constraints: Vec<LpConstraint>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpEvaluation {
    pub objective: f64,
    /// Largest violation over constraints, bounds and integrality.
    pub max_violation: f64,
}

impl LpModel {
    fn empty() -> Self {
        LpModel {
            comments: Vec::new(),
            maximize: true,
            objective: Vec::new(),
            var_names: Vec::new(),
            nonnegative: Vec::new(),
            binary: Vec::new(),
            constraints: Vec::new(),
        }
    }

    fn add_var(&mut self, name: String, nonnegative: bool) -> usize {
        self.var_names.push(name);
        self.nonnegative.push(nonnegative);
        self.binary.push(false);
        self.var_names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.binary.iter().filter(|&&b| b).count()
    }

    /// Nonzero coefficients of the constraint matrix.
    pub fn nnz(&self) -> usize {
        self.constraints.iter().map(|c| c.terms.len()).sum()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    /// Objective and worst violation at the given point; missing
    /// variables are read as zero.
    pub fn evaluate(&self, values: &HashMap<String, f64>) -> LpEvaluation {
        let val: Vec<f64> = self
            .var_names
            .iter()
            .map(|n| values.get(n).copied().unwrap_or(0.0))
            .collect();
        let dot = |terms: &[(usize, f64)]| terms.iter().map(|&(j, c)| c * val[j]).sum::<f64>();
        let mut worst = 0.0f64;
        for c in &self.constraints {
            let lhs = dot(&c.terms);
            let v = match c.sense {
                Sense::Ge => (c.rhs - lhs).max(0.0),
                Sense::Le => (lhs - c.rhs).max(0.0),
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &x) in val.iter().enumerate() {
            if self.nonnegative[j] {
                worst = worst.max(-x);
            }
            if self.binary[j] {
                worst = worst.max(x.abs().min((x - 1.0).abs()));
            }
        }
        LpEvaluation {
            objective: dot(&self.objective),
            max_violation: worst,
        }
    }

    /// CPLEX LP text.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "\\ {c}");
        }
        out.push_str(if self.maximize { "Maximize\n" } else { "Minimize\n" });
        self.render_row(&mut out, "obj", &self.objective, "");
        out.push_str("Subject To\n");
        for c in &self.constraints {
            let tail = format!(" {} {}", c.sense.symbol(), fmt_num(c.rhs));
            self.render_row(&mut out, &c.name, &c.terms, &tail);
        }
        let free: Vec<&String> = self
            .var_names
            .iter()
            .zip(&self.nonnegative)
            .filter(|(_, &nn)| !nn)
            .map(|(n, _)| n)
            .collect();
        if !free.is_empty() {
            out.push_str("Bounds\n");
            for n in free {
                let _ = writeln!(out, " {n} free");
            }
        }
        if self.binary.iter().any(|&b| b) {
            out.push_str("Binaries\n");
            let names: Vec<&str> = self
                .var_names
                .iter()
                .zip(&self.binary)
                .filter(|(_, &b)| b)
                .map(|(n, _)| n.as_str())
                .collect();
            wrap_words(&mut out, names.into_iter().map(String::from));
        }
        out.push_str("End\n");
        out
    }

    fn render_row(&self, out: &mut String, name: &str, terms: &[(usize, f64)], tail: &str) {
        let mut words = Vec::with_capacity(terms.len() + 2);
        words.push(format!("{name}:"));
        if terms.is_empty() {
            words.push(format!("0 {}", self.var_names[0]));
        }
        for (k, &(j, c)) in terms.iter().enumerate() {
            let var = &self.var_names[j];
            let sign = if c < 0.0 { "-" } else { "+" };
            let mag = c.abs();
            let body = if mag == 1.0 { var.clone() } else { format!("{} {var}", fmt_num(mag)) };
            words.push(if k == 0 && c > 0.0 { body } else { format!("{sign} {body}") });
        }
        if !tail.is_empty() {
            words.push(tail.trim_start().to_string());
        }
        wrap_words(out, words.into_iter());
    }

    /// Parses the subset of CPLEX LP produced by `render`.
    pub fn parse(text: &str) -> Result<LpModel> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Objective,
            Constraints,
            Bounds,
            Binaries,
            End,
        }
        let mut model = LpModel::empty();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut section = Section::None;
        let mut pending: Vec<(usize, String)> = Vec::new();

        let mut var = |model: &mut LpModel, name: &str| -> usize {
            if let Some(&j) = index.get(name) {
                return j;
            }
            let j = model.add_var(name.to_string(), true);
            index.insert(name.to_string(), j);
            j
        };

        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = n + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('\\') {
                if section == Section::None {
                    model.comments.push(c.trim_start().to_string());
                }
                continue;
            }
            let lower = line.to_ascii_lowercase();
            let header = match lower.as_str() {
                "maximize" | "maximum" | "max" => Some((Section::Objective, Some(true))),
                "minimize" | "minimum" | "min" => Some((Section::Objective, Some(false))),
                "subject to" | "such that" | "st" | "s.t." => Some((Section::Constraints, None)),
                "bounds" => Some((Section::Bounds, None)),
                "binaries" | "binary" | "bin" => Some((Section::Binaries, None)),
                "end" => Some((Section::End, None)),
                _ => None,
            };
            if let Some((s, sense)) = header {
                if section == Section::Objective && !pending.is_empty() {
                    let (terms, _, _) = parse_row(&pending, &mut |name| var(&mut model, name), false)?;
                    model.objective = terms;
                    pending.clear();
                }
                if !pending.is_empty() {
                    return Err(Error::parse(format!("line {lineno}"), "unterminated row"));
                }
                if let Some(max) = sense {
                    model.maximize = max;
                }
                section = s;
                continue;
            }
            match section {
                Section::None | Section::End => {
                    return Err(Error::parse(format!("line {lineno}"), "text outside any section"));
                }
                Section::Objective => pending.push((lineno, line.to_string())),
                Section::Constraints => {
                    pending.push((lineno, line.to_string()));
                    if has_sense(line) {
                        let (terms, name, sr) = parse_row(&pending, &mut |name| var(&mut model, name), true)?;
                        let (sense, rhs) = sr.expect("row with a sense");
                        model.constraints.push(LpConstraint {
                            name: name.unwrap_or_else(|| format!("r{}", model.constraints.len())),
                            terms,
                            sense,
                            rhs,
                        });
                        pending.clear();
                    }
                }
                Section::Bounds => {
                    let f: Vec<&str> = line.split_whitespace().collect();
                    match f[..] {
                        [name, free] if free.eq_ignore_ascii_case("free") => {
                            let j = var(&mut model, name);
                            model.nonnegative[j] = false;
                        }
                        _ => return Err(Error::parse(format!("line {lineno}"), "unsupported bound")),
                    }
                }
                Section::Binaries => {
                    for name in line.split_whitespace() {
                        let j = var(&mut model, name);
                        model.binary[j] = true;
                    }
                }
            }
        }
        if section != Section::End {
            return Err(Error::parse("end of file", "missing End"));
        }
        if !pending.is_empty() {
            return Err(Error::parse("end of file", "unterminated row"));
        }
        Ok(model)
    }
}

fn has_sense(line: &str) -> bool {
    line.split_whitespace().any(|t| matches!(t, ">=" | "<=" | "=" | "=>" | "=<"))
}

type RowParse = (Vec<(usize, f64)>, Option<String>, Option<(Sense, f64)>);

fn parse_row(lines: &[(usize, String)], var: &mut dyn FnMut(&str) -> usize, constraint: bool) -> Result<RowParse> {
    let loc = format!("line {}", lines[0].0);
    let tokens: Vec<&str> = lines.iter().flat_map(|(_, l)| l.split_whitespace()).collect();
    let mut it = tokens.into_iter().peekable();
    let mut name = None;
    if let Some(t) = it.peek() {
        if let Some(n) = t.strip_suffix(':') {
            name = Some(n.to_string());
            it.next();
        }
    }
    let mut terms: Vec<(usize, f64)> = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    let mut sense = None;
    while let Some(t) = it.next() {
        match t {
            "+" => sign = 1.0,
            "-" => sign = -sign,
            ">=" | "=>" | "<=" | "=<" | "=" => {
                let s = match t {
                    ">=" | "=>" => Sense::Ge,
                    "<=" | "=<" => Sense::Le,
                    _ => Sense::Eq,
                };
                let rhs_tok = it.next().ok_or_else(|| Error::parse(&loc, "missing right-hand side"))?;
                let rhs: f64 = rhs_tok
                    .parse()
                    .map_err(|_| Error::parse(&loc, format!("bad right-hand side {rhs_tok:?}")))?;
                sense = Some((s, rhs));
                if it.next().is_some() {
                    return Err(Error::parse(&loc, "text after right-hand side"));
                }
                break;
            }
            _ => {
                if let Ok(v) = t.parse::<f64>() {
                    coef = Some(coef.unwrap_or(1.0) * v);
                } else {
                    let c = sign * coef.unwrap_or(1.0);
                    let j = var(t);
                    if c != 0.0 {
                        terms.push((j, c));
                    }
                    sign = 1.0;
                    coef = None;
                }
            }
        }
    }
    if constraint && sense.is_none() {
        return Err(Error::parse(&loc, "constraint without a sense"));
    }
    if coef.is_some() {
        return Err(Error::parse(&loc, "dangling coefficient"));
    }
    Ok((terms, name, sense))
}

fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn wrap_words(out: &mut String, words: impl Iterator<Item = String>) {
    let mut line = String::new();
    for w in words {
        if !line.is_empty() && line.len() + 1 + w.len() > LINE_WIDTH {
            out.push(' ');
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        if !line.is_empty() {
            line.push(' ');
        }
        line.push_str(&w);
    }
    if !line.is_empty() {
        out.push(' ');
        out.push_str(&line);
        out.push('\n');
    }
}

/// Row-major `G^T`, low-rank column factor `V_G` (rows: opponent
/// sequences) and, when sparsified, `U_G` columns and `M_G^T` rows.
struct Blocks {
    g_t: CsrMatrix,
    v_g: Option<CsrMatrix>,
    u_g_t: Option<CsrMatrix>,
    m_g_t: Option<CsrMatrix>,
}

fn blocks(payoff: &KronPayoff, s: Option<&Sparsification>, player: Player, guard: u128) -> Result<Blocks> {
    Ok(match (s, player) {
        (None, Player::P1) => Blocks {
            g_t: payoff.sparse_expand(guard)?.transpose(),
            v_g: None,
            u_g_t: None,
            m_g_t: None,
        },
        (None, Player::P2) => Blocks {
            g_t: payoff.sparse_expand(guard)?.scale(-1.0),
            v_g: None,
            u_g_t: None,
            m_g_t: None,
        },
        (Some(s), Player::P1) => Blocks {
            g_t: s.a_hat().transpose(),
            v_g: Some(s.v().to_csr()),
            u_g_t: Some(s.u().transpose()),
            m_g_t: Some(s.m().to_csr().transpose()),
        },
        (Some(s), Player::P2) => Blocks {
            g_t: s.a_hat().scale(-1.0),
            v_g: Some(s.u().clone()),
            u_g_t: Some(s.v().to_csr().transpose().scale(-1.0)),
            m_g_t: Some(s.m().to_csr()),
        },
    })
}

fn check_sparsification(payoff: &KronPayoff, s: &Sparsification) -> Result<()> {
    let err = crate::solver::reconstruction_error(payoff, s)?;
    if !(err <= 1e-9) {
        return Err(Error::NonReconstructing(err));
    }
    Ok(())
}

/// Builds the LP of `player`. Without a sparsification the full payoff
/// matrix is written and `guard` bounds its nonzero count.
pub fn build_lp(payoff: &KronPayoff, s: Option<&Sparsification>, player: Player, guard: u128) -> Result<LpModel> {
    if let Some(s) = s {
        check_sparsification(payoff, s)?;
    }
    let opp = player.opponent();
    let sk = payoff.skeleton();
    let (own_dim, opp_dim) = (payoff.dim(player), payoff.dim(opp));
    let (f_own, f_own_rhs) = sk.sequence_constraints(player, payoff.num_hands(player))?;
    let (f_opp, _) = sk.sequence_constraints(opp, payoff.num_hands(opp))?;
    let f_opp_t = f_opp.transpose();
    let b = blocks(payoff, s, player, guard)?;
    let k = s.map_or(0, |s| s.k());

    let mut model = LpModel::empty();
    model.comments = vec![
        format!("riverkron sequence-form program for player {player}"),
        "rows of A: player-1 (hand, sequence) pairs; columns: player-2 pairs".into(),
        "x0 is the empty sequence; x{1 + hand * n + sequence} the rest".into(),
    ];
    let x0 = model.num_vars();
    for i in 0..=own_dim {
        model.add_var(format!("x{i}"), true);
    }
    let v0 = model.num_vars();
    for r in 0..f_opp.nrows() {
        model.add_var(format!("v{r}"), false);
    }
    let w0 = model.num_vars();
    for q in 0..k {
        model.add_var(format!("w{q}"), false);
    }
    model.objective = vec![(v0, 1.0)];

    let mut dropped = 0usize;
    let mut keep = |terms: &mut Vec<(usize, f64)>| {
        let before = terms.len();
        terms.retain(|&(_, c)| c.abs() >= DROP_TOL);
        dropped += before - terms.len();
    };

    for j in 0..=opp_dim {
        let mut terms = Vec::new();
        if j > 0 {
            terms.extend(b.g_t.row(j - 1).map(|(i, c)| (x0 + 1 + i, c)));
        }
        terms.extend(f_opp_t.row(j).map(|(r, c)| (v0 + r, -c)));
        if let (Some(v_g), true) = (&b.v_g, j > 0) {
            terms.extend(v_g.row(j - 1).map(|(q, c)| (w0 + q, c)));
        }
        keep(&mut terms);
        model.constraints.push(LpConstraint {
            name: format!("c1_{j}"),
            terms,
            sense: Sense::Ge,
            rhs: 0.0,
        });
    }
    for (r, &rhs) in f_own_rhs.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> = f_own.row(r).map(|(i, c)| (x0 + i, c)).collect();
        keep(&mut terms);
        model.constraints.push(LpConstraint {
            name: format!("c2_{r}"),
            terms,
            sense: Sense::Eq,
            rhs,
        });
    }
    if let (Some(u_g_t), Some(m_g_t)) = (&b.u_g_t, &b.m_g_t) {
        for q in 0..k {
            let mut terms: Vec<(usize, f64)> = u_g_t.row(q).map(|(i, c)| (x0 + 1 + i, c)).collect();
            terms.extend(m_g_t.row(q).map(|(l, c)| (w0 + l, -c)));
            keep(&mut terms);
            model.constraints.push(LpConstraint {
                name: format!("c3_{q}"),
                terms,
                sense: Sense::Eq,
                rhs: 0.0,
            });
        }
    }
    if dropped > 0 {
        log::info!("dropped {dropped} coefficients below {DROP_TOL:e}");
    }
    Ok(model)
}

/// The LP with every `x` variable, the empty sequence included, binary.
pub fn build_milp(payoff: &KronPayoff, s: Option<&Sparsification>, player: Player, guard: u128) -> Result<LpModel> {
    let mut model = build_lp(payoff, s, player, guard)?;
    for (j, name) in model.var_names.iter().enumerate() {
        if name.starts_with('x') {
            model.binary[j] = true;
        }
    }
    Ok(model)
}

pub fn write_lp(payoff: &KronPayoff, s: Option<&Sparsification>, player: Player, path: &Path, guard: u128) -> Result<LpModel> {
    let model = build_lp(payoff, s, player, guard)?;
    fs::write(path, model.render())?;
    Ok(model)
}

pub fn write_milp(
    payoff: &KronPayoff,
    s: Option<&Sparsification>,
    player: Player,
    path: &Path,
    guard: u128,
) -> Result<LpModel> {
    let model = build_milp(payoff, s, player, guard)?;
    fs::write(path, model.render())?;
    Ok(model)
}

/// Completes a strategy `x` of `player` to a point of the LP: `v` holds
/// the opponent's per-infoset best-response values and `w = M_G^-T U_G^T x`.
pub fn lp_assignment(
    payoff: &KronPayoff,
    s: Option<&Sparsification>,
    player: Player,
    x: &[f64],
) -> Result<HashMap<String, f64>> {
    let own = Treeplex::of(payoff, player);
    own.check(x)?;
    let opp = Treeplex::of(payoff, player.opponent());
    let g = match player {
        Player::P1 => payoff.structured_matvec_transpose(x)?,
        Player::P2 => payoff.structured_matvec(x)?.into_iter().map(|v| -v).collect(),
    };
    let mut out = HashMap::new();
    out.insert("x0".to_string(), 1.0);
    for (i, &xi) in x.iter().enumerate() {
        out.insert(format!("x{}", i + 1), xi);
    }

    let n = opp.num_sequences();
    let m = opp.infosets().len();
    let mut root = 0.0;
    let mut q = vec![0.0; n];
    for h in 0..opp.hands() {
        q.copy_from_slice(&g[h * n..(h + 1) * n]);
        for (i, info) in opp.infosets().iter().enumerate().rev() {
            let v = info.seqs().map(|s| q[s]).fold(f64::INFINITY, f64::min);
            out.insert(format!("v{}", 1 + h * m + i), v);
            match info.parent {
                Some(p) => q[p] += v,
                None => root += v,
            }
        }
    }
    out.insert("v0".to_string(), root);

    if let Some(s) = s {
        let mut t = vec![0.0; s.k()];
        match player {
            Player::P1 => {
                s.u().tr_mul_vec_add(x, &mut t)?;
                solve_upper_unit_transpose_in_place(s.m(), &mut t)?;
            }
            Player::P2 => {
                s.v().tr_mul_vec_add(x, &mut t)?;
                t.iter_mut().for_each(|v| *v = -*v);
                solve_lower_unit_in_place(s.m(), &mut t)?;
            }
        }
        for (q, &w) in t.iter().enumerate() {
            out.insert(format!("w{q}"), w);
        }
    }
    Ok(out)
}
