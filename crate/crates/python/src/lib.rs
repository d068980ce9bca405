//! Python bindings: instances, sparsifications, solving and export.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use riverkron::cards::{evaluate7 as eval7, gamma as gamma_fn, Board, Hand};
use riverkron::export::{
    instance_from_json, instance_to_json, read_instance, read_sparsification, write_lp, write_milp,
    write_sparsification,
};
use riverkron::solver::{
    dcfr_solve, enumerate_deterministic_optimum, exploitability, price_of_determinism, value_bounds,
    DEFAULT_ENUMERATION_GUARD,
};
use riverkron::synth::{bundled, synthetic, BUNDLED};
use riverkron::{BettingConfig, DcfrParams, Engine, KronPayoff, Player, RiverInstance, StrategyProfile, Technique};

const DEFAULT_GUARD: u128 = 50_000_000;

fn err(e: riverkron::Error) -> PyErr {
    let msg = format!("{}: {e}", e.code());
    match e {
        riverkron::Error::Io(_) => PyIOError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn player(p: u8) -> PyResult<Player> {
    Player::from_number(p).map_err(err)
}

fn technique(t: &str) -> PyResult<Technique> {
    t.parse().map_err(err)
}

/// Seven-card strength of `hand` on `board` as (category, rank); larger
/// ranks are stronger, categories run 0 (high card) to 8 (straight flush).
#[pyfunction]
fn evaluate7(hand: &str, board: &str) -> PyResult<(u32, u32)> {
    let hand: Hand = hand.parse().map_err(err)?;
    let board: Board = board.parse().map_err(err)?;
    let r = eval7(&hand, &board).map_err(err)?;
    Ok((r.category() as u32, r.0))
}

/// +1 if `h1` beats `h2` on `board`, -1 if it loses, 0 on ties or overlap.
#[pyfunction]
fn gamma(h1: &str, h2: &str, board: &str) -> PyResult<i8> {
    let h1: Hand = h1.parse().map_err(err)?;
    let h2: Hand = h2.parse().map_err(err)?;
    let board: Board = board.parse().map_err(err)?;
    gamma_fn(&h1, &h2, &board).map_err(err)
}

/// A river endgame with its assembled payoff structure.
#[pyclass(name = "Instance", module = "riverkron")]
struct PyInstance {
    inst: RiverInstance,
    payoff: KronPayoff,
}

impl PyInstance {
    fn wrap(inst: RiverInstance) -> PyResult<Self> {
        let payoff = KronPayoff::assemble(&inst).map_err(err)?;
        Ok(PyInstance { inst, payoff })
    }
}

#[pymethods]
impl PyInstance {
    /// Instance from a JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::wrap(instance_from_json(text).map_err(err)?)
    }

    /// Instance from a JSON file or a bundled name.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        if BUNDLED.contains(&path) {
            return Self::wrap(bundled(path).map_err(err)?);
        }
        Self::wrap(read_instance(&PathBuf::from(path)).map_err(err)?)
    }

    #[staticmethod]
    fn bundled_names() -> Vec<&'static str> {
        BUNDLED.to_vec()
    }

    /// Random standard-deck instance with `hands` uniform hands per side
    /// and the three-quarter-pot betting tree.
    #[staticmethod]
    fn synthetic(hands: usize, seed: u64) -> PyResult<Self> {
        Self::wrap(synthetic(hands, seed, &BettingConfig::fig1()).map_err(err)?)
    }

    fn to_json(&self) -> PyResult<String> {
        instance_to_json(&self.inst).map_err(err)
    }

    #[getter]
    fn board(&self) -> String {
        self.inst.board().to_string()
    }

    /// Hands of a player, weakest first; this is the row/column block order.
    fn hands(&self, player_no: u8) -> PyResult<Vec<String>> {
        Ok(self.inst.hands(player(player_no)?).iter().map(|h| h.to_string()).collect())
    }

    fn weights(&self, player_no: u8) -> PyResult<Vec<f64>> {
        Ok(self.inst.weights(player(player_no)?).to_vec())
    }

    fn num_sequences(&self, player_no: u8) -> PyResult<usize> {
        Ok(self.payoff.num_sequences(player(player_no)?))
    }

    /// Length of a player's strategy vector.
    fn dim(&self, player_no: u8) -> PyResult<usize> {
        Ok(self.payoff.dim(player(player_no)?))
    }

    #[getter]
    fn initial_pot(&self) -> f64 {
        self.payoff.initial_pot()
    }

    fn dense_nnz(&self) -> usize {
        self.payoff.dense_nnz()
    }

    /// The payoff matrix of player 1 as a list of rows.
    #[pyo3(signature = (guard = DEFAULT_GUARD))]
    fn dense(&self, guard: u128) -> PyResult<Vec<Vec<f64>>> {
        let a = self.payoff.dense_expand(guard).map_err(err)?;
        Ok((0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect())
    }

    /// `technique` is "a" or "b".
    #[pyo3(signature = (technique = "b", postprocess = true))]
    fn sparsify(&self, technique: &str, postprocess: bool) -> PyResult<PySparsification> {
        let t = self::technique(technique)?;
        let s = riverkron::sparsify::sparsify(&self.payoff, t, postprocess).map_err(err)?;
        Ok(PySparsification { s })
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(board={}, hands=({}, {}))",
            self.inst.board(),
            self.payoff.num_hands(Player::P1),
            self.payoff.num_hands(Player::P2)
        )
    }
}

/// A factorization `A = A_hat + U M^-1 V^T`.
#[pyclass(name = "Sparsification", module = "riverkron")]
struct PySparsification {
    s: riverkron::Sparsification,
}

#[pymethods]
impl PySparsification {
    /// Reads a bundle directory.
    #[staticmethod]
    fn load(dir: PathBuf) -> PyResult<Self> {
        Ok(PySparsification { s: read_sparsification(&dir).map_err(err)? })
    }

    fn save(&self, dir: PathBuf) -> PyResult<()> {
        write_sparsification(&self.s, &dir).map_err(err)
    }

    #[getter]
    fn technique(&self) -> String {
        self.s.technique().to_string()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.s.nrows(), self.s.ncols())
    }

    #[getter]
    fn k(&self) -> usize {
        self.s.k()
    }

    /// Nonzeros per factor and in total.
    fn size<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.s.size();
        let d = PyDict::new(py);
        d.set_item("a_hat", r.a_hat)?;
        d.set_item("u", r.u)?;
        d.set_item("m", r.m)?;
        d.set_item("v", r.v)?;
        d.set_item("total", r.total)?;
        Ok(d)
    }

    fn matvec(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Engine::new(&self.s).matvec(&x).map_err(err)
    }

    fn matvec_transpose(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        Engine::new(&self.s).matvec_transpose(&y).map_err(err)
    }

    fn to_dense(&self) -> Vec<Vec<f64>> {
        let a = self.s.to_dense();
        (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect()
    }
}

/// Runs DCFR. Returns a dict with the average strategies `x1`, `x2`, the
/// `trace` as (iteration, seconds, exploitability) tuples, the final
/// `exploitability` and the `value_bounds` to player 1.
#[pyfunction]
#[pyo3(signature = (instance, sparsification = None, iters = 10_000, target_exploitability = 0.0, technique = "b", alternating = true))]
fn solve<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    sparsification: Option<&PySparsification>,
    iters: usize,
    target_exploitability: f64,
    technique: &str,
    alternating: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let owned;
    let s = match sparsification {
        Some(s) => &s.s,
        None => {
            owned = riverkron::sparsify::sparsify(&instance.payoff, self::technique(technique)?, true).map_err(err)?;
            &owned
        }
    };
    let params = DcfrParams {
        max_iters: iters,
        target_exploitability,
        alternating,
        self_check: sparsification.is_some(),
        ..DcfrParams::default()
    };
    let (profile, trace) = dcfr_solve(&instance.payoff, s, &params).map_err(err)?;
    let bounds = value_bounds(&instance.payoff, s, &profile).map_err(err)?;
    let expl = exploitability(&instance.payoff, s, &profile).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("x1", profile.x1)?;
    d.set_item("x2", profile.x2)?;
    let points: Vec<(usize, f64, f64)> = trace
        .points
        .iter()
        .map(|p| (p.iteration, p.seconds, p.exploitability))
        .collect();
    d.set_item("trace", points)?;
    d.set_item("exploitability", expl)?;
    d.set_item("value_bounds", bounds)?;
    Ok(d)
}

/// Normalized exploitability of a profile.
#[pyfunction]
fn profile_exploitability(instance: &PyInstance, sparsification: &PySparsification, x1: Vec<f64>, x2: Vec<f64>) -> PyResult<f64> {
    exploitability(&instance.payoff, &sparsification.s, &StrategyProfile { x1, x2 }).map_err(err)
}

/// Best deterministic strategy of a player by enumeration, as
/// (value, sequence-form vector).
#[pyfunction]
#[pyo3(signature = (instance, player_no = 1, guard = DEFAULT_ENUMERATION_GUARD))]
fn deterministic(instance: &PyInstance, player_no: u8, guard: u128) -> PyResult<(f64, Vec<f64>)> {
    enumerate_deterministic_optimum(&instance.payoff, player(player_no)?, guard).map_err(err)
}

#[pyfunction(name = "price_of_determinism")]
fn pod(mixed_value: f64, det_value: f64, pot: f64) -> PyResult<f64> {
    price_of_determinism(mixed_value, det_value, pot).map_err(err)
}

/// Writes the LP (or MILP) of a player. `technique` is "a", "b" or None
/// for the unsparsified matrix. Returns variable, constraint and nonzero
/// counts.
#[pyfunction]
#[pyo3(signature = (instance, path, player_no = 1, technique = Some("b"), milp = false, guard = DEFAULT_GUARD))]
fn export_lp<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    path: PathBuf,
    player_no: u8,
    technique: Option<&str>,
    milp: bool,
    guard: u128,
) -> PyResult<Bound<'py, PyDict>> {
    let s = match technique {
        Some(t) => Some(riverkron::sparsify::sparsify(&instance.payoff, self::technique(t)?, true).map_err(err)?),
        None => None,
    };
    let p = player(player_no)?;
    let model = if milp {
        write_milp(&instance.payoff, s.as_ref(), p, &path, guard)
    } else {
        write_lp(&instance.payoff, s.as_ref(), p, &path, guard)
    }
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("variables", model.num_vars())?;
    d.set_item("constraints", model.num_constraints())?;
    d.set_item("nonzeros", model.nnz())?;
    d.set_item("binaries", model.num_binaries())?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "riverkron")]
fn riverkron_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(evaluate7, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(profile_exploitability, m)?)?;
    m.add_function(wrap_pyfunction!(deterministic, m)?)?;
    m.add_function(wrap_pyfunction!(pod, m)?)?;
    m.add_function(wrap_pyfunction!(export_lp, m)?)?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PySparsification>()?;
    Ok(())
}
