mod common;

use std::fs;

use riverkron::export::{
    build_lp, build_milp, instance_from_json, instance_to_json, lp_assignment, read_instance, read_profile,
    read_sparsification, read_trace, write_instance, write_profile, write_sparsification, write_trace, LpModel,
};
use riverkron::solver::{dcfr_solve, enumerate_deterministic_optimum, value_bounds, DcfrParams, DEFAULT_ENUMERATION_GUARD};
use riverkron::sparsify::sparsify;
use riverkron::synth::{bundled, bundled_source, BUNDLED};
use riverkron::{Error, KronPayoff, Player, Technique};

const GUARD: u128 = 1 << 26;

#[test]
fn bundled_files_match_their_sources() {
    for name in BUNDLED {
        assert_eq!(bundled(name).unwrap(), bundled_source(name).unwrap(), "{name}");
    }
}

#[test]
fn instances_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for inst in common::corpus(12, 31).into_iter().chain(BUNDLED.iter().map(|n| bundled(n).unwrap())) {
        let text = instance_to_json(&inst).unwrap();
        assert_eq!(instance_from_json(&text).unwrap(), inst);
        let path = dir.path().join("inst.json");
        write_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.weights(Player::P1), inst.weights(Player::P1));
    }
}

fn edit_fig1(from: &str, to: &str) -> String {
    let text = riverkron::synth::bundled_json("all_tie").unwrap();
    assert!(text.contains(from));
    text.replacen(from, to, 1)
}

#[test]
fn bad_instances_are_rejected() {
    let unknown = edit_fig1("\"2d2c\"", "\"Zx2c\"");
    assert!(matches!(instance_from_json(&unknown), Err(Error::UnknownCard(_))));
    let on_board = edit_fig1("\"2d2c\"", "\"As2c\"");
    assert!(instance_from_json(&on_board).is_err());
    let extra = edit_fig1("\"schema_version\": 1,", "\"schema_version\": 1, \"colour\": 3,");
    assert!(matches!(instance_from_json(&extra), Err(Error::Parse { .. })));
    let version = edit_fig1("\"schema_version\": 1", "\"schema_version\": 9");
    assert!(instance_from_json(&version).is_err());
    match instance_from_json("{\n  \"schema_version\": 1,\n  oops") {
        Err(Error::Parse { location, .. }) => assert!(location.contains("line 3"), "{location}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bundles_round_trip_and_still_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    for inst in common::corpus(6, 37) {
        let payoff = KronPayoff::assemble(&inst).unwrap();
        let a = common::tree_walk_dense(&inst);
        for technique in [Technique::A, Technique::B] {
            let s = sparsify(&payoff, technique, true).unwrap();
            write_sparsification(&s, dir.path()).unwrap();
            let back = read_sparsification(dir.path()).unwrap();
            assert_eq!(back.technique(), technique);
            assert_eq!(back.size(), s.size());
            assert!(common::max_abs_diff(&back.to_dense(), &s.to_dense()) <= 1e-15 * a.abs().max());
            assert!(common::max_abs_diff(&back.to_dense(), &a) <= 1e-9 * a.abs().max().max(1.0));
        }
    }
}

#[test]
fn truncated_bundles_are_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let payoff = KronPayoff::assemble(&bundled("fig1").unwrap()).unwrap();
    let s = sparsify(&payoff, Technique::B, true).unwrap();
    write_sparsification(&s, dir.path()).unwrap();
    let v = dir.path().join("v.mtx");
    let text = fs::read_to_string(&v).unwrap();
    let keep = text.lines().count() / 2;
    fs::write(&v, text.lines().take(keep).collect::<Vec<_>>().join("\n")).unwrap();
    assert!(matches!(read_sparsification(dir.path()), Err(Error::CorruptHeader(_))));

    write_sparsification(&s, dir.path()).unwrap();
    let header = dir.path().join("header.json");
    let text = fs::read_to_string(&header).unwrap();
    fs::write(&header, &text[..text.len() / 2]).unwrap();
    assert!(read_sparsification(dir.path()).is_err());
}

#[test]
fn traces_and_profiles_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let payoff = KronPayoff::assemble(&bundled("fig1").unwrap()).unwrap();
    let s = sparsify(&payoff, Technique::A, true).unwrap();
    let (profile, trace) = dcfr_solve(&payoff, &s, &DcfrParams { max_iters: 120, ..DcfrParams::default() }).unwrap();
    let path = dir.path().join("trace.csv");
    write_trace(&trace, &path).unwrap();
    assert_eq!(read_trace(&path).unwrap(), trace);
    let path = dir.path().join("profile.json");
    write_profile(&payoff, &profile, &path).unwrap();
    let file = read_profile(&path).unwrap();
    assert_eq!(file.profile(), profile);
}

type Row = (String, Vec<(String, f64)>, String, f64);

/// Model content keyed by names, independent of variable order.
fn canonical(m: &LpModel) -> (bool, Vec<(String, f64)>, Vec<(String, bool, bool)>, Vec<Row>) {
    let name = |j: usize| m.var_names[j].clone();
    let mut vars: Vec<_> = (0..m.num_vars()).map(|j| (name(j), m.nonnegative[j], m.binary[j])).collect();
    vars.sort_by(|a, b| a.0.cmp(&b.0));
    let mut obj: Vec<_> = m.objective.iter().map(|&(j, c)| (name(j), c)).collect();
    obj.sort_by(|a, b| a.0.cmp(&b.0));
    let rows = m
        .constraints
        .iter()
        .map(|c| {
            let mut t: Vec<_> = c.terms.iter().map(|&(j, v)| (name(j), v)).collect();
            t.sort_by(|a, b| a.0.cmp(&b.0));
            (c.name.clone(), t, format!("{:?}", c.sense), c.rhs)
        })
        .collect();
    (m.maximize, obj, vars, rows)
}

#[test]
fn lp_shapes() {
    let payoff = KronPayoff::assemble(&bundled("fig1").unwrap()).unwrap();
    let sk = payoff.skeleton();
    for player in [Player::P1, Player::P2] {
        let opp = player.opponent();
        let (m, mo) = (payoff.num_hands(player), payoff.num_hands(opp));
        let lp = build_lp(&payoff, None, player, GUARD).unwrap();
        let own_rows = 1 + m * sk.num_infosets(player);
        let opp_rows = 1 + mo * sk.num_infosets(opp);
        assert_eq!(lp.num_vars(), 1 + payoff.dim(player) + opp_rows);
        assert_eq!(lp.num_constraints(), own_rows + 1 + payoff.dim(opp));

        let s = sparsify(&payoff, Technique::B, true).unwrap();
        let sp = build_lp(&payoff, Some(&s), player, GUARD).unwrap();
        assert_eq!(sp.num_vars(), lp.num_vars() + s.k());
        assert_eq!(sp.num_constraints(), lp.num_constraints() + s.k());
        if s.size().total < payoff.dense_nnz() {
            assert!(sp.nnz() < lp.nnz(), "{} {}", sp.nnz(), lp.nnz());
        }

        let milp = build_milp(&payoff, Some(&s), player, GUARD).unwrap();
        assert_eq!(milp.num_binaries(), 1 + payoff.dim(player));
        let (lp_text, milp_text) = (sp.render(), milp.render());
        let start = milp_text.find("Binaries").unwrap();
        let end = milp_text.rfind("End").unwrap();
        assert_eq!(format!("{}{}", &milp_text[..start], &milp_text[end..]), lp_text);
        assert_eq!(canonical(&LpModel::parse(&milp_text).unwrap()), canonical(&milp));
        assert_eq!(canonical(&LpModel::parse(&lp_text).unwrap()), canonical(&sp));
    }
}

#[test]
fn solver_profile_is_nearly_feasible_in_the_lp() {
    let payoff = KronPayoff::assemble(&bundled("fig1").unwrap()).unwrap();
    let s = sparsify(&payoff, Technique::A, true).unwrap();
    let (profile, trace) = dcfr_solve(&payoff, &s, &DcfrParams { max_iters: 2000, ..DcfrParams::default() }).unwrap();
    let expl = trace.last().unwrap().exploitability;
    let pot = payoff.initial_pot();
    let (lo, hi) = value_bounds(&payoff, &s, &profile).unwrap();
    for (player, x, value) in [(Player::P1, &profile.x1, lo), (Player::P2, &profile.x2, -hi)] {
        for sp in [None, Some(&s)] {
            let model = LpModel::parse(&build_lp(&payoff, sp, player, GUARD).unwrap().render()).unwrap();
            let point = lp_assignment(&payoff, sp, player, x).unwrap();
            let eval = model.evaluate(&point);
            assert!(eval.max_violation <= 10.0 * expl * pot + 1e-6, "{}", eval.max_violation);
            assert!((eval.objective - value).abs() <= 1e-6 * pot, "{} {value}", eval.objective);
        }
    }
}

#[test]
fn deterministic_optimum_is_feasible_in_the_milp() {
    let inst = bundled("bluff").unwrap();
    let payoff = KronPayoff::assemble(&inst).unwrap();
    let s = sparsify(&payoff, Technique::B, true).unwrap();
    for player in [Player::P1, Player::P2] {
        let (det, x) = enumerate_deterministic_optimum(&payoff, player, DEFAULT_ENUMERATION_GUARD).unwrap();
        for sp in [None, Some(&s)] {
            let model = build_milp(&payoff, sp, player, GUARD).unwrap();
            let eval = model.evaluate(&lp_assignment(&payoff, sp, player, &x).unwrap());
            assert!(eval.max_violation <= 1e-6, "{}", eval.max_violation);
            assert!((eval.objective - det).abs() <= 1e-6, "{} {det}", eval.objective);
        }
    }
}

#[test]
fn lp_export_rejects_a_wrong_sparsification() {
    let p1 = KronPayoff::assemble(&bundled("fig1").unwrap()).unwrap();
    let p2 = KronPayoff::assemble(&bundled("all_tie").unwrap()).unwrap();
    let s = sparsify(&p1, Technique::B, true).unwrap();
    assert!(build_lp(&p2, Some(&s), Player::P1, GUARD).is_err());
}
