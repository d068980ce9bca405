use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use riverkron::bench::{render_table, sweep};
use riverkron::engine::Engine;
use riverkron::export::{read_instance, read_sparsification, write_lp, write_milp, write_profile, write_sparsification, write_trace};
use riverkron::skeleton::TerminalKind;
use riverkron::solver::{dcfr_solve, enumerate_deterministic_optimum, price_of_determinism, reconstruction_error, value_bounds};
use riverkron::sparsify::sparsify;
use riverkron::synth::{bundled, BUNDLED};
use riverkron::{BettingConfig, DcfrParams, Error, KronPayoff, Player, Result, RiverInstance, Sparsification, Technique};

const DEFAULT_DENSE_GUARD: u128 = 50_000_000;

#[derive(Parser)]
#[command(name = "riverkron", version, about = "Kronecker-structured poker river endgames")]
struct Cli {
    /// Worker threads for parallel products and updates (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArg {
    /// Instance JSON file, or a bundled name (fig1, synth20, bluff, all_tie).
    #[arg(long, short)]
    instance: String,
}

#[derive(Args)]
struct SparsifyArgs {
    /// a or b.
    #[arg(long, short, default_value = "b")]
    technique: Technique,

    /// Keep the columns with zero `V`.
    #[arg(long)]
    no_postprocess: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the betting skeleton and print its pot-contribution table.
    Build {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Sparsify the payoff matrix and write a bundle.
    Sparsify {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        sparsify: SparsifyArgs,
        /// Bundle directory.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run discounted CFR; writes trace.csv and profile.json.
    Solve {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        sparsify: SparsifyArgs,
        /// Use a previously written bundle instead of sparsifying.
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        /// Stop once normalized exploitability drops to this value.
        #[arg(long, default_value_t = 0.0)]
        target_expl: f64,
        #[arg(long, default_value_t = 50)]
        checkpoint_every: usize,
        /// Update both players from the same profile.
        #[arg(long)]
        simultaneous: bool,
        /// Parallel gradient products and regret updates.
        #[arg(long)]
        parallel: bool,
        /// Output directory.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Best deterministic strategy by enumeration and the price of determinism.
    Det {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, default_value_t = 1)]
        player: u8,
        /// Cap on the number of deterministic strategies.
        #[arg(long, default_value_t = 1_000_000)]
        guard: u128,
        /// DCFR iterations used for the mixed value.
        #[arg(long, default_value_t = 20_000)]
        iters: usize,
    },
    /// Write the sequence-form LP of one player.
    ExportLp(ExportArgs),
    /// Write the MILP over deterministic strategies of one player.
    ExportMilp(ExportArgs),
    /// Verify the sparsifications against the dense payoff matrix.
    Check {
        #[command(flatten)]
        instance: InstanceArg,
        /// Cap on dense matrix entries.
        #[arg(long, default_value_t = DEFAULT_DENSE_GUARD)]
        guard: u128,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sparsification sizes and matvec throughput on synthetic instances.
    Bench {
        /// Hands per side, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        hands: Vec<usize>,
        /// Draws per hand count.
        #[arg(long, default_value_t = 3)]
        draws: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Products timed per technique and direction.
        #[arg(long, default_value_t = 20)]
        matvecs: usize,
    },
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    instance: InstanceArg,
    #[arg(long, default_value_t = 1)]
    player: u8,
    /// a, b, or none for the unsparsified matrix.
    #[arg(long, short, default_value = "b")]
    technique: String,
    /// Cap on payoff nonzeros when writing the unsparsified matrix.
    #[arg(long, default_value_t = DEFAULT_DENSE_GUARD)]
    guard: u128,
    #[arg(long, short)]
    out: PathBuf,
}

fn load(name: &str) -> Result<RiverInstance> {
    if BUNDLED.contains(&name) && !Path::new(name).exists() {
        bundled(name)
    } else {
        read_instance(Path::new(name)).map_err(|e| match e {
            Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{name}: {io}"))),
            other => other,
        })
    }
}

fn print_size(payoff: &KronPayoff, s: &Sparsification) {
    let r = s.size();
    let dense = payoff.dense_nnz();
    println!("dense nnz      {dense}");
    println!("technique      {}", s.technique());
    println!("nnz A_hat      {}", r.a_hat);
    println!("nnz U          {}", r.u);
    println!("nnz M          {}", r.m);
    println!("nnz V          {}", r.v);
    println!("k              {}", s.k());
    println!("size           {}", r.total);
    println!("ratio          {:.2}", dense as f64 / r.total.max(1) as f64);
}

fn build(instance: &str) -> Result<()> {
    let inst = load(instance)?;
    let payoff = KronPayoff::assemble(&inst)?;
    let sk = payoff.skeleton();
    println!("board          {}", inst.board());
    for p in [Player::P1, Player::P2] {
        println!(
            "{p}: {} hands, {} sequences, {} infosets",
            payoff.num_hands(p),
            sk.num_sequences(p),
            sk.num_infosets(p)
        );
    }
    println!("terminals      {}", sk.terminals().len());
    println!("dense nnz      {}", payoff.dense_nnz());
    println!();
    println!("{:<36} {:<10} {:>12} {:>12}", "path", "kind", "P1", "P2");
    for t in sk.terminals() {
        let kind = match t.kind {
            TerminalKind::Fold(p) => format!("{p} folds"),
            TerminalKind::Showdown => "showdown".into(),
        };
        println!(
            "{:<36} {:<10} {:>12.2} {:>12.2}",
            sk.path_label(t.node),
            kind,
            t.contributions[0],
            t.contributions[1]
        );
    }
    Ok(())
}

fn sparsify_cmd(instance: &str, args: &SparsifyArgs, out: &Path) -> Result<()> {
    let payoff = KronPayoff::assemble(&load(instance)?)?;
    let s = sparsify(&payoff, args.technique, !args.no_postprocess)?;
    write_sparsification(&s, out)?;
    print_size(&payoff, &s);
    println!("bundle         {}", out.display());
    Ok(())
}

fn solve(
    instance: &str,
    args: &SparsifyArgs,
    bundle: Option<&Path>,
    params: DcfrParams,
    out: &Path,
) -> Result<()> {
    let payoff = KronPayoff::assemble(&load(instance)?)?;
    let s = match bundle {
        Some(dir) => {
            let s = read_sparsification(dir)?;
            let err = reconstruction_error(&payoff, &s)?;
            if !(err <= 1e-9) {
                return Err(Error::NonReconstructing(err));
            }
            s
        }
        None => sparsify(&payoff, args.technique, !args.no_postprocess)?,
    };
    let (profile, trace) = dcfr_solve(&payoff, &s, &params)?;
    std::fs::create_dir_all(out)?;
    write_trace(&trace, &out.join("trace.csv"))?;
    write_profile(&payoff, &profile, &out.join("profile.json"))?;
    let (lo, hi) = value_bounds(&payoff, &s, &profile)?;
    if let Some(last) = trace.last() {
        println!("iterations     {}", last.iteration);
        println!("seconds        {:.3}", last.seconds);
        println!("exploitability {:.6e}", last.exploitability);
    }
    println!("value bounds   [{lo:.6}, {hi:.6}]");
    println!("output         {}", out.display());
    Ok(())
}

fn det(instance: &str, player: u8, guard: u128, iters: usize) -> Result<()> {
    let player = Player::from_number(player)?;
    let payoff = KronPayoff::assemble(&load(instance)?)?;
    let (det, x) = enumerate_deterministic_optimum(&payoff, player, guard)?;
    let det = det + 0.0;
    let s = sparsify(&payoff, Technique::B, true)?;
    let params = DcfrParams { max_iters: iters, ..DcfrParams::default() };
    let (profile, trace) = dcfr_solve(&payoff, &s, &params)?;
    let (lo, hi) = value_bounds(&payoff, &s, &profile)?;
    let (guaranteed, upper) = match player {
        Player::P1 => (lo, hi),
        Player::P2 => (-hi, -lo),
    };
    let mixed = guaranteed.max(det);
    let pod = price_of_determinism(mixed, det, payoff.initial_pot())?;
    println!("player                {player}");
    println!("deterministic value   {det:.9}");
    println!("mixed value in        [{mixed:.9}, {upper:.9}]");
    if let Some(last) = trace.last() {
        println!("dcfr exploitability   {:.3e}", last.exploitability);
    }
    println!("price of determinism  {pod:.9}");
    let n = payoff.num_sequences(player);
    let sk = payoff.skeleton();
    for (h, hand) in payoff.hands(player).iter().enumerate() {
        let played: Vec<String> = (0..n)
            .filter(|&q| x[h * n + q] > 0.5)
            .map(|q| sk.sequence_label(player, q))
            .collect();
        println!("  {hand}: {}", played.join(", "));
    }
    Ok(())
}

fn export(args: &ExportArgs, milp: bool) -> Result<()> {
    let player = Player::from_number(args.player)?;
    let payoff = KronPayoff::assemble(&load(&args.instance.instance)?)?;
    let s = match args.technique.to_ascii_lowercase().as_str() {
        "none" => None,
        t => Some(sparsify(&payoff, t.parse()?, true)?),
    };
    let model = if milp {
        write_milp(&payoff, s.as_ref(), player, &args.out, args.guard)?
    } else {
        write_lp(&payoff, s.as_ref(), player, &args.out, args.guard)?
    };
    println!("variables      {}", model.num_vars());
    println!("constraints    {}", model.num_constraints());
    println!("nonzeros       {}", model.nnz());
    if milp {
        println!("binaries       {}", model.num_binaries());
    }
    println!("written        {}", args.out.display());
    Ok(())
}

fn check(instance: &str, guard: u128, seed: u64) -> Result<bool> {
    let payoff = KronPayoff::assemble(&load(instance)?)?;
    let a = payoff.dense_expand(guard)?;
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut ok = true;
    for technique in [Technique::A, Technique::B] {
        for post in [false, true] {
            let s = sparsify(&payoff, technique, post)?;
            let err = (s.to_dense() - &a).abs().max() / scale;
            let engine = Engine::new(&s);
            let mut mv = 0.0f64;
            for _ in 0..10 {
                let x: Vec<f64> = (0..a.ncols()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..a.nrows()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let ax = &a * DVector::from_column_slice(&x);
                let aty = a.transpose() * DVector::from_column_slice(&y);
                mv = mv.max(rel(&engine.matvec(&x)?, ax.as_slice()));
                mv = mv.max(rel(&engine.matvec_transpose(&y)?, aty.as_slice()));
            }
            let pass = err <= 1e-9 && mv <= 1e-9;
            ok &= pass;
            println!(
                "[{}] technique {technique}{}: reconstruction {err:.3e}, matvec {mv:.3e} (tol 1e-9), size {}",
                if pass { "PASS" } else { "FAIL" },
                if post { " postprocessed" } else { "" },
                s.size().total
            );
        }
    }
    Ok(ok)
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn run(cli: Cli) -> Result<bool> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Build { instance } => build(&instance.instance)?,
        Command::Sparsify { instance, sparsify, out } => sparsify_cmd(&instance.instance, &sparsify, &out)?,
        Command::Solve {
            instance,
            sparsify,
            bundle,
            iters,
            target_expl,
            checkpoint_every,
            simultaneous,
            parallel,
            out,
        } => {
            let params = DcfrParams {
                max_iters: iters,
                target_exploitability: target_expl,
                checkpoint_every,
                alternating: !simultaneous,
                parallel,
                ..DcfrParams::default()
            };
            solve(&instance.instance, &sparsify, bundle.as_deref(), params, &out)?
        }
        Command::Det { instance, player, guard, iters } => det(&instance.instance, player, guard, iters)?,
        Command::ExportLp(args) => export(&args, false)?,
        Command::ExportMilp(args) => export(&args, true)?,
        Command::Check { instance, guard, seed } => return check(&instance.instance, guard, seed),
        Command::Bench { hands, draws, seed, matvecs } => {
            let seeds: Vec<u64> = (seed..seed + draws).collect();
            let rows = sweep(&hands, &seeds, &BettingConfig::fig1(), matvecs)?;
            print!("{}", render_table(&rows));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
