use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qin_cli::output::{format_sig12, write_table, MC_FILE};
use qin_cli::{mc, simulate, verify, CliError, Scenario};
use qin_core::teleport::BellConvention;

#[derive(Parser)]
#[command(name = "qinsim", version, about = "Satellite-linked quantum network pass simulator")]
struct Cli {
    /// Scenario file (TOML); reference parameters when omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `simulation.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pass geometry and downlink budgets only.
    Pass,
    /// Rates, fidelity and cumulative pairs over the pass, one series per straylight level.
    Simulate {
        /// Comma-separated straylight levels (clicks/s); overrides `straylight.levels_hz`.
        #[arg(long, value_delimiter = ',')]
        straylight: Option<Vec<f64>>,
    },
    /// Analytic self-checks.
    Verify {
        #[arg(long, hide = true)]
        perturb_bell_convention: bool,
    },
    /// Monte Carlo check of each elementary link's window success probability.
    Mc {
        /// Overrides `simulation.monte_carlo_trials`.
        #[arg(long)]
        trials: Option<u64>,
    },
}

fn load(cli: &Cli) -> Result<Scenario, CliError> {
    let mut scenario = match &cli.scenario {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    if let Some(seed) = cli.seed {
        scenario.simulation.seed = seed;
    }
    Ok(scenario)
}

fn pass(scenario: &Scenario, out: &Path) -> Result<(), CliError> {
    let (geometry, path) = simulate::run_pass(scenario, out)?;
    let w = geometry.window.expect("window checked");
    println!("wrote {}", path.display());
    println!(
        "dual visibility {} s to {} s ({} s)",
        format_sig12(w.start_s),
        format_sig12(w.end_s),
        format_sig12(w.duration())
    );
    Ok(())
}

fn run_simulate(mut scenario: Scenario, straylight: Option<Vec<f64>>, out: &Path) -> Result<(), CliError> {
    if let Some(levels) = straylight {
        scenario.straylight.levels_hz = levels;
        scenario.validate()?;
    }
    let run = simulate::simulate(&scenario)?;
    for path in simulate::write_outputs(&run, out)? {
        println!("wrote {}", path.display());
    }
    let s = &run.summary;
    println!("pass duration        {} s", format_sig12(s.pass.duration_s));
    println!("peak sigma_sat       {} pairs/s", format_sig12(s.rates.peak_sigma_sat_pairs_per_s));
    println!("total ground pairs   {}", format_sig12(s.rates.total_sat_pairs));
    println!("total end pairs      {}", format_sig12(s.rates.total_end_pairs));
    println!("end/ground ratio     {}", format_sig12(s.rates.end_to_ground_ratio));
    println!(
        "gate budget          {} CZ, {} two-qubit unitaries",
        s.gates.cz_gates, s.gates.arbitrary_two_qubit_unitaries
    );
    for f in &s.fidelity {
        println!(
            "straylight {:>8} Hz  F peak {:.4} at {} s, floor {:.4}",
            format_sig12(f.straylight_hz),
            f.peak,
            format_sig12(f.peak_time_s),
            f.floor
        );
    }
    Ok(())
}

fn run_verify(perturb: bool) -> Result<(), CliError> {
    let convention = if perturb {
        BellConvention::FlippedPsiMinus
    } else {
        BellConvention::Standard
    };
    let checks = verify::run_all(convention);
    print!("{}", verify::report(&checks));
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

fn run_mc(scenario: &Scenario, trials: Option<u64>, out: &Path) -> Result<(), CliError> {
    let trials = trials.unwrap_or(scenario.simulation.monte_carlo_trials);
    let rows = mc::run_mc(scenario, trials, scenario.simulation.seed)?;
    print!("{}", mc::format_table(&rows));
    std::fs::create_dir_all(out).map_err(|e| CliError::Output(format!("{}: {e}", out.display())))?;
    write_table(&out.join(MC_FILE), &mc::HEADER, rows.iter().map(mc::McRow::cells).collect())?;
    if mc::all_within_limit(&rows) {
        Ok(())
    } else {
        Err(CliError::Verification(format!("a link deviates by more than {} standard errors", mc::Z_LIMIT)))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify { perturb_bell_convention } => run_verify(perturb_bell_convention),
        Command::Pass => pass(&load(&cli)?, &cli.out),
        Command::Simulate { ref straylight } => run_simulate(load(&cli)?, straylight.clone(), &cli.out),
        Command::Mc { trials } => run_mc(&load(&cli)?, trials, &cli.out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qinsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
