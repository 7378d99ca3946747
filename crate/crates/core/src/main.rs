//! Command-line front end.
//!
//! Exit codes: 0 = doomsday equilibrium exists (or certificate valid),
//! 3 = no equilibrium (or certificate invalid), 1 = input/usage error,
//! 2 = resource limit hit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use doomsday::{
    assemble_profile, check_profile, decide_doomsday, export_dot, gen_random,
    parse_certificate_json, parse_game_file, serialize_result, GenParams, ObjectiveKind,
    SolveError, Verdict,
};

#[derive(Parser)]
#[command(
    name = "doomsday",
    version,
    about = "Doomsday equilibria for games on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the game admits a doomsday equilibrium.
    Solve {
        file: PathBuf,
        /// Print the result as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Write a DOT rendering with the certificate highlighted.
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
    },
    /// Verify a certificate against the definition.
    Check { file: PathBuf, cert: PathBuf },
    /// Generate a random game file on stdout.
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        players: u32,
        /// Objective class: reach, safety, buchi, cobuchi or parity.
        #[arg(long)]
        class: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
    },
    /// Render a game file as DOT on stdout.
    Dot { file: PathBuf },
}

const EXIT_EXISTS: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_NOT_EXISTS: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap would exit with its own code; the usage-error code here is 1
            let _ = err.print();
            return ExitCode::from(EXIT_INPUT);
        }
    };
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Solve { file, json, dot } => solve(&file, json, dot.as_deref()),
        Command::Check { file, cert } => check(&file, &cert),
        Command::Gen {
            states,
            players,
            class,
            seed,
            density,
        } => gen(states, players, &class, seed, density),
        Command::Dot { file } => dot_only(&file),
    }
}

fn input_err(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

fn load_game(path: &std::path::Path) -> Result<(doomsday::Arena, doomsday::ObjectiveProfile), u8> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format_args!("{}: {e}", path.display())))?;
    parse_game_file(&text).map_err(input_err)
}

fn solve(file: &std::path::Path, json: bool, dot: Option<&std::path::Path>) -> u8 {
    let Ok((arena, profile)) = load_game(file) else {
        return EXIT_INPUT;
    };
    let verdict = match decide_doomsday(&arena, &profile) {
        Ok(v) => v,
        Err(e @ SolveError::SizeLimit(_)) | Err(e @ SolveError::Recursion(_)) => {
            eprintln!("error: {e}");
            return EXIT_LIMIT;
        }
    };
    if json {
        print!("{}", serialize_result(&arena, &verdict));
    } else {
        match &verdict {
            Verdict::Exists(cert) => {
                println!("doomsday equilibrium: exists");
                println!(
                    "main play: {} ({})^w",
                    cert.stem_names(&arena).join(" "),
                    cert.cycle_names(&arena).join(" ")
                );
            }
            Verdict::NotExists => println!("doomsday equilibrium: none"),
        }
    }
    if let Some(out) = dot {
        let cert = match &verdict {
            Verdict::Exists(cert) => Some(cert.as_ref()),
            Verdict::NotExists => None,
        };
        let rendered = export_dot(&arena, &profile, cert);
        if let Err(e) = std::fs::write(out, rendered) {
            return input_err(format_args!("{}: {e}", out.display()));
        }
    }
    match verdict {
        Verdict::Exists(_) => EXIT_EXISTS,
        Verdict::NotExists => EXIT_NOT_EXISTS,
    }
}

fn check(file: &std::path::Path, cert_path: &std::path::Path) -> u8 {
    let Ok((arena, profile)) = load_game(file) else {
        return EXIT_INPUT;
    };
    let cert_text = match std::fs::read_to_string(cert_path) {
        Ok(t) => t,
        Err(e) => return input_err(format_args!("{}: {e}", cert_path.display())),
    };
    let cert = match parse_certificate_json(&cert_text, &arena, &profile) {
        Ok(c) => c,
        Err(e) => return input_err(e),
    };
    let lambda = match assemble_profile(&cert, &arena, &profile) {
        Ok(l) => l,
        Err(e) => return input_err(e),
    };
    let report = check_profile(&arena, &profile, &lambda);
    if report.is_de {
        println!("certificate: valid doomsday equilibrium");
        EXIT_EXISTS
    } else {
        let violation = report.violation.expect("failed checks carry a violation");
        let names = |seq: &[doomsday::StateIdx]| -> Vec<&str> {
            seq.iter().map(|&s| arena.name(s)).collect()
        };
        match violation.beneficiary {
            Some(j) => println!(
                "certificate: invalid (deviation against {} keeps {} satisfied; witness {} ({})^w)",
                violation.victim,
                j,
                names(&violation.stem).join(" "),
                names(&violation.cycle).join(" "),
            ),
            None => println!(
                "certificate: invalid (main play violates {}'s objective)",
                violation.victim
            ),
        }
        EXIT_NOT_EXISTS
    }
}

fn gen(states: usize, players: u32, class: &str, seed: u64, density: f64) -> u8 {
    let Some(kind) = ObjectiveKind::parse(class) else {
        return input_err(format_args!(
            "unknown class `{class}` (expected reach, safety, buchi, cobuchi or parity)"
        ));
    };
    let mut params = GenParams::new(states, players, kind, seed);
    params.edge_density = density;
    match gen_random(&params) {
        Ok(text) => {
            print!("{text}");
            EXIT_EXISTS
        }
        Err(e) => input_err(e),
    }
}

fn dot_only(file: &std::path::Path) -> u8 {
    let Ok((arena, profile)) = load_game(file) else {
        return EXIT_INPUT;
    };
    print!("{}", export_dot(&arena, &profile, None));
    EXIT_EXISTS
}
