use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use emlab::cli::{execute, parse_config, Subcommand, KEYS};

const SUBCOMMANDS: [(&str, Subcommand, &str); 5] = [
    ("roots", Subcommand::Roots, "characteristic roots on a log grid of |k|"),
    ("green-verify", Subcommand::GreenVerify, "coefficient, transverse, per-mode and conservation checks"),
    ("linear-decay", Subcommand::LinearDecay, "whole-space linear decay rates of the sum and difference systems"),
    ("nonlinear", Subcommand::Nonlinear, "small-data torus run with energy monitoring"),
    ("fit", Subcommand::Fit, "re-fit a decay rate from an existing CSV"),
];

fn cli() -> Command {
    let mut root = Command::new("emlab")
        .about("Dispersion, Green's functions and small-data dynamics of the bipolar Euler-Maxwell system")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, _, about) in SUBCOMMANDS {
        let mut sub = Command::new(name)
            .about(about)
            .arg(Arg::new("config").long("config").value_name("FILE").help("`key = value` file, overridden by flags"));
        for key in KEYS {
            let long = key.replace('_', "-");
            sub = sub.arg(Arg::new(key).long(long).value_name("VALUE").action(ArgAction::Append).num_args(1).allow_negative_numbers(true));
        }
        root = root.subcommand(sub);
    }
    root
}

/// Flags in command-line order, so a repeated key keeps its last value.
fn flags(m: &ArgMatches) -> Vec<(String, String)> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for key in KEYS {
        if let (Some(idx), Some(vals)) = (m.indices_of(key), m.get_many::<String>(key)) {
            out.extend(idx.zip(vals).map(|(i, v)| (i, key.to_string(), v.clone())));
        }
    }
    out.sort_by_key(|r| r.0);
    out.into_iter().map(|(_, k, v)| (k, v)).collect()
}

fn init_threads() {
    if let Ok(v) = std::env::var("EMLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("EMLAB_THREADS ignored: {e}");
                }
            }
            _ => log::warn!("EMLAB_THREADS must be a positive integer, got `{v}`"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let m = cli().get_matches();
    let (name, sm) = m.subcommand().expect("subcommand required");
    let sub = SUBCOMMANDS.iter().find(|s| s.0 == name).expect("known subcommand").1;
    let file = match sm.get_one::<String>("config") {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: config file {p}: {e}");
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let cfg = match parse_config(sub, file.as_deref(), &flags(sm)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
