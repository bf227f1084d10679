//! `sdfnoc` — command-line front end for the design flow:
//! validate application graphs, merge them into a union graph, place and
//! route on a mesh NoC, derive per-application crossbar configurations,
//! simulate, and report area savings.

mod commands;
mod project;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "sdfnoc", version, about = "Dataflow-on-NoC design flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate application graph files.
    Validate {
        /// Application graph files.
        files: Vec<String>,
    },
    /// Merge application graphs into a packed union graph.
    Merge {
        /// Application graph files, in application-id order.
        files: Vec<String>,
        /// Output union file.
        #[arg(long)]
        out: String,
        /// Randomize the packing combination order (omit for the
        /// deterministic lexicographic order).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Place and route a union graph on a mesh NoC.
    Pnr {
        /// Union file produced by `merge`.
        #[arg(long)]
        union: String,
        /// Mesh dimensions, e.g. 2x5.
        #[arg(long)]
        mesh: String,
        /// Placement seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rip-up-and-reroute iteration cap.
        #[arg(long, default_value_t = sdfnoc_core::pnr::DEFAULT_MAX_RIP_UP)]
        max_rip_up: usize,
        /// Output pnr file.
        #[arg(long)]
        out: String,
    },
    /// Derive the crossbar configuration for one application.
    Config {
        /// Union file (resolves application names).
        #[arg(long)]
        union: String,
        /// PnR file produced by `pnr`.
        #[arg(long)]
        pnr: String,
        /// Application name or 1-based id.
        #[arg(long)]
        app: String,
        /// Output config file.
        #[arg(long)]
        out: String,
    },
    /// Simulate one application on the configured NoC.
    Simulate {
        #[arg(long)]
        union: String,
        #[arg(long)]
        pnr: String,
        /// Application name or 1-based id.
        #[arg(long)]
        app: String,
        /// Input stream file (vertices in application coordinates).
        #[arg(long)]
        streams: String,
        /// Maximum per-link delay in ticks.
        #[arg(long, default_value_t = 0)]
        delay_max: u64,
        /// Delay-model seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output stream file.
        #[arg(long)]
        out: String,
        /// Print one line per link event to stdout.
        #[arg(long)]
        trace: bool,
    },
    /// Report area savings.
    Report {
        /// model: compute areas from a project; given: use measured totals.
        #[arg(long)]
        mode: String,
        /// Project file (model mode).
        #[arg(long)]
        project: Option<String>,
        /// Area table file overriding the project's table (model mode).
        #[arg(long)]
        areas: Option<String>,
        /// Measured standalone totals (given mode, repeatable).
        #[arg(long)]
        standalone: Vec<u64>,
        /// Measured reconfigurable total (given mode).
        #[arg(long)]
        reconfigurable: Option<u64>,
        /// Packing seed override (model mode).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export an application graph or union file as Graphviz DOT.
    ExportDot {
        /// Input artifact (application graph or union file).
        file: String,
        /// Output DOT file.
        #[arg(long)]
        out: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { files } => commands::validate(&files),
        Command::Merge { files, out, seed } => commands::merge(&files, &out, seed),
        Command::Pnr {
            union,
            mesh,
            seed,
            max_rip_up,
            out,
        } => commands::pnr(&union, &mesh, seed, max_rip_up, &out),
        Command::Config {
            union,
            pnr,
            app,
            out,
        } => commands::config(&union, &pnr, &app, &out),
        Command::Simulate {
            union,
            pnr,
            app,
            streams,
            delay_max,
            seed,
            out,
            trace,
        } => commands::simulate(&union, &pnr, &app, &streams, delay_max, seed, &out, trace),
        Command::Report {
            mode,
            project,
            areas,
            standalone,
            reconfigurable,
            seed,
        } => commands::report(
            &mode,
            project.as_deref(),
            areas.as_deref(),
            &standalone,
            reconfigurable,
            seed,
        ),
        Command::ExportDot { file, out } => commands::export_dot(&file, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
