use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ptower::generate::{self, TowerParams};
use ptower::homology_presentation::homology_presentation;
use ptower::io::{parse_tower, write_columns, write_matrix, write_tower};
use ptower::oracle::check_tower;
use ptower::pirep::assemble_pirep;
use ptower::presentation::{run_presentation, PresentationOptions};
use ptower::tower::PosetTower;

/// Minimal presentations, PiReps and homology of poset towers over GF(2).
#[derive(Parser)]
#[command(name = "ptower", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Chain-module presentations: p1, f and optionally p2 per degree.
    Presentation {
        file: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        relrel: bool,
        /// Minimize p2; implies --relrel.
        #[arg(long)]
        reduce: bool,
        #[command(flatten)]
        output: Output,
    },
    /// The two maps of the PiRep of H_L.
    Pirep {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        output: Output,
    },
    /// A presentation of H_L.
    Homology {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        minimize: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Check every invariant against brute force; exit code 0 iff all pass.
    Verify {
        file: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
        /// Only check the chain presentations.
        #[arg(long)]
        quick: bool,
    },
    /// Emit a generated tower file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Sizes of a tower.
    Stats { file: PathBuf },
}

#[derive(Subcommand)]
enum GenKind {
    /// One-critical bifiltration on an NX by NY grid.
    Grid {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        /// Number of vertices; the simplex count grows with it.
        #[arg(long)]
        fill: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// One-parameter filtration.
    Chain {
        #[arg(long)]
        len: usize,
        #[arg(long)]
        simplices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Random DAG with multi-critical births and collapses.
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        /// Random simplices drawn, each with its faces.
        #[arg(long)]
        gens: usize,
        /// Vertex merges.
        #[arg(long, default_value_t = 0)]
        events: usize,
        #[arg(long, default_value_t = 8)]
        vertices: usize,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Random tower over a zigzag poset.
    Zigzag {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        gens: usize,
        #[arg(long, default_value_t = 0)]
        events: usize,
        #[arg(long, default_value_t = 8)]
        vertices: usize,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn load(path: &Path) -> Result<PosetTower> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tower(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `PTOWER_SEED` wins over `--seed`.
fn seed(flag: u64) -> Result<u64> {
    match std::env::var("PTOWER_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("PTOWER_SEED is not an integer: `{v}`")),
        Err(_) => Ok(flag),
    }
}

fn presentation(
    file: &Path,
    degree: Option<usize>,
    relrel: bool,
    reduce: bool,
    output: &Output,
) -> Result<()> {
    let tower = load(file)?;
    let opts = PresentationOptions {
        relrel: relrel || reduce,
        reduce,
        record_active: false,
    };
    let start = Instant::now();
    let cp = run_presentation(&tower, opts)?;
    let elapsed = start.elapsed();
    if let Some(l) = degree {
        if l >= cp.degree_count() {
            bail!(
                "degree {l} out of range: tower has degrees 0..{}",
                cp.degree_count()
            );
        }
    }
    let p = tower.poset();
    let mut out = String::new();
    for d in cp
        .degrees()
        .iter()
        .filter(|d| degree.is_none_or(|l| l == d.degree))
    {
        out.push_str(&write_matrix("p1", d.degree, &d.p1, p));
        out.push_str(&write_matrix("f", d.degree, &d.f, p));
        if let Some(p2) = &d.p2 {
            out.push_str(&write_matrix("p2", d.degree, p2, p));
        }
        let _ = writeln!(out, "relations degree {}", d.degree);
        out.push_str(&write_columns(&d.p1, p));
        if let Some(p2) = &d.p2 {
            let _ = writeln!(out, "relrels degree {}", d.degree);
            out.push_str(&write_columns(p2, p));
        }
        let _ = writeln!(
            out,
            "stats degree {} generators {} relations {} relrels {}",
            d.degree,
            d.p1.row_count(),
            d.p1.col_count(),
            d.p2.as_ref().map_or(0, |m| m.col_count())
        );
    }
    emit(output, &out)?;
    eprintln!(
        "presentation computed in {:.3} ms",
        elapsed.as_secs_f64() * 1e3
    );
    Ok(())
}

fn pirep(file: &Path, degree: usize, output: &Output) -> Result<()> {
    let tower = load(file)?;
    let cp = run_presentation(&tower, PresentationOptions::full())?;
    let pr = assemble_pirep(&cp, tower.poset(), degree)?;
    let mut out = write_matrix("d_low", degree, &pr.d_low, tower.poset());
    out.push_str(&write_matrix("d_high", degree, &pr.d_high, tower.poset()));
    emit(output, &out)
}

fn homology(file: &Path, degree: usize, minimize: bool, output: &Output) -> Result<()> {
    let tower = load(file)?;
    let cp = run_presentation(&tower, PresentationOptions::full())?;
    let pr = assemble_pirep(&cp, tower.poset(), degree)?;
    let hp = homology_presentation(&pr, tower.poset(), minimize)?;
    emit(
        output,
        &write_matrix("homology", degree, &hp.matrix, tower.poset()),
    )
}

fn verify(file: &Path, degree: Option<usize>, quick: bool) -> Result<bool> {
    let tower = load(file)?;
    let report = check_tower(&tower, degree, quick)?;
    print!("{report}");
    Ok(report.all_pass())
}

fn stats(file: &Path) -> Result<()> {
    let tower = load(file)?;
    let p = tower.poset();
    println!("n {}", tower.size());
    println!("t0 {}", p.len());
    println!("t1 {}", p.edge_count());
    println!("events {}", tower.events().len());
    let top = tower.max_dim().map_or(0, |d| d + 1);
    let mut counts = vec![0usize; top];
    for g in tower.generators() {
        counts[g.degree()] += 1;
    }
    for (l, c) in counts.iter().enumerate() {
        println!("generators degree {l} {c}");
    }
    Ok(())
}

fn generate(kind: &GenKind) -> Result<()> {
    let (tower, output) = match kind {
        GenKind::Grid {
            nx,
            ny,
            fill,
            seed: s,
            output,
        } => (generate::grid_tower(*nx, *ny, *fill, seed(*s)?), output),
        GenKind::Chain {
            len,
            simplices,
            seed: s,
            output,
        } => (generate::chain_tower(*len, *simplices, seed(*s)?), output),
        GenKind::Random {
            nodes,
            edges,
            gens,
            events,
            vertices,
            max_dim,
            seed: s,
            output,
        } => {
            let params = TowerParams {
                simplices: *gens,
                merges: *events,
                vertices: *vertices,
                max_dim: *max_dim,
            };
            (
                generate::random_tower(*nodes, *edges, params, seed(*s)?),
                output,
            )
        }
        GenKind::Zigzag {
            nodes,
            gens,
            events,
            vertices,
            max_dim,
            seed: s,
            output,
        } => {
            let params = TowerParams {
                simplices: *gens,
                merges: *events,
                vertices: *vertices,
                max_dim: *max_dim,
            };
            (generate::zigzag_tower(*nodes, params, seed(*s)?), output)
        }
    };
    emit(output, &write_tower(&tower))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Presentation {
            file,
            degree,
            relrel,
            reduce,
            output,
        } => presentation(&file, degree, relrel, reduce, &output)?,
        Command::Pirep {
            file,
            degree,
            output,
        } => pirep(&file, degree, &output)?,
        Command::Homology {
            file,
            degree,
            minimize,
            output,
        } => homology(&file, degree, minimize, &output)?,
        Command::Verify {
            file,
            degree,
            quick,
        } => return verify(&file, degree, quick),
        Command::Gen { kind } => generate(&kind)?,
        Command::Stats { file } => stats(&file)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
