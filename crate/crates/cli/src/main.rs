//! Command line surface for the exact strong L-space kernels: sign matrix
//! enumeration, continued fraction sweeps, surgery reduction, and diagram
//! queries.
//!
//! Exit codes: 0 on success or a verified sweep, 1 when a verification
//! sweep finds a violation, 2 on any input error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use lspace_core::contfrac::{
    cfe, check_claim3, check_claim4, r_value, CFrac, PosRational,
};
use lspace_core::linkdiag::{
    brm_free, chain_tree_to_diagram, diagram_contains, goeritz_h1, smooth, validate_diagram,
    Diagram, SmoothMode, SmoothingChoice,
};
use lspace_core::signmat::{
    canonical_form, class_le, enumerate_effective_classes, enumerate_maximal_effective_classes,
    is_strong_pair, IntMatrix, SignMatrix,
};
use lspace_core::surgery::{
    build_l3, build_type2, h1_order, is_alternating_weighted, kirby_reduce, tree_to_framed_link,
    validate_awtree, AwTree, FramedLink, L3Link, SlopeSet2, SlopeSet3,
};
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lspace", version, about = "Exact strong L-space combinatorics")]
struct Cli {
    /// Number of worker threads for internal parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format for scalar results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sign matrix algebra: enumeration, canonical forms, order checks.
    #[command(subcommand)]
    Signmat(SignmatCmd),
    /// Continued fractions and the parity sweep verifiers.
    #[command(subcommand)]
    Cf(CfCmd),
    /// Framed links, trees, homology orders and the slope reduction.
    #[command(subcommand)]
    Surgery(SurgeryCmd),
    /// Alternating link diagram queries.
    #[command(subcommand)]
    Diagram(DiagramCmd),
}

#[derive(Subcommand)]
enum SignmatCmd {
    /// Enumerate effective (or maximal effective) classes of size g.
    Enumerate {
        #[arg(long)]
        g: usize,
        /// Restrict to maximal effective classes.
        #[arg(long)]
        maximal: bool,
    },
    /// Canonical form of a sign matrix given as `+ 0 -; ...` text.
    Canon {
        #[arg(long)]
        matrix: String,
    },
    /// Determinant/permanent equality check for an intersection pair.
    StrongPair {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// The zero-filling class order between two effective matrices.
    ClassLe {
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
    },
}

#[derive(Subcommand)]
enum CfCmd {
    /// Continued fraction expansion of a rational > 1.
    Cfe {
        #[arg(long)]
        r: String,
    },
    /// The nested slope value of an expansion against a partner slope.
    RValue {
        /// Comma separated digits, e.g. 1,2,2.
        #[arg(long)]
        ks: String,
        #[arg(long)]
        rp: String,
    },
    /// Sweep the orientation +1 parity statement over a grid.
    CheckClaim3(SweepArgs),
    /// Sweep the orientation -1 parity statement over a grid.
    CheckClaim4(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 60)]
    max_p: u64,
    #[arg(long, default_value_t = 12)]
    max_d: u64,
    /// Print only the summary line.
    #[arg(long)]
    summary: bool,
}

#[derive(Subcommand)]
enum SurgeryCmd {
    /// First homology order of a tree or framed link.
    H1 {
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        link: Option<PathBuf>,
    },
    /// Build a framed link from a slope set (genus two or three).
    Build {
        #[arg(long)]
        slopes: PathBuf,
    },
    /// Reduce a genus-three build along its companion expansion.
    Reduce {
        #[arg(long)]
        l3: PathBuf,
    },
    /// Validate an alternatingly weighted tree.
    ValidateTree {
        #[arg(long)]
        tree: PathBuf,
    },
}

#[derive(Subcommand)]
enum DiagramCmd {
    /// Validate a diagram file.
    Validate {
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Smooth one crossing in mode a or b.
    Smooth {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        crossing: usize,
        #[arg(long)]
        mode: String,
    },
    /// Diagram containment under the smoothing order.
    Contains {
        #[arg(long)]
        d1: PathBuf,
        #[arg(long)]
        d2: PathBuf,
    },
    /// Borromean-freeness of a diagram.
    BrmFree {
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Goeritz determinant of a connected diagram.
    Goeritz {
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Alternating diagram of an integer-weighted path tree.
    FromChain {
        #[arg(long)]
        tree: PathBuf,
    },
}

/// Failures that should surface as exit code 2.
struct InputError(String);

impl<E: Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        InputError(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Diagrams are accepted either as JSON or as PD-code text
/// (`X[a,b,c,d]` lines).
fn read_diagram(path: &Path) -> Result<Diagram, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with("X[") {
        return lspace_core::linkdiag::from_pd_text(&text).map_err(InputError::from);
    }
    serde_json::from_str(&text).map_err(|e| {
        InputError(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Either a genus-two or genus-three slope set, distinguished by shape.
#[derive(Deserialize)]
#[serde(untagged)]
enum AnySlopes {
    Two(SlopeSet2),
    Three(SlopeSet3),
}

fn scalar(format: Format, key: &str, value: impl Display) {
    match format {
        Format::Text => println!("{value}"),
        Format::Json => println!("{{\"{key}\":\"{value}\"}}"),
    }
}

fn run(cli: Cli) -> Result<u8, InputError> {
    let format = cli.format;
    match cli.command {
        Command::Signmat(cmd) => match cmd {
            SignmatCmd::Enumerate { g, maximal } => {
                let classes = if maximal {
                    enumerate_maximal_effective_classes(g)?
                } else {
                    enumerate_effective_classes(g)?
                };
                let stdout = std::io::stdout();
                let mut out = stdout.lock();
                for c in &classes {
                    writeln!(out, "{c}").map_err(|e| InputError(e.to_string()))?;
                }
                writeln!(out, "total: {}", classes.len())
                    .map_err(|e| InputError(e.to_string()))?;
                Ok(0)
            }
            SignmatCmd::Canon { matrix } => {
                let m: SignMatrix = matrix.parse()?;
                scalar(format, "canon", canonical_form(&m));
                Ok(0)
            }
            SignmatCmd::StrongPair { a, b } => {
                let a: IntMatrix = a.parse()?;
                let b: IntMatrix = b.parse()?;
                scalar(format, "strong_pair", is_strong_pair(&a, &b)?);
                Ok(0)
            }
            SignmatCmd::ClassLe { s1, s2 } => {
                let s1: SignMatrix = s1.parse()?;
                let s2: SignMatrix = s2.parse()?;
                scalar(format, "class_le", class_le(&s1, &s2)?);
                Ok(0)
            }
        },
        Command::Cf(cmd) => match cmd {
            CfCmd::Cfe { r } => {
                let r: PosRational = r.parse()?;
                scalar(format, "cfe", cfe(&r)?);
                Ok(0)
            }
            CfCmd::RValue { ks, rp } => {
                let digits: Result<Vec<u64>, _> =
                    ks.split(',').map(|s| s.trim().parse::<u64>()).collect();
                let ks = CFrac::new(digits.map_err(|e| InputError(e.to_string()))?)?;
                let rp: PosRational = rp.parse()?;
                scalar(format, "r_value", r_value(&ks, &rp)?);
                Ok(0)
            }
            CfCmd::CheckClaim3(args) => sweep(args, true),
            CfCmd::CheckClaim4(args) => sweep(args, false),
        },
        Command::Surgery(cmd) => match cmd {
            SurgeryCmd::H1 { tree, link } => {
                let link = match (tree, link) {
                    (Some(path), None) => {
                        let tree: AwTree = read_json(&path)?;
                        tree_to_framed_link(&tree)?
                    }
                    (None, Some(path)) => read_json::<FramedLink>(&path)?,
                    _ => {
                        return Err(InputError(
                            "give exactly one of --tree or --link".into(),
                        ))
                    }
                };
                scalar(format, "h1", h1_order(&link));
                Ok(0)
            }
            SurgeryCmd::Build { slopes } => {
                let parsed: AnySlopes = read_json(&slopes)?;
                match parsed {
                    AnySlopes::Two(s) => {
                        let link = build_type2(&s)?;
                        println!("{}", serde_json::to_string_pretty(&link).unwrap());
                    }
                    AnySlopes::Three(s) => {
                        let l3 = build_l3(&s)?;
                        println!("{}", serde_json::to_string_pretty(&l3).unwrap());
                    }
                }
                Ok(0)
            }
            SurgeryCmd::Reduce { l3 } => {
                let l3: L3Link = read_json(&l3)?;
                let reduced = kirby_reduce(&l3)?;
                eprintln!(
                    "chain: {}  partner: {}  alternating: {}  h1: {}",
                    reduced.chain_final,
                    reduced.partner_final,
                    is_alternating_weighted(&reduced.link),
                    h1_order(&reduced.link),
                );
                println!("{}", serde_json::to_string_pretty(&reduced.link).unwrap());
                Ok(0)
            }
            SurgeryCmd::ValidateTree { tree } => {
                let tree: AwTree = read_json(&tree)?;
                scalar(format, "verdict", validate_awtree(&tree));
                Ok(0)
            }
        },
        Command::Diagram(cmd) => match cmd {
            DiagramCmd::Validate { diagram } => {
                let d: Diagram = read_diagram(&diagram)?;
                scalar(format, "verdict", validate_diagram(&d));
                Ok(0)
            }
            DiagramCmd::Smooth {
                diagram,
                crossing,
                mode,
            } => {
                let d: Diagram = read_diagram(&diagram)?;
                let mode = match mode.as_str() {
                    "a" | "A" => SmoothMode::A,
                    "b" | "B" => SmoothMode::B,
                    other => return Err(InputError(format!("mode must be a or b, got {other}"))),
                };
                let s = smooth(&d, SmoothingChoice { crossing, mode })?;
                println!("{}", serde_json::to_string_pretty(&s).unwrap());
                Ok(0)
            }
            DiagramCmd::Contains { d1, d2 } => {
                let d1: Diagram = read_diagram(&d1)?;
                let d2: Diagram = read_diagram(&d2)?;
                scalar(format, "contains", diagram_contains(&d1, &d2)?);
                Ok(0)
            }
            DiagramCmd::BrmFree { diagram } => {
                let d: Diagram = read_diagram(&diagram)?;
                scalar(format, "brm_free", brm_free(&d)?);
                Ok(0)
            }
            DiagramCmd::Goeritz { diagram } => {
                let d: Diagram = read_diagram(&diagram)?;
                scalar(format, "goeritz", goeritz_h1(&d)?);
                Ok(0)
            }
            DiagramCmd::FromChain { tree } => {
                let tree: AwTree = read_json(&tree)?;
                let d = chain_tree_to_diagram(&tree)?;
                println!("{}", serde_json::to_string_pretty(&d).unwrap());
                Ok(0)
            }
        },
    }
}

fn sweep(args: SweepArgs, plus: bool) -> Result<u8, InputError> {
    if args.max_p < 3 || args.max_d < 1 {
        return Err(InputError("need --max-p >= 3 and --max-d >= 1".into()));
    }
    let report = if plus {
        check_claim3(args.max_p, args.max_d)
    } else {
        check_claim4(args.max_p, args.max_d)
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    if args.summary {
        writeln!(
            out,
            "violations: {} / cases: {}",
            report.violations(),
            report.evaluated()
        )
        .map_err(|e| InputError(e.to_string()))?;
    } else {
        writeln!(out, "{report}").map_err(|e| InputError(e.to_string()))?;
    }
    out.flush().map_err(|e| InputError(e.to_string()))?;
    Ok(if report.violations() > 0 { 1 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("error: thread pool already configured");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
