use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cubist_core::blocks::{block_truncated_cartan, cubist_from_block, BlockDescriptor, Partition};
use cubist_core::flips::{check_flip_cartan, flip, flippable_in_window, unflip};
use cubist_core::oracle::{oracle_check, QuiverPresentation};
use cubist_core::qmatrix::{c_u_brauer, c_v, d_u, d_v, verify_identities};
use cubist_core::render::{svg_tiling, Highlights, Marker};
use cubist_core::{BaseIdeal, CubistSet, LatticePoint, Window};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "cubist", version, about = "Cubist subsets, their Cartan matrices and weight-2 blocks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Either `--radius` (around `--center`, default the origin) or `--lo`/`--hi`.
#[derive(Args, Clone)]
struct WindowArgs {
    #[arg(long, default_value_t = 3)]
    radius: i64,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "hi")]
    lo: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "lo")]
    hi: Option<String>,
}

#[derive(Args, Clone)]
struct BlockArgs {
    /// An odd prime.
    #[arg(long)]
    p: u64,
    /// The p-core, comma separated.
    #[arg(long, conflicts_with = "gaps", required_unless_present = "gaps")]
    core: Option<String>,
    /// First-runner gap vector, one entry per residue.
    #[arg(long)]
    gaps: Option<String>,
    /// Number of beads (defaults to the smallest multiple of p that fits).
    #[arg(long, conflicts_with = "gaps")]
    beads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Du,
    Dv,
    Cu,
    Cv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    U,
    V,
    Vfull,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Highlight {
    Flippable,
    Pyramid,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that every removal is legal.
    Validate { set: PathBuf },
    /// Emit a decomposition or Cartan matrix on a window.
    Matrix {
        set: PathBuf,
        #[arg(long, value_enum)]
        kind: MatrixKind,
        #[command(flatten)]
        window: WindowArgs,
        /// Truncation degree for `cv` (default 2r+4).
        #[arg(long)]
        cutoff: Option<i64>,
    },
    /// Run the identity checks; exit 1 if any fails.
    Verify {
        set: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        /// At least 2r (default 2r+4).
        #[arg(long)]
        cutoff: Option<i64>,
    },
    /// Compare path-algebra dimensions with the closed forms.
    Oracle {
        /// Not needed for `vfull`.
        set: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: OracleKind,
        /// Rank for `vfull` without a set file.
        #[arg(long)]
        rank: Option<usize>,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Flip at a maximal vertex and print the new set.
    Flip {
        set: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Undo a flip at `at` instead.
        #[arg(long)]
        undo: bool,
    },
    /// Check the Cartan matrix after a flip against the prediction.
    Flipcheck {
        set: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Describe a weight-2 block.
    Block {
        #[command(flatten)]
        block: BlockArgs,
        /// Also write the set X_B here.
        #[arg(long)]
        set_out: Option<PathBuf>,
    },
    /// Cartan matrix of X_B restricted to the image of the block's labels.
    BlockCartan {
        #[command(flatten)]
        block: BlockArgs,
    },
    /// Draw the tiling as SVG.
    Render {
        set: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum)]
        highlight: Vec<Highlight>,
        /// Write `<hash>-<window>.svg` into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status 1 carries a report on stdout; 2 an error on stderr.
enum Failure {
    Check(Value),
    Input { kind: &'static str, message: String },
}

type Res = Result<Value, Failure>;

fn input<E: Display>(kind: &'static str) -> impl Fn(E) -> Failure {
    move |e| Failure::Input {
        kind,
        message: e.to_string(),
    }
}

fn parse_ints<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure>
where
    T::Err: Display,
{
    s.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(input("bad_argument")))
        .collect()
}

fn parse_point(s: &str, rank: usize) -> Result<LatticePoint, Failure> {
    let c: Vec<i64> = parse_ints(s)?;
    if c.len() != rank {
        return Err(Failure::Input {
            kind: "bad_argument",
            message: format!("point {s:?} has {} coordinates, expected {rank}", c.len()),
        });
    }
    Ok(LatticePoint::new(c))
}

fn window(args: &WindowArgs, rank: usize) -> Result<Window, Failure> {
    if let (Some(lo), Some(hi)) = (&args.lo, &args.hi) {
        return Ok(Window::new(parse_point(lo, rank)?, parse_point(hi, rank)?));
    }
    if args.radius < 0 {
        return Err(Failure::Input {
            kind: "bad_argument",
            message: "radius must be non-negative".into(),
        });
    }
    let c = match &args.center {
        Some(c) => parse_point(c, rank)?,
        None => LatticePoint::zero(rank),
    };
    Ok(Window::cube(&c, args.radius))
}

fn load(path: &PathBuf) -> Result<CubistSet, Failure> {
    let text = fs::read_to_string(path).map_err(input("io"))?;
    serde_json::from_str(&text).map_err(input("malformed_json"))
}

fn load_valid(path: &PathBuf) -> Result<CubistSet, Failure> {
    let set = load(path)?;
    set.validate().map_err(input("invalid_set"))?;
    Ok(set)
}

fn descriptor(args: &BlockArgs) -> Result<BlockDescriptor, Failure> {
    let b = if let Some(g) = &args.gaps {
        BlockDescriptor::from_gaps(args.p, &parse_ints::<u64>(g)?)
    } else {
        let core = Partition::new(parse_ints::<u64>(args.core.as_deref().unwrap_or(""))?).map_err(input("bad_block"))?;
        match args.beads {
            Some(n) => BlockDescriptor::with_beads(args.p, core, n),
            None => BlockDescriptor::from_core(args.p, core),
        }
    };
    b.map_err(input("bad_block"))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn run(cmd: Cmd) -> Res {
    match cmd {
        Cmd::Validate { set } => {
            let s = load(&set)?;
            match s.validate() {
                Ok(()) => Ok(json!({ "valid": true, "rank": s.rank(), "removals": s.removals().len() })),
                Err(e) => Err(Failure::Check(json!({ "valid": false, "error": e.to_string() }))),
            }
        }
        Cmd::Matrix { set, kind, window: w, cutoff } => {
            let s = load_valid(&set)?;
            let w = window(&w, s.rank())?;
            let m = match kind {
                MatrixKind::Du => d_u(&s, &w).map(|m| to_value(&m)),
                MatrixKind::Dv => d_v(&s, &w).map(|m| to_value(&m)),
                MatrixKind::Cu => c_u_brauer(&s, &w).map(|m| to_value(&m)),
                MatrixKind::Cv => {
                    let n = cutoff.unwrap_or(2 * s.rank() as i64 + 4);
                    c_v(&s, &w, n).map(|m| to_value(&m))
                }
            };
            m.map_err(input("matrix"))
        }
        Cmd::Verify { set, window: w, cutoff } => {
            let s = load_valid(&set)?;
            let w = window(&w, s.rank())?;
            let n = cutoff.unwrap_or(2 * s.rank() as i64 + 4);
            let rep = verify_identities(&s, &w, n).map_err(input("verify"))?;
            let v = json!({ "passed": rep.all_passed(), "report": rep });
            if rep.all_passed() {
                Ok(v)
            } else {
                Err(Failure::Check(v))
            }
        }
        Cmd::Oracle { set, kind, rank, window: w, max_degree } => {
            let (pres, r) = match (kind, set) {
                (OracleKind::Vfull, None) => {
                    let r = rank.ok_or_else(|| Failure::Input {
                        kind: "bad_argument",
                        message: "vfull needs --rank or a set file".into(),
                    })?;
                    (QuiverPresentation::v_full(r), r)
                }
                (OracleKind::Vfull, Some(p)) => {
                    let r = load_valid(&p)?.rank();
                    (QuiverPresentation::v_full(r), r)
                }
                (_, None) => {
                    return Err(Failure::Input {
                        kind: "bad_argument",
                        message: "a set file is required".into(),
                    })
                }
                (k, Some(p)) => {
                    let s = load_valid(&p)?;
                    let r = s.rank();
                    let pres = match k {
                        OracleKind::U => QuiverPresentation::u_of_x(&s),
                        _ => QuiverPresentation::v_of_x(&s),
                    };
                    (pres, r)
                }
            };
            let w = window(&w, r)?;
            let rep = oracle_check(&pres, &w, max_degree).map_err(input("oracle"))?;
            let v = json!({ "passed": rep.passed(), "report": rep });
            if rep.passed() {
                Ok(v)
            } else {
                Err(Failure::Check(v))
            }
        }
        Cmd::Flip { set, at, undo } => {
            let s = load_valid(&set)?;
            let z = parse_point(&at, s.rank())?;
            let t = if undo { unflip(&s, &z) } else { flip(&s, &z) };
            Ok(to_value(&t.map_err(input("flip"))?))
        }
        Cmd::Flipcheck { set, at, window: w } => {
            let s = load_valid(&set)?;
            let z = parse_point(&at, s.rank())?;
            let w = window(&w, s.rank())?;
            let rep = check_flip_cartan(&s, &z, &w).map_err(input("flip"))?;
            let v = json!({ "passed": rep.all_passed(), "report": rep });
            if rep.all_passed() {
                Ok(v)
            } else {
                Err(Failure::Check(v))
            }
        }
        Cmd::Block { block, set_out } => {
            let b = descriptor(&block)?;
            let set = cubist_from_block(&b).map_err(input("bad_block"))?;
            if let Some(path) = &set_out {
                let text = serde_json::to_string_pretty(&set).expect("set serializes");
                fs::write(path, text + "\n").map_err(input("io"))?;
            }
            let lambda: Vec<Value> = b
                .lambda_table()
                .into_iter()
                .map(|((u, v), l)| json!({ "u": u, "v": v, "label": l.to_string(), "partition": b.shorthand_to_partition(l).ok().map(|p| p.to_string()) }))
                .collect();
            let x_b: Vec<Value> = b.x_b_of_p().iter().map(to_value).collect();
            Ok(json!({
                "p": b.p,
                "core": b.core,
                "beads": b.n,
                "gaps": b.gaps,
                "pyramid": b.pyramid,
                "sset": b.sset(),
                "lambda_b": lambda,
                "scopes_pairs": b.scopes_pairs(),
                "x_b": x_b,
                "set": set,
            }))
        }
        Cmd::BlockCartan { block } => {
            let b = descriptor(&block)?;
            let m = block_truncated_cartan(&b).map_err(input("bad_block"))?;
            Ok(to_value(&m))
        }
        Cmd::Render { set, window: w, highlight, out } => {
            let s = load_valid(&set)?;
            let w = window(&w, s.rank())?;
            let mut h = Highlights::none();
            if highlight.contains(&Highlight::Pyramid) {
                let pts = match s.base() {
                    BaseIdeal::Weight2 { pyramid, .. } => pyramid
                        .iter()
                        .map(|&(u, v)| LatticePoint::new(vec![-(u as i64), 1 + v as i64, 1]))
                        .filter(|x| w.contains(x))
                        .collect(),
                    _ => Vec::new(),
                };
                h = h.with(Marker::Square, pts);
            }
            if highlight.contains(&Highlight::Flippable) {
                h = h.with(Marker::Ring, flippable_in_window(&s, &w));
            }
            let svg = svg_tiling(&s, &w, &h).map_err(input("render"))?;
            match out {
                None => {
                    emit(&svg);
                    Ok(Value::Null)
                }
                Some(dir) => {
                    let canon = serde_json::to_string(&s).expect("set serializes");
                    let hash = Sha256::digest(canon.as_bytes());
                    let prefix: String = hash.iter().take(6).map(|b| format!("{b:02x}")).collect();
                    fs::create_dir_all(&dir).map_err(input("io"))?;
                    let path = dir.join(format!("{prefix}-{}.svg", w.tag()));
                    fs::write(&path, svg).map_err(input("io"))?;
                    Ok(json!({ "written": path.display().to_string() }))
                }
            }
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string().trim_end() }));
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok(Value::Null) => ExitCode::SUCCESS,
        Ok(v) => {
            emit(&(serde_json::to_string_pretty(&v).expect("json") + "\n"));
            ExitCode::SUCCESS
        }
        Err(Failure::Check(v)) => {
            emit(&(serde_json::to_string_pretty(&v).expect("json") + "\n"));
            ExitCode::from(1)
        }
        Err(Failure::Input { kind, message }) => {
            eprintln!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(2)
        }
    }
}
