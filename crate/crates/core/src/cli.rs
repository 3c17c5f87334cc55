//! Command-line front end.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::approx::{
    brute_force_cover, greedy_cover, interval_cover, interval_resolution, Cover, ResolutionOptions,
    DEFAULT_BRUTE_FORCE_DIM_CAP,
};
use crate::check::{run_suite, Suite, SuiteReport};
use crate::classify::{classify_zero_gldim, count_indecomposables, CmlCombinatorics};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::homological::{ar_translate, interval_gldim_profile_with, projective_gldim};
use crate::io::{
    cover_value, module_to_json, resolve_poset, ModuleDoc, parse_module, parse_poset, poset_to_json,
    resolution_value,
};
use crate::linalg::Field;
use crate::module::{interval_module, restrict, PersModule};
use crate::poset::{Interval, Poset};

#[derive(Parser, Debug)]
#[command(name = "intres", version, about = "Interval resolutions of modules over finite posets")]
pub struct Cli {
    /// Prime characteristic of the base field.
    #[arg(long, global = true, env = "INTRES_FIELD", default_value_t = 2)]
    pub field: u32,

    /// Compute each resolution step on the convex hull of the current support.
    #[arg(long, global = true, action = ArgAction::Set, default_value_t = true)]
    pub reduce_support: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Args, Debug)]
pub struct Input {
    /// Input document; `-` or omitted reads standard input.
    pub input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a poset document for a named family.
    Gen(GenArgs),
    /// List all intervals of a poset.
    Intervals(Input),
    /// Interval cover of a module.
    Cover {
        #[command(flatten)]
        input: Input,
        /// Use the exhaustive search instead of the multiplicity formula.
        #[arg(long, conflicts_with = "greedy")]
        brute_force: bool,
        /// Use greedy redundancy elimination instead of the multiplicity formula.
        #[arg(long)]
        greedy: bool,
    },
    /// Minimal interval resolution of a module.
    Resolve(Input),
    /// Interval resolution dimension of a module.
    Resdim(Input),
    /// Global dimension of a poset's incidence algebra.
    Gldim {
        #[command(flatten)]
        input: Input,
        /// Interval resolution global dimension (default).
        #[arg(long, conflicts_with = "projective")]
        interval: bool,
        /// Classical global dimension.
        #[arg(long)]
        projective: bool,
    },
    /// Decide whether a poset has interval resolution global dimension zero by its shape.
    Classify(Input),
    /// Strings of the cycle poset C(m, l).
    Strings {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
    },
    /// Restrict a module to the full subposet on the given elements.
    Restrict {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        elements: Vec<String>,
    },
    /// Convex hull of a set of elements.
    Conv {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        elements: Vec<String>,
    },
    /// Auslander-Reiten translate of an interval module.
    Tau {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        interval: Vec<String>,
    },
    /// Run randomized property suites.
    Check {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Cases per suite; defaults depend on the suite.
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Compact family name such as `C:2,1`, `A:fbf`, `grid:2,3`, `igusa`.
    pub spec: Option<String>,
    /// Family kind: A, D, C, grid, ladder, igusa, igusa-prime.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Orientation word of `f`/`b` letters.
    #[arg(long)]
    pub orientation: Option<String>,
    /// Number of vertices of an equioriented A_n when no orientation is given.
    #[arg(long)]
    pub n: Option<usize>,
}

impl GenArgs {
    fn family(&self) -> Result<Family> {
        if let Some(s) = &self.spec {
            return s.parse();
        }
        let kind = self
            .family
            .as_deref()
            .ok_or_else(|| Error::InvalidFamily("give a family name or --family".into()))?;
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::InvalidFamily(format!("--{name} is required for {kind}")))
        };
        let word = |n: Option<usize>, offset: usize| -> Result<String> {
            match (&self.orientation, n) {
                (Some(w), _) => Ok(w.clone()),
                (None, Some(n)) => Ok("f".repeat(n.saturating_sub(offset))),
                (None, None) => Err(Error::InvalidFamily(format!(
                    "--orientation or --n is required for {kind}"
                ))),
            }
        };
        Ok(match kind {
            "A" => Family::A { orientation: word(self.n, 1)? },
            "D" => Family::D { orientation: word(self.n, 1)? },
            "C" => Family::C {
                m: need(self.m, "m")?,
                l: need(self.l, "l")?,
            },
            "grid" => Family::Grid {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
            },
            "ladder" => Family::Ladder { orientation: word(self.n, 1)? },
            other => other.parse()?,
        })
    }
}

struct Ctx<'a> {
    field: Field,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn read(&mut self, input: &Input) -> Result<(String, Option<PathBuf>)> {
        match input.input.as_deref() {
            None => self.read_stdin(),
            Some(p) if p == Path::new("-") => self.read_stdin(),
            Some(p) => Ok((std::fs::read_to_string(p)?, p.parent().map(Path::to_path_buf))),
        }
    }

    fn read_stdin(&mut self) -> Result<(String, Option<PathBuf>)> {
        let mut s = String::new();
        self.stdin.read_to_string(&mut s)?;
        Ok((s, None))
    }

    /// A poset document, or the host poset of a module document.
    fn poset(&mut self, input: &Input) -> Result<Arc<Poset>> {
        let (text, base) = self.read(input)?;
        let value: Value = serde_json::from_str(&text)?;
        if value.get("poset").is_some() {
            let doc: ModuleDoc = serde_json::from_value(value)?;
            return Ok(Arc::new(resolve_poset(&doc.poset, base.as_deref())?));
        }
        Ok(Arc::new(parse_poset(&text)?))
    }

    fn module(&mut self, input: &Input) -> Result<Arc<PersModule>> {
        let (text, base) = self.read(input)?;
        Ok(Arc::new(parse_module(&text, self.field, base.as_deref())?))
    }
}

/// Output of one command: a JSON document, a table rendering, and whether
/// a check failed.
struct Output {
    json: Value,
    table: String,
    failed: bool,
}

impl Output {
    fn new(json: Value, table: String) -> Output {
        Output {
            json,
            table,
            failed: false,
        }
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let format = cli.format;
    match execute(cli, stdin) {
        Ok(out) => {
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("values serialize"),
                Format::Table => out.table.trim_end().to_string(),
            };
            let _ = writeln!(stdout, "{text}");
            if out.failed {
                let _ = writeln!(stderr, "error: property check failed");
                3
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn labels_of(p: &Poset, s: &[usize]) -> Vec<String> {
    s.iter().map(|&a| p.label(a).to_string()).collect()
}

fn execute(cli: Cli, stdin: &mut dyn Read) -> Result<Output> {
    let field = Field::new(cli.field)?;
    let mut ctx = Ctx { field, stdin };
    let opts = ResolutionOptions {
        reduce_support: cli.reduce_support,
        ..Default::default()
    };
    match cli.command {
        Command::Gen(args) => {
            let p = args.family()?.build()?;
            let text = poset_to_json(&p);
            Ok(Output::new(serde_json::from_str(&text)?, text))
        }
        Command::Intervals(input) => {
            let p = ctx.poset(&input)?;
            let ivs = p.enumerate_intervals();
            let list: Vec<Vec<String>> = ivs.iter().map(|iv| labels_of(&p, iv.members())).collect();
            let mut table = format!("{}\n", ivs.len());
            for iv in &ivs {
                table.push_str(&p.format_set(iv.members()));
                table.push('\n');
            }
            Ok(Output::new(json!({ "count": ivs.len(), "intervals": list }), table))
        }
        Command::Cover {
            input,
            brute_force,
            greedy,
        } => {
            let m = ctx.module(&input)?;
            let c: Cover = if brute_force {
                brute_force_cover(&m, DEFAULT_BRUTE_FORCE_DIM_CAP)?
            } else if greedy {
                greedy_cover(&m)?
            } else {
                interval_cover(&m)?
            };
            let table = format!("{}\n", c.summands.describe(m.host()));
            Ok(Output::new(cover_value(&c), table))
        }
        Command::Resolve(input) => {
            let m = ctx.module(&input)?;
            let r = interval_resolution(&m, opts)?;
            r.check_exact().map_err(Error::Internal)?;
            let mut table = format!("length {}\n", r.length());
            for (i, t) in r.terms.iter().enumerate() {
                table.push_str(&format!("J_{i}: {}\n", t.describe(m.host())));
            }
            table.push_str(&format!("hom solves: {}\n", r.hom_solves));
            Ok(Output::new(resolution_value(&r), table))
        }
        Command::Resdim(input) => {
            let m = ctx.module(&input)?;
            let r = interval_resolution(&m, opts)?;
            Ok(Output::new(
                json!({ "resdim": r.length(), "hom_solves": r.hom_solves }),
                format!("{}\n", r.length()),
            ))
        }
        Command::Gldim {
            input, projective, ..
        } => {
            let p = ctx.poset(&input)?;
            if projective {
                let g = projective_gldim(&p, field)?;
                return Ok(Output::new(
                    json!({ "kind": "projective", "gldim": g }),
                    format!("{g}\n"),
                ));
            }
            let profile = interval_gldim_profile_with(&p, field, opts)?;
            let g = profile.iter().map(|(_, d)| *d).max().unwrap_or(0);
            let mut table = format!("{g}\n");
            let rows: Vec<Value> = profile
                .iter()
                .map(|(iv, d)| {
                    table.push_str(&format!("  {} {d}\n", p.format_set(iv.members())));
                    json!({ "interval": labels_of(&p, iv.members()), "resdim_tau": d })
                })
                .collect();
            Ok(Output::new(
                json!({ "kind": "interval", "gldim": g, "profile": rows }),
                table,
            ))
        }
        Command::Classify(input) => {
            let p = ctx.poset(&input)?;
            let v = classify_zero_gldim(&p);
            let table = match (&v.shape, &v.witness) {
                (Some(s), _) => format!("accepted {s}\n"),
                (None, Some(w)) => format!("rejected: {w}\n"),
                (None, None) => "rejected\n".to_string(),
            };
            Ok(Output::new(serde_json::to_value(&v)?, table))
        }
        Command::Strings { m, l } => {
            let c = CmlCombinatorics::new(m, l)?;
            let p = c.poset();
            let strings = c.enumerate_strings();
            let mut table = format!("{} strings, {} indecomposables\n", strings.len(), count_indecomposables(m, l));
            let rows: Vec<Value> = strings
                .iter()
                .map(|w| {
                    let iv = c.string_to_interval(&p, w)?;
                    table.push_str(&format!("{} -> {}\n", c.format(w), p.format_set(iv.members())));
                    Ok(json!({ "word": c.format(w), "interval": labels_of(&p, iv.members()) }))
                })
                .collect::<Result<_>>()?;
            Ok(Output::new(
                json!({
                    "m": m,
                    "l": l,
                    "count": strings.len(),
                    "indecomposables": count_indecomposables(m, l),
                    "strings": rows,
                }),
                table,
            ))
        }
        Command::Restrict { input, elements } => {
            let m = ctx.module(&input)?;
            let emb = m.host().full_subposet_by_labels(&elements)?;
            let r = restrict(&m, &emb);
            let text = module_to_json(&r);
            Ok(Output::new(serde_json::from_str(&text)?, text))
        }
        Command::Conv { input, elements } => {
            let p = ctx.poset(&input)?;
            let idx = p.indices_of(&elements)?;
            let hull = p.convex_hull(&idx);
            Ok(Output::new(
                json!({ "elements": labels_of(&p, &hull), "is_interval": p.is_interval(&hull) }),
                format!("{}\n", p.format_set(&hull)),
            ))
        }
        Command::Tau { input, interval } => {
            let p = ctx.poset(&input)?;
            let iv = Interval::from_labels(&p, &interval)?;
            let k = Arc::new(interval_module(&p, field, &iv));
            let t = ar_translate(&k)?;
            let text = module_to_json(&t);
            Ok(Output::new(serde_json::from_str(&text)?, text))
        }
        Command::Check { suite, count } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let reports: Vec<SuiteReport> = suites
                .into_iter()
                .map(|s| run_suite(s, count.unwrap_or(s.default_count()), cli.seed))
                .collect::<Result<_>>()?;
            let mut table = String::new();
            for r in &reports {
                table.push_str(&format!(
                    "{} {}: {} cases, {} failures\n",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.suite,
                    r.cases,
                    r.failures.len()
                ));
                for n in &r.notes {
                    table.push_str(&format!("  {n}\n"));
                }
                for f in r.failures.iter().take(5) {
                    table.push_str(&format!("  {f}\n"));
                }
            }
            let failed = reports.iter().any(|r| !r.passed());
            Ok(Output {
                json: serde_json::to_value(&reports)?,
                table,
                failed,
            })
        }
    }
}

pub fn main_with_std() -> i32 {
    let mut stdin = std::io::stdin().lock();
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    run(std::env::args_os(), &mut stdin, &mut stdout, &mut stderr)
}
