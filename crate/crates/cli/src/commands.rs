//! Subcommand dispatch and report rendering.
//!
//! Every report is a block of `key = value` lines. Lines starting with `#`
//! are commentary and carry no data.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use edp_core::constructions::{
    norm_extension_module, permutation_lattice, sign_torus, standard_module, NormExtensionSpec, StandardKind,
};
use edp_core::gmodule::{direct_sum, invariant_rank, module_structure};
use edp_core::presentation::{cokernel_prime_to_p, conditions_b_c_agree, kernel_report, spans_cobar};
use edp_core::solver::{
    brute_force_ed, cost_table_with, ed_bounds, ed_bounds_with_gap, gap_bound, is_tame, minimal_p_presentation_with,
    wreath_ed, SolverOptions,
};
use edp_core::{ErrorKind, GModule, IntMatrix, Subgroup};

use crate::model::{parse_model, parse_presentation, serialize_model, Model, ModelError, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

/// Environment variable overriding the subgroup enumeration ceiling.
pub const CEILING_VAR: &str = "EDP_SUBGROUP_CEILING";

#[derive(Debug, Parser)]
#[command(
    name = "edp",
    version,
    about = "Exact essential p-dimension of groups of multiplicative type"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal p-presentation, its kernel rank and a witness.
    Ed { file: PathBuf },
    /// Exhaustive search over small instances.
    Oracle {
        file: PathBuf,
        /// Largest total subgroup index to search; defaults to one that always suffices.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Dimension of X/(pX + IX) and the per-subgroup cost table.
    Cbar { file: PathBuf },
    /// Test a candidate presentation and report on its kernel.
    Check { file: PathBuf, presentation: PathBuf },
    /// Bounds from minimal representation dimensions.
    Bounds {
        #[arg(long)]
        pfaithful: usize,
        #[arg(long)]
        pgenfree: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        gap: Option<usize>,
    },
    /// Gap bound for a torus lattice, reading the group as C(F).
    Gap { file: PathBuf },
    /// Whether the group acts trivially on a torus lattice.
    Tame { file: PathBuf },
    /// Conjugacy classes of subgroups.
    Subgroups { file: PathBuf },
    /// Emit a model file for a standard construction.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Essential p-dimension of a wreath-type extension.
    Wreath {
        #[arg(long)]
        edt: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edf: usize,
    },
    /// Additivity report for a direct sum.
    Sum { first: PathBuf, second: PathBuf },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Permutation module modulo p^r times the sum of all basis vectors.
    Norm {
        /// Model file supplying the group; its module block is ignored.
        #[arg(long)]
        group: PathBuf,
        /// Stabilizer element ids, comma-separated; repeat for more summands.
        #[arg(long = "stab", required = true)]
        stabs: Vec<String>,
        #[arg(long, default_value_t = 0)]
        r: u32,
    },
    /// Z^n with Z/2 acting by -1.
    Sign {
        #[arg(long)]
        n: usize,
    },
    /// Z^n with trivial group.
    Split {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Z/p^r with trivial group.
    Mu {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
    },
    /// Sum of Z[G/H] over the given subgroups.
    Perm {
        #[arg(long)]
        group: PathBuf,
        #[arg(long = "subgroup", required = true)]
        subgroups: Vec<String>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Parse(ParseError),
    Io(PathBuf, String),
    Config(String),
    Core(edp_core::Error),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse(p) => Failure::Parse(p),
            ModelError::Validation(v) => Failure::Core(v),
        }
    }
}

impl From<edp_core::Error> for Failure {
    fn from(e: edp_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn render(&self) -> (i32, String) {
        let mut s = String::new();
        let code = match self {
            Failure::Parse(p) => {
                let _ = writeln!(
                    s,
                    "error.kind = parse\nerror.line = {}\nerror.column = {}\nerror.message = {}",
                    p.line, p.column, p.message
                );
                EXIT_PARSE
            }
            Failure::Io(path, msg) => {
                let _ = writeln!(
                    s,
                    "error.kind = io\nerror.path = {}\nerror.message = {msg}",
                    path.display()
                );
                EXIT_PARSE
            }
            Failure::Config(msg) => {
                let _ = writeln!(s, "error.kind = parse\nerror.message = {msg}");
                EXIT_PARSE
            }
            Failure::Core(e) => {
                let (kind, code) = match e.kind() {
                    ErrorKind::Validation => ("validation", EXIT_VALIDATION),
                    ErrorKind::Limit => ("limit", EXIT_LIMIT),
                };
                let _ = writeln!(s, "error.kind = {kind}\nerror.message = {e}");
                code
            }
        };
        (code, s)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn load(path: &Path) -> Res<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e.to_string()))?;
    Ok(parse_model(&text)?)
}

fn options() -> Res<SolverOptions> {
    let mut opts = SolverOptions::default();
    if let Ok(v) = std::env::var(CEILING_VAR) {
        opts.subgroup_ceiling = v
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("{CEILING_VAR} must be a non-negative integer, got `{v}`")))?;
    }
    Ok(opts)
}

fn parse_ids(s: &str) -> Res<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Config(format!("bad element id `{t}` in `{s}`")))
        })
        .collect()
}

fn subgroups_of(model: &Model, specs: &[String]) -> Res<Vec<Subgroup>> {
    specs
        .iter()
        .map(|s| Ok(model.group.subgroup(&parse_ids(s)?)?))
        .collect()
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(" ")
    }
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

fn module_header(out: &mut String, x: &GModule) {
    let s = module_structure(x);
    kv(out, "p", x.p());
    kv(out, "group.order", x.group().order());
    kv(out, "module.rank", x.ngens());
    kv(out, "free_rank", s.free_rank);
    kv(out, "invariant_factors", join(&s.invariant_factors));
    kv(out, "p_torsion", s.p_torsion);
}

fn matrix_rows(m: &IntMatrix) -> String {
    if m.cols() == 0 {
        return "none".into();
    }
    let rows: Vec<String> = (0..m.rows()).map(|i| join(m.row(i))).collect();
    rows.join(" ; ")
}

fn run(cmd: Command) -> Res<String> {
    let mut out = String::new();
    match cmd {
        Command::Ed { file } => {
            let m = load(&file)?;
            let r = minimal_p_presentation_with(&m.module, &options()?)?;
            module_header(&mut out, &m.module);
            kv(&mut out, "cbar_dim", r.cobar_dim);
            kv(&mut out, "min_rank_p", r.min_rank_p);
            kv(&mut out, "ed", r.ed);
            kv(&mut out, "tower", join(r.tower.iter().map(|(c, d)| format!("{c}:{d}"))));
            let d = r.witness.domain();
            kv(&mut out, "witness.summands", d.summands().len());
            for (i, (h, x)) in d.summands().iter().zip(r.witness.images()).enumerate() {
                kv(&mut out, &format!("witness.{i}.subgroup"), h);
                kv(&mut out, &format!("witness.{i}.index"), h.index_in(&m.group));
                kv(&mut out, &format!("witness.{i}.x"), join(x));
            }
        }
        Command::Oracle { file, bound } => {
            let m = load(&file)?;
            let cb_dim = edp_core::gmodule::cobar(&m.module).dim();
            let bound = bound.unwrap_or(cb_dim * m.group.order());
            let e = brute_force_ed(&m.module, bound)?;
            kv(&mut out, "bound", bound);
            kv(&mut out, "ed", e);
        }
        Command::Cbar { file } => {
            let m = load(&file)?;
            let table = cost_table_with(&m.module, &options()?)?;
            module_header(&mut out, &m.module);
            kv(&mut out, "cbar_dim", table.cobar.dim());
            kv(&mut out, "classes", table.entries.len());
            for (i, e) in table.entries.iter().enumerate() {
                kv(&mut out, &format!("class.{i}.subgroup"), &e.subgroup);
                kv(&mut out, &format!("class.{i}.index"), e.index);
                kv(&mut out, &format!("class.{i}.image_dim"), e.subspace.dim());
            }
        }
        Command::Check { file, presentation } => {
            let m = load(&file)?;
            let text =
                std::fs::read_to_string(&presentation).map_err(|e| Failure::Io(presentation.clone(), e.to_string()))?;
            let phi = parse_presentation(&text, &m.module)?;
            let span = spans_cobar(&phi);
            let coker = cokernel_prime_to_p(&phi);
            kv(&mut out, "summands", phi.domain().summands().len());
            kv(&mut out, "domain_rank", phi.domain().rank());
            kv(&mut out, "spans_cbar", span);
            kv(&mut out, "cokernel_prime_to_p", coker);
            kv(&mut out, "is_p_presentation", span && coker);
            if span && coker {
                let rep = kernel_report(&phi)?;
                kv(&mut out, "kernel_rank", rep.kernel_rank);
                kv(&mut out, "kernel.basis", matrix_rows(&rep.kernel_basis.transpose()));
                kv(&mut out, "kernel.in_pp_plus_ip", rep.in_pp_plus_ip);
                kv(&mut out, "kernel.coefficients_divisible", rep.condition_c);
                kv(&mut out, "kernel.fixed", rep.is_trivial_module);
                if rep.is_trivial_module {
                    kv(&mut out, "kernel.conditions_agree", conditions_b_c_agree(&phi)?);
                }
            }
        }
        Command::Bounds {
            pfaithful,
            pgenfree,
            dim,
            gap,
        } => {
            let b = match gap {
                Some(g) => ed_bounds_with_gap(pfaithful, pgenfree, dim, g)?,
                None => ed_bounds(pfaithful, pgenfree, dim)?,
            };
            kv(&mut out, "lower", b.lower);
            kv(&mut out, "upper", b.upper);
            if let Some(g) = b.gap_bound {
                kv(&mut out, "gap_bound", g);
            }
        }
        Command::Gap { file } => {
            let m = load(&file)?;
            if m.module.relations().cols() > 0 {
                return Err(edp_core::Error::InvalidParameter("gap expects a lattice without relations".into()).into());
            }
            let g = gap_bound(&m.module)?;
            kv(&mut out, "torus_dim", m.module.ngens());
            kv(&mut out, "fixed_rank", invariant_rank(&m.module)?);
            kv(&mut out, "gap", g);
        }
        Command::Tame { file } => {
            let m = load(&file)?;
            kv(&mut out, "tame", is_tame(&m.module)?);
        }
        Command::Subgroups { file } => {
            let m = load(&file)?;
            let t = m.group.enumerate_subgroups_with_ceiling(options()?.subgroup_ceiling)?;
            kv(&mut out, "group.order", m.group.order());
            kv(&mut out, "subgroups", t.subgroup_count());
            kv(&mut out, "classes", t.classes.len());
            for (i, c) in t.classes.iter().enumerate() {
                kv(&mut out, &format!("class.{i}.representative"), &c.representative);
                kv(&mut out, &format!("class.{i}.index"), c.index);
                kv(&mut out, &format!("class.{i}.size"), c.members.len());
            }
        }
        Command::Gen { kind } => {
            let x = match kind {
                GenKind::Norm { group, stabs, r } => {
                    let m = load(&group)?;
                    let stabilizers = subgroups_of(&m, &stabs)?;
                    norm_extension_module(&NormExtensionSpec {
                        group: m.group,
                        stabilizers,
                        r,
                    })?
                }
                GenKind::Sign { n } => sign_torus(n)?,
                GenKind::Split { p, n } => standard_module(&StandardKind::SplitTorus { p, n })?,
                GenKind::Mu { p, r } => standard_module(&StandardKind::Mu { p, r })?,
                GenKind::Perm { group, subgroups } => {
                    let m = load(&group)?;
                    let hs = subgroups_of(&m, &subgroups)?;
                    permutation_lattice(&m.group, &hs)?
                }
            };
            out.push_str(&serialize_model(&x));
        }
        Command::Wreath { edt, n, edf } => {
            kv(&mut out, "ed", wreath_ed(edt, n, edf)?);
        }
        Command::Sum { first, second } => {
            let a = load(&first)?;
            let b = load(&second)?;
            let opts = options()?;
            let s = direct_sum(&a.module, &b.module)?;
            let e1 = minimal_p_presentation_with(&a.module, &opts)?.ed;
            let e2 = minimal_p_presentation_with(&b.module, &opts)?.ed;
            let es = minimal_p_presentation_with(&s, &opts)?.ed;
            kv(&mut out, "ed1", e1);
            kv(&mut out, "ed2", e2);
            kv(&mut out, "ed_sum", es);
            kv(&mut out, "additive", es == e1 + e2);
        }
    }
    Ok(out)
}

/// Runs one command line (including the program name) and returns the exit
/// code with the text destined for stdout and stderr.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_PARSE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match run(cli.command) {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(f) => {
            let (code, stderr) = f.render();
            Outcome {
                code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}
