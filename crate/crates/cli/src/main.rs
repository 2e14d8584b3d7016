//! `fosuccinct`: batch experiments over the workbench library.
//!
//! Exit codes: 0 success, 2 usage or input errors, 3 a scale guard was hit,
//! 4 an internal invariant failed.

use clap::{Parser, Subcommand, ValueEnum};
use fosuccinct::enumerator::{min_distinguishing_size, EnumConfig, Enumerator};
use fosuccinct::est::{certify_lower_bound, tree_size_bound, ExtSyntaxTree};
use fosuccinct::evaluator::{eval_fo, eval_mso, parse_assignment, MsoMode, Verdict};
use fosuccinct::families::{self, ChiMode};
use fosuccinct::report::{succinct_report, Experiment};
use fosuccinct::{parse, Error, Guards, Interpretation, LabeledString, Letter, LinearOrder, Signature, Structure};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fosuccinct", version, about = "Succinctness experiments on linear orders and strings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on `A:N` or on a string of letter names.
    Eval {
        formula: String,
        structure: String,
        /// Free variable values such as `x=3,y=0`; unassigned variables are 0.
        assignment: Option<String>,
        /// Height of the string alphabet; inferred from the tags when omitted.
        #[arg(long)]
        height: Option<u32>,
        /// Restrict set quantifiers to positions carrying this letter.
        #[arg(long)]
        restrict: Option<String>,
    },
    /// Translate a sentence into the two-variable fragment.
    Translate { direction: Direction, formula: String },
    /// Certify a size lower bound for a sentence separating two sets of
    /// interpretations.
    Certify {
        formula: String,
        #[arg(long = "A", num_args = 1.., required = true)]
        a: Vec<String>,
        #[arg(long = "B", num_args = 1.., required = true)]
        b: Vec<String>,
        /// Also print the extended syntax tree as JSON.
        #[arg(long)]
        dump_tree: bool,
    },
    /// Print a member of a formula or string family.
    Gen { family: Family, args: Vec<u64> },
    /// Count sentence classes by size.
    Enumerate {
        #[arg(long, default_value = "full")]
        sig: String,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long)]
        max_size: usize,
    },
    /// Least size of a sentence true on A and false on B.
    MinSize {
        #[arg(long = "A", num_args = 1.., required = true)]
        a: Vec<String>,
        #[arg(long = "B", num_args = 1.., required = true)]
        b: Vec<String>,
        #[arg(long, default_value = "full")]
        sig: String,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 6)]
        cap: usize,
    },
    /// CSV size tables for the succinctness gaps.
    SuccinctReport {
        #[arg(long)]
        experiment: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Fo3ToFo2,
    FoToFo2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Chi,
    ChiGeq,
    PhiM,
    Vh,
    Wh,
    Mu,
    Equal,
    Inc,
    VhPlus,
    #[value(name = "Phi")]
    Phi,
    #[value(name = "Psi")]
    Psi,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let guards = Guards::from_env();
    match run(cli.command, &guards) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Guard(_) => 3,
                Error::Invariant(_) | Error::Witness(_) => {
                    eprintln!("guards: {guards}");
                    4
                }
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn parse_signature(text: &str) -> Result<Signature, Error> {
    match text {
        "order" => Ok(Signature::order()),
        "full" => Ok(Signature::full_order()),
        _ => text
            .strip_prefix("tau:")
            .and_then(|h| h.parse().ok())
            .map(Signature::tau)
            .ok_or_else(|| usage(format!("unknown signature `{text}` (order, full, tau:H)"))),
    }
}

fn parse_structure(text: &str, height: Option<u32>) -> Result<Structure, Error> {
    if text.trim_start().starts_with("A:") {
        return Ok(Structure::Order(text.trim().parse::<LinearOrder>()?));
    }
    let h = match height {
        Some(h) => h,
        None => {
            let mut top = 0;
            for w in text.split_whitespace() {
                if let Ok(l) = w.parse::<Letter>() {
                    top = top.max(l.level().unwrap_or(0));
                }
            }
            top.saturating_sub(1).max(1)
        }
    };
    Ok(Structure::String(LabeledString::parse(h, text)?))
}

fn parse_interpretations(items: &[String]) -> Result<Vec<Interpretation>, Error> {
    items.iter().map(|s| s.parse()).collect()
}

fn run(command: Command, guards: &Guards) -> Result<String, Error> {
    match command {
        Command::Eval {
            formula,
            structure,
            assignment,
            height,
            restrict,
        } => {
            let f = parse(&formula)?;
            let s = parse_structure(&structure, height)?;
            if f.is_mso() {
                let mode = match restrict {
                    Some(l) => MsoMode::Restricted(l.parse()?),
                    None => MsoMode::Exhaustive,
                };
                let v = eval_mso(&f, &s, &mode, guards)?;
                if v == Verdict::Inconclusive {
                    return Err(Error::Invariant("exhaustive evaluation left the verdict open".into()));
                }
                return Ok(format!("{v}\n"));
            }
            let mut a = parse_assignment(assignment.as_deref().unwrap_or(""))?;
            for v in f.free_variables() {
                a.entry(v).or_insert(0);
            }
            Ok(format!("{}\n", eval_fo(&f, &s, &a)?))
        }
        Command::Translate { direction, formula } => {
            let f = parse(&formula)?;
            let out = match direction {
                Direction::Fo3ToFo2 => families::translate_fo3_to_fo2(&f, guards)?,
                Direction::FoToFo2 => families::translate_fo_to_fo2(&f, guards)?,
            };
            Ok(format!("{out}\n"))
        }
        Command::Certify {
            formula,
            a,
            b,
            dump_tree,
        } => {
            let f = parse(&formula)?;
            let (a, b) = (parse_interpretations(&a)?, parse_interpretations(&b)?);
            let c = certify_lower_bound(&f, &a, &b, guards)?;
            let mut out = format!(
                "# guards: {guards}\nformula: {}\nsize: {}\nseparator: {}\nweight: {}\nbound: {:.6}\nholds: {}\n",
                c.formula, c.size, c.separator, c.weight, c.bound, c.holds
            );
            if dump_tree {
                let t = ExtSyntaxTree::build(&f, &a, &b, guards)?;
                t.verify_labels()?;
                let sb = tree_size_bound(&t, guards)?;
                out.push_str(&format!("tree_nodes: {}\n{}\n", sb.nodes, t.to_json()));
            }
            if !c.holds {
                eprint!("{out}");
                return Err(Error::Invariant("size is below the certified bound".into()));
            }
            Ok(out)
        }
        Command::Gen { family, args } => gen(family, &args, guards),
        Command::Enumerate { sig, width, max_size } => {
            if max_size > guards.enum_max_size {
                return Err(Error::Guard(format!(
                    "max size {max_size} exceeds the enumeration guard of {}",
                    guards.enum_max_size
                )));
            }
            let mut e = Enumerator::new(EnumConfig::new(parse_signature(&sig)?, width, max_size), guards)?;
            let mut out = format!(
                "# guards: {guards}\n# search space: sizes 1..={max_size}, width {width}, {} probe interpretations, at most {} classes\nsize,formula_classes,sentence_classes\n",
                e.probe_count(),
                guards.enum_max_classes
            );
            eprint!("{out}");
            e.run()?;
            for s in 1..=e.size() {
                let level = e.level(s);
                let sentences = level.iter().filter(|x| x.is_sentence()).count();
                out.push_str(&format!("{s},{},{sentences}\n", level.len()));
            }
            Ok(out)
        }
        Command::MinSize {
            a,
            b,
            sig,
            width,
            cap,
        } => {
            let (a, b) = (parse_interpretations(&a)?, parse_interpretations(&b)?);
            let sig = parse_signature(&sig)?;
            eprintln!("# search space: sizes 1..={cap}, width {width}");
            let mut out = format!("# guards: {guards}\n");
            match min_distinguishing_size(&sig, width, &a, &b, cap, guards)? {
                Some((size, f)) => out.push_str(&format!("size: {size}\nformula: {f}\n")),
                None => out.push_str(&format!("size: none up to {cap}\n")),
            }
            Ok(out)
        }
        Command::SuccinctReport { experiment } => {
            let exp: Experiment = experiment.parse().map_err(|_| usage(format!("unknown experiment `{experiment}`")))?;
            succinct_report(exp, guards)
        }
    }
}

fn arg(args: &[u64], k: usize, family: &str) -> Result<u64, Error> {
    args.get(k)
        .copied()
        .ok_or_else(|| usage(format!("{family} needs {} argument(s)", k + 1)))
}

fn height(args: &[u64], family: &str) -> Result<u32, Error> {
    u32::try_from(arg(args, 0, family)?).map_err(|_| usage("height out of range"))
}

fn gen(family: Family, args: &[u64], guards: &Guards) -> Result<String, Error> {
    let text = match family {
        Family::Chi => families::gen_chi(arg(args, 0, "chi")? as usize, ChiMode::Exact).to_string(),
        Family::ChiGeq => families::gen_chi(arg(args, 0, "chi-geq")? as usize, ChiMode::AtLeast).to_string(),
        Family::PhiM => families::gen_phi_m(height(args, "phi-m")?).to_string(),
        Family::Vh => families::v_h(height(args, "vh")?, guards)?.to_string(),
        Family::Wh => families::w_h(height(args, "wh")?, guards)?.to_string(),
        Family::Mu => families::mu(height(args, "mu")?, arg(args, 1, "mu")?)?.to_string(),
        Family::Equal => families::gen_equal(height(args, "equal")?)?.to_string(),
        Family::Inc => families::gen_inc(height(args, "inc")?)?.to_string(),
        Family::VhPlus => families::gen_vh_plus(height(args, "vh-plus")?)?.to_string(),
        Family::Phi => families::gen_phi(height(args, "Phi")?)?.to_string(),
        Family::Psi => families::gen_psi(height(args, "Psi")?)?.to_string(),
    };
    Ok(format!("{text}\n"))
}
