use clap::{Parser, Subcommand, ValueEnum};
use dgw::presentation::{parse_with_char, SourceFile};
use dgw::table::DimTable;
use dgw::truncated::{Algebra, Module};
use dgw::{scenarios, Error, Result, Window};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "dgw", version, about = "Homological workbench for non-positive DG-rings")]
struct Cli {
    /// Field characteristic for all exact arithmetic.
    #[arg(long = "char", global = true, default_value_t = 32003)]
    char_p: u64,
    /// Computation window as `nmin:nmax:dmax`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Ext,
    Tor,
    #[value(name = "F")]
    F,
    #[value(name = "G")]
    G,
    #[value(name = "H")]
    H,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a derived operation on entities declared in a presentation file.
    Compute {
        file: PathBuf,
        #[arg(long, value_enum)]
        op: Op,
        /// Ring or module the operation applies to (H, F, G).
        #[arg(long)]
        target: Option<String>,
        /// Comma-separated module pair for binary operations (ext, tor).
        #[arg(long)]
        args: Option<String>,
    },
    /// Run one named scenario, or `all`.
    Scenario { name: String },
    /// List the scenario registry.
    List,
    /// Parse and compile a presentation file, reporting the first defect.
    Validate { file: PathBuf },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. }
        | Error::Presentation(_)
        | Error::Compile(_)
        | Error::UnknownScenario(_) => 2,
        Error::Dimension(_) | Error::Compute(_) | Error::Io(_) | Error::Json(_) => 3,
    }
}

fn run(cli: Cli) -> i32 {
    let window = match cli.window.as_deref().map(parse_window).transpose() {
        Ok(w) => w,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let result = match &cli.cmd {
        Cmd::Compute { file, op, target, args } => {
            compute(file, *op, target.as_deref(), args.as_deref(), cli.char_p, window, cli.format)
        }
        Cmd::Scenario { name } => return scenario(name, window, cli.format),
        Cmd::List => {
            if cli.format == Format::Json {
                println!("{}", serde_json::to_string_pretty(scenarios::REGISTRY).unwrap());
            } else {
                for name in scenarios::REGISTRY {
                    println!("{name}");
                }
            }
            Ok(())
        }
        Cmd::Validate { file } => validate(file, cli.char_p, window),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            exit_code(&e)
        }
    }
}

fn parse_window(s: &str) -> Result<Window> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Presentation(format!("malformed window `{s}`, expected nmin:nmax:dmax"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<i32> = parts
        .iter()
        .map(|p| p.parse::<i32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    if nums[0] > nums[1] || nums[2] < 0 {
        return Err(bad());
    }
    Ok(Window { n_min: nums[0], n_max: nums[1], d_max: nums[2] })
}

fn load(file: &PathBuf, char_p: u64) -> Result<SourceFile> {
    let text = std::fs::read_to_string(file)?;
    parse_with_char(&text, char_p)
}

fn module_with_ring(f: &SourceFile, name: &str, w: Window) -> Result<(Algebra, Module)> {
    if let Some(mp) = f.module(name) {
        let rp = f
            .ring(&mp.over)
            .ok_or_else(|| Error::Presentation(format!("module {name} is over undeclared ring {}", mp.over)))?;
        let alg = Algebra::compile(rp, w)?;
        let m = Module::compile(&alg, mp)?;
        return Ok((alg, m));
    }
    if let Some(rp) = f.ring(name) {
        let alg = Algebra::compile(rp, w)?;
        let m = alg.as_module()?;
        return Ok((alg, m));
    }
    Err(Error::Presentation(format!("no ring or module named `{name}` in input")))
}

fn compute(
    file: &PathBuf,
    op: Op,
    target: Option<&str>,
    args: Option<&str>,
    char_p: u64,
    window: Option<Window>,
    format: Format,
) -> Result<()> {
    let f = load(file, char_p)?;
    let w = window.unwrap_or_else(scenarios::default_window);
    let need_target = || {
        target.ok_or_else(|| Error::Presentation("this operation needs --target <name>".into()))
    };
    let table = match op {
        Op::H => {
            let (_, m) = module_with_ring(&f, need_target()?, w)?;
            m.cohomology()
        }
        Op::F => {
            let (alg, m) = module_with_ring(&f, need_target()?, w)?;
            dgw::derived::reduction_f(&alg, &m)?
        }
        Op::G => {
            let (alg, m) = module_with_ring(&f, need_target()?, w)?;
            dgw::derived::coreduction_g(&alg, &m)?
        }
        Op::Ext | Op::Tor => {
            let args = args
                .ok_or_else(|| Error::Presentation("ext/tor need --args <M>,<N>".into()))?;
            let (first, second) = args.split_once(',').ok_or_else(|| {
                Error::Presentation(format!("malformed --args `{args}`, expected M,N"))
            })?;
            let (alg, m) = module_with_ring(&f, first.trim(), w)?;
            let np = f
                .module(second.trim())
                .ok_or_else(|| Error::Presentation(format!("no module named `{}`", second.trim())))?;
            if np.over != alg.pres.name {
                return Err(Error::Presentation(format!(
                    "modules live over different rings: {} vs {}",
                    alg.pres.name, np.over
                )));
            }
            let n = Module::compile(&alg, np)?;
            match op {
                Op::Ext => dgw::derived::ext_table(&m, &n)?,
                _ => dgw::derived::tor_table(&m, &n)?,
            }
        }
    };
    print_table(&table, format)
}

fn print_table(t: &DimTable, format: Format) -> Result<()> {
    match format {
        Format::Table => println!("{t}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(t)?),
        Format::Tsv => print!("{}", t.render_tsv()),
    }
    Ok(())
}

fn scenario(name: &str, window: Option<Window>, format: Format) -> i32 {
    let reports = if name == "all" {
        scenarios::run_all(window)
    } else {
        scenarios::run(name, window).map(|r| vec![r])
    };
    let reports = match reports {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return exit_code(&e);
        }
    };
    let all_pass = reports.iter().all(|r| r.pass);
    match format {
        Format::Json => {
            let payload = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(&reports)
            };
            println!("{}", payload.unwrap());
        }
        Format::Tsv => {
            for r in &reports {
                for a in &r.assertions {
                    println!(
                        "{}\t{}\t{}\t{}\t{}",
                        r.name,
                        a.desc,
                        a.expected,
                        a.computed,
                        if a.pass { "pass" } else { "fail" }
                    );
                }
            }
        }
        Format::Table => {
            for r in &reports {
                println!("{} ({} ms)", r.name, r.wall_ms);
                println!("  inputs: {}", r.inputs);
                for a in &r.assertions {
                    let mark = if a.pass { "ok  " } else { "FAIL" };
                    println!("  {mark} {} — expected {}, computed {}", a.desc, a.expected, a.computed);
                }
                println!("{}", if r.pass { "PASS" } else { "FAIL" });
            }
        }
    }
    if all_pass {
        0
    } else {
        1
    }
}

fn validate(file: &PathBuf, char_p: u64, window: Option<Window>) -> Result<()> {
    let f = load(file, char_p)?;
    let w = window.unwrap_or_else(scenarios::default_window);
    let mut algs = Vec::new();
    for rp in &f.rings {
        algs.push(Algebra::compile(rp, w)?);
    }
    for mp in &f.modules {
        let alg = algs
            .iter()
            .find(|a| a.pres.name == mp.over)
            .ok_or_else(|| Error::Presentation(format!("module {} over undeclared ring {}", mp.name, mp.over)))?;
        Module::compile(alg, mp)?;
    }
    println!("ok: {} ring(s), {} module(s) compile cleanly", f.rings.len(), f.modules.len());
    Ok(())
}
