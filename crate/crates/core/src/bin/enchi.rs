use enchi::cli::{self, Command, JobSpec, Options, OutputFormat};
use enchi::window::{Stage, TauAssignment, WindowParams};
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
usage: enchi <command> [input] [flags]

commands:
  torsion <file.gp>     torsion invariants of a presentation
  hfk11 <file.od>       knot Floer data of a (1,1) diagram
  decomp <file.gre>     norms and coset report of a group-ring element
  detect <file.det>     detection classifier on per-coset data
  crosscheck <file.od>  compare the diagram and Fox-calculus pipelines
  window [--q N --chi N --n N ...]   grading-window report
  batch <dir>           run every recognized file in a directory

flags:
  --format text|kv      output format (default text)
  --cache-dir DIR       cache directory (default $ENCHI_CACHE_DIR or .enchi-cache)
  --no-cache            disable the result cache
  --jobs N              batch parallelism (default 1)
  --tau-plus V, --tau-minus V, --tau-nat V   window stabilization choices (0 or -1)
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(cli::EXIT_INPUT_ERROR as u8)
        }
    }
}

fn run(args: &[String]) -> Result<i32, String> {
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return Ok(0);
    }
    let command_name = args[0].as_str();
    let mut inputs: Vec<String> = Vec::new();
    let mut options = Options::default();
    let mut q: Option<u64> = None;
    let mut chi: Option<i64> = None;
    let mut n: Option<u64> = None;
    let mut tau_plus = 0i64;
    let mut tau_minus = 0i64;
    let mut tau_nat: Vec<i64> = Vec::new();
    let mut tau_nat_default = 0i64;

    let mut i = 1;
    while i < args.len() {
        let arg = &args[i];
        let mut take = |name: &str| -> Result<String, String> {
            i += 1;
            args.get(i)
                .cloned()
                .ok_or_else(|| format!("flag {name} needs a value"))
        };
        match arg.as_str() {
            "--format" => {
                options.format = match take("--format")?.as_str() {
                    "text" => OutputFormat::Text,
                    "kv" => OutputFormat::Kv,
                    other => return Err(format!("unknown format: {other}")),
                };
            }
            "--cache-dir" => options.cache_dir = Some(PathBuf::from(take("--cache-dir")?)),
            "--no-cache" => options.use_cache = false,
            "--jobs" => {
                options.jobs = take("--jobs")?
                    .parse()
                    .map_err(|_| "bad --jobs value".to_string())?;
            }
            "--q" => q = Some(take("--q")?.parse().map_err(|_| "bad --q".to_string())?),
            "--chi" => chi = Some(take("--chi")?.parse().map_err(|_| "bad --chi".to_string())?),
            "--n" => n = Some(take("--n")?.parse().map_err(|_| "bad --n".to_string())?),
            "--tau-plus" => {
                tau_plus = take("--tau-plus")?
                    .parse()
                    .map_err(|_| "bad --tau-plus".to_string())?;
            }
            "--tau-minus" => {
                tau_minus = take("--tau-minus")?
                    .parse()
                    .map_err(|_| "bad --tau-minus".to_string())?;
            }
            "--tau-nat" => {
                // Either a single default value or a comma list indexed by n.
                let v = take("--tau-nat")?;
                if v.contains(',') {
                    tau_nat = v
                        .split(',')
                        .map(|t| t.trim().parse::<i64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| "bad --tau-nat".to_string())?;
                } else {
                    tau_nat_default = v.parse().map_err(|_| "bad --tau-nat".to_string())?;
                }
            }
            flag if flag.starts_with("--") => return Err(format!("unknown flag: {flag}")),
            other => inputs.push(other.to_string()),
        }
        i += 1;
    }

    if command_name == "batch" {
        let [dir] = inputs.as_slice() else {
            return Err("batch needs exactly one directory".to_string());
        };
        let summary = cli::batch(PathBuf::from(dir).as_path(), &options)
            .map_err(|e| format!("batch failed: {e}"))?;
        print!("{}", summary.render());
        return Ok(summary.exit_code);
    }

    let command = match command_name {
        "torsion" => Command::Torsion,
        "hfk11" => Command::Hfk11,
        "decomp" => Command::Decomp,
        "detect" => Command::Detect,
        "crosscheck" => Command::Crosscheck,
        "window" => {
            let params = WindowParams {
                q: q.ok_or("window needs --q")?,
                chi_bar_plus: chi.ok_or("window needs --chi")?,
                tau: TauAssignment {
                    plus: tau_plus,
                    minus: tau_minus,
                    nat: tau_nat,
                    nat_default: tau_nat_default,
                },
                n: n.ok_or("window needs --n")?,
            };
            // Sanity-check the stage data before dispatch.
            let _ = Stage::Nat(params.n);
            Command::Window(params)
        }
        other => return Err(format!("unknown command: {other}\n{USAGE}")),
    };

    let input = if matches!(command, Command::Window(_)) {
        None
    } else {
        let [file] = inputs.as_slice() else {
            return Err(format!("{command_name} needs exactly one input file"));
        };
        Some(PathBuf::from(file))
    };

    let record = cli::run(&JobSpec {
        command,
        input,
        options,
    });
    print!("{}", record.output);
    Ok(record.exit_code)
}
