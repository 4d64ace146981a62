//! Command dispatch, file parsing, result caching, and report emission for
//! the command-line front end. Outputs are deterministic: identical inputs
//! produce byte-identical reports across runs and thread counts.

use crate::decomp::{self, EnhancedChi, Verdict};
use crate::diagram::{euler_char, khi_certificate, BigonRule};
use crate::formats;
use crate::fox::{self, Torsion};
use crate::ring::{Coeff, PmClass};
use crate::window::{block_sums, bounds, identity_suite, window_constants, Stage, WindowParams};
use num_traits::One;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Kv,
}

impl OutputFormat {
    pub fn tag(self) -> &'static str {
        match self {
            OutputFormat::Text => "text",
            OutputFormat::Kv => "kv",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub format: OutputFormat,
    pub cache_dir: Option<PathBuf>,
    pub use_cache: bool,
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            format: OutputFormat::Text,
            cache_dir: None,
            use_cache: true,
            jobs: 1,
        }
    }
}

impl Options {
    fn resolved_cache_dir(&self) -> PathBuf {
        if let Some(d) = &self.cache_dir {
            return d.clone();
        }
        if let Ok(d) = std::env::var("ENCHI_CACHE_DIR") {
            if !d.is_empty() {
                return PathBuf::from(d);
            }
        }
        PathBuf::from(".enchi-cache")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Torsion,
    Hfk11,
    Decomp,
    Detect,
    Crosscheck,
    Window(WindowParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Torsion => "torsion",
            Command::Hfk11 => "hfk11",
            Command::Decomp => "decomp",
            Command::Detect => "detect",
            Command::Crosscheck => "crosscheck",
            Command::Window(_) => "window",
        }
    }
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRecord {
    pub digest: String,
    pub command: String,
    pub output: String,
    pub exit_code: i32,
    pub version: String,
    pub cached: bool,
}

/// FNV-1a, 64-bit; cache keys combine the toolkit version, the command, the
/// output format, and the raw input bytes.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn digest_for(command: &Command, format: OutputFormat, payload: &[u8]) -> String {
    let mut key = Vec::new();
    key.extend_from_slice(VERSION.as_bytes());
    key.push(0);
    key.extend_from_slice(command.name().as_bytes());
    if let Command::Window(p) = command {
        key.extend_from_slice(format!("{p:?}").as_bytes());
    }
    key.push(0);
    key.extend_from_slice(format.tag().as_bytes());
    key.push(0);
    key.extend_from_slice(payload);
    format!("{:016x}", fnv1a(&key))
}

/// Runs a job; every failure is encoded in the record's output and exit
/// code, so batches never abort.
pub fn run(job: &JobSpec) -> ResultRecord {
    let payload = match &job.input {
        Some(path) => match fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                return ResultRecord {
                    digest: String::new(),
                    command: job.command.name().to_string(),
                    output: format!("error: cannot read {}: {e}\n", path.display()),
                    exit_code: EXIT_INPUT_ERROR,
                    version: VERSION.to_string(),
                    cached: false,
                };
            }
        },
        None => String::new(),
    };
    let digest = digest_for(&job.command, job.options.format, payload.as_bytes());

    if job.options.use_cache {
        if let Some(record) = cache_read(&job.options.resolved_cache_dir(), &digest) {
            return ResultRecord {
                digest,
                command: job.command.name().to_string(),
                output: record.0,
                exit_code: record.1,
                version: VERSION.to_string(),
                cached: true,
            };
        }
    }

    let (output, exit_code) = dispatch(&job.command, &payload, job.options.format);
    if job.options.use_cache {
        cache_write(
            &job.options.resolved_cache_dir(),
            &digest,
            &output,
            exit_code,
        );
    }
    ResultRecord {
        digest,
        command: job.command.name().to_string(),
        output,
        exit_code,
        version: VERSION.to_string(),
        cached: false,
    }
}

fn cache_read(dir: &Path, digest: &str) -> Option<(String, i32)> {
    let path = dir.join(digest);
    let text = fs::read_to_string(path).ok()?;
    let (head, body) = text.split_once('\n')?;
    let exit = head.strip_prefix("exit: ")?.parse().ok()?;
    Some((body.to_string(), exit))
}

fn cache_write(dir: &Path, digest: &str, output: &str, exit_code: i32) {
    if fs::create_dir_all(dir).is_err() {
        return;
    }
    let tmp = dir.join(format!("{digest}.tmp.{}", std::process::id()));
    let content = format!("exit: {exit_code}\n{output}");
    if fs::write(&tmp, content).is_ok() {
        let _ = fs::rename(&tmp, dir.join(digest));
    }
}

struct Report {
    format: OutputFormat,
    text: String,
    kv: String,
}

impl Report {
    fn new(format: OutputFormat) -> Self {
        Report {
            format,
            text: String::new(),
            kv: String::new(),
        }
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}: {value}");
        let kv_key = key.replace(' ', "_");
        let _ = writeln!(self.kv, "{kv_key}={value}");
    }

    fn finish(self) -> String {
        match self.format {
            OutputFormat::Text => self.text,
            OutputFormat::Kv => self.kv,
        }
    }
}

fn dispatch(command: &Command, payload: &str, format: OutputFormat) -> (String, i32) {
    match command {
        Command::Torsion => run_torsion(payload, format),
        Command::Hfk11 => run_hfk11(payload, format),
        Command::Decomp => run_decomp(payload, format),
        Command::Detect => run_detect(payload, format),
        Command::Crosscheck => run_crosscheck(payload, format),
        Command::Window(params) => run_window(params, format),
    }
}

fn input_error(msg: impl std::fmt::Display) -> (String, i32) {
    (format!("error: {msg}\n"), EXIT_INPUT_ERROR)
}

fn coeff_str(c: &Coeff) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn pm_str(p: &PmClass) -> String {
    formats::format_elem_default(&p.display_rep())
}

fn run_torsion(payload: &str, format: OutputFormat) -> (String, i32) {
    let pres = match formats::parse_presentation(payload) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let mut r = Report::new(format);
    let (h, _) = match pres.abelianize() {
        Ok(x) => x,
        Err(e) => return input_error(e),
    };
    r.line("homology", formats::format_group(&h));
    match fox::sutured_torsion(&pres) {
        Ok(tau) => {
            r.line("sutured torsion", pm_str(&tau));
            r.line("norm", coeff_str(&tau.norm()));
        }
        Err(e) => {
            r.line("sutured torsion", format!("error {e}"));
            return (r.finish(), EXIT_INPUT_ERROR);
        }
    }
    match fox::turaev_torsion(&pres) {
        Ok(Torsion::Integral(t)) => r.line("turaev torsion", pm_str(&t)),
        Ok(Torsion::Indeterminate) => r.line("turaev torsion", "indeterminate"),
        Err(e) => r.line("turaev torsion", format!("error {e}")),
    }
    (r.finish(), EXIT_OK)
}

fn run_hfk11(payload: &str, format: OutputFormat) -> (String, i32) {
    let diagram = match formats::parse_diagram(payload) {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let analysis = match diagram.validate() {
        Ok(a) => a,
        Err(e) => return input_error(e),
    };
    let complex = match analysis.complex_with(BigonRule::default()) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let mut r = Report::new(format);
    r.line("generators", complex.generator_count());
    r.line("homology group", formats::format_group(complex.group()));
    let chi = match euler_char(&complex) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    r.line("dim", chi.total_dim);
    r.line("chi", pm_str(&chi.chi));
    if let Some(canon) = &chi.canonical {
        r.line("chi canonical", formats::format_elem_default(canon));
    }
    let table_kind = if chi.table_is_absolute {
        "absolute"
    } else {
        "relative"
    };
    r.line("table grading", table_kind);
    for (cls, dim) in &chi.table {
        r.line(&format!("table {cls}"), dim);
    }
    let cert = match khi_certificate(&complex) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    r.line("upper", cert.upper);
    r.line("lower", coeff_str(&cert.lower));
    r.line("certified", cert.certified);
    if let Some(d) = cert.certified_dim {
        r.line("certified dim", d);
    }
    (r.finish(), EXIT_OK)
}

fn run_decomp(payload: &str, format: OutputFormat) -> (String, i32) {
    let gre = match formats::parse_gre(payload) {
        Ok(g) => g,
        Err(e) => return input_error(e),
    };
    let chi = EnhancedChi::new(
        gre.group.clone(),
        PmClass::new(gre.elem.clone()),
        gre.meridian.clone(),
    );
    let report = match decomp::report(&chi) {
        Ok(rep) => rep,
        Err(e) => return input_error(e),
    };
    let mut r = Report::new(format);
    r.line("group", formats::format_group(&gre.group));
    r.line("norm en", coeff_str(&report.norm_en));
    r.line("chi gr", pm_str(&report.chi_gr));
    r.line("norm gr", coeff_str(&report.norm_gr));
    for (key, part) in &report.torsion_split {
        let label = key
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",");
        r.line(
            &format!("coset ({label}) norm"),
            coeff_str(&part.norm()),
        );
    }
    let mut exit = EXIT_OK;
    if let Some(dim) = gre.dim {
        match decomp::bound_chain(dim, &chi) {
            Ok(b) => {
                r.line("dim", dim);
                let status = match b.violation {
                    None => "ok".to_string(),
                    Some(v) => {
                        exit = EXIT_VIOLATION;
                        format!("violation {v:?}")
                    }
                };
                r.line("bound chain", status);
                r.line("tight first", b.tight_first);
                r.line("tight second", b.tight_second);
            }
            Err(e) => return input_error(e),
        }
    }
    (r.finish(), exit)
}

fn run_detect(payload: &str, format: OutputFormat) -> (String, i32) {
    let inp = match formats::parse_det(payload) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let verdict = match decomp::classify(&inp) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let mut r = Report::new(format);
    r.line("h1 order", inp.h1_y_order());
    let (label, exit) = match &verdict {
        Verdict::Unknot => ("unknot".to_string(), EXIT_OK),
        Verdict::GenusOneFibred => ("genus-one-fibred".to_string(), EXIT_OK),
        Verdict::FibredGenusN(n) => (format!("fibred-genus-{n}"), EXIT_OK),
        Verdict::Inconsistent(reason) => {
            (format!("inconsistent ({reason})"), EXIT_INCONSISTENT)
        }
        Verdict::Unknown => ("unknown".to_string(), EXIT_OK),
    };
    r.line("verdict", label);
    (r.finish(), exit)
}

fn run_crosscheck(payload: &str, format: OutputFormat) -> (String, i32) {
    let diagram = match formats::parse_diagram(payload) {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let analysis = match diagram.validate() {
        Ok(a) => a,
        Err(e) => return input_error(e),
    };
    match crate::diagram::crosscheck(&analysis) {
        Ok((chi, tau, agree)) => {
            let mut r = Report::new(format);
            r.line("chi", pm_str(&chi));
            r.line("sutured torsion", pm_str(&tau));
            r.line("agree", agree);
            let exit = if agree { EXIT_OK } else { EXIT_VIOLATION };
            (r.finish(), exit)
        }
        Err(e) => input_error(e),
    }
}

fn run_window(params: &WindowParams, format: OutputFormat) -> (String, i32) {
    let mut r = Report::new(format);
    r.line("q", params.q);
    r.line("chi bar plus", params.chi_bar_plus);
    r.line("n", params.n);
    for stage in [Stage::Plus, Stage::Minus, Stage::Nat(params.n)] {
        match bounds(params, stage) {
            Ok((i_max, i_min)) => {
                r.line(&format!("i max {stage}"), i_max);
                r.line(&format!("i min {stage}"), i_min);
            }
            Err(e) => {
                r.line(&format!("bounds {stage}"), format!("error {e}"));
                return (r.finish(), EXIT_INPUT_ERROR);
            }
        }
    }
    match window_constants(params) {
        Ok(c) => {
            r.line("P", c.p_n);
            r.line("rho", c.rho_n);
            r.line("Q", c.q_n);
            r.line("valid", c.valid);
        }
        Err(e) => return input_error(e),
    }
    let mut exit = EXIT_OK;
    match identity_suite(params) {
        Ok(ids) => {
            for (name, ok) in ids {
                r.line(&format!("identity {name}"), ok);
                if !ok {
                    exit = EXIT_VIOLATION;
                }
            }
        }
        Err(e) => r.line("identities", format!("skipped ({e})")),
    }
    match block_sums(params, params.n) {
        Ok(b) => {
            r.line(
                "blocks first",
                b.first.map(|v| v.to_string()).join(","),
            );
            r.line(
                "blocks second",
                b.second.map(|v| v.to_string()).join(","),
            );
            r.line("blocks total", b.total);
        }
        Err(e) => r.line("blocks", format!("skipped ({e})")),
    }
    (r.finish(), exit)
}

/// One line of a batch summary.
#[derive(Debug, Clone)]
pub struct BatchEntry {
    pub file: String,
    pub command: String,
    pub exit_code: i32,
    pub digest: String,
}

#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub entries: Vec<BatchEntry>,
    pub exit_code: i32,
    pub records: Vec<ResultRecord>,
}

impl BatchSummary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                e.file,
                e.command,
                if e.exit_code == 0 { "ok" } else { "FAIL" },
                e.exit_code
            );
        }
        let _ = writeln!(out, "total: {} jobs, exit {}", self.entries.len(), self.exit_code);
        out
    }
}

fn command_for_extension(path: &Path) -> Option<Command> {
    match path.extension()?.to_str()? {
        "gp" => Some(Command::Torsion),
        "od" => Some(Command::Hfk11),
        "gre" => Some(Command::Decomp),
        "det" => Some(Command::Detect),
        _ => None,
    }
}

/// Runs every recognized job file in a directory, in parallel over files,
/// with deterministic output ordering by file name.
pub fn batch(dir: &Path, options: &Options) -> std::io::Result<BatchSummary> {
    let mut jobs: Vec<(String, JobSpec)> = Vec::new();
    let mut names: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    names.sort();
    for path in names {
        if let Some(command) = command_for_extension(&path) {
            let file = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            jobs.push((
                file,
                JobSpec {
                    command,
                    input: Some(path),
                    options: options.clone(),
                },
            ));
        }
    }

    let threads = options.jobs.max(1);
    let mut records: Vec<Option<ResultRecord>> = vec![None; jobs.len()];
    std::thread::scope(|scope| {
        let mut chunks: Vec<_> = records.chunks_mut(jobs.len().div_ceil(threads).max(1)).collect();
        let mut offset = 0;
        let mut handles = Vec::new();
        for chunk in chunks.drain(..) {
            let len = chunk.len();
            let jobs = &jobs;
            let start = offset;
            handles.push(scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(run(&jobs[start + i].1));
                }
            }));
            offset += len;
        }
    });
    let records: Vec<ResultRecord> = records.into_iter().map(|r| r.unwrap()).collect();

    let entries: Vec<BatchEntry> = jobs
        .iter()
        .zip(&records)
        .map(|((file, job), rec)| BatchEntry {
            file: file.clone(),
            command: job.command.name().to_string(),
            exit_code: rec.exit_code,
            digest: rec.digest.clone(),
        })
        .collect();
    let exit_code = if entries.iter().any(|e| e.exit_code == EXIT_INPUT_ERROR) {
        EXIT_INPUT_ERROR
    } else {
        entries.iter().map(|e| e.exit_code).max().unwrap_or(EXIT_OK)
    };
    Ok(BatchSummary {
        entries,
        exit_code,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::TauAssignment;

    fn tmpdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("enchi-test-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn window_command_reports_identities() {
        let params = WindowParams {
            q: 5,
            chi_bar_plus: -2,
            tau: TauAssignment {
                plus: 0,
                minus: -1,
                nat: vec![0, -1, 0, -1, 0, -1],
                nat_default: 0,
            },
            n: 4,
        };
        let (out, exit) = run_window(&params, OutputFormat::Kv);
        assert_eq!(exit, EXIT_OK);
        assert!(out.contains("identity_window-length=true"));
        assert!(out.contains("valid=true"));
    }

    #[test]
    fn cache_round_trip_and_determinism() {
        let dir = tmpdir("cache");
        let input = dir.join("trefoil.gp");
        fs::write(&input, "gens: x y\nrel: x y x Y X Y\nmeridian: x\n").unwrap();
        let job = JobSpec {
            command: Command::Torsion,
            input: Some(input),
            options: Options {
                cache_dir: Some(dir.join("cache")),
                ..Options::default()
            },
        };
        let first = run(&job);
        assert_eq!(first.exit_code, EXIT_OK);
        assert!(!first.cached);
        let second = run(&job);
        assert!(second.cached);
        assert_eq!(first.output, second.output);
        assert_eq!(first.digest, second.digest);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn batch_marks_malformed_files() {
        let dir = tmpdir("batch");
        fs::write(dir.join("a.gp"), "gens: x\nmeridian: x\n").unwrap();
        fs::write(dir.join("b.gp"), "gens x broken\n").unwrap();
        let opts = Options {
            cache_dir: Some(dir.join("cache")),
            jobs: 2,
            ..Options::default()
        };
        let summary = batch(&dir, &opts).unwrap();
        assert_eq!(summary.entries.len(), 2);
        assert_eq!(summary.exit_code, EXIT_INPUT_ERROR);
        assert_eq!(summary.entries[0].exit_code, EXIT_OK);
        assert_eq!(summary.entries[1].exit_code, EXIT_INPUT_ERROR);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn empty_batch_is_empty() {
        let dir = tmpdir("empty");
        let summary = batch(&dir, &Options::default()).unwrap();
        assert!(summary.entries.is_empty());
        assert_eq!(summary.exit_code, EXIT_OK);
        let _ = fs::remove_dir_all(&dir);
    }
}
