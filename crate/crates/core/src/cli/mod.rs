//! Command-line front end.
//!
//! ```text
//! green-radio curve {se-ee|bw-pw|dl-pw|de-ee|ee-contour} [flags]
//! green-radio peak {se-ee|bw-pw|dl-pw} [flags]
//! green-radio plan [flags]
//! green-radio schedule [flags]
//! green-radio run FILE
//! ```
//!
//! Every leaf command also takes `--config FILE` (a run file whose
//! `[parameters]` are overridden by flags), `-o/--output`, `--format` and
//! `--gnuplot`. Errors are reported as a single `error[<class>]: <message>`
//! line on stderr with exit code 2 (schema), 3 (domain) or 4 (I/O).

pub mod commands;
pub mod config;
pub mod output;
pub mod schema;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, ArgMatches, Command};

pub use config::{Format, RunConfig, Scenario, CONFIG_DIR_ENV};
pub use output::{CsvTable, Document};
pub use schema::{CommandSpec, Params, COMMANDS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
        }
    }

    /// The single stderr line for this error.
    pub fn line(&self) -> String {
        format!(
            "error[{}]: {}",
            self.class(),
            config::one_line(&self.to_string())
        )
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct Request {
    pub params: Params,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub gnuplot: bool,
    /// Relative scenario paths are resolved against this directory.
    pub base_dir: PathBuf,
}

impl Request {
    /// Builds a request from a run file, with `overrides` taking precedence
    /// over its parameters.
    pub fn from_run_config(
        cfg: &RunConfig,
        spec: &'static CommandSpec,
        overrides: BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        let mut given = cfg.parameter_strings()?;
        given.extend(overrides);
        Ok(Self {
            params: Params::resolve(spec, given)?,
            output: cfg.output_path(),
            format: cfg.format,
            gnuplot: cfg.gnuplot,
            base_dir: cfg.base_dir.clone(),
        })
    }

    /// Builds a request from a self-contained run file.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let cfg = RunConfig::load(path)?;
        let command = cfg
            .command
            .as_deref()
            .ok_or_else(|| CliError::Schema(format!("{}: missing 'command'", path.display())))?;
        let spec = lookup_spec(command, cfg.kind.as_deref())?;
        Self::from_run_config(&cfg, spec, BTreeMap::new())
    }

    pub fn document(&self, config_dir: Option<&Path>) -> Result<Document, CliError> {
        commands::execute(
            &self.params,
            &commands::Lookup {
                base_dir: &self.base_dir,
                config_dir,
            },
        )
    }

    /// Rendered primary output.
    pub fn render(&self, config_dir: Option<&Path>) -> Result<String, CliError> {
        let doc = self.document(config_dir)?;
        Ok(match self.format {
            Format::Csv => doc.to_csv(),
            Format::Report => doc.to_report(),
        })
    }

    /// Runs the request, writing to the output file or `stdout`.
    pub fn execute(
        &self,
        config_dir: Option<&Path>,
        stdout: &mut dyn Write,
    ) -> Result<(), CliError> {
        if self.gnuplot && (self.output.is_none() || self.format != Format::Csv) {
            return Err(CliError::Schema(
                "--gnuplot needs --output and the csv format".into(),
            ));
        }
        let doc = self.document(config_dir)?;
        let text = match self.format {
            Format::Csv => doc.to_csv(),
            Format::Report => doc.to_report(),
        };
        match &self.output {
            Some(path) => {
                write_file(path, &text)?;
                if self.gnuplot {
                    let name = path
                        .file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    let mut gp = path.clone().into_os_string();
                    gp.push(".gp");
                    write_file(Path::new(&gp), &doc.to_gnuplot(&name))?;
                }
            }
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn lookup_spec(command: &str, kind: Option<&str>) -> Result<&'static CommandSpec, CliError> {
    schema::find(command, kind).ok_or_else(|| {
        CliError::Schema(match kind {
            Some(k) => format!("unknown command '{command} {k}'"),
            None => format!("unknown command '{command}'"),
        })
    })
}

/// The clap command tree, generated from [`COMMANDS`].
pub fn command() -> Command {
    let mut root = Command::new("green-radio")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Energy-efficiency tradeoffs of radio links and cellular deployments")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .after_help(format!(
            "Scenario names are looked up in ${CONFIG_DIR_ENV} and then among the built-in scenarios ({}).",
            config::builtin_scenario_names().join(", ")
        ));

    // top-level entries in order of first appearance
    let mut groups: Vec<(&str, Command)> = Vec::new();
    for spec in COMMANDS {
        let leaf = leaf_command(spec);
        match spec.kind {
            None => groups.push((spec.command, leaf)),
            Some(_) => match groups.iter_mut().find(|(name, _)| *name == spec.command) {
                Some((_, group)) => {
                    *group = std::mem::replace(group, Command::new(spec.command)).subcommand(leaf)
                }
                None => {
                    let about = match spec.command {
                        "curve" => "sample a tradeoff curve",
                        _ => "locate the optimum of a tradeoff relation",
                    };
                    let group = Command::new(spec.command)
                        .about(about)
                        .subcommand_required(true)
                        .arg_required_else_help(true)
                        .subcommand(leaf);
                    groups.push((spec.command, group));
                }
            },
        }
    }
    for (_, group) in groups {
        root = root.subcommand(group);
    }
    root.subcommand(
        Command::new("run")
            .about("execute a run file")
            .arg(Arg::new("file").required(true).value_name("FILE"))
            .arg(output_arg())
            .arg(format_arg())
            .arg(gnuplot_arg()),
    )
}

fn leaf_command(spec: &'static CommandSpec) -> Command {
    let name = spec.kind.unwrap_or(spec.command);
    let mut cmd = Command::new(name).about(spec.about);
    for p in spec.params {
        let help = match (p.kind, p.default) {
            (schema::ParamKind::Flag, _) | (_, None) => p.help.to_string(),
            (_, Some(d)) => format!("{} [default: {d}]", p.help),
        };
        let help = if p.required {
            format!("{help} (required)")
        } else {
            help
        };
        let mut arg = Arg::new(p.key).long(p.flag_name()).help(help);
        arg = match p.kind {
            schema::ParamKind::Flag => arg
                .num_args(0..=1)
                .require_equals(true)
                .default_missing_value("true")
                .value_parser(["true", "false"]),
            kind => arg
                .num_args(1)
                .allow_negative_numbers(true)
                .value_name(match kind {
                    schema::ParamKind::Range => "MIN:MAX:COUNT[:log]",
                    schema::ParamKind::Bracket => "LO:HI",
                    schema::ParamKind::List => "X,Y,...",
                    schema::ParamKind::Count => "N",
                    schema::ParamKind::Text => "NAME",
                    _ => "X",
                }),
        };
        cmd = cmd.arg(arg);
    }
    cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("run file supplying parameters; flags take precedence"),
    )
    .arg(output_arg())
    .arg(format_arg())
    .arg(gnuplot_arg())
}

fn output_arg() -> Arg {
    Arg::new("output")
        .short('o')
        .long("output")
        .value_name("FILE")
        .help("write to FILE instead of stdout")
}

fn format_arg() -> Arg {
    Arg::new("format")
        .long("format")
        .value_parser(["csv", "report"])
        .help("csv (default) or report (JSON)")
}

fn gnuplot_arg() -> Arg {
    Arg::new("gnuplot")
        .long("gnuplot")
        .action(ArgAction::SetTrue)
        .help("also write a gnuplot script to <output>.gp")
}

fn request_from_matches(m: &ArgMatches) -> Result<Request, CliError> {
    let (name, sub) = m.subcommand().expect("subcommand is required");
    let (spec, leaf) = match name {
        "run" => {
            let file = PathBuf::from(sub.get_one::<String>("file").expect("required"));
            let mut req = Request::from_file(&file)?;
            apply_io_flags(&mut req, sub);
            return Ok(req);
        }
        "curve" | "peak" => {
            let (kind, leaf) = sub.subcommand().expect("subcommand is required");
            (lookup_spec(name, Some(kind))?, leaf)
        }
        _ => (lookup_spec(name, None)?, sub),
    };

    let overrides: BTreeMap<String, String> = spec
        .params
        .iter()
        .filter_map(|p| {
            leaf.get_one::<String>(p.key)
                .map(|v| (p.key.to_string(), v.clone()))
        })
        .collect();

    let mut req = match leaf.get_one::<String>("config") {
        Some(path) => {
            let cfg = RunConfig::load(Path::new(path))?;
            if let Some(c) = &cfg.command {
                if c != spec.command || cfg.kind.as_deref() != spec.kind {
                    return Err(CliError::Schema(format!(
                        "{path} is a run file for '{}', not '{}'",
                        [Some(c.as_str()), cfg.kind.as_deref()]
                            .into_iter()
                            .flatten()
                            .collect::<Vec<_>>()
                            .join(" "),
                        spec.label()
                    )));
                }
            }
            Request::from_run_config(&cfg, spec, overrides)?
        }
        None => Request {
            params: Params::resolve(spec, overrides)?,
            output: None,
            format: Format::Csv,
            gnuplot: false,
            base_dir: PathBuf::new(),
        },
    };
    apply_io_flags(&mut req, leaf);
    Ok(req)
}

fn apply_io_flags(req: &mut Request, m: &ArgMatches) {
    if let Some(o) = m.get_one::<String>("output") {
        req.output = Some(PathBuf::from(o));
    }
    match m.get_one::<String>("format").map(String::as_str) {
        Some("csv") => req.format = Format::Csv,
        Some("report") => req.format = Format::Report,
        _ => {}
    }
    if m.get_flag("gnuplot") {
        req.gnuplot = true;
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(
    args: I,
    config_dir: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
                _ => {
                    let rendered = e.render().to_string();
                    let msg = rendered
                        .lines()
                        .find(|l| !l.trim().is_empty())
                        .unwrap_or("invalid arguments")
                        .trim_start_matches("error: ");
                    let _ = writeln!(stderr, "{}", CliError::Schema(msg.to_string()).line());
                    2
                }
            };
        }
    };
    match request_from_matches(&matches).and_then(|req| req.execute(config_dir, stdout)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.line());
            e.exit_code()
        }
    }
}

/// Entry point of the binary.
pub fn main_with_env() -> i32 {
    let config_dir = std::env::var_os(CONFIG_DIR_ENV).map(PathBuf::from);
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(
        std::env::args_os(),
        config_dir.as_deref(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("green-radio").chain(args.iter().copied()),
            None,
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn command_tree_is_consistent() {
        command().debug_assert();
    }

    #[test]
    fn ideal_se_ee_curve_is_strictly_decreasing() {
        let (code, out, err) = run_capture(&[
            "curve",
            "se-ee",
            "--ideal",
            "--n0",
            "1",
            "--se",
            "0.01:10:100",
        ]);
        assert_eq!(code, 0, "{err}");
        let table = CsvTable::parse(&out).unwrap();
        assert_eq!(table.rows.len(), 100);
        let ys = table.numeric_column(1).unwrap();
        assert!(ys.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(table.params()["se"], "0.01:10:100");
        assert_eq!(table.params()["ideal"], "true");
    }

    #[test]
    fn exit_codes_by_error_class() {
        let (code, _, err) = run_capture(&["curve", "se-ee", "--n0", "1"]);
        assert_eq!(code, 2);
        assert!(
            err.starts_with("error[schema]:") && err.lines().count() == 1,
            "{err}"
        );

        let (code, _, err) = run_capture(&["curve", "se-ee", "--bogus", "1"]);
        assert_eq!(code, 2, "{err}");
        assert_eq!(err.lines().count(), 1);

        let (code, _, err) = run_capture(&["peak", "se-ee", "--circuit-psd", "0"]);
        assert_eq!(code, 3, "{err}");
        assert!(err.starts_with("error[domain]:"));

        let (code, _, err) = run_capture(&[
            "curve",
            "se-ee",
            "--se",
            "1:2:3",
            "--config",
            "/nonexistent/run.toml",
        ]);
        assert_eq!(code, 4, "{err}");
        assert!(err.starts_with("error[io]:"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["plan", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("--throughput"));
        assert!(out.contains("--continuous-sites"));
    }

    #[test]
    fn flag_values() {
        let (code, out, _) = run_capture(&["curve", "se-ee", "--ideal=false", "--se", "0.5:1:2"]);
        assert_eq!(code, 0);
        assert!(out.contains("# meta kind = se_ee_practical"));
    }

    #[test]
    fn infeasible_plan_reports_infeasible() {
        let (code, _, err) = run_capture(&[
            "plan",
            "--scenario",
            "suburb",
            "--throughput",
            "1e12",
            "--budget",
            "1",
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("infeasible"), "{err}");
    }

    #[test]
    fn report_format_is_json() {
        let (code, out, _) =
            run_capture(&["peak", "se-ee", "--circuit-psd", "1", "--format", "report"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let x = v["result"]["spectral_efficiency_bps_per_hz"]
            .as_f64()
            .unwrap();
        assert!((x - std::f64::consts::LOG2_E).abs() < 1e-4);
    }
}
