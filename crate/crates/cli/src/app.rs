//! Command-line surface: argument parsing, overrides and exit codes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use swleak::netsim::NetworkConfig;

use crate::config::{ExperimentConfig, PmfSpec, Task};
use crate::error::CliError;
use crate::tasks::{cipher_task, Context};
use crate::validate::{has_errors, validate};
use crate::{run, EXIT_INVALID, EXIT_OK, EXIT_RUNTIME};

#[derive(Debug, Parser)]
#[command(
    name = "swleak",
    version,
    about = "Leakage experiments for syndrome-coded correlated sources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Use DSBS(p) instead of a config file.
    #[arg(long, global = true, conflicts_with = "config")]
    pub dsbs: Option<f64>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; rayon's default when absent.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// `K:m_vx,m_cx,m_cy,m_vy`, replacing the computed layout.
    #[arg(long, global = true)]
    pub layout: Option<String>,
    /// Block lengths, replacing the config list.
    #[arg(long = "k", global = true, value_delimiter = ',')]
    pub k: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every task listed in the config.
    Run(Common),
    /// Check a config and print diagnostics.
    Validate(Common),
    Entropy(Common),
    Decompose(Common),
    Leakage(Common),
    Cipher(CipherArgs),
    Region(Common),
    Netsim(NetsimArgs),
}

#[derive(Debug, Args)]
pub struct CipherArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub case: Option<u8>,
    /// `long`, `composite` or `independent`.
    #[arg(long)]
    pub variant: Option<String>,
    /// Security target, as `h=<bits>` or a bare number.
    #[arg(long)]
    pub target: Option<String>,
    /// Fresh key bits for every masked component.
    #[arg(long)]
    pub independent_keys: bool,
}

#[derive(Debug, Args)]
pub struct NetsimArgs {
    #[command(flatten)]
    pub common: Common,
    /// Network config document, replacing the config's netsim settings.
    #[arg(long)]
    pub network: Option<PathBuf>,
}

fn parse_target(text: &str) -> Result<f64, CliError> {
    let v = text.strip_prefix("h=").unwrap_or(text);
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("--target expects h=<bits>, got {text:?}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Loads the config and applies the shared overrides. Returns it with the
/// directory relative pmf paths resolve against.
fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let (mut cfg, base) = match (&common.config, common.dsbs) {
        (Some(path), _) => (
            ExperimentConfig::from_json(&read(path)?)?,
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        (None, Some(p)) => (
            ExperimentConfig::from_json(&format!(r#"{{"pmf": {{"dsbs": {p}}}}}"#))?,
            PathBuf::new(),
        ),
        (None, None) => return Err(CliError::Config("either --config or --dsbs is required".into())),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if common.layout.is_some() {
        cfg.layout = common.layout.clone();
    }
    if !common.k.is_empty() {
        cfg.k = common.k.clone();
    }
    Ok((cfg, base))
}

fn apply_cipher(cfg: &mut ExperimentConfig, a: &CipherArgs) -> Result<(), CliError> {
    let s = &mut cfg.cipher;
    if let Some(c) = a.case {
        s.case = c;
    }
    if let Some(v) = &a.variant {
        s.variant = v.clone();
    }
    if let Some(t) = &a.target {
        s.target = parse_target(t)?;
    }
    s.independent_keys |= a.independent_keys;
    if let Some(l) = &a.common.layout {
        let layout: swleak::swcodec::PortionLayout = l.parse()?;
        s.layout = Some(l.clone());
        s.k = layout.k;
    } else if let [k] = a.common.k[..] {
        s.k = k;
    }
    Ok(())
}

fn apply_network(cfg: &mut ExperimentConfig, path: &Path, seed_flag: Option<u64>) -> Result<(), CliError> {
    let net = NetworkConfig::from_json(&read(path)?)?;
    let n = &mut cfg.netsim;
    n.pmf = Some(PmfSpec::Inline {
        alphabet_sizes: net.sources.pmf.alphabet_sizes().to_vec(),
        probs: net.sources.pmf.probs().to_vec(),
    });
    n.k = net.sources.k;
    n.allocations = net.sources.allocations;
    n.links = net.links;
    n.adversaries = net.adversaries;
    n.combination_masks = net.combination_masks;
    if seed_flag.is_none() {
        cfg.seed = net.sources.seed;
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) | CliError::Json(_) => EXIT_INVALID,
                _ => EXIT_RUNTIME,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let (common, single) = match &cli.command {
        Command::Run(c) | Command::Validate(c) => (c, None),
        Command::Entropy(c) => (c, Some(Task::Entropy)),
        Command::Decompose(c) => (c, Some(Task::Decompose)),
        Command::Leakage(c) => (c, Some(Task::Leakage)),
        Command::Region(c) => (c, Some(Task::Region)),
        Command::Cipher(a) => (&a.common, Some(Task::Cipher)),
        Command::Netsim(a) => (&a.common, Some(Task::Netsim)),
    };
    let (mut cfg, base) = load(common)?;
    match &cli.command {
        Command::Cipher(a) => apply_cipher(&mut cfg, a)?,
        Command::Netsim(NetsimArgs { network: Some(p), .. }) => apply_network(&mut cfg, p, common.seed)?,
        _ => {}
    }
    if let Some(t) = single {
        cfg.tasks = vec![t];
    }

    let diags = validate(&cfg, &base);
    for d in &diags {
        eprintln!("{d}");
    }
    if has_errors(&diags) {
        return Ok(EXIT_INVALID);
    }
    if matches!(cli.command, Command::Validate(_)) {
        println!("ok: {} diagnostics, config hash {}", diags.len(), cfg.hash());
        return Ok(EXIT_OK);
    }

    let ctx = Context::new(cfg, base)?;
    // `cipher --out report.json` writes the single JSON report there.
    if let Command::Cipher(_) = cli.command {
        if common.out.extension().is_some_and(|e| e == "json") {
            let (reports, _) = cipher_task(&ctx)?;
            let json = reports
                .iter()
                .find(|r| r.name.ends_with(".json"))
                .expect("cipher emits json");
            if let Some(dir) = common.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            std::fs::write(&common.out, &json.bytes).map_err(|e| CliError::io(&common.out, e))?;
            println!("wrote {}", common.out.display());
            return Ok(EXIT_OK);
        }
    }

    let tasks = ctx.cfg.tasks.clone();
    let manifest = run(&ctx, &tasks, &common.out, common.jobs)?;
    for t in &manifest.tasks {
        match &t.error {
            None => println!("{}: ok ({})", t.task.name(), t.files.join(", ")),
            Some(e) => println!("{}: failed: {e}", t.task.name()),
        }
    }
    Ok(if manifest.all_ok() { EXIT_OK } else { EXIT_RUNTIME })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn target_syntax() {
        assert_eq!(parse_target("h=0.25").unwrap(), 0.25);
        assert_eq!(parse_target("1").unwrap(), 1.0);
        assert!(parse_target("h=").is_err());
    }
}
