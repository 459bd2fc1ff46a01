//! Line-oriented `key = value` configuration with dotted keys.
//!
//! Grammar: one `key = value` pair per line, `#` starts a comment, blank
//! lines ignored. Lists are comma-separated. Unknown keys are errors, so
//! typos cannot silently fall back to defaults. See the repository README
//! for the full key table.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Configuration failure; the CLI maps this to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelFamily {
    Constant,
    Harmonic,
    PowerLog,
    File,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolFamily {
    Linear,
    Bump,
    Tent,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

/// The eight experiment names understood by the runner.
pub const EXPERIMENT_NAMES: [&str; 8] = [
    "qs_kernel_decay",
    "khat_decay",
    "defect_decay",
    "hormander",
    "approx_convergence",
    "difference_growth",
    "square_function",
    "t1_bound",
];

/// Per-experiment overrides (`experiment.<name>.<key> = ...`).
#[derive(Debug, Clone, Default)]
pub struct ExperimentSettings {
    pub j_list: Option<Vec<i32>>,
    pub l_list: Option<Vec<u32>>,
    pub s_per_j: Option<usize>,
    pub j: Option<i32>,
    pub s_list: Option<Vec<f64>>,
    pub p: Option<f64>,
    pub count: Option<usize>,
    pub probes: Option<usize>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid_n: usize,
    pub half_width: f64,
    pub pad_factor: usize,
    pub kernel_family: KernelFamily,
    pub kernel_params: Vec<f64>,
    pub kernel_file: Option<PathBuf>,
    pub moment_order: u32,
    pub beta: f64,
    pub symbol_family: SymbolFamily,
    pub symbol_params: Vec<f64>,
    pub symbol_file: Option<PathBuf>,
    pub experiments: Vec<String>,
    pub settings: BTreeMap<String, ExperimentSettings>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub output_format: OutputFormat,
    /// Raw text the config was parsed from (hashed into the manifest).
    pub raw_text: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid_n: 256,
            half_width: 2.0,
            pad_factor: 2,
            kernel_family: KernelFamily::Harmonic,
            kernel_params: vec![2.0],
            kernel_file: None,
            moment_order: 1,
            beta: 2.0,
            symbol_family: SymbolFamily::Bump,
            symbol_params: vec![0.1, -0.15, 0.9, 1.0],
            symbol_file: None,
            experiments: EXPERIMENT_NAMES.iter().map(|s| s.to_string()).collect(),
            settings: BTreeMap::new(),
            seed: 42,
            output_dir: PathBuf::from("out"),
            output_format: OutputFormat::Both,
            raw_text: String::new(),
        }
    }
}

pub fn parse_config_file(path: &Path) -> CResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> CResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig { raw_text: text.to_string(), ..Default::default() };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "line {}: expected `key = value`, got {raw:?}",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value)
            .map_err(|ConfigError(m)| ConfigError(format!("line {}: {m}", lineno + 1)))?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn apply_key(cfg: &mut ExperimentConfig, key: &str, value: &str) -> CResult<()> {
    match key {
        "grid.n" => cfg.grid_n = parse_one(key, value)?,
        "grid.half_width" => cfg.half_width = parse_one(key, value)?,
        "grid.pad_factor" => cfg.pad_factor = parse_one(key, value)?,
        "kernel.family" => {
            cfg.kernel_family = match value {
                "constant" => KernelFamily::Constant,
                "harmonic" => KernelFamily::Harmonic,
                "power_log" => KernelFamily::PowerLog,
                "file" => KernelFamily::File,
                other => {
                    return Err(ConfigError(format!(
                        "kernel.family: unknown family {other:?} \
                         (expected constant | harmonic | power_log | file)"
                    )))
                }
            }
        }
        "kernel.params" => cfg.kernel_params = parse_list(key, value)?,
        "kernel.file" => cfg.kernel_file = Some(PathBuf::from(value)),
        "kernel.moment_order" => cfg.moment_order = parse_one(key, value)?,
        "beta" => cfg.beta = parse_one(key, value)?,
        "symbol.family" => {
            cfg.symbol_family = match value {
                "linear" => SymbolFamily::Linear,
                "bump" => SymbolFamily::Bump,
                "tent" => SymbolFamily::Tent,
                "file" => SymbolFamily::File,
                other => {
                    return Err(ConfigError(format!(
                        "symbol.family: unknown family {other:?} \
                         (expected linear | bump | tent | file)"
                    )))
                }
            }
        }
        "symbol.params" => cfg.symbol_params = parse_list(key, value)?,
        "symbol.file" => cfg.symbol_file = Some(PathBuf::from(value)),
        "experiments" => {
            cfg.experiments = value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
        }
        "seed" => cfg.seed = parse_one(key, value)?,
        "output.dir" => cfg.output_dir = PathBuf::from(value),
        "output.format" => {
            cfg.output_format = match value {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                "both" => OutputFormat::Both,
                other => {
                    return Err(ConfigError(format!(
                        "output.format: unknown format {other:?} (expected csv | json | both)"
                    )))
                }
            }
        }
        _ => {
            if let Some(rest) = key.strip_prefix("experiment.") {
                let Some((name, field)) = rest.split_once('.') else {
                    return Err(ConfigError(format!(
                        "{key}: expected experiment.<name>.<field>"
                    )));
                };
                if !EXPERIMENT_NAMES.contains(&name) {
                    return Err(ConfigError(format!(
                        "{key}: unknown experiment {name:?}"
                    )));
                }
                let slot = cfg.settings.entry(name.to_string()).or_default();
                match field {
                    "j_list" => slot.j_list = Some(parse_list(key, value)?),
                    "l_list" => slot.l_list = Some(parse_list(key, value)?),
                    "s_per_j" => slot.s_per_j = Some(parse_one(key, value)?),
                    "j" => slot.j = Some(parse_one(key, value)?),
                    "s_list" => slot.s_list = Some(parse_list(key, value)?),
                    "p" => slot.p = Some(parse_one(key, value)?),
                    "count" => slot.count = Some(parse_one(key, value)?),
                    "probes" => slot.probes = Some(parse_one(key, value)?),
                    "n" => slot.n = Some(parse_one(key, value)?),
                    other => {
                        return Err(ConfigError(format!(
                            "{key}: unknown experiment field {other:?}"
                        )))
                    }
                }
            } else {
                return Err(ConfigError(format!("unknown key {key:?}")));
            }
        }
    }
    Ok(())
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> CResult<T> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("{key}: cannot parse {value:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> CResult<Vec<T>> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| ConfigError(format!("{key}: cannot parse element {s:?}")))
        })
        .collect()
}

fn validate(cfg: &ExperimentConfig) -> CResult<()> {
    if !cfg.grid_n.is_power_of_two() || cfg.grid_n < 32 {
        return Err(ConfigError(format!(
            "grid.n: must be a power of two >= 32, got {}",
            cfg.grid_n
        )));
    }
    if !(cfg.half_width > 0.0 && cfg.half_width.is_finite()) {
        return Err(ConfigError(format!(
            "grid.half_width: must be positive, got {}",
            cfg.half_width
        )));
    }
    if cfg.pad_factor < 2 {
        return Err(ConfigError(format!(
            "grid.pad_factor: must be >= 2, got {}",
            cfg.pad_factor
        )));
    }
    if cfg.moment_order < 1 {
        return Err(ConfigError(
            "kernel.moment_order: vanishing-moment order k must be >= 1".into(),
        ));
    }
    if !(cfg.beta > 1.0) {
        return Err(ConfigError(format!(
            "beta: the admissible-range hypothesis requires beta > 1, got {}",
            cfg.beta
        )));
    }
    if cfg.experiments.is_empty() {
        return Err(ConfigError("experiments: at least one experiment required".into()));
    }
    for name in &cfg.experiments {
        if !EXPERIMENT_NAMES.contains(&name.as_str()) {
            return Err(ConfigError(format!(
                "experiments: unknown experiment {name:?} (known: {})",
                EXPERIMENT_NAMES.join(", ")
            )));
        }
    }
    if cfg.kernel_family == KernelFamily::File {
        match &cfg.kernel_file {
            None => return Err(ConfigError("kernel.file: required for kernel.family = file".into())),
            Some(p) if !p.exists() => {
                return Err(ConfigError(format!("kernel.file: {} does not exist", p.display())))
            }
            _ => {}
        }
    }
    if cfg.symbol_family == SymbolFamily::File {
        match &cfg.symbol_file {
            None => return Err(ConfigError("symbol.file: required for symbol.family = file".into())),
            Some(p) if !p.exists() => {
                return Err(ConfigError(format!("symbol.file: {} does not exist", p.display())))
            }
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_populates_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.grid_n, 256);
        assert_eq!(cfg.experiments.len(), 8);
        assert_eq!(cfg.beta, 2.0);
    }

    #[test]
    fn beta_at_one_is_rejected_with_the_hypothesis() {
        let err = parse_config("beta = 1.0").unwrap_err();
        assert!(err.0.contains("beta > 1"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = parse_config("kernel.famly = harmonic").unwrap_err();
        assert!(err.0.contains("kernel.famly"), "{err}");
        let err = parse_config("experiment.qs_kernel_decay.bogus = 1").unwrap_err();
        assert!(err.0.contains("bogus"), "{err}");
    }

    #[test]
    fn every_listed_experiment_parses() {
        for name in EXPERIMENT_NAMES {
            let cfg = parse_config(&format!("experiments = {name}")).unwrap();
            assert_eq!(cfg.experiments, vec![name.to_string()]);
        }
        assert!(parse_config("experiments = nonesuch").is_err());
    }

    #[test]
    fn kernel_file_must_exist_at_parse_time() {
        let err =
            parse_config("kernel.family = file\nkernel.file = /nonexistent/k.txt").unwrap_err();
        assert!(err.0.contains("does not exist"), "{err}");
    }

    #[test]
    fn per_experiment_overrides_parse() {
        let cfg = parse_config(
            "experiment.defect_decay.j = -2\nexperiment.defect_decay.l_list = 1, 2, 3",
        )
        .unwrap();
        let s = &cfg.settings["defect_decay"];
        assert_eq!(s.j, Some(-2));
        assert_eq!(s.l_list, Some(vec![1, 2, 3]));
    }
}
