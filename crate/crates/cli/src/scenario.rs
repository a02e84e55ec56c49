//! Scenario files: UTF-8 text, one `key = value` per line, `#` comments.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use born_lab_core::{Symbol, SystemSpec, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    EverettFrequency,
    MmiStochastic,
    MmiUnitary,
    EnvarianceCheck,
    WallaceChain,
}

impl Model {
    pub fn parse(s: &str) -> Option<Model> {
        match s {
            "everett-frequency" => Some(Model::EverettFrequency),
            "mmi-stochastic" => Some(Model::MmiStochastic),
            "mmi-unitary" => Some(Model::MmiUnitary),
            "envariance-check" => Some(Model::EnvarianceCheck),
            "wallace-chain" => Some(Model::WallaceChain),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::EverettFrequency => "everett-frequency",
            Model::MmiStochastic => "mmi-stochastic",
            Model::MmiUnitary => "mmi-unitary",
            Model::EnvarianceCheck => "envariance-check",
            Model::WallaceChain => "wallace-chain",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "exact" => Some(Mode::Exact),
            "monte-carlo" | "mc" => Some(Mode::MonteCarlo),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte-carlo",
        }
    }
}

/// A parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub weights: Vec<Weight>,
    pub outcomes: Vec<Symbol>,
    pub minds: Option<u64>,
    pub repetitions: Option<u64>,
    pub levels: Option<u32>,
    pub seed: u64,
    pub mode: Mode,
    pub epsilon: Option<f64>,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

impl Scenario {
    pub fn spec(&self) -> Result<SystemSpec> {
        let pairs = self
            .outcomes
            .iter()
            .cloned()
            .zip(self.weights.iter().cloned())
            .collect();
        SystemSpec::new(pairs).map_err(|e| anyhow!("{e}"))
    }

    pub fn minds(&self) -> Result<u64> {
        self.minds
            .ok_or_else(|| anyhow!("model `{}` requires `minds`", self.model.name()))
    }

    pub fn repetitions(&self) -> Result<u64> {
        self.repetitions
            .ok_or_else(|| anyhow!("model `{}` requires `repetitions`", self.model.name()))
    }
}

struct RawLine {
    number: usize,
    key: String,
    value: String,
}

/// Parses a scenario file; errors carry the offending line number.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario file {}", path.display()))?;
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or_else(|| anyhow!("line {number}: expected `key = value`"))?;
        lines.push(RawLine {
            number,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }

    let mut name = None;
    let mut model = None;
    let mut weights: Option<(usize, Vec<Weight>)> = None;
    let mut outcomes: Option<Vec<Symbol>> = None;
    let mut minds = None;
    let mut repetitions = None;
    let mut levels = None;
    let mut seed = None;
    let mut mode = Mode::MonteCarlo;
    let mut epsilon = None;
    let mut csv_path = None;
    let mut json_path = None;

    for line in &lines {
        let n = line.number;
        let v = line.value.as_str();
        match line.key.as_str() {
            "name" => name = Some(v.to_string()),
            "model" => {
                model = Some(
                    Model::parse(v).ok_or_else(|| anyhow!("line {n}: unknown model `{v}`"))?,
                )
            }
            "weights" => {
                let parsed: Result<Vec<Weight>> = v
                    .split(',')
                    .map(|w| Weight::parse(w).map_err(|e| anyhow!("line {n}: {e}")))
                    .collect();
                weights = Some((n, parsed?));
            }
            "outcomes" => {
                outcomes = Some(v.split(',').map(|s| Symbol::new(s.trim())).collect());
            }
            "minds" => {
                minds = Some(
                    v.parse::<u64>()
                        .map_err(|_| anyhow!("line {n}: `minds` must be a non-negative integer"))?,
                )
            }
            "repetitions" => {
                repetitions =
                    Some(v.parse::<u64>().map_err(|_| {
                        anyhow!("line {n}: `repetitions` must be a non-negative integer")
                    })?)
            }
            "levels" => {
                levels = Some(
                    v.parse::<u32>()
                        .map_err(|_| anyhow!("line {n}: `levels` must be a positive integer"))?,
                )
            }
            "seed" => {
                seed = Some(
                    v.parse::<u64>()
                        .map_err(|_| anyhow!("line {n}: `seed` must be a 64-bit unsigned integer"))?,
                )
            }
            "mode" => {
                mode = Mode::parse(v)
                    .ok_or_else(|| anyhow!("line {n}: mode must be `exact` or `monte-carlo`"))?
            }
            "epsilon" => {
                epsilon = Some(
                    v.parse::<f64>()
                        .map_err(|_| anyhow!("line {n}: `epsilon` must be a number"))?,
                )
            }
            "csv" => csv_path = Some(PathBuf::from(v)),
            "json" => json_path = Some(PathBuf::from(v)),
            other => bail!("line {n}: unknown key `{other}`"),
        }
    }

    let name = name.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into())
    });
    let model = model.ok_or_else(|| anyhow!("missing required key `model`"))?;
    let (weights_line, weights) =
        weights.ok_or_else(|| anyhow!("missing required key `weights`"))?;
    let seed = seed.ok_or_else(|| anyhow!("missing required key `seed`"))?;

    let outcomes = match outcomes {
        Some(list) => {
            if list.len() != weights.len() {
                bail!("line {weights_line}: outcomes and weights differ in length");
            }
            list
        }
        None => default_outcomes(weights.len()),
    };

    let scenario = Scenario {
        csv_path: csv_path.unwrap_or_else(|| PathBuf::from(format!("{name}_tallies.csv"))),
        json_path: json_path.unwrap_or_else(|| PathBuf::from(format!("{name}_summary.json"))),
        name,
        model,
        weights,
        outcomes,
        minds,
        repetitions,
        levels,
        seed,
        mode,
        epsilon,
    };
    validate(&scenario)?;
    Ok(scenario)
}

fn default_outcomes(k: usize) -> Vec<Symbol> {
    if k == 2 {
        vec![Symbol::new("↑"), Symbol::new("↓")]
    } else {
        (1..=k).map(|i| Symbol::new(format!("o{i}"))).collect()
    }
}

fn validate(s: &Scenario) -> Result<()> {
    // surfaces "weights must sum to 1" and friends before any work runs
    s.spec()?;
    match s.model {
        Model::EverettFrequency | Model::MmiStochastic | Model::MmiUnitary => {
            if s.minds()? == 0 {
                bail!("`minds` must be at least 1");
            }
            if s.mode == Mode::MonteCarlo && s.repetitions()? == 0 {
                bail!("`repetitions` must be at least 1");
            }
        }
        Model::EnvarianceCheck | Model::WallaceChain => {}
    }
    if let Some(eps) = s.epsilon {
        if eps.is_nan() || eps <= 0.0 {
            bail!("epsilon must be positive");
        }
    }
    if s.model == Model::WallaceChain && s.weights.len() != 2 {
        bail!("wallace-chain needs exactly two outcomes");
    }
    Ok(())
}
