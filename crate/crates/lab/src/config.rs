//! Line-oriented `key = value` run configuration.

use esl_core::fiber::{BoundaryCondition, FiberSpec};
use esl_core::potentials::PotentialModel;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Bands,
    Invert,
    Defect,
    Ssf,
    Toeplitz,
    Neumann,
    Volume,
    Verify,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Bands,
        Scenario::Invert,
        Scenario::Defect,
        Scenario::Ssf,
        Scenario::Toeplitz,
        Scenario::Neumann,
        Scenario::Volume,
        Scenario::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Bands => "bands",
            Scenario::Invert => "invert",
            Scenario::Defect => "defect",
            Scenario::Ssf => "ssf",
            Scenario::Toeplitz => "toeplitz",
            Scenario::Neumann => "neumann",
            Scenario::Volume => "volume",
            Scenario::Verify => "verify",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    RadialPower,
    Separable,
    CompactBump,
}

impl PotentialKind {
    fn name(self) -> &'static str {
        match self {
            PotentialKind::RadialPower => "radial_power",
            PotentialKind::Separable => "separable",
            PotentialKind::CompactBump => "compact_bump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialConfig {
    pub kind: PotentialKind,
    /// Amplitude C of the power-law kinds.
    pub c: f64,
    pub m: f64,
    pub radius: f64,
    /// Amplitude A of the bump.
    pub a: f64,
}

impl PotentialConfig {
    pub fn model(&self) -> PotentialModel {
        match self.kind {
            PotentialKind::RadialPower => PotentialModel::radial_power(self.c, self.m),
            PotentialKind::Separable => PotentialModel::separable_power(self.c, self.m),
            PotentialKind::CompactBump => PotentialModel::compact_bump(self.radius, self.a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Plus,
    Minus,
}

/// Explicit magnitudes, or a geometric sweep from `max` down to `min`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSweep {
    List(Vec<f64>),
    Decades {
        min: f64,
        max: f64,
        per_decade: usize,
    },
}

impl LambdaSweep {
    /// Magnitudes in the order they are run: descending for decade sweeps.
    pub fn values(&self) -> Vec<f64> {
        match self {
            LambdaSweep::List(v) => v.clone(),
            LambdaSweep::Decades {
                min,
                max,
                per_decade,
            } => {
                let decades = (max / min).log10();
                let steps = (decades * *per_decade as f64).round().max(0.0) as usize;
                if steps == 0 {
                    return vec![*max];
                }
                (0..=steps)
                    .map(|i| max * (min / max).powf(i as f64 / steps as f64))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub j: Vec<usize>,
    pub lambda: LambdaSweep,
    pub side: Side,
    pub operator: Operator,
    pub r: f64,
    pub node_budget: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub k_nodes: usize,
    /// Momentum spacing of the Toeplitz Nyström grid.
    pub k_step: f64,
    pub s_min: f64,
    pub s_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub output: String,
    pub fiber: FiberSpec,
    pub potential: PotentialConfig,
    pub sweep: SweepConfig,
}

pub const KEYS: [&str; 28] = [
    "scenario",
    "seed",
    "output",
    "fiber.b",
    "fiber.bc",
    "fiber.n_x",
    "fiber.pad",
    "fiber.richardson",
    "potential.kind",
    "potential.C",
    "potential.m",
    "potential.R",
    "potential.A",
    "sweep.j",
    "sweep.lambda",
    "sweep.lambda_min",
    "sweep.lambda_max",
    "sweep.per_decade",
    "sweep.side",
    "sweep.operator",
    "sweep.r",
    "sweep.node_budget",
    "sweep.k_min",
    "sweep.k_max",
    "sweep.k_nodes",
    "sweep.k_step",
    "sweep.s_min",
    "sweep.s_max",
];

pub const DEFAULT_OUTPUT: &str = "esl-out";
pub const DEFAULT_NODE_BUDGET: usize = 2000;
pub const DEFAULT_PER_DECADE: usize = 6;
pub const DEFAULT_MARGIN: f64 = 0.5;

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    end_line: usize,
}

impl Entries {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn parse<T: FromStr>(&self, key: &str, default: T) -> Result<(usize, T), ConfigError> {
        match self.get(key) {
            None => Ok((0, default)),
            Some((line, v)) => v
                .parse::<T>()
                .map(|x| (line, x))
                .map_err(|_| ConfigError::new(line, format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    fn check<T>(
        &self,
        key: &str,
        default: T,
        ok: impl Fn(T) -> bool,
        range: &str,
    ) -> Result<T, ConfigError>
    where
        T: Copy + fmt::Display + FromStr,
    {
        let (line, v) = self.parse(key, default)?;
        if !ok(v) {
            return Err(ConfigError::new(
                line,
                format!("`{key}` = {v} out of range ({range})"),
            ));
        }
        Ok(v)
    }

    fn line(&self, key: &str) -> usize {
        self.get(key).map(|(l, _)| l).unwrap_or(self.end_line)
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut end_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        end_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            ConfigError::new(line, format!("expected `key = value`, found `{content}`"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::new(line, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(ConfigError::new(line, format!("`{key}` has no value")));
        }
        if let Some((first, _)) = map.get(key) {
            return Err(ConfigError::new(
                line,
                format!("duplicate key `{key}` on lines {first} and {line}"),
            ));
        }
        map.insert(key.to_string(), (line, value.to_string()));
    }
    Ok(Entries {
        map,
        end_line: end_line.max(1),
    })
}

fn parse_list<T: FromStr>(key: &str, line: usize, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(|t| {
            t.trim().parse::<T>().map_err(|_| {
                ConfigError::new(line, format!("`{key}`: cannot parse `{}`", t.trim()))
            })
        })
        .collect()
}

/// `1`, `1,2,3` or the inclusive range `1..3`.
fn parse_bands(line: usize, v: &str) -> Result<Vec<usize>, ConfigError> {
    let js = if let Some((a, b)) = v.split_once("..") {
        let a: usize = a
            .trim()
            .parse()
            .map_err(|_| ConfigError::new(line, format!("`sweep.j`: cannot parse `{v}`")))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| ConfigError::new(line, format!("`sweep.j`: cannot parse `{v}`")))?;
        if a > b {
            return Err(ConfigError::new(
                line,
                format!("`sweep.j` range {a}..{b} is empty"),
            ));
        }
        (a..=b).collect()
    } else {
        parse_list::<usize>("sweep.j", line, v)?
    };
    if js.iter().any(|&j| j == 0 || j > 20) {
        return Err(ConfigError::new(
            line,
            "`sweep.j` entries must lie in 1..=20",
        ));
    }
    if js.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::new(
            line,
            "`sweep.j` entries must be strictly increasing",
        ));
    }
    Ok(js)
}

struct ScenarioDefaults {
    k_range: (f64, f64),
    k_nodes: usize,
    lambda_range: (f64, f64),
}

fn defaults_for(s: Scenario) -> ScenarioDefaults {
    let (k_range, k_nodes) = match s {
        Scenario::Defect => ((2.0, 3.5), 16),
        Scenario::Neumann => ((-2.0, 4.0), 64),
        _ => ((-6.0, 6.0), 64),
    };
    let lambda_range = match s {
        Scenario::Toeplitz => (1e-3, 1e-2),
        Scenario::Volume => (1e-5, 1e-1),
        _ => (1e-4, 1e-3),
    };
    ScenarioDefaults {
        k_range,
        k_nodes,
        lambda_range,
    }
}

/// Parses and validates a configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let e = tokenize(text)?;
    let scenario = match e.get("scenario") {
        None => {
            return Err(ConfigError::new(
                e.end_line,
                "missing required key `scenario`",
            ))
        }
        Some((line, v)) => *Scenario::ALL
            .iter()
            .find(|s| s.name() == v)
            .ok_or_else(|| ConfigError::new(line, format!("unknown scenario `{v}`")))?,
    };
    let d = defaults_for(scenario);
    let seed = e.parse("seed", 0u64)?.1;
    let output = e
        .get("output")
        .map(|(_, v)| v.to_string())
        .unwrap_or_else(|| DEFAULT_OUTPUT.to_string());

    let default_bc = if scenario == Scenario::Neumann {
        "neumann"
    } else {
        "dirichlet"
    };
    let (bc_line, bc_text) = e.get("fiber.bc").unwrap_or((0, default_bc));
    let bc = match bc_text {
        "dirichlet" => BoundaryCondition::Dirichlet,
        "neumann" => BoundaryCondition::Neumann,
        other => {
            return Err(ConfigError::new(
                bc_line,
                format!("`fiber.bc` must be dirichlet or neumann, got `{other}`"),
            ))
        }
    };
    if scenario == Scenario::Neumann && bc != BoundaryCondition::Neumann {
        return Err(ConfigError::new(
            bc_line,
            "scenario `neumann` requires `fiber.bc = neumann`",
        ));
    }
    let fiber = FiberSpec {
        b: e.check(
            "fiber.b",
            1.0,
            |b: f64| b > 0.0 && b <= 100.0,
            "0 < b <= 100",
        )?,
        bc,
        n_x: e.check(
            "fiber.n_x",
            FiberSpec::DEFAULT_N_X,
            |n: usize| (200..=20_000).contains(&n),
            "200..=20000",
        )?,
        pad: e.check(
            "fiber.pad",
            FiberSpec::DEFAULT_PAD,
            |p: f64| (8.0..=40.0).contains(&p),
            "8 <= pad <= 40",
        )?,
        richardson: e.check(
            "fiber.richardson",
            FiberSpec::DEFAULT_RICHARDSON,
            |r: usize| (1..=3).contains(&r),
            "1..=3",
        )?,
    };

    let (kind_line, kind_text) = e.get("potential.kind").unwrap_or((0, "radial_power"));
    let kind = [PotentialKind::RadialPower, PotentialKind::Separable, PotentialKind::CompactBump]
        .into_iter()
        .find(|k| k.name() == kind_text)
        .ok_or_else(|| {
            ConfigError::new(kind_line, format!("`potential.kind` must be radial_power, separable or compact_bump, got `{kind_text}`"))
        })?;
    let potential = PotentialConfig {
        kind,
        c: e.check(
            "potential.C",
            1.0,
            |c: f64| c > 0.0 && c.is_finite(),
            "C > 0",
        )?,
        m: e.check(
            "potential.m",
            4.0,
            |m: f64| m > 2.0 && m <= 64.0,
            "2 < m <= 64",
        )?,
        radius: e.check(
            "potential.R",
            3.0,
            |r: f64| r > 0.0 && r.is_finite(),
            "R > 0",
        )?,
        a: e.check(
            "potential.A",
            1.0,
            |a: f64| a > 0.0 && a.is_finite(),
            "A > 0",
        )?,
    };

    let j = match e.get("sweep.j") {
        None => vec![1],
        Some((line, v)) => parse_bands(line, v)?,
    };
    if matches!(
        scenario,
        Scenario::Ssf | Scenario::Toeplitz | Scenario::Neumann
    ) && j.len() != 1
    {
        return Err(ConfigError::new(
            e.line("sweep.j"),
            format!("scenario `{scenario}` takes a single band index"),
        ));
    }

    let range_keys = ["sweep.lambda_min", "sweep.lambda_max", "sweep.per_decade"];
    let lambda = match e.get("sweep.lambda") {
        Some((line, v)) => {
            if let Some(k) = range_keys.iter().find(|k| e.get(k).is_some()) {
                return Err(ConfigError::new(
                    e.line(k),
                    format!("`{k}` conflicts with the explicit list `sweep.lambda` on line {line}"),
                ));
            }
            let values = parse_list::<f64>("sweep.lambda", line, v)?;
            if values.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(ConfigError::new(
                    line,
                    "`sweep.lambda` entries are magnitudes and must be positive",
                ));
            }
            LambdaSweep::List(values)
        }
        None => {
            let min = e.check(
                "sweep.lambda_min",
                d.lambda_range.0,
                |l: f64| l > 0.0 && l.is_finite(),
                "lambda_min > 0",
            )?;
            let max = e.check(
                "sweep.lambda_max",
                d.lambda_range.1,
                |l: f64| l.is_finite(),
                "finite",
            )?;
            if !(max >= min) {
                return Err(ConfigError::new(
                    e.line("sweep.lambda_max"),
                    format!("`sweep.lambda_max` = {max} below lambda_min = {min}"),
                ));
            }
            let per_decade = e.check(
                "sweep.per_decade",
                DEFAULT_PER_DECADE,
                |n: usize| (1..=100).contains(&n),
                "1..=100",
            )?;
            LambdaSweep::Decades {
                min,
                max,
                per_decade,
            }
        }
    };

    let (side_line, side_text) = e.get("sweep.side").unwrap_or((0, "above"));
    let side = match side_text {
        "above" => Side::Above,
        "below" => Side::Below,
        other => {
            return Err(ConfigError::new(
                side_line,
                format!("`sweep.side` must be above or below, got `{other}`"),
            ))
        }
    };
    let (op_line, op_text) = e.get("sweep.operator").unwrap_or((0, "plus"));
    let operator = match op_text {
        "plus" => Operator::Plus,
        "minus" => Operator::Minus,
        other => {
            return Err(ConfigError::new(
                op_line,
                format!("`sweep.operator` must be plus or minus, got `{other}`"),
            ))
        }
    };

    let k_min = e.check("sweep.k_min", d.k_range.0, |k: f64| k.is_finite(), "finite")?;
    let k_max = e.check("sweep.k_max", d.k_range.1, |k: f64| k.is_finite(), "finite")?;
    if !(k_max > k_min) {
        return Err(ConfigError::new(
            e.line("sweep.k_max"),
            format!("`sweep.k_max` = {k_max} must exceed k_min = {k_min}"),
        ));
    }
    let s_min = e.check(
        "sweep.s_min",
        1e-6,
        |s: f64| s > 0.0 && s.is_finite(),
        "s_min > 0",
    )?;
    let s_max = e.check("sweep.s_max", 1e-2, |s: f64| s.is_finite(), "finite")?;
    if !(s_max > s_min) {
        return Err(ConfigError::new(
            e.line("sweep.s_max"),
            format!("`sweep.s_max` = {s_max} must exceed s_min = {s_min}"),
        ));
    }
    let sweep = SweepConfig {
        j,
        lambda,
        side,
        operator,
        r: e.check(
            "sweep.r",
            DEFAULT_MARGIN,
            |r: f64| r > 0.0 && r < 1.0,
            "0 < r < 1",
        )?,
        node_budget: e.check(
            "sweep.node_budget",
            DEFAULT_NODE_BUDGET,
            |n: usize| (16..=20_000).contains(&n),
            "16..=20000",
        )?,
        k_min,
        k_max,
        k_nodes: e.check(
            "sweep.k_nodes",
            d.k_nodes,
            |n: usize| (16..=4096).contains(&n),
            "16..=4096",
        )?,
        k_step: e.check(
            "sweep.k_step",
            0.25,
            |h: f64| h > 0.0 && h <= 1.0,
            "0 < k_step <= 1",
        )?,
        s_min,
        s_max,
    };
    Ok(RunConfig {
        scenario,
        seed,
        output,
        fiber,
        potential,
        sweep,
    })
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Every key with its effective value.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("scenario", self.scenario.to_string());
        put("seed", self.seed.to_string());
        put("output", self.output.clone());
        put("fiber.b", self.fiber.b.to_string());
        put("fiber.bc", self.fiber.bc.to_string());
        put("fiber.n_x", self.fiber.n_x.to_string());
        put("fiber.pad", self.fiber.pad.to_string());
        put("fiber.richardson", self.fiber.richardson.to_string());
        put("potential.kind", self.potential.kind.name().to_string());
        put("potential.C", self.potential.c.to_string());
        put("potential.m", self.potential.m.to_string());
        put("potential.R", self.potential.radius.to_string());
        put("potential.A", self.potential.a.to_string());
        let s = &self.sweep;
        put("sweep.j", join(&s.j));
        match &s.lambda {
            LambdaSweep::List(v) => put("sweep.lambda", join(v)),
            LambdaSweep::Decades {
                min,
                max,
                per_decade,
            } => {
                put("sweep.lambda_min", min.to_string());
                put("sweep.lambda_max", max.to_string());
                put("sweep.per_decade", per_decade.to_string());
            }
        }
        put(
            "sweep.side",
            if s.side == Side::Above {
                "above"
            } else {
                "below"
            }
            .to_string(),
        );
        put(
            "sweep.operator",
            if s.operator == Operator::Plus {
                "plus"
            } else {
                "minus"
            }
            .to_string(),
        );
        put("sweep.r", s.r.to_string());
        put("sweep.node_budget", s.node_budget.to_string());
        put("sweep.k_min", s.k_min.to_string());
        put("sweep.k_max", s.k_max.to_string());
        put("sweep.k_nodes", s.k_nodes.to_string());
        put("sweep.k_step", s.k_step.to_string());
        put("sweep.s_min", s.s_min.to_string());
        put("sweep.s_max", s.s_max.to_string());
        m
    }

    /// The echo as configuration text; parses back to the same config.
    pub fn to_text(&self) -> String {
        self.echo()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Signed offsets λ: negative below the threshold.
    pub fn signed_lambdas(&self) -> Vec<f64> {
        let sign = if self.sweep.side == Side::Below {
            -1.0
        } else {
            1.0
        };
        self.sweep
            .lambda
            .values()
            .into_iter()
            .map(|l| sign * l)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("scenario = ssf\n").unwrap();
        assert_eq!(c.scenario, Scenario::Ssf);
        assert_eq!(c.fiber.b, 1.0);
        assert_eq!(c.fiber.bc, BoundaryCondition::Dirichlet);
        assert_eq!(c.sweep.node_budget, 2000);
        assert_eq!(c.sweep.r, 0.5);
        assert_eq!(
            c.sweep.lambda,
            LambdaSweep::Decades {
                min: 1e-4,
                max: 1e-3,
                per_decade: 6
            }
        );
        assert_eq!(c.potential.kind, PotentialKind::RadialPower);
    }

    #[test]
    fn small_decay_rejected_with_line() {
        let err = parse_config("scenario = ssf\n# comment\npotential.m = 1.5\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("potential.m"));
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let err = parse_config("scenario = ssf\nfiber.b = 1\n\nfiber.b = 2\n").unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.message.contains("lines 2 and 4"), "{}", err.message);
    }

    #[test]
    fn unknown_key_and_missing_scenario() {
        let err = parse_config("scenario = bands\nfiber.q = 3\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unknown key"));
        let err = parse_config("fiber.b = 2 # field\n").unwrap_err();
        assert!(err.message.contains("scenario"));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn inline_comments_and_lists() {
        let c =
            parse_config("scenario = bands # tables\nsweep.j = 1..3\nsweep.lambda = 1e-2, 1e-3\n")
                .unwrap();
        assert_eq!(c.sweep.j, vec![1, 2, 3]);
        assert_eq!(c.sweep.lambda.values(), vec![1e-2, 1e-3]);
    }

    #[test]
    fn list_and_range_conflict() {
        let err = parse_config("scenario = ssf\nsweep.lambda = 1e-3\nsweep.lambda_min = 1e-4\n")
            .unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn decade_sweep_is_geometric_and_descending() {
        let v = LambdaSweep::Decades {
            min: 1e-4,
            max: 1e-3,
            per_decade: 6,
        }
        .values();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 1e-3);
        assert!((v[6] - 1e-4).abs() < 1e-18);
        let q: Vec<f64> = v.windows(2).map(|w| w[0] / w[1]).collect();
        assert!(q.iter().all(|r| (r - 10f64.powf(1.0 / 6.0)).abs() < 1e-12));
    }

    #[test]
    fn neumann_scenario_defaults_and_conflict() {
        let c = parse_config("scenario = neumann\n").unwrap();
        assert_eq!(c.fiber.bc, BoundaryCondition::Neumann);
        assert!(parse_config("scenario = neumann\nfiber.bc = dirichlet\n").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let text = "scenario = toeplitz\npotential.kind = compact_bump\npotential.R = 2.5\nsweep.side = below\n";
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
        assert_eq!(c.echo()["potential.R"], "2.5");
    }

    #[test]
    fn single_band_scenarios() {
        let err = parse_config("scenario = ssf\nsweep.j = 1,2\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
