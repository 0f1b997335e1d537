//! Run configuration: strict JSON schema with explicit defaults and a
//! canonical (sorted-key) echo.
//!
//! Boundary units follow the quoted experimental numbers: frequencies are
//! omega/2pi in MHz, times in ns. Conversion to internal angular units
//! happens in the scenario runners via [`crate::units::ang_mhz`].

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const SCENARIOS: [&str; 6] = [
    "transport",
    "landau",
    "vhe-binomial",
    "vhe-coherent",
    "haldane",
    "classical-quantum",
];

/// SSH adiabatic transport of the zero-energy state (d = 2).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TransportConfig {
    pub n: u32,
    pub g0_mhz: f64,
    /// Sweep frequency nu in MHz (cyclic); lambda_1 = |cos(2 pi nu t)|.
    pub nu_mhz: f64,
    pub horizon_ns: f64,
    pub sample_dt_ns: f64,
    pub step_ns: f64,
    pub snapshot_times_ns: Vec<f64>,
    pub open_system: bool,
    /// Dephasing rate per mode, used only when open_system.
    pub gamma_mhz: f64,
    pub seed: u64,
}

/// Pseudo-Landau-level spectroscopy (d = 3, resonant).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LandauConfig {
    pub n: u32,
    pub g0_mhz: f64,
    pub horizon_ns: f64,
    pub sample_dt_ns: f64,
    pub seed: u64,
}

/// Valley Hall effect with a binomial initial state (d = 3).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VheBinomialConfig {
    pub n: u32,
    pub g0_mhz: f64,
    /// Signed detuning of the potential delta (n_1 - n_2). The sign fixes
    /// which valley is visited first; the default reproduces the K-then-K'
    /// ordering consistent with the coherent-state runs.
    pub delta_mhz: f64,
    pub horizon_ns: f64,
    pub sample_dt_ns: f64,
    pub snapshot_times_ns: Vec<f64>,
    /// Window [lo, hi] ns scanned for the recurrence peak.
    pub revival_window_ns: [f64; 2],
    /// Reference time for the recurrence fidelity metric.
    pub revival_time_ns: f64,
    /// Prepare the initial state by simulating the SSH sweep instead of
    /// injecting the ideal binomial state.
    pub prepare_via_transport: bool,
    pub nu_mhz: f64,
    pub seed: u64,
}

/// Valley Hall effect with coherent initial states (d = 3).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VheCoherentConfig {
    /// Photon number |alpha|^2 in each populated mode.
    pub alpha_sq: f64,
    pub g0_mhz: f64,
    /// Potential delta (n_1 - n_3).
    pub delta_mhz: f64,
    pub horizon_ns: f64,
    pub sample_dt_ns: f64,
    pub snapshot_times_ns: Vec<f64>,
    /// Sector truncation; resolved from the default rule when omitted.
    pub n_max: u32,
    pub seed: u64,
}

/// Floquet-engineered Haldane model (d = 3).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HaldaneConfig {
    pub alpha_sq: f64,
    pub g0_mhz: f64,
    pub gd_mhz: f64,
    pub nud_mhz: f64,
    pub horizon_ns: f64,
    pub sample_dt_ns: f64,
    pub step_ns: f64,
    /// Also evolve under the effective Hamiltonian and record the overlap.
    pub compare_effective: bool,
    /// Sector used for the band-structure table.
    pub band_sector_n: u32,
    pub n_max: u32,
    pub open_system: bool,
    pub gamma_mhz: f64,
    pub eta_mhz: f64,
    /// Static detuning offsets of R1/R2 modelling control imperfections.
    pub delta1_mhz: f64,
    pub delta2_mhz: f64,
    pub seed: u64,
}

/// Classical-to-quantum crossover sweep (d = 3).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassicalQuantumConfig {
    pub alpha_sq: f64,
    pub g0_mhz: f64,
    pub delta_list_mhz: Vec<f64>,
    pub horizon_ns: f64,
    pub sample_dt_ns: f64,
    pub n_max: u32,
    pub seed: u64,
}

/// A fully-resolved scenario configuration.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "scenario")]
pub enum RunConfig {
    #[serde(rename = "transport")]
    Transport(TransportConfig),
    #[serde(rename = "landau")]
    Landau(LandauConfig),
    #[serde(rename = "vhe-binomial")]
    VheBinomial(VheBinomialConfig),
    #[serde(rename = "vhe-coherent")]
    VheCoherent(VheCoherentConfig),
    #[serde(rename = "haldane")]
    Haldane(HaldaneConfig),
    #[serde(rename = "classical-quantum")]
    ClassicalQuantum(ClassicalQuantumConfig),
}

impl RunConfig {
    pub fn scenario(&self) -> &'static str {
        match self {
            RunConfig::Transport(_) => "transport",
            RunConfig::Landau(_) => "landau",
            RunConfig::VheBinomial(_) => "vhe-binomial",
            RunConfig::VheCoherent(_) => "vhe-coherent",
            RunConfig::Haldane(_) => "haldane",
            RunConfig::ClassicalQuantum(_) => "classical-quantum",
        }
    }

    /// Experimental-parameter defaults for a scenario id.
    pub fn default_for(scenario: &str) -> Result<RunConfig> {
        parse_config(&format!("{{\"scenario\": \"{scenario}\"}}"))
    }

    /// Canonical echo: JSON with sorted keys and every default explicit.
    pub fn canonical_echo(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        // serde_json maps are BTree-backed: keys come out sorted
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn seed(&self) -> u64 {
        match self {
            RunConfig::Transport(c) => c.seed,
            RunConfig::Landau(c) => c.seed,
            RunConfig::VheBinomial(c) => c.seed,
            RunConfig::VheCoherent(c) => c.seed,
            RunConfig::Haldane(c) => c.seed,
            RunConfig::ClassicalQuantum(c) => c.seed,
        }
    }
}

/// Expected JSON type of a config key.
#[derive(Copy, Clone, Debug, PartialEq)]
enum Kind {
    Number,
    Integer,
    Bool,
    NumberArray,
    NumberPair,
    String,
}

fn schema(scenario: &str) -> Result<Vec<(&'static str, Kind)>> {
    let common = [("scenario", Kind::String), ("seed", Kind::Integer)];
    let mut keys: Vec<(&'static str, Kind)> = common.into();
    match scenario {
        "transport" => keys.extend([
            ("n", Kind::Integer),
            ("g0_mhz", Kind::Number),
            ("nu_mhz", Kind::Number),
            ("horizon_ns", Kind::Number),
            ("sample_dt_ns", Kind::Number),
            ("step_ns", Kind::Number),
            ("snapshot_times_ns", Kind::NumberArray),
            ("open_system", Kind::Bool),
            ("gamma_mhz", Kind::Number),
        ]),
        "landau" => keys.extend([
            ("n", Kind::Integer),
            ("g0_mhz", Kind::Number),
            ("horizon_ns", Kind::Number),
            ("sample_dt_ns", Kind::Number),
        ]),
        "vhe-binomial" => keys.extend([
            ("n", Kind::Integer),
            ("g0_mhz", Kind::Number),
            ("delta_mhz", Kind::Number),
            ("horizon_ns", Kind::Number),
            ("sample_dt_ns", Kind::Number),
            ("snapshot_times_ns", Kind::NumberArray),
            ("revival_window_ns", Kind::NumberPair),
            ("revival_time_ns", Kind::Number),
            ("prepare_via_transport", Kind::Bool),
            ("nu_mhz", Kind::Number),
        ]),
        "vhe-coherent" => keys.extend([
            ("alpha_sq", Kind::Number),
            ("g0_mhz", Kind::Number),
            ("delta_mhz", Kind::Number),
            ("horizon_ns", Kind::Number),
            ("sample_dt_ns", Kind::Number),
            ("snapshot_times_ns", Kind::NumberArray),
            ("n_max", Kind::Integer),
        ]),
        "haldane" => keys.extend([
            ("alpha_sq", Kind::Number),
            ("g0_mhz", Kind::Number),
            ("gd_mhz", Kind::Number),
            ("nud_mhz", Kind::Number),
            ("horizon_ns", Kind::Number),
            ("sample_dt_ns", Kind::Number),
            ("step_ns", Kind::Number),
            ("compare_effective", Kind::Bool),
            ("band_sector_n", Kind::Integer),
            ("n_max", Kind::Integer),
            ("open_system", Kind::Bool),
            ("gamma_mhz", Kind::Number),
            ("eta_mhz", Kind::Number),
            ("delta1_mhz", Kind::Number),
            ("delta2_mhz", Kind::Number),
        ]),
        "classical-quantum" => keys.extend([
            ("alpha_sq", Kind::Number),
            ("g0_mhz", Kind::Number),
            ("delta_list_mhz", Kind::NumberArray),
            ("horizon_ns", Kind::Number),
            ("sample_dt_ns", Kind::Number),
            ("n_max", Kind::Integer),
        ]),
        other => return Err(Error::UnknownScenario(other.to_string())),
    }
    Ok(keys)
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut row = vec![i + 1];
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            row.push(sub.min(prev[j + 1] + 1).min(row[j] + 1));
        }
        prev = row;
    }
    prev[b.len()]
}

fn kind_matches(kind: Kind, v: &Value) -> bool {
    match kind {
        Kind::Number => v.is_number(),
        Kind::Integer => v.is_u64(),
        Kind::Bool => v.is_boolean(),
        Kind::String => v.is_string(),
        Kind::NumberArray => v.is_array() && v.as_array().unwrap().iter().all(Value::is_number),
        Kind::NumberPair => {
            v.is_array()
                && v.as_array().unwrap().len() == 2
                && v.as_array().unwrap().iter().all(Value::is_number)
        }
    }
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Number => "number",
        Kind::Integer => "non-negative integer",
        Kind::Bool => "boolean",
        Kind::String => "string",
        Kind::NumberArray => "array of numbers",
        Kind::NumberPair => "array of two numbers",
    }
}

fn num(v: f64) -> Value {
    serde_json::json!(v)
}

fn put(map: &mut Map<String, Value>, k: &str, v: Value) {
    map.entry(k.to_string()).or_insert(v);
}

/// Fills all defaults (the experimental parameters) for the scenario, including derived
/// ones like the transport horizon (quarter sweep period) and coherent-state
/// truncations.
fn fill_defaults(scenario: &str, map: &mut Map<String, Value>) {
    put(map, "seed", serde_json::json!(0u64));
    match scenario {
        "transport" => {
            put(map, "n", serde_json::json!(5u32));
            put(map, "g0_mhz", num(9.0));
            put(map, "nu_mhz", num(0.416));
            put(map, "sample_dt_ns", num(2.0));
            put(map, "step_ns", num(0.25));
            put(map, "open_system", Value::Bool(false));
            put(map, "gamma_mhz", num(0.25));
            put(map, "snapshot_times_ns", serde_json::json!([300.0]));
            let nu = map["nu_mhz"].as_f64().unwrap_or(0.416).max(1e-9);
            let quarter = 1.0 / (4.0 * nu * 1e-3);
            put(map, "horizon_ns", num(quarter));
        }
        "landau" => {
            put(map, "n", serde_json::json!(5u32));
            put(map, "g0_mhz", num(9.0));
            put(map, "horizon_ns", num(2047.0));
            put(map, "sample_dt_ns", num(1.0));
        }
        "vhe-binomial" => {
            put(map, "n", serde_json::json!(5u32));
            put(map, "g0_mhz", num(9.0));
            put(map, "delta_mhz", num(-1.8));
            put(map, "horizon_ns", num(520.0));
            put(map, "sample_dt_ns", num(2.0));
            put(
                map,
                "snapshot_times_ns",
                serde_json::json!([0.0, 150.0, 250.0, 350.0, 480.0]),
            );
            put(map, "revival_window_ns", serde_json::json!([440.0, 520.0]));
            put(map, "revival_time_ns", num(480.0));
            put(map, "prepare_via_transport", Value::Bool(false));
            put(map, "nu_mhz", num(0.416));
        }
        "vhe-coherent" => {
            put(map, "alpha_sq", num(3.2));
            put(map, "g0_mhz", num(9.0));
            put(map, "delta_mhz", num(2.35));
            put(map, "horizon_ns", num(350.0));
            put(map, "sample_dt_ns", num(2.0));
            put(map, "snapshot_times_ns", serde_json::json!([100.0, 290.0]));
            let mean = 2.0 * map["alpha_sq"].as_f64().unwrap_or(3.2).abs();
            put(
                map,
                "n_max",
                serde_json::json!(crate::fock::default_n_max(mean)),
            );
        }
        "haldane" => {
            put(map, "alpha_sq", num(1.0));
            put(map, "g0_mhz", num(3.0));
            put(map, "gd_mhz", num(3.0));
            put(map, "nud_mhz", num(50.0));
            put(map, "horizon_ns", num(1900.0));
            put(map, "sample_dt_ns", num(4.0));
            put(map, "step_ns", num(0.5));
            put(map, "compare_effective", Value::Bool(true));
            put(map, "band_sector_n", serde_json::json!(10u32));
            put(map, "open_system", Value::Bool(false));
            put(map, "gamma_mhz", num(0.25));
            put(map, "eta_mhz", num(-0.5));
            put(map, "delta1_mhz", num(0.0));
            put(map, "delta2_mhz", num(0.0));
            let mean = 2.0 * map["alpha_sq"].as_f64().unwrap_or(1.0).abs();
            put(
                map,
                "n_max",
                serde_json::json!(crate::fock::default_n_max(mean)),
            );
        }
        "classical-quantum" => {
            put(map, "alpha_sq", num(4.0));
            put(map, "g0_mhz", num(9.0));
            put(
                map,
                "delta_list_mhz",
                serde_json::json!([0.5, 1.0, 2.0, 3.0, 4.0, 6.0]),
            );
            put(map, "horizon_ns", num(400.0));
            put(map, "sample_dt_ns", num(1.0));
            let mean = 2.0 * map["alpha_sq"].as_f64().unwrap_or(4.0).abs();
            put(
                map,
                "n_max",
                serde_json::json!(crate::fock::default_n_max(mean)),
            );
        }
        _ => {}
    }
}

/// Parses a config document: strict keys (with nearest-key suggestions),
/// per-key type checks, then full defaulting. The echo of the result
/// round-trips: parse(echo(parse(x))) == parse(x).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Config {
        path: "$".into(),
        message: format!("invalid JSON: {e}"),
    })?;
    let Value::Object(mut map) = v else {
        return Err(Error::Config {
            path: "$".into(),
            message: "config must be a JSON object".into(),
        });
    };
    let scenario = match map.get("scenario") {
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            return Err(Error::Config {
                path: "$.scenario".into(),
                message: format!("expected string, got {other}"),
            })
        }
        None => {
            return Err(Error::Config {
                path: "$".into(),
                message: format!(
                    "missing required field `scenario` (one of {})",
                    SCENARIOS.join("|")
                ),
            })
        }
    };
    let keys = schema(&scenario)?;
    for (k, v) in map.iter() {
        match keys.iter().find(|(name, _)| name == k) {
            None => {
                let nearest = keys
                    .iter()
                    .map(|(name, _)| (*name, levenshtein(k, name)))
                    .min_by_key(|&(_, d)| d)
                    .map(|(name, _)| name)
                    .unwrap_or("scenario");
                return Err(Error::Config {
                    path: format!("$.{k}"),
                    message: format!("unknown key (did you mean `{nearest}`?)"),
                });
            }
            Some(&(_, kind)) => {
                if !kind_matches(kind, v) {
                    return Err(Error::Config {
                        path: format!("$.{k}"),
                        message: format!("expected {}, got {v}", kind_name(kind)),
                    });
                }
            }
        }
    }
    fill_defaults(&scenario, &mut map);
    let cfg: RunConfig = serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config {
        path: format!("$ ({scenario})"),
        message: e.to_string(),
    })?;
    validate_config(&cfg)?;
    Ok(cfg)
}

fn validate_config(cfg: &RunConfig) -> Result<()> {
    let positive = |path: &str, v: f64| -> Result<()> {
        if v > 0.0 {
            Ok(())
        } else {
            Err(Error::Config {
                path: path.into(),
                message: format!("must be positive, got {v}"),
            })
        }
    };
    match cfg {
        RunConfig::Transport(c) => {
            positive("$.horizon_ns", c.horizon_ns)?;
            positive("$.sample_dt_ns", c.sample_dt_ns)?;
            positive("$.step_ns", c.step_ns)?;
            positive("$.nu_mhz", c.nu_mhz)?;
        }
        RunConfig::Landau(c) => {
            positive("$.horizon_ns", c.horizon_ns)?;
            positive("$.sample_dt_ns", c.sample_dt_ns)?;
        }
        RunConfig::VheBinomial(c) => {
            positive("$.horizon_ns", c.horizon_ns)?;
            positive("$.sample_dt_ns", c.sample_dt_ns)?;
            if c.revival_window_ns[1] <= c.revival_window_ns[0] {
                return Err(Error::Config {
                    path: "$.revival_window_ns".into(),
                    message: "window must be [lo, hi] with lo < hi".into(),
                });
            }
        }
        RunConfig::VheCoherent(c) => {
            positive("$.horizon_ns", c.horizon_ns)?;
            positive("$.sample_dt_ns", c.sample_dt_ns)?;
            positive("$.alpha_sq", c.alpha_sq + 1e-300)?;
        }
        RunConfig::Haldane(c) => {
            positive("$.horizon_ns", c.horizon_ns)?;
            positive("$.sample_dt_ns", c.sample_dt_ns)?;
            positive("$.step_ns", c.step_ns)?;
            positive("$.nud_mhz", c.nud_mhz)?;
        }
        RunConfig::ClassicalQuantum(c) => {
            positive("$.horizon_ns", c.horizon_ns)?;
            positive("$.sample_dt_ns", c.sample_dt_ns)?;
            if c.delta_list_mhz.is_empty() {
                return Err(Error::Config {
                    path: "$.delta_list_mhz".into(),
                    message: "sweep list must not be empty".into(),
                });
            }
        }
    }
    Ok(())
}
