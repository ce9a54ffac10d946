//! Flat `key = value` run configuration.
//!
//! Every key has a default, so the rendered form of a [`Config`] fully
//! determines a run. Lines starting with `#` and blank lines are ignored.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::circuit::KickExpansion;
use crate::dynamics::{MapParams, PhasePoint};
use crate::error::{Error, Result};
use crate::evolution::{Backend, InitialState};
use crate::noise::NoiseModel;

const DEFAULTS: &[(&str, &str, &str)] = &[
    ("a", "1.6", "well position"),
    ("backend", "circuit", "circuit | oracle"),
    ("compare_iterations", "100", "iterations for compare-oracle"),
    ("dump_gates", "false", "gatecount also writes the gate list"),
    ("epsilon", "0", "gate angle jitter strength"),
    ("exempt_work_qubit", "false", "no jitter on gates touching the work qubit"),
    ("expansion", "monomial", "kick compilation: monomial | merged"),
    ("fit_input", "", "wa.csv to fit; empty runs evolve first"),
    ("initial", "coherent", "coherent | step"),
    ("iterations", "180", "map iterations"),
    ("k", "0.04", "kick strength K"),
    ("n_qubits", "6", "qubits including the work qubit"),
    ("p0", "0", "coherent packet momentum"),
    ("phase_gates_only", "false", "jitter only diagonal gates"),
    ("poincare_iters", "2000", "iterates per orbit"),
    ("poincare_starts", "0:-1.0;0:1.0;0:0.3", "orbit starts as p:x, separated by ;"),
    ("realizations", "16", "noise realizations averaged"),
    ("seed", "1", "noise seed"),
    ("stride", "1", "sampling stride"),
    ("sweep_a", "1.6", "comma list"),
    ("sweep_epsilon", "0.005,0.01,0.02", "comma list"),
    ("sweep_iterations", "1500,1000,1000", "one value, or one per sweep_n_qubits entry"),
    ("sweep_k", "0.04", "comma list"),
    ("sweep_n_qubits", "6,7,8", "comma list"),
    ("workers", "0", "worker threads, 0 = all cores"),
    ("x0", "", "coherent packet position, empty = -a"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Self { values: DEFAULTS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect() }
    }
}

fn parse<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: Display,
{
    raw.trim().parse().map_err(|e| Error::Config(format!("{key} = {raw:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    let items: Vec<T> = raw.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("{key} must list at least one value")));
    }
    Ok(items)
}

impl Config {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> std::io::Result<Result<Self>> {
        Ok(Self::parse_str(&std::fs::read_to_string(path)?))
    }

    /// Override one key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(Error::Config(format!("unknown key {key:?}"))),
        }
    }

    /// `key=value` override as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> &str {
        &self.values[key]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Canonical text form, one sorted `key = value` per line.
    pub fn render(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Rendered form with each key's description, for `--show-config`.
    pub fn render_annotated(&self) -> String {
        DEFAULTS.iter().map(|(k, _, help)| format!("# {help}\n{k} = {}\n", self.values[*k])).collect()
    }

    /// SHA-256 of [`Config::render`], hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.render().as_bytes()))
    }

    pub fn value<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        parse(key, self.get(key))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        parse_list(key, self.get(key))
    }

    pub fn params(&self) -> Result<MapParams> {
        MapParams::new(self.value("k")?, self.value("a")?, self.value("n_qubits")?)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn backend(&self) -> Result<Backend> {
        match self.get("backend") {
            "circuit" => Ok(Backend::Circuit),
            "oracle" => Ok(Backend::Oracle),
            other => Err(Error::Config(format!("backend must be circuit or oracle, got {other:?}"))),
        }
    }

    pub fn expansion(&self) -> Result<KickExpansion> {
        match self.get("expansion") {
            "monomial" => Ok(KickExpansion::Monomial),
            "merged" => Ok(KickExpansion::Merged),
            other => Err(Error::Config(format!("expansion must be monomial or merged, got {other:?}"))),
        }
    }

    pub fn initial(&self, params: &MapParams) -> Result<InitialState> {
        match self.get("initial") {
            "coherent" => {
                let x0 = match self.get("x0").trim() {
                    "" => -params.a,
                    _ => self.value("x0")?,
                };
                Ok(InitialState::Coherent { x0, p0: self.value("p0")? })
            }
            "step" => Ok(InitialState::Step),
            other => Err(Error::Config(format!("initial must be coherent or step, got {other:?}"))),
        }
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        Ok(NoiseModel::new(self.value("epsilon")?, self.value("seed")?)
            .map_err(|e| Error::Config(e.to_string()))?
            .with_exempt_work_qubit(self.value("exempt_work_qubit")?)
            .with_phase_gates_only(self.value("phase_gates_only")?))
    }

    pub fn poincare_starts(&self) -> Result<Vec<PhasePoint>> {
        self.get("poincare_starts")
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|pair| {
                let (p, x) = pair
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("poincare start {pair:?} is not p:x")))?;
                Ok(PhasePoint { p: parse("poincare_starts", p)?, x: parse("poincare_starts", x)? })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        let cfg = Config::parse_str("# comment\n\nk = 0.3\n a=0.5 \nn_qubits = 10\n").unwrap();
        assert_eq!(cfg.get("k"), "0.3");
        assert_eq!(cfg.params().unwrap().n_qubits, 10);
        assert_eq!(Config::parse_str(&cfg.render()).unwrap(), cfg);
        assert_eq!(Config::parse_str(&cfg.render_annotated()).unwrap(), cfg);
    }

    #[test]
    fn digest_tracks_values() {
        let mut cfg = Config::default();
        let d0 = cfg.digest();
        assert_eq!(d0.len(), 64);
        cfg.apply_override("seed=7").unwrap();
        assert_ne!(cfg.digest(), d0);
        cfg.apply_override("seed=1").unwrap();
        assert_eq!(cfg.digest(), d0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Config::parse_str("nonsense = 1"), Err(Error::Config(_))));
        assert!(matches!(Config::parse_str("k 0.3"), Err(Error::Config(_))));
        let cfg = Config::parse_str("n_qubits = many").unwrap();
        assert!(matches!(cfg.params(), Err(Error::Config(_))));
        let cfg = Config::parse_str("backend = gpu").unwrap();
        assert!(cfg.backend().is_err());
        let cfg = Config::parse_str("sweep_epsilon = ,").unwrap();
        assert!(cfg.list::<f64>("sweep_epsilon").is_err());
    }

    #[test]
    fn typed_defaults() {
        let cfg = Config::default();
        let p = cfg.params().unwrap();
        assert_eq!(cfg.initial(&p).unwrap(), InitialState::Coherent { x0: -1.6, p0: 0.0 });
        assert_eq!(cfg.poincare_starts().unwrap().len(), 3);
        assert_eq!(cfg.list::<usize>("sweep_n_qubits").unwrap(), vec![6, 7, 8]);
        assert!(cfg.noise().unwrap().is_noiseless());
    }
}
