use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::graphgen::Strategy;
use crate::init::{Backend, InitConfig};
use crate::model::{solve_degree_for_snr, SbmParams};
use crate::pipeline::{BoostConfig, PipelineConfig};
use crate::seed;
use crate::verify::VerifyConfig;

/// Accepts `key = 3` as well as `key = [3, 4]`.
fn one_or_many<'de, D, T>(de: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Grid<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match Grid::deserialize(de)? {
        Grid::One(x) => vec![x],
        Grid::Many(v) => v,
    })
}

fn maybe_many<'de, D, T>(de: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    one_or_many(de).map(Some)
}

fn one() -> usize {
    1
}

/// Parameter grid of the block model. Exactly one of `d` and `c_over_k`
/// must be given; a `c_over_k` target is converted to the degree that
/// reaches `C = k · c_over_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelGrid {
    #[serde(deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub k: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub eps: Vec<f64>,
    #[serde(default, deserialize_with = "maybe_many", skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
    #[serde(default, deserialize_with = "maybe_many", skip_serializing_if = "Option::is_none")]
    pub c_over_k: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    /// `none`, `random_rewire`, `vote_poison` or `cluster_disguise`.
    pub strategy: String,
    #[serde(deserialize_with = "one_or_many")]
    pub eta: Vec<f64>,
    /// Edges per attacker under `vote_poison`; all eligible targets if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        Self { strategy: "none".into(), eta: vec![0.0], budget: None }
    }
}

impl AdversaryConfig {
    pub fn strategy(&self) -> Result<Option<Strategy>> {
        match self.strategy.as_str() {
            "none" => Ok(None),
            s => match s.parse::<Strategy>()? {
                Strategy::VotePoison { .. } => Ok(Some(Strategy::VotePoison { budget: self.budget })),
                other => Ok(Some(other)),
            },
        }
    }
}

/// Algorithm knobs exposed to experiment files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineKnobs {
    pub backend: Backend,
    /// Voting rounds per bisection; `⌈log₂ n⌉` if unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    pub chi: f64,
    /// Vote cap in units of `εd`; `0` disables capping.
    pub vote_cap: f64,
    pub trim_factor: f64,
    /// Rough labelings below `ε²d ≥ snr_floor · k²` are flagged.
    pub snr_floor: f64,
    pub split_prob: f64,
    pub max_attempts: usize,
    pub gamma: f64,
    pub kmeans_restarts: usize,
    pub refine_rounds: usize,
}

impl Default for PipelineKnobs {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            backend: p.init.backend,
            rounds: p.rounds,
            chi: p.chi,
            vote_cap: p.boost.vote_cap.unwrap_or(0.0),
            trim_factor: p.boost.trim_factor,
            snr_floor: p.init.snr_floor,
            split_prob: p.split_prob,
            max_attempts: p.max_attempts,
            gamma: p.gamma,
            kmeans_restarts: p.init.kmeans_restarts,
            refine_rounds: p.init.refine_rounds,
        }
    }
}

impl PipelineKnobs {
    pub fn to_config(&self) -> PipelineConfig {
        let base = PipelineConfig::default();
        PipelineConfig {
            split_prob: self.split_prob,
            max_attempts: self.max_attempts,
            gamma: self.gamma,
            chi: self.chi,
            rounds: self.rounds,
            init: InitConfig {
                backend: self.backend,
                kmeans_restarts: self.kmeans_restarts,
                trim_factor: self.trim_factor,
                snr_floor: self.snr_floor,
                refine_rounds: self.refine_rounds,
                ..base.init
            },
            verify: VerifyConfig { degree_factor: self.trim_factor, ..base.verify },
            boost: BoostConfig {
                trim_factor: self.trim_factor,
                vote_cap: (self.vote_cap > 0.0).then_some(self.vote_cap),
            },
        }
    }
}

/// A sweep over model and adversary grids, each point run `trials` times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub model: ModelGrid,
    #[serde(default)]
    pub adversary: AdversaryConfig,
    #[serde(default)]
    pub pipeline: PipelineKnobs,
}

/// One point of the expanded grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub params: SbmParams,
    /// The requested `C/k`, when the degree was solved for.
    pub c_over_k: Option<f64>,
    pub strategy: Option<Strategy>,
    /// Stable identity of the point, independent of its grid position.
    pub key: String,
}

impl GridPoint {
    pub fn seed(&self, master: u64) -> u64 {
        seed::derive(master, seed::tag(&self.key))
    }
    pub fn trial_seed(&self, master: u64, trial: usize) -> u64 {
        seed::derive(self.seed(master), trial as u64)
    }
}

fn invalid(path: &str, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

impl ExperimentConfig {
    /// Minimal configuration for a single point; everything else default.
    pub fn single(n: usize, k: usize, d: f64, eps: f64, trials: usize) -> Self {
        Self {
            seed: 0,
            trials,
            out: None,
            model: ModelGrid { n: vec![n], k: vec![k], eps: vec![eps], d: Some(vec![d]), c_over_k: None },
            adversary: AdversaryConfig::default(),
            pipeline: PipelineKnobs::default(),
        }
    }

    pub fn from_toml_str(raw: &str) -> Result<Self> {
        let de = toml::de::Deserializer::parse(raw).map_err(|e| invalid("", e.message().to_string()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(if path == "." { "" } else { &path }, e.into_inner().message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The resolved configuration, defaults included, as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        let m = &self.model;
        for (name, empty) in [("model.n", m.n.is_empty()), ("model.k", m.k.is_empty()), ("model.eps", m.eps.is_empty())] {
            if empty {
                return Err(invalid(name, "grid must not be empty"));
            }
        }
        for &k in &m.k {
            if k < 2 || !k.is_power_of_two() {
                return Err(invalid("model.k", format!("k = {k} violates the invariant that k is a power of two, at least 2")));
            }
        }
        match (&m.d, &m.c_over_k) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(invalid("model", "give exactly one of `d` and `c_over_k`"));
            }
            (Some(d), None) if d.is_empty() => return Err(invalid("model.d", "grid must not be empty")),
            (None, Some(c)) if c.is_empty() => return Err(invalid("model.c_over_k", "grid must not be empty")),
            _ => {}
        }
        if self.adversary.eta.is_empty() {
            return Err(invalid("adversary.eta", "grid must not be empty"));
        }
        let strategy = self.adversary.strategy().map_err(|e| invalid("adversary.strategy", e.to_string()))?;
        if strategy.is_none() && self.adversary.eta.iter().any(|&e| e > 0.0) {
            return Err(invalid("adversary.strategy", "eta > 0 needs a corruption strategy"));
        }
        let p = &self.pipeline;
        if !(p.split_prob > 0.0 && p.split_prob < 1.0) {
            return Err(invalid("pipeline.split_prob", "must lie in (0, 1)"));
        }
        if !(p.chi > 0.0) || !(p.trim_factor > 0.0) || p.vote_cap < 0.0 {
            return Err(invalid("pipeline", "chi and trim_factor must be positive, vote_cap nonnegative"));
        }
        if p.max_attempts == 0 || p.kmeans_restarts == 0 {
            return Err(invalid("pipeline", "max_attempts and kmeans_restarts must be at least 1"));
        }
        if p.rounds == Some(0) {
            return Err(invalid("pipeline.rounds", "must be at least 1"));
        }
        self.grid().map(|_| ())
    }

    /// The cartesian product `n × k × eps × (d | c_over_k) × eta`, in that
    /// nesting order.
    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        let strategy = self.adversary.strategy().map_err(|e| invalid("adversary.strategy", e.to_string()))?;
        let m = &self.model;
        let (degrees, by_snr) = match (&m.d, &m.c_over_k) {
            (Some(d), _) => (d.clone(), false),
            (None, Some(c)) => (c.clone(), true),
            (None, None) => return Err(invalid("model", "give exactly one of `d` and `c_over_k`")),
        };
        let mut points = Vec::new();
        for &n in &m.n {
            for &k in &m.k {
                for &eps in &m.eps {
                    for &x in &degrees {
                        for &eta in &self.adversary.eta {
                            let (d, c_over_k, key) = if by_snr {
                                let d = solve_degree_for_snr(n, k, eps, x * k as f64)
                                    .map_err(|e| invalid("model.c_over_k", e.to_string()))?;
                                (d, Some(x), format!("n={n};k={k};eps={eps};c_over_k={x};eta={eta}"))
                            } else {
                                (x, None, format!("n={n};k={k};eps={eps};d={x};eta={eta}"))
                            };
                            let params = SbmParams::new(n, k, d, eps, eta).map_err(|e| invalid("model", e.to_string()))?;
                            points.push(GridPoint {
                                index: points.len(),
                                params,
                                c_over_k,
                                strategy: if eta > 0.0 { strategy } else { None },
                                key,
                            });
                        }
                    }
                }
            }
        }
        Ok(points)
    }

    pub fn planned_runs(&self) -> Result<usize> {
        Ok(self.grid()?.len() * self.trials)
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { path: path.display().to_string(), msg: e.to_string() })?;
    ExperimentConfig::from_toml_str(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[model]\nn = 400\nk = 2\nd = 40.0\neps = 1.0\n";

    #[test]
    fn minimal_gets_defaults() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.trials, 1);
        assert_eq!(cfg.pipeline, PipelineKnobs::default());
        assert_eq!(cfg.planned_runs().unwrap(), 1);
        let echoed = ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(echoed, cfg);
    }

    #[test]
    fn rejects_non_power_of_two() {
        let err = ExperimentConfig::from_toml_str(&MINIMAL.replace("k = 2", "k = 6")).unwrap_err();
        match err {
            Error::Config { path, msg } => {
                assert_eq!(path, "model.k");
                assert!(msg.contains("power of two"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_key_names_its_path() {
        let err = ExperimentConfig::from_toml_str(&format!("{MINIMAL}[pipeline]\nbogus = 1\n")).unwrap_err();
        match err {
            Error::Config { path, msg } => {
                assert!(path.starts_with("pipeline"), "{path}");
                assert!(msg.contains("bogus"), "{msg}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn grid_arithmetic() {
        let raw = "trials = 5\n[model]\nn = [400, 800, 1200]\nk = 2\nd = [40.0, 60.0]\neps = 1.0\n";
        assert_eq!(ExperimentConfig::from_toml_str(raw).unwrap().planned_runs().unwrap(), 30);
    }

    #[test]
    fn snr_targets_resolve_degree() {
        let raw = "[model]\nn = 4000\nk = 2\nc_over_k = 6.0\neps = 1.0\n";
        let g = ExperimentConfig::from_toml_str(raw).unwrap().grid().unwrap();
        let dq = crate::model::derive(&g[0].params).unwrap();
        assert!((dq.c - 12.0).abs() < 1e-9);
    }
}
