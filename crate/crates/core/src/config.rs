//! Scenario configuration.
//!
//! A JSON object whose keys all have defaults matching the reference setup
//! (80 servers, 150 base stations, 400 users, 100 videos, 80/180 Mbit per
//! time slot of total backhaul/radio capacity). Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopularityMode {
    /// Local popularity from the social model.
    Social,
    /// Seeded per-SBS permutation of Zipf weights.
    Zipf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestMode {
    /// Requesting user uniform, video drawn from the user's SBS popularity row.
    PopularityWeighted,
    /// Requesting user and video both uniform.
    StrictUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    /// Every server reaches every base station.
    Complete,
    /// Each server–base-station link exists independently with this probability.
    Random(f64),
}

/// How the subscripts of the social-interaction and interest factors bind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubscriptReading {
    /// Both factors normalized over the viewer's own history.
    Viewer,
    /// Literal subscripts: the social denominator sums views of the viewer's
    /// shares by its friends, and the interest numerator counts the sharer's
    /// views of the category.
    Literal,
}

/// Parameters of the synthetic social world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SocialConfig {
    /// Erdős–Rényi edge probability of the friendship graph.
    pub friendship_probability: f64,
    /// Zipf exponent of each user's category affinity.
    pub category_exponent: f64,
    /// Users share uniformly between 0 and this many videos.
    pub max_shares: u32,
    /// Views outside the friend graph, uniform between 0 and this.
    pub max_extra_views: u32,
}

impl Default for SocialConfig {
    fn default() -> Self {
        SocialConfig { friendship_probability: 0.05, category_exponent: 1.0, max_shares: 20, max_extra_views: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// K, number of service-provider servers.
    pub servers: usize,
    /// M, number of small base stations.
    pub base_stations: usize,
    /// N, number of user equipments.
    pub users: usize,
    /// V, catalog size.
    pub videos: usize,
    /// G, number of video categories.
    pub categories: usize,
    /// B, total backhaul capacity in Mbit per time slot.
    pub backhaul_total: f64,
    /// R, total radio capacity in Mbit per time slot.
    pub radio_total: f64,
    /// Uniform video size in Mbit.
    pub video_size: f64,
    /// Weight of social interaction against user interest.
    pub gamma: f64,
    pub zipf_exponent: f64,
    /// Storage ratios β; each SBS stores round(β·V) videos.
    pub beta_list: Vec<f64>,
    pub request_sweep: Vec<usize>,
    pub seeds: Vec<u64>,
    pub popularity_mode: PopularityMode,
    pub request_mode: RequestMode,
    pub connectivity: Connectivity,
    /// Upper bound on how many SBSs a video may be cached at.
    pub video_quota_cap: Option<usize>,
    pub subscript_reading: SubscriptReading,
    pub social: SocialConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            servers: 80,
            base_stations: 150,
            users: 400,
            videos: 100,
            categories: 6,
            backhaul_total: 80.0,
            radio_total: 180.0,
            video_size: 1.0,
            gamma: 0.5,
            zipf_exponent: 1.0,
            beta_list: vec![0.25, 0.75, 1.0],
            request_sweep: vec![50, 100, 200, 400, 700, 1000, 1500, 2000],
            seeds: (1..=10).collect(),
            popularity_mode: PopularityMode::Zipf,
            request_mode: RequestMode::PopularityWeighted,
            connectivity: Connectivity::Complete,
            video_quota_cap: None,
            subscript_reading: SubscriptReading::Viewer,
            social: SocialConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Storage quota for a given storage ratio.
    pub fn storage_quota(&self, beta: f64) -> usize {
        (beta * self.videos as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        for (name, value) in [
            ("servers", self.servers),
            ("base_stations", self.base_stations),
            ("users", self.users),
            ("videos", self.videos),
            ("categories", self.categories),
        ] {
            if value == 0 {
                return invalid(format!("{name} must be at least 1"));
            }
        }
        for (name, value) in [
            ("backhaul_total", self.backhaul_total),
            ("radio_total", self.radio_total),
            ("video_size", self.video_size),
            ("zipf_exponent", self.zipf_exponent),
            ("social.category_exponent", self.social.category_exponent),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return invalid(format!("{name} must be positive, got {value}"));
            }
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return invalid(format!("gamma must lie in [0, 1], got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.social.friendship_probability) {
            return invalid(format!(
                "social.friendship_probability must lie in [0, 1], got {}",
                self.social.friendship_probability
            ));
        }
        if self.beta_list.is_empty() || self.request_sweep.is_empty() || self.seeds.is_empty() {
            return invalid("beta_list, request_sweep and seeds must be non-empty".into());
        }
        if let Some(beta) = self.beta_list.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
            return invalid(format!("beta values must lie in (0, 1], got {beta}"));
        }
        if self.request_sweep.contains(&0) {
            return invalid("request counts must be at least 1".into());
        }
        if let Connectivity::Random(p) = self.connectivity {
            if !(p > 0.0 && p <= 1.0) {
                return invalid(format!("connectivity probability must lie in (0, 1], got {p}"));
            }
        }
        if self.video_quota_cap == Some(0) {
            return invalid("video_quota_cap must be at least 1".into());
        }
        Ok(())
    }
}
