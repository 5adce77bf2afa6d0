//! Cache placement, request generation and serving.
//!
//! Two placement policies fill the SBS caches: the matching algorithm (MA),
//! which runs deferred acceptance with videos proposing, and random caching
//! (RA). A batch of requests is then served against a placement: a request is
//! local when its video sits in the cache of the user's SBS, otherwise it is
//! fetched from the owner server over the backhaul. Every link is shared
//! equally among the requests of the batch that traverse it.

use std::collections::{BTreeSet, HashMap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, PopularityMode, RequestMode, ScenarioConfig};
use crate::matching::{
    is_pairwise_stable, run_deferred_acceptance, verify_trace_propositions, BlockingPair, Matching, MatchingError,
    MatchingTrace,
};
use crate::network::{generate_world, NetworkError, World};
use crate::popularity::{social_popularity_table, zipf_popularity_table, LocalPopularityTable, PopularityError, SocialFactors};
use crate::preferences::{build_preference_profile, expected_demand, DemandModel, PreferenceProfile};
use crate::rng::{stream_rng, substream_rng, Stream};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Popularity(#[from] PopularityError),
    #[error("matching placement is blocked by (v{}, s{})", .0.proposer, .0.receiver)]
    Unstable(BlockingPair),
    #[error("matching trace violates a proposition: {0}")]
    TraceViolation(String),
    #[error("malformed results CSV: {0}")]
    Csv(String),
}

/// Videos cached at each SBS.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Placement {
    pub cached: Vec<BTreeSet<usize>>,
}

impl Placement {
    pub fn empty(base_stations: usize) -> Self {
        Placement { cached: vec![BTreeSet::new(); base_stations] }
    }

    pub fn contains(&self, sbs: usize, video: usize) -> bool {
        self.cached[sbs].contains(&video)
    }

    pub fn total(&self) -> usize {
        self.cached.iter().map(BTreeSet::len).sum()
    }

    /// Each cache within quota and holding only videos whose owner reaches it.
    pub fn is_valid_for(&self, world: &World) -> bool {
        self.cached.len() == world.topology.base_station_count()
            && self.cached.iter().enumerate().all(|(s, videos)| {
                videos.len() <= world.topology.storage_quota[s] && videos.iter().all(|&v| world.reachable(s, v))
            })
    }
}

/// Outcome of the matching policy, kept for inspection.
#[derive(Debug, Clone)]
pub struct MatchingPlacement {
    pub placement: Placement,
    pub matching: Matching,
    pub trace: MatchingTrace,
}

/// Runs deferred acceptance with videos proposing and caches each matched
/// video at its SBS. Fails if the result is not pairwise stable or its trace
/// breaks either monotonicity proposition.
pub fn place_matching(world: &World, profile: &PreferenceProfile) -> Result<MatchingPlacement, SimError> {
    let (matching, trace) = run_deferred_acceptance(&profile.video_prefs, &profile.sbs_prefs)?;
    if let Some(pair) = is_pairwise_stable(&matching, &profile.video_prefs, &profile.sbs_prefs).blocking_pair() {
        return Err(SimError::Unstable(pair));
    }
    let report = verify_trace_propositions(&trace, &profile.sbs_prefs);
    if let Some(violation) = report.violations.first() {
        return Err(SimError::TraceViolation(violation.to_string()));
    }
    let mut placement = Placement::empty(world.topology.base_station_count());
    for (video, sbs) in matching.pairs() {
        placement.cached[sbs].insert(video);
    }
    debug_assert!(placement.is_valid_for(world));
    Ok(MatchingPlacement { placement, matching, trace })
}

/// Fills each SBS with a uniform sample, without replacement, of the videos
/// whose owner reaches it, up to its storage quota.
pub fn place_random<R: Rng>(world: &World, rng: &mut R) -> Placement {
    let cached = (0..world.topology.base_station_count())
        .map(|s| {
            let reachable: Vec<usize> = (0..world.catalog.len()).filter(|&v| world.reachable(s, v)).collect();
            let take = world.topology.storage_quota[s].min(reachable.len());
            sample(rng, reachable.len(), take).into_iter().map(|i| reachable[i]).collect()
        })
        .collect();
    Placement { cached }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub user: usize,
    pub video: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestTrace {
    pub requests: Vec<Request>,
}

impl RequestTrace {
    /// The first `count` requests.
    pub fn prefix(&self, count: usize) -> RequestTrace {
        RequestTrace { requests: self.requests[..count.min(self.requests.len())].to_vec() }
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

/// Draws `count` requests with a uniformly chosen user each. Under
/// `PopularityWeighted` the video follows the popularity row of the user's
/// SBS (uniform if that row is all zero); under `StrictUniform` it is uniform.
pub fn generate_requests<R: Rng>(
    world: &World,
    popularity: &LocalPopularityTable,
    count: usize,
    mode: RequestMode,
    rng: &mut R,
) -> RequestTrace {
    let users = world.topology.user_count();
    let videos = world.catalog.len();
    let rows: Vec<Option<WeightedIndex<f64>>> = match mode {
        RequestMode::PopularityWeighted => popularity.rows().iter().map(|row| WeightedIndex::new(row).ok()).collect(),
        RequestMode::StrictUniform => Vec::new(),
    };
    let requests = (0..count)
        .map(|_| {
            let user = rng.gen_range(0..users);
            let video = match rows.get(world.topology.serving_sbs(user)) {
                Some(Some(dist)) => dist.sample(rng),
                _ => rng.gen_range(0..videos),
            };
            Request { user, video }
        })
        .collect();
    RequestTrace { requests }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServeOutcome {
    /// Local requests over all requests; 1 for an empty batch.
    pub satisfaction: f64,
    /// Mean download time in time slots; 0 for an empty batch.
    pub mean_download_time: f64,
    /// Remote requests whose owner server has no link to the user's SBS.
    pub unserved: usize,
}

/// Serves a batch against a placement.
///
/// Each link's capacity is split equally among the batch requests crossing
/// it. A local request crosses only the user's radio link; a remote one also
/// crosses the backhaul link from the owner, and takes size over the smaller
/// of the two per-request shares. Unserved requests are charged the worst
/// time of the batch.
pub fn serve_requests(world: &World, placement: &Placement, trace: &RequestTrace) -> ServeOutcome {
    if trace.is_empty() {
        return ServeOutcome { satisfaction: 1.0, mean_download_time: 0.0, unserved: 0 };
    }
    let topology = &world.topology;
    let size = world.catalog.size;

    #[derive(Clone, Copy)]
    enum Route {
        Local,
        Remote(f64),
        Unserved,
    }

    let mut radio_load: HashMap<usize, usize> = HashMap::new();
    let mut backhaul_load: HashMap<(usize, usize), usize> = HashMap::new();
    let routes: Vec<Route> = trace
        .requests
        .iter()
        .map(|&Request { user, video }| {
            let sbs = topology.serving_sbs(user);
            *radio_load.entry(user).or_default() += 1;
            if placement.contains(sbs, video) {
                return Route::Local;
            }
            let owner = world.catalog.owner[video];
            match topology.backhaul(owner, sbs) {
                Some(capacity) => {
                    *backhaul_load.entry((owner, sbs)).or_default() += 1;
                    Route::Remote(capacity)
                }
                None => Route::Unserved,
            }
        })
        .collect();

    let mut local = 0usize;
    let mut unserved = 0usize;
    let mut times: Vec<Option<f64>> = Vec::with_capacity(routes.len());
    for (&Request { user, video }, route) in trace.requests.iter().zip(&routes) {
        let radio_share = topology.radio[user] / radio_load[&user] as f64;
        times.push(match *route {
            Route::Local => {
                local += 1;
                Some(size / radio_share)
            }
            Route::Remote(capacity) => {
                let key = (world.catalog.owner[video], topology.serving_sbs(user));
                let backhaul_share = capacity / backhaul_load[&key] as f64;
                Some(size / backhaul_share.min(radio_share))
            }
            Route::Unserved => {
                unserved += 1;
                None
            }
        });
    }
    let worst = times.iter().flatten().cloned().fold(f64::NAN, f64::max);
    let total: f64 = times
        .iter()
        .zip(&trace.requests)
        .map(|(t, r)| t.unwrap_or(if worst.is_nan() { size * radio_load[&r.user] as f64 / topology.radio[r.user] } else { worst }))
        .sum();
    let n = trace.len() as f64;
    ServeOutcome { satisfaction: local as f64 / n, mean_download_time: total / n, unserved }
}

/// Popularity table for a world under the configured mode.
pub fn popularity_for(world: &World, config: &ScenarioConfig, seed: u64) -> Result<LocalPopularityTable, SimError> {
    Ok(match config.popularity_mode {
        PopularityMode::Zipf => zipf_popularity_table(
            world.topology.base_station_count(),
            world.catalog.len(),
            config.zipf_exponent,
            seed,
        ),
        PopularityMode::Social => {
            let factors = SocialFactors::with_reading(config.gamma, config.subscript_reading)?;
            social_popularity_table(world, &factors)
        }
    })
}

/// World, popularity and both sides' demand for one seed, before storage
/// quotas are fixed.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub seed: u64,
    pub world: World,
    pub popularity: LocalPopularityTable,
    demand: crate::preferences::ExpectedDemand,
    video_quota_cap: Option<usize>,
}

impl Replicate {
    pub fn build(config: &ScenarioConfig, seed: u64) -> Result<Self, SimError> {
        let world = generate_world(config, seed)?;
        let popularity = popularity_for(&world, config, seed)?;
        let demand = match config.popularity_mode {
            PopularityMode::Zipf => expected_demand(&world, &popularity, DemandModel::Zipf),
            PopularityMode::Social => {
                let factors = SocialFactors::with_reading(config.gamma, config.subscript_reading)?;
                expected_demand(&world, &popularity, DemandModel::Social(&factors))
            }
        };
        Ok(Replicate { seed, world, popularity, demand, video_quota_cap: config.video_quota_cap })
    }

    /// The world with every SBS storing `quota` videos.
    pub fn world_with_quota(&self, quota: usize) -> World {
        let mut world = self.world.clone();
        world.topology.set_uniform_storage_quota(quota);
        world
    }

    pub fn profile(&self, world: &World) -> PreferenceProfile {
        build_preference_profile(world, &self.popularity, &self.demand, self.video_quota_cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub beta: f64,
    pub requests: usize,
    pub seed: u64,
    pub sat_ma: f64,
    pub sat_ra: f64,
    pub time_ma: f64,
    pub time_ra: f64,
}

/// Runs one seed: every storage ratio, every request count.
///
/// The request trace for count c is the first c draws of one stream per seed,
/// and both policies are served the same trace.
pub fn run_replicate(config: &ScenarioConfig, seed: u64) -> Result<Vec<ExperimentResult>, SimError> {
    let replicate = Replicate::build(config, seed)?;
    let longest = config.request_sweep.iter().copied().max().unwrap_or(0);
    let stream = generate_requests(
        &replicate.world,
        &replicate.popularity,
        longest,
        config.request_mode,
        &mut stream_rng(seed, Stream::Requests),
    );
    let mut rows = Vec::new();
    for (index, &beta) in config.beta_list.iter().enumerate() {
        let world = replicate.world_with_quota(config.storage_quota(beta));
        let ma = place_matching(&world, &replicate.profile(&world))?.placement;
        let ra = place_random(&world, &mut substream_rng(seed, Stream::RandomPlacement, index as u32));
        for &requests in &config.request_sweep {
            let trace = stream.prefix(requests);
            let with_ma = serve_requests(&world, &ma, &trace);
            let with_ra = serve_requests(&world, &ra, &trace);
            rows.push(ExperimentResult {
                beta,
                requests,
                seed,
                sat_ma: with_ma.satisfaction,
                sat_ra: with_ra.satisfaction,
                time_ma: with_ma.mean_download_time,
                time_ra: with_ra.mean_download_time,
            });
        }
    }
    Ok(rows)
}

/// Every (β, request count, seed) point, ordered by β, then count, then seed
/// as listed in the config. Seeds run in parallel.
pub fn run_experiment(config: &ScenarioConfig) -> Result<Vec<ExperimentResult>, SimError> {
    config.validate()?;
    let per_seed: Vec<Vec<ExperimentResult>> =
        config.seeds.par_iter().map(|&seed| run_replicate(config, seed)).collect::<Result<_, _>>()?;
    let points = config.beta_list.len() * config.request_sweep.len();
    let mut rows = Vec::with_capacity(points * config.seeds.len());
    for point in 0..points {
        rows.extend(per_seed.iter().map(|seed_rows| seed_rows[point]));
    }
    Ok(rows)
}

/// Seed-averaged metrics at one (β, request count) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub beta: f64,
    pub requests: usize,
    pub replicates: usize,
    pub sat_ma: f64,
    pub sat_ra: f64,
    pub time_ma: f64,
    pub time_ra: f64,
}

/// Means over seeds, in order of first appearance of each (β, count).
pub fn aggregate(results: &[ExperimentResult]) -> Vec<SweepSummary> {
    let mut out: Vec<SweepSummary> = Vec::new();
    for r in results {
        let slot = match out.iter().position(|s| s.beta == r.beta && s.requests == r.requests) {
            Some(i) => &mut out[i],
            None => {
                out.push(SweepSummary {
                    beta: r.beta,
                    requests: r.requests,
                    replicates: 0,
                    sat_ma: 0.0,
                    sat_ra: 0.0,
                    time_ma: 0.0,
                    time_ra: 0.0,
                });
                out.last_mut().unwrap()
            }
        };
        slot.replicates += 1;
        slot.sat_ma += r.sat_ma;
        slot.sat_ra += r.sat_ra;
        slot.time_ma += r.time_ma;
        slot.time_ra += r.time_ra;
    }
    for s in &mut out {
        let n = s.replicates as f64;
        s.sat_ma /= n;
        s.sat_ra /= n;
        s.time_ma /= n;
        s.time_ra /= n;
    }
    out
}

/// `%g`-style rendering with six significant digits.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exponent) {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exponent.abs())
    } else {
        let decimals = (5 - exponent).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

pub const CSV_HEADER: [&str; 7] = ["beta", "requests", "seed", "sat_ma", "sat_ra", "time_ma", "time_ra"];

pub fn results_to_csv(results: &[ExperimentResult]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for r in results {
        writer
            .write_record([
                format_g6(r.beta),
                r.requests.to_string(),
                r.seed.to_string(),
                format_g6(r.sat_ma),
                format_g6(r.sat_ra),
                format_g6(r.time_ma),
                format_g6(r.time_ra),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("ascii output")
}

pub fn results_from_csv(text: &str) -> Result<Vec<ExperimentResult>, SimError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| SimError::Csv(e.to_string()))?;
    if headers.iter().ne(CSV_HEADER) {
        return Err(SimError::Csv(format!("expected header {}", CSV_HEADER.join(","))));
    }
    reader
        .deserialize::<ExperimentResult>()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| SimError::Csv(format!("row {}: {e}", i + 1))))
        .collect()
}
