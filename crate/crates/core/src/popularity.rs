//! Local popularity of videos at base stations.
//!
//! Three social factors feed the score of video v at SBS m. With n the user
//! who shared v, g its category, and l ranging over n's friends attached to m:
//!
//! ```text
//! P(m, v) = Σ_l  sharing(l, g, m) · (γ · social(l, n) + (1 − γ) · interests(l, g))
//! social(l, n)      = α_ln / Σ_{j ∈ friends(l)} α_lj
//! sharing(l, g, m)  = |friends(l) ∩ users(m)| · S_gl / Σ_i S_il
//! interests(l, g)   = V_gl / Σ_i V_il
//! ```
//!
//! Empty denominators yield 0. The synthetic alternative assigns each SBS a
//! randomly permuted Zipf distribution over the catalog.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SubscriptReading;
use crate::network::{SocialGraph, Topology, UserHistory, World};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Error, PartialEq)]
pub enum PopularityError {
    #[error("users {viewer} and {sharer} are not friends")]
    NotFriends { viewer: usize, sharer: usize },
    #[error("gamma must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),
}

fn ratio(num: u32, den: u32) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Share of the viewer's friend-sourced views that came from `sharer`.
pub fn i_social(history: &UserHistory, graph: &SocialGraph, viewer: usize, sharer: usize) -> Result<f64, PopularityError> {
    if !graph.are_friends(viewer, sharer) {
        return Err(PopularityError::NotFriends { viewer, sharer });
    }
    let total: u32 = graph.friends(viewer).iter().map(|&j| history.alpha(viewer, j)).sum();
    Ok(ratio(history.alpha(viewer, sharer), total))
}

/// Friends of `user` attached to `sbs`, weighted by how much of the user's
/// sharing falls in `category`.
pub fn i_sharing(
    history: &UserHistory,
    graph: &SocialGraph,
    topology: &Topology,
    user: usize,
    category: usize,
    sbs: usize,
) -> f64 {
    let local_friends = graph.friends(user).iter().filter(|&&f| topology.serving_sbs(f) == sbs).count();
    local_friends as f64 * ratio(history.shared_by_category[user][category], history.total_shares(user))
}

/// Fraction of the user's viewing history in `category`.
pub fn i_interests(history: &UserHistory, user: usize, category: usize) -> f64 {
    ratio(history.viewed_by_category[user][category], history.total_views(user))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocialFactors {
    gamma: f64,
    reading: SubscriptReading,
}

impl SocialFactors {
    pub fn new(gamma: f64) -> Result<Self, PopularityError> {
        Self::with_reading(gamma, SubscriptReading::Viewer)
    }

    pub fn with_reading(gamma: f64, reading: SubscriptReading) -> Result<Self, PopularityError> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(PopularityError::GammaOutOfRange(gamma));
        }
        Ok(SocialFactors { gamma, reading })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn social(&self, world: &World, viewer: usize, sharer: usize) -> f64 {
        let (history, graph) = (&world.history, &world.graph);
        match self.reading {
            SubscriptReading::Viewer => i_social(history, graph, viewer, sharer).unwrap_or(0.0),
            SubscriptReading::Literal => {
                let total: u32 = graph.friends(viewer).iter().map(|&j| history.alpha(j, viewer)).sum();
                ratio(history.alpha(viewer, sharer), total)
            }
        }
    }

    fn interests(&self, world: &World, viewer: usize, sharer: usize, category: usize) -> f64 {
        let history = &world.history;
        match self.reading {
            SubscriptReading::Viewer => i_interests(history, viewer, category),
            SubscriptReading::Literal => {
                ratio(history.viewed_by_category[sharer][category], history.total_views(viewer))
            }
        }
    }

    /// Predicted interest of `viewer` in a video shared by `sharer`, the
    /// bracketed term of the popularity sum.
    pub fn interest(&self, world: &World, viewer: usize, sharer: usize, category: usize) -> f64 {
        self.gamma * self.social(world, viewer, sharer) + (1.0 - self.gamma) * self.interests(world, viewer, sharer, category)
    }

    pub fn local_popularity(&self, world: &World, sbs: usize, video: usize) -> f64 {
        let sharer = world.history.sharer_of[video];
        let category = world.catalog.category[video];
        world
            .graph
            .friends(sharer)
            .iter()
            .filter(|&&l| world.topology.serving_sbs(l) == sbs)
            .map(|&l| {
                i_sharing(&world.history, &world.graph, &world.topology, l, category, sbs)
                    * self.interest(world, l, sharer, category)
            })
            .sum()
    }
}

/// Local popularity under the default subscript reading.
pub fn local_popularity(world: &World, gamma: f64, sbs: usize, video: usize) -> Result<f64, PopularityError> {
    Ok(SocialFactors::new(gamma)?.local_popularity(world, sbs, video))
}

/// P(m, v) for every SBS m and video v.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPopularityTable {
    rows: Vec<Vec<f64>>,
}

impl LocalPopularityTable {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        LocalPopularityTable { rows }
    }

    pub fn get(&self, sbs: usize, video: usize) -> f64 {
        self.rows[sbs][video]
    }

    pub fn row(&self, sbs: usize) -> &[f64] {
        &self.rows[sbs]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn base_station_count(&self) -> usize {
        self.rows.len()
    }

    /// One row per SBS, one column per video.
    pub fn to_csv(&self) -> String {
        let videos = self.rows.first().map_or(0, Vec::len);
        let mut out = String::from("sbs");
        for v in 0..videos {
            write!(out, ",v{v}").unwrap();
        }
        out.push('\n');
        for (m, row) in self.rows.iter().enumerate() {
            write!(out, "{m}").unwrap();
            for p in row {
                write!(out, ",{p}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn social_popularity_table(world: &World, factors: &SocialFactors) -> LocalPopularityTable {
    let videos = world.catalog.len();
    let rows = (0..world.topology.base_station_count())
        .map(|m| (0..videos).map(|v| factors.local_popularity(world, m, v)).collect())
        .collect();
    LocalPopularityTable { rows }
}

/// Normalized Zipf weights `rank^-exponent / Σ` for ranks 1..=len.
pub fn zipf_weights(len: usize, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=len).map(|rank| (rank as f64).powf(-exponent)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Each SBS gets the Zipf weights over a seeded random permutation of videos.
pub fn zipf_popularity_table(base_stations: usize, videos: usize, exponent: f64, seed: u64) -> LocalPopularityTable {
    let weights = zipf_weights(videos, exponent);
    let mut rng = stream_rng(seed, Stream::Popularity);
    let rows = (0..base_stations)
        .map(|_| {
            let mut order: Vec<usize> = (0..videos).collect();
            order.shuffle(&mut rng);
            let mut row = vec![0.0; videos];
            for (rank, &v) in order.iter().enumerate() {
                row[v] = weights[rank];
            }
            row
        })
        .collect();
    LocalPopularityTable { rows }
}
