//! Three videos competing for two single-slot base stations.
//!
//! Run with `cargo run --example basic_matching`.

use social_cache::matching::{is_pairwise_stable, run_deferred_acceptance, AgentId, PreferenceOrder};

fn main() {
    // videos rank base stations by download time; each may be cached twice
    let videos = vec![
        PreferenceOrder::new(AgentId::proposer(0), vec![0, 1], 2).unwrap(),
        PreferenceOrder::new(AgentId::proposer(1), vec![0, 1], 2).unwrap(),
        PreferenceOrder::new(AgentId::proposer(2), vec![1], 1).unwrap(),
    ];
    // base stations rank videos by local popularity and store one each
    let stations = vec![
        PreferenceOrder::new(AgentId::receiver(0), vec![1, 0, 2], 1).unwrap(),
        PreferenceOrder::new(AgentId::receiver(1), vec![0, 2, 1], 1).unwrap(),
    ];

    let (matching, trace) = run_deferred_acceptance(&videos, &stations).expect("valid instance");
    print!("{}", trace.to_log());
    println!("matching: {matching}");
    println!("rounds: {}, rejections: {}", trace.len(), trace.total_rejections());
    println!("stable: {}", is_pairwise_stable(&matching, &videos, &stations).is_stable());
}
