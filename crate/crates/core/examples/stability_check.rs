//! Stability, trace and substitutability checks on generated instances,
//! including a hand-built matching that admits a blocking pair.
//!
//! Run with `cargo run --example stability_check`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use social_cache::matching::instance::random_instance;
use social_cache::matching::oracle::stable_matchings;
use social_cache::matching::{
    check_substitutability, is_pairwise_stable, verify_trace_propositions, AgentId, Matching, PreferenceOrder,
};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let instance = random_instance(&mut rng, 4, 2);
    println!("{}", serde_json::to_string(&instance).unwrap());

    let (matching, trace) = instance.solve().expect("valid instance");
    println!("deferred acceptance: {matching}");
    println!("pairwise stable: {}", is_pairwise_stable(&matching, &instance.proposers, &instance.receivers).is_stable());
    println!("trace propositions hold: {}", verify_trace_propositions(&trace, &instance.receivers).holds());

    let all = stable_matchings(&instance.proposers, &instance.receivers).expect("small instance");
    println!("brute force finds {} stable matching(s)", all.len());
    for pairs in &all {
        println!("  {}", Matching::from_pairs(instance.proposers.len(), instance.receivers.len(), pairs.iter().copied()));
    }

    // both stations prefer v0, v0 prefers s0, yet v0 is left with s1
    let videos = [
        PreferenceOrder::new(AgentId::proposer(0), vec![0, 1], 1).unwrap(),
        PreferenceOrder::new(AgentId::proposer(1), vec![0, 1], 1).unwrap(),
    ];
    let stations = [
        PreferenceOrder::new(AgentId::receiver(0), vec![0, 1], 1).unwrap(),
        PreferenceOrder::new(AgentId::receiver(1), vec![0, 1], 1).unwrap(),
    ];
    let forced = Matching::from_pairs(2, 2, [(0, 1), (1, 0)]);
    println!("{forced}: {:?}", is_pairwise_stable(&forced, &videos, &stations));

    let universe: Vec<usize> = (0..5).collect();
    let quota_choice = PreferenceOrder::new(AgentId::receiver(0), vec![4, 2, 0, 1], 2).unwrap();
    println!("quota choice substitutable: {}", check_substitutability(&quota_choice, &universe).unwrap());
}
