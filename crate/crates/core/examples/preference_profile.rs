//! Both sides' rankings for a small generated network.
//!
//! Run with `cargo run --example preference_profile`.

use social_cache::config::ScenarioConfig;
use social_cache::sim::Replicate;

fn main() {
    let config = ScenarioConfig {
        servers: 3,
        base_stations: 4,
        users: 20,
        videos: 8,
        backhaul_total: 40.0,
        radio_total: 8.0,
        ..ScenarioConfig::default()
    };
    let replicate = Replicate::build(&config, 5).expect("replicate builds");
    let world = replicate.world_with_quota(config.storage_quota(0.25));
    let profile = replicate.profile(&world);

    for (m, order) in profile.sbs_prefs.iter().enumerate() {
        let ranked: Vec<String> = order.ranking().iter().map(|v| format!("v{v}")).collect();
        println!("s{m} (stores {}): {}", order.quota(), ranked.join(" > "));
    }
    for (v, order) in profile.video_prefs.iter().enumerate() {
        let ranked: Vec<String> = order.ranking().iter().map(|s| format!("s{s}")).collect();
        println!("v{v} owned by k{} (quota {}): {}", world.catalog.owner[v], order.quota(), ranked.join(" > "));
    }
}
