//! Generates a world, writes it as JSON and reloads it.
//!
//! Run with `cargo run --example world_snapshot [PATH]`.

use social_cache::config::{PopularityMode, ScenarioConfig};
use social_cache::network::{generate_world, World};

fn main() {
    let config = ScenarioConfig {
        popularity_mode: PopularityMode::Social,
        servers: 4,
        base_stations: 6,
        users: 30,
        videos: 12,
        ..ScenarioConfig::default()
    };
    let world = generate_world(&config, 3).expect("world generates");
    let path = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("world.json"), Into::into);
    std::fs::write(&path, world.to_json()).unwrap();

    let reloaded = World::from_json(&std::fs::read_to_string(&path).unwrap()).expect("snapshot parses");
    assert_eq!(reloaded, world);
    let friendships: usize = (0..reloaded.graph.user_count()).map(|u| reloaded.graph.degree(u)).sum::<usize>() / 2;
    println!("wrote {}", path.display());
    println!(
        "{} servers, {} base stations, {} users, {} videos, {friendships} friendships",
        reloaded.topology.server_count(),
        reloaded.topology.base_station_count(),
        reloaded.topology.user_count(),
        reloaded.catalog.len()
    );
    println!("backhaul per link {:.5}, storage quota {}", reloaded.topology.backhaul(0, 0).unwrap_or(0.0), reloaded.topology.storage_quota[0]);
}
