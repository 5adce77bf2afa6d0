//! Local popularity from the social world versus the synthetic Zipf table.
//!
//! Run with `cargo run --example social_popularity`.

use social_cache::config::{PopularityMode, ScenarioConfig};
use social_cache::network::generate_world;
use social_cache::popularity::{social_popularity_table, zipf_popularity_table, LocalPopularityTable, SocialFactors};

fn top_videos(table: &LocalPopularityTable, sbs: usize, k: usize) -> Vec<(usize, f64)> {
    let mut row: Vec<(usize, f64)> = table.row(sbs).iter().copied().enumerate().collect();
    row.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    row.truncate(k);
    row
}

fn main() {
    let config = ScenarioConfig {
        popularity_mode: PopularityMode::Social,
        users: 120,
        base_stations: 10,
        servers: 5,
        videos: 30,
        ..ScenarioConfig::default()
    };
    let world = generate_world(&config, 11).expect("world generates");
    let attached = world.topology.users_by_sbs();

    for gamma in [0.0, 0.5, 1.0] {
        let table = social_popularity_table(&world, &SocialFactors::new(gamma).unwrap());
        println!("gamma={gamma}");
        for sbs in 0..3 {
            let top: Vec<String> = top_videos(&table, sbs, 4).iter().map(|(v, p)| format!("v{v}:{p:.3}")).collect();
            println!("  s{sbs} ({} users): {}", attached[sbs].len(), top.join(" "));
        }
    }

    let zipf = zipf_popularity_table(config.base_stations, config.videos, config.zipf_exponent, 11);
    println!("zipf exponent {}", config.zipf_exponent);
    for sbs in 0..3 {
        let top: Vec<String> = top_videos(&zipf, sbs, 4).iter().map(|(v, p)| format!("v{v}:{p:.3}")).collect();
        println!("  s{sbs}: {}", top.join(" "));
    }
    println!("\nfirst rows as CSV:");
    print!("{}", zipf.to_csv().lines().take(3).collect::<Vec<_>>().join("\n"));
    println!();
}
