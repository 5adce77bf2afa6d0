//! Matching-based against random placement for one seed at the default scale
//! (80 servers, 150 base stations, 400 users, 100 videos).
//!
//! Run with `cargo run --release --example placement_comparison`.

use social_cache::config::ScenarioConfig;
use social_cache::rng::{stream_rng, substream_rng, Stream};
use social_cache::sim::{generate_requests, place_matching, place_random, serve_requests, Replicate};

fn main() {
    let config = ScenarioConfig::default();
    let seed = 1;
    let replicate = Replicate::build(&config, seed).expect("replicate builds");
    let requests = generate_requests(
        &replicate.world,
        &replicate.popularity,
        2000,
        config.request_mode,
        &mut stream_rng(seed, Stream::Requests),
    );

    println!("beta  requests  sat_ma  sat_ra  time_ma  time_ra  rounds");
    for (i, &beta) in config.beta_list.iter().enumerate() {
        let world = replicate.world_with_quota(config.storage_quota(beta));
        let ma = place_matching(&world, &replicate.profile(&world)).expect("stable placement");
        let ra = place_random(&world, &mut substream_rng(seed, Stream::RandomPlacement, i as u32));
        for &n in &[100, 500, 2000] {
            let trace = requests.prefix(n);
            let a = serve_requests(&world, &ma.placement, &trace);
            let r = serve_requests(&world, &ra, &trace);
            println!(
                "{beta:<5} {n:<9} {:<7.3} {:<7.3} {:<8.2} {:<8.2} {}",
                a.satisfaction,
                r.satisfaction,
                a.mean_download_time,
                r.mean_download_time,
                ma.trace.len()
            );
        }
    }
}
