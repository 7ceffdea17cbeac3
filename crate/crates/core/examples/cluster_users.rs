// Clusters a synthetic two-community dataset in both modes and writes the
// cluster file format to stdout.

use socialrec::synthetic::{planted_communities, PlantedConfig};
use socialrec::{cluster, ClusteringConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let planted = planted_communities(&PlantedConfig::default())?;
    let ratings = &planted.dataset.ratings;

    for config in [ClusteringConfig::single_pass(2), ClusteringConfig::iterative(2, 50, 1e-9)] {
        let cs = cluster(ratings, &config)?;
        println!(
            "{}: sizes {:?} after {} iteration(s), matches planted communities: {}",
            config.mode,
            cs.sizes(),
            cs.iterations_run,
            cs.partition() == planted.communities
        );
    }

    let cs = cluster(ratings, &ClusteringConfig::single_pass(2))?;
    cs.write_text(std::io::stdout().lock())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
