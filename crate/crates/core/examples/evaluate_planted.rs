// Offline evaluation on a synthetic dataset with known communities: hold
// out a fifth of each user's ratings, cluster the rest and measure
// precision and recall of the top-10 lists.

use socialrec::synthetic::{planted_communities, PlantedConfig};
use socialrec::{evaluate, ClusteringConfig, SplitConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let planted = planted_communities(&PlantedConfig {
        cross_noise: 0.05,
        ..PlantedConfig::default()
    })?;
    for (mode, clustering) in [
        ("single-pass", ClusteringConfig::single_pass(2)),
        ("iterative", ClusteringConfig::iterative(2, 100, 1e-9)),
    ] {
        let report = evaluate(&planted.dataset, &clustering, 10, 4.0, &SplitConfig::default())?;
        println!(
            "{mode}: precision@10 {:.3}, recall@10 {:.3} over {} users, friends in own cluster {:?}",
            report.macro_precision,
            report.macro_recall,
            report.evaluable_users,
            report.friend_retrieval.mean_same_cluster_fraction
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
