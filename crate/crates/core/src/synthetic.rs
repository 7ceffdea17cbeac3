//! Seeded synthetic datasets with a known community structure.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, ItemId, Rating, RatingsMatrix, Relation, SocialGraph, UserId};
use crate::error::Result;

/// Parameters for [`planted_communities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedConfig {
    pub communities: usize,
    pub users_per_community: usize,
    pub items_per_block: usize,
    /// Fraction of its own block each user rates.
    pub in_block_coverage: f64,
    /// Fraction of out-of-block cells that carry a high rating instead of a
    /// low one.
    pub cross_noise: f64,
    pub liked: f64,
    pub disliked: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            communities: 2,
            users_per_community: 10,
            items_per_block: 10,
            in_block_coverage: 0.8,
            cross_noise: 0.1,
            liked: 5.0,
            disliked: 1.0,
            seed: 2015,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedDataset {
    pub dataset: Dataset,
    /// Members of each community, indexed like the item blocks.
    pub communities: Vec<BTreeSet<UserId>>,
    pub blocks: Vec<BTreeSet<ItemId>>,
}

/// Users `u00, u01, ...` are dealt round-robin into communities, so user
/// `i` belongs to community `i % communities` and the first `communities`
/// users in id order come from distinct communities. Item block `c` is
/// named `c<c>-<j>`.
///
/// Each user rates `in_block_coverage` of its own block at `liked` and every
/// out-of-block item at `disliked`, except that `cross_noise` of those
/// out-of-block cells are rated `liked`. Friendships link each user to the
/// next member of its community, forming one ring per community.
pub fn planted_communities(config: &PlantedConfig) -> Result<PlantedDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let total_users = config.communities * config.users_per_community;
    let width = total_users.saturating_sub(1).to_string().len().max(2);

    let blocks: Vec<Vec<ItemId>> = (0..config.communities)
        .map(|c| {
            (0..config.items_per_block)
                .map(|j| ItemId::new(format!("c{c}-{j:02}")))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let users: Vec<UserId> = (0..total_users)
        .map(|i| UserId::new(format!("u{i:0width$}")))
        .collect::<Result<_>>()?;

    let covered = ((config.in_block_coverage * config.items_per_block as f64).round() as usize)
        .clamp(1, config.items_per_block);

    let mut ratings = RatingsMatrix::new();
    for (i, user) in users.iter().enumerate() {
        let home = i % config.communities;
        for j in sample(&mut rng, config.items_per_block, covered) {
            ratings.insert(Rating::new(user.clone(), blocks[home][j].clone(), config.liked))?;
        }
        for (c, block) in blocks.iter().enumerate() {
            if c == home {
                continue;
            }
            for item in block {
                let value = if rng.gen_bool(config.cross_noise) {
                    config.liked
                } else {
                    config.disliked
                };
                ratings.insert(Rating::new(user.clone(), item.clone(), value))?;
            }
        }
    }

    let mut communities = vec![BTreeSet::new(); config.communities];
    for (i, user) in users.iter().enumerate() {
        communities[i % config.communities].insert(user.clone());
    }
    let mut graph = SocialGraph::new();
    for members in &communities {
        let ring: Vec<&UserId> = members.iter().collect();
        if ring.len() < 2 {
            continue;
        }
        for (a, b) in ring.iter().zip(ring.iter().cycle().skip(1)) {
            graph.add_edge((*a).clone(), (*b).clone(), Relation::Friend)?;
        }
    }

    Ok(PlantedDataset {
        dataset: Dataset::new(ratings, graph),
        communities,
        blocks: blocks.into_iter().map(|b| b.into_iter().collect()).collect(),
    })
}
