//! Seeded holdout splits and precision/recall@N over the whole pipeline.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::{cluster, ClusterSet, ClusteringConfig, ClusteringMode};
use crate::dataset::{Dataset, ItemId, Rating, UserId};
use crate::error::{Error, Result};
use crate::recommender::{recommend_top_n, ContextQuery};

pub const DEFAULT_N: usize = 10;
pub const DEFAULT_RELEVANCE_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    /// Fraction of ratings to hold out, in (0, 1).
    pub holdout_fraction: f64,
    pub seed: u64,
    /// Hold out ⌈fraction·m⌉ of each user's m ratings instead of sampling
    /// globally.
    pub per_user: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            holdout_fraction: 0.2,
            seed: 42,
            per_user: true,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "holdout fraction must lie in (0, 1), got {}",
                self.holdout_fraction
            )));
        }
        Ok(())
    }
}

/// ⌈fraction·m⌉, tolerant of products like 0.1·30 landing just above an
/// integer.
fn holdout_count(fraction: f64, m: usize) -> usize {
    ((fraction * m as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Splits the ratings into a training dataset and a held-out test set.
///
/// Selection depends only on `config.seed`. No user ever loses their last
/// training rating, so a user with a single rating keeps it. The social graph
/// and the user universe pass through unchanged.
pub fn split(dataset: &Dataset, config: &SplitConfig) -> Result<(Dataset, Vec<Rating>)> {
    config.validate()?;
    if dataset.ratings.is_empty() {
        return Err(Error::InvalidConfig("cannot split an empty dataset".into()));
    }
    let ratings = &dataset.ratings;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut held: BTreeSet<(UserId, ItemId)> = BTreeSet::new();

    if config.per_user {
        for user in ratings.users() {
            let mut items: Vec<&ItemId> = ratings.row(user).unwrap().keys().collect();
            let m = items.len();
            if m < 2 {
                continue;
            }
            let h = holdout_count(config.holdout_fraction, m).min(m - 1);
            items.shuffle(&mut rng);
            held.extend(items.into_iter().take(h).map(|i| (user.clone(), i.clone())));
        }
    } else {
        let mut pairs: Vec<(&UserId, &ItemId)> = ratings.iter().map(|r| (&r.user, &r.item)).collect();
        let target = holdout_count(config.holdout_fraction, pairs.len());
        pairs.shuffle(&mut rng);
        let mut remaining: BTreeMap<&UserId, usize> = ratings
            .users()
            .map(|u| (u, ratings.row(u).unwrap().len()))
            .collect();
        for (user, item) in pairs {
            if held.len() == target {
                break;
            }
            let left = remaining.get_mut(user).unwrap();
            if *left >= 2 {
                *left -= 1;
                held.insert((user.clone(), item.clone()));
            }
        }
    }

    let train = ratings.filter(|r| !held.contains(&(r.user.clone(), r.item.clone())));
    let test: Vec<Rating> = ratings
        .iter()
        .filter(|r| held.contains(&(r.user.clone(), r.item.clone())))
        .cloned()
        .collect();
    let train = Dataset::with_users(train, dataset.graph.clone(), dataset.all_users().clone());
    Ok((train, test))
}

fn hits(recommended: &[ItemId], relevant: &BTreeSet<ItemId>, n: usize) -> usize {
    recommended.iter().take(n).filter(|i| relevant.contains(*i)).count()
}

/// Hits among the first `n` recommendations, divided by `n`.
pub fn precision_at_n(recommended: &[ItemId], relevant: &BTreeSet<ItemId>, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    hits(recommended, relevant, n) as f64 / n as f64
}

/// Hits among the first `n` recommendations, divided by the number of
/// relevant items.
pub fn recall_at_n(recommended: &[ItemId], relevant: &BTreeSet<ItemId>, n: usize) -> Result<f64> {
    if relevant.is_empty() {
        return Err(Error::NotEvaluable);
    }
    Ok(hits(recommended, relevant, n) as f64 / relevant.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserMetrics {
    pub user: UserId,
    pub relevant: usize,
    pub recommended: usize,
    pub hits: usize,
    pub precision: f64,
    pub recall: f64,
    pub cold_start: bool,
    /// No recommendation for this user was backed by a neighbour.
    pub fallback_only: bool,
}

/// How often a user's friends ended up in the user's own cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriendRetrieval {
    /// Clustered users with at least one clustered friend.
    pub users: usize,
    /// Mean over those users of the fraction of friends sharing their
    /// cluster. `None` when no user qualifies.
    pub mean_same_cluster_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n: usize,
    pub relevance_threshold: f64,
    pub holdout_fraction: f64,
    pub seed: u64,
    pub per_user_split: bool,
    pub k: usize,
    pub mode: ClusteringMode,
    pub iterations_run: usize,
    pub train_ratings: usize,
    pub test_ratings: usize,
    /// Users with at least one relevant held-out item.
    pub evaluable_users: usize,
    pub no_evaluable_users: bool,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub cold_start_users: usize,
    pub fallback_only_users: usize,
    pub friend_retrieval: FriendRetrieval,
    pub per_user: Vec<UserMetrics>,
}

/// Same-cluster fraction of friends, averaged over users who have any
/// clustered friend.
pub fn friend_retrieval(dataset: &Dataset, cs: &ClusterSet) -> FriendRetrieval {
    let mut fractions = Vec::new();
    for (index, c) in cs.clusters.iter().enumerate() {
        for user in &c.members {
            let friends: Vec<usize> = dataset
                .graph
                .friends(user)
                .into_iter()
                .filter_map(|f| cs.cluster_of(f).ok())
                .collect();
            if friends.is_empty() {
                continue;
            }
            let same = friends.iter().filter(|&&f| f == index).count();
            fractions.push(same as f64 / friends.len() as f64);
        }
    }
    FriendRetrieval {
        users: fractions.len(),
        mean_same_cluster_fraction: (!fractions.is_empty())
            .then(|| fractions.iter().sum::<f64>() / fractions.len() as f64),
    }
}

/// Holds out ratings, clusters the rest, recommends for every user with a
/// relevant held-out item and aggregates precision@N and recall@N.
pub fn evaluate(
    dataset: &Dataset,
    clustering: &ClusteringConfig,
    n: usize,
    relevance_threshold: f64,
    split_config: &SplitConfig,
) -> Result<EvaluationReport> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    if !relevance_threshold.is_finite() {
        return Err(Error::InvalidConfig("relevance threshold must be finite".into()));
    }
    let (train, test) = split(dataset, split_config)?;
    let cs = cluster(&train.ratings, clustering)?;

    let mut relevant_by_user: BTreeMap<&UserId, BTreeSet<ItemId>> = BTreeMap::new();
    for r in &test {
        let entry = relevant_by_user.entry(&r.user).or_default();
        if r.value >= relevance_threshold {
            entry.insert(r.item.clone());
        }
    }

    let empty_query = ContextQuery::new();
    let mut per_user = Vec::new();
    for (user, relevant) in relevant_by_user {
        if relevant.is_empty() {
            continue;
        }
        let (items, cold_start, fallback_only) =
            match recommend_top_n(&train, &cs, user, n, &empty_query, 0) {
                Ok(list) => {
                    let fallback_only = list.entries.iter().all(|p| p.fallback);
                    (list.items(), list.cold_start, fallback_only)
                }
                Err(Error::ColdStartUnresolvable(_)) => (Vec::new(), true, true),
                Err(other) => return Err(other),
            };
        per_user.push(UserMetrics {
            user: user.clone(),
            relevant: relevant.len(),
            recommended: items.len(),
            hits: hits(&items, &relevant, n),
            precision: precision_at_n(&items, &relevant, n),
            recall: recall_at_n(&items, &relevant, n)?,
            cold_start,
            fallback_only,
        });
    }

    let evaluable = per_user.len();
    let average = |f: fn(&UserMetrics) -> f64| {
        if evaluable == 0 {
            0.0
        } else {
            per_user.iter().map(f).sum::<f64>() / evaluable as f64
        }
    };
    let macro_precision = average(|m| m.precision);
    let macro_recall = average(|m| m.recall);

    Ok(EvaluationReport {
        n,
        relevance_threshold,
        holdout_fraction: split_config.holdout_fraction,
        seed: split_config.seed,
        per_user_split: split_config.per_user,
        k: cs.k,
        mode: cs.mode,
        iterations_run: cs.iterations_run,
        train_ratings: train.ratings.num_ratings(),
        test_ratings: test.len(),
        evaluable_users: evaluable,
        no_evaluable_users: evaluable == 0,
        macro_precision,
        macro_recall,
        cold_start_users: per_user.iter().filter(|m| m.cold_start).count(),
        fallback_only_users: per_user.iter().filter(|m| m.fallback_only).count(),
        friend_retrieval: friend_retrieval(&train, &cs),
        per_user,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{RatingsMatrix, SocialGraph};

    fn iid(s: &str) -> ItemId {
        ItemId::new(s).unwrap()
    }

    fn items(names: &[&str]) -> Vec<ItemId> {
        names.iter().map(|n| iid(n)).collect()
    }

    fn set(names: &[&str]) -> BTreeSet<ItemId> {
        names.iter().map(|n| iid(n)).collect()
    }

    #[test]
    fn precision_definition() {
        let rec = items(&["a", "b", "c", "d", "e"]);
        assert_eq!(precision_at_n(&rec, &set(&["b", "e", "z"]), 5), 0.4);
        assert_eq!(precision_at_n(&rec, &set(&["z"]), 5), 0.0);
        assert_eq!(precision_at_n(&rec, &set(&["a", "b", "c", "d", "e"]), 5), 1.0);
        // short lists still divide by n
        assert_eq!(precision_at_n(&items(&["a"]), &set(&["a"]), 4), 0.25);
    }

    #[test]
    fn recall_definition() {
        let rec = items(&["a", "b", "c"]);
        assert_eq!(recall_at_n(&rec, &set(&["a", "c", "x", "y"]), 3).unwrap(), 0.5);
        assert_eq!(recall_at_n(&rec, &set(&["a", "b"]), 3).unwrap(), 1.0);
        assert_eq!(recall_at_n(&rec, &set(&["c"]), 2).unwrap(), 0.0);
        assert!(matches!(
            recall_at_n(&rec, &BTreeSet::new(), 3),
            Err(Error::NotEvaluable)
        ));
    }

    fn four_by_four() -> Dataset {
        let mut triples = Vec::new();
        for u in ["u1", "u2", "u3"] {
            for i in ["a", "b", "c", "d"] {
                triples.push((u, i, 3.0));
            }
        }
        triples.push(("solo", "a", 5.0));
        Dataset::new(RatingsMatrix::from_triples(triples).unwrap(), SocialGraph::new())
    }

    #[test]
    fn per_user_ceiling_and_retention() {
        let d = four_by_four();
        let cfg = SplitConfig {
            holdout_fraction: 0.5,
            seed: 7,
            per_user: true,
        };
        let (train, test) = split(&d, &cfg).unwrap();
        for u in ["u1", "u2", "u3"] {
            let uid = UserId::new(u).unwrap();
            assert_eq!(test.iter().filter(|r| r.user == uid).count(), 2);
            assert_eq!(train.ratings.row(&uid).unwrap().len(), 2);
        }
        let solo = UserId::new("solo").unwrap();
        assert!(train.ratings.contains_user(&solo));
        assert!(test.iter().all(|r| r.user != solo));
    }

    #[test]
    fn split_is_seeded() {
        let d = four_by_four();
        for per_user in [true, false] {
            let cfg = SplitConfig {
                holdout_fraction: 0.3,
                seed: 11,
                per_user,
            };
            let (a_train, a_test) = split(&d, &cfg).unwrap();
            let (b_train, b_test) = split(&d, &cfg).unwrap();
            assert_eq!(a_train, b_train);
            assert_eq!(a_test, b_test);
        }
    }

    #[test]
    fn global_split_keeps_one_rating_per_user() {
        let d = four_by_four();
        let cfg = SplitConfig {
            holdout_fraction: 0.9,
            seed: 3,
            per_user: false,
        };
        let (train, test) = split(&d, &cfg).unwrap();
        assert_eq!(train.ratings.num_users(), d.ratings.num_users());
        assert_eq!(train.ratings.num_ratings() + test.len(), d.ratings.num_ratings());
        // 13 ratings, at most 13 - 4 can leave
        assert_eq!(test.len(), 9);
    }

    #[test]
    fn bad_fractions_rejected() {
        let d = four_by_four();
        for f in [0.0, 1.0, 1.5, -0.2, f64::NAN] {
            let cfg = SplitConfig {
                holdout_fraction: f,
                ..SplitConfig::default()
            };
            assert!(matches!(split(&d, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn holdout_count_rounds_up() {
        assert_eq!(holdout_count(0.5, 4), 2);
        assert_eq!(holdout_count(0.2, 5), 1);
        assert_eq!(holdout_count(0.2, 6), 2);
        assert_eq!(holdout_count(0.1, 30), 3);
    }
}
