//! Context pre-filtering, cluster-restricted prediction, social cold start
//! and top-N lists.
//!
//! A request flows through [`recommend_top_n`]:
//!
//! 1. [`context_prefilter`] keeps only the ratings given in a matching
//!    context, relaxing the query when too few survive.
//! 2. A user without a cluster is placed by [`cold_start_cluster`], which
//!    takes the majority cluster of the user's social neighbours.
//! 3. Every item rated inside the cluster but not by the user is scored with
//!    [`predict`], which only ever looks at members of that cluster.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::ClusterSet;
use crate::dataset::{ContextTags, Dataset, Dimension, ItemId, RatingsMatrix, UserId};
use crate::error::{Error, Result};
use crate::similarity::effective_similarity;

/// Order in which query dimensions are dropped when too few ratings match.
pub const RELAXATION_ORDER: [Dimension; 4] = [
    Dimension::Emotion,
    Dimension::Weather,
    Dimension::Time,
    Dimension::Location,
];

/// Partial assignment over the context dimensions. An empty query matches
/// every rating.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextQuery {
    #[serde(flatten)]
    pub tags: ContextTags,
}

impl ContextQuery {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, dim: Dimension, value: impl Into<String>) -> Self {
        self.tags.set(dim, Some(value.into()));
        self
    }

    pub fn get(&self, dim: Dimension) -> Option<&str> {
        self.tags.get(dim)
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Dimensions that carry a value, in canonical order.
    pub fn dimensions(&self) -> Vec<Dimension> {
        Dimension::ALL
            .into_iter()
            .filter(|d| self.get(*d).is_some())
            .collect()
    }

    /// True when every set dimension is present on `tags` with the same
    /// value. An absent tag never matches a queried dimension.
    pub fn matches(&self, tags: &ContextTags) -> bool {
        Dimension::ALL.into_iter().all(|d| match self.get(d) {
            None => true,
            Some(want) => tags.get(d) == Some(want),
        })
    }

    pub fn without(&self, dim: Dimension) -> Self {
        let mut out = self.clone();
        out.tags.set(dim, None);
        out
    }
}

impl fmt::Display for ContextQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .dimensions()
            .into_iter()
            .map(|d| format!("{d}={}", self.get(d).unwrap_or_default()))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `dim=value` pairs joined by commas, e.g.
/// `location=athens,time=evening`. The empty string is the empty query.
impl FromStr for ContextQuery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut query = ContextQuery::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (dim, value) = part.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("context entry `{part}` is not `dimension=value`"))
            })?;
            let dim: Dimension = dim.trim().parse()?;
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::InvalidConfig(format!("context dimension `{dim}` has no value")));
            }
            if query.get(dim).is_some() {
                return Err(Error::InvalidConfig(format!("context dimension `{dim}` given twice")));
            }
            query.tags.set(dim, Some(value.to_string()));
        }
        Ok(query)
    }
}

/// Result of [`context_prefilter`].
#[derive(Debug, Clone, PartialEq)]
pub struct Prefiltered {
    pub ratings: RatingsMatrix,
    /// The query that was finally applied.
    pub applied: ContextQuery,
    /// Dimensions dropped during relaxation, in the order they were dropped.
    pub relaxed: Vec<Dimension>,
}

/// Keeps the ratings whose tags match every set dimension of `query`. While
/// fewer than `min_support` ratings survive, the set dimensions are dropped
/// one at a time in [`RELAXATION_ORDER`].
pub fn context_prefilter(ratings: &RatingsMatrix, query: &ContextQuery, min_support: usize) -> Prefiltered {
    let mut applied = query.clone();
    let mut relaxed = Vec::new();
    let mut order = RELAXATION_ORDER.into_iter();
    loop {
        let filtered = if applied.is_empty() {
            ratings.clone()
        } else {
            ratings.filter(|r| applied.matches(&r.context))
        };
        if filtered.num_ratings() >= min_support || applied.is_empty() {
            return Prefiltered {
                ratings: filtered,
                applied,
                relaxed,
            };
        }
        let next = order
            .by_ref()
            .find(|d| applied.get(*d).is_some())
            .expect("a non-empty query has a droppable dimension");
        applied = applied.without(next);
        relaxed.push(next);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub item: ItemId,
    pub score: f64,
    /// Number of neighbours that contributed to the score.
    pub support: usize,
    /// Set when no neighbour could contribute and the user's mean was used.
    pub fallback: bool,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Predicts `user`'s rating of `item` from the members of `user`'s cluster.
///
/// With `M` the other members who rated the item and have a non-zero
/// effective similarity to `user`:
///
/// ```text
/// score = mean(u) + Σ_{v∈M} sim(u,v)·(r_vi − mean(v)) / Σ_{v∈M} |sim(u,v)|
/// ```
///
/// with means over each user's full set of ratings, clamped to the range of
/// ratings observed inside the cluster. An empty `M` yields `mean(u)` with the
/// fallback flag set.
pub fn predict(ratings: &RatingsMatrix, cs: &ClusterSet, user: &UserId, item: &ItemId) -> Result<Prediction> {
    let cluster = cs.cluster_of(user)?;
    predict_in_cluster(ratings, cs.members(cluster), user, item)
}

/// [`predict`] against an explicit member set, which need not contain
/// `user`.
///
/// A user with no ratings in `ratings` (a cold-start user, or one whose
/// ratings were all filtered out by context) has no mean and no similarities;
/// it is scored with the plain mean of the members' ratings of the item.
pub fn predict_in_cluster(
    ratings: &RatingsMatrix,
    members: &BTreeSet<UserId>,
    user: &UserId,
    item: &ItemId,
) -> Result<Prediction> {
    if !ratings.contains_item(item) {
        return Err(Error::UnknownItem(item.clone()));
    }
    let raters: Vec<(&UserId, f64)> = members
        .iter()
        .filter(|v| *v != user)
        .filter_map(|v| ratings.value(v, item).map(|r| (v, r)))
        .collect();

    let Some(user_mean) = ratings.row(user).map(|_| ratings.mean_rating(user)).transpose()? else {
        return Ok(match mean(raters.iter().map(|(_, r)| *r)) {
            Some(score) => Prediction {
                item: item.clone(),
                score,
                support: raters.len(),
                fallback: false,
            },
            None => Prediction {
                item: item.clone(),
                score: mean(ratings.iter().map(|r| r.value)).expect("item exists"),
                support: 0,
                fallback: true,
            },
        });
    };

    let (mut weighted, mut norm, mut support) = (0.0, 0.0, 0usize);
    for (neighbour, rating) in raters {
        let sim = effective_similarity(ratings, user, neighbour)?.value();
        if sim == 0.0 {
            continue;
        }
        weighted += sim * (rating - ratings.mean_rating(neighbour)?);
        norm += sim.abs();
        support += 1;
    }
    if support == 0 {
        return Ok(Prediction {
            item: item.clone(),
            score: user_mean,
            support: 0,
            fallback: true,
        });
    }

    let (lo, hi) = cluster_range(ratings, members, user);
    Ok(Prediction {
        item: item.clone(),
        score: (user_mean + weighted / norm).clamp(lo, hi),
        support,
        fallback: false,
    })
}

/// Range of rating values given by `members` and `user`.
fn cluster_range(ratings: &RatingsMatrix, members: &BTreeSet<UserId>, user: &UserId) -> (f64, f64) {
    members
        .iter()
        .chain(std::iter::once(user))
        .filter_map(|u| ratings.row(u))
        .flat_map(|row| row.values().map(|r| r.value))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationList {
    pub user: UserId,
    pub n: usize,
    /// Cluster the recommendations were drawn from.
    pub cluster: usize,
    /// Whether the cluster came from the social graph.
    pub cold_start: bool,
    /// The query as requested.
    pub query: ContextQuery,
    /// Dimensions of the query that survived relaxation.
    pub surviving: Vec<Dimension>,
    pub entries: Vec<Prediction>,
}

impl RecommendationList {
    pub fn items(&self) -> Vec<ItemId> {
        self.entries.iter().map(|p| p.item.clone()).collect()
    }
}

/// Runs the full pipeline for one user and returns at most `n` predictions,
/// best first. Predictions backed by neighbours always rank above fallback
/// ones; ties go to the smaller item id.
pub fn recommend_top_n(
    dataset: &Dataset,
    cs: &ClusterSet,
    user: &UserId,
    n: usize,
    query: &ContextQuery,
    min_support: usize,
) -> Result<RecommendationList> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    if !dataset.contains_user(user) {
        return Err(Error::UnknownUser(user.clone()));
    }
    let filtered = context_prefilter(&dataset.ratings, query, min_support);
    let (cluster, cold_start) = match cs.cluster_of(user) {
        Ok(index) => (index, false),
        Err(Error::NotClustered(_)) => (cold_start_cluster(dataset, cs, user)?, true),
        Err(other) => return Err(other),
    };
    let members = cs.members(cluster);

    let already_rated = dataset.ratings.row(user);
    let candidates: BTreeSet<&ItemId> = members
        .iter()
        .filter(|v| *v != user)
        .filter_map(|v| filtered.ratings.row(v))
        .flat_map(|row| row.keys())
        .filter(|item| already_rated.is_none_or(|row| !row.contains_key(*item)))
        .collect();

    let mut entries = candidates
        .into_iter()
        .map(|item| predict_in_cluster(&filtered.ratings, members, user, item))
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| {
        a.fallback
            .cmp(&b.fallback)
            .then(b.score.total_cmp(&a.score))
            .then_with(|| a.item.cmp(&b.item))
    });
    entries.truncate(n);

    Ok(RecommendationList {
        user: user.clone(),
        n,
        cluster,
        cold_start,
        query: query.clone(),
        surviving: filtered.applied.dimensions(),
        entries,
    })
}

/// Places a user without ratings in the cluster holding most of its social
/// neighbours (targets of its outgoing edges; friendships are stored in both
/// directions). Ties go to the lowest cluster index.
pub fn cold_start_cluster(dataset: &Dataset, cs: &ClusterSet, user: &UserId) -> Result<usize> {
    let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
    for neighbour in dataset.graph.neighbors(user) {
        if let Ok(index) = cs.cluster_of(neighbour) {
            *votes.entry(index).or_default() += 1;
        }
    }
    // max_by_key keeps the last maximum, so walk the indices backwards
    votes
        .into_iter()
        .rev()
        .max_by_key(|&(_, count)| count)
        .map(|(index, _)| index)
        .ok_or_else(|| Error::ColdStartUnresolvable(user.clone()))
}

/// Items ranked by number of ratings, then mean rating, then id.
pub fn popular_items(ratings: &RatingsMatrix, n: usize) -> Vec<ItemId> {
    let mut stats: BTreeMap<&ItemId, (usize, f64)> = BTreeMap::new();
    for r in ratings.iter() {
        let entry = stats.entry(&r.item).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += r.value;
    }
    let mut ranked: Vec<(&ItemId, usize, f64)> = stats
        .into_iter()
        .map(|(item, (count, sum))| (item, count, sum / count as f64))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(b.2.total_cmp(&a.2))
            .then_with(|| a.0.cmp(b.0))
    });
    ranked.into_iter().take(n).map(|(item, _, _)| item.clone()).collect()
}
