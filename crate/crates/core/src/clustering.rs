//! Similarity-driven k-means over users' rating vectors.
//!
//! The first `k` rated users (in id order) seed the centroids with exact
//! copies of their rating vectors; every other user is then compared with
//! each centroid by Pearson correlation and joins the most similar one.
//! That single pass is [`ClusteringMode::SinglePass`]. In
//! [`ClusteringMode::Iterative`] the centroids are afterwards replaced by the
//! per-item means of their members and all users are reassigned until the
//! centroids stop moving.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{ItemId, RatingsMatrix, UserId};
use crate::error::{Error, Result};
use crate::similarity::{pearson_paired, Similarity};

/// Pseudo-user rating vector representing a cluster.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub vector: BTreeMap<ItemId, f64>,
}

impl Centroid {
    /// Exact copy of a user's rating vector.
    pub fn of_user(ratings: &RatingsMatrix, user: &UserId) -> Result<Self> {
        let row = ratings
            .row(user)
            .ok_or_else(|| Error::UnknownUser(user.clone()))?;
        Ok(Centroid {
            vector: row.iter().map(|(i, r)| (i.clone(), r.value)).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusteringMode {
    SinglePass,
    Iterative,
}

impl ClusteringMode {
    pub fn name(self) -> &'static str {
        match self {
            ClusteringMode::SinglePass => "single-pass",
            ClusteringMode::Iterative => "iterative",
        }
    }
}

impl fmt::Display for ClusteringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClusteringMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-pass" | "single_pass" => Ok(ClusteringMode::SinglePass),
            "iterative" => Ok(ClusteringMode::Iterative),
            other => Err(Error::InvalidConfig(format!("unknown clustering mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub k: usize,
    pub mode: ClusteringMode,
    /// Upper bound on assignment passes (iterative mode).
    pub max_iterations: usize,
    /// Convergence threshold on total centroid movement (iterative mode).
    pub epsilon: f64,
}

impl ClusteringConfig {
    pub fn single_pass(k: usize) -> Self {
        ClusteringConfig {
            k,
            mode: ClusteringMode::SinglePass,
            max_iterations: 1,
            epsilon: 0.0,
        }
    }

    pub fn iterative(k: usize, max_iterations: usize, epsilon: f64) -> Self {
        ClusteringConfig {
            k,
            mode: ClusteringMode::Iterative,
            max_iterations,
            epsilon,
        }
    }

    pub fn validate(&self, rated_users: usize) -> Result<()> {
        if self.k == 0 || self.k > rated_users {
            return Err(Error::InvalidK {
                k: self.k,
                users: rated_users,
            });
        }
        if self.mode == ClusteringMode::Iterative {
            if self.max_iterations == 0 {
                return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
            }
            if self.epsilon.is_nan() || self.epsilon < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "epsilon must be non-negative, got {}",
                    self.epsilon
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub centroid: Centroid,
    pub members: BTreeSet<UserId>,
}

/// Partition of the rated users into `k` clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    pub k: usize,
    pub mode: ClusteringMode,
    pub iterations_run: usize,
    /// Number of users that were partitioned.
    pub num_users: usize,
}

impl ClusterSet {
    pub fn cluster_of(&self, user: &UserId) -> Result<usize> {
        self.clusters
            .iter()
            .position(|c| c.members.contains(user))
            .ok_or_else(|| Error::NotClustered(user.clone()))
    }

    pub fn members(&self, index: usize) -> &BTreeSet<UserId> {
        &self.clusters[index].members
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.members.len()).collect()
    }

    /// Member sets in cluster order.
    pub fn partition(&self) -> Vec<BTreeSet<UserId>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }

    /// Writes the text format: a `k=<k> mode=<mode> iterations=<n>` header
    /// followed by one `index<TAB>comma-separated members` line per cluster.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "k={} mode={} iterations={}",
            self.k, self.mode, self.iterations_run
        )?;
        for (index, cluster) in self.clusters.iter().enumerate() {
            let members: Vec<&str> = cluster.members.iter().map(UserId::as_str).collect();
            writeln!(out, "{index}\t{}", members.join(","))?;
        }
        Ok(())
    }

    /// Parses the text format back into a cluster set over `ratings`.
    ///
    /// Centroids are not part of the file; they are rebuilt as member means.
    /// The members must be exactly the rated users of `ratings`.
    pub fn read_text<R: BufRead>(input: R, ratings: &RatingsMatrix) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| parse_err(1, "missing header"))?;
        let (k, mode, iterations_run) = parse_header(&header)?;

        let mut partition: Vec<BTreeSet<UserId>> = Vec::with_capacity(k);
        let mut seen = BTreeSet::new();
        for (offset, line) in lines.enumerate() {
            let line = line?;
            let line_no = offset as u64 + 2;
            if line.is_empty() {
                continue;
            }
            let (index, members) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(line_no, "expected `index<TAB>members`"))?;
            let index: usize = index
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad cluster index `{index}`")))?;
            if index != partition.len() {
                return Err(parse_err(
                    line_no,
                    format!("expected cluster {}, found {index}", partition.len()),
                ));
            }
            let mut set = BTreeSet::new();
            for member in members.split(',').filter(|m| !m.is_empty()) {
                let user = UserId::new(member)?;
                if !ratings.contains_user(&user) {
                    return Err(parse_err(line_no, format!("`{user}` is not a rated user")));
                }
                if !seen.insert(user.clone()) {
                    return Err(parse_err(line_no, format!("`{user}` appears twice")));
                }
                set.insert(user);
            }
            if set.is_empty() {
                return Err(parse_err(line_no, format!("cluster {index} is empty")));
            }
            partition.push(set);
        }
        if partition.len() != k {
            return Err(parse_err(
                1,
                format!("header says k={k} but {} clusters follow", partition.len()),
            ));
        }
        if seen.len() != ratings.num_users() {
            return Err(Error::InvalidConfig(format!(
                "cluster file covers {} users but the ratings have {}",
                seen.len(),
                ratings.num_users()
            )));
        }
        let centroids = update_centroids(ratings, &partition)?;
        Ok(ClusterSet {
            clusters: centroids
                .into_iter()
                .zip(partition)
                .map(|(centroid, members)| Cluster { centroid, members })
                .collect(),
            k,
            mode,
            iterations_run,
            num_users: seen.len(),
        })
    }
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(header: &str) -> Result<(usize, ClusteringMode, usize)> {
    let mut k = None;
    let mut mode = None;
    let mut iterations = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("bad header field `{field}`")))?;
        let bad = || parse_err(1, format!("bad value in `{field}`"));
        match key {
            "k" => k = Some(value.parse().map_err(|_| bad())?),
            "mode" => mode = Some(value.parse().map_err(|_| bad())?),
            "iterations" => iterations = Some(value.parse().map_err(|_| bad())?),
            _ => return Err(parse_err(1, format!("unknown header field `{key}`"))),
        }
    }
    match (k, mode, iterations) {
        (Some(k), Some(mode), Some(iterations)) => Ok((k, mode, iterations)),
        _ => Err(parse_err(1, "header needs k=, mode= and iterations=")),
    }
}

/// The first `k` rated users in id order, each with a copy of its vector.
pub fn init_centroids(ratings: &RatingsMatrix, k: usize) -> Result<Vec<(UserId, Centroid)>> {
    if k == 0 || k > ratings.num_users() {
        return Err(Error::InvalidK {
            k,
            users: ratings.num_users(),
        });
    }
    ratings
        .users()
        .take(k)
        .map(|u| Ok((u.clone(), Centroid::of_user(ratings, u)?)))
        .collect()
}

/// Pearson correlation between a user and a centroid over their common
/// items, with undefined outcomes mapped to 0.
pub fn centroid_similarity(
    ratings: &RatingsMatrix,
    user: &UserId,
    centroid: &Centroid,
) -> Result<Similarity> {
    let row = ratings
        .row(user)
        .ok_or_else(|| Error::UnknownUser(user.clone()))?;
    let pairs: Vec<(f64, f64)> = row
        .iter()
        .filter_map(|(item, r)| centroid.vector.get(item).map(|&c| (r.value, c)))
        .collect();
    Ok(pearson_paired(&pairs).effective())
}

fn similarities(ratings: &RatingsMatrix, user: &UserId, centroids: &[Centroid]) -> Result<Vec<f64>> {
    centroids
        .iter()
        .map(|c| centroid_similarity(ratings, user, c).map(Similarity::value))
        .collect()
}

/// Index of the largest value; the lowest index wins ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (index, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = index;
        }
    }
    best
}

/// Sends each user to the centroid it is most similar to (lowest index on
/// ties).
pub fn assign(
    ratings: &RatingsMatrix,
    centroids: &[Centroid],
    users: &[UserId],
) -> Result<BTreeMap<UserId, usize>> {
    if centroids.is_empty() {
        return Err(Error::InvalidK {
            k: 0,
            users: ratings.num_users(),
        });
    }
    users
        .iter()
        .map(|u| Ok((u.clone(), argmax(&similarities(ratings, u, centroids)?))))
        .collect()
}

/// Like [`assign`], except a user whose current cluster is among the best
/// stays put.
fn reassign(
    ratings: &RatingsMatrix,
    centroids: &[Centroid],
    current: &BTreeMap<UserId, usize>,
) -> Result<BTreeMap<UserId, usize>> {
    current
        .iter()
        .map(|(u, &here)| {
            let sims = similarities(ratings, u, centroids)?;
            let best = argmax(&sims);
            let next = if sims[here] >= sims[best] { here } else { best };
            Ok((u.clone(), next))
        })
        .collect()
}

/// Per-item means of each member set's ratings. Items no member rated are
/// left out of the centroid.
pub fn update_centroids(ratings: &RatingsMatrix, partition: &[BTreeSet<UserId>]) -> Result<Vec<Centroid>> {
    partition
        .iter()
        .enumerate()
        .map(|(index, members)| {
            if members.is_empty() {
                return Err(Error::EmptyCluster(index));
            }
            let mut sums: BTreeMap<ItemId, (f64, usize)> = BTreeMap::new();
            for user in members {
                let row = ratings
                    .row(user)
                    .ok_or_else(|| Error::UnknownUser(user.clone()))?;
                for (item, r) in row {
                    let entry = sums.entry(item.clone()).or_insert((0.0, 0));
                    entry.0 += r.value;
                    entry.1 += 1;
                }
            }
            Ok(Centroid {
                vector: sums
                    .into_iter()
                    .map(|(item, (sum, count))| (item, sum / count as f64))
                    .collect(),
            })
        })
        .collect()
}

/// Sum over centroids of the Euclidean distance between successive vectors.
/// An item present on one side only contributes its full value.
pub fn centroid_movement(before: &[Centroid], after: &[Centroid]) -> f64 {
    before
        .iter()
        .zip(after)
        .map(|(a, b)| {
            let items: BTreeSet<&ItemId> = a.vector.keys().chain(b.vector.keys()).collect();
            items
                .into_iter()
                .map(|item| {
                    let x = a.vector.get(item).copied().unwrap_or(0.0);
                    let y = b.vector.get(item).copied().unwrap_or(0.0);
                    (x - y) * (x - y)
                })
                .sum::<f64>()
                .sqrt()
        })
        .sum()
}

fn to_partition(assignment: &BTreeMap<UserId, usize>, k: usize) -> Vec<BTreeSet<UserId>> {
    let mut partition = vec![BTreeSet::new(); k];
    for (user, &index) in assignment {
        partition[index].insert(user.clone());
    }
    partition
}

/// Refills every empty cluster with the worst-fitting user taken from a
/// cluster that can spare one. Users currently seeding a cluster are only
/// taken when nobody else is available.
fn repair_empty_clusters(
    ratings: &RatingsMatrix,
    centroids: &mut [Centroid],
    assignment: &mut BTreeMap<UserId, usize>,
    seeds: &mut [UserId],
) -> Result<()> {
    let k = centroids.len();
    loop {
        let partition = to_partition(assignment, k);
        let Some(empty) = partition.iter().position(BTreeSet::is_empty) else {
            return Ok(());
        };
        let mut pick: Option<(bool, f64, &UserId)> = None;
        for (user, &index) in assignment.iter() {
            if partition[index].len() < 2 {
                continue;
            }
            let is_seed = seeds.contains(user);
            let fit = centroid_similarity(ratings, user, &centroids[index])?.value();
            let candidate = (is_seed, fit, user);
            let better = match pick {
                None => true,
                Some((s, f, _)) => (is_seed, fit) < (s, f),
            };
            if better {
                pick = Some(candidate);
            }
        }
        // k <= users, so an empty cluster implies another holds at least two
        let (_, _, user) = pick.expect("an empty cluster implies a cluster with two members");
        let user = user.clone();
        centroids[empty] = Centroid::of_user(ratings, &user)?;
        seeds[empty] = user.clone();
        assignment.insert(user, empty);
    }
}

/// Partitions the rated users of `ratings` into `config.k` clusters.
pub fn cluster(ratings: &RatingsMatrix, config: &ClusteringConfig) -> Result<ClusterSet> {
    config.validate(ratings.num_users())?;
    let k = config.k;

    let seeded = init_centroids(ratings, k)?;
    let mut seeds: Vec<UserId> = seeded.iter().map(|(u, _)| u.clone()).collect();
    let mut centroids: Vec<Centroid> = seeded.into_iter().map(|(_, c)| c).collect();

    // Seeds own their clusters; only the remaining users are compared.
    let rest: Vec<UserId> = ratings.users().skip(k).cloned().collect();
    let mut assignment = assign(ratings, &centroids, &rest)?;
    for (index, seed) in seeds.iter().enumerate() {
        assignment.insert(seed.clone(), index);
    }
    let mut iterations_run = 1;

    if config.mode == ClusteringMode::Iterative {
        loop {
            let next = update_centroids(ratings, &to_partition(&assignment, k))?;
            let moved = centroid_movement(&centroids, &next);
            centroids = next;
            if moved <= config.epsilon || iterations_run >= config.max_iterations {
                break;
            }
            iterations_run += 1;
            assignment = reassign(ratings, &centroids, &assignment)?;
            repair_empty_clusters(ratings, &mut centroids, &mut assignment, &mut seeds)?;
        }
    }

    let partition = to_partition(&assignment, k);
    Ok(ClusterSet {
        clusters: centroids
            .into_iter()
            .zip(partition)
            .map(|(centroid, members)| Cluster { centroid, members })
            .collect(),
        k,
        mode: config.mode,
        iterations_run,
        num_users: ratings.num_users(),
    })
}
