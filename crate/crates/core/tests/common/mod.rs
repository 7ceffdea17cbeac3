//! Test-only generators and brute-force oracles.
//!
//! The oracles work on a dense `Option<f64>` grid and evaluate the formulas
//! directly, without touching the library's sparse structures.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socialrec::{ItemId, Rating, RatingsMatrix, UserId};

pub fn uid(s: &str) -> UserId {
    UserId::new(s).unwrap()
}

pub fn iid(s: &str) -> ItemId {
    ItemId::new(s).unwrap()
}

pub fn four_users() -> RatingsMatrix {
    RatingsMatrix::from_triples([
        ("User1", "Item1", 2.0),
        ("User1", "Item2", 5.0),
        ("User2", "Item2", 6.0),
        ("User3", "Item1", 5.0),
        ("User3", "Item2", 5.0),
        ("User4", "Item1", 2.0),
        ("User4", "Item2", 1.0),
    ])
    .unwrap()
}

/// Dense users × items grid; `None` is an unrated cell.
#[derive(Debug, Clone)]
pub struct Dense {
    pub users: Vec<String>,
    pub items: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl Dense {
    /// Random grid with integer ratings in `1..=max_rating`, each cell
    /// present with probability `density`. Every user keeps at least one
    /// rating.
    pub fn random(rng: &mut ChaCha8Rng, users: usize, items: usize, density: f64, max_rating: u32) -> Dense {
        let mut cells = vec![vec![None; items]; users];
        for row in cells.iter_mut() {
            for cell in row.iter_mut() {
                if rng.gen_bool(density) {
                    *cell = Some(rng.gen_range(1..=max_rating) as f64);
                }
            }
            if row.iter().all(Option::is_none) {
                let j = rng.gen_range(0..items);
                row[j] = Some(rng.gen_range(1..=max_rating) as f64);
            }
        }
        Dense {
            users: (0..users).map(|u| format!("u{u:03}")).collect(),
            items: (0..items).map(|i| format!("i{i:02}")).collect(),
            cells,
        }
    }

    pub fn from_seed(seed: u64, users: usize, items: usize, density: f64, max_rating: u32) -> Dense {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Dense::random(&mut rng, users, items, density, max_rating)
    }

    pub fn matrix(&self) -> RatingsMatrix {
        let mut ratings = Vec::new();
        for (u, row) in self.cells.iter().enumerate() {
            for (i, cell) in row.iter().enumerate() {
                if let Some(v) = cell {
                    ratings.push(Rating::new(uid(&self.users[u]), iid(&self.items[i]), *v));
                }
            }
        }
        RatingsMatrix::from_ratings(ratings).unwrap()
    }

    pub fn user_index(&self, user: &UserId) -> usize {
        self.users.iter().position(|u| u == user.as_str()).unwrap()
    }

    pub fn item_index(&self, item: &ItemId) -> usize {
        self.items.iter().position(|i| i == item.as_str()).unwrap()
    }

    pub fn full_mean(&self, u: usize) -> f64 {
        let values: Vec<f64> = self.cells[u].iter().flatten().copied().collect();
        values.iter().sum::<f64>() / values.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleSim {
    Defined(f64),
    InsufficientOverlap,
    ZeroVariance,
}

impl OracleSim {
    pub fn effective(self) -> f64 {
        match self {
            OracleSim::Defined(v) => v,
            _ => 0.0,
        }
    }
}

/// Direct evaluation of
/// Σ(x−x̄)(y−ȳ) / (√Σ(x−x̄)² · √Σ(y−ȳ)²)
/// over the columns both rows have rated, means taken over those columns.
pub fn oracle_pearson(a: &[Option<f64>], b: &[Option<f64>]) -> OracleSim {
    let common: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .collect();
    if common.len() < 2 {
        return OracleSim::InsufficientOverlap;
    }
    let n = common.len() as f64;
    let mx: f64 = common.iter().map(|c| c.0).sum::<f64>() / n;
    let my: f64 = common.iter().map(|c| c.1).sum::<f64>() / n;
    let num: f64 = common.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let dx: f64 = common.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>().sqrt();
    let dy: f64 = common.iter().map(|(_, y)| (y - my).powi(2)).sum::<f64>().sqrt();
    if dx < 1e-12 || dy < 1e-12 {
        return OracleSim::ZeroVariance;
    }
    OracleSim::Defined(num / (dx * dy))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePrediction {
    pub score: f64,
    pub support: usize,
    pub fallback: bool,
}

/// Brute-force user-based CF score for user `u` and item `i`, using only
/// the rows listed in `cluster` (which contains `u`).
pub fn oracle_predict(dense: &Dense, cluster: &[usize], u: usize, i: usize) -> OraclePrediction {
    let mean_u = dense.full_mean(u);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut support = 0;
    for &v in cluster {
        if v == u {
            continue;
        }
        let Some(r) = dense.cells[v][i] else { continue };
        let s = oracle_pearson(&dense.cells[u], &dense.cells[v]).effective();
        if s == 0.0 {
            continue;
        }
        num += s * (r - dense.full_mean(v));
        den += s.abs();
        support += 1;
    }
    if support == 0 {
        return OraclePrediction {
            score: mean_u,
            support: 0,
            fallback: true,
        };
    }
    let observed: Vec<f64> = cluster
        .iter()
        .flat_map(|&v| dense.cells[v].iter().flatten().copied())
        .collect();
    let lo = observed.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = observed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    OraclePrediction {
        score: (mean_u + num / den).clamp(lo, hi),
        support,
        fallback: false,
    }
}

pub fn set_of(names: &[&str]) -> BTreeSet<UserId> {
    names.iter().map(|n| uid(n)).collect()
}

/// Proptest strategy for dense grids of up to `max_users` × `max_items`
/// with ratings in `1..=max_rating`.
pub fn dense_strategy(
    max_users: usize,
    max_items: usize,
    max_rating: u32,
) -> impl proptest::strategy::Strategy<Value = Dense> {
    use proptest::prelude::*;
    (1..=max_users, 1..=max_items)
        .prop_flat_map(move |(users, items)| {
            let cell = proptest::option::weighted(0.5, 1..=max_rating);
            proptest::collection::vec(proptest::collection::vec(cell, items), users)
        })
        .prop_map(|grid| {
            let users = grid.len();
            let items = grid[0].len();
            let cells = grid
                .into_iter()
                .enumerate()
                .map(|(u, row)| {
                    let mut row: Vec<Option<f64>> = row.into_iter().map(|c| c.map(f64::from)).collect();
                    if row.iter().all(Option::is_none) {
                        row[u % items] = Some(1.0 + (u % 3) as f64);
                    }
                    row
                })
                .collect();
            Dense {
                users: (0..users).map(|u| format!("u{u:03}")).collect(),
                items: (0..items).map(|i| format!("i{i:02}")).collect(),
                cells,
            }
        })
}
