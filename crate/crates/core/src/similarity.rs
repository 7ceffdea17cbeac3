//! Pearson correlation between users' sparse rating vectors.
//!
//! Both users are centred on their own mean over the *co-rated* items, so the
//! result is the correlation of paired samples and always lies in [-1, 1].
//! Fewer than [`MIN_OVERLAP`] co-rated items, or a flat vector on either
//! side, leaves the correlation undefined.

use serde::{Deserialize, Serialize};

use crate::dataset::{co_rated_items, RatingsMatrix, UserId};
use crate::error::{Error, Result};

/// Minimum number of co-rated items for a defined correlation.
pub const MIN_OVERLAP: usize = 2;

/// Largest floating-point spill past ±1 that is silently clamped.
const SPILL: f64 = 1e-12;

/// A correlation value in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Similarity(f64);

impl Similarity {
    pub const ZERO: Similarity = Similarity(0.0);

    /// Returns `None` for values outside [-1, 1] or NaN.
    pub fn new(value: f64) -> Option<Self> {
        (-1.0..=1.0).contains(&value).then_some(Similarity(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UndefinedReason {
    InsufficientOverlap,
    ZeroVariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SimilarityOutcome {
    Defined(Similarity),
    Undefined(UndefinedReason),
}

impl SimilarityOutcome {
    /// Undefined outcomes count as a neutral 0.
    pub fn effective(self) -> Similarity {
        match self {
            SimilarityOutcome::Defined(s) => s,
            SimilarityOutcome::Undefined(_) => Similarity::ZERO,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, SimilarityOutcome::Defined(_))
    }
}

/// Pearson correlation of paired samples `(x, y)`.
///
/// The pairs must be supplied in a canonical order; swapping the roles of
/// `x` and `y` then yields a bit-identical result.
pub fn pearson_paired(pairs: &[(f64, f64)]) -> SimilarityOutcome {
    if pairs.len() < MIN_OVERLAP {
        return SimilarityOutcome::Undefined(UndefinedReason::InsufficientOverlap);
    }
    let (x0, y0) = pairs[0];
    if pairs.iter().all(|&(x, _)| x == x0) || pairs.iter().all(|&(_, y)| y == y0) {
        return SimilarityOutcome::Undefined(UndefinedReason::ZeroVariance);
    }

    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / n;

    let (mut cross, mut ss_x, mut ss_y) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cross += dx * dy;
        ss_x += dx * dx;
        ss_y += dy * dy;
    }
    if ss_x == 0.0 || ss_y == 0.0 {
        return SimilarityOutcome::Undefined(UndefinedReason::ZeroVariance);
    }

    let r = cross / (ss_x * ss_y).sqrt();
    debug_assert!(r.abs() <= 1.0 + SPILL, "correlation {r} spilled past ±1");
    SimilarityOutcome::Defined(Similarity(r.clamp(-1.0, 1.0)))
}

/// Pearson correlation between two rated users over their co-rated items.
pub fn pearson(ratings: &RatingsMatrix, a: &UserId, b: &UserId) -> Result<SimilarityOutcome> {
    let items = co_rated_items(ratings, a, b)?;
    let (row_a, row_b) = (ratings.row(a).unwrap(), ratings.row(b).unwrap());
    let pairs: Vec<(f64, f64)> = items
        .iter()
        .map(|item| (row_a[item].value, row_b[item].value))
        .collect();
    Ok(pearson_paired(&pairs))
}

/// [`pearson`] with undefined outcomes mapped to 0.
pub fn effective_similarity(ratings: &RatingsMatrix, a: &UserId, b: &UserId) -> Result<Similarity> {
    pearson(ratings, a, b).map(SimilarityOutcome::effective)
}

/// Effective similarity of `a` against each candidate, in candidate order.
pub fn similarity_row(
    ratings: &RatingsMatrix,
    a: &UserId,
    candidates: &[UserId],
) -> Result<Vec<(UserId, Similarity)>> {
    if !ratings.contains_user(a) {
        return Err(Error::UnknownUser(a.clone()));
    }
    candidates
        .iter()
        .map(|c| Ok((c.clone(), effective_similarity(ratings, a, c)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uid(s: &str) -> UserId {
        UserId::new(s).unwrap()
    }

    fn four_users() -> RatingsMatrix {
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

    fn defined(outcome: SimilarityOutcome) -> f64 {
        match outcome {
            SimilarityOutcome::Defined(s) => s.value(),
            other => panic!("expected a defined similarity, got {other:?}"),
        }
    }

    #[test]
    fn perfect_correlations() {
        let m = RatingsMatrix::from_triples([
            ("a", "i1", 1.0),
            ("a", "i2", 2.0),
            ("a", "i3", 3.0),
            ("b", "i1", 1.0),
            ("b", "i2", 2.0),
            ("b", "i3", 3.0),
            ("c", "i1", 3.0),
            ("c", "i2", 2.0),
            ("c", "i3", 1.0),
        ])
        .unwrap();
        assert_eq!(defined(pearson(&m, &uid("a"), &uid("b")).unwrap()), 1.0);
        assert_eq!(defined(pearson(&m, &uid("a"), &uid("c")).unwrap()), -1.0);
    }

    #[test]
    fn four_users_cases() {
        let m = four_users();
        let r14 = defined(pearson(&m, &uid("User1"), &uid("User4")).unwrap());
        assert!((r14 + 1.0).abs() <= 1e-12);
        assert_eq!(
            pearson(&m, &uid("User3"), &uid("User1")).unwrap(),
            SimilarityOutcome::Undefined(UndefinedReason::ZeroVariance)
        );
        assert_eq!(
            pearson(&m, &uid("User1"), &uid("User2")).unwrap(),
            SimilarityOutcome::Undefined(UndefinedReason::InsufficientOverlap)
        );
    }

    #[test]
    fn effective_maps_undefined_to_zero() {
        let m = four_users();
        assert_eq!(effective_similarity(&m, &uid("User3"), &uid("User1")).unwrap().value(), 0.0);
        assert_eq!(effective_similarity(&m, &uid("User1"), &uid("User1")).unwrap().value(), 1.0);
        assert!(
            (effective_similarity(&m, &uid("User1"), &uid("User4")).unwrap().value() + 1.0).abs()
                <= 1e-12
        );
        assert!(matches!(
            effective_similarity(&m, &uid("User1"), &uid("Ghost")),
            Err(Error::UnknownUser(_))
        ));
    }

    #[test]
    fn row_preserves_candidate_order() {
        let m = four_users();
        assert!(similarity_row(&m, &uid("User1"), &[]).unwrap().is_empty());
        let row = similarity_row(
            &m,
            &uid("User1"),
            &[uid("User2"), uid("User3"), uid("User4"), uid("User1")],
        )
        .unwrap();
        let values: Vec<(String, f64)> = row
            .into_iter()
            .map(|(u, s)| (u.to_string(), s.value()))
            .collect();
        assert_eq!(values[0], ("User2".into(), 0.0));
        assert_eq!(values[1], ("User3".into(), 0.0));
        assert_eq!(values[2].0, "User4");
        assert!((values[2].1 + 1.0).abs() <= 1e-12);
        assert_eq!(values[3], ("User1".into(), 1.0));
    }

    #[test]
    fn similarity_bounds() {
        assert!(Similarity::new(1.0).is_some());
        assert!(Similarity::new(-1.0000001).is_none());
        assert!(Similarity::new(f64::NAN).is_none());
    }
}
