//! Users, items, ratings, context tags and the social graph.
//!
//! Everything is stored in `BTreeMap`/`BTreeSet` so that iteration follows
//! lexicographic id order, which the clustering initialization and every
//! returned list depend on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self> {
                let id = id.into();
                if id.is_empty() {
                    return Err(Error::EmptyId);
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                Self::new(s)
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;

            fn try_from(s: String) -> Result<Self> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }
    };
}

id_type!(
    /// Opaque user token. Ordering is byte-lexicographic.
    UserId
);
id_type!(
    /// Opaque item token. Ordering is byte-lexicographic.
    ItemId
);

/// One of the four situational dimensions a rating can be tagged with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Location,
    Time,
    Weather,
    Emotion,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Location,
        Dimension::Time,
        Dimension::Weather,
        Dimension::Emotion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Location => "location",
            Dimension::Time => "time",
            Dimension::Weather => "weather",
            Dimension::Emotion => "emotion",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown context dimension `{s}`")))
    }
}

/// Context a rating was given in. An absent field means "unspecified".
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContextTags {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weather: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emotion: Option<String>,
}

impl ContextTags {
    pub fn get(&self, dim: Dimension) -> Option<&str> {
        match dim {
            Dimension::Location => self.location.as_deref(),
            Dimension::Time => self.time.as_deref(),
            Dimension::Weather => self.weather.as_deref(),
            Dimension::Emotion => self.emotion.as_deref(),
        }
    }

    /// Sets a dimension; an empty string clears it.
    pub fn set(&mut self, dim: Dimension, value: Option<String>) {
        let value = value.filter(|v| !v.is_empty());
        match dim {
            Dimension::Location => self.location = value,
            Dimension::Time => self.time = value,
            Dimension::Weather => self.weather = value,
            Dimension::Emotion => self.emotion = value,
        }
    }

    pub fn with(mut self, dim: Dimension, value: impl Into<String>) -> Self {
        self.set(dim, Some(value.into()));
        self
    }

    pub fn is_empty(&self) -> bool {
        Dimension::ALL.iter().all(|d| self.get(*d).is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub user: UserId,
    pub item: ItemId,
    pub value: f64,
    #[serde(default, skip_serializing_if = "ContextTags::is_empty")]
    pub context: ContextTags,
}

impl Rating {
    pub fn new(user: UserId, item: ItemId, value: f64) -> Self {
        Rating {
            user,
            item,
            value,
            context: ContextTags::default(),
        }
    }

    pub fn with_context(mut self, context: ContextTags) -> Self {
        self.context = context;
        self
    }
}

/// Sparse user × item table of strictly positive ratings.
///
/// An unrated pair is simply absent; no row is ever empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatingsMatrix {
    rows: BTreeMap<UserId, BTreeMap<ItemId, Rating>>,
    len: usize,
}

impl RatingsMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ratings(ratings: impl IntoIterator<Item = Rating>) -> Result<Self> {
        let mut matrix = Self::new();
        for rating in ratings {
            matrix.insert(rating)?;
        }
        Ok(matrix)
    }

    /// Convenience constructor for untagged `(user, item, value)` triples.
    pub fn from_triples<'a>(triples: impl IntoIterator<Item = (&'a str, &'a str, f64)>) -> Result<Self> {
        let mut matrix = Self::new();
        for (user, item, value) in triples {
            matrix.insert(Rating::new(UserId::new(user)?, ItemId::new(item)?, value))?;
        }
        Ok(matrix)
    }

    pub fn insert(&mut self, rating: Rating) -> Result<()> {
        if !(rating.value.is_finite() && rating.value > 0.0) {
            return Err(Error::InvalidRating {
                user: rating.user,
                item: rating.item,
                value: rating.value,
            });
        }
        let row = self.rows.entry(rating.user.clone()).or_default();
        if row.contains_key(&rating.item) {
            return Err(Error::DuplicateRating {
                user: rating.user,
                item: rating.item,
                line: None,
            });
        }
        row.insert(rating.item.clone(), rating);
        self.len += 1;
        Ok(())
    }

    pub fn get(&self, user: &UserId, item: &ItemId) -> Option<&Rating> {
        self.rows.get(user).and_then(|row| row.get(item))
    }

    pub fn value(&self, user: &UserId, item: &ItemId) -> Option<f64> {
        self.get(user, item).map(|r| r.value)
    }

    pub fn row(&self, user: &UserId) -> Option<&BTreeMap<ItemId, Rating>> {
        self.rows.get(user)
    }

    pub fn contains_user(&self, user: &UserId) -> bool {
        self.rows.contains_key(user)
    }

    pub fn contains_item(&self, item: &ItemId) -> bool {
        self.rows.values().any(|row| row.contains_key(item))
    }

    /// Rated users in canonical order.
    pub fn users(&self) -> impl Iterator<Item = &UserId> {
        self.rows.keys()
    }

    pub fn items(&self) -> BTreeSet<ItemId> {
        self.rows.values().flat_map(|row| row.keys().cloned()).collect()
    }

    /// All ratings, ordered by user then item.
    pub fn iter(&self) -> impl Iterator<Item = &Rating> {
        self.rows.values().flat_map(|row| row.values())
    }

    pub fn num_users(&self) -> usize {
        self.rows.len()
    }

    pub fn num_ratings(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Smallest and largest stored rating value.
    pub fn value_range(&self) -> Option<(f64, f64)> {
        self.iter().map(|r| r.value).fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// Mean of every rating the user has given.
    pub fn mean_rating(&self, user: &UserId) -> Result<f64> {
        let row = self
            .rows
            .get(user)
            .ok_or_else(|| Error::UnknownUser(user.clone()))?;
        Ok(row.values().map(|r| r.value).sum::<f64>() / row.len() as f64)
    }

    /// Keeps the ratings accepted by `keep`; rows left empty are dropped.
    pub fn filter(&self, mut keep: impl FnMut(&Rating) -> bool) -> RatingsMatrix {
        let mut out = RatingsMatrix::new();
        for (user, row) in &self.rows {
            let kept: BTreeMap<ItemId, Rating> = row
                .iter()
                .filter(|(_, r)| keep(r))
                .map(|(i, r)| (i.clone(), r.clone()))
                .collect();
            if !kept.is_empty() {
                out.len += kept.len();
                out.rows.insert(user.clone(), kept);
            }
        }
        out
    }

    /// Writes the canonical ratings CSV (full header, rows sorted by user
    /// then item). Re-ingesting the output yields an identical matrix.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(RATINGS_HEADER).map_err(csv_io)?;
        for r in self.iter() {
            let value = r.value.to_string();
            let ctx = |d| r.context.get(d).unwrap_or("");
            out.write_record([
                r.user.as_str(),
                r.item.as_str(),
                value.as_str(),
                ctx(Dimension::Location),
                ctx(Dimension::Time),
                ctx(Dimension::Weather),
                ctx(Dimension::Emotion),
            ])
            .map_err(csv_io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Relation carried by a social edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Mutual; always stored in both directions.
    Friend,
    Follower,
    Member,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Friend => "friend",
            Relation::Follower => "follower",
            Relation::Member => "member",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "friend" => Ok(Relation::Friend),
            "follower" => Ok(Relation::Follower),
            "member" => Ok(Relation::Member),
            other => Err(format!(
                "unknown relation `{other}` (expected friend, follower or member)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SocialEdge {
    pub source: UserId,
    pub target: UserId,
    pub relation: Relation,
}

/// Typed directed graph over users. Friend edges are kept symmetric.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SocialGraph {
    users: BTreeSet<UserId>,
    edges: BTreeSet<SocialEdge>,
}

impl SocialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_user(&mut self, user: UserId) {
        self.users.insert(user);
    }

    /// Adds an edge (and its mirror for friendships). Re-adding an existing
    /// edge is a no-op.
    pub fn add_edge(&mut self, source: UserId, target: UserId, relation: Relation) -> Result<()> {
        if source == target {
            return Err(Error::SelfLoop(source));
        }
        self.users.insert(source.clone());
        self.users.insert(target.clone());
        if relation == Relation::Friend {
            self.edges.insert(SocialEdge {
                source: target.clone(),
                target: source.clone(),
                relation,
            });
        }
        self.edges.insert(SocialEdge {
            source,
            target,
            relation,
        });
        Ok(())
    }

    pub fn users(&self) -> &BTreeSet<UserId> {
        &self.users
    }

    pub fn edges(&self) -> impl Iterator<Item = &SocialEdge> {
        self.edges.iter()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, source: &UserId, target: &UserId, relation: Relation) -> bool {
        self.edges.contains(&SocialEdge {
            source: source.clone(),
            target: target.clone(),
            relation,
        })
    }

    /// Distinct targets of `user`'s outgoing edges of any relation.
    pub fn neighbors<'a>(&'a self, user: &UserId) -> BTreeSet<&'a UserId> {
        self.outgoing(user).map(|e| &e.target).collect()
    }

    pub fn friends<'a>(&'a self, user: &UserId) -> BTreeSet<&'a UserId> {
        self.outgoing(user)
            .filter(|e| e.relation == Relation::Friend)
            .map(|e| &e.target)
            .collect()
    }

    fn outgoing<'a>(&'a self, user: &UserId) -> impl Iterator<Item = &'a SocialEdge> + 'a {
        let user = user.clone();
        self.edges.iter().filter(move |e| e.source == user)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(EDGES_HEADER).map_err(csv_io)?;
        for e in &self.edges {
            out.write_record([e.source.as_str(), e.target.as_str(), e.relation.name()])
                .map_err(csv_io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Ratings plus social graph plus the full user universe (which may contain
/// graph-only users who have not rated anything yet).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub ratings: RatingsMatrix,
    pub graph: SocialGraph,
    all_users: BTreeSet<UserId>,
}

impl Dataset {
    pub fn new(ratings: RatingsMatrix, graph: SocialGraph) -> Self {
        Self::with_users(ratings, graph, BTreeSet::new())
    }

    /// Like [`Dataset::new`] but also registers `extra` users that appear in
    /// neither the ratings nor the graph.
    pub fn with_users(ratings: RatingsMatrix, graph: SocialGraph, extra: BTreeSet<UserId>) -> Self {
        let mut all_users = extra;
        all_users.extend(ratings.users().cloned());
        all_users.extend(graph.users().iter().cloned());
        Dataset {
            ratings,
            graph,
            all_users,
        }
    }

    pub fn all_users(&self) -> &BTreeSet<UserId> {
        &self.all_users
    }

    pub fn contains_user(&self, user: &UserId) -> bool {
        self.all_users.contains(user)
    }
}

pub const RATINGS_HEADER: [&str; 7] = [
    "user_id", "item_id", "rating", "location", "time", "weather", "emotion",
];
pub const EDGES_HEADER: [&str; 3] = ["source", "target", "relation"];

fn csv_io(err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn csv_parse(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::Utf8 { err, .. } => Error::Parse {
            line,
            message: format!("invalid UTF-8: {err}"),
        },
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads the ratings CSV format.
///
/// The header must start with `user_id,item_id,rating`; any of the columns
/// `location`, `time`, `weather`, `emotion` may follow. A rating of exactly
/// `0` marks a missing cell and is skipped. Empty context cells are absent
/// tags.
pub fn ingest_ratings<R: Read>(source: R) -> Result<RatingsMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let header = reader.headers().map_err(csv_parse)?.clone();
    let mut context_columns = Vec::new();
    if header.len() < 3 || header.iter().take(3).ne(RATINGS_HEADER[..3].iter().copied()) {
        return Err(parse_err(
            1,
            format!(
                "expected header starting with `user_id,item_id,rating`, got `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    for name in header.iter().skip(3) {
        let dim: Dimension = name
            .parse()
            .map_err(|_| parse_err(1, format!("unknown header column `{name}`")))?;
        if context_columns.contains(&dim) {
            return Err(parse_err(1, format!("duplicate header column `{name}`")));
        }
        context_columns.push(dim);
    }

    let mut matrix = RatingsMatrix::new();
    let mut seen: BTreeSet<(UserId, ItemId)> = BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(csv_parse)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} columns, found {}", header.len(), record.len()),
            ));
        }
        let user = UserId::new(&record[0]).map_err(|_| parse_err(line, "empty user_id"))?;
        let item = ItemId::new(&record[1]).map_err(|_| parse_err(line, "empty item_id"))?;
        let raw = record[2].trim();
        let value: f64 = raw
            .parse()
            .map_err(|_| parse_err(line, format!("rating `{raw}` is not a number")))?;
        if !value.is_finite() || value < 0.0 {
            return Err(parse_err(
                line,
                format!("rating `{raw}` must be a non-negative finite number"),
            ));
        }
        if !seen.insert((user.clone(), item.clone())) {
            return Err(Error::DuplicateRating {
                user,
                item,
                line: Some(line),
            });
        }
        if value == 0.0 {
            continue;
        }
        let mut context = ContextTags::default();
        for (offset, dim) in context_columns.iter().enumerate() {
            let cell = &record[3 + offset];
            context.set(*dim, Some(cell.to_string()));
        }
        matrix.insert(Rating::new(user, item, value).with_context(context))?;
    }
    Ok(matrix)
}

/// Reads the edges CSV format (`source,target,relation`). Friend edges are
/// symmetrized; self-loops and unknown relations are rejected.
pub fn ingest_edges<R: Read>(source: R) -> Result<SocialGraph> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let header = reader.headers().map_err(csv_parse)?.clone();
    if header.iter().ne(EDGES_HEADER.iter().copied()) {
        return Err(parse_err(
            1,
            format!(
                "expected header `source,target,relation`, got `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut graph = SocialGraph::new();
    for record in reader.records() {
        let record = record.map_err(csv_parse)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(parse_err(
                line,
                format!("expected 3 columns, found {}", record.len()),
            ));
        }
        let source = UserId::new(&record[0]).map_err(|_| parse_err(line, "empty source"))?;
        let target = UserId::new(&record[1]).map_err(|_| parse_err(line, "empty target"))?;
        let relation: Relation = record[2].parse().map_err(|msg: String| parse_err(line, msg))?;
        graph
            .add_edge(source, target, relation)
            .map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(graph)
}

/// Items rated by both users, in id order.
pub fn co_rated_items(ratings: &RatingsMatrix, a: &UserId, b: &UserId) -> Result<Vec<ItemId>> {
    let row_a = ratings.row(a).ok_or_else(|| Error::UnknownUser(a.clone()))?;
    let row_b = ratings.row(b).ok_or_else(|| Error::UnknownUser(b.clone()))?;
    Ok(row_a
        .keys()
        .filter(|item| row_b.contains_key(*item))
        .cloned()
        .collect())
}

/// Mean of `user`'s ratings restricted to `over`.
pub fn user_mean(ratings: &RatingsMatrix, user: &UserId, over: &[ItemId]) -> Result<f64> {
    let row = ratings
        .row(user)
        .ok_or_else(|| Error::UnknownUser(user.clone()))?;
    if over.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut sum = 0.0;
    for item in over {
        let rating = row.get(item).ok_or_else(|| Error::UnratedItem {
            user: user.clone(),
            item: item.clone(),
        })?;
        sum += rating.value;
    }
    Ok(sum / over.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_USERS: &str = "user_id,item_id,rating\n\
        User1,Item1,2\nUser1,Item2,5\nUser2,Item1,0\nUser2,Item2,6\n\
        User3,Item1,5\nUser3,Item2,5\nUser4,Item1,2\nUser4,Item2,1\n";

    fn uid(s: &str) -> UserId {
        UserId::new(s).unwrap()
    }

    fn iid(s: &str) -> ItemId {
        ItemId::new(s).unwrap()
    }

    #[test]
    fn four_users_skips_missing_marker() {
        let m = ingest_ratings(FOUR_USERS.as_bytes()).unwrap();
        assert_eq!(m.num_ratings(), 7);
        assert_eq!(m.num_users(), 4);
        let user2: Vec<_> = m.row(&uid("User2")).unwrap().keys().cloned().collect();
        assert_eq!(user2, vec![iid("Item2")]);
        assert!(m.get(&uid("User2"), &iid("Item1")).is_none());
        assert!(m.iter().all(|r| r.value > 0.0));
    }

    #[test]
    fn empty_body_is_empty_matrix() {
        let m = ingest_ratings("user_id,item_id,rating\n".as_bytes()).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn negative_rating_reports_line() {
        let err = ingest_ratings("user_id,item_id,rating\nUser1,Item1,-3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn malformed_rows() {
        let bad_count = "user_id,item_id,rating\nUser1,Item1,2\nUser1,Item2\n";
        assert!(matches!(
            ingest_ratings(bad_count.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let non_numeric = "user_id,item_id,rating\nUser1,Item1,lots\n";
        assert!(matches!(
            ingest_ratings(non_numeric.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let nan = "user_id,item_id,rating\nUser1,Item1,NaN\n";
        assert!(matches!(ingest_ratings(nan.as_bytes()), Err(Error::Parse { .. })));
        let bad_header = "user,item,rating\n";
        assert!(matches!(
            ingest_ratings(bad_header.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_pair_rejected() {
        let dup = "user_id,item_id,rating\nUser1,Item1,2\nUser1,Item1,4\n";
        match ingest_ratings(dup.as_bytes()) {
            Err(Error::DuplicateRating { line: Some(3), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn context_columns_optional_and_empty_cells_absent() {
        let src = "user_id,item_id,rating,location,time,weather,emotion\n\
                   u,i,4,athens,,sunny,\nu,j,3,,,,\n";
        let m = ingest_ratings(src.as_bytes()).unwrap();
        let r = m.get(&uid("u"), &iid("i")).unwrap();
        assert_eq!(r.context.location.as_deref(), Some("athens"));
        assert_eq!(r.context.time, None);
        assert_eq!(r.context.weather.as_deref(), Some("sunny"));
        assert!(m.get(&uid("u"), &iid("j")).unwrap().context.is_empty());

        let partial = "user_id,item_id,rating,emotion\nu,i,4,happy\n";
        let m = ingest_ratings(partial.as_bytes()).unwrap();
        assert_eq!(
            m.get(&uid("u"), &iid("i")).unwrap().context.emotion.as_deref(),
            Some("happy")
        );
    }

    #[test]
    fn csv_round_trip() {
        let src = "user_id,item_id,rating,location\nb,x,2.5,home\na,y,1e-3,\n";
        let m = ingest_ratings(src.as_bytes()).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("user_id,item_id,rating,location,time,weather,emotion\na,y,0.001"));
        assert_eq!(ingest_ratings(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn friend_edges_are_symmetrized() {
        let g = ingest_edges("source,target,relation\nUser1,User3,friend\n".as_bytes()).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert!(g.contains_edge(&uid("User1"), &uid("User3"), Relation::Friend));
        assert!(g.contains_edge(&uid("User3"), &uid("User1"), Relation::Friend));
    }

    #[test]
    fn follower_edges_stay_directed() {
        let g = ingest_edges("source,target,relation\nUser5,User2,follower\n".as_bytes()).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(g.contains_edge(&uid("User5"), &uid("User2"), Relation::Follower));
        assert!(g.neighbors(&uid("User2")).is_empty());
    }

    #[test]
    fn edge_errors() {
        let self_loop = "source,target,relation\nUser1,User1,friend\n";
        assert!(matches!(
            ingest_edges(self_loop.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let unknown = "source,target,relation\nUser1,User2,enemy\n";
        assert!(matches!(
            ingest_edges(unknown.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn co_rated_and_means_on_four_users() {
        let m = ingest_ratings(FOUR_USERS.as_bytes()).unwrap();
        let both = co_rated_items(&m, &uid("User1"), &uid("User4")).unwrap();
        assert_eq!(both, vec![iid("Item1"), iid("Item2")]);
        assert_eq!(
            co_rated_items(&m, &uid("User1"), &uid("User2")).unwrap(),
            vec![iid("Item2")]
        );
        assert_eq!(
            co_rated_items(&m, &uid("User1"), &uid("User1")).unwrap(),
            vec![iid("Item1"), iid("Item2")]
        );
        assert!(matches!(
            co_rated_items(&m, &uid("User1"), &uid("Nobody")),
            Err(Error::UnknownUser(_))
        ));

        assert_eq!(user_mean(&m, &uid("User1"), &both).unwrap(), 3.5);
        assert_eq!(user_mean(&m, &uid("User4"), &both).unwrap(), 1.5);
        assert_eq!(user_mean(&m, &uid("User3"), &[iid("Item1")]).unwrap(), 5.0);
        assert!(matches!(
            user_mean(&m, &uid("User1"), &[]),
            Err(Error::EmptySupport)
        ));
        assert!(matches!(
            user_mean(&m, &uid("User2"), &both),
            Err(Error::UnratedItem { .. })
        ));
    }

    #[test]
    fn dataset_user_universe() {
        let m = ingest_ratings(FOUR_USERS.as_bytes()).unwrap();
        let g = ingest_edges("source,target,relation\nUser9,User1,friend\n".as_bytes()).unwrap();
        let d = Dataset::new(m, g);
        assert_eq!(d.all_users().len(), 5);
        assert!(d.contains_user(&uid("User9")));
        assert!(!d.ratings.contains_user(&uid("User9")));
    }

    #[test]
    fn ids_must_be_non_empty() {
        assert!(matches!(UserId::new(""), Err(Error::EmptyId)));
        assert!(matches!(
            RatingsMatrix::from_triples([("u", "i", 0.0)]),
            Err(Error::InvalidRating { .. })
        ));
    }
}
