use thiserror::Error;

use crate::dataset::{ItemId, UserId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{}duplicate rating for ({user}, {item})", line_prefix(*.line))]
    DuplicateRating {
        user: UserId,
        item: ItemId,
        line: Option<u64>,
    },

    #[error("rating for ({user}, {item}) must be a positive finite number, got {value}")]
    InvalidRating { user: UserId, item: ItemId, value: f64 },

    #[error("identifiers must be non-empty")]
    EmptyId,

    #[error("self-loop on user `{0}`")]
    SelfLoop(UserId),

    #[error("unknown user `{0}`")]
    UnknownUser(UserId),

    #[error("unknown item `{0}`")]
    UnknownItem(ItemId),

    #[error("user `{user}` has not rated item `{item}`")]
    UnratedItem { user: UserId, item: ItemId },

    #[error("mean over an empty item set")]
    EmptySupport,

    #[error("k = {k} is out of range for {users} rated users")]
    InvalidK { k: usize, users: usize },

    #[error("cluster {0} has no members")]
    EmptyCluster(usize),

    #[error("user `{0}` is not in any cluster")]
    NotClustered(UserId),

    #[error("cannot place cold-start user `{0}`: no clustered social neighbours")]
    ColdStartUnresolvable(UserId),

    #[error("relevant set is empty; user is not evaluable")]
    NotEvaluable,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn line_prefix(line: Option<u64>) -> String {
    match line {
        Some(line) => format!("line {line}: "),
        None => String::new(),
    }
}
