// Scores every unrated item for every user from its cluster neighbours
// and prints the top-3 list per user.

use socialrec::recommender::predict;
use socialrec::{cluster, recommend_top_n, ClusteringConfig, ContextQuery, Dataset, RatingsMatrix, SocialGraph};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ratings = RatingsMatrix::from_triples([
        ("alice", "dune", 5.0),
        ("alice", "heat", 1.0),
        ("alice", "solaris", 4.0),
        ("bob", "dune", 4.0),
        ("bob", "heat", 2.0),
        ("bob", "solaris", 5.0),
        ("bob", "alien", 5.0),
        ("carol", "heat", 5.0),
        ("carol", "ronin", 4.0),
        ("carol", "dune", 1.0),
        ("dave", "heat", 4.0),
        ("dave", "ronin", 5.0),
        ("dave", "alien", 2.0),
        ("erin", "dune", 5.0),
        ("erin", "alien", 4.0),
        ("erin", "heat", 2.0),
    ])?;
    let cs = cluster(&ratings, &ClusteringConfig::iterative(2, 20, 1e-9))?;
    for (index, c) in cs.clusters.iter().enumerate() {
        println!("cluster {index}: {:?}", c.members);
    }

    let dataset = Dataset::new(ratings.clone(), SocialGraph::new());
    for user in ratings.users() {
        let list = recommend_top_n(&dataset, &cs, user, 3, &ContextQuery::new(), 0)?;
        let shown: Vec<String> = list
            .entries
            .iter()
            .map(|p| {
                let tag = if p.fallback { " (user mean)" } else { "" };
                format!("{} {:.2}{tag}", p.item, p.score)
            })
            .collect();
        println!("{user}: {}", shown.join(", "));
    }

    let alice = ratings.users().next().expect("rated users").clone();
    for item in ratings.items() {
        let p = predict(&ratings, &cs, &alice, &item)?;
        println!("{alice}/{item}: score {:.3}, support {}, fallback {}", p.score, p.support, p.fallback);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
