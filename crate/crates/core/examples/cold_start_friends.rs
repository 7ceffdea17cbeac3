// Recommends to users who have never rated anything by placing them in the
// cluster most of their friends belong to. A user with no usable links
// gets the most popular items instead.

use socialrec::recommender::{cold_start_cluster, popular_items};
use socialrec::{
    cluster, recommend_top_n, ClusteringConfig, ContextQuery, Dataset, Error, RatingsMatrix, Relation,
    SocialGraph, UserId,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ratings = RatingsMatrix::from_triples([
        ("User1", "Item1", 2.0),
        ("User1", "Item2", 5.0),
        ("User2", "Item2", 6.0),
        ("User3", "Item1", 5.0),
        ("User3", "Item2", 5.0),
        ("User3", "Item3", 4.0),
        ("User4", "Item1", 2.0),
        ("User4", "Item2", 1.0),
    ])?;
    let id = |s: &str| UserId::new(s).unwrap();
    let mut graph = SocialGraph::new();
    graph.add_edge(id("Newcomer"), id("User1"), Relation::Friend)?;
    graph.add_edge(id("Newcomer"), id("User3"), Relation::Friend)?;
    graph.add_edge(id("Newcomer"), id("User4"), Relation::Follower)?;
    graph.add_edge(id("User2"), id("Lurker"), Relation::Follower)?;

    let dataset = Dataset::new(ratings, graph);
    let cs = cluster(&dataset.ratings, &ClusteringConfig::single_pass(2))?;

    for user in ["Newcomer", "Lurker"] {
        match cold_start_cluster(&dataset, &cs, &id(user)) {
            Ok(index) => {
                let list = recommend_top_n(&dataset, &cs, &id(user), 3, &ContextQuery::new(), 0)?;
                println!("{user} joins cluster {index}, gets {:?}", list.items());
            }
            Err(Error::ColdStartUnresolvable(_)) => {
                println!("{user} has no clustered neighbours, popular items: {:?}", popular_items(&dataset.ratings, 3));
            }
            Err(other) => return Err(other.into()),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
