// Filters ratings by situation before recommending, and shows how a query
// that matches too little gets relaxed.

use socialrec::recommender::context_prefilter;
use socialrec::{
    cluster, recommend_top_n, ClusteringConfig, ContextQuery, ContextTags, Dataset, Dimension, ItemId, Rating,
    RatingsMatrix, SocialGraph, UserId,
};

fn rating(user: &str, item: &str, value: f64, tags: &[(Dimension, &str)]) -> Rating {
    let context = tags
        .iter()
        .fold(ContextTags::default(), |acc, (d, v)| acc.with(*d, *v));
    Rating::new(UserId::new(user).unwrap(), ItemId::new(item).unwrap(), value).with_context(context)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    use Dimension::*;
    let ratings = RatingsMatrix::from_ratings([
        rating("ann", "acropolis", 5.0, &[(Location, "athens"), (Weather, "sunny")]),
        rating("ann", "museum", 3.0, &[(Location, "athens"), (Weather, "rainy")]),
        rating("ann", "beach", 4.0, &[(Location, "volos"), (Emotion, "happy")]),
        rating("ben", "acropolis", 4.0, &[(Location, "athens"), (Time, "morning")]),
        rating("ben", "museum", 5.0, &[(Location, "athens"), (Weather, "rainy")]),
        rating("ben", "taverna", 4.0, &[(Location, "athens"), (Time, "evening")]),
        rating("cat", "beach", 5.0, &[(Location, "volos"), (Weather, "sunny")]),
        rating("cat", "taverna", 2.0, &[(Location, "athens"), (Emotion, "sad")]),
        rating("cat", "museum", 1.0, &[(Location, "athens")]),
    ])?;

    let query: ContextQuery = "location=athens,emotion=happy".parse()?;
    for min_support in [0, 1, 4] {
        let out = context_prefilter(&ratings, &query, min_support);
        println!(
            "min_support {min_support}: {} ratings kept, applied `{}`, relaxed {:?}",
            out.ratings.num_ratings(),
            out.applied,
            out.relaxed
        );
    }

    let cs = cluster(&ratings, &ClusteringConfig::single_pass(1))?;
    let dataset = Dataset::new(ratings, SocialGraph::new());
    let list = recommend_top_n(&dataset, &cs, &UserId::new("ann")?, 3, &query, 3)?;
    println!("{}", serde_json::to_string_pretty(&list)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
