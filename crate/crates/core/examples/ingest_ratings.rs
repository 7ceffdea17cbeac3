// Reads a ratings file and an edge list, then prints what was stored.
//
// A `0` in the ratings column is a missing cell, not a rating.
//
// ```bash
// cargo run -p socialrec --example ingest_ratings
// ```

use socialrec::{ingest_edges, ingest_ratings, Dataset, UserId};

const RATINGS: &str = "\
user_id,item_id,rating,location
User1,Item1,2,athens
User1,Item2,5,
User2,Item1,0,
User2,Item2,6,patras
User3,Item1,5,
User3,Item2,5,athens
User4,Item1,2,
User4,Item2,1,
";

const EDGES: &str = "\
source,target,relation
User1,User3,friend
User4,User2,follower
Newcomer,User1,member
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ratings = ingest_ratings(RATINGS.as_bytes())?;
    let graph = ingest_edges(EDGES.as_bytes())?;
    let dataset = Dataset::new(ratings, graph);

    println!(
        "{} ratings from {} users over {} items",
        dataset.ratings.num_ratings(),
        dataset.ratings.num_users(),
        dataset.ratings.items().len()
    );
    let user2 = UserId::new("User2")?;
    for (item, rating) in dataset.ratings.row(&user2).into_iter().flatten() {
        println!("User2 rated {item}: {}", rating.value);
    }
    println!("friends of User3: {:?}", dataset.graph.friends(&UserId::new("User3")?));
    println!("all users: {:?}", dataset.all_users());

    let mut normalized = Vec::new();
    dataset.ratings.write_csv(&mut normalized)?;
    print!("{}", String::from_utf8(normalized)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
