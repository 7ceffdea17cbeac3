// Prints the pairwise similarity table for a small ratings matrix,
// including the pairs whose correlation is undefined.

use socialrec::similarity::SimilarityOutcome;
use socialrec::{pearson, RatingsMatrix};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ratings = RatingsMatrix::from_triples([
        ("User1", "Item1", 2.0),
        ("User1", "Item2", 5.0),
        ("User1", "Item3", 4.0),
        ("User2", "Item2", 6.0),
        ("User3", "Item1", 5.0),
        ("User3", "Item2", 5.0),
        ("User4", "Item1", 2.0),
        ("User4", "Item2", 1.0),
        ("User4", "Item3", 3.0),
    ])?;

    let users: Vec<_> = ratings.users().cloned().collect();
    for a in &users {
        for b in users.iter().filter(|b| a < *b) {
            match pearson(&ratings, a, b)? {
                SimilarityOutcome::Defined(s) => println!("{a} ~ {b}: {:+.4}", s.value()),
                SimilarityOutcome::Undefined(why) => println!("{a} ~ {b}: undefined ({why:?})"),
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
