mod common;

use std::collections::BTreeSet;

use common::{iid, uid};
use proptest::prelude::*;
use socialrec::dataset::co_rated_items;
use socialrec::{ingest_edges, ingest_ratings, ContextTags, Dimension, Rating, RatingsMatrix, Relation};

fn tag() -> impl Strategy<Value = Option<String>> {
    proptest::option::of(prop_oneof![Just("athens"), Just("night"), Just("a b"), Just("x,y"), Just("\"q\"")])
        .prop_map(|t| t.map(str::to_string))
}

fn tagged_matrix() -> impl Strategy<Value = RatingsMatrix> {
    proptest::collection::btree_map(
        (0..6u8, 0..6u8),
        (0.001f64..1000.0, tag(), tag(), tag(), tag()),
        0..30,
    )
    .prop_map(|cells| {
        RatingsMatrix::from_ratings(cells.into_iter().map(|((u, i), (v, l, t, w, e))| {
            let mut tags = ContextTags::default();
            tags.set(Dimension::Location, l);
            tags.set(Dimension::Time, t);
            tags.set(Dimension::Weather, w);
            tags.set(Dimension::Emotion, e);
            Rating::new(uid(&format!("user {u}")), iid(&format!("item-{i}")), v).with_context(tags)
        }))
        .unwrap()
    })
}

proptest! {
    #[test]
    fn csv_round_trip(m in tagged_matrix()) {
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = ingest_ratings(buf.as_slice()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn zero_cells_are_missing(cells in proptest::collection::btree_map((0..5u8, 0..5u8), 0..4u8, 1..20)) {
        let mut csv = String::from("user_id,item_id,rating\n");
        for ((u, i), v) in &cells {
            csv.push_str(&format!("u{u},i{i},{v}\n"));
        }
        let m = ingest_ratings(csv.as_bytes()).unwrap();
        for ((u, i), v) in &cells {
            let stored = m.value(&uid(&format!("u{u}")), &iid(&format!("i{i}")));
            if *v == 0 {
                prop_assert!(stored.is_none());
            } else {
                prop_assert_eq!(stored, Some(f64::from(*v)));
            }
        }
        prop_assert!(m.iter().all(|r| r.value != 0.0));
        prop_assert_eq!(m.num_ratings(), cells.values().filter(|v| **v != 0).count());
    }

    #[test]
    fn friend_edges_are_symmetric(edges in proptest::collection::vec((0..6u8, 0..6u8, 0..3u8), 0..25)) {
        let mut csv = String::from("source,target,relation\n");
        for (a, b, r) in edges.iter().filter(|(a, b, _)| a != b) {
            let rel = ["friend", "follower", "member"][*r as usize];
            csv.push_str(&format!("p{a},p{b},{rel}\n"));
        }
        let graph = ingest_edges(csv.as_bytes()).unwrap();
        for e in graph.edges() {
            if e.relation == Relation::Friend {
                prop_assert!(graph.contains_edge(&e.target, &e.source, Relation::Friend));
            }
        }
        for (a, b, r) in edges.iter().filter(|(a, b, _)| a != b) {
            let (pa, pb) = (uid(&format!("p{a}")), uid(&format!("p{b}")));
            let rel = [Relation::Friend, Relation::Follower, Relation::Member][*r as usize];
            prop_assert!(graph.contains_edge(&pa, &pb, rel));
        }
    }

    #[test]
    fn co_rated_is_symmetric(dense in common::dense_strategy(6, 6, 5)) {
        let m = dense.matrix();
        let users: Vec<_> = m.users().cloned().collect();
        for a in &users {
            for b in &users {
                let ab: BTreeSet<_> = co_rated_items(&m, a, b).unwrap().into_iter().collect();
                let ba: BTreeSet<_> = co_rated_items(&m, b, a).unwrap().into_iter().collect();
                prop_assert_eq!(ab, ba);
            }
        }
    }
}
