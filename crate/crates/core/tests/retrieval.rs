use cosc_core::retrieval::{
    average_precision, mean_average_precision, rank_n_accuracy, retrieve, Query, RankedEntry, RankedList,
    RetrievalIndex,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    gallery: Vec<Vec<f64>>,
    ids: Vec<u32>,
    cams: Vec<u32>,
    queries: Vec<Query>,
}

fn instance(rng: &mut ChaCha8Rng) -> Instance {
    let g = rng.random_range(1..=20);
    let dim = rng.random_range(1..=4);
    // Small integer grid so that distance ties actually occur.
    let gallery = (0..g)
        .map(|_| (0..dim).map(|_| rng.random_range(-3..=3) as f64).collect())
        .collect();
    let ids = (0..g).map(|_| rng.random_range(0..4)).collect();
    let cams = (0..g).map(|_| rng.random_range(0..3)).collect();
    let queries = (0..rng.random_range(1..=5))
        .map(|_| Query {
            feature: (0..dim).map(|_| rng.random_range(-3..=3) as f64).collect(),
            identity: rng.random_range(0..4),
            cameras: vec![rng.random_range(0..3)],
        })
        .collect();
    Instance {
        gallery,
        ids,
        cams,
        queries,
    }
}

/// Selection-sort ranking by (distance, index) with explicit protocol filtering.
fn oracle_relevance(inst: &Instance, q: &Query) -> Vec<bool> {
    let mut left: Vec<usize> = (0..inst.gallery.len())
        .filter(|&i| !(inst.ids[i] == q.identity && q.cameras.contains(&inst.cams[i])))
        .collect();
    let dist = |i: usize| {
        inst.gallery[i]
            .iter()
            .zip(&q.feature)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    };
    let mut out = Vec::new();
    while !left.is_empty() {
        let mut best = 0;
        for k in 1..left.len() {
            if dist(left[k]) < dist(left[best]) {
                best = k;
            }
        }
        out.push(inst.ids[left.remove(best)] == q.identity);
    }
    out
}

fn oracle_ap(rel: &[bool]) -> Option<f64> {
    let total = rel.iter().filter(|&&r| r).count();
    if total == 0 {
        return None;
    }
    let mut sum = 0.0;
    for k in 0..rel.len() {
        if rel[k] {
            let hits = rel[..=k].iter().filter(|&&r| r).count();
            sum += hits as f64 / (k + 1) as f64;
        }
    }
    Some(sum / total as f64)
}

fn list(rel: &[bool], total: usize) -> RankedList {
    RankedList {
        entries: rel
            .iter()
            .enumerate()
            .map(|(i, &r)| RankedEntry {
                gallery_index: i,
                distance: i as f64,
                relevant: r,
            })
            .collect(),
        relevant_total: total,
    }
}

#[test]
fn hand_average_precision() {
    let ap = average_precision(&list(&[true, false, true], 2)).unwrap();
    assert!((ap - 5.0 / 6.0).abs() < 1e-15);
    assert_eq!(average_precision(&list(&[true, true, false], 2)), Some(1.0));
}

#[test]
fn metrics_equal_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let inst = instance(&mut rng);
        let index = RetrievalIndex::from_rows(&inst.gallery, inst.ids.clone(), inst.cams.clone()).unwrap();
        let lists: Vec<RankedList> = inst.queries.iter().map(|q| retrieve(q, &index).unwrap()).collect();
        let oracle: Vec<Vec<bool>> = inst.queries.iter().map(|q| oracle_relevance(&inst, q)).collect();
        for (l, o) in lists.iter().zip(&oracle) {
            assert_eq!(&l.relevance(), o);
        }
        let scorable: Vec<&Vec<bool>> = oracle.iter().filter(|o| o.contains(&true)).collect();
        for n in 1..=inst.gallery.len() {
            let want = if scorable.is_empty() {
                0.0
            } else {
                scorable.iter().filter(|o| o.iter().take(n).any(|&r| r)).count() as f64 / scorable.len() as f64
            };
            assert_eq!(rank_n_accuracy(&lists, n), want);
        }
        let aps: Vec<f64> = oracle.iter().filter_map(|o| oracle_ap(o)).collect();
        let want = if aps.is_empty() {
            0.0
        } else {
            aps.iter().sum::<f64>() / aps.len() as f64
        };
        assert!((mean_average_precision(&lists).map - want).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn rank_n_is_monotone_and_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instance(&mut rng);
        let index = RetrievalIndex::from_rows(&inst.gallery, inst.ids.clone(), inst.cams.clone()).unwrap();
        let lists: Vec<RankedList> = inst.queries.iter().map(|q| retrieve(q, &index).unwrap()).collect();
        let mut last = 0.0;
        for n in 1..=inst.gallery.len() {
            let r = rank_n_accuracy(&lists, n);
            prop_assert!((0.0..=1.0).contains(&r) && r >= last);
            last = r;
        }
        if lists.iter().any(|l| l.is_scorable()) {
            prop_assert_eq!(rank_n_accuracy(&lists, inst.gallery.len()), 1.0);
        }
        let m = mean_average_precision(&lists).map;
        prop_assert!((0.0..=1.0).contains(&m));
    }

    #[test]
    fn metrics_ignore_query_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instance(&mut rng);
        let index = RetrievalIndex::from_rows(&inst.gallery, inst.ids.clone(), inst.cams.clone()).unwrap();
        let mut lists: Vec<RankedList> = inst.queries.iter().map(|q| retrieve(q, &index).unwrap()).collect();
        let (r1, map) = (rank_n_accuracy(&lists, 1), mean_average_precision(&lists).map);
        lists.reverse();
        prop_assert_eq!(rank_n_accuracy(&lists, 1), r1);
        prop_assert!((mean_average_precision(&lists).map - map).abs() < 1e-12);
    }

    #[test]
    fn ranking_is_translation_invariant(seed in any::<u64>(), shift in prop::collection::vec(-5i32..=5, 4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instance(&mut rng);
        let dim = inst.gallery[0].len();
        let moved: Vec<Vec<f64>> = inst.gallery.iter().map(|r| r.iter().zip(&shift).map(|(a, &s)| a + s as f64).collect()).collect();
        let a = RetrievalIndex::from_rows(&inst.gallery, inst.ids.clone(), inst.cams.clone()).unwrap();
        let b = RetrievalIndex::from_rows(&moved, inst.ids.clone(), inst.cams.clone()).unwrap();
        for q in &inst.queries {
            let mut qb = q.clone();
            for j in 0..dim {
                qb.feature[j] += shift[j] as f64;
            }
            let la: Vec<usize> = retrieve(q, &a).unwrap().entries.iter().map(|e| e.gallery_index).collect();
            let lb: Vec<usize> = retrieve(&qb, &b).unwrap().entries.iter().map(|e| e.gallery_index).collect();
            prop_assert_eq!(la, lb);
        }
    }
}
