//! Hand-built example topologies, adversarial families and random
//! instances.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::tour::{Direction, Tour, TourGraph, TourId};

fn build(lengths: &[(u32, f64)], meetings: &[(u32, u32, f64, f64)], root: u32, base: f64) -> Result<TourGraph> {
    let mut tours: BTreeMap<u32, Tour> = BTreeMap::new();
    for &(id, l) in lengths {
        tours.insert(id, Tour::new(TourId(id), l)?);
    }
    for &(a, b, pa, pb) in meetings {
        let ta = tours.remove(&a).ok_or(Error::UnknownTour(TourId(a)))?;
        tours.insert(a, ta.with_meeting(TourId(b), pa)?);
        let tb = tours.remove(&b).ok_or(Error::UnknownTour(TourId(b)))?;
        tours.insert(b, tb.with_meeting(TourId(a), pb)?);
    }
    let r = tours.remove(&root).ok_or(Error::UnknownTour(TourId(root)))?;
    tours.insert(root, r.with_base(base)?);
    TourGraph::new(tours.into_values(), TourId(root))
}

/// The seven-tour tree rooted at tour 5 with arcs 2-1, 1-3, 4-3, 3-5,
/// 6-5 and 7-3.
pub fn sample_tree() -> TourGraph {
    build(
        &[(1, 8.0), (2, 6.0), (3, 12.0), (4, 5.0), (5, 10.0), (6, 7.0), (7, 4.0)],
        &[
            (2, 1, 0.0, 5.0),
            (1, 3, 1.0, 2.0),
            (4, 3, 2.0, 6.0),
            (3, 5, 0.0, 4.0),
            (6, 5, 3.0, 8.0),
            (7, 3, 1.0, 9.0),
        ],
        5,
        0.0,
    )
    .expect("hand-built instance is valid")
}

/// The seven-tour graph with edges 1-4, 2-7, 3-4, 3-5, 3-6, 3-7 and 5-6,
/// base on tour 5.
pub fn sample_graph() -> TourGraph {
    build(
        &[(1, 6.0), (2, 6.0), (3, 12.0), (4, 8.0), (5, 10.0), (6, 8.0), (7, 8.0)],
        &SAMPLE_MEETINGS,
        5,
        0.0,
    )
    .expect("hand-built instance is valid")
}

const SAMPLE_MEETINGS: [(u32, u32, f64, f64); 7] = [
    (1, 4, 2.0, 2.0),
    (2, 7, 2.0, 7.0),
    (3, 4, 4.0, 6.0),
    (3, 5, 2.0, 5.0),
    (3, 6, 11.0, 0.0),
    (3, 7, 6.0, 4.0),
    (5, 6, 8.0, 6.0),
];

/// A chain of five equally long tours, 1 at the base, each meeting the
/// next a quarter loop after its own start.
pub fn sample_chain() -> (TourGraph, BTreeMap<TourId, Direction>) {
    let l = 8.0;
    let mut meetings = Vec::new();
    for i in 1..5u32 {
        meetings.push((i, i + 1, if i == 1 { 6.0 } else { 4.0 }, 0.0));
    }
    let lengths: Vec<(u32, f64)> = (1..=5).map(|i| (i, l)).collect();
    let g = build(&lengths, &meetings, 1, 0.0).expect("hand-built instance is valid");
    let dirs = g.tour_ids().map(|t| (t, Direction::Cw)).collect();
    (g, dirs)
}

/// `v0` and a chain `v1..vk` of long tours, meeting on opposite sides,
/// plus an arm of `k` short tours from every `vi` back to `v0`.
///
/// Ids: `0` is `v0`, `1..=k` the chain, and arm `i` uses
/// `k + (i - 1) * k + 1 ..= k + i * k` from `vi` towards `v0`.
pub fn chain_arms(k: usize, big: f64, small: f64) -> Result<TourGraph> {
    if k < 2 || !(big > 0.0 && small > 0.0) || small >= big {
        return Err(Error::Parameter(format!(
            "need k >= 2 and 0 < small < big, got k={k}, big={big}, small={small}"
        )));
    }
    let k32 = k as u32;
    let mut lengths = vec![(0, big)];
    for i in 1..=k32 {
        lengths.push((i, big));
    }
    let mut meetings = Vec::new();
    for i in 1..=k32 {
        // half a loop from the previous tour's own parent meeting (or base)
        meetings.push((i - 1, i, big / 2.0, 0.0));
    }
    let half = small / 2.0;
    // arm meeting points on v0 sit next to the base
    let step = (big / 2.0).min(small) / (k as f64 + 1.0);
    for i in 1..=k32 {
        let first = k32 + (i - 1) * k32 + 1;
        for j in 0..k32 {
            lengths.push((first + j, small));
        }
        meetings.push((i, first, big / 4.0, 0.0));
        for j in 0..k32 - 1 {
            meetings.push((first + j, first + j + 1, half, 0.0));
        }
        meetings.push((first + k32 - 1, 0, half, step * i as f64));
    }
    build(&lengths, &meetings, 0, 0.0)
}

/// Random tree with `n` tours: parents drawn uniformly among earlier
/// tours, lengths uniform in `lengths`, meeting points and base uniform.
/// With `sensing`, every tour gets one random sensing arc covering between
/// a third and all of it.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, lengths: (f64, f64), sensing: bool) -> Result<TourGraph> {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.gen_range(0..i), i));
    }
    random_on_edges(rng, n, &edges, lengths, sensing)
}

/// Random connected graph: a random tree plus each remaining pair with
/// probability `extra`.
pub fn random_graph<R: Rng>(
    rng: &mut R,
    n: usize,
    extra: f64,
    lengths: (f64, f64),
    sensing: bool,
) -> Result<TourGraph> {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.gen_range(0..i), i));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(extra) {
                edges.push((a, b));
            }
        }
    }
    random_on_edges(rng, n, &edges, lengths, sensing)
}

fn random_on_edges<R: Rng>(
    rng: &mut R,
    n: usize,
    edges: &[(usize, usize)],
    (lo, hi): (f64, f64),
    sensing: bool,
) -> Result<TourGraph> {
    if n == 0 || !(lo > 0.0 && hi >= lo) {
        return Err(Error::Parameter(format!("need n >= 1 and 0 < {lo} <= {hi}")));
    }
    let mut tours = Vec::with_capacity(n);
    for i in 0..n {
        let l = if hi > lo { rng.gen_range(lo..hi) } else { lo };
        let mut t = Tour::new(TourId(i as u32), l)?;
        if sensing && rng.gen_bool(0.5) {
            let a = rng.gen_range(0.0..l);
            let span = rng.gen_range(l / 3.0..=l);
            let b = (a + span) % l;
            t = t.with_sensing(&[(a, if (b - a).abs() < 1e-9 { a } else { b })])?;
            if !t.senses() {
                t = Tour::new(TourId(i as u32), l)?;
            }
        }
        if i == 0 {
            t = t.with_base(rng.gen_range(0.0..l))?;
        }
        tours.push(t);
    }
    for &(a, b) in edges {
        let pa = rng.gen_range(0.0..tours[a].length());
        let pb = rng.gen_range(0.0..tours[b].length());
        tours[a] = tours[a].clone().with_meeting(TourId(b as u32), pa)?;
        tours[b] = tours[b].clone().with_meeting(TourId(a as u32), pb)?;
    }
    TourGraph::new(tours, TourId(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_tree_has_the_expected_shape() {
        let g = sample_tree();
        assert_eq!(g.len(), 7);
        assert_eq!(g.edges().len(), 6);
        assert_eq!(g.root(), TourId(5));
        assert_eq!(g.sp_depth(), 3);
    }

    #[test]
    fn chain_arms_counts() {
        let g = chain_arms(6, 1000.0, 0.1).unwrap();
        assert_eq!(g.len(), 1 + 6 + 36);
        assert_eq!(g.edges().len(), 6 + 6 * 7);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn random_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..8 {
            let t = random_tree(&mut rng, n, (1.0, 20.0), true).unwrap();
            assert_eq!(t.edges().len(), n - 1);
            let g = random_graph(&mut rng, n, 0.4, (1.0, 20.0), false).unwrap();
            assert!(g.validate().is_empty());
            assert!(g.is_fully_sensed());
        }
    }
}
