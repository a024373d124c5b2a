use super::*;
use crate::schedule::minimum_delay_schedule;
use crate::tour::{Tour, TourGraph, TourTree};
use crate::trees::Method;

fn two_tours() -> TourGraph {
    let a = Tour::new(TourId(0), 10.0)
        .unwrap()
        .with_base(0.0)
        .unwrap()
        .with_meeting(TourId(1), 3.0)
        .unwrap();
    let b = Tour::new(TourId(1), 6.0).unwrap().with_meeting(TourId(0), 0.0).unwrap();
    TourGraph::new([a, b], TourId(0)).unwrap()
}

fn solved(graph: &TourGraph) -> SolveResult {
    let tree = TourTree::from_graph(graph).unwrap();
    let directions = minimum_delay_schedule(&tree).unwrap().0.directions();
    SolveResult::assemble(Method::Sp, tree, directions).unwrap()
}

#[test]
fn single_tour_measures_its_length() {
    let t = Tour::new(TourId(0), 10.0).unwrap().with_base(0.0).unwrap();
    let g = TourGraph::new([t], TourId(0)).unwrap();
    let (m, _) = SimWorld::new(&solved(&g), SimConfig::new(50.0, 20.0)).unwrap().run();
    assert_eq!(m.worst_idleness, 10.0);
    assert_eq!(m.worst_delay, 10.0);
    assert!(!m.flags.undelivered);
    assert!(!m.flags.transient);
}

#[test]
fn two_tours_match_analytic_delay() {
    let g = two_tours();
    let s = solved(&g);
    assert_eq!(s.directions[&TourId(0)], Direction::Cw);
    let (m, _) = SimWorld::new(&s, SimConfig::new(60.0, 30.0)).unwrap().run();
    assert_eq!(m.worst_delay, 10.0);
    assert_eq!(m.worst_idleness, 10.0);
}

#[test]
fn forced_direction_raises_delay() {
    let g = two_tours();
    let tree = TourTree::from_graph(&g).unwrap();
    let dirs = BTreeMap::from([(TourId(0), Direction::Ccw), (TourId(1), Direction::Cw)]);
    let s = SolveResult::assemble(Method::Sp, tree, dirs).unwrap();
    let (m, _) = SimWorld::new(&s, SimConfig::new(60.0, 30.0)).unwrap().run();
    assert_eq!(m.worst_delay, 13.0);
    assert_eq!(s.worst_delay(), 13.0);
}

#[test]
fn robots_at_start_enter_at_wait() {
    let world = SimWorld::new(&solved(&two_tours()), SimConfig::new(60.0, 30.0)).unwrap();
    for r in world.robots() {
        assert_ne!(r.machine_state, MachineState::Init);
    }
}

#[test]
fn leaf_disturbance_shows_up_in_parent_wait() {
    let s = solved(&two_tours());
    let mut world = SimWorld::new(&s, SimConfig::new(200.0, 100.0)).unwrap();
    world
        .schedule_disturbance(Disturbance {
            tour: TourId(1),
            time: 25.0,
            extra_wait: 2.0,
        })
        .unwrap();
    let (m, _) = world.run();
    let waits: Vec<f64> = m.loops[&TourId(0)].iter().map(|l| l.child_wait).collect();
    assert!(waits.iter().any(|&w| (w - 2.0).abs() < 1e-9), "{waits:?}");
    assert_eq!(waits.iter().filter(|&&w| w > EPS).count(), 1);
    assert_eq!(m.worst_delay, 10.0);
}

#[test]
fn zero_disturbance_is_a_no_op() {
    let s = solved(&two_tours());
    let config = SimConfig {
        record_trace: true,
        ..SimConfig::new(60.0, 30.0)
    };
    let (plain, w1) = SimWorld::new(&s, config.clone()).unwrap().run();
    let mut world = SimWorld::new(&s, config).unwrap();
    world.inject_disturbance(TourId(1), 0.0).unwrap();
    let (disturbed, w2) = world.run();
    assert_eq!(plain, disturbed);
    assert_eq!(w1.trace(), w2.trace());
}

#[test]
fn staggered_start_converges() {
    let s = solved(&two_tours());
    let initial = BTreeMap::from([(TourId(0), 7.5), (TourId(1), 2.0)]);
    let (m, _) = simulate(&s, &initial, &[], SimConfig::new(100.0, 50.0)).unwrap();
    assert_eq!(m.worst_delay, 10.0);
    assert_eq!(m.worst_idleness, 10.0);
    assert!(m.convergence_time < 50.0);
}

#[test]
fn off_tour_start_is_rejected() {
    let s = solved(&two_tours());
    let initial = BTreeMap::from([(TourId(1), 6.5)]);
    assert!(SimWorld::with_positions(&s, &initial, SimConfig::new(10.0, 0.0)).is_err());
}

#[test]
fn cold_start_flags() {
    let s = solved(&two_tours());
    let (m, _) = SimWorld::new(&s, SimConfig::new(5.0, 0.0)).unwrap().run();
    assert!(m.flags.short_horizon);
}

#[test]
fn trace_replays_into_identical_metrics() {
    let s = solved(&two_tours());
    let config = SimConfig {
        record_trace: true,
        ..SimConfig::new(200.0, 100.0)
    };
    let d = Disturbance {
        tour: TourId(1),
        time: 25.0,
        extra_wait: 2.0,
    };
    let (m, world) = simulate(&s, &BTreeMap::new(), &[d], config.clone()).unwrap();
    let (again, _) = replay(&s, &BTreeMap::new(), world.trace(), config.clone()).unwrap();
    assert_eq!(m, again);
    let mut tampered = world.trace().to_vec();
    tampered.pop();
    assert!(replay(&s, &BTreeMap::new(), &tampered, config).is_err());
}

#[test]
fn window_may_end_while_a_robot_is_under_way() {
    use rand::SeedableRng;
    // the child's last loop runs past the horizon after all data is in
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5919375530097727781);
    let g = crate::gen::random_graph(&mut rng, 2, 0.3, (1.0, 20.0), true).unwrap();
    let s = crate::trees::mdtd_cg(&g).unwrap();
    let m = crate::experiment::simulate_steady(&s).unwrap();
    assert!((m.worst_idleness - g.max_length()).abs() < 1e-9, "{}", m.worst_idleness);
}
