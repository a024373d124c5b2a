//! Event-driven execution of the online coordination protocol.
//!
//! Every robot runs the same state machine. After reaching its start
//! position it waits there for its parent (`AT_WAIT`), hands over its data,
//! holds until its next loop must begin, then traverses its tour
//! (`MOVING`), stopping at each child's meeting point until that child
//! shows up. Time is continuous; events are arrivals, hold expiries and
//! injected disturbances, processed in `(time, sequence)` order.
//!
//! Idleness and data capture are tracked at finitely many sample points
//! per tour. A point counts as visited when the robot leaves it, so data
//! captured while a robot stands still is timestamped at its departure.

mod single_hop;
mod trace;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

pub use single_hop::{run_single_hop, LoopRoute};
pub use trace::{TraceKind, TraceRecord};

use crate::error::{Error, Result};
use crate::schedule::child_offset;
use crate::tour::{wrap, Direction, TourId, EPS};
use crate::trees::SolveResult;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// End of the measurement window.
    pub horizon: f64,
    /// Start of the measurement window.
    pub warmup: f64,
    /// Sample points per unit of tour length.
    pub samples_per_unit: f64,
    /// Window for traveled-distance accounting; defaults to one period
    /// after the warm-up.
    pub distance_window: Option<(f64, f64)>,
    /// Extra time after the horizon allowed for delivering data captured
    /// inside the window; defaults to a generous multiple of the period.
    pub drain: Option<f64>,
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(horizon: f64, warmup: f64) -> SimConfig {
        SimConfig {
            horizon,
            warmup,
            samples_per_unit: 1.0,
            distance_window: None,
            drain: None,
            record_trace: false,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.horizon > self.warmup && self.warmup >= 0.0) {
            return Err(Error::Parameter(format!(
                "need 0 <= warmup < horizon, got warmup {} and horizon {}",
                self.warmup, self.horizon
            )));
        }
        if self.samples_per_unit.is_nan() || self.samples_per_unit <= 0.0 {
            return Err(Error::Parameter("sampling density must be positive".into()));
        }
        Ok(())
    }
}

/// Extra standstill injected into one robot at a given time; it takes
/// effect at the robot's next departure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disturbance {
    pub tour: TourId,
    pub time: f64,
    pub extra_wait: f64,
}

/// The three protocol states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineState {
    Init,
    AtWait,
    Moving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Init,
    /// At the start position waiting for the parent.
    WaitParent,
    /// Met the parent; holding until the next loop begins.
    Hold,
    Moving,
    /// Stopped at a child's meeting point.
    WaitChild(usize),
    /// Held back by a disturbance before continuing a loop.
    Paused,
}

impl Phase {
    fn machine(self) -> MachineState {
        match self {
            Phase::Init => MachineState::Init,
            Phase::WaitParent | Phase::Hold => MachineState::AtWait,
            Phase::Moving | Phase::WaitChild(_) | Phase::Paused => MachineState::Moving,
        }
    }
}

/// Snapshot of one robot.
#[derive(Clone, Debug, PartialEq)]
pub struct RobotState {
    pub tour: TourId,
    pub machine_state: MachineState,
    pub position: f64,
    pub delta_t: f64,
    pub buffer: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataItem {
    pub origin: (TourId, f64),
    pub capture_time: f64,
    pub arrival_time: Option<f64>,
    /// Robot currently storing the item; `None` once delivered.
    pub holder: Option<TourId>,
}

impl DataItem {
    pub fn delay(&self) -> Option<f64> {
        self.arrival_time.map(|a| a - self.capture_time)
    }
}

/// One traversal of a tour, from leaving the start to returning to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopRecord {
    pub departure: f64,
    pub arrival: f64,
    /// Total time spent waiting for children during the loop.
    pub child_wait: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    /// The window is shorter than one period.
    pub short_horizon: bool,
    /// Child waits were still happening inside the window.
    pub transient: bool,
    /// Some data captured in the window was not delivered in time.
    pub undelivered: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub worst_idleness: f64,
    pub worst_delay: f64,
    /// Distance traveled inside the distance window, per robot.
    pub distance: BTreeMap<TourId, f64>,
    /// Last time a robot started a loop after waiting for a child.
    pub convergence_time: f64,
    pub flags: Flags,
    pub loops: BTreeMap<TourId, Vec<LoopRecord>>,
    /// First arrival at the start position.
    pub ready: BTreeMap<TourId, f64>,
    /// Stay at the start position before the first loop.
    pub startup_wait: BTreeMap<TourId, f64>,
    /// Longest stay at the start position after the first loop.
    pub max_start_wait: BTreeMap<TourId, f64>,
    /// Longest stop at a child's meeting point.
    pub max_child_wait: BTreeMap<TourId, f64>,
    pub captured: usize,
    pub delivered: usize,
    pub end_time: f64,
}

impl Metrics {
    pub fn sum_distance(&self) -> f64 {
        self.distance.values().sum()
    }

    /// `ok`, or the raised flags joined by `+`.
    pub fn status(&self) -> String {
        let f = self.flags;
        let parts: Vec<&str> = [
            (f.short_horizon, "short-horizon"),
            (f.transient, "transient"),
            (f.undelivered, "undelivered"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        if parts.is_empty() {
            "ok".into()
        } else {
            parts.join("+")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Arrive(usize),
    Depart(usize),
    Disturb(usize),
}

#[derive(Clone, Copy, PartialEq)]
struct Time(f64);

impl Eq for Time {}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    offset: f64,
    position: f64,
    slot: usize,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    from: f64,
    to: f64,
    departed: f64,
}

#[derive(Clone, Debug)]
struct Robot {
    tour: TourId,
    length: f64,
    direction: Direction,
    start: f64,
    parent: Option<usize>,
    /// Child meeting points as `(offset from start, child)`, offsets in
    /// `(0, length]`.
    stops: Vec<(f64, usize)>,
    samples: Vec<Sample>,
    hold: f64,
    phase: Phase,
    offset: f64,
    next_stop: usize,
    segment: Option<Segment>,
    delta_t: f64,
    pending: f64,
    since: f64,
    loop_departure: f64,
    buffer: Vec<usize>,
    ready: f64,
}

impl Robot {
    fn position_at(&self, offset: f64) -> f64 {
        match self.direction {
            Direction::Ccw => wrap(self.start + offset, self.length),
            Direction::Cw => wrap(self.start - offset, self.length),
        }
    }
}

pub struct SimWorld {
    robots: Vec<Robot>,
    index: BTreeMap<TourId, usize>,
    clock: f64,
    seq: u64,
    queue: BinaryHeap<Reverse<(Time, u64, EventKind)>>,
    disturbances: Vec<Disturbance>,
    items: Vec<DataItem>,
    last_departure: Vec<f64>,
    idleness: f64,
    pending_measured: usize,
    config: SimConfig,
    period: f64,
    distance_window: (f64, f64),
    distance: Vec<f64>,
    convergence_time: f64,
    loops: Vec<Vec<LoopRecord>>,
    startup_wait: Vec<f64>,
    max_start_wait: Vec<f64>,
    max_child_wait: Vec<f64>,
    trace: Vec<TraceRecord>,
}

fn sample_points(tour: &crate::tour::Tour, extra: &[f64], density: f64) -> Vec<f64> {
    let l = tour.length();
    let mut pts = Vec::new();
    let steps = (l * density).ceil() as usize;
    for k in 0..steps {
        let p = k as f64 / density;
        if p < l {
            pts.push(p);
        }
    }
    for a in tour.sensing_arcs() {
        pts.push(a.start);
        pts.push(wrap(a.end, l));
    }
    pts.extend_from_slice(extra);
    pts.retain(|&p| tour.is_sensed_closed(p));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < EPS);
    pts
}

impl SimWorld {
    /// World with every robot starting at its start position.
    pub fn new(solution: &SolveResult, config: SimConfig) -> Result<SimWorld> {
        SimWorld::with_positions(solution, &BTreeMap::new(), config)
    }

    /// World with robots placed at `initial` (start positions for tours not
    /// listed). Each robot first moves in its direction to its start.
    pub fn with_positions(
        solution: &SolveResult,
        initial: &BTreeMap<TourId, f64>,
        config: SimConfig,
    ) -> Result<SimWorld> {
        config.check()?;
        let tree = &solution.tree;
        let graph = tree.graph();
        let period = graph.max_length();
        let ids: Vec<TourId> = graph.tour_ids().collect();
        let index: BTreeMap<TourId, usize> = ids.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut robots = Vec::with_capacity(ids.len());
        let mut slots = 0;
        for &id in &ids {
            let t = graph.tour(id)?;
            let start = tree.start_position(id)?;
            let d = *solution
                .directions
                .get(&id)
                .ok_or_else(|| Error::InvalidTree(format!("no direction for tour {id}")))?;
            let mut stops = Vec::new();
            let mut extra = vec![start];
            extra.extend(t.base());
            for &c in tree.children(id) {
                let meet = t.meeting(c).expect("tree tours carry child meetings");
                extra.push(meet);
                stops.push((child_offset(t, start, meet, d), index[&c]));
            }
            stops.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut samples: Vec<Sample> = sample_points(t, &extra, config.samples_per_unit)
                .into_iter()
                .map(|p| Sample {
                    offset: t.arc(start, p, d),
                    position: p,
                    slot: 0,
                })
                .collect();
            samples.sort_by(|a, b| a.offset.total_cmp(&b.offset));
            for s in &mut samples {
                s.slot = slots;
                slots += 1;
            }
            let init_pos = initial.get(&id).copied().unwrap_or(start);
            if !(0.0..t.length()).contains(&init_pos) {
                return Err(Error::PositionOutOfRange {
                    tour: id,
                    position: init_pos,
                    length: t.length(),
                });
            }
            let lead = t.arc(init_pos, start, d);
            robots.push(Robot {
                tour: id,
                length: t.length(),
                direction: d,
                start,
                parent: tree.parent(id).map(|p| index[&p]),
                stops,
                samples,
                hold: period - t.length(),
                phase: Phase::Init,
                offset: if lead < EPS { t.length() } else { t.length() - lead },
                next_stop: 0,
                segment: None,
                delta_t: 0.0,
                pending: 0.0,
                since: 0.0,
                loop_departure: 0.0,
                buffer: Vec::new(),
                ready: f64::NAN,
            });
        }
        let n = robots.len();
        let distance_window = config
            .distance_window
            .unwrap_or((config.warmup, config.warmup + period));
        let mut world = SimWorld {
            robots,
            index,
            clock: 0.0,
            seq: 0,
            queue: BinaryHeap::new(),
            disturbances: Vec::new(),
            items: Vec::new(),
            last_departure: vec![0.0; slots],
            idleness: 0.0,
            pending_measured: 0,
            config,
            period,
            distance_window,
            distance: vec![0.0; n],
            convergence_time: 0.0,
            loops: vec![Vec::new(); n],
            startup_wait: vec![0.0; n],
            max_start_wait: vec![0.0; n],
            max_child_wait: vec![0.0; n],
            trace: Vec::new(),
        };
        for r in 0..n {
            world.launch(r);
        }
        Ok(world)
    }

    /// Schedules a disturbance for later; see [`Disturbance`].
    pub fn schedule_disturbance(&mut self, d: Disturbance) -> Result<()> {
        self.robot_index(d.tour)?;
        if !(d.extra_wait >= 0.0 && d.time >= self.clock) {
            return Err(Error::Parameter(format!("invalid disturbance {d:?}")));
        }
        self.disturbances.push(d);
        let k = self.disturbances.len() - 1;
        self.push(d.time, EventKind::Disturb(k));
        Ok(())
    }

    /// Makes robot `tour` stand still for `extra_wait` more at its next
    /// departure.
    pub fn inject_disturbance(&mut self, tour: TourId, extra_wait: f64) -> Result<()> {
        let r = self.robot_index(tour)?;
        if extra_wait.is_nan() || extra_wait < 0.0 {
            return Err(Error::Parameter(format!("negative extra wait {extra_wait}")));
        }
        if extra_wait > 0.0 {
            self.robots[r].pending += extra_wait;
            let pos = self.position(r);
            self.record(r, TraceKind::Disturb, pos);
            if let Some(last) = self.trace.last_mut().filter(|t| t.kind == TraceKind::Disturb) {
                // the extra wait, so that the trace alone can be replayed
                last.delta_t = extra_wait;
            }
        }
        Ok(())
    }

    fn robot_index(&self, tour: TourId) -> Result<usize> {
        self.index.get(&tour).copied().ok_or(Error::UnknownTour(tour))
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn items(&self) -> &[DataItem] {
        &self.items
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn robots(&self) -> Vec<RobotState> {
        (0..self.robots.len())
            .map(|r| {
                let b = &self.robots[r];
                RobotState {
                    tour: b.tour,
                    machine_state: b.phase.machine(),
                    position: self.position(r),
                    delta_t: b.delta_t,
                    buffer: b.buffer.clone(),
                }
            })
            .collect()
    }

    fn position(&self, r: usize) -> f64 {
        let b = &self.robots[r];
        match b.segment {
            Some(s) => b.position_at(s.from + (self.clock - s.departed).min(s.to - s.from)),
            None => b.position_at(b.offset),
        }
    }

    fn push(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.queue.push(Reverse((Time(time), self.seq, kind)));
    }

    fn record(&mut self, r: usize, kind: TraceKind, position: f64) {
        if self.config.record_trace {
            self.trace.push(TraceRecord {
                time: self.clock,
                robot: self.robots[r].tour,
                kind,
                position,
                delta_t: self.robots[r].delta_t,
            });
        }
    }

    /// Starts the initial approach to the start position.
    fn launch(&mut self, r: usize) {
        let b = &self.robots[r];
        let (from, to) = (b.offset, b.length);
        if to - from < EPS {
            self.robots[r].offset = 0.0;
            if let Some(s) = self.sample_at(r, 0.0) {
                self.last_departure[s.slot] = f64::INFINITY;
            }
            self.reach_start(r);
            return;
        }
        self.leave_point(r, from);
        self.robots[r].segment = Some(Segment {
            from,
            to,
            departed: self.clock,
        });
        self.push(self.clock + (to - from), EventKind::Arrive(r));
    }

    /// Advances to the next event; `false` once the run is over.
    pub fn step(&mut self) -> bool {
        let Some(Reverse((Time(t), _, kind))) = self.queue.pop() else {
            return false;
        };
        self.clock = t;
        match kind {
            EventKind::Arrive(r) => self.on_arrive(r),
            EventKind::Depart(r) => self.on_depart(r),
            EventKind::Disturb(k) => {
                let d = self.disturbances[k];
                let _ = self.inject_disturbance(d.tour, d.extra_wait);
            }
        }
        true
    }

    fn on_arrive(&mut self, r: usize) {
        let seg = self.robots[r].segment.take().expect("arrivals end a segment");
        self.cover(r, seg);
        self.robots[r].offset = seg.to;
        let pos = self.position(r);
        self.record(r, TraceKind::Arrive, pos);
        if self.robots[r].phase == Phase::Init {
            self.robots[r].offset = 0.0;
            self.reach_start(r);
        } else {
            self.advance(r);
        }
    }

    fn on_depart(&mut self, r: usize) {
        match self.robots[r].phase {
            Phase::Hold => self.begin_loop(r),
            Phase::Paused => {
                self.robots[r].phase = Phase::Moving;
                self.advance(r);
            }
            other => unreachable!("departure in phase {other:?}"),
        }
    }

    /// Applies a pending disturbance; `true` if the robot must stay put.
    fn held_back(&mut self, r: usize) -> bool {
        let extra = std::mem::take(&mut self.robots[r].pending);
        if extra > 0.0 {
            self.push(self.clock + extra, EventKind::Depart(r));
            true
        } else {
            false
        }
    }

    fn begin_loop(&mut self, r: usize) {
        if self.held_back(r) {
            return;
        }
        let now = self.clock;
        let b = &mut self.robots[r];
        if self.loops[r].is_empty() {
            self.startup_wait[r] = now - b.since;
        } else {
            self.max_start_wait[r] = self.max_start_wait[r].max(now - b.since);
        }
        if b.delta_t > EPS {
            self.convergence_time = self.convergence_time.max(now);
        }
        b.delta_t = 0.0;
        b.offset = 0.0;
        b.next_stop = 0;
        b.loop_departure = now;
        b.phase = Phase::Moving;
        self.advance(r);
    }

    /// Moves on from the current offset: serves child stops located here,
    /// finishes the loop at its end, or sets off towards the next point.
    fn advance(&mut self, r: usize) {
        loop {
            let b = &self.robots[r];
            match b.stops.get(b.next_stop) {
                Some(&(off, c)) if off <= b.offset + EPS => {
                    if !self.reach_child_stop(r, c) {
                        return;
                    }
                }
                _ => break,
            }
        }
        let b = &self.robots[r];
        if b.offset >= b.length - EPS {
            self.robots[r].offset = 0.0;
            self.reach_start(r);
            return;
        }
        let from = b.offset;
        let to = b.stops.get(b.next_stop).map_or(b.length, |s| s.0);
        self.robots[r].phase = Phase::Paused;
        if self.held_back(r) {
            return;
        }
        self.leave_point(r, from);
        self.robots[r].phase = Phase::Moving;
        self.robots[r].segment = Some(Segment {
            from,
            to,
            departed: self.clock,
        });
        let pos = self.position(r);
        self.record(r, TraceKind::Depart, pos);
        self.push(self.clock + (to - from), EventKind::Arrive(r));
    }

    /// Parent `r` reached the meeting point of child `c`. Returns `true` if
    /// the hand-over happened and `r` may go on.
    fn reach_child_stop(&mut self, r: usize, c: usize) -> bool {
        if self.robots[c].phase == Phase::WaitParent {
            self.hand_over(c, r);
            self.robots[r].next_stop += 1;
            true
        } else {
            let now = self.clock;
            let b = &mut self.robots[r];
            b.phase = Phase::WaitChild(c);
            b.since = now;
            let pos = self.position(r);
            self.record(r, TraceKind::WaitChild, pos);
            false
        }
    }

    /// Robot `r` is back at its start, either from the initial approach or
    /// at the end of a loop.
    fn reach_start(&mut self, r: usize) {
        let now = self.clock;
        let b = &mut self.robots[r];
        match b.phase {
            Phase::Init => {
                b.delta_t = 0.0;
                b.ready = now;
            }
            _ => {
                let rec = LoopRecord {
                    departure: b.loop_departure,
                    arrival: now,
                    child_wait: b.delta_t,
                };
                self.loops[r].push(rec);
            }
        }
        let b = &mut self.robots[r];
        let from_init = b.phase == Phase::Init;
        b.phase = Phase::WaitParent;
        b.since = now;
        let pos = self.position(r);
        self.record(r, if from_init { TraceKind::Ready } else { TraceKind::Arrive }, pos);
        match self.robots[r].parent {
            None => {
                self.deliver(r);
                self.start_hold(r);
            }
            Some(p) => {
                if self.robots[p].phase == Phase::WaitChild(r) {
                    let waited = now - self.robots[p].since;
                    self.max_child_wait[p] = self.max_child_wait[p].max(waited);
                    self.robots[p].delta_t += waited;
                    self.hand_over(r, p);
                    self.robots[p].next_stop += 1;
                    self.robots[p].phase = Phase::Moving;
                    self.advance(p);
                }
            }
        }
    }

    /// Child `c` waiting at its start meets its parent `p`.
    fn hand_over(&mut self, c: usize, p: usize) {
        let moved = std::mem::take(&mut self.robots[c].buffer);
        let holder = self.robots[p].tour;
        for &i in &moved {
            self.items[i].holder = Some(holder);
        }
        self.robots[p].buffer.extend(moved);
        let pos = self.position(c);
        self.record(c, TraceKind::MeetParent, pos);
        let pos = self.position(p);
        self.record(p, TraceKind::MeetChild, pos);
        self.start_hold(c);
    }

    fn start_hold(&mut self, r: usize) {
        let b = &mut self.robots[r];
        b.phase = Phase::Hold;
        let until = self.clock + b.hold;
        self.push(until, EventKind::Depart(r));
    }

    fn deliver(&mut self, r: usize) {
        let now = self.clock;
        let (lo, hi) = (self.config.warmup, self.config.horizon);
        for i in std::mem::take(&mut self.robots[r].buffer) {
            let item = &mut self.items[i];
            item.arrival_time = Some(now);
            item.holder = None;
            if item.capture_time >= lo && item.capture_time <= hi {
                self.pending_measured -= 1;
            }
        }
        let pos = self.position(r);
        self.record(r, TraceKind::Deliver, pos);
    }

    fn sample_at(&self, r: usize, offset: f64) -> Option<Sample> {
        let b = &self.robots[r];
        let off = if offset >= b.length - EPS { 0.0 } else { offset };
        let i = b.samples.partition_point(|s| s.offset < off - EPS);
        b.samples.get(i).copied().filter(|s| (s.offset - off).abs() < EPS)
    }

    /// The robot leaves the point at `offset`: the point counts as visited
    /// now and data sensed there is captured.
    fn leave_point(&mut self, r: usize, offset: f64) {
        if let Some(s) = self.sample_at(r, offset) {
            self.visit_end(s.slot);
            self.visit_start(r, s);
        }
    }

    fn visit_end(&mut self, slot: usize) {
        let t = self.clock;
        let (lo, hi) = (self.config.warmup, self.config.horizon);
        let last = self.last_departure[slot];
        if t >= lo && last <= hi {
            self.idleness = self.idleness.max(t.min(hi) - last);
        }
    }

    fn visit_start(&mut self, r: usize, s: Sample) {
        let t = self.clock;
        self.last_departure[s.slot] = t;
        if t <= self.config.horizon {
            let tour = self.robots[r].tour;
            self.items.push(DataItem {
                origin: (tour, s.position),
                capture_time: t,
                arrival_time: None,
                holder: Some(tour),
            });
            if t >= self.config.warmup {
                self.pending_measured += 1;
            }
            let id = self.items.len() - 1;
            self.robots[r].buffer.push(id);
        }
    }

    /// Accounts for everything passed while moving along `seg`.
    fn cover(&mut self, r: usize, seg: Segment) {
        let (w0, w1) = self.distance_window;
        let end = seg.departed + (seg.to - seg.from);
        self.distance[r] += (end.min(w1) - seg.departed.max(w0)).max(0.0);
        let now = self.clock;
        let b = &self.robots[r];
        let lo = b.samples.partition_point(|s| s.offset <= seg.from + EPS);
        let hi = b.samples.partition_point(|s| s.offset < seg.to - EPS);
        let passed: Vec<Sample> = b.samples[lo..hi].to_vec();
        for s in passed {
            self.clock = seg.departed + (s.offset - seg.from);
            self.visit_end(s.slot);
            self.visit_start(r, s);
        }
        self.clock = now;
        if let Some(s) = self.sample_at(r, seg.to) {
            self.visit_end(s.slot);
            // the gap restarts only when the robot leaves again
            self.last_departure[s.slot] = f64::INFINITY;
        }
    }

    /// Runs until the horizon and until all data captured inside the
    /// window is delivered (or the drain allowance runs out).
    pub fn run(mut self) -> (Metrics, SimWorld) {
        let drain = self
            .config
            .drain
            .unwrap_or(4.0 * self.period * (self.robots.len() as f64 + 2.0));
        let stop = self.config.horizon + drain;
        while let Some(Reverse((Time(t), _, _))) = self.queue.peek() {
            if *t > stop || (*t > self.config.horizon && self.pending_measured == 0) {
                break;
            }
            self.step();
        }
        let metrics = self.metrics();
        (metrics, self)
    }

    fn metrics(&self) -> Metrics {
        let (lo, hi) = (self.config.warmup, self.config.horizon);
        let mut idleness = self.idleness;
        let mut last_departure = self.last_departure.clone();
        // points passed by robots still under way at the horizon
        for b in &self.robots {
            let Some(seg) = b.segment else { continue };
            let reached = seg.from + (hi - seg.departed);
            let first = b.samples.partition_point(|s| s.offset <= seg.from + EPS);
            for s in b.samples[first..]
                .iter()
                .take_while(|s| s.offset <= reached.min(seg.to - EPS))
            {
                let t = seg.departed + (s.offset - seg.from);
                let last = last_departure[s.slot];
                if t >= lo && last <= hi {
                    idleness = idleness.max(t - last);
                }
                last_departure[s.slot] = t;
            }
        }
        for &last in &last_departure {
            if last <= hi {
                idleness = idleness.max(hi - last);
            }
        }
        let mut worst_delay: f64 = 0.0;
        let mut undelivered = false;
        let (mut captured, mut delivered) = (0, 0);
        for item in &self.items {
            captured += 1;
            if item.arrival_time.is_some() {
                delivered += 1;
            }
            if item.capture_time >= lo && item.capture_time <= hi {
                match item.delay() {
                    Some(d) => worst_delay = worst_delay.max(d),
                    None => undelivered = true,
                }
            }
        }
        let ids =
            |v: &Vec<f64>| -> BTreeMap<TourId, f64> { self.robots.iter().zip(v).map(|(b, &x)| (b.tour, x)).collect() };
        Metrics {
            worst_idleness: idleness,
            worst_delay,
            distance: ids(&self.distance),
            convergence_time: self.convergence_time,
            flags: Flags {
                short_horizon: hi - lo < self.period - EPS,
                transient: self.convergence_time > lo,
                undelivered,
            },
            loops: self
                .robots
                .iter()
                .zip(&self.loops)
                .map(|(b, l)| (b.tour, l.clone()))
                .collect(),
            ready: self.robots.iter().map(|b| (b.tour, b.ready)).collect(),
            startup_wait: ids(&self.startup_wait),
            max_start_wait: ids(&self.max_start_wait),
            max_child_wait: ids(&self.max_child_wait),
            captured,
            delivered,
            end_time: self.clock,
        }
    }
}

/// Convenience wrapper: simulate `solution` from the start positions with
/// optional initial placements and disturbances.
pub fn simulate(
    solution: &SolveResult,
    initial: &BTreeMap<TourId, f64>,
    disturbances: &[Disturbance],
    config: SimConfig,
) -> Result<(Metrics, SimWorld)> {
    let mut world = SimWorld::with_positions(solution, initial, config)?;
    for &d in disturbances {
        world.schedule_disturbance(d)?;
    }
    Ok(world.run())
}

/// Re-runs a recorded simulation. The disturbances are taken from the
/// `disturb` records of `trace`; the run must reproduce `trace` exactly.
pub fn replay(
    solution: &SolveResult,
    initial: &BTreeMap<TourId, f64>,
    trace: &[TraceRecord],
    mut config: SimConfig,
) -> Result<(Metrics, SimWorld)> {
    config.record_trace = true;
    let disturbances: Vec<Disturbance> = trace
        .iter()
        .filter(|t| t.kind == TraceKind::Disturb)
        .map(|t| Disturbance {
            tour: t.robot,
            time: t.time,
            extra_wait: t.delta_t,
        })
        .collect();
    let (metrics, world) = simulate(solution, initial, &disturbances, config)?;
    if let Some(i) = (0..trace.len().max(world.trace().len())).find(|&i| trace.get(i) != world.trace().get(i)) {
        return Err(Error::Format(format!("trace diverges from the replay at record {i}")));
    }
    Ok((metrics, world))
}

#[cfg(test)]
mod tests;
