//! Baseline where every robot loops its own route and delivers its data
//! directly at base-station passages, without exchanges between robots.

use std::collections::BTreeMap;

use super::{Flags, LoopRecord, Metrics, SimConfig};
use crate::error::{Error, Result};
use crate::tour::{TourId, EPS};

/// A closed route traversed at unit speed starting at offset 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopRoute {
    pub tour: TourId,
    pub length: f64,
    /// Sensing visits as `(offset, location)`; a location may be visited
    /// several times per loop and by several robots.
    pub sensed: Vec<(f64, usize)>,
    /// Offsets where the route passes the base station.
    pub deliveries: Vec<f64>,
}

enum Stop {
    Sense(usize),
    Deliver,
}

/// Runs all routes over the window of `config`. At an offset that is both
/// sensed and a delivery point the robot delivers first; what it captures
/// on leaving waits for the next base passage.
pub fn run_single_hop(routes: &[LoopRoute], config: &SimConfig) -> Result<Metrics> {
    config.check()?;
    let (lo, hi) = (config.warmup, config.horizon);
    let period = routes.iter().map(|r| r.length).fold(0.0, f64::max);
    let (w0, w1) = config.distance_window.unwrap_or((lo, lo + period));
    let mut last_visit: BTreeMap<usize, f64> = BTreeMap::new();
    for r in routes {
        for &(_, loc) in &r.sensed {
            last_visit.insert(loc, 0.0);
        }
    }
    // visits from all robots, merged in time order
    let mut visits: Vec<(f64, usize)> = Vec::new();
    let mut metrics = Metrics {
        worst_idleness: 0.0,
        worst_delay: 0.0,
        distance: BTreeMap::new(),
        convergence_time: 0.0,
        flags: Flags {
            short_horizon: hi - lo < period - EPS,
            ..Flags::default()
        },
        loops: BTreeMap::new(),
        ready: BTreeMap::new(),
        startup_wait: BTreeMap::new(),
        max_start_wait: BTreeMap::new(),
        max_child_wait: BTreeMap::new(),
        captured: 0,
        delivered: 0,
        end_time: hi,
    };
    for r in routes {
        if r.length.is_nan() || r.length <= 0.0 {
            return Err(Error::InvalidTour {
                tour: r.tour,
                reason: format!("route length {} is not positive", r.length),
            });
        }
        if r.deliveries.is_empty() && !r.sensed.is_empty() {
            return Err(Error::UnboundedDelay(format!(
                "route of tour {} never passes the base station",
                r.tour
            )));
        }
        let mut stops: Vec<(f64, Stop)> = r.sensed.iter().map(|&(o, loc)| (o, Stop::Sense(loc))).collect();
        stops.extend(r.deliveries.iter().map(|&o| (o, Stop::Deliver)));
        // delivery sorts before capture at equal offsets
        stops.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then((matches!(a.1, Stop::Sense(_))).cmp(&matches!(b.1, Stop::Sense(_))))
        });
        let mut pending: Vec<f64> = Vec::new();
        let mut loops = Vec::new();
        let mut k = 0u64;
        'run: loop {
            let base = k as f64 * r.length;
            loops.push(LoopRecord {
                departure: base,
                arrival: base + r.length,
                child_wait: 0.0,
            });
            for (o, stop) in &stops {
                let t = base + o;
                match stop {
                    Stop::Sense(loc) => {
                        if t <= hi {
                            visits.push((t, *loc));
                            metrics.captured += 1;
                            pending.push(t);
                        } else if pending.is_empty() {
                            break 'run;
                        }
                    }
                    Stop::Deliver => {
                        for c in pending.drain(..) {
                            metrics.delivered += 1;
                            if c >= lo && c <= hi {
                                metrics.worst_delay = metrics.worst_delay.max(t - c);
                            }
                        }
                        if t > hi {
                            break 'run;
                        }
                    }
                }
            }
            k += 1;
        }
        metrics.distance.insert(r.tour, (w1 - w0).max(0.0));
        metrics.loops.insert(r.tour, loops);
        metrics.ready.insert(r.tour, 0.0);
        metrics.startup_wait.insert(r.tour, 0.0);
        metrics.max_start_wait.insert(r.tour, 0.0);
        metrics.max_child_wait.insert(r.tour, 0.0);
    }
    visits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (t, loc) in visits {
        let last = last_visit.insert(loc, t).expect("sensed location");
        if t >= lo {
            metrics.worst_idleness = metrics.worst_idleness.max(t.min(hi) - last);
        }
    }
    for &last in last_visit.values() {
        metrics.worst_idleness = metrics.worst_idleness.max(hi - last);
    }
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn route(length: f64, sensed: &[(f64, usize)], deliveries: &[f64]) -> LoopRoute {
        LoopRoute {
            tour: TourId(0),
            length,
            sensed: sensed.to_vec(),
            deliveries: deliveries.to_vec(),
        }
    }

    #[test]
    fn single_loop_through_base() {
        let sensed: Vec<(f64, usize)> = (0..10).map(|i| (i as f64, i)).collect();
        let m = run_single_hop(&[route(10.0, &sensed, &[0.0])], &SimConfig::new(50.0, 20.0)).unwrap();
        assert_eq!(m.worst_idleness, 10.0);
        // captured at the base on departure and delivered a loop later
        assert_eq!(m.worst_delay, 10.0);
        assert_eq!(m.sum_distance(), 10.0);
    }

    #[test]
    fn repeated_visits_shorten_idleness() {
        let m = run_single_hop(
            &[route(10.0, &[(2.0, 0), (8.0, 0)], &[5.0])],
            &SimConfig::new(60.0, 20.0),
        )
        .unwrap();
        assert_eq!(m.worst_idleness, 6.0);
        assert_eq!(m.worst_delay, 7.0);
    }

    #[test]
    fn no_delivery_is_unbounded() {
        let err = run_single_hop(&[route(4.0, &[(1.0, 0)], &[])], &SimConfig::new(10.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::UnboundedDelay(_)));
    }
}
