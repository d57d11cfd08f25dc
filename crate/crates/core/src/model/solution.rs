use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Direction, Instance, StoppingPattern, TOLERANCE};

/// One subline of a vehicle tour: the pattern driven at a 1-based position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourLeg {
    pub position: usize,
    pub pattern: StoppingPattern,
}

impl TourLeg {
    pub fn direction(&self) -> Direction {
        Direction::of_position(self.position)
    }

    /// Stops in driving order.
    pub fn stops(&self) -> Vec<usize> {
        self.pattern.stops_in(self.direction())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub request: usize,
    pub vehicle: usize,
    pub position: usize,
    /// 0-based index of the boarding stop in the vehicle's concatenated
    /// per-position stop lists.
    pub boarding_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub tours: Vec<Vec<TourLeg>>,
    pub assignments: Vec<Assignment>,
    pub rejected: Vec<usize>,
    pub objective: f64,
}

impl Solution {
    /// Every vehicle idle, every request rejected.
    pub fn empty(instance: &Instance) -> Self {
        Solution {
            tours: vec![Vec::new(); instance.vehicles()],
            assignments: Vec::new(),
            rejected: (0..instance.requests().len()).collect(),
            objective: 0.0,
        }
    }

    pub fn accepted(&self) -> usize {
        self.assignments.len()
    }

    pub fn tour_length(&self, instance: &Instance, vehicle: usize) -> f64 {
        self.tours[vehicle]
            .iter()
            .map(|leg| leg.pattern.length(instance))
            .sum()
    }

    /// Passenger reward plus saved distance, from scratch.
    pub fn compute_objective(&self, instance: &Instance) -> f64 {
        let direct: f64 = self
            .assignments
            .iter()
            .filter_map(|a| instance.requests().get(a.request))
            .map(|r| instance.distance(r.origin, r.destination))
            .sum();
        let driven: f64 = (0..self.tours.len())
            .map(|k| self.tour_length(instance, k))
            .sum();
        instance.w_pax * self.assignments.len() as f64 + instance.w_dist * (direct - driven)
    }

    /// Tour as one stop sequence per position, stations 1-based.
    pub fn stop_lists(&self, vehicle: usize) -> Vec<Vec<usize>> {
        self.tours[vehicle]
            .iter()
            .map(|leg| leg.stops().into_iter().map(|h| h + 1).collect())
            .collect()
    }
}

/// Boarding stop of a passenger entering at `origin` on `position` of `tour`.
pub(crate) fn boarding_index(tour: &[TourLeg], position: usize, origin: usize) -> Option<usize> {
    let mut offset = 0;
    for leg in tour {
        if leg.position == position {
            return leg.stops().iter().position(|&h| h == origin).map(|i| offset + i);
        }
        offset += leg.pattern.stop_count();
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    VehicleCount { expected: usize, found: usize },
    PositionGap { vehicle: usize, position: usize },
    Disconnected { vehicle: usize, position: usize },
    UnknownRequest { request: usize },
    UnknownVehicle { request: usize, vehicle: usize },
    MissingPosition { request: usize, vehicle: usize, position: usize },
    Directionality { request: usize, position: usize },
    NotServed { request: usize, vehicle: usize, position: usize },
    Capacity { vehicle: usize, position: usize, segment: usize, load: usize },
    AssignedTwice { request: usize },
    Unaccounted { request: usize },
    BoardingIndex { request: usize, expected: Option<usize>, found: usize },
    Objective { stored: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            VehicleCount { expected, found } => write!(f, "{found} tours for {expected} vehicles"),
            PositionGap { vehicle, position } => write!(f, "vehicle {vehicle}: position {position} out of sequence"),
            Disconnected { vehicle, position } => write!(f, "vehicle {vehicle}: position {position} does not start where the previous one ends"),
            UnknownRequest { request } => write!(f, "unknown request {request}"),
            UnknownVehicle { request, vehicle } => write!(f, "request {request} assigned to unknown vehicle {vehicle}"),
            MissingPosition { request, vehicle, position } => write!(f, "request {request} assigned to position {position} of vehicle {vehicle}, which has no subline"),
            Directionality { request, position } => write!(f, "request {request} travels against the direction of position {position}"),
            NotServed { request, vehicle, position } => write!(f, "vehicle {vehicle} position {position} skips an endpoint of request {request}"),
            Capacity { vehicle, position, segment, load } => write!(f, "vehicle {vehicle} position {position} carries {load} passengers between stations {} and {}", segment + 1, segment + 2),
            AssignedTwice { request } => write!(f, "request {request} is assigned more than once"),
            Unaccounted { request } => write!(f, "request {request} is neither assigned nor rejected"),
            BoardingIndex { request, expected, found } => write!(f, "request {request} boards at index {found}, expected {expected:?}"),
            Objective { stored, recomputed } => write!(f, "stored objective {stored} differs from recomputed {recomputed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub recomputed_objective: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks tour connectivity, directionality, service, capacity, request
/// bookkeeping and the stored objective. Violations are returned as data.
pub fn validate_solution(instance: &Instance, solution: &Solution) -> ValidationReport {
    let mut violations = Vec::new();
    let requests = instance.requests();

    if solution.tours.len() != instance.vehicles() {
        violations.push(Violation::VehicleCount {
            expected: instance.vehicles(),
            found: solution.tours.len(),
        });
    }
    for (k, tour) in solution.tours.iter().enumerate() {
        for (i, leg) in tour.iter().enumerate() {
            if leg.position != i + 1 || leg.pattern.stations() != instance.stations() {
                violations.push(Violation::PositionGap { vehicle: k, position: leg.position });
            }
            if i > 0 {
                let prev = &tour[i - 1];
                if prev.pattern.end(prev.direction()) != leg.pattern.start(leg.direction()) {
                    violations.push(Violation::Disconnected { vehicle: k, position: leg.position });
                }
            }
        }
    }

    let mut seen = vec![0usize; requests.len()];
    // (vehicle, position) -> assigned request ids
    let mut loads: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for a in &solution.assignments {
        let Some(r) = requests.get(a.request) else {
            violations.push(Violation::UnknownRequest { request: a.request });
            continue;
        };
        seen[a.request] += 1;
        let Some(tour) = solution.tours.get(a.vehicle) else {
            violations.push(Violation::UnknownVehicle { request: a.request, vehicle: a.vehicle });
            continue;
        };
        if Direction::of_position(a.position) != r.direction() {
            violations.push(Violation::Directionality { request: a.request, position: a.position });
        }
        let Some(leg) = tour.iter().find(|l| l.position == a.position) else {
            violations.push(Violation::MissingPosition {
                request: a.request,
                vehicle: a.vehicle,
                position: a.position,
            });
            continue;
        };
        if !leg.pattern.serves(r) {
            violations.push(Violation::NotServed {
                request: a.request,
                vehicle: a.vehicle,
                position: a.position,
            });
        }
        let expected = boarding_index(tour, a.position, r.origin);
        if expected != Some(a.boarding_index) {
            violations.push(Violation::BoardingIndex {
                request: a.request,
                expected,
                found: a.boarding_index,
            });
        }
        loads.entry((a.vehicle, a.position)).or_default().push(a.request);
    }
    for &r in &solution.rejected {
        match seen.get_mut(r) {
            Some(count) => *count += 1,
            None => violations.push(Violation::UnknownRequest { request: r }),
        }
    }
    for (r, &count) in seen.iter().enumerate() {
        match count {
            0 => violations.push(Violation::Unaccounted { request: r }),
            1 => {}
            _ => violations.push(Violation::AssignedTwice { request: r }),
        }
    }

    for (&(vehicle, position), members) in &loads {
        for segment in 0..instance.stations().saturating_sub(1) {
            let load = members
                .iter()
                .filter(|&&r| requests[r].covers_segment(segment))
                .count();
            if load > instance.capacity() {
                violations.push(Violation::Capacity { vehicle, position, segment, load });
            }
        }
    }

    let recomputed = if solution.tours.len() == instance.vehicles() {
        solution.compute_objective(instance)
    } else {
        f64::NAN
    };
    if !((recomputed - solution.objective).abs() <= TOLERANCE) {
        violations.push(Violation::Objective {
            stored: solution.objective,
            recomputed,
        });
    }
    ValidationReport {
        violations,
        recomputed_objective: recomputed,
    }
}
