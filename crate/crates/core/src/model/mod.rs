//! Problem data: stations on a line, requests, fleet, and the objective weights.
//!
//! Stations are indexed from `0` internally. Instance and solution files use
//! 1-based station numbers (see [`io`]).

mod generate;
pub mod io;
mod overlap;
mod pattern;
mod solution;

pub use generate::{generate_instance, instance_name};
pub(crate) use overlap::overlap_groups_of;
pub use overlap::{overlap_groups, OverlapGroup};
pub use pattern::{
    enumerate_all_patterns, pattern_length, pattern_serves, StoppingPattern, ENUMERATION_LIMIT,
};
pub(crate) use solution::boarding_index;
pub use solution::{
    validate_solution, Assignment, Solution, TourLeg, ValidationReport, Violation,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for every objective and bound comparison.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ascending,
    Descending,
}

impl Direction {
    /// Direction served at a 1-based tour position: odd positions ascend,
    /// even positions descend.
    pub fn of_position(position: usize) -> Direction {
        if position % 2 == 1 {
            Direction::Ascending
        } else {
            Direction::Descending
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Ascending => Direction::Descending,
            Direction::Descending => Direction::Ascending,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Ascending => f.write_str("asc"),
            Direction::Descending => f.write_str("desc"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Request {
    pub id: usize,
    pub origin: usize,
    pub destination: usize,
}

impl Request {
    pub fn new(id: usize, origin: usize, destination: usize) -> Self {
        Request {
            id,
            origin,
            destination,
        }
    }

    pub fn direction(&self) -> Direction {
        direction_of(self)
    }

    /// Lowest and highest station on the request's path.
    pub fn span(&self) -> (usize, usize) {
        (
            self.origin.min(self.destination),
            self.origin.max(self.destination),
        )
    }

    /// Whether the passenger is on board while the vehicle drives the line
    /// segment between stations `h` and `h + 1`.
    pub fn covers_segment(&self, h: usize) -> bool {
        let (lo, hi) = self.span();
        lo <= h && h < hi
    }
}

pub fn direction_of(request: &Request) -> Direction {
    if request.origin < request.destination {
        Direction::Ascending
    } else {
        Direction::Descending
    }
}

/// A line-based dial-a-ride instance without time windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: Option<String>,
    n: usize,
    distances: Vec<f64>,
    requests: Vec<Request>,
    vehicles: usize,
    capacity: usize,
    pub w_pax: f64,
    pub w_dist: f64,
}

impl Instance {
    /// Builds and validates an instance. `distances` is the full `n × n`
    /// matrix given row by row; request ids are reassigned to their index.
    pub fn new(
        distances: Vec<Vec<f64>>,
        requests: Vec<(usize, usize)>,
        vehicles: usize,
        capacity: usize,
        w_pax: f64,
        w_dist: f64,
    ) -> Result<Self> {
        let n = distances.len();
        if n == 0 {
            return Err(Error::InvalidInstance("at least one station is required".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (g, row) in distances.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "distance row {} has {} entries, expected {n}",
                    g + 1,
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        for g in 0..n {
            if flat[g * n + g] != 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "distance from station {0} to itself must be 0",
                    g + 1
                )));
            }
            for h in 0..n {
                let d = flat[g * n + h];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "distance {}-{} must be finite and nonnegative, got {d}",
                        g + 1,
                        h + 1
                    )));
                }
                if d != flat[h * n + g] {
                    return Err(Error::InvalidInstance(format!(
                        "distance matrix is not symmetric at {}-{}",
                        g + 1,
                        h + 1
                    )));
                }
            }
        }
        let requests = requests
            .into_iter()
            .enumerate()
            .map(|(id, (o, d))| {
                if o >= n || d >= n {
                    Err(Error::InvalidInstance(format!(
                        "request {id} references a station outside 1..={n}"
                    )))
                } else if o == d {
                    Err(Error::InvalidInstance(format!(
                        "request {id} has identical origin and destination"
                    )))
                } else {
                    Ok(Request::new(id, o, d))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if vehicles == 0 {
            return Err(Error::InvalidInstance("at least one vehicle is required".into()));
        }
        if capacity == 0 {
            return Err(Error::InvalidInstance("capacity must be at least 1".into()));
        }
        if !(w_pax >= 0.0 && w_dist >= 0.0) {
            return Err(Error::InvalidInstance("objective weights must be nonnegative".into()));
        }
        Ok(Instance {
            name: None,
            n,
            distances: flat,
            requests,
            vehicles,
            capacity,
            w_pax,
            w_dist,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn stations(&self) -> usize {
        self.n
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn vehicles(&self) -> usize {
        self.vehicles
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn distance(&self, g: usize, h: usize) -> f64 {
        self.distances[g * self.n + h]
    }

    pub fn distance_rows(&self) -> Vec<Vec<f64>> {
        self.distances.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn requests_in(&self, dir: Direction) -> impl Iterator<Item = &Request> + '_ {
        self.requests.iter().filter(move |r| r.direction() == dir)
    }

    /// Objective contribution of serving `r`: the passenger reward plus the
    /// direct distance it would otherwise have driven.
    pub fn request_value(&self, r: &Request) -> f64 {
        self.w_pax + self.w_dist * self.distance(r.origin, r.destination)
    }

    /// Same stations, distances and weights with a different request set.
    pub fn with_requests(&self, requests: Vec<(usize, usize)>) -> Result<Instance> {
        let mut inst = Instance::new(
            self.distance_rows(),
            requests,
            self.vehicles,
            self.capacity,
            self.w_pax,
            self.w_dist,
        )?;
        inst.name = self.name.clone();
        Ok(inst)
    }

    pub fn with_fleet(&self, vehicles: usize, capacity: usize) -> Result<Instance> {
        let mut inst = Instance::new(
            self.distance_rows(),
            self.requests.iter().map(|r| (r.origin, r.destination)).collect(),
            vehicles,
            capacity,
            self.w_pax,
            self.w_dist,
        )?;
        inst.name = self.name.clone();
        Ok(inst)
    }

    /// Instance whose stations lie on a straight line at the given coordinates.
    pub fn on_line(
        coordinates: &[f64],
        requests: Vec<(usize, usize)>,
        vehicles: usize,
        capacity: usize,
    ) -> Result<Instance> {
        let distances = coordinates
            .iter()
            .map(|a| coordinates.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Instance::new(distances, requests, vehicles, capacity, 10.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_follows_station_order() {
        assert_eq!(direction_of(&Request::new(0, 1, 4)), Direction::Ascending);
        assert_eq!(direction_of(&Request::new(0, 6, 2)), Direction::Descending);
        assert_eq!(direction_of(&Request::new(0, 0, 1)), Direction::Ascending);
    }

    #[test]
    fn positions_alternate() {
        assert_eq!(Direction::of_position(1), Direction::Ascending);
        assert_eq!(Direction::of_position(2), Direction::Descending);
        assert_eq!(Direction::of_position(7), Direction::Ascending);
    }

    #[test]
    fn rejects_bad_instances() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(Instance::new(d.clone(), vec![(0, 0)], 1, 1, 10.0, 1.0).is_err());
        assert!(Instance::new(d.clone(), vec![(0, 2)], 1, 1, 10.0, 1.0).is_err());
        assert!(Instance::new(d.clone(), vec![], 0, 1, 10.0, 1.0).is_err());
        assert!(Instance::new(d.clone(), vec![], 1, 0, 10.0, 1.0).is_err());
        assert!(Instance::new(d.clone(), vec![], 1, 1, -1.0, 1.0).is_err());
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(Instance::new(asym, vec![], 1, 1, 10.0, 1.0).is_err());
        let diag = vec![vec![1.0, 1.0], vec![1.0, 0.0]];
        assert!(Instance::new(diag, vec![], 1, 1, 10.0, 1.0).is_err());
        assert!(Instance::new(d, vec![(0, 1)], 1, 1, 10.0, 1.0).is_ok());
    }

    #[test]
    fn segment_coverage() {
        let r = Request::new(0, 4, 1);
        assert!(!r.covers_segment(0));
        assert!(r.covers_segment(1));
        assert!(r.covers_segment(3));
        assert!(!r.covers_segment(4));
    }
}
