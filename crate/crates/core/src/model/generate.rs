use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::error::{Error, Result};

/// Side length of the square the station coordinates are drawn from.
const AREA: f64 = 100.0;

/// Random instance with `n` stations and `m` requests.
///
/// Stations are uniform points in a square, numbered by their first
/// coordinate so the line runs left to right; distances are Euclidean and
/// therefore metric. Origins and destinations are uniform and distinct.
pub fn generate_instance(n: usize, m: usize, vehicles: usize, capacity: usize, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 stations, got {n}")));
    }
    if m == 0 {
        return Err(Error::Config("need at least one request".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..AREA), rng.gen_range(0.0..AREA)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let distances = points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                .collect()
        })
        .collect();
    let requests = (0..m)
        .map(|_| {
            let o = rng.gen_range(0..n);
            let mut d = rng.gen_range(0..n - 1);
            if d >= o {
                d += 1;
            }
            (o, d)
        })
        .collect();
    Instance::new(distances, requests, vehicles, capacity, 10.0, 1.0)
}

/// Instance name `<vehicles>-<requests>-<version>`, versions lettered from `A`.
pub fn instance_name(vehicles: usize, requests: usize, version: usize) -> String {
    format!("{vehicles}-{requests}-{}", version_letter(version))
}

fn version_letter(mut version: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'A' + (version % 26) as u8);
        if version < 26 {
            break;
        }
        version = version / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}
