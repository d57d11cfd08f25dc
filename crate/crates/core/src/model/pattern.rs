use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{Direction, Instance, Request};
use crate::error::{Error, Result};

/// Largest station count for which all `2^n - 1` patterns may be enumerated.
pub const ENUMERATION_LIMIT: usize = 20;

/// The set of stations a subline stops at, stored as a bit vector over the
/// `n` stations of the line. Never empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StoppingPattern {
    n: usize,
    words: Vec<u64>,
}

impl StoppingPattern {
    pub fn from_stops(n: usize, stops: &[usize]) -> Result<Self> {
        let mut words = vec![0u64; n.div_ceil(64).max(1)];
        for &h in stops {
            if h >= n {
                return Err(Error::InvalidPattern(format!(
                    "station {} outside 1..={n}",
                    h + 1
                )));
            }
            words[h / 64] |= 1 << (h % 64);
        }
        if words.iter().all(|&w| w == 0) {
            return Err(Error::InvalidPattern("a pattern must stop at least once".into()));
        }
        Ok(StoppingPattern { n, words })
    }

    /// Pattern from the low `n` bits of `mask`, bit `h` standing for station `h`.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidPattern("masks only cover 64 stations".into()));
        }
        if n < 64 && mask >> n != 0 {
            return Err(Error::InvalidPattern(format!("mask has bits beyond station {n}")));
        }
        if mask == 0 {
            return Err(Error::InvalidPattern("a pattern must stop at least once".into()));
        }
        Ok(StoppingPattern {
            n,
            words: vec![mask],
        })
    }

    pub fn single(n: usize, h: usize) -> Result<Self> {
        Self::from_stops(n, &[h])
    }

    /// The pattern stopping at every station.
    pub fn full(n: usize) -> Self {
        let stops: Vec<usize> = (0..n).collect();
        Self::from_stops(n, &stops).expect("n >= 1")
    }

    pub fn stations(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, h: usize) -> bool {
        h < self.n && self.words[h / 64] >> (h % 64) & 1 == 1
    }

    /// Stops in ascending station order.
    pub fn stops(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        (0..self.n).filter(move |&h| self.contains(h))
    }

    /// Stops in the order a vehicle serving `dir` visits them.
    pub fn stops_in(&self, dir: Direction) -> Vec<usize> {
        match dir {
            Direction::Ascending => self.stops().collect(),
            Direction::Descending => self.stops().rev().collect(),
        }
    }

    pub fn stop_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn lowest(&self) -> usize {
        self.stops().next().expect("pattern is non-empty")
    }

    pub fn highest(&self) -> usize {
        self.stops().next_back().expect("pattern is non-empty")
    }

    /// Station where a subline with this pattern starts when travelling `dir`.
    pub fn start(&self, dir: Direction) -> usize {
        match dir {
            Direction::Ascending => self.lowest(),
            Direction::Descending => self.highest(),
        }
    }

    pub fn end(&self, dir: Direction) -> usize {
        self.start(dir.opposite())
    }

    pub fn is_single_stop(&self) -> bool {
        self.stop_count() == 1
    }

    /// Sum of distances between consecutive stops; zero for single stops.
    pub fn length(&self, instance: &Instance) -> f64 {
        self.length_with(|g, h| instance.distance(g, h))
    }

    pub fn length_with(&self, distance: impl Fn(usize, usize) -> f64) -> f64 {
        let stops: Vec<usize> = self.stops().collect();
        stops.windows(2).map(|w| distance(w[0], w[1])).sum()
    }

    pub fn serves(&self, request: &Request) -> bool {
        self.contains(request.origin) && self.contains(request.destination)
    }

    /// The same stops seen from the other end of the line.
    pub fn mirrored(&self) -> Self {
        let stops: Vec<usize> = self.stops().map(|h| self.n - 1 - h).collect();
        Self::from_stops(self.n, &stops).expect("mirroring keeps stops")
    }

    /// Returns a copy with station `h` added.
    pub fn with_stop(&self, h: usize) -> Result<Self> {
        let mut stops: Vec<usize> = self.stops().collect();
        stops.push(h);
        Self::from_stops(self.n, &stops)
    }
}

pub fn pattern_length(pattern: &StoppingPattern, instance: &Instance) -> f64 {
    pattern.length(instance)
}

pub fn pattern_serves(pattern: &StoppingPattern, request: &Request) -> bool {
    pattern.serves(request)
}

impl fmt::Display for StoppingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in 0..self.n {
            f.write_str(if self.contains(h) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for StoppingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StoppingPattern({self})")
    }
}

impl std::str::FromStr for StoppingPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut stops = Vec::new();
        for (h, c) in s.chars().enumerate() {
            match c {
                '1' => stops.push(h),
                '0' => {}
                other => {
                    return Err(Error::InvalidPattern(format!(
                        "unexpected character {other:?} in pattern"
                    )))
                }
            }
        }
        Self::from_stops(s.chars().count(), &stops)
    }
}

impl Serialize for StoppingPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StoppingPattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Every non-empty stopping pattern on `n` stations, in increasing mask order.
pub fn enumerate_all_patterns(n: usize) -> Result<impl Iterator<Item = StoppingPattern>> {
    if n == 0 || n > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "stations",
            value: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok((1u64..(1u64 << n)).map(move |mask| StoppingPattern::from_mask(n, mask).unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(coords: &[f64]) -> Instance {
        Instance::on_line(coords, vec![], 1, 1).unwrap()
    }

    #[test]
    fn length_of_examples() {
        // t12 = 2, t23 = 3, t13 = 4 (not metric-tight on purpose)
        let d = vec![
            vec![0.0, 2.0, 4.0],
            vec![2.0, 0.0, 3.0],
            vec![4.0, 3.0, 0.0],
        ];
        let inst = Instance::new(d, vec![], 1, 1, 10.0, 1.0).unwrap();
        let p = |s: &[usize]| StoppingPattern::from_stops(3, s).unwrap();
        assert_eq!(pattern_length(&p(&[2]), &inst), 0.0);
        assert_eq!(pattern_length(&p(&[0, 1, 2]), &inst), 5.0);
        assert_eq!(pattern_length(&p(&[0, 2]), &inst), 4.0);
    }

    #[test]
    fn empty_pattern_is_rejected() {
        assert!(matches!(
            StoppingPattern::from_stops(4, &[]),
            Err(Error::InvalidPattern(_))
        ));
        assert!(StoppingPattern::from_mask(4, 0).is_err());
        assert!(StoppingPattern::from_mask(4, 0b10000).is_err());
        assert!(StoppingPattern::from_stops(4, &[4]).is_err());
    }

    #[test]
    fn serves_requires_both_endpoints() {
        let p = StoppingPattern::from_stops(9, &[0, 4, 8]).unwrap();
        assert!(pattern_serves(&p, &Request::new(0, 0, 8)));
        assert!(!pattern_serves(&p, &Request::new(1, 0, 1)));
        let full = StoppingPattern::full(9);
        assert!(pattern_serves(&full, &Request::new(2, 7, 3)));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_all_patterns(4).unwrap().count(), 15);
        assert_eq!(enumerate_all_patterns(1).unwrap().count(), 1);
        let inst = line(&[0.0, 1.0, 3.0]);
        let all: Vec<_> = enumerate_all_patterns(3).unwrap().collect();
        assert_eq!(all.len(), 7);
        assert_eq!(all.iter().filter(|p| p.length(&inst) == 0.0).count(), 3);
        assert!(matches!(
            enumerate_all_patterns(21),
            Err(Error::Capacity { .. })
        ));
        assert!(enumerate_all_patterns(0).is_err());
    }

    #[test]
    fn start_and_end_follow_direction() {
        let p = StoppingPattern::from_stops(9, &[1, 5, 7, 8]).unwrap();
        assert_eq!(p.start(Direction::Ascending), 1);
        assert_eq!(p.end(Direction::Ascending), 8);
        assert_eq!(p.start(Direction::Descending), 8);
        assert_eq!(p.end(Direction::Descending), 1);
        assert_eq!(p.stops_in(Direction::Descending), vec![8, 7, 5, 1]);
    }

    #[test]
    fn text_form_round_trips() {
        let p: StoppingPattern = "100010001".parse().unwrap();
        assert_eq!(p.stops().collect::<Vec<_>>(), vec![0, 4, 8]);
        assert_eq!(p.to_string(), "100010001");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"100010001\"");
        assert!("000".parse::<StoppingPattern>().is_err());
        assert!("10x".parse::<StoppingPattern>().is_err());
    }

    #[test]
    fn wide_patterns() {
        let p = StoppingPattern::from_stops(70, &[3, 64, 69]).unwrap();
        assert_eq!(p.lowest(), 3);
        assert_eq!(p.highest(), 69);
        assert_eq!(p.stop_count(), 3);
        assert_eq!(p.mirrored().stops().collect::<Vec<_>>(), vec![0, 5, 66]);
    }

    proptest! {
        #[test]
        fn exactly_n_single_stops(n in 1usize..=10) {
            let coords: Vec<f64> = (0..n).map(|h| h as f64 * 1.5).collect();
            let inst = line(&coords);
            let all: Vec<_> = enumerate_all_patterns(n).unwrap().collect();
            prop_assert_eq!(all.len(), (1usize << n) - 1);
            prop_assert_eq!(all.iter().filter(|p| p.length(&inst) == 0.0).count(), n);
            prop_assert!(all.iter().all(|p| (p.length(&inst) == 0.0) == p.is_single_stop()));
        }

        #[test]
        fn adding_a_stop_never_shortens_metric_patterns(
            xs in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), 2..9),
            mask in 1u64..256,
            extra in 0usize..8,
        ) {
            let n = xs.len();
            let d: Vec<Vec<f64>> = xs.iter()
                .map(|a| xs.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
                .collect();
            let inst = Instance::new(d, vec![], 1, 1, 10.0, 1.0).unwrap();
            let mask = mask & ((1 << n) - 1);
            prop_assume!(mask != 0);
            let p = StoppingPattern::from_mask(n, mask).unwrap();
            let q = p.with_stop(extra % n).unwrap();
            prop_assert!(q.length(&inst) >= p.length(&inst) - 1e-9);
        }

        #[test]
        fn mirroring_is_an_involution(n in 1usize..40, seed in any::<u64>()) {
            let stops: Vec<usize> = (0..n).filter(|h| seed >> (h % 64) & 1 == 1).collect();
            prop_assume!(!stops.is_empty());
            let p = StoppingPattern::from_stops(n, &stops).unwrap();
            prop_assert_eq!(p.mirrored().mirrored(), p.clone());
            prop_assert_eq!(p.mirrored().lowest(), n - 1 - p.highest());
        }
    }
}
