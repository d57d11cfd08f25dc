use super::{Direction, Instance, Request};

/// Same-direction requests that are all on board while a vehicle drives the
/// line segment `(segment, segment + 1)`.
///
/// Overlap between request paths is an interval graph, so the segment groups
/// are exactly its maximal cliques: capacity rows over these groups imply the
/// rows for every other overlapping subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapGroup {
    pub direction: Direction,
    pub members: Vec<usize>,
    /// Lower station of the witness segment.
    pub segment: usize,
}

impl OverlapGroup {
    pub fn contains(&self, request: usize) -> bool {
        self.members.binary_search(&request).is_ok()
    }
}

/// Segment-maximal overlap groups of the `dir` requests, at most `n - 1`.
pub fn overlap_groups(instance: &Instance, dir: Direction) -> Vec<OverlapGroup> {
    let requests: Vec<&Request> = instance.requests_in(dir).collect();
    overlap_groups_of(instance.stations(), dir, &requests)
}

pub(crate) fn overlap_groups_of(n: usize, dir: Direction, requests: &[&Request]) -> Vec<OverlapGroup> {
    let mut groups: Vec<OverlapGroup> = Vec::new();
    for segment in 0..n.saturating_sub(1) {
        let mut members: Vec<usize> = requests
            .iter()
            .filter(|r| r.covers_segment(segment))
            .map(|r| r.id)
            .collect();
        if members.is_empty() {
            continue;
        }
        members.sort_unstable();
        if groups.iter().any(|g| g.members == members) {
            continue;
        }
        groups.push(OverlapGroup {
            direction: dir,
            members,
            segment,
        });
    }
    groups
}
