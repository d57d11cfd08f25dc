//! Reduction from clique to the uncapacitated most profitable stopping
//! pattern problem.
//!
//! A graph and a clique size `b` become a line with two mirrored halves. Each
//! half has `b + 1` base stations, and between consecutive base stations sits
//! one vertex station per graph vertex. Base requests force the pattern
//! through every base station, and a detour to more than one vertex station
//! per gap costs more than every smaller reward together. Particularity,
//! consistency and edge requests then reward picking `b` distinct vertices on
//! the left, the same vertices on the right, and pairwise adjacent vertices.
//! The optimum reaches the threshold exactly when the graph has a `b`-clique.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::io::InstanceFile;
use crate::model::{Direction, Instance, StoppingPattern};
use crate::pricing::{brute_force_mpsp, MpspSolution};

/// Largest generated line accepted by [`verify_gadget`].
pub const GADGET_STATION_LIMIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GadgetConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl Default for GadgetConstants {
    fn default() -> Self {
        GadgetConstants {
            alpha: 1e10,
            beta: 1e7,
            gamma: 1e4,
            delta: 1e2,
            epsilon: 1.0,
        }
    }
}

/// Undirected simple graph on vertices `0..vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices || u == v {
                return Err(Error::Config(format!("edge ({u}, {v}) is not valid on {vertices} vertices")));
            }
        }
        let mut seen: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != edges.len() {
            return Err(Error::Config("graph lists an edge twice".into()));
        }
        Ok(Graph { vertices, edges })
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// Whether some `b` vertices are pairwise adjacent, by subset enumeration.
    pub fn has_clique(&self, b: usize) -> bool {
        if b == 0 {
            return true;
        }
        if b > self.vertices || self.vertices >= 64 {
            return false;
        }
        (0u64..1 << self.vertices).filter(|s| s.count_ones() as usize == b).any(|s| {
            let members: Vec<usize> = (0..self.vertices).filter(|&v| s >> v & 1 == 1).collect();
            members
                .iter()
                .enumerate()
                .all(|(i, &u)| members[i + 1..].iter().all(|&v| self.adjacent(u, v)))
        })
    }

    /// Every labelled simple graph on `vertices` vertices.
    pub fn all_on(vertices: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..vertices).flat_map(|u| (u + 1..vertices).map(move |v| (u, v))).collect();
        (0u64..1 << pairs.len())
            .map(|mask| Graph {
                vertices,
                edges: pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetSpec {
    pub graph: Graph,
    pub clique_size: usize,
    pub constants: GadgetConstants,
}

fn choose2(b: usize) -> f64 {
    (b * b.saturating_sub(1) / 2) as f64
}

impl GadgetSpec {
    pub fn new(graph: Graph, clique_size: usize) -> Self {
        GadgetSpec {
            graph,
            clique_size,
            constants: GadgetConstants::default(),
        }
    }

    /// Profit reached exactly when the pattern encodes a clique.
    pub fn threshold(&self) -> f64 {
        let b = self.clique_size as f64;
        let GadgetConstants { alpha, beta, gamma, delta, epsilon } = self.constants;
        (2.0 * b + 1.0) * alpha + 2.0 * choose2(self.clique_size) * gamma + b * delta
            + choose2(self.clique_size) * epsilon
            - (2.0 * b + 1.0) * 2.0 * beta
    }

    pub fn stations(&self) -> usize {
        2 * (self.clique_size + 1) + 2 * self.clique_size * self.graph.vertices
    }

    /// Checks that each reward tier outweighs everything below it, counting
    /// what a pattern with one vertex station per gap can collect.
    pub fn validate(&self) -> Result<()> {
        let b = self.clique_size;
        if b == 0 {
            return Err(Error::Config("clique size must be at least 1".into()));
        }
        if self.graph.vertices < b {
            return Err(Error::Config(format!(
                "a {b}-clique needs at least {b} vertices, graph has {}",
                self.graph.vertices
            )));
        }
        let GadgetConstants { alpha, beta, gamma, delta, epsilon } = self.constants;
        if !(epsilon > 0.0) {
            return Err(Error::Config("reward constants must be positive".into()));
        }
        let pairs = (b * b) as f64;
        let edge_tier = epsilon * pairs;
        let consistency_tier = delta * pairs + edge_tier;
        let particularity_tier = gamma * 2.0 * choose2(b) + consistency_tier;
        let checks = [
            (edge_tier < delta, "edge rewards must stay below one consistency reward"),
            (consistency_tier < gamma, "consistency and edge rewards must stay below one particularity reward"),
            (particularity_tier < 2.0 * beta, "all vertex rewards must stay below one extra detour"),
            (alpha > 2.0 * beta + particularity_tier, "base rewards must exceed a detour plus all vertex rewards"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::Config(msg.into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Station layout of a gadget line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    vertices: usize,
    b: usize,
}

impl Layout {
    fn half(&self) -> usize {
        (self.b + 1) + self.b * self.vertices
    }

    fn offset(&self, side: Side) -> usize {
        match side {
            Side::Left => 0,
            Side::Right => self.half(),
        }
    }

    /// Base station `j` in `0..=b` of a side.
    pub fn base(&self, side: Side, j: usize) -> usize {
        self.offset(side) + j * (self.vertices + 1)
    }

    /// Vertex station of vertex `i` in the gap after base `j` in `0..b`.
    pub fn vertex(&self, side: Side, i: usize, j: usize) -> usize {
        self.base(side, j) + 1 + i
    }

    /// `(side, vertex, gap)` of a vertex station.
    pub fn locate(&self, station: usize) -> Option<(Side, usize, usize)> {
        let (side, local) = if station < self.half() {
            (Side::Left, station)
        } else {
            (Side::Right, station - self.half())
        };
        let (j, r) = (local / (self.vertices + 1), local % (self.vertices + 1));
        (r > 0 && j < self.b).then(|| (side, r - 1, j))
    }
}

/// A generated gadget: the line, per-request rewards and the threshold.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub instance: Instance,
    pub rewards: Vec<f64>,
    pub threshold: f64,
    pub layout: Layout,
    pub spec: GadgetSpec,
}

impl GadgetInstance {
    /// Instance file with the graph, constants, threshold and rewards attached.
    pub fn to_file(&self) -> InstanceFile {
        let mut file = InstanceFile::from(&self.instance);
        let edges: Vec<[usize; 2]> = self.spec.graph.edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect();
        file.provenance = Some(json!({
            "kind": "clique-gadget",
            "graph": { "vertices": self.spec.graph.vertices, "edges": edges },
            "b": self.spec.clique_size,
            "constants": self.spec.constants,
            "threshold": self.threshold,
            "rewards": self.rewards,
        }));
        file
    }
}

pub fn clique_to_mpusp(spec: &GadgetSpec) -> Result<GadgetInstance> {
    spec.validate()?;
    let n_g = spec.graph.vertices;
    let b = spec.clique_size;
    let layout = Layout { vertices: n_g, b };
    let n = spec.stations();
    let GadgetConstants { alpha, beta, gamma, delta, epsilon } = spec.constants;

    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (h, row) in dist.iter_mut().enumerate() {
        row[h] = 0.0;
    }
    let mut link = |a: usize, c: usize, d: f64| {
        dist[a][c] = dist[a][c].min(d);
        dist[c][a] = dist[c][a].min(d);
    };
    for side in [Side::Left, Side::Right] {
        for j in 0..b {
            link(layout.base(side, j), layout.base(side, j + 1), 2.0 * beta);
            for i in 0..n_g {
                let v = layout.vertex(side, i, j);
                link(v, layout.base(side, j), beta);
                link(v, layout.base(side, j + 1), beta);
                for i2 in i + 1..n_g {
                    link(v, layout.vertex(side, i2, j), 2.0 * beta);
                }
            }
        }
    }
    link(layout.base(Side::Left, b), layout.base(Side::Right, 0), 2.0 * beta);
    for m in 0..n {
        for a in 0..n {
            for c in 0..n {
                let via = dist[a][m] + dist[m][c];
                if via < dist[a][c] {
                    dist[a][c] = via;
                }
            }
        }
    }

    let mut requests = Vec::new();
    let mut rewards = Vec::new();
    let mut add = |o: usize, d: usize, reward: f64| {
        requests.push((o, d));
        rewards.push(reward);
    };
    let bases: Vec<usize> = [Side::Left, Side::Right]
        .iter()
        .flat_map(|&s| (0..=b).map(move |j| layout.base(s, j)))
        .collect();
    for w in bases.windows(2) {
        add(w[0], w[1], alpha);
    }
    for side in [Side::Left, Side::Right] {
        for j in 0..b {
            for j2 in j + 1..b {
                for i in 0..n_g {
                    for i2 in (0..n_g).filter(|&i2| i2 != i) {
                        add(layout.vertex(side, i, j), layout.vertex(side, i2, j2), gamma);
                    }
                }
            }
        }
    }
    for i in 0..n_g {
        for j in 0..b {
            for j2 in 0..b {
                add(layout.vertex(Side::Left, i, j), layout.vertex(Side::Right, i, j2), delta);
            }
        }
    }
    for &(u, v) in &spec.graph.edges {
        for j in 0..b {
            for j2 in 0..b {
                add(layout.vertex(Side::Left, u, j), layout.vertex(Side::Right, v, j2), epsilon);
            }
        }
    }

    let m = requests.len();
    let instance = Instance::new(dist, requests, 1, m.max(1), 10.0, 1.0)?
        .with_name(format!("gadget-{n_g}-{}-b{b}", spec.graph.edges.len()));
    Ok(GadgetInstance {
        instance,
        rewards,
        threshold: spec.threshold(),
        layout,
        spec: spec.clone(),
    })
}

/// Tolerance for comparing gadget profits, far below the smallest reward.
fn profit_tolerance(spec: &GadgetSpec) -> f64 {
    spec.constants.epsilon / 2.0
}

/// Exact uncapacitated optimum of a gadget line.
pub fn solve_gadget(gadget: &GadgetInstance) -> Result<MpspSolution> {
    let n = gadget.instance.stations();
    if n > GADGET_STATION_LIMIT {
        return Err(Error::Capacity { what: "gadget stations", value: n, limit: GADGET_STATION_LIMIT });
    }
    brute_force_mpsp(&gadget.instance, &gadget.rewards, Direction::Ascending, None)
}

/// Checks that the optimum reaches the threshold exactly when the graph has
/// a clique of the gadget's size.
pub fn verify_gadget(gadget: &GadgetInstance) -> Result<bool> {
    let best = solve_gadget(gadget)?;
    let reaches = best.profit >= gadget.threshold - profit_tolerance(&gadget.spec);
    Ok(reaches == gadget.spec.graph.has_clique(gadget.spec.clique_size))
}

/// Vertex stations picked per side and gap, in gap order.
pub fn picked_vertices(gadget: &GadgetInstance, pattern: &StoppingPattern) -> Vec<(Side, usize, usize)> {
    pattern.stops().filter_map(|h| gadget.layout.locate(h)).collect()
}

/// The graph of the running example: four vertices, a triangle on
/// `{0, 1, 3}` and a pendant edge to vertex `2`.
pub fn example_graph() -> Graph {
    Graph::new(4, vec![(0, 1), (0, 3), (1, 3), (2, 3)]).expect("valid graph")
}
