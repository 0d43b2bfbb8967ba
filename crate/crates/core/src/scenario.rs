//! Urban grid layout, node placement and pedestrian mobility.
//!
//! Blocks are squares of side `block_size` laid out on a `blocks x blocks`
//! grid with pitch `block_size + street_width`. Block `(c, r)` occupies
//! `[c p, c p + block_size] x [r p, r p + block_size]`. Horizontal street `s`
//! (0..=blocks) runs below block row `s` and is centred at `y = s p - w/2`;
//! vertical streets are numbered the same way along x.
//!
//! Pedestrians walk on sidewalk centrelines, which run `sidewalk_width / 2`
//! outside each block edge, and may only change block through crosswalks
//! joining facing corners at intersections.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridLayout {
    pub blocks: usize,
    pub block_size: f64,
    pub street_width: f64,
    pub sidewalk_width: f64,
}

impl Default for GridLayout {
    fn default() -> Self {
        Self {
            blocks: 3,
            block_size: 120.0,
            street_width: 14.0,
            sidewalk_width: 3.0,
        }
    }
}

impl GridLayout {
    pub fn pitch(&self) -> f64 {
        self.block_size + self.street_width
    }

    /// Centre line of horizontal (or vertical) street `s`.
    pub fn street_center(&self, s: usize) -> f64 {
        s as f64 * self.pitch() - self.street_width / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(Error::invalid("grid needs at least one block"));
        }
        if !(self.block_size > 0.0) || !(self.street_width > 0.0) || !(self.sidewalk_width > 0.0) {
            return Err(Error::invalid("grid dimensions must be positive"));
        }
        if 2.0 * self.sidewalk_width >= self.street_width {
            return Err(Error::invalid("sidewalks must leave room for the roadway"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Sidewalk,
    Crosswalk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
    pub length: f64,
}

/// Sidewalk centrelines and crosswalks as an undirected graph.
#[derive(Debug, Clone)]
pub struct SidewalkGraph {
    pub nodes: Vec<[f64; 2]>,
    pub edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl SidewalkGraph {
    pub fn build(layout: &GridLayout) -> Self {
        let p = layout.pitch();
        let o = layout.sidewalk_width / 2.0;
        let n = layout.blocks;
        let mut nodes = Vec::with_capacity(4 * n * n);
        // corner index: 4 * (r * n + c) + k, k = SW, SE, NE, NW
        for r in 0..n {
            for c in 0..n {
                let (x0, y0) = (c as f64 * p, r as f64 * p);
                let (x1, y1) = (x0 + layout.block_size, y0 + layout.block_size);
                nodes.push([x0 - o, y0 - o]);
                nodes.push([x1 + o, y0 - o]);
                nodes.push([x1 + o, y1 + o]);
                nodes.push([x0 - o, y1 + o]);
            }
        }
        let corner = |c: usize, r: usize, k: usize| 4 * (r * n + c) + k;
        let mut edges = Vec::new();
        let mut push = |nodes: &Vec<[f64; 2]>, a: usize, b: usize, kind: EdgeKind| {
            let d = ((nodes[a][0] - nodes[b][0]).powi(2) + (nodes[a][1] - nodes[b][1]).powi(2)).sqrt();
            edges.push(Edge { a, b, kind, length: d });
        };
        for r in 0..n {
            for c in 0..n {
                for k in 0..4 {
                    push(&nodes, corner(c, r, k), corner(c, r, (k + 1) % 4), EdgeKind::Sidewalk);
                }
                if c + 1 < n {
                    push(&nodes, corner(c, r, 1), corner(c + 1, r, 0), EdgeKind::Crosswalk);
                    push(&nodes, corner(c, r, 2), corner(c + 1, r, 3), EdgeKind::Crosswalk);
                }
                if r + 1 < n {
                    push(&nodes, corner(c, r, 3), corner(c, r + 1, 0), EdgeKind::Crosswalk);
                    push(&nodes, corner(c, r, 2), corner(c, r + 1, 1), EdgeKind::Crosswalk);
                }
            }
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a].push(i);
            adjacency[e.b].push(i);
        }
        Self {
            nodes,
            edges,
            adjacency,
        }
    }

    pub fn incident(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Sidewalk edges bordering horizontal street `s`.
    pub fn street_sidewalks(&self, layout: &GridLayout, s: usize) -> Vec<usize> {
        let y = layout.street_center(s);
        let half = layout.street_width / 2.0;
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                e.kind == EdgeKind::Sidewalk && {
                    let (pa, pb) = (self.nodes[e.a], self.nodes[e.b]);
                    pa[1] == pb[1] && (pa[1] - y).abs() < half
                }
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Distance from `p` to the nearest point of the network.
    pub fn distance_to_network(&self, p: &[f64; 2]) -> f64 {
        self.edges
            .iter()
            .map(|e| point_segment_distance(p, &self.nodes[e.a], &self.nodes[e.b]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn point_segment_distance(p: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    ((a[0] + t * dx - p[0]).powi(2) + (a[1] + t * dy - p[1]).powi(2)).sqrt()
}

/// Relative weights of the choices available at an intersection corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TurnWeights {
    #[serde(rename = "continue")]
    pub straight: f64,
    pub turn: f64,
    pub cross: f64,
}

impl Default for TurnWeights {
    fn default() -> Self {
        Self {
            straight: 0.5,
            turn: 0.2,
            cross: 0.1,
        }
    }
}

/// A pedestrian travelling along one edge of the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pedestrian {
    pub edge: usize,
    /// Travelling from `a` to `b` when true.
    pub forward: bool,
    /// Distance already covered along the edge.
    pub offset: f64,
}

impl Pedestrian {
    pub fn position(&self, graph: &SidewalkGraph) -> [f64; 2] {
        let e = &graph.edges[self.edge];
        let (from, to) = if self.forward { (e.a, e.b) } else { (e.b, e.a) };
        let t = if e.length > 0.0 { self.offset / e.length } else { 0.0 };
        let (p, q) = (graph.nodes[from], graph.nodes[to]);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    }

    fn heading(graph: &SidewalkGraph, from: usize, to: usize) -> [f64; 2] {
        let (p, q) = (graph.nodes[from], graph.nodes[to]);
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let l = dx.hypot(dy);
        [dx / l, dy / l]
    }

    /// Advances `distance` metres, choosing a new edge at every node.
    pub fn advance(&mut self, graph: &SidewalkGraph, mut distance: f64, weights: &TurnWeights, rng: &mut impl Rng) {
        loop {
            let e = graph.edges[self.edge];
            let remaining = e.length - self.offset;
            if distance < remaining {
                self.offset += distance;
                return;
            }
            distance -= remaining;
            let (from, at) = if self.forward { (e.a, e.b) } else { (e.b, e.a) };
            let h = Self::heading(graph, from, at);
            let mut options: Vec<(usize, f64)> = Vec::new();
            for &cand in graph.incident(at) {
                if cand == self.edge {
                    continue;
                }
                let ce = graph.edges[cand];
                let other = if ce.a == at { ce.b } else { ce.a };
                let ch = Self::heading(graph, at, other);
                let cos = h[0] * ch[0] + h[1] * ch[1];
                let w = if cos > 0.9 {
                    weights.straight
                } else if ce.kind == EdgeKind::Crosswalk {
                    weights.cross
                } else {
                    weights.turn
                };
                if w > 0.0 {
                    options.push((cand, w));
                }
            }
            let next = if options.is_empty() {
                self.edge
            } else {
                let total: f64 = options.iter().map(|o| o.1).sum();
                let mut x = rng.random_range(0.0..total);
                let mut pick = options[options.len() - 1].0;
                for (cand, w) in &options {
                    if x < *w {
                        pick = *cand;
                        break;
                    }
                    x -= w;
                }
                pick
            };
            let ne = graph.edges[next];
            self.forward = ne.a == at;
            self.edge = next;
            self.offset = 0.0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GnbPlacement {
    /// Vertical street whose intersection hosts the gNB.
    pub vertical_street: usize,
    /// Number of streets between the UE street and the gNB's street.
    pub street_offset: usize,
    pub height: f64,
}

impl Default for GnbPlacement {
    fn default() -> Self {
        Self {
            vertical_street: 2,
            street_offset: 2,
            height: 25.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NcrPlacement {
    pub x: f64,
    pub y: f64,
    pub height: f64,
    /// Yaw of the UE-facing panel; -90 faces -y.
    pub access_yaw_deg: f64,
}

impl Default for NcrPlacement {
    fn default() -> Self {
        Self {
            x: 194.0,
            y: 134.0,
            height: 10.0,
            access_yaw_deg: -90.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridLayout,
    pub ue_street: usize,
    pub n_ues: usize,
    pub ue_height: f64,
    pub ue_speed_kmh: f64,
    pub turn_weights: TurnWeights,
    pub gnb: GnbPlacement,
    pub ncr: NcrPlacement,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            grid: GridLayout::default(),
            ue_street: 1,
            n_ues: 72,
            ue_height: 1.5,
            ue_speed_kmh: 3.0,
            turn_weights: TurnWeights::default(),
            gnb: GnbPlacement::default(),
            ncr: NcrPlacement::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Gnb,
    Ncr,
    Ue,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Gnb => "gnb",
            Role::Ncr => "ncr",
            Role::Ue => "ue",
        })
    }
}

/// A positioned network with mobile UEs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub graph: SidewalkGraph,
    pub gnb_position: Vec3,
    pub ncr_position: Vec3,
    pub ues: Vec<Pedestrian>,
    rng: ChaCha8Rng,
}

pub fn build_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.grid.validate()?;
    let n = config.grid.blocks;
    if config.ue_street > n {
        return Err(Error::invalid(format!(
            "UE street {} out of range 0..={n}",
            config.ue_street
        )));
    }
    let gnb_street = config.ue_street + config.gnb.street_offset;
    if gnb_street > n || config.gnb.vertical_street > n {
        return Err(Error::invalid(format!(
            "gNB intersection (vertical {}, horizontal {gnb_street}) outside the grid",
            config.gnb.vertical_street
        )));
    }
    if !(config.ue_speed_kmh >= 0.0) || !(config.ue_height > 0.0) {
        return Err(Error::invalid("UE speed must be >= 0 and height > 0"));
    }
    let graph = SidewalkGraph::build(&config.grid);
    let street = graph.street_sidewalks(&config.grid, config.ue_street);
    let total: f64 = street.iter().map(|&e| graph.edges[e].length).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ues = Vec::with_capacity(config.n_ues);
    for _ in 0..config.n_ues {
        let mut x = rng.random_range(0.0..total);
        let mut placed = None;
        for &e in &street {
            let len = graph.edges[e].length;
            if x < len {
                placed = Some((e, x));
                break;
            }
            x -= len;
        }
        let (edge, along) = placed.unwrap_or((street[street.len() - 1], 0.0));
        let forward: bool = rng.random();
        let len = graph.edges[edge].length;
        ues.push(Pedestrian {
            edge,
            forward,
            offset: if forward { along } else { len - along },
        });
    }
    let gnb_position = [
        config.grid.street_center(config.gnb.vertical_street),
        config.grid.street_center(gnb_street),
        config.gnb.height,
    ];
    let ncr_position = [config.ncr.x, config.ncr.y, config.ncr.height];
    Ok(Scenario {
        config: *config,
        graph,
        gnb_position,
        ncr_position,
        ues,
        rng,
    })
}

impl Scenario {
    pub fn ue_position(&self, i: usize) -> Vec3 {
        let p = self.ues[i].position(&self.graph);
        [p[0], p[1], self.config.ue_height]
    }

    pub fn ue_positions(&self) -> Vec<Vec3> {
        (0..self.ues.len()).map(|i| self.ue_position(i)).collect()
    }

    /// Moves every UE by `dt` seconds at the configured walking speed.
    pub fn move_ues(&mut self, dt: f64) {
        let d = self.config.ue_speed_kmh / 3.6 * dt;
        for ue in &mut self.ues {
            ue.advance(&self.graph, d, &self.config.turn_weights, &mut self.rng);
        }
    }

    /// Yaw pointing the gNB panel at the NCR.
    pub fn gnb_yaw_deg(&self) -> f64 {
        yaw_toward(&self.gnb_position, &self.ncr_position)
    }

    /// Yaw pointing the NCR backhaul panel at the gNB.
    pub fn ncr_backhaul_yaw_deg(&self) -> f64 {
        yaw_toward(&self.ncr_position, &self.gnb_position)
    }

    pub fn ncr_access_yaw_deg(&self) -> f64 {
        self.config.ncr.access_yaw_deg
    }

    /// `(node, role, position)` rows for the node table.
    pub fn node_table(&self) -> Vec<(String, Role, Vec3)> {
        let mut rows = vec![
            ("gnb0".to_string(), Role::Gnb, self.gnb_position),
            ("ncr0".to_string(), Role::Ncr, self.ncr_position),
        ];
        for i in 0..self.ues.len() {
            rows.push((format!("ue{i}"), Role::Ue, self.ue_position(i)));
        }
        rows
    }

    pub fn write_node_table<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "role", "x", "y", "z"])?;
        for (name, role, p) in self.node_table() {
            w.write_record([
                name,
                role.to_string(),
                format!("{:.4}", p[0]),
                format!("{:.4}", p[1]),
                format!("{:.4}", p[2]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn yaw_toward(from: &Vec3, to: &Vec3) -> f64 {
    (to[1] - from[1]).atan2(to[0] - from[0]).to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::{prop_assert, proptest};

    #[test]
    fn grid_pitch_and_crosswalks() {
        let layout = GridLayout::default();
        assert_eq!(layout.pitch(), 134.0);
        let g = SidewalkGraph::build(&layout);
        assert_eq!(g.nodes.len(), 36);
        for e in &g.edges {
            match e.kind {
                EdgeKind::Sidewalk => assert_abs_diff_eq!(e.length, 123.0, epsilon = 1e-12),
                EdgeKind::Crosswalk => assert_abs_diff_eq!(e.length, 11.0, epsilon = 1e-12),
            }
        }
        // 9 rings of 4 plus 12 intersections' worth of crosswalks
        assert_eq!(g.edges.len(), 36 + 24);
        assert_eq!(g.street_sidewalks(&layout, 1).len(), 6);
        assert_eq!(g.street_sidewalks(&layout, 0).len(), 3);
    }

    #[test]
    fn default_scenario_geometry() {
        let s = build_scenario(&ScenarioConfig::default(), 1).unwrap();
        assert_eq!(s.ues.len(), 72);
        assert_eq!(s.gnb_position, [261.0, 395.0, 25.0]);
        assert_eq!(s.ncr_position, [194.0, 134.0, 10.0]);
        // gNB sits two pitches north of the UE street
        assert_abs_diff_eq!(s.gnb_position[1] - s.config.grid.street_center(1), 2.0 * 134.0, epsilon = 1e-12);
        let lo = s.config.grid.street_center(1) - 7.0;
        let hi = s.config.grid.street_center(1) + 7.0;
        for p in s.ue_positions() {
            assert!(p[1] > lo && p[1] < hi, "{p:?}");
            assert!((p[1] - 121.5).abs() < 1e-9 || (p[1] - 132.5).abs() < 1e-9, "{p:?}");
            assert_eq!(p[2], 1.5);
            assert!(s.graph.distance_to_network(&[p[0], p[1]]) < 1e-9);
        }
        let table = s.node_table();
        assert_eq!(table[0].2[2], 25.0);
        assert_eq!(table[1].2[2], 10.0);
        assert_eq!(table[2].2[2], 1.5);
    }

    #[test]
    fn rejects_out_of_range_street() {
        let mut c = ScenarioConfig::default();
        c.ue_street = 4;
        assert!(build_scenario(&c, 0).is_err());
        c.ue_street = 2;
        assert!(build_scenario(&c, 0).is_err(), "gNB street would be 4");
    }

    #[test]
    fn walking_step_is_tiny() {
        let mut s = build_scenario(&ScenarioConfig::default(), 3).unwrap();
        let before = s.ue_position(0);
        s.move_ues(0.25e-3);
        let after = s.ue_position(0);
        let d = ((after[0] - before[0]).powi(2) + (after[1] - before[1]).powi(2)).sqrt();
        assert_abs_diff_eq!(d, 3.0 / 3.6 * 0.25e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(d * 1e3, 0.2083, epsilon = 1e-4);
    }

    #[test]
    fn mid_block_ue_keeps_its_street() {
        let mut s = build_scenario(&ScenarioConfig::default(), 9).unwrap();
        let y0: Vec<f64> = s.ue_positions().iter().map(|p| p[1]).collect();
        // 1 m is shorter than the distance to any corner for most UEs
        let far: Vec<usize> = (0..s.ues.len())
            .filter(|&i| {
                let u = s.ues[i];
                let len = s.graph.edges[u.edge].length;
                u.offset > 2.0 && len - u.offset > 2.0
            })
            .collect();
        assert!(!far.is_empty());
        s.move_ues(1.0 / (3.0 / 3.6));
        for i in far {
            assert_eq!(s.ue_position(i)[1], y0[i]);
        }
    }

    #[test]
    fn mobility_is_seed_deterministic() {
        let mut a = build_scenario(&ScenarioConfig::default(), 11).unwrap();
        let mut b = build_scenario(&ScenarioConfig::default(), 11).unwrap();
        for _ in 0..50 {
            a.move_ues(3.0);
            b.move_ues(3.0);
        }
        assert_eq!(a.ue_positions(), b.ue_positions());
    }

    #[test]
    fn node_table_csv() {
        let mut c = ScenarioConfig::default();
        c.n_ues = 2;
        let s = build_scenario(&c, 0).unwrap();
        let mut buf = Vec::new();
        s.write_node_table(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "node,role,x,y,z");
        assert_eq!(lines[1], "gnb0,gnb,261.0000,395.0000,25.0000");
        assert_eq!(lines.len(), 5);
    }

    proptest! {
        #[test]
        fn long_walks_stay_on_network(seed in 0u64..200, steps in 1usize..200, dt in 0.1f64..30.0) {
            let mut c = ScenarioConfig::default();
            c.n_ues = 4;
            let mut s = build_scenario(&c, seed).unwrap();
            for _ in 0..steps {
                s.move_ues(dt);
                for p in s.ue_positions() {
                    prop_assert!(s.graph.distance_to_network(&[p[0], p[1]]) < 1e-6);
                }
            }
        }
    }
}
