//! Numerical data of LG-quasimaps on dual graphs of prestable curves:
//! log-canonical degrees, stability for `epsilon = 0+` and `infinity`, and
//! an enumerator for the LG phase of a hypersurface (`A^b = omega_log(-D)`).

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::analyzer::Epsilon;
use crate::error::{Error, Result};
use crate::rational::{rat, ratio, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    #[serde(default)]
    pub marks: Vec<String>,
}

/// Dual graph of a prestable marked curve. Self-loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::Precondition("dual graph has no vertices".into()));
        }
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::Precondition(format!("edge ({a}, {b}) refers to a missing vertex")));
            }
        }
        let edges = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let g = DualGraph { vertices, edges };
        if !g.is_connected() {
            return Err(Error::Precondition("dual graph is not connected".into()));
        }
        Ok(g)
    }

    /// A single smooth vertex.
    pub fn smooth(genus: u32, marks: usize) -> Self {
        let marks = (1..=marks).map(|i| format!("x{i}")).collect();
        DualGraph { vertices: vec![Vertex { genus, marks }], edges: Vec::new() }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn betti_number(&self) -> u32 {
        (self.edges.len() + 1 - self.vertices.len()) as u32
    }

    pub fn total_genus(&self) -> u32 {
        self.vertices.iter().map(|v| v.genus).sum::<u32>() + self.betti_number()
    }

    pub fn num_marks(&self) -> usize {
        self.vertices.iter().map(|v| v.marks.len()).sum()
    }

    /// Markings plus edge ends at `v`; a self-loop counts twice.
    pub fn special_points(&self, v: usize) -> usize {
        let ends: usize = self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum();
        self.vertices[v].marks.len() + ends
    }

    /// Deligne-Mumford stability: `2g - 2 + n > 0` at every vertex.
    pub fn is_dm_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| match self.vertices[v].genus {
            0 => self.special_points(v) >= 3,
            1 => self.special_points(v) >= 1,
            _ => true,
        })
    }
}

/// `deg omega_log` on each component: `2g_v - 2 + n_v`.
pub fn omega_log_degrees(g: &DualGraph) -> Vec<i64> {
    (0..g.vertices.len()).map(|v| 2 * i64::from(g.vertices[v].genus) - 2 + g.special_points(v) as i64).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexData {
    /// Degree of `A` on the component.
    #[serde(with = "crate::rational::rat_string")]
    pub deg_a: Rat,
    /// Base points on the component interior, with multiplicity.
    pub base_d: u32,
    /// Degree of the pulled-back polarization.
    #[serde(with = "crate::rational::rat_string")]
    pub lift_deg: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmapNumericalData {
    pub vertices: Vec<VertexData>,
}

impl QmapNumericalData {
    pub fn total_base_points(&self) -> u32 {
        self.vertices.iter().map(|v| v.base_d).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexDiagnostic {
    pub vertex: usize,
    pub wlog: i64,
    pub special_points: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub epsilon: Epsilon,
    pub stable: bool,
    pub vertices: Vec<VertexDiagnostic>,
}

/// Checks `b * deg A_v = wlog_v - D_v` at every vertex.
pub fn check_degree_relation(g: &DualGraph, data: &QmapNumericalData, b: i64) -> Result<()> {
    let wlog = omega_log_degrees(g);
    if data.vertices.len() != wlog.len() {
        return Err(Error::DimensionMismatch { expected: wlog.len(), got: data.vertices.len() });
    }
    for (v, (d, w)) in data.vertices.iter().zip(&wlog).enumerate() {
        let lhs = rat(b) * &d.deg_a;
        let rhs = rat(w - i64::from(d.base_d));
        if lhs != rhs {
            return Err(Error::DegreeRelation {
                vertex: v,
                detail: format!("{b} * deg A = {lhs} but wlog - D = {rhs}"),
            });
        }
    }
    Ok(())
}

/// Stability of numerical data. With `spin = Some(b)` the degree relation
/// of the hybrid LG family is enforced first.
pub fn check_stability(
    g: &DualGraph,
    data: &QmapNumericalData,
    epsilon: Epsilon,
    spin: Option<i64>,
) -> Result<StabilityVerdict> {
    let wlog = omega_log_degrees(g);
    if data.vertices.len() != wlog.len() {
        return Err(Error::DimensionMismatch { expected: wlog.len(), got: data.vertices.len() });
    }
    if let Some(b) = spin {
        check_degree_relation(g, data, b)?;
    }
    let mut vertices = Vec::with_capacity(wlog.len());
    for (v, d) in data.vertices.iter().enumerate() {
        let sp = g.special_points(v);
        let mut violations = Vec::new();
        match epsilon {
            Epsilon::ZeroPlus => {
                if g.vertices[v].genus == 0 && sp < 2 {
                    violations.push(format!("rational component with {sp} special points"));
                }
                if wlog[v] == 0 && !d.lift_deg.is_positive() {
                    violations.push("omega_log is trivial but the polarization has no positive degree".into());
                }
            }
            Epsilon::Infinity => {
                if d.base_d > 0 {
                    violations.push(format!("{} base points", d.base_d));
                }
                if d.lift_deg.is_negative() {
                    violations.push("negative polarization degree".into());
                }
                if d.lift_deg.is_zero() && wlog[v] <= 0 {
                    violations.push("polarization degree vanishes where omega_log is not ample".into());
                }
            }
        }
        vertices.push(VertexDiagnostic { vertex: v, wlog: wlog[v], special_points: sp, violations });
    }
    let stable = vertices.iter().all(|v| v.violations.is_empty());
    Ok(StabilityVerdict { epsilon, stable, vertices })
}

/// Data for given base-point counts in the LG phase: `deg A_v = (wlog_v - D_v)/b`
/// and the polarization has degree `D_v`.
pub fn lg_data(g: &DualGraph, b: i64, base: &[u32]) -> QmapNumericalData {
    let wlog = omega_log_degrees(g);
    let vertices = wlog
        .iter()
        .zip(base)
        .map(|(&w, &d)| VertexData { deg_a: ratio(w - i64::from(d), b), base_d: d, lift_deg: rat(i64::from(d)) })
        .collect();
    QmapNumericalData { vertices }
}

/// Every stable assignment of base points `D_v` in `[0, max_d]`,
/// lexicographic in the vertex order.
pub fn enumerate_lg_configs(g: &DualGraph, b: i64, epsilon: Epsilon, max_d: u32) -> Result<Vec<QmapNumericalData>> {
    if b <= 0 {
        return Err(Error::Precondition(format!("spin exponent must be positive, got {b}")));
    }
    let nv = g.vertices.len();
    let mut out = Vec::new();
    let mut base = vec![0u32; nv];
    loop {
        let data = lg_data(g, b, &base);
        if check_stability(g, &data, epsilon, Some(b))?.stable {
            out.push(data);
        }
        // Odometer with the last vertex fastest.
        let mut i = nv;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if base[i] < max_d {
                base[i] += 1;
                break;
            }
            base[i] = 0;
        }
    }
}

/// For `infinity`-stable LG data, whether the underlying graph is
/// Deligne-Mumford stable.
pub fn classify_infty_lg(g: &DualGraph, data: &QmapNumericalData) -> Result<bool> {
    if !check_stability(g, data, Epsilon::Infinity, None)?.stable {
        return Err(Error::Precondition("data is not infinity-stable".into()));
    }
    Ok(g.is_dm_stable())
}

/// All connected dual graphs with at most `max_vertices` vertices, total
/// genus at most `max_genus` and at most `max_marks` markings (labelled
/// `x1, x2, ...`). Isomorphic graphs may repeat.
pub fn enumerate_dual_graphs(max_vertices: usize, max_genus: u32, max_marks: usize) -> Vec<DualGraph> {
    let mut out = Vec::new();
    for nv in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        let max_edges = nv - 1 + max_genus as usize;
        let mut edge_sets = Vec::new();
        multisets(&pairs, max_edges, 0, &mut Vec::new(), &mut edge_sets);
        for edges in edge_sets {
            if edges.len() + 1 < nv {
                continue;
            }
            let Ok(skeleton) = DualGraph::new(vec![Vertex { genus: 0, marks: Vec::new() }; nv], edges.clone()) else {
                continue;
            };
            let b1 = skeleton.betti_number();
            if b1 > max_genus {
                continue;
            }
            for genera in bounded_vectors(nv, max_genus - b1) {
                for k in 0..=max_marks {
                    for owners in all_vectors(nv, k) {
                        let mut vertices: Vec<Vertex> =
                            genera.iter().map(|&genus| Vertex { genus, marks: Vec::new() }).collect();
                        for (i, &o) in owners.iter().enumerate() {
                            vertices[o].marks.push(format!("x{}", i + 1));
                        }
                        out.push(DualGraph { vertices, edges: edges.clone() });
                    }
                }
            }
        }
    }
    out
}

fn multisets(items: &[(usize, usize)], max: usize, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    out.push(cur.clone());
    if cur.len() == max {
        return;
    }
    for i in start..items.len() {
        cur.push(items[i]);
        multisets(items, max, i, cur, out);
        cur.pop();
    }
}

/// Vectors of `len` nonnegative integers with sum at most `total`.
fn bounded_vectors(len: usize, total: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in bounded_vectors(len - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All maps `{0..k} -> {0..nv}`.
fn all_vectors(nv: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (0..nv).map(move |o| [v.clone(), vec![o]].concat())).collect();
    }
    out
}
