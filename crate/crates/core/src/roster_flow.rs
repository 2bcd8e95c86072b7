//! Random rosters from a laminar flow network.
//!
//! A reservation scheme over a block of `k` seats is written as a `k x n`
//! table whose every row equals `alpha`. Three constraint families bound the
//! table: single cells in `[0, 1]`, rows summing to one, and cumulative column
//! prefixes within the floor and ceiling of their fair share. The first and
//! third families together, and the first and second together, are laminar,
//! so the table is a flow from the source through nested column prefixes and
//! cells into rows and on to the sink.
//!
//! Rounding repeatedly picks an undirected cycle of fractional edges and
//! pushes flow around it in one of two directions until an edge turns
//! integral, choosing the direction with the probabilities that leave every
//! edge's expected flow unchanged. The final integral table is a block of the
//! roster: exactly one category per seat, and every prefix of the block
//! within one seat of its fair share.

use std::collections::BTreeSet;

use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::roster::{ExtensionPolicy, Roster};
use crate::model::scheme::ReservationScheme;
use crate::rational::{ceil_int, floor_int, int, Exact, Rational};
use crate::rng::bernoulli;

/// The scheme written out over one block of `k` seats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeTable {
    alpha: Vec<Rational>,
    k: usize,
}

/// Builds the `k x n` scheme table; `k * alpha_j` must be integral for all `j`.
pub fn build_scheme_table(scheme: &ReservationScheme, k: usize) -> Result<SchemeTable> {
    let minimal = scheme.minimal_block_length();
    if k == 0 || k % minimal != 0 {
        return Err(Error::BlockLength { k, minimal });
    }
    Ok(SchemeTable {
        alpha: scheme.fractions().to_vec(),
        k,
    })
}

impl SchemeTable {
    /// Block length.
    pub fn rows(&self) -> usize {
        self.k
    }

    pub fn cols(&self) -> usize {
        self.alpha.len()
    }

    pub fn entry(&self, _seat: usize, category: usize) -> Rational {
        self.alpha[category]
    }

    /// Sum of the first `len` entries of column `category`.
    pub fn prefix_sum(&self, len: usize, category: usize) -> Rational {
        self.alpha[category] * int(len as i64)
    }

    pub fn column_total(&self, category: usize) -> i64 {
        self.prefix_sum(self.k, category).to_integer()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        vec![self.alpha.clone(); self.k]
    }
}

/// One constraint on the block table; seats and categories are 0-based,
/// `len` counts seats from the top of the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Cell { seat: usize, category: usize },
    Row { seat: usize },
    ColumnPrefix { len: usize, category: usize },
}

impl Constraint {
    pub fn cells(&self, categories: usize) -> BTreeSet<(usize, usize)> {
        match *self {
            Constraint::Cell { seat, category } => BTreeSet::from([(seat, category)]),
            Constraint::Row { seat } => (0..categories).map(|j| (seat, j)).collect(),
            Constraint::ColumnPrefix { len, category } => (0..len).map(|i| (i, category)).collect(),
        }
    }
}

/// A constraint with its integer floor and ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedConstraint {
    pub constraint: Constraint,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    pub cells: Vec<BoundedConstraint>,
    pub rows: Vec<BoundedConstraint>,
    /// Prefixes of length `2..=k` for every category.
    pub column_prefixes: Vec<BoundedConstraint>,
    categories: usize,
}

impl ConstraintSet {
    pub fn build(p: &SchemeTable) -> Self {
        let n = p.cols();
        let bounded = |constraint: Constraint, sum: Rational| BoundedConstraint {
            constraint,
            lower: floor_int(&sum),
            upper: ceil_int(&sum),
        };
        let cells = (0..p.rows())
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(seat, category)| {
                bounded(Constraint::Cell { seat, category }, p.entry(seat, category))
            })
            .collect();
        let rows = (0..p.rows())
            .map(|seat| bounded(Constraint::Row { seat }, int(1)))
            .collect();
        let column_prefixes = (0..n)
            .flat_map(|j| (2..=p.rows()).map(move |l| (l, j)))
            .map(|(len, category)| {
                bounded(
                    Constraint::ColumnPrefix { len, category },
                    p.prefix_sum(len, category),
                )
            })
            .collect();
        Self {
            cells,
            rows,
            column_prefixes,
            categories: n,
        }
    }

    /// Cell and column-prefix constraints as cell sets.
    pub fn column_family(&self) -> Vec<BTreeSet<(usize, usize)>> {
        self.cells
            .iter()
            .chain(&self.column_prefixes)
            .map(|c| c.constraint.cells(self.categories))
            .collect()
    }

    /// Cell and row constraints as cell sets.
    pub fn row_family(&self) -> Vec<BTreeSet<(usize, usize)>> {
        self.cells
            .iter()
            .chain(&self.rows)
            .map(|c| c.constraint.cells(self.categories))
            .collect()
    }

    /// Whether `table` satisfies every bound.
    pub fn satisfied_by(&self, table: &[Vec<Rational>]) -> bool {
        self.cells
            .iter()
            .chain(&self.rows)
            .chain(&self.column_prefixes)
            .all(|c| {
                let sum: Rational = c
                    .constraint
                    .cells(self.categories)
                    .iter()
                    .map(|&(i, j)| table[i][j])
                    .sum();
                int(c.lower) <= sum && sum <= int(c.upper)
            })
    }
}

/// Any two sets are nested or disjoint.
pub fn is_laminar(family: &[BTreeSet<(usize, usize)>]) -> bool {
    family.iter().enumerate().all(|(a, x)| {
        family[a + 1..]
            .iter()
            .all(|y| x.is_subset(y) || y.is_subset(x) || x.is_disjoint(y))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    Source,
    /// Column-prefix constraint over the first `len` seats of `category`.
    Prefix { len: usize, category: usize },
    Cell { seat: usize, category: usize },
    Row { seat: usize },
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowEdge {
    pub from: usize,
    pub to: usize,
    /// Flow in units of `1 / scale`.
    flow: i64,
    /// Integer floor and ceiling of the constraint the edge carries.
    pub lower: i64,
    pub upper: i64,
}

/// Flow representation of a scheme table. Flows are exact rationals stored
/// as integer multiples of `1 / k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    scale: i64,
    seats: usize,
    categories: usize,
    vertices: Vec<Vertex>,
    /// Sorted by `(from, to)`, so edge ids order edges by key.
    edges: Vec<FlowEdge>,
    incident: Vec<Vec<usize>>,
    /// Edge `Cell(i, j) -> Row(i)` for every cell, row-major.
    cell_edges: Vec<usize>,
}

/// Builds the flow network of `p` using the five placement rules: source to
/// the full-column prefixes, each prefix to its last cell and the next
/// shorter prefix (the length-2 prefix to both of its cells), cells to their
/// rows, rows to the sink.
pub fn build_flow_network(p: &SchemeTable) -> FlowNetwork {
    let (k, n) = (p.rows(), p.cols());
    let scale = k as i64;
    let units = |x: Rational| (x * int(scale)).to_integer();

    let mut vertices = vec![Vertex::Source];
    let prefix_base = vertices.len();
    for category in 0..n {
        for len in (2..=k).rev() {
            vertices.push(Vertex::Prefix { len, category });
        }
    }
    let cell_base = vertices.len();
    for seat in 0..k {
        for category in 0..n {
            vertices.push(Vertex::Cell { seat, category });
        }
    }
    let row_base = vertices.len();
    for seat in 0..k {
        vertices.push(Vertex::Row { seat });
    }
    let sink = vertices.len();
    vertices.push(Vertex::Sink);

    let prefix = |len: usize, category: usize| prefix_base + category * (k - 1) + (k - len);
    let cell = |seat: usize, category: usize| cell_base + seat * n + category;
    let row = |seat: usize| row_base + seat;

    let mut edges = Vec::new();
    let mut add = |from: usize, to: usize, sum: Rational| {
        edges.push(FlowEdge {
            from,
            to,
            flow: units(sum),
            lower: floor_int(&sum),
            upper: ceil_int(&sum),
        });
    };
    for j in 0..n {
        add(0, prefix(k, j), p.prefix_sum(k, j));
        for l in 3..=k {
            add(prefix(l, j), cell(l - 1, j), p.entry(l - 1, j));
            add(prefix(l, j), prefix(l - 1, j), p.prefix_sum(l - 1, j));
        }
        add(prefix(2, j), cell(1, j), p.entry(1, j));
        add(prefix(2, j), cell(0, j), p.entry(0, j));
    }
    for i in 0..k {
        for j in 0..n {
            add(cell(i, j), row(i), p.entry(i, j));
        }
        add(row(i), sink, int(1));
    }
    edges.sort_by_key(|e| (e.from, e.to));

    let mut incident = vec![Vec::new(); vertices.len()];
    let mut cell_edges = vec![usize::MAX; k * n];
    for (id, e) in edges.iter().enumerate() {
        incident[e.from].push(id);
        incident[e.to].push(id);
        if let Vertex::Cell { seat, category } = vertices[e.from] {
            cell_edges[seat * n + category] = id;
        }
    }
    FlowNetwork {
        scale,
        seats: k,
        categories: n,
        vertices,
        edges,
        incident,
        cell_edges,
    }
}

impl FlowNetwork {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn edge_between(&self, from: Vertex, to: Vertex) -> Option<usize> {
        let (a, b) = (self.vertex_index(from)?, self.vertex_index(to)?);
        self.incident[a]
            .iter()
            .copied()
            .find(|&e| self.edges[e].from == a && self.edges[e].to == b)
    }

    pub fn flow(&self, edge: usize) -> Rational {
        Rational::new(self.edges[edge].flow, self.scale)
    }

    pub fn is_fractional(&self, edge: usize) -> bool {
        self.edges[edge].flow % self.scale != 0
    }

    pub fn fractional_edge_count(&self) -> usize {
        (0..self.edges.len()).filter(|&e| self.is_fractional(e)).count()
    }

    pub fn is_integral(&self) -> bool {
        self.fractional_edge_count() == 0
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().copied().filter(move |&e| self.edges[e].to == v)
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().copied().filter(move |&e| self.edges[e].from == v)
    }

    /// Inflow equals outflow at every vertex other than source and sink.
    pub fn conserves_flow(&self) -> bool {
        self.vertices.iter().enumerate().all(|(v, kind)| {
            matches!(kind, Vertex::Source | Vertex::Sink)
                || self.in_edges(v).map(|e| self.edges[e].flow).sum::<i64>()
                    == self.out_edges(v).map(|e| self.edges[e].flow).sum::<i64>()
        })
    }

    /// Every edge flow lies within the floor and ceiling of its constraint.
    pub fn respects_bounds(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.lower * self.scale <= e.flow && e.flow <= e.upper * self.scale)
    }

    /// Table entries read off the `Cell -> Row` edges.
    pub fn to_table(&self) -> Vec<Vec<Rational>> {
        (0..self.seats)
            .map(|i| {
                (0..self.categories)
                    .map(|j| self.flow(self.cell_edges[i * self.categories + j]))
                    .collect()
            })
            .collect()
    }

    /// The seat assignment of an integral network.
    pub fn to_block(&self) -> Option<IntegralBlock> {
        if !self.is_integral() {
            return None;
        }
        let assignment = (0..self.seats)
            .map(|i| {
                let ones: Vec<usize> = (0..self.categories)
                    .filter(|&j| self.edges[self.cell_edges[i * self.categories + j]].flow != 0)
                    .collect();
                match ones.as_slice() {
                    [j] => Some(*j),
                    _ => None,
                }
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntegralBlock {
            categories: self.categories,
            assignment,
        })
    }

    fn floor_units(&self, f: i64) -> i64 {
        f.div_euclid(self.scale) * self.scale
    }

    fn ceil_units(&self, f: i64) -> i64 {
        -(-f).div_euclid(self.scale) * self.scale
    }

    /// Largest pushes in the forward direction (`raise`) and backward
    /// direction (`lower`) before some cycle edge turns integral.
    fn push_limits(&self, cycle: &FlowCycle) -> (i64, i64) {
        let mut raise = i64::MAX;
        let mut lower = i64::MAX;
        for &(e, forward) in &cycle.steps {
            let f = self.edges[e].flow;
            let up = self.ceil_units(f) - f;
            let down = f - self.floor_units(f);
            if forward {
                raise = raise.min(up);
                lower = lower.min(down);
            } else {
                raise = raise.min(down);
                lower = lower.min(up);
            }
        }
        (raise, lower)
    }

    /// Adds `amount` units to forward edges and subtracts it from backward ones.
    fn push(&mut self, cycle: &FlowCycle, amount: i64) {
        for &(e, forward) in &cycle.steps {
            if forward {
                self.edges[e].flow += amount;
            } else {
                self.edges[e].flow -= amount;
            }
        }
    }
}

/// Undirected cycle of fractional edges. `forward` marks edges traversed in
/// their own direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCycle {
    steps: Vec<(usize, bool)>,
}

impl FlowCycle {
    /// Cycle through `path` (closed back to its first vertex), checked
    /// against the network.
    pub fn through(net: &FlowNetwork, path: &[Vertex]) -> Result<Self> {
        if path.len() < 2 {
            return Err(Error::DegenerateCycle("a cycle needs at least two vertices".into()));
        }
        let ids = path
            .iter()
            .map(|&v| {
                net.vertex_index(v)
                    .ok_or_else(|| Error::DegenerateCycle(format!("unknown vertex {v:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
            return Err(Error::DegenerateCycle("cycle revisits a vertex".into()));
        }
        let mut steps = Vec::with_capacity(ids.len());
        for w in 0..ids.len() {
            let (a, b) = (ids[w], ids[(w + 1) % ids.len()]);
            let step = net.incident[a].iter().find_map(|&e| {
                let edge = &net.edges[e];
                if edge.from == a && edge.to == b {
                    Some((e, true))
                } else if edge.from == b && edge.to == a {
                    Some((e, false))
                } else {
                    None
                }
            });
            let (e, forward) = step.ok_or_else(|| {
                Error::DegenerateCycle(format!("no edge between {:?} and {:?}", path[w], path[(w + 1) % path.len()]))
            })?;
            if !net.is_fractional(e) {
                return Err(Error::DegenerateCycle(format!(
                    "edge {:?} -> {:?} carries the integral flow {}",
                    net.vertices[net.edges[e].from],
                    net.vertices[net.edges[e].to],
                    Exact(&net.flow(e))
                )));
            }
            steps.push((e, forward));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[(usize, bool)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Reusable buffers for the cycle walk.
#[derive(Debug, Default)]
struct CycleWalk {
    seen: Vec<usize>,
    touched: Vec<usize>,
    steps: Vec<(usize, bool)>,
}

impl CycleWalk {
    /// Starts at the fractional edge with the smallest `(from, to)` key and
    /// keeps taking the smallest-key fractional edge at the current vertex,
    /// other than the one just used, until a vertex repeats.
    fn find(&mut self, net: &FlowNetwork) -> Option<FlowCycle> {
        let start = (0..net.edges.len()).find(|&e| net.is_fractional(e))?;
        if self.seen.len() != net.vertices.len() {
            self.seen = vec![usize::MAX; net.vertices.len()];
        }
        for &v in &self.touched {
            self.seen[v] = usize::MAX;
        }
        self.touched.clear();
        self.steps.clear();

        let first = net.edges[start];
        self.seen[first.from] = 0;
        self.seen[first.to] = 1;
        self.touched.extend([first.from, first.to]);
        self.steps.push((start, true));
        let mut current = first.to;
        let mut last = start;
        loop {
            let next = net.incident[current]
                .iter()
                .copied()
                .find(|&e| e != last && net.is_fractional(e))?;
            let edge = net.edges[next];
            let (other, forward) = if edge.from == current {
                (edge.to, true)
            } else {
                (edge.from, false)
            };
            self.steps.push((next, forward));
            let pos = self.seen[other];
            if pos != usize::MAX {
                return Some(FlowCycle {
                    steps: self.steps[pos..].to_vec(),
                });
            }
            self.seen[other] = self.touched.len();
            self.touched.push(other);
            current = other;
            last = next;
        }
    }
}

/// Finds a cycle of fractional edges, or `None` when the network is integral.
pub fn find_flow_cycle(net: &FlowNetwork) -> Option<FlowCycle> {
    CycleWalk::default().find(net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowBranch {
    /// Forward edges raised by `d_plus`.
    RaiseForward,
    /// Backward edges raised by `d_minus`.
    RaiseBackward,
}

/// Both networks obtained by pushing flow around one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSplit {
    pub raise_forward: FlowNetwork,
    pub raise_backward: FlowNetwork,
    pub d_plus: Rational,
    pub d_minus: Rational,
}

impl FlowSplit {
    /// Probability of the raise-forward branch, `d_minus / (d_minus + d_plus)`.
    pub fn beta(&self) -> Rational {
        self.d_minus / (self.d_minus + self.d_plus)
    }

    /// `beta * P1 + (1 - beta) * P2` as a table.
    pub fn mixture(&self) -> Vec<Vec<Rational>> {
        let beta = self.beta();
        let rest = Rational::one() - beta;
        self.raise_forward
            .to_table()
            .iter()
            .zip(self.raise_backward.to_table())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| beta * x + rest * y).collect())
            .collect()
    }

    /// `beta * f1 + (1 - beta) * f2` for every edge.
    pub fn edge_mixture(&self) -> Vec<Rational> {
        let beta = self.beta();
        let rest = Rational::one() - beta;
        (0..self.raise_forward.edges.len())
            .map(|e| beta * self.raise_forward.flow(e) + rest * self.raise_backward.flow(e))
            .collect()
    }
}

fn checked_limits(net: &FlowNetwork, cycle: &FlowCycle) -> Result<(i64, i64)> {
    let (raise, lower) = net.push_limits(cycle);
    if cycle.is_empty() || raise <= 0 || lower <= 0 || raise == i64::MAX {
        return Err(Error::DegenerateCycle(format!(
            "zero adjustment along a cycle of {} edges",
            cycle.len()
        )));
    }
    Ok((raise, lower))
}

/// Materializes both branches of the decomposition along `cycle`.
pub fn split_flow(net: &FlowNetwork, cycle: &FlowCycle) -> Result<FlowSplit> {
    let (raise, lower) = checked_limits(net, cycle)?;
    let mut up = net.clone();
    up.push(cycle, raise);
    let mut down = net.clone();
    down.push(cycle, -lower);
    Ok(FlowSplit {
        raise_forward: up,
        raise_backward: down,
        d_plus: Rational::new(raise, net.scale),
        d_minus: Rational::new(lower, net.scale),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowStep {
    pub d_plus: Rational,
    pub d_minus: Rational,
    pub branch: FlowBranch,
    pub probability: Rational,
}

fn step_in_place<R: Rng + ?Sized>(
    net: &mut FlowNetwork,
    cycle: &FlowCycle,
    rng: &mut R,
) -> Result<FlowStep> {
    let (raise, lower) = checked_limits(net, cycle)?;
    let total = raise + lower;
    let d_plus = Rational::new(raise, net.scale);
    let d_minus = Rational::new(lower, net.scale);
    let step = if bernoulli(rng, lower, total) {
        net.push(cycle, raise);
        FlowStep {
            d_plus,
            d_minus,
            branch: FlowBranch::RaiseForward,
            probability: Rational::new(lower, total),
        }
    } else {
        net.push(cycle, -lower);
        FlowStep {
            d_plus,
            d_minus,
            branch: FlowBranch::RaiseBackward,
            probability: Rational::new(raise, total),
        }
    };
    Ok(step)
}

/// One random decomposition step; `Ok(None)` when the network is already integral.
pub fn decompose_flow_once<R: Rng + ?Sized>(
    net: &FlowNetwork,
    rng: &mut R,
) -> Result<Option<(FlowNetwork, FlowStep)>> {
    let Some(cycle) = find_flow_cycle(net) else {
        return Ok(None);
    };
    let mut next = net.clone();
    let step = step_in_place(&mut next, &cycle, rng)?;
    Ok(Some((next, step)))
}

/// Integral `k x n` block: exactly one category per seat.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegralBlock {
    categories: usize,
    assignment: Vec<usize>,
}

impl IntegralBlock {
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Category of each seat.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn entry(&self, seat: usize, category: usize) -> u8 {
        u8::from(self.assignment[seat] == category)
    }

    /// Every prefix count lies within the floor and ceiling of its fair share.
    pub fn within_prefix_bounds(&self, scheme: &ReservationScheme) -> bool {
        let mut counts = vec![0i64; self.categories];
        self.assignment.iter().enumerate().all(|(i, &c)| {
            counts[c] += 1;
            counts.iter().enumerate().all(|(j, &n)| {
                let share = scheme.fraction(j) * int(i as i64 + 1);
                floor_int(&share) <= n && n <= ceil_int(&share)
            })
        })
    }
}

/// Draws blocks for one scheme from a prebuilt network template.
#[derive(Debug, Clone)]
pub struct RosterSampler {
    categories: Vec<String>,
    template: FlowNetwork,
}

impl RosterSampler {
    /// Sampler with the minimal block length.
    pub fn new(scheme: &ReservationScheme) -> Self {
        Self::with_block_length(scheme, scheme.minimal_block_length())
            .expect("the minimal block length is always valid")
    }

    pub fn with_block_length(scheme: &ReservationScheme, k: usize) -> Result<Self> {
        let p = build_scheme_table(scheme, k)?;
        Ok(Self {
            categories: scheme.categories().to_vec(),
            template: build_flow_network(&p),
        })
    }

    pub fn block_length(&self) -> usize {
        self.template.seats
    }

    pub fn template(&self) -> &FlowNetwork {
        &self.template
    }

    pub fn draw_block<R: Rng + ?Sized>(&self, rng: &mut R) -> IntegralBlock {
        let mut net = self.template.clone();
        let mut walk = CycleWalk::default();
        while let Some(cycle) = walk.find(&net) {
            step_in_place(&mut net, &cycle, rng)
                .expect("cycles of a conserving network are never degenerate");
        }
        net.to_block()
            .expect("an integral network has one category per seat")
    }

    /// Roster of `length` materialized positions built from `ceil(length / k)` blocks.
    pub fn draw_roster<R: Rng + ?Sized>(
        &self,
        length: usize,
        rng: &mut R,
        policy: ExtensionPolicy,
    ) -> Roster {
        let length = length.max(1);
        let k = self.block_length();
        let mut assignment = Vec::with_capacity(length.div_ceil(k) * k);
        match policy {
            ExtensionPolicy::IndependentBlocks => {
                while assignment.len() < length {
                    assignment.extend_from_slice(self.draw_block(rng).assignment());
                }
            }
            ExtensionPolicy::RepeatBlock => {
                let block = self.draw_block(rng);
                while assignment.len() < length {
                    assignment.extend_from_slice(block.assignment());
                }
            }
        }
        assignment.truncate(length);
        let block_length = k.min(length);
        Roster::new(self.categories.clone(), assignment, block_length, policy)
            .expect("sampled rosters are well formed")
    }
}

/// Draws one integral block of length `k`.
pub fn draw_block<R: Rng + ?Sized>(
    scheme: &ReservationScheme,
    k: usize,
    rng: &mut R,
) -> Result<IntegralBlock> {
    Ok(RosterSampler::with_block_length(scheme, k)?.draw_block(rng))
}

/// Draws a random roster of `length` positions using the minimal block length.
pub fn draw_roster<R: Rng + ?Sized>(
    scheme: &ReservationScheme,
    length: usize,
    rng: &mut R,
    policy: ExtensionPolicy,
) -> Roster {
    RosterSampler::new(scheme).draw_roster(length, rng, policy)
}
