//! Nominal problem oracles: `min c·x` over a fixed feasible set.
//!
//! Every solver in the crate sees the feasible set only through
//! [`NominalOracle`]. Ties are broken towards the lowest index everywhere so
//! that all solvers are deterministic.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use crate::criteria::{ScenarioSet, Solution};
use crate::error::{check_len, Error, Result};

/// Default limit on the number of solutions an oracle will enumerate.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Sense of a linear feasibility row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

/// `Σ coef·x_i (sense) rhs` over the item variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// Access to the feasible set `X ⊆ {0,1}^n`.
pub trait NominalOracle: Send + Sync {
    fn num_items(&self) -> usize;

    /// A feasible minimizer of `costs·x` and its value.
    fn solve(&self, costs: &[f64]) -> Result<(Solution, f64)>;

    fn is_feasible(&self, x: &Solution) -> bool;

    /// Every feasible solution exactly once, in a deterministic order.
    fn enumerate(&self) -> Result<Vec<Solution>> {
        Err(Error::EnumerationUnsupported)
    }

    /// Linear rows describing `X` together with binarity of `x`.
    fn linear_description(&self) -> Option<Vec<LinearRow>> {
        None
    }

    fn as_selection(&self) -> Option<&SelectionProblem> {
        None
    }
}

/// Optimal nominal value for every scenario.
pub fn opt_per_scenario(oracle: &dyn NominalOracle, scenarios: &ScenarioSet) -> Result<Vec<f64>> {
    check_len("scenario width", oracle.num_items(), scenarios.num_items())?;
    scenarios
        .rows()
        .map(|row| oracle.solve(row).map(|(_, value)| value))
        .collect()
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Choose exactly `p` of `n` items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionProblem {
    n: usize,
    p: usize,
    cap: usize,
}

impl SelectionProblem {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 || p > n {
            return Err(Error::InvalidParameter(format!(
                "selection requires 1 <= p <= n, got n={n}, p={p}"
            )));
        }
        Ok(SelectionProblem {
            n,
            p,
            cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `C(n, p)`.
    pub fn cardinality(&self) -> u128 {
        binomial(self.n, self.p)
    }
}

/// Indices of the `count` smallest entries, ties by lowest index.
pub(crate) fn smallest_indices(costs: &[f64], candidates: &[usize], count: usize) -> Vec<usize> {
    let mut order = candidates.to_vec();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

impl NominalOracle for SelectionProblem {
    fn num_items(&self) -> usize {
        self.n
    }

    fn solve(&self, costs: &[f64]) -> Result<(Solution, f64)> {
        check_len("cost vector", self.n, costs.len())?;
        let all: Vec<usize> = (0..self.n).collect();
        let x = Solution::from_indices(self.n, smallest_indices(costs, &all, self.p))?;
        let value = x.cost(costs);
        Ok((x, value))
    }

    fn is_feasible(&self, x: &Solution) -> bool {
        x.len() == self.n && x.count() == self.p
    }

    fn enumerate(&self) -> Result<Vec<Solution>> {
        if self.cardinality() > self.cap as u128 {
            return Err(Error::EnumerationCapExceeded { cap: self.cap });
        }
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        let mut combo: Vec<usize> = (0..self.p).collect();
        loop {
            out.push(Solution::from_indices(self.n, combo.iter().copied())?);
            // advance to the next combination in lexicographic order
            let mut i = self.p;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if combo[i] < self.n - self.p + i {
                    break;
                }
            }
            combo[i] += 1;
            for j in i + 1..self.p {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }

    fn linear_description(&self) -> Option<Vec<LinearRow>> {
        Some(vec![LinearRow {
            terms: (0..self.n).map(|i| (i, 1.0)).collect(),
            sense: RowSense::Eq,
            rhs: self.p as f64,
        }])
    }

    fn as_selection(&self) -> Option<&SelectionProblem> {
        Some(self)
    }
}

/// Directed graph with a source and a target; items are arcs.
#[derive(Debug, Clone)]
pub struct DiGraphInstance {
    nodes: usize,
    arcs: Vec<(usize, usize)>,
    source: usize,
    target: usize,
    out_arcs: Vec<Vec<usize>>,
    cap: usize,
}

impl DiGraphInstance {
    pub fn new(nodes: usize, arcs: Vec<(usize, usize)>, source: usize, target: usize) -> Result<Self> {
        if nodes == 0 || arcs.is_empty() {
            return Err(Error::InvalidGraph("graph needs at least one node and one arc".into()));
        }
        if source >= nodes || target >= nodes {
            return Err(Error::InvalidGraph(format!(
                "source {source} or target {target} out of range for {nodes} nodes"
            )));
        }
        if source == target {
            return Err(Error::InvalidGraph("source and target must differ".into()));
        }
        let mut out_arcs = vec![Vec::new(); nodes];
        for (a, &(tail, head)) in arcs.iter().enumerate() {
            if tail >= nodes || head >= nodes {
                return Err(Error::InvalidGraph(format!(
                    "arc {a} ({tail}->{head}) references a node outside 0..{nodes}"
                )));
            }
            out_arcs[tail].push(a);
        }
        let graph = DiGraphInstance {
            nodes,
            arcs,
            source,
            target,
            out_arcs,
            cap: DEFAULT_ENUMERATION_CAP,
        };
        if !graph.reachable(source, target) {
            return Err(Error::Unreachable { from: source, target });
        }
        Ok(graph)
    }

    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Same arcs with a different source and target.
    pub fn with_endpoints(&self, source: usize, target: usize) -> Result<Self> {
        DiGraphInstance::new(self.nodes, self.arcs.clone(), source, target).map(|g| g.with_enumeration_cap(self.cap))
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn reachable(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.nodes];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for &a in &self.out_arcs[v] {
                let head = self.arcs[a].1;
                if !seen[head] {
                    seen[head] = true;
                    queue.push_back(head);
                }
            }
        }
        false
    }

    /// Node sequence of a feasible path solution.
    pub fn path_nodes(&self, x: &Solution) -> Option<Vec<usize>> {
        if x.len() != self.arcs.len() {
            return None;
        }
        let mut next = vec![None; self.nodes];
        for a in x.selected() {
            let (tail, _) = self.arcs[a];
            if next[tail].is_some() {
                return None;
            }
            next[tail] = Some(a);
        }
        let mut visited = vec![false; self.nodes];
        let mut path = vec![self.source];
        let mut v = self.source;
        visited[v] = true;
        let mut walked = 0;
        while v != self.target {
            let a = next[v]?;
            v = self.arcs[a].1;
            if visited[v] {
                return None;
            }
            visited[v] = true;
            walked += 1;
            path.push(v);
        }
        (walked == x.count()).then_some(path)
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl NominalOracle for DiGraphInstance {
    fn num_items(&self) -> usize {
        self.arcs.len()
    }

    fn solve(&self, costs: &[f64]) -> Result<(Solution, f64)> {
        check_len("arc cost vector", self.arcs.len(), costs.len())?;
        if let Some(bad) = costs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "arc cost {bad} is negative or not finite"
            )));
        }
        let mut dist = vec![f64::INFINITY; self.nodes];
        let mut pred: Vec<Option<usize>> = vec![None; self.nodes];
        let mut settled = vec![false; self.nodes];
        let mut heap = BinaryHeap::new();
        dist[self.source] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            node: self.source,
        });
        while let Some(HeapEntry { dist: d, node: v }) = heap.pop() {
            if settled[v] {
                continue;
            }
            settled[v] = true;
            if v == self.target {
                break;
            }
            for &a in &self.out_arcs[v] {
                let head = self.arcs[a].1;
                let candidate = d + costs[a];
                if candidate < dist[head] {
                    dist[head] = candidate;
                    pred[head] = Some(a);
                    heap.push(HeapEntry {
                        dist: candidate,
                        node: head,
                    });
                }
            }
        }
        if !settled[self.target] {
            return Err(Error::Unreachable {
                from: self.source,
                target: self.target,
            });
        }
        let mut selected = Vec::new();
        let mut v = self.target;
        while v != self.source {
            let a = pred[v].expect("settled node has a predecessor arc");
            selected.push(a);
            v = self.arcs[a].0;
        }
        let x = Solution::from_indices(self.arcs.len(), selected)?;
        let value = x.cost(costs);
        Ok((x, value))
    }

    fn is_feasible(&self, x: &Solution) -> bool {
        self.path_nodes(x).is_some()
    }

    /// Depth-first enumeration of simple source-target paths, arcs in index order.
    fn enumerate(&self) -> Result<Vec<Solution>> {
        let mut out = Vec::new();
        let mut on_path = vec![false; self.nodes];
        let mut arcs_used = Vec::new();
        // stack of (node, position in its out-arc list)
        let mut stack = vec![(self.source, 0usize)];
        on_path[self.source] = true;
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            if *pos == self.out_arcs[v].len() {
                stack.pop();
                on_path[v] = false;
                arcs_used.pop();
                continue;
            }
            let a = self.out_arcs[v][*pos];
            *pos += 1;
            let head = self.arcs[a].1;
            if on_path[head] {
                continue;
            }
            if head == self.target {
                if out.len() == self.cap {
                    return Err(Error::EnumerationCapExceeded { cap: self.cap });
                }
                out.push(Solution::from_indices(
                    self.arcs.len(),
                    arcs_used.iter().copied().chain([a]),
                )?);
                continue;
            }
            on_path[head] = true;
            arcs_used.push(a);
            stack.push((head, 0));
        }
        Ok(out)
    }

    /// Flow conservation: one unit leaves the source and enters the target.
    fn linear_description(&self) -> Option<Vec<LinearRow>> {
        let mut rows: Vec<LinearRow> = (0..self.nodes)
            .map(|v| LinearRow {
                terms: Vec::new(),
                sense: RowSense::Eq,
                rhs: if v == self.source {
                    1.0
                } else if v == self.target {
                    -1.0
                } else {
                    0.0
                },
            })
            .collect();
        for (a, &(tail, head)) in self.arcs.iter().enumerate() {
            if tail == head {
                continue;
            }
            rows[tail].terms.push((a, 1.0));
            rows[head].terms.push((a, -1.0));
        }
        rows.retain(|r| !r.terms.is_empty());
        Some(rows)
    }
}

/// Feasible set given as an explicit list of alternatives.
#[derive(Debug, Clone)]
pub struct ExplicitOracle {
    n: usize,
    solutions: Vec<Solution>,
    members: HashSet<Solution>,
}

impl ExplicitOracle {
    pub fn new(solutions: Vec<Solution>) -> Result<Self> {
        let first = solutions
            .first()
            .ok_or_else(|| Error::InvalidParameter("explicit oracle needs at least one solution".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidSolution("solutions must have at least one item".into()));
        }
        let mut members = HashSet::with_capacity(solutions.len());
        for x in &solutions {
            check_len("solution length", n, x.len())?;
            if !members.insert(x.clone()) {
                return Err(Error::InvalidSolution(format!("duplicate alternative {x}")));
            }
        }
        Ok(ExplicitOracle { n, solutions, members })
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    /// Position of `x` in the alternative list.
    pub fn position(&self, x: &Solution) -> Option<usize> {
        self.solutions.iter().position(|s| s == x)
    }
}

impl NominalOracle for ExplicitOracle {
    fn num_items(&self) -> usize {
        self.n
    }

    fn solve(&self, costs: &[f64]) -> Result<(Solution, f64)> {
        check_len("cost vector", self.n, costs.len())?;
        let mut best: Option<(&Solution, f64)> = None;
        for x in &self.solutions {
            let v = x.cost(costs);
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((x, v));
            }
        }
        let (x, v) = best.expect("non-empty list");
        Ok((x.clone(), v))
    }

    fn is_feasible(&self, x: &Solution) -> bool {
        self.members.contains(x)
    }

    fn enumerate(&self) -> Result<Vec<Solution>> {
        Ok(self.solutions.clone())
    }
}
