//! Incremental difference-logic engine.
//!
//! Constraints have the form `x - y <= k` over integer variables. A
//! conjunction is satisfiable iff its constraint graph has no negative cycle.
//! The engine keeps a feasible potential for every variable and repairs it on
//! each assertion by a Dijkstra-style sweep over reduced costs, touching only
//! the variables whose potential actually changes. A second, trailed labelling
//! tracks the least value of every variable anchored to the origin `z0`; that
//! labelling is what [`DlEngine::solution`] and [`DlEngine::lower_bound`]
//! report.
//!
//! The constraint `x - y <= k` is stored as the edge `x -> y` of weight `k`.
//! With that orientation the least solution is the negated shortest distance
//! from `z0`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

/// Largest accepted constraint weight magnitude. Keeps every path sum of up to
/// 2^22 edges inside `i64`.
pub const MAX_WEIGHT: i64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DlVar(u32);

impl DlVar {
    /// The engine-owned origin. Its value is always 0.
    pub const ZERO: DlVar = DlVar(u32::MAX);

    /// Dense index of a user variable; `None` for the origin.
    pub fn index(self) -> Option<usize> {
        (self != DlVar::ZERO).then_some(self.0 as usize)
    }

    fn node(self) -> usize {
        if self == DlVar::ZERO {
            0
        } else {
            self.0 as usize + 1
        }
    }

    fn from_node(n: usize) -> DlVar {
        if n == 0 {
            DlVar::ZERO
        } else {
            DlVar((n - 1) as u32)
        }
    }
}

impl fmt::Display for DlVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(i) => write!(f, "v{i}"),
            None => f.write_str("z0"),
        }
    }
}

/// `x - y <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffConstraint {
    pub x: DlVar,
    pub y: DlVar,
    pub k: i64,
}

impl DiffConstraint {
    pub fn new(x: DlVar, y: DlVar, k: i64) -> Self {
        DiffConstraint { x, y, k }
    }
}

impl fmt::Display for DiffConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - {} <= {}", self.x, self.y, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assertion {
    Feasible,
    /// A cycle of asserted constraints with negative total weight.
    Infeasible(Vec<DiffConstraint>),
}

impl Assertion {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Assertion::Feasible)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DlError {
    #[error("pop without a matching push")]
    EmptyTrail,
    #[error("the constraint set is infeasible")]
    Infeasible,
}

#[derive(Debug, Clone)]
struct Entry {
    c: DiffConstraint,
    /// False for constraints recorded while the state was already infeasible.
    in_graph: bool,
}

#[derive(Debug, Clone, Copy)]
struct Level {
    trail: usize,
    low_trail: usize,
}

#[derive(Debug, Clone)]
pub struct DlEngine {
    names: Vec<String>,
    trail: Vec<Entry>,
    out: Vec<Vec<u32>>,
    potential: Vec<i64>,
    low: Vec<Option<i64>>,
    low_trail: Vec<(usize, Option<i64>)>,
    levels: Vec<Level>,
    conflict: Option<(usize, Vec<DiffConstraint>)>,
    // scratch for the potential repair
    gamma: Vec<i64>,
    pred: Vec<u32>,
    done: Vec<bool>,
}

const NO_EDGE: u32 = u32::MAX;
const NEW_EDGE: u32 = u32::MAX - 1;

impl Default for DlEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl DlEngine {
    pub fn new() -> Self {
        DlEngine {
            names: vec!["z0".to_string()],
            trail: Vec::new(),
            out: vec![Vec::new()],
            potential: vec![0],
            low: vec![Some(0)],
            low_trail: Vec::new(),
            levels: Vec::new(),
            conflict: None,
            gamma: vec![0],
            pred: vec![NO_EDGE],
            done: vec![false],
        }
    }

    pub fn zero(&self) -> DlVar {
        DlVar::ZERO
    }

    pub fn new_var(&mut self, name: impl Into<String>) -> DlVar {
        let v = DlVar::from_node(self.names.len());
        self.names.push(name.into());
        self.out.push(Vec::new());
        self.potential.push(0);
        self.low.push(None);
        self.gamma.push(0);
        self.pred.push(NO_EDGE);
        self.done.push(false);
        v
    }

    pub fn name(&self, v: DlVar) -> &str {
        &self.names[v.node()]
    }

    /// Number of user variables (the origin is not counted).
    pub fn num_vars(&self) -> usize {
        self.names.len() - 1
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    pub fn is_feasible(&self) -> bool {
        self.conflict.is_none()
    }

    pub fn conflict(&self) -> Option<&[DiffConstraint]> {
        self.conflict.as_ref().map(|(_, c)| c.as_slice())
    }

    /// Every asserted constraint, oldest first.
    pub fn constraints(&self) -> impl Iterator<Item = &DiffConstraint> + '_ {
        self.trail.iter().map(|e| &e.c)
    }

    pub fn num_constraints(&self) -> usize {
        self.trail.len()
    }

    pub fn push(&mut self) {
        self.levels.push(Level {
            trail: self.trail.len(),
            low_trail: self.low_trail.len(),
        });
    }

    pub fn pop(&mut self) -> Result<(), DlError> {
        let level = self.levels.pop().ok_or(DlError::EmptyTrail)?;
        while self.trail.len() > level.trail {
            let e = self.trail.pop().expect("trail longer than mark");
            if e.in_graph {
                let popped = self.out[e.c.x.node()].pop();
                debug_assert_eq!(popped, Some(self.trail.len() as u32));
            }
        }
        while self.low_trail.len() > level.low_trail {
            let (n, old) = self.low_trail.pop().expect("low trail longer than mark");
            self.low[n] = old;
        }
        if matches!(self.conflict, Some((at, _)) if at >= level.trail) {
            self.conflict = None;
        }
        Ok(())
    }

    /// Asserts `x - y <= k` at the current level.
    ///
    /// # Panics
    /// If `|k|` exceeds [`MAX_WEIGHT`] or a variable is foreign to this engine.
    pub fn assert_upper(&mut self, x: DlVar, y: DlVar, k: i64) -> Assertion {
        assert!(k.abs() <= MAX_WEIGHT, "difference weight {k} out of range");
        assert!(
            x.node() < self.names.len() && y.node() < self.names.len(),
            "unknown variable"
        );
        let c = DiffConstraint { x, y, k };
        if let Some((_, cycle)) = &self.conflict {
            let cycle = cycle.clone();
            self.trail.push(Entry { c, in_graph: false });
            return Assertion::Infeasible(cycle);
        }
        match self.repair_potential(c) {
            Ok(()) => {
                let id = self.trail.len() as u32;
                self.trail.push(Entry { c, in_graph: true });
                self.out[x.node()].push(id);
                self.raise_lower_bounds(x.node(), y.node(), k);
                Assertion::Feasible
            }
            Err(cycle) => {
                self.conflict = Some((self.trail.len(), cycle.clone()));
                self.trail.push(Entry { c, in_graph: false });
                Assertion::Infeasible(cycle)
            }
        }
    }

    /// Asserts `x - y >= k`, i.e. `y - x <= -k`.
    pub fn assert_lower(&mut self, x: DlVar, y: DlVar, k: i64) -> Assertion {
        self.assert_upper(y, x, -k)
    }

    /// Least value of `v` implied by its constraints against the origin, or
    /// `None` when nothing bounds it from below.
    pub fn lower_bound(&self, v: DlVar) -> Option<i64> {
        self.low[v.node()]
    }

    /// The canonical solution, indexed by variable handle.
    ///
    /// Variables with a lower-bound chain from the origin take their least
    /// value. The rest take the largest value not above 0 that the
    /// constraints allow.
    pub fn solution(&self) -> Result<Vec<i64>, DlError> {
        if !self.is_feasible() {
            return Err(DlError::Infeasible);
        }
        let n = self.names.len();
        let mut val: Vec<i64> = vec![0; n];
        let mut anchored = vec![false; n];
        for (i, l) in self.low.iter().enumerate() {
            if let Some(l) = l {
                val[i] = *l;
                anchored[i] = true;
            }
        }
        // Unanchored variables only carry upper bounds; relax them downwards.
        if anchored.iter().any(|a| !a) {
            loop {
                let mut changed = false;
                for e in self.trail.iter().filter(|e| e.in_graph) {
                    let (a, b) = (e.c.x.node(), e.c.y.node());
                    if anchored[a] {
                        continue;
                    }
                    let bound = val[b].checked_add(e.c.k).expect("difference overflow");
                    if bound < val[a] {
                        val[a] = bound;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        Ok(val[1..].to_vec())
    }

    fn repair_potential(&mut self, c: DiffConstraint) -> Result<(), Vec<DiffConstraint>> {
        let (x, y) = (c.x.node(), c.y.node());
        if x == y {
            return if c.k < 0 { Err(vec![c]) } else { Ok(()) };
        }
        let slack = self.potential[x]
            .checked_add(c.k)
            .expect("difference overflow")
            - self.potential[y];
        if slack >= 0 {
            return Ok(());
        }

        let mut touched: Vec<usize> = vec![y];
        let mut changed: Vec<(usize, i64)> = Vec::new();
        self.gamma[y] = slack;
        self.pred[y] = NEW_EDGE;
        let mut heap = BinaryHeap::new();
        heap.push((Reverse(slack), y));
        let mut result = Ok(());

        'sweep: while let Some((Reverse(g), u)) = heap.pop() {
            if self.done[u] || g != self.gamma[u] {
                continue;
            }
            self.done[u] = true;
            changed.push((u, self.potential[u]));
            self.potential[u] += g;
            for &eid in &self.out[u] {
                let e = &self.trail[eid as usize].c;
                let w = e.y.node();
                if self.done[w] {
                    continue;
                }
                let delta = self.potential[u]
                    .checked_add(e.k)
                    .expect("difference overflow")
                    - self.potential[w];
                if delta >= 0 {
                    continue;
                }
                if w == x {
                    let mut cycle = vec![*e];
                    let mut at = u;
                    while self.pred[at] != NEW_EDGE {
                        let pe = self.trail[self.pred[at] as usize].c;
                        cycle.push(pe);
                        at = pe.x.node();
                    }
                    cycle.push(c);
                    cycle.reverse();
                    result = Err(cycle);
                    break 'sweep;
                }
                if self.pred[w] == NO_EDGE {
                    touched.push(w);
                    self.gamma[w] = delta;
                    self.pred[w] = eid;
                    heap.push((Reverse(delta), w));
                } else if delta < self.gamma[w] {
                    self.gamma[w] = delta;
                    self.pred[w] = eid;
                    heap.push((Reverse(delta), w));
                }
            }
        }

        if result.is_err() {
            for &(n, old) in changed.iter().rev() {
                self.potential[n] = old;
            }
        }
        for n in touched {
            self.gamma[n] = 0;
            self.pred[n] = NO_EDGE;
            self.done[n] = false;
        }
        result
    }

    fn raise_lower_bounds(&mut self, x: usize, y: usize, k: i64) {
        let Some(lx) = self.low[x] else { return };
        let cand = lx - k;
        if self.low[y].is_some_and(|ly| ly >= cand) {
            return;
        }
        self.set_low(y, cand);
        // Key: reduced distance -low - potential, non-decreasing along edges.
        let mut heap = BinaryHeap::new();
        heap.push((Reverse(-cand - self.potential[y]), y, cand));
        while let Some((_, u, lu)) = heap.pop() {
            if self.low[u] != Some(lu) {
                continue;
            }
            for i in 0..self.out[u].len() {
                let e = self.trail[self.out[u][i] as usize].c;
                let w = e.y.node();
                let cand = lu.checked_sub(e.k).expect("difference overflow");
                if self.low[w].is_some_and(|lw| lw >= cand) {
                    continue;
                }
                self.set_low(w, cand);
                heap.push((Reverse(-cand - self.potential[w]), w, cand));
            }
        }
    }

    fn set_low(&mut self, n: usize, v: i64) {
        self.low_trail.push((n, self.low[n]));
        self.low[n] = Some(v);
    }
}
