//! Nondeterministic Büchi word automata and the graph algorithms over them.
//!
//! States are `0..num_states` and state `0` is always initial. Symbols are
//! `0..num_symbols`; by convention `0` reads as `a` and `1` as `b`.
//!
//! Reachability, SCC and cycle computations work on the symbol-erased graph
//! (labels dropped, parallel edges collapsed). Labels only matter to the
//! property oracles and to the encoding.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::AutomatonError;

pub type State = usize;
pub type Symbol = usize;

/// One labeled transition `(src, sym, dst)`. Ordering is canonical
/// `(src, sym, dst)` lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub src: State,
    pub sym: Symbol,
    pub dst: State,
}

impl Transition {
    pub const fn new(src: State, sym: Symbol, dst: State) -> Self {
        Self { src, sym, dst }
    }
}

impl From<(State, Symbol, State)> for Transition {
    fn from((src, sym, dst): (State, Symbol, State)) -> Self {
        Self { src, sym, dst }
    }
}

/// A validated NBW `(Q, Σ, δ, 0, F)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nbw {
    num_states: usize,
    num_symbols: usize,
    transitions: BTreeSet<Transition>,
    accepting: BTreeSet<State>,
    /// Symbol-erased successor lists, ascending and deduplicated.
    succ: Vec<Vec<State>>,
}

impl Nbw {
    /// Builds and validates an automaton. Duplicate triples collapse.
    pub fn new<T, A>(
        num_states: usize,
        num_symbols: usize,
        transitions: T,
        accepting: A,
    ) -> Result<Self, AutomatonError>
    where
        T: IntoIterator,
        T::Item: Into<Transition>,
        A: IntoIterator<Item = State>,
    {
        if num_states == 0 {
            return Err(AutomatonError::NoStates);
        }
        if num_symbols == 0 {
            return Err(AutomatonError::NoSymbols);
        }
        let mut set = BTreeSet::new();
        for t in transitions {
            let t: Transition = t.into();
            if t.src >= num_states || t.dst >= num_states || t.sym >= num_symbols {
                return Err(AutomatonError::TransitionOutOfRange {
                    src: t.src,
                    sym: t.sym,
                    dst: t.dst,
                    num_states,
                    num_symbols,
                });
            }
            set.insert(t);
        }
        let mut acc = BTreeSet::new();
        for q in accepting {
            if q >= num_states {
                return Err(AutomatonError::AcceptingOutOfRange { state: q, num_states });
            }
            acc.insert(q);
        }
        let mut succ = vec![Vec::new(); num_states];
        for t in &set {
            succ[t.src].push(t.dst);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Ok(Self {
            num_states,
            num_symbols,
            transitions: set,
            accepting: acc,
            succ,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn initial(&self) -> State {
        0
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn accepting(&self) -> &BTreeSet<State> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: State) -> bool {
        self.accepting.contains(&q)
    }

    pub fn has_transition(&self, src: State, sym: Symbol, dst: State) -> bool {
        self.transitions.contains(&Transition::new(src, sym, dst))
    }

    /// Symbol-erased successors of `q`, ascending.
    pub fn successors(&self, q: State) -> &[State] {
        &self.succ[q]
    }

    /// Transitions leaving `q`, in canonical order.
    pub fn transitions_from(&self, q: State) -> impl Iterator<Item = &Transition> + '_ {
        self.transitions
            .range(Transition::new(q, 0, 0)..Transition::new(q + 1, 0, 0))
    }

    /// Lowest symbol labelling some edge `src -> dst`.
    fn lowest_symbol(&self, src: State, dst: State) -> Option<Symbol> {
        self.transitions_from(src).find(|t| t.dst == dst).map(|t| t.sym)
    }

    /// States with a finite run from state 0 (always includes 0).
    pub fn reachable_states(&self) -> BTreeSet<State> {
        self.bfs_distances(0)
            .iter()
            .enumerate()
            .filter_map(|(q, d)| d.map(|_| q))
            .collect()
    }

    /// Breadth-first distances and parents from `from`, visiting successors in
    /// ascending order so each parent is the lowest-index earliest predecessor.
    fn bfs_tree(&self, from: State) -> (Vec<Option<usize>>, Vec<Option<State>>) {
        let mut dist = vec![None; self.num_states];
        let mut parent = vec![None; self.num_states];
        let mut queue = VecDeque::new();
        dist[from] = Some(0);
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.succ[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        (dist, parent)
    }

    fn bfs_distances(&self, from: State) -> Vec<Option<usize>> {
        self.bfs_tree(from).0
    }

    /// SCCs of the symbol-erased graph. Each component is sorted ascending and
    /// components are ordered by their smallest state.
    pub fn strongly_connected_components(&self) -> Vec<Component> {
        let mut g = DiGraph::<(), ()>::with_capacity(self.num_states, self.transitions.len());
        let nodes: Vec<_> = (0..self.num_states).map(|_| g.add_node(())).collect();
        for (u, succ) in self.succ.iter().enumerate() {
            for &v in succ {
                g.add_edge(nodes[u], nodes[v], ());
            }
        }
        let mut comps: Vec<Component> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut states: Vec<State> = c.into_iter().map(|n| n.index()).collect();
                states.sort_unstable();
                let nontrivial =
                    states.len() >= 2 || self.succ[states[0]].binary_search(&states[0]).is_ok();
                Component { states, nontrivial }
            })
            .collect();
        comps.sort_by_key(|c| c.states[0]);
        comps
    }

    /// For every state, the index of its component in
    /// [`strongly_connected_components`](Self::strongly_connected_components).
    pub fn component_index(components: &[Component], num_states: usize) -> Vec<usize> {
        let mut idx = vec![0; num_states];
        for (i, c) in components.iter().enumerate() {
            for &q in &c.states {
                idx[q] = i;
            }
        }
        idx
    }

    /// Length of the shortest non-empty path `q -> q`, if any.
    pub fn min_cycle_length_through(&self, q: State) -> Option<usize> {
        self.shortest_cycle(q).map(|path| path.len() - 1)
    }

    /// Shortest non-empty cycle through `q` as a state sequence starting and
    /// ending in `q`.
    fn shortest_cycle(&self, q: State) -> Option<Vec<State>> {
        if self.succ[q].binary_search(&q).is_ok() {
            return Some(vec![q, q]);
        }
        // BFS from the successors of q back to q.
        let mut dist = vec![None; self.num_states];
        let mut parent: Vec<Option<State>> = vec![None; self.num_states];
        let mut queue = VecDeque::new();
        for &v in &self.succ[q] {
            dist[v] = Some(1usize);
            parent[v] = Some(q);
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            if u == q {
                break;
            }
            let du = dist[u].unwrap();
            for &v in &self.succ[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        dist[q]?;
        let mut path = vec![q];
        let mut cur = parent[q].unwrap();
        while cur != q {
            path.push(cur);
            cur = parent[cur].unwrap();
        }
        path.push(q);
        path.reverse();
        Some(path)
    }

    /// Minimum over reachable accepting states of their shortest cycle length.
    pub fn min_accepting_cycle_length(&self) -> Option<usize> {
        let reach = self.bfs_distances(0);
        self.accepting
            .iter()
            .filter(|&&q| reach[q].is_some())
            .filter_map(|&q| self.min_cycle_length_through(q))
            .min()
    }

    /// A lasso `u·v^ω` accepted by the automaton, or `None` when the language
    /// is empty. Picks the accepting state minimizing (prefix length, cycle
    /// length, index) and uses breadth-first shortest paths for both parts.
    pub fn find_accepting_lasso(&self) -> Option<LassoWitness> {
        let (dist, parent) = self.bfs_tree(0);
        let (_, _, q, cycle_states) = self
            .accepting
            .iter()
            .filter_map(|&q| {
                let d = dist[q]?;
                let cyc = self.shortest_cycle(q)?;
                Some((d, cyc.len() - 1, q, cyc))
            })
            .min_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)))?;

        let mut prefix_states = vec![q];
        let mut cur = q;
        while let Some(p) = parent[cur] {
            prefix_states.push(p);
            cur = p;
        }
        prefix_states.reverse();

        let label = |states: &[State]| -> Vec<Symbol> {
            states
                .windows(2)
                .map(|w| self.lowest_symbol(w[0], w[1]).expect("edge on BFS path"))
                .collect()
        };
        Some(LassoWitness {
            prefix: label(&prefix_states),
            cycle: label(&cycle_states),
            prefix_states,
            cycle_states,
        })
    }

    /// Whether the ultimately periodic word `prefix · cycle^ω` is accepted.
    ///
    /// Builds the product with the lasso-shaped word automaton (one position
    /// per letter, the last cycle letter looping back to the first) and looks
    /// for a reachable product cycle through an accepting state at a cycle
    /// position.
    pub fn accepts_lasso(&self, prefix: &[Symbol], cycle: &[Symbol]) -> Result<bool, AutomatonError> {
        if cycle.is_empty() {
            return Err(AutomatonError::EmptyCycle);
        }
        if let Some(&s) = prefix.iter().chain(cycle).find(|&&s| s >= self.num_symbols) {
            return Err(AutomatonError::SymbolOutOfRange {
                sym: s,
                num_symbols: self.num_symbols,
            });
        }
        let word: Vec<Symbol> = prefix.iter().chain(cycle).copied().collect();
        let len = word.len();
        let next_pos = |p: usize| if p + 1 == len { prefix.len() } else { p + 1 };
        let n = self.num_states;
        let id = |q: State, p: usize| p * n + q;

        let mut transitions = Vec::new();
        for p in 0..len {
            for t in self.transitions_from_sym(word[p]) {
                transitions.push((id(t.src, p), 0, id(t.dst, next_pos(p))));
            }
        }
        let accepting = (prefix.len()..len)
            .flat_map(|p| self.accepting.iter().map(move |&q| id(q, p)));
        let product = Nbw::new(n * len, 1, transitions, accepting)?;
        Ok(product.min_accepting_cycle_length().is_some())
    }

    fn transitions_from_sym(&self, sym: Symbol) -> impl Iterator<Item = &Transition> + '_ {
        self.transitions.iter().filter(move |t| t.sym == sym)
    }

    /// Relabels states by `perm` (`perm[old] = new`), which must fix 0.
    pub fn permuted(&self, perm: &[State]) -> Result<Self, AutomatonError> {
        if perm.len() != self.num_states || perm.first() != Some(&0) {
            return Err(AutomatonError::BadPermutation);
        }
        let mut seen = vec![false; self.num_states];
        for &p in perm {
            if p >= self.num_states || std::mem::replace(&mut seen[p], true) {
                return Err(AutomatonError::BadPermutation);
            }
        }
        Nbw::new(
            self.num_states,
            self.num_symbols,
            self.transitions
                .iter()
                .map(|t| Transition::new(perm[t.src], t.sym, perm[t.dst])),
            self.accepting.iter().map(|&q| perm[q]),
        )
    }
}

impl fmt::Display for Nbw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NBW(n={}, s={}, F={:?}, δ={{", self.num_states, self.num_symbols, self.accepting)?;
        for (i, t) in self.transitions.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}-{}->{}", t.src, symbol_name(t.sym), t.dst)?;
        }
        f.write_str("})")
    }
}

/// `a`, `b`, ... for small indices, `#k` beyond `z`.
pub fn symbol_name(sym: Symbol) -> String {
    if sym < 26 {
        char::from(b'a' + sym as u8).to_string()
    } else {
        format!("#{sym}")
    }
}

/// One strongly connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub states: Vec<State>,
    /// Contains at least two states or a self-loop, i.e. supports a cycle.
    pub nontrivial: bool,
}

/// A finite prefix run plus a non-empty cycle run witnessing that
/// `prefix · cycle^ω` is accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoWitness {
    pub prefix: Vec<Symbol>,
    pub cycle: Vec<Symbol>,
    /// `prefix.len() + 1` states starting at 0.
    pub prefix_states: Vec<State>,
    /// `cycle.len() + 1` states; first and last equal the end of the prefix.
    pub cycle_states: Vec<State>,
}

impl LassoWitness {
    /// Checks the run shape against `a`: every step is a transition, the
    /// cycle closes, and it visits an accepting state.
    pub fn is_valid_for(&self, a: &Nbw) -> bool {
        let steps_ok = |states: &[State], word: &[Symbol]| {
            states.len() == word.len() + 1
                && states
                    .windows(2)
                    .zip(word)
                    .all(|(w, &s)| a.has_transition(w[0], s, w[1]))
        };
        !self.cycle.is_empty()
            && self.prefix_states.first() == Some(&0)
            && self.cycle_states.first() == self.prefix_states.last()
            && self.cycle_states.last() == self.prefix_states.last()
            && steps_ok(&self.prefix_states, &self.prefix)
            && steps_ok(&self.cycle_states, &self.cycle)
            && self.cycle_states.iter().any(|&q| a.is_accepting(q))
    }

    pub fn render_word(word: &[Symbol]) -> String {
        word.iter().map(|&s| symbol_name(s)).collect()
    }
}
