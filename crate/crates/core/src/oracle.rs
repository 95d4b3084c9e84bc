//! Exact decision procedures for the dataset properties, plus a bounded
//! brute-force reference used only to cross-check them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automaton::{Nbw, Symbol, Transition};
use crate::error::OracleError;

/// Largest automaton the brute-force oracle accepts.
pub const BRUTE_FORCE_MAX_STATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropertyKind {
    /// The accepted language is empty.
    #[serde(rename = "emptiness")]
    IsEmpty,
    /// Some accepted word contains the target symbol at least once.
    #[serde(rename = "min1b")]
    Min1B,
    /// Some accepted word contains the target symbol infinitely often.
    #[serde(rename = "infb")]
    InfB,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 3] = [PropertyKind::InfB, PropertyKind::Min1B, PropertyKind::IsEmpty];

    /// Short name used in dataset file names and reports.
    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::IsEmpty => "emptiness",
            PropertyKind::Min1B => "min1b",
            PropertyKind::InfB => "infb",
        }
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "emptiness" | "empty" | "is_empty" => Ok(PropertyKind::IsEmpty),
            "min1b" | "min1_b" => Ok(PropertyKind::Min1B),
            "infb" | "inf_b" => Ok(PropertyKind::InfB),
            other => Err(format!("unknown property `{other}` (expected emptiness, min1b or infb)")),
        }
    }
}

/// A property together with the symbol it counts (ignored by `IsEmpty`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Property {
    pub kind: PropertyKind,
    #[serde(default = "default_target")]
    pub target_symbol: Symbol,
}

fn default_target() -> Symbol {
    1
}

impl Property {
    pub fn new(kind: PropertyKind) -> Self {
        Self { kind, target_symbol: default_target() }
    }

    pub fn with_target(kind: PropertyKind, target_symbol: Symbol) -> Self {
        Self { kind, target_symbol }
    }

    fn check_target(&self, a: &Nbw) -> Result<(), OracleError> {
        if self.kind != PropertyKind::IsEmpty && self.target_symbol >= a.num_symbols() {
            return Err(OracleError::TargetOutOfRange {
                target: self.target_symbol,
                num_symbols: a.num_symbols(),
            });
        }
        Ok(())
    }
}

impl From<PropertyKind> for Property {
    fn from(kind: PropertyKind) -> Self {
        Property::new(kind)
    }
}

/// Why an automaton's language is (or is not) empty. Checked in declaration
/// order; the first matching class wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmptinessSubclass {
    NoAcceptingStates,
    AcceptingUnreachable,
    AcceptingNotSelfReachable,
    NonEmpty,
}

/// True iff no reachable accepting state lies on a cycle.
pub fn is_empty(a: &Nbw) -> bool {
    let reach = a.reachable_states();
    let comps = a.strongly_connected_components();
    let idx = Nbw::component_index(&comps, a.num_states());
    !a.accepting()
        .iter()
        .any(|q| reach.contains(q) && comps[idx[*q]].nontrivial)
}

pub fn emptiness_subclass(a: &Nbw) -> EmptinessSubclass {
    if a.accepting().is_empty() {
        return EmptinessSubclass::NoAcceptingStates;
    }
    let reach = a.reachable_states();
    if !a.accepting().iter().any(|q| reach.contains(q)) {
        return EmptinessSubclass::AcceptingUnreachable;
    }
    if is_empty(a) {
        EmptinessSubclass::AcceptingNotSelfReachable
    } else {
        EmptinessSubclass::NonEmpty
    }
}

/// Some accepted word reads `target` at least once.
///
/// Runs emptiness on the product with a monotone "target seen" bit: product
/// state `q + bit·n`, accepting only where the bit is set.
pub fn min1_b(a: &Nbw, target: Symbol) -> Result<bool, OracleError> {
    Property::with_target(PropertyKind::Min1B, target).check_target(a)?;
    let n = a.num_states();
    let mut product = Vec::with_capacity(2 * a.transitions().len());
    for t in a.transitions() {
        let after = |bit: usize| if t.sym == target { 1 } else { bit };
        for bit in 0..2 {
            product.push(Transition::new(t.src + bit * n, 0, t.dst + after(bit) * n));
        }
    }
    let accepting = a.accepting().iter().map(|q| q + n);
    let p = Nbw::new(2 * n, 1, product, accepting).expect("product indices in range");
    Ok(!is_empty(&p))
}

/// Some accepted word reads `target` infinitely often: a reachable nontrivial
/// SCC holds an accepting state and an internal `target` edge.
pub fn inf_b(a: &Nbw, target: Symbol) -> Result<bool, OracleError> {
    Property::with_target(PropertyKind::InfB, target).check_target(a)?;
    let reach = a.reachable_states();
    let comps = a.strongly_connected_components();
    let idx = Nbw::component_index(&comps, a.num_states());
    let mut has_acc = vec![false; comps.len()];
    let mut has_target = vec![false; comps.len()];
    for &q in a.accepting() {
        has_acc[idx[q]] = true;
    }
    for t in a.transitions() {
        if t.sym == target && idx[t.src] == idx[t.dst] {
            has_target[idx[t.src]] = true;
        }
    }
    Ok(comps.iter().enumerate().any(|(i, c)| {
        c.nontrivial && has_acc[i] && has_target[i] && reach.contains(&c.states[0])
    }))
}

/// Whether `a` has property `p`. For `IsEmpty`, `true` means the language is
/// empty.
pub fn check_property(a: &Nbw, p: Property) -> Result<bool, OracleError> {
    p.check_target(a)?;
    match p.kind {
        PropertyKind::IsEmpty => Ok(is_empty(a)),
        PropertyKind::Min1B => min1_b(a, p.target_symbol),
        PropertyKind::InfB => inf_b(a, p.target_symbol),
    }
}

/// Reference oracle by bounded lasso enumeration.
///
/// Explores every run of length at most `2n+1` from state 0 (the prefix),
/// then every run of length `1..=2n` from the prefix end back to itself (the
/// cycle), tracking whether the prefix or cycle read the target and whether
/// the cycle met an accepting state. Configurations reached at the same
/// depth are merged, which keeps the enumeration exhaustive without listing
/// runs one by one. Any lasso witness can be shortened to fit these bounds:
/// it needs one path to an accepting state, at most one detour through a
/// target edge inside the same SCC, and the return path, each at most `n`
/// edges.
pub fn brute_force_check(a: &Nbw, p: Property) -> Result<bool, OracleError> {
    let n = a.num_states();
    if n > BRUTE_FORCE_MAX_STATES {
        return Err(OracleError::TooManyStates {
            num_states: n,
            limit: BRUTE_FORCE_MAX_STATES,
        });
    }
    p.check_target(a)?;
    let target = p.target_symbol;
    let prefix_bound = 2 * n + 1;
    let cycle_bound = 2 * n;

    // prefix_seen[q][b]: q is the end of some prefix of length <= bound, where
    // b records whether that prefix read the target.
    let mut prefix_seen = vec![[false; 2]; n];
    let mut layer = vec![[false; 2]; n];
    layer[0][0] = true;
    for depth in 0..=prefix_bound {
        for q in 0..n {
            for b in 0..2 {
                prefix_seen[q][b] |= layer[q][b];
            }
        }
        if depth == prefix_bound {
            break;
        }
        let mut next = vec![[false; 2]; n];
        for t in a.transitions() {
            for b in 0..2 {
                if layer[t.src][b] {
                    let nb = b | usize::from(t.sym == target);
                    next[t.dst][nb] = true;
                }
            }
        }
        layer = next;
    }

    let mut found_any = false;
    let mut found_prefix_or_cycle_target = false;
    let mut found_cycle_target = false;
    for start in 0..n {
        if !(prefix_seen[start][0] || prefix_seen[start][1]) {
            continue;
        }
        // cycle configurations: (state, met accepting, read target)
        let mut cur = vec![[[false; 2]; 2]; n];
        let acc0 = usize::from(a.is_accepting(start));
        cur[start][acc0][0] = true;
        for _ in 0..cycle_bound {
            let mut next = vec![[[false; 2]; 2]; n];
            for t in a.transitions() {
                for acc in 0..2 {
                    for tg in 0..2 {
                        if cur[t.src][acc][tg] {
                            let na = acc | usize::from(a.is_accepting(t.dst));
                            let nt = tg | usize::from(t.sym == target);
                            next[t.dst][na][nt] = true;
                        }
                    }
                }
            }
            for tg in 0..2 {
                if next[start][1][tg] {
                    found_any = true;
                    if tg == 1 {
                        found_cycle_target = true;
                        found_prefix_or_cycle_target = true;
                    } else if prefix_seen[start][1] {
                        found_prefix_or_cycle_target = true;
                    }
                }
            }
            cur = next;
        }
    }

    Ok(match p.kind {
        PropertyKind::IsEmpty => !found_any,
        PropertyKind::Min1B => found_prefix_or_cycle_target,
        PropertyKind::InfB => found_cycle_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finitely_many_a() -> Nbw {
        Nbw::new(2, 2, [(0, 0, 0), (0, 1, 0), (0, 1, 1), (1, 1, 1)], [1]).unwrap()
    }

    /// 0 --b--> 1, 1 accepting with an a-self-loop.
    fn b_then_a_loop() -> Nbw {
        Nbw::new(2, 2, [(0, 1, 1), (1, 0, 1)], [1]).unwrap()
    }

    #[test]
    fn emptiness() {
        assert!(!is_empty(&finitely_many_a()));
        assert!(is_empty(&Nbw::new(3, 2, [(0, 0, 1), (1, 1, 2), (2, 0, 0)], []).unwrap()));
        let dead_end = Nbw::new(2, 2, [(0, 0, 1)], [1]).unwrap();
        assert!(is_empty(&dead_end));
        assert!(brute_force_check(&dead_end, PropertyKind::IsEmpty.into()).unwrap());
    }

    #[test]
    fn subclasses() {
        assert_eq!(emptiness_subclass(&finitely_many_a()), EmptinessSubclass::NonEmpty);
        let none = Nbw::new(1, 2, Vec::<Transition>::new(), []).unwrap();
        assert_eq!(emptiness_subclass(&none), EmptinessSubclass::NoAcceptingStates);
        let disconnected = Nbw::new(2, 2, [(1, 0, 1)], [1]).unwrap();
        assert_eq!(emptiness_subclass(&disconnected), EmptinessSubclass::AcceptingUnreachable);
        let dead_end = Nbw::new(2, 2, [(0, 0, 1)], [1]).unwrap();
        assert_eq!(
            emptiness_subclass(&dead_end),
            EmptinessSubclass::AcceptingNotSelfReachable
        );
    }

    #[test]
    fn min1b_cases() {
        assert!(min1_b(&finitely_many_a(), 1).unwrap());
        let a_only = Nbw::new(1, 2, [(0, 0, 0)], [0]).unwrap();
        assert!(!min1_b(&a_only, 1).unwrap());
        assert!(min1_b(&b_then_a_loop(), 1).unwrap());
        assert!(brute_force_check(&b_then_a_loop(), PropertyKind::Min1B.into()).unwrap());
        assert!(min1_b(&a_only, 2).is_err());
    }

    #[test]
    fn infb_cases() {
        assert!(inf_b(&finitely_many_a(), 1).unwrap());
        assert!(!inf_b(&b_then_a_loop(), 1).unwrap());
        assert!(!brute_force_check(&b_then_a_loop(), PropertyKind::InfB.into()).unwrap());
        let b_loop = Nbw::new(2, 2, [(0, 0, 1), (1, 1, 1)], [1]).unwrap();
        assert!(inf_b(&b_loop, 1).unwrap());
        // b edge inside an SCC without accepting states does not count
        let split = Nbw::new(3, 2, [(0, 1, 0), (0, 0, 1), (1, 0, 1)], [1]).unwrap();
        assert!(!inf_b(&split, 1).unwrap());
        assert!(min1_b(&split, 1).unwrap());
    }

    #[test]
    fn dispatch() {
        let a = finitely_many_a();
        assert!(!check_property(&a, PropertyKind::IsEmpty.into()).unwrap());
        assert!(check_property(&a, PropertyKind::InfB.into()).unwrap());
        assert!(check_property(&a, PropertyKind::Min1B.into()).unwrap());
        let none = Nbw::new(2, 2, [(0, 1, 1), (1, 1, 0)], []).unwrap();
        assert!(!check_property(&none, PropertyKind::Min1B.into()).unwrap());
    }

    #[test]
    fn brute_force_finitely_many_a_and_limits() {
        let a = finitely_many_a();
        let got: Vec<bool> = [PropertyKind::IsEmpty, PropertyKind::Min1B, PropertyKind::InfB]
            .into_iter()
            .map(|k| brute_force_check(&a, k.into()).unwrap())
            .collect();
        assert_eq!(got, vec![false, true, true]);
        let lone = Nbw::new(1, 2, Vec::<Transition>::new(), [0]).unwrap();
        assert!(brute_force_check(&lone, PropertyKind::IsEmpty.into()).unwrap());
        let big = Nbw::new(BRUTE_FORCE_MAX_STATES + 1, 2, Vec::<Transition>::new(), []).unwrap();
        assert!(matches!(
            brute_force_check(&big, PropertyKind::IsEmpty.into()),
            Err(OracleError::TooManyStates { .. })
        ));
    }

    #[test]
    fn property_names_round_trip() {
        for k in PropertyKind::ALL {
            assert_eq!(k.name().parse::<PropertyKind>().unwrap(), k);
        }
        assert_eq!("empty".parse::<PropertyKind>().unwrap(), PropertyKind::IsEmpty);
        assert!("universal".parse::<PropertyKind>().is_err());
    }
}
