use alloc::vec;
use alloc::vec::Vec;

use crate::d4::{fund_trace, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Oriented link from `tail` to `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub tail: usize,
    pub head: usize,
    pub axis: Axis,
}

/// One traversal of a link inside a closed path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopStep {
    pub link: usize,
    pub forward: bool,
}

impl LoopStep {
    pub const fn fwd(link: usize) -> Self {
        Self {
            link,
            forward: true,
        }
    }

    pub const fn back(link: usize) -> Self {
        Self {
            link,
            forward: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlaquetteId {
    /// `U0^-1 U2^-1 U0 U1`, accumulated in register `U1`.
    Left,
    /// `U3^-1 U1^-1 U3 U2`, accumulated in register `U2`.
    Right,
}

impl PlaquetteId {
    pub const ALL: [PlaquetteId; 2] = [PlaquetteId::Left, PlaquetteId::Right];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Closed path of link traversals listed in the order they are walked.
/// The path product multiplies later steps on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub id: PlaquetteId,
    pub steps: Vec<LoopStep>,
    /// Link whose register holds the loop product after the basis change.
    pub central: usize,
}

/// Vertices, oriented links, plaquettes and fundamental cycles of a periodic lattice.
///
/// Only the 2x1 periodic lattice is built: links `U0: v0 -> v1`, `U1: v0 -> v0`,
/// `U2: v1 -> v1`, `U3: v1 -> v0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    pub periodic: (bool, bool),
    pub num_vertices: usize,
    pub links: Vec<Link>,
    pub plaquettes: Vec<Plaquette>,
    pub cycles: Vec<Vec<LoopStep>>,
}

pub const LINK_QUBITS: usize = 3;

impl LatticeSpec {
    pub fn periodic_2x1() -> Self {
        let links = vec![
            Link { tail: 0, head: 1, axis: Axis::X },
            Link { tail: 0, head: 0, axis: Axis::Y },
            Link { tail: 1, head: 1, axis: Axis::Y },
            Link { tail: 1, head: 0, axis: Axis::X },
        ];
        let plaquettes = vec![
            Plaquette {
                id: PlaquetteId::Left,
                steps: vec![LoopStep::fwd(1), LoopStep::fwd(0), LoopStep::back(2), LoopStep::back(0)],
                central: 1,
            },
            Plaquette {
                id: PlaquetteId::Right,
                steps: vec![LoopStep::fwd(2), LoopStep::fwd(3), LoopStep::back(1), LoopStep::back(3)],
                central: 2,
            },
        ];
        let cycles = vec![
            vec![LoopStep::fwd(1)],
            vec![LoopStep::fwd(2)],
            vec![LoopStep::fwd(0), LoopStep::fwd(3)],
        ];
        Self {
            lx: 2,
            ly: 1,
            periodic: (true, true),
            num_vertices: 2,
            links,
            plaquettes,
            cycles,
        }
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    /// Dimension of the link Hilbert space, `8^{|E|}`.
    pub fn basis_dim(&self) -> usize {
        1 << (LINK_QUBITS * self.num_links())
    }

    pub fn plaquette(&self, id: PlaquetteId) -> &Plaquette {
        &self.plaquettes[id.index()]
    }

    /// Group value of link `l` in basis state `index`.
    pub fn link_value(index: usize, l: usize) -> GroupElement {
        GroupElement::from_index((index >> (LINK_QUBITS * l)) & 7)
    }

    pub fn index_of(values: &[GroupElement]) -> usize {
        values
            .iter()
            .enumerate()
            .fold(0, |acc, (l, g)| acc | (g.index() << (LINK_QUBITS * l)))
    }

    /// Vertex reached after walking `step` starting from the appropriate end.
    pub fn step_endpoints(&self, step: LoopStep) -> (usize, usize) {
        let link = self.links[step.link];
        if step.forward {
            (link.tail, link.head)
        } else {
            (link.head, link.tail)
        }
    }

    pub fn is_closed(&self, path: &[LoopStep]) -> bool {
        let mut at = match path.first() {
            Some(&s) => self.step_endpoints(s).0,
            None => return true,
        };
        let start = at;
        for &s in path {
            let (from, to) = self.step_endpoints(s);
            if from != at {
                return false;
            }
            at = to;
        }
        at == start
    }

    /// Ordered product of a path in basis state `index`.
    pub fn path_product(path: &[LoopStep], index: usize) -> GroupElement {
        path.iter().fold(GroupElement::E, |acc, s| {
            let u = Self::link_value(index, s.link);
            let u = if s.forward { u } else { u.inv() };
            u * acc
        })
    }

    /// `Re Tr rho_f` of a closed path in basis state `index`.
    pub fn loop_trace(path: &[LoopStep], index: usize) -> f64 {
        fund_trace(Self::path_product(path, index))
    }

    /// Number of fundamental cycles, `|E| - |V| + 1`.
    pub fn cycle_rank(&self) -> usize {
        self.num_links() - self.num_vertices + 1
    }

    /// Fundamental cycles based at vertex 0: one per link outside a breadth-first spanning tree,
    /// closed through the tree paths to its ends.
    pub fn based_cycles(&self) -> Vec<Vec<LoopStep>> {
        let mut path: Vec<Option<Vec<LoopStep>>> = vec![None; self.num_vertices];
        path[0] = Some(Vec::new());
        let mut tree = vec![false; self.num_links()];
        let mut queue = alloc::collections::VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for (l, link) in self.links.iter().enumerate() {
                for (step, from, to) in [(LoopStep::fwd(l), link.tail, link.head), (LoopStep::back(l), link.head, link.tail)] {
                    if from == v && path[to].is_none() {
                        let mut p = path[v].clone().expect("visited");
                        p.push(step);
                        path[to] = Some(p);
                        tree[l] = true;
                        queue.push_back(to);
                    }
                }
            }
        }
        let to_root = |v: usize| inverse_path(path[v].as_ref().expect("lattice is connected"));
        (0..self.num_links())
            .filter(|&l| !tree[l])
            .map(|l| {
                let link = self.links[l];
                let mut c = path[link.tail].clone().expect("lattice is connected");
                c.push(LoopStep::fwd(l));
                c.extend(to_root(link.head));
                c
            })
            .collect()
    }

    /// Wilson loops from all reduced words of length `1..=max_len` in the based cycles.
    /// Words with the same `Re Tr rho_f` on every basis state, or a constant one, are kept once.
    pub fn wilson_loops(&self, max_len: usize) -> Vec<Vec<LoopStep>> {
        let gens = self.based_cycles();
        let letters: Vec<Vec<LoopStep>> = gens.iter().cloned().chain(gens.iter().map(|g| inverse_path(g))).collect();
        let n = gens.len();
        let mut words: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut frontier: Vec<Vec<usize>> = (0..2 * n).map(|i| vec![i]).collect();
        for _ in 1..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                let last = *w.last().expect("non-empty word");
                for l in (0..2 * n).filter(|&l| l != (last + n) % (2 * n)) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        let mut seen = alloc::collections::BTreeSet::new();
        let mut out = Vec::new();
        for w in words {
            let path: Vec<LoopStep> = w.iter().flat_map(|&l| letters[l].iter().copied()).collect();
            let key: Vec<i8> = (0..self.basis_dim()).map(|x| Self::loop_trace(&path, x) as i8).collect();
            if key.iter().all(|&k| k == key[0]) || !seen.insert(key) {
                continue;
            }
            out.push(path);
        }
        out
    }
}

/// The same loop walked backwards.
pub fn inverse_path(path: &[LoopStep]) -> Vec<LoopStep> {
    path.iter()
        .rev()
        .map(|s| LoopStep {
            link: s.link,
            forward: !s.forward,
        })
        .collect()
}
