//! Breadth-first search helpers shared by the oracle solvers.

use std::collections::HashMap;
use std::hash::Hash;

pub(crate) enum Search<M> {
    Found(Vec<M>),
    Exhausted,
}

/// Returned when the visited set outgrows the caller's budget.
#[derive(Debug)]
pub(crate) struct StateLimit;

struct Node<S, M> {
    state: S,
    parent: usize,
    via: Option<M>,
    depth: u32,
}

struct Tree<S, M> {
    nodes: Vec<Node<S, M>>,
    index: HashMap<S, usize>,
}

impl<S: Clone + Eq + Hash, M: Clone> Tree<S, M> {
    fn rooted(root: S) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Self {
            nodes: vec![Node {
                state: root,
                parent: usize::MAX,
                via: None,
                depth: 0,
            }],
            index,
        }
    }

    fn push(&mut self, state: S, parent: usize, via: M) -> Option<usize> {
        if self.index.contains_key(&state) {
            return None;
        }
        let id = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        self.index.insert(state.clone(), id);
        self.nodes.push(Node {
            state,
            parent,
            via: Some(via),
            depth,
        });
        Some(id)
    }

    /// Moves from the root to `id`, in root-to-leaf order.
    fn path_to(&self, mut id: usize) -> Vec<M> {
        let mut out = Vec::new();
        while let Some(m) = &self.nodes[id].via {
            out.push(m.clone());
            id = self.nodes[id].parent;
        }
        out.reverse();
        out
    }
}

/// Plain BFS; the first goal dequeued is at minimum depth.
pub(crate) fn breadth_first<S, M>(
    start: S,
    is_goal: impl Fn(&S) -> bool,
    mut expand: impl FnMut(&S, &mut Vec<(M, S)>),
    max_states: usize,
) -> Result<Search<M>, StateLimit>
where
    S: Clone + Eq + Hash,
    M: Clone,
{
    let mut tree = Tree::rooted(start);
    let mut children = Vec::new();
    let mut head = 0;
    while head < tree.nodes.len() {
        if is_goal(&tree.nodes[head].state) {
            return Ok(Search::Found(tree.path_to(head)));
        }
        children.clear();
        expand(&tree.nodes[head].state, &mut children);
        for (m, s) in children.drain(..) {
            tree.push(s, head, m);
        }
        if tree.nodes.len() > max_states {
            return Err(StateLimit);
        }
        head += 1;
    }
    Ok(Search::Exhausted)
}

/// Layer-synchronized bidirectional BFS for graphs whose moves are reversible.
/// `invert` maps a move `y -> x` to the move `x -> y`.
pub(crate) fn bidirectional<S, M>(
    start: S,
    goal: S,
    mut expand: impl FnMut(&S, &mut Vec<(M, S)>),
    invert: impl Fn(&M) -> M,
    max_states: usize,
) -> Result<Search<M>, StateLimit>
where
    S: Clone + Eq + Hash,
    M: Clone,
{
    if start == goal {
        return Ok(Search::Found(Vec::new()));
    }
    let mut fwd = Tree::rooted(start);
    let mut bwd = Tree::rooted(goal);
    let mut fwd_layer = 0..1;
    let mut bwd_layer = 0..1;
    let mut children = Vec::new();
    loop {
        if fwd_layer.is_empty() || bwd_layer.is_empty() {
            return Ok(Search::Exhausted);
        }
        let forward = fwd_layer.len() <= bwd_layer.len();
        let (this, other, layer) = if forward {
            (&mut fwd, &bwd, fwd_layer.clone())
        } else {
            (&mut bwd, &fwd, bwd_layer.clone())
        };
        let layer_end = this.nodes.len();
        // (total length, node id in `this`, node id in `other`)
        let mut best: Option<(u32, usize, usize)> = None;
        for id in layer {
            children.clear();
            expand(&this.nodes[id].state, &mut children);
            for (m, s) in children.drain(..) {
                let met = other.index.get(&s).copied();
                if let Some(child) = this.push(s, id, m) {
                    if let Some(o) = met {
                        let total = this.nodes[child].depth + other.nodes[o].depth;
                        if best.is_none_or(|(b, _, _)| total < b) {
                            best = Some((total, child, o));
                        }
                    }
                }
            }
            if this.nodes.len() + other.nodes.len() > max_states {
                return Err(StateLimit);
            }
        }
        let new_layer = layer_end..this.nodes.len();
        if let Some((_, here, there)) = best {
            let (f_id, b_id) = if forward { (here, there) } else { (there, here) };
            let mut path = fwd.path_to(f_id);
            let mut id = b_id;
            while let Some(m) = &bwd.nodes[id].via {
                path.push(invert(m));
                id = bwd.nodes[id].parent;
            }
            return Ok(Search::Found(path));
        }
        if forward {
            fwd_layer = new_layer;
        } else {
            bwd_layer = new_layer;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Integer line where each move is +1 or -1 within 0..=20.
    fn line(s: &i32, out: &mut Vec<(i32, i32)>) {
        for d in [-1, 1] {
            let t = s + d;
            if (0..=20).contains(&t) {
                out.push((d, t));
            }
        }
    }

    #[test]
    fn bfs_finds_shortest_path() {
        match breadth_first(3, |s| *s == 9, line, 1000).unwrap() {
            Search::Found(p) => assert_eq!(p, vec![1; 6]),
            Search::Exhausted => panic!("expected a path"),
        }
    }

    #[test]
    fn bfs_reports_exhaustion_and_limits() {
        assert!(matches!(breadth_first(3, |s| *s == 99, line, 1000), Ok(Search::Exhausted)));
        assert!(breadth_first(0, |s| *s == 20, line, 5).is_err());
    }

    #[test]
    fn bidirectional_matches_bfs_lengths() {
        for (a, b) in [(0, 0), (0, 1), (2, 17), (20, 3), (5, 6)] {
            let Search::Found(p) = bidirectional(a, b, line, |m| -m, 1000).unwrap() else {
                panic!("no path {a}->{b}");
            };
            assert_eq!(p.len() as i32, (a - b).abs());
            assert_eq!(a + p.iter().sum::<i32>(), b);
        }
    }
}
