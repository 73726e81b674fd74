//! Finite filtered path spaces.
//!
//! A space of horizon `H` is a rooted tree in which every leaf sits at depth
//! `H` and every edge carries a positive rational probability, the child
//! probabilities of each internal node summing to one. Depth-`n` nodes are the
//! atoms of the time-`n` information, so an adapted process is a value per
//! node and a measure on horizon events is a weight per leaf. Spaces are
//! immutable once built and safe to share across threads.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, ratio, Rational};

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

/// Handle to a node of a [`PathSpace`]. A handle is only valid on the space
/// that created it; accessors panic or error on foreign handles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    space: u64,
    index: u32,
}

#[derive(Debug, Clone)]
struct Node {
    depth: u32,
    parent: Option<u32>,
    /// Children occupy a contiguous index range in level order.
    children: (u32, u32),
    /// Probability of the edge from the parent (1 at the root).
    edge_prob: Rational,
    /// Product of edge probabilities from the root.
    path_prob: Rational,
    /// Leaf positions covered by the subtree.
    leaf_range: (u32, u32),
}

/// Finite event tree with exact transition probabilities.
#[derive(Debug)]
pub struct PathSpace {
    id: u64,
    horizon: usize,
    nodes: Vec<Node>,
    /// Nodes of depth `d` occupy indices `level_start[d]..level_start[d + 1]`.
    level_start: Vec<u32>,
}

fn path_of(nodes: &[Node], mut index: usize) -> String {
    if nodes[index].parent.is_none() {
        return "root".to_string();
    }
    let mut steps = Vec::new();
    while let Some(parent) = nodes[index].parent {
        let offset = index as u32 - nodes[parent as usize].children.0;
        steps.push(offset.to_string());
        index = parent as usize;
    }
    steps.reverse();
    steps.join(".")
}

impl PathSpace {
    /// Full binary tree of the given horizon with probability 1/2 per edge.
    pub fn fair_binary(horizon: usize) -> Result<Arc<Self>> {
        let half = ratio(1, 2);
        let mut levels = Vec::with_capacity(horizon);
        let mut count = 1usize;
        for _ in 0..horizon {
            levels.push(vec![vec![half.clone(), half.clone()]; count]);
            count *= 2;
        }
        Self::from_child_probs(horizon, &levels)
    }

    /// General k-ary tree. `child_probs[d][i]` lists the child edge
    /// probabilities of the `i`-th depth-`d` node, in left-to-right order;
    /// each list must be non-empty, positive, and sum to exactly one.
    pub fn from_child_probs(horizon: usize, child_probs: &[Vec<Vec<Rational>>]) -> Result<Arc<Self>> {
        if horizon == 0 {
            return Err(Error::HorizonTooSmall);
        }
        if child_probs.len() != horizon {
            return Err(Error::MalformedSpec(format!(
                "expected child probabilities for {} depths, got {}",
                horizon,
                child_probs.len()
            )));
        }
        let id = NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed);
        let mut nodes = vec![Node {
            depth: 0,
            parent: None,
            children: (0, 0),
            edge_prob: Rational::one(),
            path_prob: Rational::one(),
            leaf_range: (0, 0),
        }];
        let mut level_start = vec![0u32, 1u32];
        for (depth, lists) in child_probs.iter().enumerate() {
            let lo = level_start[depth] as usize;
            let hi = level_start[depth + 1] as usize;
            if lists.len() != hi - lo {
                return Err(Error::MalformedSpec(format!(
                    "depth {}: expected {} child lists, got {}",
                    depth,
                    hi - lo,
                    lists.len()
                )));
            }
            for (offset, probs) in lists.iter().enumerate() {
                let parent = lo + offset;
                let here = || path_of(&nodes, parent);
                if probs.is_empty() {
                    return Err(Error::EdgeProbabilities {
                        node: here(),
                        detail: "internal node with no children".to_string(),
                    });
                }
                let mut sum = Rational::zero();
                for p in probs {
                    if *p <= Rational::zero() {
                        return Err(Error::EdgeProbabilities {
                            node: here(),
                            detail: format!("nonpositive edge probability {}", format_rational(p)),
                        });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    return Err(Error::EdgeProbabilities {
                        node: here(),
                        detail: format!("probabilities sum to {}", format_rational(&sum)),
                    });
                }
                let start = nodes.len() as u32;
                let parent_prob = nodes[parent].path_prob.clone();
                for p in probs {
                    nodes.push(Node {
                        depth: depth as u32 + 1,
                        parent: Some(parent as u32),
                        children: (0, 0),
                        edge_prob: p.clone(),
                        path_prob: &parent_prob * p,
                        leaf_range: (0, 0),
                    });
                }
                nodes[parent].children = (start, nodes.len() as u32);
            }
            if nodes.len() > u32::MAX as usize {
                return Err(Error::MalformedSpec("space too large".to_string()));
            }
            level_start.push(nodes.len() as u32);
        }
        let leaf_base = level_start[horizon] as usize;
        for i in (0..nodes.len()).rev() {
            if nodes[i].depth == horizon as u32 {
                let pos = (i - leaf_base) as u32;
                nodes[i].leaf_range = (pos, pos + 1);
            } else {
                let (a, b) = nodes[i].children;
                nodes[i].leaf_range = (
                    nodes[a as usize].leaf_range.0,
                    nodes[b as usize - 1].leaf_range.1,
                );
            }
        }
        Ok(Arc::new(Self {
            id,
            horizon,
            nodes,
            level_start,
        }))
    }

    pub(crate) fn space_id(&self) -> u64 {
        self.id
    }

    /// Dense level-order index of a node, usable as a key into per-node
    /// tables. The root has index 0 and indices grow with depth.
    pub fn node_index(&self, node: NodeId) -> usize {
        self.idx(node)
    }

    #[track_caller]
    fn idx(&self, node: NodeId) -> usize {
        assert_eq!(node.space, self.id, "node handle from a foreign space");
        node.index as usize
    }

    fn make_id(&self, index: usize) -> NodeId {
        NodeId {
            space: self.id,
            index: index as u32,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_leaves(&self) -> usize {
        (self.level_start[self.horizon + 1] - self.level_start[self.horizon]) as usize
    }

    pub fn root(&self) -> NodeId {
        self.make_id(0)
    }

    /// All depth-`n` nodes in left-to-right order. These are the atoms of the
    /// time-`n` information.
    pub fn atoms(&self, depth: usize) -> Result<Vec<NodeId>> {
        if depth > self.horizon {
            return Err(Error::DepthOutOfRange {
                depth,
                horizon: self.horizon,
            });
        }
        let lo = self.level_start[depth];
        let hi = self.level_start[depth + 1];
        Ok((lo..hi).map(|i| self.make_id(i as usize)).collect())
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.atoms(self.horizon).expect("horizon atoms")
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(|i| self.make_id(i))
    }

    pub fn depth(&self, node: NodeId) -> usize {
        self.nodes[self.idx(node)].depth as usize
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.nodes[self.idx(node)]
            .parent
            .map(|p| self.make_id(p as usize))
    }

    pub fn children(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let (a, b) = self.nodes[self.idx(node)].children;
        (a..b).map(|i| self.make_id(i as usize))
    }

    /// Probability of the edge leading into `node` (1 at the root).
    pub fn edge_prob(&self, node: NodeId) -> &Rational {
        &self.nodes[self.idx(node)].edge_prob
    }

    /// Probability of the atom: product of edge probabilities from the root.
    /// Errors on a handle from another space.
    pub fn prob(&self, node: NodeId) -> Result<Rational> {
        if node.space != self.id {
            return Err(Error::ForeignNode);
        }
        Ok(self.nodes[node.index as usize].path_prob.clone())
    }

    /// Borrowing variant of [`PathSpace::prob`]; panics on a foreign handle.
    pub fn path_prob(&self, node: NodeId) -> &Rational {
        &self.nodes[self.idx(node)].path_prob
    }

    /// Ancestor of `node` at the given (not larger) depth.
    pub fn ancestor_at(&self, node: NodeId, depth: usize) -> NodeId {
        let mut i = self.idx(node);
        assert!(depth <= self.nodes[i].depth as usize, "ancestor below node");
        while self.nodes[i].depth as usize > depth {
            i = self.nodes[i].parent.expect("non-root has a parent") as usize;
        }
        self.make_id(i)
    }

    /// Position of a leaf within the left-to-right leaf order.
    pub fn leaf_position(&self, node: NodeId) -> usize {
        let i = self.idx(node);
        assert_eq!(
            self.nodes[i].depth as usize, self.horizon,
            "leaf_position on an internal node"
        );
        i - self.level_start[self.horizon] as usize
    }

    pub fn leaf_at(&self, position: usize) -> NodeId {
        assert!(position < self.num_leaves(), "leaf position out of range");
        self.make_id(self.level_start[self.horizon] as usize + position)
    }

    /// Half-open range of leaf positions lying below `node`.
    pub fn leaf_range(&self, node: NodeId) -> std::ops::Range<usize> {
        let (a, b) = self.nodes[self.idx(node)].leaf_range;
        a as usize..b as usize
    }

    /// Human-readable node address: child offsets from the root, e.g. `0.1.0`.
    pub fn node_path(&self, node: NodeId) -> String {
        path_of(&self.nodes, self.idx(node))
    }
}

/// A process adapted to the tree filtration: one rational value per node.
#[derive(Debug, Clone)]
pub struct AdaptedProcess {
    space: Arc<PathSpace>,
    values: Vec<Rational>,
}

impl PartialEq for AdaptedProcess {
    fn eq(&self, other: &Self) -> bool {
        self.space.id == other.space.id && self.values == other.values
    }
}

impl Eq for AdaptedProcess {}

impl AdaptedProcess {
    /// Wraps a total assignment of values, one per node in index order.
    pub fn new(space: Arc<PathSpace>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.num_nodes() {
            return Err(Error::WrongValueCount {
                expected: space.num_nodes(),
                got: values.len(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn from_fn(space: &Arc<PathSpace>, mut f: impl FnMut(&PathSpace, NodeId) -> Rational) -> Self {
        let values = space.node_ids().map(|n| f(space, n)).collect();
        Self {
            space: Arc::clone(space),
            values,
        }
    }

    pub fn constant(space: &Arc<PathSpace>, value: Rational) -> Self {
        Self {
            space: Arc::clone(space),
            values: vec![value; space.num_nodes()],
        }
    }

    pub fn space(&self) -> &Arc<PathSpace> {
        &self.space
    }

    pub fn value(&self, node: NodeId) -> &Rational {
        &self.values[self.space.idx(node)]
    }

    /// One-step conditional expectation: at each depth-`n` node, the
    /// probability-weighted average of the process over its children.
    pub fn conditional_expectation(&self, depth: usize) -> Result<Vec<Rational>> {
        let h = self.space.horizon();
        if depth >= h {
            return Err(Error::DepthOutOfRange { depth, horizon: h });
        }
        Ok(self
            .space
            .atoms(depth)?
            .into_iter()
            .map(|v| {
                self.space
                    .children(v)
                    .map(|c| self.space.edge_prob(c) * self.value(c))
                    .sum()
            })
            .collect())
    }

    /// Expectation of the depth-`n` marginal under `mu`, with atom masses
    /// obtained by summing `mu`'s leaf weights below each atom.
    pub fn expectation(&self, depth: usize, mu: &PathMeasure) -> Result<Rational> {
        if mu.space.id != self.space.id {
            return Err(Error::SpaceMismatch);
        }
        let atoms = self.space.atoms(depth)?;
        Ok(atoms
            .into_iter()
            .map(|a| mu.atom_mass(a) * self.value(a))
            .sum())
    }

    /// Expectation of the depth-`n` marginal under the base probability,
    /// using root-to-atom probability products rather than leaf sums.
    pub fn expectation_p(&self, depth: usize) -> Result<Rational> {
        let atoms = self.space.atoms(depth)?;
        Ok(atoms
            .into_iter()
            .map(|a| self.space.path_prob(a) * self.value(a))
            .sum())
    }

    /// True iff every node's value is already determined one step earlier,
    /// i.e. siblings always carry equal values.
    pub fn is_predictable(&self) -> bool {
        for depth in 0..self.space.horizon() {
            for v in self.space.atoms(depth).expect("depth in range") {
                let mut children = self.space.children(v);
                if let Some(first) = children.next() {
                    let head = self.value(first);
                    if children.any(|c| self.value(c) != head) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True iff all values are nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= Rational::zero())
    }

    /// Nodes carrying a strictly negative value, in level order.
    pub fn negative_nodes(&self) -> Vec<NodeId> {
        self.space
            .node_ids()
            .filter(|n| *self.value(*n) < Rational::zero())
            .collect()
    }
}

/// A measure on horizon events: one rational weight per leaf, in leaf order.
#[derive(Debug, Clone)]
pub struct PathMeasure {
    space: Arc<PathSpace>,
    weights: Vec<Rational>,
}

impl PartialEq for PathMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.space.id == other.space.id && self.weights == other.weights
    }
}

impl Eq for PathMeasure {}

impl PathMeasure {
    /// Wraps explicit nonnegative leaf weights.
    pub fn new(space: Arc<PathSpace>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != space.num_leaves() {
            return Err(Error::WrongValueCount {
                expected: space.num_leaves(),
                got: weights.len(),
            });
        }
        if let Some(leaf) = weights.iter().position(|w| *w < Rational::zero()) {
            return Err(Error::NegativeWeight { leaf });
        }
        Ok(Self { space, weights })
    }

    /// Internal constructor that allows signed weights (signed densities show
    /// up when the underlying process takes negative values).
    pub(crate) fn from_weights_unchecked(space: Arc<PathSpace>, weights: Vec<Rational>) -> Self {
        assert_eq!(weights.len(), space.num_leaves());
        Self { space, weights }
    }

    /// The base probability: each leaf weighs its path probability.
    pub fn p(space: &Arc<PathSpace>) -> Self {
        let weights = space
            .leaves()
            .into_iter()
            .map(|l| space.path_prob(l).clone())
            .collect();
        Self {
            space: Arc::clone(space),
            weights,
        }
    }

    pub fn space(&self) -> &Arc<PathSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, leaf_position: usize) -> &Rational {
        &self.weights[leaf_position]
    }

    /// Mass of the atom below `node`: sum of the leaf weights it covers.
    pub fn atom_mass(&self, node: NodeId) -> Rational {
        self.space
            .leaf_range(node)
            .map(|i| &self.weights[i])
            .sum()
    }

    /// Mass of an event given as distinct atoms of a single depth.
    pub fn event_mass(&self, atoms: &[NodeId]) -> Result<Rational> {
        validate_event(&self.space, atoms)?;
        Ok(atoms.iter().map(|a| self.atom_mass(*a)).sum())
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|w| *w >= Rational::zero())
    }
}

/// Checks that `atoms` are distinct nodes of one common depth of `space`.
pub(crate) fn validate_event(space: &PathSpace, atoms: &[NodeId]) -> Result<()> {
    let Some(first) = atoms.first() else {
        return Ok(());
    };
    if first.space != space.id {
        return Err(Error::SpaceMismatch);
    }
    let depth = space.depth(*first);
    let mut seen: Vec<u32> = Vec::with_capacity(atoms.len());
    for a in atoms {
        if a.space != space.id {
            return Err(Error::SpaceMismatch);
        }
        if space.depth(*a) != depth {
            return Err(Error::BadEvent(format!(
                "atom {} has depth {}, expected {}",
                space.node_path(*a),
                space.depth(*a),
                depth
            )));
        }
        seen.push(a.index);
    }
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::BadEvent("duplicate atom".to_string()));
    }
    Ok(())
}
