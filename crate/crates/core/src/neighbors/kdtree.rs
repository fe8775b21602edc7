use crate::types::{squared_distance, Dataset};

use super::Candidates;

const LEAF_SIZE: usize = 8;

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// A static kd-tree over the rows of a [`Dataset`].
///
/// Splits are on the axis of widest spread at the median point. Pruning uses
/// the distance to the splitting plane and never discards a subtree whose
/// bound equals the current k-th distance, so index tie-breaks agree with
/// exhaustive search.
pub(crate) struct KdTree<'a> {
    data: &'a Dataset,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub(crate) fn build(data: &'a Dataset) -> Self {
        let mut tree = Self {
            data,
            order: (0..data.n()).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, data.n());
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(start, end);
        let data = self.data;
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            data.point(a)[axis].total_cmp(&data.point(b)[axis])
        });
        let value = data.point(self.order[mid])[axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn widest_axis(&self, start: usize, end: usize) -> usize {
        let d = self.data.d();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &self.order[start..end] {
            for (a, &v) in self.data.point(i).iter().enumerate() {
                lo[a] = lo[a].min(v);
                hi[a] = hi[a].max(v);
            }
        }
        (0..d)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0)
    }

    /// The `k` nearest rows to `query`, skipping row `exclude`.
    pub(crate) fn knn(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Candidates {
        let mut cands = Candidates::new(k);
        if !self.nodes.is_empty() {
            self.search(0, query, exclude, &mut cands);
        }
        cands
    }

    fn search(&self, node: usize, query: &[f64], exclude: Option<usize>, cands: &mut Candidates) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if Some(i) != exclude {
                        cands.offer(squared_distance(query, self.data.point(i)), i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, query, exclude, cands);
                if !cands.prunes(diff * diff) {
                    self.search(far, query, exclude, cands);
                }
            }
        }
    }
}
