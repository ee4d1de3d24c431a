//! Static k-d tree under the max-norm, for neighbour search and range counts.

const LEAF: usize = 12;

struct Node {
    start: usize,
    end: usize,
    // child node ids, or usize::MAX for a leaf
    left: usize,
    right: usize,
}

pub struct KdTree {
    dim: usize,
    // points in tree order, `dim` values each
    pts: Vec<f64>,
    // original index of each point in tree order
    ids: Vec<usize>,
    nodes: Vec<Node>,
    // per node: dim lower bounds followed by dim upper bounds
    bbox: Vec<f64>,
}

impl KdTree {
    /// `points` is row-major, `dim` values per point.
    pub fn build(points: &[f64], dim: usize) -> KdTree {
        assert!(dim > 0 && points.len() % dim == 0);
        let n = points.len() / dim;
        let mut ids: Vec<usize> = (0..n).collect();
        let mut tree = KdTree {
            dim,
            pts: Vec::new(),
            ids: Vec::new(),
            nodes: Vec::with_capacity(2 * n / LEAF + 1),
            bbox: Vec::new(),
        };
        if n > 0 {
            tree.split(points, &mut ids, 0, n);
        }
        tree.pts = Vec::with_capacity(points.len());
        for &i in &ids {
            tree.pts.extend_from_slice(&points[i * dim..(i + 1) * dim]);
        }
        tree.ids = ids;
        tree
    }

    fn split(&mut self, points: &[f64], ids: &mut [usize], start: usize, end: usize) -> usize {
        let dim = self.dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &ids[start..end] {
            for c in 0..dim {
                let v = points[i * dim + c];
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            left: usize::MAX,
            right: usize::MAX,
        });
        self.bbox.extend_from_slice(&lo);
        self.bbox.extend_from_slice(&hi);
        if end - start <= LEAF {
            return id;
        }
        let axis = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        if !(hi[axis] > lo[axis]) {
            // every point identical: keep as one leaf
            return id;
        }
        let mid = start + (end - start) / 2;
        ids[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a * dim + axis].total_cmp(&points[b * dim + axis])
        });
        let left = self.split(points, ids, start, mid);
        let right = self.split(points, ids, mid, end);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id
    }

    #[inline]
    fn min_dist(&self, node: usize, q: &[f64]) -> f64 {
        let b = &self.bbox[node * 2 * self.dim..(node + 1) * 2 * self.dim];
        let (lo, hi) = b.split_at(self.dim);
        let mut d = 0.0f64;
        for c in 0..self.dim {
            let gap = (lo[c] - q[c]).max(q[c] - hi[c]);
            d = d.max(gap);
        }
        d
    }

    #[inline]
    fn max_dist(&self, node: usize, q: &[f64]) -> f64 {
        let b = &self.bbox[node * 2 * self.dim..(node + 1) * 2 * self.dim];
        let (lo, hi) = b.split_at(self.dim);
        let mut d = 0.0f64;
        for c in 0..self.dim {
            d = d.max((q[c] - lo[c]).max(hi[c] - q[c]));
        }
        d
    }

    #[inline]
    fn dist(&self, pos: usize, q: &[f64]) -> f64 {
        let p = &self.pts[pos * self.dim..(pos + 1) * self.dim];
        let mut d = 0.0f64;
        for c in 0..self.dim {
            d = d.max((p[c] - q[c]).abs());
        }
        d
    }

    /// Distance from `q` to its k-th nearest point, skipping the point with original index `skip`.
    pub fn kth_distance(&self, q: &[f64], k: usize, skip: usize) -> f64 {
        let mut best = vec![f64::INFINITY; k];
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if self.min_dist(node, q) >= best[k - 1] {
                continue;
            }
            let nd = &self.nodes[node];
            if nd.left == usize::MAX {
                for pos in nd.start..nd.end {
                    if self.ids[pos] == skip {
                        continue;
                    }
                    let d = self.dist(pos, q);
                    if d < best[k - 1] {
                        let mut at = k - 1;
                        while at > 0 && best[at - 1] > d {
                            best[at] = best[at - 1];
                            at -= 1;
                        }
                        best[at] = d;
                    }
                }
            } else {
                let (dl, dr) = (self.min_dist(nd.left, q), self.min_dist(nd.right, q));
                // nearer child popped first
                if dl <= dr {
                    stack.push(nd.right);
                    stack.push(nd.left);
                } else {
                    stack.push(nd.left);
                    stack.push(nd.right);
                }
            }
        }
        best[k - 1]
    }

    /// Number of points strictly closer than `r` to `q` (the query point itself included).
    pub fn count_within(&self, q: &[f64], r: f64) -> usize {
        let mut count = 0;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if self.min_dist(node, q) >= r {
                continue;
            }
            let nd = &self.nodes[node];
            if self.max_dist(node, q) < r {
                count += nd.end - nd.start;
            } else if nd.left == usize::MAX {
                count += (nd.start..nd.end).filter(|&p| self.dist(p, q) < r).count();
            } else {
                stack.push(nd.left);
                stack.push(nd.right);
            }
        }
        count
    }
}
