//! Weighted graphs, Laplacians, connectivity tests and spectral helpers.
//!
//! Graphs are dense: the target sizes are a few hundred nodes at most, so an
//! `n x n` row-major weight matrix is simpler and faster than sparse storage.

mod schedule;

pub use schedule::{simpson, GraphSchedule, Segment, WeightFn, DEFAULT_INTEGRAL_EPS};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("node count must be positive")]
    EmptyGraph,
    #[error("weight matrix has {got} entries, expected {expected}")]
    BadMatrixSize { expected: usize, got: usize },
    #[error("diagonal entry ({0},{0}) must be zero")]
    NonzeroDiagonal(usize),
    #[error("weight ({i},{j}) = {w} is not a finite nonnegative number")]
    BadWeight { i: usize, j: usize, w: f64 },
    #[error("undirected graph has asymmetric weights at ({i},{j})")]
    Asymmetric { i: usize, j: usize },
    #[error("edge ({i},{j}) is out of range for {n} nodes")]
    EdgeOutOfRange { i: usize, j: usize, n: usize },
    #[error("operation requires an undirected graph")]
    DirectedInput,
    #[error("operation requires a directed graph")]
    UndirectedInput,
    #[error("graph is not strongly connected: null space of L^T is {0}-dimensional")]
    NullSpaceDimension(usize),
    #[error("left eigenvector has a non-positive component ({idx}: {value})")]
    NonPositiveEigenvector { idx: usize, value: f64 },
    #[error("left eigenvector residual {residual} exceeds tolerance {tol}")]
    EigenvectorResidual { residual: f64, tol: f64 },
    #[error("weight function {c0} + {c_sin} sin t + {c_cos} cos t can go negative")]
    NegativeWeightFn { c0: f64, c_sin: f64, c_cos: f64 },
    #[error("schedule segments must tile the interval: {0}")]
    BadSegments(String),
    #[error("duplicate edge ({i},{j}) within one segment")]
    DuplicateEdge { i: usize, j: usize },
    #[error("symmetric schedule has mismatched ({i},{j}) and ({j},{i}) entries")]
    AsymmetricSchedule { i: usize, j: usize },
    #[error("time {0} is negative")]
    NegativeTime(f64),
    #[error("time {t} is beyond the horizon {horizon} of a non-periodic schedule")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error(
        "integral connectivity is a limit notion: it is decidable here only for periodic \
         schedules (declare a period or use a one-segment periodic wrapper)"
    )]
    NonPeriodicIntegral,
    #[error("integral graph requires a symmetric schedule")]
    NonSymmetricSchedule,
    #[error("threshold must be positive, got {0}")]
    BadThreshold(f64),
}

/// A fixed weighted graph: node count, dense weight matrix and directedness.
///
/// `weights[i*n + j]` is the influence weight of node `j` on node `i`; the
/// diagonal is zero and all entries are nonnegative. Undirected graphs have a
/// symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    weights: Vec<f64>,
    directed: bool,
}

/// Dense Laplacian `L = D - A` with rows that sum to zero by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    n: usize,
    matrix: Vec<f64>,
}

impl Graph {
    /// Builds a graph from a full row-major weight matrix, validating all
    /// structural invariants.
    pub fn from_weights(n: usize, weights: Vec<f64>, directed: bool) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if weights.len() != n * n {
            return Err(GraphError::BadMatrixSize {
                expected: n * n,
                got: weights.len(),
            });
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(GraphError::NonzeroDiagonal(i));
            }
            for j in 0..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(GraphError::BadWeight { i, j, w });
                }
                if !directed && weights[j * n + i] != w {
                    return Err(GraphError::Asymmetric { i, j });
                }
            }
        }
        Ok(Self {
            n,
            weights,
            directed,
        })
    }

    /// Undirected graph from an edge list; each `(i, j, w)` installs both
    /// `(i,j)` and `(j,i)`.
    pub fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut weights = vec![0.0; n.max(1) * n.max(1)];
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(GraphError::EdgeOutOfRange { i, j, n });
            }
            weights[i * n + j] = w;
            weights[j * n + i] = w;
        }
        Self::from_weights(n, weights, false)
    }

    /// Directed graph from an arc list; `(i, j, w)` means node `i` weighs the
    /// output of node `j` with `w`.
    pub fn directed(n: usize, arcs: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut weights = vec![0.0; n.max(1) * n.max(1)];
        for &(i, j, w) in arcs {
            if i >= n || j >= n {
                return Err(GraphError::EdgeOutOfRange { i, j, n });
            }
            weights[i * n + j] = w;
        }
        Self::from_weights(n, weights, true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Row-major `n x n` weight matrix.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `L = diag(A 1) - A`. The diagonal is the sum of the row's off-diagonal
    /// weights, so summing the off-diagonal entries of a row and then adding
    /// the diagonal yields exactly zero in floating point.
    pub fn laplacian(&self) -> Laplacian {
        let n = self.n;
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            let mut degree = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = self.weights[i * n + j];
                matrix[i * n + j] = -w;
                degree += w;
            }
            matrix[i * n + i] = degree;
        }
        Laplacian { n, matrix }
    }

    /// Connectivity of an undirected graph by breadth-first search over the
    /// nonzero weights.
    pub fn is_connected(&self) -> Result<bool, GraphError> {
        if self.directed {
            return Err(GraphError::DirectedInput);
        }
        Ok(self.reachable_from(0) == self.n)
    }

    /// Strong connectivity of a directed graph: every node reachable from
    /// node 0 and node 0 reachable from every node.
    pub fn is_strongly_connected(&self) -> Result<bool, GraphError> {
        if !self.directed {
            return Err(GraphError::UndirectedInput);
        }
        if self.reachable_from(0) != self.n {
            return Ok(false);
        }
        let reversed = Self {
            n: self.n,
            weights: transpose(&self.weights, self.n),
            directed: true,
        };
        Ok(reversed.reachable_from(0) == self.n)
    }

    /// Connected components of an undirected graph, each sorted, listed in
    /// order of their smallest node.
    pub fn connected_components(&self) -> Result<Vec<Vec<usize>>, GraphError> {
        if self.directed {
            return Err(GraphError::DirectedInput);
        }
        let n = self.n;
        let mut label = vec![usize::MAX; n];
        let mut components = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut queue = std::collections::VecDeque::from([start]);
            label[start] = id;
            let mut members = vec![start];
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    if label[j] == usize::MAX && self.weights[i * n + j] > 0.0 {
                        label[j] = id;
                        members.push(j);
                        queue.push_back(j);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        Ok(components)
    }

    fn reachable_from(&self, start: usize) -> usize {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && self.weights[i * n + j] > 0.0 {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count
    }

    /// Positive left eigenvector `p` of the Laplacian for eigenvalue zero:
    /// `p^T L = 0`, `sum p_i = 1`, `p_i > 0`.
    ///
    /// Computed as the null vector of `L^T` from a singular value
    /// decomposition; fails when the null space is not one-dimensional (the
    /// graph is not strongly connected) or any normalized component is not
    /// positive.
    pub fn left_eigenvector(&self) -> Result<Vec<f64>, GraphError> {
        if !self.directed {
            return Err(GraphError::UndirectedInput);
        }
        let n = self.n;
        let lap = self.laplacian();
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let lt = nalgebra::DMatrix::from_fn(n, n, |r, c| lap.matrix[c * n + r]);
        let svd = lt.svd(false, true);
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
        let null_tol = sigma_max * 1e-10;
        let mut null_indices: Vec<usize> = (0..n)
            .filter(|&k| svd.singular_values[k] <= null_tol)
            .collect();
        if null_indices.len() != 1 {
            return Err(GraphError::NullSpaceDimension(null_indices.len()));
        }
        let k = null_indices.pop().unwrap();
        let v_t = svd.v_t.expect("requested right singular vectors");
        let mut p: Vec<f64> = (0..n).map(|j| v_t[(k, j)]).collect();

        // Fix the sign so the dominant component is positive, then scale to sum 1.
        let dominant = p
            .iter()
            .cloned()
            .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if dominant < 0.0 {
            for v in &mut p {
                *v = -*v;
            }
        }
        let sum: f64 = p.iter().sum();
        for v in &mut p {
            *v /= sum;
        }
        for (idx, &value) in p.iter().enumerate() {
            if value <= 0.0 {
                return Err(GraphError::NonPositiveEigenvector { idx, value });
            }
        }

        let norm_l = lap.matrix.iter().fold(0.0_f64, |a, &v| a + v * v).sqrt();
        let tol = 1e-10 * norm_l;
        let residual = lap.left_residual(&p);
        if residual > tol {
            return Err(GraphError::EigenvectorResidual { residual, tol });
        }
        Ok(p)
    }

    /// Ascending eigenvalues of the Laplacian of an undirected graph.
    pub fn laplacian_spectrum(&self) -> Result<Vec<f64>, GraphError> {
        if self.directed {
            return Err(GraphError::DirectedInput);
        }
        let n = self.n;
        let lap = self.laplacian();
        let m = nalgebra::DMatrix::from_fn(n, n, |r, c| lap.matrix[r * n + c]);
        let eig = nalgebra::SymmetricEigen::new(m);
        let mut values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(values)
    }
}

impl Laplacian {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major `n x n` matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.n + j]
    }

    /// Row sums evaluated off-diagonal-first, the order under which the
    /// constructed diagonal cancels exactly.
    pub fn row_sums(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut off = 0.0;
                for j in 0..n {
                    if j != i {
                        off += self.matrix[i * n + j];
                    }
                }
                off + self.matrix[i * n + i]
            })
            .collect()
    }

    /// Euclidean norm of `p^T L`.
    pub fn left_residual(&self, p: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for j in 0..n {
            let mut col = 0.0;
            for i in 0..n {
                col += p[i] * self.matrix[i * n + j];
            }
            acc += col * col;
        }
        acc.sqrt()
    }
}

fn transpose(m: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = m[i * n + j];
        }
    }
    out
}
