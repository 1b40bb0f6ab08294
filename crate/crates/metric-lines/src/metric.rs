//! Finite metric spaces with exact distances and the betweenness calculus.
//!
//! All distances are exact scalars (integers after ingestion rescaling), so
//! betweenness and collinearity are plain equality tests.

use std::fmt;
use std::hash::Hash;
use std::ops::Add;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scalar type for exact distances. Integer types are the primary instances;
/// any exact ordered additive scalar (e.g. a rational with `Copy`) works.
pub trait Distance:
    Copy + Ord + Eq + Hash + Add<Output = Self> + Zero + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Distance for T where
    T: Copy
        + Ord
        + Eq
        + Hash
        + Add<Output = T>
        + Zero
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Index of a point in a space, dense in `[0, n)`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub u32);

impl PointId {
    pub fn new(index: usize) -> Self {
        PointId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Canonical unordered pair of distinct points, stored with `lo < hi`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Pair {
    lo: PointId,
    hi: PointId,
}

impl Pair {
    /// Panics if `a == b`; pairs of equal points have no meaning here.
    pub fn new(a: PointId, b: PointId) -> Self {
        assert!(a != b, "pair of equal points");
        if a < b {
            Pair { lo: a, hi: b }
        } else {
            Pair { lo: b, hi: a }
        }
    }

    pub fn lo(self) -> PointId {
        self.lo
    }

    pub fn hi(self) -> PointId {
        self.hi
    }

    pub fn points(self) -> [PointId; 2] {
        [self.lo, self.hi]
    }

    pub fn contains(self, p: PointId) -> bool {
        self.lo == p || self.hi == p
    }

    /// The single shared point, if the pairs share exactly one.
    pub fn shared_point(self, other: Pair) -> Option<PointId> {
        if self == other {
            return None;
        }
        self.points().into_iter().find(|&p| other.contains(p))
    }

    /// The point of `self` different from `p`. Panics if `p` is not in the pair.
    pub fn other(self, p: PointId) -> PointId {
        if self.lo == p {
            self.hi
        } else {
            assert!(self.hi == p, "point not in pair");
            self.lo
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("a metric space needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("d({i},{j}) != d({j},{i})")]
    Asymmetric { i: usize, j: usize },
    #[error("d({0},{0}) is nonzero")]
    NonzeroDiagonal(usize),
    #[error("d({i},{j}) = 0 for distinct points")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("points must be pairwise distinct")]
    NonDistinctPoints,
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error("a collinear sequence needs at least 2 points")]
    SequenceTooShort,
    #[error("sequence does not satisfy the collinearity equation")]
    NotCollinear,
}

/// A finite metric space with an exact symmetric distance matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace<D> {
    n: usize,
    dist: Vec<D>,
}

impl<D: Distance> FiniteMetricSpace<D> {
    /// Validates the metric axioms on a raw square matrix.
    pub fn from_matrix(rows: Vec<Vec<D>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if n < 2 {
            return Err(MetricError::TooFewPoints(n));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::NotSquare {
                    row: i,
                    found: row.len(),
                    expected: n,
                });
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for row in &rows {
            dist.extend(row.iter().copied());
        }
        let space = FiniteMetricSpace { n, dist };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<(), MetricError> {
        let n = self.n;
        for i in 0..n {
            if !self.at(i, i).is_zero() {
                return Err(MetricError::NonzeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.at(i, j) != self.at(j, i) {
                    return Err(MetricError::Asymmetric { i, j });
                }
                if self.at(i, j).is_zero() {
                    return Err(MetricError::ZeroOffDiagonal { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if self.at(i, k) > self.at(i, j) + self.at(j, k) {
                        return Err(MetricError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    fn at(&self, i: usize, j: usize) -> D {
        self.dist[i * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.n).map(PointId::new)
    }

    /// All n(n-1)/2 unordered point pairs in canonical order.
    pub fn all_pairs(&self) -> Vec<Pair> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push(Pair::new(PointId::new(i), PointId::new(j)));
            }
        }
        out
    }

    pub fn dist(&self, a: PointId, b: PointId) -> D {
        self.at(a.index(), b.index())
    }

    pub fn pair_dist(&self, e: Pair) -> D {
        self.dist(e.lo(), e.hi())
    }

    pub fn check_point(&self, p: PointId) -> Result<(), MetricError> {
        if p.index() >= self.n {
            Err(MetricError::PointOutOfRange(p.index()))
        } else {
            Ok(())
        }
    }

    /// Betweenness [a x b]: d(a,b) = d(a,x) + d(x,b), points assumed distinct.
    pub(crate) fn bet(&self, a: PointId, x: PointId, b: PointId) -> bool {
        self.dist(a, b) == self.dist(a, x) + self.dist(x, b)
    }

    /// Whether x lies between a and b.
    pub fn between(&self, a: PointId, x: PointId, b: PointId) -> Result<bool, MetricError> {
        for p in [a, x, b] {
            self.check_point(p)?;
        }
        if a == x || x == b || a == b {
            return Err(MetricError::NonDistinctPoints);
        }
        Ok(self.bet(a, x, b))
    }

    /// Whether {a, b, c} is a collinear triple (one of the points lies
    /// between the other two).
    pub fn is_collinear_triple(
        &self,
        a: PointId,
        b: PointId,
        c: PointId,
    ) -> Result<bool, MetricError> {
        for p in [a, b, c] {
            self.check_point(p)?;
        }
        if a == b || b == c || a == c {
            return Err(MetricError::NonDistinctPoints);
        }
        Ok(self.collinear3(a, b, c))
    }

    pub(crate) fn collinear3(&self, a: PointId, b: PointId, c: PointId) -> bool {
        self.bet(a, c, b) || self.bet(c, a, b) || self.bet(a, b, c)
    }

    /// The collinearity equation for a full sequence:
    /// d(first,last) = sum of consecutive distances.
    pub fn check_collinear_sequence(&self, seq: &[PointId]) -> Result<bool, MetricError> {
        if seq.len() < 2 {
            return Err(MetricError::SequenceTooShort);
        }
        for &p in seq {
            self.check_point(p)?;
        }
        let mut sorted: Vec<PointId> = seq.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != seq.len() {
            return Err(MetricError::NonDistinctPoints);
        }
        Ok(self.seq_collinear(seq))
    }

    pub(crate) fn seq_collinear(&self, seq: &[PointId]) -> bool {
        let mut sum = D::zero();
        for w in seq.windows(2) {
            sum = sum + self.dist(w[0], w[1]);
        }
        self.dist(seq[0], seq[seq.len() - 1]) == sum
    }

    /// The line generated by a and b: {a, b} plus all points collinear with
    /// them, as a sorted list.
    pub fn line_of(&self, a: PointId, b: PointId) -> Result<Vec<PointId>, MetricError> {
        self.check_point(a)?;
        self.check_point(b)?;
        if a == b {
            return Err(MetricError::NonDistinctPoints);
        }
        let mut line = Vec::new();
        for x in self.points() {
            if x == a || x == b || self.collinear3(a, b, x) {
                line.push(x);
            }
        }
        Ok(line)
    }
}

/// A sequence of distinct points satisfying the collinearity equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CollinearSequence(Vec<PointId>);

impl CollinearSequence {
    pub fn new<D: Distance>(
        space: &FiniteMetricSpace<D>,
        points: Vec<PointId>,
    ) -> Result<Self, MetricError> {
        if space.check_collinear_sequence(&points)? {
            Ok(CollinearSequence(points))
        } else {
            Err(MetricError::NotCollinear)
        }
    }

    pub fn points(&self) -> &[PointId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0.contains(&p)
    }

    pub fn reversed(&self) -> Self {
        let mut pts = self.0.clone();
        pts.reverse();
        CollinearSequence(pts)
    }
}

pub(crate) fn pid(i: usize) -> PointId {
    PointId::new(i)
}
