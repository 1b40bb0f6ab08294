//! Collinear orderings of green components: non-cut-vertex induction,
//! unique point insertion, side partitions, and component concatenation.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::metric::{CollinearSequence, Distance, FiniteMetricSpace, Pair, PointId};
use crate::relations::{classify_in_line, RelationKind};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("subgraph is disconnected")]
    Disconnected,
    #[error("subgraph has no vertices")]
    TooSmall,
    #[error("vertices are not connected by green edges")]
    NotGreenConnected,
    #[error("point {0} is not on the line")]
    NotOnLine(PointId),
    #[error("point {0} already appears on the ordering")]
    AlreadyPresent(PointId),
    #[error("no insertion position for {0} yields a collinear sequence")]
    NoValidPosition(PointId),
    #[error("{count} insertion positions for {point} yield collinear sequences, expected 1")]
    AmbiguousPosition { point: PointId, count: usize },
    #[error("the two component orderings coincide")]
    SameComponent,
    #[error("ordering invariant violated: {0}")]
    InvariantViolation(String),
}

/// Green subgraph over a set of same-line generating pairs.
#[derive(Clone, Debug)]
pub struct GreenSubgraph {
    pub vertices: Vec<Pair>,
    adj: Vec<Vec<usize>>,
}

impl GreenSubgraph {
    /// Builds the green adjacency among `pairs` (all from one K(L)).
    pub fn new<D: Distance>(
        space: &FiniteMetricSpace<D>,
        pairs: &[Pair],
    ) -> Result<Self, OrderingError> {
        let mut vertices: Vec<Pair> = pairs.to_vec();
        vertices.sort();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(OrderingError::TooSmall);
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                let rel = classify_in_line(space, vertices[i], vertices[j])
                    .map_err(|e| OrderingError::InvariantViolation(e.to_string()))?;
                if rel.kind() == RelationKind::Green {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        Ok(GreenSubgraph { vertices, adj })
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_without(None)
    }

    fn connected_without(&self, removed: Option<usize>) -> bool {
        let n = self.vertices.len();
        let alive: Vec<usize> = (0..n).filter(|&i| Some(i) != removed).collect();
        if alive.is_empty() {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![alive[0]];
        seen[alive[0]] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if Some(w) != removed && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        alive.into_iter().all(|i| seen[i])
    }

    fn without(&self, removed: usize) -> GreenSubgraph {
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|&i| i != removed).collect();
        let remap: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        GreenSubgraph {
            vertices: keep.iter().map(|&i| self.vertices[i]).collect(),
            adj: keep
                .iter()
                .map(|&i| {
                    self.adj[i]
                        .iter()
                        .filter(|&&j| j != removed)
                        .map(|&j| remap[&j])
                        .collect()
                })
                .collect(),
        }
    }
}

/// Smallest (canonical order) vertex whose removal keeps the graph connected.
pub fn non_cut_vertex(g: &GreenSubgraph) -> Result<Pair, OrderingError> {
    if g.order() < 2 {
        return Err(OrderingError::TooSmall);
    }
    if !g.is_connected() {
        return Err(OrderingError::Disconnected);
    }
    for i in 0..g.order() {
        if g.connected_without(Some(i)) {
            return Ok(g.vertices[i]);
        }
    }
    Err(OrderingError::InvariantViolation(
        "connected graph with every vertex a cut vertex".into(),
    ))
}

/// Where a point inserts into a collinear ordering: strictly inside (at
/// index `i` of the extended sequence) or off either end.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SidePlacement {
    OutsideLeft,
    Inside(usize),
    OutsideRight,
}

/// All insertion positions of `v` into `seq` that yield a collinear
/// sequence; positions index the extended sequence (0 = prepend).
fn valid_positions<D: Distance>(
    space: &FiniteMetricSpace<D>,
    seq: &[PointId],
    v: PointId,
) -> Vec<usize> {
    let mut out = Vec::new();
    for pos in 0..=seq.len() {
        let mut cand: Vec<PointId> = Vec::with_capacity(seq.len() + 1);
        cand.extend_from_slice(&seq[..pos]);
        cand.push(v);
        cand.extend_from_slice(&seq[pos..]);
        if space.seq_collinear(&cand) {
            out.push(pos);
        }
    }
    out
}

/// Inserts `v` into a collinear ordering, asserting the position is unique.
/// `line` is the line every pair of the ordering generates.
pub fn insert_point<D: Distance>(
    space: &FiniteMetricSpace<D>,
    line: &[PointId],
    seq: &[PointId],
    v: PointId,
) -> Result<SidePlacement, OrderingError> {
    if seq.contains(&v) {
        return Err(OrderingError::AlreadyPresent(v));
    }
    if !line.contains(&v) {
        return Err(OrderingError::NotOnLine(v));
    }
    let positions = valid_positions(space, seq, v);
    match positions.as_slice() {
        [] => Err(OrderingError::NoValidPosition(v)),
        [pos] => Ok(match *pos {
            0 => SidePlacement::OutsideLeft,
            p if p == seq.len() => SidePlacement::OutsideRight,
            p => SidePlacement::Inside(p),
        }),
        _ => Err(OrderingError::AmbiguousPosition {
            point: v,
            count: positions.len(),
        }),
    }
}

/// A component's collinear ordering with pair roles and opening sequence.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentOrdering {
    pub line: Vec<PointId>,
    pub pairs: Vec<Pair>,
    pub sequence: CollinearSequence,
    /// Opening points of the component's pairs, by position.
    pub openings: Vec<PointId>,
    /// For each pair, its (opening, closing) endpoints.
    pub pair_roles: BTreeMap<Pair, (PointId, PointId)>,
}

impl ComponentOrdering {
    pub fn position(&self, p: PointId) -> Option<usize> {
        self.sequence.points().iter().position(|&x| x == p)
    }
}

/// Builds the standard collinear ordering of a green-connected set of pairs
/// by stripping a non-cut vertex, recursing, and inserting its endpoints.
/// Of the two reversals, the one whose first point index is smaller than its
/// last is the standard one.
pub fn order_component<D: Distance>(
    space: &FiniteMetricSpace<D>,
    line: &[PointId],
    pairs: &[Pair],
) -> Result<ComponentOrdering, OrderingError> {
    let g = GreenSubgraph::new(space, pairs)?;
    if !g.is_connected() {
        return Err(OrderingError::NotGreenConnected);
    }
    let mut seq = order_subgraph(space, &g)?;
    if seq.first() > seq.last() {
        seq.reverse();
    }

    let pos: BTreeMap<PointId, usize> = seq.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut pair_roles = BTreeMap::new();
    for &e in &g.vertices {
        let (a, b) = (e.lo(), e.hi());
        if pos[&a] < pos[&b] {
            pair_roles.insert(e, (a, b));
        } else {
            pair_roles.insert(e, (b, a));
        }
    }
    let mut openings: Vec<PointId> = pair_roles.values().map(|&(o, _)| o).collect();
    openings.sort_by_key(|p| pos[p]);
    openings.dedup();
    if openings.len() != g.vertices.len() {
        return Err(OrderingError::InvariantViolation(
            "opening points are not distinct".into(),
        ));
    }
    // Closings appear in opening order, and consecutive openings interleave
    // as a_i, a_{i+1}, b_i, b_{i+1}.
    let closing_of: BTreeMap<PointId, PointId> =
        pair_roles.values().map(|&(o, c)| (o, c)).collect();
    for w in openings.windows(2) {
        let (b0, b1) = (closing_of[&w[0]], closing_of[&w[1]]);
        if pos[&b0] >= pos[&b1] {
            return Err(OrderingError::InvariantViolation(format!(
                "closings of {} and {} out of order",
                w[0], w[1]
            )));
        }
        if g.vertices.len() > 1
            && !(pos[&w[0]] < pos[&w[1]] && pos[&w[1]] < pos[&b0] && pos[&b0] < pos[&b1])
        {
            return Err(OrderingError::InvariantViolation(format!(
                "openings {} and {} do not interleave",
                w[0], w[1]
            )));
        }
    }

    let sequence = CollinearSequence::new(space, seq)
        .map_err(|e| OrderingError::InvariantViolation(e.to_string()))?;
    Ok(ComponentOrdering {
        line: line.to_vec(),
        pairs: g.vertices,
        sequence,
        openings,
        pair_roles,
    })
}

fn order_subgraph<D: Distance>(
    space: &FiniteMetricSpace<D>,
    g: &GreenSubgraph,
) -> Result<Vec<PointId>, OrderingError> {
    if g.order() == 1 {
        let e = g.vertices[0];
        return Ok(vec![e.lo(), e.hi()]);
    }
    let strip = non_cut_vertex(g)?;
    let idx = g.vertices.iter().position(|&v| v == strip).unwrap();
    let mut seq = order_subgraph(space, &g.without(idx))?;
    for p in strip.points() {
        if seq.contains(&p) {
            continue;
        }
        let positions = valid_positions(space, &seq, p);
        match positions.as_slice() {
            [pos] => seq.insert(*pos, p),
            [] => return Err(OrderingError::NoValidPosition(p)),
            _ => {
                return Err(OrderingError::AmbiguousPosition {
                    point: p,
                    count: positions.len(),
                })
            }
        }
    }
    Ok(seq)
}

/// Splits an ordering at the unique index such that `v` is on the right side
/// of every point before it and on the left side of every point after it,
/// per-role for points that open one pair and close another.
pub fn partition_sides<D: Distance>(
    space: &FiniteMetricSpace<D>,
    ordering: &ComponentOrdering,
    v: PointId,
) -> Result<usize, OrderingError> {
    if ordering.sequence.contains(v) {
        return Err(OrderingError::AlreadyPresent(v));
    }
    if !ordering.line.contains(&v) {
        return Err(OrderingError::NotOnLine(v));
    }
    let seq = ordering.sequence.points();
    // side[i]: Some(true) = v left of seq[i] in all roles, Some(false) =
    // right in all roles, None = mixed.
    let mut side: Vec<Option<bool>> = Vec::with_capacity(seq.len());
    for &p in seq {
        let mut verdicts = Vec::new();
        for &(o, c) in ordering.pair_roles.values() {
            if p == o {
                verdicts.push(space.bet(v, o, c));
            }
            if p == c {
                verdicts.push(space.bet(v, o, c) || space.bet(o, v, c));
            }
        }
        if verdicts.iter().all(|&l| l) {
            side.push(Some(true));
        } else if verdicts.iter().all(|&l| !l) {
            side.push(Some(false));
        } else {
            side.push(None);
        }
    }
    for split in 0..=seq.len() {
        let ok = side[..split].iter().all(|&s| s == Some(false))
            && side[split..].iter().all(|&s| s == Some(true));
        if ok {
            return Ok(split);
        }
    }
    Err(OrderingError::InvariantViolation(format!(
        "no side partition for {v}"
    )))
}

/// Whether some orientation choice of the two standard orderings
/// concatenates into a collinear sequence.
pub fn concat_two_components<D: Distance>(
    space: &FiniteMetricSpace<D>,
    c1: &ComponentOrdering,
    c2: &ComponentOrdering,
) -> Result<bool, OrderingError> {
    if c1.pairs == c2.pairs {
        return Err(OrderingError::SameComponent);
    }
    let firsts = [c1.sequence.clone(), c1.sequence.reversed()];
    let seconds = [c2.sequence.clone(), c2.sequence.reversed()];
    for f in &firsts {
        for s in &seconds {
            let mut cand: Vec<PointId> = f.points().to_vec();
            cand.extend_from_slice(s.points());
            let mut dedup = cand.clone();
            dedup.sort();
            dedup.dedup();
            if dedup.len() == cand.len() && space.seq_collinear(&cand) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_catalog;
    use crate::instances::builtin;
    use crate::levels::build_levels;
    use crate::metric::pid;
    use crate::Space;

    fn pair(a: usize, b: usize) -> Pair {
        Pair::new(pid(a), pid(b))
    }

    fn p6_line() -> (Space, Vec<PointId>) {
        let p6 = builtin("P6").unwrap();
        let line: Vec<PointId> = (0..6).map(pid).collect();
        (p6, line)
    }

    #[test]
    fn non_cut_vertex_tie_breaks() {
        let (p6, _) = p6_line();
        // Level-2 pairs of P6 form a green path {0,2}-{1,3}-{2,4}-{3,5}.
        let g = GreenSubgraph::new(&p6, &[pair(0, 2), pair(1, 3), pair(2, 4), pair(3, 5)])
            .unwrap();
        assert_eq!(non_cut_vertex(&g).unwrap(), pair(0, 2));
        let single = GreenSubgraph::new(&p6, &[pair(0, 2), pair(1, 3)]).unwrap();
        assert_eq!(non_cut_vertex(&single).unwrap(), pair(0, 2));
    }

    #[test]
    fn non_cut_vertex_rejects_disconnected() {
        let (p6, _) = p6_line();
        // {0,2} and {3,5} are blue, not green.
        let g = GreenSubgraph::new(&p6, &[pair(0, 2), pair(3, 5)]).unwrap();
        assert_eq!(non_cut_vertex(&g).unwrap_err(), OrderingError::Disconnected);
        let one = GreenSubgraph::new(&p6, &[pair(0, 2)]).unwrap();
        assert_eq!(non_cut_vertex(&one).unwrap_err(), OrderingError::TooSmall);
    }

    #[test]
    fn orders_p6_components() {
        let (p6, line) = p6_line();
        let c = order_component(&p6, &line, &[pair(0, 2), pair(1, 3), pair(2, 4), pair(3, 5)])
            .unwrap();
        assert_eq!(
            c.sequence.points(),
            &[pid(0), pid(1), pid(2), pid(3), pid(4), pid(5)]
        );
        assert_eq!(c.openings, vec![pid(0), pid(1), pid(2), pid(3)]);

        let c = order_component(&p6, &line, &[pair(0, 4), pair(1, 5)]).unwrap();
        assert_eq!(c.sequence.points(), &[pid(0), pid(1), pid(4), pid(5)]);
        assert_eq!(c.openings, vec![pid(0), pid(1)]);
    }

    #[test]
    fn orders_single_pair() {
        let c5 = builtin("C5").unwrap();
        let line = c5.line_of(pid(0), pid(2)).unwrap();
        let c = order_component(&c5, &line, &[pair(0, 2)]).unwrap();
        assert_eq!(c.sequence.points(), &[pid(0), pid(2)]);
    }

    #[test]
    fn insertion_into_p6_component() {
        let (p6, line) = p6_line();
        let seq = [pid(0), pid(1), pid(4), pid(5)];
        assert_eq!(
            insert_point(&p6, &line, &seq, pid(2)).unwrap(),
            SidePlacement::Inside(2)
        );
        assert_eq!(
            insert_point(&p6, &line, &seq, pid(3)).unwrap(),
            SidePlacement::Inside(2)
        );
        assert_eq!(
            insert_point(&p6, &line, &seq, pid(0)).unwrap_err(),
            OrderingError::AlreadyPresent(pid(0))
        );
    }

    #[test]
    fn insertion_outside() {
        let c6 = builtin("C6").unwrap();
        let line = c6.line_of(pid(0), pid(2)).unwrap();
        assert_eq!(
            insert_point(&c6, &line, &[pid(0), pid(2)], pid(5)).unwrap(),
            SidePlacement::OutsideLeft
        );
        assert!(matches!(
            insert_point(&c6, &line, &[pid(0), pid(2)], pid(4)).unwrap_err(),
            OrderingError::NotOnLine(_)
        ));
    }

    #[test]
    fn partition_sides_on_sub_subgraph() {
        let (p6, line) = p6_line();
        let c = order_component(&p6, &line, &[pair(1, 3), pair(2, 4)]).unwrap();
        assert_eq!(c.sequence.points(), &[pid(1), pid(2), pid(3), pid(4)]);
        assert_eq!(partition_sides(&p6, &c, pid(0)).unwrap(), 0);
        assert_eq!(partition_sides(&p6, &c, pid(5)).unwrap(), 4);
    }

    #[test]
    fn concat_components_same_rejected() {
        let (p6, line) = p6_line();
        let c = order_component(&p6, &line, &[pair(1, 3), pair(2, 4)]).unwrap();
        assert_eq!(
            concat_two_components(&p6, &c, &c).unwrap_err(),
            OrderingError::SameComponent
        );
    }

    #[test]
    fn ordering_matches_brute_force_two_orderings() {
        use itertools::Itertools;
        let (p6, line) = p6_line();
        let cat = build_catalog(&p6);
        let key = cat.universal().unwrap().to_vec();
        let members = cat.generators_of(&key).unwrap().to_vec();
        let d = build_levels(&p6, &key, &members).unwrap();
        for gl in d.green_levels() {
            for comp in &gl.components {
                let ordering = order_component(&p6, &line, comp).unwrap();
                let pts: Vec<PointId> = {
                    let mut s: Vec<PointId> =
                        comp.iter().flat_map(|e| e.points()).collect();
                    s.sort();
                    s.dedup();
                    s
                };
                let found: Vec<Vec<PointId>> = pts
                    .iter()
                    .copied()
                    .permutations(pts.len())
                    .filter(|perm| p6.seq_collinear(perm))
                    .collect();
                assert_eq!(found.len(), 2);
                let fwd = ordering.sequence.points().to_vec();
                let rev = ordering.sequence.reversed().points().to_vec();
                assert!(found.contains(&fwd) && found.contains(&rev));
            }
        }
    }
}
