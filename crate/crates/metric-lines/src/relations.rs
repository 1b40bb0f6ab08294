//! Eight-way classification of two pairs generating the same line.
//!
//! With e1 = {a,b}, e2 = {c,d} and d(e1) >= d(e2), exactly one of the
//! following holds, and the returned labeling witnesses its defining
//! equations:
//!
//!   Equal            e1 = e2
//!   OrderedShared    e2 = {a,c}, [acb]
//!   OrderedDisjoint  [acdb]
//!   BlueShared       e2 = {a,c}, [bac]
//!   BlueDisjoint     [abcd]
//!   Green            [acbd]
//!   Red              d(a,b)=d(c,d)=x, d(a,c)=d(b,d)=y, d(a,d)=d(b,c)=x+y
//!   Purple           d(a,c)=d(b,d)=x, d(a,d)=d(b,c)=y, d(a,b)=d(c,d)=x+y

use serde::Serialize;
use thiserror::Error;

use crate::metric::{Distance, FiniteMetricSpace, Pair, PointId};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("pairs {0} and {1} do not generate the same line")]
    DifferentLines(Pair, Pair),
    #[error("no relation kind matched for {0} and {1} (implementation or input bug)")]
    ClassificationFailure(Pair, Pair),
    #[error("more than one relation kind matched for {0} and {1}: {2:?}")]
    AmbiguousClassification(Pair, Pair, Vec<RelationKind>),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RelationKind {
    Equal,
    OrderedShared,
    OrderedDisjoint,
    BlueShared,
    BlueDisjoint,
    Green,
    Red,
    Purple,
}

/// A classified relation with the role labeling that witnesses it.
/// In shared kinds the roles are (a, b, c) with e1 = {a,b}, e2 = {a,c};
/// in disjoint kinds (a, b, c, d) with e1 = {a,b}, e2 = {c,d}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PairRelation {
    Equal {
        e: Pair,
    },
    OrderedShared {
        a: PointId,
        b: PointId,
        c: PointId,
    },
    OrderedDisjoint {
        a: PointId,
        b: PointId,
        c: PointId,
        d: PointId,
    },
    BlueShared {
        a: PointId,
        b: PointId,
        c: PointId,
    },
    BlueDisjoint {
        a: PointId,
        b: PointId,
        c: PointId,
        d: PointId,
    },
    Green {
        a: PointId,
        b: PointId,
        c: PointId,
        d: PointId,
    },
    Red {
        a: PointId,
        b: PointId,
        c: PointId,
        d: PointId,
    },
    Purple {
        a: PointId,
        b: PointId,
        c: PointId,
        d: PointId,
    },
}

impl PairRelation {
    pub fn kind(&self) -> RelationKind {
        match self {
            PairRelation::Equal { .. } => RelationKind::Equal,
            PairRelation::OrderedShared { .. } => RelationKind::OrderedShared,
            PairRelation::OrderedDisjoint { .. } => RelationKind::OrderedDisjoint,
            PairRelation::BlueShared { .. } => RelationKind::BlueShared,
            PairRelation::BlueDisjoint { .. } => RelationKind::BlueDisjoint,
            PairRelation::Green { .. } => RelationKind::Green,
            PairRelation::Red { .. } => RelationKind::Red,
            PairRelation::Purple { .. } => RelationKind::Purple,
        }
    }

    /// Strictly ordered (the smaller pair nests inside the larger one).
    pub fn is_strictly_ordered(&self) -> bool {
        matches!(
            self,
            PairRelation::OrderedShared { .. } | PairRelation::OrderedDisjoint { .. }
        )
    }
}

impl RelationKind {
    pub fn is_ordered(self) -> bool {
        matches!(
            self,
            RelationKind::Equal | RelationKind::OrderedShared | RelationKind::OrderedDisjoint
        )
    }
}

/// Classifies two generating pairs of the same line. Checks the same-line
/// precondition by recomputing both lines.
pub fn classify<D: Distance>(
    space: &FiniteMetricSpace<D>,
    e1: Pair,
    e2: Pair,
) -> Result<PairRelation, RelationError> {
    let l1 = space.line_of(e1.lo(), e1.hi()).expect("pair points distinct");
    let l2 = space.line_of(e2.lo(), e2.hi()).expect("pair points distinct");
    if l1 != l2 {
        return Err(RelationError::DifferentLines(e1, e2));
    }
    classify_in_line(space, e1, e2)
}

/// Classification without the same-line check; callers must guarantee both
/// pairs come from the same K(L).
pub(crate) fn classify_in_line<D: Distance>(
    space: &FiniteMetricSpace<D>,
    e1: Pair,
    e2: Pair,
) -> Result<PairRelation, RelationError> {
    if e1 == e2 {
        return Ok(PairRelation::Equal { e: e1 });
    }
    // Normalize so d(e1) >= d(e2); on ties keep the canonically smaller pair
    // as e1 for determinism.
    let (e1, e2) = if space.pair_dist(e1) > space.pair_dist(e2)
        || (space.pair_dist(e1) == space.pair_dist(e2) && e1 < e2)
    {
        (e1, e2)
    } else {
        (e2, e1)
    };

    let mut matches: Vec<PairRelation> = Vec::new();

    if let Some(shared) = e1.shared_point(e2) {
        let a = shared;
        let b = e1.other(a);
        let c = e2.other(a);
        if space.bet(a, c, b) {
            matches.push(PairRelation::OrderedShared { a, b, c });
        }
        if space.bet(b, a, c) {
            matches.push(PairRelation::BlueShared { a, b, c });
        }
    } else if !e2.contains(e1.lo()) && !e2.contains(e1.hi()) {
        // Disjoint: scan the four labelings per kind, keeping the
        // lexicographically smallest witness of each.
        let mut ordered: Option<(PointId, PointId, PointId, PointId)> = None;
        let mut blue: Option<(PointId, PointId, PointId, PointId)> = None;
        let mut green: Option<(PointId, PointId, PointId, PointId)> = None;
        let mut red: Option<(PointId, PointId, PointId, PointId)> = None;
        let mut purple: Option<(PointId, PointId, PointId, PointId)> = None;
        for (a, b) in [(e1.lo(), e1.hi()), (e1.hi(), e1.lo())] {
            for (c, d) in [(e2.lo(), e2.hi()), (e2.hi(), e2.lo())] {
                let lab = (a, b, c, d);
                let keep = |slot: &mut Option<_>| match slot {
                    Some(prev) if *prev <= lab => {}
                    _ => *slot = Some(lab),
                };
                if space.seq_collinear(&[a, c, d, b]) {
                    keep(&mut ordered);
                }
                if space.seq_collinear(&[a, b, c, d]) {
                    keep(&mut blue);
                }
                if space.seq_collinear(&[a, c, b, d]) {
                    keep(&mut green);
                }
                if space.dist(a, b) == space.dist(c, d)
                    && space.dist(a, c) == space.dist(b, d)
                    && space.dist(a, d) == space.dist(b, c)
                    && space.dist(a, d) == space.dist(a, b) + space.dist(a, c)
                {
                    keep(&mut red);
                }
                if space.dist(a, c) == space.dist(b, d)
                    && space.dist(a, d) == space.dist(b, c)
                    && space.dist(a, b) == space.dist(c, d)
                    && space.dist(a, b) == space.dist(a, c) + space.dist(a, d)
                {
                    keep(&mut purple);
                }
            }
        }
        if let Some((a, b, c, d)) = ordered {
            matches.push(PairRelation::OrderedDisjoint { a, b, c, d });
        }
        if let Some((a, b, c, d)) = blue {
            matches.push(PairRelation::BlueDisjoint { a, b, c, d });
        }
        if let Some((a, b, c, d)) = green {
            matches.push(PairRelation::Green { a, b, c, d });
        }
        if let Some((a, b, c, d)) = red {
            matches.push(PairRelation::Red { a, b, c, d });
        }
        if let Some((a, b, c, d)) = purple {
            matches.push(PairRelation::Purple { a, b, c, d });
        }
    }

    match matches.len() {
        1 => Ok(matches.pop().unwrap()),
        0 => Err(RelationError::ClassificationFailure(e1, e2)),
        _ => Err(RelationError::AmbiguousClassification(
            e1,
            e2,
            matches.iter().map(PairRelation::kind).collect(),
        )),
    }
}
