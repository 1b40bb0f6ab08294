//! Per-line poset of generating pairs, its level decomposition, purple/red
//! sets, per-level green graphs, and the structural audit.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::metric::{Distance, FiniteMetricSpace, Pair, PointId};
use crate::relations::{classify_in_line, PairRelation, RelationError, RelationKind};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("green components are only defined for levels 2..=h-1; got k={k} with h={h}")]
    LevelOutOfRange { k: usize, h: usize },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// Green graph of one level: isolated vertices and the connected components
/// of size >= 2, both canonically ordered by smallest contained point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenLevel {
    pub k: usize,
    #[serde(rename = "Q")]
    pub isolated: Vec<Pair>,
    pub components: Vec<Vec<Pair>>,
}

/// Full structural decomposition of one line's generating pairs.
#[derive(Clone, Debug)]
pub struct LevelDecomposition {
    pub line: Vec<PointId>,
    pub members: Vec<Pair>,
    pub level_of: BTreeMap<Pair, usize>,
    pub height: usize,
    /// levels[k-1] is the set of pairs with longest-chain length k.
    pub levels: Vec<Vec<Pair>>,
    pub purple: BTreeSet<Pair>,
    pub red: BTreeSet<Pair>,
    green: BTreeMap<usize, GreenLevel>,
    relations: BTreeMap<(Pair, Pair), PairRelation>,
    chain_parent: BTreeMap<Pair, Pair>,
}

impl LevelDecomposition {
    /// Relation between two members (canonical duo order, any argument order).
    pub fn relation(&self, e: Pair, f: Pair) -> Option<&PairRelation> {
        let key = if e <= f { (e, f) } else { (f, e) };
        self.relations.get(&key)
    }

    /// Green components and isolated set of level k, defined for 2 <= k <= h-1.
    pub fn green_components(&self, k: usize) -> Result<&GreenLevel, LevelError> {
        self.green.get(&k).ok_or(LevelError::LevelOutOfRange {
            k,
            h: self.height,
        })
    }

    pub fn green_levels(&self) -> impl Iterator<Item = &GreenLevel> {
        self.green.values()
    }

    /// A maximum chain ending at `e`, from the minimal element up to `e`.
    pub fn max_chain(&self, e: Pair) -> Vec<Pair> {
        let mut chain = vec![e];
        let mut cur = e;
        while let Some(&p) = self.chain_parent.get(&cur) {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    pub fn to_export(&self) -> DecompositionExport {
        DecompositionExport {
            line: self.line.clone(),
            height: self.height,
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(idx, pairs)| LevelExport {
                    k: idx + 1,
                    pairs: pairs.clone(),
                    green: self.green.get(&(idx + 1)).cloned(),
                })
                .collect(),
            purple: self.purple.iter().copied().collect(),
            red: self.red.iter().copied().collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionExport {
    pub line: Vec<PointId>,
    pub height: usize,
    pub levels: Vec<LevelExport>,
    pub purple: Vec<Pair>,
    pub red: Vec<Pair>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelExport {
    pub k: usize,
    pub pairs: Vec<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub green: Option<GreenLevel>,
}

/// Builds the poset of one line's generating pairs: longest-chain levels,
/// purple and red sets, and per-level green components.
pub fn build_levels<D: Distance>(
    space: &FiniteMetricSpace<D>,
    line: &[PointId],
    members: &[Pair],
) -> Result<LevelDecomposition, LevelError> {
    let mut members: Vec<Pair> = members.to_vec();
    members.sort();

    let mut relations = BTreeMap::new();
    let mut purple = BTreeSet::new();
    let mut red = BTreeSet::new();
    for (i, &e) in members.iter().enumerate() {
        for &f in &members[i + 1..] {
            let rel = classify_in_line(space, e, f)?;
            match rel.kind() {
                RelationKind::Purple => {
                    purple.insert(e);
                    purple.insert(f);
                }
                RelationKind::Red => {
                    red.insert(e);
                    red.insert(f);
                }
                _ => {}
            }
            relations.insert((e, f), rel);
        }
    }

    // Longest chain ending at each element, by DP over increasing pair
    // distance (a strict nesting always strictly decreases the distance).
    let mut by_dist = members.clone();
    by_dist.sort_by_key(|&e| (space.pair_dist(e), e));
    let mut level_of: BTreeMap<Pair, usize> = BTreeMap::new();
    let mut chain_parent: BTreeMap<Pair, Pair> = BTreeMap::new();
    for (i, &e) in by_dist.iter().enumerate() {
        let mut best = 1usize;
        let mut parent = None;
        for &f in &by_dist[..i] {
            let key = if f <= e { (f, e) } else { (e, f) };
            if relations[&key].is_strictly_ordered() && space.pair_dist(f) < space.pair_dist(e) {
                let cand = level_of[&f] + 1;
                if cand > best {
                    best = cand;
                    parent = Some(f);
                }
            }
        }
        level_of.insert(e, best);
        if let Some(p) = parent {
            chain_parent.insert(e, p);
        }
    }

    let height = level_of.values().copied().max().unwrap_or(0);
    let mut levels: Vec<Vec<Pair>> = vec![Vec::new(); height];
    for &e in &members {
        levels[level_of[&e] - 1].push(e);
    }

    let mut green = BTreeMap::new();
    if height >= 3 {
        for k in 2..=(height - 1) {
            green.insert(k, green_level(&levels[k - 1], &relations, k));
        }
    }

    Ok(LevelDecomposition {
        line: line.to_vec(),
        members,
        level_of,
        height,
        levels,
        purple,
        red,
        green,
        relations,
        chain_parent,
    })
}

fn green_level(level: &[Pair], relations: &BTreeMap<(Pair, Pair), PairRelation>, k: usize) -> GreenLevel {
    let idx_of: BTreeMap<Pair, usize> = level.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut dsu = Dsu::new(level.len());
    for (i, &e) in level.iter().enumerate() {
        for &f in &level[i + 1..] {
            let key = if e <= f { (e, f) } else { (f, e) };
            if relations[&key].kind() == RelationKind::Green {
                dsu.union(i, idx_of[&f]);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Pair>> = BTreeMap::new();
    for (i, &e) in level.iter().enumerate() {
        groups.entry(dsu.find(i)).or_default().push(e);
    }
    let mut isolated = Vec::new();
    let mut components = Vec::new();
    for (_, mut pairs) in groups {
        pairs.sort();
        if pairs.len() == 1 {
            isolated.push(pairs[0]);
        } else {
            components.push(pairs);
        }
    }
    isolated.sort();
    components.sort_by_key(|c| c[0]);
    GreenLevel {
        k,
        isolated,
        components,
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Which structural claim an audit violation refers to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Claim {
    LevelsAreAntichains,
    LevelsAreComplete,
    InnerPointsPerLevel,
    RedNoInteriorPoint,
    RedIsMinimal,
    PurpleBetweenness,
    PurpleIsTopLevel,
    PurpleMutuallyPurple,
    NonPurpleBelowPurple,
    IsolatedSetBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditViolation {
    pub claim: Claim,
    pub detail: String,
}

/// Re-checks the structural facts about one line's decomposition directly on
/// the instance. Returns the (expected empty) list of violations.
pub fn audit_structure<D: Distance>(
    space: &FiniteMetricSpace<D>,
    decomp: &LevelDecomposition,
) -> Vec<AuditViolation> {
    let mut out = Vec::new();
    let n = space.n();

    // Levels are antichains and completely classified by non-ordered kinds.
    for (idx, level) in decomp.levels.iter().enumerate() {
        let k = idx + 1;
        for (i, &e) in level.iter().enumerate() {
            for &f in &level[i + 1..] {
                match decomp.relation(e, f) {
                    None => out.push(AuditViolation {
                        claim: Claim::LevelsAreComplete,
                        detail: format!("level {k}: no relation recorded for {e}, {f}"),
                    }),
                    Some(rel) if rel.kind().is_ordered() => out.push(AuditViolation {
                        claim: Claim::LevelsAreAntichains,
                        detail: format!("level {k}: {e} and {f} are ordered ({:?})", rel.kind()),
                    }),
                    Some(_) => {}
                }
            }
        }
    }

    // Every level-k element has k-1 inner points, recoverable from a
    // maximum chain below it.
    for (&e, &k) in &decomp.level_of {
        if k < 2 {
            continue;
        }
        match chain_sequence(space, &decomp.max_chain(e)) {
            Some(seq) => {
                if seq.len() < k + 1 {
                    out.push(AuditViolation {
                        claim: Claim::InnerPointsPerLevel,
                        detail: format!(
                            "{e} at level {k}: chain yields only {} points",
                            seq.len()
                        ),
                    });
                }
            }
            None => out.push(AuditViolation {
                claim: Claim::InnerPointsPerLevel,
                detail: format!("{e} at level {k}: chain endpoints not collinear"),
            }),
        }
    }

    // Red elements: no interior point, and minimal in the poset.
    for &e in &decomp.red {
        for v in space.points() {
            if !e.contains(v) && space.bet(e.lo(), v, e.hi()) {
                out.push(AuditViolation {
                    claim: Claim::RedNoInteriorPoint,
                    detail: format!("red {e} has interior point {v}"),
                });
            }
        }
        if decomp.level_of[&e] != 1 {
            out.push(AuditViolation {
                claim: Claim::RedIsMinimal,
                detail: format!("red {e} at level {}", decomp.level_of[&e]),
            });
        }
    }

    // Purple elements: every other point of L is between the endpoints.
    for &e in &decomp.purple {
        for &v in &decomp.line {
            if !e.contains(v) && !space.bet(e.lo(), v, e.hi()) {
                out.push(AuditViolation {
                    claim: Claim::PurpleBetweenness,
                    detail: format!("purple {e} does not contain {v} between its endpoints"),
                });
            }
        }
    }

    // When purple elements exist they are exactly the top level, mutually
    // purple, and above every other element.
    if !decomp.purple.is_empty() {
        let top: BTreeSet<Pair> = decomp.levels[decomp.height - 1].iter().copied().collect();
        if decomp.purple != top {
            out.push(AuditViolation {
                claim: Claim::PurpleIsTopLevel,
                detail: format!("purple {:?} != top level {:?}", decomp.purple, top),
            });
        }
        for &e in &decomp.purple {
            for &f in &decomp.purple {
                if e < f && decomp.relation(e, f).map(|r| r.kind()) != Some(RelationKind::Purple)
                {
                    out.push(AuditViolation {
                        claim: Claim::PurpleMutuallyPurple,
                        detail: format!("purple duo {e}, {f} not purple-related"),
                    });
                }
            }
            for &f in &decomp.members {
                let below = decomp
                    .relation(e, f)
                    .map(|r| r.is_strictly_ordered())
                    .unwrap_or(false)
                    && space.pair_dist(f) < space.pair_dist(e);
                if !decomp.purple.contains(&f) && !below {
                    out.push(AuditViolation {
                        claim: Claim::NonPurpleBelowPurple,
                        detail: format!("non-purple {f} not below purple {e}"),
                    });
                }
            }
        }
    }

    // |Q| <= n/(k-1) for the middle levels.
    for gl in decomp.green_levels() {
        if gl.isolated.len() * (gl.k - 1) > n {
            out.push(AuditViolation {
                claim: Claim::IsolatedSetBound,
                detail: format!(
                    "level {}: |Q| = {} exceeds n/(k-1) with n = {n}",
                    gl.k,
                    gl.isolated.len()
                ),
            });
        }
    }

    out
}

/// Orders the endpoint set of a nested chain of pairs into a collinear
/// sequence from one endpoint of the top pair to the other; None if the
/// collinearity equation fails.
pub fn chain_sequence<D: Distance>(
    space: &FiniteMetricSpace<D>,
    chain: &[Pair],
) -> Option<Vec<PointId>> {
    let top = *chain.last()?;
    let mut points: BTreeSet<PointId> = BTreeSet::new();
    for e in chain {
        points.insert(e.lo());
        points.insert(e.hi());
    }
    let anchor = top.lo();
    let mut seq: Vec<PointId> = points.into_iter().collect();
    seq.sort_by_key(|&x| (space.dist(anchor, x), x));
    if seq.len() >= 2 && space.seq_collinear(&seq) {
        Some(seq)
    } else {
        None
    }
}
