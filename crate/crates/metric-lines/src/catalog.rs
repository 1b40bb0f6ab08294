//! Enumeration of all distinct lines and the partition of point pairs into
//! generating classes K(L).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::metric::{Distance, FiniteMetricSpace, Pair, PointId};

/// All distinct lines of a space, keyed by their canonical (sorted) point
/// set, each with the list of pairs generating it. The K(L) lists partition
/// the n(n-1)/2 pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineCatalog {
    n: usize,
    entries: BTreeMap<Vec<PointId>, Vec<Pair>>,
    universal: Option<Vec<PointId>>,
}

impl LineCatalog {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct lines, `m`.
    pub fn line_count(&self) -> usize {
        self.entries.len()
    }

    pub fn universal(&self) -> Option<&[PointId]> {
        self.universal.as_deref()
    }

    /// Lines in lexicographic key order with their generating pairs.
    pub fn entries(&self) -> impl Iterator<Item = (&[PointId], &[Pair])> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v.as_slice()))
    }

    pub fn generators_of(&self, line: &[PointId]) -> Option<&[Pair]> {
        self.entries.get(line).map(|v| v.as_slice())
    }

    pub fn lines(&self) -> impl Iterator<Item = &[PointId]> {
        self.entries.keys().map(|k| k.as_slice())
    }

    pub fn to_export(&self) -> CatalogExport {
        CatalogExport {
            n: self.n,
            line_count: self.line_count(),
            universal: self.universal.clone(),
            lines: self
                .entries
                .iter()
                .map(|(line, gens)| CatalogLine {
                    line: line.clone(),
                    generators: gens.iter().map(|e| [e.lo(), e.hi()]).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogExport {
    pub n: usize,
    pub line_count: usize,
    pub universal: Option<Vec<PointId>>,
    pub lines: Vec<CatalogLine>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogLine {
    pub line: Vec<PointId>,
    pub generators: Vec<[PointId; 2]>,
}

/// Computes the line of every pair and groups pairs by the line they
/// generate.
pub fn build_catalog<D: Distance>(space: &FiniteMetricSpace<D>) -> LineCatalog {
    let mut entries: BTreeMap<Vec<PointId>, Vec<Pair>> = BTreeMap::new();
    for e in space.all_pairs() {
        let line = space.line_of(e.lo(), e.hi()).expect("distinct by construction");
        entries.entry(line).or_default().push(e);
    }
    let universal = entries
        .keys()
        .find(|line| line.len() == space.n())
        .cloned();
    LineCatalog {
        n: space.n(),
        entries,
        universal,
    }
}

/// Some pair generating a universal line, if one exists.
pub fn has_universal_line<D: Distance>(space: &FiniteMetricSpace<D>) -> Option<Pair> {
    space.all_pairs().into_iter().find(|e| {
        space
            .line_of(e.lo(), e.hi())
            .map(|l| l.len() == space.n())
            .unwrap_or(false)
    })
}

/// Outcome of the universal-line-or-many-lines check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureCheck {
    pub n: usize,
    pub universal: bool,
    pub line_count: usize,
    pub holds: bool,
}

/// Checks that the space has a universal line or at least n distinct lines.
pub fn check_chen_chvatal<D: Distance>(space: &FiniteMetricSpace<D>) -> ConjectureCheck {
    let catalog = build_catalog(space);
    let universal = catalog.universal().is_some();
    let line_count = catalog.line_count();
    ConjectureCheck {
        n: space.n(),
        universal,
        line_count,
        holds: universal || line_count >= space.n(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;
    use crate::metric::pid;

    #[test]
    fn k5_catalog_all_pairs_distinct() {
        let k5 = builtin("K5").unwrap();
        let cat = build_catalog(&k5);
        assert_eq!(cat.line_count(), 10);
        assert!(cat.universal().is_none());
        for (line, gens) in cat.entries() {
            assert_eq!(line.len(), 2);
            assert_eq!(gens.len(), 1);
        }
    }

    #[test]
    fn c5_catalog() {
        let c5 = builtin("C5").unwrap();
        let cat = build_catalog(&c5);
        assert_eq!(cat.line_count(), 10);
        assert!(cat.universal().is_none());
        let total: usize = cat.entries().map(|(_, g)| g.len()).sum();
        assert_eq!(total, 10);
    }

    #[test]
    fn c4_catalog_single_universal() {
        let c4 = builtin("C4").unwrap();
        let cat = build_catalog(&c4);
        assert_eq!(cat.line_count(), 1);
        let (line, gens) = cat.entries().next().unwrap();
        assert_eq!(line, &[pid(0), pid(1), pid(2), pid(3)]);
        assert_eq!(gens.len(), 6);
        assert_eq!(cat.universal(), Some(&[pid(0), pid(1), pid(2), pid(3)][..]));
    }

    #[test]
    fn universal_line_detection() {
        assert!(has_universal_line(&builtin("P4").unwrap()).is_some());
        assert!(has_universal_line(&builtin("C5").unwrap()).is_none());
        assert!(has_universal_line(&builtin("K3").unwrap()).is_none());
    }

    #[test]
    fn conjecture_check_examples() {
        let c5 = check_chen_chvatal(&builtin("C5").unwrap());
        assert_eq!((c5.universal, c5.line_count, c5.holds), (false, 10, true));
        let p6 = check_chen_chvatal(&builtin("P6").unwrap());
        assert_eq!((p6.universal, p6.line_count, p6.holds), (true, 1, true));
        let k5 = check_chen_chvatal(&builtin("K5").unwrap());
        assert_eq!((k5.universal, k5.line_count, k5.holds), (false, 10, true));
    }

    #[test]
    fn generator_classes_round_trip() {
        let c6 = builtin("C6").unwrap();
        let cat = build_catalog(&c6);
        for (line, gens) in cat.entries() {
            for e in gens {
                assert_eq!(c6.line_of(e.lo(), e.hi()).unwrap(), line);
            }
        }
        let total: usize = cat.entries().map(|(_, g)| g.len()).sum();
        assert_eq!(total, 15);
    }
}
