use alloc::collections::BTreeSet;
use core::ops::Bound;
use core::str::FromStr;

use super::{Alignment, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    Intersection,
    Union,
    #[default]
    GrowDiagFinal,
}

impl Heuristic {
    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Intersection => "intersection",
            Heuristic::Union => "union",
            Heuristic::GrowDiagFinal => "grow-diag-final",
        }
    }
}

impl FromStr for Heuristic {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "intersection" => Ok(Heuristic::Intersection),
            "union" => Ok(Heuristic::Union),
            "grow-diag-final" => Ok(Heuristic::GrowDiagFinal),
            _ => Err(()),
        }
    }
}

// Moses neighbor order: horizontal/vertical first, then diagonals.
const NEIGHBORS: [(isize, isize); 8] = [(-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)];

struct Grid {
    links: BTreeSet<(usize, usize)>,
    src_aligned: BTreeSet<usize>,
    tgt_aligned: BTreeSet<usize>,
}

impl Grid {
    fn new(links: BTreeSet<(usize, usize)>) -> Self {
        let src_aligned = links.iter().map(|l| l.0).collect();
        let tgt_aligned = links.iter().map(|l| l.1).collect();
        Grid {
            links,
            src_aligned,
            tgt_aligned,
        }
    }

    fn touches_unaligned(&self, (s, t): (usize, usize)) -> bool {
        !self.src_aligned.contains(&s) || !self.tgt_aligned.contains(&t)
    }

    fn add(&mut self, link: (usize, usize)) {
        self.links.insert(link);
        self.src_aligned.insert(link.0);
        self.tgt_aligned.insert(link.1);
    }
}

/// Combines a forward and a backward alignment (both in (src, tgt)
/// orientation).
///
/// `GrowDiagFinal` starts from the intersection and scans its links in
/// ascending order, adding any union link in the 8-neighborhood of a current
/// link that has an unaligned endpoint. Links added during a scan are visited
/// by the same scan when they sort later. Scans repeat until nothing changes.
/// A final pass adds every remaining union link with an unaligned endpoint.
pub fn symmetrize(forward: &Alignment, backward: &Alignment, heuristic: Heuristic) -> Alignment {
    let union: BTreeSet<(usize, usize)> = forward.links.union(&backward.links).copied().collect();
    let intersection: BTreeSet<(usize, usize)> = forward.links.intersection(&backward.links).copied().collect();
    let links = match heuristic {
        Heuristic::Intersection => intersection,
        Heuristic::Union => union,
        Heuristic::GrowDiagFinal => {
            let mut grid = Grid::new(intersection);
            loop {
                let mut added = false;
                let mut cursor: Option<(usize, usize)> = None;
                loop {
                    let lower = match cursor {
                        Some(c) => Bound::Excluded(c),
                        None => Bound::Unbounded,
                    };
                    let Some(&(s, t)) = grid.links.range((lower, Bound::Unbounded)).next() else {
                        break;
                    };
                    cursor = Some((s, t));
                    for (ds, dt) in NEIGHBORS {
                        let (Some(ns), Some(nt)) = (s.checked_add_signed(ds), t.checked_add_signed(dt)) else {
                            continue;
                        };
                        let candidate = (ns, nt);
                        if !grid.links.contains(&candidate)
                            && union.contains(&candidate)
                            && grid.touches_unaligned(candidate)
                        {
                            grid.add(candidate);
                            added = true;
                        }
                    }
                }
                if !added {
                    break;
                }
            }
            for &link in &union {
                if !grid.links.contains(&link) && grid.touches_unaligned(link) {
                    grid.add(link);
                }
            }
            grid.links
        }
    };
    Alignment {
        links,
        direction: Direction::Symmetrized,
    }
}
