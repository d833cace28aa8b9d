//! Static MBR hierarchy, bulk loaded with sort-tile-recursive packing.

use super::geo::PlanarPoint;
use super::ann::AnnEntry;

pub const DEFAULT_FANOUT: usize = 16;

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: PlanarPoint,
    pub max: PlanarPoint,
}

impl Rect {
    pub fn point(p: PlanarPoint) -> Self {
        Self { min: p, max: p }
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            min: PlanarPoint::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: PlanarPoint::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn contains_point(&self, p: &PlanarPoint) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    pub fn contains_rect(&self, r: &Rect) -> bool {
        self.contains_point(&r.min) && self.contains_point(&r.max)
    }

    fn center(&self) -> PlanarPoint {
        PlanarPoint::new((self.min.x + self.max.x) / 2.0, (self.min.y + self.max.y) / 2.0)
    }

    fn bounding<'a, I: IntoIterator<Item = &'a Rect>>(rects: I) -> Option<Rect> {
        rects.into_iter().fold(None, |acc: Option<Rect>, r| Some(acc.map_or(*r, |a| a.union(r))))
    }
}

/// Distance from `p` to the closest point of `r`; zero inside.
pub fn mindist(r: &Rect, p: &PlanarPoint) -> f64 {
    let dx = (r.min.x - p.x).max(0.0).max(p.x - r.max.x);
    let dy = (r.min.y - p.y).max(0.0).max(p.y - r.max.y);
    dx.hypot(dy)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf { mbr: Rect, entries: Vec<AnnEntry> },
    Inner { mbr: Rect, children: Vec<Node> },
}

impl Node {
    pub fn mbr(&self) -> &Rect {
        match self {
            Node::Leaf { mbr, .. } | Node::Inner { mbr, .. } => mbr,
        }
    }

    /// Every entry stored below this node.
    pub fn collect_entries<'a>(&'a self, out: &mut Vec<&'a AnnEntry>) {
        match self {
            Node::Leaf { entries, .. } => out.extend(entries.iter()),
            Node::Inner { children, .. } => children.iter().for_each(|c| c.collect_entries(out)),
        }
    }

    fn check(&self, fanout: usize) -> bool {
        match self {
            Node::Leaf { mbr, entries } => {
                !entries.is_empty()
                    && entries.len() <= fanout
                    && entries.iter().all(|e| mbr.contains_point(&e.point))
            }
            Node::Inner { mbr, children } => {
                !children.is_empty()
                    && children.len() <= fanout
                    && children.iter().all(|c| mbr.contains_rect(c.mbr()) && c.check(fanout))
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Inner { children, .. } => 1 + children.iter().map(Node::depth).max().unwrap_or(0),
        }
    }
}

/// Immutable spatial index over the POIs of one topic.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialIndex {
    root: Option<Node>,
    len: usize,
    fanout: usize,
}

impl SpatialIndex {
    pub fn build(entries: Vec<AnnEntry>) -> Self {
        Self::with_fanout(entries, DEFAULT_FANOUT)
    }

    pub fn with_fanout(entries: Vec<AnnEntry>, fanout: usize) -> Self {
        assert!(fanout >= 2, "fan-out must be at least 2");
        let len = entries.len();
        if entries.is_empty() {
            return Self { root: None, len, fanout };
        }
        let leaves: Vec<Node> = str_pack(entries, fanout, |e| e.point)
            .into_iter()
            .map(|entries| {
                let mbr = entries
                    .iter()
                    .map(|e| Rect::point(e.point))
                    .reduce(|a, b| a.union(&b))
                    .expect("non-empty tile");
                Node::Leaf { mbr, entries }
            })
            .collect();
        let mut level = leaves;
        while level.len() > 1 {
            level = str_pack(level, fanout, |n| n.mbr().center())
                .into_iter()
                .map(|children| {
                    let mbr = Rect::bounding(children.iter().map(Node::mbr)).expect("non-empty tile");
                    Node::Inner { mbr, children }
                })
                .collect();
        }
        Self { root: level.pop(), len, fanout }
    }

    pub fn root(&self) -> Option<&Node> {
        self.root.as_ref()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    pub fn depth(&self) -> usize {
        self.root.as_ref().map_or(0, Node::depth)
    }

    /// All entries in storage order.
    pub fn entries(&self) -> Vec<&AnnEntry> {
        let mut out = Vec::with_capacity(self.len);
        if let Some(r) = &self.root {
            r.collect_entries(&mut out);
        }
        out
    }

    /// Containment and fan-out invariants over the whole tree.
    pub fn check_invariants(&self) -> bool {
        match &self.root {
            None => self.len == 0,
            Some(r) => r.check(self.fanout) && self.entries().len() == self.len,
        }
    }
}

/// Sort-tile-recursive grouping of items into runs of at most `fanout`.
fn str_pack<T>(mut items: Vec<T>, fanout: usize, key: impl Fn(&T) -> PlanarPoint) -> Vec<Vec<T>> {
    let n = items.len();
    let pages = n.div_ceil(fanout);
    let slices = (pages as f64).sqrt().ceil() as usize;
    let slice_len = slices * fanout;
    items.sort_by(|a, b| key(a).x.total_cmp(&key(b).x).then(key(a).y.total_cmp(&key(b).y)));
    let mut out = Vec::with_capacity(pages);
    let mut rest = items;
    while !rest.is_empty() {
        let tail = rest.split_off(slice_len.min(rest.len()));
        let mut slice = rest;
        rest = tail;
        slice.sort_by(|a, b| key(a).y.total_cmp(&key(b).y).then(key(a).x.total_cmp(&key(b).x)));
        while !slice.is_empty() {
            let tail = slice.split_off(fanout.min(slice.len()));
            out.push(slice);
            slice = tail;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{PoiId, TopicId};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn entry(id: u64, x: f64, y: f64) -> AnnEntry {
        AnnEntry { poi: PoiId(id), point: PlanarPoint::new(x, y), topic: TopicId(0) }
    }

    #[test]
    fn mindist_cases() {
        let r = Rect { min: PlanarPoint::new(0.0, 0.0), max: PlanarPoint::new(10.0, 5.0) };
        assert_eq!(mindist(&r, &PlanarPoint::new(3.0, 3.0)), 0.0);
        assert_eq!(mindist(&r, &PlanarPoint::new(-4.0, 2.0)), 4.0);
        assert_eq!(mindist(&r, &PlanarPoint::new(13.0, 9.0)), 5.0);
    }

    #[test]
    fn single_entry_is_single_leaf() {
        let idx = SpatialIndex::build(vec![entry(1, 2.0, 3.0)]);
        assert_eq!(idx.depth(), 1);
        assert!(matches!(idx.root(), Some(Node::Leaf { entries, .. }) if entries.len() == 1));
        assert!(idx.check_invariants());
    }

    #[test]
    fn empty_index() {
        let idx = SpatialIndex::build(vec![]);
        assert!(idx.is_empty());
        assert!(idx.root().is_none());
        assert!(idx.check_invariants());
    }

    #[test]
    fn thousand_entries_all_findable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let entries: Vec<AnnEntry> = (0..1000)
            .map(|i| entry(i, rng.gen_range(0.0..5000.0), rng.gen_range(0.0..5000.0)))
            .collect();
        let idx = SpatialIndex::build(entries.clone());
        assert!(idx.check_invariants());
        assert_eq!(idx.len(), 1000);
        let mut found: Vec<u64> = idx.entries().iter().map(|e| e.poi.0).collect();
        found.sort_unstable();
        assert_eq!(found, (0..1000).collect::<Vec<_>>());
        assert!(idx.depth() >= 3);
    }
}
