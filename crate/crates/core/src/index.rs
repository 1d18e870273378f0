//! Uniform grid bucket index over rectangles.

use std::collections::HashMap;

use crate::geometry::Rect;

#[derive(Debug, Clone)]
pub struct GridIndex {
    cell: i64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    entries: Vec<(usize, Rect)>,
}

impl GridIndex {
    pub fn new(cell: i64) -> Self {
        assert!(cell > 0, "grid cell size must be positive");
        Self {
            cell,
            buckets: HashMap::new(),
            entries: Vec::new(),
        }
    }

    fn cell_span(&self, lo: i64, hi: i64) -> std::ops::RangeInclusive<i64> {
        lo.div_euclid(self.cell)..=hi.div_euclid(self.cell)
    }

    pub fn insert(&mut self, owner: usize, rect: Rect) {
        let idx = self.entries.len();
        self.entries.push((owner, rect));
        for cx in self.cell_span(rect.lo.x, rect.hi.x) {
            for cy in self.cell_span(rect.lo.y, rect.hi.y) {
                self.buckets.entry((cx, cy)).or_default().push(idx);
            }
        }
    }

    pub fn entry(&self, idx: usize) -> (usize, Rect) {
        self.entries[idx]
    }

    /// Entry indices whose bucket meets `area` grown by `margin`; sorted,
    /// deduplicated, and a superset of the entries within `margin`.
    pub fn query(&self, area: &Rect, margin: i64) -> Vec<usize> {
        let mut hits = Vec::new();
        for cx in self.cell_span(area.lo.x - margin, area.hi.x + margin) {
            for cy in self.cell_span(area.lo.y - margin, area.hi.y + margin) {
                if let Some(bucket) = self.buckets.get(&(cx, cy)) {
                    hits.extend_from_slice(bucket);
                }
            }
        }
        hits.sort_unstable();
        hits.dedup();
        hits
    }

    /// Owners with at least one rectangle whose interior meets `area`.
    pub fn overlapping_owners(&self, area: &Rect) -> Vec<usize> {
        let mut owners: Vec<usize> = self
            .query(area, 0)
            .into_iter()
            .filter(|&i| self.entries[i].1.interiors_overlap(area))
            .map(|i| self.entries[i].0)
            .collect();
        owners.sort_unstable();
        owners.dedup();
        owners
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_neighbors_across_cells() {
        let mut index = GridIndex::new(50);
        index.insert(0, Rect::from_coords(0, 0, 10, 10));
        index.insert(1, Rect::from_coords(120, 0, 130, 10));
        index.insert(2, Rect::from_coords(-40, -40, -30, -30));
        let near: Vec<usize> = index
            .query(&Rect::from_coords(0, 0, 10, 10), 50)
            .into_iter()
            .map(|i| index.entry(i).0)
            .collect();
        assert!(near.contains(&0));
        assert!(near.contains(&2));
        assert!(!near.contains(&1));
    }

    #[test]
    fn overlap_query_is_exact() {
        let mut index = GridIndex::new(10);
        index.insert(7, Rect::from_coords(0, 0, 100, 10));
        assert_eq!(index.overlapping_owners(&Rect::from_coords(50, 5, 60, 20)), vec![7]);
        assert!(index.overlapping_owners(&Rect::from_coords(50, 10, 60, 20)).is_empty());
    }
}
