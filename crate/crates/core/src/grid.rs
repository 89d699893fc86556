//! Uniform-grid spatial index over planar points.
//!
//! Points are bucketed into square cells, and the occupied cells are kept
//! sorted, so lookups are binary searches and no hashing is needed. Radius
//! queries touch `(2 ceil(r / cell) + 1)^2` cells; nearest-neighbour queries
//! expand rings of cells until no closer point can exist.

use alloc::vec::Vec;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct PointGrid {
    cell: f64,
    points: Vec<Complex64>,
    /// Occupied cells, sorted.
    keys: Vec<(i64, i64)>,
    /// `starts[i]..starts[i + 1]` indexes `order` for cell `keys[i]`.
    starts: Vec<u32>,
    order: Vec<u32>,
    min_key: (i64, i64),
    max_key: (i64, i64),
}

impl PointGrid {
    /// Builds the index. `cell` must be positive and finite.
    pub fn new(points: Vec<Complex64>, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        assert!(points.len() < u32::MAX as usize);
        let mut tagged: Vec<((i64, i64), u32)> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (Self::key_for(cell, p), i as u32))
            .collect();
        tagged.sort_unstable();
        let mut keys = Vec::new();
        let mut starts = Vec::new();
        let mut order = Vec::with_capacity(tagged.len());
        for (i, (key, idx)) in tagged.iter().enumerate() {
            if keys.last() != Some(key) {
                keys.push(*key);
                starts.push(i as u32);
            }
            order.push(*idx);
        }
        starts.push(order.len() as u32);
        let (mut min_key, mut max_key) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
        for &(x, y) in &keys {
            min_key = (min_key.0.min(x), min_key.1.min(y));
            max_key = (max_key.0.max(x), max_key.1.max(y));
        }
        Self {
            cell,
            points,
            keys,
            starts,
            order,
            min_key,
            max_key,
        }
    }

    #[inline]
    fn key_for(cell: f64, p: Complex64) -> (i64, i64) {
        (
            libm::floor(p.re / cell) as i64,
            libm::floor(p.im / cell) as i64,
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    fn bucket(&self, key: (i64, i64)) -> &[u32] {
        match self.keys.binary_search(&key) {
            Ok(i) => &self.order[self.starts[i] as usize..self.starts[i + 1] as usize],
            Err(_) => &[],
        }
    }

    /// Calls `visit(index, distance)` for every point within `radius` of `q`.
    pub fn for_each_within(&self, q: Complex64, radius: f64, mut visit: impl FnMut(usize, f64)) {
        if self.is_empty() {
            return;
        }
        let (cx, cy) = Self::key_for(self.cell, q);
        let reach = libm::ceil(radius / self.cell) as i64;
        let x0 = (cx - reach).max(self.min_key.0);
        let x1 = (cx + reach).min(self.max_key.0);
        let y0 = (cy - reach).max(self.min_key.1);
        let y1 = (cy + reach).min(self.max_key.1);
        for x in x0..=x1 {
            for y in y0..=y1 {
                for &i in self.bucket((x, y)) {
                    let dist = (self.points[i as usize] - q).norm();
                    if dist <= radius {
                        visit(i as usize, dist);
                    }
                }
            }
        }
    }

    pub fn any_within(&self, q: Complex64, radius: f64) -> bool {
        let mut hit = false;
        self.for_each_within(q, radius, |_, _| hit = true);
        hit
    }

    pub fn count_within(&self, q: Complex64, radius: f64) -> usize {
        let mut n = 0;
        self.for_each_within(q, radius, |_, _| n += 1);
        n
    }

    /// Nearest indexed point to `q` as `(index, distance)`; ties go to the
    /// smallest index.
    pub fn nearest(&self, q: Complex64) -> Option<(usize, f64)> {
        if self.is_empty() {
            return None;
        }
        let (cx, cy) = Self::key_for(self.cell, q);
        // rings beyond this cannot contain points
        let max_ring = [
            cx - self.min_key.0,
            self.max_key.0 - cx,
            cy - self.min_key.1,
            self.max_key.1 - cy,
        ]
        .into_iter()
        .max()
        .unwrap()
        .max(0);
        let mut best: Option<(usize, f64)> = None;
        let consider = |best: &mut Option<(usize, f64)>, bucket: &[u32]| {
            for &i in bucket {
                let dist = (self.points[i as usize] - q).norm();
                let better = match *best {
                    None => true,
                    Some((bi, bd)) => dist < bd || (dist == bd && (i as usize) < bi),
                };
                if better {
                    *best = Some((i as usize, dist));
                }
            }
        };
        for ring in 0..=max_ring {
            if let Some((_, bd)) = best {
                // every point in ring `ring` is at least (ring - 1) cells away
                if bd < (ring - 1) as f64 * self.cell {
                    break;
                }
            }
            if ring == 0 {
                consider(&mut best, self.bucket((cx, cy)));
                continue;
            }
            for x in (cx - ring)..=(cx + ring) {
                if x < self.min_key.0 || x > self.max_key.0 {
                    continue;
                }
                let edge = x == cx - ring || x == cx + ring;
                if edge {
                    for y in (cy - ring).max(self.min_key.1)..=(cy + ring).min(self.max_key.1) {
                        consider(&mut best, self.bucket((x, y)));
                    }
                } else {
                    for y in [cy - ring, cy + ring] {
                        if y >= self.min_key.1 && y <= self.max_key.1 {
                            consider(&mut best, self.bucket((x, y)));
                        }
                    }
                }
            }
        }
        best
    }
}
