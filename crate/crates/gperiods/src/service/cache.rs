//! Least-recently-used orbit cache bounded by a byte budget.

use std::sync::Arc;

use gperiods_core::OrbitTable;
use lru::LruCache;

/// Cache key: the canonical `(n, omega mod n)`. Coloring is applied per
/// request, so `c` and the mode are deliberately absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComputeKey {
    pub n: u64,
    pub omega: u64,
}

#[derive(Debug, Clone)]
pub struct CacheEntry {
    pub table: Arc<OrbitTable>,
    pub created: std::time::Instant,
    pub size_bytes: usize,
}

pub struct OrbitCache {
    entries: LruCache<ComputeKey, CacheEntry>,
    budget: usize,
    bytes: usize,
    evictions: u64,
}

impl OrbitCache {
    pub fn new(budget: usize) -> Self {
        Self {
            entries: LruCache::unbounded(),
            budget,
            bytes: 0,
            evictions: 0,
        }
    }

    /// Looks up and marks as most recently used.
    pub fn get(&mut self, key: &ComputeKey) -> Option<Arc<OrbitTable>> {
        self.entries.get(key).map(|e| e.table.clone())
    }

    /// Inserts, evicting least recently used entries until within budget.
    /// Tables larger than the whole budget are not retained.
    pub fn insert(&mut self, key: ComputeKey, table: Arc<OrbitTable>) {
        let size_bytes = table.size_bytes();
        if size_bytes > self.budget {
            return;
        }
        if let Some(old) = self.entries.pop(&key) {
            self.bytes -= old.size_bytes;
        }
        while self.bytes + size_bytes > self.budget {
            let Some((_, evicted)) = self.entries.pop_lru() else {
                break;
            };
            self.bytes -= evicted.size_bytes;
            self.evictions += 1;
        }
        self.bytes += size_bytes;
        self.entries.put(
            key,
            CacheEntry {
                table,
                created: std::time::Instant::now(),
                size_bytes,
            },
        );
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bytes(&self) -> usize {
        self.bytes
    }

    pub fn evictions(&self) -> u64 {
        self.evictions
    }

    pub fn contains(&self, key: &ComputeKey) -> bool {
        self.entries.contains(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gperiods_core::PeriodParams;

    fn table(n: u64) -> (ComputeKey, Arc<OrbitTable>) {
        let p = PeriodParams::new(n, 1).unwrap();
        (
            ComputeKey { n, omega: 1 },
            Arc::new(OrbitTable::compute(&p)),
        )
    }

    #[test]
    fn evicts_least_recently_used() {
        let (ka, a) = table(100);
        let (kb, b) = table(100 + 1);
        let (kc, c) = table(100 + 2);
        let budget = a.size_bytes() + b.size_bytes() + c.size_bytes() / 2;
        let mut cache = OrbitCache::new(budget);
        cache.insert(ka, a);
        cache.insert(kb, b);
        assert!(cache.get(&ka).is_some()); // a is now most recent
        cache.insert(kc, c);
        assert!(cache.contains(&ka) && cache.contains(&kc));
        assert!(!cache.contains(&kb));
        assert_eq!(cache.evictions(), 1);
        assert!(cache.bytes() <= budget);
    }

    #[test]
    fn oversized_entries_are_skipped() {
        let (k, t) = table(1000);
        let mut cache = OrbitCache::new(16);
        cache.insert(k, t);
        assert!(cache.is_empty());
        assert_eq!(cache.bytes(), 0);
    }
}
