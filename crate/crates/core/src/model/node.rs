use super::queue::ResidentQueue;
use super::{NodeId, Vpn};
use crate::error::{Result, SimError};

/// Residency fractions that start (`high`) and stop (`low`) batched
/// eviction on the executing node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Watermarks {
    pub high: f64,
    pub low: f64,
}

impl Default for Watermarks {
    fn default() -> Self {
        Self { high: 0.95, low: 0.90 }
    }
}

impl Watermarks {
    pub fn validate(&self) -> Result<()> {
        if !(self.low > 0.0 && self.low < self.high && self.high <= 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "watermarks must satisfy 0 < low < high <= 1 (low={}, high={})",
                self.low, self.high
            )));
        }
        Ok(())
    }

    /// Eviction starts once residency reaches this many pages.
    pub fn high_pages(&self, capacity: usize) -> usize {
        (self.high * capacity as f64).ceil() as usize
    }

    /// Eviction stops once residency is at or below this many pages.
    pub fn low_pages(&self, capacity: usize) -> usize {
        (self.low * capacity as f64).floor() as usize
    }
}

#[derive(Debug, Clone)]
pub struct NodeState {
    id: NodeId,
    capacity: usize,
    high_pages: usize,
    low_pages: usize,
    queue: ResidentQueue,
}

impl NodeState {
    pub fn new(id: NodeId, capacity: usize, watermarks: Watermarks, universe: usize) -> Self {
        Self {
            id,
            capacity,
            high_pages: watermarks.high_pages(capacity),
            low_pages: watermarks.low_pages(capacity),
            queue: ResidentQueue::new(universe),
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn residency(&self) -> usize {
        self.queue.len()
    }

    pub fn free(&self) -> usize {
        self.capacity.saturating_sub(self.queue.len())
    }

    pub fn high_pages(&self) -> usize {
        self.high_pages
    }

    pub fn low_pages(&self) -> usize {
        self.low_pages
    }

    pub fn at_high_watermark(&self) -> bool {
        self.queue.len() >= self.high_pages
    }

    pub fn queue(&self) -> &ResidentQueue {
        &self.queue
    }

    pub fn contains(&self, v: Vpn) -> bool {
        self.queue.contains(v)
    }

    /// Records an access: sets the reference bit, leaves queue order alone.
    #[inline]
    pub fn touch(&mut self, v: Vpn) -> Result<()> {
        if self.queue.set_referenced(v, true) {
            Ok(())
        } else {
            Err(SimError::NotResident { vpn: v, node: self.id })
        }
    }

    /// Second-chance selection. A referenced page at the rear has its bit
    /// cleared and is rotated to the front; the first unreferenced rear page
    /// is unlinked and returned.
    pub fn select_victim(&mut self) -> Result<Vpn> {
        Ok(self.select_victim_counted()?.0)
    }

    /// Like [`select_victim`](Self::select_victim), also returning the number
    /// of rear examinations performed.
    pub fn select_victim_counted(&mut self) -> Result<(Vpn, usize)> {
        let mut examined = 0;
        loop {
            let rear = self.queue.rear().ok_or(SimError::NothingToEvict(self.id))?;
            examined += 1;
            if self.queue.is_referenced(rear) == Some(true) {
                self.queue.remove(rear);
                self.queue.push_front(rear, false);
            } else {
                self.queue.remove(rear);
                return Ok((rear, examined));
            }
        }
    }

    /// Admits a page at the front with its reference bit set.
    pub fn admit(&mut self, v: Vpn) -> Result<()> {
        self.insert(v, true)
    }

    /// Admits a page at the front with its reference bit clear. Used for
    /// initial placement, where nothing has been accessed yet.
    pub fn admit_cold(&mut self, v: Vpn) -> Result<()> {
        self.insert(v, false)
    }

    fn insert(&mut self, v: Vpn, referenced: bool) -> Result<()> {
        if v.index() >= self.queue.universe() {
            return Err(SimError::InvalidAddress(v));
        }
        if self.queue.len() >= self.capacity {
            return Err(SimError::OverCapacity(self.id));
        }
        if !self.queue.push_front(v, referenced) {
            return Err(SimError::DuplicatePage(v));
        }
        Ok(())
    }

    /// Inserts without the capacity check. Only initial placement uses this,
    /// to stage the whole footprint on the home node before balancing.
    pub(crate) fn stage_cold(&mut self, v: Vpn) -> Result<()> {
        if !self.queue.push_front(v, false) {
            return Err(SimError::DuplicatePage(v));
        }
        Ok(())
    }

    /// Unlinks an arbitrary resident page (the source side of a transfer).
    pub fn remove(&mut self, v: Vpn) -> Result<()> {
        self.queue
            .remove(v)
            .map(|_| ())
            .ok_or(SimError::NotResident { vpn: v, node: self.id })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(cap: usize, universe: usize) -> NodeState {
        NodeState::new(NodeId(0), cap, Watermarks::default(), universe)
    }

    fn front_to_rear(n: &NodeState) -> Vec<(u32, bool)> {
        n.queue().iter().map(|(v, r)| (v.0, r)).collect()
    }

    /// Builds a queue whose front-to-rear order is `pages`, all unreferenced.
    fn cold_queue(pages: &[u32]) -> NodeState {
        let mut n = node(16, 16);
        for &p in pages.iter().rev() {
            n.admit_cold(Vpn(p)).unwrap();
        }
        n
    }

    #[test]
    fn watermark_pages_round_outward() {
        let w = Watermarks::default();
        assert_eq!(w.high_pages(8), 8);
        assert_eq!(w.low_pages(8), 7);
        assert_eq!(w.high_pages(2), 2);
        assert_eq!(w.low_pages(2), 1);
        assert_eq!(w.high_pages(4096), 3892);
        assert_eq!(w.low_pages(4096), 3686);
    }

    #[test]
    fn watermark_validation() {
        assert!(Watermarks { high: 0.9, low: 0.9 }.validate().is_err());
        assert!(Watermarks { high: 1.1, low: 0.5 }.validate().is_err());
        assert!(Watermarks { high: 0.5, low: 0.0 }.validate().is_err());
        assert!(Watermarks { high: 1.0, low: 0.5 }.validate().is_ok());
    }

    #[test]
    fn touch_is_idempotent() {
        let mut n = cold_queue(&[1, 2]);
        n.touch(Vpn(1)).unwrap();
        n.touch(Vpn(1)).unwrap();
        assert_eq!(front_to_rear(&n), vec![(1, true), (2, false)]);
    }

    #[test]
    fn touch_of_absent_page_is_an_error() {
        let mut n = cold_queue(&[1]);
        assert_eq!(n.touch(Vpn(3)), Err(SimError::NotResident { vpn: Vpn(3), node: NodeId(0) }));
    }

    #[test]
    fn touched_page_survives_two_page_eviction() {
        // queue [a, b] (front a), touch(a): victim is b.
        let mut n = cold_queue(&[0, 1]);
        n.touch(Vpn(0)).unwrap();
        assert_eq!(n.select_victim().unwrap(), Vpn(1));
        // queue [a, b], touch(b) at the rear: b rotates, a goes.
        let mut n = cold_queue(&[0, 1]);
        n.touch(Vpn(1)).unwrap();
        assert_eq!(n.select_victim().unwrap(), Vpn(0));
        assert_eq!(front_to_rear(&n), vec![(1, false)]);
    }

    #[test]
    fn plain_lru_without_reference_bits() {
        let mut n = cold_queue(&[10, 11, 12]);
        assert_eq!(n.select_victim_counted().unwrap(), (Vpn(12), 1));
    }

    #[test]
    fn referenced_rear_gets_second_chance() {
        // [a, b, c] with c referenced: c is cleared and rotated, b is the victim.
        let mut n = cold_queue(&[10, 11, 12]);
        n.touch(Vpn(12)).unwrap();
        assert_eq!(n.select_victim_counted().unwrap(), (Vpn(11), 2));
        assert_eq!(front_to_rear(&n), vec![(12, false), (10, false)]);
    }

    #[test]
    fn all_referenced_clears_every_bit_then_evicts_rear() {
        let pages = [3, 4, 5, 6, 7];
        let mut n = cold_queue(&pages);
        for p in pages {
            n.touch(Vpn(p)).unwrap();
        }
        let (victim, examined) = n.select_victim_counted().unwrap();
        assert_eq!(victim, Vpn(7));
        assert_eq!(examined, pages.len() + 1);
        assert!(examined <= 2 * pages.len());
        assert!(front_to_rear(&n).iter().all(|(_, r)| !r));
        assert_eq!(front_to_rear(&n), vec![(3, false), (4, false), (5, false), (6, false)]);
    }

    #[test]
    fn empty_node_has_nothing_to_evict() {
        let mut n = node(4, 4);
        assert_eq!(n.select_victim(), Err(SimError::NothingToEvict(NodeId(0))));
    }

    #[test]
    fn admit_boundaries() {
        let mut n = node(3, 8);
        n.admit(Vpn(0)).unwrap();
        assert_eq!(n.residency(), 1);
        n.admit(Vpn(1)).unwrap();
        // capacity - 1 resident: one more fits exactly
        n.admit(Vpn(2)).unwrap();
        assert_eq!(n.free(), 0);
        assert_eq!(n.admit(Vpn(3)), Err(SimError::OverCapacity(NodeId(0))));
        assert_eq!(n.queue().front(), Some(Vpn(2)));
        assert_eq!(n.queue().is_referenced(Vpn(2)), Some(true));
    }

    #[test]
    fn duplicate_admit_is_refused() {
        let mut n = node(3, 8);
        n.admit(Vpn(5)).unwrap();
        assert_eq!(n.admit(Vpn(5)), Err(SimError::DuplicatePage(Vpn(5))));
    }
}
