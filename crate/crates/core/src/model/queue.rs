//! Intrusive resident-page queue.
//!
//! Links live in arrays indexed by page number so that removal of an
//! arbitrary page (a pull from this node) is O(1). The front holds the
//! most recently admitted page, the rear is where eviction looks first.

use super::Vpn;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Link {
    /// Neighbour towards the front.
    prev: u32,
    /// Neighbour towards the rear.
    next: u32,
}

#[derive(Debug, Clone)]
pub struct ResidentQueue {
    links: Vec<Link>,
    member: Vec<bool>,
    referenced: Vec<bool>,
    front: u32,
    rear: u32,
    len: usize,
}

impl ResidentQueue {
    /// Queue able to hold any page in `0..universe`.
    pub fn new(universe: usize) -> Self {
        assert!(universe < NIL as usize, "footprint too large for 32-bit page numbers");
        Self {
            links: vec![Link { prev: NIL, next: NIL }; universe],
            member: vec![false; universe],
            referenced: vec![false; universe],
            front: NIL,
            rear: NIL,
            len: 0,
        }
    }

    pub fn universe(&self) -> usize {
        self.member.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: Vpn) -> bool {
        self.member.get(v.index()).copied().unwrap_or(false)
    }

    pub fn is_referenced(&self, v: Vpn) -> Option<bool> {
        self.contains(v).then(|| self.referenced[v.index()])
    }

    /// Sets or clears the reference bit of a member page. Returns false if
    /// the page is not a member.
    #[inline]
    pub fn set_referenced(&mut self, v: Vpn, bit: bool) -> bool {
        if !self.contains(v) {
            return false;
        }
        self.referenced[v.index()] = bit;
        true
    }

    /// Inserts a non-member page at the front. Returns false if it was
    /// already a member (the queue is left unchanged).
    pub fn push_front(&mut self, v: Vpn, referenced: bool) -> bool {
        if self.contains(v) {
            return false;
        }
        let i = v.0;
        self.links[i as usize] = Link { prev: NIL, next: self.front };
        if self.front != NIL {
            self.links[self.front as usize].prev = i;
        } else {
            self.rear = i;
        }
        self.front = i;
        self.member[i as usize] = true;
        self.referenced[i as usize] = referenced;
        self.len += 1;
        true
    }

    /// Unlinks a member page, returning its reference bit.
    pub fn remove(&mut self, v: Vpn) -> Option<bool> {
        if !self.contains(v) {
            return None;
        }
        let i = v.index();
        let Link { prev, next } = self.links[i];
        if prev != NIL {
            self.links[prev as usize].next = next;
        } else {
            self.front = next;
        }
        if next != NIL {
            self.links[next as usize].prev = prev;
        } else {
            self.rear = prev;
        }
        self.links[i] = Link { prev: NIL, next: NIL };
        self.member[i] = false;
        self.len -= 1;
        Some(std::mem::take(&mut self.referenced[i]))
    }

    pub fn front(&self) -> Option<Vpn> {
        (self.front != NIL).then_some(Vpn(self.front))
    }

    pub fn rear(&self) -> Option<Vpn> {
        (self.rear != NIL).then_some(Vpn(self.rear))
    }

    /// Pages from front to rear.
    pub fn iter(&self) -> Iter<'_> {
        Iter { queue: self, cursor: self.front, remaining: self.len }
    }

    /// Walks the links and checks they agree with the membership flags and
    /// the length counter.
    pub fn check_links(&self) -> Result<(), String> {
        let mut seen = 0usize;
        let mut prev = NIL;
        let mut cur = self.front;
        while cur != NIL {
            if seen > self.len {
                return Err("cycle in resident queue".into());
            }
            let idx = cur as usize;
            if !self.member[idx] {
                return Err(format!("page {cur} linked but not flagged as member"));
            }
            if self.links[idx].prev != prev {
                return Err(format!("broken back-link at page {cur}"));
            }
            prev = cur;
            cur = self.links[idx].next;
            seen += 1;
        }
        if prev != self.rear {
            return Err("rear pointer does not match last linked page".into());
        }
        if seen != self.len {
            return Err(format!("queue length {} but {} linked pages", self.len, seen));
        }
        let flagged = self.member.iter().filter(|m| **m).count();
        if flagged != self.len {
            return Err(format!("{flagged} pages flagged but {} linked", self.len));
        }
        Ok(())
    }
}

pub struct Iter<'a> {
    queue: &'a ResidentQueue,
    cursor: u32,
    remaining: usize,
}

impl Iterator for Iter<'_> {
    type Item = (Vpn, bool);

    fn next(&mut self) -> Option<Self::Item> {
        if self.cursor == NIL || self.remaining == 0 {
            return None;
        }
        let i = self.cursor as usize;
        self.cursor = self.queue.links[i].next;
        self.remaining -= 1;
        Some((Vpn(i as u32), self.queue.referenced[i]))
    }
}
