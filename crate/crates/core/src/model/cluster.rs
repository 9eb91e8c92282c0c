use super::node::{NodeState, Watermarks};
use super::{NodeId, Vpn};
use crate::error::{Result, SimError};

/// Authoritative map from every page of the footprint to the node it is
/// resident on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElasticPageTable {
    owner: Vec<NodeId>,
}

impl ElasticPageTable {
    pub fn footprint(&self) -> usize {
        self.owner.len()
    }

    #[inline]
    pub fn lookup(&self, v: Vpn) -> Result<NodeId> {
        self.owner.get(v.index()).copied().ok_or(SimError::InvalidAddress(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vpn, NodeId)> + '_ {
        self.owner.iter().enumerate().map(|(i, n)| (Vpn(i as u32), *n))
    }
}

/// Every node plus the page table, kept mutually consistent by the
/// placement operations below.
#[derive(Debug, Clone)]
pub struct Cluster {
    nodes: Vec<NodeState>,
    table: ElasticPageTable,
}

impl Cluster {
    /// Places every page according to `placement` (page -> node). Pages are
    /// inserted in ascending order with their reference bits clear, so the
    /// lowest page of each node sits at the rear of its queue.
    pub fn with_placement(
        capacities: &[usize],
        watermarks: Watermarks,
        placement: &[NodeId],
    ) -> Result<Self> {
        let mut cluster = Self::empty(capacities, watermarks, placement.len())?;
        for (i, &node) in placement.iter().enumerate() {
            let v = Vpn(i as u32);
            cluster.node_mut(node)?.admit_cold(v)?;
            cluster.table.owner[i] = node;
        }
        Ok(cluster)
    }

    /// Stages the whole footprint on `home` ignoring its capacity. The
    /// caller must balance the excess away before the state is observed.
    pub(crate) fn staged_on(
        capacities: &[usize],
        watermarks: Watermarks,
        footprint: usize,
        home: NodeId,
    ) -> Result<Self> {
        let mut cluster = Self::empty(capacities, watermarks, footprint)?;
        for i in 0..footprint {
            cluster.node_mut(home)?.stage_cold(Vpn(i as u32))?;
            cluster.table.owner[i] = home;
        }
        Ok(cluster)
    }

    fn empty(capacities: &[usize], watermarks: Watermarks, footprint: usize) -> Result<Self> {
        if capacities.is_empty() {
            return Err(SimError::InvalidConfig("cluster needs at least one node".into()));
        }
        if capacities.len() > u16::MAX as usize {
            return Err(SimError::InvalidConfig("too many nodes".into()));
        }
        if footprint == 0 || footprint >= u32::MAX as usize {
            return Err(SimError::InvalidConfig(format!("footprint of {footprint} pages")));
        }
        watermarks.validate()?;
        let nodes = capacities
            .iter()
            .enumerate()
            .map(|(i, &cap)| NodeState::new(NodeId(i as u16), cap, watermarks, footprint))
            .collect();
        Ok(Self { nodes, table: ElasticPageTable { owner: vec![NodeId::HOME; footprint] } })
    }

    pub fn footprint(&self) -> usize {
        self.table.footprint()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&NodeState> {
        self.nodes.get(id.index()).ok_or(SimError::UnknownNode(id))
    }

    pub fn node_mut(&mut self, id: NodeId) -> Result<&mut NodeState> {
        self.nodes.get_mut(id.index()).ok_or(SimError::UnknownNode(id))
    }

    pub fn page_table(&self) -> &ElasticPageTable {
        &self.table
    }

    #[inline]
    pub fn lookup(&self, v: Vpn) -> Result<NodeId> {
        self.table.lookup(v)
    }

    #[inline]
    pub fn touch(&mut self, node: NodeId, v: Vpn) -> Result<()> {
        self.node_mut(node)?.touch(v)
    }

    /// Unlinks `v` from its node's queue while leaving the page table entry
    /// pointing at the source. The page is in flight until [`land`] admits it.
    ///
    /// [`land`]: Self::land
    pub(crate) fn detach(&mut self, v: Vpn) -> Result<NodeId> {
        let src = self.lookup(v)?;
        self.node_mut(src)?.remove(v)?;
        Ok(src)
    }

    /// Admits an in-flight page at `target` and updates the page table.
    pub(crate) fn land(&mut self, v: Vpn, target: NodeId) -> Result<()> {
        self.node_mut(target)?.admit(v)?;
        self.table.owner[v.index()] = target;
        Ok(())
    }

    /// Moves a resident page to `target`.
    pub fn transfer(&mut self, v: Vpn, target: NodeId) -> Result<NodeId> {
        let src = self.lookup(v)?;
        if self.node(target)?.free() == 0 {
            return Err(SimError::OverCapacity(target));
        }
        self.detach(v)?;
        self.land(v, target)?;
        Ok(src)
    }

    /// Node with the most free pages among `candidates`, lowest id on ties.
    /// `None` when no candidate has room.
    pub fn roomiest(&self, candidates: impl IntoIterator<Item = NodeId>) -> Option<NodeId> {
        let mut best: Option<(usize, NodeId)> = None;
        for id in candidates {
            let free = match self.node(id) {
                Ok(n) => n.free(),
                Err(_) => continue,
            };
            if free == 0 {
                continue;
            }
            match best {
                Some((f, b)) if f > free || (f == free && b < id) => {}
                _ => best = Some((free, id)),
            }
        }
        best.map(|(_, id)| id)
    }

    pub fn residency(&self) -> Vec<u32> {
        self.nodes.iter().map(|n| n.residency() as u32).collect()
    }

    /// Full audit: queue links, capacity, single residency and page-table
    /// consistency.
    pub fn audit(&self) -> Result<(), String> {
        let footprint = self.footprint();
        let mut seen = vec![false; footprint];
        for node in &self.nodes {
            node.queue().check_links().map_err(|e| format!("node {}: {e}", node.id()))?;
            if node.residency() > node.capacity() {
                return Err(format!(
                    "node {} holds {} pages, capacity {}",
                    node.id(),
                    node.residency(),
                    node.capacity()
                ));
            }
            for (v, _) in node.queue().iter() {
                let i = v.index();
                if i >= footprint {
                    return Err(format!("node {} holds out-of-footprint page {v}", node.id()));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(format!("page {v} resident twice"));
                }
                if self.table.owner[i] != node.id() {
                    return Err(format!(
                        "page {v} on node {} but page table says {}",
                        node.id(),
                        self.table.owner[i]
                    ));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(format!("page {i} is resident nowhere"));
        }
        Ok(())
    }
}
