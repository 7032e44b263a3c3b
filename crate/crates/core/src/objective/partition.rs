use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::NodeId;

/// A cluster: sorted distinct members with exactly one head among them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCoalition")]
pub struct Coalition {
    head: NodeId,
    members: Vec<NodeId>,
}

#[derive(Deserialize)]
struct RawCoalition {
    head: NodeId,
    members: Vec<NodeId>,
}

impl TryFrom<RawCoalition> for Coalition {
    type Error = Error;

    fn try_from(raw: RawCoalition) -> Result<Self> {
        Coalition::new(raw.head, raw.members)
    }
}

impl Coalition {
    pub fn new(head: NodeId, members: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut members: Vec<NodeId> = members.into_iter().collect();
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition(format!(
                "duplicate member in coalition headed by {head}"
            )));
        }
        if members.binary_search(&head).is_err() {
            return Err(Error::InvalidPartition(format!(
                "head {head} is not a member"
            )));
        }
        Ok(Self { head, members })
    }

    pub fn singleton(i: NodeId) -> Self {
        Self {
            head: i,
            members: vec![i],
        }
    }

    pub fn head(&self) -> NodeId {
        self.head
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: NodeId) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn with_head(&self, head: NodeId) -> Result<Self> {
        Coalition::new(head, self.members.iter().copied())
    }
}

/// Disjoint cover of `0..n` by coalitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Coalition>", into = "Vec<Coalition>")]
pub struct Partition {
    coalitions: Vec<Coalition>,
    node_index: Vec<usize>,
}

impl TryFrom<Vec<Coalition>> for Partition {
    type Error = Error;

    fn try_from(coalitions: Vec<Coalition>) -> Result<Self> {
        let n = coalitions.iter().map(Coalition::len).sum();
        Partition::new(n, coalitions)
    }
}

impl From<Partition> for Vec<Coalition> {
    fn from(p: Partition) -> Self {
        p.coalitions
    }
}

impl Partition {
    pub fn new(n: usize, coalitions: Vec<Coalition>) -> Result<Self> {
        let mut node_index = vec![usize::MAX; n];
        for (k, c) in coalitions.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidPartition(format!("coalition {k} is empty")));
            }
            for &i in c.members() {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "node {i} out of range for {n} nodes"
                    )));
                }
                if node_index[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "node {i} appears in two coalitions"
                    )));
                }
                node_index[i] = k;
            }
        }
        if let Some(i) = node_index.iter().position(|&k| k == usize::MAX) {
            return Err(Error::InvalidPartition(format!("node {i} is not covered")));
        }
        Ok(Self {
            coalitions,
            node_index,
        })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            coalitions: (0..n).map(Coalition::singleton).collect(),
            node_index: (0..n).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_index.len()
    }

    /// Number of coalitions `M`.
    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn coalition(&self, idx: usize) -> &Coalition {
        &self.coalitions[idx]
    }

    pub fn index_of(&self, i: NodeId) -> usize {
        self.node_index[i]
    }

    pub fn coalition_of(&self, i: NodeId) -> &Coalition {
        &self.coalitions[self.node_index[i]]
    }

    pub fn heads(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.coalitions.iter().map(Coalition::head)
    }

    pub fn is_head(&self, i: NodeId) -> bool {
        self.coalition_of(i).head() == i
    }

    /// Rechecks the disjoint-cover and one-head invariants from scratch.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = Partition::new(self.node_count(), self.coalitions.clone())?;
        if rebuilt.node_index != self.node_index {
            return Err(Error::InvalidPartition("stale node index".into()));
        }
        for c in &self.coalitions {
            if !c.contains(c.head()) {
                return Err(Error::InvalidPartition(format!(
                    "head {} outside its coalition",
                    c.head()
                )));
            }
        }
        Ok(())
    }

    /// Replaces the coalitions at `removed` with `added`. Added coalitions
    /// reuse the removed slots in order; leftovers are appended or dropped.
    pub fn replace(&mut self, removed: &[usize], added: Vec<Coalition>) -> Result<()> {
        let mut slots: Vec<usize> = removed.to_vec();
        slots.sort_unstable();
        slots.dedup();
        let mut added = added.into_iter();
        let mut unused = Vec::new();
        for &slot in &slots {
            match added.next() {
                Some(c) => self.coalitions[slot] = c,
                None => unused.push(slot),
            }
        }
        self.coalitions.extend(added);
        for &slot in unused.iter().rev() {
            self.coalitions.remove(slot);
        }
        let n = self.node_count();
        *self = Partition::new(n, std::mem::take(&mut self.coalitions))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidPartition(e.to_string()))
    }
}
