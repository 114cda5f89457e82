use super::DocModelError;
use crate::latex::DomainTag;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionName {
    Seeds,
    Added,
    Test,
    Large,
}

impl PartitionName {
    pub const ALL: [PartitionName; 4] = [
        PartitionName::Seeds,
        PartitionName::Added,
        PartitionName::Test,
        PartitionName::Large,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PartitionName::Seeds => "seeds",
            PartitionName::Added => "added",
            PartitionName::Test => "test",
            PartitionName::Large => "large",
        }
    }
}

impl fmt::Display for PartitionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PartitionName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PartitionName::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown partition `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPartition {
    pub name: PartitionName,
    pub doc_ids: Vec<String>,
    /// Domain of every document, keyed by doc id. Required for the test
    /// partition so results can be split into in- and out-of-domain.
    #[serde(default)]
    pub domains: BTreeMap<String, DomainTag>,
    #[serde(default)]
    pub expected_size: Option<usize>,
}

impl CorpusPartition {
    pub fn new(name: PartitionName) -> Self {
        CorpusPartition {
            name,
            doc_ids: Vec::new(),
            domains: BTreeMap::new(),
            expected_size: None,
        }
    }

    pub fn push(&mut self, doc_id: impl Into<String>, domain: DomainTag) {
        let id = doc_id.into();
        if !self.domains.contains_key(&id) {
            self.doc_ids.push(id.clone());
        }
        self.domains.insert(id, domain);
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn domain_set(&self) -> BTreeSet<DomainTag> {
        self.domains.values().copied().collect()
    }

    pub fn domain_of(&self, doc_id: &str) -> Option<DomainTag> {
        self.domains.get(doc_id).copied()
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.doc_ids.iter().any(|d| d == doc_id)
    }
}

/// Contents of `partitions.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartitionManifest {
    pub partitions: BTreeMap<PartitionName, CorpusPartition>,
}

impl PartitionManifest {
    pub fn get(&self, name: PartitionName) -> Option<&CorpusPartition> {
        self.partitions.get(&name)
    }

    pub fn get_mut(&mut self, name: PartitionName) -> &mut CorpusPartition {
        self.partitions
            .entry(name)
            .or_insert_with(|| CorpusPartition::new(name))
    }

    /// Inserts or replaces a partition after checking it shares no
    /// document with the others.
    pub fn insert(&mut self, partition: CorpusPartition) -> Result<(), DocModelError> {
        for (name, other) in &self.partitions {
            if *name == partition.name {
                continue;
            }
            if let Some(dup) = partition.doc_ids.iter().find(|d| other.contains(d)) {
                return Err(DocModelError::OverlappingPartitions(dup.clone()));
            }
        }
        self.partitions.insert(partition.name, partition);
        Ok(())
    }

    pub fn check_disjoint(&self) -> Result<(), DocModelError> {
        let mut seen = BTreeSet::new();
        for p in self.partitions.values() {
            for d in &p.doc_ids {
                if !seen.insert(d.as_str()) {
                    return Err(DocModelError::OverlappingPartitions(d.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn partition_of(&self, doc_id: &str) -> Option<PartitionName> {
        self.partitions
            .values()
            .find(|p| p.contains(doc_id))
            .map(|p| p.name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        let m: PartitionManifest = serde_json::from_str(s)?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_rejected() {
        let mut m = PartitionManifest::default();
        let mut seeds = CorpusPartition::new(PartitionName::Seeds);
        seeds.push("a", DomainTag::Cs);
        m.insert(seeds).unwrap();
        let mut test = CorpusPartition::new(PartitionName::Test);
        test.push("b", DomainTag::Stat);
        test.push("a", DomainTag::Cs);
        assert_eq!(m.insert(test), Err(DocModelError::OverlappingPartitions("a".into())));
        assert_eq!(m.partition_of("a"), Some(PartitionName::Seeds));
    }

    #[test]
    fn json_shape() {
        let mut m = PartitionManifest::default();
        m.get_mut(PartitionName::Test).push("x", DomainTag::Eess);
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["test"]["doc_ids"][0], "x");
        assert_eq!(v["test"]["domains"]["x"], "EESS");
        assert_eq!(PartitionManifest::from_json(&m.to_json()).unwrap(), m);
    }
}
