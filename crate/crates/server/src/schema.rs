use scimine_core::docmodel::{EntityType, REVIEWER_CHECKLIST};
use serde::Serialize;

/// Display color of each entity type. Clients take colors from
/// `/api/schema` only.
pub const PALETTE: [(EntityType, &str); 7] = [
    (EntityType::Model, "#1b5e20"),
    (EntityType::Task, "#8bc34a"),
    (EntityType::Method, "#d32f2f"),
    (EntityType::Score, "#e65100"),
    (EntityType::Setting, "#ffb74d"),
    (EntityType::Metric, "#1e88e5"),
    (EntityType::Dataset, "#8e24aa"),
];

pub fn color_of(t: EntityType) -> &'static str {
    PALETTE.iter().find(|(p, _)| *p == t).map(|(_, c)| *c).expect("every type has a color")
}

#[derive(Debug, Serialize)]
pub struct TypeInfo {
    pub name: EntityType,
    pub color: &'static str,
    /// Whether the type may annotate running text (all types may annotate tables).
    pub text: bool,
}

#[derive(Debug, Serialize)]
pub struct Schema {
    pub entity_types: Vec<TypeInfo>,
    pub relation: &'static str,
    pub checklist: &'static [&'static str],
}

pub fn schema() -> Schema {
    Schema {
        entity_types: EntityType::ALL
            .into_iter()
            .map(|t| TypeInfo { name: t, color: color_of(t), text: t.is_text_type() })
            .collect(),
        relation: "unordered link between two entities of different types in one table",
        checklist: REVIEWER_CHECKLIST,
    }
}
