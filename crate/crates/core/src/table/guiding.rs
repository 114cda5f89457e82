use crate::docmodel::{Entity, EntityType};
use crate::text::{dominant, gazetteer_key, TypeCounts};
use std::collections::BTreeMap;

/// The dominant text type of every matching key, counting each text
/// entity once.
pub fn text_types(text_entities: &[Entity]) -> BTreeMap<String, EntityType> {
    let mut counts: BTreeMap<String, TypeCounts> = BTreeMap::new();
    for e in text_entities.iter().filter(|e| !e.anchor.is_table() && e.etype.is_text_type()) {
        *counts.entry(gazetteer_key(&e.surface)).or_default().entry(e.etype).or_default() += 1;
    }
    counts
        .into_iter()
        .filter_map(|(k, c)| dominant(&c).map(|t| (k, t)))
        .collect()
}

/// Overwrites the type of each table entity whose normalized surface also
/// occurs in the text with the text's dominant type for that surface.
/// Score and Setting entities are left alone.
pub fn apply_label_guiding(text_entities: &[Entity], table_entities: Vec<Entity>) -> Vec<Entity> {
    let types = text_types(text_entities);
    table_entities
        .into_iter()
        .map(|mut e| {
            if e.etype.is_text_type() {
                if let Some(&t) = types.get(&gazetteer_key(&e.surface)) {
                    e.etype = t;
                }
            }
            e
        })
        .collect()
}

/// Table entities (other than Score/Setting) whose type disagrees with the
/// text's dominant type for the same surface. Empty after guiding.
pub fn guiding_conflicts<'a>(text_entities: &[Entity], table_entities: &'a [Entity]) -> Vec<&'a Entity> {
    let types = text_types(text_entities);
    table_entities
        .iter()
        .filter(|e| e.etype.is_text_type())
        .filter(|e| types.get(&gazetteer_key(&e.surface)).is_some_and(|t| *t != e.etype))
        .collect()
}
