use super::PipelineError;
use crate::docmodel::{validate, Anchor, AnnotatedDocument, Entity, EntityId, EntityType, Provenance, ReviewState, TableRelation};
use serde::{Deserialize, Serialize};

/// One reviewer edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Correction {
    Add { anchor: Anchor, etype: EntityType },
    /// Also drops the entity's relations.
    Remove { id: EntityId },
    Retype { id: EntityId, etype: EntityType },
    Respan { id: EntityId, anchor: Anchor },
    AddRel { e1: EntityId, e2: EntityId },
    RemoveRel { e1: EntityId, e2: EntityId },
}

fn invalid(index: usize, reason: impl Into<String>) -> PipelineError {
    PipelineError::InvalidCorrection { index, reason: reason.into() }
}

fn find(doc: &AnnotatedDocument, index: usize, id: EntityId) -> Result<usize, PipelineError> {
    doc.entities.iter().position(|e| e.id == id).ok_or_else(|| invalid(index, format!("no entity {id}")))
}

fn apply_one(doc: &mut AnnotatedDocument, index: usize, c: &Correction) -> Result<(), PipelineError> {
    match c {
        Correction::Add { anchor, etype } => {
            if doc.entities.iter().any(|e| e.anchor == *anchor && e.etype == *etype) {
                return Err(invalid(index, format!("{etype} at {anchor} already exists")));
            }
            let id = doc.next_entity_id();
            let e = Entity::new(&doc.doc, id, *anchor, *etype, Provenance::Reviewed).map_err(|e| invalid(index, e.to_string()))?;
            doc.entities.push(e);
        }
        Correction::Remove { id } => {
            let k = find(doc, index, *id)?;
            doc.entities.remove(k);
            doc.relations.retain(|r| r.e1 != *id && r.e2 != *id);
        }
        Correction::Retype { id, etype } => {
            let k = find(doc, index, *id)?;
            let e = &mut doc.entities[k];
            e.etype = *etype;
            e.provenance = Provenance::Reviewed;
        }
        Correction::Respan { id, anchor } => {
            let k = find(doc, index, *id)?;
            let words = anchor.resolve(&doc.doc).ok_or_else(|| invalid(index, format!("anchor {anchor} does not resolve")))?;
            let surface = words.join(" ");
            let e = &mut doc.entities[k];
            e.anchor = *anchor;
            e.surface = surface;
            e.provenance = Provenance::Reviewed;
        }
        Correction::AddRel { e1, e2 } => {
            let a = &doc.entities[find(doc, index, *e1)?];
            let b = &doc.entities[find(doc, index, *e2)?];
            if a.etype == b.etype {
                return Err(invalid(index, format!("{} and {} are both {}; same-type entities cannot be related", e1, e2, a.etype)));
            }
            let (Some(ta), Some(tb)) = (a.anchor.table_index(), b.anchor.table_index()) else {
                return Err(invalid(index, "relations link table entities only"));
            };
            if ta != tb {
                return Err(invalid(index, "relation endpoints are in different tables"));
            }
            let rel = TableRelation::new(*e1, *e2, ta, Provenance::Reviewed);
            if doc.relations.iter().any(|r| r.key() == rel.key()) {
                return Err(invalid(index, format!("relation {e1}-{e2} already exists")));
            }
            doc.relations.push(rel);
        }
        Correction::RemoveRel { e1, e2 } => {
            let key = TableRelation::new(*e1, *e2, 0, Provenance::Reviewed).key();
            let before = doc.relations.len();
            doc.relations.retain(|r| r.key() != key);
            if doc.relations.len() == before {
                return Err(invalid(index, format!("no relation {e1}-{e2}")));
            }
        }
    }
    Ok(())
}

/// Applies `corrections` in order to a copy of `doc`. The result must
/// validate without errors. The version is bumped and the document moves
/// to review.
pub fn apply_corrections(
    doc: &AnnotatedDocument,
    expected_version: u64,
    corrections: &[Correction],
) -> Result<AnnotatedDocument, PipelineError> {
    if expected_version != doc.version {
        return Err(PipelineError::StaleVersion { expected: expected_version, current: doc.version });
    }
    if doc.review_state == ReviewState::Gold {
        return Err(PipelineError::AlreadyGold(doc.doc_id().to_string()));
    }
    let mut out = doc.clone();
    for (k, c) in corrections.iter().enumerate() {
        apply_one(&mut out, k, c)?;
    }
    let report = validate(&out);
    if let Some(f) = report.errors().next() {
        return Err(invalid(corrections.len().saturating_sub(1), format!("{}: {}", f.rule_id, f.message)));
    }
    out.version += 1;
    out.review_state = ReviewState::InReview;
    Ok(out)
}

/// Marks a reviewed document gold. Refuses documents with validation
/// errors.
pub fn complete_review(doc: &AnnotatedDocument, expected_version: u64) -> Result<AnnotatedDocument, PipelineError> {
    if expected_version != doc.version {
        return Err(PipelineError::StaleVersion { expected: expected_version, current: doc.version });
    }
    if let Some(f) = validate(doc).errors().next() {
        return Err(invalid(0, format!("{}: {}", f.rule_id, f.message)));
    }
    let mut out = doc.clone();
    out.review_state = ReviewState::Gold;
    out.version += 1;
    Ok(out)
}

/// Applies the corrections and marks the result gold in one step.
pub fn merge_review(
    auto: &AnnotatedDocument,
    expected_version: u64,
    corrections: &[Correction],
) -> Result<AnnotatedDocument, PipelineError> {
    let reviewed = apply_corrections(auto, expected_version, corrections)?;
    complete_review(&reviewed, reviewed.version)
}
