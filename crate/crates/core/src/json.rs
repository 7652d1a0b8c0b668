//! JSON layouts for diagrams, linking data, and links.
//!
//! Fractions are strings such as `"1/5"` or `"0"`. A diagram reads
//! `{"surface":{...},"components":[{"twists":0,"items":[{"gen":1},{"cross":0}]}],
//! "crossings":[{"id":0,"over":[0,1],"sign":1}]}`, where `over` gives the
//! component and item index of the over pass.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagrams::{Component, Diagram, Item, ResolvedTerm, SurfaceModel};
use crate::groups::{GroupSpec, Word};
use crate::linking::{HomComponent, HomLink, LinkingError, RhsData};
use crate::ring::parse_fraction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("{field}: {msg}")]
    Field { field: String, msg: String },
    #[error(transparent)]
    Linking(#[from] LinkingError),
}

fn field_err(field: impl Into<String>, msg: impl Into<String>) -> SchemaError {
    SchemaError::Field { field: field.into(), msg: msg.into() }
}

pub fn parse_rational(field: &str, s: &str) -> Result<Rational64, SchemaError> {
    let (n, d) = parse_fraction(s).map_err(|e| field_err(field, e.to_string()))?;
    Ok(Rational64::new(n, d))
}

pub fn render_rational(q: Rational64) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum ItemJson {
    #[serde(rename = "gen")]
    Gen(i64),
    #[serde(rename = "cross")]
    Cross(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    #[serde(default)]
    pub twists: i64,
    pub items: Vec<ItemJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingJson {
    pub id: u32,
    pub over: [usize; 2],
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub surface: GroupSpec,
    pub components: Vec<ComponentJson>,
    #[serde(default)]
    pub crossings: Vec<CrossingJson>,
}

impl DiagramJson {
    pub fn from_diagram(surface: &SurfaceModel, d: &Diagram) -> Self {
        let over: BTreeMap<u32, [usize; 2]> = d
            .locate()
            .into_iter()
            .filter_map(|(id, ps)| ps.iter().find(|p| p.over).map(|p| (id, [p.comp, p.pos])))
            .collect();
        let components = d
            .components
            .iter()
            .map(|c| ComponentJson {
                twists: c.twists,
                items: c
                    .items
                    .iter()
                    .map(|it| match *it {
                        Item::Letter(x) => ItemJson::Gen(x),
                        Item::Pass { crossing, .. } => ItemJson::Cross(crossing),
                    })
                    .collect(),
            })
            .collect();
        let crossings = d
            .signs
            .iter()
            .map(|(&id, &sign)| CrossingJson { id, over: over.get(&id).copied().unwrap_or([0, 0]), sign })
            .collect();
        DiagramJson { surface: surface.group.clone(), components, crossings }
    }

    /// Builds the diagram and checks it against its surface.
    pub fn to_diagram(&self) -> Result<(SurfaceModel, Diagram), SchemaError> {
        let surface = SurfaceModel::new(self.surface.clone());
        let mut over: BTreeMap<u32, [usize; 2]> = BTreeMap::new();
        let mut signs = BTreeMap::new();
        for (k, c) in self.crossings.iter().enumerate() {
            if over.insert(c.id, c.over).is_some() {
                return Err(field_err(format!("crossings[{k}].id"), format!("duplicate crossing {}", c.id)));
            }
            if c.sign != 1 && c.sign != -1 {
                return Err(field_err(format!("crossings[{k}].sign"), "must be 1 or -1"));
            }
            let [ci, pi] = c.over;
            let ok = matches!(
                self.components.get(ci).and_then(|comp| comp.items.get(pi)),
                Some(ItemJson::Cross(id)) if *id == c.id
            );
            if !ok {
                return Err(field_err(
                    format!("crossings[{k}].over"),
                    format!("[{ci},{pi}] is not a pass through crossing {}", c.id),
                ));
            }
            signs.insert(c.id, c.sign);
        }
        let mut components = Vec::with_capacity(self.components.len());
        for (ci, c) in self.components.iter().enumerate() {
            let mut items = Vec::with_capacity(c.items.len());
            for (pi, it) in c.items.iter().enumerate() {
                items.push(match *it {
                    ItemJson::Gen(x) => Item::Letter(x),
                    ItemJson::Cross(id) => {
                        if !over.contains_key(&id) {
                            return Err(field_err(
                                format!("components[{ci}].items[{pi}].cross"),
                                format!("crossing {id} is not listed in crossings"),
                            ));
                        }
                        Item::Pass { crossing: id, over: over[&id] == [ci, pi] }
                    }
                });
            }
            components.push(Component { twists: c.twists, items });
        }
        let d = Diagram::new(components, signs);
        if let Some(e) = d.diagnostics(&surface).into_iter().next() {
            return Err(field_err("components", e.to_string()));
        }
        Ok((surface, d))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: crate::ring::CycCoeff,
    pub diagram: DiagramJson,
}

pub fn resolved_json(surface: &SurfaceModel, terms: &[ResolvedTerm]) -> Vec<TermJson> {
    terms
        .iter()
        .map(|t| TermJson { coeff: t.coeff, diagram: DiagramJson::from_diagram(surface, &t.diagram) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhsJson {
    pub torsion: Vec<i64>,
    pub lf: Vec<Vec<String>>,
}

impl RhsJson {
    pub fn to_data(&self) -> Result<RhsData, SchemaError> {
        let mut lf = Vec::with_capacity(self.lf.len());
        for (i, row) in self.lf.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, s) in row.iter().enumerate() {
                r.push(parse_rational(&format!("lf[{i}][{j}]"), s)?);
            }
            lf.push(r);
        }
        Ok(RhsData::new(self.torsion.clone(), lf)?)
    }

    pub fn from_data(d: &RhsData) -> Self {
        RhsJson {
            torsion: d.torsion().to_vec(),
            lf: d.lf_matrix().iter().map(|r| r.iter().map(|&q| render_rational(q)).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomComponentJson {
    pub class: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Word>,
    pub frame: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomLinkJson {
    pub components: Vec<HomComponentJson>,
    pub lk: Vec<Vec<String>>,
}

fn rational_matrix(name: &str, m: &[Vec<String>]) -> Result<Vec<Vec<Rational64>>, SchemaError> {
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| parse_rational(&format!("{name}[{i}][{j}]"), s))
                .collect()
        })
        .collect()
}

pub fn render_matrix(m: &[Vec<Rational64>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|&q| render_rational(q)).collect()).collect()
}

impl HomLinkJson {
    pub fn to_link(&self) -> Result<HomLink, SchemaError> {
        let mut components = Vec::with_capacity(self.components.len());
        for (i, c) in self.components.iter().enumerate() {
            components.push(HomComponent {
                class: c.class.clone(),
                word: c.word.clone(),
                frame: parse_rational(&format!("components[{i}].frame"), &c.frame)?,
            });
        }
        Ok(HomLink { components, lk: rational_matrix("lk", &self.lk)? })
    }

    pub fn from_link(l: &HomLink) -> Self {
        HomLinkJson {
            components: l
                .components
                .iter()
                .map(|c| HomComponentJson { class: c.class.clone(), word: c.word.clone(), frame: render_rational(c.frame) })
                .collect(),
            lk: render_matrix(&l.lk),
        }
    }
}

/// A link in a rational homology sphere, with an optional group for its
/// words (the group `H_1` by default).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseOneLinkJson {
    pub rhs: RhsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    pub link: HomLinkJson,
}

/// Two links in the same rational homology sphere and their mutual linking
/// numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseOnePairJson {
    pub rhs: RhsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    pub left: HomLinkJson,
    pub right: HomLinkJson,
    pub cross: Vec<Vec<String>>,
}

impl CaseOnePairJson {
    pub fn cross_matrix(&self) -> Result<Vec<Vec<Rational64>>, SchemaError> {
        rational_matrix("cross", &self.cross)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, CaseRng};
    use rand::SeedableRng;

    #[test]
    fn diagram_round_trip() {
        let mut rng = CaseRng::seed_from_u64(4);
        for _ in 0..30 {
            let (s, d) = random::mixed_diagram(&mut rng, 3, 8);
            let j = DiagramJson::from_diagram(&s, &d);
            let text = serde_json::to_string(&j).unwrap();
            let back: DiagramJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back, j);
            let (s2, d2) = back.to_diagram().unwrap();
            assert_eq!((s2, d2), (s, d));
        }
    }

    #[test]
    fn diagram_schema_errors_name_the_field() {
        let text = r#"{"surface":{"kind":"abelian","free_rank":2,"omega":[[0,1],[-1,0]]},
            "components":[{"twists":0,"items":[{"gen":1},{"cross":0}]},{"twists":0,"items":[{"gen":2},{"cross":0}]}],
            "crossings":[{"id":0,"over":[0,0],"sign":-1}]}"#;
        let j: DiagramJson = serde_json::from_str(text).unwrap();
        let e = j.to_diagram().unwrap_err().to_string();
        assert!(e.starts_with("crossings[0].over"), "{e}");
        let fixed = text.replace("[0,0]", "[1,1]");
        let j: DiagramJson = serde_json::from_str(&fixed).unwrap();
        j.to_diagram().unwrap();
    }

    #[test]
    fn rhs_round_trip() {
        let j: RhsJson = serde_json::from_str(r#"{"torsion":[5],"lf":[["1/5"]]}"#).unwrap();
        let d = j.to_data().unwrap();
        assert_eq!(RhsJson::from_data(&d), j);
        let bad: RhsJson = serde_json::from_str(r#"{"torsion":[5],"lf":[["x"]]}"#).unwrap();
        assert!(bad.to_data().unwrap_err().to_string().starts_with("lf[0][0]"));
    }

    #[test]
    fn link_round_trip() {
        let text = r#"{"components":[{"class":[1],"frame":"1/5"}],"lk":[["0"]]}"#;
        let j: HomLinkJson = serde_json::from_str(text).unwrap();
        let l = j.to_link().unwrap();
        assert_eq!(HomLinkJson::from_link(&l), j);
    }
}
