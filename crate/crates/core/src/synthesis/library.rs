use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::syntax::{parse_program, Program};

use super::inclusion::check_observability;
use super::SynthesisError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub source: String,
    pub program: Program,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    name: String,
    source: String,
}

/// The component library: named programs with unique names, each observable
/// on its own.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Library {
    pub components: Vec<Component>,
}

impl Library {
    pub fn from_sources<'a>(
        entries: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Library, SynthesisError> {
        let mut seen = BTreeSet::new();
        let mut components = Vec::new();
        for (name, source) in entries {
            if !seen.insert(name.to_string()) {
                return Err(SynthesisError::Library(format!("duplicate component `{name}`")));
            }
            let program = parse_program(source)
                .map_err(|e| SynthesisError::Library(format!("component `{name}`: {e}")))?;
            if !check_observability(&program)? {
                return Err(SynthesisError::Library(format!(
                    "component `{name}` is not observable"
                )));
            }
            components.push(Component {
                name: name.to_string(),
                source: source.to_string(),
                program,
            });
        }
        Ok(Library { components })
    }

    /// Reads `[{"name": ..., "source": ...}, ...]`.
    pub fn from_json(text: &str) -> Result<Library, SynthesisError> {
        let entries: Vec<Entry> =
            serde_json::from_str(text).map_err(|e| SynthesisError::Library(e.to_string()))?;
        Library::from_sources(entries.iter().map(|e| (e.name.as_str(), e.source.as_str())))
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<Entry> = self
            .components
            .iter()
            .map(|c| Entry {
                name: c.name.clone(),
                source: c.source.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&entries).expect("plain data")
    }

    pub fn get(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The named components side by side.
    pub fn assembly(&self, names: &[String]) -> Result<Program, SynthesisError> {
        let mut p = Program::empty();
        for n in names {
            let c = self
                .get(n)
                .ok_or_else(|| SynthesisError::NotInLibrary(n.clone()))?;
            p = p.assemble(&c.program);
        }
        Ok(p)
    }
}
