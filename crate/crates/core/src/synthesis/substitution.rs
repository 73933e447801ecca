use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{Ident, Program};

use super::SynthesisError;

/// A finite map from variables to names. Constants are fixed points; the map
/// is closed under chaining so that applying it twice equals applying it once.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<Ident, Ident>", into = "BTreeMap<Ident, Ident>")]
pub struct Substitution(BTreeMap<Ident, Ident>);

impl Substitution {
    pub fn empty() -> Self {
        Substitution::default()
    }

    pub fn new(pairs: impl IntoIterator<Item = (Ident, Ident)>) -> Result<Self, SynthesisError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if from == to {
                continue;
            }
            if from.is_constant() {
                return Err(SynthesisError::InvalidSubstitution(format!(
                    "constant `{from}` can only map to itself, not `{to}`"
                )));
            }
            if let Some(prev) = map.insert(from.clone(), to.clone()) {
                if prev != to {
                    return Err(SynthesisError::InvalidSubstitution(format!(
                        "`{from}` maps to both `{prev}` and `{to}`"
                    )));
                }
            }
        }
        let mut closed = BTreeMap::new();
        for from in map.keys() {
            let mut to = &map[from];
            let mut steps = 0;
            while let Some(next) = map.get(to) {
                to = next;
                steps += 1;
                if steps > map.len() {
                    return Err(SynthesisError::InvalidSubstitution(format!(
                        "cyclic mapping through `{from}`"
                    )));
                }
            }
            if to != from {
                closed.insert(from.clone(), to.clone());
            }
        }
        Ok(Substitution(closed))
    }

    /// Parses `{a/B, c/D}` (braces optional).
    pub fn parse(text: &str) -> Result<Self, SynthesisError> {
        let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut pairs = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = item.split_once('/').ok_or_else(|| {
                SynthesisError::InvalidSubstitution(format!("`{item}` is not of the form v/T"))
            })?;
            let ident = |s: &str| {
                Ident::new(s.trim()).map_err(|e| SynthesisError::InvalidSubstitution(e.to_string()))
            };
            pairs.push((ident(a)?, ident(b)?));
        }
        Substitution::new(pairs)
    }

    pub fn get(&self, v: &Ident) -> Option<&Ident> {
        self.0.get(v)
    }

    pub fn apply_ident(&self, i: &Ident) -> Ident {
        self.0.get(i).cloned().unwrap_or_else(|| i.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Ident)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Union of two substitutions that agree on their common domain.
    pub fn merge(&self, other: &Substitution) -> Result<Substitution, SynthesisError> {
        for (v, t) in &other.0 {
            if let Some(mine) = self.0.get(v) {
                if mine != t {
                    return Err(SynthesisError::SubstitutionClash {
                        variable: v.to_string(),
                        left: mine.to_string(),
                        right: t.to_string(),
                    });
                }
            }
        }
        Substitution::new(self.0.iter().chain(&other.0).map(|(a, b)| (a.clone(), b.clone())))
    }
}

impl TryFrom<BTreeMap<Ident, Ident>> for Substitution {
    type Error = SynthesisError;

    fn try_from(map: BTreeMap<Ident, Ident>) -> Result<Self, Self::Error> {
        Substitution::new(map)
    }
}

impl From<Substitution> for BTreeMap<Ident, Ident> {
    fn from(s: Substitution) -> Self {
        s.0
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("{a}/{b}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `p[σ]`: every variable occurrence replaced by its image.
pub fn apply_substitution(p: &Program, s: &Substitution) -> Program {
    let mut out = p.clone();
    out.map_idents(&mut |i| {
        if let Some(t) = s.get(i) {
            *i = t.clone();
        }
    });
    out
}
