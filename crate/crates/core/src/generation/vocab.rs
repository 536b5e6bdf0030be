use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::mechanisms::TokenId;

pub const EOS_SURFACE: &str = "<eos>";
pub const EOS_ID: TokenId = TokenId(0);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Token {
    pub id: TokenId,
    pub surface: String,
}

impl Token {
    pub fn is_eos(&self) -> bool {
        self.id == EOS_ID
    }
}

/// Interning table from surface forms to ids. Id 0 is always end-of-sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    surfaces: Vec<String>,
    ids: BTreeMap<String, TokenId>,
}

impl From<Vec<String>> for Vocabulary {
    /// Rebuilds a vocabulary from surfaces in id order. Duplicates and a
    /// missing leading EOS are repaired by re-interning.
    fn from(surfaces: Vec<String>) -> Self {
        let mut v = Vocabulary::new();
        for s in &surfaces {
            v.intern(s);
        }
        v
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.surfaces
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        let mut v = Self {
            surfaces: Vec::new(),
            ids: BTreeMap::new(),
        };
        v.intern(EOS_SURFACE);
        v
    }

    /// Id of `surface`, adding it when unseen.
    pub fn intern(&mut self, surface: &str) -> TokenId {
        if let Some(&id) = self.ids.get(surface) {
            return id;
        }
        let id = TokenId(self.surfaces.len() as u32);
        self.surfaces.push(surface.to_string());
        self.ids.insert(surface.to_string(), id);
        id
    }

    pub fn get(&self, surface: &str) -> Option<TokenId> {
        self.ids.get(surface).copied()
    }

    pub fn surface(&self, id: TokenId) -> Option<&str> {
        self.surfaces.get(id.0 as usize).map(String::as_str)
    }

    pub fn token(&self, id: TokenId) -> Option<Token> {
        self.surface(id).map(|s| Token {
            id,
            surface: s.to_string(),
        })
    }

    pub fn eos(&self) -> Token {
        Token {
            id: EOS_ID,
            surface: EOS_SURFACE.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }
}
