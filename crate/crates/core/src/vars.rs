use std::fmt;

use serde::{Deserialize, Serialize};

/// Ordered list of variable names shared by all atoms of a formula.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct VarList(Vec<String>);

impl VarList {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VarList(names.into_iter().map(Into::into).collect())
    }

    /// `prefix1 .. prefixN`.
    pub fn numbered(prefix: &str, count: usize) -> Self {
        VarList((1..=count).map(|i| format!("{prefix}{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.0[index]
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &VarList) -> VarList {
        VarList(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn push(&mut self, name: impl Into<String>) {
        self.0.push(name.into());
    }
}

impl fmt::Display for VarList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(" "))
    }
}
