//! Line-oriented section / key–value text format shared by stream
//! configurations and run specifications.
//!
//! ```text
//! # comment
//! [section.name]
//! key = value
//! list = 1.0, 2.5, -3
//! ```
//!
//! Keys appear at most once per section; section names appear at most once
//! per file. Keys before the first section header are rejected.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub origin: String,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, "unterminated section header".into()))?
                    .trim();
                if name.is_empty() {
                    return Err(err(line_no, "empty section name".into()));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(err(line_no, format!("duplicate section [{name}]")));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(err(line_no, "empty key".into()));
            }
            let section = sections
                .last_mut()
                .ok_or_else(|| err(line_no, "key outside of any section".into()))?;
            if section.entries.iter().any(|e| e.key == key) {
                return Err(err(
                    line_no,
                    format!("duplicate key `{key}` in [{}]", section.name),
                ));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line: line_no,
            });
        }
        Ok(Document {
            origin: origin.to_string(),
            sections,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.value.as_str())
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{}", self.name, key)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::config(self.field(key), "missing"))
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::config(self.field(key), format!("`{v}`: {e}"))),
        }
    }

    pub fn require_value<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parse_value(key)?
            .ok_or_else(|| Error::config(self.field(key), "missing"))
    }

    pub fn parse_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => parse_f64_list(v)
                .map(Some)
                .map_err(|m| Error::config(self.field(key), m)),
        }
    }

    pub fn require_list(&self, key: &str) -> Result<Vec<f64>> {
        self.parse_list(key)?
            .ok_or_else(|| Error::config(self.field(key), "missing"))
    }

    /// Rejects keys not listed in `known`.
    pub fn only(&self, known: &[&str]) -> Result<()> {
        for e in &self.entries {
            if !known.contains(&e.key.as_str()) {
                return Err(Error::config(self.field(&e.key), "unknown key"));
            }
        }
        Ok(())
    }
}

pub fn parse_f64_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"))
        })
        .collect()
}

/// Formats a list the way [`parse_f64_list`] reads it back.
pub fn format_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
