//! `key = value` files: one pair per line, `#` starts a comment.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, found `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(parse_err("empty key".into()));
            }
            if entries
                .insert(key.to_string(), (i + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn error(&self, key: &str, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.entries.get(key).map_or(0, |(l, _)| *l),
            message,
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| self.error(key, format!("invalid value for `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| Error::Parse {
            path: self.path.clone(),
            line: 0,
            message: format!("missing key `{key}`"),
        })
    }

    /// Comma-separated list value.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        item.trim().parse::<T>().map_err(|e| {
                            self.error(
                                key,
                                format!("invalid item `{}` in `{key}`: {e}", item.trim()),
                            )
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    /// Fails on the first key outside `allowed`.
    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for (key, (line, _)) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Parse {
                    path: self.path.clone(),
                    line: *line,
                    message: format!("unknown key `{key}`"),
                });
            }
        }
        Ok(())
    }
}
