//! Minimal sectioned `key = value` reader shared by the potential and run
//! configuration formats. Lines without `=` inside a section are kept as raw
//! data lines (used for tabulated radial coefficients).

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

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
    pub data: Vec<(usize, String)>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn required(&self, key: &str) -> Result<&Entry, ParseError> {
        self.get(key).ok_or_else(|| ParseError {
            line: self.line,
            message: format!("[{}] is missing required key `{key}`", self.name),
        })
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<T, ParseError> {
        let entry = self.required(key)?;
        entry.value.parse().map_err(|_| ParseError {
            line: entry.line,
            message: format!("[{}] key `{key}`: cannot parse `{}`", self.name, entry.value),
        })
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ParseError> {
        match self.get(key) {
            None => Ok(default),
            Some(_) => self.parse(key),
        }
    }

    /// Comma- or whitespace-separated list.
    pub fn parse_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ParseError> {
        let Some(entry) = self.get(key) else { return Ok(None) };
        entry
            .value
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| ParseError {
                    line: entry.line,
                    message: format!("[{}] key `{key}`: cannot parse list item `{s}`", self.name),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Document {
    /// Leading `# ...` comment lines before the first section.
    pub header: Vec<String>,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Document::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') || line.starts_with(';') {
                if doc.sections.is_empty() {
                    doc.header.push(line.to_string());
                }
                continue;
            }
            let line = line.split('#').next().unwrap_or("").trim();
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ParseError {
                    line: line_no,
                    message: format!("unterminated section header `{line}`"),
                })?;
                doc.sections.push(Section {
                    name: name.trim().to_string(),
                    line: line_no,
                    entries: Vec::new(),
                    data: Vec::new(),
                });
                continue;
            }
            let section = doc.sections.last_mut().ok_or_else(|| ParseError {
                line: line_no,
                message: "content before the first [section]".into(),
            })?;
            if let Some((k, v)) = line.split_once('=') {
                let key = k.trim().to_string();
                if key.is_empty() {
                    return Err(ParseError { line: line_no, message: "empty key".into() });
                }
                if section.get(&key).is_some() {
                    return Err(ParseError {
                        line: line_no,
                        message: format!("duplicate key `{key}` in [{}]", section.name),
                    });
                }
                section.entries.push(Entry { key, value: v.trim().to_string(), line: line_no });
            } else {
                section.data.push((line_no, line.to_string()));
            }
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn sections_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections.iter().filter(move |s| s.name == name)
    }
}
