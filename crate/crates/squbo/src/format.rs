//! Plain-text instance files.
//!
//! ```text
//! # name: five-cycle
//! squbo 5 5
//! 0 1 -1
//! 1 2 -1
//! 2 3 -1
//! 3 4 -1
//! 0 4 -1
//! ```
//!
//! The header `squbo <n> <m>` is followed by exactly `m` coefficient lines
//! `<i> <j> <value>`. Lines starting with `#` are comments; a leading
//! `# name: <text>` comment names the instance. Duplicate positions are
//! summed and `i > j` entries are mirrored, exactly as in
//! [`SpinQuboInstance::new`].

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::SquboError;
use crate::instance::SpinQuboInstance;

impl SpinQuboInstance {
    /// Hex SHA-256 over [`canonical_body`], so the hash identifies the
    /// coefficients and dimension but not the name.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(canonical_body(self).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Header plus canonical triples, one per line, without the name comment.
/// Values print in shortest round-trip form, so parsing the body recovers
/// the coefficients exactly.
pub fn canonical_body(instance: &SpinQuboInstance) -> String {
    let mut out = format!("squbo {} {}\n", instance.n(), instance.nnz());
    for &(i, j, value) in instance.entries() {
        out.push_str(&format!("{i} {j} {value}\n"));
    }
    out
}

/// Renders an instance to the file format, including its name when present.
pub fn instance_to_string(instance: &SpinQuboInstance) -> String {
    match instance.name() {
        Some(name) => format!("# name: {name}\n{}", canonical_body(instance)),
        None => canonical_body(instance),
    }
}

/// Parses the file format from a string.
pub fn parse_instance_str(text: &str) -> Result<SpinQuboInstance, SquboError> {
    let mut name: Option<String> = None;
    let mut header: Option<(usize, usize)> = None;
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if name.is_none() {
                if let Some(text) = comment.trim_start().strip_prefix("name:") {
                    let text = text.trim();
                    if !text.is_empty() {
                        name = Some(text.to_string());
                    }
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 3 || fields[0] != "squbo" {
                    return Err(SquboError::Parse {
                        line: line_no,
                        message: format!("expected header 'squbo <n> <m>', got '{line}'"),
                    });
                }
                let n: usize = fields[1].parse().map_err(|_| SquboError::Parse {
                    line: line_no,
                    message: format!("invalid variable count '{}'", fields[1]),
                })?;
                let m: usize = fields[2].parse().map_err(|_| SquboError::Parse {
                    line: line_no,
                    message: format!("invalid coefficient count '{}'", fields[2]),
                })?;
                if n == 0 {
                    return Err(SquboError::Parse {
                        line: line_no,
                        message: "variable count must be at least 1".into(),
                    });
                }
                header = Some((n, m));
            }
            Some((n, m)) => {
                if triples.len() == m {
                    return Err(SquboError::Parse {
                        line: line_no,
                        message: format!("unexpected line after {m} coefficient lines"),
                    });
                }
                if fields.len() != 3 {
                    return Err(SquboError::Parse {
                        line: line_no,
                        message: format!("expected '<i> <j> <value>', got '{line}'"),
                    });
                }
                let i: usize = fields[0].parse().map_err(|_| SquboError::Parse {
                    line: line_no,
                    message: format!("invalid index '{}'", fields[0]),
                })?;
                let j: usize = fields[1].parse().map_err(|_| SquboError::Parse {
                    line: line_no,
                    message: format!("invalid index '{}'", fields[1]),
                })?;
                let value: f64 = fields[2].parse().map_err(|_| SquboError::Parse {
                    line: line_no,
                    message: format!("invalid value '{}'", fields[2]),
                })?;
                if i >= n || j >= n {
                    return Err(SquboError::Parse {
                        line: line_no,
                        message: format!("index ({i}, {j}) out of range for {n} variables"),
                    });
                }
                if !value.is_finite() {
                    return Err(SquboError::Parse {
                        line: line_no,
                        message: format!("non-finite value at ({i}, {j})"),
                    });
                }
                triples.push((i, j, value));
            }
        }
    }

    let Some((n, m)) = header else {
        return Err(SquboError::Parse { line: last_line.max(1), message: "missing header".into() });
    };
    if triples.len() != m {
        return Err(SquboError::Parse {
            line: last_line.max(1),
            message: format!("expected {m} coefficient lines, found {}", triples.len()),
        });
    }
    let instance = SpinQuboInstance::new(n, triples)
        .map_err(|e| SquboError::Parse { line: last_line.max(1), message: e.to_string() })?;
    Ok(match name {
        Some(name) => instance.with_name(name),
        None => instance,
    })
}

/// Reads and parses an instance file. An instance without a `# name:`
/// comment is named after the file stem.
pub fn read_instance(path: impl AsRef<Path>) -> Result<SpinQuboInstance, SquboError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let instance = parse_instance_str(&text)?;
    if instance.name().is_some() {
        return Ok(instance);
    }
    Ok(match path.file_stem().and_then(|s| s.to_str()) {
        Some(stem) => instance.with_name(stem),
        None => instance,
    })
}

/// Writes an instance in the file format.
pub fn write_instance(
    path: impl AsRef<Path>,
    instance: &SpinQuboInstance,
) -> Result<(), SquboError> {
    fs::write(path, instance_to_string(instance))?;
    Ok(())
}
