//! Fixed-format text output: every numeric CSV field is scientific
//! notation with 9 significant digits, so reruns of the same
//! configuration are byte-identical.

use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Scientific notation with 9 significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// Keeps a free-form message (e.g. an error) inside a single CSV cell.
pub fn csv_safe(message: String) -> String {
    message.replace(',', ";")
}

/// Assembles a CSV document: the header line naming the columns, then one
/// line per row.
pub fn csv(header: &str, rows: &[Vec<String>]) -> String {
    let mut s = String::with_capacity(header.len() + 1 + rows.len() * 64);
    s.push_str(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| CliError::Io {
                action: "create directory",
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        action: "write",
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_is_nine_significant_digits() {
        assert_eq!(sci(2.5), "2.50000000e0");
        assert_eq!(sci(2.1665e-4), "2.16650000e-4");
        assert_eq!(sci(-16.1599), "-1.61599000e1");
        assert_eq!(sci(0.0), "0.00000000e0");
    }

    #[test]
    fn csv_starts_with_the_header_row() {
        let doc = csv(
            "a,b",
            &[vec!["1".into(), "2".into()], vec!["3".into(), "4".into()]],
        );
        assert_eq!(doc, "a,b\n1,2\n3,4\n");
    }
}
