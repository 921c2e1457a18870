//! Deterministic output helpers: 12-significant-digit decimal formatting,
//! CSV assembly, and overwrite-guarded file writes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Render with 12 significant digits in plain decimal, trailing zeros
/// trimmed. Fixed rounding makes every output byte-reproducible.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let formatted = format!("{:.11e}", x);
    let (mantissa, exp) = formatted.split_once('e').expect("exponential form");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 0 {
        let point = exp as usize + 1;
        if point >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', point - digits.len()));
        } else {
            out.push_str(&digits[..point]);
            let frac = digits[point..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

/// Short label for a time used in snapshot file names.
pub fn time_label(t: f64) -> String {
    fmt_sig(t).replace('-', "m").replace('.', "p")
}

pub struct OutputDir {
    root: PathBuf,
    force: bool,
}

impl OutputDir {
    pub fn new(root: impl Into<PathBuf>, force: bool) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root, force })
    }

    /// Write a file, refusing to overwrite unless `--force` was given.
    pub fn write(&self, name: impl AsRef<Path>, contents: &str) -> io::Result<PathBuf> {
        let path = self.root.join(name);
        if path.exists() && !self.force {
            return Err(io::Error::new(
                io::ErrorKind::AlreadyExists,
                format!("{} exists; pass --force to overwrite", path.display()),
            ));
        }
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        Ok(path)
    }
}

/// Assemble CSV text with a fixed header and row order.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::with_capacity(1024);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
