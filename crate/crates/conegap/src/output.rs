//! CSV and JSON writers. Every file records the hash of the configuration that
//! produced it.

use serde::Serialize;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

/// A CSV table with leading `# key=value` comment lines.
#[derive(Debug, Clone)]
pub struct CsvTable {
    comments: Vec<(String, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(config_hash: &str, header: &[&'static str]) -> Self {
        CsvTable {
            comments: vec![("config_hash".into(), config_hash.into())],
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.comments.push((key.into(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.comments {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// Shortest round-trip decimal form; non-finite values become `nan`, `inf`
/// or `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:?}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    config_hash: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn render_json<T: Serialize>(config_hash: &str, body: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&Tagged { config_hash, body })?;
    s.push('\n');
    Ok(s)
}

/// Collects the files written by one command.
#[derive(Debug)]
pub struct Writer {
    dir: PathBuf,
    hash: String,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, hash: &str) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            hash: hash.into(),
            written: Vec::new(),
        })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn csv(&mut self, name: &str, table: &CsvTable) -> io::Result<()> {
        self.put(name, table.render())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> io::Result<()> {
        let s = render_json(&self.hash, body).map_err(io::Error::other)?;
        self.put(name, s)
    }

    fn put(&mut self, name: &str, contents: String) -> io::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
