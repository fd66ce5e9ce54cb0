use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Fixed scientific notation with 12 significant digits.
pub fn num(x: f64) -> String {
    // -0 and 0 print differently; keep one form.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> anyhow::Result<CsvFile> {
        let path = self.path(name);
        let mut writer = csv::Writer::from_path(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        writer.write_record(header)?;
        Ok(CsvFile { writer, path })
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// 8-bit binary PGM, rows top to bottom.
    pub fn pgm(&self, name: &str, width: usize, pixels: &[u8]) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        let height = pixels.len() / width.max(1);
        let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write!(file, "P5\n{width} {height}\n255\n")?;
        file.write_all(pixels)?;
        Ok(path)
    }
}

pub struct CsvFile {
    writer: csv::Writer<fs::File>,
    path: PathBuf,
}

impl CsvFile {
    pub fn row<I, S>(&mut self, fields: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}
