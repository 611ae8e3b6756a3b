use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

pub fn create(dir: &Path, name: &str) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    let (path, writer) = create(dir, name)?;
    serde_json::to_writer_pretty(writer, value).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

pub fn announce(path: &Path) {
    println!("wrote {}", path.display());
}
