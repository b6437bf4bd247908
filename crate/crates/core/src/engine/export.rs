use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::Plan;

#[derive(Debug, Error)]
#[error("cannot write {}: {source}", .path.display())]
pub struct ExportError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub deps: Vec<String>,
}

/// `id<TAB>file<TAB>dep1,dep2` per task, in plan order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.tsv";

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{}\t{}\t{}", e.id, e.file, e.deps.join(","))?;
        }
        Ok(())
    }
}

impl Manifest {
    pub fn parse(text: &str) -> Option<Manifest> {
        let entries = text
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| {
                let mut cols = l.split('\t');
                let id = cols.next()?.to_owned();
                let file = cols.next()?.to_owned();
                let deps = cols.next().unwrap_or("").split(',').filter(|d| !d.is_empty()).map(str::to_owned).collect();
                Some(ManifestEntry { id, file, deps })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Manifest { entries })
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().map(|e| e.deps.len()).sum()
    }
}

/// `id` with characters unsafe in file names replaced by `_`.
pub fn sanitize_file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect()
}

/// Writes `<id>.p` per task and `manifest.tsv` into `out_dir`.
pub fn export_tasks(plan: &Plan, out_dir: &Path) -> Result<Manifest, ExportError> {
    let err = |path: &Path| {
        let path = path.to_owned();
        move |source| ExportError { path, source }
    };
    fs::create_dir_all(out_dir).map_err(err(out_dir))?;
    let mut used = BTreeSet::new();
    let mut manifest = Manifest::default();
    for task in &plan.tasks {
        let stem = sanitize_file_stem(&task.id);
        let mut file = format!("{stem}.p");
        let mut k = 1;
        while !used.insert(file.clone()) {
            k += 1;
            file = format!("{stem}_{k}.p");
        }
        let path = out_dir.join(&file);
        fs::write(&path, task.to_tptp()).map_err(err(&path))?;
        manifest.entries.push(ManifestEntry {
            id: task.id.clone(),
            file,
            deps: task.depends_on.clone(),
        });
    }
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, manifest.to_string()).map_err(err(&path))?;
    Ok(manifest)
}
