//! On-disk cache of operator matrices: one text file per
//! (level, weight, character, label), decimal exact entries, bit-exact
//! round trip. Concurrent writers race benignly: the first completed file
//! wins (link-into-place), later results are discarded.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CoreError, Result};
use crate::linalg::matrix::Mat;
use crate::padic::cyclotomic::CycElem;
use crate::padic::dirichlet::DirichletCharacter;

pub const CACHE_ENV: &str = "SLOPEFORGE_CACHE";
const FORMAT_VERSION: &str = "slopeforge-cache v1";

/// Resolve the cache directory: explicit argument, else the environment.
pub fn cache_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CACHE_ENV).map(PathBuf::from),
    }
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn cache_key(level: u64, weight: u32, chi: &DirichletCharacter, label: &str) -> String {
    format!("M{level}_k{weight}_{}_{}.mat", chi.key(), sanitize(label))
}

pub fn serialize_matrix(
    level: u64,
    weight: u32,
    chi: &DirichletCharacter,
    label: &str,
    m: &Mat<CycElem>,
) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_VERSION);
    out.push('\n');
    out.push_str(&format!(
        "{} {} {} {} {} {}\n",
        level,
        weight,
        chi.key(),
        sanitize(label),
        m.rows,
        m.cols
    ));
    for i in 0..m.rows {
        for j in 0..m.cols {
            out.push_str(&m.at(i, j).to_text());
            out.push(if j + 1 == m.cols { '\n' } else { ' ' });
        }
        if m.cols == 0 {
            out.push('\n');
        }
    }
    out
}

pub fn deserialize_matrix(text: &str, order: u64) -> Result<Mat<CycElem>> {
    let mut lines = text.lines();
    let version = lines.next().ok_or_else(|| CoreError::Cache("empty cache file".into()))?;
    if version != FORMAT_VERSION {
        return Err(CoreError::Cache(format!("unknown cache format {version}")));
    }
    let header = lines.next().ok_or_else(|| CoreError::Cache("missing header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 6 {
        return Err(CoreError::Cache("malformed header".into()));
    }
    let rows: usize = parts[4].parse().map_err(|_| CoreError::Cache("bad rows".into()))?;
    let cols: usize = parts[5].parse().map_err(|_| CoreError::Cache("bad cols".into()))?;
    let mut m = Mat::zeros(rows, cols, CycElem::zero(order));
    for i in 0..rows {
        let line = lines.next().ok_or_else(|| CoreError::Cache("truncated file".into()))?;
        let entries: Vec<&str> = line.split(' ').filter(|s| !s.is_empty()).collect();
        if entries.len() != cols {
            return Err(CoreError::Cache(format!("row {i} has {} entries", entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            *m.at_mut(i, j) = CycElem::from_text(e)?;
        }
    }
    Ok(m)
}

/// Store a matrix; if the key already exists the existing content is kept
/// and returned (first writer wins; never overwrite).
pub fn store(
    dir: &Path,
    level: u64,
    weight: u32,
    chi: &DirichletCharacter,
    label: &str,
    m: &Mat<CycElem>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CoreError::Cache(e.to_string()))?;
    let target = dir.join(cache_key(level, weight, chi, label));
    if target.exists() {
        return Ok(());
    }
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        cache_key(level, weight, chi, label)
    ));
    fs::write(&tmp, serialize_matrix(level, weight, chi, label, m))
        .map_err(|e| CoreError::Cache(e.to_string()))?;
    // link-into-place: fails if a concurrent writer already finished
    match fs::hard_link(&tmp, &target) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {}
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            return Err(CoreError::Cache(e.to_string()));
        }
    }
    let _ = fs::remove_file(&tmp);
    Ok(())
}

pub fn load(
    dir: &Path,
    level: u64,
    weight: u32,
    chi: &DirichletCharacter,
    label: &str,
    order: u64,
) -> Result<Option<Mat<CycElem>>> {
    let target = dir.join(cache_key(level, weight, chi, label));
    if !target.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&target).map_err(|e| CoreError::Cache(e.to_string()))?;
    Ok(Some(deserialize_matrix(&text, order)?))
}

pub fn list(dir: &Path) -> Result<Vec<String>> {
    if !dir.exists() {
        return Ok(vec![]);
    }
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(|e| CoreError::Cache(e.to_string()))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".mat"))
        .collect();
    names.sort();
    Ok(names)
}

pub fn clear(dir: &Path) -> Result<usize> {
    if !dir.exists() {
        return Ok(0);
    }
    let mut removed = 0usize;
    for entry in fs::read_dir(dir).map_err(|e| CoreError::Cache(e.to_string()))? {
        let entry = entry.map_err(|e| CoreError::Cache(e.to_string()))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".mat") {
            fs::remove_file(entry.path()).map_err(|e| CoreError::Cache(e.to_string()))?;
            removed += 1;
        }
    }
    Ok(removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::charpoly::mat_cyclotomic;

    #[test]
    fn roundtrip_is_bit_exact() {
        let tmp = tempfile::tempdir().unwrap();
        let chi = DirichletCharacter::trivial(11);
        let m = mat_cyclotomic(1, vec![vec![1, -2], vec![0, 7]]);
        store(tmp.path(), 11, 2, &chi, "T2", &m).unwrap();
        let text1 =
            std::fs::read_to_string(tmp.path().join(cache_key(11, 2, &chi, "T2"))).unwrap();
        let back = load(tmp.path(), 11, 2, &chi, "T2", 1).unwrap().unwrap();
        assert_eq!(back, m);
        // re-serialize matches byte for byte
        let text2 = serialize_matrix(11, 2, &chi, "T2", &back);
        assert_eq!(text1, text2);
    }

    #[test]
    fn first_writer_wins() {
        let tmp = tempfile::tempdir().unwrap();
        let chi = DirichletCharacter::trivial(5);
        let a = mat_cyclotomic(1, vec![vec![1]]);
        let b = mat_cyclotomic(1, vec![vec![9]]);
        store(tmp.path(), 5, 2, &chi, "X", &a).unwrap();
        store(tmp.path(), 5, 2, &chi, "X", &b).unwrap();
        let back = load(tmp.path(), 5, 2, &chi, "X", 1).unwrap().unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn list_and_clear() {
        let tmp = tempfile::tempdir().unwrap();
        let chi = DirichletCharacter::trivial(5);
        let a = mat_cyclotomic(1, vec![vec![1]]);
        store(tmp.path(), 5, 2, &chi, "T2", &a).unwrap();
        store(tmp.path(), 5, 2, &chi, "T3", &a).unwrap();
        assert_eq!(list(tmp.path()).unwrap().len(), 2);
        assert_eq!(clear(tmp.path()).unwrap(), 2);
        assert_eq!(list(tmp.path()).unwrap().len(), 0);
    }
}
