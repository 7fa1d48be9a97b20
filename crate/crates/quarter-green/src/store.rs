//! Content-addressed on-disk store of solved Green grids. Entries are keyed
//! by a SHA-256 of the kernel, start point and truncation settings.

use std::fs;
use std::path::PathBuf;

use quarter_green_core::walk::{JumpKernel, LatticePoint};
use sha2::{Digest, Sha256};

use crate::error::{AppError, AppResult};
use crate::oracle::{green_truncated, GreenGrid, TruncationConfig};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "QUARTER_GREEN_CACHE";
const MAGIC: &[u8; 8] = b"QGGRID01";

pub fn cache_key(k: &JumpKernel, start: LatticePoint, cfg: &TruncationConfig) -> String {
    let mut h = Sha256::new();
    for p in k.to_array() {
        h.update(p.to_le_bytes());
    }
    h.update(start.i.to_le_bytes());
    h.update(start.j.to_le_bytes());
    h.update((cfg.n as u64).to_le_bytes());
    h.update(cfg.solver_tol.to_le_bytes());
    h.update([cfg.extrapolate as u8]);
    hex::encode(h.finalize())
}

#[derive(Debug, Clone)]
pub struct GridStore {
    dir: PathBuf,
}

impl GridStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// The store named by [`CACHE_ENV`], if set and non-empty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.grid"))
    }

    pub fn load(&self, key: &str) -> AppResult<Option<GreenGrid>> {
        let path = self.path_for(key);
        match fs::read(&path) {
            Ok(bytes) => decode(&bytes).map(Some).ok_or_else(|| AppError::Cache(key.to_string())),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(AppError::io(&path, e)),
        }
    }

    pub fn save(&self, key: &str, grid: &GreenGrid) -> AppResult<()> {
        fs::create_dir_all(&self.dir).map_err(|e| AppError::io(&self.dir, e))?;
        let path = self.path_for(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, encode(grid)).map_err(|e| AppError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| AppError::io(&path, e))
    }

    /// Cached grid, solving and storing it on a miss.
    pub fn green(&self, k: &JumpKernel, start: LatticePoint, cfg: &TruncationConfig) -> AppResult<GreenGrid> {
        let key = cache_key(k, start, cfg);
        if let Some(g) = self.load(&key)? {
            return Ok(g);
        }
        let g = green_truncated(k, start, cfg)?;
        self.save(&key, &g)?;
        Ok(g)
    }
}

/// [`green_truncated`] through the environment-configured store, if any.
pub fn green_truncated_cached(k: &JumpKernel, start: LatticePoint, cfg: &TruncationConfig) -> AppResult<GreenGrid> {
    match GridStore::from_env() {
        Some(s) => s.green(k, start, cfg),
        None => green_truncated(k, start, cfg),
    }
}

fn put_f64s(out: &mut Vec<u8>, v: &[f64]) {
    out.extend((v.len() as u64).to_le_bytes());
    for x in v {
        out.extend(x.to_le_bytes());
    }
}

fn encode(g: &GreenGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 16 * g.values.len());
    out.extend(MAGIC);
    out.extend((g.n as u64).to_le_bytes());
    out.extend((g.solved_n as u64).to_le_bytes());
    out.extend(g.start.i.to_le_bytes());
    out.extend(g.start.j.to_le_bytes());
    put_f64s(&mut out, &g.values);
    out.push(g.abs_error.is_some() as u8);
    if let Some(e) = &g.abs_error {
        put_f64s(&mut out, e);
    }
    put_f64s(&mut out, &g.residual_history);
    out
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take<const L: usize>(&mut self) -> Option<[u8; L]> {
        let (head, rest) = self.0.split_first_chunk::<L>()?;
        self.0 = rest;
        Some(*head)
    }
    fn u64(&mut self) -> Option<u64> {
        self.take().map(u64::from_le_bytes)
    }
    fn u32(&mut self) -> Option<u32> {
        self.take().map(u32::from_le_bytes)
    }
    fn f64s(&mut self) -> Option<Vec<f64>> {
        let len = usize::try_from(self.u64()?).ok()?;
        if self.0.len() / 8 < len {
            return None;
        }
        (0..len).map(|_| self.take().map(f64::from_le_bytes)).collect()
    }
}

fn decode(bytes: &[u8]) -> Option<GreenGrid> {
    let mut r = Reader(bytes);
    if &r.take::<8>()? != MAGIC {
        return None;
    }
    let n = r.u64()? as usize;
    let solved_n = r.u64()? as usize;
    let start = LatticePoint::new(r.u32()?, r.u32()?);
    let values = r.f64s()?;
    let abs_error = match r.take::<1>()?[0] {
        0 => None,
        1 => Some(r.f64s()?),
        _ => return None,
    };
    let residual_history = r.f64s()?;
    let ok = r.0.is_empty() && values.len() == n * n && abs_error.as_ref().is_none_or(|e| e.len() == n * n);
    ok.then_some(GreenGrid {
        n,
        start,
        values,
        abs_error,
        residual_history,
        solved_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_round_trip() {
        let g = GreenGrid {
            n: 2,
            start: LatticePoint::new(1, 2),
            values: vec![1.0, 0.5, 0.25, f64::MIN_POSITIVE],
            abs_error: Some(vec![0.0, 1e-3, 2e-3, 3e-3]),
            residual_history: vec![1e-3, 1e-9],
            solved_n: 4,
        };
        assert_eq!(decode(&encode(&g)), Some(g.clone()));
        let mut bad = encode(&g);
        bad.pop();
        assert_eq!(decode(&bad), None);
    }

    #[test]
    fn keys_separate_configs() {
        let k = JumpKernel::su3();
        let p = LatticePoint::new(1, 1);
        let a = cache_key(&k, p, &TruncationConfig::new(100));
        assert_eq!(a.len(), 64);
        assert_ne!(a, cache_key(&k, p, &TruncationConfig::new(101)));
        assert_ne!(a, cache_key(&k, LatticePoint::new(1, 2), &TruncationConfig::new(100)));
        assert_ne!(a, cache_key(&JumpKernel::uniform(), p, &TruncationConfig::new(100)));
    }
}
