//! On-disk cache of Coulomb tensors keyed by a SHA-256 of everything the
//! elements depend on.

use anyhow::{Context, Result};
use dqdot::basis::Orbital;
use dqdot::integrals::{coulomb_tensor, CoulombOptions, CoulombTensor};
use dqdot::MaterialParams;
use num_complex::Complex64 as C64;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

const FORMAT: &str = "dqdot-coulomb-v1";

/// Hex SHA-256 over the orbitals, the dielectric constant and the quadrature
/// options. Floats enter through their bit patterns.
pub fn cache_key(orbitals: &[Orbital], mat: &MaterialParams, opts: &CoulombOptions) -> String {
    let mut h = Sha256::new();
    h.update(FORMAT.as_bytes());
    h.update(mat.dielectric_const.to_bits().to_le_bytes());
    h.update(opts.rtol.to_bits().to_le_bytes());
    h.update((opts.max_depth as u64).to_le_bytes());
    h.update((orbitals.len() as u64).to_le_bytes());
    for o in orbitals {
        for v in [o.center, o.l0, o.lb, o.hbar_omega0, o.hbar_omega_c, o.gauge_center.0, o.gauge_center.1] {
            h.update(v.to_bits().to_le_bytes());
        }
        h.update(o.n.to_le_bytes());
        h.update(o.m().to_le_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone)]
pub struct CoulombCache {
    dir: Option<PathBuf>,
}

impl CoulombCache {
    /// `None` disables caching.
    pub fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d).with_context(|| format!("creating cache directory {}", d.display()))?;
        }
        Ok(CoulombCache { dir: dir.map(Path::to_path_buf) })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.coulomb")))
    }

    fn load(path: &Path, n: usize) -> Option<CoulombTensor> {
        let text = fs::read_to_string(path).ok()?;
        let mut lines = text.lines();
        if lines.next()? != FORMAT {
            return None;
        }
        let mut entries = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return None;
            }
            let idx: Vec<usize> = f[..4].iter().map(|s| s.parse().ok()).collect::<Option<_>>()?;
            let re: f64 = f[4].parse().ok()?;
            let im: f64 = f[5].parse().ok()?;
            entries.push(([idx[0], idx[1], idx[2], idx[3]], C64::new(re, im)));
        }
        CoulombTensor::from_entries(n, entries).ok()
    }

    fn store(path: &Path, t: &CoulombTensor) -> Result<()> {
        let mut text = String::from(FORMAT);
        text.push('\n');
        for (q, v) in t.entries() {
            // `{:?}` prints the shortest string that parses back to the same bits
            text.push_str(&format!("{} {} {} {} {:?} {:?}\n", q[0], q[1], q[2], q[3], v.re, v.im));
        }
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Tensor for `orbitals`, from disk when a matching entry exists.
    /// The flag reports a cache hit.
    pub fn tensor(&self, orbitals: &[Orbital], mat: &MaterialParams, opts: &CoulombOptions) -> Result<(CoulombTensor, bool)> {
        let path = self.path(&cache_key(orbitals, mat, opts));
        if let Some(p) = &path {
            if let Some(t) = Self::load(p, orbitals.len()) {
                return Ok((t, true));
            }
        }
        let t = coulomb_tensor(orbitals, mat, opts)?;
        if let Some(p) = &path {
            if let Err(e) = Self::store(p, &t) {
                log::warn!("could not write cache entry {}: {e}", p.display());
            }
        }
        Ok((t, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dqdot::basis::{dot_orbitals, length_scales};

    fn orbitals(b: f64) -> Vec<Orbital> {
        let mat = MaterialParams::gaas();
        dot_orbitals(15.0, false, &length_scales(b, 9.0, &mat))
    }

    #[test]
    fn key_tracks_physics_inputs() {
        let mat = MaterialParams::gaas();
        let o = CoulombOptions::default();
        let k = cache_key(&orbitals(1.0), &mat, &o);
        assert_eq!(k.len(), 64);
        assert_eq!(k, cache_key(&orbitals(1.0), &mat, &o));
        assert_ne!(k, cache_key(&orbitals(1.5), &mat, &o));
        let eps = MaterialParams { dielectric_const: 12.9, ..mat };
        assert_ne!(k, cache_key(&orbitals(1.0), &eps, &o));
        assert_ne!(k, cache_key(&orbitals(1.0), &mat, &CoulombOptions { rtol: 1e-7, ..o }));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoulombCache::new(Some(dir.path())).unwrap();
        let mat = MaterialParams::gaas();
        let orbs = orbitals(2.0);
        let (t1, hit1) = cache.tensor(&orbs, &mat, &CoulombOptions::default()).unwrap();
        let (t2, hit2) = cache.tensor(&orbs, &mat, &CoulombOptions::default()).unwrap();
        assert!(!hit1 && hit2);
        let a: Vec<_> = t1.entries().collect();
        let b: Vec<_> = t2.entries().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupt_entries_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoulombCache::new(Some(dir.path())).unwrap();
        let mat = MaterialParams::gaas();
        let orbs = orbitals(0.0);
        let key = cache_key(&orbs, &mat, &CoulombOptions::default());
        fs::write(dir.path().join(format!("{key}.coulomb")), "garbage").unwrap();
        let (_, hit) = cache.tensor(&orbs, &mat, &CoulombOptions::default()).unwrap();
        assert!(!hit);
    }
}
