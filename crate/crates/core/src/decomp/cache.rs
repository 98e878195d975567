//! On-disk cache of annealed rank decompositions.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::rank::{anneal_rank_decomposition_within, AnnealConfig, Objective, RankDecomposition};
use crate::diagram::hex_string;
use crate::error::Result;
use crate::graph::Graph;

/// JSON files named by graph hash, objective and seed.
pub struct DecompositionCache {
    dir: PathBuf,
}

pub fn graph_hash(g: &Graph) -> String {
    let mut h = Sha256::new();
    h.update((g.n() as u64).to_le_bytes());
    for (u, v) in g.edges() {
        h.update((u as u64).to_le_bytes());
        h.update((v as u64).to_le_bytes());
    }
    hex_string(&h.finalize())
}

impl DecompositionCache {
    pub fn new(dir: impl AsRef<Path>) -> DecompositionCache {
        DecompositionCache { dir: dir.as_ref().to_path_buf() }
    }

    pub fn key(g: &Graph, objective: Objective, seed: u64) -> String {
        format!("{}-{}-{}", graph_hash(g), objective.name(), seed)
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, g: &Graph, objective: Objective, seed: u64) -> Result<Option<RankDecomposition>> {
        let p = self.path(&DecompositionCache::key(g, objective, seed));
        if !p.exists() {
            return Ok(None);
        }
        let rd = RankDecomposition::from_json(&fs::read_to_string(p)?)?;
        rd.validate(&g.full_set(), None)?;
        Ok(Some(rd))
    }

    pub fn put(&self, g: &Graph, objective: Objective, seed: u64, rd: &RankDecomposition) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        fs::write(self.path(&DecompositionCache::key(g, objective, seed)), rd.to_json())?;
        Ok(())
    }

    pub fn get_or_anneal(&self, g: &Graph, objective: Objective, cfg: &AnnealConfig) -> Result<RankDecomposition> {
        if let Some(rd) = self.get(g, objective, cfg.seed)? {
            return Ok(rd);
        }
        let rd = anneal_rank_decomposition_within(g, &g.full_set(), objective, cfg);
        self.put(g, objective, cfg.seed, &rd)?;
        Ok(rd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn second_lookup_hits_the_cache() {
        let dir = std::env::temp_dir().join(format!("zxwidth-cache-{}", std::process::id()));
        let cache = DecompositionCache::new(&dir);
        let g = Graph::random(9, 0.5, &mut ChaCha8Rng::seed_from_u64(1));
        let cfg = AnnealConfig::with_steps(200, 3);
        assert!(cache.get(&g, Objective::Mixed, 3).unwrap().is_none());
        let a = cache.get_or_anneal(&g, Objective::Mixed, &cfg).unwrap();
        let b = cache.get(&g, Objective::Mixed, 3).unwrap().unwrap();
        assert_eq!(a.mixed_width(&g), b.mixed_width(&g));
        assert!(cache.get(&g, Objective::CutRank, 3).unwrap().is_none());
        fs::remove_dir_all(dir).unwrap();
    }
}
