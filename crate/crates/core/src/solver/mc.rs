//! Replicated runs of the grid scheme on a bounded thread pool.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scheme::{GridScheme, PreparedNoise, SchemePath};
use crate::error::{invalid, Error, Result};
use crate::rng::derive_seed;
use crate::spectral::SpectralOperator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub replicas: usize,
    pub base_seed: u64,
    /// Replicas whose noise has more atoms than this fail.
    pub atom_budget: Option<usize>,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl McOptions {
    pub fn new(replicas: usize, base_seed: u64) -> Self {
        Self {
            replicas,
            base_seed,
            atom_budget: None,
            threads: None,
        }
    }

    /// Seed of replica `r`.
    pub fn seed(&self, r: usize) -> u64 {
        derive_seed(self.base_seed, r as u64)
    }
}

/// Completed replicas in replica order.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub paths: Vec<SchemePath>,
    pub seeds: Vec<u64>,
    pub requested: usize,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.paths.len() == self.requested
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| invalid("threads", e.to_string()))
}

/// Runs `f` on every replica path. Results come back in replica order whatever
/// the thread count; replica `r` always uses `derive_seed(base_seed, r)`.
pub fn mc_map<T, F>(op: &SpectralOperator, scheme: &GridScheme, opts: &McOptions, f: F) -> Result<Vec<Result<T>>>
where
    T: Send,
    F: Fn(usize, SchemePath) -> Result<T> + Sync,
{
    if opts.replicas == 0 {
        return Err(invalid("replicas", "must be at least 1"));
    }
    if opts.threads == Some(0) {
        return Err(invalid("threads", "must be at least 1"));
    }
    scheme.validate(op)?;
    let noise = PreparedNoise::new(&scheme.noise, op)?;
    let pool = pool(opts.threads)?;
    Ok(pool.install(|| {
        (0..opts.replicas)
            .into_par_iter()
            .map(|r| {
                let path = noise.run(op, scheme, opts.seed(r), opts.atom_budget)?;
                f(r, path)
            })
            .collect()
    }))
}

/// Runs the replicas and keeps the completed prefix. The second value is the
/// first failure, if any.
pub fn simulate_mc_partial(
    op: &SpectralOperator,
    scheme: &GridScheme,
    opts: &McOptions,
) -> Result<(Ensemble, Option<Error>)> {
    let results = mc_map(op, scheme, opts, |_, p| Ok(p))?;
    let mut paths = Vec::with_capacity(results.len());
    let mut failure = None;
    for r in results {
        match r {
            Ok(p) if failure.is_none() => paths.push(p),
            Ok(_) => {}
            Err(e) => {
                if failure.is_none() {
                    failure = Some(e);
                }
            }
        }
    }
    let seeds = (0..paths.len()).map(|r| opts.seed(r)).collect();
    Ok((
        Ensemble {
            paths,
            seeds,
            requested: opts.replicas,
        },
        failure,
    ))
}

/// Runs all replicas; any failed replica yields [`Error::PartialResults`].
pub fn simulate_mc(op: &SpectralOperator, scheme: &GridScheme, opts: &McOptions) -> Result<Ensemble> {
    let (ens, failure) = simulate_mc_partial(op, scheme, opts)?;
    match failure {
        None => Ok(ens),
        Some(_) => Err(Error::PartialResults {
            completed: ens.len(),
            requested: ens.requested,
        }),
    }
}
