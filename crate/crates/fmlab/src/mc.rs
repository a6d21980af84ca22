//! Threaded Monte Carlo. Trial `t` is always generated from the same
//! stream, whichever worker runs it, and only hit counts are combined, so
//! the result does not depend on the number of threads.

use std::thread;

use fmlab_core::ramsey::{mc_record, mc_trial, thmg1_config, ExperimentConfig, McRecord};
use fmlab_core::{Error, Result};

/// Worker `w` of `threads` runs trials `w, w + threads, …`. On error the
/// error of the lowest failing trial is returned.
pub fn independence_mc(cfg: &ExperimentConfig, threads: usize) -> Result<McRecord> {
    mc_record(cfg, 0)?;
    let threads = threads.clamp(1, cfg.trials.min(256) as usize);
    let results: Vec<core::result::Result<u64, (u64, Error)>> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|w| {
                s.spawn(move || {
                    let mut hits = 0;
                    let mut t = w;
                    while t < cfg.trials {
                        match mc_trial(cfg, t) {
                            Ok(true) => hits += 1,
                            Ok(false) => {}
                            Err(e) => return Err((t, e)),
                        }
                        t += threads as u64;
                    }
                    Ok(hits)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut hits = 0;
    let mut first_err: Option<(u64, Error)> = None;
    for r in results {
        match r {
            Ok(h) => hits += h,
            Err((t, e)) => {
                if first_err.as_ref().is_none_or(|(t0, _)| t < *t0) {
                    first_err = Some((t, e));
                }
            }
        }
    }
    match first_err {
        Some((_, e)) => Err(e),
        None => mc_record(cfg, hits),
    }
}

pub fn thmg1_trend(ks: &[usize], trials: u64, seed: u64, threads: usize) -> Result<Vec<McRecord>> {
    ks.iter().map(|&k| independence_mc(&thmg1_config(k, trials, seed)?, threads)).collect()
}
