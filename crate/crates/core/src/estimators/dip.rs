//! Hartigan's dip statistic for unimodality with a Monte Carlo p-value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_DIP_TRIALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipResult {
    pub dip: f64,
    /// Fraction of uniform replicates with a dip at least as large,
    /// `(hits + 1) / (trials + 1)`.
    pub p_value: f64,
    pub trials: usize,
}

/// Dip statistic of `x`, which must be sorted ascending.
///
/// Distance between the empirical CDF and the nearest unimodal CDF, computed
/// from alternating greatest convex minorant / least concave majorant fits.
/// The smallest attainable value is `1 / (2n)`.
pub fn dip_statistic(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 4 {
        return Err(Error::Input(format!("dip test needs at least 4 samples, got {n}")));
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::Input("dip test samples contain NaN".into()));
    }
    if x.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Input("dip test samples must be sorted".into()));
    }
    Ok(dip_sorted(x) / (2 * n) as f64)
}

/// Returns `2n * dip`. One-based indexing follows the classical formulation.
fn dip_sorted(xs: &[f64]) -> f64 {
    let n = xs.len();
    let x = |i: usize| xs[i - 1];
    let mut dip = 1.0f64;
    if x(n) == x(1) {
        return dip;
    }

    // Index links for the convex minorant and concave majorant fits.
    let mut mn = vec![0usize; n + 1];
    let mut mj = vec![0usize; n + 1];
    mn[1] = 1;
    for j in 2..=n {
        mn[j] = j - 1;
        loop {
            let mnj = mn[j];
            let mnmnj = mn[mnj];
            if mnj == 1 || (x(j) - x(mnj)) * ((mnj - mnmnj) as f64) < (x(mnj) - x(mnmnj)) * (j - mnj) as f64 {
                break;
            }
            mn[j] = mnmnj;
        }
    }
    mj[n] = n;
    for k in (1..n).rev() {
        mj[k] = k + 1;
        loop {
            let mjk = mj[k];
            let mjmjk = mj[mjk];
            if mjk == n || (x(k) - x(mjk)) * (mjk as f64 - mjmjk as f64) < (x(mjk) - x(mjmjk)) * (k as f64 - mjk as f64)
            {
                break;
            }
            mj[k] = mjmjk;
        }
    }

    let mut gcm = vec![0usize; n + 2];
    let mut lcm = vec![0usize; n + 2];
    let (mut low, mut high) = (1usize, n);
    loop {
        gcm[1] = high;
        let mut i = 1;
        while gcm[i] > low {
            gcm[i + 1] = mn[gcm[i]];
            i += 1;
        }
        let l_gcm = i;
        let mut ig = l_gcm;
        let mut ix = ig - 1;

        lcm[1] = low;
        let mut i = 1;
        while lcm[i] < high {
            lcm[i + 1] = mj[lcm[i]];
            i += 1;
        }
        let l_lcm = i;
        let mut ih = l_lcm;
        let mut iv = 2;

        let mut d = 0.0f64;
        if l_gcm != 2 || l_lcm != 2 {
            loop {
                let gcmix = gcm[ix];
                let lcmiv = lcm[iv];
                if gcmix > lcmiv {
                    let gcmi1 = gcm[ix + 1];
                    let dx = (lcmiv as f64 - gcmi1 as f64 + 1.0)
                        - (x(lcmiv) - x(gcmi1)) * (gcmix - gcmi1) as f64 / (x(gcmix) - x(gcmi1));
                    iv += 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    let lcmiv1 = lcm[iv - 1];
                    let dx = (x(gcmix) - x(lcmiv1)) * (lcmiv - lcmiv1) as f64 / (x(lcmiv) - x(lcmiv1))
                        - (gcmix as f64 - lcmiv1 as f64 - 1.0);
                    ix -= 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                ix = ix.max(1);
                iv = iv.min(l_lcm);
                if gcm[ix] == lcm[iv] {
                    break;
                }
            }
        } else {
            d = 1.0;
        }
        if d < dip {
            break;
        }

        let mut dip_l = 0.0f64;
        for j in ig..l_gcm {
            let (jb, je) = (gcm[j + 1], gcm[j]);
            let mut max_t = 1.0f64;
            if je - jb > 1 && x(je) != x(jb) {
                let c = (je - jb) as f64 / (x(je) - x(jb));
                for jj in jb..=je {
                    max_t = max_t.max((jj - jb + 1) as f64 - (x(jj) - x(jb)) * c);
                }
            }
            dip_l = dip_l.max(max_t);
        }
        let mut dip_u = 0.0f64;
        for j in ih..l_lcm {
            let (jb, je) = (lcm[j], lcm[j + 1]);
            let mut max_t = 1.0f64;
            if je - jb > 1 && x(je) != x(jb) {
                let c = (je - jb) as f64 / (x(je) - x(jb));
                for jj in jb..=je {
                    max_t = max_t.max((x(jj) - x(jb)) * c - (jj as f64 - jb as f64 - 1.0));
                }
            }
            dip_u = dip_u.max(max_t);
        }
        dip = dip.max(dip_u.max(dip_l));

        if low == gcm[ig] && high == lcm[ih] {
            break;
        }
        low = gcm[ig];
        high = lcm[ih];
    }
    dip
}

/// Dip statistic of `samples` (any order) and its p-value against
/// `trials` uniform(0,1) samples of the same size.
pub fn dip_test(samples: &[f64], trials: usize, rng_seed: u64) -> Result<DipResult> {
    if trials == 0 {
        return Err(Error::Config("dip test needs at least one Monte Carlo trial".into()));
    }
    let mut sorted = samples.to_vec();
    if sorted.iter().any(|v| v.is_nan()) {
        return Err(Error::Input("dip test samples contain NaN".into()));
    }
    sorted.sort_by(f64::total_cmp);
    let dip = dip_statistic(&sorted)?;
    let n = sorted.len();
    let hits = (0..trials)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, t| {
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                rng.set_stream(t as u64);
                buf.clear();
                buf.extend((0..n).map(|_| rng.random::<f64>()));
                buf.sort_by(f64::total_cmp);
                dip_sorted(buf) / (2 * n) as f64 >= dip
            },
        )
        .filter(|&hit| hit)
        .count();
    Ok(DipResult { dip, p_value: (hits + 1) as f64 / (trials + 1) as f64, trials })
}
