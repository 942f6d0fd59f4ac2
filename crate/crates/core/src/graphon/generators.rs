//! Deterministic reveal-pattern generators.

use crate::error::{Error, Result};
use crate::matcore::{PermPair, RevealMask};
use crate::scalar::Real;

/// Pattern whose first `floor(k/2)` rows are fully revealed and the rest
/// fully hidden.
pub fn gen_half_rows<T: Real>(k: usize) -> Result<RevealMask<T>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("half-rows needs k >= 2, got {k}")));
    }
    let half = k / 2;
    Ok(RevealMask::from_fn(k, k, |i, _| i < half))
}

/// Parity pattern: entry `(i,j)` (1-based) revealed iff `i` and `j` have the
/// same parity. Requires even `k` so both parity classes have size `k/2`.
pub fn gen_parity<T: Real>(k: usize) -> Result<RevealMask<T>> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidInput(format!("parity needs even k >= 2, got {k}")));
    }
    Ok(RevealMask::from_fn(k, k, |i, j| i % 2 == j % 2))
}

/// The relabelling that maps [`gen_parity`] to a two-diagonal-block pattern:
/// even-numbered rows/columns (1-based) come first, odd-numbered ones second.
pub fn parity_block_perm(k: usize) -> Result<PermPair> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidInput(format!("parity needs even k >= 2, got {k}")));
    }
    let order: Vec<usize> = (0..k / 2)
        .map(|i| 2 * i + 1)
        .chain((0..k / 2).map(|i| 2 * i))
        .collect();
    PermPair::new(order.clone(), order)
}

/// Quasirandom pattern on the smallest prime `q >= k` with `q = 1 (mod 4)`.
///
/// At density 1/2 the entry `(i,j)` (1-based) is revealed iff `(i+j) mod q`
/// is a nonzero quadratic residue mod `q`. Other densities threshold the
/// multiplicative pattern `(i*j mod q)/q < density`.
pub fn gen_quasirandom<T: Real>(k: usize, density: T) -> Result<RevealMask<T>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "quasirandom needs k >= 2, got {k}"
        )));
    }
    if density <= T::zero() || density >= T::one() {
        return Err(Error::InvalidInput(format!(
            "density {density} outside (0,1)"
        )));
    }
    let q = next_prime_1_mod_4(k);
    if (density - T::of(0.5)).abs() <= T::of(1e-12) {
        let residues = quadratic_residues(q);
        Ok(RevealMask::from_fn(k, k, |i, j| {
            residues[(i + j + 2) % q]
        }))
    } else {
        let qf = T::of_usize(q);
        Ok(RevealMask::from_fn(k, k, |i, j| {
            T::of_usize(((i + 1) * (j + 1)) % q) / qf < density
        }))
    }
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn next_prime_1_mod_4(k: usize) -> usize {
    let mut q = k.max(5);
    loop {
        if q % 4 == 1 && is_prime(q) {
            return q;
        }
        q += 1;
    }
}

/// `residues[r]` is true iff `r` is a nonzero quadratic residue mod `q`.
fn quadratic_residues(q: usize) -> Vec<bool> {
    let mut table = vec![false; q];
    for x in 1..q {
        table[(x * x) % q] = true;
    }
    table[0] = false;
    table
}
