//! Steiner triple systems on `2g + 1` points with replication `g`.

use super::{bib_from_blocks, BlockDesign};
use crate::error::{Error, Result};

/// The cyclic system for `g = 3h + 1` on symbols `zeta_u`,
/// `zeta in 0..=2h`, `u in 0..3` (index `u * (2h + 1) + zeta`).
///
/// Blocks come in label order: first `xyz = {(y+z)_x, (z-y)_x, z_{x+1}}` for
/// `x in 0..3`, `y in 1..=h`, `z in 0..=2h` (nested in that order), then the
/// `2h + 1` blocks `0z = {z_0, z_1, z_2}`.
pub fn steiner_triple_bose(g: usize) -> Result<BlockDesign> {
    if g % 3 != 1 {
        return Err(Error::ResidueClass { g: g as u64, expected: 1 });
    }
    if g < 4 {
        return Err(Error::param("g", "need g >= 4"));
    }
    let h = (g - 1) / 3;
    let m = 2 * h + 1;
    let sym = |zeta: usize, u: usize| (u * m + zeta % m) as u32;
    let mut blocks = Vec::with_capacity(m * g);
    for x in 0..3 {
        for y in 1..=h {
            for z in 0..m {
                blocks.push(vec![sym(y + z, x), sym(z + m - y, x), sym(z, (x + 1) % 3)]);
            }
        }
    }
    for z in 0..m {
        blocks.push(vec![sym(z, 0), sym(z, 1), sym(z, 2)]);
    }
    bib_from_blocks(3 * m, blocks)
}

/// The cyclic system for `g = 3h` on `Z_{6h+1}`, developed from the base
/// blocks `{0, i, b_i + h}`, where `(a_i, b_i)` are the pairs of a Skolem
/// sequence of order `h` (hooked when `h = 2, 3 mod 4`).
pub fn steiner_triple_skolem(g: usize) -> Result<BlockDesign> {
    if g % 3 != 0 {
        return Err(Error::ResidueClass { g: g as u64, expected: 0 });
    }
    if g < 3 {
        return Err(Error::param("g", "need g >= 3"));
    }
    let h = g / 3;
    let v = 6 * h + 1;
    let pairs = skolem_sequence(h, SKOLEM_BUDGET)?;
    let mut blocks = Vec::with_capacity(h * v);
    for (i, &(_, b)) in pairs.iter().enumerate() {
        let base = [0, i + 1, b + h];
        for shift in 0..v {
            blocks.push(base.iter().map(|&e| ((e + shift) % v) as u32).collect());
        }
    }
    bib_from_blocks(v, blocks)
}

const SKOLEM_BUDGET: u64 = 50_000_000;

/// Pairs `(a_d, b_d)` with `b_d - a_d = d` for `d = 1..=n` partitioning
/// `{1..2n}` (or `{1..2n-1, 2n+1}`, hooked, for `n = 2, 3 mod 4`), found by
/// depth-first search placing the largest differences first.
pub fn skolem_sequence(n: usize, budget: u64) -> Result<Vec<(usize, usize)>> {
    let hooked = n % 4 == 2 || n % 4 == 3;
    let len = if hooked { 2 * n + 1 } else { 2 * n };
    // slot 0 unused; 1-based positions
    let mut used = vec![false; len + 1];
    if hooked {
        used[2 * n] = true;
    }
    let mut pairs = vec![(0, 0); n + 1];
    let mut steps = 0u64;

    fn place(
        d: usize,
        len: usize,
        used: &mut [bool],
        pairs: &mut [(usize, usize)],
        steps: &mut u64,
        budget: u64,
    ) -> Option<bool> {
        if d == 0 {
            return Some(true);
        }
        for a in 1..=len - d {
            *steps += 1;
            if *steps > budget {
                return None;
            }
            if !used[a] && !used[a + d] {
                used[a] = true;
                used[a + d] = true;
                pairs[d] = (a, a + d);
                if place(d - 1, len, used, pairs, steps, budget)? {
                    return Some(true);
                }
                used[a] = false;
                used[a + d] = false;
            }
        }
        Some(false)
    }

    match place(n, len, &mut used, &mut pairs, &mut steps, budget) {
        Some(true) => Ok(pairs[1..].to_vec()),
        _ => Err(Error::SkolemSearchExhausted { order: n }),
    }
}
