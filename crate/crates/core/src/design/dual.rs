use super::{concurrence, BlockDesign, Role};
use crate::error::{Error, Result};
use crate::scheme::{tabulate, Phi};

/// Association relation on the blocks of a design: disjoint blocks are first
/// associates, blocks sharing one symbol are second associates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockScheme {
    pub classes: Vec<u8>,
    pub theta: [u64; 3],
    pub phi: Phi,
}

/// Classifies every block pair of `base` and counts `theta`/`phi`, which must
/// be constant. Fails on a pair of blocks sharing two or more symbols.
pub fn derive_block_scheme(base: &BlockDesign) -> Result<BlockScheme> {
    let b = base.b_star();
    // blocks sharing a symbol of `base` = symbols co-occurring in its transpose
    let shared = concurrence(b, base.transpose().blocks());
    let mut classes = vec![0u8; b * b];
    for x in 0..b {
        for y in 0..b {
            if x == y {
                continue;
            }
            classes[x * b + y] = match shared[x * b + y] {
                0 => 1,
                1 => 2,
                s => {
                    return Err(Error::ConditionIv { first: x.min(y), second: x.max(y), shared: s as usize });
                }
            };
        }
    }
    let (theta, phi) =
        tabulate(b, |x, y| classes[x * b + y]).map_err(|e| Error::NotAScheme(e.to_string()))?;
    Ok(BlockScheme { classes, theta, phi })
}

/// A dual design `d_i` used as a KPS ingredient: its blocks become the
/// per-design key rings and its block association drives the analytics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualDesign {
    base: BlockDesign,
    theta: [u64; 3],
    phi: Phi,
    classes: Vec<u8>,
    /// `common[x * b + y]`: the symbol blocks `x != y` share, or `NONE`.
    common: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl DualDesign {
    /// The dual of a verified BIB(1) or PBIB(0, 1) design.
    pub fn of(d: &BlockDesign) -> Result<Self> {
        match d.role() {
            Role::Bib { lambda: 1 } | Role::Pbib { lambda1: 0, lambda2: 1, .. } => {}
            _ => return Err(Error::UnsupportedRole),
        }
        Self::from_base(d.transpose())
    }

    /// Accepts an already-dualised design, checking conditions (I)-(IV) and
    /// the block-scheme constraints.
    pub fn from_base(base: BlockDesign) -> Result<Self> {
        let b = base.b_star();
        let (r, k, v) = (base.r_star(), base.k_star(), base.v_star());
        if r < 2 || r >= b {
            return Err(Error::Verification(format!("dual replication r = {r} must satisfy 2 <= r < b = {b}")));
        }
        if v <= k {
            return Err(Error::Verification(format!("dual needs v = {v} > k = {k}")));
        }
        let BlockScheme { classes, theta, phi } = derive_block_scheme(&base)?;
        if theta[2] == 0 {
            return Err(Error::Verification("dual has no second-associate blocks".into()));
        }
        let mut common = vec![NONE; b * b];
        for (sym, holders) in base.transpose().blocks().iter().enumerate() {
            for &x in holders {
                for &y in holders {
                    if x != y {
                        common[x as usize * b + y as usize] = sym as u32;
                    }
                }
            }
        }
        Ok(DualDesign { base, theta, phi, classes, common })
    }

    pub fn base(&self) -> &BlockDesign {
        &self.base
    }

    /// Number of symbols (keys) `v_i`.
    pub fn v(&self) -> usize {
        self.base.v_star()
    }

    /// Number of blocks (key rings) `b_i`.
    pub fn b(&self) -> usize {
        self.base.b_star()
    }

    pub fn r(&self) -> usize {
        self.base.r_star()
    }

    pub fn k(&self) -> usize {
        self.base.k_star()
    }

    pub fn theta(&self) -> [u64; 3] {
        self.theta
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn in_q(&self) -> bool {
        self.theta[1] > 0
    }

    pub fn block(&self, x: usize) -> &[u32] {
        &self.base.blocks()[x]
    }

    pub fn block_class(&self, x: usize, y: usize) -> u8 {
        self.classes[x * self.b() + y]
    }

    /// The symbol shared by distinct second-associate blocks.
    pub fn common_symbol(&self, x: usize, y: usize) -> Option<u32> {
        match self.common[x * self.b() + y] {
            NONE => None,
            s => Some(s),
        }
    }

    /// Overwrites one stored `phi` cell; for exercising verifiers.
    pub fn with_phi_cell(mut self, j: usize, u: usize, w: usize, value: u64) -> Self {
        self.phi.set(j, u, w, value);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{pbib_second_associates, steiner_triple_bose};
    use crate::scheme::AssociationScheme;

    #[test]
    fn example_twelve_dual() {
        let d = pbib_second_associates(&AssociationScheme::group_divisible(2, 3).unwrap()).unwrap();
        let dd = d.dual().unwrap();
        assert_eq!((dd.v(), dd.b(), dd.r(), dd.k()), (9, 6, 2, 3));
        assert_eq!(dd.theta(), [1, 2, 3]);
        assert_eq!(dd.phi().get(1, 2, 2), 3);
        assert_eq!(dd.phi().get(2, 1, 2), 2);
        assert!(dd.in_q());
        // B1's first associates are B2 and B3
        assert_eq!((0..6).filter(|&y| dd.block_class(0, y) == 1).collect::<Vec<_>>(), [1, 2]);
    }

    #[test]
    fn example_thirteen_dual() {
        let dd = steiner_triple_bose(4).unwrap().dual().unwrap();
        assert_eq!((dd.v(), dd.b(), dd.r(), dd.k()), (12, 9, 3, 4));
        assert_eq!(dd.theta(), [1, 0, 8]);
        assert_eq!(dd.phi().get(2, 2, 2), 7);
        assert!(!dd.in_q());
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(dd.common_symbol(x, y).is_some(), x != y);
            }
        }
    }

    #[test]
    fn condition_iv_violation() {
        let base = BlockDesign::incidence(4, vec![vec![0, 1], vec![0, 1], vec![2, 3], vec![2, 3]]).unwrap();
        assert!(matches!(DualDesign::from_base(base), Err(Error::ConditionIv { shared: 2, .. })));
    }

    #[test]
    fn incidence_only_designs_are_refused() {
        let d = steiner_triple_bose(4).unwrap();
        assert_eq!(DualDesign::of(&d.transpose()), Err(Error::UnsupportedRole));
    }
}
