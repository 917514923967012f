//! Block designs: PBIB designs with `lambda_1 = 0, lambda_2 = 1`, BIB
//! designs with `lambda = 1` (Steiner triple systems), their verification,
//! and duals carrying the block-level association scheme.

mod dual;
mod steiner;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scheme::{AssociationScheme, LatinSquare};

pub use dual::{derive_block_scheme, BlockScheme, DualDesign};
pub use steiner::{skolem_sequence, steiner_triple_bose, steiner_triple_skolem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    Bib { lambda: u64 },
    Pbib { lambda1: u64, lambda2: u64, scheme: Arc<AssociationScheme> },
    /// Constant block size and replication, no concurrence claim (duals).
    Incidence,
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Bib { .. } => "bib",
            Role::Pbib { .. } => "pbib",
            Role::Incidence => "incidence",
        }
    }
}

/// Symbols `0..v_star` arranged into blocks. Each block is stored sorted;
/// block order is the construction (or input) order, so block `j` of the
/// design is symbol `j` of its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDesign {
    v_star: usize,
    blocks: Vec<Vec<u32>>,
    k_star: usize,
    r_star: usize,
    role: Role,
}

impl BlockDesign {
    /// Checks the incidence conditions shared by every design here: symbols in
    /// range, no repeats within a block, constant block size, constant
    /// replication.
    pub fn incidence(v_star: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        if v_star == 0 || blocks.is_empty() {
            return Err(Error::Verification("design needs symbols and blocks".into()));
        }
        let mut blocks = blocks;
        for b in &mut blocks {
            b.sort_unstable();
        }
        if let Some(DesignViolation::SymbolOutOfRange { block, symbol }) | Some(DesignViolation::RepeatedSymbol { block, symbol }) =
            incidence_violation(v_star, &blocks)
        {
            return Err(Error::Verification(format!("block {block} has bad or repeated symbol {symbol}")));
        }
        let k_star = blocks[0].len();
        if let Some(i) = blocks.iter().position(|b| b.len() != k_star) {
            return Err(Error::Verification(format!(
                "block {i} has size {}, block 0 has {k_star}",
                blocks[i].len()
            )));
        }
        let reps = replication(v_star, &blocks);
        let r_star = reps[0];
        if let Some(x) = reps.iter().position(|&r| r != r_star) {
            return Err(Error::Verification(format!(
                "symbol {x} occurs {} times, symbol 0 occurs {r_star}",
                reps[x]
            )));
        }
        Ok(BlockDesign { v_star, blocks, k_star, r_star, role: Role::Incidence })
    }

    /// An explicit design whose role is read off its concurrences: constant
    /// concurrence `lambda` gives a BIB design; concurrences in `{0, 1}`
    /// forming a two-class association scheme (0 = first associates,
    /// 1 = second) give a PBIB(0, 1) design.
    pub fn explicit(v_star: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        let mut d = Self::incidence(v_star, blocks)?;
        let conc = concurrence(v_star, &d.blocks);
        let off_diag = |x: usize, y: usize| conc[x * v_star + y];
        let first = off_diag(0, 1.min(v_star - 1));
        let constant = (0..v_star).all(|x| (0..v_star).all(|y| x == y || off_diag(x, y) == first));
        if constant && v_star > 1 {
            d.role = Role::Bib { lambda: first as u64 };
            return Ok(d);
        }
        if let Some(c) = conc.iter().enumerate().find(|&(i, &c)| i / v_star != i % v_star && c > 1) {
            return Err(Error::Verification(format!(
                "symbols {} and {} co-occur {} times; only BIB or PBIB(0, 1) designs are supported",
                c.0 / v_star,
                c.0 % v_star,
                c.1
            )));
        }
        let scheme = AssociationScheme::from_class_fn(v_star, |x, y| if off_diag(x, y) == 0 { 1 } else { 2 })?;
        d.role = Role::Pbib { lambda1: 0, lambda2: 1, scheme: Arc::new(scheme) };
        Ok(d)
    }

    pub fn v_star(&self) -> usize {
        self.v_star
    }

    pub fn b_star(&self) -> usize {
        self.blocks.len()
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    pub fn r_star(&self) -> usize {
        self.r_star
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn role(&self) -> &Role {
        &self.role
    }

    pub fn scheme(&self) -> Option<&AssociationScheme> {
        match &self.role {
            Role::Pbib { scheme, .. } => Some(scheme),
            _ => None,
        }
    }

    /// Incidence transpose: block `i` of the result holds every `j` such that
    /// block `j` of `self` contains symbol `i`.
    pub fn transpose(&self) -> BlockDesign {
        let mut blocks = vec![Vec::with_capacity(self.r_star); self.v_star];
        for (j, b) in self.blocks.iter().enumerate() {
            for &x in b {
                blocks[x as usize].push(j as u32);
            }
        }
        BlockDesign {
            v_star: self.blocks.len(),
            blocks,
            k_star: self.r_star,
            r_star: self.k_star,
            role: Role::Incidence,
        }
    }

    /// Blocks in lexicographic order, for order-insensitive comparison.
    pub fn canonical_blocks(&self) -> Vec<Vec<u32>> {
        let mut b = self.blocks.clone();
        b.sort();
        b
    }

    pub fn dual(&self) -> Result<DualDesign> {
        DualDesign::of(self)
    }

    fn with_verified_role(mut self, role: Role) -> Result<Self> {
        let report = match &role {
            Role::Bib { lambda } => verify_bib(&self, *lambda),
            Role::Pbib { lambda1, lambda2, scheme } => verify_pbib(&self, scheme, *lambda1, *lambda2),
            Role::Incidence => DesignReport::pass(),
        };
        if let Some(v) = report.violation {
            return Err(Error::Verification(v.to_string()));
        }
        self.role = role;
        Ok(self)
    }
}

fn replication(v: usize, blocks: &[Vec<u32>]) -> Vec<usize> {
    let mut reps = vec![0; v];
    for b in blocks {
        for &x in b {
            reps[x as usize] += 1;
        }
    }
    reps
}

/// Dense `v x v` matrix of pair co-occurrence counts.
fn concurrence(v: usize, blocks: &[Vec<u32>]) -> Vec<u32> {
    let mut conc = vec![0u32; v * v];
    for b in blocks {
        for (i, &x) in b.iter().enumerate() {
            for &y in &b[i + 1..] {
                conc[x as usize * v + y as usize] += 1;
                conc[y as usize * v + x as usize] += 1;
            }
        }
    }
    conc
}

fn incidence_violation(v: usize, blocks: &[Vec<u32>]) -> Option<DesignViolation> {
    for (i, b) in blocks.iter().enumerate() {
        let mut seen = vec![false; v];
        for &x in b {
            if x as usize >= v {
                return Some(DesignViolation::SymbolOutOfRange { block: i, symbol: x });
            }
            if std::mem::replace(&mut seen[x as usize], true) {
                return Some(DesignViolation::RepeatedSymbol { block: i, symbol: x });
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DesignViolation {
    SymbolOutOfRange { block: usize, symbol: u32 },
    RepeatedSymbol { block: usize, symbol: u32 },
    BlockSize { block: usize, size: usize, expected: usize },
    Replication { symbol: usize, count: usize, expected: usize },
    Concurrence { pair: (usize, usize), class: Option<u8>, count: u32, expected: u64 },
    SchemeSize { scheme: usize, design: usize },
}

impl fmt::Display for DesignViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignViolation::SymbolOutOfRange { block, symbol } => {
                write!(f, "block {block} contains out-of-range symbol {symbol}")
            }
            DesignViolation::RepeatedSymbol { block, symbol } => {
                write!(f, "block {block} repeats symbol {symbol}")
            }
            DesignViolation::BlockSize { block, size, expected } => {
                write!(f, "block {block} has {size} symbols, expected {expected}")
            }
            DesignViolation::Replication { symbol, count, expected } => {
                write!(f, "symbol {symbol} occurs in {count} blocks, expected {expected}")
            }
            DesignViolation::Concurrence { pair, class, count, expected } => match class {
                Some(c) => write!(
                    f,
                    "{}-th associates {pair:?} co-occur in {count} blocks, expected {expected}",
                    c
                ),
                None => write!(f, "symbols {pair:?} co-occur in {count} blocks, expected {expected}"),
            },
            DesignViolation::SchemeSize { scheme, design } => {
                write!(f, "scheme has {scheme} symbols, design has {design}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignReport {
    pub violation: Option<DesignViolation>,
}

impl DesignReport {
    fn pass() -> Self {
        DesignReport { violation: None }
    }

    fn fail(v: DesignViolation) -> Self {
        DesignReport { violation: Some(v) }
    }

    pub fn is_pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// Conditions (i)-(iii) common to BIB and PBIB designs, checked from raw blocks.
fn verify_regular(d: &BlockDesign) -> Option<DesignViolation> {
    if let Some(v) = incidence_violation(d.v_star, &d.blocks) {
        return Some(v);
    }
    let k = d.blocks[0].len();
    if let Some((block, b)) = d.blocks.iter().enumerate().find(|(_, b)| b.len() != k) {
        return Some(DesignViolation::BlockSize { block, size: b.len(), expected: k });
    }
    let reps = replication(d.v_star, &d.blocks);
    reps.iter()
        .position(|&r| r != reps[0])
        .map(|symbol| DesignViolation::Replication { symbol, count: reps[symbol], expected: reps[0] })
}

/// Exhaustive BIB check: regularity plus every unordered pair of distinct
/// symbols co-occurring in exactly `lambda` blocks.
pub fn verify_bib(d: &BlockDesign, lambda: u64) -> DesignReport {
    if let Some(v) = verify_regular(d) {
        return DesignReport::fail(v);
    }
    let v = d.v_star;
    let conc = concurrence(v, &d.blocks);
    for x in 0..v {
        for y in x + 1..v {
            let count = conc[x * v + y];
            if count as u64 != lambda {
                return DesignReport::fail(DesignViolation::Concurrence {
                    pair: (x, y),
                    class: None,
                    count,
                    expected: lambda,
                });
            }
        }
    }
    DesignReport::pass()
}

/// Exhaustive PBIB check against `scheme`: regularity plus `j`-th associate
/// pairs co-occurring in exactly `lambda_j` blocks.
pub fn verify_pbib(d: &BlockDesign, scheme: &AssociationScheme, lambda1: u64, lambda2: u64) -> DesignReport {
    if scheme.v_star() != d.v_star {
        return DesignReport::fail(DesignViolation::SchemeSize { scheme: scheme.v_star(), design: d.v_star });
    }
    if let Some(v) = verify_regular(d) {
        return DesignReport::fail(v);
    }
    let v = d.v_star;
    let conc = concurrence(v, &d.blocks);
    for x in 0..v {
        for y in x + 1..v {
            let class = scheme.assoc(x, y);
            let expected = if class == 1 { lambda1 } else { lambda2 };
            let count = conc[x * v + y];
            if count as u64 != expected {
                return DesignReport::fail(DesignViolation::Concurrence {
                    pair: (x, y),
                    class: Some(class),
                    count,
                    expected,
                });
            }
        }
    }
    DesignReport::pass()
}

/// PBIB(0, 1) design whose blocks are the second-associate pairs `{x, y}`,
/// `x < y`, in lexicographic order.
pub fn pbib_second_associates(scheme: &AssociationScheme) -> Result<BlockDesign> {
    if scheme.theta()[2] == 0 {
        return Err(Error::param("scheme", "needs second associates"));
    }
    let v = scheme.v_star();
    let blocks: Vec<Vec<u32>> = (0..v)
        .flat_map(|x| {
            (x + 1..v)
                .filter(move |&y| scheme.assoc(x, y) == 2)
                .map(move |y| vec![x as u32, y as u32])
        })
        .collect();
    BlockDesign::incidence(v, blocks)?.with_verified_role(Role::Pbib {
        lambda1: 0,
        lambda2: 1,
        scheme: Arc::new(scheme.clone()),
    })
}

/// PBIB(0, 1) design over the Latin-square type scheme: the `p` rows, the
/// `p` columns, then the `p` letter classes of each square in turn.
pub fn latin_square_pbib(p: usize, k: usize, squares: &[LatinSquare]) -> Result<BlockDesign> {
    let scheme = AssociationScheme::latin_square(p, k, squares)?;
    let mut blocks = Vec::with_capacity(k * p);
    for r in 0..p {
        blocks.push((0..p).map(|c| (r * p + c) as u32).collect());
    }
    for c in 0..p {
        blocks.push((0..p).map(|r| (r * p + c) as u32).collect());
    }
    for sq in squares {
        let mut by_letter = vec![Vec::with_capacity(p); p];
        for r in 0..p {
            for c in 0..p {
                by_letter[sq.get(r, c) as usize].push((r * p + c) as u32);
            }
        }
        blocks.extend(by_letter);
    }
    BlockDesign::incidence(p * p, blocks)?.with_verified_role(Role::Pbib {
        lambda1: 0,
        lambda2: 1,
        scheme: Arc::new(scheme),
    })
}

pub(crate) fn bib_from_blocks(v: usize, blocks: Vec<Vec<u32>>) -> Result<BlockDesign> {
    BlockDesign::incidence(v, blocks)?.with_verified_role(Role::Bib { lambda: 1 })
}
