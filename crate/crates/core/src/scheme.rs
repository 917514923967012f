//! Two-class association schemes: group divisible, triangular and
//! Latin-square type, plus exhaustive validation of their parameter tables.
//!
//! Symbols are canonical integers `0..v*`. The bijections to the
//! conventional labels are:
//!
//! * group divisible, symbol `ij` (group `i`, position `j`, both 1-based):
//!   `(i - 1) * f + (j - 1)`;
//! * triangular, symbol `{i, j}` with `1 <= i < j <= m`: rank of the pair in
//!   lexicographic order (`12, 13, ..., 1m, 23, ...`);
//! * Latin-square type, grid cell `(r, c)` (1-based): `(r - 1) * p + (c - 1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::ClassRows;
use crate::error::{Error, Result};

/// Dense `phi[j][u][w]` tensor: for a pair of `j`-th associates, the number
/// of symbols that are `u`-th associates of the first and `w`-th associates
/// of the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Phi(pub [[[u64; 3]; 3]; 3]);

impl Phi {
    pub fn get(&self, j: usize, u: usize, w: usize) -> u64 {
        self.0[j][u][w]
    }

    pub fn set(&mut self, j: usize, u: usize, w: usize, value: u64) {
        self.0[j][u][w] = value;
    }

    /// Builds the tensor from `theta` and the free cells
    /// `free[j - 1] = [phi^j_{11}, phi^j_{12} (= phi^j_{21}), phi^j_{22}]`;
    /// the `j = 0` slice and the cells fixed by the scheme axioms are filled in.
    pub fn from_free(theta: [u64; 3], free: [[u64; 3]; 2]) -> Self {
        let mut phi = Phi::default();
        for u in 0..3 {
            phi.0[0][u][u] = theta[u];
        }
        for (cell, value) in FORCED_CELLS {
            phi.0[cell.0][cell.1][cell.2] = value;
        }
        for j in 1..3 {
            let [p11, p12, p22] = free[j - 1];
            phi.0[j][1][1] = p11;
            phi.0[j][1][2] = p12;
            phi.0[j][2][1] = p12;
            phi.0[j][2][2] = p22;
        }
        phi
    }
}

/// Cells of the `j = 1, 2` slices whose values follow from the axioms alone.
pub const FORCED_CELLS: [((usize, usize, usize), u64); 10] = [
    ((1, 0, 0), 0),
    ((1, 0, 2), 0),
    ((1, 2, 0), 0),
    ((2, 0, 0), 0),
    ((2, 1, 0), 0),
    ((2, 0, 1), 0),
    ((1, 0, 1), 1),
    ((1, 1, 0), 1),
    ((2, 0, 2), 1),
    ((2, 2, 0), 1),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SchemeKind {
    Gd { a: usize, f: usize },
    Triangular { m: usize },
    Latin { p: usize, k: usize },
    /// Read off an explicit design's concurrence pattern.
    Derived,
}

/// A Latin square of order `n` stored row-major with entries `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatinSquare {
    order: usize,
    cells: Vec<u32>,
}

impl LatinSquare {
    pub fn new(order: usize, cells: Vec<u32>) -> Result<Self> {
        Self::checked(order, cells, 0)
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        Self::checked(rows.len(), rows.concat(), 0)
    }

    fn checked(order: usize, cells: Vec<u32>, index: usize) -> Result<Self> {
        let bad = |reason: String| Error::NotLatin { index, order, reason };
        if cells.len() != order * order {
            return Err(bad(format!("expected {} cells, got {}", order * order, cells.len())));
        }
        if let Some(&c) = cells.iter().find(|&&c| c as usize >= order) {
            return Err(bad(format!("entry {c} outside 0..{order}")));
        }
        for line in 0..order {
            let mut row_seen = vec![false; order];
            let mut col_seen = vec![false; order];
            for other in 0..order {
                let r = cells[line * order + other] as usize;
                let c = cells[other * order + line] as usize;
                if std::mem::replace(&mut row_seen[r], true) {
                    return Err(bad(format!("row {line} repeats {r}")));
                }
                if std::mem::replace(&mut col_seen[c], true) {
                    return Err(bad(format!("column {line} repeats {c}")));
                }
            }
        }
        Ok(LatinSquare { order, cells })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.order + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.cells.chunks(self.order).map(<[u32]>::to_vec).collect()
    }

    /// Superimposing the two squares yields every ordered pair of letters once.
    pub fn is_orthogonal_to(&self, other: &LatinSquare) -> bool {
        if self.order != other.order {
            return false;
        }
        let n = self.order;
        let mut seen = vec![false; n * n];
        self.cells.iter().zip(&other.cells).all(|(&a, &b)| {
            !std::mem::replace(&mut seen[a as usize * n + b as usize], true)
        })
    }
}

/// Validates a list of squares as mutually orthogonal Latin squares of order `p`.
pub fn check_mols(p: usize, rows: &[Vec<Vec<u32>>]) -> Result<Vec<LatinSquare>> {
    let squares = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != p {
                return Err(Error::NotLatin {
                    index: i,
                    order: p,
                    reason: format!("has {} rows", r.len()),
                });
            }
            LatinSquare::checked(p, r.concat(), i)
        })
        .collect::<Result<Vec<_>>>()?;
    for i in 0..squares.len() {
        for j in i + 1..squares.len() {
            if !squares[i].is_orthogonal_to(&squares[j]) {
                return Err(Error::NotOrthogonal { first: i, second: j });
            }
        }
    }
    Ok(squares)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `count` mutually orthogonal Latin squares of order `p`, with cell
/// `(i, j)` of square `c` equal to `c * i + j mod p` for `c = 1..=count`.
/// More than one square requires `p` prime.
pub fn cyclic_mols(p: usize, count: usize) -> Result<Vec<LatinSquare>> {
    if count > 1 && !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if count > p - 1 {
        return Err(Error::param("count", format!("at most p - 1 = {} cyclic squares exist", p - 1)));
    }
    Ok((1..=count)
        .map(|c| {
            let cells = (0..p)
                .flat_map(|i| (0..p).map(move |j| ((c * i + j) % p) as u32))
                .collect();
            LatinSquare { order: p, cells }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationScheme {
    kind: SchemeKind,
    v_star: usize,
    classes: Vec<u8>,
    theta: [u64; 3],
    phi: Phi,
}

fn binom2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

impl AssociationScheme {
    /// Group divisible scheme on `a` groups of `f` symbols; same-group pairs
    /// are first associates.
    pub fn group_divisible(a: usize, f: usize) -> Result<Self> {
        if a < 2 {
            return Err(Error::param("a", "need at least 2 groups"));
        }
        if f < 2 {
            return Err(Error::param("f", "groups need at least 2 symbols"));
        }
        let v = a * f;
        let classes = dense(v, |x, y| if x / f == y / f { 1 } else { 2 });
        let (a, f) = (a as u64, f as u64);
        let theta = [1, f - 1, f * (a - 1)];
        let phi = Phi::from_free(theta, [[f - 2, 0, f * (a - 1)], [0, f - 1, f * (a - 2)]]);
        Ok(AssociationScheme {
            kind: SchemeKind::Gd { a: a as usize, f: f as usize },
            v_star: v,
            classes,
            theta,
            phi,
        })
    }

    /// Triangular scheme on the 2-subsets of `{1..m}`; pairs sharing an
    /// element are first associates.
    pub fn triangular(m: usize) -> Result<Self> {
        if m < 4 {
            return Err(Error::param("m", "triangular schemes need m >= 4"));
        }
        let pairs = triangular_pairs(m);
        let classes = dense(pairs.len(), |x, y| {
            let (a, b) = (pairs[x], pairs[y]);
            if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
                1
            } else {
                2
            }
        });
        let m = m as u64;
        let theta = [1, 2 * (m - 2), binom2(m - 2)];
        let phi = Phi::from_free(
            theta,
            [[m - 2, m - 3, binom2(m - 3)], [4, 2 * m - 8, binom2(m - 4)]],
        );
        Ok(AssociationScheme {
            kind: SchemeKind::Triangular { m: m as usize },
            v_star: pairs.len(),
            classes,
            theta,
            phi,
        })
    }

    /// Latin-square type scheme with `k` constraints on a `p x p` grid:
    /// cells sharing a row, a column, or a letter of one of the `k - 2`
    /// squares are second associates.
    pub fn latin_square(p: usize, k: usize, squares: &[LatinSquare]) -> Result<Self> {
        check_latin_params(p, k, squares)?;
        let same_line = |x: usize, y: usize| {
            let (r1, c1, r2, c2) = (x / p, x % p, y / p, y % p);
            r1 == r2 || c1 == c2 || squares.iter().any(|s| s.get(r1, c1) == s.get(r2, c2))
        };
        let classes = dense(p * p, |x, y| if same_line(x, y) { 2 } else { 1 });
        let (p, k) = (p as u64, k as u64);
        let theta = [1, (p - 1) * (p + 1 - k), k * (p - 1)];
        let phi = Phi::from_free(
            theta,
            [
                [(p - k) * (p - k).saturating_sub(1) + p - 2, k * (p - k), k * (k - 1)],
                [(p - k) * (p - k + 1), (k - 1) * (p - k + 1), (k - 1) * (k - 2) + p - 2],
            ],
        );
        Ok(AssociationScheme {
            kind: SchemeKind::Latin { p: p as usize, k: k as usize },
            v_star: (p * p) as usize,
            classes,
            theta,
            phi,
        })
    }

    /// A scheme given by an arbitrary class function; the tables are counted
    /// and must be constant.
    pub fn from_class_fn(v_star: usize, class: impl Fn(usize, usize) -> u8) -> Result<Self> {
        let classes = dense(v_star, |x, y| if x == y { 0 } else { class(x, y) });
        if let Some(i) = classes.iter().position(|&c| c > 2) {
            return Err(Error::NotAScheme(format!(
                "class {} for pair ({}, {})",
                classes[i],
                i / v_star,
                i % v_star
            )));
        }
        for x in 0..v_star {
            for y in 0..x {
                if classes[x * v_star + y] != classes[y * v_star + x] {
                    return Err(Error::NotAScheme(format!("relation asymmetric on ({y}, {x})")));
                }
            }
        }
        let (theta, phi) = tabulate(v_star, |x, y| classes[x * v_star + y])
            .map_err(|e| Error::NotAScheme(e.to_string()))?;
        Ok(AssociationScheme { kind: SchemeKind::Derived, v_star, classes, theta, phi })
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn v_star(&self) -> usize {
        self.v_star
    }

    pub fn assoc(&self, x: usize, y: usize) -> u8 {
        self.classes[x * self.v_star + y]
    }

    pub fn theta(&self) -> [u64; 3] {
        self.theta
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    /// All `j`-th associates of `x`, ascending.
    pub fn associates(&self, x: usize, j: u8) -> Vec<usize> {
        (0..self.v_star).filter(|&y| self.assoc(x, y) == j).collect()
    }

    /// Conventional label of a symbol (`11`, `12`, `{1,2}` style, 1-based).
    pub fn symbol_label(&self, x: usize) -> String {
        match self.kind {
            SchemeKind::Gd { f, .. } => format!("{}{}", x / f + 1, x % f + 1),
            SchemeKind::Triangular { m } => {
                let (i, j) = triangular_pairs(m)[x];
                format!("{}{}", i + 1, j + 1)
            }
            SchemeKind::Latin { p, .. } => format!("{}{}", x / p + 1, x % p + 1),
            SchemeKind::Derived => x.to_string(),
        }
    }

    /// Replaces one tensor cell. Test and tooling hook for exercising the
    /// validator.
    pub fn with_phi_cell(mut self, j: usize, u: usize, w: usize, value: u64) -> Self {
        self.phi.set(j, u, w, value);
        self
    }

    pub fn validate(&self) -> SchemeReport {
        validate_scheme(self)
    }
}

fn dense(v: usize, class: impl Fn(usize, usize) -> u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(v * v);
    for x in 0..v {
        for y in 0..v {
            out.push(if x == y { 0 } else { class(x, y) });
        }
    }
    out
}

/// Zero-based `(i, j)` pairs, `i < j < m`, in lexicographic order.
pub(crate) fn triangular_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

fn check_latin_params(p: usize, k: usize, squares: &[LatinSquare]) -> Result<()> {
    if p < 3 {
        return Err(Error::param("p", "Latin-square schemes need p >= 3"));
    }
    if k < 2 || k > p {
        return Err(Error::param("k", format!("need 2 <= k < p + 1 = {}", p + 1)));
    }
    if squares.len() != k - 2 {
        return Err(Error::param("squares", format!("need k - 2 = {} squares, got {}", k - 2, squares.len())));
    }
    for (i, s) in squares.iter().enumerate() {
        if s.order() != p {
            return Err(Error::NotLatin {
                index: i,
                order: p,
                reason: format!("has order {}", s.order()),
            });
        }
    }
    for i in 0..squares.len() {
        for j in i + 1..squares.len() {
            if !squares[i].is_orthogonal_to(&squares[j]) {
                return Err(Error::NotOrthogonal { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// A location where a relation fails to have constant parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonConstant {
    Theta { class: usize, item: usize, found: u64, expected: u64 },
    Phi { class: usize, u: usize, w: usize, pair: (usize, usize), found: u64, expected: u64 },
}

impl fmt::Display for NonConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonConstant::Theta { class, item, found, expected } => write!(
                f,
                "item {item} has {found} associates of class {class}, others have {expected}"
            ),
            NonConstant::Phi { class, u, w, pair, found, expected } => write!(
                f,
                "pair {pair:?} (class {class}) has phi^{class}_{{{u},{w}}} = {found}, representative has {expected}"
            ),
        }
    }
}

/// Counts `theta` and `phi` of a symmetric 3-class relation on `size` items,
/// requiring every count to be constant. `phi` is computed once per class on
/// a representative pair and then checked on every other pair of that class.
/// Absent classes keep the axiom-forced cells and zero free cells.
pub(crate) fn tabulate(
    size: usize,
    class: impl Fn(usize, usize) -> u8,
) -> std::result::Result<([u64; 3], Phi), NonConstant> {
    let rows = ClassRows::from_fn(size, &class);
    let mut theta = [0u64; 3];
    for c in 0..3 {
        theta[c] = rows.row(c, 0).count() as u64;
        for x in 1..size {
            let found = rows.row(c, x).count() as u64;
            if found != theta[c] {
                return Err(NonConstant::Theta { class: c, item: x, found, expected: theta[c] });
            }
        }
    }
    let mut phi = Phi::from_free(theta, [[0; 3]; 2]);
    let mut representative: [Option<(usize, usize)>; 3] = [None; 3];
    for x in 0..size {
        for y in x + 1..size {
            let c = class(x, y) as usize;
            match representative[c] {
                None => {
                    representative[c] = Some((x, y));
                    for u in 0..3 {
                        for w in 0..3 {
                            phi.0[c][u][w] = rows.common(x, y, u, w) as u64;
                        }
                    }
                }
                Some(_) => {
                    for u in 0..3 {
                        for w in 0..3 {
                            let found = rows.common(x, y, u, w) as u64;
                            if found != phi.0[c][u][w] {
                                return Err(NonConstant::Phi {
                                    class: c,
                                    u,
                                    w,
                                    pair: (x, y),
                                    found,
                                    expected: phi.0[c][u][w],
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((theta, phi))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeMismatch {
    Diagonal { symbol: usize },
    Asymmetric { x: usize, y: usize },
    ClassOutOfRange { x: usize, y: usize, class: u8 },
    ForcedCell { j: usize, u: usize, w: usize, stored: u64, required: u64 },
    NonConstant(NonConstant),
    Theta { j: usize, stored: u64, counted: u64 },
    Phi { j: usize, u: usize, w: usize, stored: u64, counted: u64 },
}

impl fmt::Display for SchemeMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeMismatch::Diagonal { symbol } => write!(f, "symbol {symbol} is not its own 0th associate"),
            SchemeMismatch::Asymmetric { x, y } => write!(f, "relation asymmetric on ({x}, {y})"),
            SchemeMismatch::ClassOutOfRange { x, y, class } => {
                write!(f, "pair ({x}, {y}) has class {class}")
            }
            SchemeMismatch::ForcedCell { j, u, w, stored, required } => {
                write!(f, "phi^{j}_{{{u},{w}}} stored {stored}, axioms require {required}")
            }
            SchemeMismatch::NonConstant(nc) => write!(f, "{nc}"),
            SchemeMismatch::Theta { j, stored, counted } => {
                write!(f, "theta_{j} stored {stored}, counted {counted}")
            }
            SchemeMismatch::Phi { j, u, w, stored, counted } => {
                write!(f, "phi^{j}_{{{u},{w}}} stored {stored}, counted {counted}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeReport {
    pub mismatch: Option<SchemeMismatch>,
}

impl SchemeReport {
    pub fn is_pass(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Recounts `theta` and `phi` over every symbol pair and compares them with
/// the stored tables, reporting the first disagreement.
pub fn validate_scheme(s: &AssociationScheme) -> SchemeReport {
    let fail = |m| SchemeReport { mismatch: Some(m) };
    let v = s.v_star;
    for x in 0..v {
        if s.assoc(x, x) != 0 {
            return fail(SchemeMismatch::Diagonal { symbol: x });
        }
        for y in 0..v {
            let c = s.assoc(x, y);
            if c > 2 || (x != y && c == 0) {
                return fail(SchemeMismatch::ClassOutOfRange { x, y, class: c });
            }
            if c != s.assoc(y, x) {
                return fail(SchemeMismatch::Asymmetric { x, y });
            }
        }
    }
    if s.theta[0] != 1 {
        return fail(SchemeMismatch::ForcedCell { j: 0, u: 0, w: 0, stored: s.theta[0], required: 1 });
    }
    for ((j, u, w), required) in FORCED_CELLS {
        let stored = s.phi.get(j, u, w);
        if stored != required {
            return fail(SchemeMismatch::ForcedCell { j, u, w, stored, required });
        }
    }
    let (theta, phi) = match tabulate(v, |x, y| s.assoc(x, y)) {
        Ok(t) => t,
        Err(nc) => return fail(SchemeMismatch::NonConstant(nc)),
    };
    for j in 0..3 {
        if theta[j] != s.theta[j] {
            return fail(SchemeMismatch::Theta { j, stored: s.theta[j], counted: theta[j] });
        }
    }
    for j in 0..3 {
        if j > 0 && theta[j] == 0 {
            continue;
        }
        for u in 0..3 {
            for w in 0..3 {
                if phi.get(j, u, w) != s.phi.get(j, u, w) {
                    return fail(SchemeMismatch::Phi {
                        j,
                        u,
                        w,
                        stored: s.phi.get(j, u, w),
                        counted: phi.get(j, u, w),
                    });
                }
            }
        }
    }
    SchemeReport { mismatch: None }
}
