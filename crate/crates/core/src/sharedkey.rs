//! Label-based shared-key discovery for the group-divisible x Steiner triple
//! system family (`g = 3h + 1`).
//!
//! A node is labelled `(beta gamma, zeta_u)`: the GD symbol in group `beta`
//! at position `gamma`, and the triple-system symbol `zeta_u`. Keys are the
//! blocks of the two primal designs, labelled `beta beta~ gamma delta` (the
//! pair `{beta gamma, beta~ delta}`), `xyz` and `0z`. Two nodes find their
//! shared keys from the four numbers of each label alone.

use std::collections::HashMap;
use std::fmt;

use crate::design::{pbib_second_associates, steiner_triple_bose, BlockDesign};
use crate::error::{Error, Result};
use crate::kps::{KeyId, Kps, NodeId};
use crate::scheme::AssociationScheme;

/// `(beta, gamma)` is 1-based; `(zeta, u)` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeLabel {
    pub beta: usize,
    pub gamma: usize,
    pub zeta: usize,
    pub u: usize,
}

impl NodeLabel {
    /// Parses `beta:gamma:zeta:u`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| Error::Label(format!("`{s}`: expected beta:gamma:zeta:u"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [beta, gamma, zeta, u] => Ok(NodeLabel { beta, gamma, zeta, u }),
            _ => Err(Error::Label(format!("`{s}`: expected four fields"))),
        }
    }
}

fn join(parts: &[usize]) -> String {
    let sep = if parts.iter().any(|&p| p > 9) { "." } else { "" };
    parts.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}_{})", join(&[self.beta, self.gamma]), self.zeta, self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyLabel {
    /// Block `{beta gamma, beta~ delta}` of the GD pairing, `beta < beta~`.
    GdBlock { beta: usize, beta2: usize, gamma: usize, delta: usize },
    /// `{(y+z)_x, (z-y)_x, z_{x+1}}`.
    StsTriple { x: usize, y: usize, z: usize },
    /// `{z_0, z_1, z_2}`.
    StsBase { z: usize },
}

impl fmt::Display for KeyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KeyLabel::GdBlock { beta, beta2, gamma, delta } => f.write_str(&join(&[beta, beta2, gamma, delta])),
            KeyLabel::StsTriple { x, y, z } => f.write_str(&join(&[x, y, z])),
            KeyLabel::StsBase { z } => f.write_str(&join(&[0, z])),
        }
    }
}

/// The scheme built from the second-associate pairing of the GD scheme with
/// `a` groups of `f` and the cyclic triple system with replication `3h + 1`.
#[derive(Debug, Clone)]
pub struct GdStsFamily {
    a: usize,
    f: usize,
    h: usize,
    kps: Kps,
    key_labels: Vec<Vec<KeyLabel>>,
    key_ids: HashMap<KeyLabel, KeyId>,
}

fn lookup(d: &BlockDesign) -> HashMap<Vec<u32>, u32> {
    d.blocks().iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect()
}

impl GdStsFamily {
    pub fn new(a: usize, f: usize, g: usize) -> Result<Self> {
        if g % 3 != 1 {
            return Err(Error::ResidueClass { g: g as u64, expected: 1 });
        }
        let h = (g - 1) / 3;
        let gd = pbib_second_associates(&AssociationScheme::group_divisible(a, f)?)?;
        let sts = steiner_triple_bose(g)?;
        let kps = Kps::build(vec![gd.dual()?, sts.dual()?], 2)?;
        let mut family = GdStsFamily { a, f, h, kps, key_labels: Vec::new(), key_ids: HashMap::new() };

        let gd_index = lookup(&gd);
        let sts_index = lookup(&sts);
        let mut key_labels = vec![vec![None; gd.b_star()], vec![None; sts.b_star()]];
        for label in family.all_key_labels() {
            let (design, content) = family.block_content(label);
            let index = if design == 0 { &gd_index } else { &sts_index };
            let symbol = *index
                .get(&content)
                .ok_or_else(|| Error::Verification(format!("label {label} names no block")))?;
            if key_labels[design][symbol as usize].replace(label).is_some() {
                return Err(Error::Verification(format!("two labels name block {symbol} of design {design}")));
            }
            family.key_ids.insert(label, KeyId { design, symbol });
        }
        family.key_labels = key_labels
            .into_iter()
            .map(|v| v.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Verification("some block has no label".into()))?;
        Ok(family)
    }

    pub fn kps(&self) -> &Kps {
        &self.kps
    }

    pub fn h(&self) -> usize {
        self.h
    }

    fn m(&self) -> usize {
        2 * self.h + 1
    }

    fn gd_symbol(&self, beta: usize, gamma: usize) -> u32 {
        ((beta - 1) * self.f + gamma - 1) as u32
    }

    fn sts_symbol(&self, zeta: usize, u: usize) -> u32 {
        (u * self.m() + zeta % self.m()) as u32
    }

    fn all_key_labels(&self) -> Vec<KeyLabel> {
        let mut out = Vec::new();
        for beta in 1..=self.a {
            for beta2 in beta + 1..=self.a {
                for gamma in 1..=self.f {
                    for delta in 1..=self.f {
                        out.push(KeyLabel::GdBlock { beta, beta2, gamma, delta });
                    }
                }
            }
        }
        for x in 0..3 {
            for y in 1..=self.h {
                for z in 0..self.m() {
                    out.push(KeyLabel::StsTriple { x, y, z });
                }
            }
        }
        out.extend((0..self.m()).map(|z| KeyLabel::StsBase { z }));
        out
    }

    /// The primal block (design index, sorted symbols) a key label names.
    fn block_content(&self, label: KeyLabel) -> (usize, Vec<u32>) {
        let m = self.m();
        let mut content = match label {
            KeyLabel::GdBlock { beta, beta2, gamma, delta } => {
                return (0, vec![self.gd_symbol(beta, gamma), self.gd_symbol(beta2, delta)]);
            }
            KeyLabel::StsTriple { x, y, z } => vec![
                self.sts_symbol(y + z, x),
                self.sts_symbol(z + m - y, x),
                self.sts_symbol(z, (x + 1) % 3),
            ],
            KeyLabel::StsBase { z } => (0..3).map(|u| self.sts_symbol(z, u)).collect(),
        };
        content.sort_unstable();
        (1, content)
    }

    fn check_node(&self, l: NodeLabel) -> Result<()> {
        let ok = (1..=self.a).contains(&l.beta)
            && (1..=self.f).contains(&l.gamma)
            && l.zeta < self.m()
            && l.u < 3;
        if ok {
            Ok(())
        } else {
            Err(Error::Label(format!("{l} outside a = {}, f = {}, h = {}", self.a, self.f, self.h)))
        }
    }

    pub fn node_id(&self, l: NodeLabel) -> Result<NodeId> {
        self.check_node(l)?;
        self.kps.node(&[self.gd_symbol(l.beta, l.gamma), self.sts_symbol(l.zeta, l.u)])
    }

    pub fn node_label(&self, node: &NodeId) -> NodeLabel {
        let (g, s) = (node.0[0] as usize, node.0[1] as usize);
        NodeLabel { beta: g / self.f + 1, gamma: g % self.f + 1, zeta: s % self.m(), u: s / self.m() }
    }

    pub fn key_id(&self, label: KeyLabel) -> Result<KeyId> {
        self.key_ids.get(&label).copied().ok_or_else(|| Error::Label(format!("no key labelled {label}")))
    }

    pub fn key_label(&self, key: KeyId) -> KeyLabel {
        self.key_labels[key.design][key.symbol as usize]
    }

    /// The GD-pairing key shared by `beta gamma` and `beta~ delta`.
    pub fn l1(&self, bg: (usize, usize), bd: (usize, usize)) -> Result<KeyLabel> {
        let ((beta, gamma), (beta2, delta)) = (bg, bd);
        if beta == beta2 {
            return Err(Error::Label(format!("{beta}{gamma} and {beta2}{delta} are in the same group")));
        }
        Ok(if beta < beta2 {
            KeyLabel::GdBlock { beta, beta2, gamma, delta }
        } else {
            KeyLabel::GdBlock { beta: beta2, beta2: beta, gamma: delta, delta: gamma }
        })
    }

    /// Every GD-pairing key held with `beta gamma`.
    pub fn v1(&self, bg: (usize, usize)) -> Vec<KeyLabel> {
        (1..=self.a)
            .filter(|&b| b != bg.0)
            .flat_map(|b| (1..=self.f).map(move |d| (b, d)))
            .map(|bd| self.l1(bg, bd).expect("different groups"))
            .collect()
    }

    /// `d` or `-d` mod `2h + 1`, whichever lies in `1..=h`.
    fn fold(&self, d: usize) -> usize {
        let d = d % self.m();
        if d > self.h {
            self.m() - d
        } else {
            d
        }
    }

    /// The triple-system key shared by `zeta_u` and `zeta~_w`.
    pub fn l2(&self, zu: (usize, usize), zw: (usize, usize)) -> Result<KeyLabel> {
        let ((zeta, u), (zeta2, w)) = (zu, zw);
        let m = self.m();
        if zu == zw {
            return Err(Error::Label(format!("{zeta}_{u} given twice")));
        }
        if zeta >= m || zeta2 >= m || u > 2 || w > 2 {
            return Err(Error::Label(format!("{zeta}_{u} or {zeta2}_{w} out of range for h = {}", self.h)));
        }
        Ok(if u == w {
            // (zeta + zeta~)/2 and (zeta - zeta~)/2; h + 1 inverts 2
            let half = self.h + 1;
            let z = (zeta + zeta2) * half % m;
            let y = self.fold((zeta + m - zeta2) * half);
            KeyLabel::StsTriple { x: u, y, z }
        } else if zeta == zeta2 {
            KeyLabel::StsBase { z: zeta }
        } else if w == (u + 1) % 3 {
            KeyLabel::StsTriple { x: u, y: self.fold(zeta + m - zeta2), z: zeta2 }
        } else {
            KeyLabel::StsTriple { x: w, y: self.fold(zeta2 + m - zeta), z: zeta }
        })
    }

    /// Every triple-system key held with `zeta_u`.
    pub fn v2(&self, zu: (usize, usize)) -> Vec<KeyLabel> {
        let (zeta, u) = zu;
        let m = self.m();
        let mut out = Vec::with_capacity(3 * self.h + 1);
        for y in 1..=self.h {
            out.push(KeyLabel::StsTriple { x: u, y, z: (zeta + m - y) % m });
            out.push(KeyLabel::StsTriple { x: u, y, z: (zeta + y) % m });
            out.push(KeyLabel::StsTriple { x: (u + 2) % 3, y, z: zeta });
        }
        out.push(KeyLabel::StsBase { z: zeta });
        out
    }

    /// The labels of all keys shared by two distinct nodes.
    pub fn discover(&self, a: NodeLabel, b: NodeLabel) -> Result<Vec<KeyLabel>> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::IdenticalNodes);
        }
        let (ga, gb) = ((a.beta, a.gamma), (b.beta, b.gamma));
        let (sa, sb) = ((a.zeta, a.u), (b.zeta, b.u));
        let mut keys = match (ga == gb, a.beta == b.beta, sa == sb) {
            (true, _, _) => {
                let mut k = self.v1(ga);
                k.push(self.l2(sa, sb)?);
                k
            }
            (false, true, true) => self.v2(sa),
            (false, false, true) => {
                let mut k = self.v2(sa);
                k.push(self.l1(ga, gb)?);
                k
            }
            (false, true, false) => vec![self.l2(sa, sb)?],
            (false, false, false) => vec![self.l1(ga, gb)?, self.l2(sa, sb)?],
        };
        keys.sort_unstable();
        Ok(keys)
    }
}

/// Shared keys by intersecting key rings, for schemes without labels.
pub fn generic_discover(kps: &Kps, a: &NodeId, b: &NodeId) -> Result<Vec<KeyId>> {
    if a == b {
        return Err(Error::IdenticalNodes);
    }
    let kb = kps.node_keys(b)?;
    Ok(kps.node_keys(a)?.into_iter().filter(|k| kb.contains(k)).collect())
}
