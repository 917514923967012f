//! Key predistribution from `t = q` dual designs: every node holds the union
//! of one block from each dual, so node association is component-wise block
//! association and every count factorises over the designs.

use std::fmt;

use crate::design::DualDesign;
use crate::error::{Error, Result};

/// A node `N(alpha_1, ..., alpha_t)`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub Vec<u32>);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| (a + 1).to_string()).collect();
        write!(f, "N({})", parts.join(","))
    }
}

/// Associate classes `j_1 ... j_t` of a node pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssocTuple(pub Vec<u8>);

impl AssocTuple {
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' | '1' | '2' => Ok(c as u8 - b'0'),
                _ => Err(Error::NotInI(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()
            .map(AssocTuple)
    }
}

impl fmt::Display for AssocTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in &self.0 {
            write!(f, "{j}")?;
        }
        Ok(())
    }
}

/// Symbol `symbol` of dual `design`; key pools of different designs are
/// disjoint. Displayed 1-based as `symbol(design)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyId {
    pub design: usize,
    pub symbol: u32,
}

impl fmt::Display for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.symbol + 1, self.design + 1)
    }
}

#[derive(Debug, Clone)]
pub struct Kps {
    duals: Vec<DualDesign>,
    q: usize,
    n: u64,
    k: usize,
    v: usize,
    key_offsets: Vec<usize>,
    tuples: Vec<AssocTuple>,
    delta: Vec<AssocTuple>,
    delta_bar: Vec<AssocTuple>,
}

impl Kps {
    pub fn build(duals: Vec<DualDesign>, q: usize) -> Result<Self> {
        if q == 0 || duals.len() != q {
            return Err(Error::ArityMismatch { q, t: duals.len() });
        }
        for (index, d) in duals.iter().enumerate() {
            if d.k() < q {
                return Err(Error::BlockSizeBelowThreshold { index, k: d.k(), q });
            }
        }
        let n = duals
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(d.b() as u64))
            .ok_or_else(|| Error::param("duals", "node count overflows u64"))?;
        let k = duals.iter().map(DualDesign::k).sum();
        let mut key_offsets = Vec::with_capacity(q);
        let mut v = 0;
        for d in &duals {
            key_offsets.push(v);
            v += d.v();
        }
        let mut kps = Kps {
            duals,
            q,
            n,
            k,
            v,
            key_offsets,
            tuples: Vec::new(),
            delta: Vec::new(),
            delta_bar: Vec::new(),
        };
        kps.tuples = kps.enumerate_tuples();
        for t in &kps.tuples {
            let lambda = kps.lambda_unchecked(t);
            let lemma = t.0.contains(&0) || t.0.iter().all(|&j| j == 2);
            assert_eq!(lambda >= q as u64, lemma, "threshold characterisation broken for {t}");
            if lambda >= q as u64 {
                kps.delta.push(t.clone());
            } else {
                kps.delta_bar.push(t.clone());
            }
        }
        Ok(kps)
    }

    /// Lexicographic tuples over `{0,1,2}^t`, not all zero, with `j_i != 1`
    /// for duals without first associates.
    fn enumerate_tuples(&self) -> Vec<AssocTuple> {
        let t = self.duals.len();
        let total = 3usize.pow(t as u32);
        (1..total)
            .map(|mut code| {
                let mut js = vec![0u8; t];
                for slot in js.iter_mut().rev() {
                    *slot = (code % 3) as u8;
                    code /= 3;
                }
                AssocTuple(js)
            })
            .filter(|js| js.0.iter().zip(&self.duals).all(|(&j, d)| j != 1 || d.in_q()))
            .collect()
    }

    pub fn duals(&self) -> &[DualDesign] {
        &self.duals
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn t(&self) -> usize {
        self.duals.len()
    }

    /// Node count `prod b_i`.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Keys per node `sum k_i`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Key pool size `sum v_i`.
    pub fn v(&self) -> usize {
        self.v
    }

    pub fn node(&self, alphas: &[u32]) -> Result<NodeId> {
        if alphas.len() != self.t() {
            return Err(Error::param("node", format!("expected {} coordinates", self.t())));
        }
        for (coordinate, (&value, d)) in alphas.iter().zip(&self.duals).enumerate() {
            if value as usize >= d.b() {
                return Err(Error::NodeOutOfRange { coordinate, value, bound: d.b() });
            }
        }
        Ok(NodeId(alphas.to_vec()))
    }

    /// The node at mixed-radix position `index` (first coordinate most
    /// significant), so node indices follow lexicographic node order.
    pub fn node_at(&self, mut index: u64) -> NodeId {
        let mut alphas = vec![0u32; self.t()];
        for (slot, d) in alphas.iter_mut().zip(&self.duals).rev() {
            *slot = (index % d.b() as u64) as u32;
            index /= d.b() as u64;
        }
        NodeId(alphas)
    }

    pub fn node_index(&self, node: &NodeId) -> u64 {
        node.0.iter().zip(&self.duals).fold(0, |acc, (&a, d)| acc * d.b() as u64 + a as u64)
    }

    fn check(&self, node: &NodeId) -> Result<()> {
        self.node(&node.0).map(|_| ())
    }

    pub fn node_keys(&self, node: &NodeId) -> Result<Vec<KeyId>> {
        self.check(node)?;
        Ok(node
            .0
            .iter()
            .enumerate()
            .flat_map(|(design, &a)| {
                self.duals[design].block(a as usize).iter().map(move |&symbol| KeyId { design, symbol })
            })
            .collect())
    }

    /// Position of a key in the concatenated pool `0..v`.
    pub fn key_index(&self, key: KeyId) -> usize {
        self.key_offsets[key.design] + key.symbol as usize
    }

    pub fn key_at(&self, index: usize) -> KeyId {
        let design = self.key_offsets.partition_point(|&o| o <= index) - 1;
        KeyId { design, symbol: (index - self.key_offsets[design]) as u32 }
    }

    pub fn assoc_tuple(&self, a: &NodeId, b: &NodeId) -> Result<AssocTuple> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::IdenticalNodes);
        }
        Ok(AssocTuple(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.duals)
                .map(|((&x, &y), d)| d.block_class(x as usize, y as usize))
                .collect(),
        ))
    }

    /// Every associate tuple in `I`, lexicographically.
    pub fn tuples(&self) -> &[AssocTuple] {
        &self.tuples
    }

    pub fn is_in_i(&self, t: &AssocTuple) -> bool {
        self.tuples.binary_search(t).is_ok()
    }

    fn require_i(&self, t: &AssocTuple) -> Result<()> {
        if self.is_in_i(t) {
            Ok(())
        } else {
            Err(Error::NotInI(t.to_string()))
        }
    }

    /// Number of `t`-th associates of any node.
    pub fn n_count(&self, t: &AssocTuple) -> Result<u64> {
        self.require_i(t)?;
        Ok(t.0.iter().zip(&self.duals).map(|(&j, d)| d.theta()[j as usize]).product())
    }

    /// Number of nodes that are `u`-th associates of `A` and `w`-th of `A'`
    /// for any `j`-th associate pair `A, A'`.
    pub fn p_count(&self, j: &AssocTuple, u: &AssocTuple, w: &AssocTuple) -> Result<u64> {
        for t in [j, u, w] {
            self.require_i(t)?;
        }
        Ok(self.p_unchecked(j, u, w))
    }

    fn p_unchecked(&self, j: &AssocTuple, u: &AssocTuple, w: &AssocTuple) -> u64 {
        let mut p = 1;
        for (i, d) in self.duals.iter().enumerate() {
            p *= d.phi().get(j.0[i] as usize, u.0[i] as usize, w.0[i] as usize);
            if p == 0 {
                break;
            }
        }
        p
    }

    /// Keys shared by a `t`-th associate pair.
    pub fn lambda_count(&self, t: &AssocTuple) -> Result<u64> {
        self.require_i(t)?;
        Ok(self.lambda_unchecked(t))
    }

    fn lambda_unchecked(&self, t: &AssocTuple) -> u64 {
        t.0.iter()
            .zip(&self.duals)
            .map(|(&j, d)| match j {
                0 => d.k() as u64,
                1 => 0,
                _ => 1,
            })
            .sum()
    }

    /// Tuples whose pairs share at least `q` keys.
    pub fn delta(&self) -> &[AssocTuple] {
        &self.delta
    }

    pub fn delta_bar(&self) -> &[AssocTuple] {
        &self.delta_bar
    }

    pub fn in_delta(&self, t: &AssocTuple) -> bool {
        self.delta.binary_search(t).is_ok()
    }

    /// Number of third nodes directly linked to both members of a `t`-th
    /// associate pair, `t` outside `Delta`.
    pub fn mu(&self, t: &AssocTuple) -> Result<u64> {
        if self.delta_bar.binary_search(t).is_err() {
            return Err(Error::NotInDeltaBar(t.to_string()));
        }
        Ok(self.mu_unchecked(t))
    }

    fn mu_unchecked(&self, t: &AssocTuple) -> u64 {
        self.delta
            .iter()
            .flat_map(|u| self.delta.iter().map(move |w| self.p_unchecked(t, u, w)))
            .sum()
    }

    pub fn mu_table(&self) -> Vec<(AssocTuple, u64)> {
        self.delta_bar.iter().map(|t| (t.clone(), self.mu_unchecked(t))).collect()
    }

    pub fn n_table(&self) -> Vec<(AssocTuple, u64)> {
        self.tuples
            .iter()
            .map(|t| (t.clone(), self.n_count(t).expect("enumerated tuple")))
            .collect()
    }
}
