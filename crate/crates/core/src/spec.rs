//! JSON descriptions of designs and analysis runs.
//!
//! ```json
//! {"design": "pbib2", "scheme": {"scheme": "gd", "a": 2, "f": 21}}
//! {"design": "latin_pbib", "p": 17, "k": 12}
//! {"design": "sts", "g": 28}
//! {"design": "explicit", "v": 9, "blocks": [[3, 6, 1], [6, 0, 4]]}
//! ```
//!
//! Symbols in explicit designs and Latin squares are 0-based.

use serde::{Deserialize, Serialize};

use crate::design::{
    latin_square_pbib, pbib_second_associates, steiner_triple_bose, steiner_triple_skolem, BlockDesign,
    DualDesign,
};
use crate::error::{Error, Result};
use crate::kps::Kps;
use crate::metrics::{BetaMode, FailMode};
use crate::scheme::{check_mols, cyclic_mols, AssociationScheme, LatinSquare};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeSpec {
    Gd {
        a: usize,
        f: usize,
    },
    Triangular {
        m: usize,
    },
    Latin {
        p: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        squares: Option<Vec<Vec<Vec<u32>>>>,
    },
}

fn squares_for(p: usize, k: usize, squares: &Option<Vec<Vec<Vec<u32>>>>) -> Result<Vec<LatinSquare>> {
    if k < 2 {
        return Err(Error::param("k", "need k >= 2"));
    }
    match squares {
        Some(rows) => {
            if rows.len() != k - 2 {
                return Err(Error::param("squares", format!("expected k - 2 = {} squares", k - 2)));
            }
            check_mols(p, rows)
        }
        None => cyclic_mols(p, k - 2),
    }
}

impl SchemeSpec {
    pub fn build(&self) -> Result<AssociationScheme> {
        match self {
            SchemeSpec::Gd { a, f } => AssociationScheme::group_divisible(*a, *f),
            SchemeSpec::Triangular { m } => AssociationScheme::triangular(*m),
            SchemeSpec::Latin { p, k, squares } => {
                AssociationScheme::latin_square(*p, *k, &squares_for(*p, *k, squares)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "design", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignSpec {
    /// Second-associate pairing of a scheme.
    Pbib2 { scheme: SchemeSpec },
    LatinPbib {
        p: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        squares: Option<Vec<Vec<Vec<u32>>>>,
    },
    /// Steiner triple system with replication `g`.
    Sts { g: usize },
    Explicit { v: usize, blocks: Vec<Vec<u32>> },
}

impl DesignSpec {
    pub fn build(&self) -> Result<BlockDesign> {
        match self {
            DesignSpec::Pbib2 { scheme } => pbib_second_associates(&scheme.build()?),
            DesignSpec::LatinPbib { p, k, squares } => latin_square_pbib(*p, *k, &squares_for(*p, *k, squares)?),
            DesignSpec::Sts { g } if g % 3 == 1 => steiner_triple_bose(*g),
            DesignSpec::Sts { g } if g % 3 == 2 => Err(Error::param("g", "Steiner triple systems need g = 0 or 1 mod 3")),
            DesignSpec::Sts { g } => steiner_triple_skolem(*g),
            DesignSpec::Explicit { v, blocks } => BlockDesign::explicit(*v, blocks.clone()),
        }
    }

    pub fn explicit(d: &BlockDesign) -> Self {
        DesignSpec::Explicit { v: d.v_star(), blocks: d.blocks().to_vec() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_shards")]
    pub shards: u32,
}

fn default_trials() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    42
}

fn default_shards() -> u32 {
    8
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { trials: default_trials(), seed: default_seed(), shards: default_shards() }
    }
}

/// A full analysis request. `q` defaults to the number of designs and must
/// equal it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub designs: Vec<DesignSpec>,
    #[serde(default)]
    pub q: Option<usize>,
    #[serde(default)]
    pub eta: Vec<u32>,
    #[serde(default)]
    pub s: Vec<u32>,
    #[serde(default)]
    pub beta_mode: BetaMode,
    #[serde(default)]
    pub fail_mode: FailMode,
    #[serde(default)]
    pub oracle: OracleSpec,
}

impl RunSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn threshold(&self) -> Result<usize> {
        let t = self.designs.len();
        match self.q {
            Some(q) if q != t => Err(Error::ArityMismatch { q, t }),
            _ if t == 0 => Err(Error::Spec("at least one design is required".into())),
            _ => Ok(t),
        }
    }

    pub fn build_designs(&self) -> Result<Vec<BlockDesign>> {
        self.designs.iter().map(DesignSpec::build).collect()
    }

    pub fn build_kps(&self) -> Result<Kps> {
        let q = self.threshold()?;
        let duals = self
            .build_designs()?
            .iter()
            .map(BlockDesign::dual)
            .collect::<Result<Vec<DualDesign>>>()?;
        Kps::build(duals, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_design_form() {
        let specs = [
            r#"{"design":"pbib2","scheme":{"scheme":"gd","a":2,"f":3}}"#,
            r#"{"design":"pbib2","scheme":{"scheme":"triangular","m":5}}"#,
            r#"{"design":"latin_pbib","p":5,"k":3}"#,
            r#"{"design":"latin_pbib","p":3,"k":3,"squares":[[[0,1,2],[1,2,0],[2,0,1]]]}"#,
            r#"{"design":"sts","g":4}"#,
            r#"{"design":"sts","g":3}"#,
            r#"{"design":"explicit","v":3,"blocks":[[0,1],[1,2],[0,2]]}"#,
        ];
        for s in specs {
            DesignSpec::from_json(s).unwrap().build().unwrap();
        }
    }

    #[test]
    fn explicit_round_trip() {
        let d = DesignSpec::Sts { g: 7 }.build().unwrap();
        let json = serde_json::to_string(&DesignSpec::explicit(&d)).unwrap();
        let back = DesignSpec::from_json(&json).unwrap().build().unwrap();
        assert_eq!(back.blocks(), d.blocks());
        assert_eq!(back.role(), d.role());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(DesignSpec::from_json(r#"{"design":"bogus"}"#), Err(Error::Spec(_))));
        let bad_square = r#"{"design":"latin_pbib","p":3,"k":3,"squares":[[[0,1,2],[0,1,2],[2,0,1]]]}"#;
        assert!(DesignSpec::from_json(bad_square).unwrap().build().unwrap_err().is_design_error());
        let run = RunSpec::from_json(r#"{"designs":[{"design":"sts","g":4}],"q":2}"#).unwrap();
        assert_eq!(run.threshold(), Err(Error::ArityMismatch { q: 2, t: 1 }));
    }

    #[test]
    fn toy_run_spec() {
        let run = RunSpec::from_json(
            r#"{"designs":[{"design":"pbib2","scheme":{"scheme":"gd","a":2,"f":3}},{"design":"sts","g":4}],
                "eta":[1,2],"s":[1]}"#,
        )
        .unwrap();
        let kps = run.build_kps().unwrap();
        assert_eq!((kps.n(), kps.k()), (54, 7));
        assert_eq!(run.oracle, OracleSpec::default());
    }
}
