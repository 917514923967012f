//! Small reference designs used throughout the tests and the CLI.

use crate::design::{pbib_second_associates, BlockDesign};
use crate::kps::Kps;
use crate::scheme::AssociationScheme;

/// The 9-symbol, 12-block Steiner triple system in its textbook block
/// order (symbols 0-based).
pub fn nine_point_bib() -> BlockDesign {
    const BLOCKS: [[u32; 3]; 12] = [
        [4, 7, 2],
        [7, 1, 5],
        [1, 4, 8],
        [5, 8, 3],
        [8, 2, 6],
        [2, 5, 9],
        [6, 9, 1],
        [9, 3, 4],
        [3, 6, 7],
        [1, 2, 3],
        [4, 5, 6],
        [7, 8, 9],
    ];
    let blocks = BLOCKS.iter().map(|b| b.iter().map(|x| x - 1).collect()).collect();
    BlockDesign::explicit(9, blocks).expect("fixed design is a BIB")
}

/// Second-associate pairing of the group divisible scheme with 2 groups of 3.
pub fn gd_pairing() -> BlockDesign {
    let scheme = AssociationScheme::group_divisible(2, 3).expect("valid parameters");
    pbib_second_associates(&scheme).expect("valid scheme")
}

/// The 54-node, 7-key, `q = 2` scheme built from the duals of
/// [`gd_pairing`] and [`nine_point_bib`].
pub fn toy_kps() -> Kps {
    let duals = vec![
        gd_pairing().dual().expect("dual of a PBIB"),
        nine_point_bib().dual().expect("dual of a BIB"),
    ];
    Kps::build(duals, 2).expect("valid toy scheme")
}
