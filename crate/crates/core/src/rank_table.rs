/// `(ℓ, max 1/m(L), max d_L)` over class-number-one lattices of rank `ℓ`.
pub const RANK_TABLE: [(usize, u64, u64); 8] = [
    (3, 48, 1_728),
    (4, 1_152, 574_992),
    (5, 3_840, 9_834_496),
    (6, 103_680, 6_436_343),
    (7, 2_903_040, 191_102_976),
    (8, 696_729_600, 4_782_969),
    (9, 1_393_459_200, 16_777_216),
    (10, 8_360_755_200, 19_683),
];
