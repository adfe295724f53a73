//! Two fully worked `K = 10, D = 5, L = 2` instances over `F_11`.
//!
//! Used as golden vectors by the test suites and the CLI sample files.
//! Indices here are 0-based; the printed instances use 1-based `W = {2,4,5,7,8}`.

pub const Q: u64 = 11;
pub const K: usize = 10;
pub const D: usize = 5;
pub const L: usize = 2;

/// Demand support (0-based) shared by both instances.
pub const SUPPORT: [usize; 5] = [1, 3, 4, 6, 7];

/// MDS instance: `V` is the generator of a `[5, 2]` GRS code.
pub mod mds {
    pub const V: [[u64; 5]; 2] = [[1, 3, 2, 1, 6], [3, 10, 7, 4, 8]];
    pub const MULTIPLIERS: [u64; 5] = [1, 3, 2, 1, 6];
    pub const POINTS: [u64; 5] = [3, 7, 9, 4, 5];

    /// Parity check of the code generated by `V`.
    pub const LAMBDA: [[u64; 5]; 3] = [[3, 10, 8, 8, 7], [9, 4, 6, 10, 2], [5, 6, 10, 7, 10]];
    pub const DUAL_MULTIPLIERS: [u64; 5] = [3, 10, 8, 8, 7];

    pub const EXTRA_MULTIPLIERS: [u64; 5] = [3, 5, 1, 1, 4];
    pub const EXTRA_POINTS: [u64; 5] = [6, 1, 10, 2, 8];
    /// `placement[j]` is the (0-based) column of parameter `j`.
    pub const PLACEMENT: [usize; 10] = [1, 3, 4, 6, 7, 0, 2, 5, 8, 9];

    pub const H: [[u64; 10]; 3] = [
        [3, 3, 5, 10, 8, 1, 8, 7, 1, 4],
        [7, 9, 5, 4, 6, 10, 10, 2, 2, 10],
        [9, 5, 5, 6, 10, 1, 7, 10, 4, 3],
    ];

    /// Generator multipliers in parameter order `alpha_1 .. alpha_10`.
    pub const ALPHAS: [u64; 10] = [10, 7, 3, 5, 4, 9, 2, 1, 9, 9];

    pub const G: [[u64; 10]; 7] = [
        [9, 10, 2, 7, 3, 1, 5, 4, 9, 9],
        [10, 8, 2, 5, 5, 10, 9, 9, 7, 6],
        [5, 2, 2, 2, 1, 1, 3, 1, 3, 4],
        [8, 6, 2, 3, 9, 10, 1, 5, 6, 10],
        [4, 7, 2, 10, 4, 1, 4, 3, 1, 3],
        [2, 10, 2, 4, 3, 10, 5, 4, 2, 2],
        [1, 8, 2, 6, 5, 1, 9, 9, 4, 5],
    ];

    pub const C1: [u64; 7] = [8, 1, 8, 9, 6, 1, 0];
    pub const C2: [u64; 7] = [0, 8, 1, 8, 9, 6, 1];
}

/// Full-rank, non-MDS instance for the augmented construction.
pub mod augmented {
    pub const V: [[u64; 5]; 2] = [[3, 1, 6, 2, 6], [10, 4, 8, 7, 9]];

    pub const U: [[u64; 10]; 2] = [
        [0, 3, 0, 1, 6, 0, 2, 6, 0, 0],
        [0, 10, 0, 4, 8, 0, 7, 9, 0, 0],
    ];

    pub const M: [[u64; 10]; 5] = [
        [2, 1, 4, 7, 9, 1, 10, 5, 4, 3],
        [6, 5, 3, 5, 3, 6, 10, 6, 10, 6],
        [7, 3, 5, 2, 1, 3, 10, 5, 3, 1],
        [10, 4, 1, 3, 4, 7, 10, 6, 2, 2],
        [8, 9, 9, 10, 5, 9, 10, 5, 5, 4],
    ];

    pub const G_HAT: [[u64; 10]; 7] = [
        [0, 3, 0, 1, 6, 0, 2, 6, 0, 0],
        [0, 10, 0, 4, 8, 0, 7, 9, 0, 0],
        [2, 1, 4, 7, 9, 1, 10, 5, 4, 3],
        [6, 5, 3, 5, 3, 6, 10, 6, 10, 6],
        [7, 3, 5, 2, 1, 3, 10, 5, 3, 1],
        [10, 4, 1, 3, 4, 7, 10, 6, 2, 2],
        [8, 9, 9, 10, 5, 9, 10, 5, 5, 4],
    ];

    pub const G: [[u64; 10]; 7] = [
        [7, 10, 7, 7, 9, 1, 10, 0, 10, 10],
        [4, 2, 0, 9, 7, 6, 6, 0, 8, 7],
        [7, 2, 6, 7, 10, 2, 9, 4, 8, 4],
        [8, 10, 10, 3, 7, 2, 5, 6, 4, 7],
        [1, 1, 3, 2, 0, 2, 8, 5, 3, 3],
        [7, 2, 9, 6, 9, 5, 5, 8, 6, 9],
        [7, 10, 8, 7, 3, 2, 5, 10, 6, 3],
    ];
}
