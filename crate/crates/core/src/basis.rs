//! Labelling of the eight computational basis states and the eight sign
//! outcomes.
//!
//! Index `i` in `0..8` is read big-endian as the bit string `abc`, player A
//! being the leftmost bit. Bit `0` is the `|0⟩` eigenstate of `σ_z`, i.e. the
//! observable value `+1`. The same index therefore labels both the basis
//! state `|abc⟩` and the sign outcome, and the resulting order
//!
//! ```text
//! 0 (+,+,+)  1 (+,+,-)  2 (+,-,+)  3 (+,-,-)
//! 4 (-,+,+)  5 (-,+,-)  6 (-,-,+)  7 (-,-,-)
//! ```
//!
//! is the row order shared by joint distributions and payoff tables.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Dimension of the three-qubit Hilbert space.
pub const DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    A,
    B,
    C,
}

impl Player {
    pub const ALL: [Player; 3] = [Player::A, Player::B, Player::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Player {
        Player::ALL[i]
    }

    /// Bit position of this player's qubit inside a basis index.
    fn shift(self) -> u32 {
        2 - self.index() as u32
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Player::A => "A",
            Player::B => "B",
            Player::C => "C",
        };
        f.write_str(s)
    }
}

/// The three unordered pairs of players, in the order the pair marginals
/// are stored: `P(ab)`, `P(bc)`, `P(ac)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    AB,
    BC,
    AC,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::AB, Pair::BC, Pair::AC];

    pub fn players(self) -> (Player, Player) {
        match self {
            Pair::AB => (Player::A, Player::B),
            Pair::BC => (Player::B, Player::C),
            Pair::AC => (Player::A, Player::C),
        }
    }
}

/// `true` when `player` observes `+1` in basis state / outcome `index`.
pub fn is_plus(index: usize, player: Player) -> bool {
    (index >> player.shift()) & 1 == 0
}

/// `±1` value observed by `player` in outcome `index`.
pub fn sign(index: usize, player: Player) -> f64 {
    if is_plus(index, player) {
        1.0
    } else {
        -1.0
    }
}

/// Basis index for the given per-player values (`true` = `+1`).
pub fn index_of(a_plus: bool, b_plus: bool, c_plus: bool) -> usize {
    ((!a_plus as usize) << 2) | ((!b_plus as usize) << 1) | (!c_plus as usize)
}

/// Ket label such as `"011"`.
pub fn ket_label(index: usize) -> String {
    format!("{:03b}", index)
}

/// Outcome label in the `(+1,-1,+1)` style.
pub fn outcome_label(index: usize) -> String {
    let parts: Vec<&str> = Player::ALL
        .iter()
        .map(|&p| if is_plus(index, p) { "+1" } else { "-1" })
        .collect();
    format!("({})", parts.join(","))
}
