use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Register tag `d`. The simple space uses the first four.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    Start,
    Bot,
    Zero,
    One,
    Right,
    Left,
    Both,
}

impl Tag {
    pub const SIMPLE: [Tag; 4] = [Tag::Start, Tag::Bot, Tag::Zero, Tag::One];
    pub const GENERAL: [Tag; 7] = [Tag::Start, Tag::Bot, Tag::Zero, Tag::One, Tag::Right, Tag::Left, Tag::Both];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Tag::Start => "∘",
            Tag::Bot => "⊥",
            Tag::Zero => "0",
            Tag::One => "1",
            Tag::Right => "→",
            Tag::Left => "←",
            Tag::Both => "↔",
        }
    }
}

/// `|d, i, b⟩` with `i ∈ 0..N`; index `(d·N + i)·2 + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleSpace {
    pub n: usize,
}

impl SimpleSpace {
    pub fn dim(&self) -> usize {
        4 * self.n * 2
    }

    pub fn index(&self, d: Tag, i: usize, b: usize) -> usize {
        debug_assert!(d.ordinal() < 4 && i < self.n && b < 2);
        (d.ordinal() * self.n + i) * 2 + b
    }

    pub fn decode(&self, k: usize) -> Result<(Tag, usize, usize)> {
        if k >= self.dim() {
            return Err(Error::OutOfRange { index: k, len: self.dim() });
        }
        let b = k % 2;
        let i = (k / 2) % self.n;
        Ok((Tag::SIMPLE[k / (2 * self.n)], i, b))
    }
}

/// `|d, i, b, a, z, t⟩` with `i ∈ 0..=N`. Label `i = 0` is the start
/// position; input `j` of the subroutine sits at `i = j + 1`.
///
/// Index is `((((d·(N+1) + i)·2 + b)·2 + a)·|Z| + z)·(T+1) + t`, so for fixed
/// `(d, i, b)` the block of `(a, z, t)` is contiguous and the local
/// subroutine index `a·|Z| + z` maps to `base + (a·|Z| + z)·(T+1) + t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralSpace {
    pub n: usize,
    pub workspace: usize,
    pub steps: usize,
}

impl GeneralSpace {
    pub fn dim(&self) -> usize {
        7 * (self.n + 1) * 2 * 2 * self.workspace * (self.steps + 1)
    }

    fn block(&self) -> usize {
        2 * self.workspace * (self.steps + 1)
    }

    pub fn base(&self, d: Tag, i: usize, b: usize) -> usize {
        debug_assert!(i <= self.n && b < 2);
        ((d.ordinal() * (self.n + 1) + i) * 2 + b) * self.block()
    }

    pub fn index(&self, d: Tag, i: usize, b: usize, a: usize, z: usize, t: usize) -> usize {
        debug_assert!(a < 2 && z < self.workspace && t <= self.steps);
        self.base(d, i, b) + (a * self.workspace + z) * (self.steps + 1) + t
    }

    /// Index of `|d, i, b⟩ ⊗ |local⟩ ⊗ |t⟩`, `local = a·|Z| + z`.
    pub fn local_index(&self, d: Tag, i: usize, b: usize, local: usize, t: usize) -> usize {
        self.base(d, i, b) + local * (self.steps + 1) + t
    }

    pub fn decode(&self, k: usize) -> Result<(Tag, usize, usize, usize, usize, usize)> {
        if k >= self.dim() {
            return Err(Error::OutOfRange { index: k, len: self.dim() });
        }
        let t = k % (self.steps + 1);
        let rest = k / (self.steps + 1);
        let z = rest % self.workspace;
        let rest = rest / self.workspace;
        let a = rest % 2;
        let rest = rest / 2;
        let b = rest % 2;
        let rest = rest / 2;
        let i = rest % (self.n + 1);
        Ok((Tag::GENERAL[rest / (self.n + 1)], i, b, a, z, t))
    }
}
