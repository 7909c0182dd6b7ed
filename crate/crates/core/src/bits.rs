//! Fixed-length bit vector shared by edge and vertex subset types.

use smallvec::SmallVec;

/// A fixed-length bit vector. Lengths up to 128 stay inline, which keeps
/// the per-step state clones in the samplers allocation-free.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits {
    words: SmallVec<[u64; 2]>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: smallvec::smallvec![0u64; len.div_ceil(64).max(1)],
            len,
        }
    }

    /// Interprets `index` little-endian: bit i of `index` becomes bit i.
    pub fn from_index(len: usize, index: u64) -> Self {
        assert!(len <= 64, "index form only supported up to 64 bits");
        assert!(len == 64 || index < (1u64 << len), "index out of range");
        let mut b = Bits::new(len);
        if !b.words.is_empty() {
            b.words[0] = index;
        }
        b
    }

    /// Little-endian integer value; requires len <= 63.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 63, "index form only supported up to 63 bits");
        if self.words.is_empty() {
            0
        } else {
            self.words[0]
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn fill_ones(&mut self) {
        for w in self.words.iter_mut() {
            *w = u64::MAX;
        }
        self.trim_tail();
    }

    fn trim_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        if self.len == 0 {
            for w in self.words.iter_mut() {
                *w = 0;
            }
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= *b;
        }
    }

    pub fn xor_count(&self, other: &Bits) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset_of(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn iter_ones(&self) -> OnesIter<'_> {
        OnesIter {
            bits: self,
            word_idx: 0,
            current: if self.words.is_empty() { 0 } else { self.words[0] },
        }
    }

    /// Characters in position order: char i is bit i.
    pub fn to_bitstring(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Option<Self> {
        let mut b = Bits::new(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => b.set(i, true),
                '0' => {}
                _ => return None,
            }
        }
        Some(b)
    }
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_bitstring())
    }
}

pub(crate) struct OnesIter<'a> {
    bits: &'a Bits,
    word_idx: usize,
    current: u64,
}

impl Iterator for OnesIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                let pos = self.word_idx * 64 + tz;
                return if pos < self.bits.len() { Some(pos) } else { None };
            }
            self.word_idx += 1;
            if self.word_idx >= self.bits.words.len() {
                return None;
            }
            self.current = self.bits.words[self.word_idx];
        }
    }
}
