//! Binary two-way channels with additive noise.
//!
//! Per channel use both terminals send a bit and both receive a bit:
//!
//! - binary-additive (BA):       `y_j = x1 ^ x2 ^ z_j`
//! - binary-multiplying (BM):    `y_j = (x1 & x2) ^ z_j`
//!
//! with independent noise bits `z_j ~ Bernoulli(eps_j)`. Because `z1` and
//! `z2` are independent, the joint kernel is the product of its two
//! marginals, and N-use tuple probabilities are products over uses.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest tuple supported (rate in bits per source sample).
pub const MAX_TUPLE_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    One,
    Two,
}

impl Terminal {
    pub fn other(self) -> Terminal {
        match self {
            Terminal::One => Terminal::Two,
            Terminal::Two => Terminal::One,
        }
    }

    pub(crate) fn slot(self) -> usize {
        match self {
            Terminal::One => 0,
            Terminal::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    BinaryAdditive,
    BinaryMultiplying,
}

impl ChannelKind {
    /// Noise-free output for one channel use.
    pub fn combine(self, x1: u8, x2: u8) -> u8 {
        match self {
            ChannelKind::BinaryAdditive => x1 ^ x2,
            ChannelKind::BinaryMultiplying => x1 & x2,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ChannelKind::BinaryAdditive => "ba",
            ChannelKind::BinaryMultiplying => "bm",
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ba" | "binary-additive" => Ok(ChannelKind::BinaryAdditive),
            "bm" | "binary-multiplying" => Ok(ChannelKind::BinaryMultiplying),
            other => Err(Error::Config(format!("unknown channel kind `{other}`"))),
        }
    }
}

/// Crossover probabilities of the noise at terminal 1 and terminal 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePair {
    pub eps1: f64,
    pub eps2: f64,
}

impl NoisePair {
    pub const NOISELESS: NoisePair = NoisePair { eps1: 0.0, eps2: 0.0 };

    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let pair = Self { eps1, eps2 };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        for eps in [self.eps1, self.eps2] {
            if !(0.0..0.5).contains(&eps) {
                return Err(Error::InvalidNoise(eps));
            }
        }
        Ok(())
    }

    pub fn at(&self, t: Terminal) -> f64 {
        match t {
            Terminal::One => self.eps1,
            Terminal::Two => self.eps2,
        }
    }
}

/// Single-use transition law of a binary TWC.
#[derive(Debug, Clone, PartialEq)]
pub struct TwcKernel {
    kind: ChannelKind,
    noise: NoisePair,
    /// `joint[x1][x2][y1][y2]`
    joint: [[[[f64; 2]; 2]; 2]; 2],
    /// `marg[terminal][x1][x2][y]`
    marg: [[[[f64; 2]; 2]; 2]; 2],
}

impl TwcKernel {
    pub fn new(kind: ChannelKind, noise: NoisePair) -> Result<Self> {
        noise.validate()?;
        let mut marg = [[[[0.0; 2]; 2]; 2]; 2];
        for (t, eps) in [noise.eps1, noise.eps2].into_iter().enumerate() {
            for x1 in 0..2u8 {
                for x2 in 0..2u8 {
                    let clean = kind.combine(x1, x2);
                    for y in 0..2u8 {
                        marg[t][x1 as usize][x2 as usize][y as usize] =
                            if y == clean { 1.0 - eps } else { eps };
                    }
                }
            }
        }
        let mut joint = [[[[0.0; 2]; 2]; 2]; 2];
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        joint[x1][x2][y1][y2] = marg[0][x1][x2][y1] * marg[1][x1][x2][y2];
                    }
                }
            }
        }
        Ok(Self {
            kind,
            noise,
            joint,
            marg,
        })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn noise(&self) -> NoisePair {
        self.noise
    }

    /// P(y1, y2 | x1, x2) for one channel use.
    pub fn joint(&self, x1: u8, x2: u8, y1: u8, y2: u8) -> f64 {
        self.joint[x1 as usize][x2 as usize][y1 as usize][y2 as usize]
    }

    /// P(y_t | x1, x2) at the receiver of terminal `t`.
    pub fn marginal(&self, t: Terminal, x1: u8, x2: u8, y: u8) -> f64 {
        self.marg[t.slot()][x1 as usize][x2 as usize][y as usize]
    }

    /// Draws `(y1, y2)` for one channel use from the joint law.
    pub fn sample_use<R: Rng + ?Sized>(&self, x1: u8, x2: u8, rng: &mut R) -> (u8, u8) {
        let row = &self.joint[x1 as usize][x2 as usize];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for y1 in 0..2u8 {
            for y2 in 0..2u8 {
                acc += row[y1 as usize][y2 as usize];
                if u < acc {
                    return (y1, y2);
                }
            }
        }
        // u landed within rounding of 1: return the last reachable outcome.
        let mut last = (0, 0);
        for y1 in 0..2u8 {
            for y2 in 0..2u8 {
                if row[y1 as usize][y2 as usize] > 0.0 {
                    last = (y1, y2);
                }
            }
        }
        last
    }
}

/// An N-tuple of binary channel symbols, position 0 being the first channel use.
///
/// Stored as an integer whose most significant of the `len` bits is the
/// first use, so integer order coincides with lexicographic tuple order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple {
    index: u32,
    len: u8,
}

impl IndexTuple {
    pub fn new(index: usize, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_TUPLE_LEN {
            return Err(Error::Config(format!(
                "tuple length {len} outside 1..={MAX_TUPLE_LEN}"
            )));
        }
        if index >= 1 << len {
            return Err(Error::IndexOutOfRange {
                index,
                len: 1 << len,
            });
        }
        Ok(Self {
            index: index as u32,
            len: len as u8,
        })
    }

    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for &s in symbols {
            if s > 1 {
                return Err(Error::Config(format!("non-binary symbol {s}")));
            }
            index = (index << 1) | s as usize;
        }
        Self::new(index, symbols.len())
    }

    /// The constant tuple `(s, s, ..., s)`.
    pub fn constant(symbol: u8, len: usize) -> Result<Self> {
        Self::from_symbols(&vec![symbol; len])
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn symbol(&self, pos: usize) -> u8 {
        ((self.index >> (self.len as usize - 1 - pos)) & 1) as u8
    }

    pub fn symbols(&self) -> Vec<u8> {
        (0..self.len()).map(|p| self.symbol(p)).collect()
    }

    /// Concatenation in transmission order.
    pub fn concat(&self, tail: &IndexTuple) -> Result<Self> {
        Self::new(
            (self.index() << tail.len()) | tail.index(),
            self.len() + tail.len(),
        )
    }

    pub fn bit_string(&self) -> String {
        self.symbols().iter().map(|s| char::from(b'0' + s)).collect()
    }
}

fn check_same_len(a: &IndexTuple, b: &IndexTuple) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// P(y_which | x1, x2) over N memoryless uses.
pub fn tuple_marginal(
    kernel: &TwcKernel,
    x1: &IndexTuple,
    x2: &IndexTuple,
    y: &IndexTuple,
    which: Terminal,
) -> Result<f64> {
    check_same_len(x1, x2)?;
    check_same_len(x1, y)?;
    Ok((0..x1.len())
        .map(|i| kernel.marginal(which, x1.symbol(i), x2.symbol(i), y.symbol(i)))
        .product())
}

/// Draws both received tuples for the transmitted pair `(x1, x2)`.
pub fn sample_outputs<R: Rng + ?Sized>(
    kernel: &TwcKernel,
    x1: &IndexTuple,
    x2: &IndexTuple,
    rng: &mut R,
) -> Result<(IndexTuple, IndexTuple)> {
    check_same_len(x1, x2)?;
    let n = x1.len();
    let (mut y1, mut y2) = (0usize, 0usize);
    for i in 0..n {
        let (a, b) = kernel.sample_use(x1.symbol(i), x2.symbol(i), rng);
        y1 = (y1 << 1) | a as usize;
        y2 = (y2 << 1) | b as usize;
    }
    Ok((IndexTuple::new(y1, n)?, IndexTuple::new(y2, n)?))
}

/// Dense N-use receive tables, oriented per terminal.
///
/// For terminal `t` with local input `xl` and other input `xo`,
/// `local(t)[(xl * m + xo) * m + y]` is the probability that terminal `t`
/// itself receives `y`, and `remote(t)[..]` that the other terminal does.
#[derive(Debug, Clone)]
pub struct TupleKernel {
    kernel: TwcKernel,
    len: usize,
    local: [Vec<f64>; 2],
    remote: [Vec<f64>; 2],
}

impl TupleKernel {
    pub fn new(kernel: &TwcKernel, len: usize) -> Result<Self> {
        IndexTuple::new(0, len)?;
        let m = 1usize << len;
        // rx[r][(x1 * m + x2) * m + y] = P(Y_r = y | x1, x2)
        let mut rx = [vec![0.0; m * m * m], vec![0.0; m * m * m]];
        for (r, term) in [Terminal::One, Terminal::Two].into_iter().enumerate() {
            for x1 in 0..m {
                for x2 in 0..m {
                    for y in 0..m {
                        let mut p = 1.0;
                        for i in 0..len {
                            let bit = |v: usize| ((v >> (len - 1 - i)) & 1) as u8;
                            p *= kernel.marginal(term, bit(x1), bit(x2), bit(y));
                        }
                        rx[r][(x1 * m + x2) * m + y] = p;
                    }
                }
            }
        }
        let transpose = |table: &[f64]| {
            let mut out = vec![0.0; m * m * m];
            for a in 0..m {
                for b in 0..m {
                    out[(a * m + b) * m..(a * m + b + 1) * m]
                        .copy_from_slice(&table[(b * m + a) * m..(b * m + a + 1) * m]);
                }
            }
            out
        };
        let local = [rx[0].clone(), transpose(&rx[1])];
        let remote = [rx[1].clone(), transpose(&rx[0])];
        Ok(Self {
            kernel: kernel.clone(),
            len,
            local,
            remote,
        })
    }

    pub fn kernel(&self) -> &TwcKernel {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn tuples(&self) -> usize {
        1 << self.len
    }

    pub fn local(&self, t: Terminal) -> &[f64] {
        &self.local[t.slot()]
    }

    pub fn remote(&self, t: Terminal) -> &[f64] {
        &self.remote[t.slot()]
    }

    /// P(Y_receiver = y | x1, x2) by integer tuple index.
    pub fn prob(&self, receiver: Terminal, x1: usize, x2: usize, y: usize) -> f64 {
        let m = self.tuples();
        self.local[receiver.slot()]
            [match receiver {
                Terminal::One => (x1 * m + x2) * m + y,
                Terminal::Two => (x2 * m + x1) * m + y,
            }]
    }
}
