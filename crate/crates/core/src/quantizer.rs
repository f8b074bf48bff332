//! Encoders, side-information decoders, and the optimality-condition updates.
//!
//! Conventions: terminal `t`'s partition maps its own source cell to the
//! tuple it transmits; terminal `t`'s codebook maps (received tuple, own
//! source cell) to an estimate of the *other* terminal's source. So `c1`
//! estimates `U2` and `c2` estimates `U1`.
//!
//! The double output sum over `(y1, y2)` in the distortion splits into a
//! term in `y2` only and a term in `y1` only, so every computation here
//! uses the per-receiver tuple marginals of [`TupleKernel`].

use std::collections::BTreeSet;

use crate::channel::{IndexTuple, Terminal, TupleKernel};
use crate::error::{Error, Result};
use crate::par;
use crate::source::SourceGrid;

/// Encoder: source grid cell -> transmitted tuple index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    len: usize,
    cells: Vec<u16>,
}

impl Partition {
    pub fn new(len: usize, cells: Vec<usize>) -> Result<Self> {
        IndexTuple::new(0, len)?;
        let m = 1usize << len;
        if let Some(&bad) = cells.iter().find(|&&c| c >= m) {
            return Err(Error::IndexOutOfRange { index: bad, len: m });
        }
        Ok(Self {
            len,
            cells: cells.into_iter().map(|c| c as u16).collect(),
        })
    }

    /// Every cell sends the same tuple.
    pub fn constant(tuple: IndexTuple, points: usize) -> Self {
        Self {
            len: tuple.len(),
            cells: vec![tuple.index() as u16; points],
        }
    }

    /// Tuple length N (channel uses per source sample).
    pub fn tuple_len(&self) -> usize {
        self.len
    }

    pub fn tuples(&self) -> usize {
        1 << self.len
    }

    pub fn points(&self) -> usize {
        self.cells.len()
    }

    /// Tuple index assigned to `cell` (unchecked).
    pub fn index_of(&self, cell: usize) -> usize {
        self.cells[cell] as usize
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().map(|&c| c as usize)
    }

    pub fn encode(&self, cell: usize) -> Result<IndexTuple> {
        let idx = *self.cells.get(cell).ok_or(Error::IndexOutOfRange {
            index: cell,
            len: self.cells.len(),
        })?;
        IndexTuple::new(idx as usize, self.len)
    }

    /// Tuple indices with a nonempty preimage.
    pub fn used_indices(&self) -> BTreeSet<usize> {
        self.indices().collect()
    }
}

/// Decoder table `c[y, u]`: received tuple `y` and local source cell `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    len: usize,
    points: usize,
    /// Row-major by received tuple: `values[y * points + cell]`.
    values: Vec<f64>,
}

impl Codebook {
    pub fn new(len: usize, points: usize, values: Vec<f64>) -> Result<Self> {
        IndexTuple::new(0, len)?;
        let expected = (1 << len) * points;
        if values.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidCodebook(format!(
                "non-finite value at entry {pos}"
            )));
        }
        Ok(Self {
            len,
            points,
            values,
        })
    }

    /// Codebook holding `value` everywhere.
    pub fn filled(len: usize, points: usize, value: f64) -> Self {
        Self {
            len,
            points,
            values: vec![value; (1 << len) * points],
        }
    }

    pub fn tuple_len(&self) -> usize {
        self.len
    }

    pub fn tuples(&self) -> usize {
        1 << self.len
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unchecked lookup by tuple index.
    pub fn value(&self, y: usize, cell: usize) -> f64 {
        self.values[y * self.points + cell]
    }

    /// Reconstruction levels for received tuple `y` across all local cells.
    pub fn column(&self, y: usize) -> &[f64] {
        &self.values[y * self.points..(y + 1) * self.points]
    }

    pub fn decode(&self, y: &IndexTuple, cell: usize) -> Result<f64> {
        if y.len() != self.len {
            return Err(Error::InvalidCodebook(format!(
                "tuple of length {} against codebook of length {}",
                y.len(),
                self.len
            )));
        }
        if cell >= self.points {
            return Err(Error::InvalidCodebook(format!(
                "cell {cell} outside {} grid cells",
                self.points
            )));
        }
        Ok(self.value(y.index(), cell))
    }

    /// Cell-major copy: `out[cell * tuples + y]`.
    fn transposed(&self) -> Vec<f64> {
        let m = self.tuples();
        let mut out = vec![0.0; self.values.len()];
        for y in 0..m {
            for (cell, v) in self.column(y).iter().enumerate() {
                out[cell * m + y] = *v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionReport {
    /// Total MSE `E[(U1 - U1^)^2 + (U2 - U2^)^2]`.
    pub distortion: f64,
    pub sdr_db: f64,
    /// `[E(U1 - U1^)^2, E(U2 - U2^)^2]`
    pub user_error: [f64; 2],
}

impl DistortionReport {
    pub fn from_errors(user_error: [f64; 2]) -> Self {
        let distortion = user_error[0] + user_error[1];
        Self {
            distortion,
            sdr_db: sdr_db(distortion),
            user_error,
        }
    }
}

/// `10 log10(2 / D)` for a unit-variance source pair.
pub fn sdr_db(distortion: f64) -> f64 {
    10.0 * (2.0 / distortion).log10()
}

fn check_partition(p: &Partition, grid: &SourceGrid, ch: &TupleKernel) -> Result<()> {
    if p.points() != grid.points() {
        return Err(Error::Dimension {
            expected: grid.points(),
            found: p.points(),
        });
    }
    if p.tuple_len() != ch.len() {
        return Err(Error::Dimension {
            expected: ch.len(),
            found: p.tuple_len(),
        });
    }
    Ok(())
}

fn check_codebook(c: &Codebook, grid: &SourceGrid, ch: &TupleKernel) -> Result<()> {
    if c.points() != grid.points() || c.tuple_len() != ch.len() {
        return Err(Error::InvalidCodebook(format!(
            "shape {}x{} does not match {} tuples x {} cells",
            c.tuples(),
            c.points(),
            ch.tuples(),
            grid.points()
        )));
    }
    Ok(())
}

fn pick<T>(t: Terminal, one: T, two: T) -> (T, T) {
    match t {
        Terminal::One => (one, two),
        Terminal::Two => (two, one),
    }
}

/// Per local cell `j` and other-terminal tuple `xo`: zeroth, first and
/// second conditional moments of the other source over the cells the other
/// encoder maps to `xo`. Layout `[j * m + xo]`.
fn other_moments(grid: &SourceGrid, other: &Partition) -> Vec<[f64; 3]> {
    let n = grid.points();
    let m = other.tuples();
    let centers = grid.centers();
    let rows = par::map_range(n, |j| {
        let mut acc = vec![[0.0; 3]; m];
        for (k, &q) in grid.cond_row(j).iter().enumerate() {
            let c = centers[k];
            let slot = &mut acc[other.index_of(k)];
            slot[0] += q;
            slot[1] += q * c;
            slot[2] += q * c * c;
        }
        acc
    });
    rows.into_iter().flatten().collect()
}

/// Modified distortion `d_t(cell, x)` evaluated term by term.
///
/// `d_t(u, x) = E[(U1 - U1^)^2 + (U2 - U2^)^2 | X_t = x, U_t = u]` with the
/// other encoder and both codebooks held fixed.
#[allow(clippy::too_many_arguments)]
pub fn modified_distortion(
    t: Terminal,
    cell: usize,
    x: &IndexTuple,
    other: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<f64> {
    check_partition(other, grid, ch)?;
    check_codebook(c1, grid, ch)?;
    check_codebook(c2, grid, ch)?;
    if x.len() != ch.len() {
        return Err(Error::Dimension {
            expected: ch.len(),
            found: x.len(),
        });
    }
    if cell >= grid.points() {
        return Err(Error::IndexOutOfRange {
            index: cell,
            len: grid.points(),
        });
    }
    let m = ch.tuples();
    let (local_cb, other_cb) = pick(t, c1, c2);
    let (local_rx, remote_rx) = (ch.local(t), ch.remote(t));
    let xl = x.index();
    let cu = grid.centers()[cell];
    let mut total = 0.0;
    for (k, &q) in grid.cond_row(cell).iter().enumerate() {
        if q == 0.0 {
            continue;
        }
        let xo = other.index_of(k);
        let base = (xl * m + xo) * m;
        let ck = grid.centers()[k];
        let mut inner = 0.0;
        for y in 0..m {
            let own = cu - other_cb.value(y, k);
            let theirs = ck - local_cb.value(y, cell);
            inner += remote_rx[base + y] * own * own + local_rx[base + y] * theirs * theirs;
        }
        total += q * inner;
    }
    Ok(total)
}

/// `d_1(u1, x1)` for fixed `p2`, `c1`, `c2`.
pub fn modified_distortion_1(
    cell: usize,
    x1: &IndexTuple,
    p2: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<f64> {
    modified_distortion(Terminal::One, cell, x1, p2, c1, c2, ch, grid)
}

/// `d_2(u2, x2)` for fixed `p1`, `c1`, `c2`.
pub fn modified_distortion_2(
    cell: usize,
    x2: &IndexTuple,
    p1: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<f64> {
    modified_distortion(Terminal::Two, cell, x2, p1, c1, c2, ch, grid)
}

/// All modified distortions of terminal `t`, laid out `[cell * m + x]`.
pub fn modified_distortion_table(
    t: Terminal,
    other: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<Vec<f64>> {
    check_partition(other, grid, ch)?;
    check_codebook(c1, grid, ch)?;
    check_codebook(c2, grid, ch)?;
    let n = grid.points();
    let m = ch.tuples();
    let (local_cb, other_cb) = pick(t, c1, c2);
    let other_t = other_cb.transposed();
    let moments = other_moments(grid, other);
    let (local_rx, remote_rx) = (ch.local(t), ch.remote(t));
    let centers = grid.centers();

    let mut table = vec![0.0; n * m];
    par::for_each_row(&mut table, m, |j, out| {
        let cu = centers[j];
        // remote term: sum over other cells of q * (u_j - c_o[y, k])^2, binned by xo
        let mut remote_acc = vec![0.0; m * m];
        for (k, &q) in grid.cond_row(j).iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            let row = &mut remote_acc[other.index_of(k) * m..][..m];
            for (slot, c) in row.iter_mut().zip(&other_t[k * m..(k + 1) * m]) {
                let e = cu - c;
                *slot += q * e * e;
            }
        }
        // local term: sum over other cells of q * (u_k - c_t[y, j])^2, via moments
        let mut local_acc = vec![0.0; m * m];
        for xo in 0..m {
            let [m0, m1, m2] = moments[j * m + xo];
            for y in 0..m {
                let c = local_cb.value(y, j);
                local_acc[xo * m + y] = m2 - 2.0 * c * m1 + c * c * m0;
            }
        }
        for (xl, slot) in out.iter_mut().enumerate() {
            let base = xl * m * m;
            let mut d = 0.0;
            for i in 0..m * m {
                d += remote_rx[base + i] * remote_acc[i] + local_rx[base + i] * local_acc[i];
            }
            *slot = d;
        }
    });
    Ok(table)
}

/// Nearest-neighbour encoder update for terminal `t`: each cell gets the
/// tuple minimizing its modified distortion, ties going to the smallest tuple.
pub fn update_partition(
    t: Terminal,
    other: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<Partition> {
    let table = modified_distortion_table(t, other, c1, c2, ch, grid)?;
    Ok(argmin_partition(&table, ch.len()))
}

/// Builds a partition from a `[cell * m + x]` cost table (first minimum wins).
pub fn argmin_partition(table: &[f64], len: usize) -> Partition {
    let m = 1usize << len;
    let cells = table
        .chunks(m)
        .map(|row| {
            let mut best = 0;
            for (x, &v) in row.iter().enumerate().skip(1) {
                if v < row[best] {
                    best = x;
                }
            }
            best as u16
        })
        .collect();
    Partition { len, cells }
}

pub fn update_partition_1(
    p2: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<Partition> {
    update_partition(Terminal::One, p2, c1, c2, ch, grid)
}

pub fn update_partition_2(
    p1: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<Partition> {
    update_partition(Terminal::Two, p1, c1, c2, ch, grid)
}

/// Conditional-mean decoder of terminal `t` for fixed encoders.
///
/// `c_t[y, u] = E[U_other | Y_t = y, U_t = u]`. Outputs that cannot occur
/// given the local cell fall back to `E[U_other | U_t = u]`.
pub fn update_codebook(
    t: Terminal,
    p1: &Partition,
    p2: &Partition,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<Codebook> {
    check_partition(p1, grid, ch)?;
    check_partition(p2, grid, ch)?;
    let (local, other) = pick(t, p1, p2);
    let n = grid.points();
    let m = ch.tuples();
    let moments = other_moments(grid, other);
    let local_rx = ch.local(t);

    // cell-major while filling, transposed at the end
    let mut cell_major = vec![0.0; n * m];
    par::for_each_row(&mut cell_major, m, |j, out| {
        let xl = local.index_of(j);
        let mut fallback = None;
        for (y, slot) in out.iter_mut().enumerate() {
            let (mut num, mut den) = (0.0, 0.0);
            for xo in 0..m {
                let p = local_rx[(xl * m + xo) * m + y];
                let mom = &moments[j * m + xo];
                num += p * mom[1];
                den += p * mom[0];
            }
            *slot = if den > 0.0 {
                num / den
            } else {
                *fallback.get_or_insert_with(|| grid.cond_mean(j))
            };
        }
    });
    let mut values = vec![0.0; n * m];
    for j in 0..n {
        for y in 0..m {
            values[y * n + j] = cell_major[j * m + y];
        }
    }
    Codebook::new(ch.len(), n, values)
}

/// Both decoders for fixed encoders: `(c1, c2)`.
pub fn update_codebooks(
    p1: &Partition,
    p2: &Partition,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<(Codebook, Codebook)> {
    Ok((
        update_codebook(Terminal::One, p1, p2, ch, grid)?,
        update_codebook(Terminal::Two, p1, p2, ch, grid)?,
    ))
}

/// Expected total squared error of the full system on the grid.
pub fn evaluate_distortion(
    p1: &Partition,
    p2: &Partition,
    c1: &Codebook,
    c2: &Codebook,
    ch: &TupleKernel,
    grid: &SourceGrid,
) -> Result<DistortionReport> {
    check_partition(p1, grid, ch)?;
    check_partition(p2, grid, ch)?;
    check_codebook(c1, grid, ch)?;
    check_codebook(c2, grid, ch)?;
    let n = grid.points();
    let m = ch.tuples();
    let c2_t = c2.transposed();
    let rx1 = ch.local(Terminal::One);
    let rx2 = ch.remote(Terminal::One);
    let centers = grid.centers();

    let rows = par::map_range(n, |i| {
        let x1 = p1.index_of(i);
        let ui = centers[i];
        let c1_row: Vec<f64> = (0..m).map(|y| c1.value(y, i)).collect();
        let (mut e1, mut e2) = (0.0, 0.0);
        for (k, &q) in grid.cond_row(i).iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            let base = (x1 * m + p2.index_of(k)) * m;
            let uk = centers[k];
            let (mut a, mut b) = (0.0, 0.0);
            for y in 0..m {
                let d1 = ui - c2_t[k * m + y];
                let d2 = uk - c1_row[y];
                a += rx2[base + y] * d1 * d1;
                b += rx1[base + y] * d2 * d2;
            }
            e1 += q * a;
            e2 += q * b;
        }
        let w = grid.weights()[i];
        (w * e1, w * e2)
    });
    let (e1, e2) = rows
        .into_iter()
        .fold((0.0, 0.0), |(s1, s2), (a, b)| (s1 + a, s2 + b));
    Ok(DistortionReport::from_errors([e1, e2]))
}
