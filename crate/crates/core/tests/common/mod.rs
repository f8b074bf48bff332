//! Brute-force reference evaluations and random tiny instances.
//!
//! Everything here sums over every outcome explicitly: both sources' cells,
//! every pair of channel-output tuples, with tuple probabilities rebuilt as
//! products of single-use joint probabilities.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twcq::{
    ChannelKind, Codebook, IndexTuple, NoisePair, Partition, SourceConfig, SourceGrid, Terminal,
    TupleKernel, TwcKernel,
};

pub struct Instance {
    pub grid: SourceGrid,
    pub kernel: TwcKernel,
    pub ch: TupleKernel,
    pub len: usize,
    pub p1: Partition,
    pub p2: Partition,
    pub c1: Codebook,
    pub c2: Codebook,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_partition<R: Rng>(rng: &mut R, len: usize, points: usize) -> Partition {
    let m = 1usize << len;
    // sometimes leave indices unused, sometimes use a single one
    let used = rng.random_range(1..=m);
    let cells = (0..points).map(|_| rng.random_range(0..used)).collect();
    Partition::new(len, cells).unwrap()
}

pub fn random_codebook<R: Rng>(rng: &mut R, len: usize, points: usize) -> Codebook {
    let values = (0..(1usize << len) * points)
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    Codebook::new(len, points, values).unwrap()
}

fn random_eps<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..4) {
        0 => 0.0,
        1 => 0.49,
        _ => rng.random_range(0.0..0.5),
    }
}

/// A tiny random instance: at most `max_points` cells and tuples of at most `max_len` uses.
pub fn random_instance(seed: u64, max_points: usize, max_len: usize) -> Instance {
    let mut rng = rng(seed);
    let points = rng.random_range(2..=max_points);
    let len = rng.random_range(1..=max_len);
    let rho = rng.random_range(-0.95..0.95);
    let halfwidth = rng.random_range(1.0..5.0);
    let grid = SourceGrid::build(SourceConfig::with_grid(rho, halfwidth, points)).unwrap();
    let kind = if rng.random() {
        ChannelKind::BinaryAdditive
    } else {
        ChannelKind::BinaryMultiplying
    };
    let noise = NoisePair::new(random_eps(&mut rng), random_eps(&mut rng)).unwrap();
    let kernel = TwcKernel::new(kind, noise).unwrap();
    let ch = TupleKernel::new(&kernel, len).unwrap();
    let p1 = random_partition(&mut rng, len, points);
    let p2 = random_partition(&mut rng, len, points);
    let c1 = random_codebook(&mut rng, len, points);
    let c2 = random_codebook(&mut rng, len, points);
    Instance {
        grid,
        kernel,
        ch,
        len,
        p1,
        p2,
        c1,
        c2,
    }
}

/// P(y1, y2 | x1, x2) for whole tuples.
pub fn tuple_joint(kernel: &TwcKernel, len: usize, x1: usize, x2: usize, y1: usize, y2: usize) -> f64 {
    let (x1, x2) = (IndexTuple::new(x1, len).unwrap(), IndexTuple::new(x2, len).unwrap());
    let (y1, y2) = (IndexTuple::new(y1, len).unwrap(), IndexTuple::new(y2, len).unwrap());
    (0..len)
        .map(|i| kernel.joint(x1.symbol(i), x2.symbol(i), y1.symbol(i), y2.symbol(i)))
        .product()
}

/// Joint cell masses `[j][k]` for (U1 in cell j, U2 in cell k).
pub fn joint_table(grid: &SourceGrid) -> Vec<Vec<f64>> {
    let n = grid.points();
    (0..n)
        .map(|j| (0..n).map(|k| grid.weights()[j] * grid.cond_mass(j, k)).collect())
        .collect()
}

/// P(U2 in k | U1 in j) and P(U1 in j | U2 in k), both indexed `[conditioning][other]`.
pub fn conditionals(grid: &SourceGrid) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let joint = joint_table(grid);
    let n = grid.points();
    let given1 = joint
        .iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.iter().map(|v| v / s).collect()
        })
        .collect();
    let given2 = (0..n)
        .map(|k| {
            let s: f64 = (0..n).map(|j| joint[j][k]).sum();
            (0..n).map(|j| joint[j][k] / s).collect()
        })
        .collect();
    (given1, given2)
}

fn pair_error(inst: &Instance, j: usize, k: usize, x1: usize, x2: usize) -> f64 {
    let m = 1usize << inst.len;
    let u = inst.grid.centers();
    let mut e = 0.0;
    for y1 in 0..m {
        for y2 in 0..m {
            let p = tuple_joint(&inst.kernel, inst.len, x1, x2, y1, y2);
            let a = u[j] - inst.c2.value(y2, k);
            let b = u[k] - inst.c1.value(y1, j);
            e += p * (a * a + b * b);
        }
    }
    e
}

/// Full quadruple sum for the overall distortion.
pub fn distortion(inst: &Instance) -> f64 {
    let joint = joint_table(&inst.grid);
    let n = inst.grid.points();
    let mut d = 0.0;
    for j in 0..n {
        for k in 0..n {
            let x1 = inst.p1.index_of(j);
            let x2 = inst.p2.index_of(k);
            d += joint[j][k] * pair_error(inst, j, k, x1, x2);
        }
    }
    d
}

/// Per-user errors `[E(U1 - U1^)^2, E(U2 - U2^)^2]` by the same quadruple sum.
pub fn user_errors(inst: &Instance) -> [f64; 2] {
    let joint = joint_table(&inst.grid);
    let n = inst.grid.points();
    let m = 1usize << inst.len;
    let u = inst.grid.centers();
    let mut out = [0.0; 2];
    for j in 0..n {
        for k in 0..n {
            let (x1, x2) = (inst.p1.index_of(j), inst.p2.index_of(k));
            for y1 in 0..m {
                for y2 in 0..m {
                    let p = joint[j][k] * tuple_joint(&inst.kernel, inst.len, x1, x2, y1, y2);
                    out[0] += p * (u[j] - inst.c2.value(y2, k)).powi(2);
                    out[1] += p * (u[k] - inst.c1.value(y1, j)).powi(2);
                }
            }
        }
    }
    out
}

/// Modified distortion of terminal `t` at `cell` for candidate tuple `x`.
pub fn modified(inst: &Instance, t: Terminal, cell: usize, x: usize) -> f64 {
    let (given1, given2) = conditionals(&inst.grid);
    let n = inst.grid.points();
    let mut d = 0.0;
    for other in 0..n {
        d += match t {
            Terminal::One => {
                given1[cell][other] * pair_error(inst, cell, other, x, inst.p2.index_of(other))
            }
            Terminal::Two => {
                given2[cell][other] * pair_error(inst, other, cell, inst.p1.index_of(other), x)
            }
        };
    }
    d
}

/// Conditional-mean decoder of terminal `t`, layout `[y][cell]`.
pub fn centroids(inst: &Instance, t: Terminal) -> Vec<Vec<f64>> {
    let (given1, given2) = conditionals(&inst.grid);
    let n = inst.grid.points();
    let m = 1usize << inst.len;
    let u = inst.grid.centers();
    let mut out = vec![vec![0.0; n]; m];
    for (y, row) in out.iter_mut().enumerate() {
        for (local, slot) in row.iter_mut().enumerate() {
            let (mut num, mut den, mut prior) = (0.0, 0.0, 0.0);
            for other in 0..n {
                let (q, p) = match t {
                    Terminal::One => {
                        let (x1, x2) = (inst.p1.index_of(local), inst.p2.index_of(other));
                        let p: f64 = (0..m)
                            .map(|y2| tuple_joint(&inst.kernel, inst.len, x1, x2, y, y2))
                            .sum();
                        (given1[local][other], p)
                    }
                    Terminal::Two => {
                        let (x1, x2) = (inst.p1.index_of(other), inst.p2.index_of(local));
                        let p: f64 = (0..m)
                            .map(|y1| tuple_joint(&inst.kernel, inst.len, x1, x2, y1, y))
                            .sum();
                        (given2[local][other], p)
                    }
                };
                num += q * p * u[other];
                den += q * p;
                prior += q * u[other];
            }
            *slot = if den > 0.0 { num / den } else { prior };
        }
    }
    out
}

pub fn with_codebooks(inst: &Instance, c1: Codebook, c2: Codebook) -> Instance {
    Instance {
        grid: inst.grid.clone(),
        kernel: inst.kernel.clone(),
        ch: TupleKernel::new(&inst.kernel, inst.len).unwrap(),
        len: inst.len,
        p1: inst.p1.clone(),
        p2: inst.p2.clone(),
        c1,
        c2,
    }
}

pub fn with_partitions(inst: &Instance, p1: Partition, p2: Partition) -> Instance {
    Instance {
        p1,
        p2,
        ..with_codebooks(inst, inst.c1.clone(), inst.c2.clone())
    }
}

pub fn codebook_from(rows: &[Vec<f64>], len: usize) -> Codebook {
    let points = rows[0].len();
    Codebook::new(len, points, rows.concat()).unwrap()
}
