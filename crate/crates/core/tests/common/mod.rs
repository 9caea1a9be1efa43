//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls the library's weight, center or
//! assignment code; everything is recomputed from raw rows.

#![allow(dead_code)]

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wkmodes::{EncodedDataset, WeightingSchema};

pub type Q = Ratio<i128>;

pub const FIGURE_ONE: &str = "a,p,r\na,p,s\na,p,t\na,q,r\nb,p,t\na,p,k\n";
pub const FIGURE_ONE_PARTITION: [u32; 6] = [0, 0, 0, 1, 1, 1];

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join(name)
}

/// Random dataset with `n` rows; attribute `j` uses ids `0..cards[j]`.
/// Every id occurs at least once when `n >= max(cards)`.
pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, cards: &[u32]) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = (0..n)
        .map(|_| cards.iter().map(|&p| rng.random_range(0..p)).collect())
        .collect();
    for (j, &p) in cards.iter().enumerate() {
        for v in 0..p.min(n as u32) {
            rows[v as usize][j] = v;
        }
    }
    rows
}

/// Random small problem: rows, k, and a membership with no empty cluster.
pub struct SmallProblem {
    pub rows: Vec<Vec<u32>>,
    pub k: usize,
    pub membership: Vec<u32>,
}

pub fn small_problem(seed: u64, max_n: usize, max_m: usize, max_p: u32, max_k: usize) -> SmallProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=max_m);
    let cards: Vec<u32> = (0..m).map(|_| rng.random_range(1..=max_p)).collect();
    let k = rng.random_range(1..=max_k);
    let n = rng.random_range((max_p as usize).max(k).max(2)..=max_n);
    let rows = random_rows(&mut rng, n, &cards);
    let mut membership: Vec<u32> = (0..n).map(|_| rng.random_range(0..k as u32)).collect();
    for (l, slot) in membership.iter_mut().take(k).enumerate() {
        *slot = l as u32;
    }
    SmallProblem { rows, k, membership }
}

/// `random_rows` makes each id first appear at the row of the same index, so
/// the library's first-occurrence encoding keeps ids unchanged.
pub fn encode(rows: &[Vec<u32>]) -> EncodedDataset {
    EncodedDataset::from_codes(rows).unwrap()
}

fn global_count(rows: &[Vec<u32>], j: usize, v: u32) -> i128 {
    rows.iter().filter(|r| r[j] == v).count() as i128
}

fn cluster_count(rows: &[Vec<u32>], membership: &[u32], l: usize, j: usize, v: u32) -> i128 {
    rows.iter()
        .zip(membership)
        .filter(|(r, &c)| c as usize == l && r[j] == v)
        .count() as i128
}

fn cluster_size(membership: &[u32], l: usize) -> i128 {
    membership.iter().filter(|&&c| c as usize == l).count() as i128
}

/// Values of attribute `j` present in `rows`.
pub fn domain(rows: &[Vec<u32>], j: usize) -> Vec<u32> {
    let mut values: Vec<u32> = rows.iter().map(|r| r[j]).collect();
    values.sort_unstable();
    values.dedup();
    values
}

/// Goodall weight by direct enumeration of the values at most as frequent as `v`.
pub fn goodall(rows: &[Vec<u32>], j: usize, v: u32) -> Q {
    let n = rows.len() as i128;
    let fv = global_count(rows, j, v);
    let mass: i128 = domain(rows, j)
        .into_iter()
        .map(|u| global_count(rows, j, u))
        .filter(|&fu| fu <= fv)
        .map(|fu| fu * (fu - 1))
        .sum();
    Q::from_integer(1) - Q::new(mass, n * (n - 1))
}

/// `ω(v, l)` in exact arithmetic for a value present in the data.
pub fn weight(schema: WeightingSchema, rows: &[Vec<u32>], membership: &[u32], j: usize, v: u32, l: usize) -> Q {
    let size = cluster_size(membership, l);
    let f = cluster_count(rows, membership, l, j, v);
    let relative = || Q::new(f, size);
    match schema {
        WeightingSchema::Unit => Q::from_integer(1),
        WeightingSchema::RelativeFrequency => relative(),
        WeightingSchema::Goodall => goodall(rows, j, v),
        WeightingSchema::HybridGoodall => relative() * goodall(rows, j, v),
        WeightingSchema::HybridInverseFrequency => Q::new(f, size * global_count(rows, j, v)),
    }
}

/// Per-component cost `|C_l| - f(v|C_l) ω(v, l)` of choosing `v`.
pub fn component_cost(schema: WeightingSchema, rows: &[Vec<u32>], membership: &[u32], j: usize, v: u32, l: usize) -> Q {
    let size = cluster_size(membership, l);
    let f = cluster_count(rows, membership, l, j, v);
    Q::from_integer(size) - Q::from_integer(f) * weight(schema, rows, membership, j, v, l)
}

/// Exhaustive center choice: minimal cost, lowest value on ties.
pub fn exhaustive_centers(schema: WeightingSchema, rows: &[Vec<u32>], membership: &[u32], k: usize) -> Vec<Vec<u32>> {
    let m = rows[0].len();
    (0..k)
        .map(|l| {
            (0..m)
                .map(|j| {
                    let mut best: Option<(Q, u32)> = None;
                    for v in domain(rows, j) {
                        let c = component_cost(schema, rows, membership, j, v, l);
                        if best.as_ref().is_none_or(|(b, _)| c < *b) {
                            best = Some((c, v));
                        }
                    }
                    best.unwrap().1
                })
                .collect()
        })
        .collect()
}

/// Exact objective of a partition under the weights of a (possibly different) partition.
pub fn exact_objective(
    schema: WeightingSchema,
    rows: &[Vec<u32>],
    membership: &[u32],
    centers: &[Vec<u32>],
    weights_from: &[u32],
) -> Q {
    let mut total = Q::from_integer(0);
    for (row, &l) in rows.iter().zip(membership) {
        let l = l as usize;
        for (j, (&x, &z)) in row.iter().zip(&centers[l]).enumerate() {
            total += if x == z {
                Q::from_integer(1) - weight(schema, rows, weights_from, j, x, l)
            } else {
                Q::from_integer(1)
            };
        }
    }
    total
}

fn hamming(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn nearest(row: &[u32], centers: &[Vec<u32>]) -> (u32, usize) {
    let mut best = (0u32, usize::MAX);
    for (l, c) in centers.iter().enumerate() {
        let d = hamming(row, c);
        if d < best.1 {
            best = (l as u32, d);
        }
    }
    best
}

fn sizes_of(membership: &[u32], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &l in membership {
        sizes[l as usize] += 1;
    }
    sizes
}

/// Simple-matching assignment followed by the library's documented repair:
/// each empty cluster takes the object farthest from its center among those
/// whose cluster keeps another member and whose row is not a center.
fn assign_with_repair(rows: &[Vec<u32>], centers: &mut [Vec<u32>]) -> Vec<u32> {
    let k = centers.len();
    let assign = |centers: &[Vec<u32>]| -> (Vec<u32>, Vec<usize>) {
        rows.iter().map(|r| nearest(r, centers)).unzip()
    };
    let (mut membership, mut dists) = assign(centers);
    for _ in 0..k {
        let mut sizes = sizes_of(&membership, k);
        let empties: Vec<usize> = (0..k).filter(|&l| sizes[l] == 0).collect();
        if empties.is_empty() {
            break;
        }
        for l in empties {
            let mut best: Option<usize> = None;
            for i in 0..rows.len() {
                let admissible = sizes[membership[i] as usize] >= 2 && !centers.contains(&rows[i]);
                if admissible && best.is_none_or(|b| dists[i] > dists[b]) {
                    best = Some(i);
                }
            }
            let i = best.expect("an admissible object exists");
            sizes[membership[i] as usize] -= 1;
            sizes[l] += 1;
            centers[l] = rows[i].clone();
        }
        (membership, dists) = assign(centers);
    }
    membership
}

fn frequency_modes(rows: &[Vec<u32>], membership: &[u32], k: usize) -> Vec<Vec<u32>> {
    let m = rows[0].len();
    (0..k)
        .map(|l| {
            (0..m)
                .map(|j| {
                    let mut best = (0u32, 0usize);
                    for v in domain(rows, j) {
                        let f = rows
                            .iter()
                            .zip(membership)
                            .filter(|(r, &c)| c as usize == l && r[j] == v)
                            .count();
                        if f > best.1 {
                            best = (v, f);
                        }
                    }
                    best.0
                })
                .collect()
        })
        .collect()
}

fn mode_count(rows: &[Vec<u32>], membership: &[u32], l: usize, j: usize, v: u32) -> usize {
    rows.iter()
        .zip(membership)
        .filter(|(r, &c)| c as usize == l && r[j] == v)
        .count()
}

/// Plain k-modes from the given initial rows: nearest center by simple
/// matching (lowest index on ties), frequency modes (lowest value on ties).
/// Stops when a center update cannot lower the cost, when the membership
/// repeats, or after `max_iterations` assignment sweeps.
pub fn naive_kmodes(rows: &[Vec<u32>], initial: &[usize], max_iterations: usize) -> (Vec<u32>, Vec<Vec<u32>>) {
    let k = initial.len();
    let m = rows[0].len();
    let mut centers: Vec<Vec<u32>> = initial.iter().map(|&i| rows[i].clone()).collect();
    let mut membership = assign_with_repair(rows, &mut centers);
    let mut sweeps = 1;
    while sweeps < max_iterations {
        let modes = frequency_modes(rows, &membership, k);
        let improves = (0..k).any(|l| {
            (0..m).any(|j| {
                mode_count(rows, &membership, l, j, modes[l][j])
                    > mode_count(rows, &membership, l, j, centers[l][j])
            })
        });
        centers = modes;
        if !improves {
            break;
        }
        let next = assign_with_repair(rows, &mut centers);
        sweeps += 1;
        if next == membership {
            break;
        }
        membership = next;
    }
    (membership, centers)
}

/// Uniformly random permutation of `0..n`.
pub fn permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    let mut p: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}
