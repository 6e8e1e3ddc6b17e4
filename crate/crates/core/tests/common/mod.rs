#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torb::constructors::{football, labeled_projective_space, product, simplex, SPData};
use torb::labeled::LabeledPolytope;
use torb::lattice::IntMatrix;
use torb::quotient::TorusSubgroup;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

pub fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // entry (i, j) is the cofactor of (j, i)
                    let minor: Vec<Vec<i64>> = (0..n)
                        .filter(|&a| a != j)
                        .map(|a| (0..n).filter(|&b| b != i).map(|b| m[a][b]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * cofactor_det(&minor)
                })
                .collect()
        })
        .collect()
}

/// Histogram of element orders of `Z^n / A Z^n`, enumerated as the subgroup
/// of `(Z/d)^n` generated by the columns of `adj(A)` with `d = |det A|`.
pub fn cokernel_order_histogram(m: &[Vec<i64>]) -> BTreeMap<i64, usize> {
    let n = m.len();
    let d = cofactor_det(m).abs();
    assert!(d > 0);
    let adj = adjugate(m);
    let gens: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|i| adj[i][j].rem_euclid(d)).collect())
        .collect();
    let zero = vec![0i64; n];
    let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y: Vec<i64> = x.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(d)).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut hist = BTreeMap::new();
    for x in seen {
        let g = x.iter().fold(d, |acc, &v| acc.gcd(&v));
        *hist.entry(d / g).or_insert(0) += 1;
    }
    hist
}

/// Histogram of element orders of `Z/d_1 + ... + Z/d_k`.
pub fn product_order_histogram(factors: &[i64]) -> BTreeMap<i64, usize> {
    let mut hist = BTreeMap::new();
    let mut elems: Vec<i64> = vec![1];
    for &d in factors {
        let mut next = Vec::with_capacity(elems.len() * d as usize);
        for &o in &elems {
            for x in 0..d {
                next.push(o.lcm(&(d / d.gcd(&x))));
            }
        }
        elems = next;
    }
    for o in elems {
        *hist.entry(o).or_insert(0) += 1;
    }
    hist
}

pub fn random_nonsingular(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Vec<i64>> {
    loop {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        if cofactor_det(&m) != 0 {
            return m;
        }
    }
}

pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> IntMatrix {
    loop {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        if cofactor_det(&m).abs() == 1 {
            let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
            return IntMatrix::from_i64_rows(&rows);
        }
    }
}

pub fn random_primitive(rng: &mut ChaCha8Rng, n: usize, max: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max)).collect();
        if v.iter().fold(0i64, |g, x| g.gcd(x)) == 1 {
            return v;
        }
    }
}

pub fn random_sp(rng: &mut ChaCha8Rng, max_dim: usize, max: i64) -> (Vec<i64>, Vec<i64>, LabeledPolytope) {
    let n = rng.gen_range(1..=max_dim);
    let v = random_primitive(rng, n, max);
    let w: Vec<i64> = (0..=n).map(|_| rng.gen_range(1..=max)).collect();
    let p = labeled_projective_space(&SPData::from_i64(&v, &w).unwrap()).unwrap();
    (v, w, p)
}

/// A random labeled polytope of dimension at most 3 from several families.
pub fn random_polytope(rng: &mut ChaCha8Rng) -> LabeledPolytope {
    match rng.gen_range(0..4) {
        0 => random_sp(rng, 3, 4).2,
        1 => {
            let a = football(&rng.gen_range(1..=4).into(), &rng.gen_range(1..=4).into()).unwrap();
            let b = football(&rng.gen_range(1..=4).into(), &rng.gen_range(1..=4).into()).unwrap();
            product(&a, &b)
        }
        2 => {
            let a = random_sp(rng, 2, 3).2;
            let b = football(&rng.gen_range(1..=3).into(), &rng.gen_range(1..=3).into()).unwrap();
            product(&a, &b)
        }
        _ => {
            let k = rng.gen_range(1..=2);
            let cp1 = simplex(1).unwrap();
            let s = simplex(k).unwrap();
            let p = product(&s, &cp1);
            let labels: Vec<BigInt> = (0..p.facet_count())
                .map(|_| BigInt::from(rng.gen_range(1..=3)))
                .collect();
            p.with_labels(labels).unwrap()
        }
    }
}

/// Random cyclic or two-generator subgroup of order between 2 and `max_order`.
pub fn random_subgroup(rng: &mut ChaCha8Rng, n: usize, max_order: i64) -> TorusSubgroup {
    loop {
        let count = rng.gen_range(1..=2);
        let gens: Vec<Vec<BigRational>> = (0..count)
            .map(|_| {
                let d = rng.gen_range(2..=max_order);
                (0..n)
                    .map(|_| BigRational::new(rng.gen_range(0..d).into(), d.into()))
                    .collect()
            })
            .collect();
        let g = TorusSubgroup::new(n, gens).unwrap();
        let order = torb::quotient::subgroup_order(&g);
        if order > BigInt::from(1) && order <= BigInt::from(max_order) {
            return g;
        }
    }
}
