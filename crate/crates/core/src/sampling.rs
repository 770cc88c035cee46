//! Seeded generators for random closed subgroups and symplectic maps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::subgroup::ClosedSubgroup;
use crate::symplectic::{PhasePoint, SymplecticMap};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Random basis of R^{2d} with condition number at most `max_cond`.
pub fn random_basis(rng: &mut SeededRng, d: usize, max_cond: f64) -> DMatrix<f64> {
    let n = 2 * d;
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| normal(rng));
        if linalg::condition(&m) <= max_cond {
            return m;
        }
    }
}

fn column(m: &DMatrix<f64>, j: usize) -> PhasePoint<f64> {
    PhasePoint::from_vector(m.column(j).into_owned()).unwrap()
}

/// Role of one basis direction in a random group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Absent,
    Vector,
    /// Lattice generator `n · b`.
    Lattice(i64),
}

pub fn group_from_roles(basis: &DMatrix<f64>, roles: &[Role], scale_t: f64) -> ClosedSubgroup<f64> {
    let d = basis.nrows() / 2;
    let mut vb = Vec::new();
    let mut lg = Vec::new();
    for (j, r) in roles.iter().enumerate() {
        match r {
            Role::Absent => {}
            Role::Vector => vb.push(column(basis, j)),
            Role::Lattice(k) => lg.push(column(basis, j).scale(*k as f64)),
        }
    }
    ClosedSubgroup::new(d, vb, lg, scale_t).expect("independent basis gives a closed group")
}

pub fn random_roles(rng: &mut SeededRng, n: usize) -> Vec<Role> {
    (0..n)
        .map(|_| match rng.random_range(0..3) {
            0 => Role::Absent,
            1 => Role::Vector,
            _ => Role::Lattice(1),
        })
        .collect()
}

/// Random closed group: mixed vector and lattice parts on a well-conditioned random basis,
/// lattice generators rescaled by factors in [0.5, 2].
pub fn random_group(rng: &mut SeededRng, d: usize) -> ClosedSubgroup<f64> {
    let mut b = random_basis(rng, d, 50.0);
    for j in 0..2 * d {
        let s = rng.random_range(0.5..2.0);
        let c = b.column(j) * s;
        b.set_column(j, &c);
    }
    let roles = random_roles(rng, 2 * d);
    group_from_roles(&b, &roles, 1.0)
}

/// Random subgroup of `g`: a subset of the vector part (recombined), an integer sublattice
/// of the lattice part, and possibly a lattice direction taken from the vector span.
pub fn random_subgroup(rng: &mut SeededRng, g: &ClosedSubgroup<f64>) -> ClosedSubgroup<f64> {
    let d = g.d();
    let r = g.vector_dim();
    let keep = if r == 0 { 0 } else { rng.random_range(0..=r) };
    let mut vb = Vec::new();
    for j in 0..keep {
        // triangular recombination keeps independence
        let mut v = g.vector_basis()[j].clone();
        for i in 0..j {
            v = &v + &g.vector_basis()[i].scale(rng.random_range(-1.0..1.0));
        }
        vb.push(v);
    }
    let mut lg = Vec::new();
    let m = g.lattice_rank();
    for j in 0..m {
        if rng.random_bool(0.8) {
            let mut v = g.lattice_gens()[j].scale(rng.random_range(1..=3) as f64);
            for i in 0..j {
                v = &v + &g.lattice_gens()[i].scale(rng.random_range(-2..=2) as f64);
            }
            lg.push(v);
        }
    }
    if keep < r && rng.random_bool(0.5) {
        lg.push(g.vector_basis()[keep].scale(rng.random_range(0.5..2.0)));
    }
    ClosedSubgroup::new(d, vb, lg, g.scale_t()).expect("subgroup of a closed group")
}

fn random_symmetric(rng: &mut SeededRng, d: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| normal(rng) * scale);
    (&a + a.transpose()) * 0.5
}

fn random_unitary(rng: &mut SeededRng, d: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(normal(rng), normal(rng)));
    a.qr().q()
}

/// Product of random symplectic shears, squeezes and unitaries with moderate entries.
pub fn random_symplectic(rng: &mut SeededRng, d: usize) -> SymplecticMap<f64> {
    let tol = 1e-9;
    let mut s = SymplecticMap::from_unitary(&random_unitary(rng, d), tol).unwrap();
    s = s.compose(&SymplecticMap::shear_upper(&random_symmetric(rng, d, 0.5), tol).unwrap());
    s = s.compose(&SymplecticMap::shear_lower(&random_symmetric(rng, d, 0.5), tol).unwrap());
    for j in 0..d {
        s = s.compose(&SymplecticMap::squeeze(d, j, rng.random_range(0.6..1.6)));
    }
    s.compose(&SymplecticMap::from_unitary(&random_unitary(rng, d), tol).unwrap())
}

fn random_integer_symmetric(rng: &mut SeededRng, d: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = rng.random_range(-2..=2) as f64;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Integer shears interleaved with rotations.
pub fn random_integer_shear_rotation(rng: &mut SeededRng, d: usize) -> SymplecticMap<f64> {
    let tol = 1e-9;
    let mut s = SymplecticMap::identity(d);
    for _ in 0..2 {
        s = s.compose(&SymplecticMap::shear_upper(&random_integer_symmetric(rng, d), tol).unwrap());
        s = s.compose(&SymplecticMap::rotation(d, rng.random_range(0..d), rng.random_range(0.0..std::f64::consts::TAU)));
        s = s.compose(&SymplecticMap::shear_lower(&random_integer_symmetric(rng, d), tol).unwrap());
    }
    if d > 1 {
        s = s.compose(&SymplecticMap::from_unitary(&random_unitary(rng, d), tol).unwrap());
    }
    s
}

/// Random unimodular integer matrix as a product of elementary operations.
pub fn random_unimodular(rng: &mut SeededRng, n: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    if n < 2 {
        if n == 1 && rng.random_bool(0.5) {
            u[0][0] = -1;
        }
        return u;
    }
    for _ in 0..3 * n {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let c = rng.random_range(-1..=1);
        for row in u.iter_mut() {
            row[a] += c * row[b];
        }
    }
    u
}

/// Lagrangian group S·model with random integer-shear/rotation S, re-presented with a
/// unimodular change of lattice basis and a recombined vector basis.
pub fn random_lagrangian(rng: &mut SeededRng, d: usize) -> (ClosedSubgroup<f64>, SymplecticMap<f64>) {
    let k = rng.random_range(0..=d);
    let model = ClosedSubgroup::<f64>::model(d, k, 1.0);
    let s = random_integer_shear_rotation(rng, d);
    let g = model.transform(&s).unwrap();
    let m = g.lattice_rank();
    let u = random_unimodular(rng, m);
    let lg: Vec<PhasePoint<f64>> = (0..m)
        .map(|c| {
            let mut v = PhasePoint::zero(d);
            for (i, gi) in g.lattice_gens().iter().enumerate() {
                v = &v + &gi.scale(u[i][c] as f64);
            }
            v
        })
        .collect();
    let mut vb: Vec<PhasePoint<f64>> = Vec::new();
    for (j, v) in g.vector_basis().iter().enumerate() {
        let mut w = v.scale(rng.random_range(0.5..2.0));
        if j > 0 {
            w = &w + &vb[0].scale(rng.random_range(-1.0..1.0));
        }
        vb.push(w);
    }
    // lattice generators may pick up vector-part components
    let lg = lg
        .into_iter()
        .map(|l| match vb.first() {
            Some(v) => &l + &v.scale(rng.random_range(-1.0..1.0)),
            None => l,
        })
        .collect();
    (ClosedSubgroup::new(d, vb, lg, 1.0).unwrap(), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_runs_are_reproducible() {
        let a = random_group(&mut rng(3), 2);
        let b = random_group(&mut rng(3), 2);
        assert_eq!(a, b);
    }

    #[test]
    fn samplers_produce_valid_objects() {
        let mut r = rng(11);
        for d in 1..=3 {
            let s = random_symplectic(&mut r, d);
            assert!(s.defect() < 1e-9);
            let g = random_group(&mut r, d);
            let h = random_subgroup(&mut r, &g);
            assert!(crate::subgroup::contains(&g, &h, 1e-8).unwrap());
        }
    }
}
