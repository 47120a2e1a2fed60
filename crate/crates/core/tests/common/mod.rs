//! Reference implementations that share no code with the library: explicit
//! 4×4 operator algebra for the two atoms and a density-matrix master
//! equation for Fock and coherent input.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64 as C64;

pub type M4 = Matrix4<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

fn single(kind: char) -> Matrix2<C64> {
    // basis |g⟩ = 0, |e⟩ = 1
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    match kind {
        '1' => Matrix2::new(l, o, o, l),
        '-' => Matrix2::new(o, l, o, o),
        '+' => Matrix2::new(o, o, l, o),
        'z' => Matrix2::new(-l, o, o, l),
        _ => unreachable!(),
    }
}

/// Two-atom operator `a ⊗ b` for factor symbols in `1 - + z`.
pub fn two(a: char, b: char) -> M4 {
    let k = single(a).kronecker(&single(b));
    M4::from_fn(|i, j| k[(i, j)])
}

pub fn sigma1() -> M4 {
    two('-', '1')
}

pub fn sigma2() -> M4 {
    two('1', '-')
}

pub fn dag(m: &M4) -> M4 {
    m.adjoint()
}

pub fn comm(a: &M4, b: &M4) -> M4 {
    a * b - b * a
}

/// The sixteen product operators; index 0 is the identity and index k ≥ 1
/// matches `names[k - 1]` given as factor pairs.
pub fn product_basis(names: &[(char, char)]) -> Vec<M4> {
    let mut v = vec![two('1', '1')];
    v.extend(names.iter().map(|&(a, b)| two(a, b)));
    v
}

/// Expand `m` in the product basis.
pub fn decompose(m: &M4, basis: &[M4]) -> Vec<C64> {
    let n = basis.len();
    let gram = DMatrix::from_fn(n, n, |i, j| (basis[i].adjoint() * basis[j]).trace());
    let rhs = DVector::from_fn(n, |i, _| (basis[i].adjoint() * m).trace());
    let sol = gram.lu().solve(&rhs).expect("product basis is complete");
    sol.iter().copied().collect()
}

/// Right-hand side of the quantum Langevin equation for `x`, split into the
/// atom-only part and the coefficients multiplying the input field at each atom.
pub struct LangevinRhs {
    pub atomic: M4,
    /// `[X, σ_j†]`-type terms multiplying the input annihilation operator at atom j.
    pub annihilate: [M4; 2],
    /// Terms multiplied from the left by the input creation operator at atom j.
    pub create: [M4; 2],
}

/// Carrier-frame Langevin equation for a bidirectional waveguide with two
/// atoms, atom 1 detuned by `delta`. Light emitted by atom 2 reaches atom 1
/// with phase `theta`; light emitted by atom 1 reaches atom 2 with `theta1`.
pub fn langevin(x: &M4, gamma: f64, delta: f64, theta: f64, theta1: f64) -> LangevinRhs {
    let s = [sigma1(), sigma2()];
    let sg = c(gamma.sqrt(), 0.0);
    let g = c(gamma, 0.0);
    let h = -dag(&s[0]) * s[0] * c(delta, 0.0);
    // atomic part of the field arriving at atom j from the other atom
    let feed = [s[1] * cis(theta) * sg, s[0] * cis(theta1) * sg];
    let mut atomic = comm(&h, x) * c(0.0, 1.0);
    let mut annihilate = [M4::zeros(), M4::zeros()];
    let mut create = [M4::zeros(), M4::zeros()];
    for j in 0..2 {
        let left = comm(x, &dag(&s[j]));
        let right = comm(x, &s[j]);
        let f = s[j] * g + feed[j] * sg;
        let fd = dag(&s[j]) * g + dag(&feed[j]) * sg;
        atomic += -(left * f) + fd * right;
        annihilate[j] = -left * sg;
        create[j] = right * sg;
    }
    LangevinRhs {
        atomic,
        annihilate,
        create,
    }
}

/// Lindblad model: coherent exchange and collective decay into the two guided directions.
pub struct Lindblad {
    pub h: M4,
    /// Jump operator feeding the right-moving mode.
    pub l_right: M4,
    /// Jump operator feeding the left-moving mode.
    pub l_left: M4,
}

pub fn lindblad(gamma: f64, delta: f64, theta: f64) -> Lindblad {
    let (s1, s2) = (sigma1(), sigma2());
    let sg = c(gamma.sqrt(), 0.0);
    let h = (dag(&s1) * s2 + dag(&s2) * s1) * c(gamma * theta.sin(), 0.0) - dag(&s1) * s1 * c(delta, 0.0);
    Lindblad {
        h,
        l_right: (s1 + s2 * cis(-theta)) * sg,
        l_left: (s2 + s1 * cis(-theta)) * sg,
    }
}

fn vec_index(i: usize, j: usize) -> usize {
    4 * i + j
}

/// `A X B` as a 16×16 matrix acting on row-major `vec(X)`.
fn sandwich(a: &M4, b: &M4) -> DMatrix<C64> {
    DMatrix::from_fn(16, 16, |r, col| {
        let (i, j) = (r / 4, r % 4);
        let (k, l) = (col / 4, col % 4);
        a[(i, k)] * b[(l, j)]
    })
}

pub fn liouvillian(h: &M4, jumps: &[M4]) -> DMatrix<C64> {
    let id = M4::identity();
    let mut l = (sandwich(h, &id) - sandwich(&id, h)) * c(0.0, -1.0);
    for j in jumps {
        let jd = dag(j);
        let jdj = jd * j;
        l += sandwich(j, &jd) - sandwich(&jdj, &id) * c(0.5, 0.0) - sandwich(&id, &jdj) * c(0.5, 0.0);
    }
    l
}

fn to_vec(m: &M4) -> DVector<C64> {
    DVector::from_fn(16, |r, _| m[(r / 4, r % 4)])
}

fn from_vec(v: &DVector<C64>) -> M4 {
    M4::from_fn(|i, j| v[vec_index(i, j)])
}

/// Stationary solution of `L ρ + src = 0` with `Tr ρ = trace`.
fn stationary(l: &DMatrix<C64>, src: &M4, trace: C64) -> M4 {
    let mut a = l.clone();
    let mut b = -to_vec(src);
    for col in 0..16 {
        a[(0, col)] = if col % 5 == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
    }
    b[0] = trace;
    from_vec(&a.lu().solve(&b).expect("stationary state exists"))
}

pub struct ScatterRates {
    pub reflected: f64,
    pub transmitted: f64,
    pub flux: f64,
}

/// Plateau rates for an n-photon pulse with flat envelope value `xi`, using
/// the generalized density matrices ρ_{m,n} of a Fock-state drive.
pub fn fock_rates(model: &Lindblad, n: usize, xi: f64, from_left: bool) -> ScatterRates {
    let (l_in, l_out) = if from_left {
        (model.l_right, model.l_left)
    } else {
        (model.l_left, model.l_right)
    };
    let lv = liouvillian(&model.h, &[model.l_right, model.l_left]);
    let ground = {
        let mut g = M4::zeros();
        g[(0, 0)] = c(1.0, 0.0);
        g
    };
    let mut rho = vec![vec![M4::zeros(); n + 1]; n + 1];
    let xi = c(xi, 0.0);
    for s in 0..=2 * n {
        for m in s.saturating_sub(n)..=s.min(n) {
            let k = s - m;
            if s == 0 {
                rho[0][0] = ground;
                continue;
            }
            let mut src = M4::zeros();
            if m > 0 {
                let r = &rho[m - 1][k];
                src += (r * dag(&l_in) - dag(&l_in) * r) * (xi * (m as f64).sqrt());
            }
            if k > 0 {
                let r = &rho[m][k - 1];
                src += (l_in * r - r * l_in) * (xi.conj() * (k as f64).sqrt());
            }
            let tr = if m == k { c(1.0, 0.0) } else { c(0.0, 0.0) };
            rho[m][k] = stationary(&lv, &src, tr);
        }
    }
    let r = &rho[n][n];
    let flux = n as f64 * xi.norm_sqr();
    let reflected = (dag(&l_out) * l_out * r).trace().re;
    let mut transmitted = flux + (dag(&l_in) * l_in * r).trace().re;
    if n > 0 {
        let cross = (l_in * rho[n][n - 1]).trace() * xi.conj() * (n as f64).sqrt();
        transmitted += 2.0 * cross.re;
    }
    ScatterRates {
        reflected,
        transmitted,
        flux,
    }
}

/// Plateau rates for a coherent drive of amplitude `beta = √n̄ ξ`.
pub fn coherent_rates(model: &Lindblad, beta: f64, from_left: bool) -> ScatterRates {
    let (l_in, l_out) = if from_left {
        (model.l_right, model.l_left)
    } else {
        (model.l_left, model.l_right)
    };
    let b = c(beta, 0.0);
    let h = model.h + (l_in * b.conj() - dag(&l_in) * b) * c(0.0, 1.0);
    let lv = liouvillian(&h, &[model.l_right, model.l_left]);
    let r = stationary(&lv, &M4::zeros(), c(1.0, 0.0));
    let flux = beta * beta;
    let reflected = (dag(&l_out) * l_out * r).trace().re;
    let out = l_in + M4::identity() * b;
    let transmitted = (dag(&out) * out * r).trace().re;
    ScatterRates {
        reflected,
        transmitted,
        flux,
    }
}
