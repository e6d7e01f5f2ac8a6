//! Dense reference model assembled from Kronecker products with nalgebra.
//! It shares nothing with the library except the mode ordering
//! `a0, b0, a1, b1, ..., c` (first factor most significant).
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Mat = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn lowering(d: usize) -> Mat {
    let mut m = Mat::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = c((n as f64).sqrt());
    }
    m
}

pub fn kron_all(factors: &[Mat]) -> Mat {
    factors[1..].iter().fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Dense model for `n` particles with per-particle dims `(da, db)` and a
/// cavity of dim `dc`.
pub struct Dense {
    pub n: usize,
    pub dims: Vec<usize>,
}

impl Dense {
    pub fn new(n: usize, da: usize, db: usize, dc: usize) -> Self {
        let mut dims = Vec::new();
        for _ in 0..n {
            dims.push(da);
            dims.push(db);
        }
        dims.push(dc);
        Self { n, dims }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// `op` on factor `pos`, identity elsewhere.
    pub fn embed(&self, pos: usize, op: &Mat) -> Mat {
        let factors: Vec<Mat> = self
            .dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k == pos { op.clone() } else { Mat::identity(d, d) })
            .collect();
        kron_all(&factors)
    }

    pub fn a(&self, i: usize) -> Mat {
        self.embed(2 * i, &lowering(self.dims[2 * i]))
    }

    pub fn b(&self, i: usize) -> Mat {
        self.embed(2 * i + 1, &lowering(self.dims[2 * i + 1]))
    }

    pub fn cav(&self) -> Mat {
        let pos = self.dims.len() - 1;
        self.embed(pos, &lowering(self.dims[pos]))
    }

    pub fn hamiltonian(&self, g: f64) -> Mat {
        let cav = self.cav();
        let mut h = Mat::zeros(self.total(), self.total());
        for i in 0..self.n {
            let (a, b) = (self.a(i), self.b(i));
            let x = &b + b.adjoint();
            let hop = &a * cav.adjoint() + a.adjoint() * &cav;
            h += (x * hop) * c(g);
        }
        h
    }

    pub fn m(&self) -> Mat {
        let mut m = Mat::zeros(self.total(), self.total());
        for i in 0..self.n {
            let b = self.b(i);
            m += b.adjoint() * b;
        }
        m * c(1.0 / self.n as f64)
    }

    pub fn k1(&self) -> Mat {
        let cav = self.cav();
        let mut k = Mat::zeros(self.total(), self.total());
        for i in 0..self.n {
            let (a, b) = (self.a(i), self.b(i));
            let p = (&b - b.adjoint()) * Complex64::new(0.0, 1.0);
            k += p * (&a * cav.adjoint() + a.adjoint() * &cav);
        }
        k * c(1.0 / self.n as f64)
    }

    pub fn k2(&self) -> Mat {
        let n = self.n;
        let mut k = Mat::zeros(self.total(), self.total());
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (ai, bi, aj, bj) = (self.a(i), self.b(i), self.a(j), self.b(j));
                k += &ai * bi.adjoint() * aj.adjoint() * &bj;
                k -= &ai * &bi * aj.adjoint() * bj.adjoint();
            }
        }
        k * c(1.0 / (n * (n - 1)) as f64)
    }

    pub fn cavity_photons(&self) -> Mat {
        let cav = self.cav();
        cav.adjoint() * cav
    }

    /// Product of identical particle states `pair` (amplitudes on the
    /// `(n_a, n_b)` grid) with the cavity vacuum.
    pub fn product_state(&self, pair: &[(usize, usize, Complex64)]) -> Vector {
        let (da, db) = (self.dims[0], self.dims[1]);
        let mut block = Vector::zeros(da * db);
        for &(na, nb, amp) in pair {
            block[na * db + nb] = amp;
        }
        let dc = self.dims[self.dims.len() - 1];
        let mut vac = Vector::zeros(dc);
        vac[0] = c(1.0);
        let mut state = Vector::from_element(1, c(1.0));
        for _ in 0..self.n {
            state = state.kronecker(&block);
        }
        state.kronecker(&vac)
    }

    pub fn exchange(&self, theta: f64, phi: f64) -> Vector {
        let e = Complex64::from_polar(theta.sin(), phi);
        self.product_state(&[(0, 1, c(theta.cos())), (1, 0, e)])
    }

    pub fn pairing(&self, theta: f64, phi: f64) -> Vector {
        let e = Complex64::from_polar(theta.sin(), phi);
        self.product_state(&[(0, 0, c(theta.cos())), (1, 1, e)])
    }
}

pub fn expect(op: &Mat, psi: &Vector) -> Complex64 {
    (psi.adjoint() * op * psi)[(0, 0)]
}

pub fn to_dense(rows: &[Vec<Complex64>]) -> Mat {
    let n = rows.len();
    Mat::from_fn(n, n, |r, col| rows[r][col])
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_vector(amps: &[Complex64]) -> Vector {
    Vector::from_column_slice(amps)
}
