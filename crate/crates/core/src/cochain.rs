//! Čech cochains on the nerve: integer, real and phase coefficients, with
//! coboundary, alternating evaluation, and pairing against chains.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::cover::Nerve;
use crate::error::{Error, Result};
use crate::mesh::sort_sign;

/// Coefficient arithmetic: additive for integers and reals, multiplicative
/// for unit-modulus phases.
pub trait Coefficient: Clone {
    fn zero() -> Self;
    /// Accumulate `other` with the given orientation sign.
    fn acc(&mut self, sign: i32, other: &Self);
    fn is_zero(&self, tol: f64) -> bool;
}

impl Coefficient for i64 {
    fn zero() -> Self {
        0
    }
    fn acc(&mut self, sign: i32, other: &Self) {
        *self += sign as i64 * other;
    }
    fn is_zero(&self, _tol: f64) -> bool {
        *self == 0
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn acc(&mut self, sign: i32, other: &Self) {
        *self += sign as f64 * other;
    }
    fn is_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

/// Phases compose multiplicatively; the "zero" cochain is identically 1 and
/// a negative orientation inverts (conjugates) the phase.
impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn acc(&mut self, sign: i32, other: &Self) {
        if sign >= 0 {
            *self *= other;
        } else {
            *self *= other.conj();
        }
    }
    fn is_zero(&self, tol: f64) -> bool {
        (*self - Complex64::new(1.0, 0.0)).norm() <= tol
    }
}

/// Cochain of fixed degree on a nerve, stored on ascending-index simplices.
#[derive(Debug, Clone)]
pub struct Cochain<T: Coefficient> {
    pub degree: usize,
    pub values: BTreeMap<usize, T>,
}

impl<T: Coefficient> Cochain<T> {
    pub fn new(degree: usize) -> Self {
        Cochain {
            degree,
            values: BTreeMap::new(),
        }
    }

    pub fn get(&self, simplex_id: usize) -> T {
        self.values.get(&simplex_id).cloned().unwrap_or_else(T::zero)
    }

    /// Value on a simplex given in arbitrary vertex order, with the
    /// alternating sign/inversion convention.
    pub fn eval(&self, nerve: &Nerve, verts: &[usize]) -> Result<T> {
        let mut sorted = verts.to_vec();
        sorted.sort_unstable();
        let sign = permutation_sign(verts);
        if sign == 0 {
            return Ok(T::zero());
        }
        let id = nerve
            .simplex_id(&sorted)
            .ok_or_else(|| Error::MissingNerveSimplex {
                simplex: sorted.clone(),
            })?;
        let mut out = T::zero();
        out.acc(sign, &self.get(id));
        Ok(out)
    }

    /// Čech coboundary: (δc)(i₀…i_{p+1}) = Σ_j (−1)^j c(i₀…î_j…i_{p+1}).
    pub fn coboundary(&self, nerve: &Nerve) -> Result<Cochain<T>> {
        let target = self.degree + 1;
        let mut out = Cochain::new(target);
        for (id, simplex) in nerve.simplices(target).iter().enumerate() {
            let mut acc = T::zero();
            for j in 0..simplex.verts.len() {
                let mut face: Vec<usize> = simplex.verts.clone();
                face.remove(j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let face_id =
                    nerve
                        .simplex_id(&face)
                        .ok_or_else(|| Error::MissingNerveSimplex {
                            simplex: face.clone(),
                        })?;
                acc.acc(sign, &self.get(face_id));
            }
            out.values.insert(id, acc);
        }
        Ok(out)
    }
}

fn permutation_sign(verts: &[usize]) -> i32 {
    match verts.len() {
        1 => 1,
        2 => sort_sign([verts[0], verts[1]]),
        3 => sort_sign([verts[0], verts[1], verts[2]]),
        4 => sort_sign([verts[0], verts[1], verts[2], verts[3]]),
        _ => panic!("unsupported simplex dimension"),
    }
}

/// Integer chain on the nerve: signed simplex ids of a fixed degree.
#[derive(Debug, Clone)]
pub struct Chain {
    pub degree: usize,
    pub coeffs: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn new(degree: usize) -> Self {
        Chain {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, simplex_id: usize, coeff: i64) {
        let entry = self.coeffs.entry(simplex_id).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&simplex_id);
        }
    }

    /// Simplicial boundary within the nerve.
    pub fn boundary(&self, nerve: &Nerve) -> Result<Chain> {
        if self.degree == 0 {
            return Ok(Chain::new(0));
        }
        let mut out = Chain::new(self.degree - 1);
        for (&id, &coeff) in &self.coeffs {
            let simplex = &nerve.simplices(self.degree)[id];
            for j in 0..simplex.verts.len() {
                let mut face = simplex.verts.clone();
                face.remove(j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let face_id =
                    nerve
                        .simplex_id(&face)
                        .ok_or_else(|| Error::MissingNerveSimplex {
                            simplex: face.clone(),
                        })?;
                out.add(face_id, coeff * sign as i64);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// ⟨c, chain⟩ for additive coefficients.
pub fn pair_int(c: &Cochain<i64>, chain: &Chain) -> i64 {
    chain
        .coeffs
        .iter()
        .map(|(&id, &coeff)| coeff * c.get(id))
        .sum()
}

pub fn pair_real(c: &Cochain<f64>, chain: &Chain) -> f64 {
    chain
        .coeffs
        .iter()
        .map(|(&id, &coeff)| coeff as f64 * c.get(id))
        .sum()
}
