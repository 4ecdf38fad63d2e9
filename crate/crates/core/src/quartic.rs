//! Ternary forms and dense projective scans over `P^2(k)`.

use rayon::prelude::*;

use crate::gf2::{Embedding, Fe, Field};

/// A homogeneous form as a list of `(exponents of x, y, z; coefficient)`
/// terms. Like terms are merged on construction.
#[derive(Clone, Debug)]
pub struct Form {
    degree: u8,
    terms: Vec<([u8; 3], Fe)>,
}

impl Form {
    pub fn new(degree: u8, terms: impl IntoIterator<Item = ([u8; 3], Fe)>) -> Form {
        let mut f = Form { degree, terms: Vec::new() };
        for (e, c) in terms {
            debug_assert_eq!(e.iter().sum::<u8>(), degree);
            f.push(e, c);
        }
        f
    }

    fn push(&mut self, e: [u8; 3], c: Fe) {
        match self.terms.iter_mut().find(|(x, _)| *x == e) {
            Some((_, acc)) => *acc += c,
            None => self.terms.push((e, c)),
        }
    }

    /// Nonzero terms sorted by exponent.
    fn canonical(&self) -> Vec<([u8; 3], Fe)> {
        let mut t: Vec<_> = self.terms.iter().copied().filter(|(_, c)| !c.is_zero()).collect();
        t.sort();
        t
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn mul(&self, k: &Field, other: &Form) -> Form {
        let mut out = Form { degree: self.degree + other.degree, terms: Vec::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.push([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], k.mul(*c1, *c2));
            }
        }
        out
    }

    /// Square in characteristic 2: cross terms vanish.
    pub fn square(&self, k: &Field) -> Form {
        Form::new(
            self.degree * 2,
            self.terms
                .iter()
                .map(|(e, c)| ([e[0] * 2, e[1] * 2, e[2] * 2], k.square(*c))),
        )
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(*e, *c);
        }
        out
    }

    /// Coefficient of `x^i y^j z^l`.
    pub fn coeff(&self, e: [u8; 3]) -> Fe {
        self.terms
            .iter()
            .filter(|(x, _)| *x == e)
            .fold(Fe::ZERO, |acc, (_, c)| acc + *c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_zero())
    }

    /// Formal partial derivative in variable `var` (0, 1, 2).
    pub fn derivative(&self, var: usize) -> Form {
        let mut out = Form { degree: self.degree.saturating_sub(1), terms: Vec::new() };
        for (e, c) in &self.terms {
            if e[var] % 2 == 1 {
                let mut e2 = *e;
                e2[var] -= 1;
                out.push(e2, *c);
            }
        }
        out
    }

    pub fn eval(&self, k: &Field, p: [Fe; 3]) -> Fe {
        self.terms.iter().fold(Fe::ZERO, |acc, (e, c)| {
            let m = (0..3).fold(*c, |m, v| k.mul(m, k.pow(p[v], e[v] as u64)));
            acc + m
        })
    }

    /// The same form with coefficients pushed through a field embedding.
    pub fn map_coefficients(&self, emb: &Embedding<'_>) -> Form {
        Form {
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| (*e, emb.apply(*c))).collect(),
        }
    }

    /// Coefficients of the restriction to the chart `z = 1` as a polynomial
    /// in `y`, for a fixed `x`: index `j` holds the coefficient of `y^j`.
    fn row_coefficients(&self, k: &Field, x: Fe) -> Vec<Fe> {
        let mut out = vec![Fe::ZERO; self.degree as usize + 1];
        for (e, c) in &self.terms {
            out[e[1] as usize] += k.mul(*c, k.pow(x, e[0] as u64));
        }
        out
    }
}

impl PartialEq for Form {
    fn eq(&self, other: &Form) -> bool {
        self.degree == other.degree && self.canonical() == other.canonical()
    }
}

impl Eq for Form {}

/// Normalized representatives of `P^2(k)`: `(x, y, 1)`, `(x, 1, 0)`, `(1, 0, 0)`,
/// in that order.
pub fn projective_points(k: &Field) -> impl Iterator<Item = [Fe; 3]> + '_ {
    let chart_z = k
        .elements()
        .flat_map(move |x| k.elements().map(move |y| [x, y, Fe::ONE]));
    let chart_y = k.elements().map(|x| [x, Fe::ONE, Fe::ZERO]);
    chart_z
        .chain(chart_y)
        .chain(std::iter::once([Fe::ONE, Fe::ZERO, Fe::ZERO]))
}

/// Scales a nonzero projective triple so its last nonzero coordinate is 1.
pub fn normalize(k: &Field, p: [Fe; 3]) -> [Fe; 3] {
    let pivot = *p.iter().rev().find(|c| !c.is_zero()).expect("nonzero projective point");
    let inv = k.inv(pivot).expect("nonzero");
    [k.mul(p[0], inv), k.mul(p[1], inv), k.mul(p[2], inv)]
}

/// Number of points of `P^2(k)` on which the form vanishes.
pub fn count_zeros(k: &Field, form: &Form) -> u64 {
    let row = |x: Fe| -> u64 {
        let c = form.row_coefficients(k, x);
        k.elements()
            .filter(|&y| c.iter().rev().fold(Fe::ZERO, |acc, &ci| k.mul(acc, y) + ci).is_zero())
            .count() as u64
    };
    let affine: u64 = if k.q() >= 256 {
        (0..k.q() as u32)
            .into_par_iter()
            .map(|x| row(Fe::from_bits(x)))
            .sum()
    } else {
        k.elements().map(row).sum()
    };
    let at_infinity = k
        .elements()
        .map(|x| [x, Fe::ONE, Fe::ZERO])
        .chain(std::iter::once([Fe::ONE, Fe::ZERO, Fe::ZERO]))
        .filter(|&p| form.eval(k, p).is_zero())
        .count() as u64;
    affine + at_infinity
}

/// First point of `P^2(k)` (in scan order) where the form and its three
/// partials all vanish.
pub fn find_singular_point(k: &Field, form: &Form) -> Option<[Fe; 3]> {
    let partials = [form.derivative(0), form.derivative(1), form.derivative(2)];
    projective_points(k).find(|&p| {
        form.eval(k, p).is_zero() && partials.iter().all(|d| d.eval(k, p).is_zero())
    })
}
