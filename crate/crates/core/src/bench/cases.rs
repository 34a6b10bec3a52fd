use std::f64::consts::PI;

use nalgebra::Matrix3;

use crate::mesh::Vec3;

/// A one-variable factor: value, first and second derivative at `t`.
type Factor = fn(f64) -> [f64; 3];

/// `coef * f0(x) f1(y) f2(z)`.
#[derive(Clone, Copy)]
struct Term {
    coef: f64,
    f: [Factor; 3],
}

fn one(_: f64) -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn lin(t: f64) -> [f64; 3] {
    [t, 1.0, 0.0]
}

fn two_t_minus_one(t: f64) -> [f64; 3] {
    [2.0 * t - 1.0, 2.0, 0.0]
}

fn one_minus_two_t(t: f64) -> [f64; 3] {
    [1.0 - 2.0 * t, -2.0, 0.0]
}

/// `t (1 - t)`.
fn bump(t: f64) -> [f64; 3] {
    [t * (1.0 - t), 1.0 - 2.0 * t, -2.0]
}

/// `t^2 (t - 1)^2`.
fn quartic(t: f64) -> [f64; 3] {
    [t * t * (t - 1.0) * (t - 1.0), 2.0 * t * (t - 1.0) * (2.0 * t - 1.0), 12.0 * t * t - 12.0 * t + 2.0]
}

/// `2t^3 - 3t^2 + t`, half the derivative of [`quartic`].
fn cubic(t: f64) -> [f64; 3] {
    [2.0 * t.powi(3) - 3.0 * t * t + t, 6.0 * t * t - 6.0 * t + 1.0, 12.0 * t - 6.0]
}

/// `sin^2(pi t)`.
fn sin_sq(t: f64) -> [f64; 3] {
    let s = (PI * t).sin();
    [s * s, PI * (2.0 * PI * t).sin(), 2.0 * PI * PI * (2.0 * PI * t).cos()]
}

/// Derivative of [`sin_sq`].
fn sin_sq_prime(t: f64) -> [f64; 3] {
    let a = 2.0 * PI * t;
    [PI * a.sin(), 2.0 * PI * PI * a.cos(), -4.0 * PI.powi(3) * a.sin()]
}

fn cos_pi(t: f64) -> [f64; 3] {
    let a = PI * t;
    [a.cos(), -PI * a.sin(), -PI * PI * a.cos()]
}

impl Term {
    fn eval(&self, x: &Vec3) -> [[f64; 3]; 3] {
        [(self.f[0])(x[0]), (self.f[1])(x[1]), (self.f[2])(x[2])]
    }

    /// Mixed partial with `orders[k]` derivatives in direction `k`.
    fn partial(vals: &[[f64; 3]; 3], orders: [usize; 3]) -> f64 {
        vals[0][orders[0]] * vals[1][orders[1]] * vals[2][orders[2]]
    }
}

fn value(terms: &[Term], x: &Vec3) -> f64 {
    terms.iter().map(|t| t.coef * Term::partial(&t.eval(x), [0, 0, 0])).sum()
}

fn gradient(terms: &[Term], x: &Vec3) -> Vec3 {
    let mut g = Vec3::zeros();
    for t in terms {
        let v = t.eval(x);
        for k in 0..3 {
            let mut o = [0; 3];
            o[k] = 1;
            g[k] += t.coef * Term::partial(&v, o);
        }
    }
    g
}

fn hessian(terms: &[Term], x: &Vec3) -> Matrix3<f64> {
    let mut h = Matrix3::zeros();
    for t in terms {
        let v = t.eval(x);
        for p in 0..3 {
            for q in 0..3 {
                let mut o = [0; 3];
                o[p] += 1;
                o[q] += 1;
                h[(p, q)] += t.coef * Term::partial(&v, o);
            }
        }
    }
    h
}

/// An exact Stokes solution `(u, p)` on the unit square or cube, with the
/// source `f = -div(A grad u) + grad p` for a constant coefficient `A`.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub dim: usize,
    /// Whether `u` vanishes on the boundary.
    pub homogeneous: bool,
    pub coefficient: Matrix3<f64>,
    velocity: [Vec<Term>; 3],
    pressure: Vec<Term>,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

impl ManufacturedCase {
    pub fn velocity(&self, x: &Vec3) -> Vec3 {
        Vec3::new(value(&self.velocity[0], x), value(&self.velocity[1], x), value(&self.velocity[2], x))
    }

    /// Row `i` is `grad u_i`.
    pub fn velocity_gradient(&self, x: &Vec3) -> Matrix3<f64> {
        let mut g = Matrix3::zeros();
        for i in 0..3 {
            g.set_row(i, &gradient(&self.velocity[i], x).transpose());
        }
        g
    }

    pub fn velocity_hessians(&self, x: &Vec3) -> [Matrix3<f64>; 3] {
        [hessian(&self.velocity[0], x), hessian(&self.velocity[1], x), hessian(&self.velocity[2], x)]
    }

    pub fn divergence(&self, x: &Vec3) -> f64 {
        self.velocity_gradient(x).trace()
    }

    pub fn pressure(&self, x: &Vec3) -> f64 {
        value(&self.pressure, x)
    }

    pub fn pressure_gradient(&self, x: &Vec3) -> Vec3 {
        gradient(&self.pressure, x)
    }

    pub fn source(&self, x: &Vec3) -> Vec3 {
        let hs = self.velocity_hessians(x);
        let gp = self.pressure_gradient(x);
        let a = &self.coefficient;
        let mut f = Vec3::zeros();
        for i in 0..3 {
            f[i] = -a.component_mul(&hs[i]).sum() + gp[i];
        }
        f
    }

    pub fn with_coefficient(mut self, a: Matrix3<f64>) -> Self {
        self.coefficient = a;
        self
    }
}

/// `u = (10 x^2 (x-1)^2 y (2y-1)(y-1), -10 x (2x-1)(x-1) y^2 (y-1)^2)`,
/// `p = 10 (2x-1)(2y-1)`; `u = 0` on the boundary.
pub fn case1() -> ManufacturedCase {
    ManufacturedCase {
        name: "case1",
        dim: 2,
        homogeneous: true,
        coefficient: Matrix3::identity(),
        velocity: [
            vec![Term { coef: 10.0, f: [quartic, cubic, one] }],
            vec![Term { coef: -10.0, f: [cubic, quartic, one] }],
            vec![],
        ],
        pressure: vec![Term { coef: 10.0, f: [two_t_minus_one, two_t_minus_one, one] }],
    }
}

/// `u = (x(1-x)(1-2y), -y(1-y)(1-2x))`, `p = 2(y - x)`, nonzero boundary data.
pub fn case2() -> ManufacturedCase {
    ManufacturedCase {
        name: "case2",
        dim: 2,
        homogeneous: false,
        coefficient: Matrix3::identity(),
        velocity: [
            vec![Term { coef: 1.0, f: [bump, one_minus_two_t, one] }],
            vec![Term { coef: -1.0, f: [one_minus_two_t, bump, one] }],
            vec![],
        ],
        pressure: vec![Term { coef: 2.0, f: [one, lin, one] }, Term { coef: -2.0, f: [lin, one, one] }],
    }
}

/// With `S(t) = sin^2(pi t)`: `u = (S(x) S'(y) S(z), -S'(x) S(y) S(z), 0)`,
/// `p = cos(pi x) cos(pi y) cos(pi z)`; `u = 0` on the boundary of the unit cube.
pub fn case3d() -> ManufacturedCase {
    ManufacturedCase {
        name: "case3d",
        dim: 3,
        homogeneous: true,
        coefficient: Matrix3::identity(),
        velocity: [
            vec![Term { coef: 1.0, f: [sin_sq, sin_sq_prime, sin_sq] }],
            vec![Term { coef: -1.0, f: [sin_sq_prime, sin_sq, sin_sq] }],
            vec![],
        ],
        pressure: vec![Term { coef: 1.0, f: [cos_pi, cos_pi, cos_pi] }],
    }
}

pub fn case_by_number(n: u32) -> Option<ManufacturedCase> {
    match n {
        1 => Some(case1()),
        2 => Some(case2()),
        3 => Some(case3d()),
        _ => None,
    }
}
