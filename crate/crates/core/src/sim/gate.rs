use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ForgeError, Result};

/// A gate angle: either a literal or a named slot bound at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param { name: String, negated: bool },
}

impl Angle {
    pub fn param(name: impl Into<String>) -> Self {
        Angle::Param {
            name: name.into(),
            negated: false,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Angle::Fixed(v) => Some(*v),
            Angle::Param { .. } => None,
        }
    }

    pub fn negated(&self) -> Angle {
        match self {
            Angle::Fixed(v) => Angle::Fixed(-v),
            Angle::Param { name, negated } => Angle::Param {
                name: name.clone(),
                negated: !negated,
            },
        }
    }

    pub fn bind(&self, params: &HashMap<String, f64>) -> Result<Angle> {
        match self {
            Angle::Fixed(v) => Ok(Angle::Fixed(*v)),
            Angle::Param { name, negated } => {
                let v = *params
                    .get(name)
                    .ok_or_else(|| ForgeError::UnboundParameter(name.clone()))?;
                if !v.is_finite() {
                    return Err(ForgeError::NonFinite(format!("parameter `{name}` = {v}")));
                }
                Ok(Angle::Fixed(if *negated { -v } else { v }))
            }
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Fixed(v) => write!(f, "{v}"),
            Angle::Param { name, negated } => {
                if *negated {
                    write!(f, "-{name}")
                } else {
                    write!(f, "{name}")
                }
            }
        }
    }
}

/// The fixed gate set. Two-qubit local matrices use the basis order
/// `|00>, |01>, |10>, |11>` where the left label is the first target.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    Ry(usize, Angle),
    Rz(usize, Angle),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    /// Particle-number-conserving rotation with a `-1` phase on `|11>`.
    Hop(usize, usize, Angle),
    /// [`Gate::Hop`] with the `|11>` phase removed.
    ModHop(usize, usize, Angle),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Ry(..) => "RY",
            Gate::Rz(..) => "RZ",
            Gate::Cnot(..) => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Swap(..) => "SWAP",
            Gate::Hop(..) => "HOP",
            Gate::ModHop(..) => "MODHOP",
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::Ry(q, _)
            | Gate::Rz(q, _) => vec![q],
            Gate::Cnot(a, b)
            | Gate::Cz(a, b)
            | Gate::Swap(a, b)
            | Gate::Hop(a, b, _)
            | Gate::ModHop(a, b, _) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.targets().len() == 2
    }

    pub fn angle(&self) -> Option<&Angle> {
        match self {
            Gate::Ry(_, a) | Gate::Rz(_, a) | Gate::Hop(_, _, a) | Gate::ModHop(_, _, a) => {
                Some(a)
            }
            _ => None,
        }
    }

    fn with_angle(&self, angle: Angle) -> Gate {
        match *self {
            Gate::Ry(q, _) => Gate::Ry(q, angle),
            Gate::Rz(q, _) => Gate::Rz(q, angle),
            Gate::Hop(a, b, _) => Gate::Hop(a, b, angle),
            Gate::ModHop(a, b, _) => Gate::ModHop(a, b, angle),
            ref other => other.clone(),
        }
    }

    /// Same gate kind acting on relabelled qubits.
    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::X(q) => Gate::X(f(*q)),
            Gate::Y(q) => Gate::Y(f(*q)),
            Gate::Z(q) => Gate::Z(f(*q)),
            Gate::H(q) => Gate::H(f(*q)),
            Gate::S(q) => Gate::S(f(*q)),
            Gate::Sdg(q) => Gate::Sdg(f(*q)),
            Gate::Ry(q, a) => Gate::Ry(f(*q), a.clone()),
            Gate::Rz(q, a) => Gate::Rz(f(*q), a.clone()),
            Gate::Cnot(a, b) => Gate::Cnot(f(*a), f(*b)),
            Gate::Cz(a, b) => Gate::Cz(f(*a), f(*b)),
            Gate::Swap(a, b) => Gate::Swap(f(*a), f(*b)),
            Gate::Hop(a, b, t) => Gate::Hop(f(*a), f(*b), t.clone()),
            Gate::ModHop(a, b, t) => Gate::ModHop(f(*a), f(*b), t.clone()),
        }
    }

    /// Exact inverse within the gate set.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::Ry(..) | Gate::Rz(..) | Gate::Hop(..) | Gate::ModHop(..) => {
                let a = self.angle().expect("rotation has an angle").negated();
                self.with_angle(a)
            }
            other => other.clone(),
        }
    }

    pub fn bind(&self, params: &HashMap<String, f64>) -> Result<Gate> {
        match self.angle() {
            Some(a) => Ok(self.with_angle(a.bind(params)?)),
            None => Ok(self.clone()),
        }
    }

    pub fn is_bound(&self) -> bool {
        self.angle().is_none_or(|a| a.value().is_some())
    }

    /// True when the gate matrix is real in the computational basis
    /// regardless of its angle.
    pub fn is_real(&self) -> bool {
        !matches!(
            self,
            Gate::Y(_) | Gate::S(_) | Gate::Sdg(_) | Gate::Rz(..)
        )
    }

    /// Local matrix (2x2 or 4x4). `None` while a parameter is unbound.
    pub fn matrix(&self) -> Option<DMatrix<Complex64>> {
        let r = |v: f64| Complex64::new(v, 0.0);
        let z = r(0.0);
        let o = r(1.0);
        let i = Complex64::new(0.0, 1.0);
        let h = r(FRAC_1_SQRT_2);
        let m2 = |a: [Complex64; 4]| DMatrix::from_row_slice(2, 2, &a);
        let m4 = |a: [Complex64; 16]| DMatrix::from_row_slice(4, 4, &a);
        let theta = match self.angle() {
            Some(a) => Some(a.value()?),
            None => None,
        };
        Some(match self {
            Gate::X(_) => m2([z, o, o, z]),
            Gate::Y(_) => m2([z, -i, i, z]),
            Gate::Z(_) => m2([o, z, z, -o]),
            Gate::H(_) => m2([h, h, h, -h]),
            Gate::S(_) => m2([o, z, z, i]),
            Gate::Sdg(_) => m2([o, z, z, -i]),
            Gate::Ry(..) => {
                let t = theta.unwrap() / 2.0;
                m2([r(t.cos()), r(-t.sin()), r(t.sin()), r(t.cos())])
            }
            Gate::Rz(..) => {
                let t = theta.unwrap() / 2.0;
                m2([Complex64::from_polar(1.0, -t), z, z, Complex64::from_polar(1.0, t)])
            }
            Gate::Cnot(..) => m4([o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z]),
            Gate::Cz(..) => m4([o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, -o]),
            Gate::Swap(..) => m4([o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o]),
            Gate::Hop(..) | Gate::ModHop(..) => {
                let t = theta.unwrap();
                let (s, c) = t.sin_cos();
                let last = if matches!(self, Gate::Hop(..)) { -o } else { o };
                m4([
                    o, z, z, z, //
                    z, r(c), r(-s), z, //
                    z, r(s), r(c), z, //
                    z, z, z, last,
                ])
            }
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.targets() {
            write!(f, " {q}")?;
        }
        if let Some(a) = self.angle() {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}
