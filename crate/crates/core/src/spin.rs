//! Collective-spin operators in the Dicke basis and the finite-N Hamiltonian
//! matrices built from them.
//!
//! Basis states are ordered by ascending magnetic quantum number, `m = -S`
//! first.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Total spin `S = N/2`, stored as the integer `2S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidArgument("spin must be at least 1/2".into()));
        }
        Ok(Spin(twice))
    }

    /// Parses a spin given as a real number. Only positive multiples of 1/2
    /// are accepted.
    pub fn new(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || twice.fract() != 0.0 || twice < 1.0 || twice > u32::MAX as f64 {
            return Err(Error::InvalidArgument(format!(
                "spin {value} is not a positive half-integer"
            )));
        }
        Ok(Spin(twice as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Dimension `2S + 1` of the spin multiplet.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Magnetic quantum numbers `-S, -S+1, ..., S`.
    pub fn m_values(self) -> impl Iterator<Item = f64> {
        let s = self.value();
        (0..self.dim()).map(move |k| -s + k as f64)
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Spin::new(value)
    }
}

impl From<Spin> for f64 {
    fn from(spin: Spin) -> f64 {
        spin.value()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Sign of the single-spin `tau_z` eigenvalue selecting an LMG block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Couplings of the single spin, the chain and their interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Single-spin z splitting.
    pub omega: f64,
    /// Single-spin x splitting.
    pub delta: f64,
    /// Chain z field.
    pub omega_t: f64,
    /// Chain x field.
    pub delta_t: f64,
    /// Intra-chain Ising coupling.
    pub j_chain: f64,
    /// Spin–chain coupling.
    pub j_couple: f64,
    /// Total chain spin. Only finite-N operations read it.
    pub spin: Spin,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega", self.omega),
            ("delta", self.delta),
            ("omega_t", self.omega_t),
            ("delta_t", self.delta_t),
            ("j_chain", self.j_chain),
            ("j_couple", self.j_couple),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} = {v} is not finite")));
            }
        }
        Ok(())
    }

    pub fn with_spin(self, spin: Spin) -> Self {
        ModelParams { spin, ..self }
    }

    /// Linear `S_z` coefficient of the LMG block selected by `branch`.
    pub fn field(&self, branch: Branch) -> f64 {
        self.omega_t + branch.sign() * self.j_couple / 2.0
    }
}

/// `S_x` and `S_z` in the `|S, m>` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeOperators {
    pub dim: usize,
    pub sx: DMatrix<f64>,
    pub sz: DMatrix<f64>,
}

/// `<m+1|S_x|m> = <m|S_x|m+1>`.
pub fn sx_element(spin: Spin, m: f64) -> f64 {
    let s = spin.value();
    0.5 * (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

pub fn dicke_operators(spin: Spin) -> DickeOperators {
    let dim = spin.dim();
    let m: Vec<f64> = spin.m_values().collect();
    let sz = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(m.clone()));
    let mut sx = DMatrix::zeros(dim, dim);
    for k in 0..dim - 1 {
        let v = sx_element(spin, m[k]);
        sx[(k, k + 1)] = v;
        sx[(k + 1, k)] = v;
    }
    DickeOperators { dim, sx, sz }
}

/// `(omega_t ± j_couple/2) S_z + delta_t S_x + j_chain/(2S) S_z^2`.
///
/// Filled element-wise so the result is exactly symmetric.
pub fn build_lmg(params: &ModelParams, branch: Branch) -> Result<DMatrix<f64>> {
    params.validate()?;
    let spin = params.spin;
    let dim = spin.dim();
    let s = spin.value();
    let field = params.field(branch);
    let mut h = DMatrix::zeros(dim, dim);
    for (k, m) in spin.m_values().enumerate() {
        h[(k, k)] = field * m + params.j_chain / (2.0 * s) * m * m;
        if k + 1 < dim {
            let v = params.delta_t * sx_element(spin, m);
            h[(k, k + 1)] = v;
            h[(k + 1, k)] = v;
        }
    }
    Ok(h)
}

/// Full Hamiltonian as a 2×2 block matrix in the single-spin space:
/// `[[omega/2 + H_LMG^+, delta/2], [delta/2, -omega/2 + H_LMG^-]]`.
pub fn build_full(params: &ModelParams) -> Result<DMatrix<f64>> {
    let plus = build_lmg(params, Branch::Plus)?;
    let minus = build_lmg(params, Branch::Minus)?;
    let n = params.spin.dim();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&plus);
    h.view_mut((n, n), (n, n)).copy_from(&minus);
    for k in 0..n {
        h[(k, k)] += params.omega / 2.0;
        h[(n + k, n + k)] -= params.omega / 2.0;
        h[(k, n + k)] = params.delta / 2.0;
        h[(n + k, k)] = params.delta / 2.0;
    }
    Ok(h)
}
