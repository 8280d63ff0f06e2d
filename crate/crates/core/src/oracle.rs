//! Hilbert-space trace oracle for the singlet state: 4x4 complex matrices,
//! one-sided spin projectors, and joint/single detection traces.

use num_complex::Complex64;

use crate::Error;

pub const HERMITICITY_TOL: f64 = 1e-12;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C; 2]; 2]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[C; 4]; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        let z = C::new(0.0, 0.0);
        let o = C::new(1.0, 0.0);
        Mat2([[o, z], [z, o]])
    }
}

impl Mat4 {
    pub fn zero() -> Self {
        Mat4([[C::new(0.0, 0.0); 4]; 4])
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = C::new(0.0, 0.0);
                for k in 0..4 {
                    acc += self.0[i][k] * other.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }

    pub fn trace(&self) -> C {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..4 {
            for j in 0..4 {
                if (self.0[i][j] - self.0[j][i].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_idempotent(&self, tol: f64) -> bool {
        let sq = self.mul(self);
        for i in 0..4 {
            for j in 0..4 {
                if (sq.0[i][j] - self.0[i][j]).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// Projector onto spin-up along the coplanar direction at `angle_deg`
/// in the x-z plane: 1/2 (I + sin(angle) sigma_x + cos(angle) sigma_z).
pub fn spin_up_projector(angle_deg: f64) -> Mat2 {
    let t = angle_deg.to_radians();
    let (s, c) = (t.sin(), t.cos());
    let h = 0.5;
    Mat2([
        [C::new(h * (1.0 + c), 0.0), C::new(h * s, 0.0)],
        [C::new(h * s, 0.0), C::new(h * (1.0 - c), 0.0)],
    ])
}

/// Density matrix of the singlet state (|01> - |10>)/sqrt(2).
pub fn singlet_density() -> Mat4 {
    let mut w = Mat4::zero();
    let h = C::new(0.5, 0.0);
    // nonzero block on the |01>, |10> subspace
    w.0[1][1] = h;
    w.0[2][2] = h;
    w.0[1][2] = -h;
    w.0[2][1] = -h;
    w
}

/// Maximally mixed two-particle state, I/4.
pub fn maximally_mixed() -> Mat4 {
    let mut w = Mat4::zero();
    for i in 0..4 {
        w.0[i][i] = C::new(0.25, 0.0);
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleSide {
    Left,
    Right,
}

/// A two-particle state prepared for trace computations.
#[derive(Debug, Clone)]
pub struct QuantumSetup {
    state: Mat4,
    /// Pure states must be idempotent; mixed states may opt out.
    require_pure: bool,
}

impl QuantumSetup {
    pub fn new(state: Mat4, require_pure: bool) -> Result<Self, Error> {
        if !state.is_hermitian(HERMITICITY_TOL) {
            return Err(Error::Invalid("state is not Hermitian".into()));
        }
        let tr = state.trace();
        if (tr - C::new(1.0, 0.0)).norm() > HERMITICITY_TOL {
            return Err(Error::Invalid(format!("state trace is {tr}, not 1")));
        }
        if require_pure && !state.is_idempotent(HERMITICITY_TOL) {
            return Err(Error::Invalid("pure state is not idempotent".into()));
        }
        Ok(Self { state, require_pure })
    }

    pub fn singlet() -> Self {
        Self::new(singlet_density(), true).unwrap()
    }

    pub fn is_pure(&self) -> bool {
        self.require_pure
    }

    fn one_sided(angle_deg: f64, side: OracleSide) -> Result<Mat4, Error> {
        let p = spin_up_projector(angle_deg);
        let full = match side {
            OracleSide::Left => kron(&p, &Mat2::identity()),
            OracleSide::Right => kron(&Mat2::identity(), &p),
        };
        if !full.is_hermitian(HERMITICITY_TOL) || !full.is_idempotent(HERMITICITY_TOL) {
            return Err(Error::Invalid("projector fails P = P^2 = P^dagger".into()));
        }
        Ok(full)
    }

    fn real_trace(m: &Mat4) -> Result<f64, Error> {
        let t = m.trace();
        if t.im.abs() > HERMITICITY_TOL {
            return Err(Error::Invalid(format!("trace has imaginary residue {}", t.im)));
        }
        Ok(t.re)
    }

    /// tr(W A B) with A the left and B the right outcome projector.
    pub fn joint_trace(&self, left_deg: f64, right_deg: f64) -> Result<f64, Error> {
        let a = Self::one_sided(left_deg, OracleSide::Left)?;
        let b = Self::one_sided(right_deg, OracleSide::Right)?;
        Self::real_trace(&self.state.mul(&a).mul(&b))
    }

    /// tr(W P) for a single one-sided projector; 1/2 for the singlet at
    /// every direction.
    pub fn single_trace(&self, angle_deg: f64, side: OracleSide) -> Result<f64, Error> {
        let p = Self::one_sided(angle_deg, side)?;
        Self::real_trace(&self.state.mul(&p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singlet_state_invariants() {
        let w = singlet_density();
        assert!(w.is_hermitian(1e-15));
        assert!(w.is_idempotent(1e-15));
        assert!((w.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn joint_trace_matches_standard_law() {
        let setup = QuantumSetup::singlet();
        assert!((setup.joint_trace(0.0, 120.0).unwrap() - 0.375).abs() < 1e-12);
        assert!((setup.joint_trace(30.0, 30.0).unwrap()).abs() < 1e-12);
        assert!((setup.joint_trace(0.0, 90.0).unwrap() - 0.25).abs() < 1e-12);
        // law depends only on the separation
        for (l, r) in [(10.0, 75.0), (200.0, 265.0)] {
            let expect = 0.5 * ((r - l) / 2.0f64).to_radians().sin().powi(2);
            assert!((setup.joint_trace(l, r).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn single_trace_is_half_everywhere() {
        let setup = QuantumSetup::singlet();
        for angle in [0.0, 17.0, 45.0, 120.0, 301.5] {
            assert!((setup.single_trace(angle, OracleSide::Left).unwrap() - 0.5).abs() < 1e-12);
            assert!((setup.single_trace(angle, OracleSide::Right).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_state_single_trace() {
        let setup = QuantumSetup::new(maximally_mixed(), false).unwrap();
        assert!((setup.single_trace(33.0, OracleSide::Left).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_states() {
        let mut m = singlet_density();
        m.0[0][1] = C::new(0.1, 0.0);
        assert!(QuantumSetup::new(m, true).is_err());
        let half = Mat4 {
            0: {
                let mut z = [[C::new(0.0, 0.0); 4]; 4];
                z[0][0] = C::new(0.5, 0.0);
                z
            },
        };
        assert!(QuantumSetup::new(half, false).is_err()); // trace 1/2
    }
}
