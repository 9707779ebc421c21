//! Fixed single-qubit operators used by the protocols.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{c, ComplexMatrix, I, ONE, ZERO};

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[ONE, -ONE])
}

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ])
}

/// `|0⟩⟨0| + i|1⟩⟨1|`
pub fn phase_s() -> ComplexMatrix {
    ComplexMatrix::diag(&[ONE, I])
}

/// `|0⟩⟨0| − i|1⟩⟨1|`
pub fn phase_s_dagger() -> ComplexMatrix {
    ComplexMatrix::diag(&[ONE, -I])
}

/// Projectors onto `|+⟩` and `|−⟩`.
pub fn x_basis_projectors() -> [ComplexMatrix; 2] {
    [
        ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]),
        ComplexMatrix::from_real_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]),
    ]
}

/// Projectors onto `|0⟩` and `|1⟩`.
pub fn z_basis_projectors() -> [ComplexMatrix; 2] {
    [
        ComplexMatrix::diag(&[ONE, ZERO]),
        ComplexMatrix::diag(&[ZERO, ONE]),
    ]
}

/// First Kraus operator of the erasing measurement: `[[i/√2, 1/√2], [0, 0]]`.
pub fn erasing_kraus_1() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(0.0, FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)],
        vec![ZERO, ZERO],
    ])
}

/// Second Kraus operator of the erasing measurement: `[[−i/√2, 1/√2], [0, 0]]`.
pub fn erasing_kraus_2() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(0.0, -FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)],
        vec![ZERO, ZERO],
    ])
}

/// Rank-1 projectors `|n⟩⟨n|`, `|−n⟩⟨−n|` for the qubit direction with polar
/// angle `theta` and azimuth `phi`.
pub fn projective_pair(theta: f64, phi: f64) -> [ComplexMatrix; 2] {
    let (x, y, z) = (
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    );
    let half = |sign: f64| {
        ComplexMatrix::from_rows(&[
            vec![
                c(0.5 * (1.0 + sign * z), 0.0),
                c(0.5 * sign * x, -0.5 * sign * y),
            ],
            vec![
                c(0.5 * sign * x, 0.5 * sign * y),
                c(0.5 * (1.0 - sign * z), 0.0),
            ],
        ])
    };
    [half(1.0), half(-1.0)]
}
