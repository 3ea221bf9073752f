//! JSON state descriptors.
//!
//! ```json
//! {"kind":"bell","which":"phi+"}
//! {"kind":"horodecki","a":0.6,"p":0.3}
//! {"kind":"werner","p":0.5}
//! {"kind":"bell_diagonal","lambdas":[0.7,0.1,0.1,0.1]}
//! {"kind":"pure","amplitudes":[[re,im],[re,im],[re,im],[re,im]]}
//! {"kind":"density","matrix":[[[re,im], ...4], ...4]}
//! ```
//!
//! Matrices are row-major in the basis |00⟩, |01⟩, |10⟩, |11⟩.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{Mat4, C64};
use crate::states::{
    bell_diagonal_state, bell_state, density_from_pure, horodecki_state, werner_state, BellKind,
    DensityMatrix, PureState,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateDescriptor {
    Bell { which: BellKind },
    Horodecki { a: f64, p: f64 },
    Werner { p: f64 },
    BellDiagonal { lambdas: [f64; 4] },
    Pure { amplitudes: [[f64; 2]; 4] },
    Density { matrix: [[[f64; 2]; 4]; 4] },
}

impl StateDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }

    /// Builds and validates the described state.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            StateDescriptor::Bell { which } => Ok(density_from_pure(&bell_state(*which))),
            StateDescriptor::Horodecki { a, p } => horodecki_state(*a, *p),
            StateDescriptor::Werner { p } => werner_state(*p),
            StateDescriptor::BellDiagonal { lambdas } => bell_diagonal_state(*lambdas),
            StateDescriptor::Pure { amplitudes } => {
                let psi = PureState::new(amplitudes.map(|[re, im]| C64::new(re, im)))?;
                Ok(density_from_pure(&psi))
            }
            StateDescriptor::Density { matrix } => {
                let mut m = Mat4::zeros();
                for i in 0..4 {
                    for j in 0..4 {
                        let [re, im] = matrix[i][j];
                        m.0[i][j] = C64::new(re, im);
                    }
                }
                DensityMatrix::new(m)
            }
        }
    }

    /// Raw-matrix descriptor for any state.
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let mut matrix = [[[0.0; 2]; 4]; 4];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let z = rho.entry(i, j);
                *cell = [z.re, z.im];
            }
        }
        StateDescriptor::Density { matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        StateDescriptor::Pure {
            amplitudes: psi.amplitudes().map(|z| [z.re, z.im]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;
    use crate::states::random_mixed;

    #[test]
    fn parses_every_kind() {
        let cases = [
            r#"{"kind":"bell","which":"phi+"}"#,
            r#"{"kind":"bell","which":"psi-"}"#,
            r#"{"kind":"horodecki","a":0.6,"p":0.3}"#,
            r#"{"kind":"werner","p":0.5}"#,
            r#"{"kind":"bell_diagonal","lambdas":[0.7,0.1,0.1,0.1]}"#,
            r#"{"kind":"pure","amplitudes":[[1,0],[0,0],[0,0],[0,0]]}"#,
        ];
        for c in cases {
            let d = StateDescriptor::from_json(c).unwrap();
            d.to_density().unwrap();
        }
        let werner = StateDescriptor::from_json(r#"{"kind":"werner","p":0.5}"#).unwrap();
        assert_eq!(werner, StateDescriptor::Werner { p: 0.5 });
    }

    #[test]
    fn malformed_input() {
        for bad in [
            "{",
            r#"{"kind":"bell","which":"phi"}"#,
            r#"{"kind":"teleport"}"#,
            r#"{"kind":"werner"}"#,
            r#"{"kind":"werner","p":0.5,"q":1}"#,
        ] {
            assert!(matches!(
                StateDescriptor::from_json(bad),
                Err(Error::Descriptor(_))
            ));
        }
        let d = StateDescriptor::from_json(r#"{"kind":"werner","p":2.0}"#).unwrap();
        assert!(matches!(d.to_density(), Err(Error::Usage(_))));
    }

    #[test]
    fn density_round_trip_is_exact() {
        let rho = random_mixed(RngSeed(9), 3).unwrap();
        let text = StateDescriptor::from_density(&rho).to_json();
        let back = StateDescriptor::from_json(&text).unwrap().to_density().unwrap();
        assert_eq!(back, rho);
    }
}
