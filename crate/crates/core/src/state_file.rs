//! JSON state files.
//!
//! ```json
//! {"modes": 2, "cutoffs": [2, 2], "kind": "pure",
//!  "amplitudes": [{"occ": [0, 1], "re": 1.0, "im": 0.0}, ...]}
//! {"modes": 2, "cutoffs": [2, 2], "kind": "mixed",
//!  "matrix": [{"row": [0, 1], "col": [0, 1], "re": 0.5, "im": 0.0}, ...]}
//! ```
//!
//! Unlisted entries are zero. Amplitudes are normalized on load.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasisIndex, FockState, StateData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub occ: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub row: Vec<usize>,
    pub col: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

/// On-disk representation of a [`FockState`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub modes: usize,
    pub cutoffs: Vec<usize>,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<MatrixEntry>>,
}

impl StateFile {
    pub fn from_state(state: &FockState) -> Self {
        let layout = state.layout();
        let nonzero = |z: &Complex64| z.re != 0.0 || z.im != 0.0;
        let (kind, amplitudes, matrix) = match state.data() {
            StateData::Pure(psi) => {
                let entries = psi
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| nonzero(a))
                    .map(|(flat, a)| AmplitudeEntry {
                        occ: layout.occupations(flat),
                        re: a.re,
                        im: a.im,
                    })
                    .collect();
                (StateKind::Pure, Some(entries), None)
            }
            StateData::Mixed(rho) => {
                let mut entries = Vec::new();
                for r in 0..rho.nrows() {
                    for c in 0..rho.ncols() {
                        let z = rho[(r, c)];
                        if nonzero(&z) {
                            entries.push(MatrixEntry {
                                row: layout.occupations(r),
                                col: layout.occupations(c),
                                re: z.re,
                                im: z.im,
                            });
                        }
                    }
                }
                (StateKind::Mixed, None, Some(entries))
            }
        };
        Self {
            modes: state.mode_count(),
            cutoffs: state.cutoffs().to_vec(),
            kind,
            amplitudes,
            matrix,
        }
    }

    pub fn into_state(self) -> Result<FockState> {
        if self.modes != self.cutoffs.len() {
            return Err(Error::Parse(format!(
                "\"modes\" is {} but {} cutoffs are listed",
                self.modes,
                self.cutoffs.len()
            )));
        }
        match (self.kind, self.amplitudes, self.matrix) {
            (StateKind::Pure, Some(amps), None) => FockState::new_pure(
                &self.cutoffs,
                amps.into_iter()
                    .map(|e| (FockBasisIndex(e.occ), Complex64::new(e.re, e.im))),
            ),
            (StateKind::Mixed, None, Some(entries)) => FockState::new_mixed(
                &self.cutoffs,
                entries.into_iter().map(|e| {
                    (
                        FockBasisIndex(e.row),
                        FockBasisIndex(e.col),
                        Complex64::new(e.re, e.im),
                    )
                }),
            ),
            (StateKind::Pure, _, _) => Err(Error::Parse(
                "pure state files need \"amplitudes\" and no \"matrix\"".into(),
            )),
            (StateKind::Mixed, _, _) => Err(Error::Parse(
                "mixed state files need \"matrix\" and no \"amplitudes\"".into(),
            )),
        }
    }
}

impl FockState {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&StateFile::from_state(self))
            .expect("state files always serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_state()
    }

    pub fn write_json<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_json_string().as_bytes())?;
        writer.write_all(b"\n")
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let file: StateFile =
            serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_state()
    }
}
