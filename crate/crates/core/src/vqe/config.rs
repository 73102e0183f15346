use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::bits::BitString;
use crate::error::{ForgeError, Result};
use crate::sim::{strip_comment, Angle, Circuit, Gate};

/// Angle of one hop gate: a free parameter `t<id>` or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HopAngle {
    Param(usize),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopEntry {
    /// Orbital pair in the full (unfrozen) numbering.
    pub orbitals: (usize, usize),
    /// The same pair as active-register qubits.
    pub qubits: (usize, usize),
    pub angle: HopAngle,
}

/// Hop-gate ansatz over the active orbitals of one register. Both registers
/// share the circuit (`V = U`).
///
/// ```text
/// orbitals 7
/// frozen 0 4
/// bitstrings 1111100 1011101
/// hop 1 2 t0
/// hop 5 6 0.25
/// init t0 1.5
/// hf_freeze on
/// hf_energy -74.96
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzConfig {
    orbitals: usize,
    frozen: Vec<usize>,
    full_bitstrings: Vec<BitString>,
    bitstrings: Vec<BitString>,
    gates: Vec<HopEntry>,
    initial: Vec<f64>,
    hf_freeze: bool,
    hf_energy: Option<f64>,
}

impl AnsatzConfig {
    /// `gates` holds `(orbital a, orbital b, angle)` in the full numbering.
    /// An empty `initial` means every parameter starts at zero.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        orbitals: usize,
        frozen: Vec<usize>,
        full_bitstrings: Vec<BitString>,
        gates: Vec<(usize, usize, HopAngle)>,
        initial: Vec<f64>,
        hf_freeze: bool,
        hf_energy: Option<f64>,
    ) -> Result<Self> {
        let frozen_set: BTreeSet<usize> = frozen.iter().copied().collect();
        if frozen_set.len() != frozen.len() {
            return Err(ForgeError::Input("frozen orbitals listed twice".into()));
        }
        if let Some(f) = frozen.iter().find(|&&f| f >= orbitals) {
            return Err(ForgeError::Input(format!("frozen orbital {f} outside 0..{orbitals}")));
        }
        let active: Vec<usize> = (0..orbitals).filter(|o| !frozen_set.contains(o)).collect();
        if active.is_empty() {
            return Err(ForgeError::Input("no active orbitals left".into()));
        }
        if full_bitstrings.is_empty() {
            return Err(ForgeError::Input("ansatz needs at least one bitstring".into()));
        }
        let frozen_list: Vec<usize> = frozen_set.iter().copied().collect();
        let mut bitstrings = Vec::with_capacity(full_bitstrings.len());
        for b in &full_bitstrings {
            if b.len() != orbitals {
                return Err(ForgeError::Input(format!("bitstring {b} does not have {orbitals} bits")));
            }
            if frozen.iter().any(|&f| b.bit(f) != full_bitstrings[0].bit(f)) {
                return Err(ForgeError::Input(format!(
                    "bitstring {b} changes the occupation of a frozen orbital"
                )));
            }
            bitstrings.push(b.without_positions(&frozen_list));
        }
        if bitstrings.iter().collect::<BTreeSet<_>>().len() != bitstrings.len() {
            return Err(ForgeError::Input("bitstrings must be distinct on the active orbitals".into()));
        }
        let position = |o: usize| -> Result<usize> {
            if o >= orbitals {
                return Err(ForgeError::Input(format!("orbital {o} outside 0..{orbitals}")));
            }
            active
                .iter()
                .position(|&a| a == o)
                .ok_or_else(|| ForgeError::Input(format!("hop gate acts on frozen orbital {o}")))
        };
        let mut entries = Vec::with_capacity(gates.len());
        let mut ids = BTreeSet::new();
        for (a, b, angle) in gates {
            if a == b {
                return Err(ForgeError::Input(format!("hop gate on a single orbital {a}")));
            }
            match angle {
                HopAngle::Param(id) => {
                    ids.insert(id);
                }
                HopAngle::Fixed(v) if !v.is_finite() => {
                    return Err(ForgeError::NonFinite(format!("fixed hop angle {v}")));
                }
                HopAngle::Fixed(_) => {}
            }
            entries.push(HopEntry {
                orbitals: (a, b),
                qubits: (position(a)?, position(b)?),
                angle,
            });
        }
        if ids.iter().enumerate().any(|(i, &id)| i != id) {
            return Err(ForgeError::Input(format!(
                "parameter ids must be t0..t{}, got {:?}",
                ids.len().saturating_sub(1),
                ids.iter().map(|i| format!("t{i}")).collect::<Vec<_>>()
            )));
        }
        let initial = if initial.is_empty() { vec![0.0; ids.len()] } else { initial };
        if initial.len() != ids.len() {
            return Err(ForgeError::LengthMismatch {
                expected: ids.len(),
                found: initial.len(),
            });
        }
        if hf_freeze && !hf_energy.is_some_and(f64::is_finite) {
            return Err(ForgeError::Input("hf_freeze requires a finite hf_energy".into()));
        }
        Ok(Self {
            orbitals,
            frozen: frozen_list,
            full_bitstrings,
            bitstrings,
            gates: entries,
            initial,
            hf_freeze,
            hf_energy,
        })
    }

    /// No frozen orbitals, one parameter per listed pair, starting at zero.
    pub fn simple(bitstrings: Vec<BitString>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = bitstrings.first().map_or(0, BitString::len);
        let gates = pairs.iter().enumerate().map(|(i, &(a, b))| (a, b, HopAngle::Param(i))).collect();
        AnsatzConfig::new(n, Vec::new(), bitstrings, gates, Vec::new(), false, None)
    }

    /// Qubits per register (active orbitals).
    pub fn n(&self) -> usize {
        self.orbitals - self.frozen.len()
    }

    pub fn k(&self) -> usize {
        self.bitstrings.len()
    }

    /// Bitstrings restricted to the active orbitals.
    pub fn bitstrings(&self) -> &[BitString] {
        &self.bitstrings
    }

    pub fn gates(&self) -> &[HopEntry] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.initial.len()
    }

    pub fn initial_params(&self) -> &[f64] {
        &self.initial
    }

    pub fn hf_freeze(&self) -> bool {
        self.hf_freeze
    }

    pub fn hf_energy(&self) -> Option<f64> {
        self.hf_energy
    }

    pub fn with_hf_freeze(mut self, on: bool, energy: Option<f64>) -> Result<Self> {
        if on && !energy.is_some_and(f64::is_finite) {
            return Err(ForgeError::Input("hf_freeze requires a finite hf_energy".into()));
        }
        self.hf_freeze = on;
        self.hf_energy = energy;
        Ok(self)
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.n_params() {
            return Err(ForgeError::LengthMismatch {
                expected: self.n_params(),
                found: initial.len(),
            });
        }
        self.initial = initial;
        Ok(self)
    }

    /// The hop-gate circuit `U(θ)` on the active register.
    pub fn build_u(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params() {
            return Err(ForgeError::LengthMismatch {
                expected: self.n_params(),
                found: params.len(),
            });
        }
        let mut c = Circuit::new(self.n());
        for g in &self.gates {
            let angle = match g.angle {
                HopAngle::Param(i) => params[i],
                HopAngle::Fixed(v) => v,
            };
            c.push(Gate::Hop(g.qubits.0, g.qubits.1, Angle::Fixed(angle)))?;
        }
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut orbitals = None;
        let mut frozen = Vec::new();
        let mut bitstrings = Vec::new();
        let mut gates = Vec::new();
        let mut init: Vec<(usize, usize, f64)> = Vec::new();
        let mut hf_freeze = false;
        let mut hf_energy = None;
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| ForgeError::parse(no, format!("invalid integer {s:?}")))
            };
            let real = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| ForgeError::parse(no, format!("invalid number {s:?}")))
            };
            let param = |s: &str| -> Option<Result<usize>> { s.strip_prefix('t').map(int) };
            match t.as_slice() {
                ["orbitals", n] => orbitals = Some(int(n)?),
                ["frozen", rest @ ..] => {
                    for f in rest {
                        frozen.push(int(f)?);
                    }
                }
                ["bitstrings", rest @ ..] => {
                    for b in rest {
                        bitstrings.push(b.parse().map_err(|e: ForgeError| ForgeError::parse(no, e.to_string()))?);
                    }
                }
                ["hop", a, b, angle] => {
                    let angle = match param(angle) {
                        Some(id) => HopAngle::Param(id?),
                        None => HopAngle::Fixed(real(angle)?),
                    };
                    gates.push((int(a)?, int(b)?, angle));
                }
                ["init", id, value] => {
                    let id = param(id).ok_or_else(|| ForgeError::parse(no, format!("expected t<id>, got {id:?}")))??;
                    init.push((no, id, real(value)?));
                }
                ["hf_freeze", flag] => {
                    hf_freeze = match *flag {
                        "on" | "true" | "1" => true,
                        "off" | "false" | "0" => false,
                        _ => return Err(ForgeError::parse(no, format!("hf_freeze expects on/off, got {flag:?}"))),
                    }
                }
                ["hf_energy", e] => hf_energy = Some(real(e)?),
                _ => return Err(ForgeError::parse(no, format!("unrecognised line {line:?}"))),
            }
        }
        let orbitals = orbitals.ok_or_else(|| ForgeError::parse(1, "missing 'orbitals <count>' line"))?;
        let n_params = gates
            .iter()
            .filter_map(|g| match g.2 {
                HopAngle::Param(i) => Some(i + 1),
                HopAngle::Fixed(_) => None,
            })
            .max()
            .unwrap_or(0);
        let mut initial = vec![0.0; n_params];
        for (no, id, v) in init {
            *initial
                .get_mut(id)
                .ok_or_else(|| ForgeError::parse(no, format!("t{id} is not used by any hop gate")))? = v;
        }
        AnsatzConfig::new(orbitals, frozen, bitstrings, gates, initial, hf_freeze, hf_energy)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ForgeError::Io(format!("{}: {e}", path.display())))?;
        AnsatzConfig::parse(&text)
    }
}

impl fmt::Display for AnsatzConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "orbitals {}", self.orbitals)?;
        if !self.frozen.is_empty() {
            let list: Vec<String> = self.frozen.iter().map(usize::to_string).collect();
            writeln!(f, "frozen {}", list.join(" "))?;
        }
        let bits: Vec<String> = self.full_bitstrings.iter().map(BitString::to_string).collect();
        writeln!(f, "bitstrings {}", bits.join(" "))?;
        for g in &self.gates {
            match g.angle {
                HopAngle::Param(i) => writeln!(f, "hop {} {} t{i}", g.orbitals.0, g.orbitals.1)?,
                HopAngle::Fixed(v) => writeln!(f, "hop {} {} {v:?}", g.orbitals.0, g.orbitals.1)?,
            }
        }
        for (i, v) in self.initial.iter().enumerate() {
            writeln!(f, "init t{i} {v:?}")?;
        }
        writeln!(f, "hf_freeze {}", if self.hf_freeze { "on" } else { "off" })?;
        if let Some(e) = self.hf_energy {
            writeln!(f, "hf_energy {e:?}")?;
        }
        Ok(())
    }
}
