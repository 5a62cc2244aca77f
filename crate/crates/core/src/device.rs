//! Transmon lattice description: qubit roles, physical parameters and the
//! target–auxiliary coupling graph.
//!
//! Absolute transition frequencies are never stored. Every transmon carries
//! its detuning `Δ = ω_aux − ω` from the auxiliary reference frequency, so
//! auxiliaries have `Δ = 0` and all simulation happens in the frame rotating
//! at the bare transition frequencies.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Whether a transmon stores information or mediates gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Target,
    Auxiliary,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Target => "target",
            Role::Auxiliary => "auxiliary",
        }
    }
}

/// Physical parameters of one transmon (angular units).
#[derive(Debug, Clone, PartialEq)]
pub struct TransmonSpec {
    pub label: String,
    pub role: Role,
    /// α in rad/s, positive.
    pub anharmonicity: f64,
    /// Δ = ω_aux − ω in rad/s; zero for auxiliaries.
    pub detuning: f64,
    /// Truncation level count, at least 2.
    pub levels: usize,
}

impl TransmonSpec {
    pub const DEFAULT_LEVELS: usize = 3;

    pub fn target(label: &str, anharmonicity: f64, detuning: f64) -> Self {
        Self {
            label: label.into(),
            role: Role::Target,
            anharmonicity,
            detuning,
            levels: Self::DEFAULT_LEVELS,
        }
    }

    pub fn auxiliary(label: &str, anharmonicity: f64) -> Self {
        Self {
            label: label.into(),
            role: Role::Auxiliary,
            anharmonicity,
            detuning: 0.0,
            levels: Self::DEFAULT_LEVELS,
        }
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }
}

/// Capacitive exchange coupling `g (x†y + x y†)` between two transmons.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub a: String,
    pub b: String,
    /// g in rad/s, positive.
    pub g: f64,
}

impl Coupling {
    pub fn new(a: &str, b: &str, g: f64) -> Self {
        Self { a: a.into(), b: b.into(), g }
    }

    pub fn joins(&self, x: &str, y: &str) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeviceError {
    DuplicateLabel(String),
    UnknownLabel(String),
    NonPositiveAnharmonicity(String),
    TooFewLevels { label: String, levels: usize },
    /// An auxiliary transmon with a nonzero detuning.
    AuxiliaryDetuning(String),
    /// A target coupled to an auxiliary without a positive detuning.
    TargetDetuning(String),
    NonPositiveCoupling { a: String, b: String },
    /// Edge joining two transmons with the same role.
    NotBipartite { a: String, b: String },
    DuplicateCoupling { a: String, b: String },
    SelfCoupling(String),
    EmptySelection,
    Disconnected,
}

impl fmt::Display for DeviceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateLabel(l) => write!(f, "duplicate qubit label `{l}`"),
            Self::UnknownLabel(l) => write!(f, "unknown qubit label `{l}`"),
            Self::NonPositiveAnharmonicity(l) => write!(f, "qubit `{l}`: anharmonicity must be positive"),
            Self::TooFewLevels { label, levels } => {
                write!(f, "qubit `{label}`: levels = {levels}, need at least 2")
            }
            Self::AuxiliaryDetuning(l) => {
                write!(f, "qubit `{l}`: auxiliary qubits define the reference and must have detuning 0")
            }
            Self::TargetDetuning(l) => {
                write!(f, "qubit `{l}`: target coupled to an auxiliary needs a positive detuning")
            }
            Self::NonPositiveCoupling { a, b } => write!(f, "coupling {a}-{b}: g must be positive"),
            Self::NotBipartite { a, b } => {
                write!(f, "coupling {a}-{b} joins two qubits of the same role")
            }
            Self::DuplicateCoupling { a, b } => write!(f, "coupling {a}-{b} listed twice"),
            Self::SelfCoupling(l) => write!(f, "qubit `{l}` coupled to itself"),
            Self::EmptySelection => f.write_str("empty qubit selection"),
            Self::Disconnected => f.write_str("selected qubits do not form a connected sub-lattice"),
        }
    }
}

impl core::error::Error for DeviceError {}

/// Validated lattice of transmons. Qubit order defines the register order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    qubits: Vec<TransmonSpec>,
    couplings: Vec<Coupling>,
}

impl LatticeModel {
    pub fn new(qubits: Vec<TransmonSpec>, couplings: Vec<Coupling>) -> Result<Self, DeviceError> {
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].iter().any(|p| p.label == q.label) {
                return Err(DeviceError::DuplicateLabel(q.label.clone()));
            }
            if !(q.anharmonicity > 0.0) {
                return Err(DeviceError::NonPositiveAnharmonicity(q.label.clone()));
            }
            if q.levels < 2 {
                return Err(DeviceError::TooFewLevels { label: q.label.clone(), levels: q.levels });
            }
            if q.role == Role::Auxiliary && q.detuning != 0.0 {
                return Err(DeviceError::AuxiliaryDetuning(q.label.clone()));
            }
        }
        let role_of = |label: &str| {
            qubits
                .iter()
                .find(|q| q.label == label)
                .map(|q| q.role)
                .ok_or_else(|| DeviceError::UnknownLabel(label.into()))
        };
        for (i, c) in couplings.iter().enumerate() {
            let (ra, rb) = (role_of(&c.a)?, role_of(&c.b)?);
            if c.a == c.b {
                return Err(DeviceError::SelfCoupling(c.a.clone()));
            }
            if !(c.g > 0.0) {
                return Err(DeviceError::NonPositiveCoupling { a: c.a.clone(), b: c.b.clone() });
            }
            if ra == rb {
                return Err(DeviceError::NotBipartite { a: c.a.clone(), b: c.b.clone() });
            }
            if couplings[..i].iter().any(|p| p.joins(&c.a, &c.b)) {
                return Err(DeviceError::DuplicateCoupling { a: c.a.clone(), b: c.b.clone() });
            }
        }
        for q in qubits.iter().filter(|q| q.role == Role::Target) {
            let coupled = couplings.iter().any(|c| c.a == q.label || c.b == q.label);
            if coupled && !(q.detuning > 0.0) {
                return Err(DeviceError::TargetDetuning(q.label.clone()));
            }
        }
        Ok(Self { qubits, couplings })
    }

    pub fn qubits(&self) -> &[TransmonSpec] {
        &self.qubits
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn index_of(&self, label: &str) -> Result<usize, DeviceError> {
        self.qubits
            .iter()
            .position(|q| q.label == label)
            .ok_or_else(|| DeviceError::UnknownLabel(label.into()))
    }

    pub fn qubit(&self, label: &str) -> Result<&TransmonSpec, DeviceError> {
        Ok(&self.qubits[self.index_of(label)?])
    }

    pub fn coupling(&self, a: &str, b: &str) -> Option<&Coupling> {
        self.couplings.iter().find(|c| c.joins(a, b))
    }

    /// Per-site truncation levels in register order.
    pub fn dims(&self) -> Vec<usize> {
        self.qubits.iter().map(|q| q.levels).collect()
    }

    /// Product of the per-qubit level counts.
    pub fn hilbert_dim(&self) -> usize {
        self.qubits.iter().map(|q| q.levels).product()
    }

    /// Induced sub-lattice on `labels`, in the order given.
    pub fn subsystem(&self, labels: &[&str]) -> Result<Self, DeviceError> {
        if labels.is_empty() {
            return Err(DeviceError::EmptySelection);
        }
        let mut qubits = Vec::with_capacity(labels.len());
        for l in labels {
            qubits.push(self.qubit(l)?.clone());
        }
        let couplings: Vec<Coupling> = self
            .couplings
            .iter()
            .filter(|c| labels.contains(&c.a.as_str()) && labels.contains(&c.b.as_str()))
            .cloned()
            .collect();

        let mut seen = vec![false; labels.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for c in &couplings {
                let other = if c.a == labels[i] {
                    &c.b
                } else if c.b == labels[i] {
                    &c.a
                } else {
                    continue;
                };
                let j = labels.iter().position(|l| *l == other.as_str()).expect("induced edge");
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DeviceError::Disconnected);
        }
        Self::new(qubits, couplings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mhz;

    fn lattice() -> LatticeModel {
        LatticeModel::new(
            vec![
                TransmonSpec::target("A", mhz(375.0), mhz(245.0)),
                TransmonSpec::auxiliary("B", mhz(350.0)),
                TransmonSpec::target("C", mhz(310.0), mhz(230.0)),
                TransmonSpec::target("D", mhz(340.0), mhz(240.0)),
                TransmonSpec::target("E", mhz(325.0), mhz(235.0)),
            ],
            vec![
                Coupling::new("A", "B", mhz(11.41)),
                Coupling::new("B", "C", mhz(11.41)),
                Coupling::new("B", "D", mhz(11.41)),
                Coupling::new("B", "E", mhz(11.41)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn reference_pair_is_valid() {
        let m = LatticeModel::new(
            vec![
                TransmonSpec::target("A", mhz(375.0), mhz(245.0)),
                TransmonSpec::auxiliary("B", mhz(350.0)),
            ],
            vec![Coupling::new("A", "B", mhz(11.41))],
        )
        .unwrap();
        assert_eq!(m.hilbert_dim(), 9);
    }

    #[test]
    fn rejects_target_target_edge() {
        let err = LatticeModel::new(
            vec![
                TransmonSpec::target("A", mhz(375.0), mhz(245.0)),
                TransmonSpec::target("C", mhz(310.0), mhz(230.0)),
            ],
            vec![Coupling::new("A", "C", mhz(5.0))],
        )
        .unwrap_err();
        assert_eq!(err, DeviceError::NotBipartite { a: "A".into(), b: "C".into() });
    }

    #[test]
    fn rejects_duplicates_and_bad_parameters() {
        let dup = LatticeModel::new(
            vec![TransmonSpec::auxiliary("B", 1.0), TransmonSpec::auxiliary("B", 1.0)],
            vec![],
        );
        assert_eq!(dup.unwrap_err(), DeviceError::DuplicateLabel("B".into()));
        let neg = LatticeModel::new(vec![TransmonSpec::auxiliary("B", -1.0)], vec![]);
        assert!(matches!(neg, Err(DeviceError::NonPositiveAnharmonicity(_))));
        let lv = LatticeModel::new(vec![TransmonSpec::auxiliary("B", 1.0).with_levels(1)], vec![]);
        assert!(matches!(lv, Err(DeviceError::TooFewLevels { .. })));
        let det = LatticeModel::new(
            vec![TransmonSpec::target("A", 1.0, 0.0), TransmonSpec::auxiliary("B", 1.0)],
            vec![Coupling::new("A", "B", 1.0)],
        );
        assert_eq!(det.unwrap_err(), DeviceError::TargetDetuning("A".into()));
        let unknown = LatticeModel::new(vec![TransmonSpec::auxiliary("B", 1.0)], vec![Coupling::new("A", "B", 1.0)]);
        assert_eq!(unknown.unwrap_err(), DeviceError::UnknownLabel("A".into()));
    }

    #[test]
    fn subsystems() {
        let full = lattice();
        let ab = full.subsystem(&["A", "B"]).unwrap();
        assert_eq!(ab.qubits().len(), 2);
        assert_eq!(ab.couplings().len(), 1);
        assert!(ab.coupling("A", "B").is_some());
        let abe = full.subsystem(&["A", "B", "E"]).unwrap();
        assert_eq!(abe.hilbert_dim(), 27);
        assert_eq!(abe.couplings().len(), 2);
        assert_eq!(full.subsystem(&["A", "C"]).unwrap_err(), DeviceError::Disconnected);
        assert_eq!(full.subsystem(&["A", "Z"]).unwrap_err(), DeviceError::UnknownLabel("Z".into()));
        assert_eq!(full.subsystem(&["A", "B", "C"]).unwrap().hilbert_dim(), 27);
    }

    #[test]
    fn single_two_level_dimension() {
        let m = LatticeModel::new(vec![TransmonSpec::auxiliary("B", 1.0).with_levels(2)], vec![]).unwrap();
        assert_eq!(m.hilbert_dim(), 2);
    }
}
