//! Generator signatures and the fixture theories.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, Duality, Node, NodeKind, Phase, SystemType};

/// What a spider colour's phases range over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhaseCarrier {
    /// Only the zero phase.
    Trivial,
    /// Angles modulo 2π.
    Circle,
    /// `Z_{m_1} x ... x Z_{m_k}`.
    Group(Vec<u32>),
}

impl PhaseCarrier {
    pub fn admits(&self, p: &Phase) -> bool {
        match (self, p) {
            (_, Phase::Zero) => true,
            (PhaseCarrier::Circle, Phase::Angle(_)) => true,
            (PhaseCarrier::Group(m), Phase::Element { moduli, .. }) => m == moduli,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorDecl {
    pub name: String,
    pub inputs: Vec<SystemType>,
    pub outputs: Vec<SystemType>,
    pub dagger: Option<String>,
    /// Carries an angle parameter; the dagger negates it.
    pub phased: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColourDecl {
    pub name: String,
    pub system: SystemType,
    pub carrier: PhaseCarrier,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SignatureError {
    #[error("unknown system '{0}'")]
    UnknownSystem(String),
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("unknown colour '{0}'")]
    UnknownColour(String),
    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),
    #[error("generator '{0}' needs a phase")]
    MissingPhase(String),
    #[error("phase {phase} is not admitted by '{name}'")]
    BadPhase { name: String, phase: String },
    #[error("dagger partner of '{0}' is undeclared or has the wrong type")]
    BadPartner(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Set of systems, generators and spider colours.
#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub name: String,
    systems: BTreeMap<String, SystemType>,
    generators: BTreeMap<String, GeneratorDecl>,
    colours: BTreeMap<String, ColourDecl>,
}

impl Signature {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), systems: BTreeMap::new(), generators: BTreeMap::new(), colours: BTreeMap::new() }
    }

    pub fn with_system(mut self, name: &str, duality: Duality) -> Self {
        self.systems.insert(name.into(), SystemType::new(name, duality));
        self
    }

    pub fn with_generator(mut self, name: &str, inputs: &[&str], outputs: &[&str], dagger: Option<&str>) -> Self {
        let decl = GeneratorDecl {
            name: name.into(),
            inputs: inputs.iter().map(|t| self.ty(t).expect("undeclared system")).collect(),
            outputs: outputs.iter().map(|t| self.ty(t).expect("undeclared system")).collect(),
            dagger: dagger.map(Into::into),
            phased: false,
        };
        self.generators.insert(name.into(), decl);
        self
    }

    pub fn with_phased_generator(mut self, name: &str, system: &str) -> Self {
        let t = self.ty(system).expect("undeclared system");
        let decl =
            GeneratorDecl { name: name.into(), inputs: vec![t.clone()], outputs: vec![t], dagger: Some(name.into()), phased: true };
        self.generators.insert(name.into(), decl);
        self
    }

    pub fn with_colour(mut self, name: &str, system: &str, carrier: PhaseCarrier) -> Self {
        let system = self.ty(system).expect("undeclared system");
        self.colours.insert(name.into(), ColourDecl { name: name.into(), system, carrier });
        self
    }

    /// Parses `A` or `A*`.
    pub fn ty(&self, text: &str) -> Result<SystemType, SignatureError> {
        let (base, starred) = match text.strip_suffix('*') {
            Some(b) => (b, true),
            None => (text, false),
        };
        let t = self.systems.get(base).ok_or_else(|| SignatureError::UnknownSystem(base.into()))?;
        if starred {
            t.dual().ok_or_else(|| DiagramError::NoDual(base.into()).into())
        } else {
            Ok(t.clone())
        }
    }

    pub fn system(&self, name: &str) -> Option<&SystemType> {
        self.systems.get(name)
    }

    pub fn systems(&self) -> impl Iterator<Item = &SystemType> {
        self.systems.values()
    }

    pub fn generator(&self, name: &str) -> Option<&GeneratorDecl> {
        self.generators.get(name)
    }

    pub fn generators(&self) -> impl Iterator<Item = &GeneratorDecl> {
        self.generators.values()
    }

    pub fn colour(&self, name: &str) -> Option<&ColourDecl> {
        self.colours.get(name)
    }

    pub fn colours(&self) -> impl Iterator<Item = &ColourDecl> {
        self.colours.values()
    }

    /// Checks dagger partners exist with mirrored types.
    pub fn validate(&self) -> Result<(), SignatureError> {
        for g in self.generators.values() {
            if let Some(p) = &g.dagger {
                let partner = self.generators.get(p).ok_or_else(|| SignatureError::BadPartner(g.name.clone()))?;
                if partner.inputs != g.outputs || partner.outputs != g.inputs || partner.dagger.as_deref() != Some(&g.name) {
                    return Err(SignatureError::BadPartner(g.name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn box_node(&self, name: &str, phase: Option<Phase>) -> Result<Node, SignatureError> {
        let g = self.generators.get(name).ok_or_else(|| SignatureError::UnknownGenerator(name.into()))?;
        let phase = match (g.phased, phase) {
            (true, None) => return Err(SignatureError::MissingPhase(name.into())),
            (true, Some(p)) if !PhaseCarrier::Circle.admits(&p) => {
                return Err(SignatureError::BadPhase { name: name.into(), phase: p.to_string() })
            }
            (true, Some(p)) => Some(p),
            (false, Some(p)) => return Err(SignatureError::BadPhase { name: name.into(), phase: p.to_string() }),
            (false, None) => None,
        };
        Ok(Node {
            kind: NodeKind::Box { name: g.name.clone(), phase, dagger: g.dagger.clone() },
            inputs: g.inputs.clone(),
            outputs: g.outputs.clone(),
        })
    }

    /// Single-generator diagram.
    pub fn gen(&self, name: &str) -> Diagram {
        Diagram::from_node(self.box_node(name, None).unwrap_or_else(|e| panic!("{e}")))
    }

    /// Single phased-generator diagram, angle in radians.
    pub fn phased(&self, name: &str, angle: f64) -> Diagram {
        Diagram::from_node(self.box_node(name, Some(Phase::angle(angle))).unwrap_or_else(|e| panic!("{e}")))
    }

    pub fn spider_node(&self, colour: &str, n_in: usize, n_out: usize, phase: Phase) -> Result<Node, SignatureError> {
        let c = self.colours.get(colour).ok_or_else(|| SignatureError::UnknownColour(colour.into()))?;
        if !c.carrier.admits(&phase) {
            return Err(SignatureError::BadPhase { name: colour.into(), phase: phase.to_string() });
        }
        Ok(Node::spider(colour, &c.system, n_in, n_out, phase))
    }

    pub fn spider(&self, colour: &str, n_in: usize, n_out: usize, phase: Phase) -> Diagram {
        Diagram::from_node(self.spider_node(colour, n_in, n_out, phase).unwrap_or_else(|e| panic!("{e}")))
    }

    pub fn identity(&self, system: &str, n: usize) -> Diagram {
        Diagram::identity(&vec![self.ty(system).unwrap(); n])
    }
}

/// Fixture by name: `symgrp`, `qucirc`, `boolcirc`, `stab`, `spek`, `toy-z4`, `toy-z2xz2`.
pub fn fixture(name: &str) -> Result<Signature, SignatureError> {
    match name {
        "symgrp" => Ok(sym_grp()),
        "qucirc" => Ok(qucirc()),
        "boolcirc" => Ok(boolcirc()),
        "stab" => Ok(stab()),
        "spek" => Ok(spek()),
        "toy-z4" => Ok(toy(PhaseCarrier::Group(vec![4]))),
        "toy-z2xz2" => Ok(toy(PhaseCarrier::Group(vec![2, 2]))),
        "bialg" => Ok(bialg()),
        other => Err(SignatureError::UnknownFixture(other.into())),
    }
}

/// One system, no generators: the free symmetric monoidal category on one object.
pub fn sym_grp() -> Signature {
    Signature::new("symgrp").with_system("u", Duality::SelfDual)
}

/// Qubit circuits: basis (co)states, Z and X rotations, CNOT. Spider colours `white` (Z)
/// and `gray` (X) carry angles.
pub fn qucirc() -> Signature {
    Signature::new("qucirc")
        .with_system("Q", Duality::SelfDual)
        .with_generator("ket0", &[], &["Q"], Some("bra0"))
        .with_generator("ket1", &[], &["Q"], Some("bra1"))
        .with_generator("bra0", &["Q"], &[], Some("ket0"))
        .with_generator("bra1", &["Q"], &[], Some("ket1"))
        .with_phased_generator("Z", "Q")
        .with_phased_generator("X", "Q")
        .with_generator("CX", &["Q", "Q"], &["Q", "Q"], Some("CX"))
        .with_colour("white", "Q", PhaseCarrier::Circle)
        .with_colour("gray", "Q", PhaseCarrier::Circle)
}

/// Boolean circuits over a single bit system without duals or daggers.
/// Bialgebra fragment: white copies, gray merges, no phases.
pub fn bialg() -> Signature {
    Signature::new("bialg")
        .with_system("X", Duality::SelfDual)
        .with_colour("white", "X", PhaseCarrier::Trivial)
        .with_colour("gray", "X", PhaseCarrier::Trivial)
}

pub fn boolcirc() -> Signature {
    Signature::new("boolcirc")
        .with_system("b", Duality::Missing)
        .with_generator("and", &["b", "b"], &["b"], None)
        .with_generator("or", &["b", "b"], &["b"], None)
        .with_generator("not", &["b"], &["b"], None)
        .with_generator("fan", &["b"], &["b", "b"], None)
}

/// Names of the six points of the single-system toy theories.
pub const SIX_POINTS: [&str; 6] = ["z0", "z1", "x0", "x1", "y0", "y1"];

fn with_six_points(mut s: Signature, sys: &str) -> Signature {
    for p in SIX_POINTS {
        let dag = format!("{p}dag");
        s = s.with_generator(p, &[], &[sys], Some(&dag)).with_generator(&dag, &[sys], &[], Some(p));
    }
    s
}

/// Stabilizer qubit: six points and the Clifford generators `zp = Z_{π/2}`, `xp = X_{π/2}`
/// with daggers `zm`, `xm`.
pub fn stab() -> Signature {
    let s = Signature::new("stab")
        .with_system("Q", Duality::SelfDual)
        .with_generator("zp", &["Q"], &["Q"], Some("zm"))
        .with_generator("zm", &["Q"], &["Q"], Some("zp"))
        .with_generator("xp", &["Q"], &["Q"], Some("xm"))
        .with_generator("xm", &["Q"], &["Q"], Some("xp"))
        .with_colour("white", "Q", PhaseCarrier::Group(vec![4]))
        .with_colour("gray", "Q", PhaseCarrier::Group(vec![4]));
    with_six_points(s, "Q")
}

/// All 24 permutations of a 4-element list, lexicographic.
pub fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Generator name of the permutation `i ↦ p[i]` in [`spek`].
pub fn perm_name(p: &[usize; 4]) -> String {
    format!("s{}{}{}{}", p[0], p[1], p[2], p[3])
}

fn inverse4(p: &[usize; 4]) -> [usize; 4] {
    let mut q = [0; 4];
    for i in 0..4 {
        q[p[i]] = i;
    }
    q
}

/// Spekkens-style toy bit: six points and all 24 permutations of the four ontic states.
pub fn spek() -> Signature {
    let mut s = Signature::new("spek")
        .with_system("T", Duality::SelfDual)
        .with_colour("white", "T", PhaseCarrier::Group(vec![2, 2]))
        .with_colour("gray", "T", PhaseCarrier::Group(vec![2, 2]));
    for p in permutations4() {
        let inv = perm_name(&inverse4(&p));
        s = s.with_generator(&perm_name(&p), &["T"], &["T"], Some(&inv));
    }
    with_six_points(s, "T")
}

/// Toy theory parametrised by its phase group: six points and 24 abstract unitaries
/// `u0..u23` with `u_k† = u_{inv(k)}`, indexed like [`permutations4`].
pub fn toy(carrier: PhaseCarrier) -> Signature {
    let label = match &carrier {
        PhaseCarrier::Group(m) => m.iter().map(|x| format!("z{x}")).collect::<Vec<_>>().join("x"),
        PhaseCarrier::Circle => "circle".into(),
        PhaseCarrier::Trivial => "trivial".into(),
    };
    let perms = permutations4();
    let mut s = Signature::new(format!("toy-{label}"))
        .with_system("T", Duality::SelfDual)
        .with_colour("white", "T", carrier.clone())
        .with_colour("gray", "T", carrier);
    for (k, p) in perms.iter().enumerate() {
        let inv = perms.iter().position(|q| *q == inverse4(p)).unwrap();
        s = s.with_generator(&format!("u{k}"), &["T"], &["T"], Some(&format!("u{inv}")));
    }
    with_six_points(s, "T")
}
