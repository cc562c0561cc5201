use std::f64::consts::TAU;
use std::fmt;

/// Tolerance used when comparing angle phases modulo 2π.
pub const ANGLE_TOL: f64 = 1e-12;

/// Phase decoration of a spider or phased generator.
///
/// `Zero` is the unit of every phase group, so phase-free spiders compare equal
/// regardless of which carrier their colour uses.
#[derive(Clone, Debug)]
pub enum Phase {
    Zero,
    /// Angle in `[0, 2π)`.
    Angle(f64),
    /// Element of `Z_{m_1} x ... x Z_{m_k}`.
    Element { moduli: Vec<u32>, values: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("incompatible phase carriers: {0} and {1}")]
pub struct PhaseMismatch(pub String, pub String);

impl Phase {
    pub fn angle(x: f64) -> Phase {
        let w = x.rem_euclid(TAU);
        if w < ANGLE_TOL || TAU - w < ANGLE_TOL {
            Phase::Zero
        } else {
            Phase::Angle(w)
        }
    }

    pub fn degrees(d: f64) -> Phase {
        Phase::angle(d.to_radians())
    }

    pub fn element(moduli: &[u32], values: &[u32]) -> Phase {
        assert_eq!(moduli.len(), values.len());
        let values: Vec<u32> = values.iter().zip(moduli).map(|(v, m)| v % m).collect();
        if values.iter().all(|&v| v == 0) {
            Phase::Zero
        } else {
            Phase::Element { moduli: moduli.to_vec(), values }
        }
    }

    pub fn cyclic(order: u32, value: u32) -> Phase {
        Phase::element(&[order], &[value])
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Phase::Zero)
    }

    /// Angle in radians; `Zero` reads as 0.
    pub fn as_angle(&self) -> Option<f64> {
        match self {
            Phase::Zero => Some(0.0),
            Phase::Angle(a) => Some(*a),
            Phase::Element { .. } => None,
        }
    }

    pub fn add(&self, other: &Phase) -> Result<Phase, PhaseMismatch> {
        match (self, other) {
            (Phase::Zero, p) | (p, Phase::Zero) => Ok(p.clone()),
            (Phase::Angle(a), Phase::Angle(b)) => Ok(Phase::angle(a + b)),
            (Phase::Element { moduli: m1, values: v1 }, Phase::Element { moduli: m2, values: v2 })
                if m1 == m2 =>
            {
                let values: Vec<u32> = v1.iter().zip(v2).zip(m1).map(|((a, b), m)| (a + b) % m).collect();
                Ok(Phase::element(m1, &values))
            }
            _ => Err(PhaseMismatch(self.to_string(), other.to_string())),
        }
    }

    pub fn neg(&self) -> Phase {
        match self {
            Phase::Zero => Phase::Zero,
            Phase::Angle(a) => Phase::angle(-a),
            Phase::Element { moduli, values } => {
                let values: Vec<u32> = values.iter().zip(moduli).map(|(v, m)| (m - v) % m).collect();
                Phase::element(moduli, &values)
            }
        }
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Phase) -> bool {
        match (self, other) {
            (Phase::Zero, Phase::Zero) => true,
            (Phase::Angle(a), Phase::Angle(b)) => {
                let d = (a - b).rem_euclid(TAU);
                d < ANGLE_TOL || TAU - d < ANGLE_TOL
            }
            (Phase::Element { moduli: m1, values: v1 }, Phase::Element { moduli: m2, values: v2 }) => {
                m1 == m2 && v1 == v2
            }
            _ => false,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Zero => write!(f, "0"),
            Phase::Angle(a) => write!(f, "angle:{a:?}"),
            Phase::Element { moduli, values } => {
                let m: Vec<String> = moduli.iter().map(u32::to_string).collect();
                let v: Vec<String> = values.iter().map(u32::to_string).collect();
                write!(f, "group:{}:{}", m.join(","), v.join(","))
            }
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Phase, String> {
        if s == "0" {
            return Ok(Phase::Zero);
        }
        if let Some(a) = s.strip_prefix("angle:") {
            let x: f64 = a.parse().map_err(|_| format!("bad angle '{a}'"))?;
            if !x.is_finite() {
                return Err(format!("non-finite angle '{a}'"));
            }
            return Ok(Phase::angle(x));
        }
        if let Some(rest) = s.strip_prefix("group:") {
            let (m, v) = rest.split_once(':').ok_or_else(|| format!("bad group phase '{s}'"))?;
            let parse = |t: &str| -> Result<Vec<u32>, String> {
                t.split(',').map(|x| x.parse::<u32>().map_err(|_| format!("bad integer '{x}'"))).collect()
            };
            let (m, v) = (parse(m)?, parse(v)?);
            if m.len() != v.len() || m.contains(&0) {
                return Err(format!("bad group phase '{s}'"));
            }
            return Ok(Phase::element(&m, &v));
        }
        Err(format!("unknown phase '{s}'"))
    }
}
