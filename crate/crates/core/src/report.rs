//! Structured results of predicate and audit runs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    FailsWithWitness,
    InconclusiveAtBound,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::FailsWithWitness => "fails-with-witness",
            Verdict::InconclusiveAtBound => "inconclusive-at-bound",
        })
    }
}

/// Outcome of a check. A failing verdict always carries a witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub witness: Option<Value>,
    pub bounds: BTreeMap<String, Value>,
    pub refs: Vec<String>,
    pub details: BTreeMap<String, Value>,
}

impl CheckReport {
    pub fn new(check: &str, verdict: Verdict) -> Self {
        CheckReport {
            check: check.to_string(),
            verdict,
            witness: None,
            bounds: BTreeMap::new(),
            refs: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn holds(check: &str) -> Self {
        Self::new(check, Verdict::Holds)
    }

    pub fn fails(check: &str, witness: impl Into<Value>) -> Self {
        let mut r = Self::new(check, Verdict::FailsWithWitness);
        r.witness = Some(witness.into());
        r
    }

    pub fn inconclusive(check: &str) -> Self {
        Self::new(check, Verdict::InconclusiveAtBound)
    }

    pub fn with_ref(mut self, r: &str) -> Self {
        if !self.refs.iter().any(|x| x == r) {
            self.refs.push(r.to_string());
        }
        self
    }

    pub fn with_bound(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.bounds.insert(key.to_string(), v.into());
        self
    }

    pub fn with_detail(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), v.into());
        self
    }

    pub fn set_detail(&mut self, key: &str, v: impl Into<Value>) {
        self.details.insert(key.to_string(), v.into());
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Names of the results each check leans on, carried in every report.
pub mod refs {
    pub const POWER_CONGRUENCE: &str = "p-th power congruence: a = b mod t implies a^(p^n) = b^(p^n) mod t^(n+1)";
    pub const MONOID_LEMMA: &str = "monoid lemma: lim_{x->x^p} A is isomorphic to the tilt as monoids";
    pub const TILT_ADDITION: &str = "tilt addition: (a_n)+(b_n) = (lim_m (a_{n+m}+b_{n+m})^(p^m))";
    pub const TILT_PRODUCT: &str = "tilt product: (a_n)(b_n) = (a_n b_n)";
    pub const TILT_PERFECT: &str = "the tilt is a perfect F_p-algebra, hence reduced";
    pub const TILT_DOMAIN: &str = "the tilt of a complete domain is a domain";
    pub const SHARP_MAP: &str = "sharp map: projection of lim_{x->x^p} A to the 0-th component";
    pub const SHARP_INJECTIVE: &str = "sharp is injective iff compatible root systems agreeing at 0 agree everywhere";
    pub const UNIQUE_ROOT: &str = "t^p - a has exactly one root in the sharp image (perfect residue ring)";
    pub const TEICHMULLER: &str = "sharp is the Teichmuller map when A/pA is perfect";
    pub const ALMOST_INTEGRAL: &str = "almost integral in A[1/t]: t^c x^n in A for all n";
    pub const INTEGRAL: &str = "integral: root of a monic polynomial over A";
    pub const P_ROOT_CLOSED: &str = "p-root closed: b^p in A implies b in A";
    pub const SEMIPERFECT: &str = "semiperfect: Frobenius is surjective";
    pub const IDEAL_TRANSFER: &str = "A integrally closed in B iff A/I integrally closed in B/IB when IB = I";
    pub const CIC_CLOSED: &str = "the complete integral closure of A in A[1/t] is completely integrally closed";
    pub const TILT_CIC: &str = "A completely integrally closed in A[1/w] implies the tilt is, in A^flat[1/w^flat]";
    pub const TILT_IC: &str = "integral closedness transfers to the tilt when p in w^p A and A/pA is semiperfect";
    pub const KRULL_RANK_ONE: &str = "a rank-one valuation ring is completely integrally closed";
    pub const KRULL_LOCALIZATION: &str = "complete integral closure of a valuation ring is its localization at a height-one prime";
    pub const COMPLETION: &str = "the t-adic completion of a rank-one valuation ring is a rank-one valuation ring";
}
