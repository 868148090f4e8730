use std::fmt;

use super::{AlgebraError, FiniteMonoid};

/// A finite forest algebra `(H, V)`.
///
/// `H` holds forest types under `+` (identity `0`), `V` context types under
/// composition (identity `□`). `V` acts on the left of `H`; the action is
/// stored as a row-major `|V| × |H|` table, so each row is the transformation
/// of `H` induced by that context type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestAlgebra {
    h: FiniteMonoid,
    v: FiniteMonoid,
    action: Vec<usize>,
    ins_left: Vec<usize>,
    ins_right: Vec<usize>,
}

impl ForestAlgebra {
    /// Assembles an algebra from tables, checking only their shapes.
    /// Use [`validate_axioms`] to check the forest algebra laws.
    pub fn from_parts(
        h: FiniteMonoid,
        v: FiniteMonoid,
        action: Vec<Vec<usize>>,
        ins_left: Vec<usize>,
        ins_right: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        let (nh, nv) = (h.len(), v.len());
        if action.len() != nv || action.iter().any(|row| row.len() != nh) {
            return Err(AlgebraError::InvalidAlgebra(format!(
                "action table must be {nv}x{nh}"
            )));
        }
        if action.iter().flatten().any(|&x| x >= nh) {
            return Err(AlgebraError::InvalidAlgebra(
                "action entry out of range".into(),
            ));
        }
        if ins_left.len() != nh || ins_right.len() != nh {
            return Err(AlgebraError::InvalidAlgebra(
                "insertion maps must cover H".into(),
            ));
        }
        if ins_left.iter().chain(&ins_right).any(|&x| x >= nv) {
            return Err(AlgebraError::InvalidAlgebra(
                "insertion entry out of range".into(),
            ));
        }
        Ok(ForestAlgebra {
            h,
            v,
            action: action.into_iter().flatten().collect(),
            ins_left,
            ins_right,
        })
    }

    pub(crate) fn from_flat(
        h: FiniteMonoid,
        v: FiniteMonoid,
        action: Vec<usize>,
        ins_left: Vec<usize>,
        ins_right: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(action.len(), h.len() * v.len());
        ForestAlgebra {
            h,
            v,
            action,
            ins_left,
            ins_right,
        }
    }

    pub fn h(&self) -> &FiniteMonoid {
        &self.h
    }

    pub fn v(&self) -> &FiniteMonoid {
        &self.v
    }

    pub fn h_len(&self) -> usize {
        self.h.len()
    }

    pub fn v_len(&self) -> usize {
        self.v.len()
    }

    pub fn zero(&self) -> usize {
        self.h.identity()
    }

    pub fn hole(&self) -> usize {
        self.v.identity()
    }

    #[inline]
    pub fn plus(&self, g: usize, h: usize) -> usize {
        self.h.mul(g, h)
    }

    /// `v·w`: first `w`, then `v`.
    #[inline]
    pub fn compose(&self, v: usize, w: usize) -> usize {
        self.v.mul(v, w)
    }

    #[inline]
    pub fn act(&self, v: usize, h: usize) -> usize {
        self.action[v * self.h.len() + h]
    }

    /// `g+□`.
    pub fn ins_left(&self, g: usize) -> usize {
        self.ins_left[g]
    }

    /// `□+g`.
    pub fn ins_right(&self, g: usize) -> usize {
        self.ins_right[g]
    }

    /// The row of the action table for `v`.
    pub fn transformation(&self, v: usize) -> &[usize] {
        let n = self.h.len();
        &self.action[v * n..(v + 1) * n]
    }

    pub fn h_name(&self, h: usize) -> &str {
        self.h.name(h)
    }

    pub fn v_name(&self, v: usize) -> &str {
        self.v.name(v)
    }
}

/// One violated forest-algebra law, with the first witness found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    HAssociativity(usize, usize, usize),
    HIdentity(usize),
    VAssociativity(usize, usize, usize),
    VIdentity(usize),
    /// `w(vh) ≠ (wv)h`.
    ActionLaw {
        v: usize,
        w: usize,
        h: usize,
    },
    /// `□h ≠ h`.
    Monoidal {
        h: usize,
    },
    /// `v ≠ w` but `vh = wh` for every `h`.
    Faithfulness {
        v: usize,
        w: usize,
    },
    /// `(g+□)h ≠ g+h`.
    InsertLeft {
        g: usize,
        h: usize,
    },
    /// `(□+g)h ≠ h+g`.
    InsertRight {
        g: usize,
        h: usize,
    },
}

impl AxiomViolation {
    pub fn axiom(&self) -> &'static str {
        match self {
            AxiomViolation::HAssociativity(..) => "H associativity",
            AxiomViolation::HIdentity(_) => "H identity",
            AxiomViolation::VAssociativity(..) => "V associativity",
            AxiomViolation::VIdentity(_) => "V identity",
            AxiomViolation::ActionLaw { .. } => "action law",
            AxiomViolation::Monoidal { .. } => "monoidal action",
            AxiomViolation::Faithfulness { .. } => "faithfulness",
            AxiomViolation::InsertLeft { .. } => "left insertion",
            AxiomViolation::InsertRight { .. } => "right insertion",
        }
    }
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.axiom(), self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every forest algebra law exhaustively and reports the first
/// witness of each violated one.
pub fn validate_axioms(alg: &ForestAlgebra) -> AxiomReport {
    let mut violations = Vec::new();
    let (h, v) = (alg.h(), alg.v());
    if let Some((a, b, c)) = h.find_associativity_violation() {
        violations.push(AxiomViolation::HAssociativity(a, b, c));
    }
    if let Some(x) = h.find_identity_violation() {
        violations.push(AxiomViolation::HIdentity(x));
    }
    if let Some((a, b, c)) = v.find_associativity_violation() {
        violations.push(AxiomViolation::VAssociativity(a, b, c));
    }
    if let Some(x) = v.find_identity_violation() {
        violations.push(AxiomViolation::VIdentity(x));
    }

    'action: for x in v.elements() {
        for w in v.elements() {
            for g in h.elements() {
                if alg.act(w, alg.act(x, g)) != alg.act(alg.compose(w, x), g) {
                    violations.push(AxiomViolation::ActionLaw { v: x, w, h: g });
                    break 'action;
                }
            }
        }
    }
    if let Some(g) = h.elements().find(|&g| alg.act(alg.hole(), g) != g) {
        violations.push(AxiomViolation::Monoidal { h: g });
    }
    'faithful: for x in v.elements() {
        for y in x + 1..v.len() {
            if alg.transformation(x) == alg.transformation(y) {
                violations.push(AxiomViolation::Faithfulness { v: x, w: y });
                break 'faithful;
            }
        }
    }
    'left: for g in h.elements() {
        for x in h.elements() {
            if alg.act(alg.ins_left(g), x) != alg.plus(g, x) {
                violations.push(AxiomViolation::InsertLeft { g, h: x });
                break 'left;
            }
        }
    }
    'right: for g in h.elements() {
        for x in h.elements() {
            if alg.act(alg.ins_right(g), x) != alg.plus(x, g) {
                violations.push(AxiomViolation::InsertRight { g, h: x });
                break 'right;
            }
        }
    }
    AxiomReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// H = {n, y} with `or`, V = {□, c_y}.
    fn f1_by_hand() -> ForestAlgebra {
        let h = FiniteMonoid::new(names(&["n", "y"]), vec![vec![0, 1], vec![1, 1]], 0).unwrap();
        let v = FiniteMonoid::new(names(&["id", "cy"]), vec![vec![0, 1], vec![1, 1]], 0).unwrap();
        ForestAlgebra::from_parts(h, v, vec![vec![0, 1], vec![1, 1]], vec![0, 1], vec![0, 1])
            .unwrap()
    }

    #[test]
    fn hand_built_f1_passes() {
        assert!(validate_axioms(&f1_by_hand()).is_ok());
    }

    #[test]
    fn unfaithful_algebra_is_reported() {
        let h = FiniteMonoid::new(names(&["n", "y"]), vec![vec![0, 1], vec![1, 1]], 0).unwrap();
        // V = {□, v} with v acting as the identity: a two-element monoid where v·v = v.
        let v = FiniteMonoid::new(names(&["id", "v"]), vec![vec![0, 1], vec![1, 1]], 0).unwrap();
        let alg =
            ForestAlgebra::from_parts(h, v, vec![vec![0, 1], vec![0, 1]], vec![0, 0], vec![0, 0])
                .unwrap();
        let report = validate_axioms(&alg);
        assert!(report
            .violations
            .contains(&AxiomViolation::Faithfulness { v: 0, w: 1 }));
    }

    #[test]
    fn non_associative_plus_is_reported() {
        let table = vec![0, 1, 2, 1, 2, 2, 2, 1, 1];
        let h = FiniteMonoid::from_table_unchecked(names(&["0", "x", "y"]), table, 0);
        let v = FiniteMonoid::trivial();
        let alg =
            ForestAlgebra::from_parts(h, v, vec![vec![0, 1, 2]], vec![0, 0, 0], vec![0, 0, 0])
                .unwrap();
        let report = validate_axioms(&alg);
        let (a, b, c) = match report.violations[0] {
            AxiomViolation::HAssociativity(a, b, c) => (a, b, c),
            ref other => panic!("unexpected {other:?}"),
        };
        let h = alg.h();
        assert_ne!(h.mul(h.mul(a, b), c), h.mul(a, h.mul(b, c)));
    }

    #[test]
    fn shape_errors() {
        let h = FiniteMonoid::trivial();
        let v = FiniteMonoid::trivial();
        assert!(ForestAlgebra::from_parts(
            h.clone(),
            v.clone(),
            vec![vec![0, 0]],
            vec![0],
            vec![0]
        )
        .is_err());
        assert!(ForestAlgebra::from_parts(h, v, vec![vec![0]], vec![1], vec![0]).is_err());
    }
}
