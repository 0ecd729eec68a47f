//! A small existential reachability fragment of branching-time logic:
//! literals (propositions and their negations), conjunction, disjunction
//! and the `EF` modality. That fragment is exactly what the OR and SAND
//! property checkers need, and every connective evaluates to a state set
//! with one pass of set operations, `EF` being a backward reachability
//! fixpoint.

use std::fmt;

use crate::system::{StateSet, TransitionSystem, UnknownProposition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EfFormula {
    /// A proposition or its negation. Negation is only available here, at
    /// the literal level; the fragment is closed under the remaining
    /// connectives without it.
    Literal { prop: String, negated: bool },
    And(Box<EfFormula>, Box<EfFormula>),
    Or(Box<EfFormula>, Box<EfFormula>),
    Ef(Box<EfFormula>),
}

impl EfFormula {
    pub fn lit(prop: impl Into<String>) -> Self {
        EfFormula::Literal {
            prop: prop.into(),
            negated: false,
        }
    }

    pub fn nlit(prop: impl Into<String>) -> Self {
        EfFormula::Literal {
            prop: prop.into(),
            negated: true,
        }
    }

    pub fn and(a: EfFormula, b: EfFormula) -> Self {
        EfFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: EfFormula, b: EfFormula) -> Self {
        EfFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn ef(a: EfFormula) -> Self {
        EfFormula::Ef(Box::new(a))
    }

    /// Conjunction of a non-empty list, folded left.
    pub fn conj<I: IntoIterator<Item = EfFormula>>(parts: I) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("conjunction of nothing");
        it.fold(first, EfFormula::and)
    }

    /// Disjunction of a non-empty list, folded left.
    pub fn disj<I: IntoIterator<Item = EfFormula>>(parts: I) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("disjunction of nothing");
        it.fold(first, EfFormula::or)
    }

    /// The set of states satisfying the formula. `EF f` holds in every
    /// state from which some path reaches an `f` state, the state itself
    /// included (paths of size 0 count).
    pub fn eval(&self, system: &TransitionSystem) -> Result<StateSet, UnknownProposition> {
        Ok(match self {
            EfFormula::Literal { prop, negated } => {
                let base = system.label_set(prop)?;
                if *negated {
                    base.complement()
                } else {
                    base.clone()
                }
            }
            EfFormula::And(a, b) => a.eval(system)?.intersection(&b.eval(system)?),
            EfFormula::Or(a, b) => a.eval(system)?.union(&b.eval(system)?),
            EfFormula::Ef(inner) => system.coreach(&inner.eval(system)?),
        })
    }
}

impl fmt::Display for EfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EfFormula::Literal { prop, negated } => {
                if *negated {
                    write!(f, "!{prop}")
                } else {
                    write!(f, "{prop}")
                }
            }
            EfFormula::And(a, b) => write!(f, "({a} & {b})"),
            EfFormula::Or(a, b) => write!(f, "({a} | {b})"),
            EfFormula::Ef(inner) => write!(f, "EF({inner})"),
        }
    }
}
