//! Symbolic sums of bosonic ladder-operator products.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::lattice::WaveVector;

/// Label of a bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Mode {
    /// Magnon localized on a lattice site (global site index).
    Site(usize),
    /// Plane-wave magnon of a sample (0 or 1).
    Wave { sample: usize, k: WaveVector },
    /// Condensate mode of a sample in the two-mode description.
    Condensate(usize),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Site(i) => write!(f, "site{i}"),
            Mode::Wave { sample, k } => write!(f, "s{}k{}", sample + 1, k.label()),
            Mode::Condensate(m) => write!(f, "c{}", m + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ladder {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Op {
    pub mode: Mode,
    pub ladder: Ladder,
}

impl Op {
    pub fn create(mode: Mode) -> Self {
        Self {
            mode,
            ladder: Ladder::Create,
        }
    }

    pub fn annihilate(mode: Mode) -> Self {
        Self {
            mode,
            ladder: Ladder::Annihilate,
        }
    }

    pub fn is_create(&self) -> bool {
        self.ladder == Ladder::Create
    }

    pub fn dagger(&self) -> Self {
        Self {
            mode: self.mode,
            ladder: match self.ladder {
                Ladder::Create => Ladder::Annihilate,
                Ladder::Annihilate => Ladder::Create,
            },
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ladder {
            Ladder::Create => write!(f, "b+[{}]", self.mode),
            Ladder::Annihilate => write!(f, "b[{}]", self.mode),
        }
    }
}

/// `coeff * ops[0] ops[1] ...` (leftmost operator acts last).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coeff: Complex64,
    pub ops: Vec<Op>,
}

impl Term {
    pub fn creations(&self) -> usize {
        self.ops.iter().filter(|o| o.is_create()).count()
    }

    pub fn conserves_number(&self) -> bool {
        2 * self.creations() == self.ops.len()
    }

    pub fn adjoint(&self) -> Term {
        Term {
            coeff: self.coeff.conj(),
            ops: self.ops.iter().rev().map(Op::dagger).collect(),
        }
    }

    pub fn is_normal_ordered(&self) -> bool {
        let first_ann = self.ops.iter().position(|o| !o.is_create());
        match first_ann {
            None => true,
            Some(p) => self.ops[p..].iter().all(|o| !o.is_create()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6e}{:+.6e}i)", self.coeff.re, self.coeff.im)?;
        for op in &self.ops {
            write!(f, " {op}")?;
        }
        Ok(())
    }
}

/// Creators sorted, then annihilators sorted. Valid as a key only for
/// normal-ordered products, where same-kind operators commute.
fn canonical(ops: &[Op]) -> Vec<Op> {
    let mut c: Vec<Op> = ops.iter().filter(|o| o.is_create()).copied().collect();
    let mut a: Vec<Op> = ops.iter().filter(|o| !o.is_create()).copied().collect();
    c.sort();
    a.sort();
    c.extend(a);
    c
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BosonTermSum {
    pub terms: Vec<Term>,
}

impl BosonTermSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coeff: Complex64, ops: Vec<Op>) {
        self.terms.push(Term { coeff, ops });
    }

    pub fn push_real(&mut self, coeff: f64, ops: Vec<Op>) {
        self.push(Complex64::new(coeff, 0.0), ops);
    }

    /// Pushes the term and its Hermitian conjugate.
    pub fn push_with_adjoint(&mut self, coeff: Complex64, ops: Vec<Op>) {
        let t = Term { coeff, ops };
        self.terms.push(t.adjoint());
        self.terms.push(t);
    }

    pub fn extend(&mut self, other: BosonTermSum) {
        self.terms.extend(other.terms);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter()
    }

    pub fn adjoint(&self) -> BosonTermSum {
        BosonTermSum {
            terms: self.terms.iter().map(Term::adjoint).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> BosonTermSum {
        BosonTermSum {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * factor,
                    ops: t.ops.clone(),
                })
                .collect(),
        }
    }

    pub fn modes(&self) -> BTreeSet<Mode> {
        self.terms
            .iter()
            .flat_map(|t| t.ops.iter().map(|o| o.mode))
            .collect()
    }

    pub fn is_number_conserving(&self) -> bool {
        self.terms.iter().all(Term::conserves_number)
    }

    /// Splits into (number-conserving, non-conserving) parts.
    pub fn split_conserving(&self) -> (BosonTermSum, BosonTermSum) {
        let (a, b): (Vec<Term>, Vec<Term>) =
            self.terms.iter().cloned().partition(Term::conserves_number);
        (BosonTermSum { terms: a }, BosonTermSum { terms: b })
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }

    /// Normal-ordered canonical form: `[b_a, b+_c] = delta_ac` applied until
    /// every creator stands left of every annihilator, like products merged,
    /// exact zeros removed. Terms come out in a deterministic order.
    pub fn normal_ordered(&self) -> BosonTermSum {
        let mut acc: BTreeMap<Vec<Op>, Complex64> = BTreeMap::new();
        let mut stack: Vec<(Complex64, Vec<Op>)> =
            self.terms.iter().map(|t| (t.coeff, t.ops.clone())).collect();
        while let Some((c, ops)) = stack.pop() {
            let swap = ops
                .windows(2)
                .position(|w| !w[0].is_create() && w[1].is_create());
            match swap {
                None => {
                    *acc.entry(canonical(&ops)).or_insert(Complex64::new(0.0, 0.0)) += c;
                }
                Some(p) => {
                    let mut swapped = ops.clone();
                    swapped.swap(p, p + 1);
                    if ops[p].mode == ops[p + 1].mode {
                        let mut contracted = ops[..p].to_vec();
                        contracted.extend_from_slice(&ops[p + 2..]);
                        stack.push((c, contracted));
                    }
                    stack.push((c, swapped));
                }
            }
        }
        BosonTermSum {
            terms: acc
                .into_iter()
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .map(|(ops, coeff)| Term { coeff, ops })
                .collect(),
        }
    }

    /// Drops terms with `|coeff| <= tol`.
    pub fn pruned(&self, tol: f64) -> BosonTermSum {
        BosonTermSum {
            terms: self
                .terms
                .iter()
                .filter(|t| t.coeff.norm() > tol)
                .cloned()
                .collect(),
        }
    }

    /// Largest coefficient of `H - H^dagger` in normal-ordered form.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut diff = self.clone();
        diff.extend(self.adjoint().scaled(Complex64::new(-1.0, 0.0)));
        diff.normal_ordered().max_coeff()
    }

    /// Linear mode substitution `b_m -> sum_j u_j b_{m_j}` (creators take the
    /// conjugate coefficients). Modes not mapped by `f` are kept unchanged.
    /// The result is normal-ordered and merged.
    pub fn transform<F>(&self, f: F) -> BosonTermSum
    where
        F: Fn(&Mode) -> Option<Vec<(Mode, Complex64)>>,
    {
        let ordered = self.normal_ordered();
        let mut acc: BTreeMap<Vec<Op>, Complex64> = BTreeMap::new();
        for t in &ordered.terms {
            let choices: Vec<Vec<(Op, Complex64)>> = t
                .ops
                .iter()
                .map(|op| match f(&op.mode) {
                    Some(list) => list
                        .into_iter()
                        .map(|(m, u)| {
                            let u = if op.is_create() { u.conj() } else { u };
                            (
                                Op {
                                    mode: m,
                                    ladder: op.ladder,
                                },
                                u,
                            )
                        })
                        .collect(),
                    None => vec![(*op, Complex64::new(1.0, 0.0))],
                })
                .collect();
            let mut idx = vec![0usize; choices.len()];
            'outer: loop {
                let mut c = t.coeff;
                let mut ops = Vec::with_capacity(idx.len());
                for (slot, &i) in idx.iter().enumerate() {
                    let (op, u) = choices[slot][i];
                    c *= u;
                    ops.push(op);
                }
                *acc.entry(canonical(&ops)).or_insert(Complex64::new(0.0, 0.0)) += c;
                for slot in (0..idx.len()).rev() {
                    idx[slot] += 1;
                    if idx[slot] < choices[slot].len() {
                        continue 'outer;
                    }
                    idx[slot] = 0;
                }
                break;
            }
        }
        BosonTermSum {
            terms: acc
                .into_iter()
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .map(|(ops, coeff)| Term { coeff, ops })
                .collect(),
        }
    }
}
