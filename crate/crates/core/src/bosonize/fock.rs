//! Truncated Fock spaces and matrix realization of boson term sums.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::ops::{BosonTermSum, Mode, Term};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone)]
pub struct FockSpace {
    modes: Vec<Mode>,
    caps: Vec<u32>,
    shell: Option<u32>,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    mode_index: HashMap<Mode, usize>,
}

fn enumerate(caps: &[u32], shell: Option<u32>, slot: usize, used: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slot == caps.len() {
        if shell.is_none_or(|s| s == used) {
            out.push(cur.clone());
        }
        return;
    }
    let top = match shell {
        Some(s) => caps[slot].min(s - used),
        None => caps[slot],
    };
    for n in 0..=top {
        cur.push(n);
        enumerate(caps, shell, slot + 1, used + n, cur, out);
        cur.pop();
    }
}

/// Occupation-number basis over `modes` with per-mode caps, optionally
/// restricted to total occupation `shell`. States are listed in
/// lexicographic order of their occupation vectors.
pub fn make_fock_space(modes: Vec<Mode>, caps: Vec<u32>, shell: Option<u32>) -> Result<FockSpace> {
    if modes.len() != caps.len() {
        return Err(Error::Config(format!(
            "{} modes but {} caps",
            modes.len(),
            caps.len()
        )));
    }
    let mut mode_index = HashMap::new();
    for (i, m) in modes.iter().enumerate() {
        if mode_index.insert(*m, i).is_some() {
            return Err(Error::Config(format!("duplicate mode {m}")));
        }
    }
    let mut basis = Vec::new();
    if shell.is_none_or(|s| s <= caps.iter().sum()) {
        enumerate(&caps, shell, 0, 0, &mut Vec::with_capacity(caps.len()), &mut basis);
    }
    if basis.is_empty() {
        return Err(Error::EmptyFockSpace);
    }
    let index = basis.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    Ok(FockSpace {
        modes,
        caps,
        shell,
        basis,
        index,
        mode_index,
    })
}

impl FockSpace {
    /// Default caps: the shell size when a shell is set, otherwise 8.
    pub fn with_default_caps(modes: Vec<Mode>, shell: Option<u32>) -> Result<Self> {
        let cap = shell.unwrap_or(8);
        let caps = vec![cap; modes.len()];
        make_fock_space(modes, caps, shell)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn shell(&self) -> Option<u32> {
        self.shell
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn mode_position(&self, m: &Mode) -> Option<usize> {
        self.mode_index.get(m).copied()
    }

    /// Diagonal of the total number operator.
    pub fn total_number(&self) -> Vec<f64> {
        self.basis
            .iter()
            .map(|s| s.iter().map(|&n| n as f64).sum())
            .collect()
    }

    /// One line per basis state: index followed by the occupations.
    pub fn listing(&self) -> String {
        let mut out = String::from("index");
        for m in &self.modes {
            out.push(',');
            out.push_str(&m.to_string());
        }
        out.push('\n');
        for (i, s) in self.basis.iter().enumerate() {
            out.push_str(&i.to_string());
            for n in s {
                out.push(',');
                out.push_str(&n.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Applies a product of ladder operators (rightmost first). `None` when
    /// the result vanishes or leaves the truncated space.
    fn apply(&self, term: &Term, state: &[u32]) -> Option<(Complex64, usize)> {
        let mut occ = state.to_vec();
        let mut amp = 1.0f64;
        for op in term.ops.iter().rev() {
            let p = self.mode_position(&op.mode)?;
            if op.is_create() {
                let n = occ[p] + 1;
                if n > self.caps[p] {
                    return None;
                }
                amp *= (n as f64).sqrt();
                occ[p] = n;
            } else {
                if occ[p] == 0 {
                    return None;
                }
                amp *= (occ[p] as f64).sqrt();
                occ[p] -= 1;
            }
        }
        let row = self.index_of(&occ)?;
        Some((term.coeff * amp, row))
    }
}

/// Matrix of a number-conserving operator on a truncated Fock space.
///
/// Terms touching modes absent from the space act on an empty mode and
/// drop out, which realizes the projection onto the retained modes.
pub fn build_fock_matrix(h: &BosonTermSum, space: &FockSpace) -> Result<SparseMatrix> {
    if let Some(t) = h.terms.iter().find(|t| !t.conserves_number()) {
        return Err(Error::NonConservingTerm(t.to_string()));
    }
    let triplets: Vec<(usize, usize, Complex64)> = (0..space.dim())
        .into_par_iter()
        .flat_map_iter(|col| {
            let state = space.state(col);
            h.terms
                .iter()
                .filter_map(move |t| space.apply(t, state).map(|(v, row)| (row, col, v)))
        })
        .collect();
    Ok(SparseMatrix::from_triplets(space.dim(), triplets))
}
