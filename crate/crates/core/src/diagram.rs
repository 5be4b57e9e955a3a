//! Sparse evaluator for sliced diagrams in left-combed fusion-tree
//! coordinates.
//!
//! A state represents a vector in Hom(1, x_1 (x) ... (x) x_n). Its basis
//! labels are chains: entry k holds the running total after strand k together
//! with the multiplicity index of the splitting used to reach it. All
//! generators (cups, caps, crossings, twists, coupons, rotations, encircling
//! loops) are realized as sparse transitions built from F-symbol blocks.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::fusion::{CategoryData, FKey, FusionPath, Simple};
use crate::linalg::Mat;
use crate::modular::ModularData;
use crate::scalar::{Complex64, ONE, ZERO};

/// Basis label: (running total, multiplicity index) per strand.
pub type Chain = Vec<(Simple, u8)>;

/// Amplitudes below this magnitude are dropped after each operation. This is
/// far below every tolerance used by callers and only controls sparsity.
const PRUNE: f64 = 1e-14;

#[derive(Clone, Debug, Default)]
pub struct DiagState {
    pub word: Vec<Simple>,
    pub amp: BTreeMap<Chain, Complex64>,
}

impl DiagState {
    /// The empty diagram: Hom(1, empty word) with amplitude 1.
    pub fn empty() -> Self {
        let mut amp = BTreeMap::new();
        amp.insert(Vec::new(), ONE);
        DiagState {
            word: Vec::new(),
            amp,
        }
    }

    pub fn zero(word: Vec<Simple>) -> Self {
        DiagState {
            word,
            amp: BTreeMap::new(),
        }
    }

    /// Basis state from a fusion path (total charge must be the unit).
    pub fn basis(word: Vec<Simple>, path: &FusionPath) -> Self {
        let mut amp = BTreeMap::new();
        amp.insert(path.steps.clone(), ONE);
        DiagState { word, amp }
    }

    pub fn scaled(mut self, s: Complex64) -> Self {
        for v in self.amp.values_mut() {
            *v *= s;
        }
        self
    }

    pub fn add_assign(&mut self, other: &DiagState) {
        assert_eq!(self.word, other.word, "word mismatch in state sum");
        for (k, v) in &other.amp {
            *self.amp.entry(k.clone()).or_insert(ZERO) += *v;
        }
    }

    pub fn coefficient(&self, chain: &Chain) -> Complex64 {
        self.amp.get(chain).copied().unwrap_or(ZERO)
    }

    /// Scalar value of a closed diagram (empty word).
    pub fn scalar(&self) -> Complex64 {
        assert!(self.word.is_empty(), "scalar() called on an open diagram");
        self.coefficient(&Vec::new())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.values().map(|v| v.norm_sqr()).sum()
    }

    fn prune(mut self) -> Self {
        self.amp.retain(|_, v| v.norm() > PRUNE);
        self
    }
}

fn charge_before(unit: Simple, chain: &Chain, pos: usize) -> Simple {
    if pos == 0 {
        unit
    } else {
        chain[pos - 1].0
    }
}

/// Reversed-dual word: the boundary word seen from the other side.
pub fn dual_word(cat: &CategoryData, word: &[Simple]) -> Vec<Simple> {
    word.iter().rev().map(|&x| cat.dual(x)).collect()
}

/// Insert a unit-total block state into `state` before strand `pos`.
pub fn insert_block(cat: &CategoryData, state: &DiagState, pos: usize, block: &DiagState) -> DiagState {
    assert!(pos <= state.word.len());
    let k = block.word.len();
    let mut word = state.word.clone();
    for (off, &y) in block.word.iter().enumerate() {
        word.insert(pos + off, y);
    }
    let mut out = DiagState::zero(word);
    if k == 0 {
        for (chain, amp) in &state.amp {
            for (bchain, bamp) in &block.amp {
                debug_assert!(bchain.is_empty());
                *out.amp.entry(chain.clone()).or_insert(ZERO) += amp * bamp;
            }
        }
        return out.prune();
    }
    let unit = cat.unit();
    for (chain, amp) in &state.amp {
        let a = charge_before(unit, chain, pos);
        for (bchain, bamp) in &block.amp {
            debug_assert_eq!(bchain.last().map(|e| e.0), Some(unit));
            // frontier: (new chain entries so far, root channel index, running ambient charge, coeff)
            let mut frontier: Vec<(Vec<(Simple, u8)>, u8, Simple, Complex64)> = Vec::new();
            let y0 = block.word[0];
            for &(t0, m) in cat.rules.channels(a, y0) {
                for mu in 0..m as u8 {
                    frontier.push((vec![(t0, mu)], mu, t0, ONE));
                }
            }
            for j in 1..k {
                let s_prev = bchain[j - 1].0;
                let s_cur = bchain[j].0;
                let nu = bchain[j].1;
                let yj = block.word[j];
                let mut next: Vec<(Vec<(Simple, u8)>, u8, Simple, Complex64)> = Vec::new();
                for (entries, rho_prev, t_prev, coeff) in frontier {
                    for &(t_cur, m_t) in cat.rules.channels(t_prev, yj) {
                        let block_f = match cat.fblock(a, s_prev, yj, t_cur) {
                            Some(b) => b,
                            None => continue,
                        };
                        for mu_j in 0..m_t as u8 {
                            let ri = match block_f.row_index(t_prev, rho_prev, mu_j) {
                                Some(r) => r,
                                None => continue,
                            };
                            let m_rho = cat.rules.nmult(a, s_cur, t_cur);
                            for rho in 0..m_rho as u8 {
                                let ci = match block_f.col_index(s_cur, nu, rho) {
                                    Some(c) => c,
                                    None => continue,
                                };
                                let f = block_f.inv[(ci, ri)];
                                if f == ZERO {
                                    continue;
                                }
                                let mut e2 = entries.clone();
                                e2.push((t_cur, mu_j));
                                next.push((e2, rho, t_cur, coeff * f));
                            }
                        }
                    }
                }
                frontier = next;
            }
            for (entries, _rho, t_end, coeff) in frontier {
                if t_end != a {
                    continue;
                }
                let mut chain2 = Vec::with_capacity(chain.len() + k);
                chain2.extend_from_slice(&chain[..pos]);
                chain2.extend_from_slice(&entries);
                chain2.extend_from_slice(&chain[pos..]);
                *out.amp.entry(chain2).or_insert(ZERO) += amp * bamp * coeff;
            }
        }
    }
    out.prune()
}

/// Contract strands pos..pos+k against a functional given by its values on
/// unit-total block chains over `block_word`.
pub fn contract_block(
    cat: &CategoryData,
    state: &DiagState,
    pos: usize,
    block_word: &[Simple],
    functional: &BTreeMap<Chain, Complex64>,
) -> DiagState {
    let k = block_word.len();
    assert!(pos + k <= state.word.len());
    for (off, &y) in block_word.iter().enumerate() {
        assert_eq!(state.word[pos + off], y, "contracted strand color mismatch");
    }
    let mut word = state.word.clone();
    word.drain(pos..pos + k);
    let mut out = DiagState::zero(word);
    if k == 0 {
        for (chain, amp) in &state.amp {
            *out.amp.entry(chain.clone()).or_insert(ZERO) += *amp;
        }
        return out.prune();
    }
    let unit = cat.unit();
    for (chain, amp) in &state.amp {
        let a = charge_before(unit, chain, pos);
        // ambient labels of the block
        let ts: Vec<(Simple, u8)> = chain[pos..pos + k].to_vec();
        if ts[k - 1].0 != a {
            continue; // unit-total component requires the charge to return
        }
        // frontier over block-tree prefixes: (block entries, root channel, coeff)
        let mut frontier: Vec<(Vec<(Simple, u8)>, u8, Complex64)> =
            vec![(vec![(block_word[0], 0)], ts[0].1, ONE)];
        // entry 0 of a block chain is (y0, 0) by construction
        for j in 1..k {
            let yj = block_word[j];
            let (t_cur, mu_j) = ts[j];
            let t_prev = ts[j - 1].0;
            let mut next: Vec<(Vec<(Simple, u8)>, u8, Complex64)> = Vec::new();
            for (entries, rho_prev, coeff) in frontier {
                let s_prev = entries[j - 1].0;
                let block_f = match cat.fblock(a, s_prev, yj, t_cur) {
                    Some(b) => b,
                    None => continue,
                };
                let ri = match block_f.row_index(t_prev, rho_prev, mu_j) {
                    Some(r) => r,
                    None => continue,
                };
                for &(s_cur, m_s) in cat.rules.channels(s_prev, yj) {
                    let m_rho = cat.rules.nmult(a, s_cur, t_cur);
                    for nu in 0..m_s as u8 {
                        for rho in 0..m_rho as u8 {
                            let ci = match block_f.col_index(s_cur, nu, rho) {
                                Some(c) => c,
                                None => continue,
                            };
                            let f = block_f.mat[(ri, ci)];
                            if f == ZERO {
                                continue;
                            }
                            let mut e2 = entries.clone();
                            e2.push((s_cur, nu));
                            next.push((e2, rho, coeff * f));
                        }
                    }
                }
            }
            frontier = next;
        }
        let mut contracted = ZERO;
        for (entries, _rho, coeff) in frontier {
            if entries[k - 1].0 != unit {
                continue;
            }
            if let Some(fval) = functional.get(&entries) {
                contracted += coeff * fval;
            }
        }
        if contracted == ZERO {
            continue;
        }
        let mut chain2 = Vec::with_capacity(chain.len() - k);
        chain2.extend_from_slice(&chain[..pos]);
        chain2.extend_from_slice(&chain[pos + k..]);
        *out.amp.entry(chain2).or_insert(ZERO) += amp * contracted;
    }
    out.prune()
}

/// The coevaluation state 1 -> u (x) u*.
pub fn cup_state(cat: &CategoryData, u: Simple) -> DiagState {
    let us = cat.dual(u);
    let mut amp = BTreeMap::new();
    amp.insert(vec![(u, 0), (cat.unit(), 0)], cat.duality.cup[u.ix()]);
    DiagState {
        word: vec![u, us],
        amp,
    }
}

/// Insert a cup creating the pair (u, u*) before strand `pos`.
pub fn cup(cat: &CategoryData, state: &DiagState, pos: usize, u: Simple) -> DiagState {
    insert_block(cat, state, pos, &cup_state(cat, u))
}

/// Cap the adjacent pair (u, u*) at strands (pos, pos+1).
pub fn cap(cat: &CategoryData, state: &DiagState, pos: usize) -> DiagState {
    let u = state.word[pos];
    let us = cat.dual(u);
    assert_eq!(state.word[pos + 1], us, "cap on a non-dual pair");
    let mut functional = BTreeMap::new();
    functional.insert(vec![(u, 0), (cat.unit(), 0)], cat.duality.cap[u.ix()]);
    contract_block(cat, state, pos, &[u, us], &functional)
}

/// Apply a per-channel operator to the adjacent pair at (pos, pos+1).
///
/// For each fusion channel g of the current pair (x, y), `op` returns the
/// replacement pair colors together with a matrix mapping the multiplicity
/// index of Hom(g, x (x) y) to that of Hom(g, x' (x) y').
pub fn pair_channel_op(
    cat: &CategoryData,
    state: &DiagState,
    pos: usize,
    op: &dyn Fn(Simple, Simple, Simple) -> Vec<((Simple, Simple), Mat)>,
) -> DiagState {
    let x = state.word[pos];
    let y = state.word[pos + 1];
    let unit = cat.unit();
    let mut outs: BTreeMap<(Simple, Simple), DiagState> = BTreeMap::new();
    for (chain, amp) in &state.amp {
        let a = charge_before(unit, chain, pos);
        let c = chain[pos].0;
        let mu = chain[pos].1;
        let b = chain[pos + 1].0;
        let nu = chain[pos + 1].1;
        let fwd = match cat.fblock(a, x, y, b) {
            Some(bl) => bl,
            None => continue,
        };
        let ri = match fwd.row_index(c, mu, nu) {
            Some(r) => r,
            None => continue,
        };
        for &(g, m_g) in cat.rules.channels(x, y) {
            let m_sigma = cat.rules.nmult(a, g, b);
            for rho in 0..m_g as u8 {
                for sigma in 0..m_sigma as u8 {
                    let ci = match fwd.col_index(g, rho, sigma) {
                        Some(cix) => cix,
                        None => continue,
                    };
                    let f1 = fwd.mat[(ri, ci)];
                    if f1 == ZERO {
                        continue;
                    }
                    for ((x2, y2), mat) in op(x, y, g) {
                        let m_out = cat.rules.nmult(x2, y2, g);
                        debug_assert_eq!(mat.cols, m_g as usize);
                        debug_assert_eq!(mat.rows, m_out as usize);
                        let back = match cat.fblock(a, x2, y2, b) {
                            Some(bl) => bl,
                            None => continue,
                        };
                        for rho2 in 0..m_out as u8 {
                            let r = mat[(rho2 as usize, rho as usize)];
                            if r == ZERO {
                                continue;
                            }
                            let ci2 = match back.col_index(g, rho2, sigma) {
                                Some(cix) => cix,
                                None => continue,
                            };
                            let target = outs.entry((x2, y2)).or_insert_with(|| {
                                let mut w = state.word.clone();
                                w[pos] = x2;
                                w[pos + 1] = y2;
                                DiagState::zero(w)
                            });
                            for (bri, &(c2, mu2, nu2)) in back.rows.iter().enumerate() {
                                let f2 = back.inv[(ci2, bri)];
                                if f2 == ZERO {
                                    continue;
                                }
                                let mut chain2 = chain.clone();
                                chain2[pos] = (c2, mu2);
                                chain2[pos + 1] = (b, nu2);
                                *target.amp.entry(chain2).or_insert(ZERO) += amp * f1 * r * f2;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut it = outs.into_values();
    let mut first = it
        .next()
        .unwrap_or_else(|| DiagState::zero(state.word.clone()));
    for s in it {
        assert_eq!(first.word, s.word, "pair operator produced mixed words");
        first.add_assign(&s);
    }
    first.prune()
}

/// Positive crossing: strand pos passes over strand pos+1.
pub fn crossing(md: &ModularData, state: &DiagState, pos: usize, positive: bool) -> DiagState {
    let cat = &md.base;
    pair_channel_op(cat, state, pos, &|x, y, g| {
        let mat = if positive {
            md.rblock(x, y, g)
        } else {
            md.rblock_inv(y, x, g)
        };
        match mat {
            Some(m) => vec![((y, x), m)],
            None => vec![],
        }
    })
}

/// Ribbon twist on strand `pos`.
pub fn twist(md: &ModularData, state: &DiagState, pos: usize, positive: bool) -> DiagState {
    let x = state.word[pos];
    let t = md.theta[x.ix()];
    let factor = if positive { t } else { ONE / t };
    state.clone().scaled(factor)
}

/// Cyclic rotation moving the first strand to the end (around the back).
pub fn rotate_left(cat: &CategoryData, state: &DiagState) -> DiagState {
    if state.word.is_empty() {
        return state.clone();
    }
    let x0 = state.word[0];
    let xs = cat.dual(x0);
    let s1 = cup_state(cat, xs); // (x0*, x0)
    let s2 = insert_block(cat, &s1, 1, state); // (x0*, x0, rest..., x0)
    cap(cat, &s2, 0)
}

/// Inverse rotation moving the last strand to the front.
pub fn rotate_right(cat: &CategoryData, state: &DiagState) -> DiagState {
    if state.word.is_empty() {
        return state.clone();
    }
    let xl = *state.word.last().unwrap();
    let s1 = cup_state(cat, xl); // (xl, xl*)
    let s2 = insert_block(cat, &s1, 1, state); // (xl, rest..., xl, xl*)
    cap(cat, &s2, s2.word.len() - 2)
}

/// Close a `color`-labeled loop around the first `upto` strands; the left leg
/// of the loop crosses over (positive) or under (negative) those strands.
pub fn encircle_prefix(
    md: &ModularData,
    state: &DiagState,
    upto: usize,
    color: Simple,
    positive: bool,
) -> DiagState {
    let cat = &md.base;
    let mut s = cup(cat, state, 0, color); // (color, color*, w...)
    for i in 0..upto {
        s = crossing(md, &s, i, positive);
    }
    cap(cat, &s, upto)
}

/// Apply a coupon with `k` inputs at strand `pos`, labeled by a state in
/// Hom(1, outputs + reversed duals of inputs) per the clockwise convention.
pub fn apply_coupon(
    cat: &CategoryData,
    state: &DiagState,
    pos: usize,
    inputs: usize,
    label: &DiagState,
) -> Result<DiagState> {
    let lw = label.word.len();
    if lw < inputs {
        return Err(CoreError::Validation(
            "coupon label has fewer legs than inputs".into(),
        ));
    }
    let outputs = lw - inputs;
    // label word: (o_0 .. o_{l-1}, y_{k-1}*, ..., y_0*)
    for j in 0..inputs {
        let expect = cat.dual(state.word[pos + j]);
        if label.word[lw - 1 - j] != expect {
            return Err(CoreError::Validation(
                "coupon label legs do not match strand colors".into(),
            ));
        }
    }
    let mut s = insert_block(cat, state, pos, label);
    // word: (... , o_0..o_{l-1}, y_{k-1}*, ..., y_0*, y_0, .., y_{k-1}, ...)
    // cap the innermost dual pair repeatedly
    for _ in 0..inputs {
        s = cap(cat, &s, pos + outputs + inputs - 1);
    }
    Ok(s)
}

/// Gram matrix of the pairing Hom(1, w) (x) Hom(1, w-bar) -> C obtained by
/// closing the two trees with nested caps.
pub fn gram_matrix(cat: &CategoryData, word: &[Simple]) -> (Vec<FusionPath>, Vec<FusionPath>, Mat) {
    let wbar = dual_word(cat, word);
    let basis = cat.hom_basis(word);
    let basis_bar = cat.hom_basis(&wbar);
    let k = word.len();
    let mut mat = Mat::zeros(basis.len(), basis_bar.len());
    for (bi, beta) in basis_bar.iter().enumerate() {
        let beta_state = DiagState::basis(wbar.clone(), beta);
        for (ai, alpha) in basis.iter().enumerate() {
            let alpha_state = DiagState::basis(word.to_vec(), alpha);
            let mut s = insert_block(cat, &beta_state, k, &alpha_state);
            for _ in 0..k {
                s = cap(cat, &s, s.word.len() / 2 - 1);
            }
            mat[(ai, bi)] = s.scalar();
        }
    }
    (basis, basis_bar, mat)
}

/// Pair two open states over dual words to a scalar: alpha in Hom(1, w),
/// beta in Hom(1, w-bar).
pub fn pair_states(cat: &CategoryData, alpha: &DiagState, beta: &DiagState) -> Complex64 {
    assert_eq!(alpha.word, dual_word(cat, &beta.word), "pairing words mismatch");
    let k = alpha.word.len();
    let mut s = insert_block(cat, beta, k, alpha);
    for _ in 0..k {
        let mid = s.word.len() / 2 - 1;
        s = cap(cat, &s, mid);
    }
    s.scalar()
}

/// Expand a state in the fusion-path basis of its word.
pub fn to_dense(cat: &CategoryData, state: &DiagState) -> (Vec<FusionPath>, Vec<Complex64>) {
    let basis = cat.hom_basis(&state.word);
    let coeffs = basis
        .iter()
        .map(|p| state.coefficient(&p.steps))
        .collect();
    (basis, coeffs)
}
