//! Braided / ribbon extension of a fusion category: R-symbols, twists and the
//! S-matrix, together with the paired presentation of a category and of the
//! modular data of its center (forgetful images, injection tensors, and
//! half-braidings of center simples against the base category).

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::fusion::{CategoryData, Simple};
use crate::linalg::Mat;
use crate::scalar::{Complex64, Tol, ONE, ZERO};

/// Modular (braided, ribbon, nondegenerate) data over a skeletal category.
#[derive(Clone, Debug)]
pub struct ModularData {
    pub base: CategoryData,
    /// [R^{xy}_g]: matrix sending the multiplicity index of Hom(g, x y) to
    /// that of Hom(g, y x) under the braiding x past y.
    r: BTreeMap<(Simple, Simple, Simple), Mat>,
    rinv: BTreeMap<(Simple, Simple, Simple), Mat>,
    pub theta: Vec<Complex64>,
    /// Normalized S-matrix (s_{00} = 1/D).
    pub s: Mat,
}

impl ModularData {
    pub fn new(
        base: CategoryData,
        r_entries: BTreeMap<(Simple, Simple, Simple), Mat>,
        theta: Vec<Complex64>,
        s: Mat,
        tol: Tol,
    ) -> Result<Self> {
        let n = base.rules.len();
        if theta.len() != n {
            return Err(CoreError::Validation("twist count mismatch".into()));
        }
        if s.rows != n || s.cols != n {
            return Err(CoreError::Validation("S matrix shape mismatch".into()));
        }
        // every admissible channel must carry an invertible R block
        let mut rinv = BTreeMap::new();
        for x in base.rules.all() {
            for y in base.rules.all() {
                for &(g, m) in base.rules.channels(x, y) {
                    let m_rev = base.rules.nmult(y, x, g);
                    if m_rev != m {
                        return Err(CoreError::Validation(format!(
                            "fusion is not braiding-compatible at ({}, {}; {})",
                            base.rules.name(x),
                            base.rules.name(y),
                            base.rules.name(g)
                        )));
                    }
                    let block = r_entries.get(&(x, y, g)).ok_or_else(|| {
                        CoreError::Validation(format!(
                            "missing R block at ({}, {}; {})",
                            base.rules.name(x),
                            base.rules.name(y),
                            base.rules.name(g)
                        ))
                    })?;
                    if block.rows != m as usize || block.cols != m as usize {
                        return Err(CoreError::Validation("R block shape mismatch".into()));
                    }
                    let inv = block.inverse(tol.0).ok_or_else(|| {
                        CoreError::Validation(format!(
                            "R block at ({}, {}; {}) is not invertible",
                            base.rules.name(x),
                            base.rules.name(y),
                            base.rules.name(g)
                        ))
                    })?;
                    rinv.insert((x, y, g), inv);
                }
            }
        }
        if !tol.eq(theta[base.unit().ix()], ONE) {
            return Err(CoreError::Validation("unit twist is not 1".into()));
        }
        Ok(ModularData {
            base,
            r: r_entries,
            rinv,
            theta,
            s,
        })
    }

    pub fn rblock(&self, x: Simple, y: Simple, g: Simple) -> Option<Mat> {
        self.r.get(&(x, y, g)).cloned()
    }

    pub fn rblock_inv(&self, x: Simple, y: Simple, g: Simple) -> Option<Mat> {
        self.rinv.get(&(x, y, g)).cloned()
    }

    /// Global dimension of the modular category (positive root).
    pub fn global_dim(&self) -> Complex64 {
        self.base.global_dim_sq.sqrt()
    }

    /// Surgery weight of a simple: its categorical dimension.
    pub fn omega_weight(&self, i: Simple) -> Complex64 {
        self.base.qdim(i)
    }

    /// Gauss sums p+ and p-.
    pub fn gauss_sums(&self) -> (Complex64, Complex64) {
        let mut plus = ZERO;
        let mut minus = ZERO;
        for i in self.base.rules.all() {
            let d2 = self.base.qdim(i) * self.base.qdim(i);
            plus += self.theta[i.ix()] * d2;
            minus += d2 / self.theta[i.ix()];
        }
        (plus, minus)
    }

    /// Charge conjugation permutation extracted from S^2 (normalized S).
    pub fn charge_conjugation_from_s(&self, tol: Tol) -> Result<Vec<Simple>> {
        let s2 = self.s.mul(&self.s);
        let n = self.base.rules.len();
        let mut perm = vec![None; n];
        for i in 0..n {
            for j in 0..n {
                let v = s2[(i, j)];
                if v.norm() > tol.0.max(1e-9) * 100.0 {
                    if !tol.eq(v, ONE) {
                        return Err(CoreError::Inconsistent(format!(
                            "S^2 entry at ({i},{j}) is neither 0 nor 1"
                        )));
                    }
                    if perm[i].replace(Simple(j as u32)).is_some() {
                        return Err(CoreError::Inconsistent(
                            "S^2 row has multiple unit entries".into(),
                        ));
                    }
                }
            }
        }
        perm.into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| CoreError::Inconsistent(format!("S^2 row {i} has no unit entry")))
            })
            .collect()
    }

    /// Unnormalized S from R and twists:
    /// s~_{ij} = sum_k N_{i* j}^k (theta_k / theta_i theta_j) d_k.
    pub fn smatrix_from_braiding(&self) -> Mat {
        let rules = &self.base.rules;
        let n = rules.len();
        Mat::from_fn(n, n, |i, j| {
            let si = Simple(i as u32);
            let sj = Simple(j as u32);
            let isd = rules.dual(si);
            let mut total = ZERO;
            for &(k, m) in rules.channels(isd, sj) {
                total += Complex64::new(m as f64, 0.0) * self.theta[k.ix()] * rules.qdim(k);
            }
            total / (self.theta[i] * self.theta[j])
        })
    }

    /// Max residual over both hexagon identities.
    pub fn verify_hexagon(&self) -> f64 {
        let rules = &self.base.rules;
        let mut worst: f64 = 0.0;
        for a in rules.all() {
            for b in rules.all() {
                for c in rules.all() {
                    for d in rules.all() {
                        worst = worst.max(self.hexagon_instance(a, b, c, d, false));
                        worst = worst.max(self.hexagon_instance(a, b, c, d, true));
                    }
                }
            }
        }
        worst
    }

    fn braid_entry(&self, x: Simple, y: Simple, g: Simple, to: u8, from: u8, inverse: bool) -> Complex64 {
        // inverse = false: [R^{xy}_g]_{to,from}
        // inverse = true:  [(R^{yx}_g)^{-1}]_{to,from} (the anti-braiding of x past y)
        let block = if inverse {
            self.rinv.get(&(y, x, g))
        } else {
            self.r.get(&(x, y, g))
        };
        match block {
            Some(m) => m[(to as usize, from as usize)],
            None => ZERO,
        }
    }

    fn hexagon_instance(&self, a: Simple, b: Simple, c: Simple, d: Simple, inverse: bool) -> f64 {
        let cat = &self.base;
        let rules = &cat.rules;
        let mut worst: f64 = 0.0;
        for &(e, m_ca) in rules.channels(c, a) {
            let m_eb = rules.nmult(e, b, d);
            if m_eb == 0 {
                continue;
            }
            for &(g, m_cb) in rules.channels(c, b) {
                let m_ag = rules.nmult(a, g, d);
                if m_ag == 0 {
                    continue;
                }
                let f_acb = match cat.fblock(a, c, b, d) {
                    Some(x) => x,
                    None => continue,
                };
                let f_cab = match cat.fblock(c, a, b, d) {
                    Some(x) => x,
                    None => continue,
                };
                let f_abc = match cat.fblock(a, b, c, d) {
                    Some(x) => x,
                    None => continue,
                };
                for mu in 0..m_ca as u8 {
                    for nu in 0..m_eb as u8 {
                        for rho2 in 0..rules.nmult(b, c, g) as u8 {
                            for sigma in 0..m_ag as u8 {
                                // LHS: sum_{mu', rho}
                                let mut lhs = ZERO;
                                for mup in 0..rules.nmult(a, c, e) as u8 {
                                    let r1 = self.braid_entry(c, a, e, mup, mu, inverse);
                                    if r1 == ZERO {
                                        continue;
                                    }
                                    for rho in 0..m_cb as u8 {
                                        let ri = f_acb.row_index(e, mup, nu);
                                        let ci = f_acb.col_index(g, rho, sigma);
                                        if let (Some(ri), Some(ci)) = (ri, ci) {
                                            let r2 =
                                                self.braid_entry(c, b, g, rho2, rho, inverse);
                                            lhs += r1 * f_acb.mat[(ri, ci)] * r2;
                                        }
                                    }
                                }
                                // RHS: sum_{f, alpha, beta, beta'}
                                let mut rhs = ZERO;
                                for &(f, m_ab) in rules.channels(a, b) {
                                    let m_cf = rules.nmult(c, f, d);
                                    for alpha in 0..m_ab as u8 {
                                        for beta in 0..m_cf as u8 {
                                            let ri = f_cab.row_index(e, mu, nu);
                                            let ci = f_cab.col_index(f, alpha, beta);
                                            let (ri, ci) = match (ri, ci) {
                                                (Some(r), Some(c2)) => (r, c2),
                                                _ => continue,
                                            };
                                            let v1 = f_cab.mat[(ri, ci)];
                                            if v1 == ZERO {
                                                continue;
                                            }
                                            for betap in 0..rules.nmult(f, c, d) as u8 {
                                                let rmid = self
                                                    .braid_entry(c, f, d, betap, beta, inverse);
                                                if rmid == ZERO {
                                                    continue;
                                                }
                                                let ri2 = f_abc.row_index(f, alpha, betap);
                                                let ci2 = f_abc.col_index(g, rho2, sigma);
                                                if let (Some(ri2), Some(ci2)) = (ri2, ci2) {
                                                    rhs += v1 * rmid * f_abc.mat[(ri2, ci2)];
                                                }
                                            }
                                        }
                                    }
                                }
                                worst = worst.max((lhs - rhs).norm());
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Twists recomputed from the braiding:
    /// theta_i = (1/d_i) sum_c d_c Tr[R^{ii}_c].
    pub fn twists_from_braiding(&self) -> Vec<Complex64> {
        let rules = &self.base.rules;
        rules
            .all()
            .map(|i| {
                let mut total = ZERO;
                for &(c, _m) in rules.channels(i, i) {
                    if let Some(block) = self.r.get(&(i, i, c)) {
                        let mut tr = ZERO;
                        for k in 0..block.rows.min(block.cols) {
                            tr += block[(k, k)];
                        }
                        total += rules.qdim(c) * tr;
                    }
                }
                total / rules.qdim(i)
            })
            .collect()
    }

    /// Fusion multiplicities reconstructed through the Verlinde formula from
    /// the normalized S-matrix; returns the max deviation from N.
    pub fn verlinde_residual(&self) -> f64 {
        let rules = &self.base.rules;
        let n = rules.len();
        let unit = self.base.unit().ix();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut total = ZERO;
                    for m in 0..n {
                        total += self.s[(i, m)] * self.s[(j, m)] * self.s[(k, m)].conj()
                            / self.s[(unit, m)];
                    }
                    let expect = rules.nmult(Simple(i as u32), Simple(j as u32), Simple(k as u32));
                    worst = worst.max((total - Complex64::new(expect as f64, 0.0)).norm());
                }
            }
        }
        worst
    }

    /// Structural S-matrix checks; returns the (S T)^3 / S^2 proportionality
    /// constant for reporting.
    pub fn verify_smatrix(&self, tol: Tol) -> Result<Complex64> {
        let n = self.base.rules.len();
        // symmetry
        if self.s.sub(&self.s.transpose()).max_norm() > tol.0 {
            return Err(CoreError::Inconsistent("S matrix is not symmetric".into()));
        }
        // nondegeneracy: S S-bar^T proportional to the identity
        let ssbar = self.s.mul(&self.s.conj_transpose());
        let lambda = ssbar[(0, 0)];
        let id = Mat::identity(n);
        if ssbar.sub(&id.scale(lambda)).max_norm() > tol.0.max(1e-9) * 100.0 {
            return Err(CoreError::Inconsistent(
                "S S-bar^T is not proportional to the identity".into(),
            ));
        }
        // S^2 must be the charge conjugation permutation
        let conj = self.charge_conjugation_from_s(tol)?;
        for i in self.base.rules.all() {
            if conj[i.ix()] != self.base.dual(i) {
                return Err(CoreError::Inconsistent(format!(
                    "charge conjugation from S^2 disagrees with duality at `{}`",
                    self.base.rules.name(i)
                )));
            }
        }
        // unnormalized S from braiding must match S * D
        let stilde = self.smatrix_from_braiding();
        let d = self.global_dim();
        let diff = stilde.sub(&self.s.scale(d)).max_norm();
        if diff > tol.0.max(1e-9) * 1000.0 {
            return Err(CoreError::Inconsistent(format!(
                "S from braiding deviates from stored S by {diff:.3e}"
            )));
        }
        // (S T)^3 proportional to S^2; return the constant
        let t = Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.theta[i]
            } else {
                ZERO
            }
        });
        let st = self.s.mul(&t);
        let st3 = st.mul(&st).mul(&st);
        let s2 = self.s.mul(&self.s);
        // first nonzero entry fixes the constant
        let mut constant = ZERO;
        'outer: for i in 0..n {
            for j in 0..n {
                if s2[(i, j)].norm() > 0.5 {
                    constant = st3[(i, j)] / s2[(i, j)];
                    break 'outer;
                }
            }
        }
        if st3.sub(&s2.scale(constant)).max_norm() > tol.0.max(1e-9) * 1000.0 {
            return Err(CoreError::Inconsistent(
                "(S T)^3 is not proportional to S^2".into(),
            ));
        }
        Ok(constant)
    }
}

/// One component of an injection tensor: the coefficient of the morphism
/// F(Z_k) -> F(Z_i) (x) F(Z_j) on summands (zk, mk) -> (zi, mi) (x) (zj, mj)
/// through the C-splitting basis element nu of Hom(zk, zi zj).
#[derive(Clone, Debug)]
pub struct InjectEntry {
    pub zk: Simple,
    pub mk: u8,
    pub zi: Simple,
    pub mi: u8,
    pub zj: Simple,
    pub mj: u8,
    pub nu: u8,
    pub value: Complex64,
}

/// Half-braiding components of a center simple Z against a base simple x:
/// (z_in, m_in) (x) x -> x (x) (z_out, m_out), block-diagonal over the total
/// charge c, with in-multiplicity mu in N_{z_in, x}^c and out-multiplicity
/// nu in N_{x, z_out}^c.
#[derive(Clone, Debug, Default)]
pub struct HalfBraiding {
    pub entries: BTreeMap<(Simple, (Simple, u8, u8), (Simple, u8, u8)), Complex64>,
}

impl HalfBraiding {
    pub fn entry(
        &self,
        c: Simple,
        z_out: Simple,
        m_out: u8,
        nu: u8,
        z_in: Simple,
        m_in: u8,
        mu: u8,
    ) -> Complex64 {
        self.entries
            .get(&(c, (z_out, m_out, nu), (z_in, m_in, mu)))
            .copied()
            .unwrap_or(ZERO)
    }
}

/// A spherical category paired with modular data for its center, including
/// the concrete center structure used by the inclusion machinery.
#[derive(Clone, Debug)]
pub struct PairedData {
    pub c: CategoryData,
    pub zc: ModularData,
    /// Per center simple: its forgetful image as C-summands with multiplicity.
    pub forget: Vec<Vec<(Simple, u32)>>,
    /// Injection tensors per admissible center triple (i, j; k, mu).
    pub inject: BTreeMap<(Simple, Simple, Simple, u8), Vec<InjectEntry>>,
    /// Half-braidings per center simple.
    pub halfbraid: Vec<HalfBraiding>,
}

impl PairedData {
    pub fn validate(&self, tol: Tol) -> Result<()> {
        let dz = self.zc.base.global_dim_sq;
        let dc = self.c.global_dim_sq;
        if (dz - dc * dc).norm() > tol.0.max(1e-9) * 100.0 {
            return Err(CoreError::Inconsistent(
                "global dimension of the center data is not the square of the base".into(),
            ));
        }
        if self.forget.len() != self.zc.base.rules.len() {
            return Err(CoreError::Validation("forgetful table size mismatch".into()));
        }
        for zi in self.zc.base.rules.all() {
            let total: Complex64 = self.forget[zi.ix()]
                .iter()
                .map(|&(x, m)| self.c.qdim(x) * m as f64)
                .sum();
            if (total - self.zc.base.qdim(zi)).norm() > tol.0.max(1e-9) * 100.0 {
                return Err(CoreError::Inconsistent(format!(
                    "forgetful image of `{}` has wrong total dimension",
                    self.zc.base.rules.name(zi)
                )));
            }
        }
        Ok(())
    }

    /// Multiplicity of C-simple x in F(Z).
    pub fn forget_mult(&self, z: Simple, x: Simple) -> u32 {
        self.forget[z.ix()]
            .iter()
            .find(|&&(y, _)| y == x)
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }

    pub fn inject_entries(&self, i: Simple, j: Simple, k: Simple, mu: u8) -> &[InjectEntry] {
        self.inject
            .get(&(i, j, k, mu))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}
