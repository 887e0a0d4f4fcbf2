//! Finite-squeezing numerics for approximate cluster states.
//!
//! Covariance matrices use grouped ordering `(x_1..x_n, p_1..p_n)` and the
//! convention in which the vacuum has covariance `I`. A squeezing parameter
//! `r` scales quadrature variances by `e^{±2r}`, i.e. `10 log10(e^{2r})` dB.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::families::AdjacencyMatrix;
use crate::matrix::{inverse_sqrt_spd, sqrt_spd, SymplecticForm};
use crate::stabilizer::StabilizerGenerators;
use crate::uniformity::max_uniformity;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SqueezeParam {
    r: f64,
}

impl SqueezeParam {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeezing r must be finite and >= 0, got {r}")));
        }
        Ok(SqueezeParam { r })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(db * core::f64::consts::LN_10 / 20.0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn db(&self) -> f64 {
        20.0 / core::f64::consts::LN_10 * self.r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    sigma: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Checks symmetry (`1e-10`), positive definiteness and the uncertainty
    /// bound (symplectic eigenvalues `>= 1 - 1e-8`).
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        if !sigma.is_square() || sigma.nrows() % 2 == 1 {
            return Err(Error::DimensionMismatch {
                expected: "2n x 2n".into(),
                found: format!("{} x {}", sigma.nrows(), sigma.ncols()),
            });
        }
        if (&sigma - sigma.transpose()).amax() > 1e-10 {
            return Err(Error::NotSymmetric);
        }
        let cov = CovarianceMatrix { n: sigma.nrows() / 2, sigma };
        let nu = cov.symplectic_eigenvalues()?;
        if nu.iter().any(|&v| v < 1.0 - 1e-8) {
            return Err(Error::InvalidParameter("covariance violates the uncertainty bound".into()));
        }
        Ok(cov)
    }

    pub fn vacuum(n: usize) -> Self {
        CovarianceMatrix { n, sigma: DMatrix::identity(2 * n, 2 * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// `S σ Sᵀ`.
    pub fn congruence(&self, s: &DMatrix<f64>) -> Self {
        CovarianceMatrix { n: self.n, sigma: s * &self.sigma * s.transpose() }
    }

    /// Symplectic spectrum, ascending, one value per mode. Computed as the
    /// singular values of `σ^{1/2} Ω σ^{1/2}`, which come in equal pairs.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let root = sqrt_spd(&self.sigma)?;
        let k = &root * SymplecticForm::new(self.n).to_dmatrix() * &root;
        let mut sv: Vec<f64> = k.singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        Ok(sv.into_iter().step_by(2).collect())
    }

    /// Marginal on the listed modes, keeping their `x` and `p` rows and columns.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidParameter("reduction needs at least one mode".into()));
        }
        if let Some(&m) = modes.iter().find(|&&m| m >= self.n) {
            return Err(Error::IndexOutOfRange { index: m, bound: self.n });
        }
        let idx = grouped_indices(self.n, modes);
        let sigma = self.sigma.select_rows(&idx).select_columns(&idx);
        Ok(CovarianceMatrix { n: modes.len(), sigma })
    }

    /// `1 / sqrt(det σ)`.
    pub fn purity(&self) -> f64 {
        1.0 / libm::sqrt(self.sigma.determinant())
    }
}

/// Global quadrature indices `x_m..., p_m...` for the listed modes.
fn grouped_indices(n: usize, modes: &[usize]) -> Vec<usize> {
    modes.iter().copied().chain(modes.iter().map(|&m| n + m)).collect()
}

/// Orthogonal symplectic `M` with cluster covariance `M diag(e^{2r} I, e^{-2r} I) Mᵀ`:
/// blocks `[[R, -R A], [R A, R]]`, `R = (I + A²)^{-1/2}`.
fn cluster_frame(a: &AdjacencyMatrix) -> Result<DMatrix<f64>> {
    let n = a.n();
    let am = a.matrix().to_dmatrix();
    let r = inverse_sqrt_spd(&(DMatrix::identity(n, n) + &am * &am))?;
    let ra = &r * &am;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&r);
    m.view_mut((0, n), (n, n)).copy_from(&(-&ra));
    m.view_mut((n, 0), (n, n)).copy_from(&ra);
    m.view_mut((n, n), (n, n)).copy_from(&r);
    Ok(m)
}

fn squeezed_diagonal(n: usize, r: SqueezeParam) -> DVector<f64> {
    let up = libm::exp(2.0 * r.r());
    DVector::from_fn(2 * n, |i, _| if i < n { up } else { 1.0 / up })
}

/// Covariance of the cluster state with adjacency `A` built from `n`
/// equally squeezed modes.
pub fn cluster_covariance(a: &AdjacencyMatrix, r: SqueezeParam) -> Result<CovarianceMatrix> {
    let m = cluster_frame(a)?;
    let d = DMatrix::from_diagonal(&squeezed_diagonal(a.n(), r));
    let sigma = &m * d * m.transpose();
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    Ok(CovarianceMatrix { n: a.n(), sigma })
}

/// Purity of the marginal on `modes`.
///
/// Falls like `e^{-2r·rank}` where `rank` is the rank of the cut block of
/// `A`. A cut with a zero block keeps purity near 1, a full-rank cut is
/// suppressed fastest. Partially deficient cuts are suppressed too, at a
/// slower rate, so a single threshold cannot tell them from full-rank ones.
///
/// The determinant is taken from the factor `G = M_S D^{1/2}` rather than
/// from the assembled covariance, whose entries cancel at high squeezing.
pub fn uniformity_oracle(a: &AdjacencyMatrix, modes: &[usize], r: SqueezeParam) -> Result<f64> {
    let n = a.n();
    if modes.is_empty() {
        return Err(Error::InvalidParameter("reduction needs at least one mode".into()));
    }
    if let Some(&m) = modes.iter().find(|&&m| m >= n) {
        return Err(Error::IndexOutOfRange { index: m, bound: n });
    }
    let frame = cluster_frame(a)?.select_rows(&grouped_indices(n, modes));
    let d = squeezed_diagonal(n, r);
    // Gᵀ with rows in decreasing scale: the e^{r} block (x) then e^{-r} (p).
    let g_t = DMatrix::from_fn(2 * n, frame.nrows(), |i, j| frame[(j, i)] * libm::sqrt(d[i]));
    let qr = g_t.col_piv_qr();
    let log_det: f64 = qr.r().diagonal().iter().map(|v| 2.0 * libm::log(libm::fabs(*v))).sum();
    Ok(libm::exp(-0.5 * log_det))
}

/// Sender/receiver pairs for EPR extraction, plus the leftover mode when
/// `n` is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    n: usize,
    senders: Vec<usize>,
    receivers: Vec<usize>,
    ancilla: Option<usize>,
}

impl Pairing {
    /// `pairs[i] = (sender, receiver)`; must cover all but at most one mode.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.len() != n / 2 || n < 2 {
            return Err(Error::InvalidPairing(format!("{n} modes need {} pairs, got {}", n / 2, pairs.len())));
        }
        let mut seen = alloc::vec![false; n];
        for &m in pairs.iter().flat_map(|(a, b)| [a, b]) {
            if m >= n {
                return Err(Error::InvalidPairing(format!("mode {m} out of range for {n} modes")));
            }
            if core::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPairing(format!("mode {m} used twice")));
            }
        }
        Ok(Pairing {
            n,
            senders: pairs.iter().map(|p| p.0).collect(),
            receivers: pairs.iter().map(|p| p.1).collect(),
            ancilla: seen.iter().position(|&s| !s),
        })
    }

    /// First half sends to second half: `i <-> i + n/2`, last mode spare if odd.
    pub fn default_for(n: usize) -> Result<Self> {
        let k = n / 2;
        let pairs: Vec<(usize, usize)> = (0..k).map(|i| (i, i + k)).collect();
        Self::new(n, &pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn senders(&self) -> &[usize] {
        &self.senders
    }

    pub fn receivers(&self) -> &[usize] {
        &self.receivers
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.ancilla
    }
}

fn omega_product(u: &DMatrix<f64>, v: &DMatrix<f64>, omega: &DMatrix<f64>) -> DMatrix<f64> {
    u * omega * v.transpose()
}

/// Symplectic `S`, acting as the identity on the senders, that turns the
/// state into EPR pairs (`x_a - x_b`, `p_a + p_b` nullified) plus, for odd
/// `n`, an ancilla nullified by its own momentum.
///
/// Nullifier rows transform as `H -> H S^{-1}` and covariances as
/// `σ -> S σ Sᵀ`. The ancilla's state is fixed by the symplectic completion.
pub fn epr_extraction(h: &StabilizerGenerators, pairing: &Pairing) -> Result<DMatrix<f64>> {
    let n = h.n();
    if pairing.n() != n {
        return Err(Error::InvalidPairing(format!("pairing is for {} modes, state has {n}", pairing.n())));
    }
    if !h.is_valid() {
        return Err(Error::InvalidStabilizer("H must have full rank and satisfy H Ω Hᵀ = 0".into()));
    }
    let k = pairing.senders().len();
    let local: Vec<usize> = pairing.receivers().iter().copied().chain(pairing.ancilla()).collect();
    let m = local.len();
    let hm = h.matrix().to_dmatrix();
    let h_send = hm.select_columns(&grouped_indices(n, pairing.senders()));
    let h_local = hm.select_columns(&grouped_indices(n, &local));
    let scale = hm.amax().max(1.0);
    let tol = 1e-9 * scale;

    let svd = h_send.clone().svd(true, true);
    if svd.singular_values.iter().filter(|&&s| s > tol).count() < 2 * k {
        return Err(Error::NotExtractable);
    }
    // R H_send = I picks, for each sender quadrature, the nullifier whose
    // sender part is that quadrature alone; f_i is its receiver part.
    let left = svd.pseudo_inverse(tol).map_err(|e| Error::PostCondition(e.into()))?;
    let f = &left * &h_local;

    // Targets: x_a -> -x_b and p_a -> +p_b on the matching receiver.
    let mut g = DMatrix::zeros(2 * k, 2 * m);
    for j in 0..k {
        g[(j, j)] = -1.0;
        g[(k + j, m + j)] = 1.0;
    }

    let (f_full, g_full) = if pairing.ancilla().is_some() {
        let omega = SymplecticForm::new(m).to_dmatrix();
        // The single nullifier supported on receivers + ancilla.
        // Left kernel of H_send, via a square padding so the SVD is full.
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (2 * k, n)).copy_from(&h_send.transpose());
        let kernel = padded.svd(false, true);
        let v_t = kernel.v_t.expect("right singular vectors");
        let idx = kernel.singular_values.imin();
        let r_w = v_t.row(idx).into_owned();
        let w = &r_w * &h_local;
        let w = &w / w.amax();
        // f_star: ω(f_star, f_i) = 0, ω(f_star, w) = 1.
        let mut constraints = DMatrix::zeros(2 * k + 1, 2 * m);
        let mut rhs = DVector::zeros(2 * k + 1);
        for i in 0..2 * k {
            constraints.row_mut(i).copy_from(&(f.row(i) * omega.transpose()));
        }
        constraints.row_mut(2 * k).copy_from(&(&w * omega.transpose()));
        rhs[2 * k] = 1.0;
        let f_star = constraints
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::PostCondition(e.into()))?
            .transpose();
        let mut ff = DMatrix::zeros(2 * m, 2 * m);
        ff.view_mut((0, 0), (2 * k, 2 * m)).copy_from(&f);
        ff.row_mut(2 * k).copy_from(&w);
        ff.row_mut(2 * k + 1).copy_from(&f_star);
        let mut gg = DMatrix::zeros(2 * m, 2 * m);
        gg.view_mut((0, 0), (2 * k, 2 * m)).copy_from(&g);
        gg[(2 * k, m + k)] = 1.0; // p_ancilla
        gg[(2 * k + 1, k)] = 1.0; // x_ancilla
        debug_assert!((omega_product(&ff, &ff, &omega) - omega_product(&gg, &gg, &omega)).amax() < 1e-6 * scale * scale);
        (ff, gg)
    } else {
        (f, g)
    };

    // Rows transform by Φ = F^{-1} G, so S = Φ^{-1} = G^{-1} F.
    let g_inv = g_full.clone().try_inverse().ok_or(Error::NotExtractable)?;
    let s_local = &g_inv * &f_full;
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let idx = grouped_indices(n, &local);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            s[(i, j)] = s_local[(a, b)];
        }
    }

    let form = SymplecticForm::new(n);
    let s_scale = s.amax().max(1.0);
    if !form.preserved_by(&s, 1e-9 * s_scale * s_scale) {
        return Err(Error::PostCondition("extraction map is not symplectic".into()));
    }
    let s_inv = s.clone().try_inverse().ok_or(Error::NotExtractable)?;
    let image = &hm * s_inv;
    let target = epr_nullifiers(pairing);
    let mut stacked = DMatrix::zeros(2 * n, 2 * n);
    stacked.view_mut((0, 0), (n, 2 * n)).copy_from(&image);
    stacked.view_mut((n, 0), (n, 2 * n)).copy_from(&target);
    let sv = stacked.singular_values();
    let span_tol = 1e-8 * sv.amax().max(1.0);
    if sv.iter().filter(|&&x| x > span_tol).count() != n {
        return Err(Error::PostCondition("extracted state is not the EPR product".into()));
    }
    Ok(s)
}

/// Rows `x_a - x_b`, `p_a + p_b` for every pair, then `p_c` for the ancilla.
pub fn epr_nullifiers(pairing: &Pairing) -> DMatrix<f64> {
    let n = pairing.n();
    let mut e = DMatrix::zeros(n, 2 * n);
    let mut row = 0;
    for (&a, &b) in pairing.senders().iter().zip(pairing.receivers()) {
        e[(row, a)] = 1.0;
        e[(row, b)] = -1.0;
        e[(row + 1, n + a)] = 1.0;
        e[(row + 1, n + b)] = 1.0;
        row += 2;
    }
    if let Some(c) = pairing.ancilla() {
        e[(row, n + c)] = 1.0;
    }
    e
}

/// Coherent-state teleportation over the EPR pairs extracted from a
/// finitely squeezed cluster state, with unit gain and ideal feedforward.
///
/// The added noise is the covariance of `γ_b - Z γ_a`, `Z = I ⊕ (-I)`, in
/// the extracted state `S σ Sᵀ`. Since `σ = M D Mᵀ` the noise is assembled
/// as `W D Wᵀ` with `W` fixed, which keeps it accurate at high squeezing.
#[derive(Debug, Clone)]
pub struct TeleportationChannel {
    k: usize,
    n: usize,
    noise_map: DMatrix<f64>,
    is_ame: bool,
}

impl TeleportationChannel {
    pub fn new(a: &AdjacencyMatrix, pairing: &Pairing) -> Result<Self> {
        let n = a.n();
        let h = StabilizerGenerators::from_cluster(&AdjacencyMatrix::new(a.matrix().clone().into_float())?);
        let s = epr_extraction(&h, pairing)?;
        let frame = cluster_frame(a)?;
        let k = pairing.senders().len();
        let mut select = DMatrix::zeros(2 * k, 2 * n);
        for (j, (&sa, &rb)) in pairing.senders().iter().zip(pairing.receivers()).enumerate() {
            select[(j, rb)] = 1.0;
            select[(j, sa)] = -1.0;
            select[(k + j, n + rb)] = 1.0;
            select[(k + j, n + sa)] = 1.0;
        }
        Ok(TeleportationChannel { k, n, noise_map: select * s * frame, is_ame: max_uniformity(a).is_ame })
    }

    /// Whether the underlying state passes the uniformity check. Fidelities
    /// of non-AME states are still computed when extraction succeeds.
    pub fn is_ame(&self) -> bool {
        self.is_ame
    }

    pub fn pairs(&self) -> usize {
        self.k
    }

    pub fn noise_covariance(&self, r: SqueezeParam) -> DMatrix<f64> {
        let d = squeezed_diagonal(self.n, r);
        let w = &self.noise_map;
        let scaled = DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| w[(i, j)] * d[j]);
        scaled * w.transpose()
    }

    /// `F = 2^k / sqrt(det(σ_in + σ_out))` with `σ_in = I` and
    /// `σ_out = I + N`.
    pub fn fidelity(&self, r: SqueezeParam) -> f64 {
        let m = DMatrix::identity(2 * self.k, 2 * self.k) * 2.0 + self.noise_covariance(r);
        libm::pow(2.0, self.k as f64) / libm::sqrt(m.determinant())
    }
}

pub fn teleportation_fidelity(a: &AdjacencyMatrix, r: SqueezeParam, pairing: &Pairing) -> Result<f64> {
    Ok(TeleportationChannel::new(a, pairing)?.fidelity(r))
}

pub const THRESHOLD_MAX_DB: f64 = 100.0;
pub const THRESHOLD_RESOLUTION_DB: f64 = 1e-3;

/// Smallest squeezing in dB reaching `target`, by bisection on
/// `[0, 100]` dB after checking monotonicity on a 1 dB grid.
pub fn squeezing_threshold(channel: &TeleportationChannel, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target fidelity must lie in (0, 1), got {target}")));
    }
    let at = |db: f64| SqueezeParam::from_db(db).map(|r| channel.fidelity(r));
    let grid = (0..=THRESHOLD_MAX_DB as usize).map(|i| i as f64);
    let mut prev: Option<(f64, f64)> = None;
    for db in grid {
        let f = at(db)?;
        if let Some((pdb, pf)) = prev {
            if f < pf - 1e-12 {
                return Err(Error::NonMonotone { from_db: pdb, to_db: db });
            }
        }
        prev = Some((db, f));
    }
    if at(THRESHOLD_MAX_DB)? < target {
        return Err(Error::TargetUnreachable { target, max_db: THRESHOLD_MAX_DB });
    }
    if at(0.0)? >= target {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, THRESHOLD_MAX_DB);
    while hi - lo > THRESHOLD_RESOLUTION_DB {
        let mid = 0.5 * (lo + hi);
        if at(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Fidelity on the grid `db_min, db_min + step, ...` up to `db_max`.
pub fn fidelity_sweep(channel: &TeleportationChannel, db_min: f64, db_max: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if !(db_min < db_max) || !(step > 0.0) || db_min < 0.0 {
        return Err(Error::InvalidParameter(format!("empty sweep {db_min}:{db_max}:{step}")));
    }
    let count = libm::floor((db_max - db_min) / step + 1e-9) as usize + 1;
    (0..count)
        .map(|i| {
            let db = db_min + i as f64 * step;
            Ok((db, channel.fidelity(SqueezeParam::from_db(db)?)))
        })
        .collect()
}
