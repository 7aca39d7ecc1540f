//! Lattice states, the Toda vector fields and the Flaschka change of variables.
//!
//! Every state lives on a finite [`IndexWindow`]. Outside the window the
//! lattice is frozen at its background: `(a, b) = (1/2, 0)` in Flaschka
//! variables, zero momentum and zero spring extension in physical variables.
//!
//! The flat-vector kernels ([`ab_vector_field`], [`pq_vector_field`],
//! [`pq_force`]) are what the time steppers call. The layout is
//! `[a_0 .. a_{N-1}, b_0 .. b_{N-1}]` for Flaschka variables and
//! `[p_0 .. p_{N-1}, q_0 .. q_{N-1}]` for physical variables.

use crate::error::{Result, TodaError};

/// Background value of `a_n` far from the disturbance.
pub const A_BACKGROUND: f64 = 0.5;
/// Background value of `b_n` far from the disturbance.
pub const B_BACKGROUND: f64 = 0.0;

/// Contiguous, inclusive range of lattice sites `k_min ..= k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexWindow {
    k_min: i64,
    k_max: i64,
}

impl IndexWindow {
    pub fn new(k_min: i64, k_max: i64) -> Result<Self> {
        if k_min > k_max {
            return Err(TodaError::InvalidWindow { k_min, k_max });
        }
        Ok(Self { k_min, k_max })
    }

    /// The symmetric window `{-K, ..., K}` with `2K + 1` sites.
    pub fn symmetric(half_width: u64) -> Self {
        let k = half_width as i64;
        Self { k_min: -k, k_max: k }
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    /// Always false; a window holds at least one site.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.k_min..=self.k_max).contains(&n)
    }

    /// Storage offset of site `n`, if it lies in the window.
    pub fn offset(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.k_min) as usize)
    }

    /// Lattice site stored at `offset`.
    pub fn site(&self, offset: usize) -> i64 {
        self.k_min + offset as i64
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.k_min..=self.k_max
    }
}

/// Physical variables: momenta `p_n` and displacements `q_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeStatePQ {
    pub window: IndexWindow,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub time: f64,
}

impl LatticeStatePQ {
    pub fn new(window: IndexWindow, p: Vec<f64>, q: Vec<f64>, time: f64) -> Result<Self> {
        check_len(&window, &p)?;
        check_len(&window, &q)?;
        check_finite(&window, &p)?;
        check_finite(&window, &q)?;
        Ok(Self { window, p, q, time })
    }

    /// Equilibrium: every particle at rest in its reference position.
    pub fn equilibrium(window: IndexWindow) -> Self {
        let n = window.len();
        Self {
            window,
            p: vec![0.0; n],
            q: vec![0.0; n],
            time: 0.0,
        }
    }

    /// Flat `[p.., q..]` vector used by the steppers.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(2 * self.p.len());
        y.extend_from_slice(&self.p);
        y.extend_from_slice(&self.q);
        y
    }

    pub fn from_vector(window: IndexWindow, y: &[f64], time: f64) -> Result<Self> {
        let n = window.len();
        if y.len() != 2 * n {
            return Err(TodaError::LengthMismatch {
                expected: 2 * n,
                got: y.len(),
            });
        }
        Self::new(window, y[..n].to_vec(), y[n..].to_vec(), time)
    }
}

/// Flaschka variables: off-diagonal `a_n > 0` and diagonal `b_n` of the
/// Jacobi operator.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeStateAB {
    pub window: IndexWindow,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub time: f64,
}

impl LatticeStateAB {
    pub fn new(window: IndexWindow, a: Vec<f64>, b: Vec<f64>, time: f64) -> Result<Self> {
        check_len(&window, &a)?;
        check_len(&window, &b)?;
        check_finite(&window, &a)?;
        check_finite(&window, &b)?;
        check_positive(&window, &a)?;
        Ok(Self { window, a, b, time })
    }

    /// The background state `(a, b) = (1/2, 0)`.
    pub fn background(window: IndexWindow) -> Self {
        let n = window.len();
        Self {
            window,
            a: vec![A_BACKGROUND; n],
            b: vec![B_BACKGROUND; n],
            time: 0.0,
        }
    }

    /// Flat `[a.., b..]` vector used by the steppers.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(2 * self.a.len());
        y.extend_from_slice(&self.a);
        y.extend_from_slice(&self.b);
        y
    }

    pub fn from_vector(window: IndexWindow, y: &[f64], time: f64) -> Result<Self> {
        let n = window.len();
        if y.len() != 2 * n {
            return Err(TodaError::LengthMismatch {
                expected: 2 * n,
                got: y.len(),
            });
        }
        Self::new(window, y[..n].to_vec(), y[n..].to_vec(), time)
    }

    /// `(a_n, b_n)` at site `n`, with the background outside the window.
    pub fn at(&self, n: i64) -> (f64, f64) {
        match self.window.offset(n) {
            Some(i) => (self.a[i], self.b[i]),
            None => (A_BACKGROUND, B_BACKGROUND),
        }
    }

    /// Copies the values on the sites of `sub`, background outside `self.window`.
    pub fn restrict(&self, sub: IndexWindow) -> (Vec<f64>, Vec<f64>) {
        sub.sites().map(|n| self.at(n)).unzip()
    }
}

fn check_len(window: &IndexWindow, v: &[f64]) -> Result<()> {
    if v.len() != window.len() {
        return Err(TodaError::LengthMismatch {
            expected: window.len(),
            got: v.len(),
        });
    }
    Ok(())
}

fn check_finite(window: &IndexWindow, v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(TodaError::NonFinite {
            site: window.site(i),
        }),
        None => Ok(()),
    }
}

fn check_positive(window: &IndexWindow, a: &[f64]) -> Result<()> {
    match a.iter().position(|&x| x <= 0.0) {
        Some(i) => Err(TodaError::NonPositiveOffDiagonal {
            site: window.site(i),
            value: a[i],
        }),
        None => Ok(()),
    }
}

/// Toda interaction potential `V(r) = e^{-r} + r - 1`.
pub fn toda_potential(r: f64) -> f64 {
    // exp_m1 keeps V accurate for tiny extensions, where e^{-r} - 1 cancels
    (-r).exp_m1() + r
}

/// Maps physical variables to Flaschka variables:
/// `a_n = e^{-(q_{n+1} - q_n)/2} / 2`, `b_n = -p_n / 2`.
///
/// The displacement beyond the right edge continues the last stored value, so
/// `a_{k_max} = 1/2`.
pub fn flaschka(state: &LatticeStatePQ) -> LatticeStateAB {
    let n = state.window.len();
    let q = &state.q;
    let a = (0..n)
        .map(|i| {
            let dq = if i + 1 < n { q[i + 1] - q[i] } else { 0.0 };
            0.5 * (-0.5 * dq).exp()
        })
        .collect();
    let b = state.p.iter().map(|p| -0.5 * p).collect();
    LatticeStateAB {
        window: state.window,
        a,
        b,
        time: state.time,
    }
}

/// Inverts [`flaschka`]: `p_n = -2 b_n`, and `q` is rebuilt left to right from
/// `q_{k_min} = q_anchor` via `q_{n+1} = q_n - 2 ln(2 a_n)`.
///
/// The displacements are only defined up to a constant, fixed here by the
/// anchor. `a_{k_max}` couples to a site outside the window and is not
/// representable in `(p, q)`; the round trip reproduces it only when it sits at
/// the background value.
pub fn inverse_flaschka(state: &LatticeStateAB, q_anchor: f64) -> Result<LatticeStatePQ> {
    check_positive(&state.window, &state.a)?;
    let n = state.window.len();
    let p = state.b.iter().map(|b| -2.0 * b).collect();
    let mut q = Vec::with_capacity(n);
    q.push(q_anchor);
    for i in 0..n - 1 {
        let next = q[i] - 2.0 * (2.0 * state.a[i]).ln();
        q.push(next);
    }
    Ok(LatticeStatePQ {
        window: state.window,
        p,
        q,
        time: state.time,
    })
}

/// Flaschka equations of motion on a flat `[a.., b..]` vector:
/// `da_n = a_n (b_{n+1} - b_n)`, `db_n = 2 (a_n^2 - a_{n-1}^2)`.
pub fn ab_vector_field(y: &[f64], dy: &mut [f64]) {
    let n = y.len() / 2;
    let (a, b) = y.split_at(n);
    let (da, db) = dy.split_at_mut(n);
    for i in 0..n {
        let b_next = if i + 1 < n { b[i + 1] } else { B_BACKGROUND };
        let a_prev = if i > 0 { a[i - 1] } else { A_BACKGROUND };
        da[i] = a[i] * (b_next - b[i]);
        db[i] = 2.0 * (a[i] * a[i] - a_prev * a_prev);
    }
}

/// Force on each particle: `e^{-(q_n - q_{n-1})} - e^{-(q_{n+1} - q_n)}`, with
/// zero spring extension beyond both edges.
pub fn pq_force(q: &[f64], out: &mut [f64]) {
    let n = q.len();
    // e^{-(q_{i+1} - q_i)} for the spring to the right of site i
    let mut left = 1.0;
    for i in 0..n {
        let right = if i + 1 < n { (q[i] - q[i + 1]).exp() } else { 1.0 };
        out[i] = left - right;
        left = right;
    }
}

/// Physical equations of motion on a flat `[p.., q..]` vector.
pub fn pq_vector_field(y: &[f64], dy: &mut [f64]) {
    let n = y.len() / 2;
    let (p, q) = y.split_at(n);
    let (dp, dq) = dy.split_at_mut(n);
    pq_force(q, dp);
    dq.copy_from_slice(p);
}

/// Time derivative `(dp, dq)` of a physical-variable state.
pub fn rhs_pq(state: &LatticeStatePQ) -> (Vec<f64>, Vec<f64>) {
    let y = state.to_vector();
    let mut dy = vec![0.0; y.len()];
    pq_vector_field(&y, &mut dy);
    let dq = dy.split_off(state.window.len());
    (dy, dq)
}

/// Time derivative `(da, db)` of a Flaschka-variable state.
pub fn rhs_ab(state: &LatticeStateAB) -> (Vec<f64>, Vec<f64>) {
    let y = state.to_vector();
    let mut dy = vec![0.0; y.len()];
    ab_vector_field(&y, &mut dy);
    let db = dy.split_off(state.window.len());
    (dy, db)
}

/// Total energy `sum_n p_n^2 / 2 + V(q_{n+1} - q_n)` over the window.
///
/// Both edge springs are at zero extension, so the truncated system is itself
/// Hamiltonian with this energy.
pub fn hamiltonian(state: &LatticeStatePQ) -> f64 {
    let kinetic: f64 = state.p.iter().map(|p| 0.5 * p * p).sum();
    let potential: f64 = state
        .q
        .windows(2)
        .map(|w| toda_potential(w[1] - w[0]))
        .sum();
    kinetic + potential
}

/// Background-subtracted traces of `L` and `L^2`:
/// `c1 = sum b_n`, `c2 = sum (b_n^2 + 2 a_n^2 - 1/2)`.
pub fn conserved_traces(state: &LatticeStateAB) -> (f64, f64) {
    let c1 = state.b.iter().sum();
    let c2 = state
        .a
        .iter()
        .zip(&state.b)
        .map(|(a, b)| b * b + 2.0 * a * a - 0.5)
        .sum();
    (c1, c2)
}
