//! Steady-state and time-domain solutions of the hierarchy and of the
//! coherent-state equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{
    pair_index, CoefficientBlocks, ElementFunctional, ElementTable, Frame, Hierarchy, HierarchyState,
};
use crate::integrator::{Dopri5, Tolerances};
use crate::model::{DeviceParams, Direction, InputKind, InputState, PulseSpec};
use crate::operators::{Op, BASIS_SIZE};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Condition estimates above this mark a level as numerically singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolverMode {
    #[default]
    SteadyState,
    TimeDomain,
}

impl SolverMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverMode::SteadyState => "STEADY_STATE",
            SolverMode::TimeDomain => "TIME_DOMAIN",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Fraction of the pulse duration after which a driven solution is
    /// expected to have settled onto the plateau.
    pub settle_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: SolverMode::SteadyState,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            settle_margin: 0.25,
        }
    }
}

impl SolverConfig {
    pub fn time_domain() -> Self {
        Self {
            mode: SolverMode::TimeDomain,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.settle_margin > 0.0 && self.settle_margin <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "settle_margin must lie in (0, 0.5], got {}",
                self.settle_margin
            )));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
            ..Tolerances::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest absolute residual of the solved linear equations.
    pub residual: f64,
    /// Ratio of extreme singular values of the solved block.
    pub condition: f64,
    /// Largest violation of `E_{p,q}[O†] = conj(E_{q,p}[O])`.
    pub conjugate_mismatch: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum SteadyValues {
    Fock(ElementTable),
    Coherent(DVector<C64>),
}

/// Plateau values of all atomic expectations for one input.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadySolution {
    pub params: DeviceParams,
    pub input: InputState,
    pub pulse: PulseSpec,
    pub diagnostics: Diagnostics,
    values: SteadyValues,
}

impl SteadySolution {
    pub fn direction(&self) -> Direction {
        self.input.direction
    }

    /// Hierarchy elements, for Fock and superposition inputs.
    pub fn state(&self) -> Option<HierarchyState> {
        match &self.values {
            SteadyValues::Fock(t) => Some(t.to_state()),
            SteadyValues::Coherent(_) => None,
        }
    }

    pub fn table(&self) -> Option<&ElementTable> {
        match &self.values {
            SteadyValues::Fock(t) => Some(t),
            SteadyValues::Coherent(_) => None,
        }
    }

    /// `⟨ψ| X |ψ⟩` for the input state ψ.
    pub fn expectation(&self, f: &ElementFunctional) -> C64 {
        match (&self.values, &self.input.kind) {
            (SteadyValues::Coherent(v), _) => f.on_values(v.as_slice()),
            (SteadyValues::Fock(t), InputKind::Fock(n)) => f.on_table(t, *n as usize, *n as usize),
            (SteadyValues::Fock(t), InputKind::Superposition(c)) => weighted(c, |p, q| f.on_table(t, p, q)),
            (SteadyValues::Fock(_), InputKind::Coherent(_)) => unreachable!("coherent input has no table"),
        }
    }

    /// `⟨ψ| a_in† X |ψ⟩` on the plateau, with `a_in` the input mode.
    pub fn drive_expectation(&self, f: &ElementFunctional) -> C64 {
        let xi = self.pulse.plateau_amplitude();
        match (&self.values, &self.input.kind) {
            (SteadyValues::Coherent(v), InputKind::Coherent(nbar)) => (xi * nbar.sqrt()).conj() * f.on_values(v.as_slice()),
            (SteadyValues::Fock(t), InputKind::Fock(n)) => {
                let n = *n as usize;
                if n == 0 {
                    ZERO
                } else {
                    xi.conj() * (n as f64).sqrt() * f.on_table(t, n - 1, n)
                }
            }
            (SteadyValues::Fock(t), InputKind::Superposition(c)) => weighted(c, |p, q| {
                if p == 0 {
                    ZERO
                } else {
                    xi.conj() * (p as f64).sqrt() * f.on_table(t, p - 1, q)
                }
            }),
            _ => unreachable!("values always match the input kind"),
        }
    }

    /// Plain expectation value of a single basis operator.
    pub fn expect_op(&self, op: Op) -> C64 {
        self.expectation(&ElementFunctional {
            identity: ZERO,
            terms: vec![(op, C64::new(1.0, 0.0))],
        })
    }
}

/// `Σ_{p,q} c_p* c_q g(p, q)`.
fn weighted(c: &[C64], g: impl Fn(usize, usize) -> C64) -> C64 {
    let mut acc = ZERO;
    for (p, cp) in c.iter().enumerate() {
        for (q, cq) in c.iter().enumerate() {
            if cp.norm_sqr() > 0.0 && cq.norm_sqr() > 0.0 {
                acc += cp.conj() * cq * g(p, q);
            }
        }
    }
    acc
}

fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve every level for its plateau values, lowest level first.
pub fn solve_steady_fock(hierarchy: &Hierarchy) -> Result<SteadySolution> {
    if hierarchy.options.frame != Frame::Carrier {
        return Err(Error::InvalidParameter(
            "steady states need the carrier-frame hierarchy".into(),
        ));
    }
    let block = hierarchy.levels[0].blocks().homogeneous.clone();
    let condition = condition_number(&block);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularLevel { level: 0, condition });
    }
    let lu = block.clone().lu();

    let mut table = ElementTable::zeros(hierarchy.n_max);
    let mut residual: f64 = 0.0;
    for level in &hierarchy.levels {
        for &(p, q) in &level.pairs {
            let src = level.pair_source(&table, p, q);
            let e = lu
                .solve(&(-&src))
                .ok_or(Error::SingularLevel { level: level.level, condition })?;
            let r = &block * &e + &src;
            let scale = 1.0 + src.camax();
            residual = residual.max(r.camax() / scale);
            table.set_pair(p, q, &e);
        }
    }
    let diagnostics = Diagnostics {
        residual,
        condition,
        conjugate_mismatch: table.conjugate_mismatch(),
    };
    Ok(SteadySolution {
        params: hierarchy.params,
        input: hierarchy.input.clone(),
        pulse: hierarchy.pulse,
        diagnostics,
        values: SteadyValues::Fock(table),
    })
}

/// Plateau expectations for coherent input with mean photon number `nbar`.
///
/// A coherent state is an eigenstate of the input annihilation operator, so
/// the field terms become c-numbers and one 15×15 system remains.
pub fn solve_coherent(
    params: &DeviceParams,
    nbar: f64,
    pulse: &PulseSpec,
    direction: Direction,
) -> Result<SteadySolution> {
    params.validate()?;
    pulse.validate()?;
    let input = InputState::coherent(nbar, direction);
    input.validate()?;

    let blocks = crate::hierarchy::EquationSet::new(params).blocks_at(0.5 * pulse.duration(), Frame::Carrier, direction);
    let eta = pulse.plateau_amplitude() * nbar.sqrt();
    let m = coherent_matrix(&blocks, eta);
    let condition = condition_number(&m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularLevel { level: 0, condition });
    }
    let rhs = -&blocks.identity;
    let v = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularLevel { level: 0, condition })?;
    let residual = (&m * &v - &rhs).camax() / (1.0 + rhs.camax());
    let conjugate_mismatch = Op::ALL
        .iter()
        .map(|op| (v[op.adjoint().index()] - v[op.index()].conj()).norm())
        .fold(0.0, f64::max);
    Ok(SteadySolution {
        params: *params,
        input,
        pulse: *pulse,
        diagnostics: Diagnostics {
            residual,
            condition,
            conjugate_mismatch,
        },
        values: SteadyValues::Coherent(v),
    })
}

fn coherent_matrix(blocks: &CoefficientBlocks, eta: C64) -> DMatrix<C64> {
    &blocks.homogeneous + blocks.annihilation(eta, eta) + blocks.creation(eta, eta)
}

/// Length of the free decay appended after the pulse.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Tail {
    #[default]
    None,
    /// Long enough for the slowest atomic mode to decay by e^{-30}.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeDomainOptions {
    /// Number of evenly spaced snapshots, endpoints included.
    pub samples: usize,
    pub tail: Tail,
    /// Functionals whose time integrals are accumulated for every pair.
    pub functionals: Vec<ElementFunctional>,
}

impl Default for TimeDomainOptions {
    fn default() -> Self {
        Self {
            samples: 201,
            tail: Tail::None,
            functionals: Vec::new(),
        }
    }
}

/// Longest time over which an integrated run may extend, in units of 1/γ.
pub const MAX_TAIL: f64 = 1e5;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<HierarchyState>,
    /// `integrals[k][pair]`: time integral of functional `k` on each pair,
    /// indexed as `p·(n_max + 1) + q`.
    pub integrals: Vec<Vec<C64>>,
    pub n_max: usize,
    pub end_time: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn integral(&self, k: usize, p: usize, q: usize) -> C64 {
        self.integrals[k][pair_index(self.n_max, p, q)]
    }

    /// Largest deviation from `steady` over snapshots in
    /// `[settle_margin·T, T]`.
    pub fn plateau_deviation(&self, steady: &HierarchyState, pulse: &PulseSpec, settle_margin: f64) -> f64 {
        let t_end = pulse.duration();
        self.times
            .iter()
            .zip(&self.states)
            .filter(|(t, _)| **t >= settle_margin * t_end && **t <= t_end)
            .map(|(_, s)| s.max_abs_diff(steady))
            .fold(0.0, f64::max)
    }

    /// Deviation from `steady` at the recorded snapshot closest to `t`.
    pub fn deviation_at(&self, t: f64, steady: &HierarchyState) -> Option<f64> {
        let (i, _) = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))?;
        Some(self.states[i].max_abs_diff(steady))
    }
}

/// Slowest decay rate among the atomic modes of the homogeneous block.
pub fn slowest_decay_rate(blocks: &CoefficientBlocks) -> f64 {
    blocks
        .homogeneous
        .eigenvalues()
        .map(|ev| ev.iter().map(|z| -z.re).fold(f64::INFINITY, f64::min))
        .unwrap_or(0.0)
}

/// Integrate the hierarchy from the ground state through the pulse.
pub fn solve_time_domain(hierarchy: &Hierarchy, config: &SolverConfig, options: &TimeDomainOptions) -> Result<Trajectory> {
    config.validate()?;
    let n_max = hierarchy.n_max;
    let pairs = (n_max + 1) * (n_max + 1);
    let n_elem = pairs * BASIS_SIZE;
    let n_fun = options.functionals.len();

    let pulse_end = hierarchy.pulse.duration();
    let delay = hierarchy.params.envelope_delay();
    let drive_end = pulse_end + delay;
    let tail = match options.tail {
        Tail::None => 0.0,
        Tail::Fixed(t) => t,
        Tail::Auto => {
            let rate = slowest_decay_rate(&hierarchy.blocks_at(0.0));
            if rate > 0.0 { (30.0 / rate).min(MAX_TAIL) } else { MAX_TAIL }
        }
    };
    if !(tail >= 0.0 && tail.is_finite()) {
        return Err(Error::InvalidParameter(format!("tail must be non-negative, got {tail}")));
    }
    let end_time = drive_end + tail;

    let mut breaks = vec![0.0, delay, pulse_end, drive_end, end_time];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let samples = options.samples.max(2);
    let mut sample_times: Vec<f64> = (0..samples)
        .map(|k| end_time * k as f64 / (samples - 1) as f64)
        .collect();
    sample_times.extend(breaks.iter().copied());
    sample_times.sort_by(f64::total_cmp);
    sample_times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut y = vec![ZERO; n_elem + n_fun * pairs];
    y[..n_elem].copy_from_slice(ElementTable::ground(n_max).as_slice());

    let fun_rows: Vec<(C64, [C64; BASIS_SIZE])> = options
        .functionals
        .iter()
        .map(|f| {
            let mut row = [ZERO; BASIS_SIZE];
            for (op, c) in &f.terms {
                row[op.index()] += *c;
            }
            (f.identity, row)
        })
        .collect();

    let time_dependent_frame = hierarchy.options.frame != Frame::Carrier;
    let constant_blocks = hierarchy.blocks_at(0.0);
    let sqrt: Vec<f64> = (0..=n_max).map(|k| (k as f64).sqrt()).collect();

    let mut times = Vec::with_capacity(sample_times.len());
    let mut states = Vec::with_capacity(sample_times.len());
    let mut steps = 0;
    let mut t_now = 0.0;
    let mut record = |t: f64, y: &[C64]| {
        times.push(t);
        states.push(ElementTable::from_flat(n_max, y[..n_elem].to_vec()).to_state());
    };
    record(0.0, &y);

    for seg in breaks.windows(2) {
        let (t0, t1) = (seg[0], seg[1]);
        let mid = 0.5 * (t0 + t1);
        let (xi_near, xi_far) = hierarchy.drive_at(mid);

        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            let owned;
            let blocks = if time_dependent_frame {
                owned = hierarchy.blocks_at(t);
                &owned
            } else {
                &constant_blocks
            };
            let a = to_array(&blocks.annihilation(xi_near, xi_far));
            let c = to_array(&blocks.creation(xi_near, xi_far));
            let h = to_array(&blocks.homogeneous);
            for p in 0..=n_max {
                for q in 0..=n_max {
                    let k = pair_index(n_max, p, q) * BASIS_SIZE;
                    let out = &mut dy[k..k + BASIS_SIZE];
                    matvec(&h, &y[k..k + BASIS_SIZE], out, C64::new(1.0, 0.0), false);
                    if p == q {
                        for (o, s) in out.iter_mut().zip(blocks.identity.iter()) {
                            *o += s;
                        }
                    }
                    if q > 0 {
                        let kl = pair_index(n_max, p, q - 1) * BASIS_SIZE;
                        matvec(&a, &y[kl..kl + BASIS_SIZE], out, C64::new(sqrt[q], 0.0), true);
                    }
                    if p > 0 {
                        let kl = pair_index(n_max, p - 1, q) * BASIS_SIZE;
                        matvec(&c, &y[kl..kl + BASIS_SIZE], out, C64::new(sqrt[p], 0.0), true);
                    }
                }
            }
            for (f, (id, row)) in fun_rows.iter().enumerate() {
                for p in 0..=n_max {
                    for q in 0..=n_max {
                        let pair = pair_index(n_max, p, q);
                        let e = &y[pair * BASIS_SIZE..(pair + 1) * BASIS_SIZE];
                        let mut v: C64 = row.iter().zip(e).map(|(r, x)| r * x).sum();
                        if p == q {
                            v += id;
                        }
                        dy[n_elem + f * pairs + pair] = v;
                    }
                }
            }
        };

        let mut stepper = Dopri5::new(y.len(), config.tolerances(), rhs);
        for &ts in sample_times.iter().filter(|&&ts| ts > t0 + 1e-12 && ts <= t1 + 1e-12) {
            stepper.integrate(t_now, ts, &mut y)?;
            t_now = ts;
            record(ts, &y);
        }
        steps += stepper.steps;
    }

    let integrals = (0..n_fun)
        .map(|f| y[n_elem + f * pairs..n_elem + (f + 1) * pairs].to_vec())
        .collect();
    Ok(Trajectory {
        times,
        states,
        integrals,
        n_max,
        end_time,
        steps,
    })
}

type Block = [[C64; BASIS_SIZE]; BASIS_SIZE];

fn to_array(m: &DMatrix<C64>) -> Block {
    let mut out = [[ZERO; BASIS_SIZE]; BASIS_SIZE];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

fn matvec(m: &Block, x: &[C64], out: &mut [C64], scale: C64, accumulate: bool) {
    for (i, row) in m.iter().enumerate() {
        let v: C64 = row.iter().zip(x).map(|(a, b)| a * b).sum::<C64>() * scale;
        if accumulate {
            out[i] += v;
        } else {
            out[i] = v;
        }
    }
}
