//! Equations of motion for the atomic operators and their expansion over Fock
//! levels of the input mode.
//!
//! For an input prepared in Fock states of a single pulse mode, the matrix
//! elements `E_{p,q}[O](t) = ⟨p| O(t) |q⟩` obey a closed linear hierarchy: an
//! input annihilation operator acting on `|q⟩` lowers it to `|q−1⟩`, and a
//! creation operator acting on `⟨p|` lowers it to `⟨p−1|`. Elements at level
//! `s = p + q` are therefore driven only by elements at level `s − 1`.
//!
//! The equations are written in the interaction picture where each atom
//! oscillates at its own frequency, so terms that connect atom 1 and atom 2
//! carry explicit factors `e^{±iΔt}`. [`Frame::Carrier`] rotates every operator
//! to the pulse carrier, which turns all coefficients into constants while the
//! envelope is flat.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{envelope, DeviceParams, Direction, InputKind, InputState, PulseSpec};
use crate::operators::{Op, BASIS_SIZE, CANONICAL_SIZE};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn phase(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Atom {
    First,
    Second,
}

impl Atom {
    /// Whether light entering in the given direction reaches this atom second.
    fn is_far(self, direction: Direction) -> bool {
        matches!(
            (self, direction),
            (Atom::Second, Direction::Left) | (Atom::First, Direction::Right)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldAction {
    /// `O · a_t`, acting on the ket.
    Annihilate,
    /// `a_t† · O`, acting on the bra.
    Create,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Source {
    Identity,
    Element(Op),
}

/// `coeff · e^{i·phase_order·Δt} · source` on the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureTerm {
    pub coeff: C64,
    pub source: Source,
    pub phase_order: i32,
}

/// An input-field term. The coefficient excludes the propagation phase of the
/// input mode, which is applied when the mode is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveTerm {
    pub coeff: C64,
    pub op: Op,
    pub via: Atom,
    pub action: FieldAction,
    pub phase_order: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub target: Op,
    pub pure: Vec<PureTerm>,
    pub drive: Vec<DriveTerm>,
}

impl Equation {
    fn new(target: Op) -> Self {
        Self {
            target,
            pure: Vec::new(),
            drive: Vec::new(),
        }
    }

    fn term(mut self, coeff: C64, op: Op, phase_order: i32) -> Self {
        self.pure.push(PureTerm {
            coeff,
            source: Source::Element(op),
            phase_order,
        });
        self
    }

    fn identity(mut self, coeff: C64) -> Self {
        self.pure.push(PureTerm {
            coeff,
            source: Source::Identity,
            phase_order: 0,
        });
        self
    }

    fn drive(mut self, action: FieldAction, coeff: C64, op: Op, via: Atom, phase_order: i32) -> Self {
        self.drive.push(DriveTerm {
            coeff,
            op,
            via,
            action,
            phase_order,
        });
        self
    }

    fn ann(self, coeff: C64, op: Op, via: Atom, phase_order: i32) -> Self {
        self.drive(FieldAction::Annihilate, coeff, op, via, phase_order)
    }

    fn cre(self, coeff: C64, op: Op, via: Atom, phase_order: i32) -> Self {
        self.drive(FieldAction::Create, coeff, op, via, phase_order)
    }

    /// Equation for the adjoint operator: every term is conjugated and
    /// normal ordering swaps annihilation for creation.
    pub fn adjoint(&self) -> Equation {
        Equation {
            target: self.target.adjoint(),
            pure: self
                .pure
                .iter()
                .map(|t| PureTerm {
                    coeff: t.coeff.conj(),
                    source: match t.source {
                        Source::Identity => Source::Identity,
                        Source::Element(op) => Source::Element(op.adjoint()),
                    },
                    phase_order: -t.phase_order,
                })
                .collect(),
            drive: self
                .drive
                .iter()
                .map(|t| DriveTerm {
                    coeff: t.coeff.conj(),
                    op: t.op.adjoint(),
                    via: t.via,
                    action: match t.action {
                        FieldAction::Annihilate => FieldAction::Create,
                        FieldAction::Create => FieldAction::Annihilate,
                    },
                    phase_order: -t.phase_order,
                })
                .collect(),
        }
    }
}

/// Which picture the coefficients are evaluated in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// All operators rotate at the pulse carrier; coefficients are constant.
    #[default]
    Carrier,
    /// Raw interaction-picture coefficients with their e^{±iΔt} factors.
    Interaction,
}

/// Construction switches used for self-tests of the hierarchy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub frame: Frame,
    /// Flip the sign of θ in the atom-2 → atom-1 exchange term of the σ₋⁽¹⁾
    /// equation. Only useful to check that the validation suite notices.
    pub theta_sign_fault: bool,
}

/// The closed set of operator equations for one device.
#[derive(Clone, Debug)]
pub struct EquationSet {
    equations: Vec<Equation>,
    delta: f64,
    theta: f64,
}

impl EquationSet {
    pub fn new(params: &DeviceParams) -> Self {
        Self::with_options(params, BuildOptions::default())
    }

    pub fn with_options(params: &DeviceParams, options: BuildOptions) -> Self {
        use Atom::{First, Second};
        use Op::*;

        let g = C64::new(params.gamma, 0.0);
        let s = C64::new(params.gamma.sqrt(), 0.0);
        let th = params.theta;
        // light radiated by the detuned atom travels at ω₁
        let th1 = params.theta_detuned();
        let two = C64::new(2.0, 0.0);
        let half = C64::new(0.5, 0.0);
        let exchange_1 = if options.theta_sign_fault { phase(-th) } else { phase(th) };

        let canonical = vec![
            Equation::new(Lower1)
                .term(-g, Lower1, 0)
                .term(g * exchange_1, Z1Lower2, -1)
                .ann(s, Z1, First, -1),
            Equation::new(Z1)
                .identity(-two * g)
                .term(-two * g, Z1, 0)
                .term(-two * g * phase(th), Raise1Lower2, -1)
                .term(-two * g * phase(-th), Lower1Raise2, 1)
                .ann(-two * s, Raise1, First, -1)
                .cre(-two * s, Lower1, First, 1),
            Equation::new(Lower2)
                .term(-g, Lower2, 0)
                .term(g * phase(th1), Lower1Z2, 1)
                .ann(s, Z2, Second, 0),
            Equation::new(Z2)
                .identity(-two * g)
                .term(-two * g, Z2, 0)
                .term(-two * g * phase(th1), Lower1Raise2, 1)
                .term(-two * g * phase(-th1), Raise1Lower2, -1)
                .ann(-two * s, Raise2, Second, 0)
                .cre(-two * s, Lower2, Second, 0),
            Equation::new(Z1Lower2)
                .term(-3.0 * g, Z1Lower2, 0)
                .term(-two * g, Lower2, 0)
                .term(-g * phase(-th), Lower1, 1)
                .term(-g * (phase(th1) + phase(-th)), Lower1Z2, 1)
                .ann(-two * s, Raise1Lower2, First, -1)
                .ann(s, Z1Z2, Second, 0)
                .cre(-two * s, Lower1Lower2, First, 1),
            Equation::new(Lower1Z2)
                .term(-3.0 * g, Lower1Z2, 0)
                .term(-two * g, Lower1, 0)
                .term(-g * (phase(th) + phase(-th1)), Z1Lower2, -1)
                .term(-g * phase(-th1), Lower2, -1)
                .ann(-two * s, Lower1Raise2, Second, 0)
                .ann(s, Z1Z2, First, -1)
                .cre(-two * s, Lower1Lower2, Second, 0),
            Equation::new(Raise1Lower2)
                .term(-two * g, Raise1Lower2, 0)
                .term(half * g * phase(-th), Z1, 1)
                .term(half * g * phase(th1), Z2, 1)
                .term(half * g * (phase(th1) + phase(-th)), Z1Z2, 1)
                .ann(s, Raise1Z2, Second, 0)
                .cre(s, Z1Lower2, First, 1),
            Equation::new(Lower1Lower2)
                .term(-two * g, Lower1Lower2, 0)
                .ann(s, Z1Lower2, First, -1)
                .ann(s, Lower1Z2, Second, 0),
            Equation::new(Z1Z2)
                .term(-4.0 * g, Z1Z2, 0)
                .term(-two * g, Z1, 0)
                .term(-two * g, Z2, 0)
                .term(two * g * (phase(th) + phase(-th1)), Raise1Lower2, -1)
                .term(two * g * (phase(-th) + phase(th1)), Lower1Raise2, 1)
                .ann(-two * s, Raise1Z2, First, -1)
                .ann(-two * s, Z1Raise2, Second, 0)
                .cre(-two * s, Lower1Z2, First, 1)
                .cre(-two * s, Z1Lower2, Second, 0),
        ];

        let mut equations: Vec<Option<Equation>> = vec![None; BASIS_SIZE];
        for eq in canonical {
            if !eq.target.is_hermitian() {
                let adj = eq.adjoint();
                let idx = adj.target.index();
                equations[idx] = Some(adj);
            }
            let idx = eq.target.index();
            equations[idx] = Some(eq);
        }
        let equations = equations
            .into_iter()
            .map(|e| e.expect("every basis operator has an equation"))
            .collect();

        Self {
            equations,
            delta: params.delta,
            theta: params.theta,
        }
    }

    pub fn equation(&self, target: Op) -> &Equation {
        &self.equations[target.index()]
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Numeric coefficient blocks at time `t` for input entering in `direction`.
    pub fn blocks_at(&self, t: f64, frame: Frame, direction: Direction) -> CoefficientBlocks {
        let mut blocks = CoefficientBlocks::zeros();
        for eq in &self.equations {
            let row = eq.target.index();
            let w_target = eq.target.detuned_weight();
            for term in &eq.pure {
                let (col, w_source) = match term.source {
                    Source::Identity => (None, 0),
                    Source::Element(op) => (Some(op.index()), op.detuned_weight()),
                };
                let c = self.transform(term.coeff, term.phase_order, w_target, w_source, t, frame);
                match col {
                    None => blocks.identity[row] += c,
                    Some(col) => blocks.homogeneous[(row, col)] += c,
                }
            }
            if frame == Frame::Carrier {
                // X^{int} = X e^{i w Δt} contributes i w Δ X to the interaction-picture rate
                blocks.homogeneous[(row, row)] -= C64::new(0.0, w_target as f64 * self.delta);
            }
            for term in &eq.drive {
                let c = self.transform(
                    term.coeff,
                    term.phase_order,
                    w_target,
                    term.op.detuned_weight(),
                    t,
                    frame,
                );
                let far = term.via.is_far(direction);
                let c = match (far, term.action) {
                    (false, _) => c,
                    (true, FieldAction::Annihilate) => c * phase(self.theta),
                    (true, FieldAction::Create) => c * phase(-self.theta),
                };
                let col = term.op.index();
                let target = match (term.action, far) {
                    (FieldAction::Annihilate, false) => &mut blocks.annihilate_near,
                    (FieldAction::Annihilate, true) => &mut blocks.annihilate_far,
                    (FieldAction::Create, false) => &mut blocks.create_near,
                    (FieldAction::Create, true) => &mut blocks.create_far,
                };
                target[(row, col)] += c;
            }
        }
        blocks
    }

    fn transform(&self, coeff: C64, order: i32, w_target: i32, w_source: i32, t: f64, frame: Frame) -> C64 {
        let raw = coeff * phase(order as f64 * self.delta * t);
        match frame {
            Frame::Interaction => raw,
            Frame::Carrier => raw * phase(-((w_target - w_source) as f64) * self.delta * t),
        }
    }
}

/// Numeric form of the equations: `dE/dt = H·E + id + (near/far drive)·E_lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientBlocks {
    pub homogeneous: DMatrix<C64>,
    pub identity: DVector<C64>,
    pub annihilate_near: DMatrix<C64>,
    pub annihilate_far: DMatrix<C64>,
    pub create_near: DMatrix<C64>,
    pub create_far: DMatrix<C64>,
}

impl CoefficientBlocks {
    fn zeros() -> Self {
        let z = || DMatrix::from_element(BASIS_SIZE, BASIS_SIZE, ZERO);
        Self {
            homogeneous: z(),
            identity: DVector::from_element(BASIS_SIZE, ZERO),
            annihilate_near: z(),
            annihilate_far: z(),
            create_near: z(),
            create_far: z(),
        }
    }

    /// Combined annihilation coupling for envelope values at the near and far atom.
    pub fn annihilation(&self, xi_near: C64, xi_far: C64) -> DMatrix<C64> {
        &self.annihilate_near * xi_near + &self.annihilate_far * xi_far
    }

    /// Combined creation coupling; conjugates the envelope values.
    pub fn creation(&self, xi_near: C64, xi_far: C64) -> DMatrix<C64> {
        &self.create_near * xi_near.conj() + &self.create_far * xi_far.conj()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = |a: &DMatrix<C64>, b: &DMatrix<C64>| {
            a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        };
        let dv = self
            .identity
            .iter()
            .zip(other.identity.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        [
            d(&self.homogeneous, &other.homogeneous),
            d(&self.annihilate_near, &other.annihilate_near),
            d(&self.annihilate_far, &other.annihilate_far),
            d(&self.create_near, &other.create_near),
            d(&self.create_far, &other.create_far),
            dv,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Index of a pair `(p, q)` in a flat table of `(n_max + 1)²` entries.
pub(crate) fn pair_index(n_max: usize, p: usize, q: usize) -> usize {
    p * (n_max + 1) + q
}

/// Linear equations for all elements at one level `s = p + q`.
///
/// The homogeneous couplings never mix different pairs, so the level matrix
/// is block diagonal with one copy of the shared 15×15 block per pair.
#[derive(Clone, Debug)]
pub struct LinearLevelSystem {
    pub level: usize,
    pub pairs: Vec<(usize, usize)>,
    blocks: Arc<CoefficientBlocks>,
    xi_near: C64,
    xi_far: C64,
}

impl LinearLevelSystem {
    pub fn blocks(&self) -> &CoefficientBlocks {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.pairs.len() * BASIS_SIZE
    }

    /// Full level matrix, block diagonal over pairs.
    pub fn matrix(&self) -> DMatrix<C64> {
        let n = self.size();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for k in 0..self.pairs.len() {
            m.view_mut((k * BASIS_SIZE, k * BASIS_SIZE), (BASIS_SIZE, BASIS_SIZE))
                .copy_from(&self.blocks.homogeneous);
        }
        m
    }

    /// Inhomogeneous term for pair `(p, q)` given the full element table of
    /// the lower levels.
    pub fn pair_source(&self, table: &ElementTable, p: usize, q: usize) -> DVector<C64> {
        let mut src = if p == q {
            self.blocks.identity.clone()
        } else {
            DVector::from_element(BASIS_SIZE, ZERO)
        };
        if q > 0 {
            let lower = table.pair_vector(p, q - 1);
            let a = self.blocks.annihilation(self.xi_near, self.xi_far);
            src += a * lower * C64::new((q as f64).sqrt(), 0.0);
        }
        if p > 0 {
            let lower = table.pair_vector(p - 1, q);
            let c = self.blocks.creation(self.xi_near, self.xi_far);
            src += c * lower * C64::new((p as f64).sqrt(), 0.0);
        }
        src
    }

    /// Stacked source for the whole level.
    pub fn source(&self, table: &ElementTable) -> DVector<C64> {
        let mut out = DVector::from_element(self.size(), ZERO);
        for (k, &(p, q)) in self.pairs.iter().enumerate() {
            out.rows_mut(k * BASIS_SIZE, BASIS_SIZE)
                .copy_from(&self.pair_source(table, p, q));
        }
        out
    }
}

/// Output of [`build_hierarchy`]: the equations plus their level systems.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub params: DeviceParams,
    pub input: InputState,
    pub pulse: PulseSpec,
    pub n_max: usize,
    pub options: BuildOptions,
    pub equations: EquationSet,
    pub levels: Vec<LinearLevelSystem>,
}

impl Hierarchy {
    pub fn direction(&self) -> Direction {
        self.input.direction
    }

    /// Coefficient blocks at an arbitrary time, in the frame the hierarchy was built in.
    pub fn blocks_at(&self, t: f64) -> CoefficientBlocks {
        self.equations.blocks_at(t, self.options.frame, self.input.direction)
    }

    /// Envelope values seen by the near and the far atom at time `t`.
    pub fn drive_at(&self, t: f64) -> (C64, C64) {
        let delay = self.params.envelope_delay();
        (envelope(t, &self.pulse), envelope(t - delay, &self.pulse))
    }
}

pub fn build_hierarchy(params: &DeviceParams, input: &InputState, pulse: &PulseSpec) -> Result<Hierarchy> {
    build_hierarchy_with(params, input, pulse, BuildOptions::default())
}

pub fn build_hierarchy_with(
    params: &DeviceParams,
    input: &InputState,
    pulse: &PulseSpec,
    options: BuildOptions,
) -> Result<Hierarchy> {
    params.validate()?;
    pulse.validate()?;
    input.validate()?;
    let n_max = match &input.kind {
        InputKind::Coherent(_) => return Err(Error::CoherentInput),
        InputKind::Fock(n) => *n as usize,
        InputKind::Superposition(c) => c.len() - 1,
    };

    let equations = EquationSet::with_options(params, options);
    // any time strictly inside the flat top
    let t_mid = 0.5 * pulse.duration();
    let blocks = Arc::new(equations.blocks_at(t_mid, options.frame, input.direction));
    let amplitude = pulse.plateau_amplitude();

    let levels = (0..=2 * n_max)
        .map(|s| {
            let lo = s.saturating_sub(n_max);
            let hi = s.min(n_max);
            LinearLevelSystem {
                level: s,
                pairs: (lo..=hi).rev().map(|q| (s - q, q)).collect(),
                blocks: Arc::clone(&blocks),
                xi_near: amplitude,
                xi_far: amplitude,
            }
        })
        .collect();

    Ok(Hierarchy {
        params: *params,
        input: input.clone(),
        pulse: *pulse,
        n_max,
        options,
        equations,
        levels,
    })
}

/// Largest change of any coefficient between two times inside the flat top.
pub fn residual_time_dependence(hierarchy: &Hierarchy) -> f64 {
    let duration = hierarchy.pulse.duration();
    let a = hierarchy.blocks_at(0.23 * duration);
    let b = hierarchy.blocks_at(0.71 * duration);
    a.max_abs_diff(&b)
}

/// All fifteen operator elements for every pair `(p, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementTable {
    pub n_max: usize,
    values: Vec<C64>,
}

impl ElementTable {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            values: vec![ZERO; (n_max + 1) * (n_max + 1) * BASIS_SIZE],
        }
    }

    /// Both atoms in the ground state and the field untouched.
    pub fn ground(n_max: usize) -> Self {
        let mut t = Self::zeros(n_max);
        for p in 0..=n_max {
            t.set(p, p, Op::Z1, C64::new(-1.0, 0.0));
            t.set(p, p, Op::Z2, C64::new(-1.0, 0.0));
            t.set(p, p, Op::Z1Z2, C64::new(1.0, 0.0));
        }
        t
    }

    pub fn from_flat(n_max: usize, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), (n_max + 1) * (n_max + 1) * BASIS_SIZE);
        Self { n_max, values }
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.values
    }

    pub fn get(&self, p: usize, q: usize, op: Op) -> C64 {
        self.values[pair_index(self.n_max, p, q) * BASIS_SIZE + op.index()]
    }

    pub fn set(&mut self, p: usize, q: usize, op: Op, value: C64) {
        self.values[pair_index(self.n_max, p, q) * BASIS_SIZE + op.index()] = value;
    }

    pub fn pair_vector(&self, p: usize, q: usize) -> DVector<C64> {
        let start = pair_index(self.n_max, p, q) * BASIS_SIZE;
        DVector::from_column_slice(&self.values[start..start + BASIS_SIZE])
    }

    pub fn set_pair(&mut self, p: usize, q: usize, v: &DVector<C64>) {
        let start = pair_index(self.n_max, p, q) * BASIS_SIZE;
        self.values[start..start + BASIS_SIZE].copy_from_slice(v.as_slice());
    }

    /// Largest violation of `E_{p,q}[O†] = conj(E_{q,p}[O])`.
    pub fn conjugate_mismatch(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in 0..=self.n_max {
            for q in 0..=self.n_max {
                for op in Op::ALL {
                    let d = self.get(p, q, op.adjoint()) - self.get(q, p, op).conj();
                    worst = worst.max(d.norm());
                }
            }
        }
        worst
    }

    /// Keep only the canonical operators.
    pub fn to_state(&self) -> HierarchyState {
        let pairs = (self.n_max + 1) * (self.n_max + 1);
        let elements = (0..pairs)
            .map(|k| {
                let mut row = [ZERO; CANONICAL_SIZE];
                row.copy_from_slice(&self.values[k * BASIS_SIZE..k * BASIS_SIZE + CANONICAL_SIZE]);
                row
            })
            .collect();
        HierarchyState {
            n_max: self.n_max,
            elements,
        }
    }
}

/// Matrix elements `E_{p,q}[O]` of the canonical operators. Adjoints are
/// recovered from `E_{p,q}[O†] = conj(E_{q,p}[O])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyState {
    pub n_max: usize,
    elements: Vec<[C64; CANONICAL_SIZE]>,
}

impl HierarchyState {
    pub fn ground(n_max: usize) -> Self {
        ElementTable::ground(n_max).to_state()
    }

    pub fn get(&self, p: usize, q: usize, op: Op) -> C64 {
        if op.is_canonical() {
            self.elements[pair_index(self.n_max, p, q)][op.index()]
        } else {
            self.elements[pair_index(self.n_max, q, p)][op.adjoint().index()].conj()
        }
    }

    pub fn identity(&self, p: usize, q: usize) -> C64 {
        if p == q {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    }

    pub fn max_abs_diff(&self, other: &HierarchyState) -> f64 {
        assert_eq!(self.n_max, other.n_max);
        self.elements
            .iter()
            .zip(&other.elements)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.elements
            .iter()
            .flat_map(|row| row.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }
}

/// A linear functional `c₀·δ_{pq} + Σ c_k E_{p,q}[O_k]` evaluated on one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementFunctional {
    pub identity: C64,
    pub terms: Vec<(Op, C64)>,
}

impl ElementFunctional {
    pub fn on_table(&self, table: &ElementTable, p: usize, q: usize) -> C64 {
        let id = if p == q { self.identity } else { ZERO };
        id + self
            .terms
            .iter()
            .map(|(op, c)| c * table.get(p, q, *op))
            .sum::<C64>()
    }

    pub fn on_state(&self, state: &HierarchyState, p: usize, q: usize) -> C64 {
        self.identity * state.identity(p, q)
            + self
                .terms
                .iter()
                .map(|(op, c)| c * state.get(p, q, *op))
                .sum::<C64>()
    }

    /// Evaluate on plain expectation values indexed like the operator basis.
    pub fn on_values(&self, values: &[C64]) -> C64 {
        self.identity
            + self
                .terms
                .iter()
                .map(|(op, c)| c * values[op.index()])
                .sum::<C64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> DeviceParams {
        DeviceParams::new(0.13, 0.31)
    }

    #[test]
    fn basis_is_closed() {
        let eqs = EquationSet::new(&params());
        for eq in eqs.equations() {
            for t in &eq.pure {
                if let Source::Element(op) = t.source {
                    assert!(Op::ALL.contains(&op));
                }
            }
        }
        assert_eq!(eqs.equations().len(), BASIS_SIZE);
        for (i, eq) in eqs.equations().iter().enumerate() {
            assert_eq!(eq.target.index(), i);
        }
    }

    #[test]
    fn phase_orders_match_detuned_weights() {
        // a consistent interaction picture has e^{i(w_X − w_O)Δt} on every term
        let eqs = EquationSet::new(&params());
        for eq in eqs.equations() {
            let w = eq.target.detuned_weight();
            for t in &eq.pure {
                if let Source::Element(op) = t.source {
                    assert_eq!(t.phase_order, w - op.detuned_weight(), "{} <- {}", eq.target, op);
                }
            }
            for t in &eq.drive {
                assert_eq!(t.phase_order, w - t.op.detuned_weight(), "{} <- {}", eq.target, t.op);
            }
        }
    }

    #[test]
    fn carrier_frame_is_time_independent() {
        let p = params().with_delta_mu(0.02);
        let input = InputState::fock(2, Direction::Left);
        let h = build_hierarchy(&p, &input, &PulseSpec::square(0.01)).unwrap();
        assert!(residual_time_dependence(&h) < 1e-12);
    }

    #[test]
    fn skipping_the_frame_change_leaves_time_dependence() {
        let options = BuildOptions {
            frame: Frame::Interaction,
            ..Default::default()
        };
        let input = InputState::fock(1, Direction::Left);
        let h = build_hierarchy_with(&params(), &input, &PulseSpec::square(0.01), options).unwrap();
        assert!(residual_time_dependence(&h) > 0.1);
    }

    #[test]
    fn ground_state_is_stationary() {
        let p = params();
        for dir in [Direction::Left, Direction::Right] {
            let b = EquationSet::new(&p).blocks_at(0.0, Frame::Carrier, dir);
            let g = ElementTable::ground(0).pair_vector(0, 0);
            let rate = &b.homogeneous * g + &b.identity;
            assert!(rate.iter().all(|x| x.norm() < 1e-14));
        }
    }

    #[test]
    fn level_structure_for_single_photon() {
        let h = build_hierarchy(
            &params(),
            &InputState::fock(1, Direction::Left),
            &PulseSpec::square(0.01),
        )
        .unwrap();
        let pairs: Vec<_> = h.levels.iter().map(|l| l.pairs.clone()).collect();
        assert_eq!(pairs, vec![vec![(0, 0)], vec![(0, 1), (1, 0)], vec![(1, 1)]]);
        // nothing couples in from the left-moving mode
        let b = h.levels[0].blocks();
        assert_eq!(b.annihilate_near.shape(), (BASIS_SIZE, BASIS_SIZE));
    }

    #[test]
    fn level_matrix_is_block_diagonal() {
        let h = build_hierarchy(
            &params(),
            &InputState::fock(3, Direction::Right),
            &PulseSpec::square(0.01),
        )
        .unwrap();
        let level = &h.levels[3];
        let m = level.matrix();
        assert_eq!(m.nrows(), 4 * BASIS_SIZE);
        let off = m.view((0, BASIS_SIZE), (BASIS_SIZE, BASIS_SIZE));
        assert!(off.iter().all(|x| *x == ZERO));
    }

    #[test]
    fn rejects_coherent_input() {
        let r = build_hierarchy(
            &params(),
            &InputState::coherent(1.0, Direction::Left),
            &PulseSpec::square(0.01),
        );
        assert!(matches!(r, Err(Error::CoherentInput)));
    }

    #[test]
    fn adjoint_recovery() {
        let mut t = ElementTable::zeros(1);
        t.set(0, 1, Op::Lower1, C64::new(0.3, -0.2));
        t.set(1, 0, Op::Raise1, C64::new(0.3, 0.2));
        let s = t.to_state();
        assert_eq!(s.get(1, 0, Op::Raise1), C64::new(0.3, 0.2));
        assert!(t.conjugate_mismatch() < 1e-15);
    }
}
