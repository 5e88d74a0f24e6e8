//! Feedforward quantum networks: gate and dephasing placements on a qubit register.
//!
//! A [`Network`] is immutable; [`Network::assign_params`] returns a new value.
//! Evaluation comes in two flavours:
//!
//! * [`Network::forward`] builds the full register (inputs plus every dummy as |0⟩)
//!   and applies each element in order. Simple, and the reference for everything else.
//! * [`CompiledNetwork`] introduces each dummy wire right before its first use and traces
//!   a wire out right after its last use, so registers stay small. This is what training uses.
//!
//! Flattened parameter order: elements in list order, each gate's parameters in the
//! family layout documented in [`crate::unitary`]. Dephasing and classical gates
//! contribute no parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::{check_wires, DensityMatrix, MAX_QUBITS};
use crate::unitary::ParamUnitary;

/// A gate bound to register wires. `layer` is bookkeeping only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatePlacement {
    pub gate: ParamUnitary,
    pub wires: Vec<usize>,
    #[serde(default)]
    pub layer: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    Gate(GatePlacement),
    /// Full Z-basis dephasing of one wire.
    Dephase {
        wire: usize,
    },
}

impl Element {
    pub fn wires(&self) -> &[usize] {
        match self {
            Element::Gate(g) => &g.wires,
            Element::Dephase { wire } => std::slice::from_ref(wire),
        }
    }

    fn param_count(&self) -> usize {
        match self {
            Element::Gate(g) => g.gate.params().len(),
            Element::Dephase { .. } => 0,
        }
    }
}

/// A validated feedforward network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkRecord", into = "NetworkRecord")]
pub struct Network {
    num_wires: usize,
    input_wires: Vec<usize>,
    dummy_wires: Vec<usize>,
    output_wires: Vec<usize>,
    elements: Vec<Element>,
}

/// On-disk form of a network, validated into [`Network`] on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkRecord {
    num_wires: usize,
    input_wires: Vec<usize>,
    dummy_wires: Vec<usize>,
    output_wires: Vec<usize>,
    elements: Vec<Element>,
}

impl TryFrom<NetworkRecord> for Network {
    type Error = Error;

    fn try_from(r: NetworkRecord) -> Result<Self> {
        let net = Network::new(r.num_wires, r.input_wires, r.output_wires, r.elements)?;
        if net.dummy_wires != r.dummy_wires {
            return Err(Error::Wiring(format!(
                "dummy wires {:?} do not complement the inputs (expected {:?})",
                r.dummy_wires, net.dummy_wires
            )));
        }
        Ok(net)
    }
}

impl From<Network> for NetworkRecord {
    fn from(n: Network) -> Self {
        Self {
            num_wires: n.num_wires,
            input_wires: n.input_wires,
            dummy_wires: n.dummy_wires,
            output_wires: n.output_wires,
            elements: n.elements,
        }
    }
}

impl Network {
    /// Every wire that is not an input is a dummy initialized to |0⟩.
    pub fn new(
        num_wires: usize,
        input_wires: Vec<usize>,
        output_wires: Vec<usize>,
        elements: Vec<Element>,
    ) -> Result<Self> {
        if num_wires == 0 || num_wires > MAX_QUBITS {
            return Err(Error::Wiring(format!(
                "register of {num_wires} wires (supported: 1..={MAX_QUBITS})"
            )));
        }
        if input_wires.is_empty() {
            return Err(Error::Wiring(
                "network needs at least one input wire".into(),
            ));
        }
        if output_wires.is_empty() {
            return Err(Error::Wiring(
                "network needs at least one output wire".into(),
            ));
        }
        check_wires(&input_wires, num_wires)?;
        check_wires(&output_wires, num_wires)?;
        for (i, e) in elements.iter().enumerate() {
            check_wires(e.wires(), num_wires)
                .map_err(|err| Error::Wiring(format!("element {i}: {err}")))?;
            if let Element::Gate(g) = e {
                if g.wires.len() != g.gate.arity() {
                    return Err(Error::Wiring(format!(
                        "element {i}: {}-qubit gate placed on {} wires",
                        g.gate.arity(),
                        g.wires.len()
                    )));
                }
            }
        }
        let dummy_wires = (0..num_wires)
            .filter(|w| !input_wires.contains(w))
            .collect();
        Ok(Self {
            num_wires,
            input_wires,
            dummy_wires,
            output_wires,
            elements,
        })
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn input_wires(&self) -> &[usize] {
        &self.input_wires
    }

    pub fn dummy_wires(&self) -> &[usize] {
        &self.dummy_wires
    }

    pub fn output_wires(&self) -> &[usize] {
        &self.output_wires
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn param_count(&self) -> usize {
        self.elements.iter().map(Element::param_count).sum()
    }

    pub fn flatten_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for e in &self.elements {
            if let Element::Gate(g) = e {
                out.extend_from_slice(g.gate.params());
            }
        }
        out
    }

    pub fn assign_params(&self, params: &[f64]) -> Result<Self> {
        let expected = self.param_count();
        if params.len() != expected {
            return Err(Error::ParamCount {
                expected,
                actual: params.len(),
            });
        }
        let mut offset = 0;
        let mut elements = Vec::with_capacity(self.elements.len());
        for e in &self.elements {
            elements.push(match e {
                Element::Gate(g) => {
                    let n = g.gate.params().len();
                    let gate = g.gate.with_params(params[offset..offset + n].to_vec())?;
                    offset += n;
                    Element::Gate(GatePlacement {
                        gate,
                        wires: g.wires.clone(),
                        layer: g.layer,
                    })
                }
                Element::Dephase { wire } => Element::Dephase { wire: *wire },
            });
        }
        Ok(Self {
            elements,
            ..self.clone()
        })
    }

    /// For each flattened parameter: the element that owns it.
    pub fn param_owners(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .flat_map(|(i, e)| std::iter::repeat_n(i, e.param_count()))
            .collect()
    }

    fn check_input(&self, input: &DensityMatrix) -> Result<()> {
        if input.num_qubits() != self.input_wires.len() {
            return Err(Error::Dimension(format!(
                "{}-qubit input for a network with {} input wires",
                input.num_qubits(),
                self.input_wires.len()
            )));
        }
        Ok(())
    }

    /// Full-register state after applying every element to `input ⊗ |0…0⟩`.
    pub fn forward(&self, input: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(input)?;
        let joint = input.tensor(&DensityMatrix::zero(self.dummy_wires.len()));
        // Local qubit i of `joint` is global wire `layout[i]`; reorder to 0..n.
        let layout: Vec<usize> = self
            .input_wires
            .iter()
            .chain(&self.dummy_wires)
            .copied()
            .collect();
        let natural: Vec<usize> = (0..self.num_wires)
            .map(|w| {
                layout
                    .iter()
                    .position(|&x| x == w)
                    .expect("wires partition the register")
            })
            .collect();
        let mut state = joint.partial_trace(&natural)?;
        for e in &self.elements {
            match e {
                Element::Gate(g) => state.conjugate_in_place(&g.gate.matrix()?, &g.wires),
                Element::Dephase { wire } => state.dephase_in_place(*wire),
            }
        }
        Ok(state)
    }

    /// Joint reduced state on the output wires, in listed order.
    pub fn output_state(&self, input: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(CompiledNetwork::new(self, &[])?.observe(input)?.output)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("network document: {e}")))
    }
}

/// Builder for networks, mostly for tests and task definitions.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    num_wires: usize,
    input_wires: Vec<usize>,
    output_wires: Vec<usize>,
    elements: Vec<Element>,
}

impl NetworkBuilder {
    pub fn new(num_wires: usize) -> Self {
        Self {
            num_wires,
            input_wires: Vec::new(),
            output_wires: Vec::new(),
            elements: Vec::new(),
        }
    }

    pub fn inputs(mut self, wires: &[usize]) -> Self {
        self.input_wires = wires.to_vec();
        self
    }

    pub fn outputs(mut self, wires: &[usize]) -> Self {
        self.output_wires = wires.to_vec();
        self
    }

    pub fn gate(mut self, gate: ParamUnitary, wires: &[usize], layer: usize) -> Self {
        self.elements.push(Element::Gate(GatePlacement {
            gate,
            wires: wires.to_vec(),
            layer,
        }));
        self
    }

    pub fn dephase(mut self, wire: usize) -> Self {
        self.elements.push(Element::Dephase { wire });
        self
    }

    pub fn build(self) -> Result<Network> {
        Network::new(
            self.num_wires,
            self.input_wires,
            self.output_wires,
            self.elements,
        )
    }
}

/// Reduced state of `wires` right after element `after` has been applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub after: usize,
    pub wires: Vec<usize>,
}

/// Output state plus the requested probe states.
#[derive(Debug, Clone)]
pub struct Observed {
    pub output: DensityMatrix,
    pub probes: Vec<DensityMatrix>,
}

#[derive(Debug, Clone)]
enum Action {
    Gate(Vec<usize>),
    Dephase(usize),
}

#[derive(Debug, Clone)]
struct Step {
    /// Fresh |0⟩ wires appended before the action.
    intro: usize,
    action: Action,
    /// (probe index, local wires) captured after the action.
    probes: Vec<(usize, Vec<usize>)>,
    /// Local wires kept after the step, when some wire is no longer needed.
    keep: Option<Vec<usize>>,
}

/// A network with precomputed gate matrices and a register schedule that keeps
/// only live wires.
#[derive(Debug, Clone)]
pub struct CompiledNetwork {
    network: Network,
    gates: Vec<Option<ComplexMatrix>>,
    initial_keep: Option<Vec<usize>>,
    steps: Vec<Step>,
    final_intro: usize,
    final_keep: Vec<usize>,
    num_probes: usize,
}

/// Register snapshots taken before each element, reused when only one gate changes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    before: Vec<DensityMatrix>,
    observed: Observed,
}

impl Trajectory {
    pub fn observed(&self) -> &Observed {
        &self.observed
    }
}

impl CompiledNetwork {
    pub fn new(network: &Network, probes: &[Probe]) -> Result<Self> {
        let n_el = network.elements.len();
        for (k, p) in probes.iter().enumerate() {
            if p.after >= n_el {
                return Err(Error::Wiring(format!(
                    "probe {k} after element {} of a {n_el}-element network",
                    p.after
                )));
            }
            if p.wires.is_empty() {
                return Err(Error::Wiring(format!("probe {k} has no wires")));
            }
            check_wires(&p.wires, network.num_wires)?;
        }

        // Last step index at which each wire must still be live; usize::MAX = until the end.
        let mut last_use: Vec<Option<usize>> = vec![None; network.num_wires];
        for (i, e) in network.elements.iter().enumerate() {
            for &w in e.wires() {
                last_use[w] = Some(i);
            }
        }
        for p in probes {
            for &w in &p.wires {
                last_use[w] = Some(last_use[w].map_or(p.after, |u| u.max(p.after)));
            }
        }
        for &w in &network.output_wires {
            last_use[w] = Some(usize::MAX);
        }

        let mut live: Vec<usize> = network.input_wires.clone();
        let initial_keep = prune(&mut live, |w| last_use[w].is_none());

        let mut steps = Vec::with_capacity(n_el);
        for (i, e) in network.elements.iter().enumerate() {
            let mut needed: Vec<usize> = e.wires().to_vec();
            for p in probes.iter().filter(|p| p.after == i) {
                needed.extend(&p.wires);
            }
            let before = live.len();
            for w in needed {
                if !live.contains(&w) {
                    live.push(w);
                }
            }
            let intro = live.len() - before;
            let local = |w: usize| live.iter().position(|&x| x == w).expect("live wire");
            let action = match e {
                Element::Gate(g) => Action::Gate(g.wires.iter().map(|&w| local(w)).collect()),
                Element::Dephase { wire } => Action::Dephase(local(*wire)),
            };
            let step_probes = probes
                .iter()
                .enumerate()
                .filter(|(_, p)| p.after == i)
                .map(|(k, p)| (k, p.wires.iter().map(|&w| local(w)).collect()))
                .collect();
            let keep = prune(&mut live, |w| last_use[w].is_some_and(|u| u <= i));
            steps.push(Step {
                intro,
                action,
                probes: step_probes,
                keep,
            });
        }

        let before = live.len();
        for &w in &network.output_wires {
            if !live.contains(&w) {
                live.push(w);
            }
        }
        let final_intro = live.len() - before;
        let final_keep = network
            .output_wires
            .iter()
            .map(|&w| {
                live.iter()
                    .position(|&x| x == w)
                    .expect("output wire is live")
            })
            .collect();

        let gates = network
            .elements
            .iter()
            .map(|e| match e {
                Element::Gate(g) => g.gate.matrix().map(Some),
                Element::Dephase { .. } => Ok(None),
            })
            .collect::<Result<_>>()?;

        Ok(Self {
            network: network.clone(),
            gates,
            initial_keep,
            steps,
            final_intro,
            final_keep,
            num_probes: probes.len(),
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn observe(&self, input: &DensityMatrix) -> Result<Observed> {
        let (_, observed) = self.run(input, false)?;
        Ok(observed)
    }

    /// Like [`observe`](Self::observe), also keeping the register before each element.
    pub fn trajectory(&self, input: &DensityMatrix) -> Result<Trajectory> {
        let (before, observed) = self.run(input, true)?;
        Ok(Trajectory { before, observed })
    }

    /// Observation with flattened parameter `index` set to `value`, replaying only the
    /// elements from the owning gate onwards.
    pub fn observe_with_param(
        &self,
        traj: &Trajectory,
        index: usize,
        value: f64,
    ) -> Result<Observed> {
        let mut offset = 0;
        for (i, e) in self.network.elements.iter().enumerate() {
            let Element::Gate(g) = e else { continue };
            let n = g.gate.params().len();
            if index < offset + n {
                let mut params = g.gate.params().to_vec();
                params[index - offset] = value;
                let matrix = g.gate.with_params(params)?.matrix()?;
                return self.resume(traj, i, &matrix);
            }
            offset += n;
        }
        Err(Error::ParamCount {
            expected: offset,
            actual: index + 1,
        })
    }

    fn resume(
        &self,
        traj: &Trajectory,
        start: usize,
        replacement: &ComplexMatrix,
    ) -> Result<Observed> {
        let mut state = traj.before[start].clone();
        let mut probes: Vec<Option<DensityMatrix>> =
            traj.observed.probes.iter().cloned().map(Some).collect();
        for (i, step) in self.steps.iter().enumerate().skip(start) {
            let gate = if i == start {
                Some(replacement)
            } else {
                self.gates[i].as_ref()
            };
            state = self.apply_step(state, step, gate, &mut probes)?;
        }
        self.finish(state, probes)
    }

    fn run(&self, input: &DensityMatrix, record: bool) -> Result<(Vec<DensityMatrix>, Observed)> {
        self.network.check_input(input)?;
        let mut state = match &self.initial_keep {
            Some(keep) if keep.is_empty() => DensityMatrix::zero(0),
            Some(keep) => input.partial_trace(keep)?,
            None => input.clone(),
        };
        let mut before = Vec::new();
        let mut probes = vec![None; self.num_probes];
        for (i, step) in self.steps.iter().enumerate() {
            if record {
                before.push(state.clone());
            }
            state = self.apply_step(state, step, self.gates[i].as_ref(), &mut probes)?;
        }
        Ok((before, self.finish(state, probes)?))
    }

    fn apply_step(
        &self,
        state: DensityMatrix,
        step: &Step,
        gate: Option<&ComplexMatrix>,
        probes: &mut [Option<DensityMatrix>],
    ) -> Result<DensityMatrix> {
        let mut state = grow(state, step.intro);
        match &step.action {
            Action::Gate(wires) => state.conjugate_in_place(gate.expect("gate matrix"), wires),
            Action::Dephase(w) => state.dephase_in_place(*w),
        }
        for (k, wires) in &step.probes {
            probes[*k] = Some(state.partial_trace(wires)?);
        }
        match &step.keep {
            Some(keep) if keep.is_empty() => Ok(DensityMatrix::zero(0)),
            Some(keep) => state.partial_trace(keep),
            None => Ok(state),
        }
    }

    fn finish(&self, state: DensityMatrix, probes: Vec<Option<DensityMatrix>>) -> Result<Observed> {
        let state = grow(state, self.final_intro);
        let output = state.partial_trace(&self.final_keep)?;
        let probes = probes
            .into_iter()
            .map(|p| p.expect("every probe is captured"))
            .collect();
        Ok(Observed { output, probes })
    }
}

/// Appends `count` fresh |0⟩ wires.
fn grow(state: DensityMatrix, count: usize) -> DensityMatrix {
    if count == 0 {
        state
    } else if state.num_qubits() == 0 {
        // A 0-qubit register is the scalar 1.
        DensityMatrix::zero(count)
    } else {
        state.tensor(&DensityMatrix::zero(count))
    }
}

/// Drops wires matching `dead` from `live`, returning the local positions kept if any were dropped.
fn prune(live: &mut Vec<usize>, dead: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    if !live.iter().any(|&w| dead(w)) {
        return None;
    }
    let keep: Vec<usize> = (0..live.len()).filter(|&i| !dead(live[i])).collect();
    *live = keep.iter().map(|&i| live[i]).collect();
    Some(keep)
}
