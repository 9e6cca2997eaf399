//! Finite-injury marker construction over binary trees.
//!
//! At stage `s` every strategy `e < s` prunes the tree `T_{e,s}` of nodes
//! whose committed φ-values already miss something `W_e` enumerated, then
//! marks the shortest unmarked node on the leftmost surviving path. A marker
//! `(σ, s, e)` bans the last `2^(s-e)` elements of `P_s` from `φ^X` for every
//! `X` extending `σ`.
//!
//! Nodes are non-empty strings: the root is never marked.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Halting;
use crate::density::Block;
use crate::error::{LabError, Result};
use crate::oracle::PartialOracle;
use crate::prefix::{as_bitstring, Prefix};

/// Stages are capped so that `φ` prefixes of length `2^(s+1)` stay small.
pub const MAX_STAGES: u32 = 24;

/// A c.e. set given by what it enumerates at each stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CeSchedule {
    stages: BTreeMap<u64, BTreeSet<u64>>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleStep {
    stage: u64,
    values: Vec<u64>,
}

impl CeSchedule {
    pub fn new() -> Self {
        CeSchedule::default()
    }

    pub fn add(&mut self, stage: u64, values: impl IntoIterator<Item = u64>) {
        self.stages.entry(stage).or_default().extend(values);
    }

    pub fn with(mut self, stage: u64, values: impl IntoIterator<Item = u64>) -> Self {
        self.add(stage, values);
        self
    }

    /// Everything enumerated at stages `<= s`.
    pub fn enumerated_by(&self, s: u64) -> BTreeSet<u64> {
        self.stages.range(..=s).flat_map(|(_, v)| v.iter().copied()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.values().all(BTreeSet::is_empty)
    }
}

impl Serialize for CeSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let steps: Vec<_> = self
            .stages
            .iter()
            .map(|(&stage, v)| ScheduleStep {
                stage,
                values: v.iter().copied().collect(),
            })
            .collect();
        steps.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CeSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut out = CeSchedule::new();
        for step in Vec::<ScheduleStep>::deserialize(d)? {
            out.add(step.stage, step.values);
        }
        Ok(out)
    }
}

/// Which bound limits the `W_e` side of the tree test. `Stage` compares
/// everything below `2^s`; `Strategy` only what `W_e` put below `2^e`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeBound {
    #[default]
    Stage,
    Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerConfig {
    pub stages: u32,
    pub depth: u32,
    #[serde(default)]
    pub tree_bound: TreeBound,
}

impl MarkerConfig {
    pub fn new(stages: u32, depth: u32) -> Self {
        MarkerConfig {
            stages,
            depth,
            tree_bound: TreeBound::Stage,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.stages == 0 || self.stages > MAX_STAGES {
            return Err(LabError::pre(
                "run_marker_construction",
                format!("stages must be in 1..={MAX_STAGES}, got {}", self.stages),
            ));
        }
        if self.depth < self.stages {
            return Err(LabError::pre(
                "run_marker_construction",
                format!("depth {} is below stages {}", self.depth, self.stages),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub e: u32,
    pub stage: u32,
    #[serde(with = "as_bitstring")]
    pub node: Prefix,
}

/// Extensions of `node` lose the last `2^(block-e)` elements of `P_block`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    #[serde(with = "as_bitstring")]
    pub node: Prefix,
    pub block: u32,
    pub e: u32,
}

impl Zone {
    /// First banned element of the block.
    pub fn ban_start(&self) -> usize {
        let b = Block(self.block);
        b.end() - (1usize << (self.block - self.e))
    }

    pub fn bans(&self, n: usize) -> bool {
        Block(self.block).range().contains(&n) && n >= self.ban_start()
    }
}

/// What strategy `e` saw and did at one stage. `T_{e,s}` is recorded as its
/// minimal pruned nodes: a node survives iff it extends none of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyStep {
    pub e: u32,
    #[serde(with = "opt_bitstring")]
    pub leftmost: Option<Prefix>,
    #[serde(with = "vec_bitstring")]
    pub pruned: Vec<Prefix>,
    #[serde(with = "opt_bitstring")]
    pub marker: Option<Prefix>,
}

mod opt_bitstring {
    use crate::prefix::Prefix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Option<Prefix>, s: S) -> Result<S::Ok, S::Error> {
        p.as_ref().map(|p| p.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Prefix>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| Prefix::from_bitstring(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

mod vec_bitstring {
    use crate::prefix::Prefix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Prefix], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|p| p.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Prefix>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| Prefix::from_bitstring(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerTrace {
    pub config: MarkerConfig,
    /// `steps[s]` holds one entry per strategy `e < s`.
    pub steps: Vec<Vec<StrategyStep>>,
    pub markers: Vec<Marker>,
    pub zones: Vec<Zone>,
}

struct TreeTest<'a> {
    zones: &'a [Zone],
    required: Vec<usize>,
    depth: usize,
}

impl TreeTest<'_> {
    fn passes(&self, sigma: &Prefix) -> bool {
        self.required
            .iter()
            .all(|&w| w != 0 && !self.zones.iter().any(|z| z.bans(w) && z.node.is_prefix_of(sigma)))
    }

    fn leftmost(&self, sigma: &mut Prefix) -> Option<Prefix> {
        if !self.passes(sigma) {
            return None;
        }
        if sigma.len() == self.depth {
            return Some(sigma.clone());
        }
        let open_below = self
            .zones
            .iter()
            .any(|z| z.node.len() > sigma.len() && sigma.is_prefix_of(&z.node));
        if !open_below {
            let mut out = sigma.clone();
            while out.len() < self.depth {
                out.push(false);
            }
            return Some(out);
        }
        for b in [false, true] {
            sigma.push(b);
            let found = self.leftmost(sigma);
            *sigma = sigma.truncate(sigma.len() - 1);
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn minimal_pruned(&self) -> Vec<Prefix> {
        let root = Prefix::zeros(0);
        if !self.passes(&root) {
            return vec![root];
        }
        let nodes: BTreeSet<&Prefix> = self.zones.iter().map(|z| &z.node).collect();
        nodes
            .into_iter()
            .filter(|n| !self.passes(n) && self.passes(&n.truncate(n.len() - 1)))
            .cloned()
            .collect()
    }
}

fn simulate(
    schedules: &[CeSchedule],
    config: MarkerConfig,
    mut place: impl FnMut(u32, u32, Option<&Prefix>, &BTreeSet<Prefix>) -> Result<Option<Prefix>>,
) -> Result<MarkerTrace> {
    config.validate()?;
    let depth = config.depth as usize;
    let mut zones: Vec<Zone> = Vec::new();
    let mut markers = Vec::new();
    let mut marked: Vec<BTreeSet<Prefix>> = vec![BTreeSet::new(); config.stages as usize];
    let mut steps = Vec::with_capacity(config.stages as usize);
    for s in 0..config.stages {
        let mut stage_steps = Vec::with_capacity(s as usize);
        // zones placed during stage s live in P_s, above everything tested at s
        let frozen = zones.clone();
        for e in 0..s {
            let enumerated = schedules
                .get(e as usize)
                .map(|w| w.enumerated_by(s as u64))
                .unwrap_or_default();
            let w_bound = match config.tree_bound {
                TreeBound::Stage => 1u64 << s,
                TreeBound::Strategy => 1u64 << e,
            };
            let required = enumerated
                .into_iter()
                .filter(|&w| w < w_bound && w < 1u64 << s)
                .map(|w| w as usize)
                .collect();
            let test = TreeTest {
                zones: &frozen,
                required,
                depth,
            };
            let leftmost = test.leftmost(&mut Prefix::zeros(0));
            let pruned = test.minimal_pruned();
            let marker = place(e, s, leftmost.as_ref(), &marked[e as usize])?;
            if let Some(node) = &marker {
                marked[e as usize].insert(node.clone());
                zones.push(Zone {
                    node: node.clone(),
                    block: s,
                    e,
                });
                markers.push(Marker {
                    e,
                    stage: s,
                    node: node.clone(),
                });
            }
            stage_steps.push(StrategyStep {
                e,
                leftmost,
                pruned,
                marker,
            });
        }
        steps.push(stage_steps);
    }
    Ok(MarkerTrace {
        config,
        steps,
        markers,
        zones,
    })
}

fn shortest_unmarked(path: &Prefix, marked: &BTreeSet<Prefix>) -> Option<Prefix> {
    (1..=path.len()).map(|l| path.truncate(l)).find(|p| !marked.contains(p))
}

/// `schedules[e]` feeds strategy `e`; missing schedules count as empty.
pub fn run_marker_construction(schedules: &[CeSchedule], config: MarkerConfig) -> Result<MarkerTrace> {
    simulate(schedules, config, |_, _, leftmost, marked| {
        Ok(leftmost.and_then(|p| shortest_unmarked(p, marked)))
    })
}

/// Like [`run_marker_construction`], but strategy `e` places its stage-`s`
/// marker on `approx(e, s)` (truncated to the depth cap) instead of the
/// leftmost path. Strategies whose tree has died place nothing.
pub fn run_marker_construction_redirected(
    schedules: &[CeSchedule],
    approx: impl Fn(u32, u32) -> Prefix,
    config: MarkerConfig,
) -> Result<MarkerTrace> {
    simulate(schedules, config, |e, s, leftmost, marked| {
        if leftmost.is_none() {
            return Ok(None);
        }
        let path = approx(e, s).truncate(config.depth as usize);
        shortest_unmarked(&path, marked).map(Some).ok_or_else(|| {
            LabError::pre(
                "run_marker_construction_redirected",
                format!(
                    "approximation for e = {e} at stage {s} has no unmarked initial segment (length {})",
                    path.len()
                ),
            )
        })
    })
}

impl MarkerTrace {
    pub fn stages(&self) -> u32 {
        self.config.stages
    }

    pub fn depth(&self) -> u32 {
        self.config.depth
    }

    pub fn step(&self, e: u32, s: u32) -> Option<&StrategyStep> {
        self.steps.get(s as usize)?.get(e as usize)
    }

    pub fn leftmost(&self, e: u32, s: u32) -> Option<&Prefix> {
        self.step(e, s)?.leftmost.as_ref()
    }

    /// Membership of `sigma` in `T_{e,s}`; `None` if `e` was not active at `s`.
    pub fn survives(&self, e: u32, s: u32, sigma: &Prefix) -> Option<bool> {
        let step = self.step(e, s)?;
        Some(sigma.len() <= self.depth() as usize && !step.pruned.iter().any(|p| p.is_prefix_of(sigma)))
    }

    pub fn markers_of(&self, e: u32) -> impl Iterator<Item = &Marker> + '_ {
        self.markers.iter().filter(move |m| m.e == e)
    }

    /// Zones with block `<= s` whose node is an initial segment of `x`.
    /// Fails if `x` is too short to decide some zone node.
    pub fn zones_on(&self, x: &Prefix, s: u32) -> Result<Vec<&Zone>> {
        let mut out = Vec::new();
        for z in self.zones.iter().filter(|z| z.block <= s) {
            if z.node.is_prefix_of(x) {
                out.push(z);
            } else if x.is_prefix_of(&z.node) {
                return Err(LabError::pre(
                    "phi_of",
                    format!("x of length {} does not decide marker node {}", x.len(), z.node),
                ));
            }
        }
        Ok(out)
    }

    /// Per block `t <= s`, the smallest exponent of a zone banning part of it
    /// for `x`.
    pub fn block_cuts(&self, x: &Prefix, s: u32) -> Result<Vec<Option<u32>>> {
        if s >= self.stages() {
            return Err(LabError::pre(
                "phi_of",
                format!("trace covers stages < {}, asked {s}", self.stages()),
            ));
        }
        let mut cuts = vec![None; s as usize + 1];
        for z in self.zones_on(x, s)? {
            let c: &mut Option<u32> = &mut cuts[z.block as usize];
            *c = Some(c.map_or(z.e, |d| d.min(z.e)));
        }
        Ok(cuts)
    }

    /// `φ^x ∩ [0, 2^(s+1))` as a prefix.
    pub fn phi_of(&self, x: &Prefix, s: u32) -> Result<Prefix> {
        Ok(phi_from_cuts(&self.block_cuts(x, s)?))
    }
}

fn phi_from_cuts(cuts: &[Option<u32>]) -> Prefix {
    let mut out = Prefix::zeros(1usize << cuts.len());
    for (t, cut) in cuts.iter().enumerate() {
        let b = Block(t as u32);
        let end = match cut {
            Some(e) => b.end() - (1usize << (t as u32 - e)),
            None => b.end(),
        };
        for m in b.start()..end {
            out.set(m, true);
        }
    }
    out
}

pub fn phi_of(x: &Prefix, t: &MarkerTrace, s: u32) -> Result<Prefix> {
    t.phi_of(x, s)
}

fn tilde_phi_pre(t: &MarkerTrace, n: u64, stage: u64) -> Result<()> {
    if stage < 63 && n >= 1u64 << (stage + 1) {
        return Err(LabError::pre(
            "tilde_phi",
            format!("n = {n} is not below 2^(stage+1) for stage {stage}"),
        ));
    }
    if n >= 1u64 << t.stages() {
        return Err(LabError::pre(
            "tilde_phi",
            format!("n = {n} lies beyond the blocks the trace covers (< 2^{})", t.stages()),
        ));
    }
    Ok(())
}

/// Halts with 1 on `n` iff every depth-cap string consistent with what `o`
/// has converged on by `stage` puts `n` into `φ`.
pub fn tilde_phi(o: &PartialOracle, t: &MarkerTrace, n: u64, stage: u64) -> Result<Halting> {
    tilde_phi_pre(t, n, stage)?;
    if n == 0 {
        return Ok(Halting::Pending);
    }
    let conv = o.converged_by(stage);
    let n = n as usize;
    let omitted_somewhere = t
        .zones
        .iter()
        .filter(|z| z.bans(n))
        .any(|z| (0..z.node.len()).all(|i| conv.get(&(i as u64)).is_none_or(|&v| v == z.node.bit(i))));
    Ok(if omitted_somewhere {
        Halting::Pending
    } else {
        Halting::Halts1
    })
}

/// The set of `n < 2^stages` on which [`tilde_phi`] halts, computed by
/// intersecting `φ^Y` over every consistent depth-cap string `Y`.
/// `free_cap` bounds the number of unconverged positions below the depth cap.
pub fn phi_common(o: &PartialOracle, t: &MarkerTrace, stage: u64, free_cap: usize) -> Result<Prefix> {
    let depth = t.depth() as usize;
    let conv = o.converged_by(stage);
    let free: Vec<usize> = (0..depth).filter(|i| !conv.contains_key(&(*i as u64))).collect();
    if free.len() > free_cap {
        return Err(LabError::cap(
            "tilde_phi",
            "unconverged positions",
            free_cap,
            free.len(),
        ));
    }
    let mut y = Prefix::zeros(depth);
    for (&i, &v) in conv.range(..depth as u64) {
        y.set(i as usize, v);
    }
    let top = t.stages() - 1;
    let mut common: Vec<Option<u32>> = vec![None; top as usize + 1];
    for mask in 0u64..1 << free.len() {
        for (j, &i) in free.iter().enumerate() {
            y.set(i, mask >> j & 1 == 1);
        }
        for (c, d) in common.iter_mut().zip(t.block_cuts(&y, top)?) {
            if let Some(d) = d {
                *c = Some(c.map_or(d, |c| c.min(d)));
            }
        }
    }
    Ok(phi_from_cuts(&common))
}

/// Exhaustive counterpart of [`tilde_phi`].
pub fn tilde_phi_exhaustive(
    o: &PartialOracle,
    t: &MarkerTrace,
    n: u64,
    stage: u64,
    free_cap: usize,
) -> Result<Halting> {
    tilde_phi_pre(t, n, stage)?;
    Ok(if phi_common(o, t, stage, free_cap)?.bit(n as usize) {
        Halting::Halts1
    } else {
        Halting::Pending
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleEntry;

    fn bits(s: &str) -> Prefix {
        Prefix::from_bitstring(s).unwrap()
    }

    fn empty_run(s: u32, d: u32) -> MarkerTrace {
        run_marker_construction(&[], MarkerConfig::new(s, d)).unwrap()
    }

    #[test]
    fn empty_schedules_mark_the_zero_path() {
        let t = empty_run(5, 5);
        let zero = Prefix::zeros(5);
        for m in &t.markers {
            assert!(m.node.is_prefix_of(&zero), "{m:?}");
            // strategy e marks 0^j at stage e + j
            assert_eq!(m.node.len() as u32, m.stage - m.e);
        }
        let e0: Vec<_> = t.markers_of(0).map(|m| m.stage).collect();
        assert_eq!(e0, vec![1, 2, 3, 4]);
        for s in 1..5 {
            let phi = t.phi_of(&zero, 4).unwrap();
            assert_eq!(phi.count_ones(Block(s).range()), 0, "P_{s} wholly banned");
        }
    }

    #[test]
    fn no_marker_twice_and_tails_have_the_right_size() {
        let t = empty_run(8, 9);
        for e in 0..8 {
            let nodes: BTreeSet<_> = t.markers_of(e).map(|m| &m.node).collect();
            assert_eq!(nodes.len(), t.markers_of(e).count());
        }
        for z in &t.zones {
            let banned = Block(z.block).range().filter(|&n| z.bans(n)).count();
            assert_eq!(banned, 1 << (z.block - z.e));
            assert!(z.bans(Block(z.block).end() - 1));
        }
    }

    #[test]
    fn enumerating_a_banned_element_moves_markers_right() {
        // stage-1 marker of strategy 0 is "0" and bans P_1 = {2, 3}
        let w = CeSchedule::new().with(2, [3]);
        let t = run_marker_construction(&[w], MarkerConfig::new(5, 5)).unwrap();
        assert_eq!(t.step(0, 1).unwrap().marker, Some(bits("0")));
        for s in 2..5 {
            assert_eq!(t.survives(0, s, &bits("0")), Some(false));
            assert_eq!(t.survives(0, s, &bits("1")), Some(true));
            assert_eq!(t.step(0, s).unwrap().pruned, vec![bits("0")]);
            assert!(t.leftmost(0, s).unwrap().bit(0));
        }
        let later: Vec<_> = t
            .markers_of(0)
            .filter(|m| m.stage >= 2)
            .map(|m| m.node.to_string())
            .collect();
        assert_eq!(later, vec!["1", "10", "100"]);
    }

    #[test]
    fn harmless_enumeration_prunes_nothing() {
        // 1 is never banned: P_0 has no markers
        let w = CeSchedule::new().with(0, [1]);
        let t = run_marker_construction(&[w], MarkerConfig::new(6, 6)).unwrap();
        assert_eq!(t, empty_run(6, 6));
    }

    #[test]
    fn zero_kills_every_node() {
        let w = CeSchedule::new().with(0, [0]);
        let t = run_marker_construction(&[w], MarkerConfig::new(3, 3)).unwrap();
        assert!(t.markers_of(0).next().is_none());
        assert_eq!(t.step(0, 1).unwrap().pruned, vec![Prefix::zeros(0)]);
    }

    #[test]
    fn strategy_bound_ignores_values_above_two_to_the_e() {
        let w = CeSchedule::new().with(2, [3]);
        let cfg = MarkerConfig {
            tree_bound: TreeBound::Strategy,
            ..MarkerConfig::new(5, 5)
        };
        let t = run_marker_construction(&[w], cfg).unwrap();
        assert_eq!(
            t.markers_of(0).map(|m| m.node.clone()).collect::<Vec<_>>(),
            empty_run(5, 5)
                .markers_of(0)
                .map(|m| m.node.clone())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn phi_of_examples() {
        let t = empty_run(5, 5);
        let full = t.phi_of(&bits("1"), 4).unwrap();
        assert_eq!(full.count_ones(0..32), 31);
        assert!(!full.bit(0));
        assert_eq!(t.phi_of(&bits("1"), 0).unwrap(), bits("01"));
        assert!(t.phi_of(&bits("00"), 4).is_err(), "too short to decide 000");
        assert!(t.phi_of(&bits("1"), 5).is_err());
    }

    #[test]
    fn tilde_phi_examples() {
        let t = empty_run(3, 3);
        let empty = PartialOracle::new();
        // P_1 = {2,3} is banned for extensions of "0" by strategy 0
        assert_eq!(tilde_phi(&empty, &t, 2, 3).unwrap(), Halting::Pending);
        assert_eq!(tilde_phi(&empty, &t, 1, 3).unwrap(), Halting::Halts1);
        let one = PartialOracle::from_entries([OracleEntry::new(0, true, 0)]).unwrap();
        assert_eq!(tilde_phi(&one, &t, 2, 3).unwrap(), Halting::Halts1);
        let late = PartialOracle::from_entries([OracleEntry::new(0, true, 5)]).unwrap();
        assert_eq!(tilde_phi(&late, &t, 2, 3).unwrap(), Halting::Pending);
        assert!(tilde_phi(&empty, &t, 8, 3).is_err());
        assert_eq!(tilde_phi(&empty, &t, 0, 3).unwrap(), Halting::Pending);
    }

    #[test]
    fn tilde_phi_matches_exhaustive_route() {
        let t = run_marker_construction(
            &[CeSchedule::new().with(3, [6]), CeSchedule::new()],
            MarkerConfig::new(6, 7),
        )
        .unwrap();
        for mask in 0u32..81 {
            // each of the first four positions: unset, 0 or 1
            let mut entries = Vec::new();
            let mut m = mask;
            for i in 0..4u64 {
                match m % 3 {
                    1 => entries.push(OracleEntry::new(i, false, 0)),
                    2 => entries.push(OracleEntry::new(i, true, 0)),
                    _ => {}
                }
                m /= 3;
            }
            let o = PartialOracle::from_entries(entries).unwrap();
            let common = phi_common(&o, &t, 10, 20).unwrap();
            for n in 0..64 {
                assert_eq!(
                    tilde_phi(&o, &t, n, 10).unwrap().halts(),
                    common.bit(n as usize),
                    "mask {mask} n {n}"
                );
            }
        }
    }

    #[test]
    fn exhaustive_route_respects_cap() {
        let t = empty_run(4, 6);
        assert!(matches!(
            phi_common(&PartialOracle::new(), &t, 0, 5),
            Err(LabError::ResourceCap { needed: 6, .. })
        ));
    }

    #[test]
    fn redirected_examples() {
        let cfg = MarkerConfig::new(7, 8);
        let plain = run_marker_construction(&[], cfg).unwrap();
        let same = run_marker_construction_redirected(&[], |e, s| plain.leftmost(e, s).unwrap().clone(), cfg).unwrap();
        assert_eq!(same, plain);

        let fixed = bits("10110011");
        let t = run_marker_construction_redirected(&[], |_, _| fixed.clone(), cfg).unwrap();
        assert!(t.markers.iter().all(|m| m.node.is_prefix_of(&fixed)));

        let switching = |_: u32, s: u32| if s < 3 { Prefix::zeros(8) } else { fixed.clone() };
        let t = run_marker_construction_redirected(&[], switching, cfg).unwrap();
        for e in 0..7 {
            let off = t.markers_of(e).filter(|m| !m.node.is_prefix_of(&fixed)).count();
            assert!(off <= 3, "strategy {e} has {off} markers off the final path");
        }

        let short = |_: u32, _: u32| bits("1");
        assert!(run_marker_construction_redirected(&[], short, cfg).is_err());
    }

    #[test]
    fn config_preconditions() {
        assert!(run_marker_construction(&[], MarkerConfig::new(0, 3)).is_err());
        assert!(run_marker_construction(&[], MarkerConfig::new(5, 4)).is_err());
    }

    #[test]
    fn trace_json_uses_bitstrings() {
        let t = empty_run(3, 3);
        let js = serde_json::to_value(&t).unwrap();
        assert_eq!(js["markers"][0], serde_json::json!({"e": 0, "stage": 1, "node": "0"}));
        assert_eq!(js["zones"][0], serde_json::json!({"node": "0", "block": 1, "e": 0}));
        let back: MarkerTrace = serde_json::from_value(js).unwrap();
        assert_eq!(back, t);
        let w: CeSchedule = serde_json::from_str(r#"[{"stage":2,"values":[3,5]}]"#).unwrap();
        assert_eq!(w.enumerated_by(1).len(), 0);
        assert_eq!(w.enumerated_by(2).into_iter().collect::<Vec<_>>(), vec![3, 5]);
    }
}
