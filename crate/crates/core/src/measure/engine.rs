//! Exact measures of cylinder unions over the finitely many relevant bits.
//!
//! Every event here is a finite union of cylinders `{X : X ⊇ D}`, each given
//! by a [`Fragment`]. Measures are computed either by counting the
//! assignments to the relevant bits that hit some cylinder, or by
//! inclusion-exclusion over compatible cylinder families.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::operator::{EnumOperator, Fragment};
use crate::ratio::Ratio;

pub const DEFAULT_BIT_CAP: usize = 24;
pub const DEFAULT_IE_CAP: usize = 32;

/// The mask window `[low, high)`; `high = None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub low: u64,
    pub high: Option<u64>,
}

impl Window {
    pub fn new(low: u64, high: u64) -> Result<Self> {
        if low > high {
            return Err(LabError::pre("Window::new", format!("low {low} exceeds high {high}")));
        }
        Ok(Window { low, high: Some(high) })
    }

    pub fn from(low: u64) -> Self {
        Window { low, high: None }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MeasureQuery<'a> {
    pub op: &'a EnumOperator,
    pub n: u64,
    pub window: Window,
    pub stage: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Exhaustive,
    InclusionExclusion,
    /// Runs both and fails with an invariant error if they differ.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureEngine {
    pub bit_cap: usize,
    pub ie_cap: usize,
    pub method: Method,
}

impl Default for MeasureEngine {
    fn default() -> Self {
        MeasureEngine {
            bit_cap: DEFAULT_BIT_CAP,
            ie_cap: DEFAULT_IE_CAP,
            method: Method::Exhaustive,
        }
    }
}

impl MeasureEngine {
    pub fn with_method(self, method: Method) -> Self {
        MeasureEngine { method, ..self }
    }

    pub fn with_bit_cap(self, bit_cap: usize) -> Self {
        MeasureEngine { bit_cap, ..self }
    }
}

/// A finite union of cylinders.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Event {
    pub cylinders: Vec<Fragment>,
}

impl Event {
    pub fn empty() -> Self {
        Event::default()
    }

    pub fn full() -> Self {
        Event {
            cylinders: vec![Fragment::empty()],
        }
    }

    pub fn union(&self, other: &Event) -> Event {
        let mut cylinders = self.cylinders.clone();
        cylinders.extend(other.cylinders.iter().cloned());
        Event { cylinders }
    }

    /// Pairwise merges: `(∪A) ∩ (∪B) = ∪ (A ∩ B)`.
    pub fn intersect(&self, other: &Event) -> Event {
        let cylinders = self
            .cylinders
            .iter()
            .flat_map(|a| other.cylinders.iter().filter_map(move |b| a.merge(b)))
            .collect();
        Event { cylinders }
    }

    pub fn relevant_bits(&self) -> BTreeSet<u64> {
        self.cylinders.iter().flat_map(|c| c.inputs()).collect()
    }

    fn packed(&self, bit_cap: usize) -> Result<(usize, Vec<(u64, u64)>)> {
        let bits: Vec<u64> = self.relevant_bits().into_iter().collect();
        if bits.len() > bit_cap.min(63) {
            return Err(LabError::cap("measure", "relevant bits", bit_cap, bits.len()));
        }
        let index = |p: u64| bits.binary_search(&p).expect("collected above");
        let cyls = self
            .cylinders
            .iter()
            .map(|c| {
                c.iter().fold((0u64, 0u64), |(m, v), (p, b)| {
                    let i = index(p);
                    (m | 1 << i, v | u64::from(b) << i)
                })
            })
            .collect();
        Ok((bits.len(), cyls))
    }

    /// Number of assignments to the relevant bits hitting some cylinder,
    /// with the number of relevant bits.
    pub fn count_exhaustive(&self, bit_cap: usize) -> Result<(u64, usize)> {
        let (r, cyls) = self.packed(bit_cap)?;
        if cyls.iter().any(|&(m, _)| m == 0) {
            return Ok((1 << r, r));
        }
        let hits = (0u64..1 << r)
            .into_par_iter()
            .filter(|x| cyls.iter().any(|&(m, v)| x & m == v))
            .count() as u64;
        Ok((hits, r))
    }

    pub fn measure_exhaustive(&self, bit_cap: usize) -> Result<Ratio> {
        let (hits, r) = self.count_exhaustive(bit_cap)?;
        Ok(Ratio::cylinder_count(hits, r as u32))
    }

    /// Inclusion-exclusion over families of pairwise compatible cylinders,
    /// after dropping duplicates and cylinders contained in others.
    /// `ie_cap` bounds the number of cylinders that survive the reduction.
    pub fn measure_inclusion_exclusion(&self, bit_cap: usize, ie_cap: usize) -> Result<Ratio> {
        let (r, mut cyls) = self.packed(bit_cap)?;
        cyls.sort_unstable();
        cyls.dedup();
        // (m, v) ⊆ (m2, v2) as sets of reals iff m2 ⊆ m and v agrees on m2
        let reduced: Vec<(u64, u64)> = cyls
            .iter()
            .enumerate()
            .filter(|&(i, &(m, v))| {
                !cyls
                    .iter()
                    .enumerate()
                    .any(|(j, &(m2, v2))| j != i && m2 & m == m2 && v & m2 == v2)
            })
            .map(|(_, &c)| c)
            .collect();
        if reduced.len() > ie_cap {
            return Err(LabError::cap(
                "measure",
                "inclusion-exclusion cylinders",
                ie_cap,
                reduced.len(),
            ));
        }
        // each family contributes ±2^(r - |mask|) assignments
        fn walk(cyls: &[(u64, u64)], start: usize, mask: u64, val: u64, depth: u32, r: u32, acc: &mut i128) {
            for j in start..cyls.len() {
                let (m, v) = cyls[j];
                let common = mask & m;
                if val & common != v & common {
                    continue;
                }
                let nm = mask | m;
                let term = 1i128 << (r - nm.count_ones());
                if depth.is_multiple_of(2) {
                    *acc += term;
                } else {
                    *acc -= term;
                }
                walk(cyls, j + 1, nm, val | v, depth + 1, r, acc);
            }
        }
        let mut acc = 0i128;
        walk(&reduced, 0, 0, 0, 0, r as u32, &mut acc);
        let count =
            u64::try_from(acc).map_err(|_| LabError::invariant("measure", "negative inclusion-exclusion count"))?;
        Ok(Ratio::cylinder_count(count, r as u32))
    }

    pub fn measure(&self, engine: &MeasureEngine) -> Result<Ratio> {
        match engine.method {
            Method::Exhaustive => self.measure_exhaustive(engine.bit_cap),
            Method::InclusionExclusion => self.measure_inclusion_exclusion(engine.bit_cap, engine.ie_cap),
            Method::Both => {
                let a = self.measure_exhaustive(engine.bit_cap)?;
                let b = self.measure_inclusion_exclusion(engine.bit_cap, engine.ie_cap)?;
                if a != b {
                    return Err(LabError::invariant(
                        "measure",
                        format!("exhaustive {a} differs from inclusion-exclusion {b}"),
                    ));
                }
                Ok(a)
            }
        }
    }
}

fn eligible<'a>(
    op: &'a EnumOperator,
    n: u64,
    window: Window,
    stage: u64,
) -> impl Iterator<Item = &'a crate::operator::Axiom> + 'a {
    op.axioms_for(n)
        .filter(move |a| a.stage <= stage && a.fragment.within(window.low, window.high))
}

/// `{X : φ^{X_{k,l}}(n)↓}` by `stage`.
pub fn halting_event(q: &MeasureQuery<'_>) -> Event {
    Event {
        cylinders: eligible(q.op, q.n, q.window, q.stage)
            .map(|a| a.fragment.clone())
            .collect(),
    }
}

/// `{X : v ∈ φ^{X_{k,l}}(n)}` by `stage`.
pub fn output_event(q: &MeasureQuery<'_>, v: bool) -> Event {
    Event {
        cylinders: eligible(q.op, q.n, q.window, q.stage)
            .filter(|a| a.output == v)
            .map(|a| a.fragment.clone())
            .collect(),
    }
}

/// `{X : some n ∈ inputs gets both outputs}`.
pub fn multivalued_event(op: &EnumOperator, window: Window, stage: u64, inputs: &[u64]) -> Event {
    inputs.iter().fold(Event::empty(), |acc, &n| {
        let q = MeasureQuery { op, n, window, stage };
        acc.union(&output_event(&q, false).intersect(&output_event(&q, true)))
    })
}

pub fn halting_measure(q: &MeasureQuery<'_>, engine: &MeasureEngine) -> Result<Ratio> {
    halting_event(q).measure(engine)
}

pub fn output_measure(q: &MeasureQuery<'_>, v: bool, engine: &MeasureEngine) -> Result<Ratio> {
    output_event(q, v).measure(engine)
}

pub fn multivalued_measure(
    op: &EnumOperator,
    window: Window,
    stage: u64,
    inputs: &[u64],
    engine: &MeasureEngine,
) -> Result<Ratio> {
    multivalued_event(op, window, stage, inputs).measure(engine)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    /// `(k, l, μ_{k,l})` for every `k < l` in the scanned ranges.
    pub table: Vec<(u64, u64, Ratio)>,
    /// Pairs `(k, l)` where `μ_{k,l} < μ_{k+1,l}`.
    pub k_violations: Vec<(u64, u64)>,
    /// Pairs `(k, l)` where `μ_{k,l} > μ_{k,l+1}`.
    pub l_violations: Vec<(u64, u64)>,
    /// Past this `l` no window can gain an axiom.
    pub stable_from: u64,
    /// `(k, l)` at or beyond `stable_from` where `μ_{k,l} ≠ μ_k`.
    pub stabilization_violations: Vec<(u64, u64)>,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.k_violations.is_empty() && self.l_violations.is_empty() && self.stabilization_violations.is_empty()
    }
}

/// Scans `μ_{k,l}` over `k ∈ ks`, `l ∈ ls` with `k <= l`.
pub fn mu_monotonicity_check(
    op: &EnumOperator,
    n: u64,
    ks: std::ops::Range<u64>,
    ls: std::ops::Range<u64>,
    stage: u64,
    engine: &MeasureEngine,
) -> Result<MonotonicityReport> {
    let mu = |k: u64, l: Option<u64>| {
        halting_measure(
            &MeasureQuery {
                op,
                n,
                window: Window { low: k, high: l },
                stage,
            },
            engine,
        )
    };
    let stable_from = op.max_fragment_input().map_or(0, |m| m + 1);
    let mut report = MonotonicityReport {
        table: Vec::new(),
        k_violations: Vec::new(),
        l_violations: Vec::new(),
        stable_from,
        stabilization_violations: Vec::new(),
    };
    for k in ks.clone() {
        let limit = mu(k, None)?;
        for l in ls.clone().filter(|&l| l >= k) {
            let here = mu(k, Some(l))?;
            if l > k && here < mu(k + 1, Some(l))? {
                report.k_violations.push((k, l));
            }
            if here > mu(k, Some(l + 1))? {
                report.l_violations.push((k, l));
            }
            if l >= stable_from && here != limit {
                report.stabilization_violations.push((k, l));
            }
            report.table.push((k, l, here));
        }
    }
    Ok(report)
}
