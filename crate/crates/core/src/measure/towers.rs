//! Greedy tower builders, the 80% classification and the majority vote.

use serde::{Deserialize, Serialize};

use super::engine::{halting_measure, multivalued_measure, output_measure, MeasureEngine, MeasureQuery, Window};
use crate::error::{LabError, Result};
use crate::operator::EnumOperator;
use crate::ratio::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub halt: Ratio,
    pub agree: Ratio,
    pub disagree: Ratio,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            halt: Ratio::frac(9, 10),
            agree: Ratio::frac(4, 5),
            disagree: Ratio::frac(3, 5),
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("halt", &self.halt),
            ("agree", &self.agree),
            ("disagree", &self.disagree),
        ] {
            if t.is_zero() || t.is_one() || !t.is_unit_interval() {
                return Err(LabError::pre(
                    "Thresholds",
                    format!("{name} threshold {t} is not strictly inside (0, 1)"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TowerKind {
    Halting90,
    Agreement80 { value: u8 },
    Disagreement60,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    #[serde(flatten)]
    pub kind: TowerKind,
    pub floors: Vec<u64>,
    /// Floor indices whose measure hit the threshold exactly: accepted by
    /// the greedy `>=` search although the strict definition rejects them.
    pub ties: Vec<usize>,
}

impl Tower {
    pub fn windows(&self) -> impl Iterator<Item = (usize, u64, u64)> + '_ {
        self.floors.windows(2).enumerate().map(|(i, w)| (i, w[0], w[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TowerOutcome {
    Built(Tower),
    /// No boundary within the cap; `floors` holds the boundaries found.
    Failed {
        floors: Vec<u64>,
    },
}

impl TowerOutcome {
    pub fn tower(&self) -> Option<&Tower> {
        match self {
            TowerOutcome::Built(t) => Some(t),
            TowerOutcome::Failed { .. } => None,
        }
    }
}

/// Candidate widths for the next disagreement floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthRule {
    /// Widths `w, 2w, 3w, …`.
    Step(u64),
    /// Widths `1, 2, 4, 8, …`.
    Doubling,
}

impl WidthRule {
    fn widths(self) -> Box<dyn Iterator<Item = u64>> {
        match self {
            WidthRule::Step(w) => Box::new((1u64..).map_while(move |i| i.checked_mul(w))),
            WidthRule::Doubling => Box::new((0..63).map(|i| 1u64 << i)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Agreement { value: u8 },
    NoConsensus,
    DoubleConsensus { floor: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FloorReport {
    pub floor: usize,
    pub k_i: u64,
    pub k_next: u64,
    pub mu_halt: Ratio,
    pub mu_out0: Ratio,
    pub mu_out1: Ratio,
    pub mu_multi: Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "vote", rename_all = "snake_case")]
pub enum Vote {
    Value { value: u8, stage: u64 },
    Timeout,
}

/// One intermediate step of the no-consensus argument: after `t` floors of
/// a halting tower, the multivalued measure against `halt·(1 − halt^(t−1))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case1Step {
    pub t: usize,
    pub mu_multi: Ratio,
    pub bound: Ratio,
    pub meets_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaChecks {
    /// Least `j` with `halt·(1 − halt^(j−1)) > disagree`.
    pub case1_width: Option<u32>,
    pub case2_product: Ratio,
    pub case2_holds: bool,
}

pub fn lemma_checks(thr: &Thresholds) -> LemmaChecks {
    let case1_width = (1u32..=1000).find(|&j| thr.halt.clone() * thr.halt.pow(j - 1).complement() > thr.disagree);
    let case2_product = thr.agree.clone() * thr.agree.clone();
    LemmaChecks {
        case1_width,
        case2_holds: case2_product > thr.disagree,
        case2_product,
    }
}

/// Shared settings for tower searches over one operator.
#[derive(Debug, Clone)]
pub struct TowerLab<'a> {
    pub op: &'a EnumOperator,
    pub stage: u64,
    pub engine: MeasureEngine,
    pub thresholds: Thresholds,
}

impl<'a> TowerLab<'a> {
    pub fn new(op: &'a EnumOperator, stage: u64) -> Self {
        TowerLab {
            op,
            stage,
            engine: MeasureEngine::default(),
            thresholds: Thresholds::default(),
        }
    }

    fn query(&self, n: u64, window: Window) -> MeasureQuery<'a> {
        MeasureQuery {
            op: self.op,
            n,
            window,
            stage: self.stage,
        }
    }

    pub fn mu(&self, n: u64, low: u64, high: u64) -> Result<Ratio> {
        halting_measure(&self.query(n, Window::new(low, high)?), &self.engine)
    }

    /// `k_0 = k`, `k_{i+1}` the least `l <= l_cap` with `μ_{k_i,l} >= halt`.
    pub fn greedy_90(&self, n: u64, k: u64, floors: usize, l_cap: u64) -> Result<TowerOutcome> {
        self.thresholds.validate()?;
        if floors == 0 {
            return Err(LabError::pre("greedy_90_tower", "floors must be at least 1"));
        }
        let mut ks = vec![k];
        let mut ties = Vec::new();
        for i in 0..floors {
            let lo = ks[i];
            let mut found = None;
            for l in lo + 1..=l_cap {
                let m = self.mu(n, lo, l)?;
                if m >= self.thresholds.halt {
                    if m == self.thresholds.halt {
                        ties.push(i);
                    }
                    found = Some(l);
                    break;
                }
            }
            match found {
                Some(l) => ks.push(l),
                None => return Ok(TowerOutcome::Failed { floors: ks }),
            }
        }
        Ok(TowerOutcome::Built(Tower {
            kind: TowerKind::Halting90,
            floors: ks,
            ties,
        }))
    }

    pub fn floor_reports(&self, n: u64, t: &Tower) -> Result<Vec<FloorReport>> {
        t.windows()
            .map(|(floor, lo, hi)| {
                let w = Window::new(lo, hi)?;
                let q = self.query(n, w);
                Ok(FloorReport {
                    floor,
                    k_i: lo,
                    k_next: hi,
                    mu_halt: halting_measure(&q, &self.engine)?,
                    mu_out0: output_measure(&q, false, &self.engine)?,
                    mu_out1: output_measure(&q, true, &self.engine)?,
                    mu_multi: multivalued_measure(self.op, w, self.stage, &[n], &self.engine)?,
                })
            })
            .collect()
    }

    pub fn classify_80(&self, n: u64, t: &Tower) -> Result<Classification> {
        if t.kind != TowerKind::Halting90 {
            return Err(LabError::pre("classify_80", "needs a halting tower"));
        }
        let mut first: [Option<usize>; 2] = [None, None];
        for (floor, lo, hi) in t.windows() {
            let q = self.query(n, Window::new(lo, hi)?);
            for v in [false, true] {
                if first[v as usize].is_none() && output_measure(&q, v, &self.engine)? > self.thresholds.agree {
                    first[v as usize] = Some(floor);
                }
            }
            if let [Some(a), Some(b)] = first {
                return Ok(Classification::DoubleConsensus { floor: a.max(b) });
            }
        }
        Ok(match first {
            [Some(_), None] => Classification::Agreement { value: 0 },
            [None, Some(_)] => Classification::Agreement { value: 1 },
            _ => Classification::NoConsensus,
        })
    }

    /// Multivalued measure over `[k_start, k_{start+t})` for `t = 1..=j`.
    pub fn case1_profile(&self, n: u64, t: &Tower, start: usize, j: usize) -> Result<Vec<Case1Step>> {
        let halt = &self.thresholds.halt;
        (1..=j)
            .filter(|s| start + s < t.floors.len())
            .map(|s| {
                let w = Window::new(t.floors[start], t.floors[start + s])?;
                let mu_multi = multivalued_measure(self.op, w, self.stage, &[n], &self.engine)?;
                let bound = halt.clone() * halt.pow(s as u32 - 1).complement();
                Ok(Case1Step {
                    t: s,
                    meets_bound: mu_multi >= bound,
                    mu_multi,
                    bound,
                })
            })
            .collect()
    }

    /// `m_0 = m0`; `m_{i+1}` the first candidate boundary `<= cap` (per
    /// `rule`) whose window is multivalued on some input with measure above
    /// the disagreement threshold.
    pub fn greedy_60(&self, inputs: &[u64], m0: u64, floors: usize, rule: WidthRule, cap: u64) -> Result<TowerOutcome> {
        self.thresholds.validate()?;
        if floors == 0 {
            return Err(LabError::pre("greedy_60_tower", "floors must be at least 1"));
        }
        if let WidthRule::Step(0) = rule {
            return Err(LabError::pre("greedy_60_tower", "step width must be positive"));
        }
        let mut ms = vec![m0];
        for i in 0..floors {
            let lo = ms[i];
            let mut found = None;
            for w in rule.widths() {
                let Some(hi) = lo.checked_add(w).filter(|&h| h <= cap) else {
                    break;
                };
                let mu = multivalued_measure(self.op, Window::new(lo, hi)?, self.stage, inputs, &self.engine)?;
                if mu > self.thresholds.disagree {
                    found = Some(hi);
                    break;
                }
            }
            match found {
                Some(hi) => ms.push(hi),
                None => return Ok(TowerOutcome::Failed { floors: ms }),
            }
        }
        Ok(TowerOutcome::Built(Tower {
            kind: TowerKind::Disagreement60,
            floors: ms,
            ties: Vec::new(),
        }))
    }

    /// The least stage `<= stage_cap` at which some output holds on more than
    /// the agreement threshold of reals masked below `l`. Ignores
    /// `self.stage`.
    pub fn majority_vote(&self, n: u64, l: u64, stage_cap: u64) -> Result<Vote> {
        let mut stages: Vec<u64> = self
            .op
            .axioms_for(n)
            .map(|a| a.stage)
            .filter(|&s| s <= stage_cap)
            .collect();
        stages.sort_unstable();
        stages.dedup();
        for s in stages {
            let q = MeasureQuery {
                op: self.op,
                n,
                window: Window::from(l),
                stage: s,
            };
            for v in [false, true] {
                if output_measure(&q, v, &self.engine)? > self.thresholds.agree {
                    return Ok(Vote::Value {
                        value: u8::from(v),
                        stage: s,
                    });
                }
            }
        }
        Ok(Vote::Timeout)
    }
}
