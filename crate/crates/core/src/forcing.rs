//! Conditions built from finite partial oracles with dense domains.
//!
//! A condition `⟨σ, ε⟩` is a finite partial oracle `σ` whose domain fills
//! more than a `1 − ε` fraction of its length. `⟨τ, δ⟩` extends `⟨σ, ε⟩`
//! when `τ` continues `σ` entry for entry, `δ <= ε`, and every prefix of
//! `τ` from `|σ|` on keeps the `1 − ε` density.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::operator::{eval_op, EnumOperator, Outputs};
use crate::oracle::{FinitePartialOracle, OracleEntry, OracleView, PartialOracle};
use crate::prefix::Prefix;
use crate::ratio::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub sigma: FinitePartialOracle,
    pub epsilon: Ratio,
}

impl Condition {
    pub fn new(sigma: FinitePartialOracle, epsilon: Ratio) -> Result<Self> {
        let c = Condition { sigma, epsilon };
        if !is_condition(&c) {
            return Err(LabError::pre(
                "Condition::new",
                format!(
                    "domain {} of length {} is not dense above 1 - {}",
                    c.sigma.domain_size(),
                    c.sigma.length(),
                    c.epsilon
                ),
            ));
        }
        Ok(c)
    }

    pub fn length(&self) -> u64 {
        self.sigma.length()
    }
}

/// `count / n > 1 − ε`, exactly.
fn dense(count: u64, n: u64, epsilon: &Ratio) -> bool {
    n == 0 || Ratio::frac(count, n) > epsilon.complement()
}

fn epsilon_ok(e: &Ratio) -> bool {
    !e.is_zero() && e.is_unit_interval()
}

pub fn is_condition(c: &Condition) -> bool {
    epsilon_ok(&c.epsilon) && dense(c.sigma.domain_size(), c.sigma.length(), &c.epsilon)
}

/// Whether `q = ⟨τ, δ⟩` extends `p = ⟨σ, ε⟩`. The density scan includes
/// `n = |σ|`, which `p` being a condition already guarantees.
pub fn extends_condition(q: &Condition, p: &Condition) -> bool {
    if !is_condition(q) || !is_condition(p) {
        return false;
    }
    let (tau, sigma) = (&q.sigma, &p.sigma);
    if tau.length() < sigma.length() || q.epsilon > p.epsilon {
        return false;
    }
    let head: Vec<OracleEntry> = tau
        .oracle()
        .entries()
        .take_while(|e| e.input < sigma.length())
        .collect();
    if !head.iter().copied().eq(sigma.oracle().entries()) {
        return false;
    }
    let mut count = head.len() as u64;
    let mut rest = tau.oracle().entries().skip(head.len()).peekable();
    for n in sigma.length()..=tau.length() {
        // count = |dom(τ) ∩ [0, n)|
        if n > sigma.length() && rest.peek().is_some_and(|e| e.input == n - 1) {
            rest.next();
            count += 1;
        }
        if !dense(count, n, &p.epsilon) {
            return false;
        }
    }
    true
}

/// Adds an entry with delay `l_floor + 1` at each given position.
pub fn halt_late(tau: &FinitePartialOracle, positions: &[(u64, bool)], l_floor: u64) -> Result<FinitePartialOracle> {
    let delay = l_floor
        .checked_add(1)
        .ok_or_else(|| LabError::pre("halt_late", "l_floor leaves no later delay"))?;
    let mut out = tau.clone();
    for &(n, v) in positions {
        if n >= tau.length() {
            return Err(LabError::pre(
                "halt_late",
                format!("position {n} is not below length {}", tau.length()),
            ));
        }
        if tau.lookup(n).is_some() {
            return Err(LabError::pre(
                "halt_late",
                format!("position {n} is already in the domain"),
            ));
        }
        out.insert(OracleEntry::new(n, v, delay))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FOracle {
    pub oracle: FinitePartialOracle,
    pub m0: u64,
    /// Largest prefix length checked while choosing `m0`.
    pub horizon: u64,
}

/// Lengths `m0` is allowed to reach before the search gives up.
pub const MAX_M0: u64 = 1 << 20;

/// Domain size below `m` of the sparsest oracle `build_f` can produce from
/// `sigma` with cut `m0`: the mirrored positions all missing.
fn worst_count(sigma_dom: u64, sigma_len: u64, m0: u64, k: u64, i: u64, m: u64) -> u64 {
    if m <= m0 {
        return sigma_dom + m.saturating_sub(sigma_len);
    }
    // residues ≡ i in [m0, m)
    let upto = |t: u64| if t > i { (t - i).div_ceil(k) } else { 0 };
    let residues = upto(m) - upto(m0);
    sigma_dom + (m0 - sigma_len) + (m - m0) - residues
}

fn horizon_of(factor: u64, m0: u64, k: u64) -> u64 {
    factor.saturating_mul(m0.max(k))
}

/// Copies `sigma` below its length, fills `[|σ|, m0)` and the non-residue
/// positions from `a` with delay 0, and mirrors `x` at `(m − i) / k` onto
/// each position `m >= m0` with `m ≡ i (mod k)`. The result has length
/// `|a|`. `m0` is the least cut keeping every prefix from `|σ|` up to
/// `horizon_factor · max(m0, k)` dense even when `x` is empty.
pub fn build_f(
    x: &PartialOracle,
    sigma: &FinitePartialOracle,
    epsilon: &Ratio,
    k: u64,
    i: u64,
    a: &Prefix,
    horizon_factor: u64,
) -> Result<FOracle> {
    if k == 0 || i >= k {
        return Err(LabError::pre(
            "build_F",
            format!("need 0 <= i < k, got k = {k}, i = {i}"),
        ));
    }
    if !epsilon_ok(epsilon) || Ratio::frac(1, k) >= *epsilon {
        return Err(LabError::pre(
            "build_F",
            format!("need 1/k < epsilon <= 1, got k = {k}, epsilon = {epsilon}"),
        ));
    }
    if horizon_factor == 0 {
        return Err(LabError::pre("build_F", "horizon factor must be positive"));
    }
    let len = a.len() as u64;
    let (sl, sd) = (sigma.length(), sigma.domain_size());
    if len < sl {
        return Err(LabError::pre(
            "build_F",
            format!("|a| = {len} is shorter than |sigma| = {sl}"),
        ));
    }
    let m0 = (sl..=MAX_M0)
        .find(|&m0| {
            let top = horizon_of(horizon_factor, m0, k).max(sl);
            (sl.max(1)..=top).all(|m| dense(worst_count(sd, sl, m0, k, i, m), m, epsilon))
        })
        .ok_or_else(|| LabError::cap("build_F", "m0", MAX_M0 as usize, MAX_M0 as usize + 1))?;
    let mut out = FinitePartialOracle::new(len, sigma.oracle().clone())?;
    for m in sl..len {
        if m >= m0 && m % k == i {
            if let Some((v, l)) = x.lookup((m - i) / k) {
                out.insert(OracleEntry::new(m, v, l))?;
            }
        } else {
            out.insert(OracleEntry::new(m, a.bit(m as usize), 0))?;
        }
    }
    Ok(FOracle {
        oracle: out,
        m0,
        horizon: horizon_of(horizon_factor, m0, k).max(sl),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiFound {
    pub value: u8,
    pub outputs: Vec<u8>,
    /// The partial oracle found: `σ` plus the entries of `f` it used.
    pub y: FinitePartialOracle,
}

impl PsiFound {
    /// Fills every position of `[|σ|, |Y|)` outside `dom(Y)` from `values`
    /// with delay `l_floor + 1`, giving a condition below `p`.
    pub fn pad(&self, p: &Condition, values: &Prefix, l_floor: u64) -> Result<Condition> {
        let holes: Vec<(u64, bool)> = (p.length()..self.y.length())
            .filter(|&m| self.y.lookup(m).is_none())
            .map(|m| {
                values
                    .get(m as usize)
                    .map(|v| (m, v))
                    .ok_or_else(|| LabError::pre("psi pad", format!("no value supplied for position {m}")))
            })
            .collect::<Result<_>>()?;
        Condition::new(halt_late(&self.y, &holes, l_floor)?, p.epsilon.clone())
    }
}

/// The first finite `Y` (by domain size, then lexicographically by sorted
/// domain) with `Y ↾ |σ| = σ`, `dom(Y) ⊆ dom(f)`, `Y` agreeing with `f`, the
/// new domain below `length_cap`, and `op` halting on `n` by `stage_cap`.
pub fn psi_search(
    op: &EnumOperator,
    p: &Condition,
    f: &PartialOracle,
    n: u64,
    length_cap: u64,
    stage_cap: u64,
) -> Result<Option<PsiFound>> {
    let sigma = &p.sigma;
    let sl = sigma.length();
    if !sigma
        .oracle()
        .entries()
        .all(|e| f.lookup(e.input).is_some_and(|(v, _)| v == e.value))
    {
        return Ok(None);
    }
    let mut best: Option<Vec<u64>> = None;
    'axioms: for a in op.axioms_for(n).filter(|a| a.stage <= stage_cap) {
        let mut need = Vec::new();
        for (m, v) in a.fragment.iter() {
            let src = if m < sl { sigma.lookup(m) } else { f.lookup(m) };
            match src {
                Some((w, l)) if w == v && l <= stage_cap => {}
                _ => continue 'axioms,
            }
            if m >= sl {
                if m >= length_cap {
                    continue 'axioms;
                }
                need.push(m);
            }
        }
        // fragment inputs come sorted
        if best.as_ref().is_none_or(|b| (need.len(), &need) < (b.len(), b)) {
            best = Some(need);
        }
    }
    let Some(dom) = best else { return Ok(None) };
    let y = extend_with(sigma, f, &dom)?;
    let outputs = eval_op(op, &y, n, stage_cap);
    let value = outputs
        .first()
        .ok_or_else(|| LabError::invariant("psi_search", "chosen domain does not halt"))?;
    Ok(Some(PsiFound {
        value: u8::from(value),
        outputs: outputs_bits(outputs),
        y,
    }))
}

fn outputs_bits(o: Outputs) -> Vec<u8> {
    o.iter().map(u8::from).collect()
}

/// `σ` plus the entries of `f` at `dom`, with length just past the largest.
fn extend_with(sigma: &FinitePartialOracle, f: &PartialOracle, dom: &[u64]) -> Result<FinitePartialOracle> {
    let len = dom.iter().map(|&m| m + 1).max().unwrap_or(0).max(sigma.length());
    let mut y = FinitePartialOracle::new(len, sigma.oracle().clone())?;
    for &m in dom {
        let (v, l) = f.lookup(m).expect("domain drawn from f");
        y.insert(OracleEntry::new(m, v, l))?;
    }
    Ok(y)
}

/// A dense set of conditions, met by extending a condition into it.
pub trait DenseSet {
    fn name(&self) -> String;
    /// An extension of `p` inside the set, or `None` if this decider
    /// cannot find one within its caps.
    fn meet(&self, p: &Condition) -> Result<Option<Condition>>;
}

/// Conditions of length at least `length`; holes are filled late from `values`.
pub struct LengthAtLeast<'a> {
    pub length: u64,
    pub values: &'a Prefix,
    pub l_floor: u64,
}

impl DenseSet for LengthAtLeast<'_> {
    fn name(&self) -> String {
        format!("length>={}", self.length)
    }

    fn meet(&self, p: &Condition) -> Result<Option<Condition>> {
        if p.length() >= self.length {
            return Ok(Some(p.clone()));
        }
        let sigma = FinitePartialOracle::new(self.length, p.sigma.oracle().clone())?;
        let holes: Vec<(u64, bool)> = (p.length()..self.length)
            .map(|m| {
                self.values
                    .get(m as usize)
                    .map(|v| (m, v))
                    .ok_or_else(|| LabError::pre("LengthAtLeast", format!("no value supplied for position {m}")))
            })
            .collect::<Result<_>>()?;
        Ok(Some(Condition::new(
            halt_late(&sigma, &holes, self.l_floor)?,
            p.epsilon.clone(),
        )?))
    }
}

/// Conditions forcing `op` to halt on `n` through a sub-oracle of `f`.
pub struct ForceHalt<'a> {
    pub op: &'a EnumOperator,
    pub n: u64,
    pub f: &'a PartialOracle,
    pub values: &'a Prefix,
    pub length_cap: u64,
    pub stage_cap: u64,
}

impl DenseSet for ForceHalt<'_> {
    fn name(&self) -> String {
        format!("halt({})", self.n)
    }

    fn meet(&self, p: &Condition) -> Result<Option<Condition>> {
        match psi_search(self.op, p, self.f, self.n, self.length_cap, self.stage_cap)? {
            Some(hit) => Ok(Some(hit.pad(p, self.values, self.stage_cap)?)),
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeetStep {
    pub set: String,
    pub met: bool,
    pub condition: Condition,
}

/// Meets each set in turn, keeping the current condition when one fails.
pub fn meet_in_order(start: &Condition, sets: &[&dyn DenseSet]) -> Result<Vec<MeetStep>> {
    let mut cur = start.clone();
    let mut steps = Vec::with_capacity(sets.len());
    for d in sets {
        let next = d.meet(&cur)?;
        if let Some(q) = &next {
            if !extends_condition(q, &cur) {
                return Err(LabError::invariant(
                    "meet_in_order",
                    format!("{} left the cone below the condition", d.name()),
                ));
            }
        }
        let met = next.is_some();
        if let Some(q) = next {
            cur = q;
        }
        steps.push(MeetStep {
            set: d.name(),
            met,
            condition: cur.clone(),
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::row_mod_full;
    use crate::operator::{catalog, Axiom, Fragment};
    use crate::oracle::UNBOUNDED;
    use proptest::prelude::*;

    fn fpo(len: u64, dom: &[u64]) -> FinitePartialOracle {
        FinitePartialOracle::new(
            len,
            PartialOracle::from_entries(dom.iter().map(|&n| OracleEntry::new(n, false, 0))).unwrap(),
        )
        .unwrap()
    }

    fn cond(len: u64, dom: &[u64], e: Ratio) -> Condition {
        Condition {
            sigma: fpo(len, dom),
            epsilon: e,
        }
    }

    #[test]
    fn condition_examples() {
        let half = Ratio::frac(1, 2);
        assert!(is_condition(&cond(4, &[0, 1, 3], half.clone())));
        assert!(!is_condition(&cond(4, &[0], half.clone())));
        assert!(is_condition(&cond(0, &[], Ratio::frac(1, 100))));
        assert!(!is_condition(&cond(0, &[], Ratio::zero())));
        assert!(Condition::new(fpo(4, &[0]), half).is_err());
    }

    #[test]
    fn extension_examples() {
        let half = Ratio::frac(1, 2);
        let p = cond(4, &[0, 1, 3], half.clone());
        assert!(extends_condition(&p, &p));
        assert!(!extends_condition(&cond(8, &[0, 1, 3], half.clone()), &p));
        assert!(extends_condition(&cond(8, &[0, 1, 3, 4, 5, 6, 7], half.clone()), &p));
        // a thin stretch in the middle breaks the scan although the end is dense
        assert!(!extends_condition(
            &cond(12, &[0, 1, 3, 8, 9, 10, 11], half.clone()),
            &p
        ));
        // a larger epsilon never extends
        assert!(!extends_condition(&cond(4, &[0, 1, 3], Ratio::frac(3, 4)), &p));
        // changing a delay under |σ| breaks the triple-for-triple match
        let mut moved = fpo(4, &[0, 1]);
        moved.insert(OracleEntry::new(3, false, 5)).unwrap();
        assert!(!extends_condition(
            &Condition {
                sigma: moved,
                epsilon: half
            },
            &p
        ));
    }

    #[test]
    fn halt_late_examples() {
        let t = fpo(8, &[0, 1]);
        let out = halt_late(&t, &[(5, true)], 10).unwrap();
        assert_eq!(out.lookup(5), Some((true, 11)));
        assert_eq!(halt_late(&t, &[], 10).unwrap(), t);
        assert!(halt_late(&t, &[(1, true)], 10).is_err());
        assert!(halt_late(&t, &[(8, true)], 10).is_err());
        assert!(halt_late(&t, &[(2, true)], u64::MAX).is_err());
    }

    #[test]
    fn build_f_empty_row() {
        let a = Prefix::zeros(60);
        let out = build_f(
            &PartialOracle::new(),
            &FinitePartialOracle::empty(0),
            &Ratio::frac(1, 2),
            3,
            1,
            &a,
            4,
        )
        .unwrap();
        // at m0 = 1 the prefix of length 2 holds only position 0
        assert_eq!(out.m0, 2);
        for m in 0..60u64 {
            let expect = m < out.m0 || m % 3 != 1;
            assert_eq!(out.oracle.lookup(m).is_some(), expect, "position {m}");
        }
        for m in out.m0..=60 {
            let c = Condition {
                sigma: out.oracle.restrict(m).unwrap(),
                epsilon: Ratio::frac(1, 2),
            };
            assert!(is_condition(&c), "m = {m}");
        }
    }

    #[test]
    fn build_f_total_row_recombines() {
        let a = Prefix::new((0..90).map(|m| (m * 7 + m / 5) % 3 == 0).collect());
        let row = row_mod_full(&a, 3, 2).unwrap();
        let x = PartialOracle::total(&row).with_delays(|n| n % 4);
        let sigma = fpo(5, &[0, 1, 2, 4]);
        let sigma = FinitePartialOracle::new(
            5,
            PartialOracle::from_entries(
                sigma
                    .oracle()
                    .entries()
                    .map(|e| OracleEntry::new(e.input, a.bit(e.input as usize), 0)),
            )
            .unwrap(),
        )
        .unwrap();
        let out = build_f(&x, &sigma, &Ratio::frac(1, 2), 3, 2, &a, 4).unwrap();
        for m in 5..90u64 {
            let (v, l) = out.oracle.lookup(m).unwrap();
            assert_eq!(v, a.bit(m as usize));
            if m >= out.m0 && m % 3 == 2 {
                assert_eq!(l, (m - 2) / 3 % 4);
            } else {
                assert_eq!(l, 0);
            }
        }
        assert_eq!(out.oracle.lookup(3), None);
    }

    #[test]
    fn build_f_preconditions() {
        let a = Prefix::zeros(8);
        let none = FinitePartialOracle::empty(0);
        assert!(build_f(&PartialOracle::new(), &none, &Ratio::frac(1, 4), 2, 0, &a, 4).is_err());
        assert!(build_f(&PartialOracle::new(), &none, &Ratio::frac(1, 2), 2, 0, &a, 4).is_err());
        assert!(build_f(&PartialOracle::new(), &fpo(10, &[]), &Ratio::frac(1, 2), 3, 0, &a, 4).is_err());
    }

    fn total(bits: &str) -> PartialOracle {
        PartialOracle::total(&Prefix::from_bitstring(bits).unwrap())
    }

    #[test]
    fn psi_examples() {
        let p = cond(0, &[], Ratio::frac(1, 2));
        let f = total("0110");
        let hit = psi_search(&catalog::constant(0, true, 0), &p, &f, 0, 8, 5)
            .unwrap()
            .unwrap();
        assert_eq!((hit.value, hit.y.length(), hit.y.domain_size()), (1, 0, 0));

        let sparse = PartialOracle::from_entries([OracleEntry::new(0, true, 0)]).unwrap();
        assert_eq!(
            psi_search(&catalog::single_bit(0, 2), &p, &sparse, 0, 8, 5).unwrap(),
            None
        );

        let op = EnumOperator::new(vec![Axiom::new(
            Fragment::from_pairs([(1, true), (2, true)]).unwrap(),
            0,
            false,
            0,
        )]);
        let hit = psi_search(&op, &p, &f, 0, 8, 5).unwrap().unwrap();
        assert_eq!(hit.value, 0);
        assert_eq!(hit.y.oracle().domain().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(eval_op(&op, &f, 0, 5).first(), Some(false));
        assert_eq!(psi_search(&op, &p, &f, 0, 2, 5).unwrap(), None);
    }

    #[test]
    fn psi_prefers_small_then_lex_domains() {
        let f = total("11111111");
        let op = EnumOperator::new(vec![
            Axiom::new(Fragment::from_pairs([(2, true), (6, true)]).unwrap(), 0, true, 0),
            Axiom::new(Fragment::from_pairs([(3, true), (4, true)]).unwrap(), 0, false, 0),
            Axiom::new(
                Fragment::from_pairs([(1, true), (2, true), (3, true)]).unwrap(),
                0,
                false,
                0,
            ),
        ]);
        let hit = psi_search(&op, &cond(0, &[], Ratio::one()), &f, 0, 8, 0)
            .unwrap()
            .unwrap();
        assert_eq!(hit.y.oracle().domain().collect::<Vec<_>>(), vec![2, 6]);
        assert_eq!(hit.value, 1);
    }

    #[test]
    fn psi_respects_delays_and_sigma() {
        let f = PartialOracle::from_entries([OracleEntry::new(0, true, 0), OracleEntry::new(3, true, 9)]).unwrap();
        let op = catalog::single_bit(0, 3);
        let p = cond(0, &[], Ratio::one());
        assert_eq!(psi_search(&op, &p, &f, 0, 8, 8).unwrap(), None);
        assert!(psi_search(&op, &p, &f, 0, 8, 9).unwrap().is_some());
        // σ disagreeing with f finds nothing
        let p = Condition {
            sigma: fpo(1, &[0]),
            epsilon: Ratio::one(),
        };
        assert_eq!(
            psi_search(&catalog::constant(0, true, 0), &p, &f, 0, 8, 9).unwrap(),
            None
        );
    }

    #[test]
    fn meet_in_order_examples() {
        let values = Prefix::zeros(32);
        let f = PartialOracle::total(&values);
        let op = catalog::single_bit(0, 20).union(&catalog::bit_copy(1, 9));
        let start = cond(2, &[0, 1], Ratio::frac(1, 3));
        let len = LengthAtLeast {
            length: 6,
            values: &values,
            l_floor: 0,
        };
        let halt0 = ForceHalt {
            op: &op,
            n: 0,
            f: &f,
            values: &values,
            length_cap: 32,
            stage_cap: 4,
        };
        let halt1 = ForceHalt { n: 1, ..halt0 };
        let steps = meet_in_order(&start, &[&len, &halt0, &halt1]).unwrap();
        assert_eq!(steps.iter().map(|s| s.met).collect::<Vec<_>>(), vec![true, false, true]);
        let last = &steps[2].condition;
        assert_eq!(last.length(), 10);
        assert_eq!(last.sigma.lookup(9), Some((false, 0)));
        assert_eq!(last.sigma.lookup(7), Some((false, 5)));
        assert!(extends_condition(last, &start));
    }

    fn arb_cond() -> impl Strategy<Value = Condition> {
        (0u64..12, any::<u16>(), 1u64..5).prop_filter_map("dense", |(len, mask, d)| {
            let dom: Vec<u64> = (0..len).filter(|n| mask >> n & 1 == 1).collect();
            let c = cond(len, &dom, Ratio::frac(1, d));
            is_condition(&c).then_some(c)
        })
    }

    fn extend(p: &Condition, extra: u64, mask: u16, shrink: u64) -> Condition {
        let len = p.length() + extra;
        let mut dom: Vec<u64> = p.sigma.oracle().domain().collect();
        dom.extend((p.length()..len).filter(|n| mask >> (n - p.length()) & 1 == 1));
        let e = p.epsilon.clone() * Ratio::frac(1, shrink);
        cond(
            len,
            &dom,
            if is_condition(&cond(len, &dom, e.clone())) {
                e
            } else {
                p.epsilon.clone()
            },
        )
    }

    proptest! {
        #[test]
        fn extension_is_a_preorder(p in arb_cond(), e1 in 0u64..6, m1 in any::<u16>(), s1 in 1u64..3, e2 in 0u64..6, m2 in any::<u16>(), s2 in 1u64..3) {
            prop_assert!(extends_condition(&p, &p));
            let q = extend(&p, e1, m1, s1);
            let r = extend(&q, e2, m2, s2);
            if extends_condition(&q, &p) && extends_condition(&r, &q) {
                prop_assert!(extends_condition(&r, &p));
            }
            if extends_condition(&q, &p) && extends_condition(&p, &q) {
                prop_assert_eq!(&q, &p);
            }
        }

        #[test]
        fn psi_hits_pad_below_their_condition(p in arb_cond(), fbits in any::<u32>(), fmask in any::<u32>(), axioms in proptest::collection::vec((proptest::collection::btree_map(0u64..20, any::<bool>(), 0..3), any::<bool>(), 0u64..3), 0..6)) {
            let values = Prefix::new((0..24).map(|n| fbits >> n & 1 == 1).collect());
            // f carries σ's entries and some of the rest
            let mut f = PartialOracle::new();
            for n in 0..24u64 {
                if let Some((v, l)) = p.sigma.lookup(n) {
                    f.insert(OracleEntry::new(n, v, l)).unwrap();
                } else if n >= p.length() && fmask >> n & 1 == 1 {
                    f.insert(OracleEntry::new(n, values.bit(n as usize), n % 3)).unwrap();
                }
            }
            let op = EnumOperator::new(axioms.into_iter().map(|(m, o, s)| Axiom::new(Fragment::from_pairs(m).unwrap(), 0, o, s)).collect());
            if let Some(hit) = psi_search(&op, &p, &f, 0, 24, 2).unwrap() {
                prop_assert!(Outputs::of(hit.value == 1).is_subset(eval_op(&op, &f, 0, 2)));
                let q = hit.pad(&p, &values, 2).unwrap();
                prop_assert!(extends_condition(&q, &p));
            } else {
                // brute force agrees: no sub-oracle of f above σ halts
                let free: Vec<u64> = f.domain().filter(|&n| n >= p.length()).collect();
                for bits in 0u32..1 << free.len() {
                    let dom: Vec<u64> = free.iter().enumerate().filter(|(j, _)| bits >> j & 1 == 1).map(|(_, &n)| n).collect();
                    let y = extend_with(&p.sigma, &f, &dom).unwrap();
                    prop_assert!(eval_op(&op, &y, 0, 2).is_empty());
                }
            }
        }
    }

    #[test]
    fn psi_matches_brute_force_order() {
        let f = PartialOracle::total(&Prefix::from_bitstring("1011011101").unwrap());
        let mut rng_state = 7u64;
        for _ in 0..200 {
            let mut axioms = Vec::new();
            for _ in 0..4 {
                rng_state = rng_state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let pairs: Vec<(u64, bool)> = (0..3)
                    .map(|j| ((rng_state >> (8 * j)) % 10, rng_state >> (40 + j) & 1 == 1))
                    .collect();
                if let Ok(fr) = Fragment::from_pairs(pairs) {
                    axioms.push(Axiom::new(fr, 0, rng_state >> 50 & 1 == 1, 0));
                }
            }
            let op = EnumOperator::new(axioms);
            let p = cond(0, &[], Ratio::one());
            let got = psi_search(&op, &p, &f, 0, 10, UNBOUNDED)
                .unwrap()
                .map(|h| h.y.oracle().domain().collect::<Vec<_>>());
            let mut doms: Vec<Vec<u64>> = (0u32..1 << 10)
                .map(|b| (0..10u64).filter(|&j| b >> j & 1 == 1).collect())
                .collect();
            doms.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            let want = doms
                .into_iter()
                .find(|d| !eval_op(&op, &extend_with(&p.sigma, &f, d).unwrap(), 0, UNBOUNDED).is_empty());
            assert_eq!(got, want);
        }
    }
}
