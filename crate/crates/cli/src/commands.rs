use anyhow::Result;
use glab_core::coding::{decode_r_vote, encode_r, encode_rtilde, generic_to_cofinite, Decoded};
use glab_core::construction::{
    bad_strings, build_wiggle_tree, default_selector, diagonal_prune, run_marker_construction, CeSchedule,
    MarkerConfig, TreeBound,
};
use glab_core::density::{density_at, gap_census, last_complete_block, verify_gap_density_bounds};
use glab_core::forcing::{build_f, extends_condition, is_condition, psi_search, Condition};
use glab_core::measure::{
    build_u_chain, halting_measure, lemma_checks, mu_monotonicity_check, multivalued_measure, output_measure,
    Classification, MeasureEngine, MeasureQuery, Method, Thresholds, TowerKind, TowerLab, TowerOutcome, Vote, Window,
};
use glab_core::{FinitePartialOracle, LabError, Prefix, Ratio, UNBOUNDED};
use serde_json::json;

use crate::cli::*;
use crate::inputs::{bits, operator, partial_oracle, read_json, read_text};
use crate::output::{Report, Table};

pub struct Ctx {
    pub engine: MeasureEngine,
    pub thresholds: Thresholds,
}

impl Ctx {
    pub fn new(c: &Common) -> Result<Self> {
        let thresholds = Thresholds {
            halt: c.threshold_halt.clone(),
            agree: c.threshold_agree.clone(),
            disagree: c.threshold_disagree.clone(),
        };
        thresholds.validate()?;
        Ok(Ctx {
            engine: MeasureEngine::default().with_bit_cap(c.bit_cap),
            thresholds,
        })
    }
}

pub fn run(cmd: &Command, ctx: &Ctx) -> Result<Report> {
    match cmd {
        Command::Density(a) => density(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::MarkerRun(a) => marker_run(a),
        Command::WiggleTree(a) => wiggle(a),
        Command::BadStrings(a) => bad(a),
        Command::Measure(a) => measure(a, ctx),
        Command::Tower(a) => tower(a, ctx),
        Command::Vote(a) => vote(a, ctx),
        Command::Forcing(a) => forcing(&a.action, ctx),
    }
}

fn pre(op: &'static str, detail: impl Into<String>) -> anyhow::Error {
    LabError::Precondition {
        op,
        detail: detail.into(),
    }
    .into()
}

fn stage(s: Option<u64>) -> u64 {
    s.unwrap_or(UNBOUNDED)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn joined<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn density(a: &DensityArgs) -> Result<Report> {
    let text = read_text(&a.input)?;
    let text = text.trim_end();
    let p = match a.hex_len {
        Some(len) => Prefix::from_hex(len, text)?,
        None => Prefix::from_bitstring(text)?,
    };
    let top = last_complete_block(p.len()).ok_or_else(|| pre("density", "prefix holds no complete block"))?;
    let es: Vec<u32> = match a.e {
        Some(e) => vec![e],
        None => (1..=top).collect(),
    };
    let (mut rows, mut skipped) = (Vec::new(), Vec::new());
    let mut t = Table::new(&[
        "e",
        "j",
        "gapped_blocks",
        "forward_violations",
        "reverse_violations",
        "holds",
    ]);
    for e in es {
        let census = gap_census(&p, e, top)?;
        let j =
            a.j.unwrap_or_else(|| census.last().copied().unwrap_or(0).max(e.saturating_sub(1)));
        if a.e.is_none() && (j + e + 1 >= usize::BITS || 1usize << (j + e + 1) > p.len()) {
            skipped.push(e);
            continue;
        }
        let rep = verify_gap_density_bounds(&p, e, j)?;
        t.push(vec![
            e.to_string(),
            j.to_string(),
            joined(&census),
            joined(&rep.forward_violations),
            joined(&rep.reverse_violations),
            rep.holds().to_string(),
        ]);
        rows.push(json!({ "e": e, "census": census, "holds": rep.holds(), "report": rep }));
    }
    let body = json!({
        "length": p.len(),
        "last_complete_block": top,
        "density": density_at(&p, p.len())?,
        "exponents": rows,
        "skipped_exponents": skipped,
    });
    Report::new(&body, t)
}

fn encode(a: &EncodeArgs) -> Result<Report> {
    let x = bits(&a.source)?;
    let y = match a.map {
        CodingMap::R => encode_r(&x, a.out_len)?,
        CodingMap::Rtilde => encode_rtilde(&x, a.out_len)?,
    };
    let mut t = Table::new(&["position", "bit"]);
    for (i, b) in y.bits().iter().enumerate() {
        t.push(vec![i.to_string(), u8::from(*b).to_string()]);
    }
    Report::new(&json!({ "source": x.to_string(), "image": y.to_string() }), t)
}

fn decoded_str(d: Decoded) -> String {
    match d {
        Decoded::Value(v) => u8::from(v).to_string(),
        Decoded::Undetermined => "undetermined".into(),
        Decoded::Conflict => "conflict".into(),
    }
}

fn decode(a: &DecodeArgs) -> Result<Report> {
    let y = partial_oracle(&a.image)?;
    let out: Vec<Decoded> = (0..a.bits)
        .map(|n| match a.map {
            CodingMap::R => decode_r_vote(&y, n, a.witness_cap),
            CodingMap::Rtilde => generic_to_cofinite(&y, n),
        })
        .collect();
    let mut t = Table::new(&["bit", "decoded"]);
    for (n, d) in out.iter().enumerate() {
        t.push(vec![n.to_string(), decoded_str(*d)]);
    }
    Report::new(&json!({ "bits": out }), t)
}

fn marker_run(a: &MarkerArgs) -> Result<Report> {
    let schedules: Vec<CeSchedule> = match &a.schedules {
        Some(p) => read_json(p)?,
        None => Vec::new(),
    };
    let config = MarkerConfig {
        stages: a.stages,
        depth: a.depth.unwrap_or(a.stages),
        tree_bound: match a.tree_bound {
            TreeBoundArg::Stage => TreeBound::Stage,
            TreeBoundArg::Strategy => TreeBound::Strategy,
        },
    };
    let trace = run_marker_construction(&schedules, config)?;
    let mut t = Table::new(&["kind", "e", "stage", "block", "node"]);
    for m in &trace.markers {
        t.push(vec![
            "marker".into(),
            m.e.to_string(),
            m.stage.to_string(),
            String::new(),
            m.node.to_string(),
        ]);
    }
    for z in &trace.zones {
        t.push(vec![
            "zone".into(),
            z.e.to_string(),
            String::new(),
            z.block.to_string(),
            z.node.to_string(),
        ]);
    }
    Report::new(&trace, t)
}

fn wiggle(a: &WiggleArgs) -> Result<Report> {
    let w = build_wiggle_tree(a.blocks, default_selector)?;
    let mut t = Table::new(&["path"]);
    let body = match a.prune {
        None => {
            for l in &w.leaves {
                t.push(vec![l.to_string()]);
            }
            json!({ "tree": w })
        }
        Some((n_i, v, s_i)) => {
            let p = diagonal_prune(&w, Some((n_i, v)), s_i)?;
            for l in p.paths() {
                t.push(vec![l.to_string()]);
            }
            json!({
                "tree": w,
                "cut": p.cut().map(|(n, v, s)| json!({ "n_i": n, "v": u8::from(v), "s_i": s })),
                "paths": p.paths(),
                "min_pair_agreement": p.min_pair_agreement_profile(),
            })
        }
    };
    Report::new(&body, t)
}

fn bad(a: &BadStringsArgs) -> Result<Report> {
    let prefix = bits(&a.a)?;
    let set = bad_strings(&prefix, a.max_len)?;
    let codes: Vec<usize> = set.members().collect();
    let mut t = Table::new(&["code"]);
    for c in &codes {
        t.push(vec![c.to_string()]);
    }
    Report::new(
        &json!({ "a": prefix.to_string(), "max_len": a.max_len, "codes": codes }),
        t,
    )
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Exhaustive => Method::Exhaustive,
        MethodArg::InclusionExclusion => Method::InclusionExclusion,
        MethodArg::Both => Method::Both,
    }
}

fn measure(a: &MeasureArgs, ctx: &Ctx) -> Result<Report> {
    let op = operator(&a.source, a.n)?;
    let engine = ctx.engine.with_method(method(a.method));
    let s = stage(a.stages);
    let window = match a.high {
        Some(h) => Window::new(a.low, h)?,
        None => Window::from(a.low),
    };
    let q = MeasureQuery {
        op: &op,
        n: a.n,
        window,
        stage: s,
    };
    let single = |mu: Ratio| {
        let mut t = Table::new(&["n", "low", "high", "measure"]);
        t.push(vec![a.n.to_string(), a.low.to_string(), opt(a.high), mu.to_string()]);
        Report::new(
            &json!({ "n": a.n, "window": window, "stage": a.stages, "measure": mu }),
            t,
        )
    };
    match a.kind {
        MeasureKind::Halting => single(halting_measure(&q, &engine)?),
        MeasureKind::Output0 => single(output_measure(&q, false, &engine)?),
        MeasureKind::Output1 => single(output_measure(&q, true, &engine)?),
        MeasureKind::Multivalued => single(multivalued_measure(&op, window, s, &[a.n], &engine)?),
        MeasureKind::UChain => {
            let c = build_u_chain(&op, a.n, a.low, a.depth, s, engine.bit_cap)?;
            let mut t = Table::new(&["i", "count", "measure"]);
            for l in &c.levels {
                t.push(vec![l.i.to_string(), l.count.to_string(), l.measure.to_string()]);
            }
            Report::new(&c, t)
        }
        MeasureKind::Monotonicity => {
            let h = a.high.ok_or_else(|| pre("monotonicity", "needs --high"))?;
            let rep = mu_monotonicity_check(&op, a.n, 0..h, 0..h + 1, s, &engine)?;
            let mut t = Table::new(&["k", "l", "measure"]);
            for (k, l, mu) in &rep.table {
                t.push(vec![k.to_string(), l.to_string(), mu.to_string()]);
            }
            Report::new(&json!({ "holds": rep.holds(), "report": rep }), t)
        }
    }
}

fn lab<'a>(op: &'a glab_core::EnumOperator, stage: u64, ctx: &Ctx) -> TowerLab<'a> {
    TowerLab {
        op,
        stage,
        engine: ctx.engine,
        thresholds: ctx.thresholds.clone(),
    }
}

fn class_str(c: &Classification) -> String {
    match c {
        Classification::Agreement { value } => format!("agreement({value})"),
        Classification::NoConsensus => "no_consensus".into(),
        Classification::DoubleConsensus { floor } => format!("double_consensus({floor})"),
    }
}

fn tower(a: &TowerArgs, ctx: &Ctx) -> Result<Report> {
    let op = operator(&a.source, a.n)?;
    let lab = lab(&op, stage(a.stages), ctx);
    let lemmas = lemma_checks(&ctx.thresholds);
    match a.kind {
        TowerKindArg::Halting90 => {
            let outcome = lab.greedy_90(a.n, a.k, a.floors, a.cap)?;
            let mut t = Table::new(&[
                "floor",
                "k_i",
                "k_next",
                "mu_halt",
                "mu_out0",
                "mu_out1",
                "mu_multi",
                "classification",
            ]);
            let body = match &outcome {
                TowerOutcome::Built(tw) => {
                    let reports = lab.floor_reports(a.n, tw)?;
                    let class = lab.classify_80(a.n, tw)?;
                    for r in &reports {
                        t.push(vec![
                            r.floor.to_string(),
                            r.k_i.to_string(),
                            r.k_next.to_string(),
                            r.mu_halt.to_string(),
                            r.mu_out0.to_string(),
                            r.mu_out1.to_string(),
                            r.mu_multi.to_string(),
                            class_str(&class),
                        ]);
                    }
                    json!({ "tower": outcome, "floors": reports, "classification": class, "lemmas": lemmas })
                }
                TowerOutcome::Failed { floors } => {
                    for (i, k) in floors.iter().enumerate() {
                        let mut row = vec![String::new(); 8];
                        row[0] = i.to_string();
                        row[1] = k.to_string();
                        row[7] = "failed".into();
                        t.push(row);
                    }
                    json!({ "tower": outcome, "lemmas": lemmas })
                }
            };
            Report::new(&body, t)
        }
        TowerKindArg::Disagreement60 => {
            let inputs = if a.inputs.is_empty() {
                vec![a.n]
            } else {
                a.inputs.clone()
            };
            let outcome = lab.greedy_60(&inputs, a.k, a.floors, a.width, a.cap)?;
            let mut t = Table::new(&["floor", "m_i", "m_next", "mu_multi", "outcome"]);
            match &outcome {
                TowerOutcome::Built(tw) => {
                    debug_assert_eq!(tw.kind, TowerKind::Disagreement60);
                    for (i, lo, hi) in tw.windows() {
                        let mu = multivalued_measure(&op, Window::new(lo, hi)?, lab.stage, &inputs, &lab.engine)?;
                        t.push(vec![
                            i.to_string(),
                            lo.to_string(),
                            hi.to_string(),
                            mu.to_string(),
                            "built".into(),
                        ]);
                    }
                }
                TowerOutcome::Failed { floors } => {
                    for (i, m) in floors.iter().enumerate() {
                        t.push(vec![
                            i.to_string(),
                            m.to_string(),
                            String::new(),
                            String::new(),
                            "failed".into(),
                        ]);
                    }
                }
            }
            Report::new(&json!({ "inputs": inputs, "tower": outcome, "lemmas": lemmas }), t)
        }
    }
}

fn vote(a: &VoteArgs, ctx: &Ctx) -> Result<Report> {
    let op = operator(&a.source, a.n)?;
    let v = lab(&op, UNBOUNDED, ctx).majority_vote(a.n, a.l, a.stage_cap)?;
    let mut t = Table::new(&["vote", "value", "stage"]);
    t.push(match v {
        Vote::Value { value, stage } => vec!["value".into(), value.to_string(), stage.to_string()],
        Vote::Timeout => vec!["timeout".into(), String::new(), String::new()],
    });
    Report::new(&json!({ "n": a.n, "l": a.l, "stage_cap": a.stage_cap, "vote": v }), t)
}

fn forcing(a: &ForcingAction, _ctx: &Ctx) -> Result<Report> {
    match a {
        ForcingAction::Check { p, q } => {
            let (p, q): (Condition, Condition) = (read_json(p)?, read_json(q)?);
            let (pc, qc, ext) = (is_condition(&p), is_condition(&q), extends_condition(&q, &p));
            let mut t = Table::new(&["p_is_condition", "q_is_condition", "q_extends_p"]);
            t.push(vec![pc.to_string(), qc.to_string(), ext.to_string()]);
            Report::new(
                &json!({ "p_is_condition": pc, "q_is_condition": qc, "q_extends_p": ext }),
                t,
            )
        }
        ForcingAction::BuildF {
            x,
            sigma,
            epsilon,
            k,
            i,
            a,
            horizon_factor,
        } => {
            let x = partial_oracle(x)?;
            let sigma: FinitePartialOracle = match sigma {
                Some(p) => read_json(p)?,
                None => FinitePartialOracle::empty(0),
            };
            let f = build_f(&x, &sigma, epsilon, *k, *i, &bits(a)?, *horizon_factor)?;
            let mut t = Table::new(&["position", "value", "delay"]);
            for e in f.oracle.oracle().entries() {
                t.push(vec![
                    e.input.to_string(),
                    u8::from(e.value).to_string(),
                    e.delay.to_string(),
                ]);
            }
            Report::new(&f, t)
        }
        ForcingAction::Psi {
            source,
            condition,
            f,
            values,
            n,
            length_cap,
            stage_cap,
        } => {
            let op = operator(source, *n)?;
            let p: Condition = read_json(condition)?;
            let f = partial_oracle(f)?;
            let found = psi_search(&op, &p, &f, *n, *length_cap, *stage_cap)?;
            let padded = match (&found, values) {
                (Some(hit), Some(v)) => Some(hit.pad(&p, &bits(v)?, *stage_cap)?),
                _ => None,
            };
            let mut t = Table::new(&["found", "value", "outputs", "domain"]);
            t.push(match &found {
                Some(h) => vec![
                    "true".into(),
                    h.value.to_string(),
                    joined(&h.outputs),
                    joined(h.y.oracle().domain()),
                ],
                None => vec!["false".into(), String::new(), String::new(), String::new()],
            });
            Report::new(&json!({ "found": found, "padded": padded }), t)
        }
    }
}
