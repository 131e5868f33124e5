use std::fmt::Write as _;
use std::fs;

use mary_core::{
    dq_dx, invariant, invert, q_m, recover_base, recover_delta, recover_m, recover_pn, recover_ps, simulate_q,
    tune, well_posed_interval, BlockingBound, Estimate, Interval, McConfig, Param, Params, Problem, Quadrature,
    Query, Range,
};
use serde_json::{json, Map, Value};

use crate::args::{
    ChannelArgs, Command, ForwardArgs, IntervalArgs, InvertArgs, McArgs, PlotArgs, RecoverArgs, TuneArgs, Unknown,
};
use crate::envelope::{format_g17, num, Envelope};
use crate::error::{usage, CliError};

type CliResult<T> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult<String> {
    let cfg = Quadrature::default();
    let env = match command {
        Command::Forward(a) => forward(&a, &cfg)?,
        Command::Invert(a) => invert_cmd(&a, &cfg)?,
        Command::Recover(a) => recover(&a, &cfg)?,
        Command::Interval(a) => interval(&a, &cfg)?,
        Command::Tune(a) => tune_cmd(&a, &cfg)?,
        Command::Plot(a) => plot(&a, &cfg)?,
        Command::Mc(a) => mc(&a, &cfg)?,
    };
    Ok(env.render())
}

fn check_epsilon(eps: f64) -> CliResult<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(mary_core::Error::Domain(format!("epsilon must be positive, got {eps}")).into())
    }
}

fn interval_value(iv: &Interval) -> Value {
    json!({
        "a": num(iv.a),
        "b": num(iv.b),
        "peak_slope": num(iv.peak_slope),
        "peak_x": num(iv.peak_x),
    })
}

/// Records whether `x` lies in the well-posed interval. Problems computing
/// the interval become warnings and a `null` verdict.
fn well_posedness(env: &mut Envelope, x: f64, m: u64, eps: f64, cfg: &Quadrature, recovered: bool) {
    if m < 2 {
        env.warn(format!("m = {m} has no inverse problem; well-posedness is undefined"));
        env.result("well_posed", Value::Null).result("interval", Value::Null);
        return;
    }
    match well_posed_interval(m, eps, cfg) {
        Ok(iv) => {
            let inside = iv.contains(x);
            if recovered && !inside {
                env.warn(format!(
                    "x* = {} lies outside the well-posed interval [{}, {}]; the recovery is ill-conditioned",
                    format_g17(x),
                    format_g17(iv.a),
                    format_g17(iv.b)
                ));
            }
            env.result("well_posed", inside).result("interval", interval_value(&iv));
        }
        Err(e) => {
            env.warn(e.to_string());
            env.result("well_posed", Value::Null).result("interval", Value::Null);
        }
    }
}

/// Either the four channel parameters or `-x`, never a mix.
fn channel_invariant(ch: &ChannelArgs, m: u64, env: &mut Envelope) -> CliResult<f64> {
    let named = [("delta", ch.delta), ("ps", ch.ps), ("pn", ch.pn), ("base", ch.base)];
    if let Some(x) = ch.x {
        if let Some((name, _)) = named.iter().find(|(_, v)| v.is_some()) {
            return Err(usage(format!("-x cannot be combined with --{name}")));
        }
        env.input("x", num(x));
        return Ok(x);
    }
    let missing: Vec<&str> = named.iter().filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
    if !missing.is_empty() {
        return Err(usage(format!("missing --{} (or give -x)", missing.join(", --"))));
    }
    for (name, v) in named {
        env.input(name, num(v.unwrap()));
    }
    let params = Params::new(ch.delta.unwrap(), ch.ps.unwrap(), ch.pn.unwrap(), ch.base.unwrap(), m)?;
    Ok(invariant(&params)?)
}

fn forward(a: &ForwardArgs, cfg: &Quadrature) -> CliResult<Envelope> {
    let mut env = Envelope::new("forward");
    env.input("m", a.m).input("epsilon", num(a.epsilon));
    check_epsilon(a.epsilon)?;
    let x = channel_invariant(&a.channel, a.m, &mut env)?;
    let q = q_m(x, a.m, cfg)?;
    let slope = dq_dx(x, a.m, cfg)?;
    env.result("x", num(x)).result("q", num(q)).result("dq_dx", num(slope));
    if a.m >= 2 {
        env.condition_number(if slope > 0.0 { slope.recip() } else { f64::INFINITY });
    }
    well_posedness(&mut env, x, a.m, a.epsilon, cfg, false);
    Ok(env)
}

fn invert_cmd(a: &InvertArgs, cfg: &Quadrature) -> CliResult<Envelope> {
    let mut env = Envelope::new("invert");
    env.input("q_star", num(a.q_star))
        .input("m", a.m)
        .input("bracket", json!([num(a.bracket.0), num(a.bracket.1)]))
        .input("epsilon", num(a.epsilon));
    check_epsilon(a.epsilon)?;
    let query = Query::new(a.q_star, a.m).with_bracket(a.bracket.0, a.bracket.1);
    let r = invert(&query, cfg)?;
    env.result("x_star", num(r.x_star));
    env.residual(r.residual).condition_number(r.condition_number);
    well_posedness(&mut env, r.x_star, a.m, a.epsilon, cfg, true);
    Ok(env)
}

fn recover(a: &RecoverArgs, cfg: &Quadrature) -> CliResult<Envelope> {
    let mut env = Envelope::new("recover");
    env.input("q_star", num(a.q_star)).input("epsilon", num(a.epsilon));
    check_epsilon(a.epsilon)?;
    match a.unknown {
        Unknown::M => {
            env.input("unknown", "m").input("m_max", a.m_max);
            if a.m.is_some() {
                return Err(usage("-m cannot be given when recovering m"));
            }
            // The invariant does not depend on m; 2 only satisfies validation.
            let x = channel_invariant(&a.channel, 2, &mut env)?;
            let r = recover_m(a.q_star, x, a.m_max, cfg)?;
            env.result("unknown", "m").result("value", r.value).result("x_star", num(r.x_star));
            env.residual(r.residual).condition_number(r.condition_number);
            well_posedness(&mut env, x, r.value, a.epsilon, cfg, true);
        }
        Unknown::Param(p) => {
            env.input("unknown", p.name());
            let m = a.m.ok_or_else(|| usage("-m is required"))?;
            env.input("m", m);
            let ch = &a.channel;
            if ch.x.is_some() {
                return Err(usage(format!("-x cannot be given when recovering {p}")));
            }
            let given = [(Param::Delta, ch.delta), (Param::Ps, ch.ps), (Param::Pn, ch.pn), (Param::Base, ch.base)];
            for (q, v) in given {
                match (q == p, v) {
                    (true, Some(_)) => return Err(usage(format!("--{q} is the unknown and cannot be given"))),
                    (false, None) => return Err(usage(format!("--{q} is required"))),
                    (false, Some(v)) => {
                        env.input(q.name(), num(v));
                    }
                    (true, None) => {}
                }
            }
            let (d, s, n, b) = (ch.delta.unwrap_or(0.0), ch.ps.unwrap_or(1.0), ch.pn.unwrap_or(1.0), ch.base.unwrap_or(1.0));
            let r = match p {
                Param::Delta => recover_delta(a.q_star, s, n, b, m, cfg)?,
                Param::Ps => recover_ps(a.q_star, d, n, b, m, cfg)?,
                Param::Pn => recover_pn(a.q_star, d, s, b, m, cfg)?,
                Param::Base => recover_base(a.q_star, d, s, n, m, cfg)?,
            };
            env.result("unknown", p.name()).result("value", num(r.value)).result("x_star", num(r.x_star));
            env.residual(r.residual).condition_number(r.condition_number);
            well_posedness(&mut env, r.x_star, m, a.epsilon, cfg, true);
        }
    }
    Ok(env)
}

fn interval(a: &IntervalArgs, cfg: &Quadrature) -> CliResult<Envelope> {
    let mut env = Envelope::new("interval");
    env.input("m", a.m).input("epsilon", num(a.epsilon));
    let iv = well_posed_interval(a.m, a.epsilon, cfg)?;
    env.result("a", num(iv.a))
        .result("b", num(iv.b))
        .result("peak_x", num(iv.peak_x))
        .result("peak_slope", num(iv.peak_slope));
    Ok(env)
}

fn tune_cmd(a: &TuneArgs, cfg: &Quadrature) -> CliResult<Envelope> {
    let mut env = Envelope::new("tune");
    let range_json = |p: Param, lo: f64, hi: f64| json!({"name": p.name(), "lo": num(lo), "hi": num(hi)});
    env.input("m", a.m)
        .input("epsilon", num(a.epsilon))
        .input("unknown", range_json(a.unknown.param, a.unknown.lo, a.unknown.hi))
        .input("adjust", a.adjust.iter().map(|r| range_json(r.param, r.lo, r.hi)).collect::<Vec<_>>())
        .input(
            "fix",
            a.fix.iter().map(|f| (f.param.name().to_owned(), num(f.value))).collect::<Map<_, _>>(),
        );

    let mut seen = vec![a.unknown.param];
    for p in a.adjust.iter().map(|r| r.param).chain(a.fix.iter().map(|f| f.param)) {
        if seen.contains(&p) {
            return Err(usage(format!("parameter {p} is given more than once")));
        }
        seen.push(p);
    }
    if let Some(p) = Param::ALL.iter().find(|p| !seen.contains(p)) {
        return Err(usage(format!("parameter {p} must be the unknown, adjusted or fixed")));
    }
    check_epsilon(a.epsilon)?;

    let problem = Problem {
        m: a.m,
        unknown: (a.unknown.param, Range::new(a.unknown.lo, a.unknown.hi)),
        adjustables: a.adjust.iter().map(|r| (r.param, Range::new(r.lo, r.hi))).collect(),
        fixed: a.fix.iter().map(|f| (f.param, f.value)).collect(),
        epsilon: a.epsilon,
    };
    let r = tune(&problem, cfg)?;
    let settings: Map<String, Value> = r.settings.iter().map(|&(p, v)| (p.name().to_owned(), num(v))).collect();
    env.result("feasible", r.feasible)
        .result("settings", settings)
        .result("x_range", r.x_range.map_or(Value::Null, |(lo, hi)| json!([num(lo), num(hi)])))
        .result("interval", interval_value(&r.interval))
        .result(
            "blocking",
            r.blocking.map_or(Value::Null, |b| {
                Value::String(
                    match b {
                        BlockingBound::EmptyWindow => "empty_window",
                        BlockingBound::Lower => "lower",
                        BlockingBound::Upper => "upper",
                    }
                    .into(),
                )
            }),
        );
    match r.blocking {
        Some(BlockingBound::EmptyWindow) => {
            env.warn("the unknown's range spans more than the well-posed interval allows for any settings");
        }
        Some(BlockingBound::Lower) => {
            env.warn("the adjustable ranges cannot raise the invariant to the lower end of the interval");
        }
        Some(BlockingBound::Upper) => {
            env.warn("the adjustable ranges cannot lower the invariant to the upper end of the interval");
        }
        None => {}
    }
    Ok(env)
}

fn plot(a: &PlotArgs, cfg: &Quadrature) -> CliResult<Envelope> {
    let mut env = Envelope::new("plot");
    env.input("m", a.m.clone())
        .input("x", json!({"lo": num(a.x.lo), "hi": num(a.x.hi), "step": num(a.x.step)}))
        .input("out", a.out.display().to_string());
    let mut csv = String::from("x,m,q\n");
    let mut rows = 0u64;
    for &m in &a.m {
        for x in a.x.points() {
            let q = q_m(x, m, cfg)?;
            let _ = writeln!(csv, "{},{m},{}", format_g17(x), format_g17(q));
            rows += 1;
        }
    }
    fs::write(&a.out, csv).map_err(|source| CliError::Io { path: a.out.display().to_string(), source })?;
    env.result("path", a.out.display().to_string()).result("rows", rows).result("curves", a.m.len() as u64);
    Ok(env)
}

fn mc(a: &McArgs, cfg: &Quadrature) -> CliResult<Envelope> {
    let mut env = Envelope::new("mc");
    env.input("x", num(a.x)).input("m", a.m).input("n", a.n).input("seed", a.seed);
    let est: Estimate = simulate_q(a.x, a.m, &McConfig::new(a.n, a.seed)?)?;
    let q = q_m(a.x, a.m, cfg)?;
    let diff = (est.q_hat - q).abs();
    let z = if est.std_err > 0.0 {
        diff / est.std_err
    } else if diff == 0.0 {
        0.0
    } else {
        env.warn("zero standard error with a nonzero difference; z-score undefined");
        f64::INFINITY
    };
    env.result("q_hat", num(est.q_hat))
        .result("std_err", num(est.std_err))
        .result("n", est.n)
        .result("q_m", num(q))
        .result("z_score", num(z));
    Ok(env)
}
