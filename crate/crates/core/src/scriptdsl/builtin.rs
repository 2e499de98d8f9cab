//! Generated scripts for the parametric constructions. Every script is
//! produced as text and parsed, so the built-ins go through the same path as
//! hand-written files.

use std::fmt::Write as _;

use thiserror::Error;

use super::{execute, parse_script, MoveScript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn parsed(text: String) -> MoveScript {
    parse_script(&text).unwrap_or_else(|e| panic!("generated script does not parse: {e}\n{text}"))
}

fn labels(prefix: &str, range: std::ops::RangeInclusive<i64>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

/// `V(-n-1)`: blow up into `C_n` plus a `-1` sphere, rationally blow down,
/// open the ball, slide and cancel back to a single `-(n+1)` handle.
pub fn thm_a_script(n: i64) -> Result<MoveScript, ScriptError> {
    if n < 2 {
        return Err(ScriptError::InvalidParameter(format!("needs n >= 2, got {n}")));
    }
    let p = n + 1;
    let lens = format!("L({p},1)");
    let mut s = String::new();
    writeln!(s, "# B_{n} inside the -{p} sphere neighbourhood").unwrap();
    writeln!(s, "manifold V(-{p})").unwrap();
    writeln!(s, "expect b1=0 b2=1 sigma=-1 euler=2 torsion=[] boundary={lens}").unwrap();
    let mut last = "s1".to_string();
    for i in 1..n {
        writeln!(s, "blowup vertex {last} as e{i}").unwrap();
        writeln!(s, "expect boundary={lens}").unwrap();
        last = format!("e{i}");
    }
    let sigma_sphere = format!("e{}", n - 1);
    let mut chain = vec!["s1".to_string()];
    chain.extend(labels("e", 1..=n - 2));
    writeln!(s, "expect cn({n})=1 b2={n} sigma=-{n} euler={}", n + 1).unwrap();
    writeln!(s, "uncancelpair as h z").unwrap();
    writeln!(s, "expect b1=0 b2={n} sigma=-{n} euler={} onehandles=1 boundary={lens}", n + 1).unwrap();
    writeln!(s, "rbd chain [{}] n={n} as B{n}", chain.join(",")).unwrap();
    writeln!(s, "expect b2=1 sigma=-1 euler=2 torsion=? pieces=[B_{n}] boundary={lens}").unwrap();
    writeln!(s, "unseal B{n} as d k couple {sigma_sphere}:1:1").unwrap();
    writeln!(s, "expect b2=1 sigma=-1 euler=2 torsion=[] pieces=[] onehandles=2").unwrap();
    for _ in 0..n {
        writeln!(s, "slide k over {sigma_sphere} -").unwrap();
    }
    writeln!(s, "cancelpair d {sigma_sphere}").unwrap();
    writeln!(s, "cancelpair h z").unwrap();
    writeln!(s, "expect form=[[-{p}]] b1=0 b2=1 sigma=-1 euler=2 det=-{p} torsion=[] pieces=[] boundary={lens}")
        .unwrap();
    Ok(parsed(s))
}

/// `V(-4)`: blow up into `C_n` plus a `-1` sphere on the second sphere,
/// rationally blow down and slide back. Odd `n` returns to `V(-4)`; even `n`
/// ends at `B_2` with one `-1` handle.
pub fn thm_b_script(n: i64) -> Result<MoveScript, ScriptError> {
    if n < 4 {
        return Err(ScriptError::InvalidParameter(format!(
            "needs n >= 4 (n = 2 is trivial and n = 3 is the -n-1 family), got {n}"
        )));
    }
    let lens = "L(4,1)";
    let mut s = String::new();
    writeln!(s, "# B_{n} inside the -4 sphere neighbourhood").unwrap();
    writeln!(s, "manifold V(-4)").unwrap();
    writeln!(s, "expect b1=0 b2=1 sigma=-1 euler=2 torsion=[] boundary={lens}").unwrap();
    writeln!(s, "blowup vertex s1 as e1").unwrap();
    for j in 2..=n - 2 {
        writeln!(s, "blowup edge s1 e{} as e{j}", j - 1).unwrap();
    }
    writeln!(s, "blowup vertex e{} as e{}", n - 2, n - 1).unwrap();
    let sp = format!("e{}", n - 1);
    let mut chain = vec!["s1".to_string()];
    chain.extend((1..=n - 2).rev().map(|i| format!("e{i}")));
    writeln!(s, "expect cn({n})=1 b2={n} sigma=-{n} euler={} boundary={lens}", n + 1).unwrap();
    writeln!(s, "uncancelpair as h z").unwrap();
    writeln!(s, "rbd chain [{}] n={n} as B{n}", chain.join(",")).unwrap();
    writeln!(s, "expect b2=1 sigma=-1 euler=2 torsion=? pieces=[B_{n}] boundary={lens}").unwrap();
    writeln!(s, "unseal B{n} as d k couple {sp}:{}:{}", n - 2, n - 2).unwrap();
    let torsion = if n % 2 == 0 { "[2]" } else { "[]" };
    writeln!(s, "expect form=[[{},0,{}],[0,0,0],[{},0,{}]] torsion={torsion}", n - 3, n - 2, n - 2, n - 1).unwrap();
    writeln!(s, "slide k over {sp} -").unwrap();
    if n % 2 == 0 {
        for _ in 0..(n - 2) / 2 {
            writeln!(s, "slide {sp} over k -").unwrap();
        }
        writeln!(s, "slide k over {sp} +").unwrap();
        writeln!(s, "cancelpair h z").unwrap();
        writeln!(s, "seal d k as B2").unwrap();
        writeln!(s, "expect form=[[-1]] b1=0 b2=1 sigma=-1 euler=2 torsion=[2] pieces=[B_2] boundary={lens}").unwrap();
    } else {
        for _ in 0..(n - 3) / 2 {
            writeln!(s, "slide {sp} over k -").unwrap();
        }
        writeln!(s, "slide k over {sp} -").unwrap();
        writeln!(s, "slide k over {sp} -").unwrap();
        writeln!(s, "cancelpair d {sp}").unwrap();
        writeln!(s, "cancelpair h z").unwrap();
        writeln!(s, "expect form=[[-4]] b1=0 b2=1 sigma=-1 euler=2 det=-4 torsion=[] pieces=[] boundary={lens}")
            .unwrap();
    }
    Ok(parsed(s))
}

fn em_blowups(m: i64, count: i64) -> String {
    let mut s = String::new();
    writeln!(s, "manifold E({m})").unwrap();
    if count >= 1 {
        writeln!(s, "blowup vertex f mult 2 as e1").unwrap();
    }
    for k in 2..=count {
        writeln!(s, "blowup edge f e{} as e{k}", k - 1).unwrap();
    }
    s
}

/// Number of fibre blow-ups after which the fibre and the exceptional
/// spheres contain `C_n`, found by replaying each candidate count.
pub fn em_blowup_count(n: i64) -> Result<i64, ScriptError> {
    if n < 2 {
        return Err(ScriptError::InvalidParameter(format!("needs n >= 2, got {n}")));
    }
    for count in [n - 2, n - 1] {
        let Ok(run) = execute(&parsed(em_blowups(1, count))) else { continue };
        let closes = run.expression.find_cn_chains(n).iter().any(|c| c.first().map(String::as_str) == Some("f"));
        if closes {
            return Ok(count);
        }
    }
    Err(ScriptError::InvalidParameter(format!("no blow-up count produces C_{n} from the fibre")))
}

/// `E(m)` with a 0-framed fishtail fibre `f`: blow up the double point and
/// then the fibre/exceptional intersections until `C_n` appears, then
/// rationally blow it down.
pub fn em_script(n: i64, m: i64) -> Result<MoveScript, ScriptError> {
    if m < 1 {
        return Err(ScriptError::InvalidParameter(format!("needs m >= 1, got {m}")));
    }
    let count = em_blowup_count(n)?;
    let b2 = 12 * m - 2;
    let sigma = -8 * m;
    let euler = 12 * m;
    let mut s = String::new();
    writeln!(s, "# E({m})_{n}").unwrap();
    s.push_str(&em_blowups(m, count));
    writeln!(
        s,
        "note E({m}) enters as external data: b2={b2} sigma={sigma} euler={euler}, fibre f carries one unit of b2"
    )
    .unwrap();
    writeln!(s, "note blow-up count {count} chosen by replay: {} blow-ups do not produce C_{n}", count - 1).unwrap();
    writeln!(
        s,
        "note figure-derived linking: the double point of f is blown up first, then each new -1 sphere meets f and the previous one"
    )
    .unwrap();
    writeln!(s, "expect cn({n})=1 b2={} sigma={} euler={} pieces=[E({m})]", b2 + count, sigma - count, euler + count)
        .unwrap();
    let mut chain = vec!["f".to_string()];
    chain.extend(labels("e", 1..=n - 2));
    writeln!(s, "rbd chain [{}] n={n} as B{n}", chain.join(",")).unwrap();
    writeln!(
        s,
        "expect b2={} sigma={} euler={} torsion=? pieces=[B_{n},E({m})] form=[[0]]",
        b2 + count - (n - 1),
        sigma - count + (n - 1),
        euler + count - (n - 1)
    )
    .unwrap();
    Ok(parsed(s))
}
