//! Exhaustive class-membership checkers for small ground sets.
//!
//! Each checker tabulates the function once and scans every inequality of its
//! class. A failure is reported as a [`Violation`] whose recorded values, when
//! re-evaluated, break the same inequality.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::ItemSet;
use crate::linsep::{lp_maximize, Constraint, LpOutcome};
use crate::valuation::{SetFunction, SetTable, Xos};

/// Slack allowed before an inequality counts as violated.
pub const TOL: f64 = 1e-9;
/// Agreement required between an LP optimum and the function value.
pub const LP_TOL: f64 = 1e-6;

pub const MONOTONE_LIMIT: usize = 16;
pub const SUBADDITIVE_LIMIT: usize = 14;
pub const SUBMODULAR_LIMIT: usize = 14;
pub const GS_LIMIT: usize = 12;
pub const POLYHEDRON_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `f(S + i) < f(S)`.
    Monotone {
        set: ItemSet,
        item: usize,
        f_set: f64,
        f_with: f64,
    },
    /// `f(S ∪ T) > f(S) + f(T)`.
    Subadditive {
        s: ItemSet,
        t: ItemSet,
        f_s: f64,
        f_t: f64,
        f_union: f64,
    },
    /// `f(S+i+j) - f(S+i) > f(S+j) - f(S)`.
    Submodular {
        set: ItemSet,
        i: usize,
        j: usize,
        f_s: f64,
        f_si: f64,
        f_sj: f64,
        f_sij: f64,
    },
    /// Marginals over `S`: one of `ab+c`, `ac+b`, `bc+a` is a unique maximum.
    GsTriple {
        set: ItemSet,
        a: usize,
        b: usize,
        c: usize,
        f_ab: f64,
        f_ac: f64,
        f_bc: f64,
        f_a: f64,
        f_b: f64,
        f_c: f64,
    },
    /// `max { x(T) : x in P(f) }` differs from `f(T)`.
    Polyhedron {
        set: ItemSet,
        lp_value: f64,
        f_value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "violation", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail(Violation),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TOL * a.abs().max(b.abs()).max(1.0) * 1e-3
}

fn marginal_sums(f_ab: f64, f_ac: f64, f_bc: f64, f_a: f64, f_b: f64, f_c: f64) -> [f64; 3] {
    [f_ab + f_c, f_ac + f_b, f_bc + f_a]
}

fn unique_max(x: [f64; 3]) -> bool {
    (0..3).any(|k| (0..3).filter(|&l| l != k).all(|l| x[k] > x[l] + TOL))
}

impl Violation {
    /// Re-evaluates the witness on `v`; true iff the recorded values are
    /// reproduced and they still break the inequality.
    pub fn reproduce(&self, v: &dyn SetFunction) -> Result<bool> {
        Ok(match self {
            Violation::Monotone {
                set,
                item,
                f_set,
                f_with,
            } => {
                let a = v.eval(set)?;
                let b = v.eval(&set.with(*item))?;
                close(a, *f_set) && close(b, *f_with) && b < a - TOL
            }
            Violation::Subadditive {
                s,
                t,
                f_s,
                f_t,
                f_union,
            } => {
                let a = v.eval(s)?;
                let b = v.eval(t)?;
                let u = v.eval(&s.union(t))?;
                close(a, *f_s) && close(b, *f_t) && close(u, *f_union) && u > a + b + TOL
            }
            Violation::Submodular {
                set,
                i,
                j,
                f_s,
                f_si,
                f_sj,
                f_sij,
            } => {
                let s0 = v.eval(set)?;
                let si = v.eval(&set.with(*i))?;
                let sj = v.eval(&set.with(*j))?;
                let sij = v.eval(&set.with(*i).with(*j))?;
                close(s0, *f_s)
                    && close(si, *f_si)
                    && close(sj, *f_sj)
                    && close(sij, *f_sij)
                    && sij - si > sj - s0 + TOL
            }
            Violation::GsTriple {
                set,
                a,
                b,
                c,
                f_ab,
                f_ac,
                f_bc,
                f_a,
                f_b,
                f_c,
            } => {
                let base = v.eval(set)?;
                let m = |items: &[usize]| -> Result<f64> {
                    let mut s = set.clone();
                    for &i in items {
                        s = s.with(i);
                    }
                    Ok(v.eval(&s)? - base)
                };
                let got = [
                    m(&[*a, *b])?,
                    m(&[*a, *c])?,
                    m(&[*b, *c])?,
                    m(&[*a])?,
                    m(&[*b])?,
                    m(&[*c])?,
                ];
                let want = [*f_ab, *f_ac, *f_bc, *f_a, *f_b, *f_c];
                got.iter().zip(&want).all(|(g, w)| close(*g, *w))
                    && unique_max(marginal_sums(
                        got[0], got[1], got[2], got[3], got[4], got[5],
                    ))
            }
            Violation::Polyhedron {
                set,
                lp_value,
                f_value,
            } => {
                let table = SetTable::tabulate(v, POLYHEDRON_LIMIT)?;
                let lp = polyhedron_max(&table, set)?;
                let f = v.eval(set)?;
                close(lp, *lp_value) && close(f, *f_value) && (lp - f).abs() > LP_TOL
            }
        })
    }
}

fn table(v: &dyn SetFunction, limit: usize) -> Result<SetTable> {
    let n = v.ground_size();
    if n > limit {
        return Err(Error::guard("checked ground set", limit as u128, n as u128));
    }
    SetTable::tabulate(v, limit)
}

fn set_of(n: usize, mask: usize) -> ItemSet {
    ItemSet::from_mask(n, mask as u128)
}

/// `f(S + i) >= f(S) - TOL` for every `S` and `i` outside `S`.
pub fn check_monotone(v: &dyn SetFunction) -> Result<Verdict> {
    let t = table(v, MONOTONE_LIMIT)?;
    Ok(monotone_scan(&t))
}

fn monotone_scan(t: &SetTable) -> Verdict {
    let n = t.ground_size();
    for mask in 0..1usize << n {
        for i in (0..n).filter(|i| mask >> i & 1 == 0) {
            let (a, b) = (t.at(mask), t.at(mask | 1 << i));
            if b < a - TOL {
                return Verdict::Fail(Violation::Monotone {
                    set: set_of(n, mask),
                    item: i,
                    f_set: a,
                    f_with: b,
                });
            }
        }
    }
    Verdict::Pass
}

/// `f(S ∪ T) <= f(S) + f(T) + TOL` for every pair. Monotone inputs only need
/// disjoint pairs, since `f(S ∪ T) = f(S ∪ (T \ S))` and `f(T \ S) <= f(T)`.
pub fn check_subadditive(v: &dyn SetFunction) -> Result<Verdict> {
    let t = table(v, SUBADDITIVE_LIMIT)?;
    let n = t.ground_size();
    let full = (1usize << n) - 1;
    let disjoint_only = monotone_scan(&t).passed();
    let violation = |s: usize, u: usize| -> Option<Violation> {
        let (fs, fu, fsu) = (t.at(s), t.at(u), t.at(s | u));
        (fsu > fs + fu + TOL).then(|| Violation::Subadditive {
            s: set_of(n, s),
            t: set_of(n, u),
            f_s: fs,
            f_t: fu,
            f_union: fsu,
        })
    };
    if disjoint_only {
        // unions by increasing size, so the reported witness is small
        let mut unions: Vec<usize> = (0..=full).collect();
        unions.sort_by_key(|m| (m.count_ones(), *m));
        for whole in unions {
            let mut s = whole;
            loop {
                let u = whole & !s;
                if s <= u {
                    if let Some(w) = violation(s, u) {
                        return Ok(Verdict::Fail(w));
                    }
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & whole;
            }
        }
    } else {
        for s in 0..=full {
            for u in s..=full {
                if let Some(w) = violation(s, u) {
                    return Ok(Verdict::Fail(w));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Decreasing marginals: `f(S+i+j) - f(S+i) <= f(S+j) - f(S) + TOL`.
pub fn check_submodular(v: &dyn SetFunction) -> Result<Verdict> {
    let t = table(v, SUBMODULAR_LIMIT)?;
    let n = t.ground_size();
    for mask in 0..1usize << n {
        for i in (0..n).filter(|i| mask >> i & 1 == 0) {
            for j in (0..n).filter(|&j| j != i && mask >> j & 1 == 0) {
                let (s0, si, sj, sij) = (
                    t.at(mask),
                    t.at(mask | 1 << i),
                    t.at(mask | 1 << j),
                    t.at(mask | 1 << i | 1 << j),
                );
                if sij - si > sj - s0 + TOL {
                    return Ok(Verdict::Fail(Violation::Submodular {
                        set: set_of(n, mask),
                        i,
                        j,
                        f_s: s0,
                        f_si: si,
                        f_sj: sj,
                        f_sij: sij,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Triple condition for gross substitutes: for every `S` and distinct
/// `a, b, c` outside it, none of `f^S(ab)+f^S(c)`, `f^S(ac)+f^S(b)`,
/// `f^S(bc)+f^S(a)` beats both others by more than `TOL`. Requires a
/// monotone input.
pub fn check_gs_triples(v: &dyn SetFunction) -> Result<Verdict> {
    let t = table(v, GS_LIMIT)?;
    if let Verdict::Fail(w) = monotone_scan(&t) {
        return Err(Error::NotMonotone(format!("{w:?}")));
    }
    let n = t.ground_size();
    for mask in 0..1usize << n {
        let base = t.at(mask);
        let m = |bits: usize| t.at(mask | bits) - base;
        let free: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        for (x, &a) in free.iter().enumerate() {
            for (y, &b) in free.iter().enumerate().skip(x + 1) {
                for &c in &free[y + 1..] {
                    let (ba, bb, bc) = (1 << a, 1 << b, 1 << c);
                    let vals = [m(ba | bb), m(ba | bc), m(bb | bc), m(ba), m(bb), m(bc)];
                    if unique_max(marginal_sums(
                        vals[0], vals[1], vals[2], vals[3], vals[4], vals[5],
                    )) {
                        return Ok(Verdict::Fail(Violation::GsTriple {
                            set: set_of(n, mask),
                            a,
                            b,
                            c,
                            f_ab: vals[0],
                            f_ac: vals[1],
                            f_bc: vals[2],
                            f_a: vals[3],
                            f_b: vals[4],
                            f_c: vals[5],
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// `max sum_{i in T} x_i` over `P(f) = { x >= 0 : x(T') <= f(T') for all T' }`.
fn polyhedron_max(t: &SetTable, target: &ItemSet) -> Result<f64> {
    let n = t.ground_size();
    let constraints: Vec<Constraint> = (1..1usize << n)
        .map(|m| Constraint::new((0..n).map(|i| (m >> i & 1) as f64).collect(), t.at(m)))
        .collect();
    let objective: Vec<f64> = (0..n)
        .map(|i| if target.contains(i) { 1.0 } else { 0.0 })
        .collect();
    match lp_maximize(&objective, &constraints, true)? {
        LpOutcome::Optimal(s) => Ok(s.value),
        other => Err(Error::Numerical(format!("polyhedron LP: {other:?}"))),
    }
}

/// For every `T`, the LP optimum over `P(f)` equals `f(T)` within `LP_TOL`.
pub fn check_xos_polyhedron(v: &Xos) -> Result<Verdict> {
    check_polyhedron(v)
}

/// Same check for any function given by value oracle.
pub fn check_polyhedron(v: &dyn SetFunction) -> Result<Verdict> {
    let t = table(v, POLYHEDRON_LIMIT)?;
    let n = t.ground_size();
    for mask in 0..1usize << n {
        let set = set_of(n, mask);
        let lp = polyhedron_max(&t, &set)?;
        let f = t.at(mask);
        if (lp - f).abs() > LP_TOL {
            return Ok(Verdict::Fail(Violation::Polyhedron {
                set,
                lp_value: lp,
                f_value: f,
            }));
        }
    }
    Ok(Verdict::Pass)
}

/// Names accepted by the `verify` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Monotone,
    Subadditive,
    Submodular,
    Gs,
    Polyhedron,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Monotone,
        Check::Subadditive,
        Check::Submodular,
        Check::Gs,
        Check::Polyhedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Monotone => "monotone",
            Check::Subadditive => "subadd",
            Check::Submodular => "submod",
            Check::Gs => "gs",
            Check::Polyhedron => "polyhedron",
        }
    }

    pub fn run(self, v: &dyn SetFunction) -> Result<Verdict> {
        match self {
            Check::Monotone => check_monotone(v),
            Check::Subadditive => check_subadditive(v),
            Check::Submodular => check_submodular(v),
            Check::Gs => check_gs_triples(v),
            Check::Polyhedron => check_polyhedron(v),
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Check> {
        Ok(match s.trim() {
            "monotone" => Check::Monotone,
            "subadd" | "subadditive" => Check::Subadditive,
            "submod" | "submodular" => Check::Submodular,
            "gs" | "gs_triple" | "gs_triples" => Check::Gs,
            "polyhedron" => Check::Polyhedron,
            other => {
                return Err(Error::Unknown {
                    what: "check",
                    name: other.to_string(),
                })
            }
        })
    }
}
