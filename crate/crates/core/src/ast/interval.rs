//! Interval bounds of expressions over variable domains.

use super::{DomainLookup, Expr};

fn clamp(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

fn hull(points: impl IntoIterator<Item = i128>) -> Option<(i128, i128)> {
    points.into_iter().fold(None, |acc, p| match acc {
        None => Some((p, p)),
        Some((lo, hi)) => Some((lo.min(p), hi.max(p))),
    })
}

/// Nonzero sub-intervals of `[lo, hi]`.
fn nonzero_parts(lo: i128, hi: i128) -> Vec<(i128, i128)> {
    let mut parts = Vec::new();
    if lo < 0 {
        parts.push((lo, hi.min(-1)));
    }
    if hi > 0 {
        parts.push((lo.max(1), hi));
    }
    parts
}

fn div_bounds(a: (i128, i128), b: (i128, i128)) -> Option<(i128, i128)> {
    let mut pts = Vec::new();
    for (bl, bh) in nonzero_parts(b.0, b.1) {
        for x in [a.0, a.1] {
            for y in [bl, bh] {
                pts.push(x / y);
            }
        }
    }
    hull(pts)
}

fn mod_bounds(a: (i128, i128), b: (i128, i128)) -> Option<(i128, i128)> {
    let parts = nonzero_parts(b.0, b.1);
    let m = parts.iter().map(|&(l, h)| l.abs().max(h.abs())).max()? - 1;
    let lo = if a.0 >= 0 { 0 } else { a.0.max(-m) };
    let hi = if a.1 <= 0 { 0 } else { a.1.min(m) };
    Some((lo, hi))
}

fn bounds128(e: &Expr, dom: &dyn DomainLookup) -> Option<(i128, i128)> {
    Some(match e {
        Expr::Int(v) => (*v as i128, *v as i128),
        Expr::Bool(b) => (*b as i128, *b as i128),
        Expr::Var(v) => {
            let d = dom.domain_of(v)?;
            (d.min()? as i128, d.max()? as i128)
        }
        Expr::Sum(terms, offset) => {
            let (mut lo, mut hi) = (*offset as i128, *offset as i128);
            for t in terms {
                let (l, h) = bounds128(&t.expr, dom)?;
                let c = t.coef as i128;
                let (a, b) = (c * l, c * h);
                lo += a.min(b);
                hi += a.max(b);
            }
            (lo, hi)
        }
        Expr::Product(xs) => {
            let mut acc = (1i128, 1i128);
            for x in xs {
                let (l, h) = bounds128(x, dom)?;
                let m = |a: i128, b: i128| a.saturating_mul(b);
                acc = hull([m(acc.0, l), m(acc.0, h), m(acc.1, l), m(acc.1, h)])?;
            }
            acc
        }
        Expr::Div(a, b) => div_bounds(bounds128(a, dom)?, bounds128(b, dom)?)?,
        Expr::Mod(a, b) => mod_bounds(bounds128(a, dom)?, bounds128(b, dom)?)?,
        Expr::Abs(a) => {
            let (l, h) = bounds128(a, dom)?;
            if l >= 0 {
                (l, h)
            } else if h <= 0 {
                (-h, -l)
            } else {
                (0, h.max(-l))
            }
        }
        Expr::Neg(a) => {
            let (l, h) = bounds128(a, dom)?;
            (-h, -l)
        }
        Expr::Element(arr, idx) => {
            let (l, h) = bounds128(idx, dom)?;
            let lo = l.max(0);
            let hi = h.min(arr.len() as i128 - 1);
            let mut acc: Option<(i128, i128)> = None;
            for i in lo..=hi {
                if let Some((a, b)) = bounds128(&arr[i as usize], dom) {
                    acc = hull(acc.into_iter().flat_map(|(x, y)| [x, y]).chain([a, b]));
                }
            }
            acc?
        }
        _ => (0, 1),
    })
}

/// Smallest and largest value `e` can take, or `None` when it has no
/// defined value or mentions a variable unknown to `dom`. Boolean nodes
/// give `(0, 1)` unless constant.
pub fn bounds(e: &Expr, dom: &dyn DomainLookup) -> Option<(i64, i64)> {
    let (lo, hi) = bounds128(e, dom)?;
    (lo <= hi).then(|| (clamp(lo), clamp(hi)))
}

/// Conservative test for an undefined integer subterm reachable under some
/// assignment: a divisor whose bounds include zero or an element index that
/// can leave the array.
pub fn may_be_undefined(e: &Expr, dom: &dyn DomainLookup) -> bool {
    let here = match e {
        Expr::Div(_, b) | Expr::Mod(_, b) => match bounds(b, dom) {
            Some((lo, hi)) => lo <= 0 && hi >= 0,
            None => true,
        },
        Expr::Element(arr, idx) => match bounds(idx, dom) {
            Some((lo, hi)) => lo < 0 || hi >= arr.len() as i64,
            None => true,
        },
        _ => false,
    };
    here || e.children().into_iter().any(|c| may_be_undefined(c, dom))
}
