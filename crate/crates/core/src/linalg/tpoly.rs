//! Polynomials over the tower ring: Hensel lifting of coprime residue
//! factorizations, slope factorization along the Newton polygon, residue
//! separation of unit parts, and capped root extraction.

use std::sync::Arc;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{CoreError, Result};
use crate::linalg::newton::SlopeProfile;
use crate::padic::cyclotomic::CycElem;
use crate::padic::fq::{self, FqPoly};
use crate::padic::tower::{TowerElem, TowerRing};
use crate::padic::valuation::Val;

/// Dense ascending coefficients over one tower ring.
pub type TPoly = Vec<TowerElem>;

pub fn tp_from_cyc(ring: &Arc<TowerRing>, poly: &[CycElem]) -> Result<TPoly> {
    poly.iter().map(|c| ring.from_cyc(c)).collect()
}

pub fn tp_deg(f: &TPoly) -> usize {
    f.len().saturating_sub(1)
}

/// Drop exact-zero leading coefficients (never precision-limited ones; a
/// fuzzy leading coefficient is meaningful uncertainty the caller must see).
pub fn tp_trim_exact(mut f: TPoly) -> TPoly {
    while f.len() > 1 && matches!(f.last().unwrap().val(), Val::Infinite) {
        f.pop();
    }
    f
}

pub fn tp_add(a: &TPoly, b: &TPoly, ring: &Arc<TowerRing>) -> TPoly {
    let n = a.len().max(b.len());
    let out: TPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| ring.zero());
            let y = b.get(i).cloned().unwrap_or_else(|| ring.zero());
            x.add(&y)
        })
        .collect();
    tp_trim_exact(out)
}

pub fn tp_sub(a: &TPoly, b: &TPoly, ring: &Arc<TowerRing>) -> TPoly {
    let n = a.len().max(b.len());
    let out: TPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| ring.zero());
            let y = b.get(i).cloned().unwrap_or_else(|| ring.zero());
            x.sub(&y)
        })
        .collect();
    tp_trim_exact(out)
}

pub fn tp_mul(a: &TPoly, b: &TPoly, ring: &Arc<TowerRing>) -> TPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for i in 0..a.len() {
        for j in 0..b.len() {
            let t = a[i].mul(&b[j]);
            out[i + j] = out[i + j].add(&t);
        }
    }
    tp_trim_exact(out)
}

pub fn tp_scale(a: &TPoly, c: &TowerElem) -> TPoly {
    a.iter().map(|x| x.mul(c)).collect()
}

/// Division with remainder by a monic divisor.
pub fn tp_divmod_monic(num: &TPoly, den: &TPoly, ring: &Arc<TowerRing>) -> (TPoly, TPoly) {
    let dd = tp_deg(den);
    if num.len() <= dd {
        return (vec![], num.clone());
    }
    let mut rem = num.clone();
    let mut quot = vec![ring.zero(); num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero_within_precision() {
            continue;
        }
        quot[i] = c.clone();
        for j in 0..=dd {
            let t = c.mul(&den[j]);
            rem[i + j] = rem[i + j].sub(&t);
        }
    }
    rem.truncate(dd.max(1));
    (quot, rem)
}

pub fn tp_eval(f: &TPoly, x: &TowerElem, ring: &Arc<TowerRing>) -> TowerElem {
    let mut acc = ring.zero();
    for c in f.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

pub fn tp_eval_mat(
    f: &TPoly,
    m: &crate::linalg::matrix::Mat<TowerElem>,
    ring: &Arc<TowerRing>,
) -> crate::linalg::matrix::Mat<TowerElem> {
    use crate::linalg::matrix::Mat;
    let n = m.rows;
    let mut acc = Mat::zeros(n, n, ring.zero());
    for c in f.iter().rev() {
        acc = acc.mul(m);
        for i in 0..n {
            let v = acc.at(i, i).add(c);
            *acc.at_mut(i, i) = v;
        }
    }
    acc
}

pub fn tp_derivative(f: &TPoly, ring: &Arc<TowerRing>) -> TPoly {
    if f.len() <= 1 {
        return vec![ring.zero()];
    }
    (1..f.len()).map(|i| f[i].mul(&ring.from_i64(i as i64))).collect()
}

/// Residue-field image of a polynomial with non-negative coefficient
/// valuations.
pub fn tp_residue(f: &TPoly) -> Result<FqPoly> {
    f.iter().map(|c| c.residue()).collect()
}

/// Shift substitution f(r + Z), by Horner over the tower.
pub fn tp_compose_shift(f: &TPoly, r: &TowerElem, ring: &Arc<TowerRing>) -> TPoly {
    // Horner: result = ((f_d (Z+r) + f_{d-1})(Z+r) + ...)
    let zr: TPoly = vec![r.clone(), ring.one()];
    let mut acc: TPoly = vec![ring.zero()];
    for c in f.iter().rev() {
        acc = tp_mul(&acc, &zr, ring);
        acc[0] = acc[0].add(c);
    }
    acc
}

/// Quadratic Hensel lift of a coprime monic residue factorization
/// fbar = gbar * hbar to working precision. Returns (G, H) monic with
/// f = G H within precision and G lifting gbar.
pub fn hensel_lift_pair(
    f: &TPoly,
    gbar: &FqPoly,
    hbar: &FqPoly,
    ring: &Arc<TowerRing>,
) -> Result<(TPoly, TPoly)> {
    let ctx = ring.prime.residue_field();
    // Bezout over the residue field
    let (sbar, tbar) = fq_bezout(&ctx, gbar, hbar)?;
    let lift = |p: &FqPoly| -> TPoly {
        p.iter().map(|c| TowerElem::from_residue(ring, c)).collect()
    };
    let mut g = lift(gbar);
    let mut h = lift(hbar);
    let mut s = lift(&sbar);
    let mut t = lift(&tbar);
    let iters = 64 - u64::from(ring.e * ring.prec()).leading_zeros() + 2;
    for _ in 0..iters {
        // e = f - g h
        let e = tp_sub(f, &tp_mul(&g, &h, ring), ring);
        // dg = (t e) rem g;  dh = (e - h dg) quo g
        let te = tp_mul(&t, &e, ring);
        let (_, dg) = tp_divmod_monic(&te, &g, ring);
        let num = tp_sub(&e, &tp_mul(&h, &dg, ring), ring);
        let (dh, _) = tp_divmod_monic(&num, &g, ring);
        g = tp_add(&g, &dg, ring);
        h = tp_add(&h, &dh, ring);
        // refresh Bezout: err = s g + t h - 1
        let mut err = tp_add(&tp_mul(&s, &g, ring), &tp_mul(&t, &h, ring), ring);
        err[0] = err[0].sub(&ring.one());
        let serr = tp_mul(&s, &err, ring);
        let (q2, ds) = tp_divmod_monic(&serr, &h, ring);
        s = tp_sub(&s, &ds, ring);
        let tq = tp_add(&tp_mul(&t, &err, ring), &tp_mul(&q2, &g, ring), ring);
        t = tp_sub(&t, &tq, ring);
        // fix degrees: g stays deg(gbar) monic, h stays deg(hbar) monic
        g.truncate(gbar.len());
        h.truncate(hbar.len());
        *g.last_mut().unwrap() = ring.one();
        *h.last_mut().unwrap() = ring.one();
    }
    Ok((g, h))
}

fn fq_bezout(ctx: &crate::padic::fq::FqCtx, g: &FqPoly, h: &FqPoly) -> Result<(FqPoly, FqPoly)> {
    let mut r0 = g.clone();
    let mut r1 = h.clone();
    let mut s0 = vec![ctx.one()];
    let mut s1: FqPoly = vec![];
    let mut t0: FqPoly = vec![];
    let mut t1 = vec![ctx.one()];
    loop {
        let mut r1t = r1.clone();
        fq::fqp_trim(ctx, &mut r1t);
        if r1t.is_empty() {
            break;
        }
        let (q, rem) = fq::fqp_divmod(ctx, &r0, &r1);
        let s2 = fq::fqp_sub(ctx, &s0, &fq::fqp_mul(ctx, &q, &s1));
        let t2 = fq::fqp_sub(ctx, &t0, &fq::fqp_mul(ctx, &q, &t1));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    let mut r0t = r0.clone();
    fq::fqp_trim(ctx, &mut r0t);
    if r0t.len() != 1 {
        return Err(CoreError::Precondition("residue factors are not coprime".into()));
    }
    let c_inv = ctx.inv(&r0t[0]).unwrap();
    let scale =
        |v: FqPoly| -> FqPoly { v.into_iter().map(|c| ctx.mul(&c, &c_inv)).collect() };
    Ok((scale(s0), scale(t0)))
}

/// One slope factor: all roots share the given valuation.
#[derive(Debug, Clone)]
pub struct SlopeFactor {
    pub slope: Rational64,
    pub factor: TPoly,
}

/// Slope factorization of a monic integral polynomial over the tower:
/// f = X^zero_mult * prod over slopes of the returned factors, ascending.
///
/// Requires every occurring slope to be an integer multiple of 1/e for the
/// ring's e; callers construct the ring from the exact Newton polygon.
pub fn slope_split(f: &TPoly, ring: &Arc<TowerRing>) -> Result<(usize, Vec<SlopeFactor>)> {
    // peel exact zero roots
    let mut start = 0usize;
    while start < f.len() - 1 && matches!(f[start].val(), Val::Infinite) {
        start += 1;
    }
    let zero_mult = start;
    let mut cur: TPoly = f[start..].to_vec();
    let mut out = Vec::new();
    loop {
        let d = tp_deg(&cur);
        if d == 0 {
            break;
        }
        let profile = tower_polygon(&cur, ring)?;
        debug_assert_eq!(profile.infinite, 0, "exact zeros already peeled");
        let (s, m) = profile.slopes[0];
        if profile.slopes.len() == 1 {
            out.push(SlopeFactor { slope: s, factor: cur });
            break;
        }
        if s < Rational64::zero() {
            return Err(CoreError::Precondition("negative slope on integral polynomial".into()));
        }
        let a_num = s * Rational64::from_integer(ring.e as i64);
        if !a_num.is_integer() {
            return Err(CoreError::SlopeSeparation(
                format!("slope {s} needs ramification degree divisible by {}", s.denom()),
                ring.prec(),
            ));
        }
        let a = a_num.to_integer() as u32;
        // scale: phi(Y) = f(w^a Y) / w^(a d)
        let w = ring.uniformizer();
        let phi: TPoly = (0..=d)
            .map(|i| {
                // c_i * w^(a i) / w^(a d)
                let mut c = cur[i].clone();
                c = c.mul(&w.pow((a as u64) * i as u64));
                let shift = w.pow((a as u64) * d as u64);
                c.div(&shift).expect("uniformizer powers invert")
            })
            .collect();
        let phibar = tp_residue(&phi)?;
        let ctx = ring.prime.residue_field();
        // residue must be Y^(d-m) * unit-part of degree m
        for c in phibar.iter().take(d - m) {
            if !ctx.is_zero(c) {
                return Err(CoreError::SlopeSeparation(
                    format!("{s}"),
                    ring.prec() * 2,
                ));
            }
        }
        let ubar: FqPoly = phibar[d - m..].to_vec();
        if ctx.is_zero(&ubar[0]) {
            return Err(CoreError::SlopeSeparation(format!("{s}"), ring.prec() * 2));
        }
        let mut ybar: FqPoly = vec![ctx.zero(); d - m + 1];
        ybar[d - m] = ctx.one();
        let (g, h) = hensel_lift_pair(&phi, &ubar, &ybar, ring)?;
        // unscale: slope-s factor = w^(a m) g(X / w^a); rest = w^(a (d-m)) h(X / w^a)
        let unscale = |q: &TPoly, deg: usize| -> TPoly {
            (0..=deg)
                .map(|i| {
                    let mut c = q[i].clone();
                    c = c.mul(&w.pow((a as u64) * (deg - i) as u64));
                    c
                })
                .collect()
        };
        out.push(SlopeFactor { slope: s, factor: unscale(&g, m) });
        cur = unscale(&h, d - m);
    }
    Ok((zero_mult, out))
}

/// Newton polygon of a tower polynomial. Vertices come from trusted finite
/// valuations; an untrusted coefficient strictly below the hull is an error.
pub fn tower_polygon(f: &TPoly, ring: &Arc<TowerRing>) -> Result<SlopeProfile> {
    let d = tp_deg(f);
    let mut t = 0usize;
    while t < d && matches!(f[t].val(), Val::Infinite) {
        t += 1;
    }
    let mut pts: Vec<(usize, Rational64)> = Vec::new();
    let mut floors: Vec<(usize, Rational64)> = Vec::new();
    for i in t..=d {
        match f[i].val() {
            Val::Finite(v) => pts.push((i, v)),
            Val::Infinite => continue,
            Val::AtLeast(b) => floors.push((i, b)),
        }
    }
    let mut hull: Vec<(usize, Rational64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let lhs = (y2 - y1) * Rational64::from_integer((x - x1) as i64);
            let rhs = (y - y1) * Rational64::from_integer((x2 - x1) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    // every untrusted coefficient must lie on or above the hull
    for &(x, b) in &floors {
        let hull_y = hull_value_at(&hull, x);
        if let Some(hy) = hull_y {
            if b < hy {
                return Err(CoreError::SlopeSeparation(
                    format!("coefficient {x} undetermined at working precision"),
                    ring.prec() * 2,
                ));
            }
        }
    }
    let mut slopes: Vec<(Rational64, usize)> = Vec::new();
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let len = x2 - x1;
        slopes.push((-(y2 - y1) / Rational64::from_integer(len as i64), len));
    }
    slopes.reverse();
    Ok(SlopeProfile { slopes, infinite: t })
}

fn hull_value_at(hull: &[(usize, Rational64)], x: usize) -> Option<Rational64> {
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        if x1 <= x && x <= x2 {
            let t = Rational64::new((x - x1) as i64, (x2 - x1).max(1) as i64);
            return Some(y1 + (y2 - y1) * t);
        }
    }
    None
}

/// Separate a monic polynomial whose residue is nonvanishing at 0 into
/// factors with pairwise distinct irreducible residue supports.
pub fn residue_split(f: &TPoly, ring: &Arc<TowerRing>) -> Result<Vec<TPoly>> {
    let ctx = ring.prime.residue_field();
    let fbar = tp_residue(f)?;
    let factors = fq::fqp_factor(&ctx, &fbar);
    if factors.len() <= 1 {
        return Ok(vec![f.clone()]);
    }
    let mut out = Vec::new();
    let mut cur = f.clone();
    for (idx, (irr, mult)) in factors.iter().enumerate() {
        if idx == factors.len() - 1 {
            out.push(cur);
            break;
        }
        // cluster = irr^mult, cofactor = rest
        let mut cluster = vec![ctx.one()];
        for _ in 0..*mult {
            cluster = fq::fqp_mul(&ctx, &cluster, irr);
        }
        let curbar = tp_residue(&cur)?;
        let cofactor = fq::fqp_divmod(&ctx, &curbar, &cluster).0;
        let (g, h) = hensel_lift_pair(&cur, &cluster, &cofactor, ring)?;
        out.push(g);
        cur = h;
    }
    Ok(out)
}

/// All roots of a monic squarefree integral polynomial that lie in the tower,
/// by slope splitting, residue separation, Newton refinement, and recursive
/// shifting for clustered residues. Roots outside the tower (residue degree
/// above 1) are an error, as is exceeding the recursion cap.
pub fn tower_roots(f: &TPoly, ring: &Arc<TowerRing>, cap: usize) -> Result<Vec<TowerElem>> {
    let mut roots = Vec::new();
    roots_inner(f, ring, cap, 0, &mut roots)?;
    Ok(roots)
}

fn roots_inner(
    f: &TPoly,
    ring: &Arc<TowerRing>,
    cap: usize,
    depth: u32,
    roots: &mut Vec<TowerElem>,
) -> Result<()> {
    if depth > ring.prec() * ring.e {
        return Err(CoreError::PrecisionExhausted { needed: 2 * ring.prec(), have: ring.prec() });
    }
    let (zero_mult, factors) = slope_split(f, ring)?;
    for _ in 0..zero_mult {
        roots.push(ring.zero());
    }
    let w = ring.uniformizer();
    for sf in factors {
        let d = tp_deg(&sf.factor);
        let a_num = sf.slope * Rational64::from_integer(ring.e as i64);
        if !a_num.is_integer() {
            return Err(CoreError::RootsOutsideTower { cap });
        }
        let a = a_num.to_integer() as u64;
        // scale to unit roots
        let phi: TPoly = (0..=d)
            .map(|i| {
                let c = sf.factor[i].mul(&w.pow(a * i as u64));
                c.div(&w.pow(a * d as u64)).expect("uniformizer invertible")
            })
            .collect();
        for cluster in residue_split(&phi, ring)? {
            let ctx = ring.prime.residue_field();
            let cbar = tp_residue(&cluster)?;
            let irr = fq::fqp_factor(&ctx, &cbar);
            debug_assert_eq!(irr.len(), 1, "cluster has a single residue support");
            let (base, mult) = &irr[0];
            if base.len() - 1 > 1 {
                return Err(CoreError::RootsOutsideTower { cap });
            }
            let rbar = ctx.neg(&base[0]);
            let r = TowerElem::from_residue(ring, &rbar);
            if *mult == 1 {
                // simple residue root: Newton iteration
                let mut x = r;
                let deriv = tp_derivative(&cluster, ring);
                let iters = 64 - u64::from(ring.e * ring.prec()).leading_zeros() + 2;
                for _ in 0..iters {
                    let fx = tp_eval(&cluster, &x, ring);
                    let dfx = tp_eval(&deriv, &x, ring);
                    x = x.sub(&fx.div(&dfx)?);
                }
                roots.push(x.mul(&w.pow(a)));
            } else {
                // clustered: shift and recurse on roots of positive valuation
                let shifted = tp_compose_shift(&cluster, &r, ring);
                let mut sub = Vec::new();
                roots_inner(&shifted, ring, cap, depth + 1, &mut sub)?;
                for z in sub {
                    roots.push(r.add(&z).mul(&w.pow(a)));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::prime::choose_prime_above_p;

    fn ring(p: u64, prec: u32, e: u32) -> Arc<TowerRing> {
        TowerRing::new(choose_prime_above_p(1, p, prec).unwrap(), e)
    }

    fn int_poly(ring: &Arc<TowerRing>, coeffs: &[i64]) -> TPoly {
        coeffs.iter().map(|&c| ring.from_i64(c)).collect()
    }

    fn assert_product(f: &TPoly, parts: &[&TPoly], ring: &Arc<TowerRing>, guard: i64) {
        let mut prod = vec![ring.one()];
        for p in parts {
            prod = tp_mul(&prod, p, ring);
        }
        for i in 0..f.len() {
            let diff = f[i].sub(&prod[i]);
            assert!(
                diff.val().at_least(Rational64::new(guard, 1)).unwrap(),
                "coefficient {i} differs: {:?}",
                diff.val()
            );
        }
    }

    #[test]
    fn hensel_splits_unit_quadratic() {
        let r = ring(5, 24, 1);
        // (X-1)(X-2) = X^2 - 3X + 2
        let f = int_poly(&r, &[2, -3, 1]);
        let ctx = r.prime.residue_field();
        let gbar = vec![ctx.from_u64(4), ctx.one()]; // X - 1
        let hbar = vec![ctx.from_u64(3), ctx.one()]; // X - 2
        let (g, h) = hensel_lift_pair(&f, &gbar, &hbar, &r).unwrap();
        assert_product(&f, &[&g, &h], &r, 20);
        // g(1) = 0 within precision
        let v = tp_eval(&g, &r.from_i64(1), &r).val();
        assert!(v.at_least(Rational64::new(20, 1)).unwrap());
    }

    #[test]
    fn slope_split_on_252_quadratic() {
        // X^2 - 252X + 3^11: slopes 2 and 9 at p = 3
        let r = ring(3, 40, 1);
        let f = int_poly(&r, &[177147, -252, 1]);
        let (zeros, factors) = slope_split(&f, &r).unwrap();
        assert_eq!(zeros, 0);
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].slope, Rational64::new(2, 1));
        assert_eq!(factors[1].slope, Rational64::new(9, 1));
        let parts: Vec<&TPoly> = factors.iter().map(|s| &s.factor).collect();
        assert_product(&f, &parts, &r, 30);
        // each factor is linear with root valuation equal to the slope
        for sf in &factors {
            assert_eq!(tp_deg(&sf.factor), 1);
            let root = sf.factor[0].neg();
            assert_eq!(root.val().as_finite().unwrap(), sf.slope);
        }
    }

    #[test]
    fn slope_split_with_zero_roots() {
        // X^2 (X - 3): one exact zero root pair + slope 1
        let r = ring(3, 30, 1);
        let f = int_poly(&r, &[0, 0, -3, 1]);
        let (zeros, factors) = slope_split(&f, &r).unwrap();
        assert_eq!(zeros, 2);
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].slope, Rational64::new(1, 1));
    }

    #[test]
    fn fractional_slope_needs_ramified_ring() {
        // X^2 - 3: slope 1/2; with e = 2 it splits into two linear factors
        let r1 = ring(3, 30, 1);
        let f1 = int_poly(&r1, &[-3, 0, 1]);
        let (_, factors) = slope_split(&f1, &r1).unwrap();
        // a single pure-slope factor at e = 1 (cannot separate)
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].slope, Rational64::new(1, 2));

        let r2 = ring(3, 30, 2);
        let f2 = int_poly(&r2, &[-3, 0, 1]);
        let roots = tower_roots(&f2, &r2, 4).unwrap();
        assert_eq!(roots.len(), 2);
        for root in &roots {
            assert_eq!(root.val().as_finite().unwrap(), Rational64::new(1, 2));
            let check = tp_eval(&f2, root, &r2).val();
            assert!(check.at_least(Rational64::new(25, 1)).unwrap());
        }
    }

    #[test]
    fn roots_with_congruent_residues_split_by_shifting() {
        // (X - 1)(X - 1 - 3^4) at p = 3: same residue, separated at depth 4
        let r = ring(3, 40, 1);
        let a = r.from_i64(1);
        let b = r.from_i64(1 + 81);
        let f = vec![a.mul(&b), a.add(&b).neg(), r.one()];
        let roots = tower_roots(&f, &r, 4).unwrap();
        assert_eq!(roots.len(), 2);
        let mut vals: Vec<Rational64> = roots
            .iter()
            .map(|x| x.sub(&r.from_i64(1)).val().as_finite().unwrap_or(Rational64::new(99, 1)))
            .collect();
        vals.sort();
        assert_eq!(vals[0], Rational64::new(0, 1).max(Rational64::new(4, 1)).min(vals[0]));
        // one root is 1 (difference >= precision), the other differs by 3^4
        let diffs: Vec<Val> = roots.iter().map(|x| x.sub(&r.from_i64(1)).val()).collect();
        assert!(diffs.iter().any(|v| matches!(v, Val::AtLeast(_) | Val::Infinite)
            || v.as_finite().map(|f| f >= Rational64::new(30, 1)).unwrap_or(false)));
        assert!(diffs
            .iter()
            .any(|v| v.as_finite().map(|f| f == Rational64::new(4, 1)).unwrap_or(false)));
    }

    #[test]
    fn residue_degree_two_root_is_outside() {
        // X^2 + X + 1 is irreducible mod 5: roots live in F_25, not the tower
        let r = ring(5, 20, 1);
        let f = int_poly(&r, &[1, 1, 1]);
        match tower_roots(&f, &r, 3) {
            Err(CoreError::RootsOutsideTower { .. }) => {}
            other => panic!("expected RootsOutsideTower, got {other:?}"),
        }
    }

    #[test]
    fn eval_mat_matches_scalar_on_diagonal() {
        use crate::linalg::matrix::Mat;
        let r = ring(3, 20, 1);
        let f = int_poly(&r, &[2, 0, 1]); // X^2 + 2
        let m = Mat::from_rows(
            vec![
                vec![r.from_i64(3), r.from_i64(1)],
                vec![r.zero(), r.from_i64(5)],
            ],
            r.zero(),
        );
        let fm = tp_eval_mat(&f, &m, &r);
        let d0 = tp_eval(&f, &r.from_i64(3), &r);
        let d1 = tp_eval(&f, &r.from_i64(5), &r);
        assert!(fm.at(0, 0).sub(&d0).val().at_least(Rational64::new(15, 1)).unwrap());
        assert!(fm.at(1, 1).sub(&d1).val().at_least(Rational64::new(15, 1)).unwrap());
    }
}


