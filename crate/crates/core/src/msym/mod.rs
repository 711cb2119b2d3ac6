//! Finite presentations of weight-k, level-M, nebentypus-chi modular forms
//! through Manin symbols: generators are (monomial, P^1 class) pairs, the
//! standard two- and three-term relations are solved exactly over Q(zeta),
//! and every Hecke-side matrix is read off the quotient.

pub mod boundary;
pub mod cache;
pub mod dimensions;
pub mod eta;
pub mod heilbronn;
pub mod operators;
pub mod p1;
pub mod symbol;

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::OnceCell;

use crate::error::{CoreError, Result};
use crate::linalg::matrix::Mat;
use crate::padic::cyclotomic::CycElem;
use crate::padic::dirichlet::DirichletCharacter;
use crate::padic::is_prime;
use crate::weight::GL2;
use p1::P1Table;

/// Configuration of a working level: tame level N, odd prime p, the working
/// level M, weight, and character.
#[derive(Debug, Clone)]
pub struct LevelSpec {
    pub tame: u64,
    pub p: u64,
    pub level: u64,
    pub weight: u32,
    pub chi: DirichletCharacter,
}

impl LevelSpec {
    pub fn new(tame: u64, p: u64, level: u64, weight: u32, chi: DirichletCharacter) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return Err(CoreError::Precondition(format!("p = {p} must be an odd prime")));
        }
        if num_integer::gcd(tame, p) != 1 {
            return Err(CoreError::Precondition("gcd(N, p) must be 1".into()));
        }
        if weight < 2 {
            return Err(CoreError::Precondition("weight must be at least 2".into()));
        }
        Ok(LevelSpec { tame, p, level, weight, chi })
    }
}

pub type SparseVec = Vec<(usize, CycElem)>;

fn sparse_add_into(acc: &mut HashMap<usize, CycElem>, v: &SparseVec, scale: &CycElem) {
    for (i, c) in v {
        let t = c.mul(scale);
        match acc.get_mut(i) {
            Some(cur) => *cur = cur.add(&t),
            None => {
                acc.insert(*i, t);
            }
        }
    }
}

fn sparse_from_map(m: HashMap<usize, CycElem>) -> SparseVec {
    let mut v: SparseVec = m.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by_key(|(i, _)| *i);
    v
}

/// A built space of Manin symbols with its relation quotient.
pub struct ManinSpace {
    pub level: u64,
    pub weight: u32,
    pub chi: DirichletCharacter,
    /// cyclotomic order of all matrix entries
    pub order: u64,
    pub p1: P1Table,
    /// number of degree-(k-2) monomials, = k-1
    pub monomials: usize,
    pub dim: usize,
    /// generator index of each basis element
    pub basis_gens: Vec<usize>,
    /// generator -> coordinates in the basis
    proj: Vec<SparseVec>,
    /// the two- and three-term relation rows (generator coordinates), kept
    /// for the mechanical boundary quotient
    relation_rows: Vec<SparseVec>,
    /// zero space (parity mismatch) marker
    pub parity_zero: bool,
    op_cache: Mutex<HashMap<String, Mat<CycElem>>>,
    star_cell: OnceCell<Mat<CycElem>>,
    boundary_cell: OnceCell<boundary::BoundaryData>,
    proj_q_cell: OnceCell<Vec<Vec<(usize, BigRational)>>>,
}

impl std::fmt::Debug for ManinSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ManinSpace(level={}, weight={}, chi={}, dim={})",
            self.level,
            self.weight,
            self.chi.key(),
            self.dim
        )
    }
}

/// Build the Manin-symbol model of weight-k, level-M, character-chi forms.
///
/// A parity mismatch (chi(-1) != (-1)^k) yields the zero space with a
/// diagnostic flag rather than an error.
pub fn build_space(level: u64, weight: u32, chi: &DirichletCharacter) -> Result<ManinSpace> {
    if weight < 2 {
        return Err(CoreError::Precondition("weight must be at least 2".into()));
    }
    if chi.modulus != level && level % chi.modulus != 0 {
        return Err(CoreError::Precondition("character modulus must divide the level".into()));
    }
    let chi = if chi.modulus == level { chi.clone() } else { chi.extend_to(level)? };
    let order = chi.order;
    let p1 = P1Table::new(level);
    let k2 = weight - 2;
    let monomials = k2 as usize + 1;
    let gens = p1.len() * monomials;

    let parity_zero = chi.parity() != if weight % 2 == 0 { 1 } else { -1 };

    let space_stub = |dim, basis_gens, proj, relation_rows| ManinSpace {
        level,
        weight,
        chi: chi.clone(),
        order,
        p1: p1.clone(),
        monomials,
        dim,
        basis_gens,
        proj,
        relation_rows,
        parity_zero,
        op_cache: Mutex::new(HashMap::new()),
        star_cell: OnceCell::new(),
        boundary_cell: OnceCell::new(),
        proj_q_cell: OnceCell::new(),
    };

    if parity_zero {
        // every symbol dies against the unit -1
        return Ok(space_stub(0, vec![], vec![vec![]; gens], vec![]));
    }

    // assemble relation rows x + x sigma and x + x tau + x tau^2
    let sigma: GL2 = [0, -1, 1, 0];
    let tau: GL2 = [0, -1, 1, -1];
    let mut rows: Vec<SparseVec> = Vec::with_capacity(2 * gens);
    for g in 0..gens {
        let (m, i) = (g % monomials, g / monomials);
        {
            let mut acc: HashMap<usize, CycElem> = HashMap::new();
            acc.insert(g, CycElem::one(order));
            let img = act_gen_raw(&p1, &chi, order, k2, &sigma, m, i);
            sparse_add_into(&mut acc, &img, &CycElem::one(order));
            let row = sparse_from_map(acc);
            if !row.is_empty() {
                rows.push(row);
            }
        }
        {
            let mut acc: HashMap<usize, CycElem> = HashMap::new();
            acc.insert(g, CycElem::one(order));
            let t1 = act_gen_raw(&p1, &chi, order, k2, &tau, m, i);
            sparse_add_into(&mut acc, &t1, &CycElem::one(order));
            let tau2 = crate::weight::mat_mul(&tau, &tau);
            let t2 = act_gen_raw(&p1, &chi, order, k2, &tau2, m, i);
            sparse_add_into(&mut acc, &t2, &CycElem::one(order));
            let row = sparse_from_map(acc);
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }

    let (dim, basis_gens, proj) = solve_relations(gens, &rows, order)?;
    Ok(space_stub(dim, basis_gens, proj, rows))
}

/// Right action of an integral matrix with positive determinant on the
/// generator (monomial m, P^1 index i), expressed in generator coordinates.
/// Imprimitive image pairs are dropped (the Heilbronn convention).
pub(crate) fn act_gen_raw(
    p1: &P1Table,
    chi: &DirichletCharacter,
    order: u64,
    k2: u32,
    g: &GL2,
    m: usize,
    i: usize,
) -> SparseVec {
    let (c, d) = p1.reps[i];
    let (a, b, cg, dg) = (g[0], g[1], g[2], g[3]);
    let cp = c as i64 * a + d as i64 * cg;
    let dp = c as i64 * b + d as i64 * dg;
    let Some((idx, u)) = p1.normalize(cp, dp) else {
        return vec![];
    };
    // the model twist is the conjugate character, so the scalar-type
    // double coset T(n, n) acts as chi(n) n^(k-2) in the paper orientation
    let chi_u = chi.eval_conj(u as i64).promote(order).expect("order divides");
    if chi_u.is_zero() {
        return vec![];
    }
    // polynomial part: X^(k2-m) Y^m with X -> aX + bY, Y -> cg X + dg Y
    let s = k2 as usize - m;
    let p1poly = binom_pows(a, b, s);
    let p2poly = binom_pows(cg, dg, m);
    let monomials = k2 as usize + 1;
    let mut out: Vec<(usize, CycElem)> = Vec::new();
    let mut dense = vec![BigInt::zero(); monomials];
    for (j1, c1) in p1poly.iter().enumerate() {
        if c1.is_zero() {
            continue;
        }
        for (j2, c2) in p2poly.iter().enumerate() {
            if !c2.is_zero() {
                dense[j1 + j2] += c1 * c2;
            }
        }
    }
    for (mm, coeff) in dense.into_iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let gen = idx * monomials + mm;
        let val = chi_u.scale(&BigRational::from_integer(coeff));
        out.push((gen, val));
    }
    out
}

/// Coefficients of (u X + w Y)^n on Y-degree 0..n.
fn binom_pows(u: i64, w: i64, n: usize) -> Vec<BigInt> {
    let ub = BigInt::from(u);
    let wb = BigInt::from(w);
    let mut out = Vec::with_capacity(n + 1);
    let mut binom = BigInt::one();
    let mut upow = vec![BigInt::one()];
    let mut wpow = vec![BigInt::one()];
    for j in 0..n {
        upow.push(&upow[j] * &ub);
        wpow.push(&wpow[j] * &wb);
    }
    for j in 0..=n {
        if j > 0 {
            binom = binom * BigInt::from((n - j + 1) as u64) / BigInt::from(j as u64);
        }
        out.push(&binom * &upow[n - j] * &wpow[j]);
    }
    out
}

/// Solve the relation system: returns (dim, basis generator indices,
/// per-generator coordinates). Two-term rows are folded by a union-find
/// with coefficients; the remaining rows go through sparse elimination with
/// content stripping.
fn solve_relations(
    gens: usize,
    rows: &[SparseVec],
    order: u64,
) -> Result<(usize, Vec<usize>, Vec<SparseVec>)> {
    if order == 1 {
        return solve_relations_q(gens, rows);
    }
    let mut glue = Glue::new(gens, order);
    let mut general: Vec<&SparseVec> = Vec::new();
    for row in rows {
        match row.len() {
            0 => {}
            1 => glue.set_zero_gen(row[0].0),
            2 => {
                // a x + b y = 0  =>  x = (-b/a) y
                let (x, a) = (row[0].0, &row[0].1);
                let (y, b) = (row[1].0, &row[1].1);
                let c = b.neg().mul(&a.inverse()?);
                glue.relate(x, &c, y)?;
            }
            _ => general.push(row),
        }
    }

    // map the general rows through the gluing and eliminate
    let mut pivot_of_var: HashMap<usize, usize> = HashMap::new();
    let mut pivot_rows: Vec<SparseVec> = Vec::new();
    for row in general {
        let mut acc: HashMap<usize, CycElem> = HashMap::new();
        for (g, coeff) in row {
            match glue.resolve(*g) {
                None => {}
                Some((root, c)) => {
                    let t = coeff.mul(&c);
                    match acc.get_mut(&root) {
                        Some(cur) => *cur = cur.add(&t),
                        None => {
                            acc.insert(root, t);
                        }
                    }
                }
            }
        }
        let mut cur = sparse_from_map(acc);
        strip_content(&mut cur, order);
        loop {
            cur.retain(|(_, c)| !c.is_zero());
            let Some(&(var, _)) = cur.first() else { break };
            match pivot_of_var.get(&var) {
                Some(&ridx) => {
                    cur = row_reduce(&cur, &pivot_rows[ridx]);
                    strip_content(&mut cur, order);
                }
                None => {
                    if cur.len() == 1 {
                        glue.set_zero_root(var);
                        break;
                    }
                    pivot_of_var.insert(var, pivot_rows.len());
                    pivot_rows.push(cur);
                    break;
                }
            }
        }
    }

    // normalize pivot leads to 1, then a single descending pass
    for row in pivot_rows.iter_mut() {
        let inv = row[0].1.inverse()?;
        for (_, c) in row.iter_mut() {
            *c = c.mul(&inv);
        }
    }
    let mut row_order: Vec<usize> = (0..pivot_rows.len()).collect();
    row_order.sort_by_key(|&r| std::cmp::Reverse(pivot_rows[r][0].0));
    for &r in &row_order {
        let pivot_var = pivot_rows[r][0].0;
        let mut acc: HashMap<usize, CycElem> = HashMap::new();
        let entries = pivot_rows[r].clone();
        for (var, coeff) in entries {
            if var == pivot_var {
                acc.insert(var, coeff);
                continue;
            }
            if glue.is_zero_root(var) {
                continue;
            }
            if let Some(&ridx) = pivot_of_var.get(&var) {
                // substitute the already-reduced higher row: its pivot has
                // coefficient 1 and the row is a zero-form, so
                // var = -(rest of the row)
                for (v2, c2) in &pivot_rows[ridx] {
                    if *v2 == var {
                        continue;
                    }
                    let t = coeff.mul(c2).neg();
                    match acc.get_mut(v2) {
                        Some(cur) => *cur = cur.add(&t),
                        None => {
                            acc.insert(*v2, t);
                        }
                    }
                }
            } else {
                match acc.get_mut(&var) {
                    Some(cur) => *cur = cur.add(&coeff),
                    None => {
                        acc.insert(var, coeff);
                    }
                }
            }
        }
        pivot_rows[r] = sparse_from_map(acc);
    }

    // free variables: glue roots that are neither zero nor pivots
    let mut basis_gens: Vec<usize> = Vec::new();
    let mut basis_index: HashMap<usize, usize> = HashMap::new();
    for g in 0..gens {
        if glue.root_of(g) == Some(g)
            && !glue.is_zero_root(g)
            && !pivot_of_var.contains_key(&g)
        {
            basis_index.insert(g, basis_gens.len());
            basis_gens.push(g);
        }
    }
    let dim = basis_gens.len();

    let mut proj: Vec<SparseVec> = Vec::with_capacity(gens);
    for g in 0..gens {
        let Some((root, c)) = glue.resolve(g) else {
            proj.push(vec![]);
            continue;
        };
        if let Some(&b) = basis_index.get(&root) {
            proj.push(vec![(b, c)]);
        } else if let Some(&ridx) = pivot_of_var.get(&root) {
            let mut v: SparseVec = Vec::new();
            for (var, coeff) in &pivot_rows[ridx] {
                if *var == root || glue.is_zero_root(*var) {
                    continue;
                }
                let b = *basis_index
                    .get(var)
                    .expect("back-substituted rows touch only free variables");
                v.push((b, c.mul(&coeff.neg())));
            }
            v.sort_by_key(|(i, _)| *i);
            proj.push(v);
        } else {
            // zeroed root discovered during elimination
            proj.push(vec![]);
        }
    }
    Ok((dim, basis_gens, proj))
}

/// pivot_lead * cur - cur_lead * pivot, by sorted merge (division-free;
/// the shared leading position cancels).
fn row_reduce(cur: &SparseVec, pivot: &SparseVec) -> SparseVec {
    let a = pivot[0].1.clone();
    let b = cur[0].1.neg();
    let mut out: SparseVec = Vec::with_capacity(cur.len() + pivot.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < cur.len() || j < pivot.len() {
        if j >= pivot.len() || (i < cur.len() && cur[i].0 < pivot[j].0) {
            out.push((cur[i].0, a.mul(&cur[i].1)));
            i += 1;
        } else if i >= cur.len() || pivot[j].0 < cur[i].0 {
            out.push((pivot[j].0, b.mul(&pivot[j].1)));
            j += 1;
        } else {
            let v = a.mul(&cur[i].1).add(&b.mul(&pivot[j].1));
            if !v.is_zero() {
                out.push((cur[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// For rational rows, rescale so entries are coprime integers with positive
/// leading coefficient; keeps integer sizes small through the elimination.
/// Cyclotomic rows are left as they are (those spaces are tiny).
fn strip_content(row: &mut SparseVec, order: u64) {
    use num_bigint::BigInt as BI;
    use num_traits::Signed;
    if order != 1 || row.is_empty() {
        return;
    }
    let mut den = BI::one();
    for (_, c) in row.iter() {
        let r = c.as_rational().expect("order-1 entries are rational");
        den = num_integer::lcm(den, r.denom().clone());
    }
    let mut num_gcd = BI::zero();
    for (_, c) in row.iter() {
        let r = c.as_rational().unwrap();
        let scaled = r.numer() * (&den / r.denom());
        num_gcd = num_integer::gcd(num_gcd, scaled);
    }
    if num_gcd.is_zero() {
        return;
    }
    if row[0].1.as_rational().unwrap().is_negative() {
        num_gcd = -num_gcd;
    }
    let scale = BigRational::new(den, num_gcd);
    if scale == BigRational::one() {
        return;
    }
    for (_, c) in row.iter_mut() {
        *c = c.scale(&scale);
    }
}

/// Rational specialization of the solver: identical algorithm, but rows are
/// content-one integer vectors and the gluing works over plain rationals.
/// This is the path every trivial-character (and real-character) space at
/// serious weight goes through.
fn solve_relations_q(
    gens: usize,
    rows: &[SparseVec],
) -> Result<(usize, Vec<usize>, Vec<SparseVec>)> {
    use num_bigint::BigInt as BI;
    type QRow = Vec<(usize, BI)>;

    // union-find over rationals
    let mut parent: Vec<usize> = (0..gens).collect();
    let mut coeff: Vec<BigRational> = vec![BigRational::one(); gens];
    let mut zero = vec![false; gens];

    fn find(
        parent: &mut Vec<usize>,
        coeff: &mut Vec<BigRational>,
        g: usize,
    ) -> (usize, BigRational) {
        if parent[g] == g {
            return (g, coeff[g].clone());
        }
        let (root, c) = find(parent, coeff, parent[g]);
        let total = &coeff[g] * &c;
        parent[g] = root;
        coeff[g] = total.clone();
        (root, total)
    }

    let as_q = |c: &CycElem| -> BigRational { c.as_rational().expect("order-1 entry") };

    let mut general: Vec<&SparseVec> = Vec::new();
    for row in rows {
        match row.len() {
            0 => {}
            1 => {
                let (r, _) = find(&mut parent, &mut coeff, row[0].0);
                zero[r] = true;
            }
            2 => {
                let (x, a) = (row[0].0, as_q(&row[0].1));
                let (y, b) = (row[1].0, as_q(&row[1].1));
                let c = -b / a;
                let (rx, cx) = find(&mut parent, &mut coeff, x);
                let (ry, cy) = find(&mut parent, &mut coeff, y);
                if zero[rx] {
                    if !zero[ry] {
                        zero[ry] = true;
                    }
                    continue;
                }
                if zero[ry] {
                    zero[rx] = true;
                    continue;
                }
                let rhs = &c * &cy;
                if rx == ry {
                    if cx != rhs {
                        zero[rx] = true;
                    }
                    continue;
                }
                let (keep, drop, k_c, d_c) =
                    if rx < ry { (rx, ry, cx, rhs) } else { (ry, rx, rhs, cx) };
                parent[drop] = keep;
                coeff[drop] = k_c / d_c;
            }
            _ => general.push(row),
        }
    }

    // strip a rational row to content-one integers, positive lead
    let strip = |m: HashMap<usize, BigRational>| -> QRow {
        let mut den = BI::one();
        for v in m.values() {
            if !v.is_zero() {
                den = num_integer::lcm(den, v.denom().clone());
            }
        }
        let mut row: QRow = m
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.numer() * (&den / v.denom())))
            .collect();
        row.sort_by_key(|(i, _)| *i);
        let mut g = BI::zero();
        for (_, v) in &row {
            g = num_integer::gcd(g, v.clone());
        }
        if g > BI::one() {
            for (_, v) in row.iter_mut() {
                *v = &*v / &g;
            }
        }
        if row.first().map(|(_, v)| v < &BI::zero()).unwrap_or(false) {
            for (_, v) in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row
    };

    let mut pivot_of_var: HashMap<usize, usize> = HashMap::new();
    let mut pivot_rows: Vec<QRow> = Vec::new();
    for row in general {
        let mut acc: HashMap<usize, BigRational> = HashMap::new();
        for (g, c) in row {
            let (root, rc) = find(&mut parent, &mut coeff, *g);
            if zero[root] {
                continue;
            }
            let t = as_q(c) * rc;
            *acc.entry(root).or_insert_with(BigRational::zero) += t;
        }
        let mut cur = strip(acc);
        loop {
            let Some(&(var, _)) = cur.first() else { break };
            match pivot_of_var.get(&var) {
                Some(&ridx) => {
                    // cross-multiply reduce with inline content tracking
                    let piv = &pivot_rows[ridx];
                    let a = piv[0].1.clone();
                    let b = -cur[0].1.clone();
                    let mut out: QRow = Vec::with_capacity(cur.len() + piv.len());
                    let mut g = BI::zero();
                    let (mut i, mut j) = (0usize, 0usize);
                    while i < cur.len() || j < piv.len() {
                        let entry = if j >= piv.len()
                            || (i < cur.len() && cur[i].0 < piv[j].0)
                        {
                            let e = (cur[i].0, &a * &cur[i].1);
                            i += 1;
                            e
                        } else if i >= cur.len() || piv[j].0 < cur[i].0 {
                            let e = (piv[j].0, &b * &piv[j].1);
                            j += 1;
                            e
                        } else {
                            let e = (cur[i].0, &a * &cur[i].1 + &b * &piv[j].1);
                            i += 1;
                            j += 1;
                            e
                        };
                        if !entry.1.is_zero() {
                            g = num_integer::gcd(g, entry.1.clone());
                            out.push(entry);
                        }
                    }
                    if g > BI::one() {
                        for (_, v) in out.iter_mut() {
                            *v = &*v / &g;
                        }
                    }
                    if out.first().map(|(_, v)| v < &BI::zero()).unwrap_or(false) {
                        for (_, v) in out.iter_mut() {
                            *v = -v.clone();
                        }
                    }
                    cur = out;
                }
                None => {
                    if cur.len() == 1 {
                        zero[var] = true;
                        break;
                    }
                    pivot_of_var.insert(var, pivot_rows.len());
                    pivot_rows.push(cur);
                    break;
                }
            }
        }
    }

    // normalize to pivot lead 1 over Q and back-substitute descending
    let mut qrows: Vec<Vec<(usize, BigRational)>> = pivot_rows
        .iter()
        .map(|r| {
            let lead = BigRational::from_integer(r[0].1.clone());
            r.iter()
                .map(|(i, v)| (*i, BigRational::from_integer(v.clone()) / &lead))
                .collect()
        })
        .collect();
    let mut row_order: Vec<usize> = (0..qrows.len()).collect();
    row_order.sort_by_key(|&r| std::cmp::Reverse(qrows[r][0].0));
    for &r in &row_order {
        let pivot_var = qrows[r][0].0;
        let mut acc: HashMap<usize, BigRational> = HashMap::new();
        for (var, c) in qrows[r].clone() {
            if var == pivot_var {
                acc.insert(var, c);
                continue;
            }
            if zero[var] {
                continue;
            }
            if let Some(&ridx) = pivot_of_var.get(&var) {
                for (v2, c2) in &qrows[ridx] {
                    if *v2 == var {
                        continue;
                    }
                    let t = -(&c * c2);
                    *acc.entry(*v2).or_insert_with(BigRational::zero) += t;
                }
            } else {
                *acc.entry(var).or_insert_with(BigRational::zero) += c;
            }
        }
        let mut v: Vec<(usize, BigRational)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_by_key(|(i, _)| *i);
        qrows[r] = v;
    }

    let mut basis_gens: Vec<usize> = Vec::new();
    let mut basis_index: HashMap<usize, usize> = HashMap::new();
    for g in 0..gens {
        if parent[g] == g && !zero[g] && !pivot_of_var.contains_key(&g) {
            basis_index.insert(g, basis_gens.len());
            basis_gens.push(g);
        }
    }
    let dim = basis_gens.len();

    let mut proj: Vec<SparseVec> = Vec::with_capacity(gens);
    for g in 0..gens {
        let (root, c) = find(&mut parent, &mut coeff, g);
        if zero[root] {
            proj.push(vec![]);
            continue;
        }
        if let Some(&b) = basis_index.get(&root) {
            proj.push(vec![(b, CycElem::from_rational(1, c))]);
        } else if let Some(&ridx) = pivot_of_var.get(&root) {
            let mut v: SparseVec = Vec::new();
            for (var, cf) in &qrows[ridx] {
                if *var == root || zero[*var] {
                    continue;
                }
                let b = *basis_index.get(var).expect("reduced rows touch free vars");
                v.push((b, CycElem::from_rational(1, -(&c * cf))));
            }
            v.sort_by_key(|(i, _)| *i);
            proj.push(v);
        } else {
            proj.push(vec![]);
        }
    }
    Ok((dim, basis_gens, proj))
}

/// Union-find with coefficients: each generator resolves to coeff * root or
/// to zero.
struct Glue {
    parent: Vec<usize>,
    coeff: Vec<CycElem>,
    zero: Vec<bool>,
    order: u64,
}

impl Glue {
    fn new(n: usize, order: u64) -> Self {
        Glue {
            parent: (0..n).collect(),
            coeff: vec![CycElem::one(order); n],
            zero: vec![false; n],
            order,
        }
    }

    fn find(&mut self, g: usize) -> (usize, CycElem) {
        if self.parent[g] == g {
            return (g, self.coeff[g].clone());
        }
        let (root, c) = self.find(self.parent[g]);
        let total = self.coeff[g].mul(&c);
        self.parent[g] = root;
        self.coeff[g] = total.clone();
        (root, total)
    }

    fn resolve(&mut self, g: usize) -> Option<(usize, CycElem)> {
        let (root, c) = self.find(g);
        if self.zero[root] || c.is_zero() {
            None
        } else {
            Some((root, c))
        }
    }

    fn root_of(&mut self, g: usize) -> Option<usize> {
        let (root, _) = self.find(g);
        if self.zero[root] {
            None
        } else {
            Some(root)
        }
    }

    fn is_zero_root(&self, root: usize) -> bool {
        self.zero[root]
    }

    fn set_zero_gen(&mut self, g: usize) {
        let (root, _) = self.find(g);
        self.zero[root] = true;
    }

    fn set_zero_root(&mut self, root: usize) {
        self.zero[root] = true;
    }

    /// impose x = c * y
    fn relate(&mut self, x: usize, c: &CycElem, y: usize) -> Result<()> {
        let (rx, cx) = self.find(x);
        let (ry, cy) = self.find(y);
        if self.zero[rx] {
            if !self.zero[ry] && !c.is_zero() {
                // 0 = c cy ry
                self.zero[ry] = true;
            }
            return Ok(());
        }
        if self.zero[ry] {
            self.zero[rx] = true;
            return Ok(());
        }
        // cx rx = c cy ry
        let rhs = c.mul(&cy);
        if rx == ry {
            if cx != rhs {
                self.zero[rx] = true;
            }
            return Ok(());
        }
        // attach the larger root under the smaller for determinism
        let (keep, drop, k_c, d_c) =
            if rx < ry { (rx, ry, cx, rhs) } else { (ry, rx, rhs, cx) };
        // d_c * drop = k_c * keep  =>  drop = (k_c / d_c) keep
        let ratio = k_c.mul(&d_c.inverse()?);
        self.parent[drop] = keep;
        self.coeff[drop] = ratio;
        let _ = self.order;
        Ok(())
    }
}

impl ManinSpace {
    /// Coordinates of a generator in the quotient basis.
    pub fn project_gen(&self, gen: usize) -> &SparseVec {
        &self.proj[gen]
    }

    pub fn k2(&self) -> u32 {
        self.weight - 2
    }

    pub(crate) fn relation_rows(&self) -> &[SparseVec] {
        &self.relation_rows
    }

    /// Rational projection table (trivial character only), built lazily.
    pub(crate) fn proj_q(&self) -> &Vec<Vec<(usize, BigRational)>> {
        debug_assert_eq!(self.order, 1);
        self.proj_q_cell.get_or_init(|| {
            self.proj
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(b, c)| (*b, c.as_rational().expect("order-1 entry")))
                        .collect()
                })
                .collect()
        })
    }

    /// Apply an integral positive-determinant matrix to a basis element and
    /// express the image in basis coordinates.
    pub fn apply_matrix_basis(&self, g: &GL2, basis_idx: usize) -> Vec<CycElem> {
        let gen = self.basis_gens[basis_idx];
        let (m, i) = (gen % self.monomials, gen / self.monomials);
        let img = act_gen_raw(&self.p1, &self.chi, self.order, self.k2(), g, m, i);
        let mut dense = vec![CycElem::zero(self.order); self.dim];
        for (gen2, coeff) in img {
            for (b, pc) in &self.proj[gen2] {
                dense[*b] = dense[*b].add(&coeff.mul(pc));
            }
        }
        dense
    }

    /// Matrix of the sum of the actions of a family of integral matrices
    /// (columns = images of basis elements).
    pub fn operator_from_mats(&self, mats: &[GL2]) -> Mat<CycElem> {
        if self.order == 1 {
            return self.operator_from_mats_q(mats);
        }
        let mut out = Mat::zeros(self.dim, self.dim, CycElem::zero(self.order));
        for j in 0..self.dim {
            for g in mats {
                let col = self.apply_matrix_basis(g, j);
                for (i, v) in col.into_iter().enumerate() {
                    if !v.is_zero() {
                        let cur = out.at(i, j).add(&v);
                        *out.at_mut(i, j) = cur;
                    }
                }
            }
        }
        out
    }

    /// Trivial-character assembly over plain rationals.
    fn operator_from_mats_q(&self, mats: &[GL2]) -> Mat<CycElem> {
        let proj = self.proj_q();
        let k2 = self.k2() as usize;
        let mut out = Mat::zeros(self.dim, self.dim, CycElem::zero(1));
        for j in 0..self.dim {
            let mut dense = vec![BigRational::zero(); self.dim];
            let gen = self.basis_gens[j];
            let (m, i) = (gen % self.monomials, gen / self.monomials);
            for g in mats {
                let (c, d) = self.p1.reps[i];
                let (a, b, cg, dg) = (g[0], g[1], g[2], g[3]);
                let cp = c as i64 * a + d as i64 * cg;
                let dp = c as i64 * b + d as i64 * dg;
                let Some((idx, _)) = self.p1.normalize(cp, dp) else { continue };
                let p1poly = binom_pows(a, b, k2 - m);
                let p2poly = binom_pows(cg, dg, m);
                let mut coeffs = vec![BigInt::zero(); self.monomials];
                for (j1, c1) in p1poly.iter().enumerate() {
                    if c1.is_zero() {
                        continue;
                    }
                    for (j2, c2) in p2poly.iter().enumerate() {
                        if !c2.is_zero() {
                            coeffs[j1 + j2] += c1 * c2;
                        }
                    }
                }
                for (mm, coeff) in coeffs.into_iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let cq = BigRational::from_integer(coeff);
                    for (b2, pc) in &proj[idx * self.monomials + mm] {
                        dense[*b2] += &cq * pc;
                    }
                }
            }
            for (i2, v) in dense.into_iter().enumerate() {
                if !v.is_zero() {
                    *out.at_mut(i2, j) = CycElem::from_rational(1, v);
                }
            }
        }
        out
    }

    pub(crate) fn cache_get_or_insert(
        &self,
        key: &str,
        compute: impl FnOnce() -> Result<Mat<CycElem>>,
    ) -> Result<Mat<CycElem>> {
        {
            let cache = self.op_cache.lock().unwrap();
            if let Some(m) = cache.get(key) {
                return Ok(m.clone());
            }
        }
        let m = compute()?;
        let mut cache = self.op_cache.lock().unwrap();
        // first result is kept
        Ok(cache.entry(key.to_string()).or_insert(m).clone())
    }

    pub(crate) fn star_cell(&self) -> &OnceCell<Mat<CycElem>> {
        &self.star_cell
    }

    pub(crate) fn boundary_cell(&self) -> &OnceCell<boundary::BoundaryData> {
        &self.boundary_cell
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight2_level11_dimensions() {
        // full quotient = 2 g + (cusps - 1) = 3 at level 11
        let chi = DirichletCharacter::trivial(11);
        let s = build_space(11, 2, &chi).unwrap();
        assert_eq!(s.dim, 3);
    }

    #[test]
    fn weight2_level1_presentation_collapses() {
        // the two-term relation kills the single weight-2 level-1 symbol
        // over Q; the cuspidal dimension is 0 either way
        let chi = DirichletCharacter::trivial(1);
        let s = build_space(1, 2, &chi).unwrap();
        assert_eq!(s.dim, 0);
        assert_eq!(s.cuspidal_dim(), 0);
    }

    #[test]
    fn parity_mismatch_gives_zero_space() {
        let chi = DirichletCharacter::trivial(3);
        let s = build_space(3, 3, &chi).unwrap();
        assert!(s.parity_zero);
        assert_eq!(s.dim, 0);
    }

    #[test]
    fn projection_satisfies_relations() {
        let chi = DirichletCharacter::trivial(6);
        let s = build_space(6, 4, &chi).unwrap();
        // every relation row projects to zero
        for row in s.relation_rows() {
            let mut dense = vec![CycElem::zero(s.order); s.dim];
            for (gen, coeff) in row {
                for (b, pc) in s.project_gen(*gen) {
                    dense[*b] = dense[*b].add(&coeff.mul(pc));
                }
            }
            assert!(dense.iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn nontrivial_character_space_builds() {
        // quadratic character mod 5, odd weight 3: parity matches
        let chi = DirichletCharacter::all_mod(5).into_iter().find(|c| c.order == 4).unwrap();
        let s = build_space(5, 3, &chi).unwrap();
        assert!(!s.parity_zero);
        assert!(s.dim > 0);
    }
}
