//! Compiling presented DG-modules into bigraded matrix data.
//!
//! A presented module is realized per bidegree as a quotient of the free
//! module on (algebra basis monomial, generator) pairs by the rows spanned by
//! all monomial multiples of the relations. Differential and generator-action
//! matrices act on the quotient coordinates; compilation validates
//! `delta^2 = 0`, closure of the relation submodule under the differential,
//! and the Leibniz rule against every algebra generator.

use super::algebra::ComponentAlgebra;
use crate::linalg::{reduce_mod_rows, Field, Matrix};
use crate::presentation::Monomial;
use crate::{Bidegree, Error, Result};
use std::collections::BTreeMap;
use std::rc::Rc;

/// A generator of a presented module component.
#[derive(Clone, Debug)]
pub struct ModGenData {
    pub name: String,
    pub n: i32,
    pub d: i32,
}

/// A bihomogeneous combination `sum coeff * monomial * gen`, with local
/// generator indices.
pub type TermList = Vec<(i64, Monomial, usize)>;

/// One component of a compiled DG-module (equally: a complex of modules over
/// one component of the ring). Everything is a finite matrix per bidegree.
#[derive(Clone, Debug)]
pub struct ComponentModule {
    pub alg: Rc<ComponentAlgebra>,
    pub n_range: (i32, i32),
    pub d_range: (i32, i32),
    /// Nonzero dimensions only.
    pub dims: BTreeMap<Bidegree, usize>,
    /// Differential matrices (n,d) -> (n+1,d); absent means zero.
    pub diff: BTreeMap<Bidegree, Matrix>,
    /// Per algebra generator `g`, matrices (n,d) -> (n + n_g, d + d_g).
    pub action: Vec<BTreeMap<Bidegree, Matrix>>,
    /// Quotient-coordinate classes of the presentation generators, when the
    /// module came from a presentation; empty for synthesized complexes.
    pub gen_class: Vec<(Bidegree, Vec<u64>)>,
}

impl ComponentModule {
    pub fn field(&self) -> Field {
        self.alg.field
    }

    pub fn zero(alg: Rc<ComponentAlgebra>, n_range: (i32, i32), d_range: (i32, i32)) -> Self {
        let ngens = alg.pres.gens.len();
        ComponentModule {
            alg,
            n_range,
            d_range,
            dims: BTreeMap::new(),
            diff: BTreeMap::new(),
            action: vec![BTreeMap::new(); ngens],
            gen_class: Vec::new(),
        }
    }

    pub fn dim(&self, bd: Bidegree) -> usize {
        self.dims.get(&bd).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn diff_matrix(&self, bd: Bidegree) -> Matrix {
        self.diff
            .get(&bd)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field(), self.dim((bd.0 + 1, bd.1)), self.dim(bd)))
    }

    pub fn action_matrix(&self, g: usize, bd: Bidegree) -> Matrix {
        let (gn, gd) = (self.alg.pres.gens[g].n, self.alg.pres.gens[g].d);
        self.action[g].get(&bd).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.field(), self.dim((bd.0 + gn, bd.1 + gd)), self.dim(bd))
        })
    }

    /// Left multiplication by an algebra monomial, as a matrix from `bd` to
    /// the shifted bidegree. Rightmost generator factor acts first.
    pub fn act_monomial(&self, m: &Monomial, bd: Bidegree) -> Matrix {
        let (mut n, mut d) = bd;
        let mut mat = Matrix::identity(self.field(), self.dim(bd));
        for g in (0..m.len()).rev() {
            for _ in 0..m[g] {
                mat = self.action_matrix(g, (n, d)).mul(&mat);
                n += self.alg.pres.gens[g].n;
                d += self.alg.pres.gens[g].d;
            }
        }
        mat
    }

    /// Apply a term list (with coefficients) to the generator classes:
    /// the element `sum c * mono * gen` in quotient coordinates at `bd`.
    pub fn eval_terms(&self, terms: &TermList, bd: Bidegree) -> Vec<u64> {
        let f = self.field();
        let mut out = vec![0u64; self.dim(bd)];
        for (c, mono, g) in terms {
            let (gbd, class) = &self.gen_class[*g];
            let src = (bd.0 - (self.alg.monomial_bidegree(mono)).0, bd.1 - (self.alg.monomial_bidegree(mono)).1);
            debug_assert_eq!(src, *gbd);
            let v = self.act_monomial(mono, *gbd).mul_vec(class);
            let cc = f.from_i64(*c);
            for (o, x) in out.iter_mut().zip(v.iter()) {
                *o = f.add(*o, f.mul(cc, *x));
            }
        }
        out
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for (&(n, d), mat) in &self.diff {
            if !self.diff_matrix((n + 1, d)).mul(mat).is_zero() {
                return Err(Error::Compile(format!("delta^2 != 0 at bidegree ({n},{d})")));
            }
        }
        Ok(())
    }

    /// Leibniz against every algebra generator:
    /// `delta(g m) = delta(g) m + (-1)^{|g|} g delta(m)`.
    pub fn check_leibniz(&self) -> Result<()> {
        let f = self.field();
        let gens = self.alg.pres.gens.clone();
        for (gi, g) in gens.iter().enumerate() {
            for &(n, d) in self.dims.keys() {
                let (tn, td) = (n + g.n, d + g.d);
                if tn + 1 > self.n_range.1 || tn < self.n_range.0 || td > self.d_range.1 {
                    continue;
                }
                let lhs = self.diff_matrix((tn, td)).mul(&self.action_matrix(gi, (n, d)));
                let mut rhs = self.action_matrix(gi, (n + 1, d)).mul(&self.diff_matrix((n, d)));
                if g.n.rem_euclid(2) == 1 {
                    rhs = rhs.scale(f.sub(0, 1));
                }
                if let Some((c, dm)) = &self.alg.pres.diffs[gi] {
                    let m = self.act_monomial(dm, (n, d)).scale(f.from_i64(*c));
                    rhs = rhs.add(&m);
                }
                if lhs != rhs {
                    return Err(Error::Compile(format!(
                        "Leibniz rule fails for generator {} at bidegree ({n},{d})",
                        g.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Free-module bookkeeping for one bidegree of the presentation quotient.
struct QuotSpace {
    /// Ordered `(generator, algebra monomial)` basis of the free layer.
    free: Vec<(usize, Monomial)>,
    rel_rref: Matrix,
    rel_pivots: Vec<usize>,
    /// Free-layer columns that survive into the quotient, in order.
    basis_cols: Vec<usize>,
}

impl QuotSpace {
    fn project(&self, v: &[u64]) -> Vec<u64> {
        let reduced = reduce_mod_rows(&self.rel_rref, &self.rel_pivots, v);
        self.basis_cols.iter().map(|&c| reduced[c]).collect()
    }
}

/// Compile one component of a presented module over a compiled algebra
/// component. `rels` and `diffs` use local generator indices; `diffs` has one
/// (possibly empty) term list per generator.
pub fn compile_component(
    alg: Rc<ComponentAlgebra>,
    gens: &[ModGenData],
    rels: &[TermList],
    diffs: &[TermList],
    n_range: (i32, i32),
    d_range: (i32, i32),
) -> Result<ComponentModule> {
    let f = alg.field;
    let mut spaces: BTreeMap<Bidegree, QuotSpace> = BTreeMap::new();
    for n in n_range.0..=n_range.1 {
        for d in d_range.0..=d_range.1 {
            let mut free: Vec<(usize, Monomial)> = Vec::new();
            for (gi, g) in gens.iter().enumerate() {
                if let Some(basis) = alg.basis.get(&(n - g.n, d - g.d)) {
                    free.extend(basis.iter().map(|m| (gi, m.clone())));
                }
            }
            if free.is_empty() {
                continue;
            }
            let index: BTreeMap<(usize, Monomial), usize> =
                free.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
            // relation rows: every algebra-monomial multiple of every relation
            let mut rows: Vec<Vec<u64>> = Vec::new();
            for rel in rels {
                let Some((_, m0, g0)) = rel.first() else { continue };
                let (rn, rd) = {
                    let (mn, md) = alg.monomial_bidegree(m0);
                    (mn + gens[*g0].n, md + gens[*g0].d)
                };
                let Some(basis) = alg.basis.get(&(n - rn, d - rd)) else { continue };
                for b in basis {
                    let mut row = vec![0u64; free.len()];
                    let mut nonzero = false;
                    for (c, mono, g) in rel {
                        if let Some((s, prod)) = alg.mul(b, mono) {
                            if let Some(&col) = index.get(&(*g, prod)) {
                                row[col] = f.add(row[col], f.from_i64(s * c));
                                nonzero = true;
                            }
                        }
                    }
                    if nonzero {
                        rows.push(row);
                    }
                }
            }
            let mut rel_mat = Matrix::zeros(f, rows.len(), free.len());
            for (r, row) in rows.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    rel_mat.set(r, c, v);
                }
            }
            let pivots = rel_mat.rref_in_place();
            let basis_cols: Vec<usize> =
                (0..free.len()).filter(|c| !pivots.contains(c)).collect();
            spaces.insert(
                (n, d),
                QuotSpace { free, rel_rref: rel_mat, rel_pivots: pivots, basis_cols },
            );
        }
    }

    // free-level differential of one free basis element
    let free_diff = |sp: &QuotSpace, col: usize, n: i32, d: i32| -> Vec<(u64, usize, Monomial)> {
        let (gi, b) = &sp.free[col];
        let g = &gens[*gi];
        let mut out: Vec<(u64, usize, Monomial)> = Vec::new();
        // delta_A(b) * gen
        for (prod, c) in alg.diff_monomial(b) {
            out.push((c, *gi, prod));
        }
        // (-1)^{n_b} b * delta(gen)
        let nb = n - g.n;
        let sgn = if nb.rem_euclid(2) == 1 { -1i64 } else { 1 };
        for (c, mono, tg) in &diffs[*gi] {
            if let Some((s, prod)) = alg.mul(b, mono) {
                out.push((f.from_i64(sgn * s * c), *tg, prod));
            }
        }
        let _ = d;
        out
    };
    let assemble = |terms: Vec<(u64, usize, Monomial)>, tgt: &QuotSpace| -> Vec<u64> {
        let index: BTreeMap<(usize, &Monomial), usize> = tgt
            .free
            .iter()
            .enumerate()
            .map(|(i, (g, m))| ((*g, m), i))
            .collect();
        let mut v = vec![0u64; tgt.free.len()];
        for (c, g, m) in &terms {
            if let Some(&col) = index.get(&(*g, m)) {
                v[col] = f.add(v[col], *c);
            }
        }
        v
    };

    let empty_quot = QuotSpace {
        free: Vec::new(),
        rel_rref: Matrix::zeros(f, 0, 0),
        rel_pivots: Vec::new(),
        basis_cols: Vec::new(),
    };

    let mut out = ComponentModule::zero(alg.clone(), n_range, d_range);
    for (&(n, d), sp) in &spaces {
        let dim = sp.basis_cols.len();
        if dim > 0 {
            out.dims.insert((n, d), dim);
        }
    }

    for (&(n, d), sp) in &spaces {
        // relation submodule must be closed under the differential
        if n + 1 <= n_range.1 {
            let tgt = spaces.get(&(n + 1, d)).unwrap_or(&empty_quot);
            for r in 0..sp.rel_pivots.len() {
                let mut img = vec![0u64; tgt.free.len()];
                for c in 0..sp.free.len() {
                    let coeff = sp.rel_rref.get(r, c);
                    if coeff == 0 {
                        continue;
                    }
                    let dv = assemble(free_diff(sp, c, n, d), tgt);
                    for (o, x) in img.iter_mut().zip(dv.iter()) {
                        *o = f.add(*o, f.mul(coeff, *x));
                    }
                }
                if tgt.project(&img).iter().any(|&x| x != 0) {
                    return Err(Error::Compile(format!(
                        "relations are not closed under the differential at bidegree ({n},{d})"
                    )));
                }
            }
            // quotient differential
            let dim = sp.basis_cols.len();
            let tdim = tgt.basis_cols.len();
            if dim > 0 && tdim > 0 {
                let mut mat = Matrix::zeros(f, tdim, dim);
                for (k, &col) in sp.basis_cols.iter().enumerate() {
                    let v = tgt.project(&assemble(free_diff(sp, col, n, d), tgt));
                    for (r, &x) in v.iter().enumerate() {
                        mat.set(r, k, x);
                    }
                }
                if !mat.is_zero() {
                    out.diff.insert((n, d), mat);
                }
            }
        }
        // generator actions
        for (gi, g) in alg.pres.gens.iter().enumerate() {
            let (tn, td) = (n + g.n, d + g.d);
            let tgt = spaces.get(&(tn, td)).unwrap_or(&empty_quot);
            let dim = sp.basis_cols.len();
            let tdim = tgt.basis_cols.len();
            if dim == 0 || tdim == 0 {
                continue;
            }
            let mut gmono = vec![0u32; alg.pres.gens.len()];
            gmono[gi] = 1;
            let mut mat = Matrix::zeros(f, tdim, dim);
            for (k, &col) in sp.basis_cols.iter().enumerate() {
                let (mg, b) = &sp.free[col];
                if let Some((s, prod)) = alg.mul(&gmono, b) {
                    let mut v = vec![0u64; tgt.free.len()];
                    if let Some(tc) =
                        tgt.free.iter().position(|(gg, mm)| gg == mg && mm == &prod)
                    {
                        v[tc] = f.from_i64(s);
                    }
                    let v = tgt.project(&v);
                    for (r, &x) in v.iter().enumerate() {
                        mat.set(r, k, x);
                    }
                }
            }
            if !mat.is_zero() {
                out.action[gi].insert((n, d), mat);
            }
        }
    }

    // classes of the presentation generators
    for g in gens {
        let bd = (g.n, g.d);
        match spaces.get(&bd) {
            Some(sp) => {
                let gi = out.gen_class.len();
                let col = sp
                    .free
                    .iter()
                    .position(|(gg, m)| *gg == gi && m.iter().all(|&e| e == 0))
                    .ok_or_else(|| {
                        Error::Compile(format!("generator {} missing from its own bidegree", g.name))
                    })?;
                let mut v = vec![0u64; sp.free.len()];
                v[col] = 1;
                out.gen_class.push((bd, sp.project(&v)));
            }
            None => {
                out.gen_class.push((bd, Vec::new()));
            }
        }
    }

    out.check_d_squared()?;
    out.check_leibniz()?;
    Ok(out)
}
