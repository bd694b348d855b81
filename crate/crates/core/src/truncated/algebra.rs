//! Compiling a ring component into finite bigraded structure-constant data.
//!
//! The basis in each bidegree is the set of normal-form monomials (those not
//! divisible by a relation monomial). Products and differentials are computed
//! with Koszul signs and validated in-window: delta^2 = 0, the Leibniz rule on
//! all basis pairs, and semisimplicity of the (0,0) piece.

use crate::linalg::{Field, Matrix};
use crate::presentation::{ComponentPresentation, Monomial};
use crate::{Bidegree, Error, Result, Window};
use std::collections::{BTreeMap, HashMap};

/// A compiled component of a (product) DG-ring.
#[derive(Clone, Debug)]
pub struct ComponentAlgebra {
    pub field: Field,
    pub window: Window,
    pub pres: ComponentPresentation,
    /// Ordered monomial basis per bidegree; deterministic (sorted by
    /// exponent vector).
    pub basis: BTreeMap<Bidegree, Vec<Monomial>>,
    index: HashMap<Monomial, (Bidegree, usize)>,
    /// Differential matrices (n,d) -> (n+1,d).
    pub diff: BTreeMap<Bidegree, Matrix>,
}

impl ComponentAlgebra {
    pub fn compile(pres: &ComponentPresentation, window: Window, field: Field) -> Result<Self> {
        if window.n_min > 0 || window.n_max < 0 {
            return Err(Error::Compile("window does not contain the unit bidegree (0,0)".into()));
        }
        let mut alg = ComponentAlgebra {
            field,
            window,
            pres: pres.clone(),
            basis: BTreeMap::new(),
            index: HashMap::new(),
            diff: BTreeMap::new(),
        };
        alg.enumerate_basis();
        if alg.basis.get(&(0, 0)).map(|b| b.len()) != Some(1) {
            return Err(Error::Compile("degree-(0,0) part is not spanned by the unit".into()));
        }
        alg.build_diff()?;
        alg.check_d_squared()?;
        alg.check_leibniz()?;
        Ok(alg)
    }

    fn enumerate_basis(&mut self) {
        let gens = &self.pres.gens;
        let w = self.window;
        let mut stack: Vec<(usize, Monomial, i32, i32)> =
            vec![(0, vec![0; gens.len()], 0, 0)];
        let mut all: Vec<(Bidegree, Monomial)> = Vec::new();
        while let Some((i, m, n, d)) = stack.pop() {
            if i == gens.len() {
                if self.is_normal_form(&m) {
                    all.push(((n, d), m));
                }
                continue;
            }
            let g = &gens[i];
            let max_e = if g.odd() {
                1
            } else if g.d > 0 {
                (w.d_max - d) / g.d
            } else {
                // d = 0 forces n < 0, so the cohomological window bounds e
                (n - w.n_min) / (-g.n)
            };
            let mut e = 0i32;
            while e <= max_e {
                let nn = n + g.n * e;
                let dd = d + g.d * e;
                if nn < w.n_min || dd > w.d_max {
                    break;
                }
                let mut m2 = m.clone();
                m2[i] = e as u32;
                stack.push((i + 1, m2, nn, dd));
                e += 1;
            }
        }
        all.sort();
        for (bd, m) in all {
            let v = self.basis.entry(bd).or_default();
            self.index.insert(m.clone(), (bd, v.len()));
            v.push(m);
        }
    }

    fn is_normal_form(&self, m: &Monomial) -> bool {
        !self.pres.rels.iter().any(|r| r.iter().zip(m.iter()).all(|(&re, &me)| me >= re))
    }

    pub fn dim(&self, bd: Bidegree) -> usize {
        self.basis.get(&bd).map(|v| v.len()).unwrap_or(0)
    }

    pub fn monomial_index(&self, m: &Monomial) -> Option<(Bidegree, usize)> {
        self.index.get(m).copied()
    }

    pub fn monomial_bidegree(&self, m: &Monomial) -> Bidegree {
        self.pres.monomial_bidegree(m)
    }

    pub fn unit(&self) -> Monomial {
        vec![0; self.pres.gens.len()]
    }

    /// Product of two monomials: `None` when it vanishes (odd square or
    /// divisible by a relation), otherwise the Koszul sign and the canonical
    /// monomial. The result may lie outside the window.
    pub fn mul(&self, a: &Monomial, b: &Monomial) -> Option<(i64, Monomial)> {
        let gens = &self.pres.gens;
        let mut out = vec![0u32; gens.len()];
        for i in 0..gens.len() {
            let e = a[i] + b[i];
            if gens[i].odd() && e > 1 {
                return None;
            }
            out[i] = e;
        }
        if !self.is_normal_form(&out) {
            return None;
        }
        // sign: move each odd factor of b leftward past the odd factors of a
        // that sit at a later generator index
        let mut sign = 0u32;
        for i in 0..gens.len() {
            if b[i] == 0 || !gens[i].odd() {
                continue;
            }
            for j in (i + 1)..gens.len() {
                if gens[j].odd() {
                    sign += b[i] * a[j];
                }
            }
        }
        Some((if sign % 2 == 0 { 1 } else { -1 }, out))
    }

    /// Leibniz expansion of the differential on a basis monomial, as a
    /// canonical combination of monomials (coefficients in GF(p)).
    pub fn diff_monomial(&self, m: &Monomial) -> BTreeMap<Monomial, u64> {
        let f = self.field;
        let gens = &self.pres.gens;
        let mut out: BTreeMap<Monomial, u64> = BTreeMap::new();
        let mut prefix_parity = 0i32;
        for i in 0..gens.len() {
            let a = m[i];
            if a == 0 {
                continue;
            }
            if let Some((c, dm)) = &self.pres.diffs[i] {
                let suffix_parity: i32 = (i + 1..gens.len())
                    .map(|j| m[j] as i32 * gens[j].n)
                    .sum::<i32>()
                    .rem_euclid(2);
                // term = (-1)^prefix * a * c * prefix g^{a-1} dm suffix
                //      = (-1)^prefix (-1)^{(n_i+1) * suffix} a c * (base * dm)
                let mut base = m.clone();
                base[i] -= 1;
                if let Some((s, prod)) = self.mul(&base, dm) {
                    let mut coeff = s * c * a as i64;
                    if prefix_parity.rem_euclid(2) == 1 {
                        coeff = -coeff;
                    }
                    if ((gens[i].n + 1) * suffix_parity).rem_euclid(2) == 1 {
                        coeff = -coeff;
                    }
                    let entry = out.entry(prod).or_insert(0);
                    *entry = f.add(*entry, f.from_i64(coeff));
                }
            }
            prefix_parity += a as i32 * gens[i].n;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn build_diff(&mut self) -> Result<()> {
        let keys: Vec<Bidegree> = self.basis.keys().copied().collect();
        for (n, d) in keys {
            let src = self.dim((n, d));
            let tgt = self.dim((n + 1, d));
            let mut mat = Matrix::zeros(self.field, tgt, src);
            for (col, m) in self.basis[&(n, d)].clone().iter().enumerate() {
                for (prod, coeff) in self.diff_monomial(m) {
                    let Some((bd, row)) = self.monomial_index(&prod) else {
                        return Err(Error::Compile(format!(
                            "differential image of {:?} escapes the window",
                            m
                        )));
                    };
                    if bd != (n + 1, d) {
                        return Err(Error::Compile(format!(
                            "differential of {:?} lands at {:?}, expected {:?}",
                            m,
                            bd,
                            (n + 1, d)
                        )));
                    }
                    mat.set(row, col, coeff);
                }
            }
            self.diff.insert((n, d), mat);
        }
        Ok(())
    }

    pub fn diff_matrix(&self, bd: Bidegree) -> Matrix {
        self.diff
            .get(&bd)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field, self.dim((bd.0 + 1, bd.1)), self.dim(bd)))
    }

    fn check_d_squared(&self) -> Result<()> {
        // per-generator check first, to name the culprit in the error
        for (k, diff) in self.pres.diffs.iter().enumerate() {
            if let Some((_, dm)) = diff {
                if self.diff_monomial(dm).values().any(|&v| v != 0) {
                    return Err(Error::Compile(format!(
                        "delta^2 != 0 on generator {}",
                        self.pres.gens[k].name
                    )));
                }
            }
        }
        for (&(n, d), mat) in &self.diff {
            let next = self.diff_matrix((n + 1, d));
            if !next.mul(mat).is_zero() {
                return Err(Error::Compile(format!("delta^2 != 0 at bidegree ({n},{d})")));
            }
        }
        Ok(())
    }

    fn check_leibniz(&self) -> Result<()> {
        let f = self.field;
        for (&(n1, d1), b1) in &self.basis {
            for (&(n2, d2), b2) in &self.basis {
                let (n, d) = (n1 + n2, d1 + d2);
                if n + 1 > 0 || n < self.window.n_min || d > self.window.d_max {
                    continue;
                }
                for m1 in b1 {
                    for m2 in b2 {
                        self.check_leibniz_pair(f, m1, n1, m2)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn check_leibniz_pair(&self, f: Field, m1: &Monomial, n1: i32, m2: &Monomial) -> Result<()> {
        let mut lhs: BTreeMap<Monomial, u64> = BTreeMap::new();
        if let Some((s, prod)) = self.mul(m1, m2) {
            for (m, c) in self.diff_monomial(&prod) {
                let e = lhs.entry(m).or_insert(0);
                *e = f.add(*e, f.mul(c, f.from_i64(s)));
            }
        }
        let mut rhs: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (dm, c) in self.diff_monomial(m1) {
            if let Some((s, prod)) = self.mul(&dm, m2) {
                let e = rhs.entry(prod).or_insert(0);
                *e = f.add(*e, f.mul(c, f.from_i64(s)));
            }
        }
        let sgn = if n1.rem_euclid(2) == 1 { -1i64 } else { 1 };
        for (dm, c) in self.diff_monomial(m2) {
            if let Some((s, prod)) = self.mul(m1, &dm) {
                let e = rhs.entry(prod).or_insert(0);
                *e = f.add(*e, f.mul(c, f.from_i64(s * sgn)));
            }
        }
        lhs.retain(|_, v| *v != 0);
        rhs.retain(|_, v| *v != 0);
        if lhs != rhs {
            return Err(Error::Compile(format!(
                "Leibniz rule fails on pair {:?} * {:?}",
                m1, m2
            )));
        }
        Ok(())
    }
}
