//! Operations on compiled complexes: cohomology, shifts, cones, sums,
//! inflation along A -> H^0(A), and multiplication maps.

use super::algebra::ComponentAlgebra;
use super::module::ComponentModule;
use crate::linalg::Matrix;
use crate::table::DimTable;
use crate::{Bidegree, Error, Result};
use std::collections::BTreeMap;
use std::rc::Rc;

/// A degree-zero chain map between compiled components, one matrix per
/// bidegree of the source.
#[derive(Clone, Debug)]
pub struct ComponentChainMap {
    pub source: ComponentModule,
    pub target: ComponentModule,
    pub mats: BTreeMap<Bidegree, Matrix>,
}

impl ComponentChainMap {
    pub fn mat(&self, bd: Bidegree) -> Matrix {
        self.mats.get(&bd).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.source.field(), self.target.dim(bd), self.source.dim(bd))
        })
    }

    /// Check `delta_N f = f delta_M` on the overlap of the windows.
    pub fn validate(&self) -> Result<()> {
        for &(n, d) in self.source.dims.keys() {
            if n + 1 > self.source.n_range.1 || n + 1 > self.target.n_range.1 {
                continue;
            }
            let lhs = self.target.diff_matrix((n, d)).mul(&self.mat((n, d)));
            let rhs = self.mat((n + 1, d)).mul(&self.source.diff_matrix((n, d)));
            if lhs != rhs {
                return Err(Error::Compute(format!(
                    "chain map fails to commute with the differential at ({n},{d})"
                )));
            }
        }
        Ok(())
    }

    /// Check compatibility with every generator action (module-linearity).
    pub fn validate_linear(&self) -> Result<()> {
        let gens = self.source.alg.pres.gens.clone();
        for (gi, g) in gens.iter().enumerate() {
            for &(n, d) in self.source.dims.keys() {
                let (tn, td) = (n + g.n, d + g.d);
                if tn < self.source.n_range.0
                    || tn < self.target.n_range.0
                    || td > self.source.d_range.1
                    || td > self.target.d_range.1
                {
                    continue;
                }
                let lhs = self.target.action_matrix(gi, (n, d)).mul(&self.mat((n, d)));
                let rhs = self.mat((tn, td)).mul(&self.source.action_matrix(gi, (n, d)));
                if lhs != rhs {
                    return Err(Error::Compute(format!(
                        "map is not {}-linear at ({n},{d})",
                        g.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Dimensions of cohomology per bidegree. Certified rows are the interior
/// cohomological degrees of the computation box: at the edges incoming or
/// outgoing differentials may have been cut off.
pub fn cohomology_table(m: &ComponentModule) -> DimTable {
    let mut t = DimTable::empty(m.n_range, m.d_range);
    t.cert_n = (m.n_range.0 + 1, m.n_range.1 - 1);
    let keys: Vec<Bidegree> = m.dims.keys().copied().collect();
    for (n, d) in keys {
        let h = cohomology_dim(m, (n, d));
        t.set(n, d, h as u64);
    }
    t
}

pub fn cohomology_dim(m: &ComponentModule, bd: Bidegree) -> usize {
    let out = m.diff_matrix(bd);
    let inc = m.diff_matrix((bd.0 - 1, bd.1));
    let dim = m.dim(bd);
    (dim - out.rank()) - inc.rank()
}

/// Cocycle representatives of a basis of cohomology at `bd`, in the module's
/// coordinates. Deterministic: kernel vectors in echelon order, kept when
/// they add a new pivot over the boundary space.
pub fn cohomology_basis(m: &ComponentModule, bd: Bidegree) -> Vec<Vec<u64>> {
    crate::linalg::homology_reps(&m.diff_matrix((bd.0 - 1, bd.1)), &m.diff_matrix(bd))
}

/// Bigraded shift: the result has `M'(n,d) = M(n+a, d+b)`, differential
/// scaled by `(-1)^a` and the action of a generator `g` by `(-1)^{a |g|}`.
pub fn shift_bi(m: &ComponentModule, a: i32, b: i32) -> ComponentModule {
    let f = m.field();
    let neg = f.sub(0, 1);
    let mut out = ComponentModule::zero(
        m.alg.clone(),
        (m.n_range.0 - a, m.n_range.1 - a),
        (m.d_range.0 - b, m.d_range.1 - b),
    );
    for (&(n, d), &dim) in &m.dims {
        out.dims.insert((n - a, d - b), dim);
    }
    for (&(n, d), mat) in &m.diff {
        let mat = if a.rem_euclid(2) == 1 { mat.scale(neg) } else { mat.clone() };
        out.diff.insert((n - a, d - b), mat);
    }
    for (gi, g) in m.alg.pres.gens.iter().enumerate() {
        let twist = (a * g.n).rem_euclid(2) == 1;
        for (&(n, d), mat) in &m.action[gi] {
            let mat = if twist { mat.scale(neg) } else { mat.clone() };
            out.action[gi].insert((n - a, d - b), mat);
        }
    }
    for (bd, v) in &m.gen_class {
        out.gen_class.push(((bd.0 - a, bd.1 - b), v.clone()));
    }
    out
}

/// Mapping cone of `f: M -> N` together with the triangle maps
/// `N -> cone(f)` and `cone(f) -> M[1]`.
pub fn cone(f: &ComponentChainMap) -> (ComponentModule, ComponentChainMap, ComponentChainMap) {
    let m = &f.source;
    let n_mod = &f.target;
    let field = m.field();
    let m1 = shift_bi(m, 1, 0);
    let n_range = (m1.n_range.0.min(n_mod.n_range.0), m1.n_range.1.max(n_mod.n_range.1));
    let d_range = (m1.d_range.0.min(n_mod.d_range.0), m1.d_range.1.max(n_mod.d_range.1));
    let mut c = ComponentModule::zero(m.alg.clone(), n_range, d_range);
    let mut keys: Vec<Bidegree> = m1.dims.keys().chain(n_mod.dims.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    for &bd in &keys {
        let dim = m1.dim(bd) + n_mod.dim(bd);
        if dim > 0 {
            c.dims.insert(bd, dim);
        }
    }
    let block = |tl: &Matrix, tr: &Matrix, bl: &Matrix, br: &Matrix| -> Matrix {
        let rows = tl.rows() + bl.rows();
        let cols = tl.cols() + tr.cols();
        let mut out = Matrix::zeros(field, rows, cols);
        for (ro, co, mat) in
            [(0, 0, tl), (0, tl.cols(), tr), (tl.rows(), 0, bl), (tl.rows(), tl.cols(), br)]
        {
            for r in 0..mat.rows() {
                for cc in 0..mat.cols() {
                    out.set(ro + r, co + cc, mat.get(r, cc));
                }
            }
        }
        out
    };
    for &(n, d) in &keys {
        if n + 1 > n_range.1 {
            continue;
        }
        // d_C = [[d_{M[1]}, 0], [f(n+1,d), d_N]]; d_{M[1]} already carries -1
        let tl = m1.diff_matrix((n, d));
        let tr = Matrix::zeros(field, m1.dim((n + 1, d)), n_mod.dim((n, d)));
        let bl = f.mat((n + 1, d)); // M[1](n,d) = M(n+1,d) -> N(n+1,d)
        let br = n_mod.diff_matrix((n, d));
        let mat = block(&tl, &tr, &bl, &br);
        if !mat.is_zero() {
            c.diff.insert((n, d), mat);
        }
    }
    for (gi, g) in m.alg.pres.gens.clone().iter().enumerate() {
        for &(n, d) in &keys {
            let (tn, td) = (n + g.n, d + g.d);
            if tn < n_range.0 || td > d_range.1 || td < d_range.0 {
                continue;
            }
            let tl = m1.action_matrix(gi, (n, d));
            let tr = Matrix::zeros(field, m1.dim((tn, td)), n_mod.dim((n, d)));
            let bl = Matrix::zeros(field, n_mod.dim((tn, td)), m1.dim((n, d)));
            let br = n_mod.action_matrix(gi, (n, d));
            let mat = block(&tl, &tr, &bl, &br);
            if !mat.is_zero() {
                c.action[gi].insert((n, d), mat);
            }
        }
    }
    // triangle maps
    let mut inj = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for &bd in &keys {
        let (dm, dn) = (m1.dim(bd), n_mod.dim(bd));
        if dn > 0 {
            let mut mat = Matrix::zeros(field, dm + dn, dn);
            for i in 0..dn {
                mat.set(dm + i, i, 1);
            }
            inj.insert(bd, mat);
        }
        if dm > 0 {
            let mut mat = Matrix::zeros(field, dm, dm + dn);
            for i in 0..dm {
                mat.set(i, i, 1);
            }
            proj.insert(bd, mat);
        }
    }
    let inj = ComponentChainMap { source: n_mod.clone(), target: c.clone(), mats: inj };
    let proj = ComponentChainMap { source: c.clone(), target: m1, mats: proj };
    (c, inj, proj)
}

pub fn direct_sum(parts: &[&ComponentModule]) -> ComponentModule {
    assert!(!parts.is_empty());
    let field = parts[0].field();
    let n_range = (
        parts.iter().map(|p| p.n_range.0).min().unwrap(),
        parts.iter().map(|p| p.n_range.1).max().unwrap(),
    );
    let d_range = (
        parts.iter().map(|p| p.d_range.0).min().unwrap(),
        parts.iter().map(|p| p.d_range.1).max().unwrap(),
    );
    let mut out = ComponentModule::zero(parts[0].alg.clone(), n_range, d_range);
    let mut keys: Vec<Bidegree> =
        parts.iter().flat_map(|p| p.dims.keys().copied()).collect();
    keys.sort();
    keys.dedup();
    for &bd in &keys {
        let dim: usize = parts.iter().map(|p| p.dim(bd)).sum();
        if dim > 0 {
            out.dims.insert(bd, dim);
        }
    }
    let blockdiag = |get: &dyn Fn(&ComponentModule) -> Matrix| -> Matrix {
        let rows: usize = parts.iter().map(|p| get(p).rows()).sum();
        let cols: usize = parts.iter().map(|p| get(p).cols()).sum();
        let mut mat = Matrix::zeros(field, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for p in parts {
            let b = get(p);
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    mat.set(ro + r, co + c, b.get(r, c));
                }
            }
            ro += b.rows();
            co += b.cols();
        }
        mat
    };
    for &bd in &keys {
        let mat = blockdiag(&|p| p.diff_matrix(bd));
        if !mat.is_zero() {
            out.diff.insert(bd, mat);
        }
        for gi in 0..out.action.len() {
            let mat = blockdiag(&|p| p.action_matrix(gi, bd));
            if !mat.is_zero() {
                out.action[gi].insert(bd, mat);
            }
        }
    }
    out
}

/// View a module over `H^0(A)` as a DG-module over `A` through the surjection
/// `A -> H^0(A)`: degree-zero generators act as before (matched by name) and
/// negative-degree generators act as zero.
pub fn inflate(m: &ComponentModule, target: &Rc<ComponentAlgebra>) -> Result<ComponentModule> {
    let mut out = ComponentModule::zero(target.clone(), m.n_range, m.d_range);
    out.dims = m.dims.clone();
    out.diff = m.diff.clone();
    out.gen_class = m.gen_class.clone();
    for (gi, g) in target.pres.gens.iter().enumerate() {
        if g.n == 0 {
            let src = m.alg.pres.gen_index(&g.name).ok_or_else(|| {
                Error::Compute(format!("generator {} has no counterpart in H^0", g.name))
            })?;
            out.action[gi] = m.action[src].clone();
        }
    }
    out.check_leibniz()?;
    Ok(out)
}

/// Left multiplication by a cycle generator `g`, as a chain map
/// `shift_bi(M, -n_g, -d_g) -> M`.
pub fn mult_map(m: &ComponentModule, gi: usize) -> ComponentChainMap {
    let g = &m.alg.pres.gens[gi];
    assert!(m.alg.pres.diffs[gi].is_none(), "multiplication map needs a cycle generator");
    let src = shift_bi(m, -g.n, -g.d);
    let mut mats = BTreeMap::new();
    for &(n, d) in src.dims.keys() {
        // src(n,d) = M(n - n_g, d - d_g); multiply into M(n,d)
        let mat = m.action_matrix(gi, (n - g.n, d - g.d));
        if !mat.is_zero() {
            mats.insert((n, d), mat);
        }
    }
    ComponentChainMap { source: src, target: m.clone(), mats }
}
