//! Truncation windows: compiling presentations into finite bigraded data.
//!
//! Product rings are handled componentwise throughout; the wrapper types
//! here hold one compiled object per ring component and merge tables.

pub mod algebra;
pub mod module;
pub mod ops;

pub use algebra::ComponentAlgebra;
pub use module::{compile_component, ComponentModule, ModGenData, TermList};
pub use ops::{
    cohomology_basis, cohomology_dim, cohomology_table as component_cohomology_table, cone,
    direct_sum, inflate, mult_map, shift_bi, ComponentChainMap,
};

use crate::linalg::Field;
use crate::presentation::{ModulePresentation, RingPresentation};
use crate::table::DimTable;
use crate::{Result, Window};
use std::rc::Rc;

/// A compiled (product) DG-ring. `window` is the user-facing computation box
/// for modules; the underlying components are compiled over a wider
/// cohomological range so that module generators in positive degrees still
/// see full coefficient rows.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub pres: RingPresentation,
    pub window: Window,
    pub field: Field,
    pub components: Vec<Rc<ComponentAlgebra>>,
}

impl Algebra {
    pub fn compile(pres: &RingPresentation, window: Window) -> Result<Algebra> {
        pres.validate()?;
        let field = Field::new(pres.char_p);
        let alg_window = Window::new(window.n_min - window.n_max.max(0), 0, window.d_max);
        let components = pres
            .components
            .iter()
            .map(|c| ComponentAlgebra::compile(c, alg_window, field).map(Rc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Algebra { pres: pres.clone(), window, field, components })
    }

    /// Compile `H^0` of this ring as an ordinary ring over the same window.
    pub fn h0(&self) -> Result<Algebra> {
        Algebra::compile(&self.pres.h0_presentation(), self.window)
    }

    pub fn is_ordinary(&self) -> bool {
        self.pres.is_ordinary()
    }

    /// The ring as a module over itself.
    pub fn as_module(&self) -> Result<Module> {
        let gens: Vec<crate::presentation::ModGen> = (0..self.components.len())
            .map(|c| crate::presentation::ModGen {
                name: "one".into(),
                n: 0,
                d: 0,
                component: c,
            })
            .collect();
        let pres = ModulePresentation {
            name: self.pres.name.clone(),
            over: self.pres.name.clone(),
            gens,
            rels: Vec::new(),
            diffs: vec![Vec::new(); self.components.len()],
        };
        Module::compile(self, &pres)
    }
}

/// A compiled DG-module (or plain complex) over a compiled ring.
#[derive(Clone, Debug)]
pub struct Module {
    pub name: String,
    pub components: Vec<ComponentModule>,
}

impl Module {
    pub fn compile(alg: &Algebra, pres: &ModulePresentation) -> Result<Module> {
        let w = alg.window;
        Module::compile_in(alg, pres, (w.n_min, w.n_max), (0, w.d_max))
    }

    /// Compile over an explicit bidegree box (used for auxiliary windows).
    pub fn compile_in(
        alg: &Algebra,
        pres: &ModulePresentation,
        n_range: (i32, i32),
        d_range: (i32, i32),
    ) -> Result<Module> {
        pres.validate(&alg.pres)?;
        let mut components = Vec::new();
        for (c, calg) in alg.components.iter().enumerate() {
            let mut local_of_global = vec![usize::MAX; pres.gens.len()];
            let mut gens: Vec<ModGenData> = Vec::new();
            for (gi, g) in pres.gens.iter().enumerate() {
                if g.component == c {
                    local_of_global[gi] = gens.len();
                    gens.push(ModGenData { name: g.name.clone(), n: g.n, d: g.d });
                }
            }
            let localize = |terms: &[crate::presentation::ModTerm]| -> TermList {
                terms
                    .iter()
                    .filter(|t| pres.gens[t.gen].component == c)
                    .map(|t| (t.coeff, t.mono.clone(), local_of_global[t.gen]))
                    .collect()
            };
            let rels: Vec<TermList> =
                pres.rels.iter().map(|r| localize(r)).filter(|r| !r.is_empty()).collect();
            let mut diffs: Vec<TermList> = vec![Vec::new(); gens.len()];
            for (gi, g) in pres.gens.iter().enumerate() {
                if g.component == c {
                    diffs[local_of_global[gi]] = localize(&pres.diffs[gi]);
                }
            }
            components.push(compile_component(
                calg.clone(),
                &gens,
                &rels,
                &diffs,
                n_range,
                d_range,
            )?);
        }
        Ok(Module { name: pres.name.clone(), components })
    }

    pub fn from_components(name: &str, components: Vec<ComponentModule>) -> Module {
        Module { name: name.into(), components }
    }

    pub fn total_dim(&self) -> usize {
        self.components.iter().map(|c| c.total_dim()).sum()
    }

    /// Dimensions of the underlying bigraded spaces (certified everywhere in
    /// the box: truncation removes bidegrees, it does not corrupt them).
    pub fn dim_table(&self) -> DimTable {
        let mut t = merge_ranges(&self.components);
        t.cert_n = t.n_range;
        for c in &self.components {
            for (&(n, d), &v) in &c.dims {
                t.set(n, d, t.get(n, d) + v as u64);
            }
        }
        t
    }

    pub fn cohomology(&self) -> DimTable {
        let parts: Vec<DimTable> =
            self.components.iter().map(component_cohomology_table).collect();
        merge_tables(&parts)
    }

    pub fn shift(&self, a: i32, b: i32) -> Module {
        Module {
            name: format!("{}[{a},{b}]", self.name),
            components: self.components.iter().map(|c| shift_bi(c, a, b)).collect(),
        }
    }
}

/// A componentwise chain map between modules over the same ring.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub components: Vec<ComponentChainMap>,
}

impl ChainMap {
    pub fn validate(&self) -> Result<()> {
        for c in &self.components {
            c.validate()?;
        }
        Ok(())
    }
}

/// Mapping cone of a componentwise chain map, with the triangle maps
/// `N -> cone` and `cone -> M[1]`.
pub fn cone_module(f: &ChainMap) -> (Module, ChainMap, ChainMap) {
    let mut cs = Vec::new();
    let mut injs = Vec::new();
    let mut projs = Vec::new();
    for cf in &f.components {
        let (c, i, p) = cone(cf);
        cs.push(c);
        injs.push(i);
        projs.push(p);
    }
    (
        Module::from_components("cone", cs),
        ChainMap { components: injs },
        ChainMap { components: projs },
    )
}

fn merge_ranges(components: &[ComponentModule]) -> DimTable {
    let n_range = (
        components.iter().map(|c| c.n_range.0).min().unwrap_or(0),
        components.iter().map(|c| c.n_range.1).max().unwrap_or(0),
    );
    let d_range = (
        components.iter().map(|c| c.d_range.0).min().unwrap_or(0),
        components.iter().map(|c| c.d_range.1).max().unwrap_or(0),
    );
    DimTable::empty(n_range, d_range)
}

/// Sum entries across component tables; certify where every part certifies.
pub fn merge_tables(parts: &[DimTable]) -> DimTable {
    let n_range = (
        parts.iter().map(|t| t.n_range.0).min().unwrap_or(0),
        parts.iter().map(|t| t.n_range.1).max().unwrap_or(0),
    );
    let d_range = (
        parts.iter().map(|t| t.d_range.0).min().unwrap_or(0),
        parts.iter().map(|t| t.d_range.1).max().unwrap_or(0),
    );
    let mut out = DimTable::empty(n_range, d_range);
    out.cert_n = (
        parts.iter().map(|t| t.cert_n.0).max().unwrap_or(1),
        parts.iter().map(|t| t.cert_n.1).min().unwrap_or(0),
    );
    out.d_trunc = (
        parts.iter().any(|t| t.d_trunc.0),
        parts.iter().any(|t| t.d_trunc.1),
    );
    for t in parts {
        for (&(n, d), &v) in &t.entries {
            out.set(n, d, out.get(n, d) + v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    const AB: &str = "
        ring A { component { gen x (0,1); gen y (0,1); rel x*y; } }
        dgring B = koszul(A; x^2)
    ";

    fn compile(src: &str, ring: &str, w: Window) -> Algebra {
        let f = parse(src).unwrap();
        Algebra::compile(f.ring(ring).unwrap(), w).unwrap()
    }

    #[test]
    fn cohomology_of_koszul_ring() {
        let b = compile(AB, "B", Window::new(-4, 4, 6));
        let m = b.as_module().unwrap();
        let h = m.cohomology();
        // H^0(B) = k[x,y]/(xy,x^2), H^{-1}(B) = ann_A(x^2) e = y k[y] e
        for (d, want) in [1u64, 2, 1, 1, 1].into_iter().enumerate() {
            assert_eq!(h.get(0, d as i32), want, "H^0 at d={d}");
        }
        for (d, want) in [0u64, 0, 0, 1, 1].into_iter().enumerate() {
            assert_eq!(h.get(-1, d as i32), want, "H^-1 at d={d}");
        }
        assert_eq!(h.get(-2, 4), 0);
        assert!(h.is_certified(0, 3) && h.is_certified(-1, 4));
    }

    #[test]
    fn quotient_module_by_one_variable() {
        let src = "
            ring A { component { gen x (0,1); gen y (0,1); rel x*y; } }
            module M over A { gen m (0,0); rel y*m; }
        ";
        let f = parse(src).unwrap();
        let a = Algebra::compile(f.ring("A").unwrap(), Window::new(-4, 4, 6)).unwrap();
        let m = Module::compile(&a, f.module("M").unwrap()).unwrap();
        let t = m.dim_table();
        for d in 0..=6 {
            assert_eq!(t.get(0, d), 1, "x^{d} m");
        }
        assert_eq!(t.get(-1, 2), 0);
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let b = compile(AB, "B", Window::new(-4, 4, 6));
        let m = b.as_module().unwrap();
        let id = ChainMap {
            components: m
                .components
                .iter()
                .map(|c| {
                    let mats = c
                        .dims
                        .iter()
                        .map(|(&bd, &dim)| {
                            (bd, crate::linalg::Matrix::identity(c.field(), dim))
                        })
                        .collect();
                    ComponentChainMap { source: c.clone(), target: c.clone(), mats }
                })
                .collect(),
        };
        id.validate().unwrap();
        let (cone, inj, proj) = cone_module(&id);
        inj.validate().unwrap();
        proj.validate().unwrap();
        let h = cone.cohomology();
        assert!(h.certified_zero(), "cone of identity has certified cohomology:\n{h}");
    }

    #[test]
    fn residue_field_via_cone_over_kt() {
        // over k[t] with t in bidegree (-2,1), the cone of t-multiplication
        // on the free module computes k
        let src = "ring kt { component { gen t (-2,1); } }";
        let f = parse(src).unwrap();
        let a = Algebra::compile(f.ring("kt").unwrap(), Window::new(-8, 2, 5)).unwrap();
        let free = a.as_module().unwrap();
        let t_mul = mult_map(&free.components[0], 0);
        t_mul.validate().unwrap();
        t_mul.validate_linear().unwrap();
        let (c, _, _) = cone(&t_mul);
        let h = component_cohomology_table(&c);
        assert_eq!(h.get(0, 0), 1);
        for n in -5..=1 {
            for d in 0..=4 {
                if (n, d) != (0, 0) && h.is_certified(n, d) {
                    assert_eq!(h.get(n, d), 0, "unexpected cohomology at ({n},{d})");
                }
            }
        }
    }

    #[test]
    fn shift_is_invertible_and_twists_signs() {
        let b = compile(AB, "B", Window::new(-3, 3, 5));
        let m = b.as_module().unwrap();
        let back = m.shift(1, 2).shift(-1, -2);
        for (c0, c1) in m.components.iter().zip(back.components.iter()) {
            assert_eq!(c0.dims, c1.dims);
            assert_eq!(c0.diff, c1.diff);
            assert_eq!(c0.action, c1.action);
        }
        let s = m.shift(1, 0);
        // odd shift flips the differential
        for (c0, c1) in m.components.iter().zip(s.components.iter()) {
            for (&(n, d), mat) in &c0.diff {
                let neg = mat.scale(c0.field().sub(0, 1));
                assert_eq!(c1.diff[&(n - 1, d)], neg);
            }
        }
    }

    #[test]
    fn product_ring_splits_componentwise() {
        let src = "
            ring R {
                component { gen x (0,1); }
                component { gen y (0,1); rel y^2; }
            }
            module M over R { gen u (0,0) @0; gen v (0,0) @1; }
        ";
        let f = parse(src).unwrap();
        let a = Algebra::compile(f.ring("R").unwrap(), Window::new(-2, 2, 4)).unwrap();
        let m = Module::compile(&a, f.module("M").unwrap()).unwrap();
        let t = m.dim_table();
        assert_eq!(t.get(0, 0), 2); // u and v
        assert_eq!(t.get(0, 1), 2); // x u and y v
        assert_eq!(t.get(0, 2), 1); // x^2 u only
    }

    #[test]
    fn inflation_gives_dg_module_over_the_big_ring() {
        let b = compile(AB, "B", Window::new(-4, 4, 6));
        let h0 = b.h0().unwrap();
        // k = H^0(B)/(x,y) over H^0(B)
        let src = "
            ring H { component { gen x (0,1); gen y (0,1); rel x*y; rel x^2; } }
            module k over H { gen u (0,0); rel x*u; rel y*u; }
        ";
        let f = parse(src).unwrap();
        let h0_alg = Algebra::compile(f.ring("H").unwrap(), h0.window).unwrap();
        let k = Module::compile(&h0_alg, f.module("k").unwrap()).unwrap();
        let infl = inflate(&k.components[0], &b.components[0]).unwrap();
        assert_eq!(infl.dim((0, 0)), 1);
        assert_eq!(infl.total_dim(), 1);
    }
}
