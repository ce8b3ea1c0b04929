//! Built-in towers with their CM data, and the raw form used to define
//! further presets.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::arith::poly::Poly;
use crate::arith::{factor_u64, Int, Rat};
use crate::error::{Error, Result};
use crate::nf::cm::CMQuadExt;
use crate::nf::units::{unit_group, UnitGroupData};
use crate::nf::{FieldElement, FieldOrder, IdealLattice};
use crate::tower::TowerData;

/// Field data by coefficients: polynomials low degree first, elements as
/// coordinates in the power basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresetData {
    pub name: String,
    pub base_label: String,
    pub base_poly: Vec<i64>,
    pub top_label: String,
    pub top_poly: Vec<i64>,
    pub p: u64,
    /// Image of the base generator, as a polynomial in the top generator.
    pub base_image: Vec<i64>,
    /// Image of the top generator under `gamma`.
    pub gamma_image: Vec<i64>,
    /// Level `p^alpha f` of the test functions; `f` a rational integer.
    pub alpha: u32,
    pub level_f: u64,
    /// `K_0 = Q(w)` with `w^2 - t w + n = 0`.
    pub k0: (i64, i64),
    /// The ideal `n` of the base, generated by a rational integer.
    pub frak_n: u64,
    /// A generator of the conductor of the Grossencharacter of `K_0`, as
    /// `a + b w`.
    pub frak_f: (i64, i64),
    pub base_unit_cap: i64,
    pub top_unit_cap: i64,
    pub top_units: Option<Vec<Vec<i64>>>,
    pub xi: Option<Vec<i64>>,
    pub xi_depth: u32,
}

impl PresetData {
    /// `Q` inside `Q(zeta_9)^+`, `K_0 = Q(sqrt -11)`.
    pub fn zeta9() -> Self {
        PresetData {
            name: "zeta9".into(),
            base_label: "Q".into(),
            base_poly: vec![0, 1],
            top_label: "Q(zeta9)+".into(),
            top_poly: vec![1, -3, 0, 1],
            p: 3,
            base_image: vec![0],
            gamma_image: vec![-2, 0, 1],
            alpha: 2,
            level_f: 1,
            k0: (1, 3),
            frak_n: 1,
            frak_f: (-1, 2),
            base_unit_cap: 1,
            top_unit_cap: 2,
            top_units: None,
            xi: None,
            xi_depth: 2,
        }
    }

    /// `Q` inside `Q(zeta_7)^+` at level `9 * 7`, `K_0 = Q(sqrt -11)`.
    pub fn zeta7() -> Self {
        PresetData {
            name: "zeta7".into(),
            top_label: "Q(zeta7)+".into(),
            top_poly: vec![-1, -2, 1, 1],
            level_f: 7,
            frak_n: 7,
            ..Self::zeta9()
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "zeta9" => Some(Self::zeta9()),
            "zeta7" => Some(Self::zeta7()),
            _ => None,
        }
    }

    pub fn builtin_names() -> [&'static str; 2] {
        ["zeta9", "zeta7"]
    }

    pub fn build(&self) -> Result<Preset> {
        let base = Arc::new(FieldOrder::monogenic(&self.base_label, &self.base_poly)?);
        let top = Arc::new(FieldOrder::monogenic(&self.top_label, &self.top_poly)?);
        let mut tower = TowerData::new(
            &self.name,
            base.clone(),
            top.clone(),
            self.p,
            &Poly::from_i64(&self.base_image),
            &Poly::from_i64(&self.gamma_image),
        )?;
        let base_units = unit_group(&base, None, self.base_unit_cap)?;
        let preset_units = self.top_units.as_ref().map(|us| us.iter().map(|u| top.element_i64(u)).collect());
        let top_units = unit_group(&top, preset_units, self.top_unit_cap)?;
        if let Some(x) = &self.xi {
            let x = top.element_i64(x);
            if !top.is_totally_positive(&x) || top.principal_ideal(&x)? != tower.rel_different {
                return Err(Error::CorruptTower(format!("{}: preset xi does not generate the relative different", self.name)));
            }
            tower.xi = Some(x);
        }
        let (t, n) = self.k0;
        let cm = CMQuadExt::new(&format!("{}(w)", self.base_label), base.clone(), t, n)?;
        let cm_top = CMQuadExt::new(&format!("{}(w)", self.top_label), top.clone(), t, n)?;
        let q = Arc::new(FieldOrder::monogenic("Q", &[0, 1])?);
        let k0 = CMQuadExt::new("K0", q, t, n)?;
        Ok(Preset { data: self.clone(), tower, base_units, top_units, k0, cm, cm_top })
    }
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub data: PresetData,
    pub tower: TowerData,
    pub base_units: UnitGroupData,
    pub top_units: UnitGroupData,
    /// `K_0` over `Q`.
    pub k0: CMQuadExt,
    /// `K = F K_0`.
    pub cm: CMQuadExt,
    /// `K' = F' K_0`.
    pub cm_top: CMQuadExt,
}

impl Preset {
    pub fn name(&self) -> &str {
        &self.data.name
    }

    pub fn level_f_ideal(&self) -> Result<IdealLattice> {
        self.tower.base.rational_ideal(&Rat::from_integer(Int::from(self.data.level_f)))
    }

    /// The conductor generator `a + b w` in `K`.
    pub fn frak_f(&self) -> FieldElement {
        let (a, b) = self.data.frak_f;
        let base = self.cm.base();
        self.cm.from_parts(&base.element_i64(&int_vec(a, base.degree())), &base.element_i64(&int_vec(b, base.degree())))
    }

    /// The largest divisor `j` of the rational integer generating
    /// `n f O_K ∩ Z` built from primes inert or ramified in `K_0`. Only
    /// defined over the base `Q`.
    pub fn frak_j(&self) -> Result<u64> {
        if self.tower.base.degree() != 1 {
            return Err(Error::Precondition("j is computed for the base Q only".into()));
        }
        let o = self.cm.order();
        let nf = o.element_scale(&self.frak_f(), &Rat::from_integer(Int::from(self.data.frak_n)));
        let m = o.principal_ideal(&nf)?.min_integer();
        let m: u64 = m.try_into().map_err(|_| Error::LimitExceeded("n f too large".into()))?;
        let mut j = 1;
        for (l, e) in factor_u64(m) {
            if self.k0.order().primes_above(l)?.len() == 1 {
                j *= l.pow(e);
            }
        }
        Ok(j)
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} < {} (p = {}), K0 discriminant {}, level {}^{} * {}",
            self.name(),
            self.data.base_label,
            self.data.top_label,
            self.data.p,
            self.k0.d(),
            self.data.p,
            self.data.alpha,
            self.data.level_f
        )
    }
}

fn int_vec(a: i64, n: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[0] = a;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_build() {
        let z9 = PresetData::zeta9().build().unwrap();
        assert_eq!(z9.frak_j().unwrap(), 11);
        assert_eq!(z9.top_units.rank(), 2);
        let z7 = PresetData::zeta7().build().unwrap();
        assert_eq!(z7.frak_j().unwrap(), 77);
        assert!(PresetData::builtin("zeta5").is_none());
    }

    #[test]
    fn wrong_xi_rejected() {
        let mut d = PresetData::zeta9();
        d.xi = Some(vec![1, 0, 0]);
        assert!(d.build().is_err());
    }
}
