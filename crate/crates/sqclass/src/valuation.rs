//! Valuations on the built-in models and lifting of orderings along them.
//!
//! Every built-in model splits its square-class basis into units and one
//! uniformizer per value coordinate, so a valuation is recorded as a value
//! vector in `Γ/2Γ` and a residue class for each basis element.

use std::fmt;
use std::sync::Arc;

use crate::f2::F2Subspace;
use crate::field::{FieldModel, ModelKind, SquareClass};
use crate::ordering::{OrderingTag, SubgroupT};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ValuationData {
    model: Arc<FieldModel>,
    name: String,
    residue_model: Arc<FieldModel>,
    // per basis element: value mod 2Γ (bit k = coordinate k, most significant first)
    values: Vec<u64>,
    // per basis element: residue class of its unit part
    residues: Vec<SquareClass>,
    rank: usize,
}

impl ValuationData {
    /// All built-in valuations of a model: the `p`-adic ones of `Q_p` and
    /// of `Q` with `p ∈ S`, and for a tower `K((t))` the `t`-adic one and
    /// its composites `t+w` with every valuation `w` of `K`.
    pub fn builtins(model: &Arc<FieldModel>) -> Result<Vec<ValuationData>> {
        let n = model.dim();
        let mut out = Vec::new();
        match model.kind() {
            ModelKind::FiniteField { .. } | ModelKind::Real => {}
            ModelKind::PAdic { p } => out.push(Self::p_adic(model, *p)?),
            ModelKind::RationalS { primes } => {
                for &p in primes {
                    out.push(Self::p_adic(model, p)?);
                }
            }
            ModelKind::Tower { base, var } => {
                let base = Arc::new((**base).clone());
                let nb = base.dim();
                let mut values = vec![0u64; n];
                values[nb] = 1;
                let mut residues: Vec<SquareClass> = (0..nb).map(SquareClass::basis).collect();
                residues.push(SquareClass::ONE);
                out.push(ValuationData {
                    model: model.clone(),
                    name: var.clone(),
                    residue_model: base.clone(),
                    values,
                    residues,
                    rank: 1,
                });
                for w in Self::builtins(&base)? {
                    let mut values: Vec<u64> = w.values.clone();
                    values.push(1 << w.rank);
                    let mut residues = w.residues.clone();
                    residues.push(SquareClass::ONE);
                    out.push(ValuationData {
                        model: model.clone(),
                        name: format!("{var}+{}", w.name),
                        residue_model: w.residue_model.clone(),
                        values,
                        residues,
                        rank: w.rank + 1,
                    });
                }
            }
        }
        Ok(out)
    }

    fn p_adic(model: &Arc<FieldModel>, p: u64) -> Result<Self> {
        let residue_model = Arc::new(FieldModel::finite_field(p)?);
        let mut values = Vec::new();
        let mut residues = Vec::new();
        for i in 0..model.dim() {
            let rep = model
                .basis_rep(i)
                .ok_or_else(|| Error::InvalidModel("basis class without integer representative".into()))?;
            if *rep == p.into() {
                values.push(1);
                residues.push(SquareClass::ONE);
            } else {
                values.push(0);
                residues.push(residue_model.class_of_integer(rep)?);
            }
        }
        Ok(ValuationData {
            model: model.clone(),
            name: p.to_string(),
            residue_model,
            values,
            residues,
            rank: 1,
        })
    }

    /// Looks up a built-in valuation by name (`"3"`, `"X"`, `"Y+X"`, ...).
    pub fn select(model: &Arc<FieldModel>, name: &str) -> Result<ValuationData> {
        let all = Self::builtins(model)?;
        let names: Vec<String> = all.iter().map(|v| v.name.clone()).collect();
        all.into_iter().find(|v| v.name == name.trim()).ok_or_else(|| {
            Error::Parse(format!(
                "no valuation {name:?} on {} (available: {})",
                model.name(),
                names.join(", ")
            ))
        })
    }

    pub fn model(&self) -> &Arc<FieldModel> {
        &self.model
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn residue_model(&self) -> &Arc<FieldModel> {
        &self.residue_model
    }

    /// `dim Γ/2Γ`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Value of a class in `Γ/2Γ`.
    pub fn value(&self, c: SquareClass) -> u64 {
        (0..self.model.dim()).filter(|&i| (c.bits() >> i) & 1 == 1).fold(0, |v, i| v ^ self.values[i])
    }

    pub fn is_unit(&self, c: SquareClass) -> bool {
        self.value(c) == 0
    }

    /// `π_v` on a unit class.
    pub fn residue(&self, c: SquareClass) -> Result<SquareClass> {
        self.model.check(c)?;
        if !self.is_unit(c) {
            return Err(Error::Precondition(format!(
                "{} is not a unit class",
                self.model.class_label(c)
            )));
        }
        Ok(self.residue_unchecked(c))
    }

    fn residue_unchecked(&self, c: SquareClass) -> SquareClass {
        (0..self.model.dim())
            .filter(|&i| (c.bits() >> i) & 1 == 1)
            .fold(SquareClass::ONE, |r, i| r.mul(self.residues[i]))
    }

    /// Unit classes, a subspace of the square-class group.
    pub fn units(&self) -> F2Subspace {
        let gens: Vec<u64> =
            (0..self.model.dim()).filter(|&i| self.values[i] == 0).map(|i| 1 << i).collect();
        F2Subspace::new(self.model.dim(), &gens).expect("dimension fits")
    }

    /// Unit classes with trivial residue: the classes meeting `1 + M_v`.
    pub fn principal_units(&self) -> F2Subspace {
        let units = self.units();
        let all: Vec<u64> = units
            .elements()
            .into_iter()
            .filter(|&u| self.residue_unchecked(SquareClass(u)).is_one())
            .collect();
        F2Subspace::new(self.model.dim(), &all).expect("dimension fits")
    }

    fn same_model(&self, t: &SubgroupT) -> Result<()> {
        if **t.model() == *self.model {
            Ok(())
        } else {
            Err(Error::ModelMismatch)
        }
    }

    /// `1 + M_v ⊆ T`.
    pub fn is_compatible(&self, t: &SubgroupT) -> Result<bool> {
        self.same_model(t)?;
        Ok(self.principal_units().is_subspace_of(t.space()))
    }

    /// `π_v(T ∩ U_v)`.
    pub fn residue_ordering(&self, t: &SubgroupT) -> Result<SubgroupT> {
        if !self.is_compatible(t)? {
            return Err(Error::Precondition(format!(
                "T is not compatible with the {}-adic valuation",
                self.name
            )));
        }
        let tu = t.space().intersection(&self.units());
        let images: Vec<SquareClass> =
            tu.basis().iter().map(|&c| self.residue_unchecked(SquareClass(c))).collect();
        SubgroupT::span(self.residue_model.clone(), &images)
    }

    /// `π_v^{-1}(T_0) · F*^2`, after checking that `T_0` meets the hypothesis
    /// of one of the lifting statements (S-type, C-type or fan).
    pub fn lift_ordering(&self, t0: &SubgroupT) -> Result<SubgroupT> {
        if **t0.model() != *self.residue_model {
            return Err(Error::ModelMismatch);
        }
        self.lift_kind(t0)?;
        Ok(self.preimage(t0))
    }

    /// Which lifting statement applies to `T_0`.
    pub fn lift_kind(&self, t0: &SubgroupT) -> Result<LiftKind> {
        if !t0.is_proper() {
            return if self.rank >= 1 {
                Ok(LiftKind::C)
            } else {
                Err(Error::Precondition("value group has no nontrivial quotient mod 2".into()))
            };
        }
        let class = t0.classify()?;
        Ok(match class.tag {
            OrderingTag::C4Level2 | OrderingTag::SI(_) => LiftKind::S,
            OrderingTag::C4Level1 | OrderingTag::CI(_) if self.rank >= 1 => LiftKind::C,
            _ if class.preordering && class.rigid => LiftKind::Fan,
            tag => {
                return Err(Error::Precondition(format!(
                    "residue subgroup classified {tag} is neither S-type, C-type nor a fan"
                )))
            }
        })
    }

    fn preimage(&self, t0: &SubgroupT) -> SubgroupT {
        let gens: Vec<SquareClass> = self
            .units()
            .elements()
            .into_iter()
            .map(SquareClass)
            .filter(|&u| t0.contains(self.residue_unchecked(u)))
            .collect();
        SubgroupT::span(self.model.clone(), &gens).expect("classes come from the model")
    }
}

impl fmt::Display for ValuationData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-adic valuation on {} (rank {}, residue field {})",
            self.name,
            self.model.name(),
            self.rank,
            self.residue_model.name()
        )
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LiftKind {
    /// `T_0` is an S(I)-ordering; the lift is an S-ordering.
    S,
    /// `T_0` is a C(I)-ordering or everything; the lift is a C-ordering.
    C,
    /// `T_0` is a fan; the lift is a fan.
    Fan,
}

/// `T_1' T_2`, the class-level product.
pub fn product_lift(t1: &SubgroupT, t2: &SubgroupT) -> Result<SubgroupT> {
    t1.sum(t2)
}

/// First built-in valuation compatible with `T`, if any.
pub fn find_compatible(t: &SubgroupT) -> Result<Option<ValuationData>> {
    for v in ValuationData::builtins(t.model())? {
        if v.is_compatible(t)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}
