//! The JSON group-definition document read by the CLI and the harness.
//!
//! ```json
//! {"label": "V4", "kind": "mul_table", "mul": [[0,1,2,3],[1,0,3,2],[2,3,0,1],[3,2,1,0]]}
//! {"label": "S3", "kind": "perm_gens", "gens": [[1,0,2],[1,2,0]]}
//! {"label": "S3xC2", "kind": "product", "factors": [{"kind": "catalog", "name": "S(3)"}, {"kind": "catalog", "name": "C(2)"}]}
//! {"kind": "catalog", "name": "Q8"}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{catalog_get_capped, catalog_perm_gens};
use crate::error::{Error, Result};
use crate::group::{build_from_perm_gens, direct_product_capped, AssocCheck, GroupTable, DEFAULT_MAX_ORDER};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDef {
    MulTable {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        mul: Vec<Vec<usize>>,
    },
    PermGens {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        gens: Vec<Permutation>,
    },
    Product {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        factors: Vec<GroupDef>,
    },
    Catalog {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        name: String,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct ResolveOptions {
    pub max_order: usize,
    pub assoc: AssocCheck,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { max_order: DEFAULT_MAX_ORDER, assoc: AssocCheck::Auto }
    }
}

impl GroupDef {
    pub fn catalog(name: &str) -> Self {
        GroupDef::Catalog { label: None, name: name.to_string() }
    }

    /// A `mul_table` definition reproducing `g` exactly.
    pub fn from_table(g: &GroupTable) -> Self {
        GroupDef::MulTable { label: Some(g.label().to_string()), mul: g.rows() }
    }

    /// Catalog name, inline JSON (starting with `{`), or a path to a JSON file.
    pub fn parse_arg(arg: &str) -> Result<Self> {
        let trimmed = arg.trim();
        if trimmed.starts_with('{') {
            return Self::from_json(trimmed);
        }
        if trimmed.ends_with(".json") || Path::new(trimmed).is_file() {
            return Self::from_file(Path::new(trimmed));
        }
        Ok(Self::catalog(trimmed))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDefinition(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn label(&self) -> String {
        match self {
            GroupDef::MulTable { label, mul } => label.clone().unwrap_or_else(|| format!("table[{}]", mul.len())),
            GroupDef::PermGens { label, .. } => label.clone().unwrap_or_else(|| "perm_gens".into()),
            GroupDef::Product { label, factors } => label
                .clone()
                .unwrap_or_else(|| factors.iter().map(|f| f.label()).collect::<Vec<_>>().join("x")),
            GroupDef::Catalog { label, name } => label.clone().unwrap_or_else(|| name.clone()),
        }
    }

    pub fn resolve(&self) -> Result<GroupTable> {
        self.resolve_with(&ResolveOptions::default())
    }

    pub fn resolve_with(&self, opts: &ResolveOptions) -> Result<GroupTable> {
        let label = self.label();
        let g = match self {
            GroupDef::MulTable { mul, .. } => {
                if mul.len() > opts.max_order {
                    return Err(Error::OrderExceeded { order_lower_bound: mul.len() as u128, cap: opts.max_order });
                }
                GroupTable::from_table_with(mul.len(), mul.clone(), label.clone(), opts.assoc)?
            }
            GroupDef::PermGens { gens, .. } => {
                if gens.is_empty() {
                    return Err(Error::InvalidDefinition("perm_gens needs at least one generator".into()));
                }
                build_from_perm_gens(gens, &label, opts.max_order)?
            }
            GroupDef::Product { factors, .. } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::InvalidDefinition("product needs at least one factor".into()))?;
                let mut acc = first.resolve_with(opts)?;
                for f in it {
                    acc = direct_product_capped(&acc, &f.resolve_with(opts)?, opts.max_order)?;
                }
                acc
            }
            GroupDef::Catalog { name, .. } => catalog_get_capped(name, opts.max_order)?,
        };
        Ok(g.with_label(label))
    }

    /// Permutation generators for sampling. Tables use their right-regular
    /// action `x ↦ x·g`; products act on disjoint point sets.
    pub fn perm_gens(&self) -> Result<Vec<Permutation>> {
        match self {
            GroupDef::PermGens { gens, .. } => {
                if gens.is_empty() {
                    return Err(Error::InvalidDefinition("perm_gens needs at least one generator".into()));
                }
                let d = gens[0].degree();
                if let Some(bad) = gens.iter().find(|p| p.degree() != d) {
                    return Err(Error::DegreeMismatch { left: d, right: bad.degree() });
                }
                Ok(gens.clone())
            }
            GroupDef::Catalog { name, .. } => catalog_perm_gens(name),
            GroupDef::MulTable { .. } => {
                let g = self.resolve()?;
                let n = g.order();
                (0..n)
                    .map(|s| Permutation::from_images((0..n).map(|x| g.mul(x, s)).collect()))
                    .collect()
            }
            GroupDef::Product { factors, .. } => {
                let parts: Vec<Vec<Permutation>> = factors.iter().map(|f| f.perm_gens()).collect::<Result<_>>()?;
                if parts.is_empty() {
                    return Err(Error::InvalidDefinition("product needs at least one factor".into()));
                }
                let total: usize = parts.iter().map(|p| p[0].degree()).sum();
                let mut out = Vec::new();
                let mut offset = 0;
                for gens in parts {
                    let d = gens[0].degree();
                    for g in gens {
                        let image = (0..total)
                            .map(|p| if (offset..offset + d).contains(&p) { offset + g.apply(p - offset) } else { p })
                            .collect();
                        out.push(Permutation::from_images(image)?);
                    }
                    offset += d;
                }
                Ok(out)
            }
        }
    }
}
