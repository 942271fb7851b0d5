use std::collections::BTreeMap;
use std::sync::Arc;

use super::compose::bka;
use super::mobius::MobiusBall;
use super::planar::{Beurling, HalfPlane, HalfPlaneInverse, Identity, RadialStretch};
use super::MapHandle;
use crate::error::{Error, Result};
use crate::geometry::Dimension;

/// Ids understood by [`parse_map`], with their parameters.
pub const REGISTRY: [(&str, &str); 7] = [
    ("identity", "n (default 2)"),
    ("beurling", "a in (0,1)"),
    ("stretch", "K >= 1"),
    ("halfplane", "c > 0 (default 1)"),
    ("halfplane-inv", "c > 0 (default 1)"),
    ("bka", "K >= 1, a in (0,1), c > 0 (default 1)"),
    (
        "mobius3d",
        "p > 1 (pole on the first axis; omit for identity), lambda (default 1), n (default 3)",
    ),
];

fn parse_params(spec: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::param("map", format!("expected key=value, got `{part}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::param("map", format!("`{part}` is not numeric")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

struct Params {
    map: BTreeMap<String, f64>,
    name: String,
}

impl Params {
    fn take(&mut self, key: &str) -> Option<f64> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<f64> {
        self.take(key).ok_or_else(|| {
            Error::param("map", format!("`{}` requires parameter `{key}`", self.name))
        })
    }

    fn dim(&mut self, default: usize) -> Result<Dimension> {
        let n = self.take("n").unwrap_or(default as f64);
        if n.fract() != 0.0 || n < 0.0 {
            return Err(Error::param("n", format!("must be an integer, got {n}")));
        }
        Dimension::new(n as usize)
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::param(
                "map",
                format!("unknown parameter `{k}` for `{}`", self.name),
            )),
        }
    }
}

/// Parse a registry id such as `beurling:a=0.9` or `bka:K=2,a=0.9`.
pub fn parse_map(id: &str) -> Result<MapHandle> {
    let (name, rest) = id.split_once(':').unwrap_or((id, ""));
    let name = name.trim();
    let mut p = Params {
        map: parse_params(rest)?,
        name: name.to_string(),
    };
    let map: MapHandle = match name {
        "identity" => Arc::new(Identity::new(p.dim(2)?)),
        "beurling" => Arc::new(Beurling::new(p.require("a")?)?),
        "stretch" => Arc::new(RadialStretch::new(p.require("K")?)?),
        "halfplane" => Arc::new(HalfPlane::new(p.take("c").unwrap_or(1.0))?),
        "halfplane-inv" => Arc::new(HalfPlaneInverse::new(p.take("c").unwrap_or(1.0))?),
        "bka" => {
            let k = p.require("K")?;
            let a = p.require("a")?;
            let c = p.take("c").unwrap_or(1.0);
            Arc::new(bka(k, a, c)?)
        }
        "mobius3d" | "mobius" => {
            let n = p.dim(3)?;
            let lambda = p.take("lambda").unwrap_or(1.0);
            match p.take("p") {
                Some(pole) => Arc::new(MobiusBall::on_axis(n, pole, lambda)?),
                None => Arc::new(MobiusBall::new(n, None, lambda)?),
            }
        }
        _ => return Err(Error::UnknownMap(id.to_string())),
    };
    p.finish()?;
    Ok(map)
}

/// The standard test zoo: every map here is origin-fixing and satisfies its
/// declared distortion bound.
pub fn zoo() -> Vec<MapHandle> {
    [
        "identity:n=2",
        "identity:n=3",
        "stretch:K=2",
        "stretch:K=3",
        "beurling:a=0.5",
        "beurling:a=0.9",
        "bka:K=2,a=0.5",
        "mobius3d:p=1.5",
    ]
    .iter()
    .map(|id| parse_map(id).expect("zoo ids are valid"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_ids() {
        for id in [
            "beurling:a=0.9",
            "stretch:K=2",
            "bka:K=2,a=0.9",
            "identity:n=3",
        ] {
            assert_eq!(parse_map(id).unwrap().id(), id);
        }
        assert_eq!(
            parse_map("mobius3d:p=1.5").unwrap().id(),
            "mobius:n=3,p=1.5,lambda=1"
        );
    }

    #[test]
    fn rejects_bad_ids() {
        assert!(matches!(parse_map("nope"), Err(Error::UnknownMap(_))));
        assert!(parse_map("beurling").is_err());
        assert!(parse_map("beurling:a=2").is_err());
        assert!(parse_map("stretch:K=2,z=1").is_err());
        assert!(parse_map("stretch:K=x").is_err());
    }
}
