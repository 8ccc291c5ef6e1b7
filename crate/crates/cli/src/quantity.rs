//! Sweep quantities, written `name[:key=value]...`.
//!
//! | quantity | value at strength `p` |
//! |---|---|
//! | `eq2:q=N` | closed-form fidelity of an `N`-qubit fused chain |
//! | `chain:q=N` | the same, simulated |
//! | `neg:q=N:pt=1+2` | simulated min partial-transpose eigenvalue of that chain |
//! | `rho2:fidelity` / `purity` / `negativity` | two-qubit closed forms |
//! | `rho3:fidelity` / `negativity-edge` / `negativity-middle` | three-qubit closed forms |
//! | `scenario:NAME[:binding=fresh\|equal][:form=sim\|formula]` | five-qubit scenario fidelity |

use std::collections::HashMap;
use std::str::FromStr;

use clusterfuse::closed_forms::{chain_fidelity, rho2_metrics, rho3_metrics, Transcription};
use clusterfuse::densmat::negativity;
use clusterfuse::error::{Error, Result};
use clusterfuse::figures::primitive_chain;
use clusterfuse::noise::DephasingStrength;
use clusterfuse::strategies::{run_scenario, Binding, Scenario, ScenarioKind};

#[derive(Clone, Debug, PartialEq)]
pub struct Quantity {
    spec: String,
    kind: Kind,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Eq2 {
        q: usize,
    },
    Chain {
        q: usize,
    },
    Negativity {
        q: usize,
        subset: Vec<usize>,
    },
    Rho2(&'static str),
    Rho3(&'static str),
    Scenario {
        kind: ScenarioKind,
        binding: Binding,
        simulated: bool,
    },
}

fn bad(spec: &str, why: &str) -> Error {
    Error::InvalidArgument(format!("quantity `{spec}`: {why}"))
}

fn pick(spec: &str, value: &str, allowed: &[&'static str]) -> Result<&'static str> {
    allowed
        .iter()
        .copied()
        .find(|a| *a == value)
        .ok_or_else(|| bad(spec, &format!("expected one of {allowed:?}")))
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        Ok(Quantity {
            spec: spec.to_owned(),
            kind: parse_kind(spec)?,
        })
    }
}

fn parse_kind(spec: &str) -> Result<Kind> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let mut bare = Vec::new();
    let mut keys = HashMap::new();
    for part in parts {
        match part.split_once('=') {
            Some((k, v)) => {
                keys.insert(k, v);
            }
            None => bare.push(part),
        }
    }
    let length = |keys: &HashMap<&str, &str>| -> Result<usize> {
        let q = keys.get("q").ok_or_else(|| bad(spec, "missing q=N"))?;
        q.parse().map_err(|_| bad(spec, "q must be an integer"))
    };
    let single = |bare: &[&str]| -> Result<String> {
        match bare {
            [one] => Ok(one.to_string()),
            _ => Err(bad(spec, "expected exactly one metric")),
        }
    };
    match name {
        "eq2" => Ok(Kind::Eq2 { q: length(&keys)? }),
        "chain" => Ok(Kind::Chain { q: length(&keys)? }),
        "neg" => {
            let q = length(&keys)?;
            let subset = keys
                .get("pt")
                .ok_or_else(|| bad(spec, "missing pt=K[+K...]"))?
                .split('+')
                .map(|k| k.parse().map_err(|_| bad(spec, "pt lists 1-based qubit numbers")))
                .collect::<Result<Vec<usize>>>()?;
            Ok(Kind::Negativity { q, subset })
        }
        "rho2" => Ok(Kind::Rho2(pick(
            spec,
            &single(&bare)?,
            &["fidelity", "purity", "negativity"],
        )?)),
        "rho3" => Ok(Kind::Rho3(pick(
            spec,
            &single(&bare)?,
            &["fidelity", "negativity-edge", "negativity-middle"],
        )?)),
        "scenario" => {
            let kind: ScenarioKind = single(&bare)?.parse()?;
            let binding = match keys.get("binding").copied().unwrap_or("fresh") {
                "fresh" => Binding::FreshPrimitives,
                "equal" => Binding::Equal,
                _ => return Err(bad(spec, "binding is fresh or equal")),
            };
            let simulated = match keys.get("form").copied().unwrap_or("sim") {
                "sim" => true,
                "formula" => false,
                _ => return Err(bad(spec, "form is sim or formula")),
            };
            Ok(Kind::Scenario {
                kind,
                binding,
                simulated,
            })
        }
        _ => Err(Error::UnknownName {
            kind: "quantity",
            value: spec.to_owned(),
        }),
    }
}

impl Quantity {
    /// The text this quantity was parsed from.
    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn eval(&self, p: DephasingStrength) -> Result<f64> {
        match &self.kind {
            Kind::Eq2 { q } => chain_fidelity(*q, p),
            Kind::Chain { q } => Ok(primitive_chain(*q, p)?.fidelity()),
            Kind::Negativity { q, subset } => negativity(primitive_chain(*q, p)?.state(), subset),
            Kind::Rho2(metric) => {
                let m = rho2_metrics(p);
                Ok(match *metric {
                    "fidelity" => m.fidelity,
                    "purity" => m.purity,
                    _ => m.negativity,
                })
            }
            Kind::Rho3(metric) => {
                let m = rho3_metrics(p);
                Ok(match *metric {
                    "fidelity" => m.fidelity,
                    "negativity-edge" => m.negativity_edge,
                    _ => m.negativity_middle,
                })
            }
            Kind::Scenario {
                kind,
                binding,
                simulated,
            } => {
                let s = Scenario::new(*kind, binding.strengths(p))?;
                if *simulated {
                    Ok(run_scenario(&s)?.fidelity)
                } else {
                    Ok(s.closed_form(Transcription::Corrected).unwrap_or(f64::NAN))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_form() {
        assert_eq!("eq2:q=5".parse::<Quantity>().unwrap().kind, Kind::Eq2 { q: 5 });
        assert_eq!(
            "neg:q=4:pt=1+2".parse::<Quantity>().unwrap().kind,
            Kind::Negativity {
                q: 4,
                subset: vec![1, 2]
            }
        );
        assert_eq!(
            "rho3:negativity-edge".parse::<Quantity>().unwrap().kind,
            Kind::Rho3("negativity-edge")
        );
        assert_eq!(
            "scenario:method2-fail4:binding=equal:form=formula"
                .parse::<Quantity>()
                .unwrap()
                .kind,
            Kind::Scenario {
                kind: ScenarioKind::Method2Fail4,
                binding: Binding::Equal,
                simulated: false
            }
        );
    }

    #[test]
    fn rejects_malformed() {
        for spec in [
            "eq2",
            "eq2:q=x",
            "rho2:entropy",
            "rho2",
            "neg:q=3",
            "scenario:nope",
            "bogus:q=2",
        ] {
            assert!(spec.parse::<Quantity>().is_err(), "{spec}");
        }
    }

    #[test]
    fn simulated_and_closed_form_agree() {
        let p = DephasingStrength::new(0.3).unwrap();
        let a = "eq2:q=4".parse::<Quantity>().unwrap().eval(p).unwrap();
        let b = "chain:q=4".parse::<Quantity>().unwrap().eval(p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
