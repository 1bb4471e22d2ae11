//! Plane configuration files.
//!
//! ```text
//! [plane]
//! family = hartmann
//! r1 = 2, s1 = 0.5, r2 = 1, s2 = 3
//! seed = 7
//! ```
//!
//! Entries are `key = value`, separated by newlines or commas. `#` starts a
//! comment. Missing family parameters default to 1.

use std::collections::BTreeMap;

use thiserror::Error;
use toroidal::planes::Tolerances;
use toroidal::Plane;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("constraint violated: {0}")]
    Constraint(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Classical,
    /// `𝓜(f_{d,s}, id)`.
    Swapping {
        d: f64,
        s: f64,
    },
    Hartmann {
        r1: f64,
        s1: f64,
        r2: f64,
        s2: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneConfig {
    pub family: Family,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

impl Default for PlaneConfig {
    fn default() -> Self {
        PlaneConfig {
            family: Family::Classical,
            tolerances: Tolerances::default(),
            seed: None,
        }
    }
}

impl PlaneConfig {
    pub fn plane(&self) -> Plane {
        let plane = match self.family {
            Family::Classical => Plane::classical(),
            Family::Swapping { d, s } => {
                Plane::swapping_semi(d, s).expect("parameters checked at parse time")
            }
            Family::Hartmann { r1, s1, r2, s2 } => {
                Plane::hartmann(r1, s1, r2, s2).expect("parameters checked at parse time")
            }
        };
        plane.with_tolerances(self.tolerances)
    }
}

const KEYS: [&str; 10] = [
    "family",
    "r1",
    "s1",
    "r2",
    "s2",
    "d",
    "s",
    "seed",
    "tol_join",
    "tol_hausdorff",
];

pub fn parse_config(text: &str) -> Result<PlaneConfig, ConfigError> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            if content != "[plane]" {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("unknown section {content}"),
                });
            }
            continue;
        }
        for item in content.split(',') {
            let (key, value) = item.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("expected key = value, found {:?}", item.trim()),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("unknown key {key:?}"),
                });
            }
            if entries.insert(key, (line, value)).is_some() {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("duplicate key {key:?}"),
                });
            }
        }
    }

    let number = |key: &str| -> Result<Option<f64>, ConfigError> {
        let Some(&(line, value)) = entries.get(key) else {
            return Ok(None);
        };
        // accept the typographic minus sign
        let v = value
            .replace('\u{2212}', "-")
            .parse::<f64>()
            .map_err(|_| ConfigError::Parse {
                line,
                message: format!("{key}: {value:?} is not a number"),
            })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(ConfigError::Constraint(format!(
                "{key} = {v} must be positive"
            )));
        }
        Ok(Some(v))
    };

    let family_name = entries.get("family").map_or("classical", |e| e.1);
    let allowed: &[&str] = match family_name {
        "classical" => &[],
        "swapping" => &["d", "s"],
        "hartmann" => &["r1", "s1", "r2", "s2"],
        other => {
            return Err(ConfigError::Parse {
                line: entries["family"].0,
                message: format!("unknown family {other:?}"),
            })
        }
    };
    for key in ["r1", "s1", "r2", "s2", "d", "s"] {
        if let Some(&(line, _)) = entries.get(key) {
            if !allowed.contains(&key) {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("{key} does not apply to family {family_name}"),
                });
            }
        }
    }
    let param = |key: &str| number(key).map(|v| v.unwrap_or(1.0));
    let family = match family_name {
        "classical" => Family::Classical,
        "swapping" => Family::Swapping {
            d: param("d")?,
            s: param("s")?,
        },
        _ => Family::Hartmann {
            r1: param("r1")?,
            s1: param("s1")?,
            r2: param("r2")?,
            s2: param("s2")?,
        },
    };

    let mut tolerances = Tolerances::default();
    if let Some(t) = number("tol_join")? {
        tolerances.join_residual = t;
    }
    if let Some(t) = number("tol_hausdorff")? {
        tolerances.hausdorff_eq = t;
    }
    let seed = match entries.get("seed") {
        None => None,
        Some(&(line, value)) => Some(value.parse::<u64>().map_err(|_| ConfigError::Parse {
            line,
            message: format!("seed: {value:?} is not a nonnegative integer"),
        })?),
    };
    Ok(PlaneConfig {
        family,
        tolerances,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical() {
        let c = parse_config("family = classical").unwrap();
        assert_eq!(c, PlaneConfig::default());
        assert_eq!(parse_config("").unwrap(), PlaneConfig::default());
    }

    #[test]
    fn hartmann_on_one_line() {
        let c = parse_config("family = hartmann, r1 = 2, s1 = 0.5, r2 = 1, s2 = 3").unwrap();
        assert_eq!(
            c.family,
            Family::Hartmann {
                r1: 2.0,
                s1: 0.5,
                r2: 1.0,
                s2: 3.0
            }
        );
        assert_eq!(c.plane().to_string(), "hartmann(2, 0.5; 1, 3)");
    }

    #[test]
    fn sections_comments_and_overrides() {
        let text = "# a swapping plane\n[plane]\nfamily = swapping\nd = 3\ns = 0.2  # flat\nseed = 9\ntol_join = 1e-8\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.family, Family::Swapping { d: 3.0, s: 0.2 });
        assert_eq!(c.seed, Some(9));
        assert_eq!(c.tolerances.join_residual, 1e-8);
        assert_eq!(c.tolerances.hausdorff_eq, 1e-7);
    }

    #[test]
    fn negative_parameter_is_a_constraint_error() {
        for text in ["family = hartmann, r1 = −1", "family = hartmann, r1 = -1"] {
            match parse_config(text) {
                Err(ConfigError::Constraint(m)) => assert!(m.contains("r1")),
                other => panic!("{other:?}"),
            }
        }
        assert!(matches!(
            parse_config("family = swapping\ns = 0"),
            Err(ConfigError::Constraint(_))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("family = classical\ncolour = red", 2),
            ("family = hartmann\n\nr1 = two", 3),
            ("[solver]", 1),
            ("family = torus", 1),
            ("family = classical\nd = 2", 2),
            ("seed = -3", 1),
            ("r1 = 1\nr1 = 2", 2),
            ("family classical", 1),
        ];
        for (text, expected) in cases {
            match parse_config(text) {
                Err(ConfigError::Parse { line, .. }) => assert_eq!(line, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
