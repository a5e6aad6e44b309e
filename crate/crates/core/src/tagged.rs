use std::fmt;

/// Which copy of the system a node or column belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum World {
    /// The unmodified system.
    Factual,
    /// Counterfactual copy created by a path intervention.
    Pi,
    /// Nested counterfactual evaluated by recursive substitution.
    Nested,
    /// Exogenous noise of the factual system.
    Exogenous,
    /// Independent copy of the exogenous noise feeding counterfactual nodes.
    ExogenousCopy,
}

impl World {
    pub fn as_str(self) -> &'static str {
        match self {
            World::Factual => "factual",
            World::Pi => "pi",
            World::Nested => "nested",
            World::Exogenous => "exogenous",
            World::ExogenousCopy => "exogenous_copy",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Some(match text {
            "factual" => World::Factual,
            "pi" => World::Pi,
            "nested" => World::Nested,
            "exogenous" => World::Exogenous,
            "exogenous_copy" => World::ExogenousCopy,
            _ => return None,
        })
    }
}

/// A variable name together with its world.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaggedVar {
    pub name: String,
    pub world: World,
}

impl TaggedVar {
    pub fn new(name: impl Into<String>, world: World) -> Self {
        Self {
            name: name.into(),
            world,
        }
    }

    pub fn factual(name: impl Into<String>) -> Self {
        Self::new(name, World::Factual)
    }

    pub fn pi(name: impl Into<String>) -> Self {
        Self::new(name, World::Pi)
    }

    /// Identifier used in DOT output: lowercase name plus a world suffix.
    pub fn dot_id(&self) -> String {
        let base = self.name.to_lowercase();
        match self.world {
            World::Factual => base,
            World::Pi => format!("{base}_pi"),
            World::Nested => format!("{base}_nested"),
            World::Exogenous => format!("u_{base}"),
            World::ExogenousCopy => format!("u_{base}_prime"),
        }
    }
}

/// Lowercase notation: `y`, `y^π`, `y(π)`, `u_y`, `u'_y`.
impl fmt::Display for TaggedVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.name.to_lowercase();
        match self.world {
            World::Factual => write!(f, "{base}"),
            World::Pi => write!(f, "{base}^π"),
            World::Nested => write!(f, "{base}(π)"),
            World::Exogenous => write!(f, "u_{base}"),
            World::ExogenousCopy => write!(f, "u'_{base}"),
        }
    }
}
