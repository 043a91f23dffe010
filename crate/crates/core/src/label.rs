//! Leg labels.
//!
//! A [`VarLabel`] is a variable name plus a polarity flag; the dual of `x`
//! is written `∂x` (and `dx` in the text grammar). Skeleton diagrams label
//! their univalent vertices with an [`Attach`], a strand name together with
//! the position of the attachment point along that strand.

use std::fmt;
use std::sync::Arc;

/// Anything that can sit on a univalent vertex of a diagram.
pub trait LegKey: Ord + Clone + std::hash::Hash + fmt::Debug + Send + Sync + 'static {}

impl<T: Ord + Clone + std::hash::Hash + fmt::Debug + Send + Sync + 'static> LegKey for T {}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarLabel {
    name: Arc<str>,
    dual: bool,
}

impl VarLabel {
    pub fn primal(name: &str) -> Self {
        VarLabel {
            name: Arc::from(name),
            dual: false,
        }
    }

    pub fn dual_of(name: &str) -> Self {
        VarLabel {
            name: Arc::from(name),
            dual: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    /// Flips the polarity; `dual(dual(x)) == x`.
    pub fn dual(&self) -> Self {
        VarLabel {
            name: self.name.clone(),
            dual: !self.dual,
        }
    }

    /// The primal variable underlying this label.
    pub fn var(&self) -> Self {
        VarLabel {
            name: self.name.clone(),
            dual: false,
        }
    }
}

impl fmt::Debug for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            write!(f, "d{}", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// Shorthand for a primal label.
pub fn var(name: &str) -> VarLabel {
    VarLabel::primal(name)
}

/// Shorthand for a dual label.
pub fn dvar(name: &str) -> VarLabel {
    VarLabel::dual_of(name)
}

/// An attachment point on a directed strand. `closed` marks strands that
/// have been closed into circles, whose positions are only meaningful up to
/// cyclic rotation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attach {
    pub strand: Arc<str>,
    pub closed: bool,
    pub pos: u32,
}

impl Attach {
    pub fn new(strand: &str, pos: u32) -> Self {
        Attach {
            strand: Arc::from(strand),
            closed: false,
            pos,
        }
    }
}

impl fmt::Debug for Attach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.closed { "o" } else { "" };
        write!(f, "{}{}@{}", self.strand, c, self.pos)
    }
}
