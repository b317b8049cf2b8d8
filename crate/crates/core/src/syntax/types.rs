use std::fmt;

/// Types of the source language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SrcType {
    Nat,
    Unit,
    Prod(Box<SrcType>, Box<SrcType>),
    Arr(Box<SrcType>, Box<SrcType>),
}

impl SrcType {
    pub fn prod(a: SrcType, b: SrcType) -> Self {
        SrcType::Prod(Box::new(a), Box::new(b))
    }

    pub fn arr(a: SrcType, b: SrcType) -> Self {
        SrcType::Arr(Box::new(a), Box::new(b))
    }

    /// Right-nested product `a1 * (a2 * (... * unit))`.
    pub fn tuple(items: impl IntoIterator<Item = SrcType>) -> Self {
        let items: Vec<_> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(SrcType::Unit, |acc, t| SrcType::prod(t, acc))
    }

    /// True when no arrow occurs in the type.
    pub fn is_first_order(&self) -> bool {
        match self {
            SrcType::Nat | SrcType::Unit => true,
            SrcType::Prod(a, b) => a.is_first_order() && b.is_first_order(),
            SrcType::Arr(..) => false,
        }
    }
}

/// Types of the target language. `Arr` is the type of closures, `Code` the
/// type of plain abstractions, and `Rigid` an opaque environment type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TgtType {
    Nat,
    Unit,
    Prod(Box<TgtType>, Box<TgtType>),
    Arr(Box<TgtType>, Box<TgtType>),
    Code(Box<TgtType>, Box<TgtType>),
    Rigid(u64),
}

impl TgtType {
    pub fn prod(a: TgtType, b: TgtType) -> Self {
        TgtType::Prod(Box::new(a), Box::new(b))
    }

    pub fn arr(a: TgtType, b: TgtType) -> Self {
        TgtType::Arr(Box::new(a), Box::new(b))
    }

    pub fn code(a: TgtType, b: TgtType) -> Self {
        TgtType::Code(Box::new(a), Box::new(b))
    }

    pub fn tuple(items: impl IntoIterator<Item = TgtType>) -> Self {
        let items: Vec<_> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(TgtType::Unit, |acc, t| TgtType::prod(t, acc))
    }

    pub fn mentions_rigid(&self, id: u64) -> bool {
        match self {
            TgtType::Nat | TgtType::Unit => false,
            TgtType::Rigid(k) => *k == id,
            TgtType::Prod(a, b) | TgtType::Arr(a, b) | TgtType::Code(a, b) => {
                a.mentions_rigid(id) || b.mentions_rigid(id)
            }
        }
    }

    pub fn has_rigid(&self) -> bool {
        match self {
            TgtType::Nat | TgtType::Unit => false,
            TgtType::Rigid(_) => true,
            TgtType::Prod(a, b) | TgtType::Arr(a, b) | TgtType::Code(a, b) => {
                a.has_rigid() || b.has_rigid()
            }
        }
    }
}

impl fmt::Display for SrcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SrcType::Nat => write!(f, "nat"),
            SrcType::Unit => write!(f, "unit"),
            SrcType::Prod(a, b) => write!(f, "(* {a} {b})"),
            SrcType::Arr(a, b) => write!(f, "(-> {a} {b})"),
        }
    }
}

impl fmt::Display for TgtType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TgtType::Nat => write!(f, "nat"),
            TgtType::Unit => write!(f, "unit"),
            TgtType::Prod(a, b) => write!(f, "(* {a} {b})"),
            TgtType::Arr(a, b) => write!(f, "(-> {a} {b})"),
            TgtType::Code(a, b) => write!(f, "(=> {a} {b})"),
            TgtType::Rigid(k) => write!(f, "(rigid {k})"),
        }
    }
}
