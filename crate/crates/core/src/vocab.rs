//! Tag vocabularies shared by the raw CFG and its generalized form.
//!
//! Every tag renders as a single upper-case token and the token sets of
//! the different vocabularies are disjoint, which is what lets a
//! generalized label be parsed back from its canonical text.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! token_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident { $($variant:ident => $text:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(
                #[serde(rename = $text)]
                $variant,
            )+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownTag;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(UnknownTag(s.to_string())),
                }
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown tag `{0}`")]
pub struct UnknownTag(pub String);

token_enum! {
    /// Statement-level node kind of a control-flow graph node.
    pub enum NodeKind {
        Entry => "ENTRY",
        Exit => "EXIT",
        VarDecl => "VARDECL",
        Assign => "ASSIGN",
        UnaryUpdate => "UNARY_UPDATE",
        MethodCall => "METHOD_CALL",
        Return => "RETURN",
        If => "IF",
        Loop => "LOOP",
        Switch => "SWITCH",
        Try => "TRY",
        Catch => "CATCH",
        Finally => "FINALLY",
        Throw => "THROW",
        Break => "BREAK",
        Continue => "CONTINUE",
        Sync => "SYNC",
        Other => "OTHER",
    }
}

token_enum! {
    /// Abstract type context. User-defined and non-whitelisted types
    /// collapse to `OBJECT`.
    pub enum TypeTag {
        Int => "INT",
        Long => "LONG",
        Short => "SHORT",
        Byte => "BYTE",
        Char => "CHAR",
        Float => "FLOAT",
        Double => "DOUBLE",
        Boolean => "BOOLEAN",
        String => "STRING",
        List => "LIST",
        Map => "MAP",
        Set => "SET",
        Optional => "OPTIONAL",
        ExceptionType => "EXCEPTION_TYPE",
        Object => "OBJECT",
        Void => "VOID",
        Unknown => "UNKNOWN",
    }
}

token_enum! {
    /// Literal category. `NULL` is the only tag that pins a literal value.
    pub enum LiteralKind {
        Int => "INT_LIT",
        Float => "FLOAT_LIT",
        Char => "CHAR_LIT",
        String => "STRING_LIT",
        Bool => "BOOL_LIT",
        Null => "NULL",
    }
}

token_enum! {
    /// Operator category occurring inside a statement's expressions.
    pub enum OpTag {
        And => "AND",
        Or => "OR",
        Not => "NOT",
        InstanceOf => "INSTANCEOF",
        Plus => "PLUS",
        Minus => "MINUS",
        Times => "TIMES",
        Divide => "DIVIDE",
        Modulo => "MODULO",
        Eq => "EQ",
        Ne => "NE",
        Lt => "LT",
        Le => "LE",
        Gt => "GT",
        Ge => "GE",
        BitAnd => "BIT_AND",
        BitOr => "BIT_OR",
        BitXor => "BIT_XOR",
        ShiftLeft => "SHL",
        ShiftRight => "SHR",
        ShiftRightUnsigned => "USHR",
        Negate => "NEGATE",
        UnaryPlus => "UNARY_PLUS",
        Complement => "COMPLEMENT",
        Increment => "INCREMENT",
        Decrement => "DECREMENT",
        PlusAssign => "PLUS_ASSIGN",
        MinusAssign => "MINUS_ASSIGN",
        TimesAssign => "TIMES_ASSIGN",
        DivideAssign => "DIVIDE_ASSIGN",
        ModuloAssign => "MODULO_ASSIGN",
        AndAssign => "AND_ASSIGN",
        OrAssign => "OR_ASSIGN",
        XorAssign => "XOR_ASSIGN",
        ShlAssign => "SHL_ASSIGN",
        ShrAssign => "SHR_ASSIGN",
        UshrAssign => "USHR_ASSIGN",
        Ternary => "TERNARY",
        Call => "CALL",
        New => "NEW",
        Cast => "CAST",
        Lambda => "LAMBDA",
    }
}

token_enum! {
    /// Argument-count bucket kept on generalized method-call labels.
    pub enum ArityBucket {
        Zero => "ARGS0",
        One => "ARGS1",
        Two => "ARGS2",
        ThreeOrMore => "ARGS3P",
    }
}

token_enum! {
    /// Neighboring data relation carried by a control-flow edge: whether
    /// the source node defines or uses a variable that the destination
    /// defines or uses.
    pub enum DataEdgeModifier {
        DefDef => "DEF_DEF",
        DefUse => "DEF_USE",
        UseDef => "USE_DEF",
        UseUse => "USE_USE",
    }
}

impl ArityBucket {
    pub fn from_count(n: usize) -> Self {
        match n {
            0 => ArityBucket::Zero,
            1 => ArityBucket::One,
            2 => ArityBucket::Two,
            _ => ArityBucket::ThreeOrMore,
        }
    }
}

impl OpTag {
    pub fn from_binary(op: &str) -> Option<OpTag> {
        Some(match op {
            "&&" => OpTag::And,
            "||" => OpTag::Or,
            "+" => OpTag::Plus,
            "-" => OpTag::Minus,
            "*" => OpTag::Times,
            "/" => OpTag::Divide,
            "%" => OpTag::Modulo,
            "==" => OpTag::Eq,
            "!=" => OpTag::Ne,
            "<" => OpTag::Lt,
            "<=" => OpTag::Le,
            ">" => OpTag::Gt,
            ">=" => OpTag::Ge,
            "&" => OpTag::BitAnd,
            "|" => OpTag::BitOr,
            "^" => OpTag::BitXor,
            "<<" => OpTag::ShiftLeft,
            ">>" => OpTag::ShiftRight,
            ">>>" => OpTag::ShiftRightUnsigned,
            _ => return None,
        })
    }

    pub fn from_unary(op: &str) -> Option<OpTag> {
        Some(match op {
            "!" => OpTag::Not,
            "-" => OpTag::Negate,
            "+" => OpTag::UnaryPlus,
            "~" => OpTag::Complement,
            _ => return None,
        })
    }

    /// Compound assignment operators; plain `=` yields `None`.
    pub fn from_assignment(op: &str) -> Option<OpTag> {
        Some(match op {
            "+=" => OpTag::PlusAssign,
            "-=" => OpTag::MinusAssign,
            "*=" => OpTag::TimesAssign,
            "/=" => OpTag::DivideAssign,
            "%=" => OpTag::ModuloAssign,
            "&=" => OpTag::AndAssign,
            "|=" => OpTag::OrAssign,
            "^=" => OpTag::XorAssign,
            "<<=" => OpTag::ShlAssign,
            ">>=" => OpTag::ShrAssign,
            ">>>=" => OpTag::UshrAssign,
            _ => return None,
        })
    }

    pub fn is_conditional(self) -> bool {
        matches!(self, OpTag::And | OpTag::Or)
    }
}

/// Core-library exception types that keep the `EXCEPTION_TYPE` tag.
const CORE_EXCEPTIONS: &[&str] = &[
    "Throwable",
    "Exception",
    "Error",
    "RuntimeException",
    "IOException",
    "UncheckedIOException",
    "FileNotFoundException",
    "IllegalArgumentException",
    "IllegalStateException",
    "NullPointerException",
    "UnsupportedOperationException",
    "IndexOutOfBoundsException",
    "ArrayIndexOutOfBoundsException",
    "ClassCastException",
    "ArithmeticException",
    "NumberFormatException",
    "InterruptedException",
    "ClassNotFoundException",
    "CloneNotSupportedException",
    "NoSuchElementException",
    "ConcurrentModificationException",
    "TimeoutException",
    "ExecutionException",
    "AssertionError",
    "SecurityException",
    "ReflectiveOperationException",
];

impl TypeTag {
    /// Maps a source type name to its tag. Type arguments, array brackets
    /// and package qualifiers are ignored; arrays map to `OBJECT`.
    pub fn from_type_name(name: &str) -> TypeTag {
        let name = name.trim();
        if name.ends_with(']') || name.ends_with("...") {
            return TypeTag::Object;
        }
        let base = name.split('<').next().unwrap_or(name).trim();
        let base = base.rsplit('.').next().unwrap_or(base).trim();
        match base {
            "int" | "Integer" => TypeTag::Int,
            "long" | "Long" => TypeTag::Long,
            "short" | "Short" => TypeTag::Short,
            "byte" | "Byte" => TypeTag::Byte,
            "char" | "Character" => TypeTag::Char,
            "float" | "Float" => TypeTag::Float,
            "double" | "Double" => TypeTag::Double,
            "boolean" | "Boolean" => TypeTag::Boolean,
            "String" | "CharSequence" => TypeTag::String,
            "List" | "ArrayList" | "LinkedList" => TypeTag::List,
            "Map" | "HashMap" | "TreeMap" | "LinkedHashMap" | "ConcurrentHashMap" => TypeTag::Map,
            "Set" | "HashSet" | "TreeSet" | "LinkedHashSet" => TypeTag::Set,
            "Optional" => TypeTag::Optional,
            "void" => TypeTag::Void,
            "var" | "" => TypeTag::Unknown,
            other if CORE_EXCEPTIONS.contains(&other) => TypeTag::ExceptionType,
            _ => TypeTag::Object,
        }
    }
}
