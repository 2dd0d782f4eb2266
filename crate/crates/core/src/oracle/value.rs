//! Runtime values of the interpreter.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::frontend::ast::DeclId;

#[derive(Clone, Debug)]
pub enum Value {
    Null,
    Int(i32),
    Double(f64),
    Bool(bool),
    Char(char),
    Ref(Rc<Obj>),
}

impl Value {
    pub fn as_obj(&self) -> Option<&Rc<Obj>> {
        match self {
            Value::Ref(o) => Some(o),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i32> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Char(c) => Some(*c as i32),
            _ => None,
        }
    }

    pub fn as_double(&self) -> Option<f64> {
        match self {
            Value::Double(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            Value::Char(c) => Some(*c as u32 as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn str(&self) -> Option<Rc<str>> {
        let o = self.as_obj()?;
        let d = o.data.borrow();
        match &*d {
            Data::Str(s) => Some(s.clone()),
            _ => None,
        }
    }

    /// Ordinal of an enum constant.
    pub fn ordinal(&self) -> Option<i32> {
        let o = self.as_obj()?;
        let d = o.data.borrow();
        match &*d {
            Data::Plain {
                constant: Some((i, _)), ..
            } => Some(*i),
            _ => None,
        }
    }

    /// Target of a class literal.
    pub fn class_target(&self) -> Option<DeclId> {
        let o = self.as_obj()?;
        let d = o.data.borrow();
        match &*d {
            Data::Class(c) => Some(*c),
            _ => None,
        }
    }

    /// Reference identity for objects, value equality for primitives.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Null, Value::Null) => true,
            (Value::Ref(a), Value::Ref(b)) => Rc::ptr_eq(a, b),
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Double(_), _) | (_, Value::Double(_)) => match (self.as_double(), other.as_double()) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
            _ => match (self.as_int(), other.as_int()) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
        }
    }
}

#[derive(Debug)]
pub struct Obj {
    /// Allocation order, used as the identity hash.
    pub id: u64,
    /// Runtime class.
    pub class: DeclId,
    pub data: RefCell<Data>,
}

#[derive(Debug)]
pub enum Data {
    /// An object of a project class.
    Plain {
        fields: HashMap<DeclId, Value>,
        /// Ordinal and name of an enum constant.
        constant: Option<(i32, Rc<str>)>,
        /// Message of a project subclass of `Throwable`.
        message: Option<Value>,
    },
    Str(Rc<str>),
    Builder(String),
    List(Vec<Value>),
    Set(Vec<Value>),
    Map {
        entries: Vec<(Value, Value)>,
        /// Keys kept in enum ordinal order.
        by_ordinal: bool,
    },
    Iter(Vec<Value>, usize),
    Array(Vec<Value>),
    /// A class literal.
    Class(DeclId),
    PrintStream,
    Throwable(Option<Value>),
}
