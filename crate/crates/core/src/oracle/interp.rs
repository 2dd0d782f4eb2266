//! Big-step interpreter over the resolved AST.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use super::value::{Data, Obj, Value};
use super::{ExecutionResult, Status};
use crate::error::OracleError;
use crate::frontend::ast::*;
use crate::frontend::{DeclKind, Project};
use crate::semantics::{Binding, CallKind, RefKind, SymbolTable, TypeRef, VarId};

const MAX_DEPTH: usize = 1500;

pub(crate) enum Flow {
    Return(Value),
    Break,
    Continue,
    /// A thrown `Throwable` object.
    Throw(Value),
    /// A runtime fault such as a null dereference.
    Fault(String),
    Fail(OracleError),
}

type R<T> = Result<T, Flow>;

fn fault<T>(msg: impl Into<String>) -> R<T> {
    Err(Flow::Fault(msg.into()))
}

#[derive(Default)]
struct Frame {
    locals: HashMap<VarId, Value>,
    this: Option<Value>,
}

enum Place {
    Local(VarId),
    Static(DeclId),
    Field(Rc<Obj>, DeclId),
    Elem(Rc<Obj>, usize),
}

pub(crate) struct Interp<'a> {
    project: &'a Project,
    table: &'a SymbolTable,
    budget: u64,
    pub steps: u64,
    depth: usize,
    next_id: u64,
    pub hits: BTreeMap<DeclId, u64>,
    pub output: String,
    pub observed: BTreeSet<(VarId, DeclId)>,
    statics: HashMap<DeclId, Value>,
    initialized: HashSet<DeclId>,
    literals: HashMap<ExprId, Value>,
    print_stream: Option<Value>,
}

impl<'a> Interp<'a> {
    pub fn new(project: &'a Project, table: &'a SymbolTable, budget: u64) -> Self {
        Interp {
            project,
            table,
            budget,
            steps: 0,
            depth: 0,
            next_id: 1,
            hits: BTreeMap::new(),
            output: String::new(),
            observed: BTreeSet::new(),
            statics: HashMap::new(),
            initialized: HashSet::new(),
            literals: HashMap::new(),
            print_stream: None,
        }
    }

    fn known(&self, key: &str) -> DeclId {
        self.project.lookup(key).unwrap_or(DeclId::UNSET)
    }

    fn tick(&mut self) -> R<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Flow::Fail(OracleError::BudgetExceeded(self.budget)));
        }
        Ok(())
    }

    fn hit(&mut self, d: DeclId) {
        *self.hits.entry(d).or_default() += 1;
    }

    fn alloc(&mut self, class: DeclId, data: Data) -> Value {
        let id = self.next_id;
        self.next_id += 1;
        Value::Ref(Rc::new(Obj {
            id,
            class,
            data: RefCell::new(data),
        }))
    }

    fn new_str(&mut self, s: &str) -> Value {
        let c = self.known("java.lang.String");
        self.alloc(c, Data::Str(Rc::from(s)))
    }

    fn throw_builtin<T>(&mut self, class: &str, msg: Option<String>) -> R<T> {
        let m = match msg {
            Some(m) => Some(self.new_str(&m)),
            None => None,
        };
        let c = self.known(class);
        let v = self.alloc(c, Data::Throwable(m));
        Err(Flow::Throw(v))
    }

    fn observe(&mut self, var: VarId, v: &Value) {
        if let Value::Ref(o) = v {
            self.observed.insert((var, o.class));
        }
    }

    fn is_subclass(&self, c: DeclId, of: DeclId) -> bool {
        c == of || self.table.is_subtype_decl(c, of)
    }

    // ---- entry ----------------------------------------------------------

    /// Runs a static method, or an instance method on a fresh object of
    /// its class surrounded by the `setUp`/`tearDown` methods.
    pub fn run_entry(&mut self, m: DeclId) -> Result<(Status, Option<String>), OracleError> {
        let r = self.entry_inner(m);
        match r {
            Ok(()) => Ok((Status::Pass, None)),
            Err(Flow::Fail(e)) => Err(e),
            Err(Flow::Throw(v)) => {
                let class = v.as_obj().map(|o| o.class).unwrap_or(DeclId::UNSET);
                let msg = self.throwable_message(&v);
                let assertion = self.known("java.lang.AssertionError");
                match msg {
                    Err(Flow::Fail(e)) => Err(e),
                    Err(_) => Ok((Status::RuntimeError, Some("exception while reading message".into()))),
                    Ok(msg) => {
                        if class != DeclId::UNSET && self.is_subclass(class, assertion) {
                            Ok((Status::AssertionFailure, msg))
                        } else {
                            let key = self.project.decl(class).key.clone();
                            Ok((Status::RuntimeError, Some(match msg {
                                Some(m) => format!("{key}: {m}"),
                                None => key,
                            })))
                        }
                    }
                }
            }
            Err(Flow::Fault(s)) => Ok((Status::RuntimeError, Some(s))),
            Err(Flow::Return(_) | Flow::Break | Flow::Continue) => Ok((Status::Pass, None)),
        }
    }

    fn entry_inner(&mut self, m: DeclId) -> R<()> {
        let d = self.project.decl(m);
        let nparams = self.table.sig(m).map(|s| s.params.len()).unwrap_or(0);
        let not_exec = |why: &str| Flow::Fail(OracleError::NotExecutable(d.key.clone(), why.to_string()));
        if d.kind != DeclKind::Method || nparams > 0 {
            return Err(not_exec("entrypoints take no arguments"));
        }
        if d.is_static {
            self.invoke(m, None, Vec::new())?;
            return Ok(());
        }
        let class = self.project.owner_type(m);
        if self.project.decl(class).is_abstract || self.project.decl(class).kind != DeclKind::Class {
            return Err(not_exec("the test class cannot be instantiated"));
        }
        let ctors = self.ctors_of(class);
        let ctor = ctors
            .iter()
            .copied()
            .find(|c| self.table.sig(*c).is_some_and(|s| s.params.is_empty()));
        if !ctors.is_empty() && ctor.is_none() {
            return Err(not_exec("the test class has no no-argument constructor"));
        }
        let obj = self.instantiate(class, ctor, Vec::new())?;
        let set_up = self.lifecycle(class, "setUp");
        let tear_down = self.lifecycle(class, "tearDown");
        if let Some(s) = set_up {
            self.call_virtual(&obj, s, Vec::new())?;
        }
        let r = self.call_virtual(&obj, m, Vec::new()).map(|_| ());
        if let Some(t) = tear_down {
            if !matches!(r, Err(Flow::Fail(_))) {
                let td = self.call_virtual(&obj, t, Vec::new()).map(|_| ());
                return r.and(td);
            }
        }
        r
    }

    fn lifecycle(&self, class: DeclId, name: &str) -> Option<DeclId> {
        let mut cur = Some(class);
        while let Some(c) = cur {
            if self.project.decl(c).is_stub {
                return None;
            }
            let found = self.project.decl(c).children.iter().copied().find(|m| {
                let e = self.project.decl(*m);
                e.kind == DeclKind::Method
                    && e.name == name
                    && !e.is_static
                    && self.table.sig(*m).is_some_and(|s| s.params.is_empty())
            });
            if found.is_some() {
                return found;
            }
            cur = self.table.superclass_decl(c);
        }
        None
    }

    // ---- classes and objects ------------------------------------------------

    fn ctors_of(&self, class: DeclId) -> Vec<DeclId> {
        self.project
            .decl(class)
            .children
            .iter()
            .copied()
            .filter(|c| self.project.decl(*c).kind == DeclKind::Constructor)
            .collect()
    }

    fn default_of(t: Option<&TypeRef>) -> Value {
        match t {
            Some(TypeRef::Prim(PrimKind::Int)) => Value::Int(0),
            Some(TypeRef::Prim(PrimKind::Double)) => Value::Double(0.0),
            Some(TypeRef::Prim(PrimKind::Boolean)) => Value::Bool(false),
            Some(TypeRef::Prim(PrimKind::Char)) => Value::Char('\0'),
            _ => Value::Null,
        }
    }

    fn init_class(&mut self, class: DeclId) -> R<()> {
        let d = self.project.decl(class);
        if d.is_stub || !d.kind.is_type() || !self.initialized.insert(class) {
            return Ok(());
        }
        self.hit(class);
        if let Some(s) = self.table.superclass_decl(class) {
            self.init_class(s)?;
        }
        let children = d.children.clone();
        for &c in &children {
            let cd = self.project.decl(c);
            if cd.kind == DeclKind::Field && cd.is_static {
                self.statics.insert(c, Self::default_of(self.table.field_type(c)));
            }
        }
        if d.kind == DeclKind::Enum {
            let ctor = self
                .ctors_of(class)
                .into_iter()
                .find(|c| self.table.sig(*c).is_some_and(|s| s.params.is_empty()));
            let mut ordinal = 0;
            for &c in &children {
                let cd = self.project.decl(c);
                if cd.kind != DeclKind::EnumConstant {
                    continue;
                }
                let name: Rc<str> = Rc::from(cd.name.as_str());
                let obj = self.alloc_plain(class, Some((ordinal, name)));
                ordinal += 1;
                self.construct(class, ctor, &obj, Vec::new())?;
                self.statics.insert(c, obj);
            }
        }
        for &c in &children {
            let cd = self.project.decl(c);
            match cd.kind {
                DeclKind::Field if cd.is_static => {
                    if let Some(init) = self.project.field(c).and_then(|f| f.init.clone()) {
                        self.hit(c);
                        let mut fr = Frame::default();
                        let v = self.eval(&mut fr, &init)?;
                        self.observe(VarId::Field(c), &v);
                        self.statics.insert(c, v);
                    }
                }
                DeclKind::Initializer => {
                    self.hit(c);
                    let body = self.project.initializer(c).body.clone();
                    let mut fr = Frame::default();
                    self.exec_block(&mut fr, &body)?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn alloc_plain(&mut self, class: DeclId, constant: Option<(i32, Rc<str>)>) -> Value {
        let mut fields = HashMap::new();
        let mut cur = Some(class);
        while let Some(c) = cur {
            if self.project.decl(c).is_stub {
                break;
            }
            for &f in &self.project.decl(c).children {
                let fd = self.project.decl(f);
                if fd.kind == DeclKind::Field && !fd.is_static {
                    fields.insert(f, Self::default_of(self.table.field_type(f)));
                }
            }
            cur = self.table.superclass_decl(c);
        }
        self.alloc(
            class,
            Data::Plain {
                fields,
                constant,
                message: None,
            },
        )
    }

    fn instantiate(&mut self, class: DeclId, ctor: Option<DeclId>, args: Vec<Value>) -> R<Value> {
        if self.project.decl(class).is_stub {
            return self.new_builtin(class, args);
        }
        self.init_class(class)?;
        self.hit(class);
        let obj = self.alloc_plain(class, None);
        self.construct(class, ctor, &obj, args)?;
        Ok(obj)
    }

    /// Runs constructor `ctor` of `class` (or the implicit one) on `obj`.
    fn construct(&mut self, class: DeclId, ctor: Option<DeclId>, obj: &Value, args: Vec<Value>) -> R<()> {
        self.tick()?;
        if self.project.decl(class).is_stub {
            return self.construct_stub(class, obj, args);
        }
        let Some(c) = ctor else {
            // implicit constructor
            self.construct_super(class, class, obj, Vec::new())?;
            return self.field_inits(class, obj);
        };
        self.enter()?;
        self.hit(c);
        let body = self.project.ctor(c).body.clone();
        let Some(body) = body else {
            self.depth -= 1;
            return fault(format!("constructor {} has no body", self.project.decl(c).key));
        };
        let mut fr = Frame {
            this: Some(obj.clone()),
            ..Default::default()
        };
        for (i, v) in args.into_iter().enumerate() {
            self.observe(VarId::Param(c, i), &v);
            fr.locals.insert(VarId::Param(c, i), v);
        }
        let r = self.ctor_body(class, c, obj, &mut fr, &body);
        self.depth -= 1;
        match r {
            Err(Flow::Return(_)) => Ok(()),
            other => other,
        }
    }

    fn ctor_body(&mut self, class: DeclId, c: DeclId, obj: &Value, fr: &mut Frame, body: &Block) -> R<()> {
        let mut rest = &body.stmts[..];
        match body.stmts.first() {
            Some(Stmt::CtorCall { id, kind, args, .. }) => {
                rest = &body.stmts[1..];
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.eval(fr, a)?);
                }
                let target = match self.table.binding(*id) {
                    Some(Binding::Ctor(t)) => Some(*t),
                    _ => None,
                };
                match kind {
                    CtorCallKind::This => self.construct(class, target, obj, vals)?,
                    CtorCallKind::Super => {
                        let sup = self.table.superclass_decl(class).unwrap_or(self.known("java.lang.Object"));
                        self.construct(sup, target, obj, vals)?;
                        self.field_inits(class, obj)?;
                    }
                }
            }
            _ => {
                self.construct_super(class, c, obj, Vec::new())?;
                self.field_inits(class, obj)?;
            }
        }
        for s in rest {
            self.exec(fr, s)?;
        }
        Ok(())
    }

    /// Implicit `super()` from `from` (a constructor, or the class itself).
    fn construct_super(&mut self, class: DeclId, from: DeclId, obj: &Value, args: Vec<Value>) -> R<()> {
        let Some(sup) = self.table.superclass_decl(class) else {
            return Ok(());
        };
        let target = self
            .table
            .refs_of(from)
            .iter()
            .find(|r| r.kind == RefKind::Delegation)
            .map(|r| r.target);
        self.construct(sup, target, obj, args)
    }

    fn construct_stub(&mut self, class: DeclId, obj: &Value, args: Vec<Value>) -> R<()> {
        let throwable = self.known("java.lang.Throwable");
        if self.is_subclass(class, throwable) {
            if let Some(o) = obj.as_obj() {
                if let Data::Plain { message, .. } = &mut *o.data.borrow_mut() {
                    *message = args.into_iter().next();
                }
            }
            return Ok(());
        }
        if args.is_empty() {
            return Ok(());
        }
        Err(Flow::Fail(OracleError::UnsupportedStubCall(format!(
            "{}#<init>",
            self.project.decl(class).key
        ))))
    }

    fn field_inits(&mut self, class: DeclId, obj: &Value) -> R<()> {
        let children = self.project.decl(class).children.clone();
        for c in children {
            let cd = self.project.decl(c);
            if cd.kind != DeclKind::Field || cd.is_static {
                continue;
            }
            if let Some(init) = self.project.field(c).and_then(|f| f.init.clone()) {
                self.hit(c);
                let mut fr = Frame {
                    this: Some(obj.clone()),
                    ..Default::default()
                };
                let v = self.eval(&mut fr, &init)?;
                self.store(&Place::Field(obj.as_obj().expect("object").clone(), c), v)?;
            }
        }
        Ok(())
    }

    // ---- calls ------------------------------------------------------------

    fn enter(&mut self) -> R<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            self.depth -= 1;
            return self.throw_builtin("java.lang.Error", Some("StackOverflowError".into()));
        }
        Ok(())
    }

    fn invoke(&mut self, m: DeclId, this: Option<Value>, args: Vec<Value>) -> R<Value> {
        self.tick()?;
        let d = self.project.decl(m);
        if d.is_stub {
            return match this {
                Some(Value::Ref(o)) => self.builtin_call(&o, m, args),
                Some(_) => fault("NullPointerException"),
                None => self.builtin_static(m, args),
            };
        }
        if d.is_static {
            self.init_class(self.project.owner_type(m))?;
        }
        self.enter()?;
        self.hit(m);
        let body = self.project.method(m).body.clone();
        let Some(body) = body else {
            self.depth -= 1;
            return fault(format!("AbstractMethodError: {}", self.project.decl(m).key));
        };
        let mut fr = Frame {
            this,
            ..Default::default()
        };
        for (i, v) in args.into_iter().enumerate() {
            self.observe(VarId::Param(m, i), &v);
            fr.locals.insert(VarId::Param(m, i), v);
        }
        let r = self.exec_block(&mut fr, &body);
        self.depth -= 1;
        match r {
            Ok(()) => Ok(Value::Null),
            Err(Flow::Return(v)) => Ok(v),
            Err(e) => Err(e),
        }
    }

    fn call_virtual(&mut self, recv: &Value, m: DeclId, args: Vec<Value>) -> R<Value> {
        let Value::Ref(o) = recv else {
            return fault(format!("NullPointerException: calling {}", self.project.decl(m).name));
        };
        let is_plain = matches!(&*o.data.borrow(), Data::Plain { .. });
        if is_plain && !self.project.decl(o.class).is_stub {
            if let Some(imp) = self.table.dispatch(self.project, o.class, m) {
                if !self.project.decl(imp).is_stub {
                    return self.invoke(imp, Some(recv.clone()), args);
                }
            }
        }
        self.tick()?;
        self.builtin_call(o, m, args)
    }

    // ---- statements ---------------------------------------------------------

    fn exec_block(&mut self, fr: &mut Frame, b: &Block) -> R<()> {
        for s in &b.stmts {
            self.exec(fr, s)?;
        }
        Ok(())
    }

    fn cond(&mut self, fr: &mut Frame, e: &Expr) -> R<bool> {
        match self.eval(fr, e)? {
            Value::Bool(b) => Ok(b),
            _ => fault("condition is not a boolean"),
        }
    }

    fn exec(&mut self, fr: &mut Frame, s: &Stmt) -> R<()> {
        self.tick()?;
        match s {
            Stmt::Block(b) => self.exec_block(fr, b),
            Stmt::Local { id, ty, init, .. } => {
                let v = match init {
                    Some(e) => self.eval(fr, e)?,
                    None => match ty {
                        TypeExpr::Prim(p, _) => Self::default_of(Some(&TypeRef::Prim(*p))),
                        _ => Value::Null,
                    },
                };
                let v = self.coerce_prim(ty, v);
                self.observe(VarId::Local(*id), &v);
                fr.locals.insert(VarId::Local(*id), v);
                Ok(())
            }
            Stmt::Expr(e, _) => self.eval(fr, e).map(|_| ()),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                if self.cond(fr, cond)? {
                    self.exec(fr, then_branch)
                } else if let Some(e) = else_branch {
                    self.exec(fr, e)
                } else {
                    Ok(())
                }
            }
            Stmt::While { cond, body, .. } => {
                while self.cond(fr, cond)? {
                    match self.exec(fr, body) {
                        Err(Flow::Break) => break,
                        Err(Flow::Continue) | Ok(()) => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok(())
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
                ..
            } => {
                if let Some(i) = init {
                    self.exec(fr, i)?;
                }
                loop {
                    if let Some(c) = cond {
                        if !self.cond(fr, c)? {
                            break;
                        }
                    }
                    match self.exec(fr, body) {
                        Err(Flow::Break) => break,
                        Err(Flow::Continue) | Ok(()) => {}
                        Err(e) => return Err(e),
                    }
                    for u in update {
                        self.eval(fr, u)?;
                    }
                }
                Ok(())
            }
            Stmt::Return(v, _) => {
                let v = match v {
                    Some(e) => self.eval(fr, e)?,
                    None => Value::Null,
                };
                Err(Flow::Return(v))
            }
            Stmt::Throw(e, _) => {
                let v = self.eval(fr, e)?;
                if matches!(v, Value::Null) {
                    return fault("NullPointerException: throw null");
                }
                Err(Flow::Throw(v))
            }
            Stmt::CtorCall { .. } => fault("constructor invocation outside a constructor prologue"),
            Stmt::Break(_) => Err(Flow::Break),
            Stmt::Continue(_) => Err(Flow::Continue),
        }
    }

    /// Widens an int or char value stored into a variable of wider type.
    fn coerce_prim(&self, ty: &TypeExpr, v: Value) -> Value {
        match (ty, &v) {
            (TypeExpr::Prim(PrimKind::Double, _), Value::Int(_) | Value::Char(_)) => Value::Double(v.as_double().unwrap_or(0.0)),
            (TypeExpr::Prim(PrimKind::Int, _), Value::Char(c)) => Value::Int(*c as i32),
            _ => v,
        }
    }

    fn coerce_to(&self, t: Option<&TypeRef>, v: Value) -> Value {
        match (t, &v) {
            (Some(TypeRef::Prim(PrimKind::Double)), Value::Int(_) | Value::Char(_)) => Value::Double(v.as_double().unwrap_or(0.0)),
            (Some(TypeRef::Prim(PrimKind::Int)), Value::Char(c)) => Value::Int(*c as i32),
            _ => v,
        }
    }

    // ---- expressions --------------------------------------------------------

    fn field_binding(&self, e: &Expr) -> Option<DeclId> {
        match self.table.binding(e.id) {
            Some(Binding::Var(VarId::Field(fd))) => Some(*fd),
            _ => None,
        }
    }

    fn is_static_field(&self, fd: DeclId) -> bool {
        let d = self.project.decl(fd);
        d.is_static || d.kind == DeclKind::EnumConstant
    }

    fn place(&mut self, fr: &mut Frame, e: &Expr) -> R<Place> {
        match &e.kind {
            ExprKind::Paren(inner) => self.place(fr, inner),
            ExprKind::Name(_) => match self.table.binding(e.id) {
                Some(Binding::Var(VarId::Field(fd))) => {
                    let fd = *fd;
                    if self.is_static_field(fd) {
                        self.init_class(self.project.owner_type(fd))?;
                        Ok(Place::Static(fd))
                    } else {
                        match &fr.this {
                            Some(Value::Ref(o)) => Ok(Place::Field(o.clone(), fd)),
                            _ => fault("instance field used without an object"),
                        }
                    }
                }
                Some(Binding::Var(v)) => Ok(Place::Local(v.clone())),
                _ => fault("unresolved name"),
            },
            ExprKind::Field { target, .. } => {
                let Some(fd) = self.field_binding(e) else {
                    return fault("unresolved field");
                };
                if self.is_static_field(fd) {
                    if !matches!(self.table.binding(target.id), Some(Binding::Type(_))) {
                        self.eval(fr, target)?;
                    }
                    self.init_class(self.project.owner_type(fd))?;
                    return Ok(Place::Static(fd));
                }
                match self.eval(fr, target)? {
                    Value::Ref(o) => Ok(Place::Field(o, fd)),
                    _ => fault(format!("NullPointerException: reading {}", self.project.decl(fd).name)),
                }
            }
            ExprKind::Index { array, index } => {
                let a = self.eval(fr, array)?;
                let i = self.eval(fr, index)?.as_int().unwrap_or(0);
                let Value::Ref(o) = a else {
                    return fault("NullPointerException: indexing null");
                };
                let len = match &*o.data.borrow() {
                    Data::Array(v) => v.len(),
                    _ => return fault("indexing a non-array"),
                };
                if i < 0 || i as usize >= len {
                    return fault(format!("ArrayIndexOutOfBoundsException: {i}"));
                }
                Ok(Place::Elem(o, i as usize))
            }
            _ => fault("not assignable"),
        }
    }

    fn load(&mut self, fr: &Frame, p: &Place) -> R<Value> {
        match p {
            Place::Local(v) => Ok(fr.locals.get(v).cloned().unwrap_or(Value::Null)),
            Place::Static(fd) => {
                self.hit(*fd);
                if self.project.decl(*fd).is_stub {
                    return self.stub_static_field(*fd);
                }
                Ok(self.statics.get(fd).cloned().unwrap_or(Value::Null))
            }
            Place::Field(o, fd) => {
                self.hit(*fd);
                match &*o.data.borrow() {
                    Data::Plain { fields, .. } => match fields.get(fd) {
                        Some(v) => Ok(v.clone()),
                        None => fault(format!("object has no field {}", self.project.decl(*fd).name)),
                    },
                    _ => fault("field read on a library object"),
                }
            }
            Place::Elem(o, i) => match &*o.data.borrow() {
                Data::Array(v) => Ok(v[*i].clone()),
                _ => fault("indexing a non-array"),
            },
        }
    }

    fn store_local(&mut self, fr: &mut Frame, p: &Place, v: Value) -> R<()> {
        match p {
            Place::Local(var) => {
                self.observe(var.clone(), &v);
                fr.locals.insert(var.clone(), v);
                Ok(())
            }
            other => self.store(other, v),
        }
    }

    fn store(&mut self, p: &Place, v: Value) -> R<()> {
        match p {
            Place::Local(_) => unreachable!("locals are stored through the frame"),
            Place::Static(fd) => {
                let v = self.coerce_to(self.table.field_type(*fd), v);
                self.observe(VarId::Field(*fd), &v);
                self.statics.insert(*fd, v);
                Ok(())
            }
            Place::Field(o, fd) => {
                let v = self.coerce_to(self.table.field_type(*fd), v);
                self.observe(VarId::Field(*fd), &v);
                match &mut *o.data.borrow_mut() {
                    Data::Plain { fields, .. } => {
                        fields.insert(*fd, v);
                        Ok(())
                    }
                    _ => fault("field write on a library object"),
                }
            }
            Place::Elem(o, i) => match &mut *o.data.borrow_mut() {
                Data::Array(a) => {
                    a[*i] = v;
                    Ok(())
                }
                _ => fault("indexing a non-array"),
            },
        }
    }

    fn expr_type(&self, e: &Expr) -> Option<&TypeRef> {
        self.table.expr_type(e.id)
    }

    fn eval(&mut self, fr: &mut Frame, e: &Expr) -> R<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Lit(l) => Ok(match l {
                Literal::Int(v) => Value::Int(*v),
                Literal::Double(v) => Value::Double(*v),
                Literal::Char(c) => Value::Char(*c),
                Literal::Bool(b) => Value::Bool(*b),
                Literal::Null => Value::Null,
                Literal::Str(s) => {
                    if let Some(v) = self.literals.get(&e.id) {
                        return Ok(v.clone());
                    }
                    let v = self.new_str(s);
                    self.literals.insert(e.id, v.clone());
                    v
                }
            }),
            ExprKind::Name(_) | ExprKind::Index { .. } => {
                let p = self.place(fr, e)?;
                self.load(fr, &p)
            }
            ExprKind::Field { target, name } => {
                if self.field_binding(e).is_none() && name == "length" {
                    return match self.eval(fr, target)? {
                        Value::Ref(o) => match &*o.data.borrow() {
                            Data::Array(v) => Ok(Value::Int(v.len() as i32)),
                            _ => fault("length of a non-array"),
                        },
                        _ => fault("NullPointerException: length of null"),
                    };
                }
                let p = self.place(fr, e)?;
                self.load(fr, &p)
            }
            ExprKind::This => fr.this.clone().map(Ok).unwrap_or_else(|| fault("`this` in a static context")),
            ExprKind::Super => fr.this.clone().map(Ok).unwrap_or_else(|| fault("`super` in a static context")),
            ExprKind::Call { target, args, .. } => self.eval_call(fr, e, target.as_deref(), args),
            ExprKind::New { args, .. } => {
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.eval(fr, a)?);
                }
                let Some(class) = self.expr_type(e).and_then(TypeRef::class_decl) else {
                    return fault("unresolved class in object creation");
                };
                let ctor = match self.table.binding(e.id) {
                    Some(Binding::Ctor(c)) => Some(*c),
                    _ => None,
                };
                self.instantiate(class, ctor, vals)
            }
            ExprKind::NewArray { len, .. } => {
                let n = self.eval(fr, len)?.as_int().unwrap_or(0);
                if n < 0 {
                    return fault(format!("NegativeArraySizeException: {n}"));
                }
                let elem = match self.expr_type(e) {
                    Some(TypeRef::Array(el)) => Self::default_of(Some(el)),
                    _ => Value::Null,
                };
                let object = self.known("java.lang.Object");
                Ok(self.alloc(object, Data::Array(vec![elem; n as usize])))
            }
            ExprKind::Cast { expr, .. } => {
                let v = self.eval(fr, expr)?;
                self.cast(e, v)
            }
            ExprKind::Unary { op, expr } => self.eval_unary(fr, e, *op, expr),
            ExprKind::Binary { op, lhs, rhs } => self.eval_binary(fr, e, *op, lhs, rhs),
            ExprKind::Assign { op, target, value } => {
                let p = self.place(fr, target)?;
                let v = match op.binary() {
                    None => self.eval(fr, value)?,
                    Some(b) => {
                        let cur = self.load(fr, &p)?;
                        let rhs = self.eval(fr, value)?;
                        let t = self.expr_type(target).cloned();
                        let r = self.arith(b, cur, rhs, t.as_ref())?;
                        match t {
                            Some(TypeRef::Prim(PrimKind::Char)) => Value::Char(char::from_u32(r.as_int().unwrap_or(0) as u32).unwrap_or('\0')),
                            _ => r,
                        }
                    }
                };
                let v = self.coerce_to(self.expr_type(target), v);
                self.store_local(fr, &p, v.clone())?;
                Ok(v)
            }
            ExprKind::Paren(inner) => self.eval(fr, inner),
            ExprKind::ClassLit(_) => {
                let d = match self.expr_type(e) {
                    Some(TypeRef::Class { args, .. }) => args.first().and_then(TypeRef::class_decl),
                    _ => None,
                }
                .unwrap_or(DeclId::UNSET);
                let class = self.known("java.lang.Class");
                Ok(self.alloc(class, Data::Class(d)))
            }
        }
    }

    fn cast(&mut self, e: &Expr, v: Value) -> R<Value> {
        match self.expr_type(e) {
            Some(TypeRef::Prim(p)) => Ok(match (p, &v) {
                (PrimKind::Int, Value::Double(d)) => Value::Int(if d.is_nan() { 0 } else { *d as i32 }),
                (PrimKind::Int, _) => Value::Int(v.as_int().unwrap_or(0)),
                (PrimKind::Double, _) => Value::Double(v.as_double().unwrap_or(0.0)),
                (PrimKind::Char, _) => Value::Char(char::from_u32(v.as_int().unwrap_or(0) as u16 as u32).unwrap_or('\0')),
                _ => v,
            }),
            Some(TypeRef::Class { decl, .. }) => {
                if let Value::Ref(o) = &v {
                    let is_array = matches!(&*o.data.borrow(), Data::Array(_));
                    if !is_array && !self.is_subclass(o.class, *decl) {
                        return fault(format!(
                            "ClassCastException: {} cannot be cast to {}",
                            self.project.decl(o.class).key,
                            self.project.decl(*decl).key
                        ));
                    }
                }
                Ok(v)
            }
            _ => Ok(v),
        }
    }

    fn eval_unary(&mut self, fr: &mut Frame, e: &Expr, op: UnaryOp, inner: &Expr) -> R<Value> {
        match op {
            UnaryOp::Neg => match self.eval(fr, inner)? {
                Value::Double(d) => Ok(Value::Double(-d)),
                v => Ok(Value::Int(v.as_int().unwrap_or(0).wrapping_neg())),
            },
            UnaryOp::Not => match self.eval(fr, inner)? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                _ => fault("`!` on a non-boolean"),
            },
            UnaryOp::PreInc | UnaryOp::PreDec | UnaryOp::PostInc | UnaryOp::PostDec => {
                let p = self.place(fr, inner)?;
                let cur = self.load(fr, &p)?;
                let delta = if matches!(op, UnaryOp::PreInc | UnaryOp::PostInc) { 1 } else { -1 };
                let next = match &cur {
                    Value::Double(d) => Value::Double(d + delta as f64),
                    Value::Char(c) => Value::Char(char::from_u32((*c as i32 + delta) as u32).unwrap_or('\0')),
                    v => Value::Int(v.as_int().unwrap_or(0).wrapping_add(delta)),
                };
                self.store_local(fr, &p, next.clone())?;
                let _ = e;
                Ok(if matches!(op, UnaryOp::PreInc | UnaryOp::PreDec) { next } else { cur })
            }
        }
    }

    fn eval_binary(&mut self, fr: &mut Frame, e: &Expr, op: BinaryOp, lhs: &Expr, rhs: &Expr) -> R<Value> {
        match op {
            BinaryOp::And => {
                if !self.cond(fr, lhs)? {
                    return Ok(Value::Bool(false));
                }
                return Ok(Value::Bool(self.cond(fr, rhs)?));
            }
            BinaryOp::Or => {
                if self.cond(fr, lhs)? {
                    return Ok(Value::Bool(true));
                }
                return Ok(Value::Bool(self.cond(fr, rhs)?));
            }
            _ => {}
        }
        let a = self.eval(fr, lhs)?;
        let b = self.eval(fr, rhs)?;
        let t = self.expr_type(e).cloned();
        self.arith(op, a, b, t.as_ref())
    }

    fn is_string_type(&self, t: Option<&TypeRef>) -> bool {
        t.and_then(TypeRef::class_decl) == Some(self.known("java.lang.String"))
    }

    fn arith(&mut self, op: BinaryOp, a: Value, b: Value, result: Option<&TypeRef>) -> R<Value> {
        use BinaryOp::*;
        if op == Add && (self.is_string_type(result) || a.str().is_some() || b.str().is_some()) {
            let s = format!("{}{}", self.display(&a)?, self.display(&b)?);
            return Ok(self.new_str(&s));
        }
        match op {
            Eq => return Ok(Value::Bool(a.same(&b))),
            Ne => return Ok(Value::Bool(!a.same(&b))),
            _ => {}
        }
        let double = matches!(a, Value::Double(_)) || matches!(b, Value::Double(_));
        if double {
            let (x, y) = (a.as_double().unwrap_or(0.0), b.as_double().unwrap_or(0.0));
            return Ok(match op {
                Add => Value::Double(x + y),
                Sub => Value::Double(x - y),
                Mul => Value::Double(x * y),
                Div => Value::Double(x / y),
                Rem => Value::Double(x % y),
                Lt => Value::Bool(x < y),
                Le => Value::Bool(x <= y),
                Gt => Value::Bool(x > y),
                Ge => Value::Bool(x >= y),
                _ => unreachable!(),
            });
        }
        let (Some(x), Some(y)) = (a.as_int(), b.as_int()) else {
            return fault(format!("operator {} on non-numeric operands", op.symbol()));
        };
        Ok(match op {
            Add => Value::Int(x.wrapping_add(y)),
            Sub => Value::Int(x.wrapping_sub(y)),
            Mul => Value::Int(x.wrapping_mul(y)),
            Div | Rem if y == 0 => return fault("ArithmeticException: / by zero"),
            Div => Value::Int(x.wrapping_div(y)),
            Rem => Value::Int(x.wrapping_rem(y)),
            Lt => Value::Bool(x < y),
            Le => Value::Bool(x <= y),
            Gt => Value::Bool(x > y),
            Ge => Value::Bool(x >= y),
            _ => unreachable!(),
        })
    }

    fn eval_call(&mut self, fr: &mut Frame, e: &Expr, target: Option<&Expr>, args: &[Expr]) -> R<Value> {
        let Some(Binding::Method(m, kind)) = self.table.binding(e.id).cloned() else {
            return fault("unresolved call");
        };
        let recv = match (kind, target) {
            (CallKind::Static, Some(t)) => {
                if !matches!(self.table.binding(t.id), Some(Binding::Type(_))) && !self.is_type_path(t) {
                    self.eval(fr, t)?;
                }
                None
            }
            (CallKind::Static, None) => None,
            (_, None) => fr.this.clone(),
            (_, Some(t)) => Some(self.eval(fr, t)?),
        };
        let mut vals = Vec::new();
        let params = self.table.sig(m).map(|s| s.params.clone()).unwrap_or_default();
        for (i, a) in args.iter().enumerate() {
            let v = self.eval(fr, a)?;
            vals.push(self.coerce_to(params.get(i), v));
        }
        match kind {
            CallKind::Static => self.invoke(m, None, vals),
            CallKind::Super => match recv {
                Some(r @ Value::Ref(_)) => {
                    if self.project.decl(m).is_stub {
                        let o = r.as_obj().expect("object").clone();
                        self.tick()?;
                        self.builtin_call(&o, m, vals)
                    } else {
                        self.invoke(m, Some(r), vals)
                    }
                }
                _ => fault("`super` call without an object"),
            },
            CallKind::Virtual => match recv {
                Some(r) => self.call_virtual(&r, m, vals),
                None => fault("instance method called without an object"),
            },
        }
    }

    fn is_type_path(&self, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Name(_) => !matches!(self.table.binding(e.id), Some(Binding::Var(_))),
            ExprKind::Field { target, .. } => self.field_binding(e).is_none() && self.is_type_path(target),
            _ => false,
        }
    }

    // ---- library behaviour ----------------------------------------------

    fn unsupported<T>(&self, m: DeclId) -> R<T> {
        let d = self.project.decl(m);
        Err(Flow::Fail(OracleError::UnsupportedStubCall(d.key.clone())))
    }

    fn throwable_message(&mut self, v: &Value) -> R<Option<String>> {
        let Some(o) = v.as_obj() else { return Ok(None) };
        let m = match &*o.data.borrow() {
            Data::Throwable(m) => m.clone(),
            Data::Plain { message, .. } => message.clone(),
            _ => None,
        };
        match m {
            Some(m) => Ok(Some(self.display(&m)?)),
            None => Ok(None),
        }
    }

    fn stub_static_field(&mut self, fd: DeclId) -> R<Value> {
        let key = self.project.decl(fd).key.clone();
        match key.as_str() {
            "java.lang.System#out" => {
                if self.print_stream.is_none() {
                    let c = self.known("java.lang.PrintStream");
                    self.print_stream = Some(self.alloc(c, Data::PrintStream));
                }
                Ok(self.print_stream.clone().expect("set"))
            }
            "java.lang.Integer#MAX_VALUE" => Ok(Value::Int(i32::MAX)),
            "java.lang.Integer#MIN_VALUE" => Ok(Value::Int(i32::MIN)),
            _ => Err(Flow::Fail(OracleError::UnsupportedStubCall(key))),
        }
    }

    fn new_builtin(&mut self, class: DeclId, args: Vec<Value>) -> R<Value> {
        let key = self.project.decl(class).key.clone();
        let data = match key.as_str() {
            "java.util.ArrayList" => Data::List(Vec::new()),
            "java.util.HashSet" => Data::Set(Vec::new()),
            "java.util.HashMap" => Data::Map {
                entries: Vec::new(),
                by_ordinal: false,
            },
            "java.util.EnumMap" => Data::Map {
                entries: Vec::new(),
                by_ordinal: true,
            },
            "java.lang.StringBuilder" => match args.first() {
                Some(v) => Data::Builder(self.display(v)?),
                None => Data::Builder(String::new()),
            },
            "java.lang.String" => Data::Str(Rc::from("")),
            "java.lang.Object" => Data::Plain {
                fields: HashMap::new(),
                constant: None,
                message: None,
            },
            _ if self.is_subclass(class, self.known("java.lang.Throwable")) => Data::Throwable(args.into_iter().next()),
            _ => return Err(Flow::Fail(OracleError::UnsupportedStubCall(format!("{key}#<init>")))),
        };
        Ok(self.alloc(class, data))
    }

    /// Java's `toString` of a value.
    pub(crate) fn display(&mut self, v: &Value) -> R<String> {
        Ok(match v {
            Value::Null => "null".into(),
            Value::Int(i) => i.to_string(),
            Value::Double(d) => java_double(*d),
            Value::Bool(b) => b.to_string(),
            Value::Char(c) => c.to_string(),
            Value::Ref(o) => {
                let o = o.clone();
                self.display_obj(&o)?
            }
        })
    }

    fn display_obj(&mut self, o: &Rc<Obj>) -> R<String> {
        enum Shape {
            Done(String),
            Seq(Vec<Value>),
            Map(Vec<(Value, Value)>),
            Plain,
            Throwable(Option<Value>),
        }
        let shape = match &*o.data.borrow() {
            Data::Str(s) => Shape::Done(s.to_string()),
            Data::Builder(s) => Shape::Done(s.clone()),
            Data::List(v) | Data::Set(v) => Shape::Seq(v.clone()),
            Data::Map { entries, .. } => Shape::Map(entries.clone()),
            Data::Iter(..) | Data::PrintStream | Data::Array(_) => {
                Shape::Done(format!("{}@{:x}", self.project.decl(o.class).name, o.id))
            }
            Data::Class(d) => Shape::Done(match self.project.decls().get(d.index()) {
                Some(e) => format!("class {}", e.key),
                None => "class ?".into(),
            }),
            Data::Throwable(m) => Shape::Throwable(m.clone()),
            Data::Plain { .. } => Shape::Plain,
        };
        match shape {
            Shape::Done(s) => Ok(s),
            Shape::Seq(items) => {
                let mut parts = Vec::new();
                for i in &items {
                    parts.push(self.display(i)?);
                }
                Ok(format!("[{}]", parts.join(", ")))
            }
            Shape::Map(entries) => {
                let mut parts = Vec::new();
                for (k, v) in &entries {
                    parts.push(format!("{}={}", self.display(k)?, self.display(v)?));
                }
                Ok(format!("{{{}}}", parts.join(", ")))
            }
            Shape::Throwable(m) => {
                let key = self.project.decl(o.class).key.clone();
                Ok(match m {
                    Some(m) => format!("{key}: {}", self.display(&m)?),
                    None => key,
                })
            }
            Shape::Plain => {
                if let Some(to_string) = self.project.lookup("java.lang.Object#toString()") {
                    if let Some(imp) = self.table.dispatch(self.project, o.class, to_string) {
                        if !self.project.decl(imp).is_stub {
                            let r = self.invoke(imp, Some(Value::Ref(o.clone())), Vec::new())?;
                            return self.display(&r);
                        }
                    }
                }
                let (constant, message) = match &*o.data.borrow() {
                    Data::Plain { constant, message, .. } => (constant.clone(), message.clone()),
                    _ => (None, None),
                };
                if let Some((_, name)) = constant {
                    return Ok(name.to_string());
                }
                let throwable = self.known("java.lang.Throwable");
                if self.is_subclass(o.class, throwable) {
                    let key = self.project.decl(o.class).key.clone();
                    return Ok(match message {
                        Some(m) => format!("{key}: {}", self.display(&m)?),
                        None => key,
                    });
                }
                Ok(format!("{}@{:x}", self.project.decl(o.class).name, o.id))
            }
        }
    }

    /// `a.equals(b)`.
    pub(crate) fn equals(&mut self, a: &Value, b: &Value) -> R<bool> {
        let Value::Ref(o) = a else {
            return Ok(a.same(b));
        };
        if let (Some(x), Some(y)) = (a.str(), b.str()) {
            return Ok(x == y);
        }
        let plain = matches!(&*o.data.borrow(), Data::Plain { .. });
        if plain {
            if let Some(eq) = self.project.lookup("java.lang.Object#equals(Object)") {
                if let Some(imp) = self.table.dispatch(self.project, o.class, eq) {
                    if !self.project.decl(imp).is_stub {
                        let r = self.invoke(imp, Some(a.clone()), vec![b.clone()])?;
                        return Ok(matches!(r, Value::Bool(true)));
                    }
                }
            }
        }
        Ok(a.same(b))
    }

    fn index_of(&mut self, items: &[Value], x: &Value) -> R<Option<usize>> {
        for (i, v) in items.iter().enumerate() {
            if self.equals(x, v)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn hash_code(&mut self, o: &Rc<Obj>) -> i32 {
        match &*o.data.borrow() {
            Data::Str(s) => s.encode_utf16().fold(0i32, |h, c| h.wrapping_mul(31).wrapping_add(c as i32)),
            _ => o.id as i32,
        }
    }

    fn builtin_call(&mut self, recv: &Rc<Obj>, m: DeclId, args: Vec<Value>) -> R<Value> {
        let name = self.project.decl(m).name.clone();
        let arg = |i: usize| args.get(i).cloned().unwrap_or(Value::Null);
        let int_arg = |i: usize| args.get(i).and_then(Value::as_int).unwrap_or(0);
        let this = Value::Ref(recv.clone());
        match (name.as_str(), args.len()) {
            ("equals", 1) => return Ok(Value::Bool(self.equals(&this, &arg(0))?)),
            ("hashCode", 0) => return Ok(Value::Int(self.hash_code(recv))),
            ("toString", 0) if !matches!(&*recv.data.borrow(), Data::Builder(_)) => {
                let s = self.display(&this)?;
                return Ok(self.new_str(&s));
            }
            _ => {}
        }
        enum Kind {
            Str(Rc<str>),
            Builder,
            Seq(bool),
            Map,
            Iter,
            Class(DeclId),
            Print,
            Throwable,
            Plain,
            Other,
        }
        let kind = match &*recv.data.borrow() {
            Data::Str(s) => Kind::Str(s.clone()),
            Data::Builder(_) => Kind::Builder,
            Data::List(_) => Kind::Seq(true),
            Data::Set(_) => Kind::Seq(false),
            Data::Map { .. } => Kind::Map,
            Data::Iter(..) => Kind::Iter,
            Data::Class(d) => Kind::Class(*d),
            Data::PrintStream => Kind::Print,
            Data::Throwable(_) => Kind::Throwable,
            Data::Plain { .. } => Kind::Plain,
            Data::Array(_) => Kind::Other,
        };
        match kind {
            Kind::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                match name.as_str() {
                    "length" => Ok(Value::Int(chars.len() as i32)),
                    "isEmpty" => Ok(Value::Bool(chars.is_empty())),
                    "charAt" => {
                        let i = int_arg(0);
                        match chars.get(i as usize).filter(|_| i >= 0) {
                            Some(c) => Ok(Value::Char(*c)),
                            None => fault(format!("StringIndexOutOfBoundsException: {i}")),
                        }
                    }
                    "substring" => {
                        let (b, e) = (int_arg(0), int_arg(1));
                        if b < 0 || e < b || e as usize > chars.len() {
                            return fault(format!("StringIndexOutOfBoundsException: {b}, {e}"));
                        }
                        let out: String = chars[b as usize..e as usize].iter().collect();
                        Ok(self.new_str(&out))
                    }
                    "concat" => {
                        let o = self.display(&arg(0))?;
                        Ok(self.new_str(&format!("{s}{o}")))
                    }
                    "startsWith" | "contains" | "indexOf" => {
                        let Some(p) = arg(0).str() else {
                            return fault("NullPointerException");
                        };
                        Ok(match name.as_str() {
                            "startsWith" => Value::Bool(s.starts_with(&*p)),
                            "contains" => Value::Bool(s.contains(&*p)),
                            _ => Value::Int(s.find(&*p).map(|b| s[..b].chars().count() as i32).unwrap_or(-1)),
                        })
                    }
                    "toUpperCase" => Ok(self.new_str(&s.to_uppercase())),
                    "trim" => Ok(self.new_str(s.trim())),
                    "compareTo" => {
                        let Some(o) = arg(0).str() else {
                            return fault("NullPointerException");
                        };
                        let (a, b): (Vec<u16>, Vec<u16>) = (s.encode_utf16().collect(), o.encode_utf16().collect());
                        let d = a
                            .iter()
                            .zip(&b)
                            .find(|(x, y)| x != y)
                            .map(|(x, y)| *x as i32 - *y as i32)
                            .unwrap_or(a.len() as i32 - b.len() as i32);
                        Ok(Value::Int(d))
                    }
                    _ => self.unsupported(m),
                }
            }
            Kind::Builder => match name.as_str() {
                "append" => {
                    let s = self.display(&arg(0))?;
                    if let Data::Builder(b) = &mut *recv.data.borrow_mut() {
                        b.push_str(&s);
                    }
                    Ok(this)
                }
                "length" => match &*recv.data.borrow() {
                    Data::Builder(b) => Ok(Value::Int(b.chars().count() as i32)),
                    _ => unreachable!(),
                },
                "toString" => {
                    let s = match &*recv.data.borrow() {
                        Data::Builder(b) => b.clone(),
                        _ => unreachable!(),
                    };
                    Ok(self.new_str(&s))
                }
                _ => self.unsupported(m),
            },
            Kind::Seq(is_list) => self.collection_call(recv, m, &name, is_list, args),
            Kind::Map => self.map_call(recv, m, &name, args),
            Kind::Iter => {
                let mut data = recv.data.borrow_mut();
                let Data::Iter(items, pos) = &mut *data else { unreachable!() };
                match name.as_str() {
                    "hasNext" => Ok(Value::Bool(*pos < items.len())),
                    "next" => {
                        if *pos >= items.len() {
                            drop(data);
                            return fault("NoSuchElementException");
                        }
                        *pos += 1;
                        Ok(items[*pos - 1].clone())
                    }
                    _ => {
                        drop(data);
                        self.unsupported(m)
                    }
                }
            }
            Kind::Class(d) => {
                let e = self.project.decls().get(d.index()).cloned();
                match (name.as_str(), e) {
                    ("getSimpleName", Some(e)) => Ok(self.new_str(&e.name)),
                    ("getName", Some(e)) => Ok(self.new_str(&e.key)),
                    _ => self.unsupported(m),
                }
            }
            Kind::Print => {
                let text = match args.first() {
                    Some(v) => self.display(v)?,
                    None => String::new(),
                };
                match name.as_str() {
                    "println" => {
                        self.output.push_str(&text);
                        self.output.push('\n');
                    }
                    "print" => self.output.push_str(&text),
                    _ => return self.unsupported(m),
                }
                Ok(Value::Null)
            }
            Kind::Throwable | Kind::Plain => {
                let constant = match &*recv.data.borrow() {
                    Data::Plain { constant, .. } => constant.clone(),
                    _ => None,
                };
                match (name.as_str(), constant) {
                    ("getMessage", _) => {
                        let msg = match &*recv.data.borrow() {
                            Data::Throwable(m) => m.clone(),
                            Data::Plain { message, .. } => message.clone(),
                            _ => None,
                        };
                        Ok(msg.unwrap_or(Value::Null))
                    }
                    ("ordinal", Some((o, _))) => Ok(Value::Int(o)),
                    ("name", Some((_, n))) => Ok(self.new_str(&n)),
                    ("compareTo", Some((o, _))) => match arg(0).ordinal() {
                        Some(p) => Ok(Value::Int(o - p)),
                        None => fault("NullPointerException"),
                    },
                    ("getDeclaringClass", Some(_)) => {
                        let c = self.known("java.lang.Class");
                        Ok(self.alloc(c, Data::Class(recv.class)))
                    }
                    _ => self.unsupported(m),
                }
            }
            Kind::Other => self.unsupported(m),
        }
    }

    fn items(recv: &Rc<Obj>) -> Vec<Value> {
        match &*recv.data.borrow() {
            Data::List(v) | Data::Set(v) => v.clone(),
            _ => Vec::new(),
        }
    }

    fn with_items<T>(recv: &Rc<Obj>, f: impl FnOnce(&mut Vec<Value>) -> T) -> T {
        match &mut *recv.data.borrow_mut() {
            Data::List(v) | Data::Set(v) => f(v),
            _ => unreachable!("not a collection"),
        }
    }

    fn collection_call(&mut self, recv: &Rc<Obj>, m: DeclId, name: &str, is_list: bool, args: Vec<Value>) -> R<Value> {
        let arg = |i: usize| args.get(i).cloned().unwrap_or(Value::Null);
        let items = Self::items(recv);
        match name {
            "size" => Ok(Value::Int(items.len() as i32)),
            "isEmpty" => Ok(Value::Bool(items.is_empty())),
            "add" => {
                if !is_list && self.index_of(&items, &arg(0))?.is_some() {
                    return Ok(Value::Bool(false));
                }
                Self::with_items(recv, |v| v.push(arg(0)));
                Ok(Value::Bool(true))
            }
            "contains" => Ok(Value::Bool(self.index_of(&items, &arg(0))?.is_some())),
            "indexOf" if is_list => Ok(Value::Int(self.index_of(&items, &arg(0))?.map(|i| i as i32).unwrap_or(-1))),
            "remove" => match self.index_of(&items, &arg(0))? {
                Some(i) => {
                    Self::with_items(recv, |v| v.remove(i));
                    Ok(Value::Bool(true))
                }
                None => Ok(Value::Bool(false)),
            },
            "clear" => {
                Self::with_items(recv, Vec::clear);
                Ok(Value::Null)
            }
            "iterator" => {
                let c = self.known("java.util.Iterator");
                Ok(self.alloc(c, Data::Iter(items, 0)))
            }
            "get" | "set" if is_list => {
                let i = args.first().and_then(Value::as_int).unwrap_or(0);
                if i < 0 || i as usize >= items.len() {
                    return fault(format!("IndexOutOfBoundsException: Index {i} out of bounds for length {}", items.len()));
                }
                if name == "get" {
                    return Ok(items[i as usize].clone());
                }
                let new = arg(1);
                Ok(Self::with_items(recv, |v| std::mem::replace(&mut v[i as usize], new)))
            }
            _ => self.unsupported(m),
        }
    }

    fn ordinal(v: &Value) -> i32 {
        v.ordinal().unwrap_or(i32::MAX)
    }

    fn map_call(&mut self, recv: &Rc<Obj>, m: DeclId, name: &str, args: Vec<Value>) -> R<Value> {
        let arg = |i: usize| args.get(i).cloned().unwrap_or(Value::Null);
        let (entries, by_ordinal) = match &*recv.data.borrow() {
            Data::Map { entries, by_ordinal } => (entries.clone(), *by_ordinal),
            _ => unreachable!("not a map"),
        };
        let keys: Vec<Value> = entries.iter().map(|(k, _)| k.clone()).collect();
        let found = self.index_of(&keys, &arg(0))?;
        let with = |f: &mut dyn FnMut(&mut Vec<(Value, Value)>)| {
            if let Data::Map { entries, .. } = &mut *recv.data.borrow_mut() {
                f(entries)
            }
        };
        match name {
            "get" => Ok(found.map(|i| entries[i].1.clone()).unwrap_or(Value::Null)),
            "containsKey" => Ok(Value::Bool(found.is_some())),
            "size" => Ok(Value::Int(entries.len() as i32)),
            "isEmpty" => Ok(Value::Bool(entries.is_empty())),
            "put" => match found {
                Some(i) => {
                    let mut old = Value::Null;
                    with(&mut |e| old = std::mem::replace(&mut e[i].1, arg(1)));
                    Ok(old)
                }
                None => {
                    let (k, v) = (arg(0), arg(1));
                    if by_ordinal && matches!(k, Value::Null) {
                        return fault("NullPointerException: null key");
                    }
                    let at = if by_ordinal {
                        let o = Self::ordinal(&k);
                        entries.iter().position(|(x, _)| Self::ordinal(x) > o).unwrap_or(entries.len())
                    } else {
                        entries.len()
                    };
                    with(&mut |e| e.insert(at, (k.clone(), v.clone())));
                    Ok(Value::Null)
                }
            },
            "remove" => match found {
                Some(i) => {
                    let mut old = Value::Null;
                    with(&mut |e| old = e.remove(i).1);
                    Ok(old)
                }
                None => Ok(Value::Null),
            },
            "keySet" => {
                let c = self.known("java.util.HashSet");
                Ok(self.alloc(c, Data::Set(keys)))
            }
            "values" => {
                let c = self.known("java.util.ArrayList");
                Ok(self.alloc(c, Data::List(entries.into_iter().map(|(_, v)| v).collect())))
            }
            _ => self.unsupported(m),
        }
    }

    fn fail_assert<T>(&mut self, msg: String) -> R<T> {
        self.throw_builtin("java.lang.AssertionError", Some(msg))
    }

    fn builtin_static(&mut self, m: DeclId, args: Vec<Value>) -> R<Value> {
        let d = self.project.decl(m);
        let owner = self.project.decl(self.project.owner_type(m)).key.clone();
        let name = d.name.clone();
        let arg = |i: usize| args.get(i).cloned().unwrap_or(Value::Null);
        let int_arg = |i: usize| args.get(i).and_then(Value::as_int).unwrap_or(0);
        match (owner.as_str(), name.as_str()) {
            ("java.lang.String", "valueOf") | ("java.lang.Integer", "toString") => {
                let s = self.display(&arg(0))?;
                Ok(self.new_str(&s))
            }
            ("java.lang.Integer", "parseInt") => {
                let s = arg(0).str().map(|s| s.to_string()).unwrap_or_default();
                match s.parse::<i32>() {
                    Ok(v) => Ok(Value::Int(v)),
                    Err(_) => fault(format!("NumberFormatException: For input string: \"{s}\"")),
                }
            }
            ("java.lang.Integer", "compare") => Ok(Value::Int((int_arg(0).cmp(&int_arg(1))) as i32)),
            ("java.lang.Math", "abs") => Ok(Value::Int(int_arg(0).wrapping_abs())),
            ("java.lang.Math", "max") => Ok(Value::Int(int_arg(0).max(int_arg(1)))),
            ("java.lang.Math", "min") => Ok(Value::Int(int_arg(0).min(int_arg(1)))),
            ("java.lang.Math", "sqrt") => Ok(Value::Double(arg(0).as_double().unwrap_or(0.0).sqrt())),
            ("java.util.EnumSet", "noneOf" | "allOf") => {
                let Some(class) = arg(0).class_target() else {
                    return fault("NullPointerException");
                };
                let mut items = Vec::new();
                if name == "allOf" {
                    self.init_class(class)?;
                    for &c in &self.project.decl(class).children.clone() {
                        if self.project.decl(c).kind == DeclKind::EnumConstant {
                            items.push(self.statics.get(&c).cloned().unwrap_or(Value::Null));
                        }
                    }
                }
                let c = self.known("java.util.EnumSet");
                Ok(self.alloc(c, Data::Set(items)))
            }
            ("org.junit.Assert", _) => {
                let ok = match name.as_str() {
                    "assertEquals" => {
                        let (a, b) = (arg(0), arg(1));
                        let eq = match (&a, &b) {
                            (Value::Ref(_), _) => self.equals(&a, &b)?,
                            _ => a.same(&b),
                        };
                        if !eq {
                            let msg = format!("expected:<{}> but was:<{}>", self.display(&a)?, self.display(&b)?);
                            return self.fail_assert(msg);
                        }
                        true
                    }
                    "assertTrue" => matches!(arg(0), Value::Bool(true)),
                    "assertFalse" => matches!(arg(0), Value::Bool(false)),
                    "assertNotNull" => !matches!(arg(0), Value::Null),
                    "assertNull" => matches!(arg(0), Value::Null),
                    "fail" => {
                        let msg = self.display(&arg(0))?;
                        return self.fail_assert(msg);
                    }
                    _ => return self.unsupported(m),
                };
                if ok {
                    Ok(Value::Null)
                } else {
                    self.fail_assert(format!("{name} failed"))
                }
            }
            _ => self.unsupported(m),
        }
    }
}

/// Java's `Double.toString` for the common ranges.
pub(crate) fn java_double(d: f64) -> String {
    if d.is_nan() {
        return "NaN".into();
    }
    if d.is_infinite() {
        return if d > 0.0 { "Infinity".into() } else { "-Infinity".into() };
    }
    let a = d.abs();
    if a == 0.0 || (1e-3..1e7).contains(&a) {
        let s = format!("{d}");
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        let s = format!("{d:e}");
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') { mant.to_string() } else { format!("{mant}.0") };
        format!("{mant}E{exp}")
    }
}

pub(crate) fn finish(interp: Interp<'_>, status: Status, message: Option<String>) -> ExecutionResult {
    let project = interp.project;
    let mut hits = interp.hits;
    // a used member implies its enclosing types were used
    let used: Vec<DeclId> = hits.keys().copied().collect();
    for d in used {
        let mut c = project.decl(d).container;
        while let Some(x) = c {
            hits.entry(x).or_insert(1);
            c = project.decl(x).container;
        }
    }
    hits.retain(|d, _| !project.decl(*d).is_stub);
    ExecutionResult {
        status,
        message,
        steps: interp.steps,
        hits,
        output: interp.output,
        observed: interp.observed,
    }
}
