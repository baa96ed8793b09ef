use std::fmt::Write as _;

use crate::syntax::{check_formula, eigen_base, unique_name, Annotation, Formula, Name, Printer, Signature, Term, TermSubst, Ty};

#[derive(Clone, Debug, PartialEq)]
pub struct Hyp {
    pub label: Name,
    pub formula: Formula,
}

impl Hyp {
    pub fn annotation(&self) -> Annotation {
        self.formula.annotation()
    }
}

/// `psi; sigma; hyps |- goal`. The type variables in `psi` stay fixed for
/// the whole proof.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequent {
    pub psi: Vec<Name>,
    pub sigma: Vec<(Name, Ty)>,
    pub hyps: Vec<Hyp>,
    pub goal: Formula,
    /// Number used for the next `H` label.
    pub next_label: u32,
    /// Generation tag for the next induction.
    pub next_gen: u32,
}

impl Sequent {
    pub fn new(psi: Vec<Name>, goal: Formula) -> Self {
        Sequent { psi, sigma: Vec::new(), hyps: Vec::new(), goal, next_label: 1, next_gen: 1 }
    }

    pub fn hyp(&self, label: &str) -> Option<&Hyp> {
        self.hyps.iter().find(|h| &*h.label == label)
    }

    pub fn remove_hyp(&mut self, label: &str) -> Option<Hyp> {
        let i = self.hyps.iter().position(|h| &*h.label == label)?;
        Some(self.hyps.remove(i))
    }

    pub fn push_hyp(&mut self, formula: Formula) -> Name {
        let label = Name::from(format!("H{}", self.next_label));
        self.next_label += 1;
        self.hyps.push(Hyp { label: label.clone(), formula });
        label
    }

    pub fn push_named(&mut self, base: &str, formula: Formula) -> Name {
        let label = unique_name(base, &|n| self.hyps.iter().any(|h| &*h.label == n));
        self.hyps.push(Hyp { label: label.clone(), formula });
        label
    }

    pub fn has_eigen(&self, name: &str) -> bool {
        self.sigma.iter().any(|(n, _)| &**n == name)
    }

    pub fn eigen_type(&self, name: &str) -> Option<&Ty> {
        self.sigma.iter().find(|(n, _)| &**n == name).map(|(_, t)| t)
    }

    /// Adds a fresh eigenvariable named after `hint`.
    pub fn fresh_eigen(&mut self, hint: &str, ty: Ty) -> Term {
        let name = self.fresh_eigen_name(hint);
        self.sigma.push((name.clone(), ty.clone()));
        Term::Eigen(name, ty)
    }

    pub fn fresh_eigen_name(&self, hint: &str) -> Name {
        let base = eigen_base(hint);
        unique_name(&base, &|n| self.has_eigen(n))
    }

    pub fn subst(&mut self, theta: &TermSubst) {
        for h in &mut self.hyps {
            h.formula = h.formula.subst(theta);
        }
        self.goal = self.goal.subst(theta);
    }

    /// Checks the structural invariants: closed under `psi` and `sigma`,
    /// no metas, distinct labels, every formula well-typed.
    pub fn lint(&self, sig: &Signature) -> Result<(), String> {
        let mut labels: Vec<&Name> = Vec::new();
        for h in &self.hyps {
            if labels.contains(&&h.label) {
                return Err(format!("duplicate label {}", h.label));
            }
            labels.push(&h.label);
        }
        for (n, t) in &self.sigma {
            sig.wf_type(t, &self.psi).map_err(|e| format!("eigenvariable {n}: {e}"))?;
        }
        let formulas = self.hyps.iter().map(|h| &h.formula).chain(std::iter::once(&self.goal));
        for f in formulas {
            crate::syntax::typing::wf_formula(sig, f, &self.psi).map_err(|e| e.to_string())?;
            check_formula(sig, &[], f).map_err(|e| e.to_string())?;
            let mut free = Vec::new();
            f.collect_free(&mut free);
            for v in free {
                match v {
                    Term::Meta(n, _) => return Err(format!("unresolved meta {n}")),
                    Term::Eigen(n, t) => match self.eigen_type(&n) {
                        Some(s) if *s == t => {}
                        Some(s) => return Err(format!("eigenvariable {n} used at {t}, declared {s}")),
                        None => return Err(format!("eigenvariable {n} is not declared")),
                    },
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, printer: &Printer) -> String {
        let mut out = String::new();
        if !self.psi.is_empty() {
            let _ = writeln!(out, "[{}]", crate::syntax::ty::join(&self.psi, ", "));
        }
        if !self.sigma.is_empty() {
            let vars: Vec<String> = self.sigma.iter().map(|(n, t)| format!("{n}:{t}")).collect();
            let _ = writeln!(out, "Variables: {}", vars.join(" "));
        }
        for h in &self.hyps {
            let _ = writeln!(out, "{} : {}", h.label, printer.formula(&h.formula));
        }
        let _ = writeln!(out, "============================");
        let _ = writeln!(out, " {}", printer.formula(&self.goal));
        out
    }

    /// A one-line form used in proof-tree listings.
    pub fn one_line(&self, printer: &Printer) -> String {
        let vars: Vec<String> = self.sigma.iter().map(|(n, t)| format!("{n}:{t}")).collect();
        let hyps: Vec<String> = self.hyps.iter().map(|h| format!("{}: {}", h.label, printer.formula(&h.formula))).collect();
        format!(
            "[{}] {{{}}} {} |- {}",
            crate::syntax::ty::join(&self.psi, ", "),
            vars.join(", "),
            hyps.join("; "),
            printer.formula(&self.goal)
        )
    }
}
