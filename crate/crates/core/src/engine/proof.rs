use std::fmt::Write as _;

use super::{apply_step, CaseInfo, Env, RuleError, Sequent, Step};
use crate::syntax::Printer;

/// A finished derivation. Each node records the rule applied to its sequent.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofTree {
    pub sequent: Sequent,
    pub step: Step,
    pub cases: Vec<CaseInfo>,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn is_admitted(&self) -> bool {
        matches!(self.step, Step::Skip) || self.children.iter().any(ProofTree::is_admitted)
    }

    pub fn for_each(&self, f: &mut impl FnMut(&ProofTree)) {
        f(self);
        for c in &self.children {
            c.for_each(f);
        }
    }

    /// Re-applies every step and compares the premises with the recorded
    /// children.
    pub fn replay(&self, env: Env<'_>) -> Result<(), RuleError> {
        let applied = apply_step(env, &self.sequent, &self.step)?;
        if applied.premises.len() != self.children.len() {
            return Err(RuleError::Invalid(format!(
                "{} produced {} premise(s), the proof records {}",
                self.step.name(),
                applied.premises.len(),
                self.children.len()
            )));
        }
        for (p, c) in applied.premises.iter().zip(&self.children) {
            if *p != c.sequent {
                return Err(RuleError::Invalid(format!("{} produced a different premise", self.step.name())));
            }
            c.replay(env)?;
        }
        Ok(())
    }

    /// Stable textual form: one line per node, indented by depth.
    pub fn canonical(&self) -> String {
        let printer = Printer { show_instances: true };
        let mut out = String::new();
        self.write_canonical(&printer, 0, &mut out);
        out
    }

    fn write_canonical(&self, printer: &Printer, depth: usize, out: &mut String) {
        let _ = writeln!(out, "{:indent$}{}  ==>  {}", "", self.sequent.one_line(printer), self.step, indent = depth * 2);
        for c in &self.children {
            c.write_canonical(printer, depth + 1, out);
        }
    }
}
