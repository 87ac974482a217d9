//! Subcommand drivers. Each returns the complete stdout text; errors map to
//! exit codes through [`crate::Error::exit_code`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::cli::expr::parse_poly;
use crate::cli::spec::{parse_spec, ParsedSpec};
use crate::groebner::Ideal;
use crate::modification::{self, ModificationInput};
use crate::poly::Poly;
use crate::rees::{self, GradedGenerator, ReesPresentation};
use crate::{Error, Result};

/// One subcommand with its own arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Check,
    Exp { element: String },
    Degree { element: String },
    Member { element: String, level: u32 },
    Rees { prune: bool },
    Gr,
    Kernel,
    DegreeModule { level: u32 },
    Proj,
    Modify { ideal: String, divisor: String, verify_lemma: bool },
    VerifyExamples { dir: PathBuf },
}

/// A full invocation: spec text plus global settings.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub spec: String,
    pub command: Command,
    pub validate: bool,
    pub bound: Option<u32>,
    pub max_iter: Option<u32>,
}

/// Rendered output plus the number of fixture failures; only
/// `verify-examples` can produce a nonzero count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub failures: u32,
}

impl CommandOutput {
    fn clean(text: String) -> CommandOutput {
        CommandOutput { text, failures: 0 }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures > 0 {
            1
        } else {
            0
        }
    }
}

/// Dispatches a command and renders its output.
pub fn run_command(inv: &Invocation) -> Result<CommandOutput> {
    if let Command::VerifyExamples { dir } = &inv.command {
        return verify_examples(dir);
    }
    let spec = parse_spec(&inv.spec, inv.validate, inv.bound)?;
    let max_iter = inv
        .max_iter
        .or(spec.options.max_iter)
        .unwrap_or(rees::DEFAULT_MAX_ITER);
    let text = match &inv.command {
        Command::Check => check(&spec),
        Command::Exp { element } => exp(&spec, element),
        Command::Degree { element } => degree(&spec, element),
        Command::Member { element, level } => member(&spec, element, *level),
        Command::Rees { prune } => rees_cmd(&spec, max_iter, *prune),
        Command::Gr => gr(&spec, max_iter),
        Command::Kernel => kernel(&spec, max_iter),
        Command::DegreeModule { level } => degree_module(&spec, max_iter, *level),
        Command::Proj => proj(&spec, max_iter),
        Command::Modify { ideal, divisor, verify_lemma } => {
            modify(&spec, max_iter, ideal, divisor, *verify_lemma)
        }
        Command::VerifyExamples { .. } => unreachable!("handled above"),
    }?;
    Ok(CommandOutput::clean(text))
}

fn resolved_bound(spec: &ParsedSpec, fallback: Option<u32>) -> u32 {
    if spec.derivation.is_validated_nilpotent() {
        spec.derivation.nilpotency_bound_used()
    } else {
        fallback
            .or(spec.options.bound)
            .unwrap_or(crate::lnd::DEFAULT_NILPOTENCY_BOUND)
    }
}

fn check(spec: &ParsedSpec) -> Result<String> {
    let d = &spec.derivation;
    let bound = resolved_bound(spec, None);
    let mut out = String::new();
    let well_defined = if d.is_well_defined() {
        true
    } else {
        crate::lnd::check_derivation(d.algebra(), d.images()).is_ok()
    };
    writeln!(out, "well-defined: {well_defined}").unwrap();
    if !well_defined {
        return Ok(out);
    }
    let nilpotent = d.is_validated_nilpotent() || d.is_locally_nilpotent(bound)?;
    writeln!(out, "locally nilpotent: {nilpotent} (bound {bound})").unwrap();
    if !nilpotent {
        return Ok(out);
    }
    writeln!(out, "nil-degrees:").unwrap();
    let degrees = d.variable_nil_degrees(bound)?;
    for (name, deg) in d.algebra().ring().var_names().iter().zip(degrees) {
        writeln!(out, "  {name}: {deg}").unwrap();
    }
    Ok(out)
}

fn exp(spec: &ParsedSpec, element: &str) -> Result<String> {
    let p = parse_poly(element, spec.algebra().ring())?;
    let image = spec.derivation.exp_t(&p)?;
    Ok(format!("{image}\n"))
}

fn degree(spec: &ParsedSpec, element: &str) -> Result<String> {
    let p = parse_poly(element, spec.algebra().ring())?;
    let bound = resolved_bound(spec, None);
    let deg = spec.derivation.nil_degree(&p, bound)?;
    Ok(format!("{deg}\n"))
}

fn member(spec: &ParsedSpec, element: &str, level: u32) -> Result<String> {
    let p = parse_poly(element, spec.algebra().ring())?;
    let verdict = spec.derivation.in_filtration(&p, level)?;
    Ok(format!("{verdict}\n"))
}

/// Renders a generator block: one line of `label:weight` pairs, then the
/// defining polynomial of every non-variable generator.
fn generator_block(out: &mut String, generators: &[GradedGenerator], ring_names: &[String]) {
    let pairs: Vec<String> = generators
        .iter()
        .map(|g| format!("{}:{}", g.label, g.weight))
        .collect();
    writeln!(out, "generators: {}", pairs.join(" ")).unwrap();
    for g in generators {
        let is_variable = ring_names.iter().any(|n| *n == g.label);
        if !is_variable && g.label != rees::UPSILON {
            writeln!(out, "  {} = {}", g.label, g.element).unwrap();
        }
    }
}

fn relation_block(out: &mut String, relations: &Ideal) -> Result<()> {
    writeln!(out, "relations:").unwrap();
    let gb = relations.reduced_gb()?;
    if gb.is_empty() {
        writeln!(out, "  (0)").unwrap();
    }
    for p in gb {
        writeln!(out, "  {}", p.format(relations.order())).unwrap();
    }
    Ok(())
}

fn presented(spec: &ParsedSpec, max_iter: u32) -> Result<ReesPresentation> {
    let (presentation, _) = rees::rees_algorithm(&spec.derivation, max_iter)?;
    Ok(presentation)
}

fn rees_cmd(spec: &ParsedSpec, max_iter: u32, prune: bool) -> Result<String> {
    let mut presentation = presented(spec, max_iter)?;
    if prune {
        presentation = rees::prune_generators(&presentation)?;
    }
    let mut out = String::new();
    generator_block(&mut out, presentation.generators(), spec.algebra().ring().var_names());
    relation_block(&mut out, presentation.relations())?;
    Ok(out)
}

fn gr(spec: &ParsedSpec, max_iter: u32) -> Result<String> {
    let presentation = presented(spec, max_iter)?;
    let graded = rees::associated_graded(&presentation)?;
    let mut out = String::new();
    generator_block(&mut out, &graded.generators, spec.algebra().ring().var_names());
    relation_block(&mut out, &graded.relations)?;
    Ok(out)
}

fn kernel(spec: &ParsedSpec, max_iter: u32) -> Result<String> {
    let presentation = presented(spec, max_iter)?;
    let gens = rees::kernel_generators(&presentation);
    if gens.is_empty() {
        return Ok("1\n".to_string());
    }
    let elements: Vec<String> = gens.iter().map(|g| g.element.to_string()).collect();
    Ok(format!("{}\n", elements.join(", ")))
}

fn degree_module(spec: &ParsedSpec, max_iter: u32, level: u32) -> Result<String> {
    let presentation = presented(spec, max_iter)?;
    let gens = rees::degree_module_gens(&presentation, level)?;
    let rendered: Vec<String> = gens.iter().map(Poly::to_string).collect();
    Ok(format!("{}\n", rendered.join(", ")))
}

fn proj(spec: &ParsedSpec, max_iter: u32) -> Result<String> {
    let presentation = presented(spec, max_iter)?;
    rees::proj_report(&presentation)
}

fn modify(
    spec: &ParsedSpec,
    max_iter: u32,
    ideal: &str,
    divisor: &str,
    verify_lemma: bool,
) -> Result<String> {
    let ring = spec.algebra().ring();
    let gens = ideal
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_poly(s, ring))
        .collect::<Result<Vec<_>>>()?;
    let divisor = parse_poly(divisor, ring)?;
    let input = ModificationInput::new(&spec.derivation, gens, divisor)?;
    let report = modification::check_invariants(&input)?;
    if !report.passes() {
        let rows: Vec<String> =
            report.ideal_invariant.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidInput(format!(
            "invariance checks failed (divisor in ideal: {}; divisor invariant: {}; ideal invariant: {})",
            report.divisor_in_ideal,
            report.divisor_invariant,
            rows.join(", "),
        )));
    }
    let output = modification::modify(&input)?;
    let mut out = String::new();
    writeln!(out, "ring: {}", output.algebra.ring().var_names().join(", ")).unwrap();
    relation_block(&mut out, output.algebra.defining_ideal())?;
    writeln!(out, "derivation:").unwrap();
    for (name, image) in output
        .algebra
        .ring()
        .var_names()
        .iter()
        .zip(output.derivation.images())
    {
        writeln!(out, "  {name} -> {image}").unwrap();
    }
    if verify_lemma {
        let verdict = modification::verify_rees_modification(&input, max_iter)?;
        writeln!(out, "filtration subalgebra commutes: {verdict}").unwrap();
    }
    Ok(out)
}

/// Runs `rees` on every `*.lnd` file in the directory and compares the
/// output byte for byte against the matching `.golden` file.
fn verify_examples(dir: &Path) -> Result<CommandOutput> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "lnd"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no .lnd fixtures found in {}",
            dir.display()
        )));
    }
    let mut out = String::new();
    let mut failures = 0u32;
    for path in &entries {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        match run_fixture(path) {
            Ok(None) => writeln!(out, "{name}: PASS").unwrap(),
            Ok(Some(reason)) => {
                failures += 1;
                writeln!(out, "{name}: FAIL ({reason})").unwrap();
            }
            Err(e) => {
                failures += 1;
                writeln!(out, "{name}: FAIL ({e})").unwrap();
            }
        }
    }
    Ok(CommandOutput { text: out, failures })
}

/// Ok(None) on a byte-exact match, Ok(Some(reason)) on a clean mismatch.
fn run_fixture(path: &Path) -> Result<Option<String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let golden_path = path.with_extension("golden");
    let golden = fs::read_to_string(&golden_path).map_err(|e| {
        Error::InvalidInput(format!("cannot read {}: {e}", golden_path.display()))
    })?;
    let inv = Invocation {
        spec: text,
        command: Command::Rees { prune: false },
        validate: true,
        bound: None,
        max_iter: None,
    };
    let actual = run_command(&inv)?;
    if actual.text == golden {
        Ok(None)
    } else {
        Ok(Some("output differs from golden".to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL2: &str = "ring: x, y, u, v\nrelations: x*v - y*u - 1\nderivation: u -> x; v -> y\n";
    const LINE: &str = "ring: t\nderivation: t -> 1\n";
    const TRIANGULAR: &str =
        "ring: x, t, y, z\nderivation: y -> x^2; z -> 2*y\n";
    const DANIELEWSKI: &str =
        "ring: x, y, z\nrelations: x*z - y^2 + 1\nderivation: y -> x; z -> 2*y\n";

    fn run(spec: &str, command: Command) -> Result<String> {
        run_command(&Invocation {
            spec: spec.to_string(),
            command,
            validate: true,
            bound: None,
            max_iter: None,
        })
        .map(|o| o.text)
    }

    #[test]
    fn check_reports_nil_degrees() {
        let out = run(SL2, Command::Check).unwrap();
        assert_eq!(
            out,
            "well-defined: true\nlocally nilpotent: true (bound 64)\nnil-degrees:\n  x: 0\n  y: 0\n  u: 1\n  v: 1\n"
        );
    }

    fn run_unvalidated(spec: &str, command: Command) -> Result<String> {
        run_command(&Invocation {
            spec: spec.to_string(),
            command,
            validate: false,
            bound: None,
            max_iter: None,
        })
        .map(|o| o.text)
    }

    #[test]
    fn check_without_validation_reports_failures() {
        let out = run_unvalidated("ring: x\nderivation: x -> x\n", Command::Check).unwrap();
        assert_eq!(out, "well-defined: true\nlocally nilpotent: false (bound 64)\n");

        let out = run_unvalidated(
            "ring: x, y\nrelations: x*y - 1\nderivation: y -> 1\n",
            Command::Check,
        )
        .unwrap();
        assert_eq!(out, "well-defined: false\n");
    }

    #[test]
    fn exp_expands_the_flow() {
        let out = run(SL2, Command::Exp { element: "u".into() }).unwrap();
        assert_eq!(out, "x*t + u\n");
        // the parameter avoids declared names
        let out = run(TRIANGULAR, Command::Exp { element: "z".into() }).unwrap();
        assert_eq!(out, "x^2*s^2 + 2*y*s + z\n");
    }

    #[test]
    fn degree_and_membership() {
        assert_eq!(run(SL2, Command::Degree { element: "u*v".into() }).unwrap(), "2\n");
        assert_eq!(
            run(SL2, Command::Member { element: "u*v".into(), level: 1 }).unwrap(),
            "false\n"
        );
        assert_eq!(
            run(SL2, Command::Member { element: "u*v".into(), level: 2 }).unwrap(),
            "true\n"
        );
    }

    #[test]
    fn rees_on_sl2() {
        let out = run(SL2, Command::Rees { prune: false }).unwrap();
        assert_eq!(
            out,
            "generators: x:0 y:0 u:1 v:1 upsilon:1\nrelations:\n  x*v - y*u - upsilon\n"
        );
    }

    #[test]
    fn rees_on_the_line_has_no_relations() {
        let out = run(LINE, Command::Rees { prune: false }).unwrap();
        assert_eq!(out, "generators: t:1 upsilon:1\nrelations:\n  (0)\n");
    }

    #[test]
    fn rees_shows_discovered_generators() {
        let out = run(TRIANGULAR, Command::Rees { prune: false }).unwrap();
        assert_eq!(
            out,
            "generators: x:0 t:0 g1:0 y:1 upsilon:1 z:2\n  g1 = x^2*z - y^2\nrelations:\n  x^2*z - g1*upsilon^2 - y^2\n"
        );
    }

    #[test]
    fn gr_drops_upsilon() {
        let out = run(SL2, Command::Gr).unwrap();
        assert_eq!(out, "generators: x:0 y:0 u:1 v:1\nrelations:\n  x*v - y*u\n");
    }

    #[test]
    fn kernel_lists_invariants() {
        assert_eq!(
            run(TRIANGULAR, Command::Kernel).unwrap(),
            "x, t, x^2*z - y^2\n"
        );
        assert_eq!(run(LINE, Command::Kernel).unwrap(), "1\n");
    }

    #[test]
    fn degree_module_generators() {
        assert_eq!(
            run(SL2, Command::DegreeModule { level: 1 }).unwrap(),
            "1, u, v\n"
        );
        assert_eq!(
            run(SL2, Command::DegreeModule { level: 2 }).unwrap(),
            "1, u, v, u^2, u*v, v^2\n"
        );
        assert_eq!(
            run(DANIELEWSKI, Command::DegreeModule { level: 2 }).unwrap(),
            "1, y, x*z + 1, z\n"
        );
    }

    #[test]
    fn proj_renders_the_report() {
        let out = run(SL2, Command::Proj).unwrap();
        assert!(out.starts_with("ambient: P(1, 1, 1) over k[x, y]\n"));
    }

    #[test]
    fn modify_blows_up_the_origin() {
        let out = run(
            "ring: x, y\nderivation: y -> x\n",
            Command::Modify { ideal: "x; y".into(), divisor: "x".into(), verify_lemma: true },
        )
        .unwrap();
        assert_eq!(
            out,
            "ring: x, y, t1, t2\nrelations:\n  t1 - 1\n  x*t2 - y\nderivation:\n  x -> 0\n  y -> x\n  t1 -> 0\n  t2 -> 1\nfiltration subalgebra commutes: true\n"
        );
    }

    #[test]
    fn modify_rejects_a_noninvariant_divisor() {
        let result = run(
            "ring: x, y\nderivation: y -> x\n",
            Command::Modify { ideal: "x; y".into(), divisor: "y".into(), verify_lemma: false },
        );
        match result {
            Err(Error::InvalidInput(msg)) => {
                assert_eq!(
                    msg,
                    "invariance checks failed (divisor in ideal: true; divisor invariant: false; ideal invariant: true, true)"
                );
            }
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn max_iter_resolution_prefers_the_flag() {
        let spec = format!("{TRIANGULAR}options: max_iter = 0\n");
        let result = run(&spec, Command::Rees { prune: false });
        assert!(matches!(result, Err(Error::NonTermination { max_iter: 0, .. })));
        let out = run_command(&Invocation {
            spec,
            command: Command::Rees { prune: false },
            validate: true,
            bound: None,
            max_iter: Some(4),
        })
        .unwrap();
        assert!(out.text.contains("g1 = x^2*z - y^2"));
    }

    #[test]
    fn verify_examples_reports_per_fixture() {
        let dir = std::env::temp_dir().join("reesalg-fixture-test");
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("a_line.lnd"), LINE).unwrap();
        fs::write(dir.join("a_line.golden"), "generators: t:1 upsilon:1\nrelations:\n  (0)\n")
            .unwrap();
        fs::write(dir.join("b_sl2.lnd"), SL2).unwrap();
        fs::write(dir.join("b_sl2.golden"), "stale\n").unwrap();
        let verify = |dir: &PathBuf| {
            run_command(&Invocation {
                spec: String::new(),
                command: Command::VerifyExamples { dir: dir.clone() },
                validate: true,
                bound: None,
                max_iter: None,
            })
            .unwrap()
        };
        let out = verify(&dir);
        assert_eq!(out.text, "a_line: PASS\nb_sl2: FAIL (output differs from golden)\n");
        assert_eq!((out.failures, out.exit_code()), (1, 1));

        fs::write(dir.join("b_sl2.golden"), run(SL2, Command::Rees { prune: false }).unwrap())
            .unwrap();
        let out = verify(&dir);
        assert_eq!(out.text, "a_line: PASS\nb_sl2: PASS\n");
        assert_eq!((out.failures, out.exit_code()), (0, 0));
        let _ = fs::remove_dir_all(&dir);
    }
}
